use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::geometry::Point;
use crate::kernels::DiffOperator;
use crate::{Error, Result};

/// Smooth functions with closed-form derivatives, used to measure the
/// observed differentiation error.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum TestFunction {
    /// `exp(c·x)`
    Exp { c: Vec<f64> },
    /// `sin(c·x + phase)`
    Sin {
        c: Vec<f64>,
        #[serde(default)]
        phase: f64,
    },
}

impl TestFunction {
    pub fn default_for(dim: usize) -> Self {
        const C: [f64; 3] = [1.0, 0.7, 0.4];
        let c = (0..dim).map(|i| C[i % C.len()] / (1 + i / C.len()) as f64).collect();
        TestFunction::Sin { c, phase: 0.3 }
    }

    fn wave(&self) -> &[f64] {
        match self {
            TestFunction::Exp { c } | TestFunction::Sin { c, .. } => c,
        }
    }

    pub fn check_dimension(&self, dim: usize) -> Result<()> {
        let found = self.wave().len();
        if found != dim {
            return Err(Error::DimensionMismatch { expected: dim, found });
        }
        Ok(())
    }

    fn phase_at(&self, x: &Point) -> f64 {
        self.wave().iter().zip(x.coords()).map(|(c, x)| c * x).sum()
    }

    pub fn eval(&self, x: &Point) -> f64 {
        let t = self.phase_at(x);
        match self {
            TestFunction::Exp { .. } => t.exp(),
            TestFunction::Sin { phase, .. } => (t + phase).sin(),
        }
    }

    pub fn apply_operator(&self, op: &DiffOperator, z: &Point) -> Result<f64> {
        self.check_dimension(op.dim())?;
        let t = self.phase_at(z);
        let c = self.wave();
        let mut acc = 0.0;
        for (alpha, coef) in op.terms() {
            let chain: f64 = alpha
                .exponents()
                .iter()
                .zip(c)
                .map(|(&a, c)| c.powi(a as i32))
                .product();
            let base = match self {
                TestFunction::Exp { .. } => t.exp(),
                TestFunction::Sin { phase, .. } => (t + phase + f64::from(alpha.order()) * FRAC_PI_2).sin(),
            };
            acc += coef * chain * base;
        }
        Ok(acc)
    }
}
