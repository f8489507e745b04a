//! Dense two-phase simplex for `min cᵀx` subject to `Ax = b`, `x ≥ 0`.
//!
//! Bland's rule is used for both entering and leaving variables, so the
//! method terminates on degenerate problems.

use nalgebra::DMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub objective: f64,
    /// Multipliers `y` with `c − Aᵀy ≥ 0` at optimality.
    pub duals: Vec<f64>,
}

struct Tableau {
    /// `m` constraint rows followed by the cost row; last column is the right-hand side.
    t: DMatrix<f64>,
    basis: Vec<usize>,
    m: usize,
    tol: f64,
}

impl Tableau {
    fn rhs(&self) -> usize {
        self.t.ncols() - 1
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.t[(row, col)];
        let cols = self.t.ncols();
        for j in 0..cols {
            self.t[(row, j)] /= p;
        }
        for i in 0..=self.m {
            if i == row {
                continue;
            }
            let f = self.t[(i, col)];
            if f != 0.0 {
                for j in 0..cols {
                    let v = self.t[(row, j)];
                    self.t[(i, j)] -= f * v;
                }
                self.t[(i, col)] = 0.0;
            }
        }
        self.basis[row] = col;
    }

    /// Runs Bland's rule over the columns in `allowed`; returns `false` when unbounded.
    fn optimize(&mut self, allowed: usize) -> bool {
        let rhs = self.rhs();
        loop {
            let entering = (0..allowed).find(|&j| self.t[(self.m, j)] < -self.tol);
            let Some(col) = entering else {
                return true;
            };
            let mut best: Option<(f64, usize, usize)> = None;
            for i in 0..self.m {
                let a = self.t[(i, col)];
                if a > self.tol {
                    let ratio = self.t[(i, rhs)] / a;
                    let better = match best {
                        None => true,
                        Some((r, _, b)) => {
                            ratio < r - self.tol * (1.0 + r.abs())
                                || (ratio <= r + self.tol * (1.0 + r.abs()) && self.basis[i] < b)
                        }
                    };
                    if better {
                        best = Some((ratio, i, self.basis[i]));
                    }
                }
            }
            match best {
                Some((_, row, _)) => self.pivot(row, col),
                None => return false,
            }
        }
    }
}

/// Solves the standard-form LP. `tol` is an absolute threshold on reduced costs
/// and pivots; inputs are expected to be scaled to order one.
pub fn solve(a: &DMatrix<f64>, b: &[f64], c: &[f64], tol: f64) -> LpSolution {
    let (m, n) = a.shape();
    assert_eq!(b.len(), m);
    assert_eq!(c.len(), n);
    let cols = n + m + 1;
    let mut t = DMatrix::zeros(m + 1, cols);
    let mut sign = vec![1.0; m];
    for i in 0..m {
        sign[i] = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            t[(i, j)] = sign[i] * a[(i, j)];
        }
        t[(i, n + i)] = 1.0;
        t[(i, cols - 1)] = sign[i] * b[i];
    }
    // phase one: minimize the sum of artificials
    for j in 0..cols {
        if j >= n && j < n + m {
            continue;
        }
        let s: f64 = (0..m).map(|i| t[(i, j)]).sum();
        t[(m, j)] = -s;
    }
    let mut tab = Tableau {
        t,
        basis: (n..n + m).collect(),
        m,
        tol,
    };
    tab.optimize(n + m);
    let bnorm = b.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    let infeas = -tab.t[(m, cols - 1)];
    if infeas > tol * (1.0 + bnorm) * (m as f64).max(1.0) {
        return LpSolution {
            status: LpStatus::Infeasible,
            x: vec![],
            objective: f64::INFINITY,
            duals: vec![],
        };
    }
    // drive artificials out of the basis where possible
    for i in 0..m {
        if tab.basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| tab.t[(i, j)].abs() > tol) {
                tab.pivot(i, j);
            }
        }
    }
    // phase two cost row
    for j in 0..cols {
        let cj = if j < n { c[j] } else { 0.0 };
        let s: f64 = (0..m)
            .map(|i| {
                let bi = tab.basis[i];
                let cb = if bi < n { c[bi] } else { 0.0 };
                cb * tab.t[(i, j)]
            })
            .sum();
        tab.t[(m, j)] = if j == cols - 1 { -s } else { cj - s };
    }
    let bounded = tab.optimize(n);
    let mut x = vec![0.0; n];
    for i in 0..m {
        if tab.basis[i] < n {
            x[tab.basis[i]] = tab.t[(i, cols - 1)];
        }
    }
    let duals = (0..m).map(|i| -sign[i] * tab.t[(m, n + i)]).collect();
    if !bounded {
        return LpSolution {
            status: LpStatus::Unbounded,
            x,
            objective: f64::NEG_INFINITY,
            duals: vec![],
        };
    }
    let objective = x.iter().zip(c).map(|(a, b)| a * b).sum();
    LpSolution {
        status: LpStatus::Optimal,
        x,
        objective,
        duals,
    }
}
