//! Points, multi-indices and stencil point sets.
//!
//! Every matrix and vector layout in the crate follows the graded
//! lexicographic multi-index order produced by [`enumerate_multi_indices`].

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point in `R^d` with finite coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidArgument("a point needs at least one coordinate".into()));
        }
        if let Some(c) = coords.iter().find(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite coordinate {c}")));
        }
        Ok(Self(coords))
    }

    pub fn origin(dim: usize) -> Self {
        Self(vec![0.0; dim.max(1)])
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Componentwise `self - other`.
    pub fn sub(&self, other: &Point) -> Vec<f64> {
        self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect()
    }

    pub fn dist(&self, other: &Point) -> f64 {
        norm(&self.sub(other))
    }

    /// `self + t * (other - self)`
    pub fn lerp(&self, other: &Point, t: f64) -> Point {
        Point(self.0.iter().zip(&other.0).map(|(a, b)| a + t * (b - a)).collect())
    }
}

impl TryFrom<Vec<f64>> for Point {
    type Error = Error;

    fn try_from(coords: Vec<f64>) -> Result<Self> {
        Point::new(coords)
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Self {
        p.0
    }
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Exponent vector `α` of a monomial or partial derivative.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        Self(exponents)
    }

    pub fn zero(dim: usize) -> Self {
        Self(vec![0; dim])
    }

    /// `e_axis` scaled by `order`.
    pub fn axis(dim: usize, axis: usize, order: u32) -> Self {
        let mut e = vec![0; dim];
        e[axis] = order;
        Self(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Total degree `|α|`.
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `α! = α_1! ⋯ α_d!`
    pub fn factorial(&self) -> f64 {
        self.0.iter().map(|&a| factorial(a)).product()
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Evaluates the monomial `v^α`.
    pub fn monomial(&self, v: &[f64]) -> f64 {
        self.0.iter().zip(v).map(|(&a, &x)| x.powi(a as i32)).product()
    }

    /// Multinomial coefficient `|α|! / α!`.
    pub fn multinomial(&self) -> f64 {
        factorial(self.order()) / self.factorial()
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

pub(crate) fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// All multi-indices in `d` variables with `|α| ≤ max_total_degree`, in graded
/// lexicographic order: by total degree, then by decreasing leading exponents.
pub fn enumerate_multi_indices(d: usize, max_total_degree: u32) -> Vec<MultiIndex> {
    assert!(d >= 1, "dimension must be positive");
    let mut out = Vec::new();
    let mut scratch = vec![0u32; d];
    for degree in 0..=max_total_degree {
        fill_degree(&mut scratch, 0, degree, &mut out);
    }
    out
}

fn fill_degree(scratch: &mut Vec<u32>, pos: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
    if pos + 1 == scratch.len() {
        scratch[pos] = remaining;
        out.push(MultiIndex(scratch.clone()));
        return;
    }
    for a in (0..=remaining).rev() {
        scratch[pos] = a;
        fill_degree(scratch, pos + 1, remaining - a, out);
    }
}

/// Multi-indices with `|α| = degree` exactly, in the same order.
pub fn multi_indices_of_degree(d: usize, degree: u32) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    let mut scratch = vec![0u32; d];
    fill_degree(&mut scratch, 0, degree, &mut out);
    out
}

/// Evaluation point `z` together with the stencil nodes `X`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointSet {
    center: Point,
    nodes: Vec<Point>,
}

impl PointSet {
    pub fn new(center: Point, nodes: Vec<Point>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidArgument("a point set needs at least one node".into()));
        }
        let d = center.dim();
        if let Some(bad) = nodes.iter().find(|x| x.dim() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: bad.dim(),
            });
        }
        Ok(Self { center, nodes })
    }

    /// Convenience constructor for one-dimensional sets.
    pub fn from_1d(center: f64, nodes: &[f64]) -> Result<Self> {
        Self::new(
            Point::new(vec![center])?,
            nodes.iter().map(|&x| Point::new(vec![x])).collect::<Result<_>>()?,
        )
    }

    pub fn center(&self) -> &Point {
        &self.center
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    /// `h_{z,X} = max_j ‖z − x_j‖₂`.
    pub fn stencil_radius(&self) -> f64 {
        self.nodes.iter().map(|x| self.center.dist(x)).fold(0.0, f64::max)
    }

    /// Diameter of `S_{z,X}`, the union of the segments `[z, x_j]`. This is the
    /// radius of the ball `B_{z,X}` on which kernel smoothness is measured.
    pub fn segment_diameter(&self) -> f64 {
        let mut diam = self.stencil_radius();
        for (i, a) in self.nodes.iter().enumerate() {
            for b in &self.nodes[i + 1..] {
                diam = diam.max(a.dist(b));
            }
        }
        diam
    }

    /// Dilation about the center: `x_j ↦ z + h (x_j − z)`.
    pub fn scale(&self, h: f64) -> Result<PointSet> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "scale factor must be positive, got {h}"
            )));
        }
        let nodes = self
            .nodes
            .iter()
            .map(|x| Point(self.center.0.iter().zip(&x.0).map(|(z, x)| z + h * (x - z)).collect()))
            .collect();
        Ok(PointSet {
            center: self.center.clone(),
            nodes,
        })
    }

    /// Pairs `(i, j)`, `i < j`, of nodes with identical coordinates.
    pub fn duplicate_nodes(&self) -> Vec<(usize, usize)> {
        let mut dups = Vec::new();
        for (i, a) in self.nodes.iter().enumerate() {
            for (j, b) in self.nodes.iter().enumerate().skip(i + 1) {
                if a == b {
                    dups.push((i, j));
                }
            }
        }
        dups
    }

    /// Index of the first node coinciding with the center, if any.
    pub fn center_index(&self) -> Option<usize> {
        self.nodes.iter().position(|x| *x == self.center)
    }
}
