//! Dense factorizations not offered by nalgebra in the needed form: a
//! column-pivoted Householder QR that keeps the full orthogonal factor, and a
//! Bunch–Kaufman `LDLᵀ` for symmetric indefinite matrices.

use nalgebra::{DMatrix, DVector};

/// `A Π = Q R` with `Q` square orthogonal and `|R_00| ≥ |R_11| ≥ …`.
#[derive(Clone, Debug)]
pub struct ColPivQr {
    q: DMatrix<f64>,
    r: DMatrix<f64>,
    perm: Vec<usize>,
}

impl ColPivQr {
    pub fn new(a: &DMatrix<f64>) -> Self {
        let (m, n) = a.shape();
        let mut r = a.clone();
        let mut q = DMatrix::<f64>::identity(m, m);
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..m.min(n) {
            let (pivot, best) = (k..n)
                .map(|j| (j, r.view((k, j), (m - k, 1)).norm_squared()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best <= 0.0 {
                break;
            }
            if pivot != k {
                r.swap_columns(k, pivot);
                perm.swap(k, pivot);
            }
            let x = r.view((k, k), (m - k, 1)).clone_owned();
            let xnorm = x.norm();
            let alpha = if x[0] >= 0.0 { -xnorm } else { xnorm };
            let mut v = x;
            v[0] -= alpha;
            let vnorm2 = v.norm_squared();
            if vnorm2 == 0.0 {
                continue;
            }
            // R ← H R on the trailing block
            for j in k..n {
                let dot: f64 = (0..m - k).map(|i| v[i] * r[(k + i, j)]).sum();
                let f = 2.0 * dot / vnorm2;
                for i in 0..m - k {
                    r[(k + i, j)] -= f * v[i];
                }
            }
            // Q ← Q H
            for i in 0..m {
                let dot: f64 = (0..m - k).map(|t| q[(i, k + t)] * v[t]).sum();
                let f = 2.0 * dot / vnorm2;
                for t in 0..m - k {
                    q[(i, k + t)] -= f * v[t];
                }
            }
            r[(k, k)] = alpha;
            for i in k + 1..m {
                r[(i, k)] = 0.0;
            }
        }
        Self { q, r, perm }
    }

    pub fn q(&self) -> &DMatrix<f64> {
        &self.q
    }

    pub fn r(&self) -> &DMatrix<f64> {
        &self.r
    }

    /// Column `i` of `A Π` is column `perm[i]` of `A`.
    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    /// Numerical rank: diagonal entries of `R` above `rel_tol · |R_00|`.
    pub fn rank(&self, rel_tol: f64) -> usize {
        let k = self.r.nrows().min(self.r.ncols());
        if k == 0 {
            return 0;
        }
        let top = self.r[(0, 0)].abs();
        if top == 0.0 {
            return 0;
        }
        (0..k).take_while(|&i| self.r[(i, i)].abs() > rel_tol * top).count()
    }
}

#[derive(Clone, Copy, Debug)]
enum PivotBlock {
    One(f64),
    Two(f64, f64, f64),
}

/// `P A Pᵀ = L D Lᵀ` with `D` block diagonal (1×1 and 2×2 blocks).
#[derive(Clone, Debug)]
pub struct SymmetricIndefinite {
    l: DMatrix<f64>,
    blocks: Vec<PivotBlock>,
    perm: Vec<usize>,
}

/// A pivot fell below the relative tolerance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NearSingular {
    pub step: usize,
}

impl SymmetricIndefinite {
    pub fn factor(a: &DMatrix<f64>, rel_tol: f64) -> Result<Self, NearSingular> {
        let n = a.nrows();
        assert_eq!(n, a.ncols());
        let mut a = a.clone();
        let mut l = DMatrix::<f64>::identity(n, n);
        let mut perm: Vec<usize> = (0..n).collect();
        let mut blocks = Vec::new();
        let amax = a.amax();
        if amax == 0.0 && n > 0 {
            return Err(NearSingular { step: 0 });
        }
        let growth = (1.0 + 17f64.sqrt()) / 8.0;
        let tol = rel_tol * amax;
        let mut k = 0;
        while k < n {
            let absakk = a[(k, k)].abs();
            let (imax, colmax) =
                (k + 1..n)
                    .map(|i| (i, a[(i, k)].abs()))
                    .fold((k, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if absakk.max(colmax) <= tol {
                return Err(NearSingular { step: k });
            }
            let (kp, size) = if absakk >= growth * colmax {
                (k, 1)
            } else {
                let rowmax = (k..n)
                    .filter(|&j| j != imax)
                    .map(|j| a[(imax, j)].abs())
                    .fold(0.0, f64::max);
                if absakk * rowmax >= growth * colmax * colmax {
                    (k, 1)
                } else if a[(imax, imax)].abs() >= growth * rowmax {
                    (imax, 1)
                } else {
                    (imax, 2)
                }
            };
            let kk = k + size - 1;
            if kp != kk {
                a.swap_rows(kk, kp);
                a.swap_columns(kk, kp);
                perm.swap(kk, kp);
                for j in 0..k {
                    let t = l[(kk, j)];
                    l[(kk, j)] = l[(kp, j)];
                    l[(kp, j)] = t;
                }
            }
            if size == 1 {
                let d = a[(k, k)];
                if d.abs() <= tol {
                    return Err(NearSingular { step: k });
                }
                for i in k + 1..n {
                    l[(i, k)] = a[(i, k)] / d;
                }
                for j in k + 1..n {
                    let ajk = a[(j, k)];
                    for i in k + 1..n {
                        a[(i, j)] -= l[(i, k)] * ajk;
                    }
                }
                blocks.push(PivotBlock::One(d));
                k += 1;
            } else {
                let d11 = a[(k, k)];
                let d21 = a[(k + 1, k)];
                let d22 = a[(k + 1, k + 1)];
                let det = d11 * d22 - d21 * d21;
                if det.abs() <= rel_tol * (d11 * d22).abs().max(d21 * d21) {
                    return Err(NearSingular { step: k });
                }
                for i in k + 2..n {
                    let c1 = a[(i, k)];
                    let c2 = a[(i, k + 1)];
                    l[(i, k)] = (c1 * d22 - c2 * d21) / det;
                    l[(i, k + 1)] = (c2 * d11 - c1 * d21) / det;
                }
                for j in k + 2..n {
                    let (a1, a2) = (a[(j, k)], a[(j, k + 1)]);
                    for i in k + 2..n {
                        a[(i, j)] -= l[(i, k)] * a1 + l[(i, k + 1)] * a2;
                    }
                }
                blocks.push(PivotBlock::Two(d11, d21, d22));
                k += 2;
            }
        }
        Ok(Self { l, blocks, perm })
    }

    pub fn solve(&self, b: &DVector<f64>) -> DVector<f64> {
        let n = self.perm.len();
        let mut y = DVector::from_iterator(n, self.perm.iter().map(|&p| b[p]));
        for i in 0..n {
            let s: f64 = (0..i).map(|j| self.l[(i, j)] * y[j]).sum();
            y[i] -= s;
        }
        let mut k = 0;
        for block in &self.blocks {
            match *block {
                PivotBlock::One(d) => {
                    y[k] /= d;
                    k += 1;
                }
                PivotBlock::Two(d11, d21, d22) => {
                    let det = d11 * d22 - d21 * d21;
                    let (y1, y2) = (y[k], y[k + 1]);
                    y[k] = (d22 * y1 - d21 * y2) / det;
                    y[k + 1] = (d11 * y2 - d21 * y1) / det;
                    k += 2;
                }
            }
        }
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| self.l[(j, i)] * y[j]).sum();
            y[i] -= s;
        }
        let mut x = DVector::zeros(n);
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = y[i];
        }
        x
    }

    /// `‖A‖₁ ‖A⁻¹‖₁`, with the inverse formed column by column.
    pub fn condition_1norm(&self, a: &DMatrix<f64>) -> f64 {
        let n = a.nrows();
        let norm1 = |m: &DMatrix<f64>| {
            (0..m.ncols())
                .map(|j| m.column(j).iter().map(|x| x.abs()).sum::<f64>())
                .fold(0.0, f64::max)
        };
        let mut inv = DMatrix::zeros(n, n);
        for j in 0..n {
            let mut e = DVector::zeros(n);
            e[j] = 1.0;
            inv.set_column(j, &self.solve(&e));
        }
        norm1(a) * norm1(&inv)
    }
}
