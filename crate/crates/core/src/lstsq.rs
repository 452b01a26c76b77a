//! Least squares for tall systems with three unknowns, by one-sided Jacobi SVD.
//!
//! Works on the (row-scaled) design matrix directly rather than on the normal
//! equations, so conditioning is not squared.

use alloc::vec::Vec;

use crate::{Error, Result};

/// Smallest-to-largest singular value ratio below which a system is rank deficient.
pub(crate) const RANK_TOL: f64 = 1e-10;

const MAX_SWEEPS: usize = 60;
const ORTHO_TOL: f64 = 1e-15;

/// Accumulates rows `(a, b, w)` of `min Σ w (aᵀx - b)²`.
#[derive(Debug, Default)]
pub(crate) struct Lstsq3 {
    cols: [Vec<f64>; 3],
    rhs: Vec<f64>,
}

impl Lstsq3 {
    pub(crate) fn with_capacity(rows: usize) -> Self {
        Self {
            cols: [
                Vec::with_capacity(rows),
                Vec::with_capacity(rows),
                Vec::with_capacity(rows),
            ],
            rhs: Vec::with_capacity(rows),
        }
    }

    pub(crate) fn push(&mut self, row: [f64; 3], rhs: f64, weight: f64) {
        let s = libm::sqrt(weight);
        for (c, a) in self.cols.iter_mut().zip(row) {
            c.push(s * a);
        }
        self.rhs.push(s * rhs);
    }

    /// Solves the accumulated problem, consuming the workspace.
    pub(crate) fn solve(mut self) -> Result<[f64; 3]> {
        if self.rhs.len() < 3 {
            return Err(Error::DegenerateGeometry("fewer rows than unknowns"));
        }
        // V accumulates the right rotations; columns of M·V become U·Σ.
        let mut v = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        for _ in 0..MAX_SWEEPS {
            let mut rotated = false;
            for (p, q) in [(0, 1), (0, 2), (1, 2)] {
                let (alpha, beta, gamma) = {
                    let (cp, cq) = (&self.cols[p], &self.cols[q]);
                    let mut alpha = 0.0;
                    let mut beta = 0.0;
                    let mut gamma = 0.0;
                    for (a, b) in cp.iter().zip(cq) {
                        alpha += a * a;
                        beta += b * b;
                        gamma += a * b;
                    }
                    (alpha, beta, gamma)
                };
                if gamma == 0.0 || libm::fabs(gamma) <= ORTHO_TOL * libm::sqrt(alpha * beta) {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = libm::copysign(1.0, zeta) / (libm::fabs(zeta) + libm::hypot(1.0, zeta));
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = c * t;
                let [c0, c1, c2] = &mut self.cols;
                let (cp, cq) = match (p, q) {
                    (0, 1) => (c0, c1),
                    (0, 2) => (c0, c2),
                    _ => (c1, c2),
                };
                for (a, b) in cp.iter_mut().zip(cq.iter_mut()) {
                    let (x, y) = (*a, *b);
                    *a = c * x - s * y;
                    *b = s * x + c * y;
                }
                for row in v.iter_mut() {
                    let (x, y) = (row[p], row[q]);
                    row[p] = c * x - s * y;
                    row[q] = s * x + c * y;
                }
            }
            if !rotated {
                break;
            }
        }

        let sq: [f64; 3] = core::array::from_fn(|j| self.cols[j].iter().map(|a| a * a).sum());
        let sigma_max = libm::sqrt(sq.iter().copied().fold(0.0, f64::max));
        let sigma_min = libm::sqrt(sq.iter().copied().fold(f64::INFINITY, f64::min));
        if !(sigma_max > 0.0) || !sigma_min.is_finite() || sigma_min < RANK_TOL * sigma_max {
            return Err(Error::DegenerateGeometry("rank-deficient linear system"));
        }

        // x = V Σ⁻² (MV)ᵀ b
        let coef: [f64; 3] = core::array::from_fn(|j| {
            let proj: f64 = self.cols[j].iter().zip(&self.rhs).map(|(a, b)| a * b).sum();
            proj / sq[j]
        });
        let x = core::array::from_fn(|i| (0..3).map(|j| v[i][j] * coef[j]).sum());
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_system() {
        let mut ls = Lstsq3::with_capacity(3);
        ls.push([2.0, 1.0, 0.0], 4.0, 1.0);
        ls.push([1.0, 3.0, 1.0], 10.0, 1.0);
        ls.push([0.0, 1.0, 4.0], 14.0, 1.0);
        let x = ls.solve().unwrap();
        for (a, b) in x.iter().zip([1.0, 2.0, 3.0]) {
            assert!(libm::fabs(a - b) < 1e-13);
        }
    }

    #[test]
    fn overdetermined_matches_normal_equations() {
        // Fit x to rows e1, e2, e3 with rhs 1 and e1 again with rhs 3: x0 = 2.
        let mut ls = Lstsq3::with_capacity(4);
        ls.push([1.0, 0.0, 0.0], 1.0, 1.0);
        ls.push([0.0, 1.0, 0.0], 1.0, 1.0);
        ls.push([0.0, 0.0, 1.0], 1.0, 1.0);
        ls.push([1.0, 0.0, 0.0], 3.0, 1.0);
        let x = ls.solve().unwrap();
        assert!(libm::fabs(x[0] - 2.0) < 1e-14);
        // Weight 3 on the last row: x0 = (1 + 9) / 4.
        let mut ls = Lstsq3::with_capacity(4);
        ls.push([1.0, 0.0, 0.0], 1.0, 1.0);
        ls.push([0.0, 1.0, 0.0], 1.0, 1.0);
        ls.push([0.0, 0.0, 1.0], 1.0, 1.0);
        ls.push([1.0, 0.0, 0.0], 3.0, 3.0);
        let x = ls.solve().unwrap();
        assert!(libm::fabs(x[0] - 2.5) < 1e-14);
    }

    #[test]
    fn rank_deficient_rejected() {
        let mut ls = Lstsq3::with_capacity(4);
        ls.push([1.0, 1.0, 0.0], 1.0, 1.0);
        ls.push([2.0, 2.0, 0.0], 2.0, 1.0);
        ls.push([0.0, 0.0, 1.0], 1.0, 1.0);
        ls.push([0.0, 0.0, 2.0], 1.0, 1.0);
        assert!(matches!(ls.solve(), Err(Error::DegenerateGeometry(_))));
        assert!(Lstsq3::with_capacity(0).solve().is_err());
    }
}
