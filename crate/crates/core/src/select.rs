//! Residual-based identify-and-discard (IAD) data selection.
//!
//! Every `N`-subset of the measurements is solved with the weighted linear LS
//! estimator, keeping only the subset's rows of `A`, `b` and `W`, and the
//! subset whose size-normalized residual cost is smallest wins. The search
//! is seeded with the all-measurement estimate and its cost.

use alloc::vec::Vec;

use crate::geometry::{AnglePair, Point3};
use crate::report::{EstimateReport, Method};
use crate::wlls::{fit_wlls, solve_subset, LinearSystem};
use crate::{Error, Result};

/// Default maximum number of subsets an exhaustive search may visit.
pub const DEFAULT_ENUMERATION_CAP: u64 = 1_000_000;

/// Residuals closer than this to the incumbent do not replace it.
pub const TIE_TOLERANCE: f64 = 1e-15;

/// Residual cost `R(N, x) = (1/N) Σ_{i∈S} [(cᵢᵀ(x - xᵢ))² + ((k - ûᵢ sin φ̂ᵢ)ᵀ(x - xᵢ))²]`.
///
/// Unweighted; `subset` holds sensor ids and must be nonempty.
pub fn residual_cost(sys: &LinearSystem, subset: &[usize], x: Point3) -> f64 {
    let sum: f64 = subset
        .iter()
        .map(|&i| {
            let (a, e) = sys.residuals(i, x);
            a * a + e * e
        })
        .sum();
    sum / subset.len() as f64
}

/// `C(l, n)`, saturating at `u128::MAX`.
pub fn binomial(l: usize, n: usize) -> u128 {
    if n > l {
        return 0;
    }
    let n = n.min(l - n);
    let mut acc: u128 = 1;
    for i in 0..n {
        // acc * (l - i) is divisible by (i + 1) after the multiplication.
        acc = match acc.checked_mul((l - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Lexicographic iterator over the `n`-subsets of `0..l`.
#[derive(Debug, Clone)]
pub struct Combinations {
    l: usize,
    current: Vec<usize>,
    started: bool,
    done: bool,
}

impl Combinations {
    fn new(l: usize, n: usize) -> Self {
        Self {
            l,
            current: (0..n).collect(),
            started: false,
            done: n > l,
        }
    }

    /// Advances to the next subset without allocating.
    pub fn advance(&mut self) -> Option<&[usize]> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(&self.current);
        }
        let n = self.current.len();
        let mut i = n;
        while i > 0 {
            i -= 1;
            if self.current[i] < self.l - n + i {
                self.current[i] += 1;
                for j in i + 1..n {
                    self.current[j] = self.current[j - 1] + 1;
                }
                return Some(&self.current);
            }
        }
        self.done = true;
        None
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        self.advance().map(<[usize]>::to_vec)
    }
}

/// All `n`-subsets of `l` sensor ids in lexicographic order; requires `2 <= n <= l`.
pub fn enumerate_subsets(l: usize, n: usize) -> Result<Combinations> {
    if n < 2 || n > l {
        return Err(Error::SubsetSize { n, l });
    }
    Ok(Combinations::new(l, n))
}

/// The winning subset of a selection search.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsetSelection {
    /// Sorted sensor ids.
    pub indices: Vec<usize>,
    /// Weighted linear LS estimate over `indices`.
    pub estimate: Point3,
    /// Residual cost of `estimate` over `indices`.
    pub residual: f64,
    /// Subsets solved, not counting the seed.
    pub evaluated: usize,
    /// Subsets skipped as degenerate.
    pub degenerate: usize,
}

impl From<SubsetSelection> for EstimateReport {
    fn from(sel: SubsetSelection) -> Self {
        EstimateReport {
            method: Method::IadSelect,
            position: sel.estimate,
            residual: sel.residual,
            subset: Some(sel.indices),
            iterations: sel.evaluated,
            proposals: 0,
            truncated: false,
        }
    }
}

/// Runs the IAD search and returns the full selection record.
pub fn iad_search(
    measurements: &[AnglePair],
    sensors: &[Point3],
    n: usize,
    enumeration_cap: u64,
) -> Result<SubsetSelection> {
    let l = measurements.len();
    let mut combos = enumerate_subsets(l, n)?;
    let count = binomial(l, n);
    if count > enumeration_cap as u128 {
        return Err(Error::EnumerationCap {
            count,
            cap: enumeration_cap,
        });
    }
    let fit = fit_wlls(measurements, sensors)?;
    let all: Vec<usize> = (0..l).collect();
    let mut best = SubsetSelection {
        residual: residual_cost(&fit.system, &all, fit.estimate),
        indices: all,
        estimate: fit.estimate,
        evaluated: 0,
        degenerate: 0,
    };
    let weights = fit.weights.as_slice();
    while let Some(subset) = combos.advance() {
        let Ok(x) = solve_subset(&fit.system, subset, weights) else {
            best.degenerate += 1;
            continue;
        };
        best.evaluated += 1;
        let r = residual_cost(&fit.system, subset, x);
        if r < best.residual - TIE_TOLERANCE {
            best.residual = r;
            best.estimate = x;
            best.indices.clear();
            best.indices.extend_from_slice(subset);
        }
    }
    if best.evaluated == 0 {
        return Err(Error::EstimationFailure);
    }
    Ok(best)
}

/// IAD data selection with `n` measurements kept, using [`DEFAULT_ENUMERATION_CAP`].
pub fn iad_select(measurements: &[AnglePair], sensors: &[Point3], n: usize) -> Result<EstimateReport> {
    iad_search(measurements, sensors, n, DEFAULT_ENUMERATION_CAP).map(Into::into)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(10, 8), 45);
        assert_eq!(binomial(10, 10), 1);
        assert_eq!(binomial(3, 4), 0);
        assert_eq!(binomial(60, 30), 118_264_581_564_861_424);
        assert_eq!(binomial(300, 150), u128::MAX);
    }

    #[test]
    fn subset_counts_and_order() {
        let all: Vec<_> = enumerate_subsets(4, 2).unwrap().collect();
        assert_eq!(
            all,
            [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]].map(|a| a.to_vec())
        );
        assert_eq!(enumerate_subsets(10, 8).unwrap().count(), 45);
        let full: Vec<_> = enumerate_subsets(5, 5).unwrap().collect();
        assert_eq!(full, [alloc::vec![0, 1, 2, 3, 4]]);
        for l in 2..=12 {
            for n in 2..=l {
                assert_eq!(enumerate_subsets(l, n).unwrap().count() as u128, binomial(l, n));
            }
        }
    }

    #[test]
    fn subset_size_out_of_range() {
        assert_eq!(enumerate_subsets(4, 1).err(), Some(Error::SubsetSize { n: 1, l: 4 }));
        assert_eq!(enumerate_subsets(4, 5).err(), Some(Error::SubsetSize { n: 5, l: 4 }));
    }
}
