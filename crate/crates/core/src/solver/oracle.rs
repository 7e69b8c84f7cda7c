//! Grid-search oracle for small ensembles.

use rayon::prelude::*;
use serde::Serialize;

use super::Span;
use crate::ensemble::max_eigenvalue;
use crate::error::{Error, Result};
use crate::Ensemble;

/// Largest ensemble the oracle accepts.
pub const MAX_ORACLE_STATES: usize = 4;

/// Slack on `λ_max(M_p) ≤ 1` so that exactly feasible grid corners count.
const FEASIBILITY_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult {
    pub p_best: Vec<f64>,
    pub value: f64,
}

/// Scans `p` over the grid `{k·p_i^max/(steps−1)}` with
/// `p_i^max = <ψ~_i|ψ~_i>⁻¹` and returns the best feasible point.
///
/// The feasible set is down-closed in every coordinate (`M_p` is monotone
/// in each `p_i`) and the objective is increasing, so along the last axis
/// the best grid point is the largest feasible one. It is located by
/// bisection, which visits the same optimum as a full scan.
pub fn brute_force_oracle(ensemble: &Ensemble, grid_steps: usize) -> Result<OracleResult> {
    let n = ensemble.len();
    if n > MAX_ORACLE_STATES {
        return Err(Error::TooLarge {
            n,
            max: MAX_ORACLE_STATES,
        });
    }
    if grid_steps < 2 {
        return Err(Error::InvalidArgument(format!(
            "grid_steps must be at least 2, got {grid_steps}"
        )));
    }
    let span = Span::new(ensemble);
    let priors = ensemble.priors();
    let axes: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let pmax = 1.0 / span.reciprocal(i).norm_squared();
            (0..grid_steps)
                .map(|k| pmax * k as f64 / (grid_steps - 1) as f64)
                .collect()
        })
        .collect();
    let feasible = |p: &[f64]| max_eigenvalue(&span.measurement(p)) <= 1.0 + FEASIBILITY_SLACK;
    let objective = |p: &[f64]| p.iter().zip(priors).map(|(x, e)| x * e).sum::<f64>();

    let prefixes = grid_steps.pow((n - 1) as u32);
    let best = (0..prefixes)
        .into_par_iter()
        .filter_map(|flat| {
            let mut p = vec![0.0; n];
            let mut rest = flat;
            for (axis, slot) in axes.iter().zip(p.iter_mut()).take(n - 1) {
                *slot = axis[rest % grid_steps];
                rest /= grid_steps;
            }
            // Largest feasible index on the last axis.
            p[n - 1] = 0.0;
            if !feasible(&p) {
                return None;
            }
            let last = &axes[n - 1];
            let (mut lo, mut hi) = (0usize, grid_steps - 1);
            p[n - 1] = last[hi];
            if feasible(&p) {
                lo = hi;
            } else {
                while hi - lo > 1 {
                    let mid = (lo + hi) / 2;
                    p[n - 1] = last[mid];
                    if feasible(&p) {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
            }
            p[n - 1] = last[lo];
            let value = objective(&p);
            Some((flat, value, p))
        })
        .reduce_with(|a, b| {
            // Deterministic tie-break on the flat grid index.
            if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) {
                b
            } else {
                a
            }
        })
        .expect("the origin is always feasible");
    Ok(OracleResult {
        p_best: best.2,
        value: best.1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Ket;

    #[test]
    fn orthonormal_pair_reaches_corner() {
        let e = Ensemble::uniform(vec![Ket::basis(2, 0), Ket::basis(2, 1)]).unwrap();
        let r = brute_force_oracle(&e, 11).unwrap();
        assert!((r.value - 1.0).abs() < 1e-15);
        assert_eq!(r.p_best, vec![1.0, 1.0]);
    }

    #[test]
    fn rejects_large_and_coarse() {
        let e = Ensemble::uniform((0..5).map(|i| Ket::basis(5, i)).collect()).unwrap();
        assert!(matches!(brute_force_oracle(&e, 3), Err(Error::TooLarge { n: 5, .. })));
        let e = Ensemble::uniform(vec![Ket::basis(2, 0)]).unwrap();
        assert!(brute_force_oracle(&e, 1).is_err());
    }
}
