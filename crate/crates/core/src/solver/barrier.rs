//! Log-barrier interior-point method for
//!
//! ```text
//! maximize  Σ_i η_i p_i
//! s.t.      p_i ≥ 0,  1 − Σ_i p_i |t_i><t_i| ⪰ 0
//! ```
//!
//! where `t_i` are the reciprocal vectors expressed in an orthonormal basis
//! of the span. Each centering step minimizes
//! `−s·η·p − log det(1 − M_p) − Σ log p_i` with damped Newton steps; the
//! barrier weight `s` grows by [`MU`] until the duality gap `(dim + m)/s`
//! drops below the requested tolerance. On the central path the dual
//! certificate is `K = (1 − M_p)⁻¹ / s`.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::ensemble::hermitize;
use crate::{CMatrix, CVector, C64};

/// Barrier weight reduction factor.
pub const MU: f64 = 10.0;

const CENTERING_TOL: f64 = 1e-14;
const MAX_CENTERING_STEPS: usize = 200;

pub(crate) struct BarrierProblem<'a> {
    /// Reciprocal vectors in span coordinates, restricted to the active
    /// variables.
    pub vectors: Vec<&'a CVector>,
    pub priors: Vec<f64>,
    /// Size of the span (matrix dimension of the spectral constraint).
    pub dim: usize,
}

pub(crate) struct BarrierOutcome {
    pub p: Vec<f64>,
    pub certificate: CMatrix,
    pub gap: f64,
    pub newton_steps: usize,
    pub converged: bool,
}

impl BarrierProblem<'_> {
    fn measurement(&self, p: &[f64]) -> CMatrix {
        let mut m = CMatrix::zeros(self.dim, self.dim);
        for (v, &pi) in self.vectors.iter().zip(p) {
            m.gerc(C64::new(pi, 0.0), v, v, C64::new(1.0, 0.0));
        }
        hermitize(&mut m);
        m
    }

    /// Cholesky factor of `1 − M_p`, or `None` outside the interior.
    fn slack_factor(&self, p: &[f64]) -> Option<Cholesky<C64, nalgebra::Dyn>> {
        if p.iter().any(|&x| x.is_nan() || x <= 0.0) {
            return None;
        }
        let slack = CMatrix::identity(self.dim, self.dim) - self.measurement(p);
        Cholesky::new(slack)
    }

    fn gap(&self, weight: f64) -> f64 {
        (self.dim + self.vectors.len()) as f64 / weight
    }

    /// Runs the full barrier path from the strictly feasible point `start`.
    pub fn solve(&self, start: &[f64], gap_tol: f64, max_steps: usize) -> BarrierOutcome {
        let m = self.vectors.len();
        let mut p = start.to_vec();
        let mut chol = self
            .slack_factor(&p)
            .expect("barrier start point must be strictly feasible");
        let mut weight = 1.0;
        let mut steps = 0usize;

        loop {
            // Centering.
            for _ in 0..MAX_CENTERING_STEPS {
                if steps >= max_steps {
                    break;
                }
                let w = chol.inverse();
                let wt: Vec<CVector> = self.vectors.iter().map(|v| &w * *v).collect();
                let grad = DVector::from_fn(m, |i, _| {
                    -weight * self.priors[i] + self.vectors[i].dotc(&wt[i]).re - 1.0 / p[i]
                });
                let mut hess = DMatrix::from_fn(m, m, |i, j| self.vectors[i].dotc(&wt[j]).norm_sqr());
                for i in 0..m {
                    hess[(i, i)] += 1.0 / (p[i] * p[i]);
                }
                let Some(h_chol) = Cholesky::new(hess) else {
                    break;
                };
                let step = -h_chol.solve(&grad);
                let decrement_sq = -grad.dot(&step);
                if decrement_sq.is_nan() || decrement_sq <= CENTERING_TOL {
                    break;
                }
                let lambda = decrement_sq.sqrt();
                let mut s = if lambda > 0.25 { 1.0 / (1.0 + lambda) } else { 1.0 };
                steps += 1;
                let mut accepted = false;
                while s > 1e-16 {
                    let trial: Vec<f64> = p.iter().zip(step.iter()).map(|(a, b)| a + s * b).collect();
                    if let Some(c) = self.slack_factor(&trial) {
                        p = trial;
                        chol = c;
                        accepted = true;
                        break;
                    }
                    s *= 0.5;
                }
                if !accepted {
                    break;
                }
            }

            let gap = self.gap(weight);
            if gap <= gap_tol || steps >= max_steps {
                let mut certificate = chol.inverse().unscale(weight);
                hermitize(&mut certificate);
                return BarrierOutcome {
                    p,
                    certificate,
                    gap,
                    newton_steps: steps,
                    converged: gap <= gap_tol && steps < max_steps,
                };
            }
            weight *= MU;
        }
    }
}
