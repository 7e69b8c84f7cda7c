//! Verification of the KKT system in the certificate-only form:
//!
//! 1. `p_i ≥ 0` and `1 − M_p ⪰ 0`;
//! 2. `K ⪰ 0` and `Tr[(1 − M_p) K] = 0`;
//! 3. `p_i (<ψ~_i|K|ψ~_i> − η_i) = 0` for every `i`;
//! 4. `<ψ~_i|K|ψ~_i> ≥ η_i` for every `i`.
//!
//! A pair `(p, K)` satisfying all four is optimal.

use serde::Serialize;

use super::Span;
use crate::ensemble::{hermitize, max_eigenvalue, min_eigenvalue};
use crate::error::{Error, Result};
use crate::{tol, CMatrix, Ensemble, C64};

/// Maximum violation of each KKT condition group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KktReport {
    /// Condition 1: negativity of `p` or excess of `λ_max(M_p)` over 1.
    pub primal_feasibility: f64,
    /// Condition 2: negativity of `K` or `|Tr[(1 − M_p) K]|`.
    pub dual_slackness: f64,
    /// Condition 3: `max_i |p_i (<ψ~_i|K|ψ~_i> − η_i)|`.
    pub complementarity: f64,
    /// Condition 4: `max_i (η_i − <ψ~_i|K|ψ~_i>)⁺`.
    pub dual_feasibility: f64,
    /// `Tr K − Σ η_i p_i`; nonnegative for feasible pairs.
    pub duality_gap: f64,
    pub tolerance: f64,
    pub optimal: bool,
}

impl KktReport {
    pub fn max_residual(&self) -> f64 {
        self.primal_feasibility
            .max(self.dual_slackness)
            .max(self.complementarity)
            .max(self.dual_feasibility)
    }

    /// Re-evaluates the verdict at a different threshold.
    pub fn at_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self.optimal = self.max_residual() <= tolerance;
        self
    }
}

/// Checks `(p, K)` against the KKT system at the default threshold.
///
/// `certificate` is expressed in the orthonormal span basis returned by
/// [`Span::new`].
pub fn verify_kkt(ensemble: &Ensemble, p: &[f64], certificate: &CMatrix) -> Result<KktReport> {
    verify_kkt_at(ensemble, p, certificate, tol::KKT_TOL)
}

pub fn verify_kkt_at(
    ensemble: &Ensemble,
    p: &[f64],
    certificate: &CMatrix,
    tolerance: f64,
) -> Result<KktReport> {
    let span = Span::new(ensemble);
    verify_in_span(&span, ensemble.priors(), p, certificate, tolerance)
}

pub(crate) fn verify_in_span(
    span: &Span,
    priors: &[f64],
    p: &[f64],
    certificate: &CMatrix,
    tolerance: f64,
) -> Result<KktReport> {
    let n = span.len();
    if p.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: p.len(),
        });
    }
    if certificate.nrows() != n || certificate.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: certificate.nrows().max(certificate.ncols()),
        });
    }
    let mut k = certificate.clone();
    hermitize(&mut k);
    let m = span.measurement(p);
    let slack = CMatrix::identity(n, n) - &m;

    let neg_p = p.iter().map(|&x| (-x).max(0.0)).fold(0.0, f64::max);
    let primal_feasibility = neg_p.max((max_eigenvalue(&m) - 1.0).max(0.0));

    let trace_slack = (&slack * &k).trace().re.abs();
    let dual_slackness = (-min_eigenvalue(&k)).max(0.0).max(trace_slack);

    let mut complementarity: f64 = 0.0;
    let mut dual_feasibility: f64 = 0.0;
    for i in 0..n {
        let t = span.reciprocal(i);
        let kii = t.dotc(&(&k * t)).re;
        complementarity = complementarity.max((p[i] * (kii - priors[i])).abs());
        dual_feasibility = dual_feasibility.max(priors[i] - kii);
    }
    let objective: f64 = priors.iter().zip(p).map(|(e, x)| e * x).sum();
    let duality_gap = k.trace().re - objective;

    let report = KktReport {
        primal_feasibility,
        dual_slackness,
        complementarity,
        dual_feasibility: dual_feasibility.max(0.0),
        duality_gap,
        tolerance,
        optimal: false,
    };
    Ok(report.at_tolerance(tolerance))
}

/// Complementary slackness in trace form, `Tr[M_p (K − ρ)]`.
pub fn trace_complementarity(ensemble: &Ensemble, p: &[f64], certificate: &CMatrix) -> C64 {
    let span = Span::new(ensemble);
    let rho = span.density_operator(ensemble.priors());
    (span.measurement(p) * (certificate - rho.matrix())).trace()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Ket;

    fn orthonormal(n: usize, priors: Vec<f64>) -> Ensemble {
        Ensemble::new((0..n).map(|i| Ket::basis(n, i)).collect(), priors).unwrap()
    }

    #[test]
    fn perfect_discrimination_certified_by_rho() {
        let e = orthonormal(3, vec![0.2, 0.3, 0.5]);
        let rho = Span::new(&e).density_operator(e.priors());
        let r = verify_kkt(&e, &[1.0, 1.0, 1.0], rho.matrix()).unwrap();
        assert!(r.optimal);
        assert!(r.max_residual() < 1e-15);
        assert!(r.duality_gap.abs() < 1e-15);
    }

    #[test]
    fn zero_certificate_fails_dual_feasibility() {
        let e = orthonormal(2, vec![0.5, 0.5]);
        let r = verify_kkt(&e, &[1.0, 1.0], &CMatrix::zeros(2, 2)).unwrap();
        assert!(!r.optimal);
        assert!((r.dual_feasibility - 0.5).abs() < 1e-15);
    }

    #[test]
    fn infeasible_p_flagged() {
        let e = orthonormal(2, vec![0.5, 0.5]);
        let rho = Span::new(&e).density_operator(e.priors());
        let r = verify_kkt(&e, &[1.5, -0.1], rho.matrix()).unwrap();
        assert!((r.primal_feasibility - 0.5).abs() < 1e-12);
        assert!(!r.optimal);
    }

    #[test]
    fn wrong_shapes_rejected() {
        let e = orthonormal(2, vec![0.5, 0.5]);
        assert!(matches!(
            verify_kkt(&e, &[1.0], &CMatrix::zeros(2, 2)),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            verify_kkt(&e, &[1.0, 1.0], &CMatrix::zeros(3, 3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn threshold_can_be_relaxed() {
        let e = orthonormal(2, vec![0.5, 0.5]);
        let r = verify_kkt(&e, &[1.0, 1.0], &CMatrix::zeros(2, 2)).unwrap();
        assert!(r.at_tolerance(0.6).optimal);
    }
}
