//! Optimal unambiguous discrimination.
//!
//! A UD measurement of linearly independent states is fixed by the vector
//! of per-state success probabilities `p`, through
//! `M_p = Σ_i p_i |ψ~_i><ψ~_i|`. It is feasible iff `p ≥ 0` and
//! `1 − M_p ⪰ 0` on the span of the states. The optimum of `Σ_i η_i p_i`
//! is unique in `p`.
//!
//! All operators here are `n × n` matrices in the Löwdin basis of the span,
//! `Q = S Ω^{-1/2}`, where the columns of `S` are the normalized states. In
//! that basis the states are the columns of `Ω^{1/2}` and the reciprocal
//! vectors the columns of `Ω^{-1/2}`; for an orthonormal ensemble it is the
//! ensemble itself.

mod barrier;
pub mod kkt;
pub mod oracle;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::ensemble::{hermitian_eigen, hermitize, max_eigenvalue};
use crate::error::{Error, Result};
use crate::{tol, CMatrix, CVector, Ensemble, C64};
use barrier::BarrierProblem;

pub use kkt::{trace_complementarity, verify_kkt, verify_kkt_at, KktReport};
pub use oracle::{brute_force_oracle, OracleResult};

/// Orthonormal coordinates for the span of an ensemble.
#[derive(Debug, Clone)]
pub struct Span {
    basis: CMatrix,
    states: Vec<CVector>,
    reciprocals: Vec<CVector>,
}

impl Span {
    pub fn new(ensemble: &Ensemble) -> Self {
        let n = ensemble.len();
        let d = ensemble.dim();
        let s = CMatrix::from_fn(d, n, |r, c| ensemble.states()[c].amplitudes()[r]);
        let basis = &s * ensemble.gram().inv_sqrt();
        let project = |v: &CVector| basis.adjoint() * v;
        Self {
            states: ensemble.states().iter().map(|k| project(k.amplitudes())).collect(),
            reciprocals: ensemble
                .reciprocals()
                .vectors()
                .iter()
                .map(|k| project(k.amplitudes()))
                .collect(),
            basis,
        }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// `d × n` isometry whose columns span the states.
    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    pub fn state(&self, i: usize) -> &CVector {
        &self.states[i]
    }

    pub fn reciprocal(&self, i: usize) -> &CVector {
        &self.reciprocals[i]
    }

    /// `M_p = Σ_i p_i |ψ~_i><ψ~_i|` in span coordinates.
    pub fn measurement(&self, p: &[f64]) -> CMatrix {
        let n = self.len();
        let mut m = CMatrix::zeros(n, n);
        for (t, &pi) in self.reciprocals.iter().zip(p) {
            m.gerc(C64::new(pi, 0.0), t, t, C64::new(1.0, 0.0));
        }
        hermitize(&mut m);
        m
    }

    pub fn density_operator(&self, priors: &[f64]) -> DensityOperator {
        let n = self.len();
        let mut m = CMatrix::zeros(n, n);
        for (s, &eta) in self.states.iter().zip(priors) {
            m.gerc(C64::new(eta, 0.0), s, s, C64::new(1.0, 0.0));
        }
        hermitize(&mut m);
        DensityOperator { matrix: m }
    }

    /// Lifts a span operator to the full `d × d` space.
    pub fn embed(&self, op: &CMatrix) -> CMatrix {
        &self.basis * op * self.basis.adjoint()
    }
}

/// `ρ = Σ_i η_i |ψ_i><ψ_i|` restricted to the span.
#[derive(Debug, Clone)]
pub struct DensityOperator {
    matrix: CMatrix,
}

impl DensityOperator {
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }
}

/// A candidate UD measurement `p ↦ M_p`.
#[derive(Debug, Clone)]
pub struct MeasurementCandidate {
    pub p: Vec<f64>,
    pub operator: CMatrix,
}

impl MeasurementCandidate {
    pub fn new(ensemble: &Ensemble, p: Vec<f64>) -> Result<Self> {
        if p.len() != ensemble.len() {
            return Err(Error::DimensionMismatch {
                expected: ensemble.len(),
                found: p.len(),
            });
        }
        let operator = Span::new(ensemble).measurement(&p);
        Ok(Self { p, operator })
    }

    pub fn is_feasible(&self) -> bool {
        self.p.iter().all(|&x| x >= 0.0) && max_eigenvalue(&self.operator) <= 1.0 + 1e-10
    }
}

/// Optimal success probabilities with a dual certificate.
#[derive(Debug, Clone, Serialize)]
pub struct UdSolution {
    pub p_star: Vec<f64>,
    pub p_max: f64,
    /// Dual operator `K` in span coordinates.
    #[serde(skip)]
    pub certificate: CMatrix,
    pub kkt: KktReport,
    /// Newton steps taken (zero for closed-form solutions).
    pub iterations: usize,
}

impl UdSolution {
    /// Indices with success probability above [`tol::SUPPORT_TOL`].
    pub fn support(&self) -> Vec<usize> {
        self.p_star
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > tol::SUPPORT_TOL)
            .map(|(i, _)| i)
            .collect()
    }

    /// The eliminated multiplier `E = K − ρ`.
    pub fn dual_multiplier(&self, ensemble: &Ensemble) -> CMatrix {
        let rho = Span::new(ensemble).density_operator(ensemble.priors());
        &self.certificate - rho.matrix()
    }

    pub fn certificate_trace(&self) -> f64 {
        self.certificate.trace().re
    }
}

/// Options for [`solve_with`].
#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Strictly feasible starting point; `None` uses
    /// `p_i = 1 / (2 n <ψ~_i|ψ~_i>)`.
    pub start: Option<Vec<f64>>,
    pub gap_tol: f64,
    pub max_steps: usize,
    /// Threshold reported in [`UdSolution::kkt`].
    pub kkt_tol: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            start: None,
            gap_tol: tol::GAP_TOL,
            max_steps: tol::MAX_NEWTON_STEPS,
            kkt_tol: tol::KKT_TOL,
        }
    }
}

/// Solves the UD program for `ensemble`.
pub fn solve(ensemble: &Ensemble) -> Result<UdSolution> {
    solve_with(ensemble, &SolveOptions::default())
}

fn default_start(span: &Span) -> Vec<f64> {
    let n = span.len() as f64;
    (0..span.len())
        .map(|i| 1.0 / (2.0 * n * span.reciprocal(i).norm_squared()))
        .collect()
}

/// Residual bound for accepting a polished solution.
const POLISH_TOL: f64 = 1e-8;
const POLISH_THRESHOLDS: [f64; 5] = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6];

pub fn solve_with(ensemble: &Ensemble, options: &SolveOptions) -> Result<UdSolution> {
    let span = Span::new(ensemble);
    let n = span.len();
    let priors = ensemble.priors();
    let start = match &options.start {
        Some(s) => {
            if s.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: s.len(),
                });
            }
            let m = span.measurement(s);
            if s.iter().any(|&x| x.is_nan() || x <= 0.0) || max_eigenvalue(&m) >= 1.0 {
                return Err(Error::InvalidArgument(
                    "start point is not strictly feasible".into(),
                ));
            }
            s.clone()
        }
        None => default_start(&span),
    };

    let problem = BarrierProblem {
        vectors: span.reciprocals.iter().collect(),
        priors: priors.to_vec(),
        dim: n,
    };
    let outcome = problem.solve(&start, options.gap_tol, options.max_steps);
    if !outcome.converged {
        return Err(Error::NoConvergence {
            iterations: outcome.newton_steps,
            best_gap: outcome.gap,
            best_p: outcome.p,
        });
    }
    let mut steps = outcome.newton_steps;
    let (mut p, mut certificate) = crossover(&span, priors, &outcome.p, &outcome.certificate)?;

    // Components driven towards zero converge only like the square root of
    // the barrier weight when complementarity is not strict. Drop them,
    // re-solve on the remaining support, and keep the result if it
    // certifies against the full problem.
    let mut tried: Vec<Vec<usize>> = Vec::new();
    for threshold in POLISH_THRESHOLDS {
        let scale = p.iter().copied().fold(0.0, f64::max);
        let support: Vec<usize> = (0..n).filter(|&i| p[i] > threshold * scale).collect();
        if support.len() == n || support.is_empty() || tried.contains(&support) {
            continue;
        }
        tried.push(support.clone());
        let reduced = BarrierProblem {
            vectors: support.iter().map(|&i| &span.reciprocals[i]).collect(),
            priors: support.iter().map(|&i| priors[i]).collect(),
            dim: n,
        };
        // Shrinking towards the origin keeps the start strictly feasible.
        let reduced_start: Vec<f64> = support.iter().map(|&i| 0.5 * p[i]).collect();
        let polished = reduced.solve(&reduced_start, options.gap_tol, options.max_steps);
        steps += polished.newton_steps;
        if !polished.converged {
            continue;
        }
        let mut full_p = vec![0.0; n];
        for (&i, &x) in support.iter().zip(&polished.p) {
            full_p[i] = x;
        }
        let (full_p, k) = crossover(&span, priors, &full_p, &polished.certificate)?;
        let report = kkt::verify_in_span(&span, priors, &full_p, &k, POLISH_TOL)?;
        if report.optimal {
            p = full_p;
            certificate = k;
            break;
        }
    }

    let kkt = kkt::verify_in_span(&span, priors, &p, &certificate, options.kkt_tol)?;
    let p_max = priors.iter().zip(&p).map(|(e, x)| e * x).sum();
    Ok(UdSolution {
        p_star: p,
        p_max,
        certificate,
        kkt,
        iterations: steps,
    })
}

/// Eigenvalues of `1 − M_p` below this are candidates for its kernel.
const KERNEL_CUTOFF: f64 = 1e-4;
/// Components above this fraction of `max p` enter the complementarity fit.
const ACTIVE_FRACTION: f64 = 1e-7;

/// Sharpens a central-path iterate `(p, W/s)`.
///
/// Forming `(1 − M_p)⁻¹` near the boundary loses about `s·ε` in relative
/// accuracy, and `p` itself sits a distance of order `1/s` inside the
/// feasible set. The optimal `K` lives on the kernel `V` of `1 − M_p*`,
/// whose eigenvectors are well conditioned. For each candidate kernel
/// (eigenvalues of `1 − M_p` below [`KERNEL_CUTOFF`]):
///
/// - `p` moves by the minimum-norm correction on the active set that makes
///   `V†(1 − M_p)V` vanish. Because `(1 − M_p*)V* = 0`, an `O(δ)` error in
///   `V` enters this system only at `O(δ²)`;
/// - `K = V X V†`, with `X` the compressed raw certificate plus the
///   minimum-norm Hermitian update that restores `<t_i|K|t_i> = η_i` on the
///   active set.
///
/// The candidate with the smallest KKT residual wins, the unmodified input
/// included.
fn crossover(span: &Span, priors: &[f64], p: &[f64], raw: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let n = span.len();
    let raw = psd_clip(raw);
    let mut best_residual = kkt::verify_in_span(span, priors, p, &raw, 0.0)?.max_residual();
    let mut best = (p.to_vec(), raw.clone());

    let slack = CMatrix::identity(n, n) - span.measurement(p);
    let (values, vectors) = hermitian_eigen(&slack);
    let scale = p.iter().copied().fold(0.0, f64::max);
    let active: Vec<usize> = (0..n).filter(|&i| p[i] > ACTIVE_FRACTION * scale).collect();

    for r in 1..=n {
        if values[r - 1] > KERNEL_CUTOFF {
            break;
        }
        let v = vectors.columns(0, r).into_owned();
        let u: Vec<CVector> = active.iter().map(|&i| v.adjoint() * span.reciprocal(i)).collect();
        let params = HermitianParams::new(r);

        // Σ_S p_i u_i u_i† = 1_r, solved for the correction to p.
        let mut a = DMatrix::<f64>::zeros(params.len(), active.len());
        let mut rhs = params.flatten(&CMatrix::identity(r, r));
        for (col, ui) in u.iter().enumerate() {
            let column = params.flatten(&(ui * ui.adjoint()));
            rhs -= &column * p[active[col]];
            a.set_column(col, &column);
        }
        let mut moved = vec![0.0; n];
        for &i in &active {
            moved[i] = p[i];
        }
        if let Ok(delta) = a.svd(true, true).solve(&rhs, 1e-14) {
            for (col, &i) in active.iter().enumerate() {
                moved[i] += delta[col];
            }
        }
        if moved.iter().any(|&x| x < 0.0) {
            moved = p.to_vec();
        }

        // <u_i|X|u_i> = η_i on the active set.
        let x0 = v.adjoint() * &raw * &v;
        let mut b = DMatrix::<f64>::zeros(active.len(), params.len());
        let mut target = DVector::<f64>::zeros(active.len());
        for (row, ui) in u.iter().enumerate() {
            b.set_row(row, &params.flatten(&(ui * ui.adjoint())).transpose());
            target[row] = priors[active[row]] - ui.dotc(&(&x0 * ui)).re;
        }
        let Ok(delta) = b.svd(true, true).solve(&target, 1e-14) else {
            continue;
        };
        let x = x0 + params.unflatten(&delta);
        let k = psd_clip(&(&v * x * v.adjoint()));

        for cand in [moved, p.to_vec()] {
            let residual = kkt::verify_in_span(span, priors, &cand, &k, 0.0)?.max_residual();
            if residual < best_residual {
                best_residual = residual;
                best = (cand, k.clone());
            }
        }
    }
    Ok(best)
}

/// Real coordinates of an `r × r` Hermitian matrix under the trace inner
/// product: diagonal entries, then `√2·Re` and `√2·Im` of the strict upper
/// triangle.
struct HermitianParams {
    r: usize,
    pairs: Vec<(usize, usize)>,
}

impl HermitianParams {
    fn new(r: usize) -> Self {
        let pairs = (0..r).flat_map(|a| (a + 1..r).map(move |b| (a, b))).collect();
        Self { r, pairs }
    }

    fn len(&self) -> usize {
        self.r + 2 * self.pairs.len()
    }

    fn flatten(&self, m: &CMatrix) -> DVector<f64> {
        let s = std::f64::consts::SQRT_2;
        let mut out = DVector::zeros(self.len());
        for k in 0..self.r {
            out[k] = m[(k, k)].re;
        }
        for (q, &(k, l)) in self.pairs.iter().enumerate() {
            out[self.r + 2 * q] = s * m[(k, l)].re;
            out[self.r + 2 * q + 1] = s * m[(k, l)].im;
        }
        out
    }

    fn unflatten(&self, x: &DVector<f64>) -> CMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut m = CMatrix::zeros(self.r, self.r);
        for k in 0..self.r {
            m[(k, k)] = C64::new(x[k], 0.0);
        }
        for (q, &(k, l)) in self.pairs.iter().enumerate() {
            let z = C64::new(s * x[self.r + 2 * q], s * x[self.r + 2 * q + 1]);
            m[(k, l)] = z;
            m[(l, k)] = z.conj();
        }
        m
    }
}

/// Hermitian projection with negative eigenvalues clipped to zero.
fn psd_clip(m: &CMatrix) -> CMatrix {
    let mut h = m.clone();
    hermitize(&mut h);
    let (values, vectors) = hermitian_eigen(&h);
    if values[0] >= 0.0 {
        return h;
    }
    let mut scaled = vectors.clone();
    for (j, &l) in values.iter().enumerate() {
        scaled.column_mut(j).scale_mut(l.max(0.0));
    }
    let mut out = scaled * vectors.adjoint();
    hermitize(&mut out);
    out
}

/// `margins[k] = |<ψ~_k|ψ~_i>|² / <ψ~_i|ψ~_i>² − η_k / η_i`.
pub(crate) fn single_detection_margins(ensemble: &Ensemble, i: usize) -> Result<Vec<f64>> {
    ensemble.check_index(i)?;
    let rec = ensemble.reciprocals();
    let norm_sq = rec.overlap(i, i).re;
    let priors = ensemble.priors();
    Ok((0..ensemble.len())
        .map(|k| rec.overlap(k, i).norm_sqr() / (norm_sq * norm_sq) - priors[k] / priors[i])
        .collect())
}

/// Whether a margin list satisfies the prior-ratio inequalities, allowing
/// [`tol::CONDITION_TOL`] relative slack at saturated entries.
pub(crate) fn margins_hold(margins: &[f64], ratios: impl Iterator<Item = f64>) -> bool {
    margins
        .iter()
        .zip(ratios)
        .all(|(&m, r)| m >= -tol::CONDITION_TOL * r.max(1.0))
}

/// Closed-form optimum when only state `i` is detected.
///
/// Applies iff `η_k/η_i ≤ |<ψ~_k|ψ~_i>|²/<ψ~_i|ψ~_i>²` for all `k`, in which
/// case `p* = e_i / <ψ~_i|ψ~_i>` and
/// `K* = η_i <ψ~_i|ψ~_i>⁻² |ψ~_i><ψ~_i|`. Returns `Ok(None)` otherwise.
pub fn single_state_solution(ensemble: &Ensemble, i: usize) -> Result<Option<UdSolution>> {
    let margins = single_detection_margins(ensemble, i)?;
    let priors = ensemble.priors();
    if !margins_hold(&margins, priors.iter().map(|&e| e / priors[i])) {
        return Ok(None);
    }
    let span = Span::new(ensemble);
    let t = span.reciprocal(i);
    let norm_sq = ensemble.reciprocals().overlap(i, i).re;
    let mut p = vec![0.0; ensemble.len()];
    p[i] = 1.0 / norm_sq;
    let certificate = (t * t.adjoint()).scale(priors[i] / (norm_sq * norm_sq));
    let kkt = kkt::verify_in_span(&span, priors, &p, &certificate, tol::KKT_TOL)?;
    Ok(Some(UdSolution {
        p_max: priors[i] * p[i],
        p_star: p,
        certificate,
        kkt,
        iterations: 0,
    }))
}

/// Solves from `trials` distinct random interior points and returns the
/// largest pairwise `‖p*_a − p*_b‖_∞`.
pub fn uniqueness_probe(ensemble: &Ensemble, trials: usize) -> Result<f64> {
    if trials < 2 {
        return Err(Error::InvalidArgument(format!(
            "uniqueness probe needs at least 2 trials, got {trials}"
        )));
    }
    let span = Span::new(ensemble);
    let n = span.len();
    let mut rng = ChaCha8Rng::seed_from_u64(0x005e_ed0f_u64 ^ n as u64);
    let mut solutions = Vec::with_capacity(trials);
    for _ in 0..trials {
        // Σ p_i <ψ~_i|ψ~_i> < 1 bounds λ_max(M_p) strictly below one.
        let weights: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
        let total: f64 = weights.iter().sum::<f64>() * rng.random_range(1.05..4.0);
        let start = (0..n)
            .map(|i| weights[i] / (total * span.reciprocal(i).norm_squared()))
            .collect();
        let options = SolveOptions {
            start: Some(start),
            ..SolveOptions::default()
        };
        solutions.push(solve_with(ensemble, &options)?.p_star);
    }
    let mut worst: f64 = 0.0;
    for a in 0..trials {
        for b in a + 1..trials {
            let d = solutions[a]
                .iter()
                .zip(&solutions[b])
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max);
            worst = worst.max(d);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Ket;

    fn overlap_pair(s: f64, priors: Vec<f64>) -> Ensemble {
        let c = (1.0 - s * s).sqrt();
        Ensemble::new(vec![Ket::real(&[1.0, 0.0]), Ket::real(&[s, c])], priors).unwrap()
    }

    #[test]
    fn orthonormal_is_perfect() {
        let e = Ensemble::new(
            (0..3).map(|i| Ket::basis(3, i)).collect(),
            vec![0.1, 0.6, 0.3],
        )
        .unwrap();
        let sol = solve(&e).unwrap();
        for p in &sol.p_star {
            assert!((p - 1.0).abs() < 1e-8, "{:?}", sol.p_star);
        }
        assert!((sol.p_max - 1.0).abs() < 1e-8);
        assert!(sol.kkt.optimal);
    }

    #[test]
    fn symmetric_pair_attains_one_minus_overlap() {
        // Equal priors: P_max = 1 − |<ψ1|ψ2>|.
        let sol = solve(&overlap_pair(0.5, vec![0.5, 0.5])).unwrap();
        assert!((sol.p_max - 0.5).abs() < 1e-8);
        assert!(sol.kkt.optimal);
        assert!((sol.p_max - sol.certificate_trace()).abs() < 1e-8);
    }

    #[test]
    fn skewed_pair_detects_only_first() {
        // η2/η1 ≤ s² ⇒ p2* = 0 and p1* = 1 − s².
        let s: f64 = 0.5;
        let eta2 = 0.1;
        let e = overlap_pair(s, vec![1.0 - eta2, eta2]);
        let sol = solve(&e).unwrap();
        assert!((sol.p_star[0] - (1.0 - s * s)).abs() < 1e-8, "{:?}", sol.p_star);
        assert!(sol.p_star[1].abs() < 1e-8);
        assert_eq!(sol.support(), vec![0]);
        let closed = single_state_solution(&e, 0).unwrap().unwrap();
        assert!(closed.kkt.optimal);
        assert!((closed.p_star[0] - sol.p_star[0]).abs() < 1e-8);
    }

    #[test]
    fn saturated_pair_polishes_to_single_detection() {
        // η2/η1 = s² exactly: complementarity is not strict.
        let s: f64 = 0.5;
        let e = overlap_pair(s, vec![0.8, 0.2]);
        let sol = solve(&e).unwrap();
        assert_eq!(sol.p_star[1], 0.0);
        assert!(sol.kkt.optimal);
    }

    #[test]
    fn dual_multiplier_is_k_minus_rho() {
        let e = overlap_pair(0.3, vec![0.5, 0.5]);
        let sol = solve(&e).unwrap();
        let e_mult = sol.dual_multiplier(&e);
        let rho = Span::new(&e).density_operator(e.priors());
        assert!((e_mult + rho.matrix() - &sol.certificate).norm() < 1e-14);
        assert!((rho.trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn invalid_start_rejected() {
        let e = overlap_pair(0.3, vec![0.5, 0.5]);
        let opts = SolveOptions {
            start: Some(vec![2.0, 2.0]),
            ..SolveOptions::default()
        };
        assert!(matches!(solve_with(&e, &opts), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn step_cap_reports_no_convergence() {
        let e = overlap_pair(0.3, vec![0.5, 0.5]);
        let opts = SolveOptions {
            max_steps: 3,
            ..SolveOptions::default()
        };
        match solve_with(&e, &opts) {
            Err(Error::NoConvergence { iterations, best_p, .. }) => {
                assert_eq!(iterations, 3);
                assert_eq!(best_p.len(), 2);
            }
            other => panic!("expected NoConvergence, got {other:?}"),
        }
    }

    #[test]
    fn single_state_not_applicable_for_equal_priors() {
        let e = overlap_pair(0.5, vec![0.5, 0.5]);
        assert!(single_state_solution(&e, 0).unwrap().is_none());
        assert!(matches!(
            single_state_solution(&e, 2),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn probe_needs_two_trials() {
        let e = overlap_pair(0.5, vec![0.5, 0.5]);
        assert!(uniqueness_probe(&e, 1).is_err());
    }
}
