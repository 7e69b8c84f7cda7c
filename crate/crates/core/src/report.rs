//! Human-readable and JSON reports for the CLI drivers.

use std::fmt;

use serde::Serialize;

use crate::locc::{build_locc_protocol, simulate_locc, SimulationOutcome};
use crate::nlwe::{
    classify, corollary1_condition, theorem1_condition, theorem2_locc_achievable, Corollary1Check,
    NlweVerdict,
};
use crate::solver::{solve_with, SolveOptions, UdSolution};
use crate::tensor::{is_product_vector, TensorSpace};
use crate::{CMatrix, Ensemble, Result};

fn complex_rows(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect())
        .collect()
}

/// Full analysis of one ensemble.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub source: String,
    pub dims: Vec<usize>,
    pub priors: Vec<f64>,
    pub norm_factors: Vec<f64>,
    /// Reciprocal vectors of the normalized states, `[re, im]` amplitudes.
    pub reciprocals: Vec<Vec<[f64; 2]>>,
    /// Product flag per reciprocal (multipartite inputs only).
    pub product_reciprocals: Option<Vec<bool>>,
    pub solution: UdSolution,
    /// Certificate `K` in the orthonormal span basis.
    pub certificate: Vec<Vec<[f64; 2]>>,
    /// States `i` for which the single-detection condition holds.
    pub single_detection: Vec<usize>,
    pub corollary1: Corollary1Check,
    /// Local achievability at the given priors.
    pub locc: Option<NlweVerdict>,
    /// Prior-free classification (all-product multipartite inputs only).
    pub classification: Option<NlweVerdict>,
}

pub fn run_report(
    source: &str,
    ensemble: &Ensemble,
    space: Option<&TensorSpace>,
    options: &SolveOptions,
) -> Result<RunReport> {
    let solution = solve_with(ensemble, options)?;
    let reciprocals = ensemble
        .reciprocals()
        .vectors()
        .iter()
        .map(|k| k.amplitudes().iter().map(|z| [z.re, z.im]).collect())
        .collect();
    let product_reciprocals = space
        .map(|sp| {
            ensemble
                .reciprocals()
                .vectors()
                .iter()
                .map(|v| is_product_vector(v, sp).map(|d| d.is_product))
                .collect::<Result<Vec<_>>>()
        })
        .transpose()?;
    let mut single_detection = Vec::new();
    for i in 0..ensemble.len() {
        if theorem1_condition(ensemble, i)?.holds {
            single_detection.push(i);
        }
    }
    let corollary1 = corollary1_condition(ensemble.states())?;
    let locc = space.map(|sp| theorem2_locc_achievable(ensemble, sp)).transpose()?;
    let classification = match space {
        Some(sp) => {
            let all_product = ensemble
                .states()
                .iter()
                .map(|s| is_product_vector(s, sp).map(|d| d.is_product))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .all(|p| p);
            if all_product {
                Some(classify(ensemble.states(), sp)?)
            } else {
                None
            }
        }
        None => None,
    };
    Ok(RunReport {
        source: source.to_string(),
        dims: space.map_or_else(|| vec![ensemble.dim()], |s| s.dims().to_vec()),
        priors: ensemble.priors().to_vec(),
        norm_factors: ensemble.norm_factors().to_vec(),
        reciprocals,
        product_reciprocals,
        certificate: complex_rows(&solution.certificate),
        solution,
        single_detection,
        corollary1,
        locc,
        classification,
    })
}

fn fmt_complex(re: f64, im: f64) -> String {
    // Adding zero turns -0.0 into 0.0.
    let (re, im) = (re + 0.0, im + 0.0);
    if im.abs() < 1e-12 {
        format!("{re:.6}")
    } else {
        format!("{re:.6}{:+.6}i", im)
    }
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "source: {}", self.source)?;
        writeln!(f, "dims: {:?}", self.dims)?;
        writeln!(f, "priors: {:?}", self.priors)?;
        writeln!(f, "reciprocal vectors:")?;
        for (i, r) in self.reciprocals.iter().enumerate() {
            let amps: Vec<String> = r.iter().map(|[re, im]| fmt_complex(*re, *im)).collect();
            let flag = match &self.product_reciprocals {
                Some(flags) if flags[i] => "  [product]",
                Some(_) => "  [entangled]",
                None => "",
            };
            writeln!(f, "  ~{}: ({}){flag}", i + 1, amps.join(", "))?;
        }
        let s = &self.solution;
        writeln!(f, "p*: {:?}", s.p_star)?;
        writeln!(f, "P_max: {:.12}", s.p_max)?;
        writeln!(f, "Tr K: {:.12}", s.certificate_trace())?;
        let k = &s.kkt;
        writeln!(
            f,
            "KKT residuals: primal {:.3e}, dual/slackness {:.3e}, complementarity {:.3e}, dual feasibility {:.3e} -> {} (tol {:.1e})",
            k.primal_feasibility,
            k.dual_slackness,
            k.complementarity,
            k.dual_feasibility,
            if k.optimal { "optimal" } else { "NOT optimal" },
            k.tolerance
        )?;
        writeln!(f, "Newton steps: {}", s.iterations)?;
        let single: Vec<usize> = self.single_detection.iter().map(|i| i + 1).collect();
        writeln!(f, "single-detection condition holds for: {single:?}")?;
        let pairs: Vec<(usize, usize)> = self
            .corollary1
            .zero_pairs
            .iter()
            .map(|&(a, b)| (a + 1, b + 1))
            .collect();
        writeln!(
            f,
            "multi-detection for all priors: {} (zero reciprocal pairs {pairs:?})",
            self.corollary1.multi_detection_for_all_priors
        )?;
        if let Some(v) = &self.locc {
            writeln!(f, "LOCC verdict at these priors: {}", v.verdict)?;
        }
        if let Some(v) = &self.classification {
            writeln!(f, "classification: {}", v.verdict)?;
        }
        Ok(())
    }
}

/// Empirical versus analytic success of the local protocol.
#[derive(Debug, Clone, Serialize)]
pub struct McReport {
    /// 0-based index of the detected state.
    pub target: usize,
    pub seed: u64,
    pub outcome: SimulationOutcome,
    /// `ξ_t · <Ψ~_t|Ψ~_t>⁻¹`.
    pub analytic_success: f64,
    /// Binomial standard deviation of the empirical success rate.
    pub std_dev: f64,
    pub z_score: f64,
}

pub fn monte_carlo(
    ensemble: &Ensemble,
    space: &TensorSpace,
    target: usize,
    trials: u64,
    seed: u64,
) -> Result<McReport> {
    let protocol = build_locc_protocol(ensemble, space, target)?;
    let outcome = simulate_locc(&protocol, ensemble, trials, seed)?;
    let analytic = ensemble.priors()[target] * protocol.success_probability();
    let std_dev = (analytic * (1.0 - analytic) / trials as f64).sqrt();
    let diff = outcome.empirical_success - analytic;
    let z_score = if std_dev > 0.0 {
        diff / std_dev
    } else if diff == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(McReport {
        target,
        seed,
        outcome,
        analytic_success: analytic,
        std_dev,
        z_score,
    })
}

impl fmt::Display for McReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "target: {}", self.target + 1)?;
        writeln!(f, "trials: {} (seed {})", self.outcome.trials, self.seed)?;
        writeln!(f, "empirical_success: {:.6}", self.outcome.empirical_success)?;
        writeln!(f, "analytic_success: {:.6}", self.analytic_success)?;
        writeln!(f, "z_score: {:.3}", self.z_score)?;
        writeln!(f, "empirical_error: {:.6}", self.outcome.empirical_error)
    }
}
