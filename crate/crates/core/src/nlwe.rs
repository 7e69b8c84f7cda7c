//! Local achievability of the globally optimal UD measurement and
//! classification of nonlocality without entanglement (NLWE).
//!
//! For a basis whose reciprocal set contains exactly one product vector
//! `|Ψ~_t>`, only `|Ψ_t>` can be detected locally. The optimum is then
//! locally achievable iff it detects `|Ψ_t>` alone, which happens iff
//! `ξ_i/ξ_t ≤ |<Ψ~_i|Ψ~_t>|²/<Ψ~_t|Ψ~_t>²` for all `i`. If some
//! `<Ψ~_j|Ψ~_t>` vanishes, no priors satisfy this and NLWE occurs for every
//! choice of priors; otherwise it depends on them.

use serde::Serialize;

use crate::ensemble::{normalize_all, reciprocal_set, ReciprocalSet};
use crate::error::{Error, Result};
use crate::solver::{margins_hold, single_detection_margins};
use crate::tensor::{is_product_vector, TensorSpace};
use crate::{tol, Ensemble, Ket};

/// Single-detection condition for state `i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Theorem1Check {
    pub holds: bool,
    /// `|<ψ~_k|ψ~_i>|²/<ψ~_i|ψ~_i>² − η_k/η_i` per `k`.
    pub margins: Vec<f64>,
}

/// Whether the optimal measurement of `ensemble` detects only state `i`.
pub fn theorem1_condition(ensemble: &Ensemble, i: usize) -> Result<Theorem1Check> {
    let margins = single_detection_margins(ensemble, i)?;
    let priors = ensemble.priors();
    let holds = margins_hold(&margins, priors.iter().map(|&e| e / priors[i]));
    Ok(Theorem1Check { holds, margins })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Corollary1Check {
    /// True iff every reciprocal is orthogonal to some other reciprocal, so
    /// the optimum detects at least two states whatever the priors.
    pub multi_detection_for_all_priors: bool,
    /// Pairs `(j, k)`, `j < k`, with `<ψ~_j|ψ~_k> = 0`.
    pub zero_pairs: Vec<(usize, usize)>,
}

fn zero_threshold(rec: &ReciprocalSet) -> f64 {
    let max = rec.overlaps().iter().map(|z| z.norm()).fold(0.0, f64::max);
    tol::OVERLAP_ZERO_TOL * max
}

fn normalized_reciprocals(states: &[Ket]) -> Result<(Vec<Ket>, ReciprocalSet)> {
    let (states, _) = normalize_all(states)?;
    let rec = reciprocal_set(&states)?;
    Ok((states, rec))
}

pub fn corollary1_condition(states: &[Ket]) -> Result<Corollary1Check> {
    let (_, rec) = normalized_reciprocals(states)?;
    let n = rec.len();
    let zero = zero_threshold(&rec);
    let mut zero_pairs = Vec::new();
    for j in 0..n {
        for k in j + 1..n {
            if rec.overlap(j, k).norm() <= zero {
                zero_pairs.push((j, k));
            }
        }
    }
    let multi = (0..n).all(|j| zero_pairs.iter().any(|&(a, b)| a == j || b == j));
    Ok(Corollary1Check {
        multi_detection_for_all_priors: multi,
        zero_pairs,
    })
}

/// Hypotheses under which the local-achievability dichotomy applies.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssumptionReport {
    /// The states span the whole tensor space.
    pub spans_full_space: bool,
    pub product_reciprocal_indices: Vec<usize>,
    pub exactly_one_product: bool,
}

impl AssumptionReport {
    pub fn satisfied(&self) -> bool {
        self.spans_full_space && self.exactly_one_product
    }

    /// Index of the unique product reciprocal.
    pub fn target(&self) -> Option<usize> {
        (self.satisfied()).then(|| self.product_reciprocal_indices[0])
    }
}

fn assumption_report(rec: &ReciprocalSet, space: &TensorSpace) -> Result<AssumptionReport> {
    let product_reciprocal_indices = rec
        .vectors()
        .iter()
        .enumerate()
        .map(|(i, v)| is_product_vector(v, space).map(|d| (i, d.is_product)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter_map(|(i, p)| p.then_some(i))
        .collect::<Vec<_>>();
    Ok(AssumptionReport {
        spans_full_space: rec.len() == space.total_dim(),
        exactly_one_product: product_reciprocal_indices.len() == 1,
        product_reciprocal_indices,
    })
}

pub fn assumptions(states: &[Ket], space: &TensorSpace) -> Result<AssumptionReport> {
    check_space(states, space)?;
    let (_, rec) = normalized_reciprocals(states)?;
    assumption_report(&rec, space)
}

fn check_space(states: &[Ket], space: &TensorSpace) -> Result<()> {
    match states.iter().find(|s| s.dim() != space.total_dim()) {
        Some(s) => Err(Error::DimensionMismatch {
            expected: space.total_dim(),
            found: s.dim(),
        }),
        None => Ok(()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    /// The global optimum is achievable by the local protocol at these priors.
    LoccAchievable,
    /// NLWE occurs at these priors.
    NlweAtThesePriors,
    /// NLWE occurs for every choice of nonzero priors.
    NlweAllPriors,
    /// NLWE occurs for some priors and not for others.
    PriorDependent,
    /// The hypotheses do not hold; no verdict.
    NotApplicable,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::LoccAchievable => "LOCC_ACHIEVABLE",
            Verdict::NlweAtThesePriors => "NLWE_AT_THESE_PRIORS",
            Verdict::NlweAllPriors => "NLWE_ALL_PRIORS",
            Verdict::PriorDependent => "PRIOR_DEPENDENT",
            Verdict::NotApplicable => "NOT_APPLICABLE",
        })
    }
}

/// Evidence backing a verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// Prior-ratio margins at the given priors for product index `target`.
    Margins { target: usize, margins: Vec<f64> },
    /// Priors at which the optimum is locally achievable and priors at which
    /// it is not.
    Priors {
        target: usize,
        achieving: Vec<f64>,
        breaking: Vec<f64>,
    },
    /// `<Ψ~_index|Ψ~_target> = 0`.
    ZeroOverlap { target: usize, index: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NlweVerdict {
    pub assumptions: AssumptionReport,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
}

/// Decides whether the globally optimal UD of `ensemble` is achievable with
/// the local protocol at the ensemble's priors.
pub fn theorem2_locc_achievable(ensemble: &Ensemble, space: &TensorSpace) -> Result<NlweVerdict> {
    check_space(ensemble.states(), space)?;
    let assumptions = assumption_report(ensemble.reciprocals(), space)?;
    let Some(target) = assumptions.target() else {
        return Ok(NlweVerdict {
            assumptions,
            verdict: Verdict::NotApplicable,
            witness: None,
        });
    };
    let check = theorem1_condition(ensemble, target)?;
    Ok(NlweVerdict {
        assumptions,
        verdict: if check.holds {
            Verdict::LoccAchievable
        } else {
            Verdict::NlweAtThesePriors
        },
        witness: Some(Witness::Margins {
            target,
            margins: check.margins,
        }),
    })
}

/// Prior-free classification of a product basis.
pub fn classify(states: &[Ket], space: &TensorSpace) -> Result<NlweVerdict> {
    check_space(states, space)?;
    for (i, s) in states.iter().enumerate() {
        if !is_product_vector(s, space)?.is_product {
            return Err(Error::NotAllProduct { index: i });
        }
    }
    let (_, rec) = normalized_reciprocals(states)?;
    let assumptions = assumption_report(&rec, space)?;
    let Some(target) = assumptions.target() else {
        return Ok(NlweVerdict {
            assumptions,
            verdict: Verdict::NotApplicable,
            witness: None,
        });
    };
    let zero = zero_threshold(&rec);
    if let Some(index) = (0..rec.len()).find(|&i| rec.overlap(i, target).norm() <= zero) {
        return Ok(NlweVerdict {
            assumptions,
            verdict: Verdict::NlweAllPriors,
            witness: Some(Witness::ZeroOverlap { target, index }),
        });
    }
    let achieving = priors_from_overlaps(&rec, target, None)?;
    let breaking = priors_from_overlaps(&rec, target, Some(bumped_index(target)))?;
    Ok(NlweVerdict {
        assumptions,
        verdict: Verdict::PriorDependent,
        witness: Some(Witness::Priors {
            target,
            achieving,
            breaking,
        }),
    })
}

/// The state whose weight [`violating_priors`] raises: the first index
/// other than `t`.
fn bumped_index(t: usize) -> usize {
    if t == 0 {
        1
    } else {
        0
    }
}

fn priors_from_overlaps(rec: &ReciprocalSet, t: usize, bump: Option<usize>) -> Result<Vec<f64>> {
    if t >= rec.len() {
        return Err(Error::IndexOutOfRange {
            index: t,
            len: rec.len(),
        });
    }
    let zero = zero_threshold(rec);
    let mut weights = Vec::with_capacity(rec.len());
    for i in 0..rec.len() {
        let w = rec.overlap(i, t).norm_sqr();
        if w.sqrt() <= zero {
            return Err(Error::ZeroOverlap { index: i, target: t });
        }
        weights.push(w);
    }
    if let Some(b) = bump {
        weights[b] += 1.0;
    }
    let total: f64 = weights.iter().sum();
    Ok(weights.into_iter().map(|w| w / total).collect())
}

/// `ξ_i = |<Ψ~_i|Ψ~_t>|² / Σ_j |<Ψ~_j|Ψ~_t>|²`, which saturates every
/// single-detection inequality for `t`.
pub fn boundary_priors(states: &[Ket], t: usize) -> Result<Vec<f64>> {
    let (_, rec) = normalized_reciprocals(states)?;
    priors_from_overlaps(&rec, t, None)
}

/// Like [`boundary_priors`] with one extra unit of weight on the first
/// index other than `t`, which breaks that index's inequality.
pub fn violating_priors(states: &[Ket], t: usize) -> Result<Vec<f64>> {
    if states.len() < 2 {
        return Err(Error::InvalidArgument(
            "violating priors need at least two states".into(),
        ));
    }
    let (_, rec) = normalized_reciprocals(states)?;
    priors_from_overlaps(&rec, t, Some(bumped_index(t)))
}
