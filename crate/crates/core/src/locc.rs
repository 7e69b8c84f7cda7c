//! The finite-round local protocol that detects one state, its Monte Carlo
//! simulation, and the 2⊗2 product-basis check.
//!
//! When the reciprocal vector `|Ψ~_t>` of a basis is a product vector
//! `√<Ψ~_t|Ψ~_t> ⊗_k |φ_k>`, each party measuring `{|φ_k><φ_k|, 1 − |φ_k><φ_k|}`
//! and announcing the outcome realizes the projector
//! `|Ψ~_t><Ψ~_t| / <Ψ~_t|Ψ~_t>`. The all-success branch never fires on
//! `|Ψ_j>`, `j ≠ t`, by biorthogonality, and fires on `|Ψ_t>` with
//! probability `<Ψ~_t|Ψ~_t>⁻¹`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::ensemble::{independence_report, normalize_all, reciprocal_set};
use crate::error::{Error, Result};
use crate::tensor::{is_product_vector, TensorSpace};
use crate::{CMatrix, CVector, Ensemble, Ket, C64};

/// Local projective measurements whose joint success detects `target`.
#[derive(Debug, Clone)]
pub struct LoccProtocol {
    space: TensorSpace,
    target: usize,
    factors: Vec<Ket>,
    success_probability: f64,
}

impl LoccProtocol {
    pub fn target(&self) -> usize {
        self.target
    }

    pub fn space(&self) -> &TensorSpace {
        &self.space
    }

    /// Local vectors `|φ_k>`.
    pub fn factors(&self) -> &[Ket] {
        &self.factors
    }

    /// Probability `<Ψ~_t|Ψ~_t>⁻¹` of the all-success branch on `|Ψ_t>`.
    pub fn success_probability(&self) -> f64 {
        self.success_probability
    }

    /// `(|φ_k><φ_k|, 1_k − |φ_k><φ_k|)` for party `k`.
    pub fn local_projectors(&self, k: usize) -> (CMatrix, CMatrix) {
        let p = self.factors[k].projector();
        let d = p.nrows();
        let q = CMatrix::identity(d, d) - &p;
        (p, q)
    }

    /// The POVM element `⊗_k |φ_k><φ_k|` of the all-success branch.
    pub fn success_operator(&self) -> CMatrix {
        let mut it = self.factors.iter().map(Ket::projector);
        let first = it.next().expect("at least one party");
        it.fold(first, |acc, p| acc.kronecker(&p))
    }

    /// Conditional success probabilities party by party for `state`, each
    /// computed on the post-measurement state of the previous successes.
    pub fn conditional_chain(&self, state: &Ket) -> Vec<f64> {
        let dims = self.space.dims();
        let mut psi: CVector = state.amplitudes().clone();
        let mut chain = Vec::with_capacity(dims.len());
        for (k, phi) in self.factors.iter().enumerate() {
            let before = psi.norm_squared();
            if before == 0.0 {
                chain.push(0.0);
                continue;
            }
            psi = apply_local_projector(&psi, dims, k, phi.amplitudes());
            let after = psi.norm_squared();
            chain.push(after / before);
        }
        chain
    }

    /// Born probability of the all-success branch on `state`.
    pub fn branch_probability(&self, state: &Ket) -> f64 {
        let (s, _) = state.normalize().expect("nonzero state");
        self.conditional_chain(&s).iter().product()
    }
}

/// Applies `|φ><φ|` on party `k` (identity elsewhere).
fn apply_local_projector(psi: &CVector, dims: &[usize], k: usize, phi: &CVector) -> CVector {
    let d = dims[k];
    let inner: usize = dims[k + 1..].iter().product();
    let outer: usize = dims[..k].iter().product();
    let mut out = CVector::zeros(psi.len());
    for o in 0..outer {
        for i in 0..inner {
            let mut amp = C64::new(0.0, 0.0);
            for a in 0..d {
                amp += phi[a].conj() * psi[(o * d + a) * inner + i];
            }
            for a in 0..d {
                out[(o * d + a) * inner + i] = phi[a] * amp;
            }
        }
    }
    out
}

/// Builds the local protocol detecting `target`.
pub fn build_locc_protocol(
    ensemble: &Ensemble,
    space: &TensorSpace,
    target: usize,
) -> Result<LoccProtocol> {
    ensemble.check_index(target)?;
    if ensemble.dim() != space.total_dim() {
        return Err(Error::DimensionMismatch {
            expected: space.total_dim(),
            found: ensemble.dim(),
        });
    }
    let rec = ensemble.reciprocals().get(target);
    let decomposition = is_product_vector(rec, space)?;
    let factors = decomposition
        .factors
        .ok_or(Error::NotProduct { index: target })?;
    Ok(LoccProtocol {
        space: space.clone(),
        target,
        factors,
        success_probability: 1.0 / rec.norm().powi(2),
    })
}

/// Monte Carlo estimate of the protocol's performance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimulationOutcome {
    pub trials: u64,
    /// Conclusive and correct.
    pub successes: u64,
    /// Conclusive on a state other than the target.
    pub errors: u64,
    pub empirical_success: f64,
    pub empirical_error: f64,
}

const CHUNK: u64 = 1 << 16;

/// Prepares states by prior and samples each party's outcome in turn.
///
/// Trials are split into fixed-size chunks; chunk `c` draws from stream `c`
/// of a ChaCha generator keyed by `seed`, so the result depends only on
/// `(trials, seed)`.
pub fn simulate_locc(
    protocol: &LoccProtocol,
    ensemble: &Ensemble,
    trials: u64,
    seed: u64,
) -> Result<SimulationOutcome> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let chains: Vec<Vec<f64>> = ensemble
        .states()
        .iter()
        .map(|s| protocol.conditional_chain(s))
        .collect();
    let mut cumulative = Vec::with_capacity(ensemble.len());
    let mut acc = 0.0;
    for &p in ensemble.priors() {
        acc += p;
        cumulative.push(acc);
    }
    let target = protocol.target();
    let chunks = trials.div_ceil(CHUNK);
    let (successes, errors) = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let count = CHUNK.min(trials - c * CHUNK);
            let mut ok = 0u64;
            let mut bad = 0u64;
            for _ in 0..count {
                let u: f64 = rng.random::<f64>() * acc;
                let j = cumulative.partition_point(|&x| x <= u).min(cumulative.len() - 1);
                let all_success = chains[j].iter().all(|&q| rng.random::<f64>() < q);
                if all_success {
                    if j == target {
                        ok += 1;
                    } else {
                        bad += 1;
                    }
                }
            }
            (ok, bad)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(SimulationOutcome {
        trials,
        successes,
        errors,
        empirical_success: successes as f64 / trials as f64,
        empirical_error: errors as f64 / trials as f64,
    })
}

/// Which reciprocals of a 2⊗2 product basis are product vectors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonexistenceReport {
    pub product_reciprocals: Vec<usize>,
    /// Two distinct product reciprocals, when they exist.
    pub witness: Option<(usize, usize)>,
    /// False iff exactly one reciprocal is a product vector.
    pub holds: bool,
}

/// Checks that a basis of four 2⊗2 product states never has exactly one
/// product reciprocal.
pub fn check_2x2_nonexistence(basis: &[Ket]) -> Result<NonexistenceReport> {
    if basis.len() != 4 {
        return Err(Error::NotABasis(format!("expected 4 states, got {}", basis.len())));
    }
    let space = TensorSpace::new(vec![2, 2])?;
    for (i, b) in basis.iter().enumerate() {
        if b.dim() != 4 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                found: b.dim(),
            });
        }
        if !is_product_vector(b, &space)?.is_product {
            return Err(Error::NotAllProduct { index: i });
        }
    }
    let (states, _) = normalize_all(basis)?;
    if !independence_report(&states)?.independent {
        return Err(Error::NotABasis("states are linearly dependent".into()));
    }
    let rec = reciprocal_set(&states)?;
    let product_reciprocals = rec
        .vectors()
        .iter()
        .enumerate()
        .filter_map(|(i, v)| match is_product_vector(v, &space) {
            Ok(d) if d.is_product => Some(Ok(i)),
            Ok(_) => None,
            Err(e) => Some(Err(e)),
        })
        .collect::<Result<Vec<_>>>()?;
    let witness = (product_reciprocals.len() >= 2).then(|| (product_reciprocals[0], product_reciprocals[1]));
    Ok(NonexistenceReport {
        holds: product_reciprocals.len() != 1,
        product_reciprocals,
        witness,
    })
}
