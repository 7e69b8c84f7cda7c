//! Pure-state ensembles, Gram matrices and reciprocal vectors.
//!
//! For linearly independent states `|ψ_1>, …, |ψ_n>` with Gram matrix
//! `Ω_ij = <ψ_i|ψ_j>`, the reciprocal vectors are
//! `|ψ~_i> = Σ_j (Ω⁻¹)_ji |ψ_j>`. They are biorthogonal to the states,
//! `<ψ~_i|ψ_j> = δ_ij`, and their own overlaps reproduce the inverse Gram
//! matrix, `<ψ~_i|ψ~_j> = (Ω⁻¹)_ij`.

use nalgebra::SymmetricEigen;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::tol;
use crate::{CMatrix, CVector, C64};

/// A complex amplitude vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    amplitudes: CVector,
    normalized: bool,
}

impl Ket {
    pub fn new(amplitudes: Vec<C64>) -> Self {
        Self::from_vector(CVector::from_vec(amplitudes))
    }

    pub fn from_vector(amplitudes: CVector) -> Self {
        let normalized = (amplitudes.norm_squared() - 1.0).abs() <= tol::NORMALIZED_TOL;
        Self {
            amplitudes,
            normalized,
        }
    }

    /// Builds a ket from real amplitudes.
    pub fn real(amplitudes: &[f64]) -> Self {
        Self::new(amplitudes.iter().map(|&a| C64::new(a, 0.0)).collect())
    }

    /// Computational basis vector `|index>` in dimension `dim`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = CVector::zeros(dim);
        v[index] = C64::new(1.0, 0.0);
        Self::from_vector(v)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn into_vector(self) -> CVector {
        self.amplitudes
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Ket) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    /// Returns the normalized ket together with the original norm.
    pub fn normalize(&self) -> Result<(Ket, f64)> {
        let norm = self.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroVector);
        }
        Ok((Ket::from_vector(self.amplitudes.unscale(norm)), norm))
    }

    pub fn scale(&self, factor: C64) -> Ket {
        Ket::from_vector(self.amplitudes.map(|a| a * factor))
    }

    /// Kronecker product `|self> ⊗ |other>` in row-major index order.
    pub fn tensor(&self, other: &Ket) -> Ket {
        let mut out = Vec::with_capacity(self.dim() * other.dim());
        for a in self.amplitudes.iter() {
            for b in other.amplitudes.iter() {
                out.push(a * b);
            }
        }
        Ket::new(out)
    }

    /// `|self><self|`.
    pub fn projector(&self) -> CMatrix {
        &self.amplitudes * self.amplitudes.adjoint()
    }

    /// Applies a matrix to the ket.
    pub fn transform(&self, op: &CMatrix) -> Ket {
        Ket::from_vector(op * &self.amplitudes)
    }

    /// Largest absolute amplitude difference.
    pub fn max_abs_diff(&self, other: &Ket) -> f64 {
        (&self.amplitudes - &other.amplitudes)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

/// Gram matrix `Ω_ij = <ψ_i|ψ_j>` with its inverse and spectrum.
#[derive(Debug, Clone)]
pub struct GramMatrix {
    entries: CMatrix,
    inverse: CMatrix,
    eigenvalues: Vec<f64>,
    eigenvectors: CMatrix,
}

impl GramMatrix {
    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn inverse(&self) -> &CMatrix {
        &self.inverse
    }

    pub fn len(&self) -> usize {
        self.entries.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    /// `f(Ω)` through the eigendecomposition.
    fn apply_fn(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (j, &lambda) in self.eigenvalues.iter().enumerate() {
            let s = f(lambda);
            scaled.column_mut(j).scale_mut(s);
        }
        scaled * v.adjoint()
    }

    /// `Ω^{1/2}`.
    pub fn sqrt(&self) -> CMatrix {
        self.apply_fn(f64::sqrt)
    }

    /// `Ω^{-1/2}`.
    pub fn inv_sqrt(&self) -> CMatrix {
        self.apply_fn(|l| 1.0 / l.sqrt())
    }
}

fn common_dim(states: &[Ket]) -> Result<usize> {
    let first = states.first().ok_or(Error::Empty)?;
    let dim = first.dim();
    if let Some(bad) = states.iter().find(|s| s.dim() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: bad.dim(),
        });
    }
    Ok(dim)
}

fn gram_entries(states: &[Ket]) -> CMatrix {
    let n = states.len();
    let mut m = CMatrix::from_fn(n, n, |i, j| states[i].inner(&states[j]));
    hermitize(&mut m);
    m
}

/// Replaces `m` by `(m + m†)/2`.
pub(crate) fn hermitize(m: &mut CMatrix) {
    let adj = m.adjoint();
    *m += adj;
    m.scale_mut(0.5);
}

/// Ascending eigen-decomposition of a Hermitian matrix.
pub(crate) fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = SymmetricEigen::new(m.clone());
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

/// Largest eigenvalue of a Hermitian matrix.
pub(crate) fn max_eigenvalue(m: &CMatrix) -> f64 {
    SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Smallest eigenvalue of a Hermitian matrix.
pub(crate) fn min_eigenvalue(m: &CMatrix) -> f64 {
    SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

fn is_dependent(eigenvalues: &[f64]) -> bool {
    let max = eigenvalues[eigenvalues.len() - 1];
    let min = eigenvalues[0];
    max <= 0.0 || min <= tol::RANK_TOL * max
}

/// Computes the Gram matrix of `states` and inverts it.
pub fn gram(states: &[Ket]) -> Result<GramMatrix> {
    common_dim(states)?;
    let entries = gram_entries(states);
    let (eigenvalues, eigenvectors) = hermitian_eigen(&entries);
    if is_dependent(&eigenvalues) {
        return Err(Error::SingularGram {
            min_eigenvalue: eigenvalues[0],
        });
    }
    let mut g = GramMatrix {
        entries,
        inverse: CMatrix::zeros(0, 0),
        eigenvalues,
        eigenvectors,
    };
    let mut inverse = g.apply_fn(|l| 1.0 / l);
    hermitize(&mut inverse);
    g.inverse = inverse;
    Ok(g)
}

/// Smallest Gram eigenvalue and the resulting independence verdict.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IndependenceReport {
    pub min_gram_eigenvalue: f64,
    pub independent: bool,
}

pub fn independence_report(states: &[Ket]) -> Result<IndependenceReport> {
    common_dim(states)?;
    let (eigenvalues, _) = hermitian_eigen(&gram_entries(states));
    Ok(IndependenceReport {
        min_gram_eigenvalue: eigenvalues[0],
        independent: !is_dependent(&eigenvalues),
    })
}

/// Reciprocal (biorthogonal dual) vectors of a linearly independent set.
#[derive(Debug, Clone)]
pub struct ReciprocalSet {
    vectors: Vec<Ket>,
    overlaps: CMatrix,
}

impl ReciprocalSet {
    pub fn vectors(&self) -> &[Ket] {
        &self.vectors
    }

    pub fn get(&self, i: usize) -> &Ket {
        &self.vectors[i]
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// `<ψ~_i|ψ~_j>`.
    pub fn overlaps(&self) -> &CMatrix {
        &self.overlaps
    }

    pub fn overlap(&self, i: usize, j: usize) -> C64 {
        self.overlaps[(i, j)]
    }
}

fn reciprocals_from_gram(states: &[Ket], g: &GramMatrix) -> ReciprocalSet {
    let n = states.len();
    let dim = states[0].dim();
    let inv = g.inverse();
    let vectors: Vec<Ket> = (0..n)
        .map(|i| {
            let mut v = CVector::zeros(dim);
            for (j, s) in states.iter().enumerate() {
                v.axpy(inv[(j, i)], s.amplitudes(), C64::new(1.0, 0.0));
            }
            Ket::from_vector(v)
        })
        .collect();
    let mut overlaps = CMatrix::from_fn(n, n, |i, j| vectors[i].inner(&vectors[j]));
    hermitize(&mut overlaps);
    ReciprocalSet { vectors, overlaps }
}

/// Builds `|ψ~_i> = Σ_j (Ω⁻¹)_ji |ψ_j>` for each state.
pub fn reciprocal_set(states: &[Ket]) -> Result<ReciprocalSet> {
    let g = gram(states)?;
    Ok(reciprocals_from_gram(states, &g))
}

/// Normalizes every ket, returning the normalized kets and original norms.
pub fn normalize_all(states: &[Ket]) -> Result<(Vec<Ket>, Vec<f64>)> {
    states.iter().map(Ket::normalize).collect::<Result<Vec<_>>>().map(|v| v.into_iter().unzip())
}

/// Linearly independent normalized states with nonzero prior probabilities.
#[derive(Debug, Clone)]
pub struct Ensemble {
    states: Vec<Ket>,
    priors: Vec<f64>,
    norm_factors: Vec<f64>,
    gram: GramMatrix,
    reciprocals: ReciprocalSet,
}

impl Ensemble {
    /// Normalizes `states`, records their original norms, and validates the
    /// priors and linear independence.
    pub fn new(states: Vec<Ket>, priors: Vec<f64>) -> Result<Self> {
        let dim = common_dim(&states)?;
        let n = states.len();
        if n > dim {
            return Err(Error::TooManyStates { n, dim });
        }
        validate_priors(&priors, n)?;
        let (states, norm_factors) = normalize_all(&states)?;
        let gram = gram(&states)?;
        let reciprocals = reciprocals_from_gram(&states, &gram);
        Ok(Self {
            states,
            priors,
            norm_factors,
            gram,
            reciprocals,
        })
    }

    /// Equal priors `1/n`.
    pub fn uniform(states: Vec<Ket>) -> Result<Self> {
        let n = states.len().max(1);
        Self::new(states, vec![1.0 / n as f64; n])
    }

    /// Same states, new priors.
    pub fn with_priors(&self, priors: Vec<f64>) -> Result<Self> {
        validate_priors(&priors, self.len())?;
        Ok(Self {
            priors,
            ..self.clone()
        })
    }

    pub fn states(&self) -> &[Ket] {
        &self.states
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    /// Norms of the kets as they were supplied.
    pub fn norm_factors(&self) -> &[f64] {
        &self.norm_factors
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn gram(&self) -> &GramMatrix {
        &self.gram
    }

    pub fn reciprocals(&self) -> &ReciprocalSet {
        &self.reciprocals
    }

    pub(crate) fn check_index(&self, index: usize) -> Result<()> {
        if index >= self.len() {
            return Err(Error::IndexOutOfRange {
                index,
                len: self.len(),
            });
        }
        Ok(())
    }
}

pub(crate) fn validate_priors(priors: &[f64], n: usize) -> Result<()> {
    if priors.len() != n {
        return Err(Error::InvalidPriors(format!(
            "expected {n} priors, got {}",
            priors.len()
        )));
    }
    if let Some((i, p)) = priors
        .iter()
        .enumerate()
        .find(|(_, p)| !p.is_finite() || **p <= tol::MIN_PRIOR)
    {
        return Err(Error::InvalidPriors(format!(
            "prior {} = {p} is not strictly positive",
            i + 1
        )));
    }
    let sum: f64 = priors.iter().sum();
    if (sum - 1.0).abs() > tol::PRIOR_SUM_TOL {
        return Err(Error::InvalidPriors(format!("priors sum to {sum}, not 1")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn orthonormal_pair_has_identity_gram() {
        let g = gram(&[Ket::basis(2, 0), Ket::basis(2, 1)]).unwrap();
        assert!((g.entries() - CMatrix::identity(2, 2)).norm() < 1e-15);
        assert!((g.inverse() - CMatrix::identity(2, 2)).norm() < 1e-15);
    }

    #[test]
    fn repeated_state_is_singular() {
        let err = gram(&[Ket::basis(2, 0), Ket::basis(2, 0)]).unwrap_err();
        assert!(matches!(err, Error::SingularGram { .. }));
    }

    #[test]
    fn mixed_dims_rejected() {
        let err = gram(&[Ket::basis(2, 0), Ket::basis(3, 1)]).unwrap_err();
        assert_eq!(
            err,
            Error::DimensionMismatch {
                expected: 2,
                found: 3
            }
        );
        assert!(independence_report(&[Ket::basis(2, 0), Ket::basis(3, 1)]).is_err());
    }

    #[test]
    fn independence_of_tilted_pair() {
        let s = 1.0 / 2f64.sqrt();
        let plus = Ket::real(&[s, s]);
        let r = independence_report(&[Ket::basis(2, 0), plus]).unwrap();
        assert!((r.min_gram_eigenvalue - (1.0 - s)).abs() < 1e-14);
        assert!(r.independent);

        let r = independence_report(&[Ket::basis(2, 0), Ket::basis(2, 1)]).unwrap();
        assert!((r.min_gram_eigenvalue - 1.0).abs() < 1e-15);
        assert!(r.independent);

        let r = independence_report(&[Ket::basis(2, 0), Ket::basis(2, 0)]).unwrap();
        assert!(r.min_gram_eigenvalue.abs() < 1e-15);
        assert!(!r.independent);
    }

    #[test]
    fn orthonormal_basis_is_self_reciprocal() {
        let basis: Vec<Ket> = (0..3).map(|i| Ket::basis(3, i)).collect();
        let rec = reciprocal_set(&basis).unwrap();
        for (r, b) in rec.vectors().iter().zip(&basis) {
            assert!(r.max_abs_diff(b) < 1e-15);
        }
    }

    #[test]
    fn ensemble_normalizes_and_records_factors() {
        let e = Ensemble::uniform(vec![Ket::real(&[3.0, 4.0]), Ket::real(&[0.0, 2.0])]).unwrap();
        assert_eq!(e.norm_factors(), &[5.0, 2.0]);
        assert!(e.states().iter().all(Ket::is_normalized));
        assert!((e.states()[0].amplitudes()[1] - c(0.8)).norm() < 1e-15);
    }

    #[test]
    fn ensemble_rejects_bad_priors() {
        let states = vec![Ket::basis(2, 0), Ket::basis(2, 1)];
        assert!(matches!(
            Ensemble::new(states.clone(), vec![0.5, 0.4]),
            Err(Error::InvalidPriors(_))
        ));
        assert!(matches!(
            Ensemble::new(states.clone(), vec![1.0, 0.0]),
            Err(Error::InvalidPriors(_))
        ));
        assert!(matches!(
            Ensemble::new(states, vec![1.0]),
            Err(Error::InvalidPriors(_))
        ));
    }

    #[test]
    fn ensemble_rejects_too_many_states() {
        let states = vec![Ket::basis(2, 0), Ket::basis(2, 1), Ket::real(&[1.0, 1.0])];
        assert!(matches!(
            Ensemble::uniform(states),
            Err(Error::TooManyStates { n: 3, dim: 2 })
        ));
    }

    #[test]
    fn zero_ket_cannot_be_normalized() {
        assert_eq!(Ket::real(&[0.0, 0.0]).normalize().unwrap_err(), Error::ZeroVector);
    }
}
