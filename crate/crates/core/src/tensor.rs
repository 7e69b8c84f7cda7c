//! Tensor-product structure: product-vector detection and partial traces.
//!
//! Amplitudes are stored row-major over the multi-index, i.e. the first
//! party's index varies slowest.

use nalgebra::SVD;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::{tol, CMatrix, CVector, Ket, C64};

/// Factor dimensions of a multipartite Hilbert space.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorSpace {
    dims: Vec<usize>,
}

impl TensorSpace {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidArgument("tensor space needs at least one factor".into()));
        }
        if let Some(d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidArgument(format!(
                "factor dimension {d} is below 2"
            )));
        }
        Ok(Self { dims })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn parties(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    fn check(&self, v: &Ket) -> Result<()> {
        if v.dim() != self.total_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.total_dim(),
                found: v.dim(),
            });
        }
        Ok(())
    }
}

/// Result of a product-vector test.
#[derive(Debug, Clone)]
pub struct ProductDecomposition {
    pub is_product: bool,
    /// Normalized local factors, present iff `is_product`.
    pub factors: Option<Vec<Ket>>,
    /// Largest second-to-first singular value ratio over the cuts examined.
    pub residual: f64,
}

impl ProductDecomposition {
    /// `⊗_k |φ_k>` for a product vector.
    pub fn product(&self) -> Option<Ket> {
        let factors = self.factors.as_ref()?;
        let mut it = factors.iter();
        let first = it.next()?.clone();
        Some(it.fold(first, |acc, f| acc.tensor(f)))
    }
}

/// Rotates the global phase so that the first non-negligible amplitude is
/// real and positive.
pub(crate) fn fix_phase(v: &CVector) -> CVector {
    let scale = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    match v.iter().find(|z| z.norm() > 1e-12 * scale) {
        Some(z) => {
            let phase = z.conj() / z.norm();
            v.map(|a| a * phase)
        }
        None => v.clone(),
    }
}

/// Tests whether `v` factorizes over `space`, peeling off one party at a
/// time through the Schmidt decomposition across the cut
/// `(1..k | k+1..m)`.
pub fn is_product_vector(v: &Ket, space: &TensorSpace) -> Result<ProductDecomposition> {
    space.check(v)?;
    let norm = v.norm();
    if norm == 0.0 {
        return Err(Error::ZeroVector);
    }
    let mut rest: CVector = v.amplitudes().unscale(norm);
    let mut factors = Vec::with_capacity(space.parties());
    let mut residual: f64 = 0.0;
    let dims = space.dims();
    for &d in dims.iter().take(dims.len() - 1) {
        let cols = rest.len() / d;
        // Row-major reshape: A[a, b] = rest[a * cols + b].
        let a = CMatrix::from_fn(d, cols, |r, c| rest[r * cols + c]);
        let svd = SVD::new(a.clone(), true, false);
        let sv = &svd.singular_values;
        let (first, idx) = sv
            .iter()
            .enumerate()
            .fold((0.0f64, 0usize), |acc, (i, &s)| if s > acc.0 { (s, i) } else { acc });
        let second = sv
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != idx)
            .map(|(_, &s)| s)
            .fold(0.0, f64::max);
        let ratio = if first > 0.0 { second / first } else { 0.0 };
        residual = residual.max(ratio);
        if ratio > tol::PRODUCT_TOL {
            return Ok(ProductDecomposition {
                is_product: false,
                factors: None,
                residual,
            });
        }
        let u = svd.u.as_ref().expect("left singular vectors requested");
        let local = fix_phase(&u.column(idx).into_owned());
        // Remainder for parties k+1..m: <φ_k| contracted into the rows.
        rest = (local.adjoint() * &a).transpose();
        factors.push(Ket::from_vector(local));
    }
    let tail_norm = rest.norm();
    factors.push(Ket::from_vector(fix_phase(&rest.unscale(tail_norm))));
    Ok(ProductDecomposition {
        is_product: true,
        factors: Some(factors),
        residual,
    })
}

/// Partial trace of `|v><v|` over every party except `keep`.
pub fn reduced_operator(v: &Ket, space: &TensorSpace, keep: usize) -> Result<CMatrix> {
    space.check(v)?;
    if keep >= space.parties() {
        return Err(Error::IndexOutOfRange {
            index: keep,
            len: space.parties(),
        });
    }
    if v.norm() == 0.0 {
        return Err(Error::ZeroVector);
    }
    let dims = space.dims();
    let d = dims[keep];
    let inner: usize = dims[keep + 1..].iter().product();
    let outer: usize = dims[..keep].iter().product();
    let amp = v.amplitudes();
    let mut rho = CMatrix::zeros(d, d);
    for o in 0..outer {
        for i in 0..inner {
            for a in 0..d {
                let va = amp[(o * d + a) * inner + i];
                if va == C64::new(0.0, 0.0) {
                    continue;
                }
                for b in 0..d {
                    let vb = amp[(o * d + b) * inner + i];
                    rho[(a, b)] += va * vb.conj();
                }
            }
        }
    }
    Ok(rho)
}

/// Numerical rank of a Hermitian PSD matrix at relative threshold `tol`.
pub fn psd_rank(m: &CMatrix, tol: f64) -> usize {
    let (values, _) = crate::ensemble::hermitian_eigen(m);
    let max = values.last().copied().unwrap_or(0.0);
    values.iter().filter(|&&l| l > tol * max).count()
}
