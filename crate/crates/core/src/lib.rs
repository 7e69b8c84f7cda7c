//! Optimal unambiguous discrimination (UD) of linearly independent pure
//! states.
//!
//! The crate is organised bottom-up:
//!
//! * [`ensemble`] holds kets, ensembles, Gram matrices and reciprocal
//!   (biorthogonal dual) vectors.
//! * [`solver`] solves the UD program with a log-barrier interior-point
//!   method, extracts and verifies KKT certificates, and carries the
//!   closed-form single-state solution and a brute-force grid oracle.
//! * [`tensor`] and [`locc`] add multipartite structure: product-vector
//!   detection, partial traces and the finite-round local projective
//!   protocol that detects one state.
//! * [`nlwe`] decides whether the globally optimal measurement is locally
//!   achievable and classifies nonlocality without entanglement.
//! * [`scenarios`], [`scan`], [`io`] and [`report`] back the `udisc` CLI.

pub mod ensemble;
pub mod error;
pub mod io;
pub mod locc;
pub mod nlwe;
pub mod report;
pub mod scan;
pub mod scenarios;
pub mod solver;
pub mod tensor;
pub mod tol;

pub use ensemble::{gram, independence_report, reciprocal_set, Ensemble, GramMatrix, Ket, ReciprocalSet};
pub use error::{Error, Result};
pub use nalgebra::{DMatrix, DVector};
pub use num_complex::Complex64 as C64;

/// Dense complex matrix used for operators and Gram matrices.
pub type CMatrix = DMatrix<C64>;
/// Dense complex column vector.
pub type CVector = DVector<C64>;
