//! Numerical thresholds shared across modules.

/// Linear dependence threshold on the smallest Gram eigenvalue, relative to
/// the largest one.
pub const RANK_TOL: f64 = 1e-9;

/// A normalized ket satisfies `|<v|v> - 1| <= NORMALIZED_TOL`.
pub const NORMALIZED_TOL: f64 = 1e-12;

/// Priors must sum to one within this tolerance.
pub const PRIOR_SUM_TOL: f64 = 1e-12;

/// Priors at or below this value are rejected.
pub const MIN_PRIOR: f64 = 1e-12;

/// Default threshold on every KKT residual group.
pub const KKT_TOL: f64 = 1e-6;

/// Interior-point stopping criterion on the duality gap.
pub const GAP_TOL: f64 = 1e-9;

/// Newton step cap for one solve.
pub const MAX_NEWTON_STEPS: usize = 10_000;

/// Second-to-first singular value ratio at or below which a vector counts
/// as a product across a cut.
pub const PRODUCT_TOL: f64 = 1e-8;

/// Reciprocal overlaps at or below this fraction of the largest overlap
/// magnitude are treated as exact zeros.
pub const OVERLAP_ZERO_TOL: f64 = 1e-10;

/// Relative slack granted to prior-ratio inequalities so that exactly
/// saturated priors (boundary cases) are classified as satisfied.
pub const CONDITION_TOL: f64 = 1e-10;

/// A success probability above this counts as a detected state.
pub const SUPPORT_TOL: f64 = 1e-6;
