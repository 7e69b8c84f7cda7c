//! Built-in ensembles with hard-coded integer amplitudes.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::tensor::TensorSpace;
use crate::{Ensemble, Ket};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    /// Six 2⊗3 product states; only the first reciprocal is a product vector
    /// and NLWE depends on the priors.
    Example1,
    /// Example 1 with the first state replaced; NLWE for all priors.
    Example2,
    /// Four states in dimension 4 whose reciprocals split into two
    /// orthogonal pairs.
    FourState,
    /// The 2⊗2 computational basis.
    OrthonormalDemo,
}

pub const ALL_SCENARIOS: [Scenario; 4] = [
    Scenario::Example1,
    Scenario::Example2,
    Scenario::FourState,
    Scenario::OrthonormalDemo,
];

fn product(a: &[f64], b: &[f64]) -> Ket {
    Ket::real(a).tensor(&Ket::real(b))
}

fn example1_tail() -> Vec<Ket> {
    vec![
        product(&[0.0, 1.0], &[2.0, 2.0, 1.0]),
        product(&[0.0, 1.0], &[2.0, 1.0, 2.0]),
        product(&[2.0, 1.0], &[0.0, 2.0, 1.0]),
        product(&[1.0, 2.0], &[0.0, 1.0, 2.0]),
        product(&[1.0, 1.0], &[0.0, 1.0, 1.0]),
    ]
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::Example1 => "example1",
            Scenario::Example2 => "example2",
            Scenario::FourState => "four-state",
            Scenario::OrthonormalDemo => "orthonormal-demo",
        }
    }

    /// Unnormalized states; [`Ensemble::new`] normalizes them.
    pub fn states(self) -> Vec<Ket> {
        match self {
            Scenario::Example1 => {
                let mut v = vec![product(&[1.0, 1.0], &[4.0, 1.0, 1.0])];
                v.extend(example1_tail());
                v
            }
            Scenario::Example2 => {
                let mut v = vec![product(&[3.0, 4.0], &[1.0, 2.0, 2.0])];
                v.extend(example1_tail());
                v
            }
            Scenario::FourState => vec![
                Ket::real(&[1.0, 0.0, -1.0, -1.0]),
                Ket::real(&[0.0, 1.0, -1.0, 1.0]),
                Ket::real(&[0.0, 0.0, 1.0, 0.0]),
                Ket::real(&[0.0, 0.0, 0.0, 1.0]),
            ],
            Scenario::OrthonormalDemo => (0..4).map(|i| Ket::basis(4, i)).collect(),
        }
    }

    pub fn space(self) -> Option<TensorSpace> {
        let dims = match self {
            Scenario::Example1 | Scenario::Example2 => vec![2, 3],
            Scenario::OrthonormalDemo => vec![2, 2],
            Scenario::FourState => return None,
        };
        Some(TensorSpace::new(dims).expect("valid built-in dims"))
    }

    pub fn len(self) -> usize {
        match self {
            Scenario::Example1 | Scenario::Example2 => 6,
            Scenario::FourState | Scenario::OrthonormalDemo => 4,
        }
    }

    pub fn is_empty(self) -> bool {
        false
    }

    pub fn ensemble(self, priors: Vec<f64>) -> Result<Ensemble> {
        Ensemble::new(self.states(), priors)
    }

    pub fn uniform(self) -> Ensemble {
        Ensemble::uniform(self.states()).expect("built-in scenarios are valid")
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ALL_SCENARIOS
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown scenario '{s}'")))
    }
}

/// The two-parameter prior family over Example 1's six states:
/// `ξ1 = ξ2 = 9a/143`, `ξ3 = 18(1−a)/143`, `ξ4 = 25b/143`,
/// `ξ5 = 100b/143`, `ξ6 = 125(1−b)/143`.
pub fn ab_priors(a: f64, b: f64) -> Result<Vec<f64>> {
    if !(a > 0.0 && a < 1.0 && b > 0.0 && b < 1.0) {
        return Err(Error::InvalidPriors(format!(
            "(a, b) = ({a}, {b}) must lie in the open unit square"
        )));
    }
    Ok(vec![
        9.0 * a / 143.0,
        9.0 * a / 143.0,
        18.0 * (1.0 - a) / 143.0,
        25.0 * b / 143.0,
        100.0 * b / 143.0,
        125.0 * (1.0 - b) / 143.0,
    ])
}

/// Closed-form local-achievability rule for [`ab_priors`]:
/// `a ≥ b` and `a ≥ (125/169)(1 − b)`.
pub fn ab_locc_rule(a: f64, b: f64) -> bool {
    a >= b && 169.0 * a >= 125.0 * (1.0 - b)
}
