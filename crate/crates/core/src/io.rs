//! JSON ensemble files.
//!
//! ```json
//! { "dims": [2, 3],
//!   "states": [[[1, 0], [0, 0], ...], ...],
//!   "priors": [0.5, 0.5] }
//! ```
//!
//! Each amplitude is a `[re, im]` pair, row-major over the tensor-product
//! index when `dims` has more than one factor.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::Error;
use crate::tensor::TensorSpace;
use crate::{Ensemble, Ket, C64};

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("validation error ({field}): {message}")]
    Validation { field: &'static str, message: String },
}

impl LoadError {
    fn validation(field: &'static str, err: impl std::fmt::Display) -> Self {
        LoadError::Validation {
            field,
            message: err.to_string(),
        }
    }

    /// The violated field for validation errors.
    pub fn field(&self) -> Option<&'static str> {
        match self {
            LoadError::Validation { field, .. } => Some(field),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleFile {
    pub dims: Vec<usize>,
    pub states: Vec<Vec<[f64; 2]>>,
    pub priors: Vec<f64>,
}

/// A validated ensemble with its optional tensor structure.
#[derive(Debug, Clone)]
pub struct LoadedEnsemble {
    pub ensemble: Ensemble,
    /// Present when `dims` has more than one factor.
    pub space: Option<TensorSpace>,
}

impl EnsembleFile {
    pub fn from_ensemble(ensemble: &Ensemble, dims: Vec<usize>) -> Self {
        Self {
            dims,
            states: ensemble
                .states()
                .iter()
                .map(|k| k.amplitudes().iter().map(|z| [z.re, z.im]).collect())
                .collect(),
            priors: ensemble.priors().to_vec(),
        }
    }

    pub fn validate(self) -> Result<LoadedEnsemble, LoadError> {
        if self.dims.is_empty() || self.dims.contains(&0) {
            return Err(LoadError::validation("dims", "dims must be a nonempty list of positive integers"));
        }
        let total: usize = self.dims.iter().product();
        let space = if self.dims.len() > 1 {
            Some(TensorSpace::new(self.dims.clone()).map_err(|e| LoadError::validation("dims", e))?)
        } else {
            None
        };
        if let Some((i, s)) = self.states.iter().enumerate().find(|(_, s)| s.len() != total) {
            return Err(LoadError::validation(
                "states",
                format!("state {} has {} amplitudes, dims require {total}", i + 1, s.len()),
            ));
        }
        let kets = self
            .states
            .into_iter()
            .map(|s| Ket::new(s.into_iter().map(|[re, im]| C64::new(re, im)).collect()))
            .collect();
        let ensemble = Ensemble::new(kets, self.priors).map_err(|e| match e {
            Error::InvalidPriors(_) => LoadError::validation("priors", e),
            Error::SingularGram { .. } | Error::TooManyStates { .. } => {
                LoadError::validation("independence", e)
            }
            other => LoadError::validation("states", other),
        })?;
        Ok(LoadedEnsemble { ensemble, space })
    }
}

pub fn parse_ensemble(text: &str) -> Result<LoadedEnsemble, LoadError> {
    let file: EnsembleFile = serde_json::from_str(text).map_err(|e| LoadError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    file.validate()
}

pub fn load_ensemble(path: impl AsRef<Path>) -> Result<LoadedEnsemble, LoadError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_ensemble(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_state_file() {
        let text = r#"{"dims":[2],"states":[[[1,0],[0,0]],[[0.6,0],[0,0.8]]],"priors":[0.3,0.7]}"#;
        let loaded = parse_ensemble(text).unwrap();
        assert_eq!(loaded.ensemble.len(), 2);
        assert!(loaded.space.is_none());
    }

    #[test]
    fn multipartite_dims_activate_space() {
        let text = r#"{"dims":[2,2],"states":[[[1,0],[0,0],[0,0],[0,0]],[[0,0],[1,0],[0,0],[0,0]]],"priors":[0.5,0.5]}"#;
        let loaded = parse_ensemble(text).unwrap();
        assert_eq!(loaded.space.unwrap().dims(), &[2, 2]);
    }

    #[test]
    fn priors_not_summing_to_one() {
        let text = r#"{"dims":[2],"states":[[[1,0],[0,0]],[[0,0],[1,0]]],"priors":[0.5,0.4]}"#;
        assert_eq!(parse_ensemble(text).unwrap_err().field(), Some("priors"));
    }

    #[test]
    fn dependent_states() {
        let text = r#"{"dims":[2],"states":[[[1,0],[0,0]],[[2,0],[0,0]]],"priors":[0.5,0.5]}"#;
        assert_eq!(parse_ensemble(text).unwrap_err().field(), Some("independence"));
    }

    #[test]
    fn wrong_amplitude_count() {
        let text = r#"{"dims":[2,2],"states":[[[1,0],[0,0]]],"priors":[1.0]}"#;
        assert_eq!(parse_ensemble(text).unwrap_err().field(), Some("states"));
    }

    #[test]
    fn syntax_error_reports_position() {
        let text = "{\"dims\": [2],\n \"states\": [[[1,0],[0,0]]],\n \"priors\": [1.0,]}";
        match parse_ensemble(text).unwrap_err() {
            LoadError::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other}"),
        }
    }
}
