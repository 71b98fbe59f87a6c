//! JSON state files.
//!
//! ```json
//! {"kind": "matrix", "dim": 2, "entries": [[0.5, 0.0], [0.0, 0.0], [0.0, 0.0], [0.5, 0.0]]}
//! {"kind": "coherent", "truncation": 32, "margin": 16, "beta": [1.0, 0.0]}
//! ```
//!
//! Matrix entries are `[re, im]` pairs in row-major order. Photon kinds take
//! `truncation` and `margin` (defaults 32 and 16) plus builder parameters.

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{ComplexMatrix, DensityMatrix};
use crate::photon::{build_state, CatParity, FockSpace, PhotonState, StateSpec};

#[derive(Debug, Error)]
pub enum StateFileError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("{path}: {source}")]
    Invalid {
        path: PathBuf,
        source: crate::Error,
    },
}

fn default_truncation() -> usize {
    FockSpace::DEFAULT_TRUNCATION
}

fn default_margin() -> usize {
    FockSpace::DEFAULT_MARGIN
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateFile {
    Matrix {
        dim: usize,
        entries: Vec<[f64; 2]>,
    },
    Fock {
        #[serde(default = "default_truncation")]
        truncation: usize,
        #[serde(default = "default_margin")]
        margin: usize,
        n: usize,
    },
    Coherent {
        #[serde(default = "default_truncation")]
        truncation: usize,
        #[serde(default = "default_margin")]
        margin: usize,
        beta: [f64; 2],
    },
    Thermal {
        #[serde(default = "default_truncation")]
        truncation: usize,
        #[serde(default = "default_margin")]
        margin: usize,
        nbar: f64,
    },
    Cat {
        #[serde(default = "default_truncation")]
        truncation: usize,
        #[serde(default = "default_margin")]
        margin: usize,
        beta: [f64; 2],
        parity: CatParity,
    },
}

/// A parsed state; `space` is set for photon kinds.
#[derive(Debug, Clone)]
pub struct LoadedState {
    pub state: PhotonState,
    pub space: Option<FockSpace>,
}

impl StateFile {
    pub fn from_density(rho: &DensityMatrix) -> Self {
        let m = rho.matrix();
        let n = rho.dim();
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push([m[(i, j)].re, m[(i, j)].im]);
            }
        }
        StateFile::Matrix { dim: n, entries }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("state files always serialize")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn load(path: &Path) -> Result<Self, StateFileError> {
        let text = fs::read_to_string(path).map_err(|source| StateFileError::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::from_json(&text).map_err(|source| StateFileError::Parse {
            path: path.to_owned(),
            source,
        })
    }

    pub fn save(&self, path: &Path) -> Result<(), StateFileError> {
        fs::write(path, self.to_json() + "\n").map_err(|source| StateFileError::Io {
            path: path.to_owned(),
            source,
        })
    }

    /// Validates the file and builds the state it describes.
    pub fn resolve(&self) -> crate::Result<LoadedState> {
        let photon = |truncation: usize, margin: usize, spec: StateSpec| {
            let space = FockSpace::new(truncation, margin)?;
            Ok(LoadedState {
                state: build_state(&spec, &space)?,
                space: Some(space),
            })
        };
        match *self {
            StateFile::Matrix { dim, ref entries } => {
                if entries.len() != dim * dim {
                    return Err(crate::Error::InvalidState(format!(
                        "{} matrix entries for dim {dim}, expected {}",
                        entries.len(),
                        dim * dim
                    )));
                }
                let m = ComplexMatrix::from_fn(dim, dim, |i, j| {
                    let [re, im] = entries[i * dim + j];
                    Complex64::new(re, im)
                });
                Ok(LoadedState {
                    state: PhotonState::exact(DensityMatrix::new(m)?),
                    space: None,
                })
            }
            StateFile::Fock { truncation, margin, n } => {
                photon(truncation, margin, StateSpec::Fock { n })
            }
            StateFile::Coherent { truncation, margin, beta } => photon(
                truncation,
                margin,
                StateSpec::Coherent { re: beta[0], im: beta[1] },
            ),
            StateFile::Thermal { truncation, margin, nbar } => {
                photon(truncation, margin, StateSpec::Thermal { nbar })
            }
            StateFile::Cat { truncation, margin, beta, parity } => photon(
                truncation,
                margin,
                StateSpec::Cat { re: beta[0], im: beta[1], parity },
            ),
        }
    }

    /// [`StateFile::load`] followed by [`StateFile::resolve`].
    pub fn load_state(path: &Path) -> Result<LoadedState, StateFileError> {
        Self::load(path)?
            .resolve()
            .map_err(|source| StateFileError::Invalid {
                path: path.to_owned(),
                source,
            })
    }
}
