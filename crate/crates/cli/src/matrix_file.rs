//! On-disk JSON format for matrices and states.

use std::path::Path;

use blobkit::linalg;
use blobkit::symplectic::{PhaseDim, SymplecticMatrix};
use blobkit::tolerance::{self, Tolerances};
use blobkit::{Error, GaussianMixedState};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Kind {
    #[serde(rename = "covariance")]
    Covariance,
    #[serde(rename = "M")]
    M,
    #[serde(rename = "symplectic")]
    Symplectic,
    #[serde(rename = "G")]
    G,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Covariance => "covariance",
            Kind::M => "M",
            Kind::Symplectic => "symplectic",
            Kind::G => "G",
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum Entries {
    Nested(Vec<Vec<f64>>),
    Flat(Vec<f64>),
}

fn default_hbar() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    n: usize,
    #[serde(default = "default_hbar")]
    hbar: f64,
    kind: Kind,
    matrix: Entries,
    #[serde(default)]
    mean: Option<Vec<f64>>,
}

/// A validated matrix file.
#[derive(Debug, Clone)]
pub struct MatrixFile {
    pub n: usize,
    pub hbar: f64,
    pub kind: Kind,
    pub matrix: DMatrix<f64>,
    pub mean: DVector<f64>,
}

#[derive(Serialize)]
struct OutFile<'a> {
    n: usize,
    hbar: f64,
    kind: Kind,
    matrix: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mean: Option<&'a [f64]>,
}

pub fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

impl MatrixFile {
    pub fn parse(text: &str) -> Result<Self, String> {
        let raw: RawFile = serde_json::from_str(text).map_err(|e| format!("malformed matrix file: {e}"))?;
        if raw.n == 0 {
            return Err("n must be at least 1".into());
        }
        if !(raw.hbar.is_finite() && raw.hbar > 0.0) {
            return Err(format!("hbar must be positive, got {}", raw.hbar));
        }
        let size = 2 * raw.n;
        let flat: Vec<f64> = match raw.matrix {
            Entries::Nested(r) => {
                if r.len() != size || r.iter().any(|row| row.len() != size) {
                    return Err(format!("matrix must be {size}×{size} for n = {}", raw.n));
                }
                r.into_iter().flatten().collect()
            }
            Entries::Flat(v) => {
                if v.len() != size * size {
                    return Err(format!("flat matrix must have {} entries for n = {}", size * size, raw.n));
                }
                v
            }
        };
        if flat.iter().any(|v| !v.is_finite()) {
            return Err("matrix has non-finite entries".into());
        }
        let mean = match raw.mean {
            Some(v) if v.len() != size => return Err(format!("mean must have {size} entries")),
            Some(v) if v.iter().any(|x| !x.is_finite()) => return Err("mean has non-finite entries".into()),
            Some(v) => DVector::from_vec(v),
            None => DVector::zeros(size),
        };
        Ok(Self { n: raw.n, hbar: raw.hbar, kind: raw.kind, matrix: DMatrix::from_row_slice(size, size, &flat), mean })
    }

    pub fn new(kind: Kind, matrix: DMatrix<f64>, mean: DVector<f64>, hbar: f64) -> Self {
        Self { n: matrix.nrows() / 2, hbar, kind, matrix, mean }
    }

    pub fn to_json(&self) -> String {
        let has_mean = self.mean.iter().any(|v| *v != 0.0);
        let out = OutFile {
            n: self.n,
            hbar: self.hbar,
            kind: self.kind,
            matrix: rows(&self.matrix),
            mean: has_mean.then_some(self.mean.as_slice()),
        };
        let mut text = serde_json::to_string_pretty(&out).expect("serializable");
        text.push('\n');
        text
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_json())
    }

    /// The mixed state described by the file: `Σ` directly, or
    /// `Σ = (ħ/2)A⁻¹` for `A = M` or `A = G`.
    pub fn state(&self) -> Result<GaussianMixedState, Error> {
        let sigma = match self.kind {
            Kind::Covariance => self.matrix.clone(),
            Kind::M | Kind::G => {
                let tol = Tolerances::default();
                linalg::spd_inverse(&self.matrix, tol.symmetry, tol.max_condition)? * (0.5 * self.hbar)
            }
            Kind::Symplectic => {
                return Err(Error::Dimension(
                    "a symplectic matrix does not describe a state; expected kind covariance, M or G".into(),
                ))
            }
        };
        GaussianMixedState::new(sigma, self.mean.clone(), self.hbar)
    }

    /// `M = (ħ/2)Σ⁻¹` for states, or the matrix itself for kind `M`.
    pub fn m_matrix(&self) -> Result<DMatrix<f64>, Error> {
        match self.kind {
            Kind::M => Ok(self.matrix.clone()),
            _ => self.state()?.m_matrix(),
        }
    }

    pub fn symplectic(&self) -> Result<SymplecticMatrix, Error> {
        if self.kind != Kind::Symplectic {
            return Err(Error::Dimension(format!("expected kind symplectic, got {}", self.kind.name())));
        }
        PhaseDim::of_matrix(&self.matrix)?;
        SymplecticMatrix::new(self.matrix.clone(), tolerance::SYMPLECTIC)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nested_and_flat_agree() {
        let a = MatrixFile::parse(r#"{"n":1,"kind":"M","matrix":[[4,0],[0,9]]}"#).unwrap();
        let b = MatrixFile::parse(r#"{"n":1,"kind":"M","matrix":[4,0,0,9]}"#).unwrap();
        assert_eq!(a.matrix, b.matrix);
        assert_eq!(a.hbar, 1.0);
    }

    #[test]
    fn round_trip() {
        let f = MatrixFile::parse(r#"{"n":1,"hbar":0.5,"kind":"G","matrix":[[2,0.25],[0.25,0.53125]],"mean":[1,-2]}"#)
            .unwrap();
        let back = MatrixFile::parse(&f.to_json()).unwrap();
        assert_eq!(back.matrix, f.matrix);
        assert_eq!(back.mean, f.mean);
        assert_eq!(back.kind, Kind::G);
        assert_eq!(back.hbar, 0.5);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(MatrixFile::parse(r#"{"n":2,"kind":"M","matrix":[[1,0],[0,1]]}"#).is_err());
        assert!(MatrixFile::parse(r#"{"n":1,"kind":"X","matrix":[[1,0],[0,1]]}"#).is_err());
        assert!(MatrixFile::parse(r#"{"n":1,"kind":"M","matrix":[[1,0],[0,1]],"extra":1}"#).is_err());
        assert!(MatrixFile::parse(r#"{"n":1,"kind":"M","matrix":[[1,0],[0,1]],"mean":[0]}"#).is_err());
        assert!(MatrixFile::parse("{not json").is_err());
    }
}
