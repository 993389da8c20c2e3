//! Matrix file format: a JSON document
//! `{"rows": r, "cols": c, "data": [[re, im], ...]}` with row-major data.
//! Numbers are written with 17 significant digits.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ComplexMatrix;
use crate::error::{Error, Result};
use crate::report::{to_json_string, write_atomic};

/// Serialized form of a [`ComplexMatrix`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl From<&ComplexMatrix> for MatrixFile {
    fn from(m: &ComplexMatrix) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            data: m.data().iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl TryFrom<MatrixFile> for ComplexMatrix {
    type Error = Error;

    fn try_from(f: MatrixFile) -> Result<Self> {
        ComplexMatrix::new(
            f.rows,
            f.cols,
            f.data.into_iter().map(|[re, im]| Complex64::new(re, im)).collect(),
        )
    }
}

impl Serialize for ComplexMatrix {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixFile::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let f = MatrixFile::deserialize(deserializer)?;
        ComplexMatrix::try_from(f).map_err(serde::de::Error::custom)
    }
}

impl ComplexMatrix {
    pub fn to_json(&self) -> String {
        to_json_string(self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: MatrixFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        ComplexMatrix::try_from(f)
    }
}

pub fn write_matrix_file(path: &Path, m: &ComplexMatrix) -> Result<()> {
    write_atomic(path, m.to_json().as_bytes())
}

pub fn read_matrix_file(path: &Path) -> Result<ComplexMatrix> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    ComplexMatrix::from_json(&text)
}
