// Copyright 2026 The seqmeas Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Matrix serialization.
//!
//! JSON: `{"dims": [..], "re": [..], "im": [..]}` with row-major entries. For
//! a [`DensityMatrix`] `dims` lists the subsystem dimensions; for a bare
//! [`ComplexMatrix`] it is `[rows, cols]`.
//!
//! CSV: a `# dims=...` line followed by one line per matrix row holding
//! `re,im` pairs. Floats are written in shortest round-trip form, so both
//! encodings are bit-exact.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::state::DensityMatrix;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MatrixRecord {
    pub dims: Vec<usize>,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl MatrixRecord {
    fn from_entries(dims: Vec<usize>, entries: &[Complex64]) -> Self {
        Self { dims, re: entries.iter().map(|z| z.re).collect(), im: entries.iter().map(|z| z.im).collect() }
    }

    fn entries(&self) -> Result<Vec<Complex64>> {
        if self.re.len() != self.im.len() {
            return Err(Error::Parse(format!("re has {} entries, im has {}", self.re.len(), self.im.len())));
        }
        Ok(self.re.iter().zip(&self.im).map(|(&r, &i)| Complex64::new(r, i)).collect())
    }
}

impl From<DensityMatrix> for MatrixRecord {
    fn from(rho: DensityMatrix) -> Self {
        MatrixRecord::from_entries(rho.dims().to_vec(), &rho.matrix().to_row_major())
    }
}

impl TryFrom<MatrixRecord> for DensityMatrix {
    type Error = Error;

    fn try_from(rec: MatrixRecord) -> Result<Self> {
        let d: usize = rec.dims.iter().product();
        let m = ComplexMatrix::new(d, d, rec.entries()?)?;
        DensityMatrix::new(m, rec.dims)
    }
}

impl From<ComplexMatrix> for MatrixRecord {
    fn from(m: ComplexMatrix) -> Self {
        MatrixRecord::from_entries(vec![m.rows(), m.cols()], &m.to_row_major())
    }
}

impl TryFrom<MatrixRecord> for ComplexMatrix {
    type Error = Error;

    fn try_from(rec: MatrixRecord) -> Result<Self> {
        match rec.dims.as_slice() {
            &[r, c] => ComplexMatrix::new(r, c, rec.entries()?),
            other => Err(Error::Parse(format!("matrix dims must be [rows, cols], got {other:?}"))),
        }
    }
}

pub fn density_to_json(rho: &DensityMatrix) -> String {
    serde_json::to_string(&MatrixRecord::from(rho.clone())).expect("finite floats serialize")
}

pub fn density_from_json(s: &str) -> Result<DensityMatrix> {
    let rec: MatrixRecord = serde_json::from_str(s)?;
    DensityMatrix::try_from(rec)
}

pub fn matrix_to_json(m: &ComplexMatrix) -> String {
    serde_json::to_string(&MatrixRecord::from(m.clone())).expect("finite floats serialize")
}

pub fn matrix_from_json(s: &str) -> Result<ComplexMatrix> {
    let rec: MatrixRecord = serde_json::from_str(s)?;
    ComplexMatrix::try_from(rec)
}

pub fn density_to_csv(rho: &DensityMatrix) -> String {
    let dims: Vec<String> = rho.dims().iter().map(usize::to_string).collect();
    let mut out = format!("# dims={}\n", dims.join(","));
    let n = rho.dim();
    for i in 0..n {
        let cells: Vec<String> = (0..n)
            .map(|j| {
                let z = rho.get(i, j);
                format!("{},{}", z.re, z.im)
            })
            .collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

pub fn density_from_csv(s: &str) -> Result<DensityMatrix> {
    let mut lines = s.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| Error::Parse("empty CSV".into()))?;
    let dims: Vec<usize> = header
        .trim()
        .strip_prefix("# dims=")
        .ok_or_else(|| Error::Parse(format!("expected `# dims=` header, got `{header}`")))?
        .split(',')
        .map(|t| t.trim().parse().map_err(|e| Error::Parse(format!("dims: {e}"))))
        .collect::<Result<_>>()?;
    let mut entries = Vec::new();
    for line in lines {
        let vals: Vec<f64> = line
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|e| Error::Parse(format!("`{t}`: {e}"))))
            .collect::<Result<_>>()?;
        if !vals.len().is_multiple_of(2) {
            return Err(Error::Parse("row has an odd number of fields".into()));
        }
        entries.extend(vals.chunks(2).map(|p| Complex64::new(p[0], p[1])));
    }
    let d: usize = dims.iter().product();
    DensityMatrix::new(ComplexMatrix::new(d, d, entries)?, dims)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn awkward() -> DensityMatrix {
        let entries = vec![
            Complex64::new(0.1 + 0.2, 0.0),
            Complex64::new(1.0 / 3.0, -2.0f64.sqrt()),
            Complex64::new(1.0 / 3.0, 2.0f64.sqrt()),
            Complex64::new(-0.0, 1e-300),
        ];
        DensityMatrix::qubit(ComplexMatrix::new(2, 2, entries).unwrap()).unwrap()
    }

    fn bits(rho: &DensityMatrix) -> Vec<(u64, u64)> {
        rho.matrix().to_row_major().iter().map(|z| (z.re.to_bits(), z.im.to_bits())).collect()
    }

    #[test]
    fn json_is_bit_exact() {
        let rho = awkward();
        let back = density_from_json(&density_to_json(&rho)).unwrap();
        assert_eq!(bits(&rho), bits(&back));
    }

    #[test]
    fn csv_is_bit_exact() {
        let rho = awkward();
        let back = density_from_csv(&density_to_csv(&rho)).unwrap();
        assert_eq!(bits(&rho), bits(&back));
        assert_eq!(back.dims(), &[2]);
    }

    #[test]
    fn json_rejects_bad_shapes() {
        assert!(density_from_json(r#"{"dims":[2],"re":[1,0,0],"im":[0,0,0]}"#).is_err());
        assert!(matrix_from_json(r#"{"dims":[2,2,2],"re":[],"im":[]}"#).is_err());
    }

    #[test]
    fn matrix_json_keeps_rectangular_shape() {
        let m = ComplexMatrix::from_real_rows(&[&[1.0, 2.0, 3.0]]).unwrap();
        let back = matrix_from_json(&matrix_to_json(&m)).unwrap();
        assert_eq!(back, m);
    }
}
