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

#![allow(dead_code)]

pub mod closed_forms;

use num_complex::Complex64;
use proptest::prelude::*;
use seqmeas_core::{ComplexMatrix, DensityMatrix};

/// ξ = 0°, 2.25°, …, 22.5° mapped to φ = 2ξ, in radians.
pub fn phi_grid() -> Vec<f64> {
    (0..=10).map(|i| (2.0 * 2.25 * i as f64).to_radians()).collect()
}

pub fn real(rows: &[&[f64]], scale: f64) -> ComplexMatrix {
    ComplexMatrix::from_real_rows(rows).unwrap().scale(scale)
}

pub fn density(rows: &[&[f64]], scale: f64, dims: Vec<usize>) -> DensityMatrix {
    DensityMatrix::new(real(rows, scale), dims).unwrap()
}

/// `A A† / Tr(A A†)` from raw entries.
pub fn density_from_entries(entries: &[(f64, f64)], dims: Vec<usize>) -> DensityMatrix {
    let d: usize = dims.iter().product();
    let a = ComplexMatrix::new(d, d, entries.iter().map(|&(r, i)| Complex64::new(r, i)).collect()).unwrap();
    let aa = a.matmul(&a.adjoint()).unwrap();
    let t = aa.trace().re;
    DensityMatrix::new(aa.scale(1.0 / t), dims).unwrap()
}

pub fn arb_density(dims: Vec<usize>) -> impl Strategy<Value = DensityMatrix> {
    let d: usize = dims.iter().product();
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), d * d)
        .prop_filter("nonzero", |v| v.iter().any(|(a, b)| a.abs() + b.abs() > 1e-3))
        .prop_map(move |v| density_from_entries(&v, dims.clone()))
}

pub fn arb_matrix(rows: usize, cols: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), rows * cols).prop_map(move |v| {
        ComplexMatrix::new(rows, cols, v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect()).unwrap()
    })
}

/// Random unitary from the QR decomposition of a random complex matrix.
pub fn unitary_from(m: &ComplexMatrix) -> ComplexMatrix {
    let qr = m.inner().clone().qr();
    ComplexMatrix::from_inner(qr.q())
}

pub fn assert_close(a: &DensityMatrix, b: &DensityMatrix, tol: f64, what: &str) {
    let diff = a.max_abs_diff(b);
    assert!(diff <= tol, "{what}: max element difference {diff:e} exceeds {tol:e}");
}
