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

//! Density matrices over a register of subsystems.
//!
//! Subsystem 0 is the most significant digit of the composite index, so a
//! register with dims `[2, 2, 2]` orders its basis as `|000>, |001>, ...`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{kron, ComplexMatrix};
use crate::{PSD_TOL, STRUCTURAL_TOL};

/// Eigenvalues below this are treated as exact zeros in entropies.
pub const ENTROPY_CUTOFF: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "crate::io::MatrixRecord", try_from = "crate::io::MatrixRecord")]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    dims: Vec<usize>,
}

/// Outcome of [`DensityMatrix::validate`].
#[derive(Clone, Debug, Serialize)]
pub struct Validation {
    pub trace_deviation: f64,
    pub hermiticity_violation: f64,
    pub min_eigenvalue: f64,
    pub passed: bool,
    pub failures: Vec<String>,
}

impl DensityMatrix {
    /// Wraps a square matrix. Only the shape is checked here; physical
    /// invariants are reported by [`validate`](Self::validate).
    pub fn new(matrix: ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Dimension(format!(
                "density matrix must be square, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        if dims.is_empty() || dims.iter().any(|&d| d < 2) {
            return Err(Error::Dimension(format!(
                "subsystem dims must be nonempty and each >= 2, got {dims:?}"
            )));
        }
        let product: usize = dims.iter().product();
        if product != matrix.rows() {
            return Err(Error::Dimension(format!(
                "dims {dims:?} multiply to {product}, matrix is {}x{}",
                matrix.rows(),
                matrix.rows()
            )));
        }
        Ok(Self { matrix, dims })
    }

    /// Single-qubit state.
    pub fn qubit(matrix: ComplexMatrix) -> Result<Self> {
        Self::new(matrix, vec![2])
    }

    /// Register of `n` qubits.
    pub fn qubits(matrix: ComplexMatrix, n: usize) -> Result<Self> {
        Self::new(matrix, vec![2; n])
    }

    /// `|psi><psi|` for a (not necessarily normalised) state vector.
    pub fn from_pure(amplitudes: &[Complex64], dims: Vec<usize>) -> Result<Self> {
        Self::new(ComplexMatrix::outer(amplitudes), dims)
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Result<Self> {
        let d: usize = dims.iter().product();
        Self::new(ComplexMatrix::identity(d).scale(1.0 / d as f64), dims)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn num_subsystems(&self) -> usize {
        self.dims.len()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.matrix.get(i, j)
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.matrix.get(i, i).re).collect()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Tensor product with the subsystems of `other` appended.
    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        DensityMatrix { matrix: kron(&self.matrix, &other.matrix), dims }
    }

    pub fn approx_eq(&self, other: &DensityMatrix, tol: f64) -> bool {
        self.dims == other.dims && self.matrix.approx_eq(&other.matrix, tol)
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        self.matrix.max_abs_diff(&other.matrix)
    }

    fn check_subsystem(&self, index: usize) -> Result<()> {
        if index >= self.dims.len() {
            return Err(Error::SubsystemIndex { index, count: self.dims.len() });
        }
        Ok(())
    }

    /// Reduced state on `keep`; the kept subsystems stay in their original
    /// order regardless of the order given.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        if keep.is_empty() {
            return Err(Error::EmptySelection);
        }
        for &k in keep {
            self.check_subsystem(k)?;
        }
        let mut kept: Vec<usize> = keep.to_vec();
        kept.sort_unstable();
        kept.dedup();
        if kept.len() == self.dims.len() {
            return Ok(self.clone());
        }
        let layout = Layout::new(&self.dims);
        let kept_dims: Vec<usize> = kept.iter().map(|&k| self.dims[k]).collect();
        let traced: Vec<usize> = (0..self.dims.len()).filter(|s| !kept.contains(s)).collect();
        let traced_dims: Vec<usize> = traced.iter().map(|&k| self.dims[k]).collect();
        let dk: usize = kept_dims.iter().product();
        let dt: usize = traced_dims.iter().product();

        // groups[t][a] = composite index with kept part `a` and traced part `t`
        let mut groups = vec![vec![0usize; dk]; dt];
        let mut digits = vec![0usize; self.dims.len()];
        for full in 0..self.dim() {
            layout.digits_into(full, &mut digits);
            let a = compose(kept.iter().map(|&k| digits[k]), &kept_dims);
            let t = compose(traced.iter().map(|&k| digits[k]), &traced_dims);
            groups[t][a] = full;
        }
        let src = self.matrix.inner();
        let mut out = DMatrix::<Complex64>::zeros(dk, dk);
        for g in &groups {
            for (a, &ia) in g.iter().enumerate() {
                for (b, &ib) in g.iter().enumerate() {
                    out[(a, b)] += src[(ia, ib)];
                }
            }
        }
        DensityMatrix::new(ComplexMatrix::from_inner(out), kept_dims)
    }

    /// Reorders subsystems: new subsystem `k` is old subsystem `order[k]`.
    pub fn permute_subsystems(&self, order: &[usize]) -> Result<DensityMatrix> {
        let n = self.dims.len();
        let mut seen = vec![false; n];
        if order.len() != n {
            return Err(Error::Dimension(format!(
                "permutation of length {} for {n} subsystems",
                order.len()
            )));
        }
        for &o in order {
            self.check_subsystem(o)?;
            if seen[o] {
                return Err(Error::Overlap);
            }
            seen[o] = true;
        }
        let new_dims: Vec<usize> = order.iter().map(|&o| self.dims[o]).collect();
        let old = Layout::new(&self.dims);
        let mut map = vec![0usize; self.dim()];
        let mut digits = vec![0usize; n];
        for (full, slot) in map.iter_mut().enumerate() {
            old.digits_into(full, &mut digits);
            *slot = compose(order.iter().map(|&o| digits[o]), &new_dims);
        }
        let src = self.matrix.inner();
        let d = self.dim();
        let mut out = DMatrix::<Complex64>::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                out[(map[i], map[j])] = src[(i, j)];
            }
        }
        DensityMatrix::new(ComplexMatrix::from_inner(out), new_dims)
    }

    /// `Tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        let m = self.matrix.inner();
        let n = self.dim();
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                acc += m[(i, j)] * m[(j, i)];
            }
        }
        acc.re
    }

    /// Spectrum of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let h = self.hermitian_part();
        let mut ev: Vec<f64> = h.symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Eigen-decomposition of the Hermitian part: `(eigenvalues, eigenvectors as columns)`.
    pub fn eigen(&self) -> (Vec<f64>, DMatrix<Complex64>) {
        let e = self.hermitian_part().symmetric_eigen();
        (e.eigenvalues.iter().copied().collect(), e.eigenvectors)
    }

    fn hermitian_part(&self) -> DMatrix<Complex64> {
        let m = self.matrix.inner();
        (m + m.adjoint()) * Complex64::new(0.5, 0.0)
    }

    /// Von Neumann entropy in bits, `0 log 0 = 0`.
    pub fn von_neumann_entropy(&self) -> f64 {
        entropy_of_spectrum(&self.eigenvalues())
    }

    /// Complete dephasing of one subsystem in its computational basis.
    pub fn dephase(&self, subsystem: usize) -> Result<DensityMatrix> {
        self.check_subsystem(subsystem)?;
        let layout = Layout::new(&self.dims);
        let d = self.dim();
        let digit: Vec<usize> = (0..d).map(|i| layout.digit(i, subsystem)).collect();
        let mut out = self.matrix.inner().clone();
        for i in 0..d {
            for j in 0..d {
                if digit[i] != digit[j] {
                    out[(i, j)] = Complex64::new(0.0, 0.0);
                }
            }
        }
        DensityMatrix::new(ComplexMatrix::from_inner(out), self.dims.clone())
    }

    /// Dephases each listed subsystem in turn.
    pub fn dephase_all(&self, subsystems: &[usize]) -> Result<DensityMatrix> {
        let mut out = self.clone();
        for &s in subsystems {
            out = out.dephase(s)?;
        }
        Ok(out)
    }

    /// Checks trace, Hermiticity and positivity.
    pub fn validate(&self) -> Validation {
        let trace_deviation = (self.matrix.trace() - Complex64::new(1.0, 0.0)).norm();
        let hermiticity_violation = self.matrix.hermiticity_violation();
        let min_eigenvalue = self.eigenvalues().first().copied().unwrap_or(0.0);
        let mut failures = Vec::new();
        if trace_deviation > STRUCTURAL_TOL {
            failures.push(format!("trace {} deviates from 1", self.matrix.trace().re));
        }
        if hermiticity_violation > STRUCTURAL_TOL {
            failures.push(format!("not Hermitian (violation {hermiticity_violation:e})"));
        }
        if min_eigenvalue < -PSD_TOL {
            failures.push(format!("negative eigenvalue {min_eigenvalue:e}"));
        }
        Validation {
            trace_deviation,
            hermiticity_violation,
            min_eigenvalue,
            passed: failures.is_empty(),
            failures,
        }
    }

    pub fn is_valid(&self) -> bool {
        self.validate().passed
    }
}

/// `-sum p log2 p` over a spectrum; tiny and slightly negative values count as 0.
pub fn entropy_of_spectrum(spectrum: &[f64]) -> f64 {
    let s: f64 = spectrum.iter().filter(|&&p| p > ENTROPY_CUTOFF).map(|&p| -p * p.log2()).sum();
    s.max(0.0)
}

/// Mixed-radix index arithmetic, subsystem 0 most significant.
#[derive(Clone, Debug)]
pub(crate) struct Layout {
    dims: Vec<usize>,
    strides: Vec<usize>,
}

impl Layout {
    pub(crate) fn new(dims: &[usize]) -> Self {
        let mut strides = vec![1; dims.len()];
        for k in (0..dims.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * dims[k + 1];
        }
        Self { dims: dims.to_vec(), strides }
    }

    pub(crate) fn digit(&self, index: usize, subsystem: usize) -> usize {
        (index / self.strides[subsystem]) % self.dims[subsystem]
    }

    pub(crate) fn digits_into(&self, index: usize, out: &mut [usize]) {
        for (k, slot) in out.iter_mut().enumerate() {
            *slot = self.digit(index, k);
        }
    }
}

fn compose(digits: impl Iterator<Item = usize>, dims: &[usize]) -> usize {
    digits.zip(dims).fold(0, |acc, (d, &n)| acc * n + d)
}
