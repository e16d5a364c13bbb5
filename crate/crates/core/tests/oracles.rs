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

//! Core primitives against brute-force index-summation oracles.

mod common;

use common::{arb_density, arb_matrix};
use num_complex::Complex64;
use proptest::prelude::*;
use seqmeas_core::linalg::rotation;
use seqmeas_core::state::entropy_of_spectrum;
use seqmeas_core::{kron, ComplexMatrix, DensityMatrix};

fn kron_oracle(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (p, q) = (b.rows(), b.cols());
    let mut out = ComplexMatrix::zeros(a.rows() * p, a.cols() * q);
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            for k in 0..p {
                for l in 0..q {
                    out.set(i * p + k, j * q + l, a.get(i, j) * b.get(k, l));
                }
            }
        }
    }
    out
}

/// Keep subsystems `keep` of a three-qubit state by explicit summation.
fn ptrace_oracle(rho: &DensityMatrix, keep: &[usize]) -> ComplexMatrix {
    let traced: Vec<usize> = (0..3).filter(|s| !keep.contains(s)).collect();
    let dk = 1 << keep.len();
    let dt = 1 << traced.len();
    let index = |kept_bits: usize, traced_bits: usize| {
        let mut bits = [0usize; 3];
        for (n, &s) in keep.iter().enumerate() {
            bits[s] = (kept_bits >> (keep.len() - 1 - n)) & 1;
        }
        for (n, &s) in traced.iter().enumerate() {
            bits[s] = (traced_bits >> (traced.len() - 1 - n)) & 1;
        }
        bits[0] * 4 + bits[1] * 2 + bits[2]
    };
    let mut out = ComplexMatrix::zeros(dk, dk);
    for i in 0..dk {
        for j in 0..dk {
            let mut acc = Complex64::new(0.0, 0.0);
            for t in 0..dt {
                acc += rho.get(index(i, t), index(j, t));
            }
            out.set(i, j, acc);
        }
    }
    out
}

/// `½(ρ + Z_s ρ Z_s)` on subsystem `s` of a three-qubit state.
fn dephase_oracle(rho: &DensityMatrix, s: usize) -> ComplexMatrix {
    let mut z = ComplexMatrix::identity(1);
    for k in 0..3 {
        let f = if k == s { ComplexMatrix::pauli_z() } else { ComplexMatrix::identity(2) };
        z = kron(&z, &f);
    }
    let zrz = rho.matrix().conjugate_by(&z).unwrap();
    rho.matrix().add(&zrz).unwrap().scale(0.5)
}

#[test]
fn identity_kron() {
    let i2 = ComplexMatrix::identity(2);
    assert!(kron(&i2, &i2).approx_eq(&ComplexMatrix::identity(4), 0.0));
}

proptest! {
    #[test]
    fn kron_matches_index_loop(a in arb_matrix(2, 2), b in arb_matrix(3, 3)) {
        prop_assert!(kron(&a, &b).approx_eq(&kron_oracle(&a, &b), 1e-15));
        prop_assert!(kron(&b, &a).approx_eq(&kron_oracle(&b, &a), 1e-15));
    }

    #[test]
    fn kron_rectangular(a in arb_matrix(2, 3), b in arb_matrix(3, 2)) {
        prop_assert!(kron(&a, &b).approx_eq(&kron_oracle(&a, &b), 1e-15));
    }

    #[test]
    fn partial_trace_matches_summation(rho in arb_density(vec![2, 2, 2])) {
        for keep in [vec![0], vec![1], vec![2], vec![0, 1], vec![0, 2], vec![1, 2]] {
            let got = rho.partial_trace(&keep).unwrap();
            prop_assert!(got.matrix().approx_eq(&ptrace_oracle(&rho, &keep), 1e-12));
            prop_assert!((got.trace() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn dephase_matches_kraus_sum(rho in arb_density(vec![2, 2, 2]), s in 0usize..3) {
        let got = rho.dephase(s).unwrap();
        prop_assert!(got.matrix().approx_eq(&dephase_oracle(&rho, s), 1e-14));
    }

    #[test]
    fn entropy_matches_spectrum(rho in arb_density(vec![2, 2])) {
        let eig = rho.inner_spectrum();
        prop_assert!((rho.von_neumann_entropy() - entropy_of_spectrum(&eig)).abs() < 1e-12);
    }

    #[test]
    fn rotation_preserves_purity(rho in arb_density(vec![2]), theta in -10.0f64..10.0) {
        let r = seqmeas_core::rotate_state(&rho, theta).unwrap();
        prop_assert!((r.purity() - rho.purity()).abs() < 1e-12);
        let explicit = rho.matrix().conjugate_by(&rotation(theta)).unwrap();
        prop_assert!(r.matrix().approx_eq(&explicit, 1e-15));
    }
}

trait Spectrum {
    fn inner_spectrum(&self) -> Vec<f64>;
}

impl Spectrum for DensityMatrix {
    /// Eigenvalues from nalgebra's general Schur form, independent of the
    /// Hermitian solver used by the crate.
    fn inner_spectrum(&self) -> Vec<f64> {
        let (_, t) = self.matrix().inner().clone().schur().unpack();
        t.diagonal().iter().map(|z| z.re).collect()
    }
}
