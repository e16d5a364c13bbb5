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

//! Simulation of consecutive projective measurements on a single qubit.
//!
//! The crate models a chain of strong measurements under two dynamics:
//!
//! * the **unitary** (relative-state) model, where every measurement is a
//!   controlled-copy interaction between the qubit and a fresh two-level
//!   readout, and nothing is ever erased;
//! * the **collapse** model, where the records of every stage after the
//!   first are classical.
//!
//! On top of the chain engine sit entropy diagnostics ([`info`]) and an
//! emulation of a path-encoded optical experiment ([`optics`]): beam
//! displacers, spinning-waveplate state preparation, interference fringes
//! and DFT-based reconstruction of the joint readout density matrix.
//!
//! # Angle convention
//!
//! Measurement angles are *polarization* (real-rotation) angles. A relative
//! angle of `π/4` between two consecutive bases makes them mutually unbiased,
//! which is an orthogonal pair on the Bloch sphere. The outcome-0 basis
//! vector at cumulative angle `T` is `(cos T, sin T)`.

pub mod chain;
pub mod error;
pub mod exec;
pub mod experiment;
pub mod info;
pub mod io;
pub mod linalg;
pub mod optics;
pub mod state;

pub use chain::{
    collapse_chain, prepare_diagonal_state, prepare_nondiagonal_state, purity_collapse_closed_form,
    purity_unitary_closed_form, rotate_state, run_chain, unitary_chain, ChainConfig, ChainResult,
    MeasurementSpec, Model,
};
pub use error::{Error, Result};
pub use exec::Execution;
pub use linalg::{kron, ComplexMatrix};
pub use state::{DensityMatrix, Validation};

/// Tolerance on structural density-matrix invariants (trace, Hermiticity).
pub const STRUCTURAL_TOL: f64 = 1e-12;
/// Smallest eigenvalue still accepted as positive semidefinite.
pub const PSD_TOL: f64 = 1e-10;
/// Tolerance for comparisons against closed-form matrices.
pub const CLOSED_FORM_TOL: f64 = 1e-10;
