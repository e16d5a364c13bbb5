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

//! Emulation of the path-encoded optical experiment.
//!
//! Each readout is written into the transverse position of the photon by a
//! birefringent beam displacer. The eight outcome paths are read back by
//! interfering them behind a cylindrical lens (one-dimensional optical
//! Fourier transform) and taking a DFT of the resulting fringes.
//!
//! Positions are in millimetres. The fringe coordinate is dimensionless: the
//! phase of the pair `(j, k)` at coordinate `u` is `KAPPA * u * (p_j - p_k)`
//! with `p` the position projected on the OFT axis, so the wavelength (808 nm)
//! and the lens focal length (250 mm) only enter through `KAPPA`.

pub mod displacer;
pub mod fringe;
pub mod geometry;
pub mod hwp;
pub mod noise;
pub mod tomography;

pub use displacer::{apply_beam_displacer, simulate_chain, Axis, PathState};
pub use fringe::{dft_extract, extract_image, synthesize_fringes, Extraction, FringeImage, FringePattern};
pub use geometry::{block_paths, build_geometry, Path, PathGeometry, SpacingReport};
pub use hwp::spinning_hwp_state;
pub use noise::{add_noise, NoiseParams};
pub use tomography::{
    average_reconstructions, reconstruct, AxisConfig, AxisPlan, ReconstructionResult, ReplicateAverage,
};

/// Scale between projected separation (mm) and fringe angular frequency.
pub const KAPPA: f64 = 1.0;

/// Positions closer than this (mm) are considered identical.
pub const POSITION_TOL: f64 = 1e-9;
