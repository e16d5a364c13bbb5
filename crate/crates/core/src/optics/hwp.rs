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

//! Mixed-state preparation with a spinning half-wave plate.
//!
//! A half-wave plate spinning at angular velocity `ω` between two
//! quarter-wave plates acts as a retarder `diag(1, e^{i4ωt})`. A camera
//! exposure of length `T` averages the coherence of
//! `cos φ |H⟩ + sin φ |V⟩` with `g = (1/T) ∫₀ᵀ e^{-i4ωt} dt`, whose magnitude
//! is at most `Ω / (2ω)` with `Ω = 1/T`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::state::DensityMatrix;

/// Time average of `e^{-i4ωt}` over `[0, T]`.
pub fn averaging_factor(omega: f64, capture_time: f64) -> Complex64 {
    let x = 4.0 * omega * capture_time;
    if x.abs() < 1e-8 {
        return Complex64::new(1.0, -x / 2.0);
    }
    (Complex64::new(1.0, 0.0) - Complex64::new(0.0, -x).exp()) / Complex64::new(0.0, x)
}

/// Polarization state after the spinning waveplate, integrated over one exposure.
pub fn spinning_hwp_state(phi: f64, omega: f64, capture_time: f64) -> Result<DensityMatrix> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::InvalidParameter(format!("omega must be positive, got {omega}")));
    }
    if !(capture_time.is_finite() && capture_time > 0.0) {
        return Err(Error::InvalidParameter(format!("capture time must be positive, got {capture_time}")));
    }
    if !phi.is_finite() {
        return Err(Error::InvalidParameter("phi must be finite".into()));
    }
    let (s, c) = phi.sin_cos();
    let coh = averaging_factor(omega, capture_time) * (s * c);
    let m = ComplexMatrix::new(
        2,
        2,
        vec![Complex64::new(c * c, 0.0), coh, coh.conj(), Complex64::new(s * s, 0.0)],
    )?;
    DensityMatrix::qubit(m)
}
