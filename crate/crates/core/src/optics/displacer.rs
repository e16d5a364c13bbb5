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

//! Conditional translations of the photon by birefringent crystals.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::geometry::Displacements;
use super::POSITION_TOL;
use crate::chain::{measurement_basis, ChainConfig, Model};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::state::DensityMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
}

/// Polarization ⊗ discrete path register.
///
/// Path `j` sits at `positions[j]` and carries the outcome string
/// `outcomes[j]` accumulated so far (first readout leftmost).
#[derive(Clone, Debug)]
pub struct PathState {
    pub positions: Vec<(f64, f64)>,
    pub outcomes: Vec<String>,
    state: DensityMatrix,
}

impl PathState {
    /// A photon with the given polarization state on a single path at the origin.
    pub fn new(polarization: &DensityMatrix) -> Result<Self> {
        if polarization.dims() != [2] {
            return Err(Error::Dimension("polarization must be a single qubit".into()));
        }
        Ok(PathState {
            positions: vec![(0.0, 0.0)],
            outcomes: vec![String::new()],
            state: polarization.clone(),
        })
    }

    pub fn path_count(&self) -> usize {
        self.positions.len()
    }

    /// Full state; index is `polarization * path_count + path`.
    pub fn joint(&self) -> &ComplexMatrix {
        self.state.matrix()
    }

    /// Path density matrix with polarization traced out, one qubit per
    /// readout, rows ordered by outcome string.
    pub fn path_density(&self) -> Result<DensityMatrix> {
        let n = self.path_count();
        let readouts = self.outcomes[0].len();
        if readouts == 0 {
            return Err(Error::InvalidConfig("no displacer has been applied".into()));
        }
        let mut out = ComplexMatrix::zeros(n, n);
        let full = self.state.matrix();
        for (i, oi) in self.outcomes.iter().enumerate() {
            let ri = usize::from_str_radix(oi, 2).expect("bit string");
            for (j, oj) in self.outcomes.iter().enumerate() {
                let rj = usize::from_str_radix(oj, 2).expect("bit string");
                let v = full.get(i, j) + full.get(n + i, n + j);
                out.set(ri, rj, v);
            }
        }
        DensityMatrix::new(out, vec![2; readouts])
    }

    /// Walk-off without compensation: the newest readout loses its coherence.
    pub fn dephase_newest(&self) -> Result<PathState> {
        let n = self.path_count();
        let mut m = self.state.matrix().clone();
        let bit = |i: usize| self.outcomes[i % n].as_bytes().last().copied();
        for i in 0..2 * n {
            for j in 0..2 * n {
                if bit(i) != bit(j) {
                    m.set(i, j, Complex64::new(0.0, 0.0));
                }
            }
        }
        Ok(PathState {
            positions: self.positions.clone(),
            outcomes: self.outcomes.clone(),
            state: DensityMatrix::new(m, vec![2 * n])?,
        })
    }
}

fn check_projector(p: &ComplexMatrix) -> Result<()> {
    if p.rows() != 2 || p.cols() != 2 {
        return Err(Error::Dimension("polarization projector must be 2×2".into()));
    }
    let squared = p.matmul(p)?;
    if p.hermiticity_violation() > 1e-12 || squared.max_abs_diff(p) > 1e-12 {
        return Err(Error::InvalidParameter("projector must be Hermitian and idempotent".into()));
    }
    Ok(())
}

/// Translate the `projector` component of the polarization by `delta` along
/// `axis`. Every existing path splits in two; the displaced copy gets outcome
/// bit 1.
pub fn apply_beam_displacer(
    state: &PathState,
    delta: f64,
    axis: Axis,
    projector: &ComplexMatrix,
) -> Result<PathState> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::InvalidParameter(format!("displacement must be positive, got {delta}")));
    }
    check_projector(projector)?;
    let n = state.path_count();

    let mut positions = Vec::with_capacity(2 * n);
    let mut outcomes = Vec::with_capacity(2 * n);
    for (&(x, y), o) in state.positions.iter().zip(&state.outcomes) {
        positions.push((x, y));
        outcomes.push(format!("{o}0"));
        positions.push(match axis {
            Axis::X => (x + delta, y),
            Axis::Y => (x, y + delta),
        });
        outcomes.push(format!("{o}1"));
    }
    for (i, a) in positions.iter().enumerate() {
        for (j, b) in positions.iter().enumerate().skip(i + 1) {
            if (a.0 - b.0).abs() < POSITION_TOL && (a.1 - b.1).abs() < POSITION_TOL {
                return Err(Error::PathCollision(format!(
                    "outcomes {} and {} overlap at ({}, {}); displacement too small for a projective readout",
                    outcomes[i], outcomes[j], a.0, a.1
                )));
            }
        }
    }

    // V maps (pol p, path j) to (pol p', path 2j + b).
    let identity = ComplexMatrix::identity(2);
    let stay = identity.add(&projector.scale(-1.0))?;
    let mut v = ComplexMatrix::zeros(4 * n, 2 * n);
    for p_out in 0..2 {
        for p_in in 0..2 {
            for j in 0..n {
                v.set(p_out * 2 * n + 2 * j, p_in * n + j, stay.get(p_out, p_in));
                v.set(p_out * 2 * n + 2 * j + 1, p_in * n + j, projector.get(p_out, p_in));
            }
        }
    }
    let rho = state.state.matrix().conjugate_by(&v)?;
    Ok(PathState { positions, outcomes, state: DensityMatrix::new(rho, vec![4 * n])? })
}

/// Crystal sequence used by the experiment: `δx` along x, `δy` along y, `δX` along x.
pub fn crystal_sequence(d: &Displacements) -> [(f64, Axis); 3] {
    [(d.dx, Axis::X), (d.dy, Axis::Y), (d.d_big_x, Axis::X)]
}

/// Run a chain of up to three measurements through the displacer optics and
/// return the final path register.
///
/// The waveplates in front of each crystal are folded into the projector:
/// stage `k` displaces the outcome-1 basis vector at the cumulative angle.
/// A stage flagged `dephase_after` models a crystal without walk-off
/// compensation.
pub fn simulate_chain(config: &ChainConfig, displacements: &Displacements) -> Result<PathState> {
    config.validate()?;
    if config.model != Model::Unitary {
        return Err(Error::InvalidConfig("the optical emulation follows the unitary model".into()));
    }
    let crystals = crystal_sequence(displacements);
    if config.measurements.len() > crystals.len() {
        return Err(Error::InvalidConfig(format!(
            "the optical setup has {} crystals, config asks for {} measurements",
            crystals.len(),
            config.measurements.len()
        )));
    }
    let mut state = PathState::new(&config.input_state()?)?;
    for ((spec, angle), (delta, axis)) in
        config.measurements.iter().zip(config.cumulative_angles()).zip(crystals)
    {
        let b1 = measurement_basis(angle)[1];
        let v = [Complex64::new(b1[0], 0.0), Complex64::new(b1[1], 0.0)];
        state = apply_beam_displacer(&state, delta, axis, &ComplexMatrix::outer(&v))?;
        if spec.dephase_after {
            state = state.dephase_newest()?;
        }
    }
    Ok(state)
}
