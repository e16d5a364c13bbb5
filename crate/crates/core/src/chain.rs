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

//! Chains of consecutive projective qubit measurements.
//!
//! Each measurement `k` is specified by its basis angle relative to the
//! previous basis (the first relative to the preparation basis). The basis at
//! cumulative angle `T` is `b0 = (cos T, sin T)`, `b1 = (-sin T, cos T)`;
//! outcome `m` is recorded in readout `M_k` as `|m>`.
//!
//! Two engines are provided:
//!
//! * [`unitary_chain`] purifies the input with a mirror reference `R` and
//!   applies, per stage, the controlled-copy isometry
//!   `|psi> -> sum_m P_m |psi> ⊗ |m>_k` to a state vector over
//!   `R ⊗ Q ⊗ M_1 ⊗ ... ⊗ M_k`.
//! * [`collapse_chain`] branches over outcome strings with Born weights,
//!   keeping per-branch operators on `Q`. Only the first stage's record keeps
//!   the coherences the input state already had in that stage's basis; every
//!   later record is classical.
//!
//! Joint readout matrices list the readouts as `M_1 ⊗ M_2 ⊗ ...`, outcome 0
//! first.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{rotation, ComplexMatrix};
use crate::state::DensityMatrix;

/// Engine bound on the chain length.
pub const MAX_MEASUREMENTS: usize = 8;

const PHI_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Unitary,
    Collapse,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasurementSpec {
    relative_angle: f64,
    /// Dephase this readout after it is written (uncompensated walk-off).
    pub dephase_after: bool,
}

impl MeasurementSpec {
    /// `relative_angle` in radians, reduced to `[0, π)`.
    pub fn new(relative_angle: f64, dephase_after: bool) -> Result<Self> {
        if !relative_angle.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "relative angle must be finite, got {relative_angle}"
            )));
        }
        let mut a = relative_angle.rem_euclid(PI);
        if PI - a < 1e-15 {
            a = 0.0;
        }
        Ok(Self { relative_angle: a, dephase_after })
    }

    pub fn degrees(angle_deg: f64, dephase_after: bool) -> Result<Self> {
        Self::new(angle_deg.to_radians(), dephase_after)
    }

    pub fn relative_angle(&self) -> f64 {
        self.relative_angle
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "ChainConfigRecord", try_from = "ChainConfigRecord")]
pub struct ChainConfig {
    /// Mixing angle; 0 is pure, π/4 maximally mixed.
    pub phi: f64,
    /// `false`: input `sin²φ|0><0| + cos²φ|1><1|`; `true`: that state rotated by π/4.
    pub rotated_input: bool,
    pub measurements: Vec<MeasurementSpec>,
    pub model: Model,
}

#[derive(Clone, Debug)]
pub struct ChainResult {
    /// Joint state of the readouts only.
    pub joint_readouts: DensityMatrix,
    /// Joint state of `Q ⊗ M_1 ⊗ ... ⊗ M_N`.
    pub joint_with_q: DensityMatrix,
    /// Joint readout state after each stage.
    pub per_stage: Vec<DensityMatrix>,
}

impl ChainConfig {
    pub fn new(
        phi: f64,
        rotated_input: bool,
        measurements: Vec<MeasurementSpec>,
        model: Model,
    ) -> Result<Self> {
        let cfg = Self { phi, rotated_input, measurements, model };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Builds a chain from relative angles in radians, no dephasing.
    pub fn from_angles(phi: f64, rotated_input: bool, angles: &[f64], model: Model) -> Result<Self> {
        let measurements =
            angles.iter().map(|&a| MeasurementSpec::new(a, false)).collect::<Result<Vec<_>>>()?;
        Self::new(phi, rotated_input, measurements, model)
    }

    /// Rotated input measured `H, D, H`-style: the second basis is π/4 from
    /// the first and the third returns to the first (relative angle `-π/4`,
    /// i.e. `3π/4`). Pass the result through [`last_record_first`] to get the
    /// usual block layout.
    pub fn three_stage_rotated(phi: f64, model: Model) -> Result<Self> {
        Self::from_angles(phi, true, &[0.0, FRAC_PI_4, 3.0 * FRAC_PI_4], model)
    }

    /// Diagonal input with three mutually unbiased consecutive bases. The
    /// first basis is the preparation basis with labels exchanged, so outcome
    /// 0 carries the `cos²φ` population.
    pub fn three_stage_diagonal(phi: f64, model: Model) -> Result<Self> {
        Self::from_angles(phi, false, &[FRAC_PI_2, FRAC_PI_4, FRAC_PI_4], model)
    }

    pub fn with_model(mut self, model: Model) -> Self {
        self.model = model;
        self
    }

    /// Marks readout `index` (0-based) for dephasing.
    pub fn with_dephasing(mut self, index: usize) -> Result<Self> {
        let n = self.measurements.len();
        let spec = self.measurements.get_mut(index).ok_or(Error::SubsystemIndex { index, count: n })?;
        spec.dephase_after = true;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.measurements.len();
        if n == 0 || n > MAX_MEASUREMENTS {
            return Err(Error::InvalidConfig(format!(
                "measurement count must be in 1..={MAX_MEASUREMENTS}, got {n}"
            )));
        }
        check_phi(self.phi)?;
        Ok(())
    }

    /// Cumulative basis angle of each stage.
    pub fn cumulative_angles(&self) -> Vec<f64> {
        self.measurements
            .iter()
            .scan(0.0, |acc, m| {
                *acc += m.relative_angle;
                Some(*acc)
            })
            .collect()
    }

    pub fn input_state(&self) -> Result<DensityMatrix> {
        if self.rotated_input {
            prepare_nondiagonal_state(self.phi)
        } else {
            prepare_diagonal_state(self.phi)
        }
    }

    fn dephased_stages(&self) -> Vec<usize> {
        self.measurements.iter().enumerate().filter(|(_, m)| m.dephase_after).map(|(k, _)| k).collect()
    }
}

fn check_phi(phi: f64) -> Result<()> {
    if !(-PHI_SLACK..=FRAC_PI_2 + PHI_SLACK).contains(&phi) {
        return Err(Error::InvalidParameter(format!("mixing angle must lie in [0, π/2], got {phi}")));
    }
    Ok(())
}

/// Outcome basis `[b0, b1]` at a cumulative angle.
pub fn measurement_basis(angle: f64) -> [[f64; 2]; 2] {
    let (s, c) = angle.sin_cos();
    [[c, s], [-s, c]]
}

/// `sin²φ |0><0| + cos²φ |1><1|`.
pub fn prepare_diagonal_state(phi: f64) -> Result<DensityMatrix> {
    check_phi(phi)?;
    let (s, c) = phi.sin_cos();
    DensityMatrix::qubit(ComplexMatrix::from_diagonal(&[s * s, c * c]))
}

/// `½ [[1, cos 2φ], [cos 2φ, 1]]`.
pub fn prepare_nondiagonal_state(phi: f64) -> Result<DensityMatrix> {
    check_phi(phi)?;
    let c = (2.0 * phi).cos();
    DensityMatrix::qubit(ComplexMatrix::from_real_rows(&[&[0.5, 0.5 * c], &[0.5 * c, 0.5]])?)
}

/// `R(θ) ρ R(θ)†` with `R(θ) = [[cos θ, sin θ], [-sin θ, cos θ]]`.
pub fn rotate_state(rho: &DensityMatrix, theta: f64) -> Result<DensityMatrix> {
    if rho.dims() != [2] {
        return Err(Error::Dimension(format!("rotation acts on a single qubit, got dims {:?}", rho.dims())));
    }
    DensityMatrix::qubit(rho.matrix().conjugate_by(&rotation(theta))?)
}

/// Readout purity after three mutually unbiased measurements, unitary model.
pub fn purity_unitary_closed_form(phi: f64) -> f64 {
    let c = (2.0 * phi).cos();
    0.25 * (1.0 + c * c)
}

/// Same for the collapse model; always half the unitary value.
pub fn purity_collapse_closed_form(phi: f64) -> f64 {
    let c = (2.0 * phi).cos();
    0.125 * (1.0 + c * c)
}

pub fn run_chain(config: &ChainConfig) -> Result<ChainResult> {
    match config.model {
        Model::Unitary => unitary_chain(config),
        Model::Collapse => collapse_chain(config),
    }
}

/// Purification of the input: amplitudes over `R ⊗ Q` (R major).
fn purify(rho: &DensityMatrix) -> Vec<Complex64> {
    let (values, vectors) = rho.eigen();
    let mut psi = vec![Complex64::new(0.0, 0.0); 4];
    for (r, &lambda) in values.iter().enumerate() {
        let w = lambda.max(0.0).sqrt();
        for q in 0..2 {
            psi[r * 2 + q] = vectors[(q, r)] * w;
        }
    }
    psi
}

/// Attaches readout `M_k` in state |0> and applies the controlled copy in `basis`.
/// `psi` is over `R ⊗ Q ⊗ M_1..M_{k-1}` with `tail` readout amplitudes per (r, q).
fn measure_stage(psi: &[Complex64], tail: usize, basis: &[[f64; 2]; 2]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); psi.len() * 2];
    for r in 0..2 {
        for t in 0..tail {
            let amp = |q: usize| psi[(r * 2 + q) * tail + t];
            for (m, b) in basis.iter().enumerate() {
                let overlap = amp(0) * b[0] + amp(1) * b[1];
                for q in 0..2 {
                    out[((r * 2 + q) * tail + t) * 2 + m] = overlap * b[q];
                }
            }
        }
    }
    out
}

/// `rows × cols` view of a state vector, `rho = V V†` over the column index.
fn reduce(psi: &[Complex64], traced: usize, kept: usize) -> DMatrix<Complex64> {
    // psi index = traced_index * kept + kept_index
    let v = DMatrix::from_fn(kept, traced, |k, t| psi[t * kept + k]);
    &v * v.adjoint()
}

/// Unitary (relative-state) model.
pub fn unitary_chain(config: &ChainConfig) -> Result<ChainResult> {
    config.validate()?;
    let rho_in = config.input_state()?;
    let dephased = config.dephased_stages();
    let mut psi = purify(&rho_in);
    let mut per_stage = Vec::with_capacity(config.measurements.len());
    for (k, angle) in config.cumulative_angles().into_iter().enumerate() {
        let tail = 1usize << k;
        psi = measure_stage(&psi, tail, &measurement_basis(angle));
        let readouts = 1usize << (k + 1);
        let m = reduce(&psi, 4, readouts);
        let stage = DensityMatrix::qubits(ComplexMatrix::from_inner(m), k + 1)?;
        let flags: Vec<usize> = dephased.iter().copied().filter(|&j| j <= k).collect();
        per_stage.push(stage.dephase_all(&flags)?);
    }
    let n = config.measurements.len();
    let with_q = reduce(&psi, 2, 1usize << (n + 1));
    let with_q = DensityMatrix::qubits(ComplexMatrix::from_inner(with_q), n + 1)?;
    let shifted: Vec<usize> = dephased.iter().map(|j| j + 1).collect();
    let joint_with_q = with_q.dephase_all(&shifted)?;
    let joint_readouts = per_stage.last().cloned().expect("at least one stage");
    Ok(ChainResult { joint_readouts, joint_with_q, per_stage })
}

/// Global state over `R ⊗ Q ⊗ M_1 ⊗ ... ⊗ M_N` in the unitary model. Pure
/// unless some readout is dephased.
pub fn unitary_global_state(config: &ChainConfig) -> Result<DensityMatrix> {
    config.validate()?;
    let mut psi = purify(&config.input_state()?);
    for (k, angle) in config.cumulative_angles().into_iter().enumerate() {
        psi = measure_stage(&psi, 1usize << k, &measurement_basis(angle));
    }
    let n = config.measurements.len();
    let global = DensityMatrix::from_pure(&psi, vec![2; n + 2])?;
    let shifted: Vec<usize> = config.dephased_stages().iter().map(|j| j + 2).collect();
    global.dephase_all(&shifted)
}

type Block = [[Complex64; 2]; 2];

fn projector(b: &[f64; 2]) -> Block {
    let c = |x: f64| Complex64::new(x, 0.0);
    [[c(b[0] * b[0]), c(b[0] * b[1])], [c(b[1] * b[0]), c(b[1] * b[1])]]
}

fn sandwich(p: &Block, x: &Block, q: &Block) -> Block {
    let mut px = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            px[i][j] = p[i][0] * x[0][j] + p[i][1] * x[1][j];
        }
    }
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = px[i][0] * q[0][j] + px[i][1] * q[1][j];
        }
    }
    out
}

/// Collapse model, by classical branching over outcome strings.
///
/// `blocks[m * n + m']` is the (unnormalised) operator on `Q` linking branch
/// `m` to branch `m'`; its trace is the Born weight on the diagonal.
pub fn collapse_chain(config: &ChainConfig) -> Result<ChainResult> {
    config.validate()?;
    let rho = config.input_state()?;
    let x0: Block = [[rho.get(0, 0), rho.get(0, 1)], [rho.get(1, 0), rho.get(1, 1)]];
    let zero = [[Complex64::new(0.0, 0.0); 2]; 2];

    let mut blocks: Vec<Block> = vec![x0];
    let mut branches = 1usize;
    let mut per_stage = Vec::with_capacity(config.measurements.len());
    for (k, angle) in config.cumulative_angles().into_iter().enumerate() {
        let basis = measurement_basis(angle);
        let proj = [projector(&basis[0]), projector(&basis[1])];
        let next = branches * 2;
        let mut out = vec![zero; next * next];
        for m in 0..branches {
            for mp in 0..branches {
                let x = &blocks[m * branches + mp];
                for a in 0..2 {
                    for ap in 0..2 {
                        // later stages leave a classical record
                        if k > 0 && a != ap {
                            continue;
                        }
                        out[(m * 2 + a) * next + (mp * 2 + ap)] = sandwich(&proj[a], x, &proj[ap]);
                    }
                }
            }
        }
        blocks = out;
        branches = next;
        if config.measurements[k].dephase_after {
            for m in 0..branches {
                for mp in 0..branches {
                    // the newest readout is the lowest bit of the branch index
                    if m & 1 != mp & 1 {
                        blocks[m * branches + mp] = zero;
                    }
                }
            }
        }
        let readouts = DMatrix::from_fn(branches, branches, |m, mp| {
            let x = &blocks[m * branches + mp];
            x[0][0] + x[1][1]
        });
        per_stage.push(DensityMatrix::qubits(ComplexMatrix::from_inner(readouts), k + 1)?);
    }
    let d = branches * 2;
    let with_q = DMatrix::from_fn(d, d, |i, j| {
        let (q, m) = (i / branches, i % branches);
        let (qp, mp) = (j / branches, j % branches);
        blocks[m * branches + mp][q][qp]
    });
    let n = config.measurements.len();
    let joint_with_q = DensityMatrix::qubits(ComplexMatrix::from_inner(with_q), n + 1)?;
    let joint_readouts = per_stage.last().cloned().expect("at least one stage");
    Ok(ChainResult { joint_readouts, joint_with_q, per_stage })
}

/// Reorders a joint readout matrix so the last record comes first:
/// `M1 ⊗ M2 ⊗ M3` becomes `M3 ⊗ M1 ⊗ M2` and `M1 ⊗ M2` becomes `M2 ⊗ M1`.
pub fn last_record_first(joint: &DensityMatrix) -> Result<DensityMatrix> {
    match joint.num_subsystems() {
        2 => joint.permute_subsystems(&[1, 0]),
        3 => joint.permute_subsystems(&[2, 0, 1]),
        n => Err(Error::Dimension(format!("reordering defined for 2 or 3 readouts, got {n}"))),
    }
}

/// JSON form of a [`ChainConfig`]; angles in degrees.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainConfigRecord {
    pub phi_deg: f64,
    pub rotated_input: bool,
    pub model: Model,
    pub measurements: Vec<MeasurementRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub angle_deg: f64,
    #[serde(default)]
    pub dephase_after: bool,
}

impl From<ChainConfig> for ChainConfigRecord {
    fn from(c: ChainConfig) -> Self {
        Self {
            phi_deg: c.phi.to_degrees(),
            rotated_input: c.rotated_input,
            model: c.model,
            measurements: c
                .measurements
                .iter()
                .map(|m| MeasurementRecord {
                    angle_deg: m.relative_angle.to_degrees(),
                    dephase_after: m.dephase_after,
                })
                .collect(),
        }
    }
}

impl TryFrom<ChainConfigRecord> for ChainConfig {
    type Error = Error;

    fn try_from(r: ChainConfigRecord) -> Result<Self> {
        let measurements = r
            .measurements
            .iter()
            .map(|m| MeasurementSpec::degrees(m.angle_deg, m.dephase_after))
            .collect::<Result<Vec<_>>>()?;
        ChainConfig::new(r.phi_deg.to_radians(), r.rotated_input, measurements, r.model)
    }
}

impl ChainConfig {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let rec: ChainConfigRecord = serde_json::from_str(s)?;
        ChainConfig::try_from(rec)
    }
}
