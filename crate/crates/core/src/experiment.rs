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

//! Purity-versus-angle sweeps through the emulated optical pipeline.
//!
//! Every grid point runs the three-stage rotated chain through the displacer
//! optics, acquires noisy fringe images and reconstructs the joint readout
//! matrix, once per replicate. Each `(curve, point, replicate)` job draws
//! from its own ChaCha stream of the master seed, so results do not depend
//! on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chain::{
    purity_collapse_closed_form, purity_unitary_closed_form, unitary_chain, ChainConfig, Model,
};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::optics::displacer::simulate_chain;
use crate::optics::geometry::PathGeometry;
use crate::optics::noise::NoiseParams;
use crate::optics::tomography::{
    average_reconstructions, reconstruct_with, AxisPlan, ReconstructionResult, ReplicateAverage,
};
use crate::state::DensityMatrix;

/// Walk-off compensation after each of the three crystals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Compensation(pub [bool; 3]);

impl Compensation {
    pub const FULL: Compensation = Compensation([true; 3]);

    pub fn without(crystal: usize) -> Result<Self> {
        if !(1..=3).contains(&crystal) {
            return Err(Error::InvalidParameter(format!("crystal must be 1, 2 or 3, got {crystal}")));
        }
        let mut c = [true; 3];
        c[crystal - 1] = false;
        Ok(Compensation(c))
    }

    pub fn is_full(&self) -> bool {
        self.0.iter().all(|&c| c)
    }

    pub fn label(&self) -> String {
        if self.is_full() {
            return "compensated".into();
        }
        let missing: Vec<String> = (0..3).filter(|&k| !self.0[k]).map(|k| (k + 1).to_string()).collect();
        format!("uncompensated-{}", missing.join(""))
    }

    /// The rotated three-stage chain with dephasing on uncompensated readouts.
    pub fn config(&self, phi: f64) -> Result<ChainConfig> {
        let mut config = ChainConfig::three_stage_rotated(phi, Model::Unitary)?;
        for k in 0..3 {
            if !self.0[k] {
                config = config.with_dephasing(k)?;
            }
        }
        Ok(config)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReplicatePolicy {
    Fixed(usize),
    /// 5 per point, except 4 at φ = 0° and 2 at φ = 45° on the compensated
    /// curve.
    Tabulated,
}

/// Which purity a replicate contributes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PurityEstimator {
    /// `Tr(ρ_A ρ_B)` over two independent frames.
    #[default]
    Cross,
    /// `Tr(ρ²)` of the assembled estimate before the positivity projection;
    /// biased high by the noise power.
    Raw,
    /// `Tr(ρ²)` after projection; biased low near rank-deficient states.
    Projected,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub xi_start_deg: f64,
    pub xi_end_deg: f64,
    pub xi_step_deg: f64,
    pub replicates: ReplicatePolicy,
    pub noise: NoiseParams,
    pub curves: Vec<Compensation>,
    #[serde(default)]
    pub estimator: PurityEstimator,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            xi_start_deg: 0.0,
            xi_end_deg: 22.5,
            xi_step_deg: 2.25,
            replicates: ReplicatePolicy::Fixed(5),
            noise: NoiseParams::default(),
            curves: vec![Compensation::FULL],
            estimator: PurityEstimator::Cross,
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.xi_start_deg, self.xi_end_deg, self.xi_step_deg].iter().all(|v| v.is_finite());
        if !finite || self.xi_step_deg <= 0.0 {
            return Err(Error::InvalidParameter("xi step must be positive and finite".into()));
        }
        if self.xi_start_deg > self.xi_end_deg {
            return Err(Error::InvalidParameter("xi start exceeds xi end".into()));
        }
        if self.xi_start_deg < 0.0 || self.xi_end_deg > 45.0 {
            return Err(Error::InvalidParameter("xi must stay within [0°, 45°] so that φ = 2ξ ≤ 90°".into()));
        }
        if self.replicates == ReplicatePolicy::Fixed(0) {
            return Err(Error::InvalidParameter("need at least one replicate".into()));
        }
        if self.curves.is_empty() {
            return Err(Error::InvalidParameter("no curve requested".into()));
        }
        self.noise.validate()
    }

    /// Waveplate angles ξ in degrees.
    pub fn grid(&self) -> Vec<f64> {
        let steps = ((self.xi_end_deg - self.xi_start_deg) / self.xi_step_deg + 1e-9).floor() as usize;
        (0..=steps).map(|i| self.xi_start_deg + i as f64 * self.xi_step_deg).collect()
    }

    pub fn replicates_for(&self, phi_deg: f64, curve: &Compensation) -> usize {
        match self.replicates {
            ReplicatePolicy::Fixed(n) => n,
            ReplicatePolicy::Tabulated if curve.is_full() && phi_deg.abs() < 1e-9 => 4,
            ReplicatePolicy::Tabulated if curve.is_full() && (phi_deg - 45.0).abs() < 1e-9 => 2,
            ReplicatePolicy::Tabulated => 5,
        }
    }
}

/// One row of the purity curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub curve: String,
    pub xi_deg: f64,
    pub phi_deg: f64,
    pub replicates: usize,
    pub mean_purity: f64,
    pub std_error: f64,
    pub unitary_closed_form: f64,
    pub collapse_closed_form: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointResult {
    pub curve: String,
    pub xi_deg: f64,
    pub phi_deg: f64,
    pub reference: DensityMatrix,
    pub average: ReplicateAverage,
    pub purities: Vec<f64>,
    /// Largest `|mean - reference|` over elements.
    pub max_element_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    pub points: Vec<PointResult>,
}

/// Independent random stream for one replicate.
pub fn job_rng(master_seed: u64, curve: usize, point: usize, replicate: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(((curve as u64) << 48) | ((point as u64) << 24) | replicate as u64);
    rng
}

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

pub fn run_sweep(
    spec: &SweepSpec,
    geometry: &PathGeometry,
    plan: &AxisPlan,
    master_seed: u64,
    execution: Execution,
) -> Result<SweepOutcome> {
    spec.validate()?;
    plan.coverage(geometry)?;
    let grid = spec.grid();

    struct Point {
        curve: usize,
        index: usize,
        xi: f64,
        source: DensityMatrix,
        reference: DensityMatrix,
        replicates: usize,
    }
    let mut points = Vec::new();
    for (c, curve) in spec.curves.iter().enumerate() {
        for (i, &xi) in grid.iter().enumerate() {
            let config = curve.config((2.0 * xi).to_radians())?;
            let source = simulate_chain(&config, &geometry.displacements)?.path_density()?;
            let reference = unitary_chain(&config)?.joint_readouts;
            let replicates = spec.replicates_for(2.0 * xi, curve);
            points.push(Point { curve: c, index: i, xi, source, reference, replicates });
        }
    }
    let jobs: Vec<(usize, usize)> =
        points.iter().enumerate().flat_map(|(p, pt)| (0..pt.replicates).map(move |r| (p, r))).collect();

    let results: Vec<ReconstructionResult> = execution.try_map(&jobs, |&(p, r)| {
        let pt = &points[p];
        let mut rng = job_rng(master_seed, pt.curve, pt.index, r);
        reconstruct_with(&pt.source, geometry, plan, &spec.noise, &mut rng, Some(&pt.reference))
    })?;

    let mut rows = Vec::new();
    let mut out_points = Vec::new();
    let mut offset = 0;
    for pt in &points {
        let runs = &results[offset..offset + pt.replicates];
        offset += pt.replicates;
        let purities: Vec<f64> = runs
            .iter()
            .map(|r| match spec.estimator {
                PurityEstimator::Cross => r.cross_purity,
                PurityEstimator::Raw => r.raw_purity,
                PurityEstimator::Projected => r.purity(),
            })
            .collect();
        let (mean, se) = mean_and_se(&purities);
        let average = average_reconstructions(runs)?;
        let phi_deg = 2.0 * pt.xi;
        let phi = phi_deg.to_radians();
        let curve = spec.curves[pt.curve].label();
        rows.push(SweepRow {
            curve: curve.clone(),
            xi_deg: pt.xi,
            phi_deg,
            replicates: pt.replicates,
            mean_purity: mean,
            std_error: se,
            unitary_closed_form: purity_unitary_closed_form(phi),
            collapse_closed_form: purity_collapse_closed_form(phi),
        });
        out_points.push(PointResult {
            curve,
            xi_deg: pt.xi,
            phi_deg,
            max_element_error: average.mean.max_abs_diff(&pt.reference),
            reference: pt.reference.clone(),
            average,
            purities,
        });
    }
    Ok(SweepOutcome { rows, points: out_points })
}

pub fn rows_to_csv(rows: &[SweepRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| Error::Parse(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_has_eleven_points() {
        let g = SweepSpec::default().grid();
        assert_eq!(g.len(), 11);
        assert!((g[10] - 22.5).abs() < 1e-12);
    }

    #[test]
    fn zero_width_grid() {
        let spec = SweepSpec { xi_start_deg: 10.0, xi_end_deg: 10.0, ..Default::default() };
        assert_eq!(spec.grid(), vec![10.0]);
    }

    #[test]
    fn invalid_specs() {
        let bad = [
            SweepSpec { xi_step_deg: 0.0, ..Default::default() },
            SweepSpec { xi_start_deg: 5.0, xi_end_deg: 1.0, ..Default::default() },
            SweepSpec { replicates: ReplicatePolicy::Fixed(0), ..Default::default() },
            SweepSpec { xi_end_deg: 50.0, ..Default::default() },
        ];
        for s in bad {
            assert!(s.validate().is_err());
        }
    }

    #[test]
    fn tabulated_replicate_counts() {
        let spec = SweepSpec { replicates: ReplicatePolicy::Tabulated, ..Default::default() };
        let full = Compensation::FULL;
        let off = Compensation::without(2).unwrap();
        assert_eq!(spec.replicates_for(0.0, &full), 4);
        assert_eq!(spec.replicates_for(45.0, &full), 2);
        assert_eq!(spec.replicates_for(22.5, &full), 5);
        assert_eq!(spec.replicates_for(0.0, &off), 5);
        assert_eq!(spec.replicates_for(45.0, &off), 5);
    }

    #[test]
    fn labels() {
        assert_eq!(Compensation::FULL.label(), "compensated");
        assert_eq!(Compensation::without(2).unwrap().label(), "uncompensated-2");
        assert!(Compensation::without(4).is_err());
    }

    #[test]
    fn streams_are_distinct() {
        use rand::Rng;
        let a: u64 = job_rng(1, 0, 0, 0).random();
        let b: u64 = job_rng(1, 0, 0, 1).random();
        let c: u64 = job_rng(1, 0, 0, 0).random();
        assert_ne!(a, b);
        assert_eq!(a, c);
    }
}
