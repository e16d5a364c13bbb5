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

//! Reconstruction of the joint readout matrix from fringe images.
//!
//! Populations come from a direct image of the paths, each divided by the
//! total intensity. Every coherence comes from the DFT of a fringe image
//! taken along some OFT axis, possibly with paths blocked to lift spacing
//! degeneracies. Coherences are expressed relative to the unblocked flux, so
//! blocking never rescales a pair it leaves alone.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::fringe::{extract_image, synthesize_fringes};
use super::geometry::{block_paths, PathGeometry};
use super::noise::{add_noise_image, NoiseParams};
use super::POSITION_TOL;
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::state::DensityMatrix;

/// One acquisition: an OFT axis orientation and the paths blocked for it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisConfig {
    pub angle_deg: f64,
    #[serde(default)]
    pub blocked: Vec<String>,
}

impl AxisConfig {
    pub fn new(angle_deg: f64, blocked: &[&str]) -> Self {
        AxisConfig { angle_deg, blocked: blocked.iter().map(|s| s.to_string()).collect() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisPlan {
    pub configs: Vec<AxisConfig>,
    /// Pairs that are not measured and taken to vanish.
    #[serde(default)]
    pub theory_zero: Vec<(String, String)>,
}

/// Which pairs a plan measures, and how often.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coverage {
    pub measured: BTreeMap<String, usize>,
    pub assumed_zero: Vec<(String, String)>,
}

fn pair_key(a: &str, b: &str) -> String {
    format!("{a}-{b}")
}

/// All path pairs, each ordered by matrix index.
fn ordered_pairs(geometry: &PathGeometry) -> Vec<(String, String)> {
    let mut paths: Vec<_> = geometry.active().collect();
    paths.sort_by_key(|p| p.index());
    let mut out = Vec::new();
    for (i, a) in paths.iter().enumerate() {
        for b in &paths[i + 1..] {
            out.push((a.name.clone(), b.name.clone()));
        }
    }
    out
}

fn ordered(geometry: &PathGeometry, a: &str, b: &str) -> Result<(String, String)> {
    let (pa, pb) = (geometry.path(a)?, geometry.path(b)?);
    Ok(if pa.index() <= pb.index() {
        (pa.name.clone(), pb.name.clone())
    } else {
        (pb.name.clone(), pa.name.clone())
    })
}

fn require_unblocked(geometry: &PathGeometry) -> Result<()> {
    if geometry.blocked.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidConfig("block paths through the axis plan, not the base geometry".into()))
    }
}

impl AxisPlan {
    /// Measure every pair.
    ///
    /// Pair directions are tried as open axes first (most shared direction
    /// first). Pairs still unresolved get their own axis with colliding
    /// partners blocked one at a time until the spacing is unique.
    pub fn auto(geometry: &PathGeometry) -> Result<Self> {
        require_unblocked(geometry)?;
        let pairs = ordered_pairs(geometry);
        let mut directions: Vec<(f64, usize)> = Vec::new();
        for (a, b) in &pairs {
            let d = PathGeometry::pair_direction(geometry.path(a)?, geometry.path(b)?);
            match directions.iter_mut().find(|e| (e.0 - d).abs() < 1e-9) {
                Some(e) => e.1 += 1,
                None => directions.push((d, 1)),
            }
        }
        directions.sort_by(|x, y| y.1.cmp(&x.1).then(x.0.total_cmp(&y.0)));

        let mut resolved = std::collections::BTreeSet::new();
        let mut configs = Vec::new();
        let mark = |g: &PathGeometry, angle: f64, resolved: &mut std::collections::BTreeSet<String>| {
            let mut fresh = false;
            for p in g.spacing_report(angle).resolvable() {
                fresh |= resolved.insert(pair_key(&p.a, &p.b));
                resolved.insert(pair_key(&p.b, &p.a));
            }
            fresh
        };
        for &(angle, _) in &directions {
            if mark(geometry, angle, &mut resolved) {
                configs.push(AxisConfig { angle_deg: angle, blocked: Vec::new() });
            }
        }

        let path_count = geometry.active().count();
        for (a, b) in &pairs {
            if resolved.contains(&pair_key(a, b)) {
                continue;
            }
            let angle = PathGeometry::pair_direction(geometry.path(a)?, geometry.path(b)?);
            let mut blocked: Vec<String> = Vec::new();
            loop {
                let names: Vec<&str> = blocked.iter().map(String::as_str).collect();
                let g = block_paths(geometry, &names)?;
                let report = g.spacing_report(angle);
                let target = report.find(a, b).expect("pair is active").clone();
                if target.resolvable {
                    mark(&g, angle, &mut resolved);
                    configs.push(AxisConfig { angle_deg: angle, blocked });
                    break;
                }
                for other in &report.pairs {
                    let same = (other.a == *a && other.b == *b) || (other.a == *b && other.b == *a);
                    if same
                        || other.lane != target.lane
                        || (other.separation - target.separation).abs() >= POSITION_TOL
                    {
                        continue;
                    }
                    let victim = if other.a != *a && other.a != *b { &other.a } else { &other.b };
                    if !blocked.contains(victim) {
                        blocked.push(victim.clone());
                    }
                }
                if blocked.len() + 2 > path_count {
                    return Err(Error::Degenerate(format!("cannot isolate pair {a}-{b}")));
                }
            }
        }
        Ok(AxisPlan { configs, theory_zero: Vec::new() })
    }

    /// Acquisitions of the experiment: vertical pairs, horizontal pairs with
    /// the left or right column blocked, and both diagonals. Pairs these
    /// cannot reach are declared theory-zero.
    pub fn minimal(geometry: &PathGeometry) -> Result<Self> {
        require_unblocked(geometry)?;
        let mut plan = AxisPlan {
            configs: vec![
                AxisConfig::new(90.0, &[]),
                AxisConfig::new(0.0, &["a1", "a8"]),
                AxisConfig::new(0.0, &["a4", "a5"]),
                AxisConfig::new(45.0, &[]),
                AxisConfig::new(135.0, &[]),
            ],
            theory_zero: Vec::new(),
        };
        let covered = plan.measured(geometry)?;
        plan.theory_zero = ordered_pairs(geometry)
            .into_iter()
            .filter(|(a, b)| !covered.contains_key(&pair_key(a, b)))
            .collect();
        Ok(plan)
    }

    fn measured(&self, geometry: &PathGeometry) -> Result<BTreeMap<String, usize>> {
        let mut measured = BTreeMap::new();
        for config in &self.configs {
            let names: Vec<&str> = config.blocked.iter().map(String::as_str).collect();
            let g = block_paths(geometry, &names)?;
            for p in g.spacing_report(config.angle_deg).resolvable() {
                let (a, b) = ordered(geometry, &p.a, &p.b)?;
                *measured.entry(pair_key(&a, &b)).or_insert(0) += 1;
            }
        }
        Ok(measured)
    }

    /// Check that every pair is either measured or declared zero.
    pub fn coverage(&self, geometry: &PathGeometry) -> Result<Coverage> {
        require_unblocked(geometry)?;
        let measured = self.measured(geometry)?;
        let mut declared = Vec::new();
        for (a, b) in &self.theory_zero {
            declared.push(ordered(geometry, a, b)?);
        }
        let mut missing = Vec::new();
        let mut assumed_zero = Vec::new();
        for (a, b) in ordered_pairs(geometry) {
            if measured.contains_key(&pair_key(&a, &b)) {
                continue;
            }
            if declared.contains(&(a.clone(), b.clone())) {
                assumed_zero.push((a, b));
            } else {
                missing.push(pair_key(&a, &b));
            }
        }
        if !missing.is_empty() {
            return Err(Error::IncompleteCoverage(format!("pairs never resolved: {}", missing.join(", "))));
        }
        Ok(Coverage { measured, assumed_zero })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionResult {
    /// Estimate after projection onto the density matrices.
    pub rho_hat: DensityMatrix,
    /// `Tr(ρ²)` of the assembled Hermitian estimate before projection.
    pub raw_purity: f64,
    /// `Tr(ρ_A ρ_B)` of the two independent frames; free of the noise-power
    /// bias that inflates `raw_purity`.
    pub cross_purity: f64,
    /// `|ρ̂_ij - ρ_ij|` against the supplied reference.
    pub element_errors: Option<Vec<Vec<f64>>>,
    pub blocked_paths: Vec<String>,
    pub assumed_zero: Vec<(String, String)>,
}

impl ReconstructionResult {
    pub fn purity(&self) -> f64 {
        self.rho_hat.purity()
    }

    pub fn max_element_error(&self) -> Option<f64> {
        self.element_errors.as_ref().map(|m| m.iter().flatten().copied().fold(0.0, f64::max))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Hermitian part, negative eigenvalues clipped, trace renormalized.
pub fn project_to_density(m: &ComplexMatrix, dims: Vec<usize>) -> Result<DensityMatrix> {
    if !m.is_square() {
        return Err(Error::Dimension("estimate must be square".into()));
    }
    let h = (m.inner() + m.inner().adjoint()) * Complex64::new(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let clipped: Vec<f64> = eig.eigenvalues.iter().map(|&l| l.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    if total <= 0.0 {
        return Err(Error::InvalidParameter("estimate has no positive spectrum".into()));
    }
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        clipped.len(),
        clipped.iter().map(|&l| Complex64::new(l / total, 0.0)),
    ));
    let v = &eig.eigenvectors;
    DensityMatrix::new(ComplexMatrix::from_inner(v * d * v.adjoint()), dims)
}

/// Emulate a full acquisition of `source` and reconstruct it.
///
/// Every setting is recorded in two frames with independent noise. The
/// estimate is built from their average.
pub fn reconstruct(
    source: &DensityMatrix,
    geometry: &PathGeometry,
    plan: &AxisPlan,
    noise: &NoiseParams,
    seed: u64,
    reference: Option<&DensityMatrix>,
) -> Result<ReconstructionResult> {
    reconstruct_with(source, geometry, plan, noise, &mut ChaCha8Rng::seed_from_u64(seed), reference)
}

pub fn reconstruct_with<R: Rng>(
    source: &DensityMatrix,
    geometry: &PathGeometry,
    plan: &AxisPlan,
    noise: &NoiseParams,
    rng: &mut R,
    reference: Option<&DensityMatrix>,
) -> Result<ReconstructionResult> {
    noise.validate()?;
    let coverage = plan.coverage(geometry)?;
    let n = geometry.paths.len();
    if source.dim() != n {
        return Err(Error::Dimension(format!(
            "state has dimension {}, geometry has {n} paths",
            source.dim()
        )));
    }
    if let Some(r) = reference {
        if r.dim() != n {
            return Err(Error::Dimension("reference does not match the state".into()));
        }
    }

    let (first, blocked_paths) = acquire(source, geometry, plan, noise, rng)?;
    let (second, _) = acquire(source, geometry, plan, noise, rng)?;
    let estimate = first.add(&second)?.scale(0.5);

    let raw_purity = estimate.matmul(&estimate)?.trace().re;
    let cross_purity = first.matmul(&second)?.trace().re;
    let rho_hat = project_to_density(&estimate, source.dims().to_vec())?;
    let element_errors = reference.map(|r| {
        (0..n).map(|i| (0..n).map(|j| (rho_hat.get(i, j) - r.get(i, j)).norm()).collect()).collect()
    });
    Ok(ReconstructionResult {
        rho_hat,
        raw_purity,
        cross_purity,
        element_errors,
        blocked_paths,
        assumed_zero: coverage.assumed_zero,
    })
}

/// One frame of every acquisition in the plan, assembled into a Hermitian
/// estimate with unit trace.
fn acquire<R: Rng>(
    source: &DensityMatrix,
    geometry: &PathGeometry,
    plan: &AxisPlan,
    noise: &NoiseParams,
    rng: &mut R,
) -> Result<(ComplexMatrix, Vec<String>)> {
    let n = geometry.paths.len();

    // Direct image, dark frame subtracted.
    let populations: Vec<f64> = geometry.paths.iter().map(|p| source.get(p.index(), p.index()).re).collect();
    let dark = noise.background * populations.iter().copied().fold(0.0, f64::max);
    let direct: Vec<f64> = noise.apply(&populations, rng).into_iter().map(|v| (v - dark).max(0.0)).collect();
    let flux: f64 = direct.iter().sum();
    if flux <= 0.0 {
        return Err(Error::InvalidParameter("direct image is dark".into()));
    }

    let mut estimate = ComplexMatrix::zeros(n, n);
    for (p, v) in geometry.paths.iter().zip(&direct) {
        estimate.set(p.index(), p.index(), Complex64::new(v / flux, 0.0));
    }

    let mut sums: BTreeMap<(usize, usize), (Complex64, usize)> = BTreeMap::new();
    let mut blocked_paths: Vec<String> = Vec::new();
    for config in &plan.configs {
        let names: Vec<&str> = config.blocked.iter().map(String::as_str).collect();
        let g = block_paths(geometry, &names)?;
        for b in &g.blocked {
            if !blocked_paths.contains(b) {
                blocked_paths.push(b.clone());
            }
        }
        let image = synthesize_fringes(source, &g, config.angle_deg, None)?;
        let image = add_noise_image(&image, noise, rng)?;
        let extraction = extract_image(&image, &g)?;
        for c in extraction.coherences {
            let i = geometry.path(&c.a)?.index();
            let j = geometry.path(&c.b)?.index();
            let entry = sums.entry((i, j)).or_insert((Complex64::new(0.0, 0.0), 0));
            entry.0 += c.value / flux;
            entry.1 += 1;
        }
    }
    for ((i, j), (sum, count)) in sums {
        let v = sum / count as f64;
        estimate.set(i, j, v);
        estimate.set(j, i, v.conj());
    }
    blocked_paths.sort();
    Ok((estimate, blocked_paths))
}

/// Element-wise statistics over replicate reconstructions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplicateAverage {
    pub mean: DensityMatrix,
    /// Sample standard deviation of each complex element.
    pub std: Vec<Vec<f64>>,
    pub count: usize,
}

pub fn average_reconstructions(results: &[ReconstructionResult]) -> Result<ReplicateAverage> {
    let first = results.first().ok_or(Error::EmptySelection)?;
    let n = first.rho_hat.dim();
    let count = results.len();
    let mut mean = ComplexMatrix::zeros(n, n);
    for r in results {
        if r.rho_hat.dims() != first.rho_hat.dims() {
            return Err(Error::Dimension("replicates differ in shape".into()));
        }
        mean = mean.add(r.rho_hat.matrix())?;
    }
    let mean = mean.scale(1.0 / count as f64);
    let std = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if count < 2 {
                        return 0.0;
                    }
                    let ss: f64 =
                        results.iter().map(|r| (r.rho_hat.get(i, j) - mean.get(i, j)).norm_sqr()).sum();
                    (ss / (count - 1) as f64).sqrt()
                })
                .collect()
        })
        .collect();
    Ok(ReplicateAverage { mean: DensityMatrix::new(mean, first.rho_hat.dims().to_vec())?, std, count })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn auto_plan_covers_everything() {
        let g = PathGeometry::standard();
        let plan = AxisPlan::auto(&g).unwrap();
        let cov = plan.coverage(&g).unwrap();
        assert_eq!(cov.measured.len(), 28);
        assert!(cov.assumed_zero.is_empty());
        assert!(plan.configs.iter().any(|c| !c.blocked.is_empty()));
    }

    #[test]
    fn minimal_plan_declares_the_rest_zero() {
        let g = PathGeometry::standard();
        let plan = AxisPlan::minimal(&g).unwrap();
        let cov = plan.coverage(&g).unwrap();
        assert_eq!(cov.measured.len() + cov.assumed_zero.len(), 28);
        for key in ["a1-a8", "a2-a7", "a3-a6", "a4-a5", "a2-a3", "a6-a7"] {
            let alt: Vec<&str> = key.split('-').collect();
            let rev = format!("{}-{}", alt[1], alt[0]);
            assert!(cov.measured.contains_key(key) || cov.measured.contains_key(&rev), "{key}");
        }
    }

    #[test]
    fn missing_pairs_are_reported() {
        let g = PathGeometry::standard();
        let plan = AxisPlan { configs: vec![AxisConfig::new(90.0, &[])], theory_zero: vec![] };
        assert!(matches!(plan.coverage(&g), Err(Error::IncompleteCoverage(_))));
    }

    #[test]
    fn plan_json_round_trip() {
        let g = PathGeometry::standard();
        let plan = AxisPlan::minimal(&g).unwrap();
        assert_eq!(AxisPlan::from_json(&plan.to_json().unwrap()).unwrap(), plan);
    }

    #[test]
    fn projection_clips_negative_part() {
        let m = ComplexMatrix::from_diagonal(&[0.7, 0.4, -0.1, 0.0]);
        let rho = project_to_density(&m, vec![2, 2]).unwrap();
        assert!(rho.is_valid());
        assert!((rho.get(0, 0).re - 0.7 / 1.1).abs() < 1e-12);
        assert!(rho.get(2, 2).re.abs() < 1e-12);
    }

    #[test]
    fn averaging_single_result_has_zero_spread() {
        let rho = DensityMatrix::maximally_mixed(vec![2, 2, 2]).unwrap();
        let g = PathGeometry::standard();
        let plan = AxisPlan::auto(&g).unwrap();
        let r = reconstruct(&rho, &g, &plan, &NoiseParams::NONE, 0, Some(&rho)).unwrap();
        assert!(r.max_element_error().unwrap() < 1e-12);
        let avg = average_reconstructions(&[r.clone(), r]).unwrap();
        assert!(avg.std.iter().flatten().all(|&s| s < 1e-15));
        assert!(avg.mean.max_abs_diff(&rho) < 1e-12);
    }
}
