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

//! Output path geometry of the three-displacer chain.

use serde::{Deserialize, Serialize};

use super::POSITION_TOL;
use crate::error::{Error, Result};

/// Displacement of the first crystal (mm, along x).
pub const DEFAULT_DX: f64 = 2.7;
/// Displacement of the second crystal (mm, along y).
pub const DEFAULT_DY: f64 = 2.7;
/// Displacement of the third crystal (mm, along x).
pub const DEFAULT_DBIG_X: f64 = 4.0;

/// Path names in the order the experiment labels them, paired with the
/// outcome string `m1 m2 m3` that puts a photon there. Outcome 1 of a stage
/// means the displaced component.
const PATH_NAMES: [(&str, &str); 8] = [
    ("a1", "000"),
    ("a2", "100"),
    ("a3", "001"),
    ("a4", "101"),
    ("a5", "111"),
    ("a6", "011"),
    ("a7", "110"),
    ("a8", "010"),
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Path {
    pub name: String,
    pub outcome: String,
    pub x: f64,
    pub y: f64,
}

impl Path {
    /// Row of the joint readout matrix this path corresponds to.
    pub fn index(&self) -> usize {
        usize::from_str_radix(&self.outcome, 2).expect("outcome is a bit string")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Displacements {
    pub dx: f64,
    pub dy: f64,
    pub d_big_x: f64,
}

impl Default for Displacements {
    fn default() -> Self {
        Displacements { dx: DEFAULT_DX, dy: DEFAULT_DY, d_big_x: DEFAULT_DBIG_X }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathGeometry {
    pub displacements: Displacements,
    pub paths: Vec<Path>,
    #[serde(default)]
    pub blocked: Vec<String>,
}

pub fn build_geometry(dx: f64, dy: f64, d_big_x: f64) -> Result<PathGeometry> {
    for (name, d) in [("dx", dx), ("dy", dy), ("dX", d_big_x)] {
        if !(d.is_finite() && d > 0.0) {
            return Err(Error::InvalidParameter(format!("{name} must be positive, got {d}")));
        }
    }
    let paths: Vec<Path> = PATH_NAMES
        .iter()
        .map(|&(name, outcome)| {
            let bit = |k: usize| f64::from(outcome.as_bytes()[k] - b'0');
            Path {
                name: name.to_string(),
                outcome: outcome.to_string(),
                x: bit(0) * dx + bit(2) * d_big_x,
                y: bit(1) * dy,
            }
        })
        .collect();
    for (i, a) in paths.iter().enumerate() {
        for b in &paths[i + 1..] {
            if (a.x - b.x).abs() < POSITION_TOL && (a.y - b.y).abs() < POSITION_TOL {
                return Err(Error::PathCollision(format!(
                    "{} and {} coincide at ({}, {})",
                    a.name, b.name, a.x, a.y
                )));
            }
        }
    }
    Ok(PathGeometry { displacements: Displacements { dx, dy, d_big_x }, paths, blocked: Vec::new() })
}

pub fn block_paths(geometry: &PathGeometry, labels: &[&str]) -> Result<PathGeometry> {
    let mut out = geometry.clone();
    for label in labels {
        let name = geometry.path(label)?.name.clone();
        if !out.blocked.contains(&name) {
            out.blocked.push(name);
        }
    }
    if out.active().next().is_none() {
        return Err(Error::InvalidParameter("cannot block every path".into()));
    }
    out.blocked.sort();
    Ok(out)
}

/// One path pair as seen along an OFT axis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairSpacing {
    pub a: String,
    pub b: String,
    /// Separation projected on the axis (mm, nonnegative).
    pub separation: f64,
    /// Lane index, `None` when the two paths cannot interfere along this axis.
    pub lane: Option<usize>,
    /// False when another pair in the lane has the same separation.
    pub resolvable: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpacingReport {
    pub axis_angle: f64,
    pub lanes: Vec<Vec<String>>,
    pub pairs: Vec<PairSpacing>,
}

impl SpacingReport {
    /// Pairs that interfere but cannot be told apart.
    pub fn degenerate(&self) -> Vec<&PairSpacing> {
        self.pairs.iter().filter(|p| p.lane.is_some() && !p.resolvable).collect()
    }

    pub fn resolvable(&self) -> Vec<&PairSpacing> {
        self.pairs.iter().filter(|p| p.resolvable).collect()
    }

    /// True when no coherence at all can be read out along this axis.
    pub fn is_blind(&self) -> bool {
        self.resolvable().is_empty()
    }

    pub fn find(&self, a: &str, b: &str) -> Option<&PairSpacing> {
        self.pairs.iter().find(|p| (p.a == a && p.b == b) || (p.a == b && p.b == a))
    }
}

/// Paths of a lane with their coordinate along the axis, sorted ascending.
#[derive(Clone, Debug, PartialEq)]
pub struct Lane<'a> {
    pub offset: f64,
    pub paths: Vec<(&'a Path, f64)>,
}

impl PathGeometry {
    pub fn standard() -> Self {
        build_geometry(DEFAULT_DX, DEFAULT_DY, DEFAULT_DBIG_X).expect("default geometry is valid")
    }

    /// Look a path up by name (`a5`) or outcome string (`111`).
    pub fn path(&self, label: &str) -> Result<&Path> {
        self.paths
            .iter()
            .find(|p| p.name == label || p.outcome == label)
            .ok_or_else(|| Error::UnknownPath(label.to_string()))
    }

    pub fn is_blocked(&self, path: &Path) -> bool {
        self.blocked.contains(&path.name)
    }

    pub fn active(&self) -> impl Iterator<Item = &Path> {
        self.paths.iter().filter(|p| !self.is_blocked(p))
    }

    /// Group active paths into lanes for an OFT axis at `axis_angle` degrees
    /// from the x axis. The cylindrical lens transforms along the axis and
    /// images across it, so only paths in the same lane interfere.
    pub fn lanes(&self, axis_angle: f64) -> Vec<Lane<'_>> {
        let (s, c) = axis_angle.to_radians().sin_cos();
        let mut items: Vec<(&Path, f64, f64)> =
            self.active().map(|p| (p, p.x * c + p.y * s, -p.x * s + p.y * c)).collect();
        items.sort_by(|a, b| a.2.total_cmp(&b.2).then(a.1.total_cmp(&b.1)));
        let mut lanes: Vec<Lane> = Vec::new();
        for (p, u, v) in items {
            match lanes.last_mut() {
                Some(lane) if (v - lane.offset).abs() < POSITION_TOL => lane.paths.push((p, u)),
                _ => lanes.push(Lane { offset: v, paths: vec![(p, u)] }),
            }
        }
        for lane in &mut lanes {
            lane.paths.sort_by(|a, b| a.1.total_cmp(&b.1));
        }
        lanes
    }

    pub fn spacing_report(&self, axis_angle: f64) -> SpacingReport {
        let (s, c) = axis_angle.to_radians().sin_cos();
        let lanes = self.lanes(axis_angle);
        let mut pairs = Vec::new();
        for (lane_index, lane) in lanes.iter().enumerate() {
            let mut lane_pairs = Vec::new();
            for (i, &(a, ua)) in lane.paths.iter().enumerate() {
                for &(b, ub) in &lane.paths[i + 1..] {
                    lane_pairs.push((a, b, (ub - ua).abs()));
                }
            }
            for &(a, b, d) in &lane_pairs {
                let clashes = lane_pairs.iter().filter(|o| (o.2 - d).abs() < POSITION_TOL).count();
                pairs.push(PairSpacing {
                    a: a.name.clone(),
                    b: b.name.clone(),
                    separation: d,
                    lane: Some(lane_index),
                    resolvable: clashes == 1 && d > POSITION_TOL,
                });
            }
        }
        let active: Vec<&Path> = self.active().collect();
        for (i, a) in active.iter().enumerate() {
            for b in &active[i + 1..] {
                let known = pairs
                    .iter()
                    .any(|p| (p.a == a.name && p.b == b.name) || (p.a == b.name && p.b == a.name));
                if !known {
                    pairs.push(PairSpacing {
                        a: a.name.clone(),
                        b: b.name.clone(),
                        separation: ((b.x - a.x) * c + (b.y - a.y) * s).abs(),
                        lane: None,
                        resolvable: false,
                    });
                }
            }
        }
        SpacingReport {
            axis_angle,
            lanes: lanes.iter().map(|l| l.paths.iter().map(|(p, _)| p.name.clone()).collect()).collect(),
            pairs,
        }
    }

    /// Direction of the segment joining two paths, in degrees in `[0, 180)`.
    pub fn pair_direction(a: &Path, b: &Path) -> f64 {
        let angle = (b.y - a.y).atan2(b.x - a.x).to_degrees().rem_euclid(180.0);
        if 180.0 - angle < 1e-9 {
            0.0
        } else {
            angle
        }
    }
}
