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

//! Interference fringes behind the cylindrical lens and their DFT.
//!
//! Along the OFT axis a lane of paths at projected positions `p_j` produces
//! `I(u) = Σ_jk ρ_jk exp(i κ u (p_j - p_k))`. The sampling window of a lane is
//! one period of its fundamental separation `q` (the largest length that
//! divides every projected separation), so each pair lands on an exact DFT
//! bin `(p_j - p_k) / q` and a rectangular window is leak-free.

use std::f64::consts::TAU;
use std::io::{BufRead, Write};

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::geometry::PathGeometry;
use super::{KAPPA, POSITION_TOL};
use crate::error::{Error, Result};
use crate::state::DensityMatrix;

/// Smallest accepted ratio between the fundamental and the largest separation.
const MAX_BIN: f64 = 1e5;
const MIN_SAMPLES: usize = 64;

/// One lane of the camera image: a 1-D intensity profile along the OFT axis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FringePattern {
    /// Degrees from the x axis.
    pub axis_angle: f64,
    /// Position of the lane across the axis (mm).
    pub lane_offset: f64,
    /// Paths in the lane, sorted along the axis.
    pub paths: Vec<String>,
    /// Separation (mm) that divides every projected pair separation.
    pub fundamental: f64,
    /// Projected pair separations (mm).
    pub effective_spacings: Vec<f64>,
    /// `(coordinate, intensity)` with strictly increasing coordinates.
    pub samples: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FringeImage {
    pub axis_angle: f64,
    pub blocked: Vec<String>,
    pub lanes: Vec<FringePattern>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coherence {
    /// Path whose matrix index is smaller.
    pub a: String,
    pub b: String,
    /// Estimate of `ρ_ab`.
    pub value: Complex64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Extraction {
    /// Zero-frequency component summed over lanes.
    pub dc: f64,
    pub coherences: Vec<Coherence>,
    /// Pairs that interfere but share their frequency with another pair.
    pub unresolvable: Vec<(String, String)>,
}

impl Extraction {
    pub fn get(&self, a: &str, b: &str) -> Option<Complex64> {
        self.coherences.iter().find_map(|c| {
            if c.a == a && c.b == b {
                Some(c.value)
            } else if c.a == b && c.b == a {
                Some(c.value.conj())
            } else {
                None
            }
        })
    }
}

fn real_gcd(a: f64, b: f64, tol: f64) -> f64 {
    let (mut a, mut b) = (a.max(b), a.min(b));
    while b > tol {
        let mut r = a % b;
        if b - r < tol {
            r = 0.0;
        }
        a = b;
        b = r;
    }
    a
}

/// Largest length of which every separation is an integer multiple.
fn fundamental(separations: &[f64]) -> Result<f64> {
    let max = separations.iter().copied().fold(0.0, f64::max);
    if max <= POSITION_TOL {
        return Ok(1.0);
    }
    let tol = 1e-9 * max.max(1.0);
    let q =
        separations.iter().filter(|&&d| d > tol).fold(
            0.0,
            |g, &d| {
                if g == 0.0 {
                    d
                } else {
                    real_gcd(g, d, tol)
                }
            },
        );
    if q * MAX_BIN < max {
        return Err(Error::InvalidParameter(format!(
            "projected separations are incommensurate (common unit {q} mm for span {max} mm)"
        )));
    }
    Ok(q)
}

fn bin_of(delta: f64, q: f64) -> Result<i64> {
    let s = delta / q;
    let r = s.round();
    if (s - r).abs() > 1e-6 {
        return Err(Error::InvalidParameter(format!(
            "separation {delta} mm is not a multiple of the fundamental {q} mm"
        )));
    }
    Ok(r as i64)
}

/// Project the named paths on the axis.
fn projections(geometry: &PathGeometry, axis_angle: f64, names: &[String]) -> Result<Vec<f64>> {
    let (s, c) = axis_angle.to_radians().sin_cos();
    names.iter().map(|n| geometry.path(n).map(|p| p.x * c + p.y * s)).collect()
}

fn pair_separations(p: &[f64]) -> Vec<f64> {
    let mut out = Vec::new();
    for (i, a) in p.iter().enumerate() {
        for b in &p[i + 1..] {
            out.push((b - a).abs());
        }
    }
    out
}

/// Sample count for which every bin of a lane is well below Nyquist.
fn auto_samples(max_bin: i64) -> usize {
    (4 * max_bin.max(1) as usize).next_power_of_two().max(MIN_SAMPLES)
}

/// Render the fringe image of `rho` (one row/column per outcome path) along
/// the given axis. Blocked paths of `geometry` are dark. With `sample_count`
/// `None` each lane gets a power-of-two count at least four times its
/// highest bin.
pub fn synthesize_fringes(
    rho: &DensityMatrix,
    geometry: &PathGeometry,
    axis_angle: f64,
    sample_count: Option<usize>,
) -> Result<FringeImage> {
    if rho.dim() != geometry.paths.len() {
        return Err(Error::Dimension(format!(
            "state has dimension {}, geometry has {} paths",
            rho.dim(),
            geometry.paths.len()
        )));
    }
    if !axis_angle.is_finite() {
        return Err(Error::InvalidParameter("axis angle must be finite".into()));
    }
    if sample_count.is_some_and(|n| n < 2) {
        return Err(Error::InvalidParameter("need at least two samples".into()));
    }
    let mut lanes = Vec::new();
    for lane in geometry.lanes(axis_angle) {
        let names: Vec<String> = lane.paths.iter().map(|(p, _)| p.name.clone()).collect();
        let index: Vec<usize> = lane.paths.iter().map(|(p, _)| p.index()).collect();
        let pos: Vec<f64> = lane.paths.iter().map(|&(_, u)| u).collect();
        let spacings = pair_separations(&pos);
        let q = fundamental(&spacings)?;
        let bins: Vec<i64> = pos.iter().map(|&u| bin_of(u - pos[0], q)).collect::<Result<_>>()?;
        let max_bin = bins.last().copied().unwrap_or(0);
        let n = sample_count.unwrap_or_else(|| auto_samples(max_bin));
        let window = TAU / (KAPPA * q);

        let dc: f64 = index.iter().map(|&i| rho.get(i, i).re).sum();
        let samples = (0..n)
            .map(|t| {
                let mut intensity = dc;
                for a in 0..index.len() {
                    for b in a + 1..index.len() {
                        let s = (bins[a] - bins[b]).rem_euclid(n as i64) * t as i64 % n as i64;
                        let phase = Complex64::from_polar(1.0, TAU * s as f64 / n as f64);
                        intensity += 2.0 * (rho.get(index[a], index[b]) * phase).re;
                    }
                }
                (window * t as f64 / n as f64, intensity.max(0.0))
            })
            .collect();
        lanes.push(FringePattern {
            axis_angle,
            lane_offset: lane.offset,
            paths: names,
            fundamental: q,
            effective_spacings: spacings,
            samples,
        });
    }
    Ok(FringeImage { axis_angle, blocked: geometry.blocked.clone(), lanes })
}

/// Read every resolvable coherence of one lane from its DFT.
pub fn dft_extract(pattern: &FringePattern, geometry: &PathGeometry) -> Result<Extraction> {
    let n = pattern.samples.len();
    if n < 2 {
        return Err(Error::InvalidParameter("pattern has fewer than two samples".into()));
    }
    if pattern.samples.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(Error::InvalidParameter("sample coordinates must increase".into()));
    }
    let pos = projections(geometry, pattern.axis_angle, &pattern.paths)?;
    let q = pattern.fundamental;
    let paths: Vec<_> = pattern.paths.iter().map(|name| geometry.path(name)).collect::<Result<_>>()?;

    let mut pairs = Vec::new();
    for a in 0..pos.len() {
        for b in a + 1..pos.len() {
            let (i, j) = if paths[a].index() < paths[b].index() { (a, b) } else { (b, a) };
            pairs.push((i, j, bin_of(pos[i] - pos[j], q)?));
        }
    }
    if let Some(worst) = pairs.iter().map(|p| p.2.abs()).max() {
        if 2 * worst as usize >= n {
            return Err(Error::Nyquist(format!(
                "lane {:?} needs bin {worst} but has only {n} samples",
                pattern.paths
            )));
        }
    }

    let mut buffer: Vec<Complex64> = pattern.samples.iter().map(|&(_, v)| Complex64::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buffer);
    let scale = 1.0 / n as f64;

    let mut out = Extraction { dc: buffer[0].re * scale, ..Default::default() };
    for &(i, j, s) in &pairs {
        let clash = pairs.iter().filter(|p| p.2.abs() == s.abs()).count() > 1;
        if clash || s == 0 {
            out.unresolvable.push((pattern.paths[i].clone(), pattern.paths[j].clone()));
            continue;
        }
        out.coherences.push(Coherence {
            a: pattern.paths[i].clone(),
            b: pattern.paths[j].clone(),
            value: buffer[s.rem_euclid(n as i64) as usize] * scale,
        });
    }
    Ok(out)
}

/// Extract every lane of an image.
pub fn extract_image(image: &FringeImage, geometry: &PathGeometry) -> Result<Extraction> {
    let mut out = Extraction::default();
    for lane in &image.lanes {
        let e = dft_extract(lane, geometry)?;
        out.dc += e.dc;
        out.coherences.extend(e.coherences);
        out.unresolvable.extend(e.unresolvable);
    }
    if out.coherences.is_empty() && !out.unresolvable.is_empty() {
        return Err(Error::Degenerate(format!(
            "every interfering pair along {}° shares its spacing",
            image.axis_angle
        )));
    }
    Ok(out)
}

impl FringePattern {
    pub fn intensities(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.1).collect()
    }

    pub fn peak(&self) -> f64 {
        self.samples.iter().map(|s| s.1).fold(0.0, f64::max)
    }

    /// CSV with `coordinate,intensity` rows preceded by `#`-comment metadata.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let join = |v: &[f64]| v.iter().map(f64::to_string).collect::<Vec<_>>().join(";");
        writeln!(w, "# axis_angle={}", self.axis_angle)?;
        writeln!(w, "# lane_offset={}", self.lane_offset)?;
        writeln!(w, "# paths={}", self.paths.join(";"))?;
        writeln!(w, "# fundamental={}", self.fundamental)?;
        writeln!(w, "# effective_spacings={}", join(&self.effective_spacings))?;
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(["coordinate", "intensity"]).map_err(csv_err)?;
        for (u, v) in &self.samples {
            csv.write_record([u.to_string(), v.to_string()]).map_err(csv_err)?;
        }
        csv.flush()?;
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut meta = std::collections::HashMap::new();
        let mut body = String::new();
        for line in r.lines() {
            let line = line?;
            match line.strip_prefix('#') {
                Some(m) => {
                    let (k, v) = m
                        .trim()
                        .split_once('=')
                        .ok_or_else(|| Error::Parse(format!("bad metadata line `{line}`")))?;
                    meta.insert(k.to_string(), v.to_string());
                }
                None => {
                    body.push_str(&line);
                    body.push('\n');
                }
            }
        }
        let get = |k: &str| meta.get(k).ok_or_else(|| Error::Parse(format!("missing `{k}`")));
        let num = |s: &str| s.parse::<f64>().map_err(|e| Error::Parse(format!("`{s}`: {e}")));
        let list =
            |s: &String| -> Result<Vec<f64>> { s.split(';').filter(|t| !t.is_empty()).map(num).collect() };
        let mut samples = Vec::new();
        for rec in csv::Reader::from_reader(body.as_bytes()).records() {
            let rec = rec.map_err(csv_err)?;
            if rec.len() != 2 {
                return Err(Error::Parse("expected two columns".into()));
            }
            samples.push((num(&rec[0])?, num(&rec[1])?));
        }
        Ok(FringePattern {
            axis_angle: num(get("axis_angle")?)?,
            lane_offset: num(get("lane_offset")?)?,
            paths: get("paths")?.split(';').filter(|t| !t.is_empty()).map(String::from).collect(),
            fundamental: num(get("fundamental")?)?,
            effective_spacings: list(get("effective_spacings")?)?,
            samples,
        })
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}
