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

//! Camera noise: constant background plus intensity-dependent fluctuation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::fringe::{FringeImage, FringePattern};
use crate::error::{Error, Result};

/// Noise knobs. Neither value comes from a calibrated camera.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    /// Background level as a fraction of the pattern peak.
    pub background: f64,
    /// Standard deviation of a sample is `shot_scale * sqrt(I + background)`.
    pub shot_scale: f64,
}

impl Default for NoiseParams {
    fn default() -> Self {
        NoiseParams { background: 0.01, shot_scale: 0.02 }
    }
}

impl NoiseParams {
    pub const NONE: NoiseParams = NoiseParams { background: 0.0, shot_scale: 0.0 };

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("background", self.background), ("shot_scale", self.shot_scale)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be nonnegative, got {v}")));
            }
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.background == 0.0 && self.shot_scale == 0.0
    }

    pub fn scaled(&self, factor: f64) -> Self {
        NoiseParams { background: self.background * factor, shot_scale: self.shot_scale * factor }
    }

    /// Noisy copy of `values` using `background` relative to their peak.
    pub fn apply<R: Rng>(&self, values: &[f64], rng: &mut R) -> Vec<f64> {
        let peak = values.iter().copied().fold(0.0, f64::max);
        let b = self.background * peak;
        values
            .iter()
            .map(|&v| {
                let z: f64 = rng.sample(StandardNormal);
                (v + b + self.shot_scale * (v + b).sqrt() * z).max(0.0)
            })
            .collect()
    }
}

pub fn add_noise(pattern: &FringePattern, params: &NoiseParams, seed: u64) -> Result<FringePattern> {
    add_noise_with(pattern, params, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn add_noise_with<R: Rng>(
    pattern: &FringePattern,
    params: &NoiseParams,
    rng: &mut R,
) -> Result<FringePattern> {
    params.validate()?;
    if params.is_zero() {
        return Ok(pattern.clone());
    }
    let noisy = params.apply(&pattern.intensities(), rng);
    let mut out = pattern.clone();
    for (s, v) in out.samples.iter_mut().zip(noisy) {
        s.1 = v;
    }
    Ok(out)
}

pub fn add_noise_image<R: Rng>(
    image: &FringeImage,
    params: &NoiseParams,
    rng: &mut R,
) -> Result<FringeImage> {
    let lanes = image.lanes.iter().map(|lane| add_noise_with(lane, params, rng)).collect::<Result<_>>()?;
    Ok(FringeImage { lanes, ..image.clone() })
}
