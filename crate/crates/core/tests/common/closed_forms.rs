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

//! Closed-form joint matrices written out element by element.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use super::density;
use seqmeas_core::{ChainConfig, ComplexMatrix, DensityMatrix, Model};

pub fn two_stage_diagonal(phi: f64, model: Model) -> ChainConfig {
    ChainConfig::from_angles(phi, false, &[FRAC_PI_2, FRAC_PI_4], model).unwrap()
}

pub fn two_stage_rotated(phi: f64) -> ChainConfig {
    ChainConfig::from_angles(phi, true, &[0.0, FRAC_PI_4], Model::Unitary).unwrap()
}

pub fn eq_rho12(phi: f64) -> DensityMatrix {
    let (c2, s2) = (phi.cos().powi(2), phi.sin().powi(2));
    DensityMatrix::new(ComplexMatrix::from_diagonal(&[c2, c2, s2, s2]).scale(0.5), vec![2, 2]).unwrap()
}

pub fn eq_rho123(phi: f64) -> DensityMatrix {
    let (a, b) = (phi.cos().powi(2), phi.sin().powi(2));
    density(
        &[
            &[a, 0.0, -a, 0.0, 0.0, 0.0, 0.0, 0.0],
            &[0.0, a, 0.0, a, 0.0, 0.0, 0.0, 0.0],
            &[-a, 0.0, a, 0.0, 0.0, 0.0, 0.0, 0.0],
            &[0.0, a, 0.0, a, 0.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 0.0, b, 0.0, b, 0.0],
            &[0.0, 0.0, 0.0, 0.0, 0.0, b, 0.0, -b],
            &[0.0, 0.0, 0.0, 0.0, b, 0.0, b, 0.0],
            &[0.0, 0.0, 0.0, 0.0, 0.0, -b, 0.0, b],
        ],
        0.25,
        vec![2, 2, 2],
    )
}

pub fn eq_coll123(phi: f64) -> DensityMatrix {
    let (a, b) = (phi.cos().powi(2), phi.sin().powi(2));
    DensityMatrix::new(ComplexMatrix::from_diagonal(&[a, a, a, a, b, b, b, b]).scale(0.25), vec![2, 2, 2])
        .unwrap()
}

pub fn eq_tilde12(phi: f64) -> DensityMatrix {
    let c = (2.0 * phi).cos();
    density(
        &[&[1.0, c, 0.0, 0.0], &[c, 1.0, 0.0, 0.0], &[0.0, 0.0, 1.0, -c], &[0.0, 0.0, -c, 1.0]],
        0.25,
        vec![2, 2],
    )
}

pub fn eq_tilde123(phi: f64) -> DensityMatrix {
    let c = (2.0 * phi).cos();
    density(
        &[
            &[1.0, 1.0, c, -c, 0.0, 0.0, 0.0, 0.0],
            &[1.0, 1.0, c, -c, 0.0, 0.0, 0.0, 0.0],
            &[c, c, 1.0, -1.0, 0.0, 0.0, 0.0, 0.0],
            &[-c, -c, -1.0, 1.0, 0.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 0.0, 1.0, -1.0, c, c],
            &[0.0, 0.0, 0.0, 0.0, -1.0, 1.0, -c, -c],
            &[0.0, 0.0, 0.0, 0.0, c, -c, 1.0, 1.0],
            &[0.0, 0.0, 0.0, 0.0, c, -c, 1.0, 1.0],
        ],
        0.125,
        vec![2, 2, 2],
    )
}
