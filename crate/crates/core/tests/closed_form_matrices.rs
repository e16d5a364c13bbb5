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

//! Joint readout matrices against the closed forms printed for the
//! orthogonal-measurement configurations.

mod common;

use std::f64::consts::{FRAC_PI_4, FRAC_PI_8};

use common::closed_forms::*;
use common::{assert_close, phi_grid};
use seqmeas_core::chain::{last_record_first, unitary_global_state};
use seqmeas_core::{
    collapse_chain, kron, unitary_chain, ChainConfig, ComplexMatrix, DensityMatrix, Model, CLOSED_FORM_TOL,
};

#[test]
fn two_orthogonal_measurements_diagonal_input() {
    for phi in phi_grid() {
        let r = unitary_chain(&two_stage_diagonal(phi, Model::Unitary)).unwrap();
        assert_close(&r.joint_readouts, &eq_rho12(phi), CLOSED_FORM_TOL, "rho_12");
    }
}

#[test]
fn rho12_factorizes() {
    for phi in phi_grid() {
        let (c2, s2) = (phi.cos().powi(2), phi.sin().powi(2));
        let k = kron(&ComplexMatrix::from_diagonal(&[c2, s2]), &ComplexMatrix::from_diagonal(&[0.5, 0.5]));
        assert!(k.approx_eq(eq_rho12(phi).matrix(), 1e-15));
        let m1 = eq_rho12(phi).partial_trace(&[0]).unwrap();
        assert!(m1.matrix().approx_eq(&ComplexMatrix::from_diagonal(&[c2, s2]), 1e-15));
    }
}

#[test]
fn three_orthogonal_measurements_diagonal_input() {
    for phi in phi_grid() {
        let r = unitary_chain(&ChainConfig::three_stage_diagonal(phi, Model::Unitary).unwrap()).unwrap();
        assert_close(&r.joint_readouts, &eq_rho123(phi), CLOSED_FORM_TOL, "rho_123");
    }
}

#[test]
fn collapse_three_measurements_diagonal_input() {
    for phi in phi_grid() {
        let r = collapse_chain(&ChainConfig::three_stage_diagonal(phi, Model::Collapse).unwrap()).unwrap();
        assert_close(&r.joint_readouts, &eq_coll123(phi), CLOSED_FORM_TOL, "rho_coll");
    }
}

#[test]
fn two_measurements_rotated_input() {
    for phi in phi_grid() {
        let r = unitary_chain(&two_stage_rotated(phi)).unwrap();
        let reordered = last_record_first(&r.joint_readouts).unwrap();
        assert_close(&reordered, &eq_tilde12(phi), CLOSED_FORM_TOL, "tilde rho_12");
    }
}

#[test]
fn three_measurements_rotated_input() {
    for phi in phi_grid() {
        let r = unitary_chain(&ChainConfig::three_stage_rotated(phi, Model::Unitary).unwrap()).unwrap();
        let reordered = last_record_first(&r.joint_readouts).unwrap();
        assert_close(&reordered, &eq_tilde123(phi), CLOSED_FORM_TOL, "tilde rho_123");
    }
}

#[test]
fn rotated_collapse_is_block_diagonal_part() {
    for phi in phi_grid() {
        let r = collapse_chain(&ChainConfig::three_stage_rotated(phi, Model::Collapse).unwrap()).unwrap();
        // delete coherences between distinct M2 outcomes of the closed form
        let expected = eq_tilde123(phi).dephase(2).unwrap();
        let got = last_record_first(&r.joint_readouts).unwrap();
        assert_close(&got, &expected, CLOSED_FORM_TOL, "rotated collapse");
        let c = (2.0 * phi).cos();
        assert!((got.purity() - (1.0 + c * c) / 8.0).abs() < CLOSED_FORM_TOL);
    }
}

#[test]
fn single_measurement_of_diagonal_state_in_diagonal_basis() {
    for phi in phi_grid() {
        let config = ChainConfig::from_angles(phi, false, &[FRAC_PI_4], Model::Unitary).unwrap();
        let r = unitary_chain(&config).unwrap();
        let half = DensityMatrix::maximally_mixed(vec![2]).unwrap();
        assert_close(&r.joint_readouts, &half, CLOSED_FORM_TOL, "rho_1");
    }
}

#[test]
fn repeated_measurement_copies_the_outcome() {
    let config = ChainConfig::from_angles(0.0, false, &[0.0, 0.0, 0.0], Model::Unitary).unwrap();
    let r = unitary_chain(&config).unwrap();
    for i in 0..8 {
        for j in 0..8 {
            let v = r.joint_readouts.get(i, j).norm();
            if !(i == 0 || i == 7) || !(j == 0 || j == 7) {
                assert!(v < 1e-15, "({i}, {j}) = {v}");
            }
        }
    }
    // φ = 0 is |V⟩ and the basis at angle 0 has V on outcome 1
    assert!((r.joint_readouts.get(7, 7).re - 1.0).abs() < 1e-15);
}

#[test]
fn purity_examples() {
    let unitary = unitary_chain(&ChainConfig::three_stage_diagonal(0.0, Model::Unitary).unwrap()).unwrap();
    assert!((unitary.joint_readouts.purity() - 0.5).abs() < 1e-12);
    let collapse =
        collapse_chain(&ChainConfig::three_stage_diagonal(FRAC_PI_4, Model::Collapse).unwrap()).unwrap();
    assert!((collapse.joint_readouts.purity() - 0.125).abs() < 1e-12);
    let pure = DensityMatrix::qubit(ComplexMatrix::from_diagonal(&[1.0, 0.0])).unwrap();
    assert!((pure.purity() - 1.0).abs() < 1e-15);
}

#[test]
fn entropy_of_rho12_at_maximal_mixing() {
    assert!((eq_rho12(FRAC_PI_4).von_neumann_entropy() - 2.0).abs() < 1e-12);
}

#[test]
fn validate_closed_form_at_pi_over_8() {
    assert!(eq_rho123(FRAC_PI_8).validate().passed);
}

#[test]
fn dephasing_second_readout_halves_purity() {
    for phi in phi_grid() {
        let c = (2.0 * phi).cos();
        let m = eq_tilde123(phi);
        assert!((m.purity() - (1.0 + c * c) / 4.0).abs() < 1e-12);
        // M2 is subsystem 2 after reordering
        assert!((m.dephase(2).unwrap().purity() - (1.0 + c * c) / 8.0).abs() < 1e-12);
    }
}

#[test]
fn system_aligned_with_second_basis() {
    // after two orthogonal measurements ρ_Q is diagonal in M2's eigenbasis
    for phi in phi_grid() {
        let config = two_stage_diagonal(phi, Model::Unitary);
        let r = unitary_chain(&config).unwrap();
        let q = r.joint_with_q.partial_trace(&[0]).unwrap();
        let t = config.cumulative_angles()[1];
        let back = seqmeas_core::rotate_state(&q, t).unwrap();
        assert!(back.get(0, 1).norm() < 1e-10, "phi {phi}: {}", back.get(0, 1));
    }
}

#[test]
fn global_state_is_pure() {
    for phi in phi_grid() {
        let g =
            unitary_global_state(&ChainConfig::three_stage_rotated(phi, Model::Unitary).unwrap()).unwrap();
        assert!((g.purity() - 1.0).abs() < 1e-12);
        assert_eq!(g.dims(), &[2, 2, 2, 2, 2]);
    }
}
