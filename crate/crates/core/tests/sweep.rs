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

use seqmeas_core::experiment::{rows_to_csv, run_sweep, Compensation, ReplicatePolicy, SweepSpec};
use seqmeas_core::optics::{AxisPlan, NoiseParams, PathGeometry};
use seqmeas_core::Execution;

fn noiseless(curves: Vec<Compensation>) -> SweepSpec {
    SweepSpec {
        noise: NoiseParams::NONE,
        replicates: ReplicatePolicy::Fixed(1),
        curves,
        ..SweepSpec::default()
    }
}

fn setup() -> (PathGeometry, AxisPlan) {
    let g = PathGeometry::standard();
    let plan = AxisPlan::auto(&g).unwrap();
    (g, plan)
}

#[test]
fn noiseless_curves_follow_closed_forms() {
    let (g, plan) = setup();
    let spec = noiseless(vec![Compensation::FULL, Compensation::without(2).unwrap()]);
    let out = run_sweep(&spec, &g, &plan, 0, Execution::default()).unwrap();
    assert_eq!(out.rows.len(), 22);
    for row in &out.rows {
        let c = (2.0 * row.phi_deg.to_radians()).cos();
        let expected = if row.curve == "compensated" { (1.0 + c * c) / 4.0 } else { (1.0 + c * c) / 8.0 };
        assert!((row.mean_purity - expected).abs() < 1e-6, "{} at {}", row.curve, row.xi_deg);
        assert!((row.phi_deg - 2.0 * row.xi_deg).abs() < 1e-12);
    }
    assert!(out.points.iter().all(|p| p.max_element_error < 1e-6));
}

#[test]
fn parallel_and_sequential_agree_bitwise() {
    let (g, plan) = setup();
    let spec = SweepSpec {
        xi_end_deg: 9.0,
        replicates: ReplicatePolicy::Fixed(3),
        curves: vec![Compensation::FULL, Compensation::without(2).unwrap()],
        ..SweepSpec::default()
    };
    let a = run_sweep(&spec, &g, &plan, 99, Execution::Sequential).unwrap();
    let b = run_sweep(&spec, &g, &plan, 99, Execution::Parallel).unwrap();
    assert_eq!(a, b);
    assert_eq!(rows_to_csv(&a.rows).unwrap(), rows_to_csv(&b.rows).unwrap());
}

#[test]
fn master_seed_changes_noise() {
    let (g, plan) = setup();
    let spec = SweepSpec { xi_end_deg: 0.0, ..SweepSpec::default() };
    let a = run_sweep(&spec, &g, &plan, 1, Execution::Sequential).unwrap();
    let b = run_sweep(&spec, &g, &plan, 2, Execution::Sequential).unwrap();
    assert_ne!(a.rows[0].mean_purity, b.rows[0].mean_purity);
}

#[test]
fn zero_width_sweep_gives_one_row() {
    let (g, plan) = setup();
    let spec = SweepSpec { xi_start_deg: 5.0, xi_end_deg: 5.0, ..noiseless(vec![Compensation::FULL]) };
    let out = run_sweep(&spec, &g, &plan, 0, Execution::Sequential).unwrap();
    assert_eq!(out.rows.len(), 1);
    assert_eq!(out.rows[0].replicates, 1);
    assert_eq!(out.rows[0].std_error, 0.0);
}

#[test]
fn csv_has_expected_columns() {
    let (g, plan) = setup();
    let spec = SweepSpec { xi_end_deg: 2.25, ..noiseless(vec![Compensation::FULL]) };
    let out = run_sweep(&spec, &g, &plan, 0, Execution::Sequential).unwrap();
    let csv = rows_to_csv(&out.rows).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "curve,xi_deg,phi_deg,replicates,mean_purity,std_error,unitary_closed_form,collapse_closed_form"
    );
    assert_eq!(lines.count(), 2);
}

#[test]
fn tabulated_replicate_counts() {
    let spec = SweepSpec { replicates: ReplicatePolicy::Tabulated, ..SweepSpec::default() };
    let full = Compensation::FULL;
    let bare = Compensation::without(2).unwrap();
    assert_eq!(spec.replicates_for(0.0, &full), 4);
    assert_eq!(spec.replicates_for(45.0, &full), 2);
    assert_eq!(spec.replicates_for(22.5, &full), 5);
    assert_eq!(spec.replicates_for(0.0, &bare), 5);
}

#[test]
fn invalid_specs_are_rejected() {
    let (g, plan) = setup();
    let bad = [
        SweepSpec { xi_step_deg: 0.0, ..SweepSpec::default() },
        SweepSpec { xi_start_deg: 10.0, xi_end_deg: 5.0, ..SweepSpec::default() },
        SweepSpec { replicates: ReplicatePolicy::Fixed(0), ..SweepSpec::default() },
        SweepSpec { curves: vec![], ..SweepSpec::default() },
        SweepSpec { noise: NoiseParams { background: -1.0, shot_scale: 0.0 }, ..SweepSpec::default() },
    ];
    for spec in bad {
        assert!(run_sweep(&spec, &g, &plan, 0, Execution::Sequential).is_err());
    }
}
