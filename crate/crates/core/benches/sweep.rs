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

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use seqmeas_core::experiment::{run_sweep, Compensation, ReplicatePolicy, SweepSpec};
use seqmeas_core::optics::{AxisPlan, PathGeometry};
use seqmeas_core::Execution;

fn sweep(c: &mut Criterion) {
    let geometry = PathGeometry::standard();
    let plan = AxisPlan::auto(&geometry).unwrap();
    let spec = SweepSpec {
        replicates: ReplicatePolicy::Fixed(5),
        curves: vec![Compensation::FULL, Compensation::without(2).unwrap()],
        ..SweepSpec::default()
    };
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    for (name, execution) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
        group.bench_function(name, |b| {
            b.iter(|| run_sweep(black_box(&spec), &geometry, &plan, 42, execution).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, sweep);
criterion_main!(benches);
