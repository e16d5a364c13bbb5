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

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use seqmeas_core::chain::last_record_first;
use seqmeas_core::experiment::{
    rows_to_csv, run_sweep, Compensation, PurityEstimator, ReplicatePolicy, SweepOutcome, SweepSpec,
};
use seqmeas_core::info::{venn, VennReport, SYSTEM_LABEL};
use seqmeas_core::io::MatrixRecord;
use seqmeas_core::optics::{AxisPlan, NoiseParams, PathGeometry};
use seqmeas_core::{run_chain, ChainConfig, Execution, MeasurementSpec, Model};
use serde::Serialize;

use crate::args::{ChainArgs, EstimatorArg, Format, Input, MatrixArgs, ModelArg, ReconstructArgs, SweepArgs};
use crate::Invalid;

pub struct RunContext<'a> {
    pub seed: u64,
    pub out: &'a Path,
    pub format: Format,
    pub config: Option<&'a Path>,
}

fn read_config(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(dir: &Path, name: &str, body: &str) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
    log::info!("wrote {}", path.display());
    Ok(())
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn csv_body<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn chain_from_flags(
    phi_deg: f64,
    input: Input,
    angles: &[f64],
    model: Model,
    dephase: &[usize],
) -> Result<ChainConfig> {
    let mut measurements = angles
        .iter()
        .map(|&a| MeasurementSpec::degrees(a, false))
        .collect::<seqmeas_core::Result<Vec<_>>>()?;
    for &k in dephase {
        let m = k
            .checked_sub(1)
            .and_then(|i| measurements.get_mut(i))
            .ok_or_else(|| Invalid(format!("--dephase {k} is outside 1..={}", angles.len())))?;
        *m = MeasurementSpec::degrees(m.relative_angle().to_degrees(), true)?;
    }
    Ok(ChainConfig::new(phi_deg.to_radians(), input == Input::Rotated, measurements, model)?)
}

#[derive(Serialize)]
struct MatrixOutput {
    config: ChainConfig,
    row_order: Vec<String>,
    purity: f64,
    matrix: MatrixRecord,
}

#[derive(Serialize)]
struct AbsRow {
    row: usize,
    col: usize,
    abs: f64,
}

pub fn matrix(ctx: &RunContext, args: &MatrixArgs) -> Result<()> {
    let config = match ctx.config {
        Some(p) => ChainConfig::from_json(&read_config(p)?)?,
        None => {
            let model = match args.model {
                ModelArg::Unitary => Model::Unitary,
                ModelArg::Collapse => Model::Collapse,
            };
            let angles = args.angles.clone().unwrap_or_else(|| match args.input {
                Input::Rotated => vec![0.0, 45.0, 135.0],
                Input::Diagonal => vec![90.0, 45.0, 45.0],
            });
            chain_from_flags(args.phi, args.input, &angles, model, &args.dephase)?
        }
    };
    let n = config.measurements.len();
    let mut rho = run_chain(&config)?.joint_readouts;
    let mut order: Vec<usize> = (1..=n).collect();
    if args.last_first {
        rho = last_record_first(&rho)?;
        order = if n == 3 { vec![3, 1, 2] } else { vec![2, 1] };
    }
    let out = MatrixOutput {
        row_order: order.iter().map(|k| format!("M{k}")).collect(),
        purity: rho.purity(),
        matrix: MatrixRecord::from(rho.clone()),
        config,
    };
    write(ctx.out, "matrix.json", &json(&out)?)?;

    let d = rho.dim();
    let table: Vec<AbsRow> = (0..d)
        .flat_map(|i| (0..d).map(move |j| (i, j)))
        .map(|(row, col)| AbsRow { row, col, abs: rho.get(row, col).norm() })
        .collect();
    match ctx.format {
        Format::Json => write(ctx.out, "matrix_abs.json", &json(&table)?),
        Format::Csv => write(ctx.out, "matrix_abs.csv", &csv_body(&table)?),
    }
}

#[derive(Serialize)]
struct VennStage {
    stage: usize,
    unitary: VennReport,
    collapse: VennReport,
}

#[derive(Serialize)]
struct VennRow<'a> {
    stage: usize,
    model: &'a str,
    region: &'a str,
    entropy: f64,
    atom: Option<f64>,
}

pub fn venn_cmd(ctx: &RunContext, args: &ChainArgs) -> Result<()> {
    let base = match ctx.config {
        Some(p) => ChainConfig::from_json(&read_config(p)?)?,
        None => chain_from_flags(args.phi, args.input, &args.angles, Model::Unitary, &[])?,
    };
    let mut stages = Vec::new();
    for k in 1..=base.measurements.len() {
        let truncated =
            ChainConfig::new(base.phi, base.rotated_input, base.measurements[..k].to_vec(), Model::Unitary)?;
        let labels: Vec<String> =
            std::iter::once(SYSTEM_LABEL.to_string()).chain((1..=k).map(|i| format!("M{i}"))).collect();
        let labels: Vec<&str> = labels.iter().map(String::as_str).collect();
        let report = |model| -> Result<VennReport> {
            let rho = run_chain(&truncated.clone().with_model(model))?.joint_with_q;
            Ok(venn(&rho, &labels)?)
        };
        stages.push(VennStage {
            stage: k,
            unitary: report(Model::Unitary)?,
            collapse: report(Model::Collapse)?,
        });
    }
    match ctx.format {
        Format::Json => write(ctx.out, "venn.json", &json(&stages)?),
        Format::Csv => {
            let mut rows = Vec::new();
            for s in &stages {
                for (model, r) in [("unitary", &s.unitary), ("collapse", &s.collapse)] {
                    for (region, &entropy) in &r.region_entropies {
                        let atom = r.regions.as_ref().and_then(|a| a.get(region).copied());
                        rows.push(VennRow { stage: s.stage, model, region, entropy, atom });
                    }
                }
            }
            write(ctx.out, "venn.csv", &csv_body(&rows)?)
        }
    }
}

fn sweep_spec(ctx: &RunContext, args: &SweepArgs) -> Result<SweepSpec> {
    if let Some(p) = ctx.config {
        let spec: SweepSpec = serde_json::from_str(&read_config(p)?).map_err(seqmeas_core::Error::from)?;
        spec.validate()?;
        return Ok(spec);
    }
    if !(args.noise.is_finite() && args.noise >= 0.0) {
        return Err(Invalid(format!("--noise must be a nonnegative number, got {}", args.noise)).into());
    }
    let base = NoiseParams::default().scaled(args.noise);
    let noise = NoiseParams {
        background: args.background.unwrap_or(base.background),
        shot_scale: args.shot.unwrap_or(base.shot_scale),
    };
    let curves = if args.both {
        vec![Compensation::FULL, Compensation::without(2)?]
    } else if args.no_compensation_2 {
        vec![Compensation::without(2)?]
    } else {
        vec![Compensation::FULL]
    };
    let spec = SweepSpec {
        xi_start_deg: args.xi_start,
        xi_end_deg: args.xi_end,
        xi_step_deg: args.xi_step,
        replicates: if args.tabulated_replicates {
            ReplicatePolicy::Tabulated
        } else {
            ReplicatePolicy::Fixed(args.replicates)
        },
        noise,
        curves,
        estimator: match args.estimator {
            EstimatorArg::Cross => PurityEstimator::Cross,
            EstimatorArg::Raw => PurityEstimator::Raw,
            EstimatorArg::Projected => PurityEstimator::Projected,
        },
    };
    spec.validate()?;
    Ok(spec)
}

fn execute(
    ctx: &RunContext,
    args: &SweepArgs,
    plan: &AxisPlan,
    geometry: &PathGeometry,
) -> Result<(SweepSpec, SweepOutcome)> {
    let spec = sweep_spec(ctx, args)?;
    let execution = if args.sequential { Execution::Sequential } else { Execution::Parallel };
    log::info!(
        "{} angles x {} curve(s), {} axis settings",
        spec.grid().len(),
        spec.curves.len(),
        plan.configs.len()
    );
    let outcome = run_sweep(&spec, geometry, plan, ctx.seed, execution)?;
    Ok((spec, outcome))
}

fn write_curve(ctx: &RunContext, stem: &str, outcome: &SweepOutcome) -> Result<()> {
    match ctx.format {
        Format::Csv => write(ctx.out, &format!("{stem}.csv"), &rows_to_csv(&outcome.rows)?),
        Format::Json => write(ctx.out, &format!("{stem}.json"), &json(&outcome.rows)?),
    }
}

pub fn sweep(ctx: &RunContext, args: &SweepArgs) -> Result<()> {
    let geometry = PathGeometry::standard();
    let plan = AxisPlan::auto(&geometry)?;
    let (_, outcome) = execute(ctx, args, &plan, &geometry)?;
    write_curve(ctx, "sweep", &outcome)
}

#[derive(Serialize)]
struct ReconstructOutput<'a> {
    seed: u64,
    spec: &'a SweepSpec,
    plan: &'a AxisPlan,
    points: &'a [seqmeas_core::experiment::PointResult],
}

pub fn reconstruct(ctx: &RunContext, args: &ReconstructArgs) -> Result<()> {
    let geometry = PathGeometry::standard();
    let plan = match args.plan.as_str() {
        "auto" => AxisPlan::auto(&geometry)?,
        "minimal" => AxisPlan::minimal(&geometry)?,
        path => AxisPlan::from_json(&read_config(Path::new(path))?)?,
    };
    let (spec, outcome) = execute(ctx, &args.sweep, &plan, &geometry)?;
    let worst = outcome.points.iter().map(|p| p.max_element_error).fold(0.0, f64::max);
    log::info!("largest element error of a replicate mean: {worst:.3e}");
    let out = ReconstructOutput { seed: ctx.seed, spec: &spec, plan: &plan, points: &outcome.points };
    write(ctx.out, "reconstruct.json", &json(&out)?)?;
    write_curve(ctx, "purity", &outcome)
}
