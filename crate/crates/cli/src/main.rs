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

mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use commands::RunContext;

/// A bad flag or config value detected by the CLI itself.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct Invalid(pub String);

/// 2 for bad input, 1 for anything else.
fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<Invalid>() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<seqmeas_core::Error>() {
            return if e.is_validation() { 2 } else { 1 };
        }
        if cause.is::<serde_json::Error>() {
            return 2;
        }
    }
    1
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    let seed = cli.seed.unwrap_or_else(|| {
        let s = rand::random();
        log::info!("no --seed given, using {s}");
        s
    });
    std::fs::create_dir_all(&cli.out)?;
    let ctx = RunContext { seed, out: &cli.out, format: cli.format, config: cli.config.as_deref() };
    match &cli.command {
        Command::Matrix(a) => commands::matrix(&ctx, a),
        Command::Sweep(a) => commands::sweep(&ctx, a),
        Command::Venn(a) => commands::venn_cmd(&ctx, a),
        Command::Reconstruct(a) => commands::reconstruct(&ctx, a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
