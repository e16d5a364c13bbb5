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

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("subsystem index {index} out of range for {count} subsystems")]
    SubsystemIndex { index: usize, count: usize },

    #[error("empty subsystem selection")]
    EmptySelection,

    #[error("overlapping subsystem selections")]
    Overlap,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("path collision: {0}")]
    PathCollision(String),

    #[error("unknown path label `{0}`")]
    UnknownPath(String),

    #[error("sampling violates Nyquist: {0}")]
    Nyquist(String),

    #[error("no resolvable coherences: {0}")]
    Degenerate(String),

    #[error("incomplete axis plan: {0}")]
    IncompleteCoverage(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True when the error stems from caller-supplied input rather than from
    /// the environment.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Io(_))
    }
}
