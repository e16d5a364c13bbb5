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

//! Entropy bookkeeping for information diagrams.
//!
//! All entropies are von Neumann entropies in bits. Conditional entropies can
//! be negative; a negative `S(A|B)` certifies entanglement between `A` and `B`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::DensityMatrix;

/// Label treated as the measured system when building a [`VennReport`].
pub const SYSTEM_LABEL: &str = "Q";

/// Joint entropy of a subset of subsystems; the empty set has entropy 0.
pub fn subset_entropy(rho: &DensityMatrix, subset: &[usize]) -> Result<f64> {
    if subset.is_empty() {
        return Ok(0.0);
    }
    Ok(rho.partial_trace(subset)?.von_neumann_entropy())
}

fn union(a: &[usize], b: &[usize]) -> Result<Vec<usize>> {
    if a.iter().any(|x| b.contains(x)) {
        return Err(Error::Overlap);
    }
    let mut u: Vec<usize> = a.iter().chain(b).copied().collect();
    u.sort_unstable();
    Ok(u)
}

/// `S(target ∪ given) - S(given)`.
pub fn conditional_entropy(rho: &DensityMatrix, target: &[usize], given: &[usize]) -> Result<f64> {
    if target.is_empty() {
        return Err(Error::EmptySelection);
    }
    let joint = union(target, given)?;
    Ok(subset_entropy(rho, &joint)? - subset_entropy(rho, given)?)
}

/// `S(A) + S(B) - S(AB)`.
pub fn mutual_information(rho: &DensityMatrix, a: &[usize], b: &[usize]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySelection);
    }
    let joint = union(a, b)?;
    Ok(subset_entropy(rho, a)? + subset_entropy(rho, b)? - subset_entropy(rho, &joint)?)
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MutualInfo {
    /// `I(A:B)` for every pair, keyed `"A,B"` with labels sorted.
    pub pairwise: BTreeMap<String, f64>,
    /// `I(Q : everything else)` when a `Q` label is present.
    pub total: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct VennReport {
    pub partition: Vec<String>,
    /// Joint entropy of every nonempty subset, keyed by its sorted labels.
    pub region_entropies: BTreeMap<String, f64>,
    /// `S(Q | everything else)` when a `Q` label is present.
    pub conditional: Option<f64>,
    pub mutual: MutualInfo,
    /// Diagram atoms (inclusion–exclusion), only for up to three sets. Key
    /// lists the sets the atom lies inside, e.g. `"M1,Q"` is `I(Q:M1|rest)`.
    pub regions: Option<BTreeMap<String, f64>>,
}

fn key(labels: &[String], members: &[usize]) -> String {
    let mut names: Vec<&str> = members.iter().map(|&i| labels[i].as_str()).collect();
    names.sort_unstable();
    names.join(",")
}

fn members_of(mask: usize, n: usize) -> Vec<usize> {
    (0..n).filter(|i| mask >> i & 1 == 1).collect()
}

/// Entropy diagram for a state whose subsystems are named by `labels`.
pub fn venn(rho: &DensityMatrix, labels: &[&str]) -> Result<VennReport> {
    let n = rho.num_subsystems();
    if labels.len() != n {
        return Err(Error::InvalidParameter(format!("{} labels for {n} subsystems", labels.len())));
    }
    let labels: Vec<String> = labels.iter().map(|s| s.to_string()).collect();
    let mut sorted = labels.clone();
    sorted.sort();
    sorted.dedup();
    if sorted.len() != n {
        return Err(Error::InvalidParameter("labels must be distinct".into()));
    }

    let full = (1usize << n) - 1;
    let mut by_mask = vec![0.0; full + 1];
    let mut region_entropies = BTreeMap::new();
    for (mask, slot) in by_mask.iter_mut().enumerate().skip(1) {
        let members = members_of(mask, n);
        *slot = subset_entropy(rho, &members)?;
        region_entropies.insert(key(&labels, &members), *slot);
    }

    let mut pairwise = BTreeMap::new();
    for a in 0..n {
        for b in a + 1..n {
            let mi = by_mask[1 << a] + by_mask[1 << b] - by_mask[(1 << a) | (1 << b)];
            pairwise.insert(key(&labels, &[a, b]), mi);
        }
    }

    let q = labels.iter().position(|l| l == SYSTEM_LABEL);
    let (conditional, total) = match q {
        Some(q) if n > 1 => {
            let rest = full & !(1 << q);
            (Some(by_mask[full] - by_mask[rest]), Some(by_mask[1 << q] + by_mask[rest] - by_mask[full]))
        }
        _ => (None, None),
    };

    let regions = (n <= 3).then(|| {
        let mut atoms = BTreeMap::new();
        for inside in 1..=full {
            let outside = full & !inside;
            // sum over W ⊆ inside of (-1)^(|W|+1) S(W ∪ outside)
            let mut value = 0.0;
            let mut w = inside;
            loop {
                let sign = if (w.count_ones() + 1) % 2 == 0 { 1.0 } else { -1.0 };
                value += sign * by_mask[w | outside];
                if w == 0 {
                    break;
                }
                w = (w - 1) & inside;
            }
            atoms.insert(key(&labels, &members_of(inside, n)), value);
        }
        atoms
    });

    Ok(VennReport {
        partition: labels,
        region_entropies,
        conditional,
        mutual: MutualInfo { pairwise, total },
        regions,
    })
}
