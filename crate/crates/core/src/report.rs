//! Serializable summaries written by the command-line tools.

use serde::{Deserialize, Serialize};

use crate::dsl::format_generator;
use crate::error::Result;
use crate::family::Family;
use crate::lie::{format_multiset, LieAlgebraModel, Mode};

/// Values with magnitude below this are written as zero.
const CLEAN: f64 = 1e-12;

fn clean(v: f64) -> f64 {
    if v.abs() < CLEAN {
        0.0
    } else {
        v
    }
}

fn columns(m: &nalgebra::DMatrix<f64>) -> Vec<Vec<f64>> {
    m.column_iter().map(|c| c.iter().map(|&v| clean(v)).collect()).collect()
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct StructureEntry {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct IdealSummary {
    pub dimension: usize,
    /// 1-based basis positions lying entirely inside the ideal.
    pub members: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct AlgebraReport {
    pub family: Option<Family>,
    pub mode: String,
    pub dimension: usize,
    /// Generator text per basis element; discovery-mode elements have only a name.
    pub basis: Vec<String>,
    /// Nonzero `f_ijk` with `[e_i, e_j] = Σ_k f_ijk e_k`, 1-based, `i < j`.
    pub structure_constants: Vec<StructureEntry>,
    pub center_dimension: usize,
    pub center: Vec<Vec<f64>>,
    pub derived_dimension: usize,
    pub derived: Vec<Vec<f64>>,
    pub killing_max_eigenvalue: f64,
    pub ideal_multiset: String,
    pub ideals: Vec<IdealSummary>,
    pub seed: u64,
}

impl AlgebraReport {
    pub fn from_model(model: &LieAlgebraModel, seed: u64) -> Result<Self> {
        let basis = model
            .specs
            .iter()
            .zip(&model.names)
            .map(|(s, n)| match s {
                Some(spec) => format!("{n} = {}", format_generator(spec)),
                None => n.clone(),
            })
            .collect();
        let structure_constants = model
            .structure
            .sparse_entries(CLEAN)
            .into_iter()
            .map(|(i, j, k, value)| StructureEntry { i: i + 1, j: j + 1, k: k + 1, value })
            .collect();
        let center = model.center();
        let derived = model.derived();
        let partition = model.ideal_partition(seed)?;
        let mut ideals: Vec<IdealSummary> = partition
            .ideals
            .iter()
            .zip(&partition.members)
            .map(|(i, m)| IdealSummary { dimension: i.ncols(), members: m.iter().map(|k| k + 1).collect() })
            .collect();
        ideals.sort_by(|a, b| (a.dimension, &a.members).cmp(&(b.dimension, &b.members)));
        Ok(AlgebraReport {
            family: model.family,
            mode: match model.mode {
                Mode::Discovery => "discovery".into(),
                Mode::Appendix => "appendix".into(),
            },
            dimension: model.dim(),
            basis,
            structure_constants,
            center_dimension: center.ncols(),
            center: columns(&center),
            derived_dimension: derived.ncols(),
            derived: columns(&derived),
            killing_max_eigenvalue: partition.killing_max_eigenvalue,
            ideal_multiset: format_multiset(&partition.multiset()),
            ideals,
            seed,
        })
    }

    pub fn summary_line(&self) -> String {
        format!(
            "dim={} center={} derived={} ideals={}",
            self.dimension, self.center_dimension, self.derived_dimension, self.ideal_multiset
        )
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}
