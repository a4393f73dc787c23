//! Run configuration for adaptive VQE.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::adapt::{AdaptOptions, Problem, Reference};
use super::integrals::{parse_fcidump, synth_integrals};
use super::pool::{OrbitalSpace, PoolKind};

/// Resolved VQE run configuration, as read from `--config` and embedded in outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VqeConfig {
    pub pool: PoolKind,
    /// `"synthetic:n,seed"` or a path to an FCIDUMP file.
    pub source: String,
    pub reference: Option<Reference>,
    pub space: Option<OrbitalSpace>,
    pub grad_tol: f64,
    pub max_iters: usize,
    pub seed: u64,
}

impl Default for VqeConfig {
    fn default() -> Self {
        VqeConfig {
            pool: PoolKind::Sa,
            source: "synthetic:3,0".into(),
            reference: None,
            space: None,
            grad_tol: 1e-5,
            max_iters: 200,
            seed: 0,
        }
    }
}

impl VqeConfig {
    /// Loads the Hamiltonian source and applies the reference and orbital-space overrides.
    pub fn problem(&self) -> Result<Problem> {
        let ints = match self.source.strip_prefix("synthetic:") {
            Some(spec) => {
                let (n, seed) = spec
                    .split_once(',')
                    .ok_or_else(|| Error::invalid(format!("synthetic source '{spec}' must be 'n,seed'")))?;
                let n: usize = n.trim().parse().map_err(|_| Error::invalid(format!("bad orbital count '{n}'")))?;
                let seed: u64 = seed.trim().parse().map_err(|_| Error::invalid(format!("bad seed '{seed}'")))?;
                synth_integrals(n, seed)?
            }
            None => {
                let text = std::fs::read_to_string(Path::new(&self.source))
                    .map_err(|e| Error::invalid(format!("cannot read {}: {e}", self.source)))?;
                parse_fcidump(&text)?
            }
        };
        let mut problem = Problem::closed_shell(&ints)?;
        if let Some(r) = &self.reference {
            problem.reference = r.clone();
        }
        if let Some(s) = &self.space {
            problem.space = s.clone();
        }
        Ok(problem)
    }

    pub fn adapt_options(&self) -> AdaptOptions {
        AdaptOptions { grad_tol: self.grad_tol, max_iters: self.max_iters, ..Default::default() }
    }
}
