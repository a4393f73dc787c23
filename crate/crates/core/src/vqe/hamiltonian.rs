//! Second-quantized operators over interleaved spin orbitals (qubit `2p + σ`).

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{apply_product, Ladder, MAX_QUBITS};
use crate::linalg::sorted_symmetric_eigen;
use crate::sparse::SparseMat;

use super::integrals::MolecularIntegrals;

/// Largest sector handled by the dense eigensolver.
pub const MAX_SECTOR_DIM: usize = 6000;

pub fn qubit(p: usize, beta: bool) -> usize {
    2 * p + usize::from(beta)
}

fn check_spatial(n_spatial: usize) -> Result<usize> {
    let n = 2 * n_spatial;
    if n_spatial == 0 || n > MAX_QUBITS {
        return Err(Error::invalid(format!("{n_spatial} spatial orbitals exceed the {MAX_QUBITS}-qubit limit")));
    }
    Ok(n)
}

/// Builds `Σ coef · product` with states processed in parallel.
fn build_parallel(n_qubits: usize, terms: &[(f64, Vec<Ladder>)], diag: impl Fn(u64) -> f64 + Sync) -> SparseMat {
    let dim = 1usize << n_qubits;
    let trips: Vec<(usize, usize, f64)> = (0..dim as u64)
        .into_par_iter()
        .flat_map_iter(|s| {
            let mut local = Vec::new();
            let d = diag(s);
            if d != 0.0 {
                local.push((s as usize, s as usize, d));
            }
            for (coef, ops) in terms {
                if let Some((t, sign)) = apply_product(s, ops) {
                    local.push((t as usize, s as usize, coef * sign));
                }
            }
            local
        })
        .collect();
    SparseMat::from_triplets(dim, trips)
}

/// Qubit Hamiltonian `E_core + Σ h_pq a†a + ½ Σ (pq|rs) a†_pσ a†_rτ a_sτ a_qσ`.
pub fn build_hamiltonian(ints: &MolecularIntegrals) -> Result<SparseMat> {
    ints.validate()?;
    let n = ints.n_spatial;
    let nq = check_spatial(n)?;
    let mut terms = Vec::new();
    for p in 0..n {
        for q in 0..n {
            let v = ints.h[(p, q)];
            if v == 0.0 {
                continue;
            }
            for beta in [false, true] {
                terms.push((v, vec![Ladder::create(qubit(p, beta)), Ladder::annihilate(qubit(q, beta))]));
            }
        }
    }
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    let v = ints.g(p, q, r, s);
                    if v == 0.0 {
                        continue;
                    }
                    for sig in [false, true] {
                        for tau in [false, true] {
                            let (ps, qs, rt, st) = (qubit(p, sig), qubit(q, sig), qubit(r, tau), qubit(s, tau));
                            if ps == rt || qs == st {
                                continue;
                            }
                            terms.push((
                                0.5 * v,
                                vec![Ladder::create(ps), Ladder::create(rt), Ladder::annihilate(st), Ladder::annihilate(qs)],
                            ));
                        }
                    }
                }
            }
        }
    }
    let e = ints.e_core;
    Ok(build_parallel(nq, &terms, |_| e))
}

/// Total electron number operator.
pub fn number_operator(n_spatial: usize) -> Result<SparseMat> {
    let nq = check_spatial(n_spatial)?;
    Ok(build_parallel(nq, &[], |s| s.count_ones() as f64))
}

/// Twice the spin projection of a basis state.
pub fn ms2_of(state: u64) -> i32 {
    let alpha = (state & 0x5555_5555_5555_5555).count_ones() as i32;
    let beta = (state & 0xAAAA_AAAA_AAAA_AAAA).count_ones() as i32;
    alpha - beta
}

pub fn sz_operator(n_spatial: usize) -> Result<SparseMat> {
    let nq = check_spatial(n_spatial)?;
    Ok(build_parallel(nq, &[], |s| 0.5 * ms2_of(s) as f64))
}

/// Total spin `S² = S₋S₊ + S_z(S_z + 1)`.
pub fn s2_operator(n_spatial: usize) -> Result<SparseMat> {
    let nq = check_spatial(n_spatial)?;
    let mut terms = Vec::new();
    for p in 0..n_spatial {
        for q in 0..n_spatial {
            terms.push((
                1.0,
                vec![
                    Ladder::create(qubit(p, true)),
                    Ladder::annihilate(qubit(p, false)),
                    Ladder::create(qubit(q, false)),
                    Ladder::annihilate(qubit(q, true)),
                ],
            ));
        }
    }
    Ok(build_parallel(nq, &terms, |s| {
        let sz = 0.5 * ms2_of(s) as f64;
        sz * (sz + 1.0)
    }))
}

/// Particle-number and spin sector; `spin2` optionally fixes `2S`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sector {
    pub n_electrons: usize,
    pub ms2: i32,
    pub spin2: Option<u32>,
}

impl Sector {
    pub fn contains(&self, state: u64) -> bool {
        state.count_ones() as usize == self.n_electrons && ms2_of(state) == self.ms2
    }

    /// Basis states with the sector's electron count and spin projection.
    pub fn states(&self, n_spatial: usize) -> Vec<usize> {
        (0..1usize << (2 * n_spatial)).filter(|&s| self.contains(s as u64)).collect()
    }
}

/// `S(S+1)` for `2S`.
pub fn spin_eigenvalue(spin2: u32) -> f64 {
    let s = spin2 as f64 / 2.0;
    s * (s + 1.0)
}

fn restrict(m: &SparseMat, states: &[usize]) -> DMatrix<f64> {
    let mut pos = vec![usize::MAX; m.dim()];
    for (k, &s) in states.iter().enumerate() {
        pos[s] = k;
    }
    let mut out = DMatrix::zeros(states.len(), states.len());
    for (k, &s) in states.iter().enumerate() {
        for (c, v) in m.row(s) {
            if pos[c] != usize::MAX {
                out[(k, pos[c])] = v;
            }
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct GroundState {
    pub energy: f64,
    /// Ground vector over the full Fock space.
    pub vector: DVector<f64>,
}

/// Lowest eigenpair of `h` restricted to a sector.
pub fn exact_ground(h: &SparseMat, n_spatial: usize, sector: Sector) -> Result<GroundState> {
    check_spatial(n_spatial)?;
    if h.dim() != 1 << (2 * n_spatial) {
        return Err(Error::invalid("Hamiltonian dimension does not match orbital count"));
    }
    let states = sector.states(n_spatial);
    if states.is_empty() {
        return Err(Error::invalid(format!("sector {sector:?} is empty")));
    }
    if states.len() > MAX_SECTOR_DIM {
        return Err(Error::invalid(format!("sector dimension {} exceeds {MAX_SECTOR_DIM}", states.len())));
    }
    let hs = restrict(h, &states);
    let (energy, local) = match sector.spin2 {
        None => {
            let (vals, vecs) = sorted_symmetric_eigen(&hs);
            (vals[0], vecs.column(0).into_owned())
        }
        Some(spin2) => {
            let s2 = restrict(&s2_operator(n_spatial)?, &states);
            let (svals, svecs) = sorted_symmetric_eigen(&s2);
            let target = spin_eigenvalue(spin2);
            let cols: Vec<usize> = (0..svals.len()).filter(|&k| (svals[k] - target).abs() < 1e-6).collect();
            if cols.is_empty() {
                return Err(Error::invalid(format!("sector {sector:?} is empty")));
            }
            let v = svecs.select_columns(&cols);
            let hp = v.transpose() * &hs * &v;
            let hp = (&hp + hp.transpose()) * 0.5;
            let (vals, vecs) = sorted_symmetric_eigen(&hp);
            (vals[0], &v * vecs.column(0))
        }
    };
    let mut vector = DVector::zeros(h.dim());
    for (k, &s) in states.iter().enumerate() {
        vector[s] = local[k];
    }
    Ok(GroundState { energy, vector })
}

/// `⟨ψ|M|ψ⟩` for a real state.
pub fn expectation(m: &SparseMat, psi: &[f64]) -> f64 {
    m.matvec(psi).iter().zip(psi).map(|(a, b)| a * b).sum()
}
