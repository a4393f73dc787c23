//! Operator pools: spin-orbital singles/doubles, spin-adapted, and pair excitations.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::Family;
use crate::fock::{double_rotation, single_rotation, Label, Spin, SpinOrbital};
use crate::sparse::SparseMat;

use super::hamiltonian::qubit;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PoolKind {
    Sd,
    Sa,
    Pair,
}

impl fmt::Display for PoolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PoolKind::Sd => "sd",
            PoolKind::Sa => "sa",
            PoolKind::Pair => "pair",
        })
    }
}

impl FromStr for PoolKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sd" => Ok(PoolKind::Sd),
            "sa" => Ok(PoolKind::Sa),
            "pair" => Ok(PoolKind::Pair),
            other => Err(Error::invalid(format!("unknown pool '{other}' (expected sd, sa or pair)"))),
        }
    }
}

/// Spatial orbitals that excitations may leave and enter.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitalSpace {
    pub occupied: Vec<usize>,
    #[serde(rename = "virtual")]
    pub virtuals: Vec<usize>,
}

impl OrbitalSpace {
    /// Lowest `n_electrons / 2` orbitals occupied, the rest virtual.
    pub fn closed_shell(n_spatial: usize, n_electrons: usize) -> Self {
        let k = n_electrons.div_ceil(2).min(n_spatial);
        OrbitalSpace { occupied: (0..k).collect(), virtuals: (n_electrons / 2..n_spatial).collect() }
    }

    fn validate(&self, n_spatial: usize) -> Result<()> {
        if let Some(p) = self.occupied.iter().chain(&self.virtuals).find(|&&p| p >= n_spatial) {
            return Err(Error::invalid(format!("orbital {p} out of range for {n_spatial} orbitals")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct PoolElement {
    pub label: String,
    pub matrix: SparseMat,
}

#[derive(Debug, Clone)]
pub struct OperatorPool {
    pub kind: PoolKind,
    pub n_spatial: usize,
    pub space: OrbitalSpace,
    pub elements: Vec<PoolElement>,
}

impl OperatorPool {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

fn so_name(q: usize) -> String {
    format!("{}{}", q / 2, if q.is_multiple_of(2) { 'a' } else { 'b' })
}

fn spin_of(q: usize) -> i32 {
    if q.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Symmetrized rotation of a family with labels mapped onto spatial orbitals.
fn family_rotation(family: Family, n_spatial: usize, map: impl Fn(Label) -> usize) -> Result<SparseMat> {
    let nq = 2 * n_spatial;
    let q = |so: SpinOrbital| qubit(map(so.label), so.spin == Spin::Beta);
    let (specs, coeffs) = family.symmetrized();
    let mut out = SparseMat::zeros(1 << nq);
    for (spec, c) in specs.iter().zip(coeffs) {
        let g = double_rotation(nq, (q(spec.lower.0), q(spec.lower.1)), (q(spec.upper.0), q(spec.upper.1)))?;
        out = out.add_scaled(c, &g);
    }
    Ok(out)
}

fn sa_single(n_spatial: usize, i: usize, a: usize) -> Result<SparseMat> {
    let nq = 2 * n_spatial;
    let ga = single_rotation(nq, qubit(i, false), qubit(a, false))?;
    let gb = single_rotation(nq, qubit(i, true), qubit(a, true))?;
    Ok(ga.add(&gb))
}

fn pair_double(n_spatial: usize, i: usize, a: usize) -> Result<SparseMat> {
    double_rotation(2 * n_spatial, (qubit(i, false), qubit(i, true)), (qubit(a, false), qubit(a, true)))
}

fn unordered(x: usize, y: usize) -> (usize, usize) {
    (x.min(y), x.max(y))
}

/// Distinct spatial single excitations `i -> a`.
fn single_pairs(space: &OrbitalSpace) -> Vec<(usize, usize)> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for &i in &space.occupied {
        for &a in &space.virtuals {
            if i != a && seen.insert(unordered(i, a)) {
                out.push((i, a));
            }
        }
    }
    out
}

/// Distinct spatial double excitations `i ≤ j -> a ≤ b` with disjoint index sets.
fn double_quads(space: &OrbitalSpace) -> Vec<(usize, usize, usize, usize)> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let occ: BTreeSet<usize> = space.occupied.iter().copied().collect();
    let virt: BTreeSet<usize> = space.virtuals.iter().copied().collect();
    for &i in &occ {
        for &j in occ.range(i..) {
            for &a in &virt {
                for &b in virt.range(a..) {
                    if [a, b].iter().any(|x| *x == i || *x == j) {
                        continue;
                    }
                    let key = if (i, j) <= (a, b) { (i, j, a, b) } else { (a, b, i, j) };
                    if seen.insert(key) {
                        out.push((i, j, a, b));
                    }
                }
            }
        }
    }
    out
}

/// Builds the pool of anti-Hermitian generators for a reference orbital space.
pub fn build_pool(kind: PoolKind, n_spatial: usize, space: &OrbitalSpace) -> Result<OperatorPool> {
    if n_spatial < 2 {
        return Err(Error::invalid("pools need at least 2 spatial orbitals"));
    }
    if 2 * n_spatial > crate::fock::MAX_QUBITS {
        return Err(Error::invalid(format!("{n_spatial} spatial orbitals exceed the qubit limit")));
    }
    space.validate(n_spatial)?;
    let nq = 2 * n_spatial;
    let mut elements = Vec::new();
    let mut push = |label: String, matrix: SparseMat| elements.push(PoolElement { label, matrix });
    match kind {
        PoolKind::Sd => {
            let occ: BTreeSet<usize> =
                space.occupied.iter().flat_map(|&p| [qubit(p, false), qubit(p, true)]).collect();
            let virt: BTreeSet<usize> =
                space.virtuals.iter().flat_map(|&p| [qubit(p, false), qubit(p, true)]).collect();
            let mut seen = BTreeSet::new();
            for &p in &occ {
                for &r in &virt {
                    if p != r && p % 2 == r % 2 && seen.insert(unordered(p, r)) {
                        push(format!("G({}->{})", so_name(p), so_name(r)), single_rotation(nq, p, r)?);
                    }
                }
            }
            let mut seen = BTreeSet::new();
            for &p in &occ {
                for &q in occ.range(p + 1..) {
                    for &r in &virt {
                        for &s in virt.range(r + 1..) {
                            if [r, s].iter().any(|x| *x == p || *x == q) {
                                continue;
                            }
                            if spin_of(p) + spin_of(q) != spin_of(r) + spin_of(s) {
                                continue;
                            }
                            let key = if (p, q) <= (r, s) { (p, q, r, s) } else { (r, s, p, q) };
                            if seen.insert(key) {
                                push(
                                    format!("G({},{}->{},{})", so_name(p), so_name(q), so_name(r), so_name(s)),
                                    double_rotation(nq, (p, q), (r, s))?,
                                );
                            }
                        }
                    }
                }
            }
        }
        PoolKind::Sa | PoolKind::Pair => {
            for (i, a) in single_pairs(space) {
                push(format!("single({i}->{a})"), sa_single(n_spatial, i, a)?);
            }
            for (i, j, a, b) in double_quads(space) {
                let map = |l: Label| match l {
                    Label::I => i,
                    Label::J => j,
                    Label::A => a,
                    Label::B => b,
                };
                match (i == j, a == b) {
                    (true, true) => push(format!("pair({i}{i}->{a}{a})"), pair_double(n_spatial, i, a)?),
                    _ if kind == PoolKind::Pair => {}
                    (true, false) => push(format!("iiab({i}{i}->{a}{b})"), family_rotation(Family::S2Iiab, n_spatial, map)?),
                    (false, true) => push(format!("ijaa({i}{j}->{a}{a})"), family_rotation(Family::S2Ijaa, n_spatial, map)?),
                    (false, false) => {
                        push(format!("singlet({i}{j}->{a}{b})"), family_rotation(Family::S4Singlet, n_spatial, map)?);
                        push(format!("triplet({i}{j}->{a}{b})"), family_rotation(Family::S4Triplet, n_spatial, map)?);
                    }
                }
            }
        }
    }
    Ok(OperatorPool { kind, n_spatial, space: space.clone(), elements })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vqe::hamiltonian::{number_operator, s2_operator, sz_operator};

    #[test]
    fn sd_two_orbitals_by_hand() {
        let pool = build_pool(PoolKind::Sd, 2, &OrbitalSpace::closed_shell(2, 2)).unwrap();
        let labels: Vec<_> = pool.elements.iter().map(|e| e.label.as_str()).collect();
        assert_eq!(labels, ["G(0a->1a)", "G(0b->1b)", "G(0a,0b->1a,1b)"]);
    }

    #[test]
    fn sd_count_matches_enumeration() {
        // Two occupied and two virtual spatial orbitals: 4 singles; doubles are
        // αα 1, ββ 1 and αβ 2·2 = 4 (both pair choices times both target pairs).
        let pool = build_pool(PoolKind::Sd, 4, &OrbitalSpace::closed_shell(4, 4)).unwrap();
        let (o, v) = (2usize, 2usize);
        let singles = 2 * o * v;
        let same = 2 * (o * (o - 1) / 2) * (v * (v - 1) / 2);
        let mixed = (o * o) * (v * v);
        assert_eq!(pool.len(), singles + same + mixed);
    }

    #[test]
    fn pair_pool_size() {
        for (n, ne) in [(3, 2), (4, 4), (5, 4)] {
            let space = OrbitalSpace::closed_shell(n, ne);
            let pool = build_pool(PoolKind::Pair, n, &space).unwrap();
            let k = space.occupied.len() * space.virtuals.len();
            assert_eq!(pool.len(), 2 * k);
        }
    }

    #[test]
    fn sa_and_pair_commute_with_total_spin() {
        let n = 4;
        let s2 = s2_operator(n).unwrap();
        let sz = sz_operator(n).unwrap();
        let num = number_operator(n).unwrap();
        for kind in [PoolKind::Sa, PoolKind::Pair, PoolKind::Sd] {
            let pool = build_pool(kind, n, &OrbitalSpace::closed_shell(n, 4)).unwrap();
            for el in &pool.elements {
                assert!(el.matrix.is_antisymmetric(1e-14), "{}", el.label);
                assert!(el.matrix.commutator(&num).max_abs() < 1e-10, "{}", el.label);
                assert!(el.matrix.commutator(&sz).max_abs() < 1e-10, "{}", el.label);
                if kind != PoolKind::Sd {
                    assert!(el.matrix.commutator(&s2).max_abs() < 1e-10, "{}", el.label);
                }
            }
        }
    }

    #[test]
    fn sd_pool_breaks_total_spin() {
        let n = 3;
        let s2 = s2_operator(n).unwrap();
        let pool = build_pool(PoolKind::Sd, n, &OrbitalSpace::closed_shell(n, 2)).unwrap();
        assert!(pool.elements.iter().any(|e| e.matrix.commutator(&s2).max_abs() > 0.1));
    }
}
