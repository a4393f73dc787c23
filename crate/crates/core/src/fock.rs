//! Jordan-Wigner Fock-space representation on bit-string basis states.
//!
//! Qubit `q` is bit `q` of the basis index. Spin orbitals are laid out in the
//! order (i.a, i.b, j.a, j.b, a.a, a.b, b.a, b.b) restricted to the labels
//! present in a given [`OrbitalSet`].

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sparse::SparseMat;

pub const MAX_QUBITS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Label {
    I,
    J,
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Spin {
    Alpha,
    Beta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SpinOrbital {
    pub label: Label,
    pub spin: Spin,
}

impl SpinOrbital {
    pub const fn new(label: Label, spin: Spin) -> Self {
        SpinOrbital { label, spin }
    }

    pub fn flipped(self) -> Self {
        let spin = match self.spin {
            Spin::Alpha => Spin::Beta,
            Spin::Beta => Spin::Alpha,
        };
        SpinOrbital { spin, ..self }
    }
}

impl Label {
    pub fn as_char(self) -> char {
        match self {
            Label::I => 'i',
            Label::J => 'j',
            Label::A => 'a',
            Label::B => 'b',
        }
    }

    pub fn from_char(c: char) -> Option<Label> {
        match c {
            'i' => Some(Label::I),
            'j' => Some(Label::J),
            'a' => Some(Label::A),
            'b' => Some(Label::B),
            _ => None,
        }
    }
}

impl fmt::Display for SpinOrbital {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.spin {
            Spin::Alpha => 'a',
            Spin::Beta => 'b',
        };
        write!(f, "{}.{}", self.label.as_char(), s)
    }
}

/// The ordered set of spin orbitals that defines the qubit layout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitalSet {
    orbitals: Vec<SpinOrbital>,
}

impl OrbitalSet {
    pub fn new(labels: &[Label]) -> Self {
        let mut labels = labels.to_vec();
        labels.sort();
        labels.dedup();
        let orbitals = labels
            .into_iter()
            .flat_map(|l| [SpinOrbital::new(l, Spin::Alpha), SpinOrbital::new(l, Spin::Beta)])
            .collect();
        OrbitalSet { orbitals }
    }

    pub fn n_qubits(&self) -> usize {
        self.orbitals.len()
    }

    pub fn dim(&self) -> usize {
        1 << self.orbitals.len()
    }

    pub fn orbitals(&self) -> &[SpinOrbital] {
        &self.orbitals
    }

    pub fn qubit(&self, so: SpinOrbital) -> Result<usize> {
        self.orbitals
            .iter()
            .position(|&o| o == so)
            .ok_or_else(|| Error::invalid(format!("spin orbital {so} is not part of this orbital set")))
    }
}

/// A ladder operator on qubit `q`: creation if `dagger`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ladder {
    pub q: usize,
    pub dagger: bool,
}

impl Ladder {
    pub fn create(q: usize) -> Self {
        Ladder { q, dagger: true }
    }

    pub fn annihilate(q: usize) -> Self {
        Ladder { q, dagger: false }
    }
}

/// Applies one ladder operator to a basis state; `None` if it annihilates it.
pub fn apply_ladder(state: u64, op: Ladder) -> Option<(u64, f64)> {
    let bit = 1u64 << op.q;
    let occupied = state & bit != 0;
    if occupied == op.dagger {
        return None;
    }
    let parity = (state & (bit - 1)).count_ones();
    let sign = if parity.is_multiple_of(2) { 1.0 } else { -1.0 };
    Some((state ^ bit, sign))
}

/// Applies a product of ladder operators, rightmost first.
pub fn apply_product(state: u64, ops: &[Ladder]) -> Option<(u64, f64)> {
    let mut s = state;
    let mut sign = 1.0;
    for &op in ops.iter().rev() {
        let (ns, sg) = apply_ladder(s, op)?;
        s = ns;
        sign *= sg;
    }
    Some((s, sign))
}

/// Sparse matrix of `Σ coef · product` over all basis states of `n` qubits.
pub fn operator_from_products(n: usize, terms: &[(f64, Vec<Ladder>)]) -> Result<SparseMat> {
    check_qubits(n)?;
    for (_, ops) in terms {
        if let Some(op) = ops.iter().find(|o| o.q >= n) {
            return Err(Error::invalid(format!("qubit {} out of range for {} qubits", op.q, n)));
        }
    }
    let dim = 1usize << n;
    let mut trips = Vec::new();
    for s in 0..dim as u64 {
        for (coef, ops) in terms {
            if let Some((t, sign)) = apply_product(s, ops) {
                trips.push((t as usize, s as usize, coef * sign));
            }
        }
    }
    Ok(SparseMat::from_triplets(dim, trips))
}

fn check_qubits(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::invalid(format!("qubit count {n} outside 1..={MAX_QUBITS}")));
    }
    Ok(())
}

pub fn jw_ladder(q: usize, n: usize, dagger: bool) -> Result<SparseMat> {
    operator_from_products(n, &[(1.0, vec![Ladder { q, dagger }])])
}

pub fn number_op(q: usize, n: usize) -> Result<SparseMat> {
    check_qubits(n)?;
    if q >= n {
        return Err(Error::invalid(format!("qubit {q} out of range for {n} qubits")));
    }
    let dim = 1usize << n;
    let trips = (0..dim).filter(|s| s >> q & 1 == 1).map(|s| (s, s, 1.0)).collect();
    Ok(SparseMat::from_triplets(dim, trips))
}

/// Ladder products of the double rotation `a†u1 a†u2 a_l2 a_l1 - h.c.`
pub fn double_rotation_terms(lower: (usize, usize), upper: (usize, usize)) -> Vec<(f64, Vec<Ladder>)> {
    let (l1, l2) = lower;
    let (u1, u2) = upper;
    vec![
        (1.0, vec![Ladder::create(u1), Ladder::create(u2), Ladder::annihilate(l2), Ladder::annihilate(l1)]),
        (-1.0, vec![Ladder::create(l1), Ladder::create(l2), Ladder::annihilate(u2), Ladder::annihilate(u1)]),
    ]
}

/// Ladder products of the single rotation `a†u a_l - h.c.`
pub fn single_rotation_terms(lower: usize, upper: usize) -> Vec<(f64, Vec<Ladder>)> {
    vec![
        (1.0, vec![Ladder::create(upper), Ladder::annihilate(lower)]),
        (-1.0, vec![Ladder::create(lower), Ladder::annihilate(upper)]),
    ]
}

/// Elementary double rotation on qubits; all four indices must be distinct.
pub fn double_rotation(n: usize, lower: (usize, usize), upper: (usize, usize)) -> Result<SparseMat> {
    let idx = [lower.0, lower.1, upper.0, upper.1];
    for a in 0..4 {
        for b in a + 1..4 {
            if idx[a] == idx[b] {
                return Err(Error::invalid(format!("repeated qubit {} in double rotation", idx[a])));
            }
        }
    }
    operator_from_products(n, &double_rotation_terms(lower, upper))
}

pub fn single_rotation(n: usize, lower: usize, upper: usize) -> Result<SparseMat> {
    if lower == upper {
        return Err(Error::invalid("single rotation needs distinct qubits"));
    }
    operator_from_products(n, &single_rotation_terms(lower, upper))
}

/// Elementary generator `G(lower -> upper)` over spin orbitals.
pub fn build_g(set: &OrbitalSet, lower: (SpinOrbital, SpinOrbital), upper: (SpinOrbital, SpinOrbital)) -> Result<SparseMat> {
    let l = (set.qubit(lower.0)?, set.qubit(lower.1)?);
    let u = (set.qubit(upper.0)?, set.qubit(upper.1)?);
    double_rotation(set.n_qubits(), l, u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn ladder_matches_kron_construction() {
        // Independent oracle: a_q = Z ⊗ ... ⊗ Z ⊗ σ⁻ ⊗ I ..., with qubit 0 as
        // the least significant tensor factor.
        use nalgebra::DMatrix;
        let n = 3;
        let z = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        let id = DMatrix::<f64>::identity(2, 2);
        let lower = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        for q in 0..n {
            let mut m = DMatrix::<f64>::identity(1, 1);
            for k in (0..n).rev() {
                let f = if k < q { &z } else if k == q { &lower } else { &id };
                m = m.kronecker(f);
            }
            let a = jw_ladder(q, n, false).unwrap().to_dense();
            assert!((a - m).amax() < 1e-15, "qubit {q}");
        }
    }

    #[test]
    fn canonical_anticommutators() {
        let n = 4;
        let dim = 1 << n;
        for p in 0..n {
            for q in 0..n {
                let ap = jw_ladder(p, n, false).unwrap();
                let aq_d = jw_ladder(q, n, true).unwrap();
                let ac = ap.matmul(&aq_d).add(&aq_d.matmul(&ap));
                let expect = if p == q { SparseMat::identity(dim) } else { SparseMat::zeros(dim) };
                assert!(ac.max_abs_diff(&expect) < 1e-15);
                let aq = jw_ladder(q, n, false).unwrap();
                assert!(ap.matmul(&aq).add(&aq.matmul(&ap)).is_zero());
            }
        }
    }

    #[test]
    fn number_is_adag_a() {
        for q in 0..3 {
            let n = number_op(q, 3).unwrap();
            let prod = jw_ladder(q, 3, true).unwrap().matmul(&jw_ladder(q, 3, false).unwrap());
            assert!(n.max_abs_diff(&prod) < 1e-15);
        }
    }

    #[test]
    fn rejects_bad_indices() {
        assert!(jw_ladder(3, 3, false).is_err());
        assert!(jw_ladder(0, 0, false).is_err());
        assert!(double_rotation(4, (0, 1), (1, 2)).is_err());
        let set = OrbitalSet::new(&[Label::I, Label::A]);
        let jb = SpinOrbital::new(Label::J, Spin::Beta);
        let ia = SpinOrbital::new(Label::I, Spin::Alpha);
        let ib = SpinOrbital::new(Label::I, Spin::Beta);
        let aa = SpinOrbital::new(Label::A, Spin::Alpha);
        assert!(build_g(&set, (ia, jb), (aa, ib)).is_err());
    }

    #[test]
    fn orbital_layout() {
        let set = OrbitalSet::new(&[Label::B, Label::I, Label::A]);
        let names: Vec<String> = set.orbitals().iter().map(|o| o.to_string()).collect();
        assert_eq!(names, ["i.a", "i.b", "a.a", "a.b", "b.a", "b.b"]);
    }

    proptest! {
        #[test]
        fn double_rotation_is_antisymmetric_with_cubic_identity(perm in Just([0usize,1,2,3,4,5]).prop_shuffle()) {
            let g = double_rotation(6, (perm[0], perm[1]), (perm[2], perm[3])).unwrap();
            prop_assert!(g.is_antisymmetric(0.0));
            let g3 = g.matmul(&g).matmul(&g);
            prop_assert!(g3.add(&g).max_abs() < 1e-14);
        }
    }
}
