//! Pauli-string decomposition under Jordan-Wigner and rotation schedules.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factor::{Factorization, Factorizer};
use crate::family::Family;
use crate::sparse::SparseMat;

/// Coefficients below this magnitude are dropped.
pub const PRUNE: f64 = 1e-12;

/// A Pauli string stored as X and Z bit masks; `Y` sets both bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliString {
    pub n: usize,
    pub x: u32,
    pub z: u32,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        PauliString { n, x: 0, z: 0 }
    }

    pub fn letter(&self, q: usize) -> char {
        match (self.x >> q & 1, self.z >> q & 1) {
            (0, 0) => 'I',
            (1, 0) => 'X',
            (1, 1) => 'Y',
            _ => 'Z',
        }
    }

    fn letter_rank(&self, q: usize) -> u8 {
        match self.letter(q) {
            'I' => 0,
            'Z' => 1,
            'X' => 2,
            _ => 3,
        }
    }

    pub fn weight(&self) -> usize {
        (self.x | self.z).count_ones() as usize
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()).is_multiple_of(2)
    }

    /// `P|r⟩ = phase · |r'⟩`.
    pub fn apply_basis(&self, r: usize) -> (usize, Complex64) {
        let ny = (self.x & self.z).count_ones();
        let sign = if (self.z as usize & r).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
        let phase = match ny % 4 {
            0 => Complex64::new(sign, 0.0),
            1 => Complex64::new(0.0, sign),
            2 => Complex64::new(-sign, 0.0),
            _ => Complex64::new(0.0, -sign),
        };
        (r ^ self.x as usize, phase)
    }

    pub fn parse(s: &str) -> Result<Self> {
        let n = s.chars().count();
        if n == 0 || n > 32 {
            return Err(Error::invalid(format!("Pauli string length {n} outside 1..=32")));
        }
        let mut p = PauliString::identity(n);
        for (q, c) in s.chars().enumerate() {
            match c {
                'I' => {}
                'X' => p.x |= 1 << q,
                'Y' => {
                    p.x |= 1 << q;
                    p.z |= 1 << q;
                }
                'Z' => p.z |= 1 << q,
                other => return Err(Error::invalid(format!("invalid Pauli letter '{other}'"))),
            }
        }
        Ok(p)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        (0..self.n).try_for_each(|q| write!(f, "{}", self.letter(q)))
    }
}

impl Ord for PauliString {
    /// Letter order I < Z < X < Y, compared from qubit 0 upward.
    fn cmp(&self, other: &Self) -> Ordering {
        self.n.cmp(&other.n).then_with(|| {
            (0..self.n)
                .map(|q| self.letter_rank(q).cmp(&other.letter_rank(q)))
                .find(|o| *o != Ordering::Equal)
                .unwrap_or(Ordering::Equal)
        })
    }
}

impl PartialOrd for PauliString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn walsh_hadamard(v: &mut [Complex64]) {
    let mut h = 1;
    while h < v.len() {
        for i in (0..v.len()).step_by(2 * h) {
            for j in i..i + h {
                let (a, b) = (v[j], v[j + h]);
                v[j] = a + b;
                v[j + h] = a - b;
            }
        }
        h *= 2;
    }
}

/// Pauli coefficients `tr(P† M) / 2ⁿ` of a real matrix, in string order.
pub fn decompose(m: &SparseMat) -> Result<Vec<(PauliString, Complex64)>> {
    let dim = m.dim();
    if !dim.is_power_of_two() || dim < 2 {
        return Err(Error::invalid(format!("dimension {dim} is not a power of two")));
    }
    let n = dim.trailing_zeros() as usize;
    let masks: BTreeSet<usize> = m.iter().map(|(r, c, _)| r ^ c).collect();
    let mut out = Vec::new();
    for x in masks {
        let mut v: Vec<Complex64> = (0..dim).map(|r| Complex64::new(m.get(r ^ x, r), 0.0)).collect();
        walsh_hadamard(&mut v);
        for (z, val) in v.into_iter().enumerate() {
            let ny = (x & z).count_ones();
            let phase = match ny % 4 {
                0 => Complex64::new(1.0, 0.0),
                1 => Complex64::new(0.0, -1.0),
                2 => Complex64::new(-1.0, 0.0),
                _ => Complex64::new(0.0, 1.0),
            };
            let c = val * phase / dim as f64;
            if c.norm() >= PRUNE {
                out.push((PauliString { n, x: x as u32, z: z as u32 }, c));
            }
        }
    }
    out.sort_by_key(|a| a.0);
    Ok(out)
}

/// Dense complex matrix `Σ c_P P` from a decomposition.
pub fn reconstruct(terms: &[(PauliString, Complex64)], n: usize) -> nalgebra::DMatrix<Complex64> {
    let dim = 1 << n;
    let mut m = nalgebra::DMatrix::zeros(dim, dim);
    for (p, c) in terms {
        for r in 0..dim {
            let (s, ph) = p.apply_basis(r);
            m[(s, r)] += c * ph;
        }
    }
    m
}

/// Whether all strings commute pairwise.
pub fn check_commuting(strings: &[PauliString]) -> bool {
    strings.iter().enumerate().all(|(a, p)| strings[a + 1..].iter().all(|q| p.commutes_with(q)))
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ScheduleEntry {
    pub pauli: String,
    pub angle: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GateEstimate {
    pub cnot: usize,
    pub rz: usize,
    pub basis_change: usize,
}

/// Ordered rotations `exp(i·angle·P)` whose product implements a factorized unitary.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PauliSchedule {
    pub family: Option<Family>,
    pub theta: f64,
    pub n_qubits: usize,
    /// Entries applied first to last; the first entry acts on the state first.
    pub entries: Vec<ScheduleEntry>,
    /// Number of distinct Pauli strings across all factors.
    pub total_strings: usize,
    /// Number of rotations emitted.
    pub total_rotations: usize,
    /// Strings per factor, in product order (central factors first).
    pub per_factor_counts: Vec<usize>,
    pub gate_estimate: GateEstimate,
}

/// Splits `exp(t A)` for antisymmetric `A = i Σ r_k P_k` into single-string rotations `(P_k, t r_k)`.
pub fn factor_rotations(a: &SparseMat, t: f64) -> Result<Vec<(PauliString, f64)>> {
    let terms = decompose(a)?;
    let strings: Vec<PauliString> = terms.iter().map(|(p, _)| *p).collect();
    if !check_commuting(&strings) {
        return Err(Error::numerical("factor contains non-commuting Pauli strings"));
    }
    terms
        .into_iter()
        .map(|(p, c)| {
            if c.re.abs() > 1e-10 {
                return Err(Error::numerical(format!("coefficient of {p} is not imaginary: {c}")));
            }
            Ok((p, t * c.im))
        })
        .collect()
}

/// Rotation schedule for a factorization, with factors in product order.
pub fn schedule(fz: &Factorizer, fac: &Factorization) -> Result<PauliSchedule> {
    let n = fz.model.orbitals.n_qubits();
    let factors = fz.factor_matrices(fac);
    let mut per_factor = Vec::new();
    let mut blocks = Vec::new();
    let mut distinct = BTreeSet::new();
    for (a, t) in &factors {
        let rot = factor_rotations(a, *t)?;
        per_factor.push(rot.len());
        distinct.extend(rot.iter().map(|(p, _)| *p));
        blocks.push(rot);
    }
    // The rightmost factor acts first.
    let mut entries = Vec::new();
    let mut gates = GateEstimate { cnot: 0, rz: 0, basis_change: 0 };
    for rot in blocks.iter().rev() {
        for (p, angle) in rot {
            let w = p.weight();
            gates.cnot += 2 * w.saturating_sub(1);
            gates.rz += 1;
            gates.basis_change += 2 * (p.x.count_ones() as usize);
            entries.push(ScheduleEntry { pauli: p.to_string(), angle: *angle });
        }
    }
    Ok(PauliSchedule {
        family: Some(fac.family),
        theta: fac.theta,
        n_qubits: n,
        total_rotations: entries.len(),
        entries,
        total_strings: distinct.len(),
        per_factor_counts: per_factor,
        gate_estimate: gates,
    })
}

/// Applies the schedule's rotations `cos(a)ψ + i sin(a) Pψ` in order.
pub fn apply_schedule(state: &[Complex64], sched: &PauliSchedule) -> Result<Vec<Complex64>> {
    let dim = 1usize << sched.n_qubits;
    if state.len() != dim {
        return Err(Error::invalid(format!("state has dimension {}, schedule needs {dim}", state.len())));
    }
    let strings = sched.entries.iter().map(|e| PauliString::parse(&e.pauli)).collect::<Result<Vec<_>>>()?;
    let mut psi = state.to_vec();
    let mut next = vec![Complex64::new(0.0, 0.0); dim];
    for (p, e) in strings.iter().zip(&sched.entries) {
        let (s, c) = e.angle.sin_cos();
        let is = Complex64::new(0.0, s);
        for (r, &v) in psi.iter().enumerate() {
            let (r2, ph) = p.apply_basis(r);
            next[r2] = psi[r2] * c + is * ph * v;
        }
        std::mem::swap(&mut psi, &mut next);
    }
    Ok(psi)
}

/// Max-abs deviation of the schedule from a real unitary, over all basis states.
pub fn schedule_error(sched: &PauliSchedule, exact: &nalgebra::DMatrix<f64>) -> Result<f64> {
    use rayon::prelude::*;
    let dim = exact.nrows();
    let errs = (0..dim)
        .into_par_iter()
        .map(|k| {
            let mut e = vec![Complex64::new(0.0, 0.0); dim];
            e[k] = Complex64::new(1.0, 0.0);
            let out = apply_schedule(&e, sched)?;
            Ok(out.iter().enumerate().map(|(r, v)| (v - exact[(r, k)]).norm()).fold(0.0, f64::max))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(errs.into_iter().fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{double_rotation, number_op};
    use nalgebra::DMatrix;
    use proptest::prelude::*;

    #[test]
    fn number_operator_strings() {
        let t = decompose(&number_op(2, 4).unwrap()).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t[0].0.to_string(), "IIII");
        assert!((t[0].1 - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        assert_eq!(t[1].0.to_string(), "IIZI");
        assert!((t[1].1 - Complex64::new(-0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn elementary_double_rotation_has_eight_strings() {
        let g = double_rotation(8, (0, 3), (4, 7)).unwrap();
        let t = decompose(&g).unwrap();
        assert_eq!(t.len(), 8);
        let mag = t[0].1.norm();
        assert!(t.iter().all(|(_, c)| (c.norm() - mag).abs() < 1e-14 && c.re.abs() < 1e-15));
        let strings: Vec<_> = t.iter().map(|(p, _)| *p).collect();
        assert!(check_commuting(&strings));
    }

    #[test]
    fn commutation_rule() {
        let xx = PauliString::parse("XX").unwrap();
        let zi = PauliString::parse("ZI").unwrap();
        let zz = PauliString::parse("ZZ").unwrap();
        assert!(!check_commuting(&[xx, zi]));
        assert!(check_commuting(&[xx, zz]));
    }

    #[test]
    fn string_order() {
        let mut v: Vec<PauliString> = ["YI", "XI", "IZ", "ZI", "II"].iter().map(|s| PauliString::parse(s).unwrap()).collect();
        v.sort();
        let s: Vec<String> = v.iter().map(|p| p.to_string()).collect();
        assert_eq!(s, ["II", "IZ", "ZI", "XI", "YI"]);
    }

    #[test]
    fn pauli_action_matches_kron() {
        use nalgebra::Complex;
        let i = Complex::new(0.0, 1.0);
        let one = Complex::new(1.0, 0.0);
        let zero = Complex::new(0.0, 0.0);
        let x = DMatrix::from_row_slice(2, 2, &[zero, one, one, zero]);
        let y = DMatrix::from_row_slice(2, 2, &[zero, -i, i, zero]);
        let z = DMatrix::from_row_slice(2, 2, &[one, zero, zero, -one]);
        let p = PauliString::parse("XYZ").unwrap();
        // Qubit 0 is the least significant tensor factor.
        let m = z.kronecker(&y).kronecker(&x);
        let r = reconstruct(&[(p, one)], 3);
        assert!((m - r).iter().all(|c| c.norm() < 1e-15));
    }

    proptest! {
        #[test]
        fn decompose_reconstruct(v in proptest::collection::vec(-2.0f64..2.0, 64)) {
            let dense = DMatrix::from_row_slice(8, 8, &v);
            let m = SparseMat::from_dense(&dense, 0.0);
            let t = decompose(&m).unwrap();
            let r = reconstruct(&t, 3);
            prop_assert!((r.map(|c| c.re) - dense).amax() < 1e-12);
            prop_assert!(r.map(|c| c.im).amax() < 1e-12);
        }

        #[test]
        fn rotations_preserve_norm_and_invert(angles in proptest::collection::vec(-3.0f64..3.0, 5), seed in 0u64..1000) {
            let letters = ["XYZ", "ZZI", "YIX", "IXX", "ZYY"];
            let entries: Vec<ScheduleEntry> = letters.iter().zip(&angles).map(|(p, a)| ScheduleEntry { pauli: p.to_string(), angle: *a }).collect();
            let mut sched = PauliSchedule {
                family: None, theta: 0.0, n_qubits: 3, entries: entries.clone(), total_strings: 5, total_rotations: 5,
                per_factor_counts: vec![5], gate_estimate: GateEstimate { cnot: 0, rz: 0, basis_change: 0 },
            };
            let psi: Vec<Complex64> = (0..8).map(|k| Complex64::new(((k as u64 * 7919 + seed) % 13) as f64 - 6.0, (k as f64).sin())).collect();
            let nrm: f64 = psi.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            let psi: Vec<Complex64> = psi.iter().map(|c| c / nrm).collect();
            let out = apply_schedule(&psi, &sched).unwrap();
            let n2: f64 = out.iter().map(|c| c.norm_sqr()).sum();
            prop_assert!((n2 - 1.0).abs() < 1e-12);
            sched.entries = entries.iter().rev().map(|e| ScheduleEntry { pauli: e.pauli.clone(), angle: -e.angle }).collect();
            let back = apply_schedule(&out, &sched).unwrap();
            for (a, b) in back.iter().zip(&psi) {
                prop_assert!((a - b).norm() < 1e-10);
            }
        }
    }
}
