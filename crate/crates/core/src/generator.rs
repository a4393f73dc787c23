//! Polynomial-prefactored double rotations `sign · P(n) · G(lower -> upper)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::fock::{build_g, OrbitalSet, SpinOrbital};
use crate::sparse::SparseMat;

pub type Monomial = BTreeSet<SpinOrbital>;

/// Integer multilinear polynomial in number operators (`n² = n`).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, i64>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial::default()
    }

    pub fn constant(c: i64) -> Self {
        let mut p = Polynomial::zero();
        p.add_term(Monomial::new(), c);
        p
    }

    pub fn one() -> Self {
        Polynomial::constant(1)
    }

    pub fn number(so: SpinOrbital) -> Self {
        let mut p = Polynomial::zero();
        p.add_term(std::iter::once(so).collect(), 1);
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: i64) {
        let e = self.terms.entry(m.clone()).or_insert(0);
        *e += c;
        if *e == 0 {
            self.terms.remove(&m);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, i64)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        *self == Polynomial::one()
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(m.clone(), c);
        }
        out
    }

    pub fn scale(&self, k: i64) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in self.terms() {
            out.add_term(m.clone(), c * k);
        }
        out
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.scale(-1))
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (ma, ca) in self.terms() {
            for (mb, cb) in other.terms() {
                out.add_term(ma.union(mb).copied().collect(), ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        (0..k).fold(Polynomial::one(), |acc, _| acc.mul(self))
    }

    pub fn orbitals(&self) -> BTreeSet<SpinOrbital> {
        self.terms.keys().flat_map(|m| m.iter().copied()).collect()
    }

    pub fn eval(&self, occupied: impl Fn(SpinOrbital) -> bool) -> i64 {
        self.terms()
            .filter(|(m, _)| m.iter().all(|&so| occupied(so)))
            .map(|(_, c)| c)
            .sum()
    }

    fn ordered_terms(&self) -> Vec<(&Monomial, i64)> {
        let mut t: Vec<_> = self.terms().collect();
        t.sort_by(|a, b| (a.0.len(), a.0).cmp(&(b.0.len(), b.0)));
        t
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.ordered_terms().into_iter().enumerate() {
            let mag = c.unsigned_abs();
            if k == 0 {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c < 0 { '-' } else { '+' })?;
            }
            let factors: Vec<String> = m.iter().map(|so| format!("n({so})")).collect();
            if factors.is_empty() {
                write!(f, "{mag}")?;
            } else if mag == 1 {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{mag}*{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

/// `sign · poly · G(lower -> upper)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorSpec {
    pub sign: i8,
    pub poly: Polynomial,
    pub lower: (SpinOrbital, SpinOrbital),
    pub upper: (SpinOrbital, SpinOrbital),
}

impl GeneratorSpec {
    pub fn elementary(lower: (SpinOrbital, SpinOrbital), upper: (SpinOrbital, SpinOrbital)) -> Self {
        GeneratorSpec { sign: 1, poly: Polynomial::one(), lower, upper }
    }

    pub fn base_orbitals(&self) -> [SpinOrbital; 4] {
        [self.lower.0, self.lower.1, self.upper.0, self.upper.1]
    }

    /// The prefactor with the sign folded in.
    pub fn signed_poly(&self) -> Polynomial {
        self.poly.scale(self.sign as i64)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sign != 1 && self.sign != -1 {
            return Err(Error::invalid(format!("sign must be ±1, got {}", self.sign)));
        }
        let base = self.base_orbitals();
        for a in 0..4 {
            for b in a + 1..4 {
                if base[a] == base[b] {
                    return Err(Error::invalid(format!("spin orbital {} repeated in G(...)", base[a])));
                }
            }
        }
        if let Some(so) = self.poly.orbitals().into_iter().find(|so| base.contains(so)) {
            return Err(Error::invalid(format!("prefactor acts on {so}, which also appears in G(...)")));
        }
        if self.poly.is_zero() {
            return Err(Error::invalid("prefactor polynomial is identically zero"));
        }
        Ok(())
    }
}

/// Matrix of a generator spec on the given orbital layout.
pub fn build_generator(spec: &GeneratorSpec, set: &OrbitalSet) -> Result<SparseMat> {
    spec.validate()?;
    for so in spec.poly.orbitals() {
        set.qubit(so)?;
    }
    let g = build_g(set, spec.lower, spec.upper)?;
    let poly = spec.signed_poly();
    if poly.is_one() {
        return Ok(g);
    }
    let orbs = set.orbitals();
    let trips = g
        .iter()
        .map(|(r, c, v)| {
            let p = poly.eval(|so| {
                let q = orbs.iter().position(|&o| o == so).unwrap();
                c >> q & 1 == 1
            });
            (r, c, v * p as f64)
        })
        .collect();
    Ok(SparseMat::from_triplets(set.dim(), trips))
}

/// Recovers the signed prefactor of a matrix known to have the form `P·G(lower -> upper)`.
///
/// The prefactor is read off on every spectator configuration and converted to
/// multilinear coefficients by Möbius inversion. Fails if the matrix is not of
/// that form or the values are not integers.
pub fn derive_prefactor(
    m: &SparseMat,
    lower: (SpinOrbital, SpinOrbital),
    upper: (SpinOrbital, SpinOrbital),
    set: &OrbitalSet,
) -> Result<Polynomial> {
    let g = build_g(set, lower, upper)?;
    let base = [lower.0, lower.1, upper.0, upper.1];
    let spectators: Vec<SpinOrbital> = set.orbitals().iter().copied().filter(|o| !base.contains(o)).collect();
    let q = |so: SpinOrbital| set.qubit(so).unwrap();
    let lower_bits = (1usize << q(lower.0)) | (1usize << q(lower.1));
    let k = spectators.len();
    let mut values = vec![0i64; 1 << k];
    for (x, val) in values.iter_mut().enumerate() {
        let mut s = lower_bits;
        for (t, &so) in spectators.iter().enumerate() {
            if x >> t & 1 == 1 {
                s |= 1 << q(so);
            }
        }
        let (target, gv) = g.row_iter_col(s).ok_or_else(|| Error::numerical("base rotation has no image"))?;
        let ratio = m.get(target, s) / gv;
        let rounded = ratio.round();
        if (ratio - rounded).abs() > 1e-9 {
            return Err(Error::numerical(format!("non-integer prefactor value {ratio}")));
        }
        *val = rounded as i64;
    }
    let mut poly = Polynomial::zero();
    for subset in 0..(1usize << k) {
        let mut c = 0i64;
        let mut t = subset;
        loop {
            let parity = (subset.count_ones() - t.count_ones()) % 2;
            c += if parity == 0 { values[t] } else { -values[t] };
            if t == 0 {
                break;
            }
            t = (t - 1) & subset;
        }
        if c != 0 {
            let mono = (0..k).filter(|b| subset >> b & 1 == 1).map(|b| spectators[b]).collect();
            poly.add_term(mono, c);
        }
    }
    let spec = GeneratorSpec { sign: 1, poly: poly.clone(), lower, upper };
    let rebuilt = build_generator(&spec, set)?;
    if rebuilt.max_abs_diff(m) > 1e-9 {
        return Err(Error::numerical("matrix is not of the form P·G for this base rotation"));
    }
    Ok(poly)
}

impl SparseMat {
    /// The single nonzero entry in column `c`, if any: `(row, value)`.
    fn row_iter_col(&self, c: usize) -> Option<(usize, f64)> {
        self.iter().find(|&(_, cc, _)| cc == c).map(|(r, _, v)| (r, v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{number_op, Label, Spin};
    use proptest::prelude::*;

    fn so(l: Label, s: Spin) -> SpinOrbital {
        SpinOrbital::new(l, s)
    }

    #[test]
    fn polynomial_display_is_canonical() {
        let na = Polynomial::number(so(Label::A, Spin::Alpha));
        let nb = Polynomial::number(so(Label::B, Spin::Beta));
        let p = Polynomial::one().sub(&na).sub(&nb).add(&na.mul(&nb).scale(2));
        assert_eq!(p.to_string(), "1 - n(a.a) - n(b.b) + 2*n(a.a)*n(b.b)");
    }

    #[test]
    fn square_of_difference_reduces() {
        let na = Polynomial::number(so(Label::A, Spin::Beta));
        let nb = Polynomial::number(so(Label::B, Spin::Alpha));
        let sq = na.sub(&nb).pow(2);
        assert_eq!(sq.to_string(), "n(a.b) + n(b.a) - 2*n(a.b)*n(b.a)");
    }

    #[test]
    fn prefactor_matches_number_operator_product() {
        let set = OrbitalSet::new(&[Label::I, Label::A, Label::B]);
        let ia = so(Label::I, Spin::Alpha);
        let ib = so(Label::I, Spin::Beta);
        let lower = (so(Label::A, Spin::Alpha), so(Label::B, Spin::Beta));
        let upper = (so(Label::A, Spin::Beta), so(Label::B, Spin::Alpha));
        let poly = Polynomial::one().sub(&Polynomial::number(ia)).sub(&Polynomial::number(ib));
        let spec = GeneratorSpec { sign: 1, poly, lower, upper };
        let m = build_generator(&spec, &set).unwrap();
        // Oracle: explicit operator product (1 - n_ia - n_ib) G.
        let g = build_g(&set, lower, upper).unwrap();
        let dim = set.dim();
        let p = SparseMat::identity(dim)
            .sub(&number_op(0, 6).unwrap())
            .sub(&number_op(1, 6).unwrap());
        assert!(m.max_abs_diff(&p.matmul(&g)) < 1e-15);
        assert_eq!(derive_prefactor(&m, lower, upper, &set).unwrap(), spec.signed_poly());
    }

    #[test]
    fn rejects_overlap_with_base() {
        let ia = so(Label::I, Spin::Alpha);
        let spec = GeneratorSpec {
            sign: 1,
            poly: Polynomial::number(ia),
            lower: (ia, so(Label::I, Spin::Beta)),
            upper: (so(Label::A, Spin::Alpha), so(Label::A, Spin::Beta)),
        };
        assert!(spec.validate().is_err());
    }

    proptest! {
        #[test]
        fn prefactor_roundtrip(coeffs in proptest::collection::vec(-3i64..=3, 4)) {
            let set = OrbitalSet::new(&[Label::I, Label::J, Label::A]);
            let lower = (so(Label::I, Spin::Alpha), so(Label::I, Spin::Beta));
            let upper = (so(Label::J, Spin::Alpha), so(Label::A, Spin::Beta));
            let x = Polynomial::number(so(Label::J, Spin::Beta));
            let y = Polynomial::number(so(Label::A, Spin::Alpha));
            let poly = Polynomial::constant(coeffs[0])
                .add(&x.scale(coeffs[1]))
                .add(&y.scale(coeffs[2]))
                .add(&x.mul(&y).scale(coeffs[3]));
            prop_assume!(!poly.is_zero());
            let spec = GeneratorSpec { sign: -1, poly, lower, upper };
            let m = build_generator(&spec, &set).unwrap();
            prop_assert_eq!(derive_prefactor(&m, lower, upper, &set).unwrap(), spec.signed_poly());
        }
    }
}
