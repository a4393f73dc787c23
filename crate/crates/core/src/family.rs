//! The four spin-adapted double-excitation families and their bundled data.

use std::f64::consts::SQRT_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dsl::{parse_combinations, parse_generators, Combination, Definition};
use crate::error::{Error, Result};
use crate::fock::{Label, OrbitalSet, Spin, SpinOrbital};
use crate::generator::GeneratorSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "s2-iiab")]
    S2Iiab,
    #[serde(rename = "s2-ijaa")]
    S2Ijaa,
    #[serde(rename = "s4-singlet")]
    S4Singlet,
    #[serde(rename = "s4-triplet")]
    S4Triplet,
}

pub const ALL_FAMILIES: [Family; 4] = [Family::S2Iiab, Family::S2Ijaa, Family::S4Singlet, Family::S4Triplet];

const fn so(label: Label, spin: Spin) -> SpinOrbital {
    SpinOrbital::new(label, spin)
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::S2Iiab => "s2-iiab",
            Family::S2Ijaa => "s2-ijaa",
            Family::S4Singlet => "s4-singlet",
            Family::S4Triplet => "s4-triplet",
        }
    }

    pub fn orbitals(self) -> OrbitalSet {
        match self {
            Family::S2Iiab => OrbitalSet::new(&[Label::I, Label::A, Label::B]),
            Family::S2Ijaa => OrbitalSet::new(&[Label::I, Label::J, Label::A]),
            Family::S4Singlet | Family::S4Triplet => OrbitalSet::new(&[Label::I, Label::J, Label::A, Label::B]),
        }
    }

    /// Elementary double rotations and their coefficients in the symmetrized generator.
    pub fn symmetrized(self) -> (Vec<GeneratorSpec>, Vec<f64>) {
        use Label::*;
        use Spin::*;
        let g = |l1, l2, u1, u2| GeneratorSpec::elementary((l1, l2), (u1, u2));
        match self {
            Family::S2Iiab => (
                vec![
                    g(so(I, Alpha), so(I, Beta), so(A, Alpha), so(B, Beta)),
                    g(so(I, Alpha), so(I, Beta), so(A, Beta), so(B, Alpha)),
                ],
                vec![1.0 / SQRT_2, -1.0 / SQRT_2],
            ),
            Family::S2Ijaa => (
                vec![
                    g(so(I, Alpha), so(J, Beta), so(A, Alpha), so(A, Beta)),
                    g(so(I, Beta), so(J, Alpha), so(A, Alpha), so(A, Beta)),
                ],
                vec![1.0 / SQRT_2, -1.0 / SQRT_2],
            ),
            Family::S4Singlet => (
                Self::mixed_spin_rotations().to_vec(),
                vec![0.5, 0.5, -0.5, -0.5],
            ),
            Family::S4Triplet => {
                let mut specs = Self::mixed_spin_rotations().to_vec();
                specs.push(g(so(I, Alpha), so(J, Alpha), so(A, Alpha), so(B, Alpha)));
                specs.push(g(so(I, Beta), so(J, Beta), so(A, Beta), so(B, Beta)));
                let k = 1.0 / (2.0 * 3f64.sqrt());
                (specs, vec![k, k, k, k, 2.0 * k, 2.0 * k])
            }
        }
    }

    fn mixed_spin_rotations() -> [GeneratorSpec; 4] {
        use Label::*;
        use Spin::*;
        let g = |l1, l2, u1, u2| GeneratorSpec::elementary((l1, l2), (u1, u2));
        [
            g(so(I, Alpha), so(J, Beta), so(A, Alpha), so(B, Beta)),
            g(so(I, Beta), so(J, Alpha), so(A, Beta), so(B, Alpha)),
            g(so(I, Beta), so(J, Alpha), so(A, Alpha), so(B, Beta)),
            g(so(I, Alpha), so(J, Beta), so(A, Beta), so(B, Alpha)),
        ]
    }

    fn data(self) -> (&'static str, &'static str, &'static str) {
        match self {
            Family::S2Iiab => (
                include_str!("../data/s2_iiab.dsl"),
                include_str!("../data/s2_iiab.center"),
                include_str!("../data/s2_iiab.zforms"),
            ),
            Family::S2Ijaa => (
                include_str!("../data/s2_ijaa.dsl"),
                include_str!("../data/s2_ijaa.center"),
                include_str!("../data/s2_ijaa.zforms"),
            ),
            Family::S4Singlet => (
                include_str!("../data/s4_singlet.dsl"),
                include_str!("../data/s4_singlet.center"),
                include_str!("../data/s4_singlet.zforms"),
            ),
            Family::S4Triplet => (
                include_str!("../data/s4_triplet.dsl"),
                include_str!("../data/s4_triplet.center"),
                include_str!("../data/s4_triplet.zforms"),
            ),
        }
    }

    /// The listed basis elements A1, A2, ... in order.
    pub fn listed_elements(self) -> Result<Vec<Definition<GeneratorSpec>>> {
        parse_generators(self.data().0)
    }

    /// Listed center elements as integer combinations of listed elements.
    pub fn center_combinations(self) -> Result<Vec<Definition<Combination>>> {
        parse_combinations(self.data().1)
    }

    /// Listed center elements in explicit prefactor form.
    pub fn center_forms(self) -> Result<Vec<Definition<GeneratorSpec>>> {
        parse_generators(self.data().2)
    }

    /// Claimed ideal decomposition of the derived algebra, as listed-element index groups.
    pub fn listed_ideals(self) -> Option<Vec<Vec<usize>>> {
        match self {
            Family::S4Triplet => Some(
                include_str!("../data/s4_triplet.ideals")
                    .lines()
                    .filter(|l| !l.trim().is_empty())
                    .map(|l| l.split_whitespace().skip(1).map(|t| t.parse::<usize>().unwrap() - 1).collect())
                    .collect(),
            ),
            _ => None,
        }
    }

    /// Listed bracket table: entry `(i, j)` is the signed 1-based index `k` with `[A_i, A_j] = ±A_k`.
    pub fn bracket_table(self) -> Option<Vec<Vec<i64>>> {
        let text = match self {
            Family::S2Iiab | Family::S2Ijaa => include_str!("../data/s2.brackets"),
            Family::S4Singlet => include_str!("../data/s4_singlet.brackets"),
            Family::S4Triplet => return None,
        };
        Some(
            text.lines()
                .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
                .map(|l| l.split_whitespace().map(|t| t.parse().unwrap()).collect())
                .collect(),
        )
    }

    /// Expected dimensions `(algebra, center, derived)` as listed.
    pub fn listed_dimensions(self) -> (usize, usize, usize) {
        match self {
            Family::S2Iiab | Family::S2Ijaa => (5, 2, 3),
            Family::S4Singlet => (28, 4, 24),
            Family::S4Triplet => (138, 6, 132),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "s2" | "s2-iiab" | "iiab" => Ok(Family::S2Iiab),
            "s2-ijaa" | "ijaa" => Ok(Family::S2Ijaa),
            "s4-singlet" | "singlet" => Ok(Family::S4Singlet),
            "s4-triplet" | "triplet" => Ok(Family::S4Triplet),
            other => Err(Error::invalid(format!(
                "unknown family '{other}' (expected s2-iiab, s2-ijaa, s4-singlet or s4-triplet)"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_data_parses() {
        let counts = [(Family::S2Iiab, 5, 2), (Family::S2Ijaa, 5, 2), (Family::S4Singlet, 28, 4), (Family::S4Triplet, 138, 6)];
        for (f, n, z) in counts {
            let elems = f.listed_elements().unwrap();
            assert_eq!(elems.len(), n, "{f}");
            for (k, d) in elems.iter().enumerate() {
                assert_eq!(d.name, format!("A{}", k + 1));
            }
            assert_eq!(f.center_combinations().unwrap().len(), z);
            assert_eq!(f.center_forms().unwrap().len(), z);
        }
    }

    #[test]
    fn coefficients_are_normalized() {
        for f in ALL_FAMILIES {
            let (_, c) = f.symmetrized();
            let n: f64 = c.iter().map(|x| x * x).sum();
            assert!((n - 1.0).abs() < 1e-15, "{f}");
        }
    }

    #[test]
    fn parses_names() {
        assert_eq!("s4-triplet".parse::<Family>().unwrap(), Family::S4Triplet);
        assert_eq!("s2".parse::<Family>().unwrap(), Family::S2Iiab);
        assert!("s6".parse::<Family>().is_err());
    }
}
