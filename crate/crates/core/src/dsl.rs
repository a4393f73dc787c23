//! Text form of generators: `A7 = -(1 - n(i.a) + 2*n(i.a)*n(a.b)) * G(j.a,b.b -> j.b,b.a)`.
//!
//! Prefactors may be written as products of parenthesized sums with integer
//! powers; they are expanded into canonical multilinear form on parse.

use crate::error::{Error, Result};
use crate::fock::{Label, Spin, SpinOrbital};
use crate::generator::{GeneratorSpec, Polynomial};

struct Cursor<'a> {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    offset: usize,
    _src: &'a str,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str, line: usize, offset: usize) -> Self {
        Cursor { chars: src.chars().collect(), pos: 0, line, offset, _src: src }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { line: self.line, col: self.offset + self.pos + 1, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            match self.peek() {
                Some(f) => self.err(format!("expected '{c}', found '{f}'")),
                None => self.err(format!("expected '{c}', found end of input")),
            }
        }
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    fn integer(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected integer");
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse::<i64>().or_else(|_| self.err(format!("integer '{s}' out of range")))
    }

    fn spin_orbital(&mut self) -> Result<SpinOrbital> {
        self.skip_ws();
        let c = self.chars.get(self.pos).copied();
        let label = match c.and_then(Label::from_char) {
            Some(l) => l,
            None => return self.err("expected orbital label i, j, a or b"),
        };
        self.pos += 1;
        if self.chars.get(self.pos) != Some(&'.') {
            return self.err("expected '.' after orbital label");
        }
        self.pos += 1;
        let spin = match self.chars.get(self.pos) {
            Some('a') => Spin::Alpha,
            Some('b') => Spin::Beta,
            _ => return self.err("expected spin 'a' or 'b'"),
        };
        self.pos += 1;
        Ok(SpinOrbital::new(label, spin))
    }

    fn factor(&mut self) -> Result<Polynomial> {
        let base = match self.peek() {
            Some('(') => {
                self.pos += 1;
                let p = self.sum()?;
                self.expect(')')?;
                p
            }
            Some('n') => {
                self.pos += 1;
                self.expect('(')?;
                let so = self.spin_orbital()?;
                self.expect(')')?;
                Polynomial::number(so)
            }
            Some(c) if c.is_ascii_digit() => Polynomial::constant(self.integer()?),
            Some(c) => return self.err(format!("unexpected '{c}'")),
            None => return self.err("unexpected end of input"),
        };
        if self.eat('^') {
            let k = self.integer()?;
            if !(0..=16).contains(&k) {
                return self.err("exponent must be in 0..=16");
            }
            return Ok(base.pow(k as u32));
        }
        Ok(base)
    }

    fn starts_factor(&mut self) -> bool {
        matches!(self.peek(), Some('(') | Some('n')) || self.peek().is_some_and(|c| c.is_ascii_digit())
    }

    fn product(&mut self) -> Result<Polynomial> {
        let mut p = self.factor()?;
        loop {
            let save = self.pos;
            if self.eat('*') {
                if self.peek() == Some('G') {
                    self.pos = save;
                    return Ok(p);
                }
                p = p.mul(&self.factor()?);
            } else if self.starts_factor() {
                p = p.mul(&self.factor()?);
            } else {
                return Ok(p);
            }
        }
    }

    fn sum(&mut self) -> Result<Polynomial> {
        let mut sign = 1;
        if self.eat('-') {
            sign = -1;
        } else {
            self.eat('+');
        }
        let mut p = self.product()?.scale(sign);
        loop {
            if self.eat('+') {
                p = p.add(&self.product()?);
            } else if self.eat('-') {
                p = p.sub(&self.product()?);
            } else {
                return Ok(p);
            }
        }
    }

    fn rotation(&mut self) -> Result<((SpinOrbital, SpinOrbital), (SpinOrbital, SpinOrbital))> {
        self.expect('G')?;
        self.expect('(')?;
        let l1 = self.spin_orbital()?;
        self.expect(',')?;
        let l2 = self.spin_orbital()?;
        self.expect('-')?;
        if self.chars.get(self.pos) != Some(&'>') {
            return self.err("expected '->'");
        }
        self.pos += 1;
        let u1 = self.spin_orbital()?;
        self.expect(',')?;
        let u2 = self.spin_orbital()?;
        self.expect(')')?;
        Ok(((l1, l2), (u1, u2)))
    }

    fn generator(&mut self) -> Result<GeneratorSpec> {
        let sign: i8 = if self.eat('-') { -1 } else { 1 };
        let poly = if self.peek() == Some('G') {
            Polynomial::one()
        } else {
            let p = self.product()?;
            self.expect('*')?;
            p
        };
        let (lower, upper) = self.rotation()?;
        if !self.at_end() {
            return self.err("trailing input after G(...)");
        }
        let spec = GeneratorSpec { sign, poly, lower, upper };
        spec.validate().map_err(|e| Error::Parse { line: self.line, col: self.offset + 1, msg: e.to_string() })?;
        Ok(spec)
    }
}

/// Parses the right-hand side of a generator definition.
pub fn parse_generator(src: &str) -> Result<GeneratorSpec> {
    Cursor::new(src, 1, 0).generator()
}

pub fn format_generator(spec: &GeneratorSpec) -> String {
    let sign = if spec.sign < 0 { "-" } else { "" };
    let rot = format!(
        "G({},{} -> {},{})",
        spec.lower.0, spec.lower.1, spec.upper.0, spec.upper.1
    );
    if spec.poly.is_one() {
        format!("{sign}{rot}")
    } else {
        format!("{sign}({}) * {rot}", spec.poly)
    }
}

/// A named definition line: `NAME = rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Definition<T> {
    pub name: String,
    pub value: T,
    pub line: usize,
}

fn split_definitions(text: &str) -> Result<Vec<(usize, usize, String, &str)>> {
    let mut out = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        let Some(eq) = line.find('=') else {
            return Err(Error::Parse { line: k + 1, col: 1, msg: "expected 'NAME = ...'".into() });
        };
        let name = line[..eq].trim();
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(Error::Parse { line: k + 1, col: 1, msg: format!("invalid name '{name}'") });
        }
        out.push((k + 1, eq + 1, name.to_string(), &line[eq + 1..]));
    }
    Ok(out)
}

/// Parses a document of generator definitions, one per line.
pub fn parse_generators(text: &str) -> Result<Vec<Definition<GeneratorSpec>>> {
    split_definitions(text)?
        .into_iter()
        .map(|(line, offset, name, rhs)| {
            let value = Cursor::new(rhs, line, offset).generator()?;
            Ok(Definition { name, value, line })
        })
        .collect()
}

/// Parses integer linear combinations of basis elements: `Z1 = -A2 + 3*A17`.
/// Indices are returned zero-based.
/// Integer combination of basis indices.
pub type Combination = Vec<(usize, i64)>;

pub fn parse_combinations(text: &str) -> Result<Vec<Definition<Combination>>> {
    split_definitions(text)?
        .into_iter()
        .map(|(line, offset, name, rhs)| {
            let mut cur = Cursor::new(rhs, line, offset);
            let mut terms = Vec::new();
            let mut first = true;
            while !cur.at_end() {
                let sign = if cur.eat('-') {
                    -1
                } else if cur.eat('+') || first {
                    1
                } else {
                    return cur.err("expected '+' or '-'");
                };
                first = false;
                let mut coef = 1;
                if cur.peek().is_some_and(|c| c.is_ascii_digit()) {
                    coef = cur.integer()?;
                    cur.expect('*')?;
                }
                cur.expect('A')?;
                let idx = cur.integer()?;
                if idx < 1 {
                    return cur.err("element indices start at 1");
                }
                terms.push((idx as usize - 1, sign * coef));
            }
            if terms.is_empty() {
                return cur.err("empty combination");
            }
            Ok(Definition { name, value: terms, line })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_prefactored_generator() {
        let s = parse_generator("-(1 - n(a.a) - n(b.b) + 2*n(a.a)*n(b.b)) * G(i.a,i.b -> a.b,b.a)").unwrap();
        assert_eq!(s.sign, -1);
        assert_eq!(s.poly.to_string(), "1 - n(a.a) - n(b.b) + 2*n(a.a)*n(b.b)");
        assert_eq!(s.lower.0.to_string(), "i.a");
        assert_eq!(s.upper.1.to_string(), "b.a");
    }

    #[test]
    fn expands_powers_and_products() {
        let s = parse_generator("(n(i.a) - n(j.b))^2 (n(a.b) - n(b.a))^2 * G(i.b,j.a -> a.a,b.b)").unwrap();
        let t = s.poly.terms().count();
        assert_eq!(t, 9);
        let s2 = parse_generator("(n(a.b) - n(b.a))^2 * G(i.a,i.b -> a.a,b.b)").unwrap();
        assert_eq!(s2.poly.to_string(), "n(a.b) + n(b.a) - 2*n(a.b)*n(b.a)");
    }

    #[test]
    fn reports_position_of_errors() {
        let e = parse_generators("A1 = G(i.a,i.b -> a.a,b.b)\nA2 = (1 - n(x.a)) * G(i.a,i.b -> a.a,b.b)\n").unwrap_err();
        match e {
            Error::Parse { line, col, .. } => {
                assert_eq!(line, 2);
                assert_eq!(col, 13);
            }
            other => panic!("unexpected error {other}"),
        }
        assert!(parse_generator("G(i.a,i.a -> a.a,b.b)").is_err());
        assert!(parse_generator("n(i.a) * G(i.a,i.b -> a.a,b.b)").is_err());
        assert!(parse_generator("G(i.a,i.b -> a.a,b.b) extra").is_err());
    }

    #[test]
    fn parses_combinations() {
        let c = parse_combinations("Z1 = -A2 + 3*A17 - A20\n").unwrap();
        assert_eq!(c[0].value, vec![(1, -1), (16, 3), (19, -1)]);
    }

    fn arb_orbital() -> impl Strategy<Value = SpinOrbital> {
        (0..4usize, any::<bool>()).prop_map(|(l, s)| {
            let label = [Label::I, Label::J, Label::A, Label::B][l];
            SpinOrbital::new(label, if s { Spin::Alpha } else { Spin::Beta })
        })
    }

    proptest! {
        #[test]
        fn format_parse_roundtrip(
            perm in Just((0..8usize).collect::<Vec<_>>()).prop_shuffle(),
            coeffs in proptest::collection::vec(-3i64..=3, 4),
            neg in any::<bool>(),
        ) {
            let all: Vec<SpinOrbital> = [Label::I, Label::J, Label::A, Label::B]
                .iter()
                .flat_map(|&l| [SpinOrbital::new(l, Spin::Alpha), SpinOrbital::new(l, Spin::Beta)])
                .collect();
            let o: Vec<SpinOrbital> = perm.iter().map(|&k| all[k]).collect();
            let x = Polynomial::number(o[4]);
            let y = Polynomial::number(o[5]);
            let poly = Polynomial::constant(coeffs[0])
                .add(&x.scale(coeffs[1]))
                .add(&y.scale(coeffs[2]))
                .add(&x.mul(&y).scale(coeffs[3]));
            prop_assume!(!poly.is_zero());
            let spec = GeneratorSpec { sign: if neg { -1 } else { 1 }, poly, lower: (o[0], o[1]), upper: (o[2], o[3]) };
            let text = format_generator(&spec);
            prop_assert_eq!(parse_generator(&text).unwrap(), spec);
        }

        #[test]
        fn single_orbital_parses(so in arb_orbital()) {
            let p = parse_generator(&format!("(1 - n({so})) * G(i.a,i.b -> a.a,a.b)"));
            let in_base = [Label::I, Label::A].contains(&so.label);
            prop_assert_eq!(p.is_ok(), !in_base);
        }
    }
}
