//! Spin-free molecular integrals: FCIDUMP reading/writing and seeded synthetic systems.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use crate::error::{Error, Result};

/// Tolerance for symmetry checks on integrals.
pub const SYMMETRY_TOL: f64 = 1e-8;

/// Integrals over spatial orbitals; `g` is in chemists' notation `(pq|rs)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MolecularIntegrals {
    pub n_spatial: usize,
    pub e_core: f64,
    pub h: DMatrix<f64>,
    /// Row-major `n⁴` array indexed by `((p·n + q)·n + r)·n + s`.
    pub g: Vec<f64>,
    pub n_electrons: usize,
    /// Twice the spin projection.
    pub ms2: i32,
}

impl MolecularIntegrals {
    pub fn zeros(n_spatial: usize, n_electrons: usize, ms2: i32) -> Self {
        MolecularIntegrals {
            n_spatial,
            e_core: 0.0,
            h: DMatrix::zeros(n_spatial, n_spatial),
            g: vec![0.0; n_spatial.pow(4)],
            n_electrons,
            ms2,
        }
    }

    fn idx(&self, p: usize, q: usize, r: usize, s: usize) -> usize {
        let n = self.n_spatial;
        ((p * n + q) * n + r) * n + s
    }

    pub fn g(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        self.g[self.idx(p, q, r, s)]
    }

    /// The eight index images of `(pq|rs)`.
    pub fn images(p: usize, q: usize, r: usize, s: usize) -> [(usize, usize, usize, usize); 8] {
        [
            (p, q, r, s),
            (q, p, r, s),
            (p, q, s, r),
            (q, p, s, r),
            (r, s, p, q),
            (s, r, p, q),
            (r, s, q, p),
            (s, r, q, p),
        ]
    }

    /// Sets `(pq|rs)` and all its symmetry images.
    pub fn set_g(&mut self, p: usize, q: usize, r: usize, s: usize, v: f64) {
        for (a, b, c, d) in Self::images(p, q, r, s) {
            let i = self.idx(a, b, c, d);
            self.g[i] = v;
        }
    }

    pub fn set_h(&mut self, p: usize, q: usize, v: f64) {
        self.h[(p, q)] = v;
        self.h[(q, p)] = v;
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_spatial;
        if n == 0 {
            return Err(Error::invalid("no orbitals"));
        }
        if self.h.nrows() != n || self.h.ncols() != n || self.g.len() != n.pow(4) {
            return Err(Error::invalid("integral array shapes do not match orbital count"));
        }
        if self.n_electrons > 2 * n {
            return Err(Error::invalid(format!("{} electrons do not fit in {n} orbitals", self.n_electrons)));
        }
        if (self.n_electrons as i32 - self.ms2) % 2 != 0 || self.ms2.unsigned_abs() as usize > self.n_electrons {
            return Err(Error::invalid(format!("MS2={} incompatible with {} electrons", self.ms2, self.n_electrons)));
        }
        let asym = (&self.h - self.h.transpose()).amax();
        if asym > SYMMETRY_TOL {
            return Err(Error::invalid(format!("one-electron integrals not symmetric (deviation {asym:e})")));
        }
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    for s in 0..n {
                        let v = self.g(p, q, r, s);
                        for (a, b, c, d) in Self::images(p, q, r, s) {
                            if (self.g(a, b, c, d) - v).abs() > SYMMETRY_TOL {
                                return Err(Error::invalid(format!(
                                    "two-electron integrals lack 8-fold symmetry at ({},{}|{},{})",
                                    p + 1,
                                    q + 1,
                                    r + 1,
                                    s + 1
                                )));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Non-interacting copy with all two-electron integrals zeroed.
    pub fn one_body_only(&self) -> Self {
        MolecularIntegrals { g: vec![0.0; self.g.len()], ..self.clone() }
    }
}

/// Parses an FCIDUMP file.
pub fn parse_fcidump(text: &str) -> Result<MolecularIntegrals> {
    let upper = text.to_ascii_uppercase();
    let start = upper
        .find("&FCI")
        .ok_or_else(|| Error::Parse { line: 1, col: 1, msg: "missing &FCI namelist".into() })?;
    let rest = &upper[start + 4..];
    let (end_rel, end_len) = match (rest.find("&END"), rest.find('/')) {
        (Some(a), Some(b)) if b < a => (b, 1),
        (Some(a), _) => (a, 4),
        (None, Some(b)) => (b, 1),
        (None, None) => {
            return Err(Error::Parse { line: 1, col: 1, msg: "unterminated namelist".into() });
        }
    };
    let header = &rest[..end_rel];
    let body_start = start + 4 + end_rel + end_len;

    let mut norb = None;
    let mut nelec = None;
    let mut ms2 = 0i32;
    let mut key = String::new();
    for tok in header.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()) {
        let value = if let Some((k, v)) = tok.split_once('=') {
            key = k.trim().to_string();
            v.trim()
        } else {
            tok
        };
        if value.is_empty() {
            continue;
        }
        let parse_int = |v: &str| {
            v.parse::<i64>()
                .map_err(|_| Error::Parse { line: 1, col: 1, msg: format!("bad value '{v}' for {key}") })
        };
        match key.as_str() {
            "NORB" => norb = Some(parse_int(value)?),
            "NELEC" => nelec = Some(parse_int(value)?),
            "MS2" => ms2 = parse_int(value)? as i32,
            _ => {}
        }
    }
    let norb = norb.ok_or_else(|| Error::Parse { line: 1, col: 1, msg: "NORB missing".into() })?;
    let nelec = nelec.ok_or_else(|| Error::Parse { line: 1, col: 1, msg: "NELEC missing".into() })?;
    if norb <= 0 || nelec < 0 {
        return Err(Error::Parse { line: 1, col: 1, msg: "NORB must be positive and NELEC non-negative".into() });
    }
    let n = norb as usize;
    let mut ints = MolecularIntegrals::zeros(n, nelec as usize, ms2);
    let mut seen_g: Vec<Option<usize>> = vec![None; n.pow(4)];
    let mut seen_h: Vec<Option<usize>> = vec![None; n * n];

    let mut offset = 0;
    for (k, full) in text.split_inclusive('\n').enumerate() {
        let line = k + 1;
        let line_start = offset;
        offset += full.len();
        if offset <= body_start {
            continue;
        }
        let raw = &full[body_start.saturating_sub(line_start)..];
        let fields: Vec<&str> = raw.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        let err = |msg: String| Error::Parse { line, col: 1, msg };
        if fields.len() != 5 {
            return Err(err(format!("expected 'value i j k l', found {} fields", fields.len())));
        }
        let v: f64 = fields[0]
            .replace(['D', 'd'], "e")
            .parse()
            .map_err(|_| err(format!("bad integral value '{}'", fields[0])))?;
        let mut idx = [0usize; 4];
        for (slot, f) in idx.iter_mut().zip(&fields[1..]) {
            let i: i64 = f.parse().map_err(|_| err(format!("bad index '{f}'")))?;
            if i < 0 || i > norb {
                return Err(err(format!("index {i} out of range 0..={norb}")));
            }
            *slot = i as usize;
        }
        match idx {
            [0, 0, 0, 0] => ints.e_core = v,
            [i, 0, 0, 0] if i > 0 => {}
            [i, j, 0, 0] if i > 0 && j > 0 => {
                let (p, q) = (i - 1, j - 1);
                for (a, b) in [(p, q), (q, p)] {
                    if let Some(prev) = seen_h[a * n + b].filter(|&l| l != line) {
                        if (ints.h[(a, b)] - v).abs() > SYMMETRY_TOL {
                            return Err(err(format!("one-electron integral conflicts with line {prev}")));
                        }
                    }
                    seen_h[a * n + b] = Some(line);
                }
                ints.set_h(p, q, v);
            }
            [i, j, k, l] if i > 0 && j > 0 && k > 0 && l > 0 => {
                let (p, q, r, s) = (i - 1, j - 1, k - 1, l - 1);
                for (a, b, c, d) in MolecularIntegrals::images(p, q, r, s) {
                    let at = ints.idx(a, b, c, d);
                    if let Some(prev) = seen_g[at].filter(|&l| l != line) {
                        if (ints.g[at] - v).abs() > SYMMETRY_TOL {
                            return Err(err(format!("two-electron integral violates symmetry with line {prev}")));
                        }
                    }
                    seen_g[at] = Some(line);
                }
                ints.set_g(p, q, r, s, v);
            }
            _ => return Err(err(format!("unsupported index pattern {idx:?}"))),
        }
    }
    ints.validate()?;
    Ok(ints)
}

/// Writes integrals in FCIDUMP format; values use shortest round-trip formatting.
pub fn write_fcidump(ints: &MolecularIntegrals) -> String {
    let n = ints.n_spatial;
    let mut out = String::new();
    let orbsym = vec!["1"; n].join(",");
    let _ = writeln!(out, "&FCI NORB={},NELEC={},MS2={},", n, ints.n_electrons, ints.ms2);
    let _ = writeln!(out, " ORBSYM={orbsym},");
    let _ = writeln!(out, " ISYM=1,");
    let _ = writeln!(out, "&END");
    for p in 0..n {
        for q in 0..=p {
            for r in 0..n {
                for s in 0..=r {
                    if p * (p + 1) / 2 + q < r * (r + 1) / 2 + s {
                        continue;
                    }
                    let v = ints.g(p, q, r, s);
                    if v != 0.0 {
                        let _ = writeln!(out, "{v:e} {} {} {} {}", p + 1, q + 1, r + 1, s + 1);
                    }
                }
            }
        }
    }
    for p in 0..n {
        for q in 0..=p {
            let v = ints.h[(p, q)];
            if v != 0.0 {
                let _ = writeln!(out, "{v:e} {} {} 0 0", p + 1, q + 1);
            }
        }
    }
    let _ = writeln!(out, "{:e} 0 0 0 0", ints.e_core);
    out
}

/// Seeded random spin-free integrals on `n_spatial` orbitals, half filled with a closed shell.
///
/// Uses ChaCha8 seeded from `seed`, whose output stream is platform independent.
/// Two-electron integrals are built as `Σ_L B^L_pq B^L_rs` from symmetric
/// factors, which gives 8-fold symmetry and a positive semidefinite supermatrix.
pub fn synth_integrals(n_spatial: usize, seed: u64) -> Result<MolecularIntegrals> {
    if !(2..=5).contains(&n_spatial) {
        return Err(Error::invalid(format!("synthetic systems need 2..=5 orbitals, got {n_spatial}")));
    }
    let n = n_spatial;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ints = MolecularIntegrals::zeros(n, 2 * (n / 2), 0);
    ints.e_core = rng.gen_range(-1.0..1.0);
    for p in 0..n {
        ints.h[(p, p)] = -1.5 + 0.7 * p as f64 + 0.1 * rng.gen_range(-1.0..1.0);
        for q in 0..p {
            ints.set_h(p, q, 0.15 * rng.gen_range(-1.0..1.0));
        }
    }
    let mut factors = Vec::with_capacity(n + 1);
    factors.push(DMatrix::from_fn(n, n, |p, q| if p == q { 0.6 } else { 0.0 }));
    for _ in 0..n {
        let mut b = DMatrix::zeros(n, n);
        for p in 0..n {
            for q in 0..=p {
                let v = 0.25 * rng.gen_range(-1.0..1.0);
                b[(p, q)] = v;
                b[(q, p)] = v;
            }
        }
        factors.push(b);
    }
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    let v: f64 = factors.iter().map(|b| b[(p, q)] * b[(r, s)]).sum();
                    let i = ints.idx(p, q, r, s);
                    ints.g[i] = v;
                }
            }
        }
    }
    Ok(ints)
}
