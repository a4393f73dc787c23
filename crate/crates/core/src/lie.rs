//! Real Lie algebras spanned by antisymmetric Fock-space matrices.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::family::Family;
use crate::fock::OrbitalSet;
use crate::generator::{build_generator, GeneratorSpec};
use crate::linalg::{column_space, null_space, rank, sorted_symmetric_eigen};
use crate::sparse::SparseMat;

/// Relative residual above which a new element counts as independent.
pub const INDEPENDENCE_TOL: f64 = 1e-8;
/// Relative singular-value threshold for center, derived algebra and ideals.
pub const RANK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Discovery,
    Appendix,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "discovery" => Ok(Mode::Discovery),
            "appendix" => Ok(Mode::Appendix),
            other => Err(Error::invalid(format!("unknown mode '{other}' (expected discovery or appendix)"))),
        }
    }
}

/// Incremental Gram-Schmidt basis under the Hilbert-Schmidt inner product.
#[derive(Debug, Clone, Default)]
pub struct OrthoBasis {
    pub vectors: Vec<SparseMat>,
}

impl OrthoBasis {
    /// Residual of `x` after two projection passes, and its norm relative to `x`.
    pub fn residual(&self, x: &SparseMat) -> (SparseMat, f64) {
        let n0 = x.norm();
        let mut r = x.clone();
        for _ in 0..2 {
            for v in &self.vectors {
                let c = v.inner(&r);
                if c != 0.0 {
                    r = r.add_scaled(-c, v);
                }
            }
        }
        let rel = if n0 > 0.0 { r.norm() / n0 } else { 0.0 };
        (r, rel)
    }

    /// Adds `x` if it is independent of the current span; returns whether it was added.
    pub fn try_add(&mut self, x: &SparseMat) -> bool {
        if x.norm() < 1e-12 {
            return false;
        }
        let (r, rel) = self.residual(x);
        if rel > INDEPENDENCE_TOL {
            let n = r.norm();
            self.vectors.push(r.scale(1.0 / n));
            true
        } else {
            false
        }
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

/// Result of a commutator closure.
#[derive(Debug, Clone)]
pub struct Closure {
    pub basis: Vec<SparseMat>,
    /// Span dimension after each round of brackets, starting with the seeds.
    pub levels: Vec<usize>,
}

/// Closes the span of `seeds` under commutators.
pub fn close(seeds: &[SparseMat], max_dim: usize) -> Result<Closure> {
    let mut ob = OrthoBasis::default();
    for s in seeds {
        ob.try_add(s);
    }
    let mut levels = vec![ob.len()];
    let mut fresh: Vec<usize> = (0..ob.len()).collect();
    while !fresh.is_empty() {
        let current = ob.vectors.clone();
        let is_fresh: Vec<bool> = (0..current.len()).map(|k| fresh.contains(&k)).collect();
        let pairs: Vec<(usize, usize)> = fresh
            .iter()
            .flat_map(|&i| (0..current.len()).map(move |j| (i, j)))
            .filter(|&(i, j)| j != i && !(is_fresh[j] && j < i))
            .collect();
        let brackets: Vec<SparseMat> = pairs.par_iter().map(|&(i, j)| current[i].commutator(&current[j])).collect();
        let before = ob.len();
        for b in &brackets {
            ob.try_add(b);
            if ob.len() > max_dim {
                return Err(Error::numerical(format!("closure exceeded {max_dim} dimensions")));
            }
        }
        fresh = (before..ob.len()).collect();
        levels.push(ob.len());
    }
    levels.pop();
    Ok(Closure { basis: ob.vectors, levels })
}

/// Structure constants `[A_i, A_j] = Σ_k f[i][j][k] A_k`.
#[derive(Debug, Clone)]
pub struct StructureConstants {
    m: usize,
    f: Vec<f64>,
    /// Largest relative residual of projecting a bracket onto the span.
    pub closure_residual: f64,
}

impl StructureConstants {
    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.f[(i * self.m + j) * self.m + k]
    }

    /// Bracket coefficient vector of `[A_i, A_j]`.
    pub fn bracket(&self, i: usize, j: usize) -> DVector<f64> {
        DVector::from_iterator(self.m, (0..self.m).map(|k| self.get(i, j, k)))
    }

    /// Adjoint matrix with `ad_i[(k, j)] = f[i][j][k]`.
    pub fn ad(&self, i: usize) -> DMatrix<f64> {
        DMatrix::from_fn(self.m, self.m, |k, j| self.get(i, j, k))
    }

    /// Adjoint of a general element with coordinates `x`.
    pub fn ad_of(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.m, self.m);
        for i in 0..self.m {
            if x[i] != 0.0 {
                out += self.ad(i) * x[i];
            }
        }
        out
    }

    /// Nonzero constants `(i, j, k, value)` with `i < j`, rounded to 12 digits.
    pub fn sparse_entries(&self, tol: f64) -> Vec<(usize, usize, usize, f64)> {
        let mut out = Vec::new();
        for i in 0..self.m {
            for j in i + 1..self.m {
                for k in 0..self.m {
                    let v = self.get(i, j, k);
                    if v.abs() > tol {
                        out.push((i, j, k, (v * 1e12).round() / 1e12));
                    }
                }
            }
        }
        out
    }

    pub fn from_dense(m: usize, f: Vec<f64>) -> Self {
        assert_eq!(f.len(), m * m * m);
        StructureConstants { m, f, closure_residual: 0.0 }
    }
}

/// A basis of antisymmetric matrices with its structure constants.
#[derive(Debug, Clone)]
pub struct LieAlgebraModel {
    pub family: Option<Family>,
    pub mode: Mode,
    pub orbitals: OrbitalSet,
    pub elements: Vec<SparseMat>,
    pub names: Vec<String>,
    pub specs: Vec<Option<GeneratorSpec>>,
    /// Position of each basis element among the listed elements (appendix mode).
    pub listed_index: Vec<Option<usize>>,
    /// All listed elements, including linearly dependent ones (appendix mode).
    pub listed: Vec<SparseMat>,
    pub listed_specs: Vec<GeneratorSpec>,
    /// Closure levels (discovery mode).
    pub levels: Vec<usize>,
    gram_inv: DMatrix<f64>,
    pub structure: StructureConstants,
}

impl LieAlgebraModel {
    pub fn for_family(family: Family, mode: Mode) -> Result<Self> {
        let set = family.orbitals();
        match mode {
            Mode::Discovery => {
                let (seeds, _) = family.symmetrized();
                let mats = seeds.iter().map(|s| build_generator(s, &set)).collect::<Result<Vec<_>>>()?;
                let closure = close(&mats, 512)?;
                let names = (1..=closure.basis.len()).map(|k| format!("D{k}")).collect();
                let m = closure.basis.len();
                let mut model = Self::from_elements(Some(family), Mode::Discovery, set, closure.basis, names, vec![None; m])?;
                model.levels = closure.levels;
                Ok(model)
            }
            Mode::Appendix => {
                let defs = family.listed_elements()?;
                let specs: Vec<GeneratorSpec> = defs.iter().map(|d| d.value.clone()).collect();
                let listed = specs.iter().map(|s| build_generator(s, &set)).collect::<Result<Vec<_>>>()?;
                let mut ob = OrthoBasis::default();
                let mut keep = Vec::new();
                for (k, x) in listed.iter().enumerate() {
                    if ob.try_add(x) {
                        keep.push(k);
                    }
                }
                let elements = keep.iter().map(|&k| listed[k].clone()).collect();
                let names = keep.iter().map(|&k| defs[k].name.clone()).collect();
                let bspecs = keep.iter().map(|&k| Some(specs[k].clone())).collect();
                let mut model = Self::from_elements(Some(family), Mode::Appendix, set, elements, names, bspecs)?;
                model.listed_index = keep.iter().map(|&k| Some(k)).collect();
                model.listed = listed;
                model.listed_specs = specs;
                Ok(model)
            }
        }
    }

    /// Builds a model from linearly independent antisymmetric matrices.
    pub fn from_elements(
        family: Option<Family>,
        mode: Mode,
        orbitals: OrbitalSet,
        elements: Vec<SparseMat>,
        names: Vec<String>,
        specs: Vec<Option<GeneratorSpec>>,
    ) -> Result<Self> {
        let m = elements.len();
        if m == 0 {
            return Err(Error::invalid("empty basis"));
        }
        if let Some(k) = elements.iter().position(|e| !e.is_antisymmetric(1e-12)) {
            return Err(Error::invalid(format!("element {} is not antisymmetric", names[k])));
        }
        let gram = DMatrix::from_fn(m, m, |a, b| elements[a].inner(&elements[b]));
        if rank(&gram, 1e-12) < m {
            return Err(Error::invalid("basis elements are linearly dependent"));
        }
        let gram_inv = gram.clone().try_inverse().ok_or_else(|| Error::numerical("singular Gram matrix"))?;
        let structure = compute_structure(&elements, &gram_inv)?;
        Ok(LieAlgebraModel {
            family,
            mode,
            orbitals,
            elements,
            names,
            specs,
            listed_index: vec![None; m],
            listed: Vec::new(),
            listed_specs: Vec::new(),
            levels: Vec::new(),
            gram_inv,
            structure,
        })
    }

    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    /// Coordinates of `x` in the basis and the relative residual of the projection.
    pub fn coordinates(&self, x: &SparseMat) -> (DVector<f64>, f64) {
        coordinates_with(&self.elements, &self.gram_inv, x)
    }

    pub fn matrix_of(&self, coords: &DVector<f64>) -> SparseMat {
        let mut out = SparseMat::zeros(self.orbitals.dim());
        for (k, &c) in coords.iter().enumerate() {
            if c.abs() > 1e-15 {
                out = out.add_scaled(c, &self.elements[k]);
            }
        }
        out
    }

    /// Coordinates of a combination of listed elements.
    pub fn listed_combination(&self, terms: &[(usize, i64)]) -> Result<SparseMat> {
        let mut out = SparseMat::zeros(self.orbitals.dim());
        for &(k, c) in terms {
            let e = self.listed.get(k).ok_or_else(|| Error::invalid(format!("A{} is not listed", k + 1)))?;
            out = out.add_scaled(c as f64, e);
        }
        Ok(out)
    }

    /// Center as orthonormal coordinate vectors (columns).
    pub fn center(&self) -> DMatrix<f64> {
        let m = self.dim();
        let mut stacked = DMatrix::zeros(m * m, m);
        for i in 0..m {
            stacked.view_mut((i * m, 0), (m, m)).copy_from(&self.structure.ad(i));
        }
        null_space(&stacked, RANK_TOL)
    }

    /// Derived algebra `[g, g]` as orthonormal coordinate vectors (columns).
    pub fn derived(&self) -> DMatrix<f64> {
        let m = self.dim();
        let cols: Vec<DVector<f64>> = (0..m)
            .flat_map(|i| (i + 1..m).map(move |j| (i, j)))
            .map(|(i, j)| self.structure.bracket(i, j))
            .collect();
        if cols.is_empty() {
            return DMatrix::zeros(m, 0);
        }
        column_space(&DMatrix::from_columns(&cols), RANK_TOL)
    }

    /// Killing form `B_ij = tr(ad_i ad_j)` in the basis.
    pub fn killing_form(&self) -> DMatrix<f64> {
        let m = self.dim();
        let ads: Vec<DMatrix<f64>> = (0..m).map(|i| self.structure.ad(i)).collect();
        let mut k = DMatrix::zeros(m, m);
        for i in 0..m {
            for j in i..m {
                let v = ads[i].component_mul(&ads[j].transpose()).sum();
                k[(i, j)] = v;
                k[(j, i)] = v;
            }
        }
        k
    }

    /// Whether every pairwise bracket among the given elements vanishes.
    pub fn verify_abelian(&self, idx: &[usize], tol: f64) -> bool {
        idx.iter().enumerate().all(|(a, &i)| {
            idx[a + 1..].iter().all(|&j| self.elements[i].commutator(&self.elements[j]).max_abs() <= tol)
        })
    }

    /// Decomposes the derived algebra into simple ideals.
    pub fn ideal_partition(&self, seed: u64) -> Result<IdealPartition> {
        ideal_partition(self, seed)
    }
}

fn coordinates_with(elements: &[SparseMat], gram_inv: &DMatrix<f64>, x: &SparseMat) -> (DVector<f64>, f64) {
    let b = DVector::from_iterator(elements.len(), elements.iter().map(|e| e.inner(x)));
    let c = gram_inv * b;
    let mut r = x.clone();
    for (k, &ck) in c.iter().enumerate() {
        if ck != 0.0 {
            r = r.add_scaled(-ck, &elements[k]);
        }
    }
    let n = x.norm();
    let rel = if n > 0.0 { r.norm() / n } else { 0.0 };
    (c, rel)
}

fn compute_structure(elements: &[SparseMat], gram_inv: &DMatrix<f64>) -> Result<StructureConstants> {
    let m = elements.len();
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect();
    let results: Vec<(usize, usize, DVector<f64>, f64)> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let br = elements[i].commutator(&elements[j]);
            let (c, rel) = coordinates_with(elements, gram_inv, &br);
            (i, j, c, rel)
        })
        .collect();
    let mut f = vec![0.0; m * m * m];
    let mut worst: f64 = 0.0;
    for (i, j, c, rel) in results {
        worst = worst.max(rel);
        for k in 0..m {
            let v = if c[k].abs() < 1e-13 { 0.0 } else { c[k] };
            f[(i * m + j) * m + k] = v;
            f[(j * m + i) * m + k] = -v;
        }
    }
    if worst > INDEPENDENCE_TOL {
        return Err(Error::numerical(format!(
            "basis is not closed under commutators (relative residual {worst:e})"
        )));
    }
    Ok(StructureConstants { m, f, closure_residual: worst })
}

/// Simple ideals of the derived algebra.
#[derive(Debug, Clone)]
pub struct IdealPartition {
    /// Each ideal as orthonormal coordinate vectors (columns) in the model basis.
    pub ideals: Vec<DMatrix<f64>>,
    /// Basis elements lying entirely inside each ideal.
    pub members: Vec<Vec<usize>>,
    /// Largest eigenvalue of the Killing form restricted to the derived algebra.
    pub killing_max_eigenvalue: f64,
}

impl IdealPartition {
    pub fn dims(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.ideals.iter().map(|i| i.ncols()).collect();
        d.sort_unstable();
        d
    }

    /// Multiset of ideal dimensions as `(dimension, count)`, ascending.
    pub fn multiset(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = Vec::new();
        for d in self.dims() {
            match out.last_mut() {
                Some((dd, c)) if *dd == d => *c += 1,
                _ => out.push((d, 1)),
            }
        }
        out
    }
}

pub fn format_multiset(ms: &[(usize, usize)]) -> String {
    ms.iter().map(|(d, c)| format!("{d}x{c}")).collect::<Vec<_>>().join(",")
}

/// Killing-orthonormal frame of the derived algebra and the adjoint action in it.
struct DerivedFrame {
    /// Columns: frame vectors in model coordinates.
    frame: DMatrix<f64>,
    /// Adjoint of each frame vector, antisymmetric in frame coordinates.
    ads: Vec<DMatrix<f64>>,
    killing_max: f64,
}

fn derived_frame(model: &LieAlgebraModel) -> Result<DerivedFrame> {
    let w = model.derived();
    let d = w.ncols();
    if d == 0 {
        return Ok(DerivedFrame { frame: w, ads: Vec::new(), killing_max: 0.0 });
    }
    let k = model.killing_form();
    let kd = w.transpose() * &k * &w;
    let (vals, vecs) = sorted_symmetric_eigen(&kd);
    let killing_max = *vals.last().unwrap();
    let scale = vals.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if killing_max > -1e-9 * scale.max(1.0) {
        return Err(Error::numerical(format!(
            "Killing form on the derived algebra is not negative definite (max eigenvalue {killing_max:e})"
        )));
    }
    let inv_sqrt = DMatrix::from_diagonal(&DVector::from_iterator(d, vals.iter().map(|v| 1.0 / (-v).sqrt())));
    let frame = &w * vecs * inv_sqrt;
    // Express ad_x restricted to the derived algebra in frame coordinates.
    let pinv = frame.clone().pseudo_inverse(1e-12).map_err(|e| Error::numerical(e.to_string()))?;
    let ads = (0..d)
        .map(|a| {
            let x = frame.column(a).into_owned();
            &pinv * model.structure.ad_of(&x) * &frame
        })
        .collect();
    Ok(DerivedFrame { frame, ads, killing_max })
}

fn orth(m: &DMatrix<f64>) -> DMatrix<f64> {
    column_space(m, RANK_TOL)
}

/// Smallest ad-invariant subspace containing the columns of `v` (frame coordinates).
fn generated_ideal(ads: &[DMatrix<f64>], v: &DMatrix<f64>) -> DMatrix<f64> {
    let mut cur = orth(v);
    loop {
        let mut cols: Vec<DVector<f64>> = cur.column_iter().map(|c| c.into_owned()).collect();
        for a in ads {
            let img = a * &cur;
            cols.extend(img.column_iter().map(|c| c.into_owned()));
        }
        let next = orth(&DMatrix::from_columns(&cols));
        if next.ncols() == cur.ncols() {
            return next;
        }
        cur = next;
    }
}

/// Splits `block` into `block ∩ ideal` and its orthogonal complement inside `block`.
fn split_block(block: &DMatrix<f64>, ideal: &DMatrix<f64>) -> Option<(DMatrix<f64>, DMatrix<f64>)> {
    let d = block.nrows();
    let proj_out = DMatrix::identity(d, d) - ideal * ideal.transpose();
    let ns = null_space(&(&proj_out * block), 1e-7);
    if ns.ncols() == 0 || ns.ncols() == block.ncols() {
        return None;
    }
    let inside = orth(&(block * &ns));
    let rest = block - &inside * (inside.transpose() * block);
    let outside = orth(&rest);
    Some((inside, outside))
}

/// Splits a block with a random symmetric element of the commutant of its adjoint action.
fn split_by_commutant(ads: &[DMatrix<f64>], block: &DMatrix<f64>, rng: &mut ChaCha8Rng) -> Vec<DMatrix<f64>> {
    let b = block.ncols();
    if b <= 1 {
        return vec![block.clone()];
    }
    // Restrict the action to the block.
    let local: Vec<DMatrix<f64>> = (0..b)
        .map(|k| {
            let x = block.column(k);
            let mut ad = DMatrix::zeros(block.nrows(), block.nrows());
            for (a, m) in ads.iter().enumerate() {
                if x[a] != 0.0 {
                    ad += m * x[a];
                }
            }
            block.transpose() * ad * block
        })
        .collect();
    // Two random elements generically generate the block.
    let gens: Vec<DMatrix<f64>> = (0..2)
        .map(|_| {
            let mut g = DMatrix::zeros(b, b);
            for l in &local {
                g += l * rng.gen_range(-1.0..1.0);
            }
            g
        })
        .collect();
    let n2 = b * b;
    let mut sys = DMatrix::zeros(gens.len() * n2, n2);
    for (gi, g) in gens.iter().enumerate() {
        // [g, X] = g X - X g, with X flattened column-major.
        for col in 0..b {
            for row in 0..b {
                let xi = col * b + row;
                for r in 0..b {
                    sys[(gi * n2 + col * b + r, xi)] += g[(r, row)];
                }
                for c in 0..b {
                    sys[(gi * n2 + c * b + row, xi)] -= g[(col, c)];
                }
            }
        }
    }
    let ns = null_space(&sys, 1e-9);
    if ns.ncols() <= 1 {
        return vec![block.clone()];
    }
    let mut x = DMatrix::zeros(b, b);
    for k in 0..ns.ncols() {
        let w = rng.gen_range(-1.0..1.0);
        x += DMatrix::from_column_slice(b, b, ns.column(k).as_slice()) * w;
    }
    let (vals, vecs) = sorted_symmetric_eigen(&x);
    let spread = vals.last().unwrap() - vals[0];
    let mut groups: Vec<Vec<usize>> = vec![vec![0]];
    for k in 1..b {
        if vals[k] - vals[k - 1] > 1e-6 * spread.max(1e-12) {
            groups.push(Vec::new());
        }
        groups.last_mut().unwrap().push(k);
    }
    groups
        .into_iter()
        .map(|g| {
            let cols: Vec<_> = g.iter().map(|&k| vecs.column(k).into_owned()).collect();
            orth(&(block * DMatrix::from_columns(&cols)))
        })
        .collect()
}

fn ideal_partition(model: &LieAlgebraModel, seed: u64) -> Result<IdealPartition> {
    let fr = derived_frame(model)?;
    let d = fr.frame.ncols();
    if d == 0 {
        return Ok(IdealPartition { ideals: Vec::new(), members: Vec::new(), killing_max_eigenvalue: 0.0 });
    }
    let pinv = fr.frame.clone().pseudo_inverse(1e-12).map_err(|e| Error::numerical(e.to_string()))?;
    // Frame coordinates of the derived component of each basis element.
    let center = model.center();
    let m = model.dim();
    let mut comps = Vec::new();
    for i in 0..m {
        let mut e = DVector::zeros(m);
        e[i] = 1.0;
        let off_center = &e - &center * (center.transpose() * &e);
        let y = &pinv * off_center;
        if y.norm() > 1e-9 {
            comps.push(y);
        }
    }
    // Refine with ideals generated by basis elements.
    let mut blocks = vec![DMatrix::<f64>::identity(d, d)];
    for y in &comps {
        let ideal = generated_ideal(&fr.ads, &DMatrix::from_columns(std::slice::from_ref(y)));
        if ideal.ncols() == d {
            continue;
        }
        let mut next = Vec::new();
        for b in blocks {
            match split_block(&b, &ideal) {
                Some((inside, outside)) => {
                    next.push(inside);
                    next.push(outside);
                }
                None => next.push(b),
            }
        }
        blocks = next;
    }
    // Finish with commutant splits until stable.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut done = Vec::new();
    while let Some(b) = blocks.pop() {
        let parts = split_by_commutant(&fr.ads, &b, &mut rng);
        if parts.len() == 1 {
            done.push(b);
        } else {
            blocks.extend(parts);
        }
    }
    done.sort_by_key(|b| b.ncols());
    let ideals: Vec<DMatrix<f64>> = done.iter().map(|b| orth(&(&fr.frame * b))).collect();
    let members = ideals
        .iter()
        .map(|ideal| {
            (0..m)
                .filter(|&i| {
                    let mut e = DVector::zeros(m);
                    e[i] = 1.0;
                    let r = &e - ideal * (ideal.transpose() * &e);
                    r.norm() < 1e-8
                })
                .collect()
        })
        .collect();
    Ok(IdealPartition { ideals, members, killing_max_eigenvalue: fr.killing_max })
}

/// Whether the span of the given coordinate vectors is invariant under the adjoint action.
pub fn is_ideal(model: &LieAlgebraModel, span: &DMatrix<f64>) -> bool {
    let q = orth(span);
    let m = model.dim();
    let proj_out = DMatrix::identity(m, m) - &q * q.transpose();
    (0..m).all(|i| (&proj_out * model.structure.ad(i) * &q).amax() < 1e-8)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn so3() -> LieAlgebraModel {
        // Independent oracle: rotation generators L_x, L_y, L_z of R^3 padded to 4x4.
        let l = |a: usize, b: usize| SparseMat::from_triplets(4, vec![(a, b, -1.0), (b, a, 1.0)]);
        let elems = vec![l(1, 2), l(2, 0), l(0, 1)];
        LieAlgebraModel::from_elements(
            None,
            Mode::Appendix,
            OrbitalSet::new(&[crate::fock::Label::I]),
            elems,
            vec!["X".into(), "Y".into(), "Z".into()],
            vec![None; 3],
        )
        .unwrap()
    }

    #[test]
    fn so3_structure() {
        let g = so3();
        assert!((g.structure.get(0, 1, 2) - 1.0).abs() < 1e-14);
        assert!((g.structure.get(1, 0, 2) + 1.0).abs() < 1e-14);
        let k = g.killing_form();
        assert!((k + DMatrix::identity(3, 3) * 2.0).amax() < 1e-12);
        assert_eq!(g.center().ncols(), 0);
        assert_eq!(g.derived().ncols(), 3);
        let p = g.ideal_partition(0).unwrap();
        assert_eq!(p.dims(), vec![3]);
    }

    #[test]
    fn closure_of_two_rotations_is_so3() {
        let l = |a: usize, b: usize| SparseMat::from_triplets(3, vec![(a, b, -1.0), (b, a, 1.0)]);
        let c = close(&[l(1, 2), l(2, 0)], 10).unwrap();
        assert_eq!(c.basis.len(), 3);
        assert_eq!(c.levels, vec![2, 3]);
    }

    #[test]
    fn direct_sum_splits() {
        // so(3) ⊕ so(3) acting on R^3 ⊕ R^3, plus one central element on an extra pair.
        let n = 8;
        let l = |a: usize, b: usize| SparseMat::from_triplets(n, vec![(a, b, -1.0), (b, a, 1.0)]);
        let x1 = l(1, 2);
        let x2 = l(4, 5);
        let mixed = [x1.add(&x2), l(2, 0).sub(&l(5, 3)), l(0, 1).add(&l(3, 4).scale(2.0)), l(2, 0), l(0, 1), l(1, 2), l(6, 7)];
        let mut ob = OrthoBasis::default();
        let mut elems = Vec::new();
        for e in mixed {
            if ob.try_add(&e) {
                elems.push(e);
            }
        }
        let k = elems.len();
        let g = LieAlgebraModel::from_elements(
            None,
            Mode::Appendix,
            OrbitalSet::new(&[crate::fock::Label::I, crate::fock::Label::J]),
            elems,
            (0..k).map(|i| format!("E{i}")).collect(),
            vec![None; k],
        )
        .unwrap();
        assert_eq!(g.dim(), 7);
        assert_eq!(g.center().ncols(), 1);
        let p = g.ideal_partition(3).unwrap();
        assert_eq!(p.dims(), vec![3, 3]);
        for ideal in &p.ideals {
            assert!(is_ideal(&g, ideal));
        }
    }
}
