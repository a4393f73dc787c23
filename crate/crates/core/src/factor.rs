//! Exact factorization of `exp(θ Σ c_i E_i)` into a product of central and
//! semisimple one-parameter factors.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::Family;
use crate::generator::build_generator;
use crate::lie::{LieAlgebraModel, Mode};
use crate::linalg::expm;
use crate::optim::{bfgs, BfgsOptions};
use crate::sparse::SparseMat;

/// Acceptance threshold on the adjoint-representation cost.
pub const COST_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct FactorOptions {
    pub seed: u64,
    pub restarts: usize,
    pub max_iter: usize,
    /// Relative scale of the random perturbation used for restarts.
    pub noise: f64,
    pub cost_tol: f64,
    pub objective: Objective,
}

/// Representation in which the product is matched to the target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    /// Adjoint representation of the semisimple part only. Not faithful on the
    /// group: products can match here yet differ in Fock space by a central
    /// element of order two.
    Adjoint,
    /// Invariant blocks of the Fock-space representation (faithful).
    Faithful,
}

impl std::str::FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "adjoint" => Ok(Objective::Adjoint),
            "faithful" => Ok(Objective::Faithful),
            other => Err(Error::invalid(format!("unknown objective '{other}' (expected adjoint or faithful)"))),
        }
    }
}

impl Default for FactorOptions {
    fn default() -> Self {
        FactorOptions { seed: 0, restarts: 8, max_iter: 2000, noise: 0.3, cost_tol: COST_TOL, objective: Objective::Faithful }
    }
}

#[derive(Debug, Clone)]
enum ClosedForm {
    /// `D³ = -D`: `exp(tD) = I + sin t D + (1 - cos t) D²`.
    Cubic([DMatrix<f64>; 2]),
    /// `D⁵ + 5D³ + 4D = 0`: quartic polynomial in `D`.
    Quintic([DMatrix<f64>; 4]),
    None,
}

/// `exp(t D)` for a fixed matrix `D`, using closed forms when the spectrum of
/// `D` lies in `i{0, ±1}` or `i{0, ±1, ±2}`.
#[derive(Debug, Clone)]
pub struct OneParameterGroup {
    d: DMatrix<f64>,
    form: ClosedForm,
}

impl OneParameterGroup {
    pub fn new(d: DMatrix<f64>) -> Self {
        let scale = d.amax().max(1.0);
        let d2 = &d * &d;
        let d3 = &d2 * &d;
        let form = if (&d3 + &d).amax() <= 1e-10 * scale.powi(3) {
            ClosedForm::Cubic([d.clone(), d2])
        } else {
            let d4 = &d2 * &d2;
            let d5 = &d4 * &d;
            if (&d5 + &d3 * 5.0 + &d * 4.0).amax() <= 1e-10 * scale.powi(5) {
                ClosedForm::Quintic([d.clone(), d2, d3, d4])
            } else {
                ClosedForm::None
            }
        };
        OneParameterGroup { d, form }
    }

    pub fn generator(&self) -> &DMatrix<f64> {
        &self.d
    }

    pub fn has_closed_form(&self) -> bool {
        !matches!(self.form, ClosedForm::None)
    }

    pub fn exp(&self, t: f64) -> DMatrix<f64> {
        let n = self.d.nrows();
        match &self.form {
            ClosedForm::Cubic([d1, d2]) => DMatrix::identity(n, n) + d1 * t.sin() + d2 * (1.0 - t.cos()),
            ClosedForm::Quintic([d1, d2, d3, d4]) => {
                let (s, c) = t.sin_cos();
                let (s2, c2) = (2.0 * t).sin_cos();
                let a1 = (8.0 * s - s2) / 6.0;
                let a2 = (15.0 - 16.0 * c + c2) / 12.0;
                let a3 = (2.0 * s - s2) / 6.0;
                let a4 = (3.0 - 4.0 * c + c2) / 12.0;
                DMatrix::identity(n, n) + d1 * a1 + d2 * a2 + d3 * a3 + d4 * a4
            }
            ClosedForm::None => expm(&(&self.d * t)),
        }
    }
}

/// Product `E_1(t_1) ⋯ E_n(t_n)` and the cost `‖T - W‖²_F` with its gradient.
pub struct ProductCost {
    pub factors: Vec<OneParameterGroup>,
    pub target: DMatrix<f64>,
}

impl ProductCost {
    pub fn product(&self, t: &DVector<f64>) -> DMatrix<f64> {
        let n = self.target.nrows();
        self.factors.iter().zip(t.iter()).fold(DMatrix::identity(n, n), |w, (f, &tk)| w * f.exp(tk))
    }

    pub fn cost(&self, t: &DVector<f64>) -> f64 {
        (&self.target - self.product(t)).norm_squared()
    }

    /// Cost and analytic gradient from prefix and suffix products.
    pub fn cost_grad(&self, t: &DVector<f64>) -> (f64, DVector<f64>) {
        let n = self.target.nrows();
        let k = self.factors.len();
        let exps: Vec<DMatrix<f64>> = self.factors.iter().zip(t.iter()).map(|(f, &tk)| f.exp(tk)).collect();
        let mut prefix = Vec::with_capacity(k + 1);
        prefix.push(DMatrix::identity(n, n));
        for e in &exps {
            let next = prefix.last().unwrap() * e;
            prefix.push(next);
        }
        let w = &prefix[k];
        let r = &self.target - w;
        let cost = r.norm_squared();
        // dC/dt_j = -2 <R, P_j D_j E_j S_j> = -2 tr(Rᵀ P_j D_j P_j⁻¹ W) with S_j the suffix.
        let mut grad = DVector::zeros(k);
        let mut suffix = DMatrix::identity(n, n);
        for j in (0..k).rev() {
            suffix = &exps[j] * suffix;
            // Left factor Rᵀ P_j, right factor D_j E_j S_j = D_j · suffix.
            let left = r.transpose() * &prefix[j];
            let right = self.factors[j].generator() * &suffix;
            grad[j] = -2.0 * left.component_mul(&right.transpose()).sum();
        }
        (cost, grad)
    }
}

/// Sum of product costs over independent blocks sharing the parameters.
pub struct BlockCost {
    pub blocks: Vec<ProductCost>,
}

impl BlockCost {
    pub fn cost(&self, t: &DVector<f64>) -> f64 {
        self.blocks.iter().map(|b| b.cost(t)).sum()
    }

    pub fn cost_grad(&self, t: &DVector<f64>) -> (f64, DVector<f64>) {
        let mut c = 0.0;
        let mut g = DVector::zeros(t.len());
        for b in &self.blocks {
            let (cb, gb) = b.cost_grad(t);
            c += cb;
            g += gb;
        }
        (c, g)
    }
}

/// Nontrivial invariant blocks of Fock space under the given matrices, with
/// blocks carrying identical restricted matrices listed once.
pub fn invariant_blocks(mats: &[SparseMat]) -> Vec<Vec<usize>> {
    let n = mats[0].dim();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for m in mats {
        for (r, c, _) in m.iter() {
            let (a, b) = (find(&mut parent, r), find(&mut parent, c));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for x in 0..n {
        let r = find(&mut parent, x);
        groups.entry(r).or_default().push(x);
    }
    let mut seen = std::collections::HashSet::new();
    groups
        .into_values()
        .filter(|g| g.len() > 1)
        .filter(|g| {
            let key: Vec<i64> = mats
                .iter()
                .flat_map(|m| g.iter().flat_map(move |&r| g.iter().map(move |&c| (m.get(r, c) * 1e12).round() as i64)))
                .collect();
            seen.insert(key)
        })
        .collect()
}

fn restrict(m: &SparseMat, block: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(block.len(), block.len(), |a, b| m.get(block[a], block[b]))
}

/// Prepared factorization problem for one family.
#[derive(Debug, Clone)]
pub struct Factorizer {
    pub family: Family,
    pub model: LieAlgebraModel,
    /// Center basis as coordinate vectors, in listed order.
    pub center: Vec<DVector<f64>>,
    pub center_mats: Vec<SparseMat>,
    /// Basis positions of the semisimple factors.
    pub semisimple: Vec<usize>,
    /// Adjoint matrices of the semisimple factors restricted to the semisimple part.
    pub ad: Vec<OneParameterGroup>,
    /// Invariant Fock-space blocks used by the faithful objective.
    pub blocks: Vec<Vec<usize>>,
    split: DMatrix<f64>,
    generator: SparseMat,
    generator_coords: DVector<f64>,
}

impl Factorizer {
    pub fn new(family: Family) -> Result<Self> {
        let model = LieAlgebraModel::for_family(family, Mode::Appendix)?;
        let m = model.dim();
        let mut center = Vec::new();
        let mut center_mats = Vec::new();
        for c in family.center_combinations()? {
            let z = model.listed_combination(&c.value)?;
            let (coords, res) = model.coordinates(&z);
            if res > 1e-9 {
                return Err(Error::numerical(format!("{} is outside the algebra", c.name)));
            }
            center.push(coords);
            center_mats.push(z);
        }
        let derived = model.derived();
        let semisimple: Vec<usize> = (0..m)
            .filter(|&i| {
                let mut e = DVector::zeros(m);
                e[i] = 1.0;
                (&e - &derived * (derived.transpose() * &e)).norm() < 1e-8
            })
            .collect();
        if semisimple.len() + center.len() != m {
            return Err(Error::numerical(format!(
                "basis does not split into center ({}) and semisimple elements ({}) of total {m}",
                center.len(),
                semisimple.len()
            )));
        }
        let mut cols: Vec<DVector<f64>> = center.clone();
        for &s in &semisimple {
            let mut e = DVector::zeros(m);
            e[s] = 1.0;
            cols.push(e);
        }
        let split = DMatrix::from_columns(&cols)
            .try_inverse()
            .ok_or_else(|| Error::numerical("center and semisimple elements are dependent"))?;
        let ad = semisimple
            .iter()
            .map(|&s| {
                let full = model.structure.ad(s);
                OneParameterGroup::new(DMatrix::from_fn(semisimple.len(), semisimple.len(), |a, b| {
                    full[(semisimple[a], semisimple[b])]
                }))
            })
            .collect();
        let (specs, coeffs) = family.symmetrized();
        let mut generator = SparseMat::zeros(model.orbitals.dim());
        for (s, c) in specs.iter().zip(&coeffs) {
            generator = generator.add_scaled(*c, &build_generator(s, &model.orbitals)?);
        }
        let (generator_coords, res) = model.coordinates(&generator);
        if res > 1e-9 {
            return Err(Error::numerical("symmetrized generator is outside the algebra"));
        }
        let blocks = invariant_blocks(&model.elements);
        Ok(Factorizer { family, model, center, center_mats, semisimple, ad, blocks, split, generator, generator_coords })
    }

    /// The symmetrized generator `Σ c_i E_i` as a Fock matrix.
    pub fn generator(&self) -> &SparseMat {
        &self.generator
    }

    /// Central weights `γ` and semisimple coordinates `d` with `x = Σ γ_k Z_k + Σ d_s A_s`.
    pub fn central_split(&self) -> (DVector<f64>, DVector<f64>) {
        let y = &self.split * &self.generator_coords;
        let k = self.center.len();
        (y.rows(0, k).into_owned(), y.rows(k, self.semisimple.len()).into_owned())
    }

    /// Target `exp(θ ad(Σ d_s A_s))` on the semisimple part.
    pub fn semisimple_target(&self, theta: f64) -> DMatrix<f64> {
        let (_, d) = self.central_split();
        let n = self.semisimple.len();
        let mut a = DMatrix::zeros(n, n);
        for (f, &ds) in self.ad.iter().zip(d.iter()) {
            a += f.generator() * ds;
        }
        expm(&(a * theta))
    }

    /// Semisimple part `Σ d_s A_s` of the generator as a Fock matrix.
    pub fn semisimple_generator(&self) -> SparseMat {
        let (_, d) = self.central_split();
        let mut x = SparseMat::zeros(self.model.orbitals.dim());
        for (&s, &ds) in self.semisimple.iter().zip(d.iter()) {
            x = x.add_scaled(ds, &self.model.elements[s]);
        }
        x
    }

    pub fn adjoint_cost(&self, theta: f64) -> ProductCost {
        ProductCost { factors: self.ad.clone(), target: self.semisimple_target(theta) }
    }

    pub fn faithful_cost(&self, theta: f64) -> BlockCost {
        let x = self.semisimple_generator();
        let blocks = self
            .blocks
            .iter()
            .map(|b| ProductCost {
                factors: self.semisimple.iter().map(|&s| OneParameterGroup::new(restrict(&self.model.elements[s], b))).collect(),
                target: expm(&(restrict(&x, b) * theta)),
            })
            .collect();
        BlockCost { blocks }
    }

    pub fn factorize(&self, theta: f64, opts: &FactorOptions) -> Result<Factorization> {
        let (gamma, d) = self.central_split();
        let adjoint = self.adjoint_cost(theta);
        let faithful = self.faithful_cost(theta);
        let bopts = BfgsOptions { max_iter: opts.max_iter, f_target: 1e-28, gtol: 1e-15 };
        let x0 = &d * theta;
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let mut best: Option<(DVector<f64>, f64)> = None;
        let mut iterations = 0;
        let mut restarts = 0;
        for attempt in 0..=opts.restarts {
            let start = if attempt == 0 {
                x0.clone()
            } else {
                restarts += 1;
                // The perturbation doubles on every restart, capped at π.
                let sigma = (opts.noise * (1.0 + theta.abs()) * 2f64.powi(attempt as i32 - 1)).min(std::f64::consts::PI);
                x0.map(|v| v + sigma * rng.gen_range(-1.0..1.0))
            };
            let r = match opts.objective {
                Objective::Adjoint => bfgs(|t| adjoint.cost_grad(t), start, &bopts),
                Objective::Faithful => bfgs(|t| faithful.cost_grad(t), start, &bopts),
            };
            iterations += r.iterations;
            if best.as_ref().is_none_or(|b| r.f < b.1) {
                best = Some((r.x, r.f));
            }
            if best.as_ref().unwrap().1 < opts.cost_tol {
                break;
            }
        }
        let (t, objective_value) = best.unwrap();
        if objective_value >= opts.cost_tol {
            return Err(Error::NotConverged { best_cost: objective_value, restarts });
        }
        let cost = adjoint.cost(&t);
        let central = gamma
            .iter()
            .enumerate()
            .map(|(k, &g)| CentralFactor { z_index: k + 1, angle: theta * g })
            .collect();
        let semisimple = self
            .semisimple
            .iter()
            .zip(t.iter())
            .map(|(&s, &ts)| SemisimpleFactor {
                basis_index: self.model.listed_index[s].map(|k| k + 1).unwrap_or(s + 1),
                name: self.model.names[s].clone(),
                t: ts,
            })
            .collect();
        let mut out = Factorization {
            family: self.family,
            theta,
            central,
            semisimple,
            cost_residual: cost,
            fock_residual: f64::NAN,
            iterations,
            restarts,
            seed: opts.seed,
            objective: opts.objective,
        };
        out.fock_residual = self.fock_residual(&out)?;
        Ok(out)
    }

    /// Fock-space matrices of the factors in product order.
    pub fn factor_matrices(&self, fac: &Factorization) -> Vec<(SparseMat, f64)> {
        let mut out = Vec::new();
        for c in &fac.central {
            out.push((self.center_mats[c.z_index - 1].clone(), c.angle));
        }
        for (s, f) in self.semisimple.iter().zip(&fac.semisimple) {
            out.push((self.model.elements[*s].clone(), f.t));
        }
        out
    }

    /// Max-abs deviation of the factor product from the dense exponential in Fock space.
    pub fn fock_residual(&self, fac: &Factorization) -> Result<f64> {
        let n = self.model.orbitals.dim();
        let mut u = DMatrix::<f64>::identity(n, n);
        for (a, t) in self.factor_matrices(fac).iter().rev() {
            u = apply_factor(a, *t, &u)?;
        }
        let exact = expm(&(self.generator.to_dense() * fac.theta));
        Ok((u - exact).amax())
    }
}

/// `exp(t A) · M` for an antisymmetric `A` with `A³ = -A`.
pub fn apply_factor(a: &SparseMat, t: f64, m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let a2 = a.matmul(a);
    if a2.matmul(a).add(a).max_abs() > 1e-10 {
        return Ok(expm(&(a.to_dense() * t)) * m);
    }
    let am = a.mul_dense(m);
    let a2m = a.mul_dense(&am);
    Ok(m + am * t.sin() + a2m * (1.0 - t.cos()))
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CentralFactor {
    pub z_index: usize,
    pub angle: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SemisimpleFactor {
    /// 1-based index of the listed element.
    pub basis_index: usize,
    pub name: String,
    pub t: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Factorization {
    pub family: Family,
    pub theta: f64,
    pub central: Vec<CentralFactor>,
    pub semisimple: Vec<SemisimpleFactor>,
    pub cost_residual: f64,
    pub fock_residual: f64,
    pub iterations: usize,
    pub restarts: usize,
    pub seed: u64,
    pub objective: Objective,
}

/// Evenly spaced angles in `[-π, π]`.
pub fn theta_grid(points: usize) -> Vec<f64> {
    use std::f64::consts::PI;
    if points == 1 {
        return vec![0.0];
    }
    (0..points).map(|k| -PI + 2.0 * PI * k as f64 / (points - 1) as f64).collect()
}
