//! Adaptive ansatz growth with analytic parameter gradients.

use nalgebra::DVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{apply_product, Ladder};
use crate::optim::{bfgs, BfgsOptions};
use crate::sparse::SparseMat;

use super::hamiltonian::{build_hamiltonian, exact_ground, expectation, qubit, s2_operator, spin_eigenvalue, Sector};
use super::integrals::{synth_integrals, MolecularIntegrals};
use super::pool::{build_pool, OperatorPool, OrbitalSpace, PoolKind};

/// `exp(θA)·ψ` by a scaled Taylor series.
pub fn apply_exp_generator(state: &[f64], a: &SparseMat, theta: f64) -> Vec<f64> {
    let mut out = state.to_vec();
    if theta == 0.0 || a.is_zero() {
        return out;
    }
    let norm1 = (0..a.dim()).map(|r| a.row(r).map(|(_, v)| v.abs()).sum::<f64>()).fold(0.0, f64::max);
    let steps = ((theta.abs() * norm1) / 0.5).ceil().max(1.0) as usize;
    let h = theta / steps as f64;
    let mut term = vec![0.0; out.len()];
    let mut next = vec![0.0; out.len()];
    for _ in 0..steps {
        let scale = out.iter().map(|v| v.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        term.copy_from_slice(&out);
        for k in 1..=40 {
            a.matvec_into(&term, &mut next);
            let f = h / k as f64;
            let mut big = 0.0f64;
            for (t, n) in term.iter_mut().zip(&next) {
                *t = n * f;
                big = big.max(t.abs());
            }
            for (o, t) in out.iter_mut().zip(&term) {
                *o += t;
            }
            if big <= 1e-18 * scale {
                break;
            }
        }
    }
    out
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Ansatz state `Π_k exp(θ_k A_k) ψ₀`, with the first operator applied first.
pub fn ansatz_state(ops: &[&SparseMat], params: &[f64], reference: &[f64]) -> Vec<f64> {
    ops.iter().zip(params).fold(reference.to_vec(), |psi, (a, t)| apply_exp_generator(&psi, a, *t))
}

/// Energy and its gradient with respect to all ansatz parameters.
pub fn energy_and_gradient(h: &SparseMat, ops: &[&SparseMat], params: &[f64], reference: &[f64]) -> (f64, Vec<f64>) {
    let psi = ansatz_state(ops, params, reference);
    let mut sigma = h.matvec(&psi);
    let energy = dot(&psi, &sigma);
    let mut phi = psi;
    let mut grad = vec![0.0; ops.len()];
    for k in (0..ops.len()).rev() {
        grad[k] = 2.0 * dot(&sigma, &ops[k].matvec(&phi));
        if k > 0 {
            phi = apply_exp_generator(&phi, ops[k], -params[k]);
            sigma = apply_exp_generator(&sigma, ops[k], -params[k]);
        }
    }
    (energy, grad)
}

/// One creation string applied to the vacuum, written leftmost operator first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeterminantTerm {
    pub amplitude: f64,
    /// Spin orbitals such as `"0a"` or `"2b"`.
    pub create: Vec<String>,
}

/// A normalized reference built from creation strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reference {
    pub terms: Vec<DeterminantTerm>,
}

fn parse_spin_orbital(s: &str, n_spatial: usize) -> Result<usize> {
    let (num, spin) = s.split_at(s.len().saturating_sub(1));
    let p: usize = num.parse().map_err(|_| Error::invalid(format!("bad spin orbital '{s}'")))?;
    let beta = match spin {
        "a" => false,
        "b" => true,
        _ => return Err(Error::invalid(format!("bad spin orbital '{s}' (expected e.g. 0a, 1b)"))),
    };
    if p >= n_spatial {
        return Err(Error::invalid(format!("spin orbital '{s}' out of range")));
    }
    Ok(qubit(p, beta))
}

impl Reference {
    /// Lowest orbitals doubly occupied, with a leftover electron in alpha.
    pub fn closed_shell(n_electrons: usize) -> Self {
        let create = (0..n_electrons).map(|k| format!("{}{}", k / 2, if k % 2 == 0 { 'a' } else { 'b' })).collect();
        Reference { terms: vec![DeterminantTerm { amplitude: 1.0, create }] }
    }

    /// `m_s = 0` triplet with `core` doubly occupied orbitals and open shells `p`, `q`.
    pub fn open_shell_triplet(core: usize, p: usize, q: usize) -> Self {
        let base: Vec<String> = (0..core).flat_map(|k| [format!("{k}a"), format!("{k}b")]).collect();
        let term = |sp: char, sq: char| {
            let mut create = base.clone();
            create.push(format!("{p}{sp}"));
            create.push(format!("{q}{sq}"));
            DeterminantTerm { amplitude: std::f64::consts::FRAC_1_SQRT_2, create }
        };
        Reference { terms: vec![term('b', 'a'), term('a', 'b')] }
    }

    pub fn state(&self, n_spatial: usize) -> Result<Vec<f64>> {
        let mut psi = vec![0.0; 1 << (2 * n_spatial)];
        for t in &self.terms {
            let ops = t.create.iter().map(|s| parse_spin_orbital(s, n_spatial).map(Ladder::create)).collect::<Result<Vec<_>>>()?;
            if let Some((s, sign)) = apply_product(0, &ops) {
                psi[s as usize] += sign * t.amplitude;
            }
        }
        let norm = dot(&psi, &psi).sqrt();
        if norm < 1e-12 {
            return Err(Error::invalid("reference state vanishes"));
        }
        psi.iter_mut().for_each(|v| *v /= norm);
        Ok(psi)
    }

    /// Electron count and spin projection if every term agrees.
    pub fn sector(&self, n_spatial: usize) -> Result<(usize, i32)> {
        let psi = self.state(n_spatial)?;
        let mut found: Option<(usize, i32)> = None;
        for (s, v) in psi.iter().enumerate() {
            if v.abs() > 1e-12 {
                let here = (s.count_ones() as usize, super::hamiltonian::ms2_of(s as u64));
                match found {
                    None => found = Some(here),
                    Some(f) if f != here => return Err(Error::invalid("reference mixes particle-number or spin sectors")),
                    _ => {}
                }
            }
        }
        found.ok_or_else(|| Error::invalid("reference state vanishes"))
    }
}

#[derive(Debug, Clone)]
pub struct AdaptOptions {
    pub grad_tol: f64,
    pub max_iters: usize,
    pub inner: BfgsOptions,
}

impl Default for AdaptOptions {
    fn default() -> Self {
        AdaptOptions { grad_tol: 1e-5, max_iters: 200, inner: BfgsOptions { max_iter: 2000, gtol: 1e-10, ..Default::default() } }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub selected: usize,
    pub operator: String,
    /// Pool gradient magnitude that triggered the selection.
    pub max_gradient: f64,
    pub parameters: Vec<f64>,
    pub energy: f64,
    pub s2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VqeRun {
    pub pool: PoolKind,
    pub pool_size: usize,
    pub initial_energy: f64,
    pub initial_s2: f64,
    pub iterations: Vec<IterationRecord>,
    pub converged: bool,
    pub final_energy: f64,
    pub final_s2: f64,
    pub final_max_gradient: f64,
    /// Total selections, counting repeats.
    pub n_parameters: usize,
    pub distinct_operators: usize,
    pub reference_energy: Option<f64>,
    pub message: Option<String>,
}

impl VqeRun {
    pub fn energy_error(&self) -> Option<f64> {
        self.reference_energy.map(|e| self.final_energy - e)
    }

    /// Largest deviation of `⟨S²⟩` from a target over the initial state and all iterations.
    pub fn max_spin_drift(&self, target: f64) -> f64 {
        self.iterations.iter().map(|r| r.s2).chain([self.initial_s2]).map(|s| (s - target).abs()).fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("iteration,energy,s2,max_gradient\n");
        out.push_str(&format!("0,{:e},{:e},\n", self.initial_energy, self.initial_s2));
        for r in &self.iterations {
            out.push_str(&format!("{},{:e},{:e},{:e}\n", r.iteration, r.energy, r.s2, r.max_gradient));
        }
        out
    }
}

/// Pool gradients `⟨ψ|[H, A_k]|ψ⟩ = 2 (Hψ)·(A_k ψ)`.
pub fn pool_gradients(h: &SparseMat, pool: &OperatorPool, psi: &[f64]) -> Vec<f64> {
    let sigma = h.matvec(psi);
    pool.elements.par_iter().map(|e| 2.0 * dot(&sigma, &e.matrix.matvec(psi))).collect()
}

/// Grows the ansatz by the largest-gradient pool operator until all gradients fall below tolerance.
pub fn adapt_vqe(
    h: &SparseMat,
    pool: &OperatorPool,
    reference: &[f64],
    s2: &SparseMat,
    opts: &AdaptOptions,
) -> Result<VqeRun> {
    let dim = h.dim();
    if reference.len() != dim || s2.dim() != dim {
        return Err(Error::invalid("reference, Hamiltonian and spin operator dimensions differ"));
    }
    if pool.elements.iter().any(|e| e.matrix.dim() != dim) {
        return Err(Error::invalid("pool operators do not match the Hamiltonian dimension"));
    }
    if (dot(reference, reference) - 1.0).abs() > 1e-10 {
        return Err(Error::invalid("reference state is not normalized"));
    }
    let mut selected: Vec<usize> = Vec::new();
    let mut params: Vec<f64> = Vec::new();
    let mut psi = reference.to_vec();
    let initial_energy = expectation(h, &psi);
    let initial_s2 = expectation(s2, &psi);
    let mut energy = initial_energy;
    let mut records = Vec::new();
    let mut converged = false;
    let mut message = None;
    let mut max_grad = f64::INFINITY;
    for iteration in 1..=opts.max_iters + 1 {
        let grads = pool_gradients(h, pool, &psi);
        let (best, g) = grads
            .iter()
            .enumerate()
            .fold((usize::MAX, 0.0f64), |(bi, bg), (i, g)| if g.abs() > bg { (i, g.abs()) } else { (bi, bg) });
        max_grad = g;
        if g < opts.grad_tol {
            converged = true;
            break;
        }
        if iteration > opts.max_iters {
            message = Some(format!("iteration limit {} reached", opts.max_iters));
            break;
        }
        selected.push(best);
        params.push(0.0);
        let ops: Vec<&SparseMat> = selected.iter().map(|&k| &pool.elements[k].matrix).collect();
        let res = bfgs(
            |x: &DVector<f64>| {
                let (e, g) = energy_and_gradient(h, &ops, x.as_slice(), reference);
                (e, DVector::from_vec(g))
            },
            DVector::from_vec(params.clone()),
            &opts.inner,
        );
        if !res.f.is_finite() || res.f > energy + 1e-12 {
            message = Some(format!("inner optimization failed at iteration {iteration} (energy {})", res.f));
            selected.pop();
            params.pop();
            break;
        }
        params = res.x.as_slice().to_vec();
        psi = ansatz_state(&ops, &params, reference);
        energy = expectation(h, &psi);
        records.push(IterationRecord {
            iteration,
            selected: best,
            operator: pool.elements[best].label.clone(),
            max_gradient: g,
            parameters: params.clone(),
            energy,
            s2: expectation(s2, &psi),
        });
    }
    let distinct = selected.iter().collect::<std::collections::BTreeSet<_>>().len();
    Ok(VqeRun {
        pool: pool.kind,
        pool_size: pool.len(),
        initial_energy,
        initial_s2,
        final_energy: energy,
        final_s2: expectation(s2, &psi),
        final_max_gradient: max_grad,
        n_parameters: selected.len(),
        distinct_operators: distinct,
        iterations: records,
        converged,
        reference_energy: None,
        message,
    })
}

/// Everything needed to run a VQE on one Hamiltonian.
pub struct Problem {
    pub n_spatial: usize,
    pub hamiltonian: SparseMat,
    pub s2: SparseMat,
    pub reference: Reference,
    pub space: OrbitalSpace,
}

impl Problem {
    /// Closed-shell reference and orbital space.
    pub fn closed_shell(ints: &MolecularIntegrals) -> Result<Self> {
        let n = ints.n_spatial;
        Ok(Problem {
            n_spatial: n,
            hamiltonian: build_hamiltonian(ints)?,
            s2: s2_operator(n)?,
            reference: Reference::closed_shell(ints.n_electrons),
            space: OrbitalSpace::closed_shell(n, ints.n_electrons),
        })
    }

    /// Runs adaptive VQE and attaches the exact energy of the reference's sector.
    pub fn run(&self, kind: PoolKind, opts: &AdaptOptions) -> Result<VqeRun> {
        let pool = build_pool(kind, self.n_spatial, &self.space)?;
        let psi = self.reference.state(self.n_spatial)?;
        let mut run = adapt_vqe(&self.hamiltonian, &pool, &psi, &self.s2, opts)?;
        run.reference_energy = Some(self.sector_ground(&psi)?);
        Ok(run)
    }

    /// Exact ground energy in the reference's particle, projection and total-spin sector.
    pub fn sector_ground(&self, psi: &[f64]) -> Result<f64> {
        let (n_electrons, ms2) = self.reference.sector(self.n_spatial)?;
        let s2 = expectation(&self.s2, psi);
        let spin2 = (0..=2 * self.n_spatial as u32).find(|&k| (spin_eigenvalue(k) - s2).abs() < 1e-8);
        Ok(exact_ground(&self.hamiltonian, self.n_spatial, Sector { n_electrons, ms2, spin2 })?.energy)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinCollapseReport {
    pub singlet_ground: f64,
    pub triplet_ground: f64,
    pub sd: VqeRun,
    pub sa: VqeRun,
}

/// Triplet open-shell reference on a synthetic system with a singlet ground state.
pub fn spin_collapse_demo(seed: u64, opts: &AdaptOptions) -> Result<SpinCollapseReport> {
    let n = 4;
    let ints = synth_integrals(n, seed)?;
    let h = build_hamiltonian(&ints)?;
    let singlet = exact_ground(&h, n, Sector { n_electrons: 4, ms2: 0, spin2: Some(0) })?.energy;
    let triplet = exact_ground(&h, n, Sector { n_electrons: 4, ms2: 0, spin2: Some(2) })?.energy;
    let problem = Problem {
        n_spatial: n,
        hamiltonian: h,
        s2: s2_operator(n)?,
        reference: Reference::open_shell_triplet(1, 1, 2),
        space: OrbitalSpace { occupied: vec![0, 1, 2], virtuals: vec![1, 2, 3] },
    };
    let sd = problem.run(PoolKind::Sd, opts)?;
    let sa = problem.run(PoolKind::Sa, opts)?;
    Ok(SpinCollapseReport { singlet_ground: singlet, triplet_ground: triplet, sd, sa })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::expm;
    use crate::vqe::pool::build_pool;
    use proptest::prelude::*;

    fn pool4() -> OperatorPool {
        build_pool(PoolKind::Sa, 2, &OrbitalSpace::closed_shell(2, 2)).unwrap()
    }

    #[test]
    fn exp_generator_matches_dense() {
        let pool = pool4();
        let psi = Reference::closed_shell(2).state(2).unwrap();
        for el in &pool.elements {
            for theta in [0.0, 0.3, -1.7, 4.0] {
                let got = apply_exp_generator(&psi, &el.matrix, theta);
                let want = expm(&(el.matrix.to_dense() * theta)) * DVector::from_vec(psi.clone());
                let err = got.iter().zip(want.iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                assert!(err < 1e-10, "{} {theta} {err:e}", el.label);
            }
        }
    }

    #[test]
    fn triplet_reference_has_spin_one() {
        let s2 = s2_operator(3).unwrap();
        let psi = Reference::open_shell_triplet(0, 1, 2).state(3).unwrap();
        assert!((expectation(&s2, &psi) - 2.0).abs() < 1e-12);
        let singlet = Reference {
            terms: vec![
                DeterminantTerm { amplitude: 1.0, create: vec!["0a".into(), "1b".into()] },
                DeterminantTerm { amplitude: -1.0, create: vec!["0b".into(), "1a".into()] },
            ],
        };
        let psi = singlet.state(3).unwrap();
        assert!(expectation(&s2, &psi).abs() < 1e-12);
    }

    #[test]
    fn analytic_gradient_matches_finite_difference() {
        let ints = synth_integrals(3, 1).unwrap();
        let problem = Problem::closed_shell(&ints).unwrap();
        let pool = build_pool(PoolKind::Sd, 3, &problem.space).unwrap();
        let psi = problem.reference.state(3).unwrap();
        let ops: Vec<&SparseMat> = [0, 3, 5, 1].iter().map(|&k| &pool.elements[k].matrix).collect();
        let params = [0.2, -0.4, 0.7, 0.1];
        let (_, g) = energy_and_gradient(&problem.hamiltonian, &ops, &params, &psi);
        for k in 0..params.len() {
            let mut p = params;
            p[k] += 1e-6;
            let (ep, _) = energy_and_gradient(&problem.hamiltonian, &ops, &p, &psi);
            p[k] -= 2e-6;
            let (em, _) = energy_and_gradient(&problem.hamiltonian, &ops, &p, &psi);
            assert!((g[k] - (ep - em) / 2e-6).abs() < 1e-7);
        }
    }

    #[test]
    fn diagonal_hamiltonian_needs_no_iterations() {
        let mut ints = MolecularIntegrals::zeros(2, 2, 0);
        ints.h[(0, 0)] = -1.0;
        ints.h[(1, 1)] = 1.0;
        let problem = Problem::closed_shell(&ints).unwrap();
        let run = problem.run(PoolKind::Sd, &AdaptOptions::default()).unwrap();
        assert!(run.converged);
        assert!(run.iterations.is_empty());
        assert!((run.final_energy + 2.0).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn exp_generator_is_unitary(theta in -6.0f64..6.0, k in 0usize..4) {
            let pool = build_pool(PoolKind::Sd, 2, &OrbitalSpace::closed_shell(2, 2)).unwrap();
            let a = &pool.elements[k % pool.len()].matrix;
            let psi: Vec<f64> = (0..16).map(|i| ((i * 37 % 11) as f64 - 5.0) / 10.0).collect();
            let n = dot(&psi, &psi).sqrt();
            let psi: Vec<f64> = psi.iter().map(|v| v / n).collect();
            let out = apply_exp_generator(&psi, a, theta);
            prop_assert!((dot(&out, &out) - 1.0).abs() < 1e-12);
        }
    }
}
