use nalgebra::DVector;
use num_complex::Complex64;
use spinfact::factor::{FactorOptions, Factorizer};
use spinfact::pauli::{apply_schedule, schedule};
use spinfact::vqe::adapt::{spin_collapse_demo, AdaptOptions, Problem, Reference};
use spinfact::vqe::hamiltonian::{expectation, number_operator, sz_operator};
use spinfact::vqe::*;
use spinfact::Family;

#[test]
fn fcidump_round_trip_reproduces_hamiltonian() {
    let ints = synth_integrals(4, 11).unwrap();
    let text = write_fcidump(&ints);
    let parsed = parse_fcidump(&text).unwrap();
    assert_eq!(parsed, ints);
    let a = build_hamiltonian(&ints).unwrap();
    let b = build_hamiltonian(&parsed).unwrap();
    assert!(a.max_abs_diff(&b) < 1e-12);
    assert_eq!(write_fcidump(&parsed), text);
}

#[test]
fn core_energy_only_hamiltonian() {
    let ints = parse_fcidump("&FCI NORB=2,NELEC=0,MS2=0 &END\n 0.75 0 0 0 0\n").unwrap();
    let h = build_hamiltonian(&ints).unwrap();
    let e = exact_ground(&h, 2, Sector { n_electrons: 0, ms2: 0, spin2: None }).unwrap();
    assert_eq!(e.energy, 0.75);
    assert!(h.max_abs_diff(&spinfact::sparse::SparseMat::identity(16).scale(0.75)) < 1e-15);
}

#[test]
fn reference_energy_matches_closed_shell_formula() {
    for seed in 0..3 {
        let ints = synth_integrals(4, seed).unwrap();
        let h = build_hamiltonian(&ints).unwrap();
        let psi = Reference::closed_shell(ints.n_electrons).state(4).unwrap();
        let occ = ints.n_electrons / 2;
        let mut want = ints.e_core;
        for i in 0..occ {
            want += 2.0 * ints.h[(i, i)];
            for j in 0..occ {
                want += 2.0 * ints.g(i, i, j, j) - ints.g(i, j, j, i);
            }
        }
        assert!((expectation(&h, &psi) - want).abs() < 1e-12);
    }
}

#[test]
fn hamiltonian_conserves_spin_for_many_seeds() {
    let s2 = s2_operator(3).unwrap();
    let sz = sz_operator(3).unwrap();
    let num = number_operator(3).unwrap();
    for seed in 0..10 {
        let h = build_hamiltonian(&synth_integrals(3, seed).unwrap()).unwrap();
        for op in [&s2, &sz, &num] {
            assert!(h.commutator(op).max_abs() < 1e-10, "seed {seed}");
        }
    }
}

#[test]
fn spin_flip_symmetric_spectrum() {
    let ints = synth_integrals(3, 5).unwrap();
    let h = build_hamiltonian(&ints).unwrap();
    for n_electrons in 1..=4 {
        let up = exact_ground(&h, 3, Sector { n_electrons, ms2: n_electrons as i32 % 2, spin2: None }).unwrap();
        let down = exact_ground(&h, 3, Sector { n_electrons, ms2: -(n_electrons as i32 % 2), spin2: None }).unwrap();
        assert!((up.energy - down.energy).abs() < 1e-10);
    }
}

#[test]
fn noninteracting_limit_fills_orbitals() {
    let ints = synth_integrals(4, 2).unwrap().one_body_only();
    let h = build_hamiltonian(&ints).unwrap();
    let mut eps: Vec<f64> = ints.h.symmetric_eigenvalues().iter().copied().collect();
    eps.sort_by(f64::total_cmp);
    let want = ints.e_core + 2.0 * (eps[0] + eps[1]);
    let got = exact_ground(&h, 4, Sector { n_electrons: 4, ms2: 0, spin2: None }).unwrap();
    assert!((got.energy - want).abs() < 1e-10);
}

#[test]
fn sector_restriction_bounds() {
    let h = build_hamiltonian(&synth_integrals(4, 0).unwrap()).unwrap();
    let all = exact_ground(&h, 4, Sector { n_electrons: 4, ms2: 0, spin2: None }).unwrap();
    let triplet = exact_ground(&h, 4, Sector { n_electrons: 4, ms2: 0, spin2: Some(2) }).unwrap();
    let singlet = exact_ground(&h, 4, Sector { n_electrons: 4, ms2: 0, spin2: Some(0) }).unwrap();
    assert!(triplet.energy >= all.energy - 1e-12);
    assert!(singlet.energy >= all.energy - 1e-12);
    assert!(exact_ground(&h, 4, Sector { n_electrons: 9, ms2: 1, spin2: None }).is_err());
}

#[test]
fn spin_adapted_run_keeps_singlet_and_reaches_exact_energy() {
    let ints = synth_integrals(3, 0).unwrap();
    let problem = Problem::closed_shell(&ints).unwrap();
    let run = problem.run(PoolKind::Sa, &AdaptOptions::default()).unwrap();
    assert!(run.converged);
    assert!(run.final_max_gradient < 1e-5);
    assert!(run.max_spin_drift(0.0) < 1e-8);
    assert!(run.energy_error().unwrap().abs() < 1e-6);
    let energies: Vec<f64> = std::iter::once(run.initial_energy).chain(run.iterations.iter().map(|r| r.energy)).collect();
    assert!(energies.windows(2).all(|w| w[1] <= w[0] + 1e-12));
}

#[test]
fn spin_orbital_run_reaches_exact_energy() {
    let ints = synth_integrals(3, 0).unwrap();
    let problem = Problem::closed_shell(&ints).unwrap();
    let run = problem.run(PoolKind::Sd, &AdaptOptions::default()).unwrap();
    assert!(run.converged);
    assert!(run.energy_error().unwrap().abs() < 1e-6);
}

#[test]
fn triplet_reference_keeps_spin_with_adapted_pool() {
    let report = spin_collapse_demo(0, &AdaptOptions::default()).unwrap();
    assert!(report.singlet_ground < report.triplet_ground);
    assert!(report.sa.max_spin_drift(2.0) < 1e-8);
    assert!((report.sa.final_energy - report.triplet_ground).abs() < 1e-6);
}

#[test]
fn pool_exponential_matches_factorized_schedule() {
    // With four spatial orbitals, the interleaved qubit layout coincides with
    // the canonical (i, j, a, b) layout, so the pool's singlet double equals
    // the family generator.
    let space = OrbitalSpace { occupied: vec![0, 1], virtuals: vec![2, 3] };
    let pool = build_pool(PoolKind::Sa, 4, &space).unwrap();
    let el = pool.elements.iter().find(|e| e.label == "singlet(01->23)").unwrap();
    let fz = Factorizer::new(Family::S4Singlet).unwrap();
    assert!(el.matrix.max_abs_diff(fz.generator()) < 1e-14);
    let psi = Reference::closed_shell(4).state(4).unwrap();
    let mixed: Vec<f64> = psi.iter().enumerate().map(|(k, v)| v + if k == 0b0110_1001 { 0.5 } else { 0.0 }).collect();
    let norm = mixed.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mixed: Vec<f64> = mixed.iter().map(|v| v / norm).collect();
    for theta in [0.4, -1.3, 2.9] {
        let exact = apply_exp_generator(&mixed, &el.matrix, theta);
        let fac = fz.factorize(theta, &FactorOptions::default()).unwrap();
        let sched = schedule(&fz, &fac).unwrap();
        let state: Vec<Complex64> = mixed.iter().map(|v| Complex64::new(*v, 0.0)).collect();
        let out = apply_schedule(&state, &sched).unwrap();
        let err = out.iter().zip(&exact).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-6, "theta {theta}: {err:e}");
        let n: f64 = DVector::from_vec(exact).norm();
        assert!((n - 1.0).abs() < 1e-12);
    }
}
