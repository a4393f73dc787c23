//! Adaptive variational eigensolver on exact state vectors.

pub mod adapt;
pub mod config;
pub mod hamiltonian;
pub mod integrals;
pub mod pool;

pub use adapt::{adapt_vqe, apply_exp_generator, AdaptOptions, Reference, VqeRun};
pub use hamiltonian::{build_hamiltonian, exact_ground, s2_operator, Sector};
pub use integrals::{parse_fcidump, synth_integrals, write_fcidump, MolecularIntegrals};
pub use pool::{build_pool, OperatorPool, OrbitalSpace, PoolKind};
