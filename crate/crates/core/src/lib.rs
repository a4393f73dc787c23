//! Spin-adapted fermionic generators: Lie-algebraic structure, exact product
//! factorization, Pauli-string schedules and an ADAPT-VQE harness.

pub mod acceptance;
pub mod cli;
pub mod dsl;
pub mod error;
pub mod family;
pub mod factor;
pub mod fock;
pub mod generator;
pub mod lie;
pub mod linalg;
pub mod optim;
pub mod pauli;
pub mod report;
pub mod sparse;
pub mod vqe;

pub use error::{Error, Result};
pub use family::Family;
