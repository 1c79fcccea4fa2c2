pub mod atom;
pub mod cli;
pub mod error;
pub mod fock;
pub mod hamiltonian;
pub mod linalg;
pub mod modes;
pub mod spectral;
pub mod symmetry;

pub use error::{Error, Result};
