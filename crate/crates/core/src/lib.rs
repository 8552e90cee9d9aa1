//! Pharmacophore docking as weighted max-clique, solved with QAOA and
//! digitized counterdiabatic QAOA on a statevector simulator.

pub mod bench;
pub mod circuit;
pub mod error;
pub mod ising;
pub mod ligraph;
pub mod oracle;
pub mod pharmio;
pub mod qng;
pub mod sim;

pub use error::{Error, Result};
