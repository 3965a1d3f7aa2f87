//! Entanglement witnesses for two and three qubits and their measurement by
//! local von Neumann measurements.
//!
//! The crate builds the catalog witnesses, decomposes them into local
//! measurement settings, proves lower bounds on how many settings any
//! decomposition needs, and simulates shot-limited measurement.
//!
//! Conventions: party A is the most significant qubit, Pauli indices are
//! `0 = 1, 1 = x, 2 = y, 3 = z`, and Pauli coefficients are normalized as
//! `Tr(M sigma) / 2^n`.

pub mod certify;
pub mod error;
pub mod linalg;
pub mod pauli;
pub mod settings;
pub mod simulate;
pub mod states;
pub mod witnesses;

pub use error::{Error, Result};
