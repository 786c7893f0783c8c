//! Quantum Tanner codes on left-right Cayley complexes, with the
//! sequential and parallel mismatch-decomposition decoders.

pub mod complex;
pub mod gf2;
pub mod groups;
pub mod local_codes;
pub mod rng;
pub mod spectral;
pub mod tanner;
pub mod decoder;
pub mod sim;
pub mod cli;
