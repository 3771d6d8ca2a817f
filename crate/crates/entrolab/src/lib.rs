//! Numerical laboratory for convex Sobolev inequalities and entropy decay of
//! reversible Markov chains, certified by couplings of rates.

pub mod chain;
pub mod coupling;
pub mod entropy;
pub mod error;
pub mod models;
pub mod numeric;
pub mod phi;
pub mod sampling;
pub mod transport;

pub use chain::{Configuration, Generator, Measure, Move};
pub use error::{Error, Result};
pub use phi::Phi;
