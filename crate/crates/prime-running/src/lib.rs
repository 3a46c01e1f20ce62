//! Prime running functions over arithmetic progressions, prime running
//! races, walk/run lattice paths, a sieved random-prime model with Monte
//! Carlo statistics, and exact rational bias constants for that model.

pub mod bias;
pub mod cli;
pub mod cramer;
pub mod error;
pub mod primes;
pub mod running;

pub use error::{Error, Result};
