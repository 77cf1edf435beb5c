//! Exact analysis of stochastic processes indexed by discrete hypercubes.

pub mod cli;
pub mod dhjlab;
pub mod error;
pub mod examples;
pub mod extractor;
pub mod format;
pub mod hypercube;
pub mod invariants;
pub mod probspace;
pub mod process;
pub mod rational;
pub mod report;

pub use error::{Error, Result};
pub use hypercube::{Alphabet, CombinatorialSpace, Entry, Sym, VariableWord, Word};
pub use rational::Rational;
