//! A reversible language-processing engine: feature structures and
//! unification, feature-augmented two-level morphology, inter-word sandhi,
//! a unification grammar formalism with gap threading, a chart parser and a
//! semantic-head-driven generator.
//!
//! The crate is `no_std` and needs only `alloc`. File formats, rule packs
//! and the command line live in the `lingware` crate.
#![no_std]

extern crate alloc;

pub mod featstruct;
pub mod grammar;
pub mod parser;
pub mod fstext;
pub mod generator;
pub mod ruletext;
pub mod sandhi;
pub mod sem;
pub mod symbol;
pub mod twolevel;

pub use featstruct::{FeatureStructure, FsSyntaxError};
pub use sem::SemTerm;
pub use symbol::Symbol;
