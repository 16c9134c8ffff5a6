//! Rule packs, corpus files and the command line for `lingcore`.

pub mod corpus;
pub mod ops;
pub mod pack;

pub use corpus::{read_corpus, run_corpus, Report, RunOptions};
pub use pack::{load_french, load_pack, load_spanish, LoadError};
