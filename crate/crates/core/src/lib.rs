pub mod baselines;
pub mod cli;
pub mod costmodel;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod lowerbound;
pub mod perm;
pub mod repcore;
pub mod repmatch;
pub mod schur;

pub use error::{Error, Result};
