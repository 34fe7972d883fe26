//! Random induced bipartite states, entanglement criteria, absolute spectral
//! sets, and Monte Carlo threshold sweeps.

// `!(x > 0.0)` is used deliberately so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod criteria;
pub mod error;
pub mod fmt;
pub mod hatmap;
pub mod linalg;
pub mod optim;
pub mod sampling;
pub mod spectra;
pub mod sweep;

pub use criteria::{CriterionVerdict, SpectrumVector, Status};
pub use error::{Error, Result};
pub use hatmap::{SearchBudget, SimplexVector};
pub use linalg::{Bipartition, ComplexMatrix, HermitianMatrix};
