//! Elliptic trilogarithms, Eisenstein–Kronecker series and the symmetric
//! square L-values they are compared against.

pub mod cli;
pub mod complex;
pub mod curve_analytics;
pub mod eisenstein_kronecker;
pub mod elliptic_polylog;
pub mod error;
pub mod hecke_lseries;
pub mod lattice_sum_engine;
pub mod polylog;
pub mod precision;
pub mod report;
pub mod suites;

pub use complex::Complex;
pub use error::{Error, Result};
pub use precision::{PrecisionContext, Real};
