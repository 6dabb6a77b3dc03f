//! Exact Clebsch-Gordan coefficients from binomial counting matrices.

pub mod binomial;
pub mod effort;
pub mod error;
pub mod exactval;
pub mod halfint;
pub mod omega;
pub mod racah;
pub mod tables;

pub use error::{Error, Result};
pub use exactval::SqrtRational;
pub use halfint::{CouplingSpec, Projection, TwoJ};
pub use omega::{OmegaMatrix, Route};
pub use racah::{racah_cg, verify_against_oracles, VerificationReport};
pub use tables::{build_table, render, CGTable, CgKey, Format};
