//! Nilsequence correlations with multiplicative functions in short intervals.
//!
//! The crate is organised bottom-up: [`nilgroup`] provides exact and float
//! arithmetic on filtered nilpotent groups in Mal'cev coordinates, [`polyseq`]
//! builds polynomial sequences on top, and the remaining modules implement
//! sieving, pretentious distances, equidistribution tests, factorization of
//! polynomial sequences, and the correlation experiments themselves.

pub mod correlate;
pub mod equidist;
pub mod error;
pub mod factorize;
pub mod linalg;
pub mod nilgroup;
pub mod poly;
pub mod polyseq;
pub mod qmc;
pub mod pretentious;
pub mod scalar;
pub mod sieve;
pub mod textfmt;

pub use error::{Error, Result};

/// Library version, recorded in experiment provenance.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub use nilgroup::{GroupElement, HorizontalCharacter, MalcevPresentation, ManifoldPoint};
pub use scalar::{Scalar, Q};
