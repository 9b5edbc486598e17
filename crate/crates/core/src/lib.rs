//! Dense linear algebra over very small finite fields.
//!
//! Matrices are stored bitsliced: an entry of `r` bits is spread across `r`
//! bit planes, so one machine-word operation touches 64 entries at once.
//! Field arithmetic is expressed as short boolean programs over those planes
//! ([`kernels`]), rows are combined with them ([`matrix`]), and products are
//! formed with the Method of Four Russians ([`m4rm`]). Extension fields are
//! handled as polynomials of base-field matrices ([`extension`]).
//!
//! [`oracle`] holds slow reference arithmetic, [`packed`] the classical
//! integer-packing baseline, and [`search`] the straight-line program model
//! together with a bounded exhaustive search for minimal kernels.

pub mod error;
pub mod extension;
pub mod field;
pub mod kernels;
pub mod m4rm;
pub mod matrix;
pub mod oracle;
pub mod packed;
pub mod search;

pub use error::{Error, Result};
pub use extension::{ExtFieldSpec, ExtMatrix};
pub use field::{Field, FieldSpec};
pub use kernels::Word;
pub use m4rm::{choose_k, classical_multiply, m4rm_multiply, M4rmParams};
pub use matrix::BitslicedMatrix;
pub use oracle::{DenseMatrix, ElementOp, Ring};
pub use search::{FunctionSpec, SequentialProgram};

/// Lane width of the machine word used by [`BitslicedMatrix`].
pub const W: usize = 64;
