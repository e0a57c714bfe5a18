//! Exact computations for Kummer log flat torsors.
//!
//! The crate is organized bottom-up:
//!
//! * [`lattice`]: Smith/Hermite normal forms, finite abelian groups, `Q/Z`.
//! * [`monoid`]: affine fs monoids and the Kummer / exact / integral predicates.
//! * [`kummer_torsor`]: structure groups of standard Kummer torsors.
//! * [`dedekind`]: a data-driven Dedekind base with log structure and the
//!   group `H^1_kpl(X, G_m) = DivRat(X, D) / Divp(X)`.
//! * [`mun`]: the invariant calculus of `mu_n`-torsors and the `Rac(X, D, n)` group.
//! * [`monodromy`]: fppf and ramification predictions from a monodromy pairing.
//!
//! Monoids are written additively throughout: a power `a^n` is `n·a`.
//!
//! The lattice layer is generic over the integer type; the aliases below fix
//! it to arbitrary precision, which is what every other module uses.

pub mod dedekind;
pub mod error;
pub mod json;
pub mod kummer_torsor;
pub mod lattice;
pub mod monodromy;
pub mod monoid;
pub mod mun;

pub use error::{BaseError, LatticeError, MonodromyError, MonoidError, MunError};

/// Arbitrary-precision integer used by every non-generic module.
pub type Int = num_bigint::BigInt;
pub type IntMatrix = lattice::Matrix<Int>;
pub type SnfDecomposition = lattice::SmithForm<Int>;
pub type FiniteAbelianGroup = lattice::AbelianGroup<Int>;
pub type GroupElement = lattice::GroupElem<Int>;
pub type QmodZ = lattice::ModOne<Int>;

/// Shorthand for building an [`Int`] from a machine integer.
pub fn int(v: i64) -> Int {
    Int::from(v)
}
