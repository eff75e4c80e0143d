//! Exact computations with unipotent Specht modules of GL_n(q) for
//! two-part partitions (n−m, m), over finite fields GF(q) with q ≤ 16.

pub mod census;
pub mod character;
pub mod cyclotomic;
pub mod error;
pub mod export;
pub mod field;
pub mod flag;
pub mod linalg;
pub mod module_vector;
pub mod orbit;
pub mod pattern;
pub mod poly;
pub mod rank;
pub mod scalar;
pub mod specht;
pub mod tableau;
pub mod verify;

pub use error::{Error, Result};

/// Exact elements of Q(ζ_p) with arbitrary-precision integers.
pub type Cyc = cyclotomic::Cyclotomic<num_bigint::BigInt>;
/// Machine-integer variant, for bounded computations and cross-checks.
pub type Cyc64 = cyclotomic::Cyclotomic<i64>;
/// Arbitrary-precision rationals.
pub type Rational = num_rational::BigRational;
