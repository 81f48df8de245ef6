//! Exact-arithmetic partial Bell polynomials and convolution calculus.
//!
//! Everything is computed over arbitrary-precision rationals, so every identity
//! the library exposes is checkable bit-exactly. The main pieces:
//!
//! - [`rational`]: the [`Rational`] scalar plus factorials and (generalized)
//!   binomial coefficients.
//! - [`sequence`]: right-hand sequences with convolution, convolution powers
//!   and shifts.
//! - [`bell`]: partial Bell polynomials of both flavors — a brute-force
//!   definitional oracle, the classical recurrences, and the conversion-based
//!   evaluation scheme.
//! - [`factorized`]: the factorized nested evaluation scheme, the leading-zero
//!   break-down, and cost-based algorithm selection.
//! - [`calculus`]: convolution powers and roots expressed through Bell
//!   polynomials, inverse relations, the nested-ratio identity, and compound
//!   distributions.
//! - [`cost`]: exact operation-count polynomials, instrumentation, savings
//!   tables and curves.

pub mod bell;
pub mod calculus;
pub mod cost;
pub mod error;
pub mod factorized;
pub mod rational;
pub mod sequence;

pub use bell::{AlgorithmTag, BellResult, Flavor};
pub use calculus::RootResult;
pub use cost::{CostReport, OpCounter};
pub use error::Error;
pub use factorized::{AlgorithmChoice, Factorization};
pub use rational::Rational;
pub use sequence::Sequence;
