//! Exact canonical and dual canonical bases for tensor products of integrable
//! modules over quantized enveloping algebras.
//!
//! The arithmetic layer is generic over the integer coefficient type; the
//! aliases below fix it to arbitrary precision, which is what the module,
//! basis and diagram code uses.

pub mod cartan;
pub mod error;
pub mod klr;
pub mod laurent;
pub mod linalg;
pub mod precanon;
pub mod strings;
pub mod uq;

pub use error::{Error, Result};

use num_bigint::BigInt;

pub type Laurent = laurent::LaurentPoly<BigInt>;
pub type Ratio = laurent::QRatio<BigInt>;
pub type Tail = laurent::LaurentTail<BigInt>;
pub type LMat = linalg::Mat<Laurent>;
pub type RMat = linalg::Mat<Ratio>;
