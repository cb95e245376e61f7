// `!(x > 0.0)` guards are meant to reject NaN too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod centralizers;
pub mod commutative;
pub mod error;
pub mod interpolation;
pub mod quadrature;
pub mod random;
pub mod scalar;
pub mod twisted_sum;

pub use algebra::{Algebra, Block, Element, Matrix};
pub use centralizers::{NCCentralizer, Sign};
pub use commutative::{CommCentralizer, StepFunction};
pub use error::{conjugate, Error, Result};
pub use interpolation::{StateDensity, StripFunction};
pub use num_complex::Complex64;
pub use scalar::ScalarFn;
pub use twisted_sum::TwistedPair;
