//! Exact arithmetic in the deformation parameter `q`: half-integer labels,
//! rational functions of `q^{1/2}` and q-numbers.

mod half_int;
mod laurent;
mod scalar;

pub use half_int::HalfInt;
pub use laurent::LaurentPoly;
pub use scalar::{q_number, q_number_f64, QReal, QScalar};
