//! Truncated operator models of two equivariant spectral triples on quantum
//! SU(2): exact q-arithmetic and the coordinate algebra, the Peter–Weyl and
//! sector bases, the generator and Dirac operators on each space, their
//! comparison, and a verification suite over all of it.

pub mod coordalg;
pub mod decomp;
pub mod dlssvrep;
pub mod error;
pub mod export;
pub mod gnsrep;
pub mod harness;
pub mod operator;
pub mod pwbasis;
pub mod qarith;

#[cfg(test)]
mod properties;

pub use coordalg::{AlgebraElement, Generator, Monomial};
pub use decomp::Triple;
pub use error::{Error, Result};
pub use harness::{CheckRecord, Status, SuiteConfig, SuiteReport};
pub use operator::OperatorMatrix;
pub use pwbasis::Truncation;
pub use qarith::{HalfInt, QScalar};
