//! Loop superalgebra of `gl(m|n)`, its enveloping algebra and completion, and
//! an evaluation map from the affine super Yangian.

pub mod affine_gl;
pub mod evalmap;
pub mod foundation;
pub mod pbw;
pub mod scalar;
pub mod surjectivity;
pub mod tails;
pub mod yangian;

pub use foundation::RankData;
pub use scalar::{Coefficient, RatFunc};

/// Default exact scalar field.
pub type Scalar = RatFunc;
pub type AlgebraElement = pbw::Element<Scalar>;
pub type CompletionElement = tails::Completion<Scalar>;
