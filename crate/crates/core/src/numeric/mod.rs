//! Exact arithmetic: arbitrary-precision rationals and sparse affine forms.

mod linform;
mod rational;

pub use linform::{linform_combine, LinearForm, Var};
pub use rational::{rational_reduce, Rational};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumericError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("cannot parse `{0}` as a rational")]
    Parse(String),
    #[error("no value supplied for variable `{0}`")]
    UnknownVariable(Var),
}
