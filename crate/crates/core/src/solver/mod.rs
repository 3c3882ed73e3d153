//! Exact LP and branch-and-bound MILP solving.

pub mod lp;
pub mod mip;
pub mod scalar;
pub mod simplex;

pub use lp::{Arithmetic, LpOutcome, LpProblem, LpRow, RowSense};
pub use mip::{
    count_simultaneity, solve_lp, solve_lp_with, solve_mip, solve_mip_with, Branching, SolveError, SolveOptions, SolveResult,
    SolveStatus,
};
pub use simplex::Pricing;
