//! Exact tools for storage scheduling models: rational arithmetic, polyhedral
//! operations (projection, disjunctive lifting, redundancy certificates,
//! vertex enumeration), the basic and tight storage formulations, an exact
//! LP/MIP solver, convex hull certification and the case-study harness.

pub mod cases;
pub mod formulations;
pub mod hull;
pub mod model;
pub mod numeric;
pub mod poly;
pub mod solver;

pub use formulations::{Family, StorageParams};
pub use model::ModelInstance;
pub use numeric::{LinearForm, Rational, Var};
pub use poly::{LinearConstraint, Polyhedron};
pub use solver::{SolveResult, SolveStatus};
