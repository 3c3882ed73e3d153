//! Case studies: bundled scenario data, model assembly, experiment runners
//! and table emitters.

mod data;
mod flex;
mod report;
mod run;
mod scenario;

use thiserror::Error;

use crate::formulations::BuildError;
use crate::solver::SolveError;

pub use data::{DataSet, DataSource, Provenance, Scenarios, DATA_DIR_ENV};
pub use flex::{reserve_flexibility_report, realizable_reserves, FlexReport, SchedulePoint};
pub use report::{ExperimentReport, ModelRun, OrderingCheck};
pub use run::{run_case, run_multiperiod_uc, run_tep, run_uc, Case, RunOptions};
pub use scenario::{
    assemble, commit_var, flow_var, gen_var, Bus, CandidateLine, GeneratorSpec, ObjectiveKind, Relaxation,
    ReserveRequirement, Scenario, StorageSite, LINE_VAR,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CaseError {
    #[error("bad scenario: {0}")]
    BadScenario(String),
    #[error("data: {0}")]
    Data(String),
    #[error("{origin} is incomplete; missing values at {}", missing.join(", "))]
    IncompleteData { origin: String, missing: Vec<String> },
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Solve(#[from] SolveError),
}
