//! Experiment runners: each solves the basic and the tight storage family of
//! a scenario as MIP and with relaxed storage binaries.

use std::str::FromStr;

use crate::formulations::Family;
use crate::solver::{solve_mip_with, Arithmetic, SolveOptions};

use super::data::DataSet;
use super::report::{ExperimentReport, ModelRun};
use super::scenario::{assemble, Relaxation, Scenario};
use super::CaseError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Case {
    Uc,
    UcReserves,
    Tep,
    Multiperiod,
}

impl Case {
    pub const ALL: [Case; 4] = [Case::Uc, Case::UcReserves, Case::Tep, Case::Multiperiod];

    pub fn name(self) -> &'static str {
        match self {
            Case::Uc => "uc",
            Case::UcReserves => "uc-reserves",
            Case::Tep => "tep",
            Case::Multiperiod => "multiperiod",
        }
    }

    /// `(basic, tight)` storage families compared in the case.
    pub fn families(self) -> (Family, Family) {
        match self {
            Case::Uc | Case::Multiperiod => (Family::Bo, Family::To),
            Case::UcReserves => (Family::Bor, Family::Tor),
            Case::Tep => (Family::Bir, Family::Tir),
        }
    }

    pub fn scenario(self, d: &DataSet) -> &Scenario {
        match self {
            Case::Uc => &d.scenarios.uc,
            Case::UcReserves => &d.scenarios.uc_reserves,
            Case::Tep => &d.scenarios.tep,
            Case::Multiperiod => &d.scenarios.multiperiod,
        }
    }
}

impl FromStr for Case {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Case::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| format!("unknown case `{s}`"))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    pub arithmetic: Arithmetic,
    pub node_limit: u64,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { arithmetic: Arithmetic::Exact, node_limit: SolveOptions::default().node_limit }
    }
}

/// Solves basic-MIP, basic-LP, tight-MIP and tight-LP in that order.
pub fn run_case(case: Case, data: &DataSet, opts: &RunOptions) -> Result<ExperimentReport, CaseError> {
    let s = case.scenario(data);
    let (basic, tight) = case.families();
    let solve = SolveOptions { arithmetic: opts.arithmetic, node_limit: opts.node_limit, ..SolveOptions::default() };
    let mut runs = Vec::new();
    for family in [basic, tight] {
        for relaxation in [Relaxation::None, Relaxation::Storage] {
            let m = assemble(s, family, relaxation)?;
            let r = solve_mip_with(&m, &solve)?;
            runs.push(ModelRun::new(family, relaxation, &m, &r)?);
        }
    }
    Ok(ExperimentReport::new(case.name(), s, data.provenance, runs))
}

/// Two-period unit commitment, with or without storage reserve minima.
pub fn run_uc(data: &DataSet, reserves: bool, opts: &RunOptions) -> Result<ExperimentReport, CaseError> {
    run_case(if reserves { Case::UcReserves } else { Case::Uc }, data, opts)
}

/// Two-bus transmission and storage expansion.
pub fn run_tep(data: &DataSet, opts: &RunOptions) -> Result<ExperimentReport, CaseError> {
    run_case(Case::Tep, data, opts)
}

/// The daily unit commitment profile repeated over a year.
pub fn run_multiperiod_uc(data: &DataSet, opts: &RunOptions) -> Result<ExperimentReport, CaseError> {
    run_case(Case::Multiperiod, data, opts)
}
