//! Experiment reports and their Markdown, CSV, JSON and text renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::formulations::{pvar, Family};
use crate::model::ModelInstance;
use crate::numeric::{Rational, Var};
use crate::solver::{count_simultaneity, SolveResult, SolveStatus};

use super::data::Provenance;
use super::scenario::{commit_var, flow_var, gen_var, Relaxation, Scenario, LINE_VAR};
use super::CaseError;

/// One solved model of an experiment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModelRun {
    /// Column title such as `BO-MIP`.
    pub model: String,
    pub family: Family,
    pub relaxation: Relaxation,
    pub status: SolveStatus,
    pub objective: Option<Rational>,
    pub nodes: u64,
    /// Periods with positive charge and discharge.
    pub simultaneous_periods: usize,
    /// Sum over periods of charge times discharge.
    pub simultaneity_sum: Rational,
    /// Values of the excerpt variables present in the model.
    pub excerpt: BTreeMap<String, Rational>,
}

/// Periods shown in excerpts.
const EXCERPT_PERIODS: usize = 4;

/// Variables tabulated for a scenario, in table order.
fn excerpt_rows(s: &Scenario, horizon: usize) -> Vec<String> {
    let periods = 1..=horizon.min(EXCERPT_PERIODS);
    let mut rows: Vec<Var> = Vec::new();
    for g in &s.generators {
        rows.extend(periods.clone().map(|t| gen_var(g, t)));
    }
    for g in s.generators.iter().filter(|g| g.is_committable()) {
        rows.extend(periods.clone().map(|t| commit_var(g, t)));
    }
    for name in ["p_c", "p_d", "e", "delta", "r_cu", "r_cd", "r_du", "r_dd"] {
        rows.extend(periods.clone().map(|t| pvar(name, t)));
    }
    if s.line.is_some() {
        rows.push(Var::from(LINE_VAR));
        rows.extend(periods.clone().map(flow_var));
    }
    rows.extend(["c_bar", "d_bar", "e_bar"].map(Var::from));
    rows.into_iter().map(|v| v.to_string()).collect()
}

impl ModelRun {
    pub fn new(family: Family, relaxation: Relaxation, m: &ModelInstance, r: &SolveResult) -> Result<ModelRun, CaseError> {
        let suffix = if relaxation == Relaxation::None { "MIP" } else { "LP" };
        let (simultaneous_periods, simultaneity_sum) =
            if r.is_optimal() { count_simultaneity(r, m)? } else { (0, Rational::zero()) };
        let excerpt = m
            .var_ids()
            .into_iter()
            .filter(|v| v.period().is_none_or(|t| t <= EXCERPT_PERIODS))
            .filter_map(|v| r.assignment.get(&v).map(|x| (v.to_string(), x.clone())))
            .collect();
        Ok(ModelRun {
            model: format!("{}-{suffix}", family.name()),
            family,
            relaxation,
            status: r.status,
            objective: r.objective.clone(),
            nodes: r.nodes_explored,
            simultaneous_periods,
            simultaneity_sum,
            excerpt,
        })
    }
}

/// The bound relations between the four runs of an experiment, evaluated
/// exactly. A missing objective makes the relations involving it false.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OrderingCheck {
    pub basic_lp_le_tight_lp: bool,
    pub tight_lp_le_tight_mip: bool,
    pub mips_equal: bool,
    /// Both MIP optima have no period with simultaneous charge and discharge.
    pub mips_simultaneity_free: bool,
}

impl OrderingCheck {
    /// Expects runs in the order basic-MIP, basic-LP, tight-MIP, tight-LP.
    fn of(runs: &[ModelRun]) -> OrderingCheck {
        let obj = |k: usize| runs.get(k).and_then(|r| r.objective.as_ref());
        let le = |a: Option<&Rational>, b: Option<&Rational>| matches!((a, b), (Some(a), Some(b)) if a <= b);
        let free = |k: usize| runs.get(k).is_some_and(|r| r.simultaneous_periods == 0 && r.simultaneity_sum.is_zero());
        OrderingCheck {
            basic_lp_le_tight_lp: le(obj(1), obj(3)),
            tight_lp_le_tight_mip: le(obj(3), obj(2)),
            mips_equal: obj(0).is_some() && obj(0) == obj(2),
            mips_simultaneity_free: free(0) && free(2),
        }
    }

    pub fn holds(&self) -> bool {
        self.basic_lp_le_tight_lp && self.tight_lp_le_tight_mip && self.mips_equal && self.mips_simultaneity_free
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExperimentReport {
    pub case: String,
    pub scenario: String,
    pub data_provenance: Provenance,
    pub horizon: usize,
    /// Variables tabulated per run; a run without the variable shows a blank.
    pub excerpt_rows: Vec<String>,
    pub runs: Vec<ModelRun>,
    pub ordering: OrderingCheck,
}

fn cell(x: Option<&Rational>) -> String {
    x.map(|v| v.to_decimal(1)).unwrap_or_default()
}

impl ExperimentReport {
    pub fn new(case: &str, s: &Scenario, data_provenance: Provenance, runs: Vec<ModelRun>) -> ExperimentReport {
        let horizon = s.horizon();
        ExperimentReport {
            case: case.to_string(),
            scenario: s.name.clone(),
            data_provenance,
            horizon,
            excerpt_rows: excerpt_rows(s, horizon),
            ordering: OrderingCheck::of(&runs),
            runs,
        }
    }

    pub fn run(&self, model: &str) -> Option<&ModelRun> {
        self.runs.iter().find(|r| r.model == model)
    }

    /// Objectives rendered with one decimal, in run order.
    pub fn rendered_costs(&self) -> Vec<String> {
        self.runs.iter().map(|r| cell(r.objective.as_ref())).collect()
    }

    /// Table body: a title column followed by one column per run. Excerpt
    /// rows that no run has are left out.
    fn table(&self) -> (Vec<String>, Vec<Vec<String>>) {
        let mut header = vec![String::new()];
        header.extend(self.runs.iter().map(|r| r.model.clone()));
        let mut rows = Vec::new();
        for v in &self.excerpt_rows {
            if self.runs.iter().all(|r| !r.excerpt.contains_key(v)) {
                continue;
            }
            let mut row = vec![v.clone()];
            row.extend(self.runs.iter().map(|r| cell(r.excerpt.get(v))));
            rows.push(row);
        }
        let mut summary = |title: &str, f: &dyn Fn(&ModelRun) -> String| {
            let mut row = vec![title.to_string()];
            row.extend(self.runs.iter().map(f));
            rows.push(row);
        };
        summary("Total cost ($)", &|r| cell(r.objective.as_ref()));
        summary("Status", &|r| format!("{:?}", r.status));
        summary("Nodes", &|r| r.nodes.to_string());
        summary("Simultaneous periods", &|r| r.simultaneous_periods.to_string());
        summary("Simultaneity sum", &|r| r.simultaneity_sum.to_decimal(1));
        (header, rows)
    }

    fn ordering_line(&self) -> String {
        let o = &self.ordering;
        format!(
            "basic-LP <= tight-LP: {}; tight-LP <= tight-MIP: {}; MIP optima equal: {}; MIP optima simultaneity-free: {}",
            o.basic_lp_le_tight_lp, o.tight_lp_le_tight_mip, o.mips_equal, o.mips_simultaneity_free
        )
    }

    pub fn to_markdown(&self) -> String {
        let (header, rows) = self.table();
        let mut s = String::new();
        let _ = writeln!(s, "## {} ({} periods, data: {})", self.scenario, self.horizon, self.data_provenance);
        let _ = writeln!(s);
        let _ = writeln!(s, "| {} |", header.join(" | "));
        let _ = writeln!(s, "|{}", "---|".repeat(header.len()));
        for r in rows {
            let _ = writeln!(s, "| {} |", r.join(" | "));
        }
        let _ = writeln!(s);
        let _ = writeln!(s, "{}", self.ordering_line());
        s
    }

    pub fn to_csv(&self) -> String {
        let (header, rows) = self.table();
        let mut s = format!("# case={},data={}\n", self.case, self.data_provenance);
        let _ = writeln!(s, "row{}", header[1..].iter().map(|h| format!(",{h}")).collect::<String>());
        for r in rows {
            let _ = writeln!(s, "{}", r.join(","));
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let (header, rows) = self.table();
        let widths: Vec<usize> = (0..header.len())
            .map(|c| rows.iter().map(|r| r[c].len()).chain([header[c].len()]).max().unwrap_or(0))
            .collect();
        let line = |r: &[String]| {
            r.iter().zip(&widths).map(|(x, w)| format!("{x:>w$}")).collect::<Vec<_>>().join("  ").trim_end().to_string()
        };
        let mut s = String::new();
        let _ = writeln!(s, "{} ({} periods, data: {})", self.scenario, self.horizon, self.data_provenance);
        let _ = writeln!(s, "{}", line(&header));
        for r in &rows {
            let _ = writeln!(s, "{}", line(r));
        }
        let _ = writeln!(s, "{}", self.ordering_line());
        s
    }
}
