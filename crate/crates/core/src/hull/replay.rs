//! Step-by-step transcript of the basic operation hull derivation: lifted
//! system, substitutions, every combination on the lifted state of charge
//! with its classification, and the final rows.

use std::fmt::Write as _;

use serde::Serialize;

use crate::formulations::{Family, StorageParams, TirEnergyRows};
use crate::numeric::Var;
use crate::poly::{
    balas_lift, fm_eliminate_traced, implied_by, poly_equal, project, remove_redundant, verify_certificate, FmMethod,
    Polyhedron, Row,
};

use super::{build_disjuncts, one_period_polytope, HullError};

/// What happened to one row produced by combining a lower and an upper bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CombinationStatus {
    /// The row is one of the final hull rows.
    InHull { matches: String },
    /// The row is implied by the final hull rows.
    Dominated { certificate: String, support: Vec<String>, verified: bool },
    /// `0 <= b` with `b >= 0`.
    Tautology,
    /// The row still involves variables that are eliminated later.
    BoundOn { vars: Vec<String> },
    /// The row is neither a hull row nor implied by them. Never expected.
    Unexplained,
}

impl std::fmt::Display for CombinationStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CombinationStatus::InHull { matches } => write!(f, "in CH (row [{matches}])"),
            CombinationStatus::Dominated { certificate, verified, .. } => {
                write!(f, "{certificate} ({})", if *verified { "verified" } else { "NOT verified" })
            }
            CombinationStatus::Tautology => write!(f, "tautology"),
            CombinationStatus::BoundOn { vars } => write!(f, "bound on {}", vars.join(", ")),
            CombinationStatus::Unexplained => write!(f, "UNEXPLAINED"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReplayCombination {
    pub upper: String,
    pub lower: String,
    pub row: String,
    #[serde(flatten)]
    pub status: CombinationStatus,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReplayTranscript {
    pub params: StorageParams,
    pub charging: Vec<String>,
    pub discharging: Vec<String>,
    pub lifted: Vec<String>,
    pub substitutions: Vec<String>,
    pub rewritten: Vec<String>,
    /// Classification of each rewritten row, in the order of `rewritten`.
    pub rewritten_status: Vec<CombinationStatus>,
    pub eliminated: String,
    pub combinations: Vec<ReplayCombination>,
    pub final_rows: Vec<String>,
    pub tight_rows: Vec<String>,
    /// The final rows and the one-period tight LP describe the same set.
    pub equals_tight: bool,
    #[serde(skip)]
    pub final_polytope: Polyhedron,
}

fn rows_of(p: &Polyhedron) -> Vec<String> {
    p.rows().iter().map(|r| format!("[{}] {}", r.label, p.row_constraint(r))).collect()
}

/// Row over `from`'s variables restated over `to`'s, with canonical scaling.
fn restate(row: &Row, from: &[Var], to: &[Var]) -> Row {
    let a = to
        .iter()
        .map(|v| from.iter().position(|x| x == v).map(|k| row.a[k].clone()).unwrap_or_default())
        .collect();
    let mut p = Polyhedron::new(to.to_vec());
    p.push_row(Row { a, b: row.b.clone(), eq: row.eq, label: row.label.clone() });
    p.rows()[0].clone()
}

fn classify(row: &Row, vars: &[Var], keep: &[Var], hull: &Polyhedron) -> Result<CombinationStatus, HullError> {
    let pending: Vec<String> = vars
        .iter()
        .zip(&row.a)
        .filter(|(v, a)| !a.is_zero() && !keep.contains(v))
        .map(|(v, _)| v.to_string())
        .collect();
    if !pending.is_empty() {
        return Ok(CombinationStatus::BoundOn { vars: pending });
    }
    let r = restate(row, vars, keep);
    if r.is_zero() && !r.b.is_negative() {
        return Ok(CombinationStatus::Tautology);
    }
    if let Some(m) = hull.rows().iter().find(|h| h.a == r.a && h.b == r.b) {
        return Ok(CombinationStatus::InHull { matches: m.label.clone() });
    }
    Ok(match implied_by(&r, hull)? {
        Some(cert) => CombinationStatus::Dominated {
            certificate: cert.to_string(),
            support: cert.support().into_iter().map(String::from).collect(),
            verified: verify_certificate(&r, &cert, hull),
        },
        None => CombinationStatus::Unexplained,
    })
}

/// Derives the one-period hull of the basic operation model by lifting and
/// elimination, recording each combination on the charging copy of the
/// initial state of charge.
pub fn replay_derivation(p: &StorageParams) -> Result<ReplayTranscript, HullError> {
    let d = build_disjuncts(p, Family::Bo)?;
    let lifted = balas_lift(&d.charging, &d.discharging, &d.shared, &d.delta)?;
    let mut keep = d.shared.clone();
    keep.push(d.delta.clone());
    let target = Var::new(format!("{}^1", d.shared.iter().find(|v| v.as_str() == "e[t=0]").expect("initial state")));

    let mut cur = lifted.clone();
    let mut substitutions = Vec::new();
    loop {
        let next = cur.vars().iter().enumerate().find(|(k, v)| {
            !keep.contains(v) && **v != target && cur.rows().iter().any(|r| r.eq && !r.a[*k].is_zero())
        });
        let Some((_, var)) = next else { break };
        let var = var.clone();
        let (after, step) = fm_eliminate_traced(&cur, var.as_str())?;
        if let FmMethod::Substitution { by } = &step.method {
            substitutions.push(format!("{var} from [{}] {}", by.label, cur.row_constraint(by)));
        }
        cur = after;
    }
    let rewritten = cur.clone();

    let (after, step) = fm_eliminate_traced(&rewritten, target.as_str())?;
    let rest = project(&after, &keep)?;
    let hull = remove_redundant(&rest)?.kept.with_var_order(&keep)?;

    let vars = step.raw.vars().to_vec();
    let k = rewritten.index(target.as_str()).expect("target column");
    let mut combinations = Vec::new();
    if let FmMethod::Combination { pairs } = &step.method {
        for (upper, lower, row) in pairs {
            let mut r = row.clone();
            r.a.remove(k);
            let shown = restate(&r, &vars, &vars);
            let mut scratch = Polyhedron::new(vars.clone());
            scratch.push_row(shown.clone());
            combinations.push(ReplayCombination {
                upper: upper.clone(),
                lower: lower.clone(),
                row: scratch.row_constraint(&shown).to_string(),
                status: classify(&r, &vars, &keep, &hull)?,
            });
        }
    }

    let rewritten_status = rewritten
        .rows()
        .iter()
        .map(|r| classify(r, rewritten.vars(), &keep, &hull))
        .collect::<Result<Vec<_>, _>>()?;

    let (tight, _, _) = one_period_polytope(p, Family::To, true, TirEnergyRows::Corrected)?;
    let equals_tight = poly_equal(&hull, &tight)?.is_equal();
    Ok(ReplayTranscript {
        params: p.clone(),
        charging: rows_of(&d.charging),
        discharging: rows_of(&d.discharging),
        lifted: rows_of(&lifted),
        substitutions,
        rewritten: rows_of(&rewritten),
        rewritten_status,
        eliminated: target.to_string(),
        combinations,
        final_rows: rows_of(&hull),
        tight_rows: rows_of(&remove_redundant(&tight)?.kept),
        equals_tight,
        final_polytope: hull,
    })
}

impl ReplayTranscript {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("transcript serializes")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let section = |s: &mut String, title: &str, rows: &[String]| {
            let _ = writeln!(s, "{title}");
            for r in rows {
                let _ = writeln!(s, "  {r}");
            }
            let _ = writeln!(s);
        };
        section(&mut s, "Charging set (delta = 1)", &self.charging);
        section(&mut s, "Discharging set (delta = 0)", &self.discharging);
        section(&mut s, "Lifted system", &self.lifted);
        section(&mut s, "Substitutions", &self.substitutions);
        let _ = writeln!(s, "Rewritten system");
        for (r, st) in self.rewritten.iter().zip(&self.rewritten_status) {
            let _ = writeln!(s, "  {r}");
            let _ = writeln!(s, "    {st}");
        }
        let _ = writeln!(s);
        let _ = writeln!(s, "Combinations eliminating {}", self.eliminated);
        for c in &self.combinations {
            let _ = writeln!(s, "  [{}] + [{}]:", c.upper, c.lower);
            let _ = writeln!(s, "    {}", c.row);
            let _ = writeln!(s, "    {}", c.status);
        }
        let _ = writeln!(s);
        section(&mut s, "Final rows", &self.final_rows);
        section(&mut s, "Tight LP rows", &self.tight_rows);
        let _ = writeln!(s, "final rows equal the tight LP: {}", self.equals_tight);
        s
    }
}
