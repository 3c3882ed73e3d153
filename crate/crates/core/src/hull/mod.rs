//! One-period convex hull certification: disjunctive sets, lifting,
//! projection, and comparison with the tight LP relaxation.

mod random;
mod replay;

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::formulations::{build, relax, BuildError, BuildOptions, Family, InitialState, ReserveProfile, StorageParams, TirEnergyRows};
use crate::model::ModelError;
use crate::numeric::{Rational, Var};
use crate::poly::{
    balas_lift, enumerate_vertices, fm_eliminate, fm_eliminate_traced, poly_equal, remove_redundant,
    verify_certificate, EqualityWitness, PolyEquality, PolyError, Polyhedron, RemovedRow,
    VertexSet,
};

pub use random::{random_params, random_params_batch};
pub use replay::{replay_derivation, CombinationStatus, ReplayCombination, ReplayTranscript};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HullError {
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("{0} has no tight counterpart to certify against")]
    NoTightCounterpart(Family),
}

/// The storage variables of one period, shared by both disjuncts.
fn shared_vars(m: &crate::model::ModelInstance) -> (Vec<Var>, Var) {
    let delta = Var::from("delta[t=1]");
    let e0 = Var::from("e[t=0]");
    let mut shared = vec![e0.clone()];
    shared.extend(m.var_ids().into_iter().filter(|v| v.as_str() != "e[t=1]" && *v != delta && *v != e0));
    (shared, delta)
}

/// One-period LP polytope of `family` with the end-of-period state of charge
/// substituted out. The state before the period is the variable `e[t=0]`.
pub fn one_period_polytope(p: &StorageParams, family: Family, validate: bool, tir: TirEnergyRows) -> Result<(Polyhedron, Vec<Var>, Var), HullError> {
    let opts = BuildOptions { validate, initial_state: InitialState::Variable, reset_every: None, tir_energy_rows: tir };
    let m = relax(&build(family, p, 1, &ReserveProfile::none(), &opts)?);
    let (shared, delta) = shared_vars(&m);
    let poly = fm_eliminate(&m.to_polyhedron()?, "e[t=1]")?;
    let mut keep = shared.clone();
    keep.push(delta.clone());
    Ok((poly.with_var_order(&keep)?, shared, delta))
}

/// Charging (`delta = 1`) and discharging (`delta = 0`) sets of one period.
#[derive(Debug, Clone)]
pub struct Disjuncts {
    pub shared: Vec<Var>,
    pub delta: Var,
    pub charging: Polyhedron,
    pub discharging: Polyhedron,
    /// Rows dropped from each side as implied by the rest of that side.
    pub crossed_out: Vec<RemovalRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Charging,
    Discharging,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Charging => "charging",
            Side::Discharging => "discharging",
        })
    }
}

/// Fixes the mode binary of the one-period `family` model to each value and
/// keeps a minimal row set per side.
pub fn build_disjuncts(p: &StorageParams, family: Family) -> Result<Disjuncts, HullError> {
    disjuncts_with(p, family, true)
}

fn disjuncts_with(p: &StorageParams, family: Family, validate: bool) -> Result<Disjuncts, HullError> {
    let (poly, shared, delta) = one_period_polytope(p, family, validate, TirEnergyRows::Corrected)?;
    let mut crossed_out = Vec::new();
    let mut side = |value: i64, tag: Side| -> Result<Polyhedron, HullError> {
        let fixed = poly.fix(delta.as_str(), &Rational::from_int(value))?;
        let rep = remove_redundant(&fixed)?;
        for r in &rep.removed {
            crossed_out.push(RemovalRecord::new(format!("{tag} set"), &rep.kept, r, &rep.kept));
        }
        Ok(substitute_fixed(&rep.kept).with_var_order(&shared)?)
    };
    let charging = side(1, Side::Charging)?;
    let discharging = side(0, Side::Discharging)?;
    Ok(Disjuncts { shared, delta, charging, discharging, crossed_out })
}

/// Substitutes every single-variable equality `k x = c` into the other rows,
/// so that a fixed variable appears only in its own equality.
fn substitute_fixed(p: &Polyhedron) -> Polyhedron {
    let fixed: Vec<(usize, Rational)> = p
        .rows()
        .iter()
        .filter(|r| r.eq && r.a.iter().filter(|a| !a.is_zero()).count() == 1)
        .map(|r| {
            let k = r.a.iter().position(|a| !a.is_zero()).expect("one nonzero");
            (k, &r.b / &r.a[k])
        })
        .collect();
    let mut out = Polyhedron::new(p.vars().to_vec());
    for r in p.rows() {
        let mut r = r.clone();
        let own = r.eq && r.a.iter().filter(|a| !a.is_zero()).count() == 1;
        if !own {
            for (k, value) in &fixed {
                if !r.a[*k].is_zero() {
                    r.b -= &(&r.a[*k] * value);
                    r.a[*k] = Rational::zero();
                }
            }
        }
        out.push_row(r);
    }
    out.sort();
    out
}

/// A row dropped somewhere in the pipeline with the reason, checked exactly
/// against the rows present when it was dropped.
#[derive(Debug, Clone, Serialize)]
pub struct RemovalRecord {
    pub stage: String,
    pub row: String,
    pub label: String,
    pub certificate: String,
    pub verified: bool,
}

impl RemovalRecord {
    fn new(stage: impl Into<String>, p: &Polyhedron, removed: &RemovedRow, pool: &Polyhedron) -> Self {
        RemovalRecord {
            stage: stage.into(),
            row: p.row_constraint(&removed.row).to_string(),
            label: removed.row.label.clone(),
            certificate: removed.certificate.to_string(),
            verified: verify_certificate(&removed.row, &removed.certificate, pool),
        }
    }
}

/// Separating point when the hull and the tight LP differ.
#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    /// `hull` when the point lies in the hull of the disjuncts and violates a
    /// tight LP row, `tight` for the converse.
    pub lies_in: String,
    pub violated_row: String,
    pub point: Vec<(String, Rational)>,
}

impl Witness {
    fn from_equality(w: &EqualityWitness, left: &Polyhedron, left_name: &str, right_name: &str) -> Self {
        let lies_in = if w.in_left { left_name } else { right_name };
        Witness {
            lies_in: lies_in.to_string(),
            violated_row: format!("[{}] {}", w.violated.label, left.row_constraint(&w.violated)),
            point: w.point.iter().map(|(v, x)| (v.to_string(), x.clone())).collect(),
        }
    }
}

/// Outcome of certifying one parameter set.
#[derive(Debug, Clone, Serialize)]
pub struct HullCertificate {
    pub params: StorageParams,
    pub family: Family,
    pub tight_family: Family,
    pub vars: Vec<Var>,
    pub charging_vertices: VertexSet,
    pub discharging_vertices: VertexSet,
    pub tight_lp_vertices: VertexSet,
    /// Rows of the projected hull after redundancy removal.
    pub hull_rows: Vec<String>,
    /// Rows of the tight LP (one period, end state substituted out).
    pub tight_rows: Vec<String>,
    /// Projected hull equals the tight LP as point sets (LP route).
    pub lp_route_equal: bool,
    /// Every tight LP vertex has a binary mode, no simultaneous charging and
    /// discharging, and lies in its disjunct; every disjunct vertex lies in
    /// the tight LP (vertex route).
    pub vertex_route_equal: bool,
    pub vertex_route_failures: Vec<String>,
    /// Both routes agree that the sets are equal.
    pub equality: bool,
    pub removed_rows: Vec<RemovalRecord>,
    pub witness: Option<Witness>,
}

impl HullCertificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn all_removals_verified(&self) -> bool {
        self.removed_rows.iter().all(|r| r.verified)
    }

    pub fn to_text(&self) -> String {
        use std::fmt::Write;
        let mut s = String::new();
        let _ = writeln!(s, "family: {} vs {}", self.family, self.tight_family);
        let _ = writeln!(s, "equality: {}", self.equality);
        let _ = writeln!(s, "lp route: {}", self.lp_route_equal);
        let _ = writeln!(s, "vertex route: {}", self.vertex_route_equal);
        let _ = writeln!(
            s,
            "vertices: charging {}, discharging {}, tight lp {}",
            self.charging_vertices.len(),
            self.discharging_vertices.len(),
            self.tight_lp_vertices.len()
        );
        let _ = writeln!(s, "hull rows:");
        for r in &self.hull_rows {
            let _ = writeln!(s, "  {r}");
        }
        let _ = writeln!(s, "tight lp rows:");
        for r in &self.tight_rows {
            let _ = writeln!(s, "  {r}");
        }
        let verified = self.removed_rows.iter().filter(|r| r.verified).count();
        let _ = writeln!(s, "removed rows: {} ({} verified)", self.removed_rows.len(), verified);
        for r in &self.vertex_route_failures {
            let _ = writeln!(s, "vertex route failure: {r}");
        }
        if let Some(w) = &self.witness {
            let _ = write!(s, "witness in {} violating {}:", w.lies_in, w.violated_row);
            for (v, x) in &w.point {
                let _ = write!(s, " {v}={x}");
            }
            let _ = writeln!(s);
        }
        s
    }
}

fn rows_text(p: &Polyhedron) -> Vec<String> {
    p.rows().iter().map(|r| format!("[{}] {}", r.label, p.row_constraint(r))).collect()
}

fn is_binary(x: &Rational) -> bool {
    x.is_zero() || x.is_one()
}

fn vertex_route(
    d: &Disjuncts,
    tight: &Polyhedron,
    charging_v: &VertexSet,
    discharging_v: &VertexSet,
    tight_v: &VertexSet,
) -> Result<Vec<String>, HullError> {
    let mut failures = Vec::new();
    if !tight.is_bounded()? {
        failures.push("tight LP polytope is unbounded".to_string());
        return Ok(failures);
    }
    let kd = tight.index(d.delta.as_str()).expect("delta column");
    let (kc, kdis) = (tight.index("p_c[t=1]").expect("p_c column"), tight.index("p_d[t=1]").expect("p_d column"));
    for x in &tight_v.points {
        let shown = || tight.vars().iter().zip(x).map(|(v, x)| format!("{v}={x}")).collect::<Vec<_>>().join(" ");
        if !is_binary(&x[kd]) {
            failures.push(format!("tight LP vertex with fractional mode: {}", shown()));
            continue;
        }
        if !(&x[kc] * &x[kdis]).is_zero() {
            failures.push(format!("tight LP vertex with simultaneous charging and discharging: {}", shown()));
        }
        let mut rest = x.clone();
        rest.remove(kd);
        let side = if x[kd].is_one() { &d.charging } else { &d.discharging };
        if !side.contains(&rest) {
            failures.push(format!("tight LP vertex outside its disjunct: {}", shown()));
        }
    }
    for (vs, value) in [(charging_v, Rational::one()), (discharging_v, Rational::zero())] {
        for x in &vs.points {
            let mut full = x.clone();
            full.insert(kd, value.clone());
            if !tight.contains(&full) {
                let shown = tight.vars().iter().zip(&full).map(|(v, x)| format!("{v}={x}")).collect::<Vec<_>>().join(" ");
                failures.push(format!("disjunct vertex outside the tight LP: {shown}"));
            }
        }
    }
    Ok(failures)
}

/// Certifies that the tight LP of `family`'s pair describes the convex hull
/// of the one-period charging and discharging sets. Two independent routes:
/// lifting plus projection compared by LP, and vertex enumeration.
pub fn certify_hull(p: &StorageParams, family: Family) -> Result<HullCertificate, HullError> {
    certify_hull_with(p, family, TirEnergyRows::Corrected, true)
}

/// As [`certify_hull`], choosing the tight investment energy rows and
/// whether the parameter rules are enforced first.
pub fn certify_hull_with(p: &StorageParams, family: Family, tir: TirEnergyRows, validate: bool) -> Result<HullCertificate, HullError> {
    let (basic, tight_family) = family.pair().ok_or(HullError::NoTightCounterpart(family))?;
    let d = disjuncts_with(p, basic, validate)?;
    let mut removed_rows: Vec<RemovalRecord> = d.crossed_out.clone();

    let lifted = balas_lift(&d.charging, &d.discharging, &d.shared, &d.delta)?;
    let mut keep = d.shared.clone();
    keep.push(d.delta.clone());
    let mut cur = lifted;
    loop {
        let drop: Vec<Var> = cur.vars().iter().filter(|v| !keep.contains(v)).cloned().collect();
        let Some(var) = next_to_eliminate(&cur, &drop) else { break };
        let (next, step) = fm_eliminate_traced(&cur, var.as_str())?;
        for r in &step.pruned {
            removed_rows.push(RemovalRecord::new(format!("eliminating {var}"), &step.canonical, r, &step.canonical));
        }
        let rep = remove_redundant(&next)?;
        for r in &rep.removed {
            removed_rows.push(RemovalRecord::new(format!("eliminating {var}"), &rep.kept, r, &rep.kept));
        }
        cur = rep.kept;
    }
    let hull = cur.with_var_order(&keep)?;

    let (tight, _, _) = one_period_polytope(p, tight_family, validate, tir)?;
    let tight_min = remove_redundant(&tight)?.kept;

    let lp_route = poly_equal(&hull, &tight)?;
    let witness = match &lp_route {
        PolyEquality::Equal => None,
        PolyEquality::Different(w) => Some(Witness::from_equality(w, &hull, "hull", "tight")),
    };

    let charging_vertices = enumerate_vertices(&d.charging)?;
    let discharging_vertices = enumerate_vertices(&d.discharging)?;
    let tight_lp_vertices = enumerate_vertices(&tight_min)?.reorder(tight.vars()).expect("same variables");
    let failures = vertex_route(&d, &tight, &charging_vertices, &discharging_vertices, &tight_lp_vertices)?;

    let lp_route_equal = lp_route.is_equal();
    let vertex_route_equal = failures.is_empty();
    Ok(HullCertificate {
        params: p.clone(),
        family: basic,
        tight_family,
        vars: keep,
        charging_vertices,
        discharging_vertices,
        tight_lp_vertices,
        hull_rows: rows_text(&hull),
        tight_rows: rows_text(&tight_min),
        lp_route_equal,
        vertex_route_equal,
        vertex_route_failures: failures,
        equality: lp_route_equal && vertex_route_equal,
        removed_rows,
        witness,
    })
}

/// Substitutable variables first, then the cheapest combination step.
fn next_to_eliminate(p: &Polyhedron, drop: &[Var]) -> Option<Var> {
    let present: Vec<usize> = drop.iter().filter_map(|v| p.index(v.as_str())).collect();
    if let Some(&k) = present.iter().find(|&&k| p.rows().iter().any(|r| r.eq && !r.a[k].is_zero())) {
        return Some(p.vars()[k].clone());
    }
    present
        .into_iter()
        .min_by_key(|&k| {
            let pos = p.rows().iter().filter(|r| r.a[k].is_positive()).count() as i64;
            let neg = p.rows().iter().filter(|r| r.a[k].is_negative()).count() as i64;
            pos * neg - pos - neg
        })
        .map(|k| p.vars()[k].clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_int(n)
    }

    pub(crate) fn reference_unit() -> StorageParams {
        StorageParams {
            e_min: q(5),
            e_max: q(50),
            p_c_max: q(10),
            p_d_max: q(10),
            eta_c: Rational::new(1, 2),
            eta_d: Rational::new(1, 2),
            ..StorageParams::default()
        }
    }

    #[test]
    fn charging_disjunct_rows() {
        let d = build_disjuncts(&reference_unit(), Family::Bo).unwrap();
        let text = rows_text(&d.charging).join("\n");
        assert_eq!(d.charging.rows().len(), 5, "{text}");
        assert!(text.contains("p_d[t=1] = 0"), "{text}");
        let has = |p: &Polyhedron, a: &[i64], b: i64| {
            p.rows().iter().any(|r| r.a.iter().cloned().eq(a.iter().map(|x| q(*x))) && r.b == q(b))
        };
        // shared order: e[t=0], p_c[t=1], p_d[t=1]
        assert_eq!(d.shared.iter().map(|v| v.as_str()).collect::<Vec<_>>(), vec!["e[t=0]", "p_c[t=1]", "p_d[t=1]"]);
        assert!(has(&d.charging, &[-1, 0, 0], -5), "{text}");
        assert!(has(&d.charging, &[2, 1, 0], 100), "{text}");
        assert!(has(&d.charging, &[0, 1, 0], 10), "{text}");
        let dis = rows_text(&d.discharging).join("\n");
        assert!(has(&d.discharging, &[-1, 0, 2], -5), "{dis}");
    }

    #[test]
    fn zero_charge_capacity_collapses_charging_side() {
        let p = StorageParams { p_c_max: q(0), ..reference_unit() };
        let d = build_disjuncts(&p, Family::Bo).unwrap();
        let v = enumerate_vertices(&d.charging).unwrap();
        assert_eq!(v.column("p_c[t=1]").unwrap(), vec![q(0), q(0)]);
        assert_eq!(v.column("e[t=0]").unwrap(), vec![q(5), q(50)]);
    }

    #[test]
    fn reference_unit_bo_certifies() {
        let c = certify_hull(&reference_unit(), Family::Bo).unwrap();
        assert!(c.lp_route_equal && c.vertex_route_equal, "{}", c.to_text());
        assert!(c.all_removals_verified());
        assert!(c.witness.is_none());
    }

    #[test]
    fn invalid_capacity_breaks_equality() {
        let p = StorageParams { p_c_max: q(100), ..reference_unit() };
        assert!(matches!(certify_hull(&p, Family::Bo), Err(HullError::Build(BuildError::InvalidParams(_)))));
        let c = certify_hull_with(&p, Family::Bo, TirEnergyRows::Corrected, false).unwrap();
        assert!(!c.equality);
        assert!(!c.lp_route_equal && !c.vertex_route_equal);
        assert!(c.witness.is_some());
    }

    #[test]
    fn flexible_family_has_no_tight_counterpart() {
        assert!(matches!(certify_hull(&reference_unit(), Family::Bof), Err(HullError::NoTightCounterpart(Family::Bof))));
    }
}
