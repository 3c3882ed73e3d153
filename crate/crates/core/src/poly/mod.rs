//! H-polyhedra over exact rationals: projection, disjunctive lifting,
//! redundancy removal with certificates, vertex enumeration and equality.

mod balas;
mod canonical;
mod equality;
mod fm;
mod io;
mod redundancy;
mod vertices;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::{LinearForm, Rational, Var};
use crate::solver::simplex::PivotLimit;

pub use balas::balas_lift;
pub use canonical::CanonicalReport;
pub use equality::{poly_equal, EqualityWitness, PolyEquality};
pub use fm::{fm_eliminate, fm_eliminate_traced, project, project_traced, FmMethod, FmStep};
pub use io::{ConstraintJson, PolyJsonError, PolyhedronJson};
pub use redundancy::{
    detect_implicit_equalities, implied_by, remove_redundant, verify_certificate, RedundancyCertificate,
    RedundancyReport, RemovedRow,
};
pub use vertices::{enumerate_vertices, enumerate_vertices_with, VertexGuard, VertexSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("unknown variable `{0}`")]
    UnknownVariable(Var),
    #[error("variable sets differ: {0:?} vs {1:?}")]
    VariableMismatch(Vec<Var>, Vec<Var>),
    #[error("invalid disjunct: {0}")]
    InvalidDisjunct(String),
    #[error("polyhedron is unbounded")]
    Unbounded,
    #[error("vertex enumeration guard exceeded: dimension {dim}, rows {rows}")]
    TooLarge { dim: usize, rows: usize },
    #[error("LP pivot limit reached")]
    PivotLimit,
}

impl From<PivotLimit> for PolyError {
    fn from(_: PivotLimit) -> Self {
        PolyError::PivotLimit
    }
}

/// Constraint sense as written by a modeller. Polyhedra store only `Le` and
/// `Eq`; `Ge` rows are negated on ingest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Sense {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "=")]
    Eq,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        })
    }
}

/// `form sense rhs`, where `form` has no constant term.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinearConstraint {
    pub form: LinearForm,
    pub sense: Sense,
    pub rhs: Rational,
    pub label: String,
}

impl LinearConstraint {
    /// `lhs sense rhs` with constants on either side folded into `rhs`.
    pub fn new(lhs: LinearForm, sense: Sense, rhs: LinearForm, label: impl Into<String>) -> Self {
        let diff = lhs - rhs;
        let rhs = -diff.constant_term().clone();
        let mut form = diff;
        form.add_constant(&rhs);
        LinearConstraint { form, sense, rhs, label: label.into() }
    }

    pub fn le(lhs: LinearForm, rhs: LinearForm, label: impl Into<String>) -> Self {
        Self::new(lhs, Sense::Le, rhs, label)
    }

    pub fn ge(lhs: LinearForm, rhs: LinearForm, label: impl Into<String>) -> Self {
        Self::new(lhs, Sense::Ge, rhs, label)
    }

    pub fn eq(lhs: LinearForm, rhs: LinearForm, label: impl Into<String>) -> Self {
        Self::new(lhs, Sense::Eq, rhs, label)
    }

    pub fn is_satisfied(&self, values: &BTreeMap<Var, Rational>) -> Result<bool, crate::numeric::NumericError> {
        let lhs = self.form.eval(values)?;
        Ok(match self.sense {
            Sense::Le => lhs <= self.rhs,
            Sense::Ge => lhs >= self.rhs,
            Sense::Eq => lhs == self.rhs,
        })
    }
}

impl fmt::Display for LinearConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.form, self.sense, crate::numeric::LinearForm::constant(self.rhs.clone()))
    }
}

/// Dense row `a.x <= b` or `a.x = b`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Row {
    pub a: Vec<Rational>,
    pub b: Rational,
    pub eq: bool,
    pub label: String,
}

impl Row {
    pub fn is_zero(&self) -> bool {
        self.a.iter().all(Rational::is_zero)
    }

    pub fn dot(&self, x: &[Rational]) -> Rational {
        self.a.iter().zip(x).filter(|(a, _)| !a.is_zero()).map(|(a, v)| a * v).sum()
    }

    pub fn satisfied_by(&self, x: &[Rational]) -> bool {
        let lhs = self.dot(x);
        if self.eq {
            lhs == self.b
        } else {
            lhs <= self.b
        }
    }
}

/// H-representation `{x : A x <= b, E x = f}` over named variables. Rows are
/// kept scaled to primitive integers and sorted, so equal inputs print equal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polyhedron {
    vars: Vec<Var>,
    rows: Vec<Row>,
}

impl Polyhedron {
    pub fn new(vars: Vec<Var>) -> Self {
        Polyhedron { vars, rows: Vec::new() }
    }

    /// Builds from sparse constraints; `Ge` rows are negated, every row is
    /// scaled canonically, and rows are sorted.
    pub fn from_constraints(vars: Vec<Var>, cons: &[LinearConstraint]) -> Result<Self, PolyError> {
        let mut p = Polyhedron::new(vars);
        for c in cons {
            p.push(c)?;
        }
        p.sort();
        Ok(p)
    }

    pub fn push(&mut self, c: &LinearConstraint) -> Result<(), PolyError> {
        let mut a = vec![Rational::zero(); self.vars.len()];
        for (v, k) in c.form.terms() {
            let i = self.index(v.as_str()).ok_or_else(|| PolyError::UnknownVariable(v.clone()))?;
            a[i] = k.clone();
        }
        let (a, b) = match c.sense {
            Sense::Ge => (a.iter().map(|x| -x).collect(), -&c.rhs),
            _ => (a, c.rhs.clone()),
        };
        self.push_row(Row { a, b, eq: c.sense == Sense::Eq, label: c.label.clone() });
        Ok(())
    }

    pub fn push_row(&mut self, row: Row) {
        debug_assert_eq!(row.a.len(), self.vars.len());
        self.rows.push(canonical::scale_row(row));
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    pub fn index(&self, v: &str) -> Option<usize> {
        self.vars.iter().position(|x| x.as_str() == v)
    }

    pub fn constraints(&self) -> Vec<LinearConstraint> {
        self.rows.iter().map(|r| self.row_constraint(r)).collect()
    }

    pub fn row_constraint(&self, r: &Row) -> LinearConstraint {
        let form = LinearForm::from_terms(
            r.a.iter().zip(&self.vars).filter(|(k, _)| !k.is_zero()).map(|(k, v)| (k.clone(), v.clone())),
            Rational::zero(),
        );
        LinearConstraint {
            form,
            sense: if r.eq { Sense::Eq } else { Sense::Le },
            rhs: r.b.clone(),
            label: r.label.clone(),
        }
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        self.rows.iter().all(|r| r.satisfied_by(x))
    }

    /// `true` when a row `0 <= b` with `b < 0` is present. This is the
    /// canonical encoding of the empty set produced by the engine.
    pub fn is_trivially_empty(&self) -> bool {
        self.rows.iter().any(|r| r.is_zero() && (r.b.is_negative() || (r.eq && !r.b.is_zero())))
    }

    pub fn empty(vars: Vec<Var>) -> Self {
        let n = vars.len();
        Polyhedron {
            vars,
            rows: vec![Row { a: vec![Rational::zero(); n], b: -Rational::one(), eq: false, label: "infeasible".into() }],
        }
    }

    pub fn sort(&mut self) {
        self.rows.sort_by(canonical::row_order);
    }

    /// Reorders (and if needed extends with zero columns) to `vars`.
    pub fn with_var_order(&self, vars: &[Var]) -> Result<Polyhedron, PolyError> {
        for v in &self.vars {
            if !vars.contains(v) {
                return Err(PolyError::VariableMismatch(self.vars.clone(), vars.to_vec()));
            }
        }
        let map: Vec<Option<usize>> = vars.iter().map(|v| self.index(v.as_str())).collect();
        let rows = self
            .rows
            .iter()
            .map(|r| Row {
                a: map.iter().map(|m| m.map(|i| r.a[i].clone()).unwrap_or_default()).collect(),
                b: r.b.clone(),
                eq: r.eq,
                label: r.label.clone(),
            })
            .collect();
        let mut p = Polyhedron { vars: vars.to_vec(), rows };
        p.sort();
        Ok(p)
    }

    /// Adds fresh variables as zero columns.
    pub fn extend_vars(&self, extra: &[Var]) -> Polyhedron {
        let mut vars = self.vars.clone();
        vars.extend(extra.iter().cloned());
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut a = r.a.clone();
                a.resize(vars.len(), Rational::zero());
                Row { a, b: r.b.clone(), eq: r.eq, label: r.label.clone() }
            })
            .collect();
        Polyhedron { vars, rows }
    }

    /// Replaces variable `v` by the constant `value`.
    pub fn fix(&self, v: &str, value: &Rational) -> Result<Polyhedron, PolyError> {
        let k = self.index(v).ok_or_else(|| PolyError::UnknownVariable(Var::from(v)))?;
        let mut vars = self.vars.clone();
        vars.remove(k);
        let mut out = Polyhedron::new(vars);
        for r in &self.rows {
            let mut a = r.a.clone();
            let c = a.remove(k);
            out.push_row(Row { a, b: &r.b - &c * value, eq: r.eq, label: r.label.clone() });
        }
        out.sort();
        Ok(out)
    }

    /// Appends the constraint set of `other` (same variable set) to `self`.
    pub fn intersect(&self, other: &Polyhedron) -> Result<Polyhedron, PolyError> {
        let o = other.with_var_order(&self.vars)?;
        let mut out = self.clone();
        out.rows.extend(o.rows);
        out.sort();
        Ok(out)
    }

    pub fn renamed(&self, f: impl Fn(&Var) -> Var) -> Polyhedron {
        Polyhedron { vars: self.vars.iter().map(f).collect(), rows: self.rows.clone() }
    }

    /// Exact emptiness test by LP.
    pub fn is_empty(&self) -> Result<bool, PolyError> {
        let zero = vec![Rational::zero(); self.dim()];
        let out = redundancy::lp_over(self, &zero).solve(crate::solver::Arithmetic::Exact, usize::MAX)?;
        Ok(matches!(out, crate::solver::LpOutcome::Infeasible { .. }))
    }

    /// Exact boundedness test: every coordinate is bounded above and below.
    /// The empty set counts as bounded.
    pub fn is_bounded(&self) -> Result<bool, PolyError> {
        for j in 0..self.dim() {
            for s in [1, -1] {
                let mut c = vec![Rational::zero(); self.dim()];
                c[j] = Rational::from_int(s);
                let out = redundancy::lp_over(self, &c).solve(crate::solver::Arithmetic::Exact, usize::MAX)?;
                if matches!(out, crate::solver::LpOutcome::Unbounded { .. }) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    pub(crate) fn from_parts(vars: Vec<Var>, rows: Vec<Row>) -> Self {
        let mut p = Polyhedron { vars, rows };
        p.sort();
        p
    }
}

impl fmt::Display for Polyhedron {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rows {
            writeln!(f, "{:<28} {}", r.label, self.row_constraint(r))?;
        }
        Ok(())
    }
}
