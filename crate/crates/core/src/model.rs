//! Mixed-binary linear models as emitted by the builders and consumed by the
//! solver.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::{LinearForm, Rational, Var};
use crate::poly::{ConstraintJson, LinearConstraint, PolyError, Polyhedron, Sense};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("variable `{0}` declared twice")]
    DuplicateVariable(Var),
    #[error("constraint `{label}` uses undeclared variable `{var}`")]
    UndeclaredVariable { label: String, var: Var },
    #[error("binary variable `{0}` must have bounds [0, 1]")]
    BadBinaryBounds(Var),
    #[error("variable `{0}` has lower bound above upper bound")]
    EmptyBounds(Var),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Integrality {
    Continuous,
    Binary,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariableDecl {
    pub id: Var,
    pub lower: Option<Rational>,
    pub upper: Option<Rational>,
    pub integrality: Integrality,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Objective {
    pub direction: Direction,
    pub form: LinearForm,
}

/// Variables with bounds and integrality marks, labelled linear constraints
/// and a linear objective over a horizon of `horizon` periods.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelInstance {
    pub name: String,
    pub horizon: usize,
    variables: Vec<VariableDecl>,
    index: BTreeMap<Var, usize>,
    constraints: Vec<LinearConstraint>,
    pub objective: Objective,
}

impl ModelInstance {
    pub fn new(name: impl Into<String>, horizon: usize) -> Self {
        ModelInstance {
            name: name.into(),
            horizon,
            variables: Vec::new(),
            index: BTreeMap::new(),
            constraints: Vec::new(),
            objective: Objective { direction: Direction::Minimize, form: LinearForm::zero() },
        }
    }

    pub fn add_var(&mut self, decl: VariableDecl) -> Result<Var, ModelError> {
        if self.index.contains_key(&decl.id) {
            return Err(ModelError::DuplicateVariable(decl.id));
        }
        if decl.integrality == Integrality::Binary
            && (decl.lower != Some(Rational::zero()) || decl.upper != Some(Rational::one()))
        {
            return Err(ModelError::BadBinaryBounds(decl.id));
        }
        if let (Some(l), Some(u)) = (&decl.lower, &decl.upper) {
            if l > u {
                return Err(ModelError::EmptyBounds(decl.id));
            }
        }
        let id = decl.id.clone();
        self.index.insert(id.clone(), self.variables.len());
        self.variables.push(decl);
        Ok(id)
    }

    /// Continuous variable with the given bounds.
    pub fn continuous(&mut self, id: impl Into<Var>, lower: Option<Rational>, upper: Option<Rational>) -> Result<Var, ModelError> {
        self.add_var(VariableDecl { id: id.into(), lower, upper, integrality: Integrality::Continuous })
    }

    /// Nonnegative continuous variable.
    pub fn nonneg(&mut self, id: impl Into<Var>) -> Result<Var, ModelError> {
        self.continuous(id, Some(Rational::zero()), None)
    }

    pub fn binary(&mut self, id: impl Into<Var>) -> Result<Var, ModelError> {
        self.add_var(VariableDecl {
            id: id.into(),
            lower: Some(Rational::zero()),
            upper: Some(Rational::one()),
            integrality: Integrality::Binary,
        })
    }

    pub fn add_constraint(&mut self, c: LinearConstraint) -> Result<(), ModelError> {
        if let Some(v) = c.form.vars().find(|v| !self.index.contains_key(*v)) {
            return Err(ModelError::UndeclaredVariable { label: c.label.clone(), var: v.clone() });
        }
        self.constraints.push(c);
        Ok(())
    }

    pub fn variables(&self) -> &[VariableDecl] {
        &self.variables
    }

    pub fn constraints(&self) -> &[LinearConstraint] {
        &self.constraints
    }

    pub fn var(&self, id: &str) -> Option<&VariableDecl> {
        self.index.get(id).map(|&i| &self.variables[i])
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn var_ids(&self) -> Vec<Var> {
        self.variables.iter().map(|v| v.id.clone()).collect()
    }

    pub fn binaries(&self) -> impl Iterator<Item = &VariableDecl> {
        self.variables.iter().filter(|v| v.integrality == Integrality::Binary)
    }

    pub fn has_binaries(&self) -> bool {
        self.binaries().next().is_some()
    }

    pub fn constraint(&self, label: &str) -> Option<&LinearConstraint> {
        self.constraints.iter().find(|c| c.label == label)
    }

    /// Same model with every binary mark dropped. Bounds stay at `[0, 1]`.
    pub fn relaxed(&self) -> ModelInstance {
        let mut m = self.clone();
        for v in m.variables.iter_mut() {
            v.integrality = Integrality::Continuous;
        }
        m
    }

    /// Same model with the binary marks of the variables selected by `pick`
    /// dropped. Bounds stay at `[0, 1]`.
    pub fn relaxed_where(&self, pick: impl Fn(&Var) -> bool) -> ModelInstance {
        let mut m = self.clone();
        for v in m.variables.iter_mut().filter(|v| pick(&v.id)) {
            v.integrality = Integrality::Continuous;
        }
        m
    }

    /// Replaces a variable's bounds.
    pub fn set_bounds(&mut self, id: &str, lower: Option<Rational>, upper: Option<Rational>) -> Option<()> {
        let i = self.index_of(id)?;
        self.variables[i].lower = lower;
        self.variables[i].upper = upper;
        Some(())
    }

    /// Labels of constraints and bounds violated by `point` (missing
    /// variables read as zero). With `integral`, binaries must be 0 or 1.
    pub fn violations(&self, point: &BTreeMap<Var, Rational>, integral: bool) -> Vec<String> {
        let zero = Rational::zero();
        let val = |v: &Var| point.get(v).unwrap_or(&zero);
        let mut out = Vec::new();
        for d in &self.variables {
            let x = val(&d.id);
            if d.lower.as_ref().is_some_and(|l| x < l) || d.upper.as_ref().is_some_and(|u| x > u) {
                out.push(format!("bound[{}]", d.id));
            }
            if integral && d.integrality == Integrality::Binary && !x.is_zero() && !x.is_one() {
                out.push(format!("integrality[{}]", d.id));
            }
        }
        for c in &self.constraints {
            let lhs: Rational = c.form.terms().map(|(v, k)| k * val(v)).sum();
            let ok = match c.sense {
                Sense::Le => lhs <= c.rhs,
                Sense::Ge => lhs >= c.rhs,
                Sense::Eq => lhs == c.rhs,
            };
            if !ok {
                out.push(c.label.clone());
            }
        }
        out
    }

    pub fn is_feasible(&self, point: &BTreeMap<Var, Rational>, integral: bool) -> bool {
        self.violations(point, integral).is_empty()
    }

    /// Slack `rhs - lhs` of a labelled constraint at `point` (negative when a
    /// `<=` row is violated).
    pub fn slack(&self, label: &str, point: &BTreeMap<Var, Rational>) -> Option<Rational> {
        let c = self.constraint(label)?;
        let zero = Rational::zero();
        let lhs: Rational = c.form.terms().map(|(v, k)| k * point.get(v).unwrap_or(&zero)).sum();
        Some(match c.sense {
            Sense::Ge => &lhs - &c.rhs,
            _ => &c.rhs - &lhs,
        })
    }

    pub fn objective_value(&self, point: &BTreeMap<Var, Rational>) -> Rational {
        let zero = Rational::zero();
        let v: Rational = self.objective.form.terms().map(|(v, k)| k * point.get(v).unwrap_or(&zero)).sum();
        &v + self.objective.form.constant_term()
    }

    /// Constraint rows plus bound rows labelled `lb[x]` / `ub[x]`. Integrality
    /// marks are dropped.
    pub fn to_polyhedron(&self) -> Result<Polyhedron, PolyError> {
        let mut p = Polyhedron::new(self.var_ids());
        for c in &self.constraints {
            p.push(c)?;
        }
        for d in &self.variables {
            if let Some(l) = &d.lower {
                p.push(&LinearConstraint {
                    form: LinearForm::var(d.id.clone()),
                    sense: Sense::Ge,
                    rhs: l.clone(),
                    label: format!("lb[{}]", d.id),
                })?;
            }
            if let Some(u) = &d.upper {
                p.push(&LinearConstraint {
                    form: LinearForm::var(d.id.clone()),
                    sense: Sense::Le,
                    rhs: u.clone(),
                    label: format!("ub[{}]", d.id),
                })?;
            }
        }
        p.sort();
        Ok(p)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ModelJson::from(self)).expect("model serializes")
    }

    pub fn from_json(s: &str) -> Result<ModelInstance, ModelJsonError> {
        let j: ModelJson = serde_json::from_str(s)?;
        Ok(ModelInstance::try_from(j)?)
    }

    /// Plain LP-file text for cross-checking with external solvers. Exact
    /// values are rendered as decimals with `places` fractional digits.
    pub fn to_lp_text(&self, places: usize) -> String {
        let num = |r: &Rational| r.to_decimal(places);
        let name = |v: &Var| sanitize(v.as_str());
        let form = |f: &LinearForm| {
            let mut s = String::new();
            for (i, (v, k)) in f.terms().enumerate() {
                let sign = match (i, k.is_negative()) {
                    (0, true) => "-",
                    (0, false) => "",
                    (_, true) => "- ",
                    (_, false) => "+ ",
                };
                let _ = write!(s, "{}{} {} ", sign, num(&k.abs()), name(v));
            }
            if s.is_empty() {
                s.push_str("0 ");
            }
            s.trim_end().to_string()
        };
        let mut out = String::new();
        let _ = writeln!(out, "\\ model {} (horizon {}), decimals with {} places", self.name, self.horizon, places);
        let _ = writeln!(out, "{}", if self.objective.direction == Direction::Minimize { "Minimize" } else { "Maximize" });
        let _ = writeln!(out, " obj: {}", form(&self.objective.form));
        if !self.objective.form.constant_term().is_zero() {
            let _ = writeln!(out, "\\ objective constant {}", num(self.objective.form.constant_term()));
        }
        let _ = writeln!(out, "Subject To");
        for c in &self.constraints {
            let op = match c.sense {
                Sense::Le => "<=",
                Sense::Ge => ">=",
                Sense::Eq => "=",
            };
            let _ = writeln!(out, " {}: {} {} {}", sanitize(&c.label), form(&c.form), op, num(&c.rhs));
        }
        let _ = writeln!(out, "Bounds");
        for d in &self.variables {
            let lo = d.lower.as_ref().map(num).unwrap_or_else(|| "-inf".into());
            let hi = d.upper.as_ref().map(num).unwrap_or_else(|| "+inf".into());
            let _ = writeln!(out, " {} <= {} <= {}", lo, name(&d.id), hi);
        }
        let bins: Vec<String> = self.binaries().map(|d| name(&d.id)).collect();
        if !bins.is_empty() {
            let _ = writeln!(out, "Binaries");
            let _ = writeln!(out, " {}", bins.join(" "));
        }
        let _ = writeln!(out, "End");
        out
    }

    /// Variables grouped into blocks that share no constraint.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let n = self.variables.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut i: usize) -> usize {
            while p[i] != i {
                p[i] = p[p[i]];
                i = p[i];
            }
            i
        }
        for c in &self.constraints {
            let mut it = c.form.vars().map(|v| self.index[v]);
            if let Some(first) = it.next() {
                for j in it {
                    let (a, b) = (find(&mut parent, first), find(&mut parent, j));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for i in 0..n {
            let r = find(&mut parent, i);
            groups.entry(r).or_default().push(i);
        }
        groups.into_values().collect()
    }

    /// Distinct period indices appearing in variable names.
    pub fn periods(&self) -> BTreeSet<usize> {
        self.variables.iter().filter_map(|d| d.id.period()).collect()
    }
}

fn sanitize(s: &str) -> String {
    s.chars().map(|c| if c.is_ascii_alphanumeric() || "_.[]".contains(c) { c } else { '_' }).collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ObjectiveJson {
    pub direction: Direction,
    pub coeffs: BTreeMap<Var, Rational>,
    #[serde(default)]
    pub constant: Rational,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelJson {
    pub name: String,
    pub horizon: usize,
    pub variables: Vec<VariableDecl>,
    pub constraints: Vec<ConstraintJson>,
    pub objective: ObjectiveJson,
}

impl From<&ModelInstance> for ModelJson {
    fn from(m: &ModelInstance) -> Self {
        ModelJson {
            name: m.name.clone(),
            horizon: m.horizon,
            variables: m.variables.clone(),
            constraints: m.constraints.iter().map(ConstraintJson::from).collect(),
            objective: ObjectiveJson {
                direction: m.objective.direction,
                coeffs: m.objective.form.terms().map(|(v, k)| (v.clone(), k.clone())).collect(),
                constant: m.objective.form.constant_term().clone(),
            },
        }
    }
}

impl TryFrom<ModelJson> for ModelInstance {
    type Error = ModelError;

    fn try_from(j: ModelJson) -> Result<Self, ModelError> {
        let mut m = ModelInstance::new(j.name, j.horizon);
        for v in j.variables {
            m.add_var(v)?;
        }
        for c in &j.constraints {
            m.add_constraint(LinearConstraint::from(c))?;
        }
        let form = LinearForm::from_terms(j.objective.coeffs.into_iter().map(|(v, k)| (k, v)), j.objective.constant);
        if let Some(v) = form.vars().find(|v| m.var(v.as_str()).is_none()) {
            return Err(ModelError::UndeclaredVariable { label: "objective".into(), var: v.clone() });
        }
        m.objective = Objective { direction: j.objective.direction, form };
        Ok(m)
    }
}

#[derive(Debug, Error)]
pub enum ModelJsonError {
    #[error("malformed model JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Model(#[from] ModelError),
}
