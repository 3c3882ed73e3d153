//! JSON document form of polyhedra.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::numeric::{LinearForm, Rational, Var};

use super::{LinearConstraint, PolyError, Polyhedron, Sense};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintJson {
    pub coeffs: BTreeMap<Var, Rational>,
    pub sense: Sense,
    pub rhs: Rational,
    #[serde(default)]
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyhedronJson {
    pub variables: Vec<Var>,
    pub constraints: Vec<ConstraintJson>,
}

impl From<&LinearConstraint> for ConstraintJson {
    fn from(c: &LinearConstraint) -> Self {
        ConstraintJson {
            coeffs: c.form.terms().map(|(v, k)| (v.clone(), k.clone())).collect(),
            sense: c.sense,
            rhs: c.rhs.clone(),
            label: c.label.clone(),
        }
    }
}

impl From<&ConstraintJson> for LinearConstraint {
    fn from(c: &ConstraintJson) -> Self {
        LinearConstraint {
            form: LinearForm::from_terms(c.coeffs.iter().map(|(v, k)| (k.clone(), v.clone())), Rational::zero()),
            sense: c.sense,
            rhs: c.rhs.clone(),
            label: c.label.clone(),
        }
    }
}

impl From<&Polyhedron> for PolyhedronJson {
    fn from(p: &Polyhedron) -> Self {
        PolyhedronJson {
            variables: p.vars().to_vec(),
            constraints: p.constraints().iter().map(ConstraintJson::from).collect(),
        }
    }
}

impl TryFrom<&PolyhedronJson> for Polyhedron {
    type Error = PolyError;

    fn try_from(j: &PolyhedronJson) -> Result<Self, PolyError> {
        let cons: Vec<LinearConstraint> = j.constraints.iter().map(LinearConstraint::from).collect();
        Polyhedron::from_constraints(j.variables.clone(), &cons)
    }
}

impl Polyhedron {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&PolyhedronJson::from(self)).expect("polyhedron serializes")
    }

    pub fn from_json(s: &str) -> Result<Polyhedron, PolyJsonError> {
        let j: PolyhedronJson = serde_json::from_str(s)?;
        Ok(Polyhedron::try_from(&j)?)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PolyJsonError {
    #[error("malformed polyhedron JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Poly(#[from] PolyError),
}
