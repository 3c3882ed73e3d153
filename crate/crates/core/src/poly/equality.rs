//! Exact set equality of two H-polyhedra.

use std::fmt;

use crate::numeric::{Rational, Var};
use crate::solver::{Arithmetic, LpOutcome};

use super::redundancy::lp_over;
use super::{PolyError, Polyhedron, Row};

const MAX_PIVOTS: usize = 1_000_000;

/// A point of one polyhedron that violates a row of the other.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EqualityWitness {
    /// `true` when the point lies in the left polyhedron and violates a row
    /// of the right one.
    pub in_left: bool,
    pub violated: Row,
    pub point: Vec<(Var, Rational)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PolyEquality {
    Equal,
    Different(EqualityWitness),
}

impl PolyEquality {
    pub fn is_equal(&self) -> bool {
        matches!(self, PolyEquality::Equal)
    }
}

impl fmt::Display for EqualityWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = if self.in_left { "left" } else { "right" };
        write!(f, "point of the {side} polyhedron violating [{}]:", self.violated.label)?;
        for (v, x) in &self.point {
            write!(f, " {v}={x}")?;
        }
        Ok(())
    }
}

/// A point of `p` violating `row`, if any.
fn violation(p: &Polyhedron, row: &Row) -> Result<Option<Vec<Rational>>, PolyError> {
    let mut senses = vec![(row.a.iter().map(|v| -v).collect::<Vec<_>>(), row.b.clone())];
    if row.eq {
        senses.push((row.a.clone(), -&row.b));
    }
    for (c, bound) in senses {
        // Violation when max(-c.x) exceeds `bound`.
        match lp_over(p, &c).solve(Arithmetic::Exact, MAX_PIVOTS)? {
            LpOutcome::Optimal { x, objective, .. } => {
                if -objective > bound {
                    return Ok(Some(x));
                }
            }
            LpOutcome::Unbounded { .. } => return Err(PolyError::Unbounded),
            LpOutcome::Infeasible { .. } => return Ok(None),
        }
    }
    Ok(None)
}

fn one_way(inner: &Polyhedron, outer: &Polyhedron, in_left: bool) -> Result<Option<EqualityWitness>, PolyError> {
    for row in outer.rows() {
        if let Some(x) = violation(inner, row)? {
            debug_assert!(inner.contains(&x) && !row.satisfied_by(&x));
            let point = inner.vars().iter().cloned().zip(x).collect();
            return Ok(Some(EqualityWitness { in_left, violated: row.clone(), point }));
        }
    }
    Ok(None)
}

/// Decides `a == b` as point sets by maximizing each row of one over the
/// other in both directions. Variables are matched by name.
pub fn poly_equal(a: &Polyhedron, b: &Polyhedron) -> Result<PolyEquality, PolyError> {
    let mut va = a.vars().to_vec();
    let mut vb = b.vars().to_vec();
    va.sort();
    vb.sort();
    if va != vb {
        return Err(PolyError::VariableMismatch(a.vars().to_vec(), b.vars().to_vec()));
    }
    let b = b.with_var_order(a.vars())?;
    if let Some(w) = one_way(a, &b, true)? {
        return Ok(PolyEquality::Different(w));
    }
    if let Some(w) = one_way(&b, a, false)? {
        return Ok(PolyEquality::Different(w));
    }
    Ok(PolyEquality::Equal)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_int(n)
    }

    fn rows(spec: &[(i64, i64, i64)]) -> Polyhedron {
        Polyhedron::from_parts(
            vec![Var::from("x"), Var::from("y")],
            spec.iter()
                .enumerate()
                .map(|(i, &(a, b, c))| Row { a: vec![q(a), q(b)], b: q(c), eq: false, label: format!("r{i}") })
                .collect(),
        )
    }

    #[test]
    fn redundant_description_is_equal() {
        let a = rows(&[(1, 0, 1), (-1, 0, 0), (0, 1, 1), (0, -1, 0)]);
        let b = rows(&[(1, 0, 1), (-1, 0, 0), (0, 1, 1), (0, -1, 0), (1, 1, 2)]);
        assert!(poly_equal(&a, &b).unwrap().is_equal());
    }

    #[test]
    fn different_sets_give_witness() {
        let a = rows(&[(1, 0, 1), (-1, 0, 0), (0, 1, 1), (0, -1, 0)]);
        let b = rows(&[(1, 0, 1), (-1, 0, 0), (0, 1, 1), (0, -1, 0), (1, 1, 1)]);
        match poly_equal(&a, &b).unwrap() {
            PolyEquality::Different(w) => {
                assert!(w.in_left);
                let x: Vec<Rational> = w.point.iter().map(|(_, v)| v.clone()).collect();
                assert!(a.contains(&x) && !b.contains(&x));
            }
            PolyEquality::Equal => panic!("sets differ"),
        }
    }

    #[test]
    fn unbounded_input_is_an_error() {
        let a = rows(&[(-1, 0, 0), (0, -1, 0)]);
        let b = rows(&[(-1, 0, 0), (0, -1, 0), (1, 1, 5)]);
        assert_eq!(poly_equal(&a, &b), Err(PolyError::Unbounded));
    }
}
