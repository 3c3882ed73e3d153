//! Exact LP-based redundancy removal with Farkas certificates.

use std::fmt;

use crate::numeric::Rational;
use crate::solver::{Arithmetic, LpOutcome, LpProblem, LpRow, RowSense};

use super::canonical::canonicalize;
use super::{PolyError, Polyhedron, Row};

const MAX_PIVOTS: usize = 1_000_000;

/// Why a removed row is implied by the rows that were kept.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RedundancyCertificate {
    /// `0 <= b` with `b >= 0`, or `0 = 0`.
    Tautology,
    /// `sum(y_k * row_k)` reproduces the removed row's coefficients with a
    /// right-hand side no larger. Multipliers on inequality rows are
    /// nonnegative; equality rows may carry either sign.
    Combination { terms: Vec<(Row, Rational)> },
    /// The kept system is empty: the combination yields `0 <= -1`.
    Empty { terms: Vec<(Row, Rational)> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RemovedRow {
    pub row: Row,
    pub certificate: RedundancyCertificate,
}

#[derive(Debug, Clone)]
pub struct RedundancyReport {
    pub kept: Polyhedron,
    pub removed: Vec<RemovedRow>,
    /// Opposite inequality pairs fused into equalities.
    pub merged: Vec<(String, String, String)>,
}

impl RedundancyCertificate {
    /// Labels of the rows the certificate uses, in order.
    pub fn support(&self) -> Vec<&str> {
        match self {
            RedundancyCertificate::Tautology => vec![],
            RedundancyCertificate::Combination { terms } | RedundancyCertificate::Empty { terms } => {
                terms.iter().map(|(r, _)| r.label.as_str()).collect()
            }
        }
    }
}

impl fmt::Display for RedundancyCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RedundancyCertificate::Tautology => write!(f, "tautology"),
            RedundancyCertificate::Combination { terms } => {
                write!(f, "dominated by ")?;
                for (i, (r, y)) in terms.iter().enumerate() {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    write!(f, "{}*[{}]", crate::numeric::LinearForm::constant(y.clone()), r.label)?;
                }
                Ok(())
            }
            RedundancyCertificate::Empty { .. } => write!(f, "system is empty"),
        }
    }
}

/// Checks a certificate for `removed` against the rows of `kept`, exactly.
pub fn verify_certificate(removed: &Row, cert: &RedundancyCertificate, kept: &Polyhedron) -> bool {
    let n = kept.dim();
    if removed.a.len() != n {
        return false;
    }
    let combine = |terms: &[(Row, Rational)]| -> Option<(Vec<Rational>, Rational)> {
        let mut a = vec![Rational::zero(); n];
        let mut b = Rational::zero();
        for (r, y) in terms {
            if !kept.rows().contains(r) || (!r.eq && y.is_negative()) {
                return None;
            }
            for (acc, v) in a.iter_mut().zip(&r.a) {
                if !v.is_zero() {
                    *acc += y * v;
                }
            }
            b += y * &r.b;
        }
        Some((a, b))
    };
    match cert {
        RedundancyCertificate::Tautology => {
            removed.is_zero() && if removed.eq { removed.b.is_zero() } else { !removed.b.is_negative() }
        }
        RedundancyCertificate::Combination { terms } => {
            let Some((a, b)) = combine(terms) else { return false };
            if a != removed.a {
                return false;
            }
            if removed.eq {
                terms.iter().all(|(r, _)| r.eq) && b == removed.b
            } else {
                b <= removed.b
            }
        }
        RedundancyCertificate::Empty { terms } => {
            let Some((a, b)) = combine(terms) else { return false };
            a.iter().all(Rational::is_zero) && b.is_negative()
        }
    }
}

/// `min objective.x` over the polyhedron, all variables free.
pub(crate) fn lp_over(p: &Polyhedron, objective: &[Rational]) -> LpProblem {
    let mut lp = LpProblem::new(p.dim());
    lp.cost = objective.to_vec();
    for r in p.rows() {
        lp.rows.push(LpRow {
            coeffs: r.a.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(j, v)| (j, v.clone())).collect(),
            sense: if r.eq { RowSense::Eq } else { RowSense::Le },
            rhs: r.b.clone(),
        });
    }
    lp
}

/// Cheapest nonnegative (free on equalities) combination of `rows`
/// reproducing `target`: `min sum(y b)` s.t. `sum(y a) = target`.
fn best_combination(rows: &[&Row], target: &[Rational]) -> Result<Option<(Vec<Rational>, Rational)>, PolyError> {
    let n = target.len();
    let mut lp = LpProblem::new(rows.len());
    for (k, r) in rows.iter().enumerate() {
        if !r.eq {
            lp.lb[k] = Some(Rational::zero());
        }
        lp.cost[k] = r.b.clone();
    }
    for (j, t) in target.iter().enumerate().take(n) {
        lp.rows.push(LpRow {
            coeffs: rows.iter().enumerate().filter(|(_, r)| !r.a[j].is_zero()).map(|(k, r)| (k, r.a[j].clone())).collect(),
            sense: RowSense::Eq,
            rhs: t.clone(),
        });
    }
    Ok(match lp.solve(Arithmetic::Exact, MAX_PIVOTS)? {
        LpOutcome::Optimal { x, objective, .. } => Some((x, objective)),
        _ => None,
    })
}

fn certificate_against(row: &Row, kept: &[&Row]) -> Result<Option<RedundancyCertificate>, PolyError> {
    if row.is_zero() && (if row.eq { row.b.is_zero() } else { !row.b.is_negative() }) {
        return Ok(Some(RedundancyCertificate::Tautology));
    }
    let pool: Vec<&Row> = if row.eq { kept.iter().copied().filter(|r| r.eq).collect() } else { kept.to_vec() };
    let Some((y, val)) = best_combination(&pool, &row.a)? else { return Ok(None) };
    let ok = if row.eq { val == row.b } else { val <= row.b };
    if !ok {
        return Ok(None);
    }
    let terms = pool.iter().zip(y).filter(|(_, v)| !v.is_zero()).map(|(r, v)| ((*r).clone(), v)).collect();
    Ok(Some(RedundancyCertificate::Combination { terms }))
}

/// Farkas combination proving emptiness, if the system is empty.
/// Certificate that every point of `p` satisfies `row`, or `None` when some
/// point of `p` violates it. `p` must be nonempty for `None` to be meaningful.
pub fn implied_by(row: &Row, p: &Polyhedron) -> Result<Option<RedundancyCertificate>, PolyError> {
    let rows: Vec<&Row> = p.rows().iter().collect();
    certificate_against(row, &rows)
}

fn emptiness_certificate(p: &Polyhedron) -> Result<Option<Vec<(Row, Rational)>>, PolyError> {
    let rows: Vec<&Row> = p.rows().iter().collect();
    let mut lp = LpProblem::new(rows.len());
    for (k, r) in rows.iter().enumerate() {
        if !r.eq {
            lp.lb[k] = Some(Rational::zero());
        }
    }
    for j in 0..p.dim() {
        lp.rows.push(LpRow {
            coeffs: rows.iter().enumerate().filter(|(_, r)| !r.a[j].is_zero()).map(|(k, r)| (k, r.a[j].clone())).collect(),
            sense: RowSense::Eq,
            rhs: Rational::zero(),
        });
    }
    lp.rows.push(LpRow {
        coeffs: rows.iter().enumerate().filter(|(_, r)| !r.b.is_zero()).map(|(k, r)| (k, r.b.clone())).collect(),
        sense: RowSense::Eq,
        rhs: -Rational::one(),
    });
    Ok(match lp.solve(Arithmetic::Exact, MAX_PIVOTS)? {
        LpOutcome::Optimal { x, .. } => {
            Some(rows.iter().zip(x).filter(|(_, v)| !v.is_zero()).map(|(r, v)| ((*r).clone(), v)).collect())
        }
        _ => None,
    })
}

/// Minimal subsystem with the same feasible set. Every dropped row carries a
/// certificate expressed in terms of the rows that remain.
pub fn remove_redundant(p: &Polyhedron) -> Result<RedundancyReport, PolyError> {
    let (c, rep) = canonicalize(p);
    if rep.empty || c.is_trivially_empty() {
        return Ok(empty_report(p, c, rep.removed, rep.merged));
    }
    if let Some(terms) = emptiness_certificate(&c)? {
        let kept = Polyhedron::from_parts(c.vars().to_vec(), terms.iter().map(|(r, _)| r.clone()).collect());
        let removed = c
            .rows()
            .iter()
            .filter(|r| !terms.iter().any(|(t, _)| t == *r))
            .map(|r| RemovedRow { row: r.clone(), certificate: RedundancyCertificate::Empty { terms: terms.clone() } })
            .collect();
        return Ok(RedundancyReport { kept, removed, merged: rep.merged });
    }

    let mut kept: Vec<Row> = c.rows().to_vec();
    let mut removed: Vec<RemovedRow> = rep.removed;
    let mut i = 0;
    while i < kept.len() {
        let others: Vec<&Row> = kept.iter().enumerate().filter(|(k, _)| *k != i).map(|(_, r)| r).collect();
        if let Some(cert) = certificate_against(&kept[i], &others)? {
            let row = kept.remove(i);
            removed.push(RemovedRow { row, certificate: cert });
        } else {
            i += 1;
        }
    }
    let kept = Polyhedron::from_parts(c.vars().to_vec(), kept);
    let final_rows: Vec<&Row> = kept.rows().iter().collect();
    for r in removed.iter_mut() {
        if !verify_certificate(&r.row, &r.certificate, &kept) {
            r.certificate = certificate_against(&r.row, &final_rows)?
                .expect("row implied by a superset stays implied by the minimal system");
        }
    }
    Ok(RedundancyReport { kept, removed, merged: rep.merged })
}

fn empty_report(
    p: &Polyhedron,
    c: Polyhedron,
    mut removed: Vec<RemovedRow>,
    merged: Vec<(String, String, String)>,
) -> RedundancyReport {
    let terms = vec![(c.rows()[0].clone(), Rational::one())];
    removed.retain(|r| matches!(r.certificate, RedundancyCertificate::Tautology));
    for r in p.rows() {
        if !r.is_zero() {
            removed.push(RemovedRow { row: r.clone(), certificate: RedundancyCertificate::Empty { terms: terms.clone() } });
        }
    }
    RedundancyReport { kept: c, removed, merged }
}

/// Turns inequality rows that hold with equality on the whole polyhedron into
/// equalities. Leaves empty polyhedra untouched.
pub fn detect_implicit_equalities(p: &Polyhedron) -> Result<Polyhedron, PolyError> {
    let (c, rep) = canonicalize(p);
    if rep.empty {
        return Ok(c);
    }
    let mut rows = c.rows().to_vec();
    for i in 0..rows.len() {
        if rows[i].eq {
            continue;
        }
        match lp_over(&c, &rows[i].a).solve(Arithmetic::Exact, MAX_PIVOTS)? {
            LpOutcome::Optimal { objective, .. } if objective == rows[i].b => rows[i].eq = true,
            LpOutcome::Infeasible { .. } => return Ok(c),
            _ => {}
        }
    }
    let mut out = Polyhedron::new(c.vars().to_vec());
    for r in rows {
        out.push_row(r);
    }
    out.sort();
    Ok(canonicalize(&out).0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::Var;

    fn q(n: i64) -> Rational {
        Rational::from_int(n)
    }

    fn square_plus(extra: Vec<Row>) -> Polyhedron {
        let mut rows = vec![
            Row { a: vec![q(1), q(0)], b: q(1), eq: false, label: "x<=1".into() },
            Row { a: vec![q(-1), q(0)], b: q(0), eq: false, label: "x>=0".into() },
            Row { a: vec![q(0), q(1)], b: q(1), eq: false, label: "y<=1".into() },
            Row { a: vec![q(0), q(-1)], b: q(0), eq: false, label: "y>=0".into() },
        ];
        rows.extend(extra);
        Polyhedron::from_parts(vec![Var::from("x"), Var::from("y")], rows)
    }

    #[test]
    fn removes_implied_row_with_certificate() {
        let p = square_plus(vec![Row { a: vec![q(1), q(1)], b: q(3), eq: false, label: "x+y<=3".into() }]);
        let rep = remove_redundant(&p).unwrap();
        assert_eq!(rep.kept.rows().len(), 4);
        assert_eq!(rep.removed.len(), 1);
        let r = &rep.removed[0];
        assert_eq!(r.row.label, "x+y<=3");
        assert!(verify_certificate(&r.row, &r.certificate, &rep.kept));
    }

    #[test]
    fn keeps_facets() {
        let p = square_plus(vec![Row { a: vec![q(1), q(1)], b: q(1), eq: false, label: "x+y<=1".into() }]);
        let rep = remove_redundant(&p).unwrap();
        let labels: Vec<_> = rep.kept.rows().iter().map(|r| r.label.as_str()).collect();
        assert_eq!(rep.kept.rows().len(), 3);
        assert!(labels.contains(&"x+y<=1"));
        for r in &rep.removed {
            assert!(verify_certificate(&r.row, &r.certificate, &rep.kept));
        }
    }

    #[test]
    fn empty_system_gets_farkas_certificate() {
        let p = square_plus(vec![Row { a: vec![q(-1), q(-1)], b: q(-3), eq: false, label: "x+y>=3".into() }]);
        let rep = remove_redundant(&p).unwrap();
        for r in &rep.removed {
            assert!(matches!(r.certificate, RedundancyCertificate::Empty { .. }));
            assert!(verify_certificate(&r.row, &r.certificate, &rep.kept));
        }
    }

    #[test]
    fn bogus_certificate_rejected() {
        let p = square_plus(vec![]);
        let row = Row { a: vec![q(1), q(1)], b: q(1), eq: false, label: "x+y<=1".into() };
        let cert = RedundancyCertificate::Combination {
            terms: vec![(p.rows()[0].clone(), q(1)), (p.rows()[1].clone(), q(1))],
        };
        assert!(!verify_certificate(&row, &cert, &p));
    }

    #[test]
    fn implicit_equalities_found() {
        let p = square_plus(vec![Row { a: vec![q(1), q(1)], b: q(0), eq: false, label: "x+y<=0".into() }]);
        let e = detect_implicit_equalities(&p).unwrap();
        assert!(e.rows().iter().filter(|r| r.eq).count() >= 2);
    }
}
