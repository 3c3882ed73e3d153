//! Fourier–Motzkin elimination and projection.

use crate::numeric::{Rational, Var};

use super::canonical::canonicalize;
use super::redundancy::{remove_redundant, RemovedRow};
use super::{PolyError, Polyhedron, Row};

/// How one variable left the system.
#[derive(Debug, Clone)]
pub enum FmMethod {
    /// The variable did not occur in any row.
    Absent,
    /// Solved from an equality row and substituted everywhere.
    Substitution { by: Row },
    /// Every positive/negative pair of rows combined; `(positive, negative,
    /// result)` per pair, before pruning.
    Combination { pairs: Vec<(String, String, Row)> },
}

#[derive(Debug, Clone)]
pub struct FmStep {
    pub var: Var,
    pub method: FmMethod,
    /// Rows present after elimination, before pruning (eliminated column
    /// removed).
    pub raw: Polyhedron,
    /// Rows after syntactic pruning. Every certificate in `pruned` is stated
    /// over these rows.
    pub canonical: Polyhedron,
    /// Rows dropped right after this step, with certificates relative to the
    /// rows kept at that point.
    pub pruned: Vec<RemovedRow>,
}

fn drop_column(rows: Vec<Row>, k: usize) -> Vec<Row> {
    rows.into_iter()
        .map(|mut r| {
            r.a.remove(k);
            r
        })
        .collect()
}

/// Raw elimination of column `k` without any pruning.
fn eliminate_raw(p: &Polyhedron, k: usize) -> (Vec<Row>, FmMethod) {
    let rows = p.rows();
    if let Some(e) = rows.iter().find(|r| r.eq && !r.a[k].is_zero()) {
        let ck = e.a[k].clone();
        let mut out = Vec::with_capacity(rows.len() - 1);
        for r in rows {
            if std::ptr::eq(r, e) {
                continue;
            }
            if r.a[k].is_zero() {
                out.push(r.clone());
                continue;
            }
            let f = &r.a[k] / &ck;
            let a = r.a.iter().zip(&e.a).map(|(x, y)| if y.is_zero() { x.clone() } else { x - &f * y }).collect();
            out.push(Row { a, b: &r.b - &f * &e.b, eq: r.eq, label: r.label.clone() });
        }
        return (out, FmMethod::Substitution { by: e.clone() });
    }
    let (mut pos, mut neg, mut zero) = (Vec::new(), Vec::new(), Vec::new());
    for r in rows {
        match r.a[k].signum() {
            1 => pos.push(r),
            -1 => neg.push(r),
            _ => zero.push(r.clone()),
        }
    }
    if pos.is_empty() && neg.is_empty() {
        return (zero, FmMethod::Absent);
    }
    let mut pairs = Vec::with_capacity(pos.len() * neg.len());
    for rp in &pos {
        for rn in &neg {
            let (fp, fn_) = (-&rn.a[k], rp.a[k].clone());
            let a = rp.a.iter().zip(&rn.a).map(|(x, y)| x * &fp + y * &fn_).collect();
            let row = Row {
                a,
                b: &rp.b * &fp + &rn.b * &fn_,
                eq: false,
                label: format!("({})+({})", rp.label, rn.label),
            };
            pairs.push((rp.label.clone(), rn.label.clone(), row));
        }
    }
    let mut out = zero;
    out.extend(pairs.iter().map(|(_, _, r)| r.clone()));
    (out, FmMethod::Combination { pairs })
}

fn finish(p: &Polyhedron, k: usize, rows: Vec<Row>) -> Polyhedron {
    let mut vars = p.vars().to_vec();
    vars.remove(k);
    let mut out = Polyhedron::new(vars);
    for r in drop_column(rows, k) {
        out.push_row(r);
    }
    out.sort();
    out
}

/// Eliminates `var`: by substitution when an equality row contains it,
/// otherwise by pairwise combination. The result is syntactically pruned.
pub fn fm_eliminate_traced(p: &Polyhedron, var: &str) -> Result<(Polyhedron, FmStep), PolyError> {
    let k = p.index(var).ok_or_else(|| PolyError::UnknownVariable(Var::from(var)))?;
    let (rows, method) = eliminate_raw(p, k);
    if let FmMethod::Combination { pairs } = &method {
        for (_, _, r) in pairs {
            debug_assert!(r.a[k].is_zero());
        }
    }
    let raw = finish(p, k, rows);
    let (pruned, rep) = canonicalize(&raw);
    Ok((pruned.clone(), FmStep { var: Var::from(var), method, raw, canonical: pruned, pruned: rep.removed }))
}

pub fn fm_eliminate(p: &Polyhedron, var: &str) -> Result<Polyhedron, PolyError> {
    fm_eliminate_traced(p, var).map(|(q, _)| q)
}

fn next_variable(p: &Polyhedron, drop: &[Var]) -> Option<usize> {
    let present: Vec<usize> = drop.iter().filter_map(|v| p.index(v.as_str())).collect();
    if let Some(&k) = present.iter().find(|&&k| p.rows().iter().any(|r| r.eq && !r.a[k].is_zero())) {
        return Some(k);
    }
    present.into_iter().min_by_key(|&k| {
        let pos = p.rows().iter().filter(|r| r.a[k].is_positive()).count() as i64;
        let neg = p.rows().iter().filter(|r| r.a[k].is_negative()).count() as i64;
        pos * neg - pos - neg
    })
}

/// Projection onto `keep`, eliminating every other variable and pruning all
/// redundant rows after each step.
pub fn project_traced(p: &Polyhedron, keep: &[Var]) -> Result<(Polyhedron, Vec<FmStep>), PolyError> {
    for v in keep {
        if p.index(v.as_str()).is_none() {
            return Err(PolyError::UnknownVariable(v.clone()));
        }
    }
    let drop: Vec<Var> = p.vars().iter().filter(|v| !keep.contains(v)).cloned().collect();
    let mut cur = p.clone();
    let mut steps = Vec::new();
    while let Some(k) = next_variable(&cur, &drop) {
        let var = cur.vars()[k].clone();
        let (next, mut step) = fm_eliminate_traced(&cur, var.as_str())?;
        let rep = remove_redundant(&next)?;
        step.pruned.extend(rep.removed);
        cur = rep.kept;
        steps.push(step);
    }
    let rep = remove_redundant(&cur)?;
    if !rep.removed.is_empty() {
        if let Some(last) = steps.last_mut() {
            last.pruned.extend(rep.removed);
        }
    }
    Ok((rep.kept.with_var_order(keep)?, steps))
}

pub fn project(p: &Polyhedron, keep: &[Var]) -> Result<Polyhedron, PolyError> {
    project_traced(p, keep).map(|(q, _)| q)
}

/// Sum of coefficients helper for tests and diagnostics.
#[allow(dead_code)]
pub(crate) fn column_is_zero(p: &Polyhedron, k: usize) -> bool {
    p.rows().iter().all(|r| r.a[k] == Rational::zero())
}
