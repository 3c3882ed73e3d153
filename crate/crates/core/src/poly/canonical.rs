//! Row scaling, ordering and syntactic pruning.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::numeric::Rational;

use super::redundancy::{RedundancyCertificate, RemovedRow};
use super::{Polyhedron, Row};

/// Factor `k > 0` turning `v` into a primitive integer vector.
pub(crate) fn primitive_factor<'a>(v: impl Iterator<Item = &'a Rational> + Clone) -> Option<Rational> {
    let mut lcm = BigInt::one();
    let mut any = false;
    for x in v.clone().filter(|x| !x.is_zero()) {
        lcm = lcm.lcm(&x.denom());
        any = true;
    }
    if !any {
        return None;
    }
    let mut g = BigInt::zero();
    for x in v.filter(|x| !x.is_zero()) {
        let n = (x.numer() * &lcm) / x.denom();
        g = g.gcd(&n.abs());
    }
    Some(Rational::from_bigints(lcm, g).expect("nonzero gcd"))
}

/// Scales a row to primitive integers (coefficients and right-hand side
/// together). Equality rows get a positive leading coefficient.
pub(crate) fn scale_row(mut row: Row) -> Row {
    let Some(mut k) = primitive_factor(row.a.iter().chain(std::iter::once(&row.b))) else {
        return row;
    };
    if row.eq {
        if let Some(first) = row.a.iter().find(|x| !x.is_zero()) {
            if first.is_negative() {
                k = -k;
            }
        }
    }
    if !k.is_one() {
        for x in row.a.iter_mut() {
            if !x.is_zero() {
                *x = &*x * &k;
            }
        }
        row.b = &row.b * &k;
    }
    row
}

pub(crate) fn row_order(x: &Row, y: &Row) -> Ordering {
    y.eq.cmp(&x.eq).then_with(|| x.a.cmp(&y.a)).then_with(|| x.b.cmp(&y.b)).then_with(|| x.label.cmp(&y.label))
}

/// Primitive direction with positive leading entry, and `(s, lambda)` such
/// that `a = s * lambda * key`.
fn direction(a: &[Rational]) -> (Vec<Rational>, i32, Rational) {
    let k = primitive_factor(a.iter()).expect("nonzero row");
    let first_neg = a.iter().find(|x| !x.is_zero()).is_some_and(Rational::is_negative);
    let s = if first_neg { -1 } else { 1 };
    let ks = if first_neg { -k.clone() } else { k.clone() };
    let key = a.iter().map(|x| x * &ks).collect();
    (key, s, k.recip())
}

/// What syntactic pruning did to a system.
#[derive(Debug, Clone, Default)]
pub struct CanonicalReport {
    pub removed: Vec<RemovedRow>,
    /// Opposite inequality pairs fused into one equality: `(upper, lower, equality)`.
    pub merged: Vec<(String, String, String)>,
    pub empty: bool,
}

struct Bound {
    value: Rational,
    idx: usize,
}

#[derive(Default)]
struct Group {
    upper: Vec<Bound>,
    lower: Vec<Bound>,
    eqs: Vec<Bound>,
}

/// Drops tautologies, keeps only the tightest of parallel rows, turns
/// opposite rows with matching bounds into equalities, and detects
/// syntactically empty systems.
pub fn canonicalize(p: &Polyhedron) -> (Polyhedron, CanonicalReport) {
    let mut report = CanonicalReport::default();
    let mut groups: BTreeMap<Vec<Rational>, Group> = BTreeMap::new();
    for (i, r) in p.rows.iter().enumerate() {
        if r.is_zero() {
            let ok = if r.eq { r.b.is_zero() } else { !r.b.is_negative() };
            if !ok {
                report.empty = true;
                return (Polyhedron::empty(p.vars.clone()), report);
            }
            report.removed.push(RemovedRow { row: r.clone(), certificate: RedundancyCertificate::Tautology });
            continue;
        }
        let (key, s, lambda) = direction(&r.a);
        let v = &r.b / &lambda;
        let g = groups.entry(key).or_default();
        if r.eq {
            g.eqs.push(Bound { value: if s > 0 { v } else { -v }, idx: i });
        } else if s > 0 {
            g.upper.push(Bound { value: v, idx: i });
        } else {
            g.lower.push(Bound { value: -v, idx: i });
        }
    }

    let mut out: Vec<Row> = Vec::new();
    let lab = |i: usize| p.rows[i].label.as_str();
    let pick = |bs: &[Bound], upper: bool| -> Option<usize> {
        let mut best: Option<usize> = None;
        for (j, b) in bs.iter().enumerate() {
            let better = match best {
                None => true,
                Some(k) => {
                    let c = b.value.cmp(&bs[k].value);
                    (if upper { c.is_lt() } else { c.is_gt() }) || (c.is_eq() && lab(b.idx) < lab(bs[k].idx))
                }
            };
            if better {
                best = Some(j);
            }
        }
        best
    };
    let dominated = |removed: usize, by: &Row, report: &mut CanonicalReport| {
        let r = &p.rows[removed];
        let j = r.a.iter().position(|x| !x.is_zero()).expect("nonzero row");
        let f = &r.a[j] / &by.a[j];
        let cert = RedundancyCertificate::Combination { terms: vec![(by.clone(), f)] };
        report.removed.push(RemovedRow { row: r.clone(), certificate: cert });
    };

    for (_, g) in groups {
        if let Some(e0) = g.eqs.first() {
            if g.eqs.iter().any(|e| e.value != e0.value)
                || g.upper.iter().any(|u| u.value < e0.value)
                || g.lower.iter().any(|l| l.value > e0.value)
            {
                report.empty = true;
                return (Polyhedron::empty(p.vars.clone()), report);
            }
            let kept = p.rows[e0.idx].clone();
            for b in g.eqs.iter().skip(1).chain(&g.upper).chain(&g.lower) {
                dominated(b.idx, &kept, &mut report);
            }
            out.push(kept);
            continue;
        }
        let up = pick(&g.upper, true);
        let lo = pick(&g.lower, false);
        if let (Some(u), Some(l)) = (up, lo) {
            let (uv, lv) = (&g.upper[u].value, &g.lower[l].value);
            if lv > uv {
                report.empty = true;
                return (Polyhedron::empty(p.vars.clone()), report);
            }
            if lv == uv {
                let ui = g.upper[u].idx;
                let li = g.lower[l].idx;
                let label = format!("{}&{}", lab(ui), lab(li));
                report.merged.push((lab(ui).to_string(), lab(li).to_string(), label.clone()));
                let mut row = p.rows[ui].clone();
                row.eq = true;
                row.label = label;
                let row = scale_row(row);
                for (j, b) in g.upper.iter().enumerate() {
                    if j != u {
                        dominated(b.idx, &row, &mut report);
                    }
                }
                for (j, b) in g.lower.iter().enumerate() {
                    if j != l {
                        dominated(b.idx, &row, &mut report);
                    }
                }
                out.push(row);
                continue;
            }
        }
        for (bs, best) in [(&g.upper, up), (&g.lower, lo)] {
            let Some(k) = best else { continue };
            let kept = p.rows[bs[k].idx].clone();
            for (j, b) in bs.iter().enumerate() {
                if j != k {
                    dominated(b.idx, &kept, &mut report);
                }
            }
            out.push(kept);
        }
    }
    (Polyhedron::from_parts(p.vars.clone(), out), report)
}
