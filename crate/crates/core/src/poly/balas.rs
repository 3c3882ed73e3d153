//! Extended formulation of the convex hull of two polytopes.

use crate::numeric::{Rational, Var};
use crate::solver::{Arithmetic, LpOutcome};

use super::redundancy::lp_over;
use super::{PolyError, Polyhedron, Row};

const MAX_PIVOTS: usize = 1_000_000;

fn copy_name(v: &Var, k: u8) -> Var {
    Var::new(format!("{}^{}", v.as_str(), k))
}

/// Rejects empty or unbounded disjuncts.
fn check_disjunct(p: &Polyhedron, name: &str) -> Result<(), PolyError> {
    let n = p.dim();
    let zero = vec![Rational::zero(); n];
    match lp_over(p, &zero).solve(Arithmetic::Exact, MAX_PIVOTS)? {
        LpOutcome::Optimal { .. } => {}
        _ => return Err(PolyError::InvalidDisjunct(format!("{name} disjunct is empty"))),
    }
    for j in 0..n {
        for s in [1, -1] {
            let mut c = zero.clone();
            c[j] = Rational::from_int(s);
            if let LpOutcome::Unbounded { .. } = lp_over(p, &c).solve(Arithmetic::Exact, MAX_PIVOTS)? {
                return Err(PolyError::InvalidDisjunct(format!(
                    "{name} disjunct is unbounded in `{}`",
                    p.vars()[j]
                )));
            }
        }
    }
    Ok(())
}

/// Lifted description of `conv(charging x {delta = 1} U discharging x {delta = 0})`
/// over `shared`, `delta`, the copies `v^1`, `v^2` of every shared variable and
/// the weights `delta^1`, `delta^2`.
///
/// Each disjunct row `a.x <= b` becomes `a.x^k - b delta^k <= 0`. Projecting
/// the result onto `shared + [delta]` gives the hull.
pub fn balas_lift(
    charging: &Polyhedron,
    discharging: &Polyhedron,
    shared: &[Var],
    delta: &Var,
) -> Result<Polyhedron, PolyError> {
    for p in [charging, discharging] {
        if p.dim() != shared.len() {
            return Err(PolyError::VariableMismatch(p.vars().to_vec(), shared.to_vec()));
        }
    }
    let p1 = charging.with_var_order(shared)?;
    let p2 = discharging.with_var_order(shared)?;
    if shared.contains(delta) {
        return Err(PolyError::InvalidDisjunct(format!("`{delta}` must not be a disjunct variable")));
    }
    check_disjunct(&p1, "charging")?;
    check_disjunct(&p2, "discharging")?;

    let n = shared.len();
    let mut vars: Vec<Var> = shared.to_vec();
    vars.push(delta.clone());
    vars.extend(shared.iter().map(|v| copy_name(v, 1)));
    vars.extend(shared.iter().map(|v| copy_name(v, 2)));
    vars.push(copy_name(delta, 1));
    vars.push(copy_name(delta, 2));
    let width = vars.len();
    let (d, x1, x2, d1, d2) = (n, n + 1, 2 * n + 1, 3 * n + 1, 3 * n + 2);

    let mut out = Polyhedron::new(vars);
    for (p, xo, wo, tag) in [(&p1, x1, d1, 1), (&p2, x2, d2, 2)] {
        for r in p.rows() {
            let mut a = vec![Rational::zero(); width];
            for (j, v) in r.a.iter().enumerate() {
                a[xo + j] = v.clone();
            }
            a[wo] = -&r.b;
            out.push_row(Row { a, b: Rational::zero(), eq: r.eq, label: format!("{}^{}", r.label, tag) });
        }
        let mut a = vec![Rational::zero(); width];
        a[wo] = -Rational::one();
        out.push_row(Row { a, b: Rational::zero(), eq: false, label: format!("weight^{tag}>=0") });
    }
    for (j, v) in shared.iter().enumerate() {
        let mut a = vec![Rational::zero(); width];
        a[j] = Rational::one();
        a[x1 + j] = -Rational::one();
        a[x2 + j] = -Rational::one();
        out.push_row(Row { a, b: Rational::zero(), eq: true, label: format!("link[{v}]") });
    }
    let mut a = vec![Rational::zero(); width];
    a[d1] = Rational::one();
    a[d2] = Rational::one();
    out.push_row(Row { a, b: Rational::one(), eq: true, label: "link[weights]".into() });
    let mut a = vec![Rational::zero(); width];
    a[d] = Rational::one();
    a[d1] = -Rational::one();
    out.push_row(Row { a, b: Rational::zero(), eq: true, label: format!("link[{delta}]") });
    out.sort();
    Ok(out)
}
