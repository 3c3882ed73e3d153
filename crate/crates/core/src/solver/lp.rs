//! Bounded-variable LPs over exact rationals, reduced to standard form.

use crate::numeric::Rational;

use super::scalar::Scalar;
use super::simplex::{solve_std, unit_columns, Pricing, PivotLimit, StdForm, StdOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowSense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct LpRow {
    pub coeffs: Vec<(usize, Rational)>,
    pub sense: RowSense,
    pub rhs: Rational,
}

/// `min cost.x + cost_const` subject to rows and per-variable bounds
/// (`None` means unbounded in that direction).
#[derive(Debug, Clone, Default)]
pub struct LpProblem {
    pub lb: Vec<Option<Rational>>,
    pub ub: Vec<Option<Rational>>,
    pub rows: Vec<LpRow>,
    pub cost: Vec<Rational>,
    pub cost_const: Rational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Arithmetic {
    #[default]
    Exact,
    /// Double precision with tolerance 1e-9. Optimal bases are re-verified in
    /// exact arithmetic; anything that fails verification is re-solved exactly.
    Float,
}

#[derive(Debug, Clone)]
pub enum LpOutcome {
    Optimal { x: Vec<Rational>, objective: Rational, certificate: OptimalityCertificate },
    Infeasible { farkas: Vec<Rational> },
    Unbounded { x: Vec<Rational>, ray: Vec<Rational> },
}

/// Standard-form primal/dual pair proving optimality.
#[derive(Debug, Clone)]
pub struct OptimalityCertificate {
    pub x_std: Vec<Rational>,
    pub y_std: Vec<Rational>,
}

#[derive(Debug, Clone, Copy)]
enum ColMap {
    Fixed,
    Shift(usize),
    Reflect(usize),
    Split(usize),
}

/// The standard-form image of an [`LpProblem`] plus the maps back.
#[derive(Debug, Clone)]
pub struct StdModel {
    pub std: StdForm<Rational>,
    cols: Vec<ColMap>,
    n_vars: usize,
    obj_const: Rational,
    lb: Vec<Option<Rational>>,
    ub: Vec<Option<Rational>>,
}

impl LpProblem {
    pub fn new(n: usize) -> Self {
        LpProblem {
            lb: vec![None; n],
            ub: vec![None; n],
            rows: Vec::new(),
            cost: vec![Rational::zero(); n],
            cost_const: Rational::zero(),
        }
    }

    pub fn n_vars(&self) -> usize {
        self.cost.len()
    }

    pub fn to_std(&self) -> StdModel {
        let n = self.n_vars();
        let mut cols = Vec::with_capacity(n);
        let mut next = 0usize;
        for k in 0..n {
            let c = match (&self.lb[k], &self.ub[k]) {
                (Some(l), Some(u)) if l == u => ColMap::Fixed,
                (Some(_), _) => ColMap::Shift(next),
                (None, Some(_)) => ColMap::Reflect(next),
                (None, None) => ColMap::Split(next),
            };
            next += match c {
                ColMap::Fixed => 0,
                ColMap::Split(_) => 2,
                _ => 1,
            };
            cols.push(c);
        }
        let n_struct = next;
        let mut obj_const = self.cost_const.clone();
        let mut c = vec![Rational::zero(); n_struct];
        for k in 0..n {
            let ck = &self.cost[k];
            if ck.is_zero() {
                continue;
            }
            match cols[k] {
                ColMap::Fixed => obj_const += ck * self.lb[k].as_ref().unwrap(),
                ColMap::Shift(j) => {
                    obj_const += ck * self.lb[k].as_ref().unwrap();
                    c[j] = ck.clone();
                }
                ColMap::Reflect(j) => {
                    obj_const += ck * self.ub[k].as_ref().unwrap();
                    c[j] = -ck;
                }
                ColMap::Split(j) => {
                    c[j] = ck.clone();
                    c[j + 1] = -ck;
                }
            }
        }

        // rows: (dense coeffs over structural cols, sense, rhs)
        let mut rows: Vec<(Vec<Rational>, RowSense, Rational)> = Vec::new();
        for r in &self.rows {
            let mut a = vec![Rational::zero(); n_struct];
            let mut rhs = r.rhs.clone();
            for (k, v) in &r.coeffs {
                match cols[*k] {
                    ColMap::Fixed => rhs -= v * self.lb[*k].as_ref().unwrap(),
                    ColMap::Shift(j) => {
                        rhs -= v * self.lb[*k].as_ref().unwrap();
                        a[j] += v;
                    }
                    ColMap::Reflect(j) => {
                        rhs -= v * self.ub[*k].as_ref().unwrap();
                        a[j] -= v;
                    }
                    ColMap::Split(j) => {
                        a[j] += v;
                        a[j + 1] -= v;
                    }
                }
            }
            rows.push((a, r.sense, rhs));
        }
        for k in 0..n {
            if let (ColMap::Shift(j), Some(u)) = (cols[k], &self.ub[k]) {
                let mut a = vec![Rational::zero(); n_struct];
                a[j] = Rational::one();
                rows.push((a, RowSense::Le, u - self.lb[k].as_ref().unwrap()));
            }
        }
        let n_slack = rows.iter().filter(|r| r.1 != RowSense::Eq).count();
        let width = n_struct + n_slack;
        let mut a_std = Vec::with_capacity(rows.len());
        let mut b_std = Vec::with_capacity(rows.len());
        let mut s = n_struct;
        for (mut a, sense, mut rhs) in rows {
            a.resize(width, Rational::zero());
            match sense {
                RowSense::Le => {
                    a[s] = Rational::one();
                    s += 1;
                }
                RowSense::Ge => {
                    a[s] = -Rational::one();
                    s += 1;
                }
                RowSense::Eq => {}
            }
            if rhs.is_negative() {
                for v in a.iter_mut() {
                    if !v.is_zero() {
                        *v = -&*v;
                    }
                }
                rhs = -rhs;
            }
            a_std.push(a);
            b_std.push(rhs);
        }
        c.resize(width, Rational::zero());
        StdModel {
            std: StdForm { a: a_std, b: b_std, c },
            cols,
            n_vars: n,
            obj_const,
            lb: self.lb.clone(),
            ub: self.ub.clone(),
        }
    }

    pub fn solve(&self, arithmetic: Arithmetic, max_pivots: usize) -> Result<LpOutcome, PivotLimit> {
        let model = self.to_std();
        if arithmetic == Arithmetic::Float {
            let f = StdForm {
                a: model.std.a.iter().map(|r| r.iter().map(f64::from_rational).collect()).collect(),
                b: model.std.b.iter().map(f64::from_rational).collect(),
                c: model.std.c.iter().map(f64::from_rational).collect(),
            };
            if let StdOutcome::Optimal { basis, .. } = solve_std(&f, Pricing::Dantzig, max_pivots)? {
                if let Some((x, y)) = crossover(&model.std, &basis) {
                    return Ok(model.optimal(x, y));
                }
            }
        }
        let out = solve_std(&model.std, Pricing::Bland, max_pivots)?;
        Ok(match out {
            StdOutcome::Optimal { x, y, .. } => model.optimal(x, y),
            StdOutcome::Infeasible { farkas } => LpOutcome::Infeasible { farkas },
            StdOutcome::Unbounded { x, ray } => {
                LpOutcome::Unbounded { x: model.map_point(&x, true), ray: model.map_point(&ray, false) }
            }
        })
    }

    /// Row and bound violations of `x`, exactly.
    pub fn is_feasible(&self, x: &[Rational]) -> bool {
        for k in 0..self.n_vars() {
            if self.lb[k].as_ref().is_some_and(|l| &x[k] < l) || self.ub[k].as_ref().is_some_and(|u| &x[k] > u) {
                return false;
            }
        }
        self.rows.iter().all(|r| {
            let lhs: Rational = r.coeffs.iter().map(|(k, v)| v * &x[*k]).sum();
            match r.sense {
                RowSense::Le => lhs <= r.rhs,
                RowSense::Ge => lhs >= r.rhs,
                RowSense::Eq => lhs == r.rhs,
            }
        })
    }

    pub fn objective_at(&self, x: &[Rational]) -> Rational {
        self.cost.iter().zip(x).map(|(c, v)| c * v).sum::<Rational>() + &self.cost_const
    }
}

impl StdModel {
    fn map_point(&self, xs: &[Rational], affine: bool) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); self.n_vars];
        for k in 0..self.n_vars {
            x[k] = match self.cols[k] {
                ColMap::Fixed => if affine { self.lb[k].clone().unwrap() } else { Rational::zero() },
                ColMap::Shift(j) => {
                    let base = if affine { self.lb[k].clone().unwrap() } else { Rational::zero() };
                    base + &xs[j]
                }
                ColMap::Reflect(j) => {
                    let base = if affine { self.ub[k].clone().unwrap() } else { Rational::zero() };
                    base - &xs[j]
                }
                ColMap::Split(j) => &xs[j] - &xs[j + 1],
            };
        }
        x
    }

    fn optimal(&self, x_std: Vec<Rational>, y_std: Vec<Rational>) -> LpOutcome {
        let objective =
            self.std.c.iter().zip(&x_std).map(|(c, v)| c * v).sum::<Rational>() + &self.obj_const;
        LpOutcome::Optimal {
            x: self.map_point(&x_std, true),
            objective,
            certificate: OptimalityCertificate { x_std, y_std },
        }
    }

    /// Checks primal feasibility, dual feasibility and zero duality gap in
    /// exact arithmetic.
    pub fn verify(&self, cert: &OptimalityCertificate) -> bool {
        verify_std(&self.std, &cert.x_std, &cert.y_std)
    }
}

pub fn verify_std(p: &StdForm<Rational>, x: &[Rational], y: &[Rational]) -> bool {
    let m = p.b.len();
    let n = p.c.len();
    if x.len() != n || y.len() != m || x.iter().any(|v| v.is_negative()) {
        return false;
    }
    for i in 0..m {
        let lhs: Rational = p.a[i].iter().zip(x).filter(|(a, _)| !a.is_zero()).map(|(a, v)| a * v).sum();
        if lhs != p.b[i] {
            return false;
        }
    }
    for j in 0..n {
        let ay: Rational = (0..m).filter(|&i| !p.a[i][j].is_zero()).map(|i| &p.a[i][j] * &y[i]).sum();
        if (&p.c[j] - ay).is_negative() {
            return false;
        }
    }
    let cx: Rational = p.c.iter().zip(x).map(|(c, v)| c * v).sum();
    let by: Rational = p.b.iter().zip(y).map(|(b, v)| b * v).sum();
    cx == by
}

/// Solves `M z = rhs` exactly; `None` if `M` is singular.
pub(crate) fn gauss_solve(mut m: Vec<Vec<Rational>>, mut rhs: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = rhs.len();
    for col in 0..n {
        let p = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, p);
        rhs.swap(col, p);
        let inv = m[col][col].recip();
        for j in col..n {
            m[col][j] = &m[col][j] * &inv;
        }
        rhs[col] = &rhs[col] * &inv;
        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].clone();
            for j in col..n {
                if !m[col][j].is_zero() {
                    m[r][j] = &m[r][j] - &f * &m[col][j];
                }
            }
            rhs[r] = &rhs[r] - &f * &rhs[col];
        }
    }
    Some(rhs)
}

/// Rebuilds the basic solution of `basis` exactly and checks that it is
/// primal and dual feasible. Column indices `>= n` denote the artificial unit
/// columns the simplex kernel appends for rows without a slack.
pub fn crossover(p: &StdForm<Rational>, basis: &[usize]) -> Option<(Vec<Rational>, Vec<Rational>)> {
    let m = p.b.len();
    let n = p.c.len();
    let unit = unit_columns(&p.a, n);
    let art_rows: Vec<usize> = (0..m).filter(|&i| unit[i].is_none()).collect();
    let column = |j: usize| -> Vec<Rational> {
        if j < n {
            (0..m).map(|i| p.a[i][j].clone()).collect()
        } else {
            let mut e = vec![Rational::zero(); m];
            e[art_rows[j - n]] = Rational::one();
            e
        }
    };
    let cols: Vec<Vec<Rational>> = basis.iter().map(|&j| column(j)).collect();
    let bmat: Vec<Vec<Rational>> = (0..m).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect();
    let xb = gauss_solve(bmat, p.b.clone())?;
    let mut x = vec![Rational::zero(); n];
    for (k, &j) in basis.iter().enumerate() {
        if xb[k].is_negative() || (j >= n && !xb[k].is_zero()) {
            return None;
        }
        if j < n {
            x[j] = xb[k].clone();
        }
    }
    let bt: Vec<Vec<Rational>> = cols.clone();
    let cb: Vec<Rational> = basis.iter().map(|&j| if j < n { p.c[j].clone() } else { Rational::zero() }).collect();
    let y = gauss_solve(bt, cb)?;
    if verify_std(p, &x, &y) {
        Some((x, y))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_int(n)
    }

    fn row(c: &[(usize, i64)], s: RowSense, rhs: i64) -> LpRow {
        LpRow { coeffs: c.iter().map(|(k, v)| (*k, q(*v))).collect(), sense: s, rhs: q(rhs) }
    }

    #[test]
    fn bounds_and_free_variables() {
        // min x - y, -3 <= x <= 5, y free, y <= x + 1, y <= 2
        let mut p = LpProblem::new(2);
        p.lb[0] = Some(q(-3));
        p.ub[0] = Some(q(5));
        p.cost = vec![q(1), q(-1)];
        p.rows.push(row(&[(1, 1), (0, -1)], RowSense::Le, 1));
        p.rows.push(row(&[(1, 1)], RowSense::Le, 2));
        for mode in [Arithmetic::Exact, Arithmetic::Float] {
            match p.solve(mode, 1000).unwrap() {
                LpOutcome::Optimal { x, objective, certificate } => {
                    assert_eq!(objective, q(-1));
                    assert!(p.is_feasible(&x));
                    assert!(p.to_std().verify(&certificate));
                }
                o => panic!("{o:?}"),
            }
        }
    }

    #[test]
    fn reflected_and_fixed() {
        // max x  (min -x) with x <= 4 and no lower bound, z fixed at 2, x + z <= 5
        let mut p = LpProblem::new(2);
        p.ub[0] = Some(q(4));
        p.lb[1] = Some(q(2));
        p.ub[1] = Some(q(2));
        p.cost = vec![q(-1), q(0)];
        p.rows.push(row(&[(0, 1), (1, 1)], RowSense::Le, 5));
        match p.solve(Arithmetic::Exact, 1000).unwrap() {
            LpOutcome::Optimal { x, .. } => assert_eq!(x, vec![q(3), q(2)]),
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut p = LpProblem::new(1);
        p.lb[0] = Some(q(0));
        p.rows.push(row(&[(0, 1)], RowSense::Ge, 3));
        p.rows.push(row(&[(0, 1)], RowSense::Le, 2));
        assert!(matches!(p.solve(Arithmetic::Exact, 100).unwrap(), LpOutcome::Infeasible { .. }));
        let mut p = LpProblem::new(1);
        p.cost = vec![q(1)];
        assert!(matches!(p.solve(Arithmetic::Float, 100).unwrap(), LpOutcome::Unbounded { .. }));
    }
}
