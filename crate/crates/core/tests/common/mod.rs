//! Independent brute-force oracles shared by the integration tests. Nothing
//! here calls the engine's projection, lifting or enumeration code.
#![allow(dead_code)]

use proptest::prelude::*;
use tight_storage_core::model::{Direction, Objective};
use tight_storage_core::numeric::{LinearForm, Rational, Var};
use tight_storage_core::poly::{fm_eliminate, poly_equal, LinearConstraint, Polyhedron, Row};
use tight_storage_core::solver::{solve_lp, solve_mip, Branching, LpOutcome, LpProblem, LpRow, RowSense, SolveStatus};
use std::collections::BTreeMap;
use tight_storage_core::formulations::{build_bo, build_to, pvar, relax};
use tight_storage_core::{ModelInstance, StorageParams};

pub fn q(n: i64) -> Rational {
    Rational::from_int(n)
}

pub fn vars(n: usize) -> Vec<Var> {
    ["x", "y", "z", "w", "u", "v"][..n].iter().map(|s| Var::from(*s)).collect()
}

pub fn poly_from_rows(vars: Vec<Var>, rows: Vec<Row>) -> Polyhedron {
    let mut p = Polyhedron::new(vars);
    for r in rows {
        p.push_row(r);
    }
    p.sort();
    p
}

/// Unique solution of a square system by fraction-exact elimination.
pub fn solve_square(mut m: Vec<Vec<Rational>>, mut rhs: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = m.len();
    for c in 0..n {
        let p = (c..n).find(|&r| !m[r][c].is_zero())?;
        m.swap(c, p);
        rhs.swap(c, p);
        for r in 0..n {
            if r != c && !m[r][c].is_zero() {
                let f = &m[r][c] / &m[c][c];
                for k in c..n {
                    let v = &f * &m[c][k];
                    m[r][k] = &m[r][k] - &v;
                }
                let v = &f * &rhs[c];
                rhs[r] = &rhs[r] - &v;
            }
        }
    }
    Some((0..n).map(|i| &rhs[i] / &m[i][i]).collect())
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Vertices as all feasible unique intersections of `dim` rows.
pub fn brute_vertices(p: &Polyhedron) -> Vec<Vec<Rational>> {
    let n = p.dim();
    let rows = p.rows();
    let mut out = Vec::new();
    for s in subsets(rows.len(), n) {
        let m = s.iter().map(|&i| rows[i].a.clone()).collect();
        let rhs = s.iter().map(|&i| rows[i].b.clone()).collect();
        if let Some(x) = solve_square(m, rhs) {
            if p.contains(&x) {
                out.push(x);
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

fn det(m: &[Vec<Rational>]) -> Rational {
    let n = m.len();
    if n == 0 {
        return Rational::one();
    }
    let mut total = Rational::zero();
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<Rational>> =
            m[1..].iter().map(|r| r.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, v)| v.clone()).collect()).collect();
        let t = &m[0][j] * &det(&minor);
        total = if j % 2 == 0 { &total + &t } else { &total - &t };
    }
    total
}

/// Facet description of the convex hull of a full-dimensional point set in
/// `d <= 3` dimensions, by checking every hyperplane through `d` points.
pub fn hull_h(points: &[Vec<Rational>], vars: Vec<Var>) -> Polyhedron {
    let d = vars.len();
    let mut rows = Vec::new();
    for s in subsets(points.len(), d) {
        let base = &points[s[0]];
        let diffs: Vec<Vec<Rational>> =
            s[1..].iter().map(|&i| points[i].iter().zip(base).map(|(a, b)| a - b).collect()).collect();
        // Normal by cofactor expansion of the (d-1) x d difference matrix.
        let normal: Vec<Rational> = (0..d)
            .map(|j| {
                let minor: Vec<Vec<Rational>> = diffs
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, v)| v.clone()).collect())
                    .collect();
                let v = det(&minor);
                if j % 2 == 0 { v } else { -v }
            })
            .collect();
        if normal.iter().all(Rational::is_zero) {
            continue;
        }
        let beta: Rational = normal.iter().zip(base).map(|(a, b)| a * b).sum();
        let vals: Vec<Rational> = points.iter().map(|p| normal.iter().zip(p).map(|(a, b)| a * b).sum()).collect();
        if vals.iter().all(|v| *v <= beta) {
            rows.push(Row { a: normal.clone(), b: beta.clone(), eq: false, label: "hull".into() });
        }
        if vals.iter().all(|v| *v >= beta) {
            rows.push(Row { a: normal.iter().map(|x| -x).collect(), b: -beta, eq: false, label: "hull".into() });
        }
    }
    poly_from_rows(vars, rows)
}

/// Random full-dimensional bounded polytope in `n` variables: random rows
/// with positive right-hand sides (so the origin is interior) inside a box.
pub fn random_polytope(n: usize, max_rows: usize) -> impl Strategy<Value = Polyhedron> {
    prop::collection::vec((prop::collection::vec(-3i64..=3, n), 1i64..=6), 1..=max_rows).prop_map(move |spec| {
        let mut rows: Vec<Row> = spec
            .into_iter()
            .enumerate()
            .filter(|(_, (a, _))| a.iter().any(|&x| x != 0))
            .map(|(i, (a, b))| Row { a: a.into_iter().map(q).collect(), b: q(b), eq: false, label: format!("r{i}") })
            .collect();
        for j in 0..n {
            for s in [1, -1] {
                let mut a = vec![q(0); n];
                a[j] = q(s);
                rows.push(Row { a, b: q(4), eq: false, label: format!("box{j}{s}") });
            }
        }
        poly_from_rows(vars(n), rows)
    })
}

/// Drops coordinate `k` from every point.
pub fn drop_coord(points: &[Vec<Rational>], k: usize) -> Vec<Vec<Rational>> {
    let mut out: Vec<Vec<Rational>> = points
        .iter()
        .map(|p| p.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, v)| v.clone()).collect())
        .collect();
    out.sort();
    out.dedup();
    out
}

/// FM elimination of the last variable equals the hull of the projected
/// brute-force vertices.
pub fn fm_matches_projected_vertices(p: &Polyhedron) -> Result<(), String> {
    let n = p.dim();
    let last = p.vars()[n - 1].clone();
    let shadow = fm_eliminate(p, last.as_str()).map_err(|e| e.to_string())?;
    let pts = drop_coord(&brute_vertices(p), n - 1);
    let hull = hull_h(&pts, p.vars()[..n - 1].to_vec());
    match poly_equal(&shadow, &hull).map_err(|e| e.to_string())?.is_equal() {
        true => Ok(()),
        false => Err(format!("FM shadow differs from projected hull for\n{p:?}")),
    }
}

/// Bounded polytope in 2 to 6 variables with an integer objective.
pub fn lp_case() -> impl Strategy<Value = (Polyhedron, Vec<i64>)> {
    (2usize..=6).prop_flat_map(|n| (random_polytope(n, 4), prop::collection::vec(-5i64..=5, n)))
}

fn form(vars: &[Var], a: &[Rational]) -> LinearForm {
    let mut f = LinearForm::zero();
    for (v, c) in vars.iter().zip(a) {
        f.add_term(c.clone(), v.clone());
    }
    f
}

/// Minimum of `cost` over the brute-force vertices.
pub fn vertex_min(p: &Polyhedron, cost: &[Rational]) -> Rational {
    brute_vertices(p).iter().map(|x| cost.iter().zip(x).map(|(c, v)| c * v).sum::<Rational>()).min().expect("bounded nonempty")
}

/// The model solver and the bare LP with its optimality certificate both
/// reach the vertex-enumeration minimum.
pub fn lp_matches_vertex_min(p: &Polyhedron, cost: &[i64]) -> Result<(), String> {
    let cost: Vec<Rational> = cost.iter().map(|&c| q(c)).collect();
    let expected = vertex_min(p, &cost);

    let mut m = ModelInstance::new("lp", 1);
    for v in p.vars() {
        m.continuous(v.clone(), None, None).map_err(|e| e.to_string())?;
    }
    for r in p.rows() {
        let c = LinearConstraint::le(form(p.vars(), &r.a), LinearForm::constant(r.b.clone()), r.label.clone());
        m.add_constraint(c).map_err(|e| e.to_string())?;
    }
    m.objective = Objective { direction: Direction::Minimize, form: form(p.vars(), &cost) };
    let got = solve_lp(&m).map_err(|e| e.to_string())?;
    if got.objective.as_ref() != Some(&expected) {
        return Err(format!("model solve {:?} != vertex minimum {expected}", got.objective));
    }

    let lp = LpProblem {
        lb: vec![None; p.dim()],
        ub: vec![None; p.dim()],
        rows: p
            .rows()
            .iter()
            .map(|r| LpRow {
                coeffs: r.a.iter().cloned().enumerate().filter(|(_, a)| !a.is_zero()).collect(),
                sense: RowSense::Le,
                rhs: r.b.clone(),
            })
            .collect(),
        cost,
        cost_const: Rational::zero(),
    };
    match lp.solve(Default::default(), 100_000).map_err(|_| "pivot limit".to_string())? {
        LpOutcome::Optimal { objective, certificate, .. } => {
            if objective != expected {
                return Err(format!("bare LP {objective} != vertex minimum {expected}"));
            }
            if !lp.to_std().verify(&certificate) {
                return Err("optimality certificate rejected".into());
            }
            Ok(())
        }
        other => Err(format!("bare LP not optimal: {other:?}")),
    }
}

/// Binary knapsack-style instance: `n_bin` binaries, `n_cont` continuous
/// variables in `[0, 3]`, rows `a.x <= b`, minimize `cost.x`.
#[derive(Debug, Clone)]
pub struct MipCase {
    pub n_bin: usize,
    pub n_cont: usize,
    pub rows: Vec<(Vec<i64>, i64)>,
    pub cost: Vec<i64>,
}

/// Up to 12 binaries; instances with at most 6 binaries also get up to two
/// continuous variables.
pub fn mip_case() -> impl Strategy<Value = MipCase> {
    (1usize..=12)
        .prop_flat_map(|n_bin| (Just(n_bin), if n_bin <= 6 { 0usize..=2 } else { 0usize..=0 }))
        .prop_flat_map(|(n_bin, n_cont)| {
            let n = n_bin + n_cont;
            (
                Just(n_bin),
                Just(n_cont),
                prop::collection::vec((prop::collection::vec(-3i64..=3, n), -2i64..=8), 1..=4),
                prop::collection::vec(-5i64..=5, n),
            )
        })
        .prop_map(|(n_bin, n_cont, rows, cost)| MipCase { n_bin, n_cont, rows, cost })
}

impl MipCase {
    fn var(&self, k: usize) -> Var {
        if k < self.n_bin { Var::new(format!("b{k:02}")) } else { Var::new(format!("c{}", k - self.n_bin)) }
    }

    pub fn model(&self, fixed: Option<&[bool]>) -> ModelInstance {
        let n = self.n_bin + self.n_cont;
        let vars: Vec<Var> = (0..n).map(|k| self.var(k)).collect();
        let mut m = ModelInstance::new("mip", 1);
        for (k, v) in vars.iter().enumerate() {
            match (k < self.n_bin, fixed) {
                (true, Some(f)) => {
                    let x = if f[k] { q(1) } else { q(0) };
                    m.continuous(v.clone(), Some(x.clone()), Some(x)).unwrap();
                }
                (true, None) => {
                    m.binary(v.clone()).unwrap();
                }
                (false, _) => {
                    m.continuous(v.clone(), Some(q(0)), Some(q(3))).unwrap();
                }
            }
        }
        for (i, (a, b)) in self.rows.iter().enumerate() {
            let a: Vec<Rational> = a.iter().map(|&x| q(x)).collect();
            m.add_constraint(LinearConstraint::le(form(&vars, &a), LinearForm::constant(q(*b)), format!("row{i}"))).unwrap();
        }
        let cost: Vec<Rational> = self.cost.iter().map(|&x| q(x)).collect();
        m.objective = Objective { direction: Direction::Minimize, form: form(&vars, &cost) };
        m
    }

    /// Optimum over all binary assignments, `None` when none is feasible.
    pub fn brute_force(&self) -> Option<Rational> {
        let mut best: Option<Rational> = None;
        for mask in 0u32..(1 << self.n_bin) {
            let fixed: Vec<bool> = (0..self.n_bin).map(|k| mask >> k & 1 == 1).collect();
            let value = if self.n_cont == 0 {
                let x: Vec<i64> = fixed.iter().map(|&b| b as i64).collect();
                let feasible = self.rows.iter().all(|(a, b)| a.iter().zip(&x).map(|(a, x)| a * x).sum::<i64>() <= *b);
                feasible.then(|| q(self.cost.iter().zip(&x).map(|(c, x)| c * x).sum()))
            } else {
                let r = solve_lp(&self.model(Some(&fixed))).expect("fixed LP solves");
                r.objective
            };
            if let Some(v) = value {
                if best.as_ref().is_none_or(|b| v < *b) {
                    best = Some(v);
                }
            }
        }
        best
    }
}

/// Branch and bound agrees with exhaustive enumeration.
pub fn mip_matches_brute_force(c: &MipCase) -> Result<(), String> {
    let r = solve_mip(&c.model(None), Branching::MostFractional).map_err(|e| e.to_string())?;
    let expected = c.brute_force();
    match (&expected, r.status) {
        (None, SolveStatus::Infeasible) => Ok(()),
        (Some(v), SolveStatus::Optimal) if r.objective.as_ref() == Some(v) => Ok(()),
        _ => Err(format!("branch and bound {:?} {:?} != enumeration {expected:?} on {c:?}", r.status, r.objective)),
    }
}

/// Energy range 5..50, power limits 10, efficiencies 1/2, one-hour periods.
pub fn example_storage(e_initial: i64) -> StorageParams {
    StorageParams {
        e_min: q(5),
        e_max: q(50),
        p_c_max: q(10),
        p_d_max: q(10),
        eta_c: Rational::new(1, 2),
        eta_d: Rational::new(1, 2),
        e_initial: q(e_initial),
        ..StorageParams::default()
    }
}

/// A schedule from a given initial state: `(p_c, p_d, delta)` per period.
#[derive(Debug, Clone)]
pub struct CutPoint {
    pub e_initial: i64,
    pub periods: Vec<(Rational, Rational, Rational)>,
}

fn cut_point(e_initial: i64, periods: &[(i64, i64, Rational)]) -> CutPoint {
    CutPoint { e_initial, periods: periods.iter().map(|(c, d, m)| (q(*c), q(*d), m.clone())).collect() }
}

/// The one-period point `(50, 8, 2, 0.8)` that the basic relaxation admits.
pub fn single_period_cut() -> CutPoint {
    cut_point(50, &[(8, 2, Rational::new(4, 5))])
}

/// The three two-period points the tight relaxation cuts off.
pub fn two_period_cuts() -> Vec<CutPoint> {
    let f = Rational::new(4, 5);
    vec![
        cut_point(50, &[(8, 2, f.clone()), (0, 0, q(0))]),
        cut_point(50, &[(8, 2, f.clone()), (8, 2, f.clone())]),
        cut_point(45, &[(10, 0, q(1)), (8, 2, f)]),
    ]
}

impl CutPoint {
    pub fn params(&self) -> StorageParams {
        example_storage(self.e_initial)
    }

    /// Full assignment with the state of charge from the balance rows.
    pub fn assignment(&self) -> BTreeMap<Var, Rational> {
        let p = self.params();
        let mut e = p.e_initial.clone();
        let mut out = BTreeMap::new();
        for (i, (c, d, m)) in self.periods.iter().enumerate() {
            let t = i + 1;
            e = &(&e + &(&p.eta_c * c)) - &(d / &p.eta_d);
            out.insert(pvar("e", t), e.clone());
            out.insert(pvar("p_c", t), c.clone());
            out.insert(pvar("p_d", t), d.clone());
            out.insert(pvar("delta", t), m.clone());
        }
        out
    }

    pub fn basic_lp(&self) -> ModelInstance {
        relax(&build_bo(&self.params(), self.periods.len()).unwrap())
    }

    pub fn tight_lp(&self) -> ModelInstance {
        relax(&build_to(&self.params(), self.periods.len()).unwrap())
    }
}
