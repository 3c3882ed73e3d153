//! LP and depth-first branch-and-bound solves of [`ModelInstance`]s.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::model::{Direction, Integrality, ModelInstance};
use crate::numeric::{Rational, Var};
use crate::poly::Sense;

use super::lp::{Arithmetic, LpOutcome, LpProblem, LpRow, RowSense};
use super::simplex::PivotLimit;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("node limit of {0} reached")]
    NodeLimit(u64),
    #[error("model has binary variables; relax it before an LP solve")]
    HasBinaries,
    #[error("simplex pivot limit reached")]
    PivotLimit,
    #[error("result is not optimal")]
    NoSolution,
    #[error("optimality certificate failed exact verification")]
    CertificateRejected,
}

impl From<PivotLimit> for SolveError {
    fn from(_: PivotLimit) -> Self {
        SolveError::PivotLimit
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Branching {
    /// Binary with fractional part closest to 1/2; ties go to the lowest
    /// period index, then the variable name.
    #[default]
    MostFractional,
    /// First fractional binary in (period, name) order.
    FirstFractional,
}

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    pub arithmetic: Arithmetic,
    pub branching: Branching,
    pub node_limit: u64,
    pub max_pivots: usize,
    /// Solve blocks of variables that share no constraint separately,
    /// reusing results for blocks that are identical up to renaming.
    pub decompose: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            arithmetic: Arithmetic::Exact,
            branching: Branching::MostFractional,
            node_limit: 1_000_000,
            max_pivots: 1_000_000,
            decompose: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SolveResult {
    pub status: SolveStatus,
    /// Objective in the model's own direction; `None` unless optimal.
    pub objective: Option<Rational>,
    pub assignment: BTreeMap<Var, Rational>,
    pub nodes_explored: u64,
    /// `(node, objective)` each time the incumbent improved. Decomposed
    /// solves record a single entry for the assembled optimum.
    pub incumbent_history: Vec<(u64, Rational)>,
}

impl SolveResult {
    fn without_solution(status: SolveStatus, nodes: u64) -> Self {
        SolveResult { status, objective: None, assignment: BTreeMap::new(), nodes_explored: nodes, incumbent_history: Vec::new() }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }

    pub fn value(&self, v: &str) -> Rational {
        self.assignment.get(v).cloned().unwrap_or_default()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result serializes")
    }

    pub fn csv_header() -> &'static str {
        "status,objective,nodes_explored"
    }

    pub fn csv_row(&self) -> String {
        let obj = self.objective.as_ref().map(|o| o.to_string()).unwrap_or_default();
        format!("{:?},{},{}", self.status, obj, self.nodes_explored)
    }

    /// `variable,value` lines for the assignment, exact values.
    pub fn assignment_csv(&self) -> String {
        let mut s = String::from("variable,value\n");
        for (v, x) in &self.assignment {
            let _ = writeln!(s, "{v},{x}");
        }
        s
    }
}

/// Exact LP optimum of a model without binary marks.
pub fn solve_lp(m: &ModelInstance) -> Result<SolveResult, SolveError> {
    solve_lp_with(m, &SolveOptions::default())
}

pub fn solve_lp_with(m: &ModelInstance, opts: &SolveOptions) -> Result<SolveResult, SolveError> {
    if m.has_binaries() {
        return Err(SolveError::HasBinaries);
    }
    solve_mip_with(m, opts)
}

pub fn solve_mip(m: &ModelInstance, branching: Branching) -> Result<SolveResult, SolveError> {
    solve_mip_with(m, &SolveOptions { branching, ..SolveOptions::default() })
}

/// Branch and bound over the binary variables. Every LP optimum used for
/// pruning or as an incumbent carries an exactly verified strong-duality
/// certificate.
pub fn solve_mip_with(m: &ModelInstance, opts: &SolveOptions) -> Result<SolveResult, SolveError> {
    let sign = match m.objective.direction {
        Direction::Minimize => Rational::one(),
        Direction::Maximize => -Rational::one(),
    };
    for c in m.constraints().iter().filter(|c| c.form.is_empty()) {
        let ok = match c.sense {
            Sense::Le => Rational::zero() <= c.rhs,
            Sense::Ge => Rational::zero() >= c.rhs,
            Sense::Eq => c.rhs.is_zero(),
        };
        if !ok {
            return Ok(SolveResult::without_solution(SolveStatus::Infeasible, 0));
        }
    }
    let groups = if opts.decompose { m.blocks() } else { vec![(0..m.variables().len()).collect()] };
    let mut group_of = vec![0usize; m.variables().len()];
    for (gi, g) in groups.iter().enumerate() {
        for &v in g {
            group_of[v] = gi;
        }
    }
    let mut group_rows: Vec<Vec<usize>> = vec![Vec::new(); groups.len()];
    for (ci, c) in m.constraints().iter().enumerate() {
        if let Some(first) = c.form.vars().next() {
            group_rows[group_of[m.index_of(first.as_str()).expect("declared")]].push(ci);
        }
    }
    let mut cache: HashMap<String, BlockOutcome> = HashMap::new();
    let mut x_all = vec![Rational::zero(); m.variables().len()];
    let mut total = m.objective.form.constant_term().clone();
    let mut nodes = 0u64;
    let mut single_history = None;
    let mut status = SolveStatus::Optimal;
    for (g, rows) in groups.iter().zip(&group_rows) {
        let block = Block::new(m, g, rows, &sign);
        let key = block.fingerprint();
        let out = match cache.get(&key) {
            Some(o) => o.clone(),
            None => {
                let o = block.solve(opts, opts.node_limit.saturating_sub(nodes))?;
                cache.insert(key, o.clone());
                o
            }
        };
        nodes += out.nodes;
        if nodes > opts.node_limit {
            return Err(SolveError::NodeLimit(opts.node_limit));
        }
        match out.status {
            SolveStatus::Optimal => {
                for (local, &global) in g.iter().enumerate() {
                    x_all[global] = out.x[local].clone();
                }
                total += &sign * &out.objective;
                if groups.len() == 1 {
                    single_history = Some(out.history.clone());
                }
            }
            SolveStatus::Infeasible => return Ok(SolveResult::without_solution(SolveStatus::Infeasible, nodes)),
            SolveStatus::Unbounded => status = SolveStatus::Unbounded,
        }
    }
    if status == SolveStatus::Unbounded {
        return Ok(SolveResult::without_solution(SolveStatus::Unbounded, nodes));
    }
    let assignment: BTreeMap<Var, Rational> = m.var_ids().into_iter().zip(x_all).collect();
    debug_assert!(m.is_feasible(&assignment, true), "assembled optimum violates {:?}", m.violations(&assignment, true));
    let history = match single_history {
        Some(h) => h.into_iter().map(|(n, o)| (n, &(&sign * &o) + m.objective.form.constant_term())).collect(),
        None => vec![(nodes, total.clone())],
    };
    Ok(SolveResult { status, objective: Some(total), assignment, nodes_explored: nodes, incumbent_history: history })
}

#[derive(Debug, Clone)]
struct BlockOutcome {
    status: SolveStatus,
    x: Vec<Rational>,
    /// Internal minimization objective, without the model's constant.
    objective: Rational,
    nodes: u64,
    history: Vec<(u64, Rational)>,
}

/// One group of variables with the constraints that touch it, in
/// minimization form.
struct Block {
    lp: LpProblem,
    /// Local indices of binaries in branching priority order.
    binaries: Vec<usize>,
}

impl Block {
    fn new(m: &ModelInstance, vars: &[usize], rows: &[usize], sign: &Rational) -> Block {
        let local: HashMap<usize, usize> = vars.iter().enumerate().map(|(l, &g)| (g, l)).collect();
        let mut lp = LpProblem::new(vars.len());
        let decls = m.variables();
        for (l, &g) in vars.iter().enumerate() {
            lp.lb[l] = decls[g].lower.clone();
            lp.ub[l] = decls[g].upper.clone();
            lp.cost[l] = sign * &m.objective.form.coeff(decls[g].id.as_str());
        }
        for c in rows.iter().map(|&ci| &m.constraints()[ci]) {
            let coeffs =
                c.form.terms().map(|(v, k)| (local[&m.index_of(v.as_str()).expect("declared")], k.clone())).collect();
            let sense = match c.sense {
                Sense::Le => RowSense::Le,
                Sense::Ge => RowSense::Ge,
                Sense::Eq => RowSense::Eq,
            };
            lp.rows.push(LpRow { coeffs, sense, rhs: c.rhs.clone() });
        }
        let mut binaries: Vec<usize> =
            (0..vars.len()).filter(|&l| decls[vars[l]].integrality == Integrality::Binary).collect();
        binaries.sort_by_key(|&l| {
            let id = &decls[vars[l]].id;
            (id.period().unwrap_or(0), id.as_str().to_string())
        });
        Block { lp, binaries }
    }

    /// Positional description: identical strings mean identical problems up
    /// to renaming of variables.
    fn fingerprint(&self) -> String {
        format!("{:?}|{:?}|{:?}|{:?}|{:?}", self.lp.lb, self.lp.ub, self.lp.cost, self.lp.rows, self.binaries)
    }

    fn solve_node(&self, fixed: &[(usize, bool)], opts: &SolveOptions) -> Result<LpOutcome, SolveError> {
        let mut lp = self.lp.clone();
        for &(k, up) in fixed {
            let v = if up { Rational::one() } else { Rational::zero() };
            lp.lb[k] = Some(v.clone());
            lp.ub[k] = Some(v);
        }
        let out = lp.solve(opts.arithmetic, opts.max_pivots)?;
        if let LpOutcome::Optimal { certificate, .. } = &out {
            if !lp.to_std().verify(certificate) {
                return Err(SolveError::CertificateRejected);
            }
        }
        Ok(out)
    }

    fn pick(&self, x: &[Rational], rule: Branching) -> Option<usize> {
        let half = Rational::new(1, 2);
        let mut best: Option<(usize, Rational)> = None;
        for &k in &self.binaries {
            if x[k].is_integer() {
                continue;
            }
            let dist = (&x[k] - &half).abs();
            match rule {
                Branching::FirstFractional => return Some(k),
                Branching::MostFractional => {
                    if best.as_ref().is_none_or(|(_, d)| dist < *d) {
                        best = Some((k, dist));
                    }
                }
            }
        }
        best.map(|(k, _)| k)
    }

    fn solve(&self, opts: &SolveOptions, limit: u64) -> Result<BlockOutcome, SolveError> {
        let mut nodes = 0u64;
        let mut incumbent: Option<(Vec<Rational>, Rational)> = None;
        let mut history = Vec::new();
        let mut stack: Vec<Vec<(usize, bool)>> = vec![Vec::new()];
        while let Some(fixed) = stack.pop() {
            if nodes >= limit {
                return Err(SolveError::NodeLimit(opts.node_limit));
            }
            nodes += 1;
            let (x, obj) = match self.solve_node(&fixed, opts)? {
                LpOutcome::Optimal { x, objective, .. } => (x, objective),
                LpOutcome::Infeasible { .. } => continue,
                LpOutcome::Unbounded { .. } => {
                    return Ok(BlockOutcome {
                        status: SolveStatus::Unbounded,
                        x: Vec::new(),
                        objective: Rational::zero(),
                        nodes,
                        history,
                    })
                }
            };
            if incumbent.as_ref().is_some_and(|(_, best)| obj >= *best) {
                continue;
            }
            match self.pick(&x, opts.branching) {
                None => {
                    history.push((nodes, obj.clone()));
                    incumbent = Some((x, obj));
                }
                Some(k) => {
                    let mut down = fixed.clone();
                    down.push((k, false));
                    let mut up = fixed;
                    up.push((k, true));
                    stack.push(down);
                    stack.push(up);
                }
            }
        }
        Ok(match incumbent {
            Some((x, objective)) => BlockOutcome { status: SolveStatus::Optimal, x, objective, nodes, history },
            None => BlockOutcome { status: SolveStatus::Infeasible, x: Vec::new(), objective: Rational::zero(), nodes, history },
        })
    }
}

/// Number of periods with both `p_c` and `p_d` positive, and the sum of
/// their products. Charge and discharge variables are paired by the bracket
/// suffix of their names (`p_c[t=3]` with `p_d[t=3]`).
pub fn count_simultaneity(r: &SolveResult, m: &ModelInstance) -> Result<(usize, Rational), SolveError> {
    if !r.is_optimal() {
        return Err(SolveError::NoSolution);
    }
    let mut periods = 0;
    let mut sum = Rational::zero();
    for d in m.variables() {
        let Some(suffix) = d.id.as_str().strip_prefix("p_c[") else { continue };
        let pc = r.value(d.id.as_str());
        let pd = r.value(&format!("p_d[{suffix}"));
        if pc.is_positive() && pd.is_positive() {
            periods += 1;
        }
        sum += &pc * &pd;
    }
    Ok((periods, sum))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Objective;
    use crate::numeric::LinearForm;
    use crate::poly::LinearConstraint;

    fn q(n: i64) -> Rational {
        Rational::from_int(n)
    }

    #[test]
    fn lp_lower_bound() {
        let mut m = ModelInstance::new("lb", 1);
        m.continuous("x", None, None).unwrap();
        m.add_constraint(LinearConstraint::ge(LinearForm::var("x"), LinearForm::constant(q(3)), "x>=3")).unwrap();
        m.objective = Objective { direction: Direction::Minimize, form: LinearForm::var("x") };
        let r = solve_lp(&m).unwrap();
        assert_eq!(r.objective, Some(q(3)));
        assert_eq!(r.nodes_explored, 1);
    }

    #[test]
    fn lp_unit_square() {
        let mut m = ModelInstance::new("sq", 1);
        m.continuous("x", Some(q(0)), Some(q(1))).unwrap();
        m.continuous("y", Some(q(0)), Some(q(1))).unwrap();
        m.objective = Objective {
            direction: Direction::Minimize,
            form: LinearForm::from_terms([(q(-1), "x"), (q(-1), "y")], q(0)),
        };
        let r = solve_lp(&m).unwrap();
        assert_eq!(r.objective, Some(q(-2)));
        assert_eq!((r.value("x"), r.value("y")), (q(1), q(1)));
    }

    fn knapsack() -> ModelInstance {
        let mut m = ModelInstance::new("knap", 1);
        for i in 0..3 {
            m.binary(format!("b{i}")).unwrap();
        }
        let w = LinearForm::from_terms([(q(3), "b0"), (q(4), "b1"), (q(5), "b2")], q(0));
        m.add_constraint(LinearConstraint::le(w, LinearForm::constant(q(9)), "cap")).unwrap();
        m.objective = Objective {
            direction: Direction::Maximize,
            form: LinearForm::from_terms([(q(4), "b0"), (q(5), "b1"), (q(7), "b2")], q(0)),
        };
        m
    }

    #[test]
    fn knapsack_matches_enumeration() {
        let m = knapsack();
        let r = solve_mip(&m, Branching::MostFractional).unwrap();
        let mut best = None;
        for mask in 0..8u32 {
            let pt: BTreeMap<Var, Rational> =
                (0..3).map(|i| (Var::from(format!("b{i}")), q(((mask >> i) & 1) as i64))).collect();
            if m.is_feasible(&pt, true) {
                let v = m.objective_value(&pt);
                if best.as_ref().is_none_or(|b| v > *b) {
                    best = Some(v);
                }
            }
        }
        assert_eq!(r.objective, best);
        assert!(r.nodes_explored > 1);
        assert_eq!(r.incumbent_history.last().map(|h| h.1.clone()), r.objective);
        assert_eq!(solve_lp(&m), Err(SolveError::HasBinaries));
    }

    #[test]
    fn integral_relaxation_is_one_node() {
        let mut m = ModelInstance::new("int", 1);
        m.binary("b").unwrap();
        m.objective = Objective { direction: Direction::Maximize, form: LinearForm::var("b") };
        assert_eq!(solve_mip(&m, Branching::MostFractional).unwrap().nodes_explored, 1);
    }

    #[test]
    fn node_limit_and_infeasible() {
        let m = knapsack();
        let opts = SolveOptions { node_limit: 1, ..SolveOptions::default() };
        assert_eq!(solve_mip_with(&m, &opts), Err(SolveError::NodeLimit(1)));
        let mut bad = ModelInstance::new("bad", 1);
        bad.nonneg("x").unwrap();
        bad.add_constraint(LinearConstraint::le(LinearForm::var("x"), LinearForm::constant(q(-1)), "neg")).unwrap();
        assert_eq!(solve_lp(&bad).unwrap().status, SolveStatus::Infeasible);
    }

    #[test]
    fn identical_blocks_are_reused() {
        let mut m = ModelInstance::new("blocks", 2);
        let mut obj = LinearForm::zero();
        for t in 1..=2 {
            let (x, b) = (format!("x[t={t}]"), format!("b[t={t}]"));
            m.nonneg(x.as_str()).unwrap();
            m.binary(b.as_str()).unwrap();
            let lhs = LinearForm::var(x.as_str()) + LinearForm::term(q(3), b.as_str());
            m.add_constraint(LinearConstraint::ge(lhs, LinearForm::constant(Rational::new(3, 2)), format!("cover[t={t}]")))
                .unwrap();
            obj = obj + LinearForm::term(q(2), x.as_str()) + LinearForm::var(b.as_str());
        }
        m.objective = Objective { direction: Direction::Minimize, form: obj };
        let split = solve_mip(&m, Branching::MostFractional).unwrap();
        let whole =
            solve_mip_with(&m, &SolveOptions { decompose: false, ..SolveOptions::default() }).unwrap();
        assert_eq!(split.objective, Some(q(2)));
        assert_eq!(split.objective, whole.objective);
        let float = solve_mip_with(&m, &SolveOptions { arithmetic: Arithmetic::Float, ..SolveOptions::default() }).unwrap();
        assert_eq!(float.objective, split.objective);
    }

    #[test]
    fn simultaneity_counts_pairs() {
        let mut m = ModelInstance::new("sim", 2);
        for t in 1..=2 {
            m.nonneg(format!("p_c[t={t}]")).unwrap();
            m.nonneg(format!("p_d[t={t}]")).unwrap();
        }
        let mut r = SolveResult::without_solution(SolveStatus::Optimal, 1);
        r.assignment.insert("p_c[t=1]".into(), q(8));
        r.assignment.insert("p_d[t=1]".into(), q(2));
        r.assignment.insert("p_c[t=2]".into(), q(3));
        assert_eq!(count_simultaneity(&r, &m).unwrap(), (1, q(16)));
        r.status = SolveStatus::Infeasible;
        assert_eq!(count_simultaneity(&r, &m), Err(SolveError::NoSolution));
    }
}
