//! Dense two-phase primal simplex on `min c.x, A x = b, x >= 0, b >= 0`.

use super::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Pricing {
    /// Lowest-index improving column; cannot cycle.
    #[default]
    Bland,
    /// Most negative reduced cost, switching to Bland after a run of
    /// degenerate pivots.
    Dantzig,
}

#[derive(Debug, Clone)]
pub struct StdForm<F> {
    pub a: Vec<Vec<F>>,
    pub b: Vec<F>,
    pub c: Vec<F>,
}

#[derive(Debug, Clone)]
pub enum StdOutcome<F> {
    Optimal {
        x: Vec<F>,
        /// Row duals: `c - A^T y >= 0` and `b.y = c.x` at optimality.
        y: Vec<F>,
        /// Basic column per row; indices `>= n` are artificial unit columns.
        basis: Vec<usize>,
        objective: F,
    },
    /// `y` with `A^T y <= 0` and `b.y > 0`.
    Infeasible { farkas: Vec<F> },
    /// Feasible `x` and a ray `r >= 0` with `A r = 0`, `c.r < 0`.
    Unbounded { x: Vec<F>, ray: Vec<F> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PivotLimit;

struct Tableau<F> {
    t: Vec<Vec<F>>,
    rhs: Vec<F>,
    basis: Vec<usize>,
    d: Vec<F>,
    z: F,
    n_struct: usize,
}

impl<F: Scalar> Tableau<F> {
    fn pivot(&mut self, r: usize, col: usize) {
        let p = self.t[r][col].clone();
        let inv = F::one().div(&p);
        for v in self.t[r].iter_mut() {
            if !v.is_zero() {
                *v = v.mul(&inv);
            }
        }
        self.rhs[r] = self.rhs[r].mul(&inv);
        self.t[r][col] = F::one();
        let prow = std::mem::take(&mut self.t[r]);
        let prhs = self.rhs[r].clone();
        let nz: Vec<usize> = (0..prow.len()).filter(|&j| !prow[j].is_zero()).collect();
        for k in 0..self.t.len() {
            if k == r {
                continue;
            }
            let f = self.t[k][col].clone();
            if f.is_zero() {
                continue;
            }
            let row = &mut self.t[k];
            for &j in &nz {
                row[j] = row[j].sub(&f.mul(&prow[j]));
            }
            row[col] = F::zero();
            self.rhs[k] = self.rhs[k].sub(&f.mul(&prhs));
        }
        let f = self.d[col].clone();
        if !f.is_zero() {
            for &j in &nz {
                self.d[j] = self.d[j].sub(&f.mul(&prow[j]));
            }
            self.d[col] = F::zero();
            self.z = self.z.add(&f.mul(&prhs));
        }
        self.t[r] = prow;
        self.basis[r] = col;
    }

    fn set_costs(&mut self, cost: &[F]) {
        self.d = cost.to_vec();
        self.z = F::zero();
        for (i, &bc) in self.basis.iter().enumerate() {
            let cb = &cost[bc];
            if cb.is_zero() {
                continue;
            }
            for (j, v) in self.t[i].iter().enumerate() {
                if !v.is_zero() {
                    self.d[j] = self.d[j].sub(&cb.mul(v));
                }
            }
            self.z = self.z.add(&cb.mul(&self.rhs[i]));
        }
        for &bc in &self.basis {
            self.d[bc] = F::zero();
        }
    }

    /// Runs pivots until optimal (`Ok(None)`) or an unbounded column is found.
    fn optimize(
        &mut self,
        allowed: usize,
        pricing: Pricing,
        pivots: &mut usize,
        max_pivots: usize,
    ) -> Result<Option<usize>, PivotLimit> {
        let mut degenerate_run = 0usize;
        loop {
            let use_bland = pricing == Pricing::Bland || degenerate_run > 50;
            let entering = if use_bland {
                (0..allowed).find(|&j| self.d[j].is_neg())
            } else {
                let mut best: Option<usize> = None;
                for j in 0..allowed {
                    if self.d[j].is_neg() && best.is_none_or(|b| self.d[j].lt(&self.d[b])) {
                        best = Some(j);
                    }
                }
                best
            };
            let Some(col) = entering else { return Ok(None) };
            let mut leave: Option<(usize, F)> = None;
            for i in 0..self.t.len() {
                let a = &self.t[i][col];
                if !a.is_pos() {
                    continue;
                }
                let ratio = self.rhs[i].div(a);
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => {
                        ratio.lt(lr) || (!lr.lt(&ratio) && self.basis[i] < self.basis[*li])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((r, ratio)) = leave else { return Ok(Some(col)) };
            if ratio.is_zero() {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            *pivots += 1;
            if *pivots > max_pivots {
                return Err(PivotLimit);
            }
            self.pivot(r, col);
        }
    }

    fn primal(&self) -> Vec<F> {
        let mut x = vec![F::zero(); self.n_struct];
        for (i, &bc) in self.basis.iter().enumerate() {
            if bc < self.n_struct {
                x[bc] = self.rhs[i].clone();
            }
        }
        x
    }
}

/// Column index of an existing unit column for each row, if any.
pub(crate) fn unit_columns<F: Scalar>(a: &[Vec<F>], n: usize) -> Vec<Option<usize>> {
    let mut unit = vec![None; a.len()];
    for j in 0..n {
        let mut hit = None;
        let mut ok = true;
        for (i, row) in a.iter().enumerate() {
            let v = &row[j];
            if v.is_zero() {
                continue;
            }
            if hit.is_some() || !v.sub(&F::one()).is_zero() {
                ok = false;
                break;
            }
            hit = Some(i);
        }
        if let (true, Some(i)) = (ok, hit) {
            if unit[i].is_none() {
                unit[i] = Some(j);
            }
        }
    }
    unit
}

/// Solves a standard-form LP. Deterministic for a given pricing rule.
pub fn solve_std<F: Scalar>(
    p: &StdForm<F>,
    pricing: Pricing,
    max_pivots: usize,
) -> Result<StdOutcome<F>, PivotLimit> {
    let m = p.b.len();
    let n = p.c.len();
    let unit = unit_columns(&p.a, n);
    let n_art = unit.iter().filter(|u| u.is_none()).count();
    let ncols = n + n_art;
    let mut t = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut unit_col = Vec::with_capacity(m);
    let mut next_art = n;
    for i in 0..m {
        let mut row = p.a[i].clone();
        row.resize(ncols, F::zero());
        let u = match unit[i] {
            Some(j) => j,
            None => {
                row[next_art] = F::one();
                next_art += 1;
                next_art - 1
            }
        };
        basis.push(u);
        unit_col.push(u);
        t.push(row);
    }
    let mut tab = Tableau { t, rhs: p.b.clone(), basis, d: Vec::new(), z: F::zero(), n_struct: n };
    let mut pivots = 0usize;

    if n_art > 0 {
        let mut c1 = vec![F::zero(); ncols];
        for v in c1.iter_mut().skip(n) {
            *v = F::one();
        }
        tab.set_costs(&c1);
        tab.optimize(ncols, pricing, &mut pivots, max_pivots)?;
        if tab.z.is_pos() {
            let farkas = unit_col.iter().map(|&u| c1[u].sub(&tab.d[u])).collect();
            return Ok(StdOutcome::Infeasible { farkas });
        }
        // Drive remaining artificials out of the basis where the row allows.
        for r in 0..m {
            if tab.basis[r] < n {
                continue;
            }
            if let Some(j) = (0..n).find(|&j| !tab.t[r][j].is_zero()) {
                tab.pivot(r, j);
                pivots += 1;
            }
        }
    }

    let mut c2 = p.c.clone();
    c2.resize(ncols, F::zero());
    tab.set_costs(&c2);
    match tab.optimize(n, pricing, &mut pivots, max_pivots)? {
        None => {
            let y = unit_col.iter().map(|&u| c2[u].sub(&tab.d[u])).collect();
            Ok(StdOutcome::Optimal { x: tab.primal(), y, basis: tab.basis.clone(), objective: tab.z.clone() })
        }
        Some(col) => {
            let mut ray = vec![F::zero(); n];
            ray[col] = F::one();
            for (i, &bc) in tab.basis.iter().enumerate() {
                if bc < n {
                    ray[bc] = tab.t[i][col].neg();
                }
            }
            Ok(StdOutcome::Unbounded { x: tab.primal(), ray })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::Rational;

    fn q(n: i64) -> Rational {
        Rational::from_int(n)
    }

    #[test]
    fn small_lp_with_duals() {
        // min -x - y  s.t. x + 2y + s1 = 4, 3x + y + s2 = 6
        let a = vec![vec![q(1), q(2), q(1), q(0)], vec![q(3), q(1), q(0), q(1)]];
        let p = StdForm { a, b: vec![q(4), q(6)], c: vec![q(-1), q(-1), q(0), q(0)] };
        match solve_std(&p, Pricing::Bland, 100).unwrap() {
            StdOutcome::Optimal { x, y, objective, .. } => {
                assert_eq!(x[0], Rational::new(8, 5));
                assert_eq!(x[1], Rational::new(6, 5));
                assert_eq!(objective, Rational::new(-14, 5));
                let dual_obj: Rational = y.iter().zip(&p.b).map(|(a, b)| a * b).sum();
                assert_eq!(dual_obj, objective);
            }
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn infeasible_has_farkas() {
        // x + y = 1 and x + y = 2
        let a = vec![vec![q(1), q(1)], vec![q(1), q(1)]];
        let p = StdForm { a: a.clone(), b: vec![q(1), q(2)], c: vec![q(0), q(0)] };
        match solve_std(&p, Pricing::Bland, 100).unwrap() {
            StdOutcome::Infeasible { farkas } => {
                for j in 0..2 {
                    let s: Rational = (0..2).map(|i| &farkas[i] * &a[i][j]).sum();
                    assert!(!s.is_positive());
                }
                let s: Rational = farkas.iter().zip(&p.b).map(|(y, b)| y * b).sum();
                assert!(s.is_positive());
            }
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn unbounded_ray() {
        // min -x s.t. x - y = 0
        let p = StdForm { a: vec![vec![q(1), q(-1)]], b: vec![q(0)], c: vec![q(-1), q(0)] };
        match solve_std(&p, Pricing::Bland, 100).unwrap() {
            StdOutcome::Unbounded { ray, .. } => {
                assert_eq!(&ray[0] - &ray[1], q(0));
                assert!(ray[0].is_positive());
            }
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn float_mode_agrees() {
        let a = vec![vec![1.0, 2.0, 1.0, 0.0], vec![3.0, 1.0, 0.0, 1.0]];
        let p = StdForm { a, b: vec![4.0, 6.0], c: vec![-1.0, -1.0, 0.0, 0.0] };
        match solve_std(&p, Pricing::Dantzig, 100).unwrap() {
            StdOutcome::Optimal { objective, .. } => assert!((objective + 2.8).abs() < 1e-12),
            o => panic!("{o:?}"),
        }
    }
}
