//! Vertex enumeration by the double description method on the homogenized
//! cone `{(x, t) : A x - b t <= 0, E x - f t = 0, t >= 0}`.

use serde::Serialize;

use crate::numeric::{Rational, Var};

use super::canonical::primitive_factor;
use super::{PolyError, Polyhedron};

/// Size limits for vertex enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VertexGuard {
    pub max_dim: usize,
    pub max_rows: usize,
}

impl Default for VertexGuard {
    fn default() -> Self {
        VertexGuard { max_dim: 12, max_rows: 64 }
    }
}

/// Exact vertices in the polyhedron's variable order, sorted and distinct.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VertexSet {
    pub vars: Vec<Var>,
    pub points: Vec<Vec<Rational>>,
}

impl VertexSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Coordinates of `v` in every point.
    pub fn column(&self, v: &str) -> Option<Vec<Rational>> {
        let k = self.vars.iter().position(|x| x.as_str() == v)?;
        Some(self.points.iter().map(|p| p[k].clone()).collect())
    }

    /// Same points with coordinates reordered to `vars` (which must be a
    /// permutation of `self.vars`).
    pub fn reorder(&self, vars: &[Var]) -> Option<VertexSet> {
        let map: Option<Vec<usize>> = vars.iter().map(|v| self.vars.iter().position(|x| x == v)).collect();
        let map = map?;
        if map.len() != self.vars.len() {
            return None;
        }
        let mut points: Vec<Vec<Rational>> =
            self.points.iter().map(|p| map.iter().map(|&i| p[i].clone()).collect()).collect();
        points.sort();
        Some(VertexSet { vars: vars.to_vec(), points })
    }
}

#[derive(Clone, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn and(&self, o: &Bits) -> Bits {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a & b).collect())
    }

    fn contains(&self, o: &Bits) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a & b == *b)
    }
}

struct Ray {
    z: Vec<Rational>,
    zeros: Bits,
}

fn dot(h: &[Rational], z: &[Rational]) -> Rational {
    h.iter().zip(z).filter(|(a, _)| !a.is_zero()).map(|(a, b)| a * b).sum()
}

fn normalize(z: Vec<Rational>) -> Vec<Rational> {
    match primitive_factor(z.iter()) {
        Some(k) if !k.is_one() => z.into_iter().map(|x| &x * &k).collect(),
        _ => z,
    }
}

/// Double description state for a cone `lin(L) + cone(R)`.
struct Dd {
    lineality: Vec<Vec<Rational>>,
    rays: Vec<Ray>,
    processed: usize,
    width: usize,
}

impl Dd {
    fn new(dim: usize, n_constraints: usize) -> Self {
        let lineality = (0..dim)
            .map(|i| {
                let mut v = vec![Rational::zero(); dim];
                v[i] = Rational::one();
                v
            })
            .collect();
        Dd { lineality, rays: Vec::new(), processed: 0, width: n_constraints }
    }

    /// Intersects with `h.z <= 0` (or `h.z = 0` when `eq`).
    fn add(&mut self, h: &[Rational], eq: bool) {
        let idx = self.processed;
        self.processed += 1;
        if let Some(j) = self.lineality.iter().position(|l| !dot(h, l).is_zero()) {
            let mut l = self.lineality.remove(j);
            let mut hl = dot(h, &l);
            if hl.is_positive() {
                l = l.iter().map(|x| -x).collect();
                hl = -hl;
            }
            let fix = |v: &[Rational]| -> Vec<Rational> {
                let f = &dot(h, v) / &hl;
                if f.is_zero() {
                    v.to_vec()
                } else {
                    normalize(v.iter().zip(&l).map(|(a, b)| a - &f * b).collect())
                }
            };
            self.lineality = self.lineality.iter().map(|v| fix(v)).collect();
            for r in self.rays.iter_mut() {
                r.z = fix(&r.z);
                r.zeros.set(idx);
            }
            if !eq {
                let mut zeros = Bits::new(self.width);
                for k in 0..idx {
                    zeros.set(k);
                }
                self.rays.push(Ray { z: normalize(l), zeros });
            }
            return;
        }

        let vals: Vec<Rational> = self.rays.iter().map(|r| dot(h, &r.z)).collect();
        let pos: Vec<usize> = (0..vals.len()).filter(|&i| vals[i].is_positive()).collect();
        let neg: Vec<usize> = (0..vals.len()).filter(|&i| vals[i].is_negative()).collect();
        let mut new_rays = Vec::new();
        for &p in &pos {
            for &n in &neg {
                let common = self.rays[p].zeros.and(&self.rays[n].zeros);
                let adjacent = (0..self.rays.len())
                    .all(|k| k == p || k == n || !self.rays[k].zeros.contains(&common));
                if !adjacent {
                    continue;
                }
                let (vp, vn) = (&vals[p], -&vals[n]);
                let z = self.rays[n].z.iter().zip(&self.rays[p].z).map(|(a, b)| a * vp + b * &vn).collect();
                let mut zeros = common;
                zeros.set(idx);
                new_rays.push(Ray { z: normalize(z), zeros });
            }
        }
        let old = std::mem::take(&mut self.rays);
        for (r, v) in old.into_iter().zip(&vals) {
            if v.is_zero() {
                let mut r = r;
                r.zeros.set(idx);
                self.rays.push(r);
            } else if v.is_negative() && !eq {
                self.rays.push(r);
            }
        }
        self.rays.extend(new_rays);
    }
}

pub fn enumerate_vertices(p: &Polyhedron) -> Result<VertexSet, PolyError> {
    enumerate_vertices_with(p, VertexGuard::default())
}

/// All vertices of a bounded polyhedron. An empty polyhedron yields an empty
/// set; a nonempty unbounded one is an error.
pub fn enumerate_vertices_with(p: &Polyhedron, guard: VertexGuard) -> Result<VertexSet, PolyError> {
    let n = p.dim();
    if n > guard.max_dim || p.rows().len() > guard.max_rows {
        return Err(PolyError::TooLarge { dim: n, rows: p.rows().len() });
    }
    let mut dd = Dd::new(n + 1, p.rows().len() + 1);
    let mut t_row = vec![Rational::zero(); n + 1];
    t_row[n] = -Rational::one();
    dd.add(&t_row, false);
    let mut order: Vec<_> = p.rows().iter().filter(|r| r.eq).collect();
    order.extend(p.rows().iter().filter(|r| !r.eq));
    for r in order {
        let mut h = r.a.clone();
        h.push(-&r.b);
        dd.add(&h, r.eq);
    }

    let mut points = Vec::new();
    let mut recession = !dd.lineality.is_empty();
    for r in &dd.rays {
        let t = &r.z[n];
        if t.is_positive() {
            points.push(r.z[..n].iter().map(|x| x / t).collect::<Vec<_>>());
        } else {
            recession = true;
        }
    }
    if points.is_empty() {
        return Ok(VertexSet { vars: p.vars().to_vec(), points });
    }
    if recession {
        return Err(PolyError::Unbounded);
    }
    points.sort();
    points.dedup();
    Ok(VertexSet { vars: p.vars().to_vec(), points })
}
