use std::borrow::Borrow;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use super::{NumericError, Rational};

/// Variable identifier.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Var(String);

impl Var {
    pub fn new(name: impl Into<String>) -> Self {
        Var(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Period index carried by names of the form `name[t]` or `name[..,t=k]`.
    pub fn period(&self) -> Option<usize> {
        let inner = self.0.rsplit_once('[')?.1.strip_suffix(']')?;
        let last = inner.rsplit(',').next()?;
        let last = last.strip_prefix("t=").unwrap_or(last);
        last.parse().ok()
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl From<&str> for Var {
    fn from(s: &str) -> Self {
        Var(s.to_string())
    }
}

impl From<String> for Var {
    fn from(s: String) -> Self {
        Var(s)
    }
}

impl Borrow<str> for Var {
    fn borrow(&self) -> &str {
        &self.0
    }
}

/// Sparse affine expression `sum(c_i * x_i) + constant`. Zero coefficients
/// are never stored.
#[derive(Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LinearForm {
    terms: BTreeMap<Var, Rational>,
    constant: Rational,
}

impl LinearForm {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational) -> Self {
        LinearForm { terms: BTreeMap::new(), constant: c }
    }

    pub fn var(v: impl Into<Var>) -> Self {
        Self::term(Rational::one(), v)
    }

    pub fn term(c: Rational, v: impl Into<Var>) -> Self {
        let mut f = Self::zero();
        f.add_term(c, v);
        f
    }

    pub fn from_terms<V: Into<Var>>(
        terms: impl IntoIterator<Item = (Rational, V)>,
        constant: Rational,
    ) -> Self {
        let mut f = Self::constant(constant);
        for (c, v) in terms {
            f.add_term(c, v);
        }
        f
    }

    pub fn add_term(&mut self, c: Rational, v: impl Into<Var>) {
        if c.is_zero() {
            return;
        }
        let v = v.into();
        let slot = self.terms.entry(v.clone()).or_default();
        *slot += &c;
        if slot.is_zero() {
            self.terms.remove(&v);
        }
    }

    pub fn add_constant(&mut self, c: &Rational) {
        self.constant += c;
    }

    pub fn coeff(&self, v: &str) -> Rational {
        self.terms.get(v).cloned().unwrap_or_default()
    }

    pub fn constant_term(&self) -> &Rational {
        &self.constant
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Var, &Rational)> {
        self.terms.iter()
    }

    pub fn vars(&self) -> impl Iterator<Item = &Var> {
        self.terms.keys()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, k: &Rational) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        LinearForm {
            terms: self.terms.iter().map(|(v, c)| (v.clone(), c * k)).collect(),
            constant: &self.constant * k,
        }
    }

    /// Replaces `v` by the affine expression `by`.
    pub fn substitute(&self, v: &str, by: &LinearForm) -> Self {
        let c = self.coeff(v);
        if c.is_zero() {
            return self.clone();
        }
        let mut rest = self.clone();
        rest.terms.remove(v);
        linform_combine(&rest, &Rational::one(), by, &c)
    }

    pub fn eval(&self, values: &BTreeMap<Var, Rational>) -> Result<Rational, NumericError> {
        let mut acc = self.constant.clone();
        for (v, c) in &self.terms {
            let x = values.get(v).ok_or_else(|| NumericError::UnknownVariable(v.clone()))?;
            acc += c * x;
        }
        Ok(acc)
    }

    pub fn eval_f64(&self, values: &BTreeMap<Var, f64>) -> Result<f64, NumericError> {
        let mut acc = self.constant.to_f64();
        for (v, c) in &self.terms {
            let x = values.get(v).ok_or_else(|| NumericError::UnknownVariable(v.clone()))?;
            acc += c.to_f64() * x;
        }
        Ok(acc)
    }
}

/// `alpha * a + beta * b`, with zero coefficients pruned.
pub fn linform_combine(a: &LinearForm, alpha: &Rational, b: &LinearForm, beta: &Rational) -> LinearForm {
    let mut out = a.scale(alpha);
    for (v, c) in &b.terms {
        out.add_term(c * beta, v.clone());
    }
    out.constant += &b.constant * beta;
    out
}

impl Add for LinearForm {
    type Output = LinearForm;
    fn add(self, rhs: LinearForm) -> LinearForm {
        linform_combine(&self, &Rational::one(), &rhs, &Rational::one())
    }
}

impl Sub for LinearForm {
    type Output = LinearForm;
    fn sub(self, rhs: LinearForm) -> LinearForm {
        linform_combine(&self, &Rational::one(), &rhs, &-Rational::one())
    }
}

impl Neg for LinearForm {
    type Output = LinearForm;
    fn neg(self) -> LinearForm {
        self.scale(&-Rational::one())
    }
}

impl Mul<&Rational> for LinearForm {
    type Output = LinearForm;
    fn mul(self, k: &Rational) -> LinearForm {
        self.scale(k)
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, c) in &self.terms {
            let (sign, mag) = if c.is_negative() { ("-", -c) } else { ("+", c.clone()) };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            if mag.is_one() {
                write!(f, "{v}")?;
            } else if mag.is_integer() {
                write!(f, "{} {v}", mag.numer())?;
            } else {
                write!(f, "{mag} {v}")?;
            }
            first = false;
        }
        if first {
            write!(f, "{}", fmt_short(&self.constant))?;
        } else if !self.constant.is_zero() {
            let sign = if self.constant.is_negative() { "-" } else { "+" };
            write!(f, " {sign} {}", fmt_short(&self.constant.abs()))?;
        }
        Ok(())
    }
}

impl fmt::Debug for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LinearForm({self})")
    }
}

pub(crate) fn fmt_short(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        r.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_int(n)
    }

    #[test]
    fn combine_example() {
        // (x + y) * 1 + (y - 1) * 2 = x + 3y - 2
        let a = LinearForm::var("x") + LinearForm::var("y");
        let b = LinearForm::from_terms([(q(1), "y")], q(-1));
        let c = linform_combine(&a, &q(1), &b, &q(2));
        assert_eq!(c, LinearForm::from_terms([(q(1), "x"), (q(3), "y")], q(-2)));
        assert_eq!(c.to_string(), "x + 3 y - 2");
    }

    #[test]
    fn cancellation_prunes_terms() {
        let a = LinearForm::var("x");
        let c = linform_combine(&a, &q(1), &a, &q(-1));
        assert!(c.is_empty());
        assert_eq!(c, LinearForm::zero());
    }

    #[test]
    fn substitute_and_eval() {
        let f = LinearForm::from_terms([(q(2), "x"), (q(1), "y")], q(1));
        let g = f.substitute("x", &LinearForm::from_terms([(q(1), "z")], q(3)));
        let vals: BTreeMap<Var, Rational> = [(Var::from("y"), q(1)), (Var::from("z"), q(2))].into();
        assert_eq!(g.eval(&vals).unwrap(), q(2 * 5 + 1 + 1));
        assert!(matches!(f.eval(&vals), Err(NumericError::UnknownVariable(_))));
    }

    #[test]
    fn period_parsing() {
        assert_eq!(Var::from("e[3]").period(), Some(3));
        assert_eq!(Var::from("p_g[g1,t=12]").period(), Some(12));
        assert_eq!(Var::from("c_bar").period(), None);
    }
}
