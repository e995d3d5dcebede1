//! Sparse multivariate polynomials with exact coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::numeric::{format_rational, Rational};

/// Exact coefficient ring.
pub trait Coefficient: Clone + PartialEq + Signed + fmt::Debug {
    fn to_rational(&self) -> Rational;
    fn render(&self) -> String;
}

impl Coefficient for BigInt {
    fn to_rational(&self) -> Rational {
        Rational::from_integer(self.clone())
    }
    fn render(&self) -> String {
        self.to_string()
    }
}

impl Coefficient for Rational {
    fn to_rational(&self) -> Rational {
        self.clone()
    }
    fn render(&self) -> String {
        format_rational(self)
    }
}

/// Polynomial over named variables; terms map exponent vectors to nonzero
/// coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial<C> {
    vars: Vec<String>,
    terms: BTreeMap<Vec<u32>, C>,
}

pub type IntPolynomial = Polynomial<BigInt>;
pub type RatPolynomial = Polynomial<Rational>;

/// `x2, …, x{ell}`.
pub fn x_vars(ell: usize) -> Vec<String> {
    (2..=ell).map(|q| format!("x{q}")).collect()
}

impl<C: Coefficient> Polynomial<C> {
    pub fn zero(vars: Vec<String>) -> Self {
        Polynomial { vars, terms: BTreeMap::new() }
    }

    /// Repeated exponent vectors are summed; zero coefficients dropped.
    pub fn new<I>(vars: Vec<String>, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, C)>,
    {
        let mut seen = std::collections::BTreeSet::new();
        if let Some(dup) = vars.iter().find(|v| !seen.insert(v.as_str())) {
            return Err(Error::invalid("vars", format!("variable {dup:?} repeated")));
        }
        let mut p = Polynomial::zero(vars);
        for (exps, c) in terms {
            if exps.len() != p.vars.len() {
                return Err(Error::invalid(
                    "exps",
                    format!("exponent vector of length {} for {} variables", exps.len(), p.vars.len()),
                ));
            }
            p.add_term(exps, c);
        }
        Ok(p)
    }

    pub fn constant(vars: Vec<String>, c: C) -> Self {
        let n = vars.len();
        let mut p = Polynomial::zero(vars);
        p.add_term(vec![0; n], c);
        p
    }

    /// The variable with index `i`.
    pub fn var(vars: Vec<String>, i: usize) -> Self {
        let mut exps = vec![0; vars.len()];
        exps[i] = 1;
        let mut p = Polynomial::zero(vars);
        p.add_term(exps, C::one());
        p
    }

    pub fn add_term(&mut self, exps: Vec<u32>, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().clone() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn arity(&self) -> usize {
        self.vars.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &C)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; 0 for constants and the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    /// Largest exponent of variable `i`.
    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|e| e[i]).max().unwrap_or(0)
    }

    /// Σ |c|.
    pub fn coefficient_norm(&self) -> C {
        self.terms.values().fold(C::zero(), |acc, c| acc + c.abs())
    }

    fn check_same_vars(&self, other: &Self) -> Result<()> {
        if self.vars != other.vars {
            return Err(Error::invalid("vars", format!("variables {:?} and {:?} differ", self.vars, other.vars)));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_vars(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same_vars(other)?;
        let mut out = Polynomial::zero(self.vars.clone());
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca.clone() * cb.clone());
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Polynomial::zero(self.vars.clone());
        for (e, a) in &self.terms {
            out.add_term(e.clone(), a.clone() * c.clone());
        }
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Polynomial::constant(self.vars.clone(), C::one());
        for _ in 0..n {
            out = out.mul(self).expect("same variables");
        }
        out
    }

    /// Same terms over a longer variable list; variable `i` of `self` becomes
    /// variable `positions[i]`.
    pub fn embed(&self, vars: Vec<String>, positions: &[usize]) -> Result<Self> {
        if positions.len() != self.arity() || positions.iter().any(|&p| p >= vars.len()) {
            return Err(Error::invalid("vars", "embedding does not fit the target variables"));
        }
        let n = vars.len();
        let mut out = Polynomial::zero(vars);
        for (e, c) in &self.terms {
            let mut exps = vec![0; n];
            for (i, &p) in positions.iter().enumerate() {
                exps[p] += e[i];
            }
            out.add_term(exps, c.clone());
        }
        Ok(out)
    }

    pub fn to_rational(&self) -> RatPolynomial {
        Polynomial {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c.to_rational())).collect(),
        }
    }

    /// Exact value at a rational point.
    pub fn eval_rational(&self, point: &[Rational]) -> Rational {
        assert_eq!(point.len(), self.arity(), "point dimension");
        let mut total = Rational::zero();
        for (e, c) in &self.terms {
            let mut t = c.to_rational();
            for (x, &k) in point.iter().zip(e) {
                if k > 0 {
                    t *= num_traits::pow(x.clone(), k as usize);
                }
            }
            total += t;
        }
        total
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        assert_eq!(point.len(), self.arity(), "point dimension");
        self.terms
            .iter()
            .map(|(e, c)| {
                let c = crate::numeric::rational_to_f64(&c.to_rational());
                point.iter().zip(e).fold(c, |acc, (x, &k)| acc * x.powi(k as i32))
            })
            .collect::<crate::numeric::CompensatedSum>()
            .value()
    }
}

impl IntPolynomial {
    /// Parses a sum of terms such as `"2*x2^2 - x2*x3 + 1"` over `vars`.
    pub fn parse(text: &str, vars: Vec<String>) -> Result<Self> {
        let bad = |msg: String| Error::invalid("polynomial", format!("{msg} in {text:?}"));
        let mut p = Polynomial::zero(vars);
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(bad("empty input".into()));
        }
        let mut chunks = Vec::new();
        let mut start = 0;
        for (i, ch) in compact.char_indices() {
            if (ch == '+' || ch == '-') && i > 0 && !compact[..i].ends_with('^') {
                chunks.push(&compact[start..i]);
                start = i;
            }
        }
        chunks.push(&compact[start..]);
        for chunk in chunks {
            let (sign, body) = match chunk.as_bytes().first() {
                Some(b'-') => (-1, &chunk[1..]),
                Some(b'+') => (1, &chunk[1..]),
                _ => (1, chunk),
            };
            if body.is_empty() {
                return Err(bad("dangling sign".into()));
            }
            let mut coeff = BigInt::from(sign);
            let mut exps = vec![0u32; p.arity()];
            for factor in body.split('*') {
                if factor.is_empty() {
                    return Err(bad("empty factor".into()));
                }
                if factor.chars().all(|c| c.is_ascii_digit()) {
                    coeff *= factor.parse::<BigInt>().map_err(|e| bad(e.to_string()))?;
                    continue;
                }
                let (name, power) = match factor.split_once('^') {
                    Some((n, k)) => (n, k.parse::<u32>().map_err(|_| bad(format!("bad exponent {k:?}")))?),
                    None => (factor, 1),
                };
                let idx =
                    p.vars.iter().position(|v| v == name).ok_or_else(|| bad(format!("unknown variable {name:?}")))?;
                exps[idx] += power;
            }
            p.add_term(exps, coeff);
        }
        Ok(p)
    }
}

impl<C: Coefficient> fmt::Display for Polynomial<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // Highest total degree first, then descending exponent vectors.
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|(a, _), (b, _)| {
            let (da, db): (u32, u32) = (a.iter().sum(), b.iter().sum());
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        for (i, (e, c)) in terms.into_iter().enumerate() {
            let negative = c.is_negative();
            let mag = c.abs();
            match (i, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let factors: Vec<String> = e
                .iter()
                .zip(&self.vars)
                .filter(|(&k, _)| k > 0)
                .map(|(&k, v)| if k == 1 { v.clone() } else { format!("{v}^{k}") })
                .collect();
            if factors.is_empty() {
                write!(f, "{}", mag.render())?;
            } else if mag.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{}*{}", mag.render(), factors.join("*"))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{int, rational};

    fn xs(n: usize) -> Vec<String> {
        x_vars(n + 1)
    }

    #[test]
    fn parse_and_display() {
        let p = IntPolynomial::parse("2*x2^2 - x2*x3 + 1 - 3", xs(2)).unwrap();
        assert_eq!(p.to_string(), "2*x2^2 - x2*x3 - 2");
        assert_eq!(p.degree(), 2);
        assert_eq!(p.degree_in(1), 1);
        assert_eq!(p.coefficient_norm(), BigInt::from(5));
        assert!(IntPolynomial::parse("x4", xs(2)).is_err());
        assert!(IntPolynomial::parse("2*", xs(2)).is_err());
        assert!(IntPolynomial::parse("", xs(2)).is_err());
    }

    #[test]
    fn arithmetic() {
        let v = xs(1);
        let a = IntPolynomial::parse("x2 - 1", v.clone()).unwrap();
        let sq = a.pow(2);
        assert_eq!(sq, IntPolynomial::parse("x2^2 - 2*x2 + 1", v.clone()).unwrap());
        assert!(a.add(&a.scale(&BigInt::from(-1))).unwrap().is_zero());
        let b = IntPolynomial::parse("x3", xs(2)).unwrap();
        assert!(a.add(&b).is_err());
    }

    #[test]
    fn evaluation() {
        let p = IntPolynomial::parse("x2*x3 - x2^2*x3^2", xs(2)).unwrap();
        let v = p.eval_rational(&[rational(1, 2), rational(1, 3)]);
        assert_eq!(v, rational(1, 6) - rational(1, 36));
        assert!((p.eval_f64(&[0.5, 1.0 / 3.0]) - (1.0 / 6.0 - 1.0 / 36.0)).abs() < 1e-15);
        assert_eq!(p.to_rational().eval_rational(&[int(1), int(1)]), int(0));
    }

    #[test]
    fn embedding() {
        let p = IntPolynomial::parse("x2^2 + 3", xs(1)).unwrap();
        let q = p.embed(vec!["x2".into(), "x3".into(), "y2".into()], &[0]).unwrap();
        assert_eq!(q.to_string(), "x2^2 + 3");
        assert_eq!(q.arity(), 3);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(IntPolynomial::new(xs(2), [(vec![1], BigInt::from(1))]).is_err());
        assert!(IntPolynomial::new(vec!["a".into(), "a".into()], []).is_err());
    }
}
