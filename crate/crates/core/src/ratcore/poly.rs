use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use super::{RatError, Rational};

/// Dense-by-monomial multivariate polynomial with rational coefficients.
///
/// `vars` is kept sorted; each key of `terms` holds one exponent per variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    vars: Vec<String>,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { vars: Vec::new(), terms: BTreeMap::new() }
    }

    pub fn constant(c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Vec::new(), c);
        }
        Poly { vars: Vec::new(), terms }
    }

    pub fn var(name: &str) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![1], Rational::one());
        Poly { vars: vec![name.to_string()], terms }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// The value if the polynomial has no non-constant terms.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                e.iter().all(|&x| x == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn degree_in(&self, name: &str) -> u32 {
        match self.vars.iter().position(|v| v == name) {
            Some(i) => self.terms.keys().map(|e| e[i]).max().unwrap_or(0),
            None => 0,
        }
    }

    fn with_vars(&self, vars: &[String]) -> Poly {
        if vars == self.vars.as_slice() {
            return self.clone();
        }
        let map: Vec<usize> = self.vars.iter().map(|v| vars.iter().position(|w| w == v).unwrap()).collect();
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut ne = vec![0; vars.len()];
                for (i, &x) in e.iter().enumerate() {
                    ne[map[i]] = x;
                }
                (ne, c.clone())
            })
            .collect();
        Poly { vars: vars.to_vec(), terms }
    }

    fn union_vars(a: &[String], b: &[String]) -> Vec<String> {
        let mut v: Vec<String> = a.iter().chain(b).cloned().collect();
        v.sort();
        v.dedup();
        v
    }

    fn aligned(&self, o: &Poly) -> (Poly, Poly) {
        let vars = Self::union_vars(&self.vars, &o.vars);
        (self.with_vars(&vars), o.with_vars(&vars))
    }

    /// Re-expresses the polynomial over `vars`, which must contain every variable in use.
    pub fn extend_vars(&self, extra: &[String]) -> Poly {
        self.with_vars(&Self::union_vars(&self.vars, extra))
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let (mut a, b) = self.aligned(o);
        for (e, c) in b.terms {
            let slot = a.terms.entry(e.clone()).or_insert_with(Rational::zero);
            *slot += c;
            if slot.is_zero() {
                a.terms.remove(&e);
            }
        }
        a
    }

    pub fn neg(&self) -> Poly {
        Poly { vars: self.vars.clone(), terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect() }
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.neg())
    }

    pub fn scale(&self, k: &Rational) -> Poly {
        if k.is_zero() {
            return Poly { vars: self.vars.clone(), terms: BTreeMap::new() };
        }
        Poly { vars: self.vars.clone(), terms: self.terms.iter().map(|(e, c)| (e.clone(), c * k)).collect() }
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        let (a, b) = self.aligned(o);
        let mut terms: BTreeMap<Vec<u32>, Rational> = BTreeMap::new();
        for (ea, ca) in &a.terms {
            for (eb, cb) in &b.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                *terms.entry(e).or_insert_with(Rational::zero) += ca * cb;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Poly { vars: a.vars, terms }
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut acc = Poly::constant(Rational::one()).with_vars(&self.vars);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Coefficients in `name`, lowest power first; each coefficient lives in the other variables.
    pub fn coeffs_in(&self, name: &str) -> Vec<Poly> {
        let Some(i) = self.vars.iter().position(|v| v == name) else {
            return vec![self.clone()];
        };
        let rest: Vec<String> = self.vars.iter().filter(|v| *v != name).cloned().collect();
        let deg = self.degree_in(name) as usize;
        let mut out = vec![Poly { vars: rest.clone(), terms: BTreeMap::new() }; deg + 1];
        for (e, c) in &self.terms {
            let mut ne = e.clone();
            let p = ne.remove(i) as usize;
            out[p].terms.insert(ne, c.clone());
        }
        out
    }

    fn from_coeffs_in(name: &str, coeffs: &[Poly]) -> Poly {
        let x = Poly::var(name);
        let mut acc = Poly::zero();
        for c in coeffs.iter().rev() {
            acc = acc.mul(&x).add(c);
        }
        acc
    }

    /// Substitutes `name = value`, removing the variable.
    pub fn substitute(&self, name: &str, value: &Rational) -> Poly {
        let Some(i) = self.vars.iter().position(|v| v == name) else {
            return self.clone();
        };
        let mut vars = self.vars.clone();
        vars.remove(i);
        let mut terms: BTreeMap<Vec<u32>, Rational> = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut ne = e.clone();
            let p = ne.remove(i);
            let v = c * num_traits::pow(value.clone(), p as usize);
            *terms.entry(ne).or_insert_with(Rational::zero) += v;
        }
        terms.retain(|_, c| !c.is_zero());
        Poly { vars, terms }
    }

    /// Exact quotient by `(name - c)`. The caller guarantees divisibility.
    pub fn div_linear(&self, name: &str, c: &Rational) -> Poly {
        let coeffs = self.coeffs_in(name);
        if coeffs.len() <= 1 {
            return Poly::zero();
        }
        let d = coeffs.len() - 1;
        let mut q = vec![Poly::zero(); d];
        q[d - 1] = coeffs[d].clone();
        for k in (1..d).rev() {
            q[k - 1] = coeffs[k].add(&q[k].scale(c));
        }
        debug_assert!(coeffs[0].add(&q[0].scale(c)).is_zero(), "div_linear: non-zero remainder");
        Poly::from_coeffs_in(name, &q)
    }

    /// Leading coefficient in the term order used for normalization.
    fn leading(&self) -> Option<&Rational> {
        self.terms.iter().next_back().map(|(_, c)| c)
    }

    /// Univariate remainder of `self` by `o` in `name`; both must be univariate in `name`.
    fn uni_rem(&self, o: &Poly, name: &str) -> Poly {
        let mut r = self.coeffs_in(name).into_iter().map(|p| p.as_constant().unwrap()).collect::<Vec<_>>();
        let d = o.coeffs_in(name).into_iter().map(|p| p.as_constant().unwrap()).collect::<Vec<_>>();
        let dl = d.last().unwrap().clone();
        while r.len() >= d.len() && !r.is_empty() {
            let f = r.last().unwrap() / &dl;
            let shift = r.len() - d.len();
            for (i, di) in d.iter().enumerate() {
                r[shift + i] -= &f * di;
            }
            r.pop();
            while r.last().is_some_and(|x| x.is_zero()) {
                r.pop();
            }
        }
        let coeffs: Vec<Poly> = r.into_iter().map(Poly::constant).collect();
        Poly::from_coeffs_in(name, &coeffs)
    }

    /// Monic gcd of two univariate polynomials in `name`.
    pub fn uni_gcd(&self, o: &Poly, name: &str) -> Poly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.uni_rem(&b, name);
            a = b;
            b = r;
        }
        match a.leading().cloned() {
            Some(l) => a.scale(&l.recip()),
            None => a,
        }
    }

    /// Exact univariate quotient; the divisor must divide `self`.
    pub fn uni_div(&self, o: &Poly, name: &str) -> Poly {
        let mut r = self.coeffs_in(name).into_iter().map(|p| p.as_constant().unwrap()).collect::<Vec<_>>();
        let d = o.coeffs_in(name).into_iter().map(|p| p.as_constant().unwrap()).collect::<Vec<_>>();
        if r.len() < d.len() {
            return Poly::zero();
        }
        let dl = d.last().unwrap().clone();
        let mut q = vec![Rational::zero(); r.len() - d.len() + 1];
        while r.len() >= d.len() {
            let f = r.last().unwrap() / &dl;
            let shift = r.len() - d.len();
            for (i, di) in d.iter().enumerate() {
                r[shift + i] -= &f * di;
            }
            q[shift] = f;
            r.pop();
        }
        let coeffs: Vec<Poly> = q.into_iter().map(Poly::constant).collect();
        Poly::from_coeffs_in(name, &coeffs)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            for (v, &p) in self.vars.iter().zip(e) {
                match p {
                    0 => {}
                    1 => write!(f, "*{v}")?,
                    _ => write!(f, "*{v}^{p}")?,
                }
            }
        }
        Ok(())
    }
}

/// Quotient of two polynomials over the same set of indeterminates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyFraction {
    pub num: Poly,
    pub den: Poly,
}

impl PolyFraction {
    pub fn new(num: Poly, den: Poly) -> Self {
        let (num, den) = num.aligned(&den);
        PolyFraction { num, den }
    }

    pub fn from_poly(p: Poly) -> Self {
        let one = Poly::constant(Rational::one());
        Self::new(p, one)
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn var(name: &str) -> Self {
        Self::from_poly(Poly::var(name))
    }

    pub fn vars(&self) -> &[String] {
        self.num.vars()
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.den == o.den {
            return Self::new(self.num.add(&o.num), self.den.clone());
        }
        Self::new(self.num.mul(&o.den).add(&o.num.mul(&self.den)), self.den.mul(&o.den))
    }

    pub fn neg(&self) -> Self {
        Self::new(self.num.neg(), self.den.clone())
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(self.num.mul(&o.num), self.den.mul(&o.den))
    }

    pub fn div(&self, o: &Self) -> Self {
        Self::new(self.num.mul(&o.den), self.den.mul(&o.num))
    }

    pub fn pow(&self, k: i32) -> Self {
        let p = Self::new(self.num.pow(k.unsigned_abs()), self.den.pow(k.unsigned_abs()));
        if k >= 0 {
            p
        } else {
            Self::new(p.den, p.num)
        }
    }

    /// Cancels common factors when the fraction is univariate, and scales the
    /// denominator's leading coefficient to one.
    pub fn reduce(&self) -> Self {
        let mut num = self.num.clone();
        let mut den = self.den.clone();
        if self.vars().len() == 1 && !den.is_zero() {
            let v = self.vars()[0].clone();
            let g = num.uni_gcd(&den, &v);
            if g.total_degree().unwrap_or(0) > 0 {
                num = num.uni_div(&g, &v);
                den = den.uni_div(&g, &v);
            }
        }
        if let Some(l) = den.leading().cloned() {
            let s = l.recip();
            num = num.scale(&s);
            den = den.scale(&s);
        }
        Self::new(num, den)
    }

    /// Substitutes one variable, first dividing out any common `(name - value)` factors.
    pub fn substitute(&self, name: &str, value: &Rational) -> Result<Self, RatError> {
        let mut num = self.num.clone();
        let mut den = self.den.clone();
        if den.is_zero() {
            return Err(RatError::TruePole("denominator is identically zero".into()));
        }
        loop {
            let d = den.substitute(name, value);
            if !d.is_zero() {
                let n = num.substitute(name, value);
                return Ok(Self::new(n, d));
            }
            if !num.substitute(name, value).is_zero() {
                return Err(RatError::TruePole(format!("{name} = {value}")));
            }
            num = num.div_linear(name, value);
            den = den.div_linear(name, value);
        }
    }
}

impl fmt::Display for PolyFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] / [{}]", self.num, self.den)
    }
}

/// Evaluates `f` by substituting the bindings in order, cancelling removable
/// singularities along the way.
pub fn polyfrac_eval(f: &PolyFraction, bindings: &[(&str, Rational)]) -> Result<Rational, RatError> {
    for v in f.vars() {
        if !bindings.iter().any(|(n, _)| n == v) {
            return Err(RatError::Unbound(v.clone()));
        }
    }
    let mut cur = f.clone();
    for (name, value) in bindings {
        cur = cur.substitute(name, value)?;
        if cur.vars().len() == 1 {
            cur = cur.reduce();
        }
    }
    let n = cur.num.as_constant().expect("all variables bound");
    let d = cur.den.as_constant().expect("all variables bound");
    Ok(n / d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratcore::{int, parse_polyfrac, rat};

    #[test]
    fn arithmetic_and_substitution() {
        let m = Poly::var("m");
        let n = Poly::var("n");
        let p = m.add(&n).pow(2);
        assert_eq!(p.num_terms(), 3);
        assert_eq!(p.substitute("m", &int(1)).substitute("n", &int(2)).as_constant(), Some(int(9)));
        assert_eq!(p.degree_in("n"), 2);
    }

    #[test]
    fn removable_singularity() {
        let f = parse_polyfrac("(m^2-4)/(m-2)").unwrap();
        assert_eq!(polyfrac_eval(&f, &[("m", int(2))]).unwrap(), int(4));
        let g = parse_polyfrac("1/(m-2)").unwrap();
        assert!(matches!(polyfrac_eval(&g, &[("m", int(2))]), Err(RatError::TruePole(_))));
    }

    #[test]
    fn multivariate_cancellation_both_orders() {
        let f = parse_polyfrac("(m^2-n^2)/(m-n)").unwrap();
        assert_eq!(polyfrac_eval(&f, &[("m", int(3)), ("n", int(3))]).unwrap(), int(6));
        assert_eq!(polyfrac_eval(&f, &[("n", int(3)), ("m", int(3))]).unwrap(), int(6));
    }

    #[test]
    fn reduce_cancels_univariate_gcd() {
        let f = parse_polyfrac("(x^2-1)/(2*x^2+2*x)").unwrap().reduce();
        assert_eq!(f, parse_polyfrac("(x-1)/(2*x)").unwrap().reduce());
        assert_eq!(f.den.degree_in("x"), 1);
    }

    #[test]
    fn unbound_variable() {
        let f = parse_polyfrac("m*alpha").unwrap();
        assert!(matches!(polyfrac_eval(&f, &[("m", rat(1, 2))]), Err(RatError::Unbound(_))));
    }
}
