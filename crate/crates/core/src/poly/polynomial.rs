use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::poly::univariate::UniPoly;
use crate::scalar::Scalar;

/// Sparse multivariate polynomial over `C`.
///
/// Exponent tuples are kept in a `BTreeMap`, so iteration runs in
/// lexicographic order with the first variable most significant and the
/// last entry is the lex-leading term.
#[derive(Clone, PartialEq)]
pub struct Polynomial<C> {
    vars: Vec<String>,
    terms: BTreeMap<Vec<u32>, C>,
}

impl<C: Scalar> Polynomial<C> {
    pub fn zero(vars: &[String]) -> Self {
        Polynomial { vars: vars.to_vec(), terms: BTreeMap::new() }
    }

    pub fn with_vars(vars: &[&str]) -> Self {
        Polynomial { vars: vars.iter().map(|s| s.to_string()).collect(), terms: BTreeMap::new() }
    }

    pub fn constant(vars: &[String], c: C) -> Self {
        let mut p = Self::zero(vars);
        p.add_term(vec![0; vars.len()], c);
        p
    }

    pub fn one(vars: &[String]) -> Self {
        Self::constant(vars, C::one())
    }

    /// The polynomial consisting of variable `i`.
    pub fn var(vars: &[String], i: usize) -> Self {
        let mut e = vec![0; vars.len()];
        e[i] = 1;
        Self::monomial(vars, e, C::one())
    }

    pub fn var_named(vars: &[String], name: &str) -> Result<Self> {
        let i = vars
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown variable {name}")))?;
        Ok(Self::var(vars, i))
    }

    pub fn monomial(vars: &[String], exps: Vec<u32>, c: C) -> Self {
        let mut p = Self::zero(vars);
        p.add_term(exps, c);
        p
    }

    pub fn from_terms(vars: &[String], terms: impl IntoIterator<Item = (Vec<u32>, C)>) -> Self {
        let mut p = Self::zero(vars);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, C> {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&k| k == 0))
    }

    /// Value of a constant polynomial (zero for the zero polynomial).
    pub fn constant_value(&self) -> Option<C> {
        if self.is_zero() {
            return Some(C::zero());
        }
        if self.is_constant() {
            self.terms.values().next().cloned()
        } else {
            None
        }
    }

    pub fn add_term(&mut self, exps: Vec<u32>, c: C) {
        debug_assert_eq!(exps.len(), self.vars.len());
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&exps) {
            Some(v) => {
                C::add_to(v, c);
                if v.is_zero() {
                    self.terms.remove(&exps);
                }
            }
            None => {
                self.terms.insert(exps, c);
            }
        }
    }

    pub fn degree(&self, i: usize) -> u32 {
        self.terms.keys().map(|e| e[i]).max().unwrap_or(0)
    }

    pub fn degree_in(&self, name: &str) -> u32 {
        self.var_index(name).map(|i| self.degree(i)).unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn involves(&self, i: usize) -> bool {
        self.terms.keys().any(|e| e[i] > 0)
    }

    pub fn leading_term(&self) -> Option<(&Vec<u32>, &C)> {
        self.terms.iter().next_back()
    }

    /// Re-express over `vars`, which must contain every variable used here.
    pub fn embed(&self, vars: &[String]) -> Result<Self> {
        if vars == self.vars.as_slice() {
            return Ok(self.clone());
        }
        let mut map = Vec::with_capacity(self.vars.len());
        for (i, v) in self.vars.iter().enumerate() {
            match vars.iter().position(|w| w == v) {
                Some(j) => map.push(Some(j)),
                None if !self.involves(i) => map.push(None),
                None => return Err(Error::InvalidArgument(format!("variable {v} missing from target list"))),
            }
        }
        let mut out = Self::zero(vars);
        for (e, c) in &self.terms {
            let mut ne = vec![0; vars.len()];
            for (i, &k) in e.iter().enumerate() {
                if let Some(j) = map[i] {
                    ne[j] += k;
                }
            }
            out.add_term(ne, c.clone());
        }
        Ok(out)
    }

    fn union_vars(&self, other: &Self) -> Vec<String> {
        let mut v = self.vars.clone();
        for w in &other.vars {
            if !v.contains(w) {
                v.push(w.clone());
            }
        }
        v
    }

    fn aligned<'a>(&'a self, other: &'a Self) -> (std::borrow::Cow<'a, Self>, std::borrow::Cow<'a, Self>) {
        use std::borrow::Cow;
        if self.vars == other.vars {
            (Cow::Borrowed(self), Cow::Borrowed(other))
        } else {
            let u = self.union_vars(other);
            (Cow::Owned(self.embed(&u).unwrap()), Cow::Owned(other.embed(&u).unwrap()))
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero(&self.vars);
        }
        let mut out = Self::zero(&self.vars);
        for (e, v) in &self.terms {
            out.add_term(e.clone(), v.mul_ref(c));
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut result = Self::one(&self.vars);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn derivative(&self, i: usize) -> Self {
        let mut out = Self::zero(&self.vars);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut ne = e.clone();
            ne[i] -= 1;
            out.add_term(ne, c.clone() * C::from_i64(e[i] as i64));
        }
        out
    }

    pub fn nth_derivative(&self, i: usize, n: u32) -> Self {
        (0..n).fold(self.clone(), |p, _| p.derivative(i))
    }

    /// Substitute a value for variable `i`; the variable list is unchanged.
    pub fn eval_var(&self, i: usize, v: &C) -> Self {
        let mut out = Self::zero(&self.vars);
        let deg = self.degree(i) as usize;
        let mut powers = vec![C::one()];
        for k in 1..=deg {
            powers.push(powers[k - 1].clone() * v.clone());
        }
        for (e, c) in &self.terms {
            let mut ne = e.clone();
            let k = ne[i] as usize;
            ne[i] = 0;
            out.add_term(ne, c.clone() * powers[k].clone());
        }
        out
    }

    /// Substitute values for several variables at once.
    pub fn eval_vars(&self, assignments: &[(usize, C)]) -> Self {
        let mut p = self.clone();
        for (i, v) in assignments {
            p = p.eval_var(*i, v);
        }
        p
    }

    /// Evaluate with a value for every variable.
    pub fn eval(&self, values: &[C]) -> C {
        assert_eq!(values.len(), self.vars.len(), "value count must match variable count");
        let mut acc = C::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (k, &p) in e.iter().enumerate() {
                for _ in 0..p {
                    t = t * values[k].clone();
                }
            }
            acc = acc + t;
        }
        acc
    }

    /// Evaluate after mapping coefficients through `f64`; used by sampling code.
    pub fn eval_f64(&self, values: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (e, c) in &self.terms {
            let mut t = c.to_f64();
            for (k, &p) in e.iter().enumerate() {
                if p > 0 {
                    t *= values[k].powi(p as i32);
                }
            }
            acc += t;
        }
        acc
    }

    /// Composition: replace variable `i` by `q` (over the union of variables).
    pub fn substitute(&self, i: usize, q: &Self) -> Self {
        let q = q.embed(&self.union_vars(q)).unwrap();
        let me = self.embed(q.vars()).unwrap();
        let coeffs = me.coeffs_in(i);
        // Horner in q
        let mut acc = Self::zero(q.vars());
        for c in coeffs.iter().rev() {
            acc = &(&acc * &q) + c;
        }
        acc
    }

    /// Coefficients with respect to variable `i`, lowest degree first. Each
    /// coefficient keeps the full variable list with exponent 0 in `i`.
    pub fn coeffs_in(&self, i: usize) -> Vec<Self> {
        let deg = self.degree(i) as usize;
        let mut out = vec![Self::zero(&self.vars); deg + 1];
        for (e, c) in &self.terms {
            let k = e[i] as usize;
            let mut ne = e.clone();
            ne[i] = 0;
            out[k].add_term(ne, c.clone());
        }
        if self.is_zero() {
            out.clear();
        }
        out
    }

    pub fn from_coeffs_in(vars: &[String], i: usize, coeffs: &[Self]) -> Self {
        let mut out = Self::zero(vars);
        for (k, c) in coeffs.iter().enumerate() {
            let c = c.embed(vars).unwrap();
            for (e, v) in c.terms {
                let mut ne = e;
                ne[i] += k as u32;
                out.add_term(ne, v);
            }
        }
        out
    }

    pub fn leading_coeff_in(&self, i: usize) -> Self {
        self.coeffs_in(i).pop().unwrap_or_else(|| Self::zero(&self.vars))
    }

    pub fn map_coeffs<D: Scalar>(&self, f: impl Fn(&C) -> D) -> Polynomial<D> {
        let mut out = Polynomial::<D>::zero(&self.vars);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), f(c));
        }
        out
    }

    pub fn to_f64_poly(&self) -> Polynomial<f64> {
        self.map_coeffs(|c| c.to_f64())
    }

    /// Dense univariate view in variable `i`; fails if another variable occurs.
    pub fn to_univariate(&self, i: usize) -> Result<UniPoly<C>> {
        let mut coeffs = vec![C::zero(); self.degree(i) as usize + 1];
        for (e, c) in &self.terms {
            if e.iter().enumerate().any(|(k, &p)| k != i && p > 0) {
                return Err(Error::InvalidArgument(format!(
                    "polynomial is not univariate in {}",
                    self.vars[i]
                )));
            }
            coeffs[e[i] as usize] = c.clone();
        }
        Ok(UniPoly::new(coeffs))
    }

    pub fn from_univariate(vars: &[String], i: usize, u: &UniPoly<C>) -> Self {
        let mut out = Self::zero(vars);
        for (k, c) in u.coeffs().iter().enumerate() {
            let mut e = vec![0; vars.len()];
            e[i] = k as u32;
            out.add_term(e, c.clone());
        }
        out
    }

    /// Multivariate division in lex order. For exact coefficient types the
    /// remainder must vanish; float types return the quotient regardless.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        if d.is_zero() {
            return None;
        }
        let (a, d) = self.aligned(d);
        let (de, dc) = d.leading_term().map(|(e, c)| (e.clone(), c.clone()))?;
        if let Some(c) = d.constant_value() {
            return Some(a.scale(&(C::one() / c)));
        }
        let mut rem = a.into_owned();
        let mut quo = Self::zero(&rem.vars);
        while let Some((re, rc)) = rem.leading_term().map(|(e, c)| (e.clone(), c.clone())) {
            if re.iter().zip(&de).any(|(r, d)| r < d) {
                if C::is_exact() {
                    return None;
                }
                break;
            }
            let qe: Vec<u32> = re.iter().zip(&de).map(|(r, d)| r - d).collect();
            let qc = rc.exact_div(&dc);
            quo.add_term(qe.clone(), qc.clone());
            let step = Self::monomial(&rem.vars, qe, qc);
            let sub = &step * d.as_ref();
            rem = &rem - &sub;
            if !C::is_exact() {
                // guard against cancellation leaving the same leading monomial
                if let Some((ne, _)) = rem.leading_term() {
                    if *ne == re {
                        rem.terms.remove(&re);
                    }
                }
            }
        }
        Some(quo)
    }

    /// Drop variables that do not occur, keeping the order of the rest.
    pub fn compact_vars(&self) -> Self {
        let keep: Vec<String> =
            (0..self.nvars()).filter(|&i| self.involves(i)).map(|i| self.vars[i].clone()).collect();
        self.embed(&keep).unwrap()
    }

    /// Largest monomial dividing every term.
    pub fn monomial_content(&self) -> Vec<u32> {
        let mut m: Option<Vec<u32>> = None;
        for e in self.terms.keys() {
            m = Some(match m {
                None => e.clone(),
                Some(m) => m.iter().zip(e).map(|(a, b)| *a.min(b)).collect(),
            });
        }
        m.unwrap_or_else(|| vec![0; self.nvars()])
    }

    pub fn div_monomial(&self, m: &[u32]) -> Self {
        let mut out = Self::zero(&self.vars);
        for (e, c) in &self.terms {
            out.add_term(e.iter().zip(m).map(|(a, b)| a - b).collect(), c.clone());
        }
        out
    }
}

impl<C: Scalar> fmt::Debug for Polynomial<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial[{}]({})", self.vars.join(","), self)
    }
}

impl<C: Scalar> fmt::Display for Polynomial<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            let s = c.to_string();
            let (neg, mag) = match s.strip_prefix('-') {
                Some(rest) => (true, rest.to_string()),
                None => (false, s),
            };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let mut factors = Vec::new();
            let is_unit = mag == "1";
            let monomial: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| if k == 1 { self.vars[i].clone() } else { format!("{}^{}", self.vars[i], k) })
                .collect();
            if !is_unit || monomial.is_empty() {
                factors.push(mag);
            }
            factors.extend(monomial);
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

impl<'a, C: Scalar> Add<&'a Polynomial<C>> for &'a Polynomial<C> {
    type Output = Polynomial<C>;
    fn add(self, rhs: &Polynomial<C>) -> Polynomial<C> {
        let (a, b) = self.aligned(rhs);
        let mut out = a.into_owned();
        for (e, c) in &b.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl<'a, C: Scalar> Sub<&'a Polynomial<C>> for &'a Polynomial<C> {
    type Output = Polynomial<C>;
    fn sub(self, rhs: &Polynomial<C>) -> Polynomial<C> {
        let (a, b) = self.aligned(rhs);
        let mut out = a.into_owned();
        for (e, c) in &b.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }
}

impl<'a, C: Scalar> Mul<&'a Polynomial<C>> for &'a Polynomial<C> {
    type Output = Polynomial<C>;
    fn mul(self, rhs: &Polynomial<C>) -> Polynomial<C> {
        let (a, b) = self.aligned(rhs);
        let mut acc: BTreeMap<Vec<u32>, C> = BTreeMap::new();
        for (ea, ca) in &a.terms {
            for (eb, cb) in &b.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                let c = ca.mul_ref(cb);
                match acc.get_mut(&e) {
                    Some(v) => C::add_to(v, c),
                    None => {
                        acc.insert(e, c);
                    }
                }
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Polynomial { vars: a.vars.clone(), terms: acc }
    }
}

impl<C: Scalar> Neg for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn neg(self) -> Polynomial<C> {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -c.clone();
        }
        out
    }
}

macro_rules! owned_ops {
    ($tr:ident, $m:ident) => {
        impl<C: Scalar> $tr<Polynomial<C>> for Polynomial<C> {
            type Output = Polynomial<C>;
            fn $m(self, rhs: Polynomial<C>) -> Polynomial<C> {
                (&self).$m(&rhs)
            }
        }
        impl<'a, C: Scalar> $tr<&'a Polynomial<C>> for Polynomial<C> {
            type Output = Polynomial<C>;
            fn $m(self, rhs: &Polynomial<C>) -> Polynomial<C> {
                (&self).$m(rhs)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

impl<C: Scalar> Neg for Polynomial<C> {
    type Output = Polynomial<C>;
    fn neg(self) -> Polynomial<C> {
        -&self
    }
}

pub fn var_names(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use num_rational::BigRational;

    fn xy() -> Vec<String> {
        var_names(&["x", "y"])
    }

    #[test]
    fn arithmetic_and_division() {
        let v = xy();
        let x = Polynomial::<BigRational>::var(&v, 0);
        let y = Polynomial::<BigRational>::var(&v, 1);
        let p = &(&x * &x) - &y;
        let q = &x + &y;
        let prod = &p * &q;
        assert_eq!(prod.div_exact(&q).unwrap(), p);
        assert!(prod.div_exact(&(&x + &Polynomial::one(&v))).is_none());
    }

    #[test]
    fn substitute_and_eval() {
        let v = xy();
        let x = Polynomial::<BigRational>::var(&v, 0);
        let y = Polynomial::<BigRational>::var(&v, 1);
        let p = &(&x * &x) + &y;
        let q = p.substitute(0, &(&y + &Polynomial::constant(&v, rat(1, 2))));
        // (y+1/2)^2 + y at y=1 → 9/4 + 1
        assert_eq!(q.eval(&[rat(0, 1), rat(1, 1)]), rat(13, 4));
        assert_eq!(p.derivative(0), x.scale(&rat(2, 1)));
    }
}
