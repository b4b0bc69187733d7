use crate::poly::{Polynomial, UniPoly};
use crate::scalar::Scalar;

/// Quotient of two polynomials over a shared variable list. Only common
/// monomial factors are cancelled automatically.
#[derive(Clone, PartialEq)]
pub struct RationalFunction<C> {
    pub num: Polynomial<C>,
    pub den: Polynomial<C>,
}

impl<C: Scalar> std::fmt::Debug for RationalFunction<C> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}) / ({})", self.num, self.den)
    }
}

impl<C: Scalar> RationalFunction<C> {
    pub fn new(num: Polynomial<C>, den: Polynomial<C>) -> Self {
        let vars = union(num.vars(), den.vars());
        let mut r = RationalFunction { num: num.embed(&vars).unwrap(), den: den.embed(&vars).unwrap() };
        r.cancel_monomial();
        r
    }

    pub fn from_poly(p: Polynomial<C>) -> Self {
        let one = Polynomial::one(p.vars());
        RationalFunction { num: p, den: one }
    }

    pub fn vars(&self) -> &[String] {
        self.num.vars()
    }

    fn cancel_monomial(&mut self) {
        if self.num.is_zero() {
            self.den = Polynomial::one(self.num.vars());
            return;
        }
        let a = self.num.monomial_content();
        let b = self.den.monomial_content();
        let m: Vec<u32> = a.iter().zip(&b).map(|(x, y)| *x.min(y)).collect();
        if m.iter().any(|&k| k > 0) {
            self.num = self.num.div_monomial(&m);
            self.den = self.den.div_monomial(&m);
        }
        // keep a monic-ish denominator: fold a constant denominator into the numerator
        if let Some(c) = self.den.constant_value() {
            if c != C::one() {
                self.num = self.num.scale(&(C::one() / c));
                self.den = Polynomial::one(self.num.vars());
            }
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.den == o.den {
            return Self::new(&self.num + &o.num, self.den.clone());
        }
        Self::new(&(&self.num * &o.den) + &(&o.num * &self.den), &self.den * &o.den)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        RationalFunction { num: -&self.num, den: self.den.clone() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(&self.num * &o.num, &self.den * &o.den)
    }

    pub fn scale(&self, c: &C) -> Self {
        Self::new(self.num.scale(c), self.den.clone())
    }

    pub fn div(&self, o: &Self) -> Self {
        Self::new(&self.num * &o.den, &self.den * &o.num)
    }

    pub fn derivative(&self, i: usize) -> Self {
        let n = &(&self.num.derivative(i) * &self.den) - &(&self.num * &self.den.derivative(i));
        Self::new(n, &self.den * &self.den)
    }

    pub fn eval_var(&self, i: usize, v: &C) -> Self {
        Self::new(self.num.eval_var(i, v), self.den.eval_var(i, v))
    }

    pub fn eval_f64(&self, values: &[f64]) -> f64 {
        self.num.eval_f64(values) / self.den.eval_f64(values)
    }

    pub fn eval(&self, values: &[C]) -> C {
        self.num.eval(values) / self.den.eval(values)
    }

    pub fn embed(&self, vars: &[String]) -> Self {
        RationalFunction { num: self.num.embed(vars).unwrap(), den: self.den.embed(vars).unwrap() }
    }

    pub fn map_coeffs<D: Scalar>(&self, f: impl Fn(&C) -> D + Copy) -> RationalFunction<D> {
        RationalFunction { num: self.num.map_coeffs(f), den: self.den.map_coeffs(f) }
    }

    /// Univariate numerator and denominator in variable `i` (other variables must be absent).
    pub fn to_univariate(&self, i: usize) -> crate::error::Result<(UniPoly<C>, UniPoly<C>)> {
        Ok((self.num.to_univariate(i)?, self.den.to_univariate(i)?))
    }
}

impl RationalFunction<num_rational::BigRational> {
    /// Cancel the full polynomial gcd of numerator and denominator.
    pub fn reduced(&self) -> Self {
        let g = crate::poly::gcd(&self.num, &self.den);
        if g.is_constant() {
            return self.clone();
        }
        let num = self.num.div_exact(&g).expect("gcd divides numerator");
        let den = self.den.div_exact(&g).expect("gcd divides denominator");
        Self::new(num, den)
    }
}

fn union(a: &[String], b: &[String]) -> Vec<String> {
    let mut v = a.to_vec();
    for w in b {
        if !v.contains(w) {
            v.push(w.clone());
        }
    }
    v
}

/// Replace variable `i` of `p` by the rational function `r`, clearing
/// denominators by homogenisation.
pub fn substitute_rational<C: Scalar>(p: &Polynomial<C>, i: usize, r: &RationalFunction<C>) -> RationalFunction<C> {
    let vars = union(p.vars(), r.vars());
    let name = p.vars()[i].clone();
    let p = p.embed(&vars).unwrap();
    let i = vars.iter().position(|v| *v == name).unwrap();
    let r = r.embed(&vars);
    let coeffs = p.coeffs_in(i);
    if coeffs.is_empty() {
        return RationalFunction::from_poly(Polynomial::zero(&vars));
    }
    let m = coeffs.len() - 1;
    let mut num_pows = vec![Polynomial::one(&vars)];
    let mut den_pows = vec![Polynomial::one(&vars)];
    for k in 1..=m {
        num_pows.push(&num_pows[k - 1] * &r.num);
        den_pows.push(&den_pows[k - 1] * &r.den);
    }
    let mut num = Polynomial::zero(&vars);
    for (k, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        num = &num + &(&(c * &num_pows[k]) * &den_pows[m - k]);
    }
    RationalFunction::new(num, den_pows[m].clone())
}

/// Substitute rational functions for several variables of a polynomial.
pub fn substitute_all<C: Scalar>(p: &Polynomial<C>, subs: &[(usize, RationalFunction<C>)]) -> RationalFunction<C> {
    let mut acc = RationalFunction::from_poly(p.clone());
    for (i, r) in subs {
        let name = &p.vars()[*i];
        let num = substitute_rational(&acc.num, acc.num.var_index(name).unwrap(), r);
        let den = substitute_rational(&acc.den, acc.den.var_index(name).unwrap(), r);
        acc = num.div(&den);
    }
    acc
}
