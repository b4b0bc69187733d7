//! Multivariate gcd (recursive primitive PRS) and square-free decomposition
//! over the rationals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::poly::Polynomial;

type QPoly = Polynomial<BigRational>;

/// Scale so coefficients are coprime integers with a positive lex-leading coefficient.
pub fn normalize(p: &QPoly) -> QPoly {
    if p.is_zero() {
        return p.clone();
    }
    let mut lcm = BigInt::one();
    let mut g = BigInt::zero();
    for c in p.terms().values() {
        lcm = lcm.lcm(c.denom());
    }
    for c in p.terms().values() {
        let n = (c * BigRational::from_integer(lcm.clone())).to_integer();
        g = g.gcd(&n);
    }
    let mut s = BigRational::new(lcm, g);
    if p.leading_term().unwrap().1.is_negative() {
        s = -s;
    }
    p.scale(&s)
}

/// Content with respect to variable `i`: gcd of the coefficients in `i`.
pub fn content_in(p: &QPoly, i: usize) -> QPoly {
    let mut g = Polynomial::zero(p.vars());
    for c in p.coeffs_in(i) {
        if c.is_zero() {
            continue;
        }
        g = gcd(&g, &c);
        if g.is_constant() {
            return Polynomial::one(p.vars());
        }
    }
    g
}

/// Pseudo-remainder lc(b)^(deg a − deg b + 1)·a mod b in variable `i`.
fn prem(a: &QPoly, b: &QPoly, i: usize) -> QPoly {
    let db = b.degree(i);
    let lb = b.leading_coeff_in(i);
    let mut r = a.clone();
    let mut left = a.degree(i) + 1 - db;
    while !r.is_zero() && r.degree(i) >= db {
        let dr = r.degree(i);
        let lr = r.leading_coeff_in(i);
        let mut e = vec![0; r.nvars()];
        e[i] = dr - db;
        let shift = Polynomial::monomial(r.vars(), e, BigRational::one());
        r = &(&lb * &r) - &(&(&lr * &shift) * b);
        left -= 1;
    }
    &r * &lb.pow(left as u32)
}

fn primitive_in(p: &QPoly, i: usize) -> (QPoly, QPoly) {
    let c = content_in(p, i);
    let pp = p.div_exact(&c).expect("content divides");
    (c, pp)
}

/// Greatest common divisor, normalised by [`normalize`].
pub fn gcd(a: &QPoly, b: &QPoly) -> QPoly {
    if a.vars() != b.vars() {
        let mut u = a.vars().to_vec();
        for w in b.vars() {
            if !u.contains(w) {
                u.push(w.clone());
            }
        }
        return gcd(&a.embed(&u).unwrap(), &b.embed(&u).unwrap());
    }
    if a.is_zero() {
        return normalize(b);
    }
    if b.is_zero() {
        return normalize(a);
    }
    if a.is_constant() || b.is_constant() {
        return Polynomial::one(a.vars());
    }
    // main variable: involved in either, smallest degree
    let n = a.nvars();
    let i = (0..n)
        .filter(|&k| a.involves(k) || b.involves(k))
        .min_by_key(|&k| a.degree(k).max(b.degree(k)))
        .unwrap();
    if !a.involves(i) {
        return gcd(a, &content_in(b, i));
    }
    if !b.involves(i) {
        return gcd(&content_in(a, i), b);
    }
    let (ca, pa) = primitive_in(a, i);
    let (cb, pb) = primitive_in(b, i);
    let gc = gcd(&ca, &cb);
    // integer coefficients from here on
    let (pa, pb) = (normalize(&pa), normalize(&pb));
    let (mut f, mut g) = if pa.degree(i) >= pb.degree(i) { (pa, pb) } else { (pb, pa) };
    if f.div_exact(&g).is_some() {
        return normalize(&(&gc * &g));
    }
    // subresultant PRS: the divisions below are exact and keep coefficients small
    let mut lc = Polynomial::one(a.vars());
    let mut h = Polynomial::one(a.vars());
    loop {
        let delta = (f.degree(i) - g.degree(i)) as u32;
        let r = prem(&f, &g, i);
        if r.is_zero() {
            break;
        }
        if r.degree(i) == 0 {
            return normalize(&gc);
        }
        let r = r.div_exact(&(&lc * &h.pow(delta))).expect("subresultant division");
        f = g;
        g = r;
        lc = f.leading_coeff_in(i);
        h = if delta == 0 { h } else { lc.pow(delta).div_exact(&h.pow(delta - 1)).expect("subresultant division") };
    }
    let (_, gp) = primitive_in(&g, i);
    normalize(&(&gc * &gp))
}

/// Square-free decomposition of a primitive polynomial in variable `i` (Yun).
fn yun(f: &QPoly, i: usize) -> Vec<(QPoly, u32)> {
    let mut out = Vec::new();
    let fp = f.derivative(i);
    let a0 = gcd(f, &fp);
    let mut b = f.div_exact(&a0).expect("gcd divides f");
    let c = fp.div_exact(&a0).expect("gcd divides f'");
    let mut d = &c - &b.derivative(i);
    let mut k = 1;
    while !b.is_constant() {
        let a = gcd(&b, &d);
        let nb = b.div_exact(&a).expect("exact");
        let nc = d.div_exact(&a).expect("exact");
        if !a.is_constant() {
            out.push((a, k));
        }
        d = &nc - &nb.derivative(i);
        b = nb;
        k += 1;
    }
    out
}

fn sqf_rec(p: &QPoly, out: &mut Vec<(QPoly, u32)>) {
    if p.is_constant() {
        return;
    }
    let i = (0..p.nvars()).find(|&k| p.involves(k)).unwrap();
    let (c, pp) = primitive_in(p, i);
    out.extend(yun(&pp, i));
    sqf_rec(&c, out);
}

/// Square-free decomposition `p = content · Π fᵢ^{mᵢ}`, one factor per multiplicity.
pub fn squarefree_decomposition(p: &QPoly) -> Result<(BigRational, Vec<(QPoly, u32)>)> {
    if p.is_zero() {
        return Err(Error::Degenerate("zero polynomial".into()));
    }
    let mut parts = Vec::new();
    sqf_rec(p, &mut parts);
    let mut merged: Vec<(QPoly, u32)> = Vec::new();
    for (f, m) in parts {
        match merged.iter_mut().find(|(_, mm)| *mm == m) {
            Some(entry) => entry.0 = &entry.0 * &f,
            None => merged.push((f, m)),
        }
    }
    let mut factors: Vec<(QPoly, u32)> = merged.into_iter().map(|(f, m)| (normalize(&f), m)).collect();
    factors.sort_by(|a, b| b.1.cmp(&a.1));
    let content = reassembled_content(p, &factors)?;
    Ok((content, factors))
}

fn reassembled_content(p: &QPoly, factors: &[(QPoly, u32)]) -> Result<BigRational> {
    let mut prod = Polynomial::one(p.vars());
    for (f, m) in factors {
        prod = &prod * &f.pow(*m);
    }
    p.div_exact(&prod)
        .and_then(|q| q.constant_value())
        .ok_or_else(|| Error::Numerical("square-free factors do not reassemble".into()))
}

/// Multiplicity-aware factorisation of a double discriminant.
#[derive(Clone, Debug, PartialEq)]
pub struct FactorMultiplicity {
    /// Rational content.
    pub content: BigRational,
    /// Factors involving only parameter symbols (the b₀ part), unnormalised beyond sign and scale.
    pub b0: Vec<(QPoly, u32)>,
    /// Factors involving at least one space variable.
    pub factors: Vec<(QPoly, u32)>,
}

impl FactorMultiplicity {
    pub fn multiplicities(&self) -> Vec<u32> {
        self.factors.iter().map(|(_, m)| *m).collect()
    }

    pub fn factor_with(&self, m: u32) -> Option<&QPoly> {
        self.factors.iter().find(|(_, k)| *k == m).map(|(f, _)| f)
    }

    pub fn reassemble(&self, vars: &[String]) -> QPoly {
        let mut prod = Polynomial::constant(vars, self.content.clone());
        for (f, m) in self.b0.iter().chain(self.factors.iter()) {
            prod = &prod * &f.embed(vars).unwrap().pow(*m);
        }
        prod
    }
}

/// Square-free decomposition with factors depending only on `params`
/// (e.g. `t`) split off into the b₀ part.
pub fn factor_multiplicity(d: &QPoly, params: &[&str]) -> Result<FactorMultiplicity> {
    let (_, sqf) = squarefree_decomposition(d)?;
    let space: Vec<usize> = (0..d.nvars()).filter(|&k| !params.contains(&d.vars()[k].as_str())).collect();
    let mut b0 = Vec::new();
    let mut factors = Vec::new();
    for (f, m) in sqf {
        let mut pc = f.clone();
        for &k in &space {
            pc = content_in(&pc, k);
        }
        let pc = normalize(&pc);
        let rest = normalize(&f.div_exact(&pc).expect("parameter content divides"));
        if !pc.is_constant() {
            b0.push((pc, m));
        }
        if !rest.is_constant() {
            factors.push((rest, m));
        }
    }
    let mut fm = FactorMultiplicity { content: BigRational::one(), b0, factors };
    let prod = fm.reassemble(d.vars());
    fm.content = d
        .div_exact(&prod)
        .and_then(|q| q.constant_value())
        .ok_or_else(|| Error::Numerical("factors do not reassemble".into()))?;
    Ok(fm)
}
