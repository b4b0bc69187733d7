use crate::error::{Error, Result};
use crate::poly::{Polynomial, UniPoly};
use crate::scalar::Scalar;

/// Sylvester matrix of `p` (degree m) and `q` (degree n) from their
/// coefficient lists, highest degree first in each row.
pub fn sylvester<T: Clone>(p: &[T], q: &[T], zero: T) -> Vec<Vec<T>> {
    let m = p.len() - 1;
    let n = q.len() - 1;
    let size = m + n;
    let mut rows = Vec::with_capacity(size);
    for i in 0..n {
        let mut row = vec![zero.clone(); size];
        for (k, c) in p.iter().rev().enumerate() {
            row[i + k] = c.clone();
        }
        rows.push(row);
    }
    for i in 0..m {
        let mut row = vec![zero.clone(); size];
        for (k, c) in q.iter().rev().enumerate() {
            row[i + k] = c.clone();
        }
        rows.push(row);
    }
    rows
}

/// Fraction-free (Bareiss) determinant over scalars.
pub fn det_scalar<C: Scalar>(mut m: Vec<Vec<C>>) -> C {
    let n = m.len();
    if n == 0 {
        return C::one();
    }
    let mut sign = false;
    let mut prev = C::one();
    for k in 0..n - 1 {
        let pivot = if C::is_exact() {
            (k..n).find(|&i| !m[i][k].is_zero())
        } else {
            (k..n)
                .filter(|&i| !m[i][k].is_zero())
                .max_by(|&a, &b| m[a][k].magnitude().partial_cmp(&m[b][k].magnitude()).unwrap())
        };
        let Some(p) = pivot else { return C::zero() };
        if p != k {
            m.swap(p, k);
            sign = !sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = m[k][k].clone() * m[i][j].clone() - m[i][k].clone() * m[k][j].clone();
                m[i][j] = v.exact_div(&prev);
            }
            m[i][k] = C::zero();
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if sign {
        -d
    } else {
        d
    }
}

/// Fraction-free determinant with polynomial entries; every division is exact.
pub fn det_poly<C: Scalar>(mut m: Vec<Vec<Polynomial<C>>>, vars: &[String]) -> Result<Polynomial<C>> {
    let n = m.len();
    if n == 0 {
        return Ok(Polynomial::one(vars));
    }
    let mut sign = false;
    let mut prev = Polynomial::one(vars);
    for k in 0..n - 1 {
        // sparsest nonzero pivot keeps intermediate products small
        let pivot = (k..n).filter(|&i| !m[i][k].is_zero()).min_by_key(|&i| m[i][k].num_terms());
        let Some(p) = pivot else { return Ok(Polynomial::zero(vars)) };
        if p != k {
            m.swap(p, k);
            sign = !sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let a = &m[k][k] * &m[i][j];
                let b = &m[i][k] * &m[k][j];
                let v = &a - &b;
                m[i][j] = if v.is_zero() {
                    v
                } else {
                    v.div_exact(&prev)
                        .ok_or_else(|| Error::Numerical("inexact Bareiss division".into()))?
                };
            }
            m[i][k] = Polynomial::zero(vars);
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    Ok(if sign { -d } else { d })
}

fn var_idx<C: Scalar>(p: &Polynomial<C>, var: &str) -> Result<usize> {
    p.var_index(var).ok_or_else(|| Error::InvalidArgument(format!("unknown variable {var}")))
}

/// Resultant of `p` and `q` with respect to `var` (Sylvester determinant).
///
/// If one input is constant in `var` with value `c`, the result is
/// `c^deg(other)`.
pub fn resultant<C: Scalar>(p: &Polynomial<C>, q: &Polynomial<C>, var: &str) -> Result<Polynomial<C>> {
    let vars = {
        let mut v = p.vars().to_vec();
        for w in q.vars() {
            if !v.contains(w) {
                v.push(w.clone());
            }
        }
        if !v.iter().any(|x| x == var) {
            v.push(var.to_string());
        }
        v
    };
    let p = p.embed(&vars)?;
    let q = q.embed(&vars)?;
    let i = var_idx(&p, var)?;
    let m = p.degree(i);
    let n = q.degree(i);
    if p.is_zero() || q.is_zero() {
        return Ok(Polynomial::zero(&vars));
    }
    if m == 0 && n == 0 {
        return Err(Error::Degenerate(format!("both inputs constant in {var}")));
    }
    if n == 0 {
        return Ok(q.pow(m));
    }
    if m == 0 {
        return Ok(p.pow(n));
    }
    let pc = p.coeffs_in(i);
    let qc = q.coeffs_in(i);
    if pc.iter().chain(qc.iter()).all(|c| c.is_constant()) {
        let ps: Vec<C> = pc.iter().map(|c| c.constant_value().unwrap()).collect();
        let qs: Vec<C> = qc.iter().map(|c| c.constant_value().unwrap()).collect();
        let d = det_scalar(sylvester(&ps, &qs, C::zero()));
        return Ok(Polynomial::constant(&vars, d));
    }
    let mat = sylvester(&pc, &qc, Polynomial::zero(&vars));
    det_poly(mat, &vars)
}

/// Resultant of dense univariate polynomials.
pub fn resultant_uni<C: Scalar>(p: &UniPoly<C>, q: &UniPoly<C>) -> Result<C> {
    if p.is_zero() || q.is_zero() {
        return Ok(C::zero());
    }
    let (m, n) = (p.degree(), q.degree());
    if m == 0 && n == 0 {
        return Err(Error::Degenerate("both inputs constant".into()));
    }
    if n == 0 {
        return Ok(pow_scalar(&q.leading(), m));
    }
    if m == 0 {
        return Ok(pow_scalar(&p.leading(), n));
    }
    Ok(det_scalar(sylvester(p.coeffs(), q.coeffs(), C::zero())))
}

fn pow_scalar<C: Scalar>(c: &C, k: usize) -> C {
    (0..k).fold(C::one(), |acc, _| acc * c.clone())
}

fn disc_sign(m: u32) -> bool {
    (m as u64 * (m as u64 - 1) / 2) % 2 == 1
}

/// Discriminant `(−1)^{m(m−1)/2} res(p, p′) / lc(p)`.
pub fn discriminant<C: Scalar>(p: &Polynomial<C>, var: &str) -> Result<Polynomial<C>> {
    let i = var_idx(p, var)?;
    let m = p.degree(i);
    if m < 2 {
        return Err(Error::Degenerate(format!("degree {m} < 2 in {var}")));
    }
    let r = resultant(p, &p.derivative(i), var)?;
    let lc = p.leading_coeff_in(i);
    let q = r
        .div_exact(&lc)
        .ok_or_else(|| Error::Numerical("leading coefficient does not divide res(p, p')".into()))?;
    Ok(if disc_sign(m) { -q } else { q })
}

pub fn discriminant_uni<C: Scalar>(p: &UniPoly<C>) -> Result<C> {
    let m = p.degree();
    if m < 2 {
        return Err(Error::Degenerate(format!("degree {m} < 2")));
    }
    let r = resultant_uni(p, &p.derivative())?;
    let q = r.exact_div(&p.leading());
    Ok(if disc_sign(m as u32) { -q } else { q })
}

/// `D_c(D_λ(f − c))` for a fresh symbol `c`.
///
/// When the inner discriminant has degree below 2 in `c` there is at most one
/// critical value, and the result is the constant 1.
pub fn double_discriminant<C: Scalar>(f: &Polynomial<C>, lambda: &str, c: &str) -> Result<Polynomial<C>> {
    let li = var_idx(f, lambda)?;
    if f.var_index(c).map_or(false, |ci| f.involves(ci)) {
        return Err(Error::InvalidArgument(format!("symbol {c} already occurs in f")));
    }
    let deg = f.degree(li);
    if deg == 0 {
        return Err(Error::Degenerate(format!("f is constant in {lambda}")));
    }
    let mut vars = f.vars().to_vec();
    if !vars.iter().any(|v| v == c) {
        vars.push(c.to_string());
    }
    if deg == 1 {
        return Ok(Polynomial::one(&vars));
    }
    let f = f.embed(&vars)?;
    let g = &f - &Polynomial::var_named(&vars, c)?;
    let d1 = discriminant(&g, lambda)?;
    let ci = d1.var_index(c).unwrap();
    if d1.degree(ci) < 2 {
        return Ok(Polynomial::one(&vars));
    }
    discriminant(&d1, c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse::{parse, parse_with_vars};
    use crate::poly::var_names;
    use crate::scalar::rat;

    #[test]
    fn resultant_examples() {
        let v = var_names(&["x"]);
        let p = parse_with_vars("x^2 - 1", &v).unwrap();
        let q = parse_with_vars("x - 2", &v).unwrap();
        assert_eq!(resultant(&p, &q, "x").unwrap().constant_value(), Some(rat(3, 1)));
        let v = var_names(&["t", "l"]);
        let a = parse_with_vars("-3*t*l", &v).unwrap();
        let b = parse_with_vars("-3*t", &v).unwrap();
        assert_eq!(resultant(&a, &b, "l").unwrap(), b);
        let k = parse_with_vars("7", &v).unwrap();
        assert!(resultant(&k, &k, "l").is_err());
    }

    #[test]
    fn discriminant_examples() {
        let v = var_names(&["x", "b", "c"]);
        let p = parse_with_vars("x^2 + b*x + c", &v).unwrap();
        assert_eq!(discriminant(&p, "x").unwrap(), parse_with_vars("b^2 - 4*c", &v).unwrap());
        let v = var_names(&["x", "p", "q"]);
        let p = parse_with_vars("x^3 + p*x + q", &v).unwrap();
        assert_eq!(
            discriminant(&p, "x").unwrap(),
            parse_with_vars("-4*p^3 - 27*q^2", &v).unwrap()
        );
        let r = parse("(x-1)^2*(x+2)").unwrap();
        assert!(discriminant(&r, "x").unwrap().is_zero());
        assert!(discriminant(&parse("x + 1").unwrap(), "x").is_err());
    }

    #[test]
    fn float_resultant_matches_exact() {
        let p = UniPoly::new(vec![rat(-1, 1), rat(0, 1), rat(1, 1)]);
        let q = UniPoly::new(vec![rat(-2, 1), rat(1, 1)]);
        let exact = resultant_uni(&p, &q).unwrap();
        let approx = resultant_uni(&p.to_f64(), &q.to_f64()).unwrap();
        assert_eq!(exact, rat(3, 1));
        assert!((approx - 3.0).abs() < 1e-12);
    }

    #[test]
    fn double_discriminant_of_square_is_constant() {
        let v = var_names(&["l", "x"]);
        let f = parse_with_vars("l^2", &v).unwrap();
        let d = double_discriminant(&f, "l", "c").unwrap();
        assert!(d.is_constant() && !d.is_zero());
    }
}
