use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::poly::UniPoly;
use crate::scalar::{rational_to_f64, snap, Scalar};

type Q = BigRational;

/// Disjoint isolating intervals `lo ≤ root ≤ hi` with multiplicities.
#[derive(Clone, Debug, PartialEq)]
pub struct RootIsolation {
    pub intervals: Vec<(Q, Q)>,
    pub multiplicities: Vec<u32>,
}

impl RootIsolation {
    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn total_multiplicity(&self) -> u32 {
        self.multiplicities.iter().sum()
    }
}

/// Univariate square-free decomposition (Yun), one factor per multiplicity.
pub fn squarefree_factors(p: &UniPoly<Q>) -> Vec<(UniPoly<Q>, u32)> {
    let mut out = Vec::new();
    if p.degree() == 0 {
        return out;
    }
    let dp = p.derivative();
    let a0 = p.gcd(&dp);
    let mut b = p.divrem(&a0).0;
    let c = dp.divrem(&a0).0;
    let mut d = c.sub(&b.derivative());
    let mut k = 1;
    while b.degree() > 0 {
        let a = b.gcd(&d);
        let nb = b.divrem(&a).0;
        let nc = d.divrem(&a).0;
        if a.degree() > 0 {
            out.push((a, k));
        }
        d = nc.sub(&nb.derivative());
        b = nb;
        k += 1;
    }
    out
}

/// Sturm sequence of a square-free polynomial.
pub fn sturm_sequence(p: &UniPoly<Q>) -> Vec<UniPoly<Q>> {
    let mut seq = vec![p.clone(), p.derivative()];
    loop {
        let n = seq.len();
        if seq[n - 1].is_zero() {
            seq.pop();
            break;
        }
        let r = seq[n - 2].divrem(&seq[n - 1]).1;
        if r.is_zero() {
            break;
        }
        seq.push(r.scale(&-Q::one()));
    }
    seq
}

/// Sign variations of the Sturm sequence at `x`.
pub fn sign_variations(seq: &[UniPoly<Q>], x: &Q) -> usize {
    let mut last = 0;
    let mut count = 0;
    for s in seq {
        let v = s.sign_at(x);
        if v == 0 {
            continue;
        }
        if last != 0 && v != last {
            count += 1;
        }
        last = v;
    }
    count
}

/// Distinct real roots in `(a, b]`.
pub fn count_roots(seq: &[UniPoly<Q>], a: &Q, b: &Q) -> usize {
    sign_variations(seq, a).saturating_sub(sign_variations(seq, b))
}

/// Cauchy bound: every root satisfies |x| < 1 + max |aᵢ/aₙ|.
pub fn root_bound(p: &UniPoly<Q>) -> Q {
    let lc = p.leading().abs();
    let m = p.coeffs()[..p.degree()].iter().map(|c| c.abs() / lc.clone()).fold(Q::zero(), |a, b| a.max(b));
    // round up to a power of two so bisection midpoints stay dyadic
    let bound = m + Q::one();
    let mut pw = Q::one();
    while pw < bound {
        pw = pw * Q::from_integer(2.into());
    }
    pw
}

fn isolate_squarefree(p: &UniPoly<Q>, lo: &Q, hi: &Q) -> Vec<(Q, Q)> {
    let seq = sturm_sequence(p);
    let mut out = Vec::new();
    let mut stack = vec![(lo.clone(), hi.clone())];
    let two = Q::from_integer(2.into());
    while let Some((a, b)) = stack.pop() {
        let n = count_roots(&seq, &a, &b);
        if n == 0 {
            continue;
        }
        if n == 1 {
            if p.eval(&b).is_zero() {
                out.push((b.clone(), b));
            } else {
                out.push((a, b));
            }
            continue;
        }
        let m = (a.clone() + b.clone()) / two.clone();
        stack.push((m.clone(), b));
        stack.push((a, m));
    }
    out.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    out
}

/// Real-root isolation with multiplicities, optionally restricted to `(lo, hi]`.
pub fn isolate_real_roots(p: &UniPoly<Q>, range: Option<(Q, Q)>) -> Result<RootIsolation> {
    if p.is_zero() {
        return Err(Error::Degenerate("zero polynomial has no isolated roots".into()));
    }
    let mut all: Vec<(Q, Q, u32, usize)> = Vec::new();
    let factors = squarefree_factors(p);
    for (fi, (f, m)) in factors.iter().enumerate() {
        let (lo, hi) = match &range {
            Some((a, b)) => (a.clone(), b.clone()),
            None => {
                let b = root_bound(f);
                (-b.clone(), b)
            }
        };
        for (a, b) in isolate_squarefree(f, &lo, &hi) {
            all.push((a, b, *m, fi));
        }
    }
    all.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    // intervals from coprime factors hold distinct roots; shrink until disjoint
    loop {
        let mut changed = false;
        for k in 0..all.len().saturating_sub(1) {
            if all[k].1 >= all[k + 1].0 {
                let (f1, f2) = (&factors[all[k].3].0, &factors[all[k + 1].3].0);
                let i1 = refine_once(f1, &all[k].0, &all[k].1);
                let i2 = refine_once(f2, &all[k + 1].0, &all[k + 1].1);
                all[k].0 = i1.0;
                all[k].1 = i1.1;
                all[k + 1].0 = i2.0;
                all[k + 1].1 = i2.1;
                changed = true;
            }
        }
        all.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
        if !changed {
            break;
        }
    }
    Ok(RootIsolation {
        intervals: all.iter().map(|x| (x.0.clone(), x.1.clone())).collect(),
        multiplicities: all.iter().map(|x| x.2).collect(),
    })
}

/// One bisection step on an isolating interval of a square-free `f`.
fn refine_once(f: &UniPoly<Q>, lo: &Q, hi: &Q) -> (Q, Q) {
    if lo == hi {
        return (lo.clone(), hi.clone());
    }
    let mid = (lo.clone() + hi.clone()) / Q::from_integer(2.into());
    let fm = f.sign_at(&mid);
    if fm == 0 {
        return (mid.clone(), mid);
    }
    let fl = f.sign_at(lo);
    let fh = f.sign_at(hi);
    if fh == 0 {
        return (hi.clone(), hi.clone());
    }
    if fl != 0 && fl != fh {
        return if fl != fm { (lo.clone(), mid) } else { (mid, hi.clone()) };
    }
    let seq = sturm_sequence(f);
    if count_roots(&seq, lo, &mid) == 1 {
        (lo.clone(), mid)
    } else {
        (mid, hi.clone())
    }
}

/// Refine an isolating interval of a root of `p` to width at most `width`.
pub fn refine_root(p: &UniPoly<Q>, lo: &Q, hi: &Q, width: &Q) -> (Q, Q) {
    let f = p.squarefree();
    let (mut a, mut b) = (lo.clone(), hi.clone());
    while b.clone() - a.clone() > *width {
        let (na, nb) = refine_once(&f, &a, &b);
        a = na;
        b = nb;
    }
    (a, b)
}

/// Real roots as floats with multiplicities, refined to about 1e−15 relative width.
pub fn real_roots(p: &UniPoly<Q>) -> Result<Vec<(f64, u32)>> {
    let iso = isolate_real_roots(p, None)?;
    let f = p.squarefree();
    let ff = f.to_f64();
    let dff = ff.derivative();
    let mut out = Vec::with_capacity(iso.len());
    for ((lo, hi), m) in iso.intervals.iter().zip(&iso.multiplicities) {
        out.push((refine_to_float(&f, &ff, &dff, lo, hi), *m));
    }
    Ok(out)
}

/// Bisection with cached endpoint signs down to ~1e−8 relative width, then a float
/// Newton polish accepted only if an exact sign change brackets it.
fn refine_to_float(f: &UniPoly<Q>, ff: &UniPoly<f64>, dff: &UniPoly<f64>, lo: &Q, hi: &Q) -> f64 {
    let (mut a, mut b) = (lo.clone(), hi.clone());
    let two = Q::from_integer(2.into());
    let mut sa = f.sign_at(&a);
    let sb = f.sign_at(&b);
    if sb == 0 {
        return rational_to_f64(&b);
    }
    let mut polished = false;
    for _ in 0..4000 {
        let (fa, fb) = (rational_to_f64(&a), rational_to_f64(&b));
        if fb - fa <= 1e-16 * fa.abs().max(fb.abs()) || fb - fa < 1e-300 || a == b {
            break;
        }
        if sa == 0 || sa == sb {
            // endpoint sign gives no bracket: fall back to the Sturm-based step
            let (na, nb) = refine_once(f, &a, &b);
            a = na;
            b = nb;
            sa = f.sign_at(&a);
            continue;
        }
        if !polished && fb - fa <= 1e-8 * fa.abs().max(fb.abs()) {
            polished = true;
            if let Some(x) = newton_polish(ff, dff, fa, fb) {
                let d = 4.0 * f64::EPSILON * x.abs().max(1e-300);
                let (xl, xh) = (snap(x - d), snap(x + d));
                if xl > a && xh < b {
                    let (sl, sh) = (f.sign_at(&xl), f.sign_at(&xh));
                    if sl == 0 {
                        return rational_to_f64(&xl);
                    }
                    if sh == 0 {
                        return rational_to_f64(&xh);
                    }
                    if sl != sh {
                        a = xl;
                        b = xh;
                        sa = sl;
                        continue;
                    }
                }
            }
        }
        let mid = (a.clone() + b.clone()) / two.clone();
        let sm = f.sign_at(&mid);
        if sm == 0 {
            return rational_to_f64(&mid);
        }
        if sm == sa {
            a = mid;
        } else {
            b = mid;
        }
    }
    rational_to_f64(&((a + b) / two))
}

fn newton_polish(ff: &UniPoly<f64>, dff: &UniPoly<f64>, lo: f64, hi: f64) -> Option<f64> {
    let mut x = 0.5 * (lo + hi);
    for _ in 0..8 {
        let d = dff.eval_f64(x);
        if d == 0.0 || !d.is_finite() {
            return None;
        }
        let nx = x - ff.eval_f64(x) / d;
        if !(nx >= lo && nx <= hi) {
            return None;
        }
        if nx == x {
            break;
        }
        x = nx;
    }
    Some(x)
}

/// Real roots of a float polynomial, via exact snapping of its coefficients.
pub fn real_roots_f64(p: &UniPoly<f64>) -> Result<Vec<(f64, u32)>> {
    let q = p.map(|c| crate::scalar::snap(*c));
    real_roots(&q)
}

/// All complex roots by Aberth–Ehrlich iteration. Real inputs get their roots
/// paired with conjugates.
pub fn complex_roots<C: Scalar>(p: &UniPoly<C>, precision: f64) -> Result<Vec<Complex64>> {
    let c: Vec<f64> = p.coeffs().iter().map(|c| c.to_f64()).collect();
    if c.is_empty() {
        return Err(Error::Degenerate("zero polynomial".into()));
    }
    let n = c.len() - 1;
    if n == 0 {
        return Ok(Vec::new());
    }
    let lead = c[n];
    let cmax = c.iter().fold(0f64, |a, b| a.max(b.abs()));
    if lead.abs() < 1e-14 * cmax || !lead.is_finite() {
        return Err(Error::Conditioning(format!("leading coefficient {lead:e} vs max {cmax:e}")));
    }
    let a: Vec<f64> = c.iter().map(|x| x / lead).collect();
    let pz = UniPoly::new(a.clone());
    let dz = pz.derivative();
    let bound = 1.0 + a[..n].iter().fold(0f64, |m, x| m.max(x.abs()));
    let r0 = bound.min(2.0 * a[..n].iter().enumerate().map(|(k, x)| x.abs().powf(1.0 / (n - k) as f64)).fold(0.0, f64::max)).max(1e-3);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(r0, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4))
        .collect();
    for _ in 0..1000 {
        let mut maxstep: f64 = 0.0;
        for i in 0..n {
            let pv = pz.eval_complex(z[i]);
            if pv.norm() == 0.0 {
                continue;
            }
            let ratio = pv / dz.eval_complex(z[i]);
            let s: Complex64 = (0..n).filter(|&j| j != i).map(|j| 1.0 / (z[i] - z[j])).sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if w.is_finite() {
                z[i] -= w;
                maxstep = maxstep.max(w.norm() / z[i].norm().max(1.0));
            }
        }
        if maxstep < precision * 1e-3 {
            break;
        }
    }
    // conjugate pairing
    let tol = precision.max(1e-12).sqrt();
    let mut used = vec![false; n];
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        if used[i] {
            continue;
        }
        used[i] = true;
        if z[i].im.abs() <= tol * z[i].norm().max(1.0) {
            out.push(Complex64::new(z[i].re, 0.0));
            continue;
        }
        let partner = (0..n)
            .filter(|&j| !used[j])
            .min_by(|&j, &k| (z[j] - z[i].conj()).norm().partial_cmp(&(z[k] - z[i].conj()).norm()).unwrap());
        match partner {
            Some(j) => {
                used[j] = true;
                let m = (z[i] + z[j].conj()) * 0.5;
                out.push(m);
                out.push(m.conj());
            }
            None => out.push(z[i]),
        }
    }
    out.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
    Ok(out)
}
