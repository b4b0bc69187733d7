use std::sync::Arc;

use num_complex::Complex64;
use num_traits::Zero;
use serde::Serialize;

use crate::action::{ActionFamily, NoiseTerms};
use crate::error::{Error, Result};
use crate::geometry::curve::{CurveEval, CurveKind, CurveSample, Label, ParamCurve};
use crate::poly::gcd::{content_in, normalize};
use crate::poly::resultant::det_poly;
use crate::poly::{gcd, real_roots, substitute_rational, Polynomial, RationalFunction, UniPoly};
use crate::scalar::{close_rel, rat, rational_to_f64, snap};
use crate::scenario::x0_names;
use crate::{QPoly, Rational};

type QRf = RationalFunction<Rational>;

/// Univariate rational function with float coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct UniRf {
    pub num: UniPoly<f64>,
    pub den: UniPoly<f64>,
}

impl UniRf {
    pub fn eval(&self, x: f64) -> Option<f64> {
        let d = self.den.eval_f64(x);
        (d != 0.0).then(|| self.num.eval_f64(x) / d)
    }

    pub fn eval_c(&self, z: Complex64) -> Complex64 {
        self.num.eval_complex(z) / self.den.eval_complex(z)
    }

    /// Derivative via the quotient rule.
    pub fn derivative(&self) -> UniRf {
        UniRf {
            num: self.num.derivative().mul(&self.den).sub(&self.num.mul(&self.den.derivative())),
            den: self.den.mul(&self.den),
        }
    }
}

/// Deterministic pre-caustic and caustic, symbolic in λ and t.
///
/// The pre-caustic is det(I + t∇²S₀) = 0, solved for the last pre-image
/// coordinate; the caustic is its image under the flow.
#[derive(Clone, Debug)]
pub struct CausticFamily {
    pub dim: usize,
    /// x0 names followed by "t".
    pub vars: Vec<String>,
    pub det: QPoly,
    /// Last pre-image coordinate on the pre-caustic.
    pub last: QRf,
    /// Deterministic caustic x_t⁰(λ).
    pub x: Vec<QRf>,
    /// ∂x/∂λ_k, indexed [k][coordinate].
    pub dx: Vec<Vec<QRf>>,
    /// ∂²x/∂λ₁².
    pub d2x: Vec<QRf>,
}

impl CausticFamily {
    pub fn new(fam: &ActionFamily) -> Result<Self> {
        let d = fam.dim();
        let mut vars = x0_names(d);
        vars.push("t".into());
        let det = pre_caustic(fam)?;
        let li = d - 1;
        if det.degree(li) != 1 {
            return Err(Error::Unsupported(format!(
                "pre-caustic has degree {} in {}; need exactly 1",
                det.degree(li),
                vars[li]
            )));
        }
        let c = det.coeffs_in(li);
        let last = QRf::new(-&c[0], c[1].clone()).reduced();
        let mut x = Vec::with_capacity(d);
        for a in 0..d {
            let fl = fam.flow[a].compact_vars().embed(&vars)?;
            x.push(substitute_rational(&fl, li, &last).embed(&vars).reduced());
        }
        let dx: Vec<Vec<QRf>> =
            (0..d - 1).map(|k| x.iter().map(|xa| xa.derivative(k).reduced()).collect()).collect();
        let d2x = dx[0].iter().map(|v| v.derivative(0).reduced()).collect();
        Ok(CausticFamily { dim: d, vars, det, last, x, dx, d2x })
    }

    pub fn t_index(&self) -> usize {
        self.dim
    }

    fn fix_t(&self, rf: &QRf, t: &Rational) -> QRf {
        rf.eval_var(self.t_index(), t)
    }

    fn uni(&self, rf: &QRf, t: &Rational) -> UniRf {
        let r = self.fix_t(rf, t);
        let (n, d) = r.to_univariate(0).expect("planar caustic is univariate in λ");
        UniRf { num: n.to_f64(), den: d.to_f64() }
    }

    /// Planar caustic at a fixed time as float rational functions of λ.
    pub fn planar_at(&self, t: f64) -> Result<PlanarCaustic> {
        if self.dim != 2 {
            return Err(Error::Unsupported("planar caustic needs dimension 2".into()));
        }
        let tq = snap(t);
        Ok(PlanarCaustic {
            t,
            x: self.x.iter().map(|r| self.uni(r, &tq)).collect(),
            dx: self.dx[0].iter().map(|r| self.uni(r, &tq)).collect(),
            d2x: self.d2x.iter().map(|r| self.uni(r, &tq)).collect(),
            last: self.uni(&self.last, &tq),
            shift: vec![0.0; 2],
        })
    }

    /// Cusp factor: gcd of the numerators of dx/dλ, with pure-t content and
    /// pole factors removed. Planar only.
    pub fn cusp_factor(&self) -> Result<QPoly> {
        if self.dim != 2 {
            return Err(Error::Unsupported("cusp factor is defined for planar caustics".into()));
        }
        let mut k = gcd(&self.dx[0][0].num, &self.dx[0][1].num);
        for a in 0..2 {
            loop {
                let g = gcd(&k, &self.x[a].den);
                if g.is_constant() {
                    break;
                }
                k = k.div_exact(&g).unwrap();
            }
        }
        let c = content_in(&k, 0);
        Ok(normalize(&k.div_exact(&c).unwrap()))
    }

    /// Subcaustic factor of a 3-D caustic: gcd of the numerators of the 2×2
    /// minors of the Jacobian (∂x/∂λ₁, ∂x/∂λ₂).
    pub fn subcaustic_factor(&self) -> Result<QPoly> {
        if self.dim != 3 {
            return Err(Error::Unsupported("subcaustic needs dimension 3".into()));
        }
        let mut g = Polynomial::zero(&self.vars);
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let m = self.dx[0][i].mul(&self.dx[1][j]).sub(&self.dx[0][j].mul(&self.dx[1][i])).reduced();
            g = gcd(&g, &m.num);
        }
        let c = content_in(&content_in(&g, 0), 1);
        Ok(normalize(&g.div_exact(&c).unwrap()))
    }

    /// Real cusp parameters at time t (roots of the cusp factor).
    pub fn cusps_at(&self, k: &QPoly, t: &Rational) -> Result<Vec<f64>> {
        let u = k.eval_var(self.t_index(), t).to_univariate(0)?;
        if u.degree() == 0 {
            return Ok(Vec::new());
        }
        Ok(real_roots(&u)?.into_iter().map(|(r, _)| r).collect())
    }

    /// Exact caustic point at (λ, t).
    pub fn point_exact(&self, lambda: &[Rational], t: &Rational) -> Option<Vec<Rational>> {
        let mut vals = vec![Rational::zero(); self.vars.len()];
        vals[..lambda.len()].clone_from_slice(lambda);
        vals[self.t_index()] = t.clone();
        self.x
            .iter()
            .map(|r| {
                let den = r.den.eval(&vals);
                (!den.is_zero()).then(|| r.num.eval(&vals) / den)
            })
            .collect()
    }
}

/// det(I + t∇²S₀) over (x₀, t); its zero set is the pre-caustic.
pub fn pre_caustic(fam: &ActionFamily) -> Result<QPoly> {
    let d = fam.dim();
    let mut vars = x0_names(d);
    vars.push("t".into());
    let mut m = Vec::with_capacity(d);
    for a in 0..d {
        let mut row = Vec::with_capacity(d);
        for b in 0..d {
            let h = fam.scaled_action.derivative(a).derivative(b).compact_vars();
            row.push(h.embed(&vars).map_err(|_| Error::Numerical("Hessian depends on x".into()))?);
        }
        m.push(row);
    }
    det_poly(m, &vars)
}

/// Planar caustic at one time.
#[derive(Clone, Debug)]
pub struct PlanarCaustic {
    pub t: f64,
    pub x: Vec<UniRf>,
    pub dx: Vec<UniRf>,
    pub d2x: Vec<UniRf>,
    pub last: UniRf,
    /// Subtracted from every point: ε∫₀ᵗW.
    pub shift: Vec<f64>,
}

impl PlanarCaustic {
    pub fn sample(&self, lambda: f64, branch: usize) -> Option<CurveSample> {
        let point: Option<Vec<f64>> = self.x.iter().zip(&self.shift).map(|(r, s)| r.eval(lambda).map(|v| v - s)).collect();
        let d1: Option<Vec<f64>> = self.dx.iter().map(|r| r.eval(lambda)).collect();
        let d2: Option<Vec<f64>> = self.d2x.iter().map(|r| r.eval(lambda)).collect();
        Some(CurveSample {
            param: vec![lambda],
            point: point?,
            d1: vec![d1?],
            d2: d2?,
            branch,
            preimage: vec![lambda, self.last.eval(lambda)?],
            labels: Vec::new(),
        })
    }
}

impl CurveEval for PlanarCaustic {
    fn eval(&self, lambda: f64, near: &CurveSample) -> Option<CurveSample> {
        self.sample(lambda, near.branch)
    }
}

/// Pre-parameter grid for caustic sampling.
#[derive(Clone, Debug, PartialEq)]
pub enum LambdaGrid {
    One(Vec<f64>),
    Two(Vec<f64>, Vec<f64>),
}

impl LambdaGrid {
    pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        if n == 1 {
            return vec![lo];
        }
        (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
    }
}

/// Sampled caustic x_t(λ). With noise, the deterministic curve shifted by
/// −ε∫₀ᵗW is cross-checked against the noisy flow map applied to the pre-caustic.
pub fn caustic_curve(
    fam: &ActionFamily,
    cf: &CausticFamily,
    t: f64,
    grid: &LambdaGrid,
    noise: &NoiseTerms,
    labels: bool,
) -> Result<ParamCurve> {
    if !(t > 0.0) {
        return Err(Error::InvalidArgument(format!("time must be positive, got {t}")));
    }
    let d = cf.dim;
    let shift = noise.p_f64();
    let mut curve = ParamCurve::new(CurveKind::Caustic, t, d);
    let mut samples = Vec::new();
    match (grid, d) {
        (LambdaGrid::One(ls), 2) => {
            let mut pc = cf.planar_at(t)?;
            pc.shift = shift.clone();
            for &l in ls {
                if let Some(s) = pc.sample(l, 0) {
                    samples.push(s);
                }
            }
            curve.evaluator = Some(Arc::new(pc));
        }
        (LambdaGrid::Two(l1, l2), 3) => {
            let tq = snap(t);
            let fix = |r: &QRf| {
                let r = cf.fix_t(r, &tq);
                (r.num.to_f64_poly(), r.den.to_f64_poly())
            };
            let ev = |p: &(crate::FPoly, crate::FPoly), v: &[f64]| {
                let den = p.1.eval_f64(v);
                (den != 0.0).then(|| p.0.eval_f64(v) / den)
            };
            let xs: Vec<_> = cf.x.iter().map(fix).collect();
            let dxs: Vec<Vec<_>> = cf.dx.iter().map(|row| row.iter().map(fix).collect()).collect();
            let d2s: Vec<_> = cf.d2x.iter().map(fix).collect();
            let last = fix(&cf.last);
            for &a in l1 {
                for &b in l2 {
                    let v = [a, b, 0.0, t];
                    let pt: Option<Vec<f64>> = xs.iter().zip(&shift).map(|(p, s)| ev(p, &v).map(|x| x - s)).collect();
                    let d1: Option<Vec<Vec<f64>>> =
                        dxs.iter().map(|row| row.iter().map(|p| ev(p, &v)).collect()).collect();
                    let d2: Option<Vec<f64>> = d2s.iter().map(|p| ev(p, &v)).collect();
                    let (Some(pt), Some(d1), Some(d2), Some(z0)) = (pt, d1, d2, ev(&last, &v)) else { continue };
                    samples.push(CurveSample { param: vec![a, b], point: pt, d1, d2, branch: 0, preimage: vec![a, b, z0], labels: Vec::new() });
                }
            }
        }
        _ => return Err(Error::InvalidArgument("λ-grid shape does not match the scenario dimension".into())),
    }
    // cross-check against the noisy flow map
    for s in &samples {
        let direct = fam.flow_map(&s.preimage, t, noise)?;
        for a in 0..d {
            if !close_rel(direct[a], s.point[a], 1e-9) {
                return Err(Error::Numerical(format!(
                    "shifted caustic disagrees with flow map at λ={:?}: {} vs {}",
                    s.param, s.point[a], direct[a]
                )));
            }
        }
    }
    if labels {
        for s in samples.iter_mut() {
            s.labels.push(if caustic_point_is_cool(fam, &s.point, s.param[0], t, noise)? { Label::Cool } else { Label::Hot });
        }
        if d == 3 {
            let sc = cf.subcaustic_factor()?.to_f64_poly();
            for s in samples.iter_mut() {
                let v = [s.param[0], s.param[1], 0.0, t];
                let n: f64 = s.d1[0].iter().chain(&s.d1[1]).map(|x| x.abs()).fold(1.0, f64::max);
                if sc.eval_f64(&v).abs() < 1e-9 * n * n {
                    s.labels.push(Label::Subcaustic);
                }
            }
        }
    }
    curve.samples = samples;
    Ok(curve)
}

/// A caustic point is cool when its pre-image attains the minimal action.
pub fn caustic_point_is_cool(fam: &ActionFamily, x: &[f64], lambda: f64, t: f64, noise: &NoiseTerms) -> Result<bool> {
    let xs: Vec<Rational> = x.iter().map(|v| snap(*v)).collect();
    reduced_is_cool(&fam.reduced.at(&xs, &snap(t), noise)?, lambda)
}

/// Whether λ attains the minimum of the reduced action f over the real line.
pub fn reduced_is_cool(f: &UniPoly<Rational>, lambda: f64) -> Result<bool> {
    let ff = f.to_f64();
    let own = ff.eval_f64(lambda);
    // Aberth roots of f′ suffice here: only values are compared, at a loose tolerance
    let fp = ff.derivative();
    let scale = fp.coeffs().iter().fold(0.0f64, |a, c| a.max(c.abs()));
    if scale == 0.0 {
        return Err(Error::Degenerate("f′ vanishes identically".into()));
    }
    let min = crate::poly::roots::complex_roots(&fp, 1e-14)?
        .into_iter()
        .filter(|z| z.im.abs() <= 1e-6 * z.re.abs().max(1.0))
        .map(|z| ff.eval_f64(z.re))
        .fold(own, f64::min);
    Ok(close_rel(own, min, 1e-7))
}

/// Swallowtail perestroika on a planar caustic.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Perestroika {
    pub t: f64,
    pub lambda: f64,
    /// |f′|, |f″|, |f‴|, |f⁗| at (x_t(λ), t), λ.
    pub ladder: [f64; 4],
    /// Real cusp count below and above t.
    pub cusps_before: usize,
    pub cusps_after: usize,
}

/// Perestroika times in [t_lo, t_hi]: changes in the real-root count of the
/// cusp factor, bisected in exact rationals.
pub fn detect_perestroika(fam: &ActionFamily, cf: &CausticFamily, t_lo: f64, t_hi: f64, steps: usize) -> Result<Vec<Perestroika>> {
    if !(t_lo > 0.0 && t_hi > t_lo) || steps < 1 {
        return Err(Error::InvalidArgument("need 0 < t_lo < t_hi and at least one step".into()));
    }
    let k = cf.cusp_factor()?;
    let count = |t: &Rational| cf.cusps_at(&k, t).map(|v| v.len());
    let grid: Vec<Rational> = (0..=steps).map(|i| snap(t_lo + (t_hi - t_lo) * i as f64 / steps as f64)).collect();
    let counts: Vec<usize> = grid.iter().map(count).collect::<Result<_>>()?;
    let mut out = Vec::new();
    let two = rat(2, 1);
    for i in 0..steps {
        if counts[i] == counts[i + 1] {
            continue;
        }
        let (mut a, mut b) = (grid[i].clone(), grid[i + 1].clone());
        let ca = counts[i];
        while rational_to_f64(&(b.clone() - a.clone())) > 1e-14 {
            let m = (a.clone() + b.clone()) / two.clone();
            if count(&m)? == ca {
                a = m;
            } else {
                b = m;
            }
        }
        let tt = (a.clone() + b.clone()) / two.clone();
        // the merging pair is the closest adjacent pair on the side with more roots
        let more = if counts[i + 1] > ca { &b } else { &a };
        let roots = cf.cusps_at(&k, more)?;
        let mid = roots
            .windows(2)
            .min_by(|u, v| (u[1] - u[0]).partial_cmp(&(v[1] - v[0])).unwrap())
            .map(|w| 0.5 * (w[0] + w[1]))
            .unwrap_or_else(|| roots.first().copied().unwrap_or(0.0));
        let lambda = polish_double_root(&k, cf, &tt, mid);
        let ladder = derivative_ladder(fam, cf, lambda, &tt)?;
        out.push(Perestroika {
            t: rational_to_f64(&tt),
            lambda,
            ladder,
            cusps_before: ca,
            cusps_after: counts[i + 1],
        });
    }
    Ok(out)
}

/// At a perestroika the cusp factor has a double root; Newton on its λ-derivative.
fn polish_double_root(k: &QPoly, cf: &CausticFamily, t: &Rational, start: f64) -> f64 {
    let Ok(u) = k.eval_var(cf.t_index(), t).to_univariate(0) else { return start };
    let d1 = u.derivative().to_f64();
    let d2 = u.derivative().derivative().to_f64();
    let mut l = start;
    for _ in 0..50 {
        let s = d2.eval_f64(l);
        if s == 0.0 {
            break;
        }
        let step = d1.eval_f64(l) / s;
        l -= step;
        if step.abs() < 1e-16 * l.abs().max(1.0) {
            break;
        }
    }
    if (l - start).abs() > 1e-3 * start.abs().max(1.0) {
        start
    } else {
        l
    }
}

/// |f^(k)(λ)| for k = 1..4 with x on the deterministic caustic.
pub fn derivative_ladder(fam: &ActionFamily, cf: &CausticFamily, lambda: f64, t: &Rational) -> Result<[f64; 4]> {
    let lq = snap(lambda);
    let x = cf
        .point_exact(&[lq.clone()], t)
        .ok_or_else(|| Error::Numerical("caustic pole at perestroika".into()))?;
    let mut f = fam.reduced.at(&x, t, &NoiseTerms::zero(cf.dim))?;
    let mut out = [0.0; 4];
    for o in out.iter_mut() {
        f = f.derivative();
        *o = rational_to_f64(&f.eval(&lq)).abs();
    }
    Ok(out)
}

/// Complex parameter a + iη whose conjugate pair maps to one real point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComplexDoublePoint {
    pub a: f64,
    pub eta: f64,
    pub t: f64,
    /// max(|Im x|, |Im y|) at a + iη.
    pub residual: f64,
    pub point: Vec<f64>,
}

pub const TOL_NEWTON: f64 = 1e-10;
pub const TOL_DEDUP: f64 = 1e-6;

/// Solutions of Im x_t(a + iη) = 0 with η > 0 by damped Newton from a start grid.
pub fn complex_double_points(cf: &CausticFamily, t: f64) -> Result<Vec<ComplexDoublePoint>> {
    let pc = cf.planar_at(t)?;
    let dx: Vec<UniRf> = pc.x.iter().map(UniRf::derivative).collect();
    // G = (Im x, Im y)/η removes the real axis from the solution set
    let g = |a: f64, e: f64| -> Option<([f64; 2], [[f64; 2]; 2])> {
        let z = Complex64::new(a, e);
        let mut gv = [0.0; 2];
        let mut jm = [[0.0; 2]; 2];
        for k in 0..2 {
            let v = pc.x[k].eval_c(z);
            let dv = dx[k].eval_c(z);
            if !v.re.is_finite() || !v.im.is_finite() || !dv.re.is_finite() {
                return None;
            }
            gv[k] = v.im / e;
            jm[k] = [dv.im / e, dv.re / e - v.im / (e * e)];
        }
        Some((gv, jm))
    };
    let norm = |v: &[f64; 2]| v[0].hypot(v[1]);
    let mut found: Vec<ComplexDoublePoint> = Vec::new();
    for ia in 0..=40 {
        for ie in 1..=40 {
            let (mut a, mut e) = (-2.0 + 0.1 * ia as f64, 0.05 * ie as f64);
            let Some((mut gv, mut jm)) = g(a, e) else { continue };
            let mut ok = false;
            for _ in 0..100 {
                let det = jm[0][0] * jm[1][1] - jm[0][1] * jm[1][0];
                if det == 0.0 || !det.is_finite() {
                    break;
                }
                let da = (gv[0] * jm[1][1] - gv[1] * jm[0][1]) / det;
                let de = (jm[0][0] * gv[1] - jm[1][0] * gv[0]) / det;
                let mut s = 1.0;
                let n0 = norm(&gv);
                let mut moved = false;
                while s > 1e-6 {
                    let (na, ne) = (a - s * da, e - s * de);
                    if ne > 0.0 {
                        if let Some((g2, j2)) = g(na, ne) {
                            if norm(&g2) < n0 {
                                a = na;
                                e = ne;
                                gv = g2;
                                jm = j2;
                                moved = true;
                                break;
                            }
                        }
                    }
                    s *= 0.5;
                }
                if !moved {
                    break;
                }
                if (s * da).abs() < 1e-15 * a.abs().max(1.0) && (s * de).abs() < 1e-15 * e.max(1e-300) {
                    ok = true;
                    break;
                }
            }
            let z = Complex64::new(a, e);
            let vals: Vec<Complex64> = pc.x.iter().map(|r| r.eval_c(z)).collect();
            let residual = vals.iter().map(|v| v.im.abs()).fold(0.0, f64::max);
            if !(residual < TOL_NEWTON) || e < TOL_DEDUP || !residual.is_finite() {
                continue;
            }
            let _ = ok;
            if found.iter().any(|p| (p.a - a).hypot(p.eta - e) < TOL_DEDUP) {
                continue;
            }
            found.push(ComplexDoublePoint { a, eta: e, t, residual, point: vals.iter().map(|v| v.re).collect() });
        }
    }
    found.sort_by(|p, q| p.a.partial_cmp(&q.a).unwrap().then(p.eta.partial_cmp(&q.eta).unwrap()));
    Ok(found)
}
