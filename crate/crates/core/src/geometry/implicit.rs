use std::sync::Arc;

use num_traits::Zero;
use serde::Serialize;

use crate::action::{ActionFamily, NoiseTerms};
use crate::error::{Error, Result};
use crate::geometry::curve::{CurveEval, CurveKind, CurveSample, ParamCurve};
use crate::poly::gcd::{content_in, normalize};
use crate::poly::{gcd, real_roots, real_roots_f64, resultant, discriminant, Polynomial, UniPoly};
use crate::scalar::snap;
use crate::scenario::x0_names;
use crate::{FPoly, QPoly, Rational};

/// Flow polynomials at a fixed time over the pre-image coordinates, without the noise shift.
pub fn flow_at(fam: &ActionFamily, t: &Rational) -> Result<Vec<QPoly>> {
    let vars = x0_names(fam.dim());
    fam.flow.iter().map(|f| f.eval_var(fam.sym.t(), t).compact_vars().embed(&vars)).collect()
}

/// Pre-level polynomial A_t(x₀, Φ_t(x₀)) − c over (x₀, y₀), with content in y₀ removed.
///
/// The noise shift cancels in x − x₀, so only the q and r terms enter.
pub fn pre_level_polynomial(fam: &ActionFamily, c: f64, t: f64, noise: &NoiseTerms) -> Result<QPoly> {
    require_planar(fam)?;
    let tq = positive_time(t)?;
    let d = fam.dim();
    let a = fam.action_at(&tq, noise)?;
    let flow = flow_at(fam, &tq)?;
    let mut p = a.clone();
    let vars = a.vars().to_vec();
    for k in 0..d {
        let img = &flow[k].embed(&vars)? - &Polynomial::constant(&vars, noise.p[k].clone());
        p = p.substitute(d + k, &img);
    }
    let p = &p.compact_vars().embed(&x0_names(d))? - &Polynomial::constant(&x0_names(d), snap(c));
    Ok(strip_content(&p))
}

/// Pre-Maxwell polynomial: disc_y[(g(x₀) − g(y))/(x₀ − y)²] with g(λ) = t·f_{(Φ_t(x₀),t)}(λ), noise-free.
pub fn pre_maxwell_polynomial(fam: &ActionFamily, t: f64) -> Result<QPoly> {
    require_planar(fam)?;
    let tq = positive_time(t)?;
    let sym = &fam.sym;
    let flow = flow_at(fam, &tq)?;
    // g over (λ, y0, x, y, t, ...) with the noise symbols set to zero
    let mut assign: Vec<(usize, Rational)> = vec![(sym.t(), tq.clone())];
    for k in 0..2 {
        assign.push((sym.p(k), Rational::zero()));
        assign.push((sym.q(k), Rational::zero()));
    }
    assign.push((sym.r(), Rational::zero()));
    let g = fam.reduced.scaled.eval_vars(&assign);
    let vars: Vec<String> = vec!["x0".into(), "y0".into(), "y".into()];
    // x := Φ(x0, y0); λ stays x0
    let mut gx = g.clone();
    for k in 0..2 {
        gx = gx.substitute(sym.x(k), &flow[k].embed(g.vars())?);
    }
    let gx = gx.compact_vars().embed(&vars)?;
    let gy = gy_from(&g, &flow, sym, &vars)?;
    let num = &gx - &gy;
    let lin = &Polynomial::var(&vars, 0) - &Polynomial::var(&vars, 2);
    let q = num
        .div_exact(&(&lin * &lin))
        .ok_or_else(|| Error::Structural("pre-Maxwell quotient is not exact".into()))?;
    let disc = if q.degree(2) == 0 {
        return Err(Error::Degenerate("pre-Maxwell quotient has no partner variable".into()));
    } else if q.degree(2) == 1 {
        q.coeffs_in(2)[1].clone()
    } else {
        discriminant(&q, "y")?
    };
    Ok(strip_content(&disc.compact_vars().embed(&x0_names(2))?))
}

fn gy_from(g: &QPoly, flow: &[QPoly], sym: &crate::action::Symbols, vars: &[String]) -> Result<QPoly> {
    let gv = extend_vars(g, "y");
    let yi = gv.nvars() - 1;
    let mut h = gv.substitute(0, &Polynomial::var(gv.vars(), yi));
    for k in 0..2 {
        h = h.substitute(sym.x(k), &flow[k].embed(gv.vars())?);
    }
    h.compact_vars().embed(vars)
}

fn extend_vars(p: &QPoly, name: &str) -> QPoly {
    let mut v = p.vars().to_vec();
    v.push(name.into());
    p.embed(&v).expect("superset of variables")
}

fn require_planar(fam: &ActionFamily) -> Result<()> {
    if fam.dim() != 2 {
        return Err(Error::Unsupported("implicit pre-curves are computed for planar scenarios".into()));
    }
    Ok(())
}

fn positive_time(t: f64) -> Result<Rational> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("time must be positive, got {t}")));
    }
    Ok(snap(t))
}

/// Divide out the y₀-content (components x₀ = const cannot be swept by x₀) and normalise.
fn strip_content(p: &QPoly) -> QPoly {
    if p.is_zero() {
        return p.clone();
    }
    let c = content_in(p, 1);
    normalize(&p.div_exact(&c).unwrap_or_else(|| p.clone()))
}

/// Float partial derivatives of a planar pre-curve polynomial.
#[derive(Clone, Debug)]
struct Partials {
    p: FPoly,
    pa: FPoly,
    py: FPoly,
    paa: FPoly,
    pay: FPoly,
    pyy: FPoly,
}

impl Partials {
    fn new(p: &QPoly) -> Self {
        let pa = p.derivative(0);
        let py = p.derivative(1);
        Partials {
            p: p.to_f64_poly(),
            paa: pa.derivative(0).to_f64_poly(),
            pay: pa.derivative(1).to_f64_poly(),
            pyy: py.derivative(1).to_f64_poly(),
            pa: pa.to_f64_poly(),
            py: py.to_f64_poly(),
        }
    }
}

/// Samples an implicit pre-curve P(λ, y₀) = 0 by exact root finding in y₀ per λ and
/// maps it through the flow (or leaves it in the pre-image plane).
#[derive(Clone, Debug)]
pub struct ImplicitCurve {
    pub poly: QPoly,
    parts: Partials,
    /// Flow at fixed t, value and partials [Φ, Φ_a, Φ_y, Φ_aa, Φ_ay, Φ_yy] per coordinate.
    flow: Option<Vec<[FPoly; 6]>>,
    shift: Vec<f64>,
}

impl ImplicitCurve {
    pub fn new(poly: QPoly, flow: Option<&[QPoly]>, shift: Vec<f64>) -> Self {
        let flow = flow.map(|fl| {
            fl.iter()
                .map(|f| {
                    let fa = f.derivative(0);
                    let fy = f.derivative(1);
                    [
                        f.to_f64_poly(),
                        fa.to_f64_poly(),
                        fy.to_f64_poly(),
                        fa.derivative(0).to_f64_poly(),
                        fa.derivative(1).to_f64_poly(),
                        fy.derivative(1).to_f64_poly(),
                    ]
                })
                .collect()
        });
        ImplicitCurve { parts: Partials::new(&poly), poly, flow, shift }
    }

    /// Real y₀-roots at a given λ (exact isolation on the snapped λ).
    pub fn roots_at(&self, lambda: f64) -> Result<Vec<f64>> {
        let u = self.poly.eval_var(0, &snap(lambda)).to_univariate(1)?;
        if u.is_zero() || u.degree() == 0 {
            return Ok(Vec::new());
        }
        Ok(real_roots(&u)?.into_iter().map(|(r, _)| r).collect())
    }

    /// Sample at a regular point (λ, y₀); None where P_y vanishes.
    pub fn sample(&self, lambda: f64, y: f64, branch: usize) -> Option<CurveSample> {
        let v = [lambda, y];
        let pr = &self.parts;
        let py = pr.py.eval_f64(&v);
        let scale = pr.pa.eval_f64(&v).abs().max(py.abs()).max(1e-300);
        if py.abs() < 1e-12 * scale || py == 0.0 {
            return None;
        }
        let y1 = -pr.pa.eval_f64(&v) / py;
        let y2 = -(pr.paa.eval_f64(&v) + 2.0 * pr.pay.eval_f64(&v) * y1 + pr.pyy.eval_f64(&v) * y1 * y1) / py;
        let (point, d1, d2) = match &self.flow {
            None => (vec![lambda, y], vec![1.0, y1], vec![0.0, y2]),
            Some(fl) => {
                let mut pt = Vec::with_capacity(fl.len());
                let mut d1 = Vec::with_capacity(fl.len());
                let mut d2 = Vec::with_capacity(fl.len());
                for (k, f) in fl.iter().enumerate() {
                    let e = |i: usize| f[i].eval_f64(&v);
                    pt.push(e(0) - self.shift[k]);
                    d1.push(e(1) + e(2) * y1);
                    d2.push(e(3) + 2.0 * e(4) * y1 + e(5) * y1 * y1 + e(2) * y2);
                }
                (pt, d1, d2)
            }
        };
        Some(CurveSample { param: vec![lambda], point, d1: vec![d1], d2, branch, preimage: vec![lambda, y], labels: Vec::new() })
    }

    /// Newton on P(λ, ·) from a nearby y₀.
    pub fn continue_at(&self, lambda: f64, y_near: f64) -> Option<f64> {
        let mut y = y_near;
        let mut step = f64::INFINITY;
        for _ in 0..60 {
            let v = [lambda, y];
            let py = self.parts.py.eval_f64(&v);
            if py == 0.0 {
                return None;
            }
            step = self.parts.p.eval_f64(&v) / py;
            y -= step;
            if step.abs() <= 1e-15 * y.abs().max(1.0) {
                return Some(y);
            }
        }
        // rounding noise in P can keep the last steps above 1e-15
        (step.abs() <= 1e-11 * y.abs().max(1.0)).then_some(y)
    }

    /// Sweep λ over the grid; branches tracked by nearest-root matching.
    pub fn sweep(self: Arc<Self>, kind: CurveKind, t: f64, grid: &[f64]) -> Result<ParamCurve> {
        let mut curve = ParamCurve::new(kind, t, 2);
        // active branches: (id, last λ, last y, last slope)
        let mut active: Vec<(usize, f64, f64, f64)> = Vec::new();
        let mut next_id = 0;
        let mut prev_l: Option<f64> = None;
        for &l in grid {
            let roots = self.roots_at(l)?;
            let dl = prev_l.map_or(0.0, |p| l - p);
            let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
            for (ri, &r) in roots.iter().enumerate() {
                for (bi, b) in active.iter().enumerate() {
                    let pred = b.2 + b.3 * (l - b.1);
                    pairs.push(((r - pred).abs(), ri, bi));
                }
            }
            pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            let mut root_branch: Vec<Option<usize>> = vec![None; roots.len()];
            let mut used = vec![false; active.len()];
            for (dist, ri, bi) in pairs {
                if root_branch[ri].is_some() || used[bi] {
                    continue;
                }
                let tol = 0.1 * (1.0 + active[bi].3.abs()) * dl.abs().max(1e-9) * 10.0;
                if dist <= tol.max(1e-6) {
                    root_branch[ri] = Some(bi);
                    used[bi] = true;
                }
            }
            let mut next_active = Vec::new();
            for (ri, &r) in roots.iter().enumerate() {
                let id = match root_branch[ri] {
                    Some(bi) => active[bi].0,
                    None => {
                        next_id += 1;
                        next_id - 1
                    }
                };
                let slope = match self.sample(l, r, id) {
                    Some(s) => {
                        let sl = -self.parts.pa.eval_f64(&[l, r]) / self.parts.py.eval_f64(&[l, r]);
                        curve.samples.push(s);
                        sl
                    }
                    None => 0.0,
                };
                next_active.push((id, l, r, if slope.is_finite() { slope } else { 0.0 }));
            }
            active = next_active;
            prev_l = Some(l);
        }
        curve.evaluator = Some(self);
        Ok(curve)
    }
}

impl CurveEval for ImplicitCurve {
    fn eval(&self, lambda: f64, near: &CurveSample) -> Option<CurveSample> {
        let y = self.continue_at(lambda, near.preimage[1])?;
        self.sample(lambda, y, near.branch)
    }
}

/// Level surface {x : f = c, f′ = 0} at time t, all branches, swept by x₀.
pub fn level_surface_curve(fam: &ActionFamily, c: f64, t: f64, grid: &[f64], noise: &NoiseTerms) -> Result<ParamCurve> {
    let p = pre_level_polynomial(fam, c, t, noise)?;
    let flow = flow_at(fam, &snap(t))?;
    let ic = Arc::new(ImplicitCurve::new(p, Some(&flow), noise.p_f64()));
    ic.sweep(CurveKind::LevelSurface, t, grid)
}

/// Pre-Maxwell polynomial and its samples in the pre-image plane.
#[derive(Clone, Debug)]
pub struct PreMaxwell {
    pub poly: QPoly,
    pub curve: ParamCurve,
}

pub fn pre_maxwell_curve(fam: &ActionFamily, t: f64, grid: &[f64]) -> Result<PreMaxwell> {
    let poly = pre_maxwell_polynomial(fam, t)?;
    let ic = Arc::new(ImplicitCurve::new(poly.clone(), None, vec![0.0; 2]));
    let curve = ic.sweep(CurveKind::PreMaxwell, t, grid)?;
    Ok(PreMaxwell { poly, curve })
}

/// Real point of a planar polynomial curve.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurvePoint {
    pub a: f64,
    pub y: f64,
    /// Multiplicity of a as a root of the eliminant.
    pub multiplicity: u32,
}

/// Real singular points of P(a, y) = 0: common zeros of P, P_a, P_y.
pub fn singular_points(p: &QPoly) -> Result<Vec<CurvePoint>> {
    let pa = p.derivative(0);
    let py = p.derivative(1);
    if py.is_zero() {
        return Ok(Vec::new());
    }
    let r1 = resultant(p, &py, "y0")?;
    let r2 = resultant(&pa, &py, "y0")?;
    let g = gcd(&r1, &r2);
    let pf = p.to_f64_poly();
    let paf = pa.to_f64_poly();
    let pyf = py.to_f64_poly();
    let mut out = Vec::new();
    if g.is_constant() {
        return Ok(out);
    }
    for (a, m) in real_roots(&g.compact_vars().embed(&["x0".to_string()])?.to_univariate(0)?)? {
        // y is a double root of P(a, ·), hence a simple root of P_y(a, ·) generically
        for y in ys_at(&py, a)? {
            let v = [a, y];
            let s = coef_scale(&pf, &v);
            if pf.eval_f64(&v).abs() < 1e-8 * s && paf.eval_f64(&v).abs() < 1e-6 * s && pyf.eval_f64(&v).abs() < 1e-6 * s {
                out.push(CurvePoint { a, y, multiplicity: m });
            }
        }
    }
    Ok(out)
}

/// Real intersections of P = 0 and Q = 0 with the multiplicity of a in res_y(P, Q).
pub fn intersections(p: &QPoly, q: &QPoly) -> Result<Vec<CurvePoint>> {
    let r = resultant(p, q, "y0")?;
    let r = r.compact_vars();
    if r.is_zero() {
        return Err(Error::Degenerate("curves share a component".into()));
    }
    if r.is_constant() {
        return Ok(Vec::new());
    }
    let r = r.embed(&["x0".to_string()])?.to_univariate(0)?;
    let qf = q.to_f64_poly();
    let mut out = Vec::new();
    for (a, m) in real_roots(&r)? {
        let best = ys_at(p, a)?
            .into_iter()
            .map(|y| (qf.eval_f64(&[a, y]).abs(), y))
            .min_by(|u, v| u.0.partial_cmp(&v.0).unwrap());
        if let Some((_, y)) = best {
            out.push(CurvePoint { a, y, multiplicity: m });
        }
    }
    Ok(out)
}

fn ys_at(p: &QPoly, a: f64) -> Result<Vec<f64>> {
    let u: UniPoly<f64> = p.to_f64_poly().eval_var(0, &a).to_univariate(1)?;
    if u.degree() == 0 {
        return Ok(Vec::new());
    }
    Ok(real_roots_f64(&u)?.into_iter().map(|(r, _)| r).collect())
}

fn coef_scale(p: &FPoly, v: &[f64]) -> f64 {
    p.terms()
        .iter()
        .map(|(e, c)| c.abs() * e.iter().zip(v).map(|(k, x)| x.abs().powi(*k as i32)).product::<f64>())
        .fold(1e-300, f64::max)
}

/// Pre-caustic at a fixed time over (x₀, y₀).
pub fn pre_caustic_at(fam: &ActionFamily, t: f64) -> Result<QPoly> {
    let tq = positive_time(t)?;
    let det = crate::geometry::caustic::pre_caustic(fam)?;
    let d = fam.dim();
    det.eval_var(d, &tq).compact_vars().embed(&x0_names(d))
}
