use std::sync::Arc;

use serde::Serialize;

use crate::action::{critical_points_of, ActionFamily, CriticalPoint, NoiseTerms, ROOT_SEPARATION};
use crate::error::{Error, Result};
use crate::geometry::curve::{CurveKind, CurveSample, Label, ParamCurve};
use crate::geometry::implicit::{flow_at, pre_maxwell_polynomial, ImplicitCurve};
use crate::poly::{factor_multiplicity, real_roots};
use crate::scalar::{close_rel, snap};
use crate::scenario::x_names;
use crate::{QPoly, Rational};

/// t·f at fixed time and noise over (x₀, x, y[, z]).
pub fn scaled_reduced_at(fam: &ActionFamily, t: &Rational, noise: &NoiseTerms) -> Result<QPoly> {
    let g = fam.reduced.scaled.eval_vars(&noise.assignments(&fam.sym, t));
    let mut vars = vec!["x0".to_string()];
    vars.extend(x_names(fam.dim()));
    g.compact_vars().embed(&vars)
}

/// D(t) = D_c(D_λ(tf − c)) over the image coordinates.
pub fn double_discriminant_at(fam: &ActionFamily, t: f64, noise: &NoiseTerms) -> Result<QPoly> {
    if !(t > 0.0) {
        return Err(Error::InvalidArgument(format!("time must be positive, got {t}")));
    }
    let g = scaled_reduced_at(fam, &snap(t), noise)?;
    let d = crate::poly::double_discriminant(&g, "x0", "c")?;
    Ok(d.compact_vars().embed(&x_names(fam.dim()))?)
}

/// Algebraic Maxwell data at one time and its real-Maxwell samples.
#[derive(Clone, Debug)]
pub struct MaxwellSet {
    pub t: f64,
    pub double_discriminant: QPoly,
    /// Multiplicity-3 factor C_t (the caustic).
    pub caustic_factor: QPoly,
    /// Multiplicity-2 factor B_t (Maxwell and Maxwell–Klein).
    pub b: QPoly,
    /// Points of B_t = 0 with two real equal-action pre-images.
    pub curve: ParamCurve,
    /// Points of B_t = 0 rejected by the real-pair test.
    pub klein_points: Vec<Vec<f64>>,
}

/// Factor D(t), check the multiplicity pattern {3, 2}, and sample B_t = 0 on horizontal lines.
pub fn maxwell_set(fam: &ActionFamily, t: f64, noise: &NoiseTerms, y_lines: &[f64]) -> Result<MaxwellSet> {
    if fam.dim() != 2 {
        return Err(Error::Unsupported("Maxwell sampling is planar".into()));
    }
    let d = double_discriminant_at(fam, t, noise)?;
    let fm = factor_multiplicity(&d, &[])?;
    let mut ms = fm.multiplicities();
    ms.sort_unstable();
    if ms != vec![2, 3] {
        return Err(Error::Structural(format!("double discriminant multiplicities {ms:?}, expected [2, 3]")));
    }
    let c = fm.factor_with(3).unwrap().clone();
    let b = fm.factor_with(2).unwrap().clone();
    let bx = b.derivative(0).to_f64_poly();
    let by = b.derivative(1).to_f64_poly();
    let mut curve = ParamCurve::new(CurveKind::Maxwell, t, 2);
    let mut klein = Vec::new();
    for &y in y_lines {
        let u = b.eval_var(1, &snap(y)).to_univariate(0)?;
        if u.degree() == 0 {
            continue;
        }
        for (k, (x, _)) in real_roots(&u)?.into_iter().enumerate() {
            let cls = fam.classify_point(&[x, y], t, noise)?;
            let Some((l1, l2)) = cls.maxwell_pair.filter(|_| cls.on_maxwell) else {
                klein.push(vec![x, y]);
                continue;
            };
            let v = [x, y];
            let gx = bx.eval_f64(&v);
            let dxdy = if gx != 0.0 { -by.eval_f64(&v) / gx } else { f64::INFINITY };
            curve.samples.push(CurveSample {
                param: vec![y],
                point: vec![x, y],
                d1: vec![vec![dxdy, 1.0]],
                d2: vec![0.0, 0.0],
                branch: k,
                preimage: vec![l1, l2],
                labels: vec![if cls.is_cool { Label::Cool } else { Label::Hot }],
            });
        }
    }
    Ok(MaxwellSet { t, double_discriminant: d, caustic_factor: c, b, curve, klein_points: klein })
}

/// Maxwell curve pre-parameterised by the pre-Maxwell set: each sample is the image of a
/// pre-Maxwell point whose equal-action partner is real. Each image point is swept twice,
/// once from each pre-image.
pub fn maxwell_curve(fam: &ActionFamily, t: f64, grid: &[f64], noise: &NoiseTerms) -> Result<ParamCurve> {
    let pm = pre_maxwell_polynomial(fam, t)?;
    let flow = flow_at(fam, &snap(t))?;
    let ic = Arc::new(ImplicitCurve::new(pm, Some(&flow), noise.p_f64()));
    let mut curve = ic.sweep(CurveKind::Maxwell, t, grid)?;
    let mut keep = Vec::with_capacity(curve.samples.len());
    for mut s in std::mem::take(&mut curve.samples) {
        let cps = fam.reduced.critical_points(&s.point, t, noise)?;
        let own = fam.reduced.at_f64(&s.point, t, noise).eval_f64(s.param[0]);
        if partner_root(&cps, s.param[0], own).is_none() {
            continue;
        }
        let min = cps.iter().map(|c| c.value).fold(own, f64::min);
        s.labels.push(if close_rel(own, min, 1e-7) { Label::Cool } else { Label::Hot });
        keep.push(s);
    }
    curve.samples = keep;
    Ok(curve)
}

/// Partner pre-image with equal action at x = Φ_t(x₀) and a distinct λ.
pub fn maxwell_partner(fam: &ActionFamily, x0: &[f64], t: f64, noise: &NoiseTerms) -> Result<Vec<f64>> {
    let x = fam.flow_map(x0, t, noise)?;
    let xs: Vec<Rational> = x.iter().map(|v| snap(*v)).collect();
    let tq = snap(t);
    let f = fam.reduced.at(&xs, &tq, noise)?;
    let own = f.to_f64().eval_f64(x0[0]);
    match partner_root(&critical_points_of(&f)?, x0[0], own) {
        Some(l) => {
            let chain = fam.reduced.chain_point(&snap(l), &xs, &tq, noise);
            Ok(chain.iter().map(crate::scalar::rational_to_f64).collect())
        }
        None => Err(Error::Numerical("no real equal-action partner pre-image".into())),
    }
}

/// Critical point other than λ with the same action value.
fn partner_root(cps: &[CriticalPoint], lambda: f64, own: f64) -> Option<f64> {
    cps.iter()
        .filter(|c| (c.root - lambda).abs() > ROOT_SEPARATION.max(1e-4 * lambda.abs()))
        .map(|c| ((c.value - own).abs() / own.abs().max(1.0), c.root))
        .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap())
        .filter(|(gap, _)| *gap < 1e-6)
        .map(|(_, l)| l)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalKind {
    Level,
    Maxwell,
}

/// Normal to the pre-level surface (n_H) or the pre-Maxwell set (n_M) at x₀.
///
/// n_H = (I + t∇²S₀)·v and n_M = (I + t∇²S₀)·(v − v̌), where v = ∇ₓA at the pre-image
/// and v̌ the same at the equal-action partner.
pub fn normal(fam: &ActionFamily, x0: &[f64], t: f64, which: NormalKind, noise: &NoiseTerms) -> Result<Vec<f64>> {
    let d = fam.dim();
    let x = fam.flow_map(x0, t, noise)?;
    let vel = |pre: &[f64]| -> Vec<f64> {
        let p = noise.p_f64();
        let q = noise.q_f64();
        (0..d).map(|a| (x[a] - pre[a] + p[a]) / t - q[a]).collect()
    };
    let mut v = vel(x0);
    if which == NormalKind::Maxwell {
        let partner = maxwell_partner(fam, x0, t, noise)?;
        let w = vel(&partner);
        for a in 0..d {
            v[a] -= w[a];
        }
    }
    let h = flow_jacobian(fam, x0, t);
    Ok((0..d).map(|i| (0..d).map(|j| h[i][j] * v[j]).sum()).collect())
}

/// DΦ_t = I + t∇²S₀ at x₀ (symmetric).
pub fn flow_jacobian(fam: &ActionFamily, x0: &[f64], t: f64) -> Vec<Vec<f64>> {
    let d = fam.dim();
    let mut vals = vec![0.0; fam.sym.names.len()];
    vals[..d].copy_from_slice(x0);
    vals[fam.sym.t()] = t;
    (0..d).map(|i| (0..d).map(|j| fam.flow[i].derivative(j).eval_f64(&vals)).collect()).collect()
}

/// |a × b| / (|a||b|) for planar vectors; 0 means parallel.
pub fn tangency_residual(a: &[f64], b: &[f64]) -> f64 {
    let cross = a[0] * b[1] - a[1] * b[0];
    let n = a[0].hypot(a[1]) * b[0].hypot(b[1]);
    if n == 0.0 {
        return f64::INFINITY;
    }
    cross.abs() / n
}
