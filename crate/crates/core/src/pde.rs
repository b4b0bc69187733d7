//! Heat equation under the Hopf–Cole transform: an explicit finite-difference solver and a
//! heat-kernel evaluation of −μ² ln u compared against the Hamilton–Jacobi value S_t.

use serde::Serialize;

use crate::action::{ActionFamily, NoiseTerms};
use crate::error::{Error, Result};
use crate::scalar::snap;
use crate::FPoly;

/// Uniform grid on [x_min, x_max] × [y_min, y_max] carrying u = exp(log_scale)·values.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid2D {
    pub x_min: f64,
    pub y_min: f64,
    pub nx: usize,
    pub ny: usize,
    pub h: f64,
    pub dtau: f64,
    pub mu: f64,
    pub t: f64,
    pub values: Vec<f64>,
    pub log_scale: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub x: [f64; 2],
    pub y: [f64; 2],
    pub h: f64,
    /// Time step; `None` picks 0.9 of the stability bound.
    pub dtau: Option<f64>,
}

impl Grid2D {
    pub fn coords(&self, i: usize, j: usize) -> (f64, f64) {
        (self.x_min + i as f64 * self.h, self.y_min + j as f64 * self.h)
    }

    pub fn ln_u(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.nx + i].ln() + self.log_scale
    }

    /// ln u at an arbitrary point by bilinear interpolation of ln u.
    pub fn ln_u_at(&self, x: f64, y: f64) -> Result<f64> {
        let fx = (x - self.x_min) / self.h;
        let fy = (y - self.y_min) / self.h;
        if !(fx >= 0.0 && fy >= 0.0 && fx <= (self.nx - 1) as f64 && fy <= (self.ny - 1) as f64) {
            return Err(Error::InvalidArgument(format!("({x}, {y}) is outside the grid")));
        }
        let (i, j) = ((fx as usize).min(self.nx - 2), (fy as usize).min(self.ny - 2));
        let (a, b) = (fx - i as f64, fy - j as f64);
        Ok((1.0 - a) * (1.0 - b) * self.ln_u(i, j)
            + a * (1.0 - b) * self.ln_u(i + 1, j)
            + (1.0 - a) * b * self.ln_u(i, j + 1)
            + a * b * self.ln_u(i + 1, j + 1))
    }
}

/// Explicit scheme for ∂u/∂τ = (μ²/2)Δu up to time t, from ln u₀ given pointwise.
/// Boundary values stay frozen at their initial data. The field is renormalised by its
/// running maximum so that only differences of ln u are carried.
pub fn solve_heat_with(ln_u0: impl Fn(f64, f64) -> f64, spec: &GridSpec, mu: f64, t: f64) -> Result<Grid2D> {
    if !(mu > 0.0 && t >= 0.0 && spec.h > 0.0) {
        return Err(Error::InvalidArgument("need μ > 0, t ≥ 0 and h > 0".into()));
    }
    let nx = ((spec.x[1] - spec.x[0]) / spec.h).round() as usize + 1;
    let ny = ((spec.y[1] - spec.y[0]) / spec.h).round() as usize + 1;
    if nx < 3 || ny < 3 {
        return Err(Error::InvalidArgument("grid needs at least 3 points per axis".into()));
    }
    let bound = spec.h * spec.h / (2.0 * mu * mu * 2.0);
    let dtau = spec.dtau.unwrap_or(0.9 * bound);
    if dtau > bound {
        return Err(Error::Numerical(format!("Δτ = {dtau} exceeds the stability bound {bound}")));
    }
    let steps = (t / dtau).ceil() as usize;
    let dtau = if steps == 0 { dtau } else { t / steps as f64 };
    let ln0: Vec<f64> = (0..nx * ny).map(|k| ln_u0(spec.x[0] + (k % nx) as f64 * spec.h, spec.y[0] + (k / nx) as f64 * spec.h)).collect();
    let log_scale = ln0.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !log_scale.is_finite() {
        return Err(Error::Numerical("initial data is not finite".into()));
    }
    let mut g = Grid2D { x_min: spec.x[0], y_min: spec.y[0], nx, ny, h: spec.h, dtau, mu, t, values: ln0.iter().map(|l| (l - log_scale).exp()).collect(), log_scale };
    let r = 0.5 * mu * mu * dtau / (spec.h * spec.h);
    let mut next = g.values.clone();
    for _ in 0..steps {
        for j in 1..ny - 1 {
            for i in 1..nx - 1 {
                let k = j * nx + i;
                let u = &g.values;
                next[k] = u[k] + r * (u[k - 1] + u[k + 1] + u[k - nx] + u[k + nx] - 4.0 * u[k]);
            }
        }
        std::mem::swap(&mut g.values, &mut next);
        let m = g.values.iter().copied().fold(0.0, f64::max);
        if !(m > 0.0) {
            return Err(Error::Numerical("u underflowed".into()));
        }
        if m < 1e-100 {
            g.values.iter_mut().for_each(|v| *v /= m);
            g.log_scale += m.ln();
        }
    }
    if g.values.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::Numerical("u lost positivity; refine the grid or shrink the domain".into()));
    }
    Ok(g)
}

/// Heat solution with u₀ = exp(−S₀/μ²).
pub fn solve_heat(fam: &ActionFamily, mu: f64, spec: &GridSpec, t: f64) -> Result<Grid2D> {
    if fam.dim() != 2 {
        return Err(Error::Unsupported("the finite-difference solver is planar".into()));
    }
    let s0 = initial_action(fam);
    solve_heat_with(|x, y| -s0.eval_f64(&[x, y]) / (mu * mu), spec, mu, t)
}

fn initial_action(fam: &ActionFamily) -> FPoly {
    let names: Vec<String> = fam.sym.names[..fam.dim()].to_vec();
    fam.scenario.s0.compact_vars().embed(&names).expect("S₀ depends on x₀ only").to_f64_poly()
}

/// Exact heat-kernel value of −μ² ln u(x, t) for u₀ = exp(−S₀/μ²):
/// u = (2πμ²t)^{−d/2} ∫ exp(−(S₀(x₀) + |x − x₀|²/2t)/μ²) dx₀, by log-sum-exp trapezoid
/// quadrature on a box around the low-action pre-images, grown until its boundary lies
/// at least 30μ² above the minimum or reaches the ridge of the basin.
pub fn hopf_cole_value(fam: &ActionFamily, x: &[f64], t: f64, mu: f64) -> Result<f64> {
    let d = fam.dim();
    if d != 2 {
        return Err(Error::Unsupported("heat-kernel quadrature is planar".into()));
    }
    let noise = NoiseTerms::zero(d);
    let cls = fam.classify_point(x, t, &noise)?;
    let s = cls.hj_value;
    let mu2 = mu * mu;
    let s0 = initial_action(fam);
    let action = |a: f64, b: f64| s0.eval_f64(&[a, b]) + ((x[0] - a).powi(2) + (x[1] - b).powi(2)) / (2.0 * t);
    let (xs, ts) = (x.iter().map(|v| snap(*v)).collect::<Vec<_>>(), snap(t));
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    let mut curv: f64 = 1.0 / t;
    for cp in cls.critical_points.iter().filter(|c| c.second_sign >= 0 && c.value <= s + 40.0 * mu2) {
        let pre: Vec<f64> = fam.reduced.chain_point(&snap(cp.root), &xs, &ts, &noise).iter().map(crate::scalar::rational_to_f64).collect();
        for k in 0..2 {
            lo[k] = lo[k].min(pre[k]);
            hi[k] = hi[k].max(pre[k]);
        }
        // largest second difference of the action around the pre-image sets the spacing
        let e = 1e-4;
        let c0 = action(pre[0], pre[1]);
        for (da, db) in [(e, 0.0), (0.0, e), (e, e), (e, -e)] {
            let c2 = (action(pre[0] + da, pre[1] + db) - 2.0 * c0 + action(pre[0] - da, pre[1] - db)) / (da * da + db * db);
            curv = curv.max(c2.abs());
        }
    }
    if !lo[0].is_finite() {
        return Err(Error::Numerical("no real pre-image".into()));
    }
    let sigma = mu / curv.sqrt();
    let step = sigma / 6.0;
    let boxed = |pad: f64| {
        let (ax, bx, ay, by) = (lo[0] - pad, hi[0] + pad, lo[1] - pad, hi[1] + pad);
        let nx = ((bx - ax) / step).ceil() as usize + 1;
        let ny = ((by - ay) / step).ceil() as usize + 1;
        (ax, ay, nx, ny, (bx - ax) / (nx - 1) as f64, (by - ay) / (ny - 1) as f64)
    };
    let edge_min = |pad: f64| {
        let (ax, ay, nx, ny, hx, hy) = boxed(pad);
        let (bx, by) = (ax + (nx - 1) as f64 * hx, ay + (ny - 1) as f64 * hy);
        let mut m = f64::INFINITY;
        for i in 0..nx {
            m = m.min(action(ax + i as f64 * hx, ay)).min(action(ax + i as f64 * hx, by));
        }
        for j in 0..ny {
            m = m.min(action(ax, ay + j as f64 * hy)).min(action(bx, ay + j as f64 * hy));
        }
        m
    };
    // Grow the box until its boundary clears 30μ²; when S₀ is unbounded below the
    // boundary minimum peaks on the ridge around the basin, and the box stops there.
    let mut pad = 6.0 * mu * t.sqrt();
    let mut best = (f64::NEG_INFINITY, pad);
    for _ in 0..40 {
        let e = edge_min(pad);
        if e >= s + 30.0 * mu2 {
            best = (e, pad);
            break;
        }
        if e < best.0 {
            break;
        }
        best = (e, pad);
        pad *= 1.25;
    }
    if best.0 < s + 10.0 * mu2 {
        return Err(Error::Numerical("heat-kernel integrand does not localise".into()));
    }
    let (ax, ay, nx, ny, hx, hy) = boxed(best.1);
    if nx * ny > 40_000_000 {
        return Err(Error::Numerical("quadrature box grew too large".into()));
    }
    let mut acc = 0.0;
    for j in 0..ny {
        let wy = if j == 0 || j == ny - 1 { 0.5 } else { 1.0 };
        for i in 0..nx {
            let wx = if i == 0 || i == nx - 1 { 0.5 } else { 1.0 };
            acc += wx * wy * (-(action(ax + i as f64 * hx, ay + j as f64 * hy) - s) / mu2).exp();
        }
    }
    let ln_u = -(2.0 * std::f64::consts::PI * mu2 * t).ln() + (hx * hy * acc).ln() - s / mu2;
    Ok(-mu2 * ln_u)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HopfColeRow {
    pub probe: [f64; 2],
    pub mu: f64,
    /// −μ² ln u.
    pub value: f64,
    pub s_t: f64,
    pub error: f64,
    /// e(μ)/e(μ′) for the next μ′ in the list.
    pub ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HopfColeTable {
    pub t: f64,
    pub rows: Vec<HopfColeRow>,
    /// Probes left out with the reason.
    pub excluded: Vec<([f64; 2], String)>,
    /// Per kept probe: slope of ln e against ln μ.
    pub orders: Vec<([f64; 2], f64)>,
}

/// Why a probe is too close to the caustic or Maxwell set for the Laplace asymptotics,
/// judged at the smallest μ: a second low minimum within 30μ² of the global one, or a
/// degenerate minimiser.
pub fn singular_reason(fam: &ActionFamily, x: &[f64], t: f64, mu: f64) -> Result<Option<String>> {
    let cls = fam.classify_point(x, t, &NoiseTerms::zero(fam.dim()))?;
    if cls.on_caustic || cls.on_maxwell {
        return Ok(Some(format!("on the {}", if cls.on_caustic { "caustic" } else { "Maxwell set" })));
    }
    let minima: Vec<_> = cls.critical_points.iter().filter(|c| c.second_sign > 0).collect();
    if minima.is_empty() {
        return Ok(Some("no real local minimiser".into()));
    }
    if let Some(m) = minima.first() {
        if m.multiplicity > 1 {
            return Ok(Some("degenerate minimiser".into()));
        }
    }
    if minima.len() > 1 && minima[1].value - minima[0].value < 30.0 * mu * mu {
        return Ok(Some(format!("within {:.3e} of the Maxwell set in action", minima[1].value - minima[0].value)));
    }
    if cls.critical_points.iter().any(|c| c.second_sign == 0) {
        return Ok(Some("near the caustic".into()));
    }
    Ok(None)
}

/// Error table e(μ) = |−μ² ln u − S_t| over probes and a μ-ladder.
pub fn hopf_cole_compare(fam: &ActionFamily, probes: &[[f64; 2]], t: f64, mus: &[f64]) -> Result<HopfColeTable> {
    if mus.is_empty() || mus.iter().any(|m| !(*m > 0.0)) {
        return Err(Error::InvalidArgument("μ values must be positive".into()));
    }
    if fam.scenario.epsilon != 0.0 {
        return Err(Error::Unsupported("Hopf–Cole check is for ε = 0".into()));
    }
    let mu_min = mus.iter().copied().fold(f64::INFINITY, f64::min);
    let mut rows = Vec::new();
    let mut excluded = Vec::new();
    let mut orders = Vec::new();
    for p in probes {
        if let Some(why) = singular_reason(fam, p, t, mu_min)? {
            excluded.push((*p, why));
            continue;
        }
        let s_t = fam.classify_point(p, t, &NoiseTerms::zero(2))?.hj_value;
        let start = rows.len();
        for &mu in mus {
            let value = hopf_cole_value(fam, p, t, mu)?;
            rows.push(HopfColeRow { probe: *p, mu, value, s_t, error: (value - s_t).abs(), ratio: None });
        }
        for k in start..rows.len() - 1 {
            rows[k].ratio = Some(rows[k].error / rows[k + 1].error);
        }
        let pts: Vec<(f64, f64)> = rows[start..].iter().map(|r| (r.mu.ln(), r.error.ln())).collect();
        orders.push((*p, slope(&pts)));
    }
    Ok(HopfColeTable { t, rows, excluded, orders })
}

fn slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Angle in degrees between v^μ = −μ²∇ln u and ∇S_t, both by central differences with step δ.
pub fn velocity_angle(fam: &ActionFamily, x: [f64; 2], t: f64, mu: f64, delta: f64) -> Result<f64> {
    let noise = NoiseTerms::zero(2);
    let mut v = [0.0; 2];
    let mut g = [0.0; 2];
    for k in 0..2 {
        let (mut a, mut b) = (x, x);
        a[k] += delta;
        b[k] -= delta;
        v[k] = (hopf_cole_value(fam, &a, t, mu)? - hopf_cole_value(fam, &b, t, mu)?) / (2.0 * delta);
        g[k] = (fam.classify_point(&a, t, &noise)?.hj_value - fam.classify_point(&b, t, &noise)?.hj_value) / (2.0 * delta);
    }
    let cos = (v[0] * g[0] + v[1] * g[1]) / (v[0].hypot(v[1]) * g[0].hypot(g[1]));
    Ok(cos.clamp(-1.0, 1.0).acos().to_degrees())
}
