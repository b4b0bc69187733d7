//! Stochastic action for linear noise `k_α(x) = x_α`, zero potential, and its
//! reduction to a univariate function of the first pre-image coordinate.
//!
//! Everything is stored multiplied by `t`, which keeps the action polynomial:
//!
//! ```text
//! t·A = Σ_α [ (x−x₀)²/2 + (x−x₀)p + p²/2 − t·x·q ]_α − t·r/2 + t·S₀(x₀)
//! ```
//!
//! with `p = ε∫₀ᵗW`, `q = εW(t)`, `r = ε²∫₀ᵗ|W|²` kept as symbols.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::resultant::det_scalar;
use crate::poly::{real_roots, Polynomial, UniPoly};
use crate::scalar::{close_rel, rational_to_f64, snap};
use crate::scenario::{x0_names, x_names, Scenario};
use crate::turbulence::wiener::{Functionals, WienerPath};
use crate::{QPoly, Rational};

/// Relative tolerance for equal action values.
pub const TOL_ACTION: f64 = 1e-9;
/// Critical points closer than this are one (degenerate) critical point.
pub const ROOT_SEPARATION: f64 = 1e-6;

/// Symbol layout shared by every polynomial built from the action family.
#[derive(Clone, Debug, PartialEq)]
pub struct Symbols {
    pub dim: usize,
    pub names: Vec<String>,
}

impl Symbols {
    pub fn new(dim: usize) -> Self {
        let mut names = x0_names(dim);
        names.extend(x_names(dim));
        names.push("t".into());
        for prefix in ["p", "q"] {
            names.extend((1..=dim).map(|a| format!("{prefix}{a}")));
        }
        names.push("r".into());
        Symbols { dim, names }
    }
    pub fn x0(&self, a: usize) -> usize {
        a
    }
    pub fn x(&self, a: usize) -> usize {
        self.dim + a
    }
    pub fn t(&self) -> usize {
        2 * self.dim
    }
    pub fn p(&self, a: usize) -> usize {
        2 * self.dim + 1 + a
    }
    pub fn q(&self, a: usize) -> usize {
        3 * self.dim + 1 + a
    }
    pub fn r(&self) -> usize {
        4 * self.dim + 1
    }
    pub fn var(&self, i: usize) -> QPoly {
        Polynomial::var(&self.names, i)
    }
}

/// Path functionals scaled by ε and snapped to exact rationals.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseTerms {
    /// ε∫₀ᵗW ds
    pub p: Vec<Rational>,
    /// εW(t)
    pub q: Vec<Rational>,
    /// ε²∫₀ᵗ|W|² ds
    pub r: Rational,
}

impl NoiseTerms {
    pub fn zero(dim: usize) -> Self {
        NoiseTerms { p: vec![Rational::zero(); dim], q: vec![Rational::zero(); dim], r: Rational::zero() }
    }

    pub fn from_functionals(epsilon: f64, f: &Functionals<f64>) -> Self {
        NoiseTerms {
            p: f.int_w.iter().map(|v| snap(epsilon * v)).collect(),
            q: f.w.iter().map(|v| snap(epsilon * v)).collect(),
            r: snap(epsilon * epsilon * f.int_w2),
        }
    }

    /// Noise at time `t` for a scenario; a path is required when ε > 0.
    pub fn for_scenario(scenario: &Scenario, path: Option<&WienerPath<f64>>, t: f64) -> Result<Self> {
        if !(t > 0.0) {
            return Err(Error::InvalidArgument(format!("time must be positive, got {t}")));
        }
        match path {
            _ if scenario.epsilon == 0.0 => Ok(Self::zero(scenario.dim)),
            None => Err(Error::InvalidArgument("epsilon > 0 needs a Wiener path".into())),
            Some(w) => {
                if w.dim() != scenario.dim {
                    return Err(Error::InvalidArgument(format!(
                        "path dimension {} does not match scenario dimension {}",
                        w.dim(),
                        scenario.dim
                    )));
                }
                Ok(Self::from_functionals(scenario.epsilon, &w.functionals_at(t)?))
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.p.iter().chain(&self.q).all(Zero::is_zero) && self.r.is_zero()
    }

    pub fn p_f64(&self) -> Vec<f64> {
        self.p.iter().map(rational_to_f64).collect()
    }

    pub fn q_f64(&self) -> Vec<f64> {
        self.q.iter().map(rational_to_f64).collect()
    }

    /// Values for the trailing `t, p, q, r` symbols.
    pub(crate) fn assignments(&self, sym: &Symbols, t: &Rational) -> Vec<(usize, Rational)> {
        let mut a = vec![(sym.t(), t.clone())];
        for k in 0..sym.dim {
            a.push((sym.p(k), self.p[k].clone()));
            a.push((sym.q(k), self.q[k].clone()));
        }
        a.push((sym.r(), self.r.clone()));
        a
    }
}

/// Scaled action `t·A`, flow map and reduced action for one scenario.
#[derive(Clone, Debug)]
pub struct ActionFamily {
    pub scenario: Scenario,
    pub sym: Symbols,
    /// t·A over [`Symbols::names`].
    pub scaled_action: QPoly,
    /// Φ_t(x₀) + p, i.e. x₀ + t∇S₀(x₀), one polynomial per coordinate.
    pub flow: Vec<QPoly>,
    pub reduced: ReducedAction,
}

impl ActionFamily {
    pub fn new(scenario: &Scenario) -> Result<Self> {
        let d = scenario.dim;
        let sym = Symbols::new(d);
        let s0 = scenario.s0.embed(&sym.names)?;
        let half = Rational::new(1.into(), 2.into());
        let t = sym.var(sym.t());
        let mut ta = &t * &s0;
        ta = &ta - &(&t * &sym.var(sym.r())).scale(&half);
        for a in 0..d {
            let dx = &sym.var(sym.x(a)) - &sym.var(sym.x0(a));
            let p = sym.var(sym.p(a));
            ta = &ta + &(&dx * &dx).scale(&half);
            ta = &ta + &(&dx * &p);
            ta = &ta + &(&p * &p).scale(&half);
            ta = &ta - &(&t * &(&sym.var(sym.x(a)) * &sym.var(sym.q(a))));
        }
        let flow = flow_polynomials(&ta, &sym)?;
        let reduced = reduce(&ta, &sym)?;
        Ok(ActionFamily { scenario: scenario.clone(), sym, scaled_action: ta, flow, reduced })
    }

    pub fn dim(&self) -> usize {
        self.sym.dim
    }

    /// Flow map x = Φ_t(x₀) including the noise shift.
    pub fn flow_map(&self, x0: &[f64], t: f64, noise: &NoiseTerms) -> Result<Vec<f64>> {
        let d = self.dim();
        if x0.len() != d {
            return Err(Error::InvalidArgument(format!("x0 needs {d} coordinates")));
        }
        if !(t >= 0.0) {
            return Err(Error::InvalidArgument(format!("time must be ≥ 0, got {t}")));
        }
        let mut vals = vec![0.0; self.sym.names.len()];
        vals[..d].copy_from_slice(x0);
        vals[self.sym.t()] = t;
        let p = noise.p_f64();
        Ok((0..d).map(|a| self.flow[a].eval_f64(&vals) - p[a]).collect())
    }

    /// Exact flow map.
    pub fn flow_map_exact(&self, x0: &[Rational], t: &Rational, noise: &NoiseTerms) -> Vec<Rational> {
        let d = self.dim();
        let mut vals = vec![Rational::zero(); self.sym.names.len()];
        vals[..d].clone_from_slice(x0);
        vals[self.sym.t()] = t.clone();
        (0..d).map(|a| self.flow[a].eval(&vals) - noise.p[a].clone()).collect()
    }
}

/// Solve ∂(tA)/∂x₀ = 0 for x: the equation is linear in x with coefficient −1.
fn flow_polynomials(ta: &QPoly, sym: &Symbols) -> Result<Vec<QPoly>> {
    let mut out = Vec::with_capacity(sym.dim);
    for a in 0..sym.dim {
        let g = ta.derivative(sym.x0(a));
        let xi = sym.x(a);
        let c = g.coeffs_in(xi);
        if c.len() != 2 || c[1].constant_value().is_none() {
            return Err(Error::Numerical("critical-point equation not linear in x".into()));
        }
        let k = c[1].constant_value().unwrap();
        let mut x = c[0].scale(&(-Rational::one() / k));
        // add back p: the stored flow excludes the noise shift
        x = &x + &sym.var(sym.p(a));
        if x.involves(sym.p(a)) || (0..sym.dim).any(|b| x.involves(sym.x(b))) {
            return Err(Error::Numerical("flow depends on noise beyond a shift".into()));
        }
        out.push(x);
    }
    Ok(out)
}

/// Reduced action with the elimination chain that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedAction {
    pub sym: Symbols,
    /// t·f over the family symbols; involves x₀¹ (the pre-parameter λ) but no other x₀ coordinate.
    pub scaled: QPoly,
    /// `chain[α−1]` is x₀^α in terms of x₀¹, x, t and the noise symbols, α = 2..d.
    pub chain: Vec<QPoly>,
    /// Coefficient of x₀^α in ∂(tA)/∂x₀^α during its elimination step.
    pub pivots: Vec<Rational>,
    coeffs: Vec<QPoly>,
}

/// Eliminate x₀ᵈ, …, x₀² from t·A through their own critical-point equations.
pub fn reduce(ta: &QPoly, sym: &Symbols) -> Result<ReducedAction> {
    let d = sym.dim;
    let mut cur = ta.clone();
    let mut exprs: Vec<(usize, QPoly)> = Vec::new();
    let mut pivots = vec![Rational::zero(); d.saturating_sub(1)];
    for a in (1..d).rev() {
        let i = sym.x0(a);
        let g = cur.derivative(i);
        if g.degree(i) > 1 {
            return Err(Error::Unsupported(format!(
                "{} enters its critical-point equation nonlinearly",
                sym.names[i]
            )));
        }
        let c = g.coeffs_in(i);
        let lin = c.get(1).cloned().unwrap_or_else(|| Polynomial::zero(&sym.names));
        let piv = lin.constant_value().ok_or_else(|| {
            Error::Unsupported(format!("elimination pivot for {} is not constant: {lin}", sym.names[i]))
        })?;
        if piv.is_zero() {
            return Err(Error::SingularChain(format!("zero pivot for {}", sym.names[i])));
        }
        let e = c[0].scale(&(-Rational::one() / piv.clone()));
        cur = cur.substitute(i, &e);
        pivots[a - 1] = piv;
        exprs.push((a, e));
    }
    // resolve the chain so each entry only involves x₀¹
    let mut chain = vec![Polynomial::zero(&sym.names); d.saturating_sub(1)];
    for k in 0..exprs.len() {
        let (a, mut e) = exprs[k].clone();
        for (b, eb) in exprs[k + 1..].iter() {
            e = e.substitute(sym.x0(*b), eb);
        }
        chain[a - 1] = e;
    }
    if (1..d).any(|a| cur.involves(sym.x0(a))) {
        return Err(Error::Numerical("elimination left higher coordinates behind".into()));
    }
    if cur.degree(0) == 0 {
        return Err(Error::Degenerate("reduced action is constant in x0".into()));
    }
    let coeffs = cur.coeffs_in(0);
    Ok(ReducedAction { sym: sym.clone(), scaled: cur, chain, pivots, coeffs })
}

/// One real critical point of f.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriticalPoint {
    pub root: f64,
    pub value: f64,
    /// Sign of f″ at the root (0 when it vanishes to rounding).
    pub second_sign: i8,
    pub multiplicity: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointClassification {
    /// Sorted by value, ties toward smaller |root|.
    pub critical_points: Vec<CriticalPoint>,
    pub minimiser: f64,
    pub hj_value: f64,
    /// Distinct real pre-images (clusters within [`ROOT_SEPARATION`]).
    pub preimages: usize,
    pub on_caustic: bool,
    pub on_maxwell: bool,
    pub is_cool: bool,
    /// Equal-action pair when on the Maxwell set.
    pub maxwell_pair: Option<(f64, f64)>,
}

impl ReducedAction {
    pub fn dim(&self) -> usize {
        self.sym.dim
    }

    fn point_values(&self, x: &[Rational], t: &Rational, noise: &NoiseTerms) -> Vec<(usize, Rational)> {
        let mut a: Vec<(usize, Rational)> = (0..self.dim()).map(|k| (self.sym.x(k), x[k].clone())).collect();
        a.extend(noise.assignments(&self.sym, t));
        a
    }

    /// f_{(x,t)}(λ) as an exact univariate polynomial in λ.
    pub fn at(&self, x: &[Rational], t: &Rational, noise: &NoiseTerms) -> Result<UniPoly<Rational>> {
        if !t.is_positive() {
            return Err(Error::InvalidArgument("time must be positive".into()));
        }
        if x.len() != self.dim() {
            return Err(Error::InvalidArgument(format!("x needs {} coordinates", self.dim())));
        }
        let vals = self.point_values(x, t, noise);
        let inv_t = Rational::one() / t.clone();
        let c = self
            .coeffs
            .iter()
            .map(|p| p.eval_vars(&vals).constant_value().unwrap_or_else(Rational::zero) * inv_t.clone())
            .collect();
        Ok(UniPoly::new(c))
    }

    /// Float evaluation of the coefficients of f_{(x,t)}(λ).
    pub fn at_f64(&self, x: &[f64], t: f64, noise: &NoiseTerms) -> UniPoly<f64> {
        let mut vals = vec![0.0; self.sym.names.len()];
        for k in 0..self.dim() {
            vals[self.sym.x(k)] = x[k];
            vals[self.sym.p(k)] = rational_to_f64(&noise.p[k]);
            vals[self.sym.q(k)] = rational_to_f64(&noise.q[k]);
        }
        vals[self.sym.t()] = t;
        vals[self.sym.r()] = rational_to_f64(&noise.r);
        UniPoly::new(self.coeffs.iter().map(|p| p.eval_f64(&vals) / t).collect())
    }

    /// Substituting the chain into every ∂(tA)/∂x₀^α, α ≥ 2; all entries are zero for a sound chain.
    pub fn chain_residuals(&self, ta: &QPoly) -> Vec<QPoly> {
        (1..self.dim())
            .map(|a| {
                let mut g = ta.derivative(self.sym.x0(a));
                for b in 1..self.dim() {
                    g = g.substitute(self.sym.x0(b), &self.chain[b - 1]);
                }
                g
            })
            .collect()
    }

    /// Higher pre-image coordinates on the chain for given λ.
    pub fn chain_point(&self, lambda: &Rational, x: &[Rational], t: &Rational, noise: &NoiseTerms) -> Vec<Rational> {
        let mut vals = self.point_values(x, t, noise);
        vals.push((0, lambda.clone()));
        let mut out = vec![lambda.clone()];
        for e in &self.chain {
            out.push(e.eval_vars(&vals).constant_value().unwrap_or_else(Rational::zero));
        }
        out
    }

    /// Real critical points of f, sorted by value.
    pub fn critical_points(&self, x: &[f64], t: f64, noise: &NoiseTerms) -> Result<Vec<CriticalPoint>> {
        let xs: Vec<Rational> = x.iter().map(|v| snap(*v)).collect();
        let f = self.at(&xs, &snap(t), noise)?;
        critical_points_of(&f)
    }

    pub fn classify(&self, x: &[f64], t: f64, noise: &NoiseTerms) -> Result<PointClassification> {
        classify_critical_points(self.critical_points(x, t, noise)?)
    }
}

/// Real roots of f′ with f-values, sorted by value then |root|.
pub fn critical_points_of(f: &UniPoly<Rational>) -> Result<Vec<CriticalPoint>> {
    let fp = f.derivative();
    if fp.is_zero() {
        return Err(Error::Degenerate("f′ vanishes identically".into()));
    }
    let ff = f.to_f64();
    let f2 = fp.derivative().to_f64();
    let mut out: Vec<CriticalPoint> = real_roots(&fp)?
        .into_iter()
        .map(|(r, m)| {
            let s = f2.eval_f64(r);
            let scale = f2.coeffs().iter().fold(0.0f64, |a, c| a.max(c.abs())).max(1.0);
            let second_sign = if m > 1 || s.abs() < 1e-12 * scale { 0 } else { s.signum() as i8 };
            CriticalPoint { root: r, value: ff.eval_f64(r), second_sign, multiplicity: m }
        })
        .collect();
    out.sort_by(|a, b| {
        a.value.partial_cmp(&b.value).unwrap().then(a.root.abs().partial_cmp(&b.root.abs()).unwrap())
    });
    Ok(out)
}

fn classify_critical_points(cps: Vec<CriticalPoint>) -> Result<PointClassification> {
    if cps.is_empty() {
        return Err(Error::Degenerate("no real critical points".into()));
    }
    // cluster roots by position
    let mut by_root: Vec<&CriticalPoint> = cps.iter().collect();
    by_root.sort_by(|a, b| a.root.partial_cmp(&b.root).unwrap());
    let mut clusters: Vec<(f64, f64, u32)> = Vec::new(); // (root, value, multiplicity)
    for c in by_root {
        match clusters.last_mut() {
            Some(last) if (c.root - last.0).abs() <= ROOT_SEPARATION * 1f64.max(c.root.abs()) => {
                last.2 += c.multiplicity;
            }
            _ => clusters.push((c.root, c.value, c.multiplicity)),
        }
    }
    let min = cps.iter().map(|c| c.value).fold(f64::INFINITY, f64::min);
    let minimiser = cps
        .iter()
        .filter(|c| close_rel(c.value, min, TOL_ACTION))
        .min_by(|a, b| a.root.abs().partial_cmp(&b.root.abs()).unwrap())
        .unwrap()
        .root;
    let degenerate: Vec<&(f64, f64, u32)> = clusters.iter().filter(|c| c.2 >= 2).collect();
    let on_caustic = !degenerate.is_empty();
    let mut pair = None;
    'outer: for i in 0..clusters.len() {
        for j in i + 1..clusters.len() {
            if close_rel(clusters[i].1, clusters[j].1, TOL_ACTION) {
                let better = match pair {
                    None => true,
                    Some((a, _)) => clusters[i].1 < value_of(&clusters, a),
                };
                if better {
                    pair = Some((clusters[i].0, clusters[j].0));
                }
                if close_rel(clusters[i].1, min, TOL_ACTION) {
                    break 'outer;
                }
            }
        }
    }
    let on_maxwell = !on_caustic && pair.is_some();
    let is_cool = if on_caustic {
        degenerate.iter().any(|c| close_rel(c.1, min, TOL_ACTION))
    } else if let Some((a, _)) = pair {
        close_rel(value_of(&clusters, a), min, TOL_ACTION)
    } else {
        false
    };
    Ok(PointClassification {
        preimages: clusters.len(),
        minimiser,
        hj_value: min,
        on_caustic,
        on_maxwell,
        is_cool,
        maxwell_pair: if on_maxwell { pair } else { None },
        critical_points: cps,
    })
}

fn value_of(clusters: &[(f64, f64, u32)], root: f64) -> f64 {
    clusters.iter().find(|c| c.0 == root).map(|c| c.1).unwrap_or(f64::INFINITY)
}

/// A(x₀, x, t) with t and the path functionals substituted; a polynomial in (x₀, x).
pub fn build_action(scenario: &Scenario, path: Option<&WienerPath<f64>>, t: f64) -> Result<QPoly> {
    let fam = ActionFamily::new(scenario)?;
    let noise = NoiseTerms::for_scenario(scenario, path, t)?;
    fam.action_at(&snap(t), &noise)
}

impl ActionFamily {
    /// Unscaled action at fixed time and noise, over (x₀, x).
    pub fn action_at(&self, t: &Rational, noise: &NoiseTerms) -> Result<QPoly> {
        if !t.is_positive() {
            return Err(Error::InvalidArgument("time must be positive".into()));
        }
        let a = self.scaled_action.eval_vars(&noise.assignments(&self.sym, t));
        let d = self.dim();
        let keep: Vec<String> = self.sym.names[..2 * d].to_vec();
        let a = a.compact_vars().embed(&keep)?;
        Ok(a.scale(&(Rational::one() / t.clone())))
    }

    pub fn classify_point(&self, x: &[f64], t: f64, noise: &NoiseTerms) -> Result<PointClassification> {
        self.reduced.classify(x, t, noise)
    }

    /// Lemma-style factorisation det ∇²_{x₀}A = f″ · Π chain pivots / t^{d−1}, both sides exact.
    pub fn hessian_factor_at(
        &self,
        x: &[f64],
        t: f64,
        noise: &NoiseTerms,
        lambda: f64,
    ) -> Result<(Rational, Rational)> {
        let d = self.dim();
        let (xs, tq, lq) = (x.iter().map(|v| snap(*v)).collect::<Vec<_>>(), snap(t), snap(lambda));
        if self.reduced.pivots.iter().any(Zero::is_zero) {
            return Err(Error::SingularChain("vanishing chain pivot".into()));
        }
        let x0 = self.reduced.chain_point(&lq, &xs, &tq, noise);
        let mut vals = vec![Rational::zero(); self.sym.names.len()];
        for a in 0..d {
            vals[self.sym.x0(a)] = x0[a].clone();
            vals[self.sym.x(a)] = xs[a].clone();
            vals[self.sym.p(a)] = noise.p[a].clone();
            vals[self.sym.q(a)] = noise.q[a].clone();
        }
        vals[self.sym.t()] = tq.clone();
        vals[self.sym.r()] = noise.r.clone();
        let inv_t = Rational::one() / tq.clone();
        let hess: Vec<Vec<Rational>> = (0..d)
            .map(|a| {
                (0..d)
                    .map(|b| {
                        self.scaled_action.derivative(a).derivative(b).eval(&vals) * inv_t.clone()
                    })
                    .collect()
            })
            .collect();
        let lhs = det_scalar(hess);
        let f = self.reduced.at(&xs, &tq, noise)?;
        let f2 = f.derivative().derivative().eval(&lq);
        let rhs = self.reduced.pivots.iter().fold(f2, |acc, p| acc * p.clone() * inv_t.clone());
        Ok((lhs, rhs))
    }

    /// Factorisation check at every real critical point of f at x.
    pub fn hessian_factor_check(
        &self,
        x: &[f64],
        t: f64,
        noise: &NoiseTerms,
    ) -> Result<Vec<(f64, Rational, Rational)>> {
        self.reduced
            .critical_points(x, t, noise)?
            .into_iter()
            .map(|c| self.hessian_factor_at(x, t, noise, c.root).map(|(l, r)| (c.root, l, r)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_with_vars;
    use crate::scalar::rat;

    fn cusp() -> ActionFamily {
        ActionFamily::new(&Scenario::builtin("generic_cusp").unwrap()).unwrap()
    }

    #[test]
    fn deterministic_action_matches_hand_form() {
        let sc = Scenario::builtin("generic_cusp").unwrap();
        let a = build_action(&sc, None, 1.0).unwrap();
        let v: Vec<String> = ["x0", "y0", "x", "y"].iter().map(|s| s.to_string()).collect();
        let want = parse_with_vars("((x-x0)^2 + (y-y0)^2)/2 + x0^2*y0/2", &v).unwrap();
        assert_eq!(a, want);
    }

    #[test]
    fn ramp_noise_terms() {
        let sc = Scenario::builtin("generic_cusp").unwrap().with_epsilon(1.0).unwrap();
        let path = WienerPath::<f64>::from_fn(2, 1.0, 1 << 12, |s| vec![s, 0.0]).unwrap();
        let noisy = build_action(&sc, Some(&path), 1.0).unwrap();
        let clean = build_action(&Scenario::builtin("generic_cusp").unwrap(), None, 1.0).unwrap();
        let diff = &noisy - &clean;
        let v: Vec<String> = ["x0", "y0", "x", "y"].iter().map(|s| s.to_string()).collect();
        let want = parse_with_vars("(x - x0)/2 - x - 1/6 + 1/8", &v).unwrap();
        for (e, c) in diff.terms() {
            let w = want.terms().get(e).cloned().unwrap_or_else(Rational::zero);
            assert!((rational_to_f64(c) - rational_to_f64(&w)).abs() < 1e-7, "{e:?}");
        }
        assert!(build_action(&sc, None, 1.0).is_err());
        assert!(build_action(&sc, Some(&path), 0.0).is_err());
    }

    #[test]
    fn cusp_reduction_and_chain() {
        let fam = cusp();
        let sym = &fam.sym;
        let want = parse_with_vars("(x - x0)^2/2 + t*x0^2*y/2 - t^2*x0^4/8 + t*x0^2*p2/2", &sym.names).unwrap();
        let red = &fam.reduced;
        // noise-free part of t·f
        let det = red.scaled.eval_vars(&[(sym.p(0), rat(0, 1)), (sym.p(1), rat(0, 1))]);
        let want0 = want.eval_vars(&[(sym.p(1), rat(0, 1))]);
        let q = &det - &want0;
        assert!(q.terms().keys().all(|e| e[sym.q(0)] > 0 || e[sym.q(1)] > 0 || e[sym.r()] > 0), "{q}");
        for r in red.chain_residuals(&fam.scaled_action) {
            assert!(r.is_zero());
        }
        assert_eq!(red.pivots, vec![rat(1, 1)]);
    }

    #[test]
    fn cusp_critical_points() {
        let fam = cusp();
        let z = NoiseTerms::zero(2);
        let cps = fam.reduced.critical_points(&[0.0, 1.0], 1.0, &z).unwrap();
        let roots: Vec<f64> = cps.iter().map(|c| c.root).collect();
        assert_eq!(roots, vec![0.0, -2.0, 2.0]);
        let vals: Vec<f64> = cps.iter().map(|c| c.value).collect();
        assert_eq!(vals, vec![0.0, 2.0, 2.0]);
        let cps = fam.reduced.critical_points(&[0.0, 0.0], 1.0, &z).unwrap();
        assert!((cps[1].root.abs() - 2f64.sqrt()).abs() < 1e-15);
        assert!((cps[1].value - 0.5).abs() < 1e-15);
        assert_eq!(fam.reduced.critical_points(&[0.0, -5.0], 1.0, &z).unwrap().len(), 1);
    }

    #[test]
    fn cusp_classification() {
        let fam = cusp();
        let z = NoiseTerms::zero(2);
        let c = fam.classify_point(&[0.0, 1.0], 1.0, &z).unwrap();
        assert!(c.on_maxwell && !c.is_cool && !c.on_caustic);
        assert_eq!(c.minimiser, 0.0);
        assert_eq!(c.preimages, 3);
        let c = fam.classify_point(&[0.0, -2.0], 1.0, &z).unwrap();
        assert!(!c.on_maxwell);
        assert_eq!(c.preimages, 1);
        let c = fam.classify_point(&[0.0, -1.0], 1.0, &z).unwrap();
        assert!(c.on_caustic && !c.on_maxwell);
    }

    #[test]
    fn flow_and_round_trip() {
        let fam = cusp();
        let z = NoiseTerms::zero(2);
        assert_eq!(fam.flow_map(&[1.0, 0.0], 1.0, &z).unwrap(), vec![1.0, 0.5]);
        let cps = fam.reduced.critical_points(&[1.0, 0.5], 1.0, &z).unwrap();
        assert!(cps.iter().any(|c| (c.root - 1.0).abs() < 1e-12));
    }

    #[test]
    fn cusp_hessian_factor() {
        let fam = cusp();
        let z = NoiseTerms::zero(2);
        for lam in [-1.5, -0.3, 0.0, 0.7, 2.0] {
            let (l, r) = fam.hessian_factor_at(&[0.25, 0.5], 0.75, &z, lam).unwrap();
            assert_eq!(l, r);
        }
    }

    #[test]
    fn nonconstant_pivot_is_unsupported() {
        let sc = Scenario::new("xyz", 3, "x0*y0*z0", 0.0).unwrap();
        assert!(matches!(ActionFamily::new(&sc), Err(Error::Unsupported(_))));
    }
}
