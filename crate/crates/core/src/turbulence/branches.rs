use num_traits::Zero;
use serde::Serialize;

use crate::action::{ActionFamily, NoiseTerms};
use crate::error::{Error, Result};
use crate::geometry::CausticFamily;
use crate::poly::gcd::normalize;
use crate::poly::{gcd, real_roots, real_roots_f64, resultant, substitute_all, Polynomial, RationalFunction};
use crate::scalar::snap;
use crate::scenario::x_names;
use crate::{QPoly, Rational};

type QRf = RationalFunction<Rational>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BranchKind {
    Cusped,
    Orthogonal,
    ZeroSpeed,
    Subcaustic,
}

impl BranchKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            BranchKind::Cusped => "cusped",
            BranchKind::Orthogonal => "orthogonal",
            BranchKind::ZeroSpeed => "zero-speed",
            BranchKind::Subcaustic => "subcaustic",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "cusped" => Ok(BranchKind::Cusped),
            "orthogonal" => Ok(BranchKind::Orthogonal),
            "zero-speed" => Ok(BranchKind::ZeroSpeed),
            "subcaustic" => Ok(BranchKind::Subcaustic),
            _ => Err(Error::InvalidArgument(format!("unknown branch '{s}'"))),
        }
    }
}

/// Deterministic action along the caustic, F⁰(λ) = f⁰_{(x⁰(λ),t)}(λ₁), symbolic in λ and t.
#[derive(Clone, Debug)]
pub struct CausticAction {
    pub caustic: CausticFamily,
    pub f0: QRf,
}

impl CausticAction {
    pub fn new(fam: &ActionFamily, cf: &CausticFamily) -> Result<Self> {
        let f0 = along_caustic(fam, cf, |g| Ok(g.clone()))?;
        Ok(CausticAction { caustic: cf.clone(), f0 })
    }

    /// Z(λ) = F⁰(λ) − x⁰(λ)·εW(t) at a fixed time.
    pub fn z_at(&self, t: &Rational, noise: &NoiseTerms) -> QRf {
        let ti = self.caustic.t_index();
        let mut z = self.f0.eval_var(ti, t);
        for (k, xk) in self.caustic.x.iter().enumerate() {
            if !noise.q[k].is_zero() {
                z = z.sub(&xk.eval_var(ti, t).scale(&noise.q[k]));
            }
        }
        z
    }

    /// λ-equations: numerators of ∂Z/∂λ_k.
    pub fn equations(&self, t: &Rational, noise: &NoiseTerms) -> Vec<QPoly> {
        let z = self.z_at(t, noise);
        (0..self.caustic.dim - 1).map(|k| z.derivative(k).reduced().num).collect()
    }

    /// Deterministic caustic point and its pre-image at λ.
    pub fn point(&self, lambda: &[f64], t: f64) -> (Vec<f64>, Vec<f64>) {
        let d = self.caustic.dim;
        let mut v = vec![0.0; d + 1];
        v[..lambda.len()].copy_from_slice(lambda);
        v[d] = t;
        let x: Vec<f64> = self.caustic.x.iter().map(|r| r.eval_f64(&v)).collect();
        let mut pre = lambda.to_vec();
        pre.push(self.caustic.last.eval_f64(&v));
        (x, pre)
    }

    /// ∇ₓf⁰ − εW at the caustic point: velocity (x − x₀)/t minus the noise forcing.
    pub fn relative_velocity(&self, lambda: &[f64], t: f64, noise: &NoiseTerms) -> Vec<f64> {
        let (x, pre) = self.point(lambda, t);
        let q = noise.q_f64();
        (0..x.len()).map(|k| (x[k] - pre[k]) / t - q[k]).collect()
    }
}

/// Noise-free reduced action, transformed by `op` (e.g. differentiated in x₀¹), divided by t
/// and evaluated at the deterministic caustic point x⁰(λ, t) with x₀¹ = λ₁.
pub(crate) fn along_caustic(fam: &ActionFamily, cf: &CausticFamily, op: impl Fn(&QPoly) -> Result<QPoly>) -> Result<QRf> {
    let sym = &fam.sym;
    let d = fam.dim();
    let mut zero: Vec<(usize, Rational)> = Vec::new();
    for k in 0..d {
        zero.push((sym.p(k), Rational::zero()));
        zero.push((sym.q(k), Rational::zero()));
    }
    zero.push((sym.r(), Rational::zero()));
    let g = op(&fam.reduced.scaled.eval_vars(&zero))?;
    let mut all = cf.vars.clone();
    all.extend(x_names(d));
    let g = g.compact_vars().embed(&all)?;
    let subs: Vec<(usize, QRf)> = (0..d).map(|k| (cf.vars.len() + k, cf.x[k].embed(&all))).collect();
    let tf = substitute_all(&g, &subs);
    let t = Polynomial::var(&all, cf.t_index());
    let f = QRf::new(tf.num, &tf.den * &t).reduced();
    Ok(QRf::new(f.num.compact_vars().embed(&cf.vars)?, f.den.compact_vars().embed(&cf.vars)?))
}

/// One real solution of the λ-equations.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LambdaRoot {
    pub kind: BranchKind,
    pub lambda: Vec<f64>,
}

/// Factored λ-equations at one time with their real roots.
#[derive(Clone, Debug)]
pub struct LambdaBranches {
    pub t: f64,
    /// Full branch polynomial in λ₁ (2-D: the λ-equation; 3-D: res over λ₂).
    pub full: QPoly,
    /// Named factors of `full`: "cusped", "orthogonal" (shared with zero-speed roots),
    /// "subcaustic", and in 3-D "spurious" (from the vanishing leading coefficient).
    pub factors: Vec<(&'static str, QPoly)>,
    pub roots: Vec<LambdaRoot>,
}

impl LambdaBranches {
    pub fn of_kind(&self, kind: BranchKind) -> Vec<&LambdaRoot> {
        self.roots.iter().filter(|r| r.kind == kind).collect()
    }
}

/// Zero-speed tolerance on |∇ₓf⁰ − εW|.
pub const TOL_ZERO_SPEED: f64 = 1e-8;

/// Solve the stochastic λ-equations at time t and split the roots into branches.
pub fn solve_lambda_branches(ca: &CausticAction, t: f64, noise: &NoiseTerms) -> Result<LambdaBranches> {
    if !(t > 0.0) {
        return Err(Error::InvalidArgument(format!("time must be positive, got {t}")));
    }
    let tq = snap(t);
    let eqs = ca.equations(&tq, noise);
    match ca.caustic.dim {
        2 => planar_branches(ca, t, &tq, &eqs[0], noise),
        3 => butterfly_branches(ca, t, &tq, &eqs, noise),
        d => Err(Error::Unsupported(format!("dimension {d}"))),
    }
}

fn univariate_roots(p: &QPoly) -> Result<Vec<f64>> {
    let p = p.compact_vars();
    if p.is_zero() {
        return Err(Error::Degenerate("λ-equation vanishes identically".into()));
    }
    if p.is_constant() {
        return Ok(Vec::new());
    }
    let name = p.vars()[0].clone();
    let u = p.embed(&[name])?.to_univariate(0)?;
    Ok(real_roots(&u)?.into_iter().map(|(r, _)| r).collect())
}

fn label(ca: &CausticAction, lambda: &[f64], t: f64, noise: &NoiseTerms) -> BranchKind {
    let v = ca.relative_velocity(lambda, t, noise);
    let (x, pre) = ca.point(lambda, t);
    let scale = x.iter().zip(&pre).map(|(a, b)| ((a - b) / t).abs()).fold(1.0, f64::max);
    if v.iter().map(|c| c * c).sum::<f64>().sqrt() <= TOL_ZERO_SPEED * scale {
        BranchKind::ZeroSpeed
    } else {
        BranchKind::Orthogonal
    }
}

fn planar_branches(ca: &CausticAction, t: f64, tq: &Rational, n: &QPoly, noise: &NoiseTerms) -> Result<LambdaBranches> {
    let k = ca.caustic.cusp_factor()?.eval_var(ca.caustic.t_index(), tq);
    let k = normalize(&k.compact_vars().embed(n.vars())?);
    let (cusped, other) = if k.is_constant() {
        (k.clone(), n.clone())
    } else {
        match n.div_exact(&k) {
            Some(o) => (k.clone(), o),
            None => (Polynomial::one(n.vars()), n.clone()),
        }
    };
    let mut roots = Vec::new();
    if !cusped.is_constant() {
        for r in univariate_roots(&cusped)? {
            roots.push(LambdaRoot { kind: BranchKind::Cusped, lambda: vec![r] });
        }
    }
    for r in univariate_roots(&other)? {
        roots.push(LambdaRoot { kind: label(ca, &[r], t, noise), lambda: vec![r] });
    }
    Ok(LambdaBranches {
        t,
        full: n.clone(),
        factors: vec![("cusped", cusped), ("orthogonal", other)],
        roots,
    })
}

/// 3-D: R(λ₁) = res_λ₂(E₁, E₂) splits into a spurious factor (common with the leading
/// coefficient of E₂ in λ₂), the subcaustic factor gcd(R, res_λ₂(E₂, Sc)) and the rest.
fn butterfly_branches(ca: &CausticAction, t: f64, tq: &Rational, eqs: &[QPoly], noise: &NoiseTerms) -> Result<LambdaBranches> {
    let vars = eqs[0].vars().to_vec();
    let (e1, e2) = (&eqs[0], &eqs[1]);
    let r = resultant(e1, e2, &vars[1])?;
    if r.is_zero() {
        return Err(Error::Degenerate("λ-equations share a component".into()));
    }
    let lc = e2.leading_coeff_in(1);
    let spurious = normalize(&gcd(&r, &lc));
    let rest = r.div_exact(&spurious).unwrap_or_else(|| r.clone());
    let sc = ca.caustic.subcaustic_factor()?.eval_var(ca.caustic.t_index(), tq);
    let sc = sc.compact_vars().embed(&vars)?;
    let sub = normalize(&gcd(&rest, &resultant(e2, &sc, &vars[1])?));
    let other = rest.div_exact(&sub).unwrap_or(rest);

    let e1f = e1.to_f64_poly();
    let e2f = e2.to_f64_poly();
    let scf = sc.to_f64_poly();
    // λ₂ from a curve through λ₁, choosing the root that minimises the other equation
    let lambda2 = |l1: f64, curve: &crate::FPoly, check: &crate::FPoly| -> Result<Option<f64>> {
        let u = curve.eval_var(0, &l1).to_univariate(1)?;
        if u.degree() == 0 {
            return Ok(None);
        }
        Ok(real_roots_f64(&u)?
            .into_iter()
            .map(|(l2, _)| (check.eval_f64(&[l1, l2, 0.0, 0.0]).abs(), l2))
            .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap())
            .map(|(_, l2)| l2))
    };
    let mut roots = Vec::new();
    if !sub.is_constant() {
        for l1 in univariate_roots(&sub)? {
            if let Some(l2) = lambda2(l1, &scf, &e2f)? {
                roots.push(LambdaRoot { kind: BranchKind::Subcaustic, lambda: vec![l1, l2] });
            }
        }
    }
    if !other.is_constant() {
        for l1 in univariate_roots(&other)? {
            if let Some(l2) = lambda2(l1, &e2f, &e1f)? {
                let lam = [l1, l2];
                roots.push(LambdaRoot { kind: label(ca, &lam, t, noise), lambda: lam.to_vec() });
            }
        }
    }
    Ok(LambdaBranches {
        t,
        full: r,
        factors: vec![("spurious", spurious), ("subcaustic", sub), ("orthogonal", other)],
        roots,
    })
}

/// |∂Z/∂λ_k| at a root, scaled by the coefficient magnitude.
pub fn equation_residual(ca: &CausticAction, lambda: &[f64], t: f64, noise: &NoiseTerms) -> f64 {
    let eqs = ca.equations(&snap(t), noise);
    let mut v = vec![0.0; ca.caustic.vars.len()];
    v[..lambda.len()].copy_from_slice(lambda);
    eqs.iter()
        .map(|e| {
            let f = e.to_f64_poly();
            let scale = f
                .terms()
                .iter()
                .map(|(ex, c)| c.abs() * ex.iter().zip(&v).map(|(k, x)| x.abs().powi(*k as i32)).product::<f64>())
                .fold(1e-300, f64::max);
            f.eval_f64(&v).abs() / scale
        })
        .fold(0.0, f64::max)
}

/// Dot-product form (∇ₓf⁰ − εW)·∂x⁰/∂λ_k of the λ-equations.
pub fn dot_form(ca: &CausticAction, lambda: &[f64], t: f64, noise: &NoiseTerms) -> Vec<f64> {
    let v = ca.relative_velocity(lambda, t, noise);
    let d = ca.caustic.dim;
    let mut vals = vec![0.0; d + 1];
    vals[..lambda.len()].copy_from_slice(lambda);
    vals[d] = t;
    ca.caustic
        .dx
        .iter()
        .map(|row| row.iter().zip(&v).map(|(r, vk)| r.eval_f64(&vals) * vk).sum())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::Scenario;

    fn setup(name: &str) -> (ActionFamily, CausticAction) {
        let f = ActionFamily::new(&Scenario::builtin(name).unwrap()).unwrap();
        let cf = CausticFamily::new(&f).unwrap();
        let ca = CausticAction::new(&f, &cf).unwrap();
        (f, ca)
    }

    fn noise3(w: [f64; 3], eps: f64) -> NoiseTerms {
        let f = crate::turbulence::Functionals { w: w.to_vec(), int_w: vec![0.1, -0.2, 0.3], int_w2: 0.5 };
        NoiseTerms::from_functionals(eps, &f)
    }

    #[test]
    fn cusp_branches_noise_free() {
        let (_, ca) = setup("generic_cusp");
        let b = solve_lambda_branches(&ca, 1.0, &NoiseTerms::zero(2)).unwrap();
        let cusped: Vec<f64> = b.of_kind(BranchKind::Cusped).iter().map(|r| r.lambda[0]).collect();
        assert_eq!(cusped, vec![0.0]);
        let mut other: Vec<f64> = b.roots.iter().filter(|r| r.kind != BranchKind::Cusped).map(|r| r.lambda[0]).collect();
        other.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(other.len(), 3);
        assert!((other[0] + 0.5f64.sqrt()).abs() < 1e-12 && other[1].abs() < 1e-12 && (other[2] - 0.5f64.sqrt()).abs() < 1e-12);
        // cusped · other reconstructs the full λ-equation
        let prod = &b.factors[0].1 * &b.factors[1].1;
        assert!(prod.div_exact(&b.full).map_or(false, |q| q.is_constant()));
    }

    #[test]
    fn cusp_f0_closed_form() {
        let (_, ca) = setup("generic_cusp");
        // F⁰ = λ⁴t(4λ²t² − 3)/8 on the deterministic caustic
        let v = [0.7, 0.0, 1.3];
        let (l, t): (f64, f64) = (0.7, 1.3);
        let expect = l.powi(4) * t * (4.0 * l * l * t * t - 3.0) / 8.0;
        assert!((ca.f0.eval_f64(&v) - expect).abs() < 1e-12, "{}", ca.f0.eval_f64(&v));
    }

    #[test]
    fn noisy_roots_satisfy_both_forms() {
        let (_, ca) = setup("generic_cusp");
        let f = crate::turbulence::Functionals { w: vec![0.8, -1.1], int_w: vec![0.2, 0.4], int_w2: 0.9 };
        let noise = NoiseTerms::from_functionals(0.1, &f);
        let b = solve_lambda_branches(&ca, 2.0, &noise).unwrap();
        assert!(!b.roots.is_empty());
        for r in &b.roots {
            assert!(equation_residual(&ca, &r.lambda, 2.0, &noise) < 1e-8);
            assert!(dot_form(&ca, &r.lambda, 2.0, &noise)[0].abs() < 1e-8);
        }
    }

    #[test]
    fn butterfly_cubic_and_subcaustic() {
        let (_, ca) = setup("butterfly");
        let w = [0.4, 0.3, 0.5];
        let eps = 0.5;
        let b = solve_lambda_branches(&ca, 1.0, &noise3(w, eps)).unwrap();
        let other = &b.factors.iter().find(|f| f.0 == "orthogonal").unwrap().1;
        let vars = other.vars().to_vec();
        let (w2, w3) = (snap(eps * w[1]), snap(eps * w[2]));
        let l = Polynomial::var(&vars, 0);
        let cubic = &(&l.pow(3) - &l.scale(&(w3 * Rational::from_integer(3.into())))) + &Polynomial::constant(&vars, w2 * Rational::from_integer(2.into()));
        assert_eq!(normalize(other), normalize(&cubic));
        // real-root count of the cubic matches the sign of its discriminant
        let (p, q) = (-3.0 * eps * w[2], 2.0 * eps * w[1]);
        let disc = -4.0 * p * p * p - 27.0 * q * q;
        let n_other = b.roots.iter().filter(|r| matches!(r.kind, BranchKind::Orthogonal | BranchKind::ZeroSpeed)).count();
        assert_eq!(n_other, if disc > 0.0 { 3 } else { 1 });
        for r in &b.roots {
            assert!(equation_residual(&ca, &r.lambda, 1.0, &noise3(w, eps)) < 1e-8, "{r:?}");
        }
        assert!(b.roots.iter().any(|r| r.kind == BranchKind::Subcaustic));
    }
}
