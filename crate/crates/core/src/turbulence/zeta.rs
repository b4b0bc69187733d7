use serde::Serialize;

use crate::action::{ActionFamily, NoiseTerms};
use crate::error::{Error, Result};
use crate::geometry::caustic::reduced_is_cool;
use crate::poly::{RationalFunction, UniPoly};
use crate::scalar::{close_rel, rational_to_f64, snap};
use crate::turbulence::branches::{solve_lambda_branches, BranchKind, CausticAction, LambdaRoot};
use crate::turbulence::WienerPath;
use crate::{FPoly, Rational};

/// Agreement demanded between the closed form and the direct evaluation.
pub const TOL_ZETA_AGREE: f64 = 1e-9;

/// ζ at one grid time. `lambda` is `None` when the branch has no real root there.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZetaSample {
    pub t: f64,
    pub lambda: Option<Vec<f64>>,
    /// F⁰(λ) − x⁰(λ)·εW + ε²W·∫W − (ε²/2)∫|W|² − c, or its small-ε truncation.
    pub closed: Option<f64>,
    /// f_{(x_t(λ),t)}(λ₁) − c from the reduced action.
    pub direct: Option<f64>,
    pub cool: Option<bool>,
}

impl ZetaSample {
    pub fn is_gap(&self) -> bool {
        self.closed.is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZetaPath {
    pub branch: BranchKind,
    pub c: f64,
    pub small_epsilon: bool,
    pub samples: Vec<ZetaSample>,
}

impl ZetaPath {
    /// Largest relative gap between the two evaluations over the path.
    pub fn max_disagreement(&self) -> f64 {
        self.samples
            .iter()
            .filter_map(|s| Some((s.closed?, s.direct?)))
            .map(|(a, b)| (a - b).abs() / 1f64.max(a.abs()).max(b.abs()))
            .fold(0.0, f64::max)
    }

    pub fn gaps(&self) -> usize {
        self.samples.iter().filter(|s| s.is_gap()).count()
    }
}

/// Closed-form ζ at a root: F⁰(λ) − x⁰(λ)·q + q·p − r/2 − c with (p, q, r) the scaled path functionals.
pub fn zeta_closed(ca: &CausticAction, lambda: &[f64], t: f64, noise: &NoiseTerms, c: f64, small_epsilon: bool) -> f64 {
    let d = ca.caustic.dim;
    let mut v = vec![0.0; d + 1];
    v[..lambda.len()].copy_from_slice(lambda);
    v[d] = t;
    let (x, _) = ca.point(lambda, t);
    let (p, q) = (noise.p_f64(), noise.q_f64());
    let mut z = ca.f0.eval_f64(&v) - c;
    for k in 0..d {
        z -= x[k] * q[k];
    }
    if !small_epsilon {
        for k in 0..d {
            z += q[k] * p[k];
        }
        z -= 0.5 * rational_to_f64(&noise.r);
    }
    z
}

/// Direct ζ: the reduced action at the noisy caustic point x⁰(λ) − p, evaluated at λ₁.
pub fn zeta_direct(fam: &ActionFamily, ca: &CausticAction, lambda: &[f64], t: f64, noise: &NoiseTerms, c: f64) -> Result<(f64, Vec<f64>)> {
    let (v, xe, _) = direct_with_action(fam, ca, lambda, t, noise, c)?;
    Ok((v, xe))
}

fn direct_with_action(
    fam: &ActionFamily,
    ca: &CausticAction,
    lambda: &[f64],
    t: f64,
    noise: &NoiseTerms,
    c: f64,
) -> Result<(f64, Vec<f64>, UniPoly<Rational>)> {
    let (x, _) = ca.point(lambda, t);
    let xe: Vec<Rational> = x.iter().zip(&noise.p).map(|(a, p)| snap(*a) - p).collect();
    let f = fam.reduced.at(&xe, &snap(t), noise)?;
    let l = snap(lambda[0]);
    Ok((rational_to_f64(&f.eval(&l)) - c, xe.iter().map(rational_to_f64).collect(), f))
}

/// Root of `kind` nearest to `prev`, or of smallest norm when there is no history.
pub fn pick_root<'a>(roots: &[&'a LambdaRoot], prev: Option<&[f64]>) -> Option<&'a LambdaRoot> {
    let key = |r: &LambdaRoot| match prev {
        Some(p) => r.lambda.iter().zip(p).map(|(a, b)| (a - b) * (a - b)).sum::<f64>(),
        None => r.lambda.iter().map(|a| a * a).sum::<f64>(),
    };
    roots.iter().copied().min_by(|a, b| key(a).total_cmp(&key(b)))
}

/// Deterministic cusped root λ(t), continued by Newton on the cusp factor with an exact fallback.
pub(crate) struct CuspTracker {
    k: FPoly,
    dk: FPoly,
    exact: crate::QPoly,
    f0: RationalFunction<f64>,
    x: Vec<RationalFunction<f64>>,
    lambda: Option<f64>,
}

impl CuspTracker {
    pub(crate) fn new(ca: &CausticAction) -> Result<Self> {
        let k = ca.caustic.cusp_factor()?;
        if k.compact_vars().degree_in(&ca.caustic.vars[0]) == 0 {
            return Err(Error::Unsupported("scenario has no cusped branch".into()));
        }
        let kf = k.to_f64_poly();
        let to_f = |r: &RationalFunction<crate::Rational>| r.map_coeffs(rational_to_f64);
        Ok(CuspTracker { dk: kf.derivative(0), k: kf, exact: k, f0: to_f(&ca.f0), x: ca.caustic.x.iter().map(to_f).collect(), lambda: None })
    }

    pub(crate) fn root(&mut self, ca: &CausticAction, t: f64) -> Result<Option<f64>> {
        let d = ca.caustic.dim;
        let mut v = vec![0.0; d + 1];
        v[d] = t;
        if let Some(mut l) = self.lambda {
            for _ in 0..30 {
                v[0] = l;
                let step = self.k.eval_f64(&v) / self.dk.eval_f64(&v);
                l -= step;
                if !l.is_finite() {
                    break;
                }
                if step.abs() <= 1e-14 * l.abs().max(1.0) {
                    if (l - self.lambda.unwrap()).abs() < 0.1 * self.lambda.unwrap().abs().max(1.0) {
                        self.lambda = Some(l);
                        return Ok(self.lambda);
                    }
                    break;
                }
            }
        }
        let roots = ca.caustic.cusps_at(&self.exact, &snap(t))?;
        let key = |r: &f64| match self.lambda {
            Some(p) => (r - p).abs(),
            None => r.abs(),
        };
        self.lambda = roots.into_iter().min_by(|a, b| key(a).total_cmp(&key(b)));
        Ok(self.lambda)
    }

    /// F⁰(λ(t), t) and x⁰(λ(t), t).
    pub(crate) fn deterministic(&self, t: f64, lambda: f64, d: usize) -> (f64, Vec<f64>) {
        let mut v = vec![0.0; d + 1];
        v[0] = lambda;
        v[d] = t;
        (self.f0.eval_f64(&v), self.x.iter().map(|r| r.eval_f64(&v)).collect())
    }
}

/// ζ along one λ-branch over a time grid. Times where the branch has no real root
/// are recorded as gaps; the closed form and the direct evaluation are both stored
/// and must agree unless the small-ε truncation is requested.
pub fn zeta_path(
    fam: &ActionFamily,
    ca: &CausticAction,
    branch: BranchKind,
    c: f64,
    path: Option<&WienerPath<f64>>,
    times: &[f64],
    small_epsilon: bool,
) -> Result<ZetaPath> {
    // the cusped root is noise-free, so it is continued once instead of re-solved
    let mut tracker = match branch {
        BranchKind::Cusped if ca.caustic.dim == 2 => Some(CuspTracker::new(ca)?),
        _ => None,
    };
    let mut prev: Option<Vec<f64>> = None;
    let mut samples = Vec::with_capacity(times.len());
    for &t in times {
        let noise = NoiseTerms::for_scenario(&fam.scenario, path, t)?;
        let gap = ZetaSample { t, lambda: None, closed: None, direct: None, cool: None };
        let lambda = match tracker.as_mut() {
            Some(tr) => match tr.root(ca, t) {
                Ok(Some(l)) => vec![l],
                Ok(None) | Err(Error::Degenerate(_)) | Err(Error::Numerical(_)) => {
                    samples.push(gap);
                    continue;
                }
                Err(e) => return Err(e),
            },
            None => {
                let b = match solve_lambda_branches(ca, t, &noise) {
                    Ok(b) => b,
                    Err(Error::Degenerate(_)) | Err(Error::Numerical(_)) => {
                        samples.push(gap);
                        continue;
                    }
                    Err(e) => return Err(e),
                };
                match pick_root(&b.of_kind(branch), prev.as_deref()) {
                    Some(root) => root.lambda.clone(),
                    None => {
                        samples.push(gap);
                        continue;
                    }
                }
            }
        };
        let closed = zeta_closed(ca, &lambda, t, &noise, c, small_epsilon);
        let (direct, _, f) = direct_with_action(fam, ca, &lambda, t, &noise, c)?;
        if !small_epsilon && !close_rel(closed, direct, TOL_ZETA_AGREE) {
            return Err(Error::Numerical(format!(
                "zeta closed form {closed} and direct value {direct} disagree at t = {t}"
            )));
        }
        let cool = reduced_is_cool(&f, lambda[0]).ok();
        prev = Some(lambda.clone());
        samples.push(ZetaSample { t, lambda: Some(lambda), closed: Some(closed), direct: Some(direct), cool });
    }
    Ok(ZetaPath { branch, c, small_epsilon, samples })
}

/// One bracketed zero of ζ.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TurbulentTime {
    pub t_lo: f64,
    pub t_hi: f64,
    /// Linear interpolation of the root inside [t_lo, t_hi].
    pub t: f64,
    /// Coolness of the bracketing sample nearer the root.
    pub cool: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TurbulenceReport {
    pub branch: BranchKind,
    pub zeros: Vec<TurbulentTime>,
    pub count: usize,
    pub cool_count: usize,
    /// ζ vanishes at every sample, so no isolated zeros exist.
    pub degenerate: bool,
}

/// Sign-change scan over a sampled path. Exact zeros are skipped; gaps split the scan.
pub fn sign_changes(samples: &[(f64, Option<f64>)]) -> Vec<(usize, usize, f64)> {
    let mut out = Vec::new();
    let mut last: Option<(usize, f64)> = None;
    for (i, (t, v)) in samples.iter().enumerate() {
        let Some(v) = *v else {
            last = None;
            continue;
        };
        if v == 0.0 {
            continue;
        }
        if let Some((j, u)) = last {
            if (u < 0.0) != (v < 0.0) {
                let tj = samples[j].0;
                out.push((j, i, tj + (t - tj) * u / (u - v)));
            }
        }
        last = Some((i, v));
    }
    out
}

pub fn find_turbulent_times(z: &ZetaPath) -> TurbulenceReport {
    let vals: Vec<(f64, Option<f64>)> = z.samples.iter().map(|s| (s.t, s.closed)).collect();
    let present: Vec<f64> = vals.iter().filter_map(|v| v.1).collect();
    let degenerate = !present.is_empty() && present.iter().all(|v| *v == 0.0);
    let zeros: Vec<TurbulentTime> = sign_changes(&vals)
        .into_iter()
        .map(|(j, i, t)| {
            let near = if t - vals[j].0 <= vals[i].0 - t { j } else { i };
            TurbulentTime { t_lo: vals[j].0, t_hi: vals[i].0, t, cool: z.samples[near].cool }
        })
        .collect();
    let cool_count = zeros.iter().filter(|z| z.cool == Some(true)).count();
    TurbulenceReport { branch: z.branch, count: zeros.len(), cool_count, zeros, degenerate }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::CausticFamily;
    use crate::scenario::Scenario;

    fn setup(name: &str, eps: f64) -> (ActionFamily, CausticAction) {
        let mut sc = Scenario::builtin(name).unwrap();
        sc.epsilon = eps;
        let f = ActionFamily::new(&sc).unwrap();
        let cf = CausticFamily::new(&f).unwrap();
        let ca = CausticAction::new(&f, &cf).unwrap();
        (f, ca)
    }

    #[test]
    fn ramp_at_the_cusp() {
        let (f, ca) = setup("generic_cusp", 0.1);
        let w = WienerPath::from_fn(2, 1.0, 1000, |s| vec![0.0, s]).unwrap();
        let z = zeta_path(&f, &ca, BranchKind::Cusped, 0.0, Some(&w), &[1.0], false).unwrap();
        let s = &z.samples[0];
        assert_eq!(s.lambda.as_deref(), Some(&[0.0][..]));
        // εW₂/t + ε²(W·∫W − ½∫|W|²) = 0.1 + 0.01/3, up to trapezoid error in ∫|W|²
        assert!((s.closed.unwrap() - (0.1 + 0.01 / 3.0)).abs() < 1e-8);
        assert!(close_rel(s.closed.unwrap(), s.direct.unwrap(), 1e-12));
    }

    #[test]
    fn noise_free_cusp_is_degenerate() {
        let (f, ca) = setup("generic_cusp", 0.0);
        let times: Vec<f64> = (1..=20).map(|i| i as f64 * 0.5).collect();
        let z = zeta_path(&f, &ca, BranchKind::Cusped, 0.0, None, &times, false).unwrap();
        assert!(z.samples.iter().all(|s| s.closed == Some(0.0)));
        let r = find_turbulent_times(&z);
        assert!(r.degenerate && r.count == 0);
    }

    #[test]
    fn closed_and_direct_agree_on_branches() {
        let times: Vec<f64> = (1..=12).map(|i| 0.25 * i as f64).collect();
        for (name, branch) in [("generic_cusp", BranchKind::Orthogonal), ("polynomial_swallowtail", BranchKind::Cusped), ("butterfly", BranchKind::Subcaustic)] {
            let (f, ca) = setup(name, 0.3);
            let w = WienerPath::simulate(f.dim(), 3.0, 3000, 11).unwrap();
            let z = zeta_path(&f, &ca, branch, 0.2, Some(&w), &times, false).unwrap();
            assert!(z.gaps() < times.len(), "{name}");
            assert!(z.max_disagreement() < TOL_ZETA_AGREE, "{name}");
        }
    }

    #[test]
    fn sign_change_scan() {
        let r = sign_changes(&[(1.0, Some(1.0)), (2.0, Some(-1.0))]);
        assert_eq!(r.len(), 1);
        assert!((r[0].2 - 1.5).abs() < 1e-15);
        // exact zeros are stepped over, gaps reset the scan
        assert_eq!(sign_changes(&[(0.0, Some(1.0)), (1.0, Some(0.0)), (2.0, Some(-2.0))]).len(), 1);
        assert!(sign_changes(&[(0.0, Some(1.0)), (1.0, None), (2.0, Some(-2.0))]).is_empty());
    }
}
