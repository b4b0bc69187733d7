use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::action::ActionFamily;
use crate::error::{Error, Result};
use crate::geometry::CausticFamily;
use crate::poly::{resultant, RationalFunction, UniPoly};
use crate::scalar::{rational_to_f64, snap};
use crate::turbulence::branches::along_caustic;
use crate::{QPoly, Rational};

/// f‴ and f⁗ along the planar caustic as polynomials in (λ, t). The noise only adds
/// terms of degree ≤ 1 in x₀¹ and shifts the caustic by −ε∫W, so both are noise-free.
#[derive(Clone, Debug)]
pub struct EtaProcess {
    pub f3: QPoly,
    pub f4: QPoly,
    /// Signed resultant in λ of `f3` and `f4`, a polynomial in t.
    pub rho: UniPoly<Rational>,
    /// Leading coefficients in λ of `f3` and `f4`; a zero of either is a degree collapse.
    leading: [UniPoly<Rational>; 2],
}

/// ρ_η at one time; `None` when f‴ or f⁗ loses degree in λ there.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EtaSample {
    pub t: f64,
    pub rho: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EtaZero {
    pub t: f64,
    /// Sign change of ρ_η, or a local minimum of |ρ_η| under the tolerance.
    pub sign_change: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EtaPath {
    pub samples: Vec<EtaSample>,
    pub zeros: Vec<EtaZero>,
    /// Times skipped because of degree collapse.
    pub skipped: Vec<f64>,
}

impl EtaProcess {
    pub fn new(fam: &ActionFamily, cf: &CausticFamily) -> Result<Self> {
        if cf.dim != 2 {
            return Err(Error::Unsupported("eta process on a 2-parameter caustic".into()));
        }
        let mu = fam.sym.x0(0);
        let nth = |k: u32| {
            let f: RationalFunction<Rational> = along_caustic(fam, cf, |g| Ok(g.nth_derivative(mu, k)))?;
            Ok::<_, Error>(f.num)
        };
        let (f3, f4) = (nth(3)?, nth(4)?);
        let ti = cf.t_index();
        let in_t = |p: &QPoly| -> Result<UniPoly<Rational>> {
            let p = p.compact_vars();
            match p.var_index(&cf.vars[ti]) {
                Some(i) if p.nvars() == 1 => p.to_univariate(i),
                None if p.is_constant() => Ok(UniPoly::constant(p.constant_value().unwrap_or_else(Rational::zero))),
                _ => Err(Error::Structural("ρ_η depends on more than t".into())),
            }
        };
        let lambda = &cf.vars[0];
        let rho = in_t(&resultant(&f3, &f4, lambda)?)?;
        let lc = |p: &QPoly| in_t(&p.leading_coeff_in(0));
        Ok(EtaProcess { leading: [lc(&f3)?, lc(&f4)?], f3, f4, rho })
    }

    /// ρ_η at time t.
    pub fn rho_exact(&self, t: &Rational) -> Result<Rational> {
        if self.leading.iter().any(|l| l.eval(t).is_zero()) {
            return Err(Error::Degenerate(format!("λ-degree collapses at t = {t}")));
        }
        Ok(self.rho.eval(t))
    }

    pub fn rho(&self, t: f64) -> Result<f64> {
        Ok(rational_to_f64(&self.rho_exact(&snap(t))?))
    }

    /// Bisect a sign change of ρ_η in exact arithmetic down to width `tol`.
    pub fn bisect(&self, lo: f64, hi: f64, tol: f64) -> Result<f64> {
        let (mut a, mut b) = (snap(lo), snap(hi));
        let sa = self.rho_exact(&a)?.is_positive();
        let tol = snap(tol);
        let two = Rational::from_integer(2.into());
        while (&b - &a) > tol {
            let m = (&a + &b) / &two;
            let v = self.rho_exact(&m)?;
            if v.is_zero() {
                return Ok(rational_to_f64(&m));
            }
            if v.is_positive() == sa {
                a = m;
            } else {
                b = m;
            }
        }
        Ok(rational_to_f64(&((a + b) / two)))
    }
}

/// ρ_η over a time grid with its zeros. Sign changes are bisected to 1e−12;
/// sampled local minima of |ρ_η| below `tol`·max|ρ_η| are reported as touching zeros.
pub fn eta_path(eta: &EtaProcess, times: &[f64], tol: f64) -> Result<EtaPath> {
    let mut samples = Vec::with_capacity(times.len());
    let mut skipped = Vec::new();
    for &t in times {
        if !(t > 0.0) {
            return Err(Error::InvalidArgument(format!("time must be positive, got {t}")));
        }
        match eta.rho(t) {
            Ok(r) => samples.push(EtaSample { t, rho: Some(r) }),
            Err(Error::Degenerate(_)) => {
                skipped.push(t);
                samples.push(EtaSample { t, rho: None });
            }
            Err(e) => return Err(e),
        }
    }
    let scale = samples.iter().filter_map(|s| s.rho).fold(0.0f64, |a, r| a.max(r.abs()));
    let mut zeros = Vec::new();
    for (i, s) in samples.iter().enumerate() {
        let Some(r) = s.rho else { continue };
        if r == 0.0 {
            zeros.push(EtaZero { t: s.t, sign_change: false });
            continue;
        }
        if let Some(Some(u)) = samples.get(i + 1).map(|n| n.rho) {
            if u != 0.0 && (r < 0.0) != (u < 0.0) {
                zeros.push(EtaZero { t: eta.bisect(s.t, samples[i + 1].t, 1e-12)?, sign_change: true });
                continue;
            }
        }
        let around = |j: Option<usize>| j.and_then(|j| samples.get(j)).and_then(|n| n.rho).map_or(true, |v| v.abs() > r.abs());
        let same_side = |j: Option<usize>| j.and_then(|j| samples.get(j)).and_then(|n| n.rho).map_or(true, |v| (v < 0.0) == (r < 0.0));
        if r.abs() < tol * scale && around(i.checked_sub(1)) && around(Some(i + 1)) && same_side(i.checked_sub(1)) && same_side(Some(i + 1)) {
            zeros.push(EtaZero { t: s.t, sign_change: false });
        }
    }
    Ok(EtaPath { samples, zeros, skipped })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::Scenario;

    fn eta(name: &str) -> EtaProcess {
        let f = ActionFamily::new(&Scenario::builtin(name).unwrap()).unwrap();
        let cf = CausticFamily::new(&f).unwrap();
        EtaProcess::new(&f, &cf).unwrap()
    }

    #[test]
    fn cusp_rho_is_linear() {
        let e = eta("generic_cusp");
        for t in [0.5, 1.0, 2.5, 7.0] {
            assert!((e.rho(t).unwrap().abs() - 3.0 * t).abs() < 1e-12);
        }
        let p = eta_path(&e, &[0.5, 1.0, 1.5, 2.0], 1e-9).unwrap();
        assert!(p.zeros.is_empty());
    }

    #[test]
    fn perestroika_zero() {
        let e = eta("perestroika_x5x6");
        let times: Vec<f64> = (0..=40).map(|i| 2.0 + i as f64 / 40.0).collect();
        let p = eta_path(&e, &times, 1e-9).unwrap();
        let expect = 4.0 / 7.0 * 2f64.sqrt() * (33.0f64 / 7.0).powf(0.75);
        assert_eq!(p.zeros.len(), 1, "{:?}", p.zeros);
        assert!((p.zeros[0].t - expect).abs() < 1e-9, "{}", p.zeros[0].t);
    }
}
