use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::scalar::{Real, Scalar};

/// Seeded d-dimensional Brownian path on a uniform grid with cached
/// functionals W(t), ∫₀ᵗW ds and ∫₀ᵗ|W|² ds (trapezoid rule).
#[derive(Clone, Debug, PartialEq)]
pub struct WienerPath<F> {
    dim: usize,
    horizon: F,
    steps: usize,
    seed: Option<u64>,
    w: Vec<F>,
    int_w: Vec<F>,
    int_w2: Vec<F>,
}

impl<F: Real> WienerPath<F>
where
    StandardNormal: Distribution<F>,
{
    /// Gaussian increments N(0, Δt) from ChaCha8 seeded with `seed`.
    pub fn simulate(dim: usize, horizon: F, steps: usize, seed: u64) -> Result<Self> {
        check_grid(dim, Scalar::to_f64(&horizon), steps)?;
        let dt = horizon / F::from_usize(steps).unwrap();
        let sd = dt.sqrt();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut w = vec![F::zero(); (steps + 1) * dim];
        for i in 1..=steps {
            for a in 0..dim {
                let z: F = StandardNormal.sample(&mut rng);
                w[i * dim + a] = w[(i - 1) * dim + a] + sd * z;
            }
        }
        let mut p = Self::from_values(dim, horizon, w)?;
        p.seed = Some(seed);
        Ok(p)
    }
}

impl<F: Real> WienerPath<F> {
    /// Path from explicit grid values (row-major, `dim` entries per time).
    pub fn from_values(dim: usize, horizon: F, w: Vec<F>) -> Result<Self> {
        if dim == 0 || w.len() % dim != 0 || w.len() / dim < 3 {
            return Err(Error::InvalidArgument("path needs at least 2 steps of full dimension".into()));
        }
        let steps = w.len() / dim - 1;
        check_grid(dim, Scalar::to_f64(&horizon), steps)?;
        if w[..dim].iter().any(|v| v.abs() > F::from_f64(1e-12).unwrap()) {
            return Err(Error::InvalidArgument("path must start at the origin".into()));
        }
        let dt = horizon / F::from_usize(steps).unwrap();
        let half = F::from_f64(0.5).unwrap();
        let mut int_w = vec![F::zero(); w.len()];
        let mut int_w2 = vec![F::zero(); steps + 1];
        for i in 1..=steps {
            let mut sq = F::zero();
            for a in 0..dim {
                let (u, v) = (w[(i - 1) * dim + a], w[i * dim + a]);
                int_w[i * dim + a] = int_w[(i - 1) * dim + a] + half * dt * (u + v);
                sq = sq + half * dt * (u * u + v * v);
            }
            int_w2[i] = int_w2[i - 1] + sq;
        }
        Ok(WienerPath { dim, horizon, steps, seed: None, w, int_w, int_w2 })
    }

    /// Deterministic injection: sample `f` on the grid in place of W.
    pub fn from_fn(dim: usize, horizon: F, steps: usize, f: impl Fn(f64) -> Vec<f64>) -> Result<Self> {
        check_grid(dim, Scalar::to_f64(&horizon), steps)?;
        let h = Scalar::to_f64(&horizon);
        let mut w = Vec::with_capacity((steps + 1) * dim);
        for i in 0..=steps {
            let v = f(h * i as f64 / steps as f64);
            if v.len() != dim {
                return Err(Error::InvalidArgument(format!("injected path returned {} components, expected {dim}", v.len())));
            }
            w.extend(v.into_iter().map(|x| F::from_f64(x).unwrap()));
        }
        Self::from_values(dim, horizon, w)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn horizon(&self) -> F {
        self.horizon
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn dt(&self) -> F {
        self.horizon / F::from_usize(self.steps).unwrap()
    }

    pub fn time(&self, i: usize) -> F {
        self.dt() * F::from_usize(i).unwrap()
    }

    pub fn w(&self, i: usize) -> &[F] {
        &self.w[i * self.dim..(i + 1) * self.dim]
    }

    pub fn int_w(&self, i: usize) -> &[F] {
        &self.int_w[i * self.dim..(i + 1) * self.dim]
    }

    pub fn int_w2(&self, i: usize) -> F {
        self.int_w2[i]
    }

    /// Grid increments of component `a`.
    pub fn increments(&self, a: usize) -> Vec<F> {
        (1..=self.steps).map(|i| self.w[i * self.dim + a] - self.w[(i - 1) * self.dim + a]).collect()
    }

    /// Functionals at an arbitrary time in [0, T], linearly interpolated between grid points.
    pub fn functionals_at(&self, t: F) -> Result<Functionals<F>> {
        let tf = Scalar::to_f64(&t);
        let hf = Scalar::to_f64(&self.horizon);
        if !(0.0..=hf * (1.0 + 1e-12)).contains(&tf) {
            return Err(Error::InvalidArgument(format!("time {tf} outside path horizon [0, {hf}]")));
        }
        let pos = Scalar::to_f64(&(t / self.dt()));
        let i = (pos.floor() as usize).min(self.steps);
        let frac = F::from_f64(pos - i as f64).unwrap();
        if i == self.steps || frac == F::zero() {
            return Ok(Functionals { w: self.w(i).to_vec(), int_w: self.int_w(i).to_vec(), int_w2: self.int_w2[i] });
        }
        let lerp = |a: F, b: F| a + (b - a) * frac;
        Ok(Functionals {
            w: (0..self.dim).map(|a| lerp(self.w(i)[a], self.w(i + 1)[a])).collect(),
            int_w: (0..self.dim).map(|a| lerp(self.int_w(i)[a], self.int_w(i + 1)[a])).collect(),
            int_w2: lerp(self.int_w2[i], self.int_w2[i + 1]),
        })
    }

    pub fn functionals_at_index(&self, i: usize) -> Functionals<F> {
        Functionals { w: self.w(i).to_vec(), int_w: self.int_w(i).to_vec(), int_w2: self.int_w2[i] }
    }

    /// Path restricted to a single component, used for 1-D checks.
    pub fn component(&self, a: usize) -> Self {
        let w: Vec<F> = (0..=self.steps).map(|i| self.w[i * self.dim + a]).collect();
        let mut p = Self::from_values(1, self.horizon, w).expect("valid component");
        p.seed = self.seed;
        p
    }
}

fn check_grid(dim: usize, horizon: f64, steps: usize) -> Result<()> {
    if dim == 0 {
        return Err(Error::InvalidArgument("dimension must be positive".into()));
    }
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(Error::InvalidArgument(format!("horizon must be positive, got {horizon}")));
    }
    if steps < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 steps, got {steps}")));
    }
    Ok(())
}

/// Path functionals at one time: W(t), ∫₀ᵗW ds, ∫₀ᵗ|W|² ds.
#[derive(Clone, Debug, PartialEq)]
pub struct Functionals<F> {
    pub w: Vec<F>,
    pub int_w: Vec<F>,
    pub int_w2: F,
}

impl<F: Real> Functionals<F> {
    pub fn zero(dim: usize) -> Self {
        Functionals { w: vec![F::zero(); dim], int_w: vec![F::zero(); dim], int_w2: F::zero() }
    }

    /// Y_t = W(t)·∫W − ½∫|W|².
    pub fn strassen_y(&self) -> F {
        let dot = self.w.iter().zip(&self.int_w).fold(F::zero(), |a, (x, y)| a + *x * *y);
        dot - self.int_w2 * F::from_f64(0.5).unwrap()
    }
}

/// Constant-memory Brownian stepper for long recurrence runs.
pub struct WienerStream<F> {
    rng: ChaCha8Rng,
    dim: usize,
    dt: F,
    sd: F,
    pub step: usize,
    pub state: Functionals<F>,
}

impl<F: Real> WienerStream<F>
where
    StandardNormal: Distribution<F>,
{
    pub fn new(dim: usize, dt: F, seed: u64) -> Self {
        WienerStream {
            rng: ChaCha8Rng::seed_from_u64(seed),
            dim,
            dt,
            sd: dt.sqrt(),
            step: 0,
            state: Functionals::zero(dim),
        }
    }

    pub fn time(&self) -> F {
        self.dt * F::from_usize(self.step).unwrap()
    }

    /// Advance one step, updating the trapezoid functionals.
    pub fn advance(&mut self) {
        let half = F::from_f64(0.5).unwrap();
        let mut sq_old = F::zero();
        let mut sq_new = F::zero();
        for a in 0..self.dim {
            let z: F = StandardNormal.sample(&mut self.rng);
            let old = self.state.w[a];
            let new = old + self.sd * z;
            self.state.int_w[a] = self.state.int_w[a] + half * self.dt * (old + new);
            sq_old = sq_old + old * old;
            sq_new = sq_new + new * new;
            self.state.w[a] = new;
        }
        self.state.int_w2 = self.state.int_w2 + half * self.dt * (sq_old + sq_new);
        self.step += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ramp_functionals() {
        let p = WienerPath::<f64>::from_fn(1, 1.0, 1000, |s| vec![s]).unwrap();
        let f = p.functionals_at_index(1000);
        assert!((f.int_w[0] - 0.5).abs() < 1e-12);
        assert!((f.int_w2 - 1.0 / 3.0).abs() < 1e-6);
    }

    #[test]
    fn seeded_paths_repeat() {
        let a = WienerPath::<f64>::simulate(2, 1.0, 500, 7).unwrap();
        let b = WienerPath::<f64>::simulate(2, 1.0, 500, 7).unwrap();
        let c = WienerPath::<f64>::simulate(2, 1.0, 500, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.w(0), &[0.0, 0.0]);
    }

    #[test]
    fn f32_paths_work() {
        let p = WienerPath::<f32>::simulate(1, 2.0, 100, 1).unwrap();
        assert_eq!(p.steps(), 100);
        assert!(p.functionals_at(1.05).is_ok());
        assert!(p.functionals_at(2.5).is_err());
    }

    #[test]
    fn stream_matches_stored_path() {
        let p = WienerPath::<f64>::simulate(2, 1.0, 100, 11).unwrap();
        let mut s = WienerStream::<f64>::new(2, 0.01, 11);
        for _ in 0..100 {
            s.advance();
        }
        let f = p.functionals_at_index(100);
        for a in 0..2 {
            assert!((f.w[a] - s.state.w[a]).abs() < 1e-12);
            assert!((f.int_w[a] - s.state.int_w[a]).abs() < 1e-12);
        }
        assert!((f.int_w2 - s.state.int_w2).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(WienerPath::<f64>::simulate(1, 1.0, 1, 0).is_err());
        assert!(WienerPath::<f64>::simulate(1, -1.0, 10, 0).is_err());
        assert!(WienerPath::<f64>::from_fn(1, 1.0, 10, |s| vec![s + 1.0]).is_err());
    }
}
