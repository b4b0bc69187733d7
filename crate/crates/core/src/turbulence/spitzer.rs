use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};

/// Closest approach to the origin before a trial is resampled.
pub const MIN_RADIUS: f64 = 1e-6;

/// Accumulated winding of D = (1, 0) + W about the origin, one entry per sample.
/// Clockwise turns count positive. Each step must turn by less than π/2.
pub fn winding_angle(path: &[[f64; 2]]) -> Result<Vec<f64>> {
    let mut theta = vec![0.0; path.len()];
    for i in 1..path.len() {
        let (a, b) = ([1.0 + path[i - 1][0], path[i - 1][1]], [1.0 + path[i][0], path[i][1]]);
        if a[0].hypot(a[1]) < MIN_RADIUS || b[0].hypot(b[1]) < MIN_RADIUS {
            return Err(Error::NearOrigin(i));
        }
        let step = (a[0] * b[1] - a[1] * b[0]).atan2(a[0] * b[0] + a[1] * b[1]);
        if step.abs() >= PI / 2.0 {
            return Err(Error::Numerical(format!("step {i} turns by {step}, refine the path")));
        }
        theta[i] = theta[i - 1] - step;
    }
    Ok(theta)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpitzerSample {
    pub t: f64,
    pub trials: usize,
    /// Sorted values of 2θ_t / ln t.
    pub values: Vec<f64>,
    /// Kolmogorov–Smirnov distance to the standard Cauchy law.
    pub ks: f64,
    pub resampled: usize,
}

/// Standard Cauchy CDF.
pub fn cauchy_cdf(x: f64) -> f64 {
    0.5 + x.atan() / PI
}

/// KS distance between a sorted sample and a continuous CDF.
pub fn ks_distance(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    sorted.iter().enumerate().fold(0.0, |d, (i, x)| {
        let f = cdf(*x);
        d.max((f - i as f64 / n).abs()).max(((i + 1) as f64 / n - f).abs())
    })
}

/// Winding of one Brownian trial up to time t. Steps are Gaussian with variance
/// min(dt_max, (κ|D|)²), exact for Brownian motion, so the angle per step stays small
/// near the origin.
fn one_trial(rng: &mut ChaCha8Rng, t: f64, kappa: f64, dt_max: f64) -> Option<f64> {
    let (mut x, mut y, mut s, mut theta) = (1.0f64, 0.0f64, 0.0f64, 0.0f64);
    while s < t {
        let r = x.hypot(y);
        if r < MIN_RADIUS {
            return None;
        }
        let dt = (kappa * r).powi(2).min(dt_max).min(t - s);
        let sd = dt.sqrt();
        let zx: f64 = StandardNormal.sample(rng);
        let zy: f64 = StandardNormal.sample(rng);
        let (nx, ny) = (x + sd * zx, y + sd * zy);
        theta -= (x * ny - y * nx).atan2(x * nx + y * ny);
        (x, y, s) = (nx, ny, s + dt);
    }
    Some(theta)
}

/// Empirical law of 2θ_t/ln t over independent trials from one seeded generator.
pub fn spitzer_sample(trials: usize, t: f64, seed: u64) -> Result<SpitzerSample> {
    if trials == 0 || !(t > 1.0) {
        return Err(Error::InvalidArgument("need at least one trial and t > 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = Vec::with_capacity(trials);
    let mut resampled = 0;
    while values.len() < trials {
        match one_trial(&mut rng, t, 0.1, 1.0) {
            Some(theta) => values.push(2.0 * theta / t.ln()),
            None => resampled += 1,
        }
    }
    values.sort_by(f64::total_cmp);
    let ks = ks_distance(&values, cauchy_cdf);
    Ok(SpitzerSample { t, trials, values, ks, resampled })
}
