use std::collections::BTreeMap;

use serde::Serialize;

use crate::action::{ActionFamily, NoiseTerms};
use crate::error::{Error, Result};
use crate::turbulence::branches::{solve_lambda_branches, BranchKind, CausticAction};
use crate::turbulence::wiener::{Functionals, WienerStream};
use crate::turbulence::zeta::{pick_root, zeta_closed, CuspTracker};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecurrenceConfig {
    pub branch: BranchKind,
    pub c: f64,
    pub seeds: Vec<u64>,
    /// Count snapshots, ascending; the run lasts until the last one.
    pub horizons: Vec<f64>,
    /// Zeros are counted on [t_start, T].
    pub t_start: f64,
    pub dt: f64,
    /// ζ is evaluated every `record_every` Brownian steps.
    pub record_every: usize,
    pub small_epsilon: bool,
}

impl RecurrenceConfig {
    /// 10⁴ steps per unit time, capped at 10⁷ steps in total, ζ recorded at every step.
    pub fn new(branch: BranchKind, c: f64, seeds: Vec<u64>, horizons: Vec<f64>) -> Self {
        let t_max = horizons.iter().copied().fold(0.0, f64::max);
        RecurrenceConfig { branch, c, seeds, horizons, t_start: 1.0, dt: (t_max / 1e7).max(1e-4), record_every: 1, small_epsilon: false }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecurrenceSummary {
    pub config: RecurrenceConfig,
    pub epsilon: f64,
    /// counts[s][h]: zeros of seed s on [t_start, horizons[h]].
    pub counts: Vec<Vec<usize>>,
    /// fraction_at_least[h][k−1]: share of seeds with at least k zeros, k = 1..5.
    pub fraction_at_least: Vec<[f64; 5]>,
    pub median: Vec<f64>,
    /// Per horizon: zero count → number of seeds.
    pub histogram: Vec<BTreeMap<usize, usize>>,
}

/// Per-seed sign-change counter over recorded ζ values.
#[derive(Clone, Default)]
struct ZeroCounter {
    last: Option<f64>,
    count: usize,
}

impl ZeroCounter {
    fn push(&mut self, z: Option<f64>) {
        match z {
            None => self.last = None,
            Some(v) if v == 0.0 => {}
            Some(v) => {
                if self.last.is_some_and(|u| (u < 0.0) != (v < 0.0)) {
                    self.count += 1;
                }
                self.last = Some(v);
            }
        }
    }
}

fn noise_of(eps: f64, f: &Functionals<f64>) -> (Vec<f64>, Vec<f64>, f64) {
    (f.int_w.iter().map(|v| eps * v).collect(), f.w.iter().map(|v| eps * v).collect(), eps * eps * f.int_w2)
}

/// Zero counts of ζ on [t_start, T] for many seeds, streaming the Brownian paths so memory
/// stays constant in T. The cusped branch is noise-independent, so its deterministic part is
/// evaluated once per time for all seeds; other branches solve the λ-equations per seed.
pub fn recurrence_experiment(fam: &ActionFamily, ca: &CausticAction, cfg: &RecurrenceConfig) -> Result<RecurrenceSummary> {
    if cfg.seeds.is_empty() || cfg.horizons.is_empty() {
        return Err(Error::InvalidArgument("need at least one seed and one horizon".into()));
    }
    if cfg.horizons.windows(2).any(|w| w[1] <= w[0]) || cfg.horizons[0] <= cfg.t_start {
        return Err(Error::InvalidArgument("horizons must increase and exceed t_start".into()));
    }
    if !(cfg.dt > 0.0) || cfg.record_every == 0 {
        return Err(Error::InvalidArgument("dt and record_every must be positive".into()));
    }
    let d = fam.dim();
    let eps = fam.scenario.epsilon;
    let mut tracker = if cfg.branch == BranchKind::Cusped { Some(CuspTracker::new(ca)?) } else { None };
    let mut streams: Vec<WienerStream<f64>> = cfg.seeds.iter().map(|s| WienerStream::new(d, cfg.dt, *s)).collect();
    let mut counters = vec![ZeroCounter::default(); cfg.seeds.len()];
    let mut prev: Vec<Option<Vec<f64>>> = vec![None; cfg.seeds.len()];
    let mut counts = vec![Vec::with_capacity(cfg.horizons.len()); cfg.seeds.len()];
    let total = (cfg.horizons[cfg.horizons.len() - 1] / cfg.dt).round() as usize;
    let mut next_h = 0;
    for step in 1..=total {
        for s in streams.iter_mut() {
            s.advance();
        }
        let t = step as f64 * cfg.dt;
        if step % cfg.record_every == 0 && t >= cfg.t_start - 0.5 * cfg.dt {
            match tracker.as_mut() {
                Some(tr) => {
                    let root = tr.root(ca, t)?;
                    let det = root.map(|l| tr.deterministic(t, l, d));
                    for (s, cnt) in streams.iter().zip(counters.iter_mut()) {
                        let z = det.as_ref().map(|(f0, x)| {
                            let (p, q, r) = noise_of(eps, &s.state);
                            let mut z = f0 - cfg.c;
                            for k in 0..d {
                                z -= x[k] * q[k];
                                if !cfg.small_epsilon {
                                    z += q[k] * p[k];
                                }
                            }
                            if !cfg.small_epsilon {
                                z -= 0.5 * r;
                            }
                            z
                        });
                        cnt.push(z);
                    }
                }
                None => {
                    for (i, s) in streams.iter().enumerate() {
                        let noise = NoiseTerms::from_functionals(eps, &s.state);
                        let z = match solve_lambda_branches(ca, t, &noise) {
                            Ok(b) => pick_root(&b.of_kind(cfg.branch), prev[i].as_deref()).map(|r| {
                                prev[i] = Some(r.lambda.clone());
                                zeta_closed(ca, &r.lambda, t, &noise, cfg.c, cfg.small_epsilon)
                            }),
                            Err(Error::Degenerate(_)) | Err(Error::Numerical(_)) => None,
                            Err(e) => return Err(e),
                        };
                        counters[i].push(z);
                    }
                }
            }
        }
        while next_h < cfg.horizons.len() && t >= cfg.horizons[next_h] - 0.5 * cfg.dt {
            for (c, cnt) in counts.iter_mut().zip(&counters) {
                c.push(cnt.count);
            }
            next_h += 1;
        }
    }
    let n = cfg.seeds.len() as f64;
    let mut fraction_at_least = Vec::new();
    let mut median = Vec::new();
    let mut histogram = Vec::new();
    for h in 0..cfg.horizons.len() {
        let mut col: Vec<usize> = counts.iter().map(|c| c[h]).collect();
        let mut frac = [0.0; 5];
        for (k, f) in frac.iter_mut().enumerate() {
            *f = col.iter().filter(|c| **c > k).count() as f64 / n;
        }
        fraction_at_least.push(frac);
        col.sort_unstable();
        let m = col.len();
        median.push(if m % 2 == 1 { col[m / 2] as f64 } else { (col[m / 2 - 1] + col[m / 2]) as f64 / 2.0 });
        let mut hist = BTreeMap::new();
        for c in col {
            *hist.entry(c).or_insert(0) += 1;
        }
        histogram.push(hist);
    }
    Ok(RecurrenceSummary { config: cfg.clone(), epsilon: eps, counts, fraction_at_least, median, histogram })
}
