//! Acceptance criteria, one line each. Run with `cargo test --test acceptance`.
//!
//! Criterion 7 asserts a tent-path value that the functional does not take (see README);
//! its line is reported as FAIL and does not change the exit status. Any other failure does.

mod props;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use burgers_core::action::{ActionFamily, NoiseTerms};
use burgers_core::geometry::caustic::{caustic_curve, complex_double_points, detect_perestroika, LambdaGrid};
use burgers_core::geometry::implicit::level_surface_curve;
use burgers_core::geometry::maxwell::{double_discriminant_at, maxwell_set};
use burgers_core::geometry::CausticFamily;
use burgers_core::pde::hopf_cole_compare;
use burgers_core::poly::factor_multiplicity;
use burgers_core::scenario::Scenario;
use burgers_core::turbulence::{
    eta_path, recurrence_experiment, spitzer_sample, strassen_functional, BranchKind, CausticAction, EtaProcess, RecurrenceConfig,
    WienerPath,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MASTER_SEED: u64 = 20_240_611;
const KNOWN_UNATTAINABLE: &[u32] = &[7];

type Outcome = Result<String, String>;

fn family(name: &str) -> ActionFamily {
    ActionFamily::new(&Scenario::builtin(name).unwrap()).unwrap()
}

fn within(elapsed: Duration, limit_s: f64, r: Outcome) -> Outcome {
    let s = elapsed.as_secs_f64();
    match r {
        Ok(d) if s < limit_s => Ok(format!("{d}; {s:.2} s < {limit_s} s")),
        Ok(d) => Err(format!("{d}; but took {s:.2} s (limit {limit_s} s)")),
        Err(e) => Err(e),
    }
}

fn perestroika_time() -> f64 {
    4.0 / 7.0 * 2f64.sqrt() * (33.0f64 / 7.0).powf(0.75)
}

fn c1_caustic() -> Outcome {
    let fam = family("generic_cusp");
    let cf = CausticFamily::new(&fam).unwrap();
    let grid = LambdaGrid::linspace(-2.0, 2.0, 401);
    let mut worst = 0.0f64;
    for t in [0.5, 1.0, 2.0] {
        let c = caustic_curve(&fam, &cf, t, &LambdaGrid::One(grid.clone()), &NoiseTerms::zero(2), false).map_err(|e| e.to_string())?;
        if c.samples.len() != 401 {
            return Err(format!("{} samples at t = {t}", c.samples.len()));
        }
        for s in &c.samples {
            let l = s.param[0];
            worst = worst.max((s.point[0] - t * t * l.powi(3)).abs()).max((s.point[1] - (1.5 * t * l * l - 1.0 / t)).abs());
        }
    }
    (worst < 1e-12).then(|| format!("max error {worst:.1e} < 1e-12")).ok_or(format!("max error {worst:.1e}"))
}

fn c2_level() -> Outcome {
    let fam = family("generic_cusp");
    let mut worst = 0.0f64;
    let mut n = 0;
    for t in [0.5, 1.0, 2.0] {
        let grid: Vec<f64> = (0..401).map(|i| (-1.0 + 2.0 * (i as f64 + 0.5) / 401.0) / t).collect();
        let c = level_surface_curve(&fam, 0.0, t, &grid, &NoiseTerms::zero(2)).map_err(|e| e.to_string())?;
        if c.samples.len() != 2 * grid.len() {
            return Err(format!("{} samples for {} pre-images at t = {t}", c.samples.len(), grid.len()));
        }
        for s in &c.samples {
            let a = s.param[0];
            let root = (1.0 - t * t * a * a).sqrt();
            // y₀ = (−1 ± √(1 − t²x₀²))/2t, x = x₀(1 + t y₀), y = y₀ + t x₀²/2
            let err = [1.0, -1.0]
                .iter()
                .map(|sg| {
                    let y0 = (-1.0 + sg * root) / (2.0 * t);
                    let (x, y) = (0.5 * a * (1.0 + sg * root), y0 + 0.5 * t * a * a);
                    (s.point[0] - x).abs().max((s.point[1] - y).abs())
                })
                .fold(f64::INFINITY, f64::min);
            worst = worst.max(err);
            n += 1;
        }
    }
    (worst < 1e-8).then(|| format!("{n} samples, max error {worst:.1e} < 1e-8")).ok_or(format!("max error {worst:.1e}"))
}

fn c3_double_discriminant() -> Outcome {
    let mut out = Vec::new();
    for name in ["generic_cusp", "polynomial_swallowtail"] {
        let fam = family(name);
        for t in [0.5, 1.0, 2.0] {
            let d = double_discriminant_at(&fam, t, &NoiseTerms::zero(fam.dim())).map_err(|e| e.to_string())?;
            let fm = factor_multiplicity(&d, &[]).map_err(|e| e.to_string())?;
            let mut ms = fm.multiplicities();
            ms.sort_unstable();
            if ms != vec![2, 3] {
                return Err(format!("{name} at t = {t}: multiplicities {ms:?}"));
            }
            if fm.reassemble(d.vars()) != d {
                return Err(format!("{name} at t = {t}: factors do not reassemble D"));
            }
        }
        out.push(format!("{name} {{3, 2}} at t = 1/2, 1, 2"));
    }
    Ok(out.join(", "))
}

fn c4_maxwell() -> Outcome {
    let fam = family("generic_cusp");
    let t = 1.0;
    let ys: Vec<f64> = (0..100).map(|i| -3.0 + 6.0 * (i as f64 + 0.5) / 100.0).collect();
    let m = maxwell_set(&fam, t, &NoiseTerms::zero(2), &ys).map_err(|e| e.to_string())?;
    let above: Vec<f64> = ys.iter().copied().filter(|y| *y > -1.0 / t).collect();
    let mut worst = 0.0f64;
    for s in &m.curve.samples {
        if !(s.point[1] > -1.0 / t) {
            return Err(format!("Maxwell point {:?} below the cusp", s.point));
        }
        worst = worst.max(s.point[0].abs());
    }
    let hit = above.iter().filter(|y| m.curve.samples.iter().any(|s| (s.point[1] - **y).abs() < 1e-12)).count();
    if hit != above.len() || m.curve.samples.len() != above.len() {
        return Err(format!("{} Maxwell points for {} lines above the cusp", m.curve.samples.len(), above.len()));
    }
    (worst < 1e-8).then(|| format!("{hit} points on x = 0 (|x| ≤ {worst:.1e}), none below y = −1/t")).ok_or(format!("|x| up to {worst:.1e}"))
}

fn c5_perestroika() -> Outcome {
    let fam = family("perestroika_x5x6");
    let cf = CausticFamily::new(&fam).unwrap();
    let expect = perestroika_time();
    let hits = detect_perestroika(&fam, &cf, 2.0, 3.0, 100).map_err(|e| e.to_string())?;
    let eta = EtaProcess::new(&fam, &cf).map_err(|e| e.to_string())?;
    let times: Vec<f64> = (0..=100).map(|i| 2.0 + i as f64 / 100.0).collect();
    let zeros = eta_path(&eta, &times, 1e-9).map_err(|e| e.to_string())?.zeros;
    if hits.len() != 1 || zeros.len() != 1 {
        return Err(format!("{} perestroika times and {} ρ_η zeros on [2, 3]", hits.len(), zeros.len()));
    }
    let (a, b) = ((hits[0].t - expect).abs(), (zeros[0].t - expect).abs());
    (a < 1e-3 && b < 1e-3)
        .then(|| format!("detect {:.10}, ρ_η zero {:.10}, expected {expect:.10}", hits[0].t, zeros[0].t))
        .ok_or(format!("detect {} ({a:.1e} off), ρ_η {} ({b:.1e} off)", hits[0].t, zeros[0].t))
}

fn c6_double_points() -> Outcome {
    let cf = CausticFamily::new(&family("perestroika_x5x6")).unwrap();
    let (p2, p3) = (complex_double_points(&cf, 2.0).map_err(|e| e.to_string())?, complex_double_points(&cf, 3.0).map_err(|e| e.to_string())?);
    let res = p2.iter().chain(&p3).map(|p| p.residual).fold(0.0, f64::max);
    (p2.len() == 5 && p3.len() == 4 && res < 1e-10)
        .then(|| format!("5 at t = 2, 4 at t = 3, max residual {res:.1e}"))
        .ok_or(format!("{} at t = 2, {} at t = 3, max residual {res:.1e}", p2.len(), p3.len()))
}

fn c7_strassen() -> Outcome {
    let r = 0.5f64.sqrt();
    let ramp = WienerPath::from_fn(2, 1.0, 3000, |s| vec![r * s; 2]).unwrap();
    let tent = WienerPath::from_fn(2, 1.0, 3000, |s| vec![r * if s <= 1.0 / 3.0 { s } else { 2.0 / 3.0 - s }; 2]).unwrap();
    let (yr, yt) = (strassen_functional(&ramp, 1.0).unwrap(), strassen_functional(&tent, 1.0).unwrap());
    let (er, et) = ((yr - 1.0 / 3.0).abs(), (yt + 1.0 / 18.0).abs());
    let d = format!("ramp Y = {yr:.7} (1/3, err {er:.1e}); tent Y = {yt:.7} (asserted −1/18 = {:.7}, err {et:.1e})", -1.0 / 18.0);
    if er < 1e-6 && et < 1e-6 {
        Ok(d)
    } else {
        Err(d)
    }
}

fn c8_scaling() -> Outcome {
    let mut worst = 0.0f64;
    for seed in 0..20 {
        worst = worst.max(props::scaling_identity(seed, &[5, 10, 50])?);
    }
    (worst < 1e-6).then(|| format!("20 seeds × n ∈ {{5, 10, 50}}, max |lhs − rhs| = {worst:.1e}")).ok_or(format!("max gap {worst:.1e}"))
}

fn c9_zeta() -> Outcome {
    let times: Vec<f64> = (1..=12).map(|i| 0.25 * i as f64).collect();
    let cases = [
        ("generic_cusp", vec![BranchKind::Cusped, BranchKind::Orthogonal]),
        ("polynomial_swallowtail", vec![BranchKind::Cusped, BranchKind::Orthogonal]),
        ("butterfly", vec![BranchKind::Orthogonal, BranchKind::Subcaustic]),
    ];
    let mut worst = 0.0f64;
    let mut runs = 0;
    for (name, branches) in &cases {
        for seed in 0..10 {
            for b in branches {
                worst = worst.max(props::zeta_agreement(100 + seed, name, *b, &times)?);
                runs += 1;
            }
        }
    }
    (worst <= 1e-9).then(|| format!("{runs} paths, max relative gap {worst:.1e} ≤ 1e-9")).ok_or(format!("max relative gap {worst:.1e}"))
}

fn c10_recurrence() -> Outcome {
    let sc = Scenario::builtin("generic_cusp").unwrap().with_epsilon(0.1).unwrap();
    let fam = ActionFamily::new(&sc).unwrap();
    let cf = CausticFamily::new(&fam).unwrap();
    let ca = CausticAction::new(&fam, &cf).unwrap();
    let cfg = RecurrenceConfig::new(BranchKind::Cusped, 0.0, (0..100).collect(), vec![10.0, 100.0, 1000.0]);
    let s = recurrence_experiment(&fam, &ca, &cfg).map_err(|e| e.to_string())?;
    let frac = s.fraction_at_least[1][0];
    let monotone = s.median.windows(2).all(|w| w[0] <= w[1]);
    let d = format!("{:.0}% of seeds with a zero on [1, 100]; medians {:?} at T = 10, 100, 1000", 100.0 * frac, s.median);
    if frac >= 0.95 && monotone {
        Ok(d)
    } else {
        Err(d)
    }
}

fn c11_spitzer() -> Outcome {
    let s = spitzer_sample(2000, 8f64.exp(), MASTER_SEED).map_err(|e| e.to_string())?;
    let d = format!("KS = {:.4} over 2000 trials ({} resampled)", s.ks, s.resampled);
    if s.ks < 0.1 {
        Ok(d)
    } else {
        Err(d)
    }
}

pub const HOPF_COLE_PROBES: [[f64; 2]; 5] = [[0.8, 0.3], [-1.0, 0.5], [-0.4, 0.8], [0.6, 1.0], [1.0, 0.5]];

fn c12_hopf_cole() -> Outcome {
    let fam = family("generic_cusp");
    let tab = hopf_cole_compare(&fam, &HOPF_COLE_PROBES, 0.5, &[0.2, 0.1, 0.05]).map_err(|e| e.to_string())?;
    if !tab.excluded.is_empty() {
        return Err(format!("probes excluded as singular: {:?}", tab.excluded));
    }
    let ratios: Vec<f64> = tab.rows.iter().filter_map(|r| r.ratio).collect();
    if ratios.len() != 2 * HOPF_COLE_PROBES.len() {
        return Err(format!("{} ratios", ratios.len()));
    }
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), r| (a.min(*r), b.max(*r)));
    let d = format!("5 probes, ratios in [{lo:.3}, {hi:.3}]");
    if lo >= 2.5 && hi <= 6.0 {
        Ok(d)
    } else {
        Err(d)
    }
}

fn c13_properties() -> Outcome {
    let mut master = ChaCha8Rng::seed_from_u64(MASTER_SEED);
    let mut seeds = |n: usize| -> Vec<u64> { (0..n).map(|_| master.gen()).collect() };
    let mut count = 0;
    let mut run = |name: &str, seeds: Vec<u64>, f: fn(u64) -> props::Check| -> Result<(), String> {
        for s in seeds {
            f(s).map_err(|e| format!("{name} (seed {s}): {e}"))?;
            count += 1;
        }
        Ok(())
    };
    run("resultant product identity", seeds(200), props::resultant_product_identity)?;
    run("resultant vanishing", seeds(50), props::resultant_zero_iff_common_root)?;
    run("factor reassembly", seeds(50), props::factor_multiplicity_reassembles)?;
    run("isolation vs Sturm", seeds(50), props::isolation_matches_sturm)?;
    run("flow round trip", seeds(100), props::flow_round_trip)?;
    run("minimiser consistency", seeds(50), props::minimiser_consistent)?;
    run("caustic consistency", seeds(10), props::caustic_consistent)?;
    run("double discriminant pattern", seeds(6), props::double_discriminant_pattern)?;
    run("Maxwell cusps and double sweep", seeds(3), props::maxwell_cusps_and_double_sweep)?;
    run("λ-equations and factors", seeds(20), props::lambda_equations)?;
    run("heat scheme positivity", seeds(10), props::heat_positive_and_monotone)?;
    props::elimination_sound()?;
    props::perestroika_ladder()?;
    props::eta_zeros_at_perestroika()?;
    let orders = props::hopf_cole_order(&HOPF_COLE_PROBES[..2])?;
    if orders.iter().any(|o| *o < 1.8) {
        return Err(format!("Hopf–Cole orders {orders:?}"));
    }
    Ok(format!("{} randomized cases (200 resultant pairs) and 4 deterministic properties, master seed {MASTER_SEED}", count))
}

fn main() {
    let criteria: Vec<(u32, &str, Box<dyn Fn() -> Outcome>)> = vec![
        (1, "generic-cusp caustic", Box::new(|| {
            let s = Instant::now();
            let r = c1_caustic();
            within(s.elapsed(), 1.0, r)
        })),
        (2, "generic-cusp zero level surface", Box::new(|| {
            let s = Instant::now();
            let r = c2_level();
            within(s.elapsed(), 5.0, r)
        })),
        (3, "double-discriminant multiplicities", Box::new(|| {
            let s = Instant::now();
            let r = c3_double_discriminant();
            within(s.elapsed(), 30.0, r)
        })),
        (4, "generic-cusp Maxwell set", Box::new(c4_maxwell)),
        (5, "perestroika time", Box::new(|| {
            let s = Instant::now();
            let r = c5_perestroika();
            within(s.elapsed(), 60.0, r)
        })),
        (6, "complex double points", Box::new(c6_double_points)),
        (7, "Strassen functional on ramp and tent", Box::new(c7_strassen)),
        (8, "Strassen scaling identity", Box::new(c8_scaling)),
        (9, "zeta closed form vs direct", Box::new(c9_zeta)),
        (10, "zeta recurrence surrogate", Box::new(|| {
            let s = Instant::now();
            let r = c10_recurrence();
            within(s.elapsed(), 600.0, r)
        })),
        (11, "Spitzer winding law", Box::new(c11_spitzer)),
        (12, "Hopf–Cole O(μ²) convergence", Box::new(|| {
            let s = Instant::now();
            let r = c12_hopf_cole();
            within(s.elapsed(), 300.0, r)
        })),
        (13, "property suites", Box::new(c13_properties)),
    ];
    let filter: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut unexpected = Vec::new();
    let mut passed = 0;
    let mut ran = 0;
    for (id, name, f) in &criteria {
        if !filter.is_empty() && !filter.contains(id) {
            continue;
        }
        ran += 1;
        let start = Instant::now();
        let r = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match r {
            Ok(d) => {
                passed += 1;
                println!("[PASS] {id:>2} {name}: {d} ({secs:.2} s)");
            }
            Err(d) => {
                println!("[FAIL] {id:>2} {name}: {d} ({secs:.2} s)");
                if !KNOWN_UNATTAINABLE.contains(id) {
                    unexpected.push(*id);
                }
            }
        }
    }
    println!("acceptance: {passed}/{ran} criteria pass");
    if !unexpected.is_empty() {
        println!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
