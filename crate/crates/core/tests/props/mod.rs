//! Property checks shared by the proptest suite and the acceptance harness.
//! Each check draws its own data from a seeded generator and reports the first violation.

use burgers_core::action::{ActionFamily, NoiseTerms};
use burgers_core::geometry::caustic::{caustic_curve, derivative_ladder, detect_perestroika, LambdaGrid};
use burgers_core::geometry::implicit::{pre_caustic_at, pre_maxwell_polynomial};
use burgers_core::geometry::maxwell::{double_discriminant_at, maxwell_curve, maxwell_partner};
use burgers_core::geometry::{detect_generalised_cusps, CausticFamily};
use burgers_core::pde::{hopf_cole_compare, solve_heat_with, GridSpec};
use burgers_core::poly::gcd::normalize;
use burgers_core::poly::roots::{count_roots, sturm_sequence};
use burgers_core::poly::{factor_multiplicity, isolate_real_roots, resultant, resultant_uni, var_names};
use burgers_core::scalar::{close_rel, rat, snap};
use burgers_core::scenario::Scenario;
use burgers_core::turbulence::branches::{dot_form, equation_residual};
use burgers_core::turbulence::{
    eta_path, solve_lambda_branches, strassen_scaling_check, zeta_path, CausticAction, EtaProcess, Functionals, WienerPath,
};
use burgers_core::{Polynomial, QPoly, Rational, UniPoly};
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Check = std::result::Result<(), String>;

pub const BUILTINS: [&str; 4] = ["generic_cusp", "polynomial_swallowtail", "perestroika_x5x6", "butterfly"];

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn small_rational(r: &mut ChaCha8Rng) -> Rational {
    rat(r.gen_range(-6..=6), r.gen_range(1..=4))
}

fn nonzero_rational(r: &mut ChaCha8Rng) -> Rational {
    loop {
        let q = small_rational(r);
        if !q.is_zero() {
            return q;
        }
    }
}

fn random_uni(r: &mut ChaCha8Rng, deg: usize) -> UniPoly<Rational> {
    let mut c: Vec<Rational> = (0..deg).map(|_| small_rational(r)).collect();
    c.push(nonzero_rational(r));
    UniPoly::new(c)
}

fn factorial(n: usize) -> Rational {
    (1..=n).fold(Rational::one(), |a, k| a * rat(k as i64, 1))
}

fn family(name: &str) -> ActionFamily {
    ActionFamily::new(&Scenario::builtin(name).unwrap()).unwrap()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// R(gh, (gh)′) against the product formula over R(g, g′), R(h, h′), R(g, h).
pub fn resultant_product_identity(seed: u64) -> Check {
    let mut r = rng(seed);
    let (m, n) = (r.gen_range(1..=4), r.gen_range(1..=4));
    let (g, h) = (random_uni(&mut r, m), random_uni(&mut r, n));
    if g.gcd(&h).degree() > 0 {
        // a shared root makes both sides vanish
        let f = g.mul(&h);
        return ensure(resultant_uni(&f, &f.derivative()).unwrap().is_zero(), || format!("shared root but R(f,f′) ≠ 0: g={g:?} h={h:?}"));
    }
    let f = g.mul(&h);
    let nn = m + n;
    let fn0 = f.leading() * factorial(nn);
    let gm0 = g.leading() * factorial(m);
    let hn0 = h.leading() * factorial(n);
    let base = factorial(m) * factorial(n) / factorial(nn) * fn0 / (gm0 * hn0);
    let mut rhs = num_traits::pow(base, nn - 1);
    if (m * n) % 2 == 1 {
        rhs = -rhs;
    }
    let rgh = resultant_uni(&g, &h).unwrap();
    rhs = rhs * resultant_uni(&g, &g.derivative()).unwrap() * resultant_uni(&h, &h.derivative()).unwrap() * rgh.clone() * rgh;
    let lhs = resultant_uni(&f, &f.derivative()).unwrap();
    ensure(lhs == rhs, || format!("R(f,f′) = {lhs} but product formula gives {rhs} for g={g:?}, h={h:?}"))
}

/// Resultants vanish exactly on planted common factors and not on coprime pairs.
pub fn resultant_zero_iff_common_root(seed: u64) -> Check {
    let mut r = rng(seed);
    let v = var_names(&["x", "y"]);
    let rand_poly = |r: &mut ChaCha8Rng, dx: u32| {
        let mut p = Polynomial::zero(&v);
        for i in 0..=dx {
            for j in 0..=1 {
                p.add_term(vec![i, j], small_rational(r));
            }
        }
        p.add_term(vec![dx + 1, 0], nonzero_rational(r));
        p
    };
    let common = rand_poly(&mut r, 0);
    let (dp, dq) = (r.gen_range(0..2), r.gen_range(0..2));
    let p = &rand_poly(&mut r, dp) * &common;
    let q = &rand_poly(&mut r, dq) * &common;
    let res = resultant(&p, &q, "x").map_err(|e| e.to_string())?;
    ensure(res.is_zero(), || format!("planted common factor but resultant {res}"))?;
    let (a, b) = (rand_poly(&mut r, 1), rand_poly(&mut r, 1));
    let coprime = burgers_core::poly::gcd(&a, &b).total_degree() == 0;
    let res = resultant(&a, &b, "x").map_err(|e| e.to_string())?;
    // over ℚ(y), res ≡ 0 exactly when a and b share a factor involving x
    let shared_x = !coprime && burgers_core::poly::gcd(&a, &b).degree(0) > 0;
    ensure(res.is_zero() == shared_x, || format!("resultant {res} for a={a}, b={b}"))
}

/// The multiplicity factorisation multiplies back to its input.
pub fn factor_multiplicity_reassembles(seed: u64) -> Check {
    let mut r = rng(seed);
    let v = var_names(&["x", "y", "t"]);
    let mut d = Polynomial::constant(&v, nonzero_rational(&mut r));
    for _ in 0..r.gen_range(1..=3) {
        let mut f = Polynomial::zero(&v);
        for _ in 0..3 {
            f.add_term(vec![r.gen_range(0..=2), r.gen_range(0..=1), r.gen_range(0..=1)], small_rational(&mut r));
        }
        if f.is_constant() {
            continue;
        }
        d = &d * &f.pow(r.gen_range(1..=3));
    }
    let fm = factor_multiplicity(&d, &["t"]).map_err(|e| e.to_string())?;
    let back = fm.reassemble(d.vars());
    ensure(back == d, || format!("reassembled {back} from {d}"))
}

/// Isolating intervals in (a, b] match the Sturm count there.
pub fn isolation_matches_sturm(seed: u64) -> Check {
    let mut r = rng(seed);
    let deg = r.gen_range(1..=3);
    let mut p = random_uni(&mut r, deg);
    for _ in 0..r.gen_range(0..=2) {
        p = p.mul(&UniPoly::linear_root(small_rational(&mut r)));
    }
    let sf = p.squarefree();
    let seq = sturm_sequence(&sf);
    let (mut a, mut b) = (small_rational(&mut r), small_rational(&mut r));
    if a > b {
        std::mem::swap(&mut a, &mut b);
    }
    if a == b {
        b = a.clone() + Rational::one();
    }
    let iso = isolate_real_roots(&p, Some((a.clone(), b.clone()))).map_err(|e| e.to_string())?;
    let sturm = count_roots(&seq, &a, &b);
    ensure(iso.len() == sturm, || format!("{} intervals vs Sturm count {sturm} on ({a}, {b}] for {p:?}", iso.len()))?;
    let all = isolate_real_roots(&p, None).map_err(|e| e.to_string())?;
    let bound = all.intervals.iter().fold(Rational::one(), |m, (lo, hi)| m.max(lo.abs()).max(hi.abs())) + Rational::one();
    ensure(all.len() == count_roots(&seq, &-bound.clone(), &bound), || "global count differs from Sturm".into())
}

/// Mapping a random pre-image forward and solving back recovers its first coordinate.
pub fn flow_round_trip(seed: u64) -> Check {
    let mut r = rng(seed);
    let name = BUILTINS[r.gen_range(0..BUILTINS.len())];
    let fam = family(name);
    let d = fam.dim();
    let noise = NoiseTerms::zero(d);
    let t = [0.5, 1.0, 2.0][r.gen_range(0..3)];
    let x0: Vec<f64> = (0..d).map(|_| r.gen_range(-2.0..2.0)).collect();
    let x = fam.flow_map(&x0, t, &noise).map_err(|e| e.to_string())?;
    let cps = fam.reduced.critical_points(&x, t, &noise).map_err(|e| e.to_string())?;
    ensure(cps.iter().any(|c| (c.root - x0[0]).abs() <= 1e-9 * x0[0].abs().max(1.0)), || {
        format!("{name}: x₀ = {x0:?} not among the roots {:?}", cps.iter().map(|c| c.root).collect::<Vec<_>>())
    })
}

/// The elimination chain solves every higher ∂(tA)/∂x₀^α identically.
pub fn elimination_sound() -> Check {
    for name in BUILTINS {
        let fam = family(name);
        for (k, res) in fam.reduced.chain_residuals(&fam.scaled_action).iter().enumerate() {
            ensure(res.is_zero(), || format!("{name}: residual {k} is {res}"))?;
        }
    }
    Ok(())
}

/// S_t(x) is the smallest listed action, attained once off the Maxwell set.
pub fn minimiser_consistent(seed: u64) -> Check {
    let mut r = rng(seed);
    let name = BUILTINS[r.gen_range(0..3)];
    let fam = family(name);
    let t = r.gen_range(0.3..2.0);
    let x = [r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0)];
    let cls = match fam.classify_point(&x, t, &NoiseTerms::zero(2)) {
        Ok(c) => c,
        Err(burgers_core::Error::Degenerate(_)) => return Ok(()),
        Err(e) => return Err(e.to_string()),
    };
    for c in &cls.critical_points {
        ensure(cls.hj_value <= c.value + 1e-12 * c.value.abs().max(1.0), || format!("{name} {x:?}: S_t above {c:?}"))?;
    }
    let attained = cls.critical_points.iter().filter(|c| close_rel(c.value, cls.hj_value, 1e-9)).count();
    if !cls.on_maxwell && !cls.on_caustic {
        ensure(attained == 1, || format!("{name} {x:?} t={t}: minimum attained {attained} times off the Maxwell set"))?;
    }
    Ok(())
}

/// f′ and f″ vanish at x_t(λ) on every caustic sample.
pub fn caustic_consistent(seed: u64) -> Check {
    let mut r = rng(seed);
    let name = BUILTINS[r.gen_range(0..3)];
    let fam = family(name);
    let cf = CausticFamily::new(&fam).unwrap();
    let t = [0.5, 1.0, 2.0][r.gen_range(0..3)];
    let noise = NoiseTerms::zero(2);
    let grid: Vec<f64> = (0..20).map(|_| r.gen_range(-1.5..1.5)).collect();
    let curve = caustic_curve(&fam, &cf, t, &LambdaGrid::One(grid), &noise, false).map_err(|e| e.to_string())?;
    for s in &curve.samples {
        let f = fam.reduced.at(&s.point.iter().map(|v| snap(*v)).collect::<Vec<_>>(), &snap(t), &noise).unwrap();
        let ff = f.to_f64();
        let scale = ff.coeffs().iter().enumerate().map(|(k, c)| (c * s.param[0].powi(k as i32)).abs()).fold(1.0, f64::max);
        let (d1, d2) = (ff.derivative().eval_f64(s.param[0]), ff.derivative().derivative().eval_f64(s.param[0]));
        ensure(d1.abs() + d2.abs() < 1e-9 * scale, || format!("{name} t={t} λ={}: f′={d1}, f″={d2}", s.param[0]))?;
    }
    Ok(())
}

/// Square-free structure {3, 2} of D(t) at a random time.
pub fn double_discriminant_pattern(seed: u64) -> Check {
    let mut r = rng(seed);
    let name = ["generic_cusp", "polynomial_swallowtail"][r.gen_range(0..2)];
    let fam = family(name);
    let t = r.gen_range(1..=8) as f64 / 4.0;
    let d = double_discriminant_at(&fam, t, &NoiseTerms::zero(2)).map_err(|e| e.to_string())?;
    let fm = factor_multiplicity(&d, &[]).map_err(|e| e.to_string())?;
    let mut ms = fm.multiplicities();
    ms.sort_unstable();
    ensure(ms == vec![2, 3], || format!("{name} t={t}: multiplicities {ms:?}"))
}

/// |p(v)| relative to the sum of its term magnitudes.
fn rel_eval(p: &burgers_core::FPoly, v: &[f64]) -> f64 {
    let mag: f64 = p.terms().iter().map(|(e, c)| e.iter().zip(v).fold(c.abs(), |m, (k, x)| m * x.abs().powi(*k as i32))).sum();
    p.eval_f64(v).abs() / mag.max(1.0)
}

/// Maxwell-curve cusps sit over the pre-caustic; every sample is reached from its partner too.
pub fn maxwell_cusps_and_double_sweep(seed: u64) -> Check {
    let mut r = rng(seed);
    let fam = family("polynomial_swallowtail");
    let t = r.gen_range(0.8..1.2);
    let noise = NoiseTerms::zero(2);
    let grid: Vec<f64> = (0..=200).map(|i| -0.4 + 0.9 * i as f64 / 200.0).collect();
    let c = maxwell_curve(&fam, t, &grid, &noise).map_err(|e| e.to_string())?;
    let pc = pre_caustic_at(&fam, t).unwrap().to_f64_poly();
    for h in detect_generalised_cusps(&c) {
        let v = rel_eval(&pc, &h.preimage);
        ensure(v < 1e-8, || format!("t={t}: Maxwell cusp at {:?} off the pre-caustic ({v})", h.point))?;
    }
    let pm = pre_maxwell_polynomial(&fam, t).unwrap().to_f64_poly();
    for _ in 0..5 {
        let Some(s) = c.samples.get(r.gen_range(0..c.samples.len().max(1))) else { break };
        let p = maxwell_partner(&fam, &s.preimage, t, &noise).map_err(|e| e.to_string())?;
        let img = fam.flow_map(&p, t, &noise).unwrap();
        ensure((img[0] - s.point[0]).abs() < 1e-8 && (img[1] - s.point[1]).abs() < 1e-8, || format!("partner of {:?} maps elsewhere", s.preimage))?;
        ensure(rel_eval(&pm, &p) < 1e-8, || format!("partner {p:?} is off the pre-Maxwell curve"))?;
        ensure((p[0] - s.preimage[0]).abs() > 1e-9, || "partner coincides with the sample".into())?;
    }
    Ok(())
}

/// At every detected perestroika the first four λ-derivatives of f vanish.
pub fn perestroika_ladder() -> Check {
    let fam = family("perestroika_x5x6");
    let cf = CausticFamily::new(&fam).unwrap();
    let hits = detect_perestroika(&fam, &cf, 2.0, 3.0, 20).map_err(|e| e.to_string())?;
    ensure(!hits.is_empty(), || "no perestroika found on [2, 3]".into())?;
    for h in &hits {
        let ladder = derivative_ladder(&fam, &cf, h.lambda, &snap(h.t)).map_err(|e| e.to_string())?;
        ensure(ladder.iter().all(|v| *v < 1e-6), || format!("ladder {ladder:?} at t = {}", h.t))?;
    }
    Ok(())
}

fn random_noise(r: &mut ChaCha8Rng, d: usize) -> NoiseTerms {
    let f = Functionals {
        w: (0..d).map(|_| r.gen_range(-2.0..2.0)).collect(),
        int_w: (0..d).map(|_| r.gen_range(-2.0..2.0)).collect(),
        int_w2: r.gen_range(0.0..3.0),
    };
    NoiseTerms::from_functionals(r.gen_range(0.05..0.5), &f)
}

/// Every λ-root solves the gradient system and its dot-product form; the branch factors
/// multiply back to the full λ-polynomial.
pub fn lambda_equations(seed: u64) -> Check {
    let mut r = rng(seed);
    let name = ["generic_cusp", "polynomial_swallowtail", "butterfly"][r.gen_range(0..3)];
    let fam = family(name);
    let cf = CausticFamily::new(&fam).unwrap();
    let ca = CausticAction::new(&fam, &cf).unwrap();
    let d = fam.dim();
    let noise = random_noise(&mut r, d);
    let t = r.gen_range(0.5..3.0);
    let b = match solve_lambda_branches(&ca, t, &noise) {
        Ok(b) => b,
        Err(burgers_core::Error::Degenerate(_)) => return Ok(()),
        Err(e) => return Err(format!("{name}: {e}")),
    };
    for root in &b.roots {
        let res = equation_residual(&ca, &root.lambda, t, &noise);
        ensure(res < 1e-8, || format!("{name} t={t}: residual {res} at {root:?}"))?;
        if d == 2 {
            let dot = dot_form(&ca, &root.lambda, t, &noise);
            let (x, _) = ca.point(&root.lambda, t);
            let scale = x.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            ensure(dot[0].abs() < 1e-8 * scale, || format!("{name} t={t}: dot form {dot:?} at {root:?}"))?;
        }
    }
    let prod = b.factors.iter().fold(QPoly::one(b.full.vars()), |acc, (_, f)| &acc * &f.embed(b.full.vars()).unwrap());
    ensure(normalize(&prod) == normalize(&b.full), || format!("{name}: factors do not multiply to the λ-polynomial"))
}

/// Closed-form and direct ζ agree along a seeded path on every branch with roots.
pub fn zeta_agreement(seed: u64, name: &str, branch: burgers_core::turbulence::BranchKind, times: &[f64]) -> std::result::Result<f64, String> {
    let sc = Scenario::builtin(name).unwrap().with_epsilon(0.3).unwrap();
    let fam = ActionFamily::new(&sc).unwrap();
    let cf = CausticFamily::new(&fam).unwrap();
    let ca = CausticAction::new(&fam, &cf).unwrap();
    let horizon = times.iter().copied().fold(0.0, f64::max);
    let path = WienerPath::simulate(sc.dim, horizon, (horizon * 1000.0) as usize, seed).unwrap();
    let z = zeta_path(&fam, &ca, branch, 0.0, Some(&path), times, false).map_err(|e| format!("{name} seed {seed}: {e}"))?;
    ensure(z.gaps() < z.samples.len(), || format!("{name} seed {seed}: branch {branch:?} never has a root"))?;
    Ok(z.max_disagreement())
}

/// h(n)²n⁻¹Y_n(W) = Y₁(Z_n).
pub fn scaling_identity(seed: u64, ns: &[usize]) -> std::result::Result<f64, String> {
    let horizon = *ns.iter().max().unwrap() as f64;
    let w = WienerPath::simulate(2, horizon, (horizon * 200.0) as usize, seed).unwrap();
    let mut worst = 0.0f64;
    for &n in ns {
        let (l, r) = strassen_scaling_check(&w, n).map_err(|e| e.to_string())?;
        worst = worst.max((l - r).abs());
    }
    Ok(worst)
}

/// Zeros of ρ_η lie at perestroika times (noise-free).
pub fn eta_zeros_at_perestroika() -> Check {
    let fam = family("perestroika_x5x6");
    let cf = CausticFamily::new(&fam).unwrap();
    let eta = EtaProcess::new(&fam, &cf).map_err(|e| e.to_string())?;
    let times: Vec<f64> = (0..=40).map(|i| 2.0 + i as f64 / 40.0).collect();
    let p = eta_path(&eta, &times, 1e-9).map_err(|e| e.to_string())?;
    let hits = detect_perestroika(&fam, &cf, 2.0, 3.0, 40).map_err(|e| e.to_string())?;
    for z in &p.zeros {
        ensure(hits.iter().any(|h| (h.t - z.t).abs() < 1e-3), || format!("ρ_η zero at {} is not a perestroika time", z.t))?;
    }
    ensure(!p.zeros.is_empty(), || "ρ_η has no zero on [2, 3]".into())
}

/// The explicit heat scheme keeps u positive and inside the range of its initial data.
pub fn heat_positive_and_monotone(seed: u64) -> Check {
    let mut r = rng(seed);
    let (a, b, c) = (r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0), r.gen_range(0.1..1.0));
    let mu = r.gen_range(0.3..1.0);
    let spec = GridSpec { x: [-1.0, 1.0], y: [-1.0, 1.0], h: 0.1, dtau: None };
    let ln_u0 = |x: f64, y: f64| -(a * x + b * y + c * (x * x + y * y)) / (mu * mu);
    let g = solve_heat_with(ln_u0, &spec, mu, 0.05).map_err(|e| e.to_string())?;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for j in 0..g.ny {
        for i in 0..g.nx {
            let (x, y) = g.coords(i, j);
            lo = lo.min(ln_u0(x, y));
            hi = hi.max(ln_u0(x, y));
        }
    }
    for j in 0..g.ny {
        for i in 0..g.nx {
            let v = g.ln_u(i, j);
            ensure(v.is_finite() && g.values[j * g.nx + i] > 0.0, || format!("u ≤ 0 at ({i}, {j})"))?;
            ensure(v >= lo - 1e-9 && v <= hi + 1e-9, || format!("ln u = {v} outside [{lo}, {hi}] at ({i}, {j})"))?;
        }
    }
    Ok(())
}

/// Empirical order of −μ² ln u → S_t at smooth probes.
pub fn hopf_cole_order(probes: &[[f64; 2]]) -> std::result::Result<Vec<f64>, String> {
    let fam = family("generic_cusp");
    let tab = hopf_cole_compare(&fam, probes, 0.5, &[0.2, 0.1, 0.05]).map_err(|e| e.to_string())?;
    Ok(tab.orders.iter().map(|(_, o)| *o).collect())
}
