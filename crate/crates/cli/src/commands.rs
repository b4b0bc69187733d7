use std::fmt::Write as _;

use burgers_core::action::{ActionFamily, NoiseTerms};
use burgers_core::geometry::curve::fmt_num;
use burgers_core::geometry::{
    caustic_curve, complex_double_points, detect_generalised_cusps, detect_perestroika, level_surface_curve, maxwell_curve, maxwell_set,
    pre_maxwell_curve, render_svg, CausticFamily, LambdaGrid, ParamCurve,
};
use burgers_core::pde::hopf_cole_compare;
use burgers_core::turbulence::zeta::sign_changes;
use burgers_core::turbulence::{
    eta_path, find_turbulent_times, recurrence_experiment, spitzer_sample, zeta_path, BranchKind, CausticAction, EtaProcess, RecurrenceConfig,
};
use burgers_core::{Error, Result};
use clap::Args;
use serde_json::json;

use crate::opts::{parse_list, parse_points, parse_range, parse_seeds, Common, Format, Range};

fn family(c: &Common) -> Result<ActionFamily> {
    ActionFamily::new(&c.scenario()?)
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialise");
    s.push('\n');
    s
}

fn curve_json(c: &ParamCurve) -> serde_json::Value {
    json!({ "kind": c.kind, "t": c.t, "samples": c.samples })
}

fn emit_curve(common: &Common, curve: &ParamCurve, extra: Option<serde_json::Value>) -> Result<()> {
    let text = match common.format_or(Format::Csv) {
        Format::Csv => curve.to_csv(),
        Format::Json => {
            let mut v = curve_json(curve);
            if let (Some(serde_json::Value::Object(m)), serde_json::Value::Object(o)) = (extra, &mut v) {
                o.extend(m);
            }
            pretty(&v)
        }
        Format::Svg => planar_svg(&[curve], &[])?,
    };
    common.emit(&text)
}

fn planar_svg(curves: &[&ParamCurve], marks: &[[f64; 2]]) -> Result<String> {
    if curves.iter().any(|c| c.dim != 2) {
        return Err(Error::Unsupported("SVG output is planar".into()));
    }
    Ok(render_svg(curves, marks, 800, 600))
}

fn csv_only(common: &Common, default: Format) -> Result<Format> {
    match common.format_or(default) {
        Format::Svg => Err(Error::InvalidArgument("this subcommand has no SVG output".into())),
        f => Ok(f),
    }
}

fn positive_t(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("time must be positive, got {t}")))
    }
}

#[derive(Args, Debug)]
pub struct CausticArgs {
    #[command(flatten)]
    pub common: Common,
    /// Time t > 0
    #[arg(long, allow_negative_numbers = true)]
    pub t: f64,
    /// Grid of the first pre-image coordinate λ, start:stop:n
    #[arg(long, allow_hyphen_values = true, value_parser = parse_range, default_value = "-2:2:401")]
    pub lambda: Range,
    /// Grid of the second parameter (3-D scenarios only)
    #[arg(long, allow_hyphen_values = true, value_parser = parse_range, default_value = "-1:1:41")]
    pub mu: Range,
}

pub fn caustic(a: &CausticArgs) -> Result<()> {
    positive_t(a.t)?;
    let sc = a.common.scenario()?;
    let fam = ActionFamily::new(&sc)?;
    let cf = CausticFamily::new(&fam)?;
    let noise = a.common.noise(&sc, a.t)?;
    let grid = if sc.dim == 2 { LambdaGrid::One(a.lambda.points()) } else { LambdaGrid::Two(a.lambda.points(), a.mu.points()) };
    let curve = caustic_curve(&fam, &cf, a.t, &grid, &noise, true)?;
    emit_curve(&a.common, &curve, None)
}

#[derive(Args, Debug)]
pub struct LevelArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, allow_negative_numbers = true)]
    pub t: f64,
    /// Level c of S_t
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub c: f64,
    /// Grid of the first pre-image coordinate
    #[arg(long, allow_hyphen_values = true, value_parser = parse_range, default_value = "-2:2:401")]
    pub x0: Range,
}

pub fn level(a: &LevelArgs) -> Result<()> {
    positive_t(a.t)?;
    let sc = a.common.scenario()?;
    let fam = ActionFamily::new(&sc)?;
    let noise = a.common.noise(&sc, a.t)?;
    let curve = level_surface_curve(&fam, a.c, a.t, &a.x0.points(), &noise)?;
    emit_curve(&a.common, &curve, None)
}

#[derive(Args, Debug)]
pub struct MaxwellArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, allow_negative_numbers = true)]
    pub t: f64,
    /// Grid of the first pre-image coordinate for the pre-parameterised Maxwell curve
    #[arg(long, allow_hyphen_values = true, value_parser = parse_range, default_value = "-3:3:601")]
    pub x0: Range,
    /// Sample B_t = 0 on these horizontal lines instead, start:stop:n
    #[arg(long, allow_hyphen_values = true, value_parser = parse_range)]
    pub y: Option<Range>,
}

pub fn maxwell(a: &MaxwellArgs) -> Result<()> {
    positive_t(a.t)?;
    let sc = a.common.scenario()?;
    let fam = ActionFamily::new(&sc)?;
    let noise = a.common.noise(&sc, a.t)?;
    match &a.y {
        Some(y) => {
            let ms = maxwell_set(&fam, a.t, &noise, &y.points())?;
            let extra = json!({
                "double_discriminant": ms.double_discriminant.to_string(),
                "caustic_factor": ms.caustic_factor.to_string(),
                "b": ms.b.to_string(),
                "klein_points": ms.klein_points,
            });
            emit_curve(&a.common, &ms.curve, Some(extra))
        }
        None => emit_curve(&a.common, &maxwell_curve(&fam, a.t, &a.x0.points(), &noise)?, None),
    }
}

#[derive(Args, Debug)]
pub struct PremaxwellArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, allow_negative_numbers = true)]
    pub t: f64,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_range, default_value = "-3:3:601")]
    pub x0: Range,
}

pub fn premaxwell(a: &PremaxwellArgs) -> Result<()> {
    positive_t(a.t)?;
    let fam = family(&a.common)?;
    let pm = pre_maxwell_curve(&fam, a.t, &a.x0.points())?;
    emit_curve(&a.common, &pm.curve, Some(json!({ "polynomial": pm.poly.to_string() })))
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, allow_negative_numbers = true)]
    pub t: f64,
    /// Point x, comma-separated
    #[arg(long, value_parser = parse_list, allow_hyphen_values = true)]
    pub x: std::vec::Vec<f64>,
}

pub fn classify(a: &ClassifyArgs) -> Result<()> {
    positive_t(a.t)?;
    let sc = a.common.scenario()?;
    let fam = ActionFamily::new(&sc)?;
    let noise = a.common.noise(&sc, a.t)?;
    let cls = fam.classify_point(&a.x, a.t, &noise)?;
    let text = match csv_only(&a.common, Format::Json)? {
        Format::Json => pretty(&json!({ "x": a.x, "t": a.t, "classification": cls })),
        _ => {
            let mut s = String::from("root,value,second_sign,multiplicity\n");
            for c in &cls.critical_points {
                let _ = writeln!(s, "{},{},{},{}", fmt_num(c.root), fmt_num(c.value), c.second_sign, c.multiplicity);
            }
            s
        }
    };
    a.common.emit(&text)
}

#[derive(Args, Debug)]
pub struct ZetaArgs {
    #[command(flatten)]
    pub common: Common,
    /// λ-branch: cusped, orthogonal, zero-speed or subcaustic
    #[arg(long, default_value = "cusped")]
    pub branch: String,
    /// Time grid start:stop:n
    #[arg(long, allow_hyphen_values = true, value_parser = parse_range)]
    pub t: Range,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub c: f64,
    /// Drop the ε² terms of the closed form
    #[arg(long)]
    pub small_eps: bool,
}

pub fn zeta(a: &ZetaArgs) -> Result<()> {
    let branch = BranchKind::parse(&a.branch)?;
    positive_t(a.t.start)?;
    let sc = a.common.scenario()?;
    let fam = ActionFamily::new(&sc)?;
    let cf = CausticFamily::new(&fam)?;
    let ca = CausticAction::new(&fam, &cf)?;
    let path = a.common.path(&sc, a.t.stop)?;
    let z = zeta_path(&fam, &ca, branch, a.c, path.as_ref(), &a.t.points(), a.small_eps)?;
    let report = find_turbulent_times(&z);
    let text = match csv_only(&a.common, Format::Csv)? {
        Format::Json => pretty(&json!({ "zeta": z, "report": report })),
        _ => {
            let vals: Vec<(f64, Option<f64>)> = z.samples.iter().map(|s| (s.t, s.closed)).collect();
            let mut flag = vec![0u8; vals.len()];
            for (_, hi, _) in sign_changes(&vals) {
                flag[hi] = 1;
            }
            let opt = |v: Option<f64>| v.map(fmt_num).unwrap_or_default();
            let mut s = String::from("t,value,direct,branch,lambda,cool,zero\n");
            for (k, smp) in z.samples.iter().enumerate() {
                let lambda = smp.lambda.as_ref().map(|l| l.iter().map(|v| fmt_num(*v)).collect::<Vec<_>>().join(";")).unwrap_or_default();
                let cool = smp.cool.map(|c| if c { "cool" } else { "hot" }).unwrap_or("");
                let _ = writeln!(s, "{},{},{},{},{},{},{}", fmt_num(smp.t), opt(smp.closed), opt(smp.direct), branch.as_str(), lambda, cool, flag[k]);
            }
            s
        }
    };
    a.common.emit(&text)
}

#[derive(Args, Debug)]
pub struct EtaArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_range)]
    pub t: Range,
    /// Relative threshold for touching zeros (local minima of |ρ_η|)
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

pub fn eta(a: &EtaArgs) -> Result<()> {
    positive_t(a.t.start)?;
    let fam = family(&a.common)?;
    let cf = CausticFamily::new(&fam)?;
    let e = EtaProcess::new(&fam, &cf)?;
    let p = eta_path(&e, &a.t.points(), a.tol)?;
    let text = match csv_only(&a.common, Format::Csv)? {
        Format::Json => pretty(&json!({ "rho": e.rho.to_string(), "eta": p })),
        _ => {
            let mut s = String::from("t,value,zero\n");
            for (k, smp) in p.samples.iter().enumerate() {
                let lo = if k == 0 { f64::NEG_INFINITY } else { p.samples[k - 1].t };
                let zero = p.zeros.iter().any(|z| z.t > lo && z.t <= smp.t) as u8;
                let _ = writeln!(s, "{},{},{}", fmt_num(smp.t), smp.rho.map(fmt_num).unwrap_or_default(), zero);
            }
            s
        }
    };
    a.common.emit(&text)
}

#[derive(Args, Debug)]
pub struct PerestroikaArgs {
    #[command(flatten)]
    pub common: Common,
    /// Scan start:stop:n (n grid points)
    #[arg(long, allow_hyphen_values = true, value_parser = parse_range)]
    pub t: Range,
}

pub fn perestroika(a: &PerestroikaArgs) -> Result<()> {
    positive_t(a.t.start)?;
    if a.t.n < 2 {
        return Err(Error::InvalidArgument("perestroika needs a time range".into()));
    }
    let fam = family(&a.common)?;
    let cf = CausticFamily::new(&fam)?;
    let hits = detect_perestroika(&fam, &cf, a.t.start, a.t.stop, a.t.n - 1)?;
    let text = match csv_only(&a.common, Format::Json)? {
        Format::Json => pretty(&json!({ "perestroika": hits })),
        _ => {
            let mut s = String::from("t,lambda,cusps_before,cusps_after,f1,f2,f3,f4\n");
            for h in &hits {
                let l: Vec<String> = h.ladder.iter().map(|v| fmt_num(*v)).collect();
                let _ = writeln!(s, "{},{},{},{},{}", fmt_num(h.t), fmt_num(h.lambda), h.cusps_before, h.cusps_after, l.join(","));
            }
            s
        }
    };
    a.common.emit(&text)
}

#[derive(Args, Debug)]
pub struct DoublepointsArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, allow_negative_numbers = true)]
    pub t: f64,
}

pub fn doublepoints(a: &DoublepointsArgs) -> Result<()> {
    positive_t(a.t)?;
    let fam = family(&a.common)?;
    let cf = CausticFamily::new(&fam)?;
    let pts = complex_double_points(&cf, a.t)?;
    let text = match csv_only(&a.common, Format::Json)? {
        Format::Json => pretty(&json!({ "t": a.t, "count": pts.len(), "points": pts })),
        _ => {
            let mut s = String::from("a,eta,x,y,residual\n");
            for p in &pts {
                let _ = writeln!(s, "{},{},{},{},{}", fmt_num(p.a), fmt_num(p.eta), fmt_num(p.point[0]), fmt_num(p.point[1]), fmt_num(p.residual));
            }
            s
        }
    };
    a.common.emit(&text)
}

#[derive(Args, Debug)]
pub struct RecurrenceArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value = "cusped")]
    pub branch: String,
    /// Seeds: a..b or a comma-separated list
    #[arg(long, allow_hyphen_values = true, value_parser = parse_seeds, default_value = "0..100")]
    pub seeds: std::vec::Vec<u64>,
    /// Horizons T, comma-separated and increasing
    #[arg(long, allow_hyphen_values = true, value_parser = parse_list, default_value = "10,100,1000")]
    pub horizons: std::vec::Vec<f64>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub c: f64,
    /// Brownian time step (default: 10⁴ steps per unit time, at most 10⁷ steps)
    #[arg(long)]
    pub dt: Option<f64>,
    /// Evaluate ζ every this many Brownian steps
    #[arg(long, default_value_t = 1)]
    pub record_every: usize,
    #[arg(long)]
    pub small_eps: bool,
}

pub fn recurrence(a: &RecurrenceArgs) -> Result<()> {
    let branch = BranchKind::parse(&a.branch)?;
    let fam = family(&a.common)?;
    let cf = CausticFamily::new(&fam)?;
    let ca = CausticAction::new(&fam, &cf)?;
    let mut cfg = RecurrenceConfig::new(branch, a.c, a.seeds.clone(), a.horizons.clone());
    if let Some(dt) = a.dt {
        cfg.dt = dt;
    }
    cfg.record_every = a.record_every;
    cfg.small_epsilon = a.small_eps;
    let s = recurrence_experiment(&fam, &ca, &cfg)?;
    let text = match csv_only(&a.common, Format::Json)? {
        Format::Json => pretty(&json!(s)),
        _ => {
            let mut out = String::from("seed");
            for h in &cfg.horizons {
                let _ = write!(out, ",zeros_T{}", fmt_num(*h));
            }
            out.push('\n');
            for (seed, c) in cfg.seeds.iter().zip(&s.counts) {
                let cols: Vec<String> = c.iter().map(|v| v.to_string()).collect();
                let _ = writeln!(out, "{seed},{}", cols.join(","));
            }
            out
        }
    };
    a.common.emit(&text)
}

#[derive(Args, Debug)]
pub struct SpitzerArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 2000)]
    pub trials: usize,
    /// Final time (default e⁸)
    #[arg(long, default_value_t = 8f64.exp())]
    pub t: f64,
}

pub fn spitzer(a: &SpitzerArgs) -> Result<()> {
    let s = spitzer_sample(a.trials, a.t, a.common.seed)?;
    let text = match csv_only(&a.common, Format::Json)? {
        Format::Json => pretty(&json!({ "t": s.t, "trials": s.trials, "ks": s.ks, "resampled": s.resampled, "seed": a.common.seed, "values": s.values })),
        _ => {
            let mut out = String::from("value\n");
            for v in &s.values {
                let _ = writeln!(out, "{}", fmt_num(*v));
            }
            out
        }
    };
    a.common.emit(&text)
}

#[derive(Args, Debug)]
pub struct HopfColeArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 0.5)]
    pub t: f64,
    /// Probes x,y;x,y;...
    #[arg(long, value_parser = parse_points, allow_hyphen_values = true, default_value = "0.8,0.3;-1,0.5;-0.4,0.8;0.6,1;1,0.5")]
    pub probes: std::vec::Vec<[f64; 2]>,
    /// Viscosity ladder, comma-separated
    #[arg(long, allow_hyphen_values = true, value_parser = parse_list, default_value = "0.2,0.1,0.05")]
    pub mu: std::vec::Vec<f64>,
}

pub fn verify_hopfcole(a: &HopfColeArgs) -> Result<()> {
    positive_t(a.t)?;
    let fam = family(&a.common)?;
    let tab = hopf_cole_compare(&fam, &a.probes, a.t, &a.mu)?;
    for (p, why) in &tab.excluded {
        eprintln!("excluded probe ({}, {}): {why}", p[0], p[1]);
    }
    let text = match csv_only(&a.common, Format::Csv)? {
        Format::Json => pretty(&json!(tab)),
        _ => {
            let mut s = String::from("probe_x,probe_y,mu,value,s_t,error,ratio\n");
            for r in &tab.rows {
                let ratio = r.ratio.map(fmt_num).unwrap_or_default();
                let _ = writeln!(s, "{},{},{},{},{},{},{}", fmt_num(r.probe[0]), fmt_num(r.probe[1]), fmt_num(r.mu), fmt_num(r.value), fmt_num(r.s_t), fmt_num(r.error), ratio);
            }
            s
        }
    };
    a.common.emit(&text)
}

#[derive(Args, Debug)]
pub struct PlotArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, allow_negative_numbers = true)]
    pub t: f64,
    /// Level of the plotted level surface
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub c: f64,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_range, default_value = "-2:2:401")]
    pub lambda: Range,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_range, default_value = "-3:3:601")]
    pub x0: Range,
}

pub fn plot(a: &PlotArgs) -> Result<()> {
    positive_t(a.t)?;
    if a.common.format_or(Format::Svg) != Format::Svg {
        return Err(Error::InvalidArgument("plot writes SVG only".into()));
    }
    let sc = a.common.scenario()?;
    let fam = ActionFamily::new(&sc)?;
    let cf = CausticFamily::new(&fam)?;
    let noise: NoiseTerms = a.common.noise(&sc, a.t)?;
    let caustic = caustic_curve(&fam, &cf, a.t, &LambdaGrid::One(a.lambda.points()), &noise, true)?;
    let mx = maxwell_curve(&fam, a.t, &a.x0.points(), &noise)?;
    let lv = level_surface_curve(&fam, a.c, a.t, &a.x0.points(), &noise)?;
    let marks: Vec<[f64; 2]> = detect_generalised_cusps(&caustic).iter().map(|h| [h.point[0], h.point[1]]).collect();
    a.common.emit(&planar_svg(&[&caustic, &mx, &lv], &marks)?)
}
