mod commands;
mod opts;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::*;

/// Caustics, level surfaces, Maxwell sets and turbulent times of the inviscid
/// stochastic Burgers equation with polynomial initial action S₀.
#[derive(Parser, Debug)]
#[command(name = "burgers", version, args_override_self = true)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Caustic x_t(λ): image of the pre-caustic det(I + t∇²S₀) = 0 under the flow map,
    /// pre-parameterised by the first pre-image coordinate, with cool/hot labels
    Caustic(CausticArgs),
    /// Level surface {x : S_t(x) = c} from the pre-level curve, branch by branch
    Level(LevelArgs),
    /// Maxwell set: points with two real pre-images of equal minimal action, from the
    /// squared factor of the double discriminant or by pre-parameterisation
    Maxwell(MaxwellArgs),
    /// Pre-Maxwell curve in the pre-image plane (its polynomial and samples)
    Premaxwell(PremaxwellArgs),
    /// Critical points of the reduced action at (x, t), the Hamilton–Jacobi value and
    /// caustic/Maxwell/cool flags
    Classify(ClassifyArgs),
    /// Zeta process ζ_t^c (reduced action along a λ-branch of the caustic minus c);
    /// its sign changes are the real turbulent times
    Zeta(ZetaArgs),
    /// Resultant eta process ρ_η(t) = Res_λ(f‴, f⁗) along the caustic; its zeros are the
    /// complex turbulent times
    Eta(EtaArgs),
    /// Swallowtail perestroika times, where real cusps of the caustic are born or annihilate
    Perestroika(PerestroikaArgs),
    /// Complex double points a ± iη of the caustic that map to one real point
    Doublepoints(DoublepointsArgs),
    /// Recurrence of the zeta process: zero counts per seed on [1, T] for growing T
    Recurrence(RecurrenceArgs),
    /// Winding of planar Brownian motion about the origin against the Cauchy limit of 2θ_t/ln t
    Spitzer(SpitzerArgs),
    /// Hopf–Cole check: −μ² ln u^μ against S_t for a ladder of viscosities μ
    VerifyHopfcole(HopfColeArgs),
    /// SVG of the caustic (long dashes), Maxwell set (short dashes) and a level surface (solid)
    Plot(PlotArgs),
}

fn main() -> ExitCode {
    let args = match opts::expand_config(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => return fail("config", &e),
    };
    let cli = Cli::parse_from(args);
    let (name, res) = match &cli.cmd {
        Cmd::Caustic(a) => ("caustic", caustic(a)),
        Cmd::Level(a) => ("level", level(a)),
        Cmd::Maxwell(a) => ("maxwell", maxwell(a)),
        Cmd::Premaxwell(a) => ("premaxwell", premaxwell(a)),
        Cmd::Classify(a) => ("classify", classify(a)),
        Cmd::Zeta(a) => ("zeta", zeta(a)),
        Cmd::Eta(a) => ("eta", eta(a)),
        Cmd::Perestroika(a) => ("perestroika", perestroika(a)),
        Cmd::Doublepoints(a) => ("doublepoints", doublepoints(a)),
        Cmd::Recurrence(a) => ("recurrence", recurrence(a)),
        Cmd::Spitzer(a) => ("spitzer", spitzer(a)),
        Cmd::VerifyHopfcole(a) => ("verify-hopfcole", verify_hopfcole(a)),
        Cmd::Plot(a) => ("plot", plot(a)),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(name, &e),
    }
}

/// Machine-readable error on stderr; 2 for configuration problems, 3 for numerical ones.
fn fail(subcommand: &str, e: &burgers_core::Error) -> ExitCode {
    let body = serde_json::json!({
        "code": e.code(),
        "message": e.to_string(),
        "context": { "subcommand": subcommand },
    });
    eprintln!("{body}");
    ExitCode::from(if e.is_config() { 2 } else { 3 })
}
