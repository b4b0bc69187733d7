use std::path::{Path, PathBuf};

use burgers_core::action::NoiseTerms;
use burgers_core::scenario::Scenario;
use burgers_core::turbulence::WienerPath;
use burgers_core::{Error, Result};
use clap::{Args, ValueEnum};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

/// `start:stop:n` (n evenly spaced points, ends included) or a single value.
#[derive(Clone, Debug, PartialEq)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub n: usize,
}

impl Range {
    pub fn points(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.start];
        }
        (0..self.n).map(|i| self.start + (self.stop - self.start) * i as f64 / (self.n - 1) as f64).collect()
    }
}

pub fn parse_range(s: &str) -> std::result::Result<Range, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let num = |p: &str| p.trim().parse::<f64>().map_err(|_| format!("'{p}' is not a number"));
    let r = match parts.as_slice() {
        [v] => {
            let v = num(v)?;
            Range { start: v, stop: v, n: 1 }
        }
        [a, b, n] => {
            let n: usize = n.trim().parse().map_err(|_| format!("'{n}' is not a point count"))?;
            Range { start: num(a)?, stop: num(b)?, n }
        }
        _ => return Err(format!("malformed range '{s}', expected start:stop:n")),
    };
    if r.n == 0 || (r.n > 1 && !(r.stop > r.start)) || !r.start.is_finite() || !r.stop.is_finite() {
        return Err(format!("empty range '{s}'"));
    }
    Ok(r)
}

/// Comma-separated list of numbers.
pub fn parse_list(s: &str) -> std::result::Result<Vec<f64>, String> {
    s.split(',').map(|p| p.trim().parse::<f64>().map_err(|_| format!("'{p}' is not a number"))).collect()
}

/// `x,y;x,y;...`
pub fn parse_points(s: &str) -> std::result::Result<Vec<[f64; 2]>, String> {
    s.split(';')
        .map(|p| match parse_list(p)?.as_slice() {
            [x, y] => Ok([*x, *y]),
            _ => Err(format!("point '{p}' needs two coordinates")),
        })
        .collect()
}

/// `a..b` (half-open) or a comma-separated list.
pub fn parse_seeds(s: &str) -> std::result::Result<Vec<u64>, String> {
    if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|_| format!("bad seed '{a}'"))?;
        let b: u64 = b.trim().parse().map_err(|_| format!("bad seed '{b}'"))?;
        if b <= a {
            return Err(format!("empty seed range '{s}'"));
        }
        return Ok((a..b).collect());
    }
    s.split(',').map(|p| p.trim().parse::<u64>().map_err(|_| format!("bad seed '{p}'"))).collect()
}

#[derive(Args, Clone, Debug)]
pub struct Common {
    /// Built-in scenario: generic_cusp, polynomial_swallowtail, perestroika_x5x6, butterfly
    #[arg(long, default_value = "generic_cusp")]
    pub scenario: String,
    /// TOML file with name/dimension/s0/epsilon and an optional [run] table of flag values;
    /// its values take precedence over the command line
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Noise strength ε (the scenario value when absent)
    #[arg(long)]
    pub eps: Option<f64>,
    /// Seed of the Wiener path
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Brownian steps per unit time (at most 10⁷ in total)
    #[arg(long, default_value_t = 10_000)]
    pub steps_per_unit: usize,
    /// Output file; standard output when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

impl Common {
    pub fn scenario(&self) -> Result<Scenario> {
        let sc = match &self.config {
            Some(p) => Scenario::from_config_file(p)?,
            None => Scenario::builtin(&self.scenario)?,
        };
        match self.eps {
            Some(e) if self.config_epsilon().is_none() => sc.with_epsilon(e),
            _ => Ok(sc),
        }
    }

    fn config_epsilon(&self) -> Option<f64> {
        let text = std::fs::read_to_string(self.config.as_ref()?).ok()?;
        text.parse::<toml::Table>().ok()?.get("epsilon")?.as_float()
    }

    /// Seeded path on [0, horizon], or none when ε = 0.
    pub fn path(&self, sc: &Scenario, horizon: f64) -> Result<Option<WienerPath<f64>>> {
        if sc.epsilon == 0.0 {
            return Ok(None);
        }
        let steps = ((horizon * self.steps_per_unit as f64).ceil() as usize).clamp(2, 10_000_000);
        Ok(Some(WienerPath::simulate(sc.dim, horizon, steps, self.seed)?))
    }

    pub fn noise(&self, sc: &Scenario, t: f64) -> Result<NoiseTerms> {
        let p = self.path(sc, t)?;
        NoiseTerms::for_scenario(sc, p.as_ref(), t)
    }

    pub fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    pub fn emit(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(p) => write_file(p, text),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

fn write_file(p: &Path, text: &str) -> Result<()> {
    std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display())))
}

/// Expand `--config` files: their `[run]` entries are appended as `--key=value` flags, so
/// they take precedence over earlier flags.
pub fn expand_config(args: Vec<String>) -> Result<Vec<String>> {
    let mut path = None;
    for (i, a) in args.iter().enumerate() {
        if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else if a == "--config" {
            path = args.get(i + 1).cloned();
        }
    }
    let Some(path) = path else { return Ok(args) };
    let text = std::fs::read_to_string(&path).map_err(|e| Error::Io(format!("{path}: {e}")))?;
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::Parse(e.to_string()))?;
    let mut out = args;
    if let Some(run) = table.get("run") {
        let run = run.as_table().ok_or_else(|| Error::Parse("[run] must be a table".into()))?;
        for (k, v) in run {
            let flag = format!("--{}", k.replace('_', "-"));
            match v {
                toml::Value::Boolean(true) => out.push(flag),
                toml::Value::Boolean(false) => {}
                toml::Value::String(s) => out.push(format!("{flag}={s}")),
                toml::Value::Integer(n) => out.push(format!("{flag}={n}")),
                toml::Value::Float(x) => out.push(format!("{flag}={x}")),
                _ => return Err(Error::Parse(format!("unsupported value for run.{k}"))),
            }
        }
    }
    Ok(out)
}
