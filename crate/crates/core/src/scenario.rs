use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{parse_with_vars, var_names};
use crate::QPoly;

/// Pre-image coordinate names by dimension.
pub fn x0_names(dim: usize) -> Vec<String> {
    var_names(&["x0", "y0", "z0"][..dim])
}

/// Image coordinate names by dimension.
pub fn x_names(dim: usize) -> Vec<String> {
    var_names(&["x", "y", "z"][..dim])
}

/// Initial data `S₀` with noise `k_α(x) = x_α`, zero potential, amplitude ε.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub dim: usize,
    pub s0: QPoly,
    pub epsilon: f64,
}

pub const BUILTINS: [(&str, usize, &str); 4] = [
    ("generic_cusp", 2, "x0^2*y0/2"),
    ("polynomial_swallowtail", 2, "x0^5 + x0^2*y0"),
    ("perestroika_x5x6", 2, "x0^5 + x0^6*y0"),
    ("butterfly", 3, "x0^3*y0 + x0^2*z0"),
];

impl Scenario {
    pub fn new(name: &str, dim: usize, s0: &str, epsilon: f64) -> Result<Self> {
        if !(2..=3).contains(&dim) {
            return Err(Error::Unsupported(format!("dimension {dim} (supported: 2, 3)")));
        }
        if !(epsilon >= 0.0) || !epsilon.is_finite() {
            return Err(Error::InvalidArgument(format!("epsilon must be finite and ≥ 0, got {epsilon}")));
        }
        let s0 = parse_with_vars(s0, &x0_names(dim))?;
        for k in 1..dim {
            if s0.degree(k) > 1 {
                return Err(Error::Unsupported(format!(
                    "S0 must be at most linear in {}, found degree {}",
                    s0.vars()[k],
                    s0.degree(k)
                )));
            }
        }
        Ok(Scenario { name: name.to_string(), dim, s0, epsilon })
    }

    pub fn builtin(name: &str) -> Result<Self> {
        let (n, d, s) = BUILTINS
            .iter()
            .find(|(n, _, _)| *n == name)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown scenario '{name}'")))?;
        Self::new(n, *d, s, 0.0)
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Result<Self> {
        if !(epsilon >= 0.0) || !epsilon.is_finite() {
            return Err(Error::InvalidArgument(format!("epsilon must be finite and ≥ 0, got {epsilon}")));
        }
        self.epsilon = epsilon;
        Ok(self)
    }

    pub fn x0_vars(&self) -> Vec<String> {
        x0_names(self.dim)
    }

    pub fn x_vars(&self) -> Vec<String> {
        x_names(self.dim)
    }

    pub fn from_config_str(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        cfg.build()
    }

    pub fn from_config_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_config_str(&text)
    }
}

/// Key-value scenario file.
///
/// ```toml
/// name = "generic_cusp"     # built-in, or a label for a custom S0
/// dimension = 2
/// s0 = "x0^2*y0/2"
/// epsilon = 0.1
/// ```
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub name: Option<String>,
    pub dimension: Option<usize>,
    pub s0: Option<String>,
    pub epsilon: Option<f64>,
}

impl ScenarioConfig {
    pub fn build(&self) -> Result<Scenario> {
        let eps = self.epsilon.unwrap_or(0.0);
        match (&self.s0, &self.name) {
            (Some(s0), name) => {
                let dim = self.dimension.unwrap_or(2);
                Scenario::new(name.as_deref().unwrap_or("custom"), dim, s0, eps)
            }
            (None, Some(name)) => {
                let sc = Scenario::builtin(name)?;
                if let Some(d) = self.dimension {
                    if d != sc.dim {
                        return Err(Error::InvalidArgument(format!("{name} has dimension {}, not {d}", sc.dim)));
                    }
                }
                sc.with_epsilon(eps)
            }
            (None, None) => Err(Error::InvalidArgument("config needs a name or an s0".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_parse() {
        for (n, d, _) in BUILTINS {
            let s = Scenario::builtin(n).unwrap();
            assert_eq!(s.dim, d);
        }
        assert!(Scenario::builtin("nope").is_err());
    }

    #[test]
    fn nonlinear_higher_coordinate_rejected() {
        assert!(matches!(Scenario::new("bad", 2, "x0*y0^2", 0.0), Err(Error::Unsupported(_))));
        assert!(Scenario::new("bad", 4, "x0", 0.0).is_err());
    }

    #[test]
    fn config_file() {
        let s = Scenario::from_config_str("name = \"butterfly\"\nepsilon = 0.25\n").unwrap();
        assert_eq!(s.dim, 3);
        assert_eq!(s.epsilon, 0.25);
        let c = Scenario::from_config_str("dimension = 2\ns0 = \"x0^2/4 + y0/2\"\n").unwrap();
        assert_eq!(c.name, "custom");
        assert!(Scenario::from_config_str("s0 = \"(x0^2 + y0^2)/4\"\n").is_err());
        assert!(Scenario::from_config_str("epsilon = 1").is_err());
    }
}
