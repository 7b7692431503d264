//! Experiment manifest. Every field has a default, so an empty file is the
//! full suite.

use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Check {
    Gb,
    Rr,
    Sig,
    Spin,
    TorusLefschetz,
    Holo,
    Slag,
    Average,
    Coisotropic,
    Parametrix,
    Geometry,
}

impl Check {
    pub const ALL: [Check; 11] = [
        Check::Gb,
        Check::Rr,
        Check::Sig,
        Check::Spin,
        Check::TorusLefschetz,
        Check::Holo,
        Check::Slag,
        Check::Average,
        Check::Coisotropic,
        Check::Parametrix,
        Check::Geometry,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Gb => "gb",
            Check::Rr => "rr",
            Check::Sig => "sig",
            Check::Spin => "spin",
            Check::TorusLefschetz => "torus-lefschetz",
            Check::Holo => "holo",
            Check::Slag => "slag",
            Check::Average => "average",
            Check::Coisotropic => "coisotropic",
            Check::Parametrix => "parametrix",
            Check::Geometry => "geometry",
        }
    }
}

impl FromStr for Check {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Check::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| CliError::UnknownCheck(s.to_string()))
    }
}

impl std::fmt::Display for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Samples {
    pub gb: usize,
    pub rr: usize,
    pub sig: usize,
    pub spin: usize,
    pub torus: usize,
    pub holo: usize,
    pub average: usize,
    pub coisotropic: usize,
    pub geometry: usize,
}

impl Default for Samples {
    fn default() -> Self {
        Self { gb: 1000, rr: 300, sig: 200, spin: 150, torus: 200, holo: 20, average: 25, coisotropic: 12, geometry: 100 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    /// Check names; empty selects all.
    pub checks: Vec<String>,
    pub seed: u64,
    /// Largest spectral cutoff for the special Lagrangian check; the decay
    /// fit also uses a half and a quarter of it.
    pub cutoff: f64,
    /// Heat times for the torus spectral integrals.
    pub t_grid: Vec<f64>,
    /// Heat times for small-time extrapolation.
    pub localization_grid: Vec<f64>,
    /// Record wall time per check; disable for byte-identical output.
    pub timing: bool,
    pub samples: Samples,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            checks: Vec::new(),
            seed: 20240601,
            cutoff: 200.0,
            t_grid: vec![0.05, 0.1, 0.2],
            localization_grid: vec![0.005, 0.01, 0.02, 0.04],
            timing: true,
            samples: Samples::default(),
        }
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: Config = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.selected()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e))?;
        Self::parse(&text)
    }

    pub fn selected(&self) -> Result<Vec<Check>, CliError> {
        if self.checks.is_empty() {
            return Ok(Check::ALL.to_vec());
        }
        let mut out: Vec<Check> = self.checks.iter().map(|s| s.parse()).collect::<Result<_, _>>()?;
        out.sort();
        out.dedup();
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_default() {
        assert_eq!(Config::parse("").unwrap(), Config::default());
        assert_eq!(Config::default().selected().unwrap().len(), 11);
    }

    #[test]
    fn unknown_check_names_token() {
        let e = Config::parse("checks = [\"gb\", \"gbb\"]").unwrap_err();
        assert!(e.to_string().contains("gbb"));
        assert!(Config::parse("sed = 3").is_err());
    }

    #[test]
    fn partial_override() {
        let c = Config::parse("seed = 7\n[samples]\ngb = 10\n").unwrap();
        assert_eq!((c.seed, c.samples.gb, c.samples.rr), (7, 10, 300));
    }
}
