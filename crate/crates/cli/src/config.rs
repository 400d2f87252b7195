//! Run configuration: a single JSON document, every field optional.
//!
//! Precedence: command-line flags, then the config document, then the
//! defaults below. A run manifest is also accepted as a config document;
//! its `config` field is used.

use crate::Failure;
use doorway::ensembles::{Background, Sampler};
use serde::{Deserialize, Serialize};
use std::io::Read;
use std::path::Path;

/// A grid given either as an explicit list or as `start`, `stop`, `step`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    Range { start: f64, stop: f64, step: f64 },
    List(Vec<f64>),
}

impl Grid {
    pub fn range(start: f64, stop: f64, step: f64) -> Self {
        Grid::Range { start, stop, step }
    }

    pub fn points(&self, what: &str) -> Result<Vec<f64>, Failure> {
        let v = match self {
            Grid::List(v) => v.clone(),
            &Grid::Range { start, stop, step } => {
                if !(step > 0.0 && step.is_finite() && start.is_finite() && stop >= start) {
                    return Err(Failure::config(format!("{what}: need finite start <= stop and step > 0")));
                }
                let count = ((stop - start) / step + 1e-9).floor() as usize;
                (0..=count).map(|i| start + i as f64 * step).collect()
            }
        };
        if v.is_empty() {
            return Err(Failure::config(format!("{what}: empty grid")));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Failure::config(format!("{what}: non-finite grid point")));
        }
        Ok(v)
    }
}

/// Closed-form curves the `analytic` and `compare` subcommands can evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Formula {
    Poisson,
    Gue,
    Goe,
    GoeAdd,
    PoissonReference,
    GueReference,
    Fgr,
    GruPoisson,
    GruGue,
    GruGoe,
}

impl Formula {
    pub fn name(self) -> &'static str {
        match self {
            Formula::Poisson => "poisson",
            Formula::Gue => "gue",
            Formula::Goe => "goe",
            Formula::GoeAdd => "goe_add",
            Formula::PoissonReference => "poisson_reference",
            Formula::GueReference => "gue_reference",
            Formula::Fgr => "fgr",
            Formula::GruPoisson => "gru_poisson",
            Formula::GruGue => "gru_gue",
            Formula::GruGoe => "gru_goe",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bins {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

/// One side of a comparison. Missing fields fall back to the top level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Source {
    Mc {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        background: Option<Background>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        beta: Option<u8>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lambda: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        samples: Option<u64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tau: Option<Grid>,
    },
    Analytic {
        formula: Formula,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lambda: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tau: Option<Grid>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelPoint {
    pub k: f64,
    pub s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    /// Background ensemble for `mc` and `kernel-check`.
    pub background: Background,
    /// Coupling β: 1 real, 2 complex.
    pub beta: u8,
    pub lambda: f64,
    /// λ values for `analytic`; defaults to `[lambda]`.
    pub lambdas: Option<Vec<f64>>,
    /// Number of background levels.
    pub n: usize,
    pub samples: u64,
    pub seed: u64,
    /// Worker threads: 1 serial, 0 all cores.
    pub threads: usize,
    /// Largest acceptable quadrature error estimate; larger ones raise a warning.
    pub tol: f64,
    /// Finite-N allowance subtracted from |difference| before z-scoring in `compare`.
    pub allowance: f64,
    pub sampler: Sampler,
    pub tau: Grid,
    /// `mc`: also estimate the mean IPR.
    pub ipr: bool,
    /// `mc`: LDOS histogram bins in units of D.
    pub ldos: Option<Bins>,
    /// `analytic`: curves to evaluate.
    pub formulas: Vec<Formula>,
    /// `ipr-sweep`: λ grid.
    pub lambda_grid: Grid,
    /// `compare`: the two curves to join.
    pub left: Source,
    pub right: Source,
    /// `kernel-check`: (k, s[, λ]) points.
    pub points: Vec<KernelPoint>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            background: Background::Gue,
            beta: 2,
            lambda: 0.5,
            lambdas: None,
            n: 400,
            samples: 2000,
            seed: 1,
            threads: 0,
            tol: 1e-8,
            allowance: 0.01,
            sampler: Sampler::default(),
            tau: Grid::range(0.0, 10.0, 0.05),
            ipr: true,
            ldos: None,
            formulas: vec![Formula::Poisson, Formula::Gue, Formula::Goe],
            lambda_grid: Grid::range(0.0, 3.0, 0.05),
            left: Source::Analytic {
                formula: Formula::Gue,
                lambda: None,
                tau: None,
            },
            right: Source::Mc {
                background: None,
                beta: None,
                lambda: None,
                n: None,
                samples: None,
                seed: None,
                tau: None,
            },
            points: [(0.0, 1.0), (1.0, 1.0), (-1.0, 1.0), (2.0, 0.5), (0.5, 2.0)]
                .into_iter()
                .map(|(k, s)| KernelPoint { k, s, lambda: None })
                .collect(),
        }
    }
}

/// Reads a config document from a path, `-` meaning stdin.
pub fn load(path: &Path) -> Result<Config, Failure> {
    let text = if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::config(format!("cannot read config from stdin: {e}")))?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|e| Failure::config(format!("cannot read {}: {e}", path.display())))?
    };
    parse(&text)
}

pub fn parse(text: &str) -> Result<Config, Failure> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Failure::config(format!("config is not valid JSON: {e}")))?;
    // a manifest carries the effective config of its run
    let value = match value {
        serde_json::Value::Object(mut map) if map.contains_key("outputs") && map.contains_key("config") => {
            map.remove("config").unwrap_or_default()
        }
        v => v,
    };
    serde_json::from_value(value).map_err(|e| Failure::config(format!("invalid config: {e}")))
}
