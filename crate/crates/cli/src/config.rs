//! Sweep configuration: `key = value` lines, `#` starts a comment.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use aia_core::numkit::Tolerances;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Line { line: usize, msg: String },
    #[error("{0}")]
    Invalid(String),
    #[error("cannot read {path}: {msg}")]
    Io { path: String, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    Lz,
    Tfi,
    Open,
}

impl FromStr for Model {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "lz" => Ok(Model::Lz),
            "tfi" => Ok(Model::Tfi),
            "open" => Ok(Model::Open),
            _ => Err(format!("unknown model `{s}` (expected lz, tfi or open)")),
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Lz => "lz",
            Model::Tfi => "tfi",
            Model::Open => "open",
        })
    }
}

/// Column selector: a numbered switching rule or the optimizer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ScenarioSel {
    Rule(u8),
    Opt,
}

impl FromStr for ScenarioSel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "opt" => Ok(ScenarioSel::Opt),
            "1" | "2" | "3" | "4" => Ok(ScenarioSel::Rule(s.parse().unwrap())),
            _ => Err(format!("unknown scenario `{s}` (expected 1, 2, 3, 4 or opt)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub log: bool,
}

impl Grid {
    /// Twelve points per decade, i.e. sixty per five decades.
    pub fn default_points(min: f64, max: f64) -> usize {
        ((12.0 * (max / min).log10()).round() as usize).max(2)
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        (0..n)
            .map(|i| {
                if i == 0 {
                    return self.min;
                }
                if i == n - 1 {
                    return self.max;
                }
                let f = i as f64 / (n - 1) as f64;
                if self.log {
                    self.min * (self.max / self.min).powf(f)
                } else {
                    self.min + (self.max - self.min) * f
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub model: Model,
    pub x: f64,
    pub z_i: f64,
    pub z_f: f64,
    pub chain_length: usize,
    pub h_i: f64,
    pub h_f: f64,
    pub g: f64,
    pub temperatures: Vec<f64>,
    pub grid: Grid,
    pub scenarios: Vec<ScenarioSel>,
    pub tolerances: Tolerances,
    pub out: Option<PathBuf>,
    /// Number of Δτ samples for `dtau-scan`.
    pub dtau_points: usize,
    /// Half-width of the `dtau-scan` grid; `None` scans `[-t_f, t_f]`.
    pub dtau_span: Option<f64>,
}

pub const DEFAULT_TEMPERATURES: [f64; 4] = [0.05, 0.1, 0.5, 1.0];

const KEYS: &[&str] = &[
    "model", "x", "z_i", "z_f", "L", "h_i", "h_f", "g", "temperatures", "tf_min", "tf_max", "tf_points", "tf_log",
    "scenarios", "rel_tol", "abs_tol", "out", "dtau_points",
    "dtau_span",
];

impl SweepConfig {
    pub fn defaults(model: Model) -> Self {
        let (min, max) = (0.1, 1e4);
        Self {
            model,
            x: 0.1,
            z_i: -1.0,
            z_f: 1.0,
            chain_length: 150,
            h_i: 0.5,
            h_f: 1.5,
            g: 0.01,
            temperatures: DEFAULT_TEMPERATURES.to_vec(),
            grid: Grid { min, max, points: Grid::default_points(min, max), log: true },
            scenarios: match model {
                Model::Tfi => vec![ScenarioSel::Rule(1), ScenarioSel::Rule(2), ScenarioSel::Opt],
                _ => vec![
                    ScenarioSel::Rule(1),
                    ScenarioSel::Rule(2),
                    ScenarioSel::Rule(3),
                    ScenarioSel::Rule(4),
                    ScenarioSel::Opt,
                ],
            },
            tolerances: Tolerances::default(),
            out: None,
            dtau_points: 2001,
            dtau_span: None,
        }
    }

    pub fn from_file(path: &Path, model: Model) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Io { path: path.display().to_string(), msg: e.to_string() })?;
        Self::parse(&text, model)
    }

    /// The value of the `model` key, if the file has one.
    pub fn declared_model(text: &str) -> Result<Option<Model>, ConfigError> {
        for (idx, raw) in text.lines().enumerate() {
            let content = raw.split('#').next().unwrap_or("").trim();
            if let Some((k, v)) = content.split_once('=') {
                if k.trim() == "model" {
                    let m = v.trim().parse().map_err(|msg| ConfigError::Line { line: idx + 1, msg })?;
                    return Ok(Some(m));
                }
            }
        }
        Ok(None)
    }

    /// Parses `text` on top of the defaults for `model`. A `model` key, if
    /// present, must agree.
    pub fn parse(text: &str, model: Model) -> Result<Self, ConfigError> {
        let mut cfg = Self::defaults(model);
        let mut points_set = false;
        let mut seen = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let err = |msg: String| ConfigError::Line { line, msg };
            let (key, value) = content
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| err(format!("expected `key = value`, got `{content}`")))?;
            if !KEYS.contains(&key) {
                return Err(err(format!("unknown key `{key}`")));
            }
            if seen.contains(&key) {
                return Err(err(format!("duplicate key `{key}`")));
            }
            seen.push(key);
            let num = |v: &str| v.parse::<f64>().map_err(|_| err(format!("`{key}` expects a number, got `{v}`")));
            match key {
                "model" => {
                    let m: Model = value.parse().map_err(err)?;
                    if m != model {
                        return Err(err(format!("config is for model `{m}` but `{model}` was requested")));
                    }
                }
                "x" => cfg.x = num(value)?,
                "z_i" => cfg.z_i = num(value)?,
                "z_f" => cfg.z_f = num(value)?,
                "L" => {
                    cfg.chain_length =
                        value.parse().map_err(|_| err(format!("`L` expects a positive integer, got `{value}`")))?
                }
                "h_i" => cfg.h_i = num(value)?,
                "h_f" => cfg.h_f = num(value)?,
                "g" => cfg.g = num(value)?,
                "temperatures" => {
                    cfg.temperatures = split_list(value).map(num).collect::<Result<_, _>>()?;
                }
                "tf_min" => cfg.grid.min = num(value)?,
                "tf_max" => cfg.grid.max = num(value)?,
                "tf_points" => {
                    cfg.grid.points =
                        value.parse().map_err(|_| err(format!("`tf_points` expects an integer, got `{value}`")))?;
                    points_set = true;
                }
                "tf_log" => {
                    cfg.grid.log = value.parse().map_err(|_| err(format!("`tf_log` expects true or false, got `{value}`")))?
                }
                "scenarios" => {
                    cfg.scenarios = split_list(value).map(|s| s.parse().map_err(err)).collect::<Result<_, _>>()?;
                }
                "rel_tol" => cfg.tolerances.rel = num(value)?,
                "abs_tol" => cfg.tolerances.abs = num(value)?,
                "out" => cfg.out = Some(PathBuf::from(value)),
                "dtau_points" => {
                    cfg.dtau_points =
                        value.parse().map_err(|_| err(format!("`dtau_points` expects an integer, got `{value}`")))?
                }
                "dtau_span" => cfg.dtau_span = Some(num(value)?),
                _ => unreachable!("key list and match arms agree"),
            }
        }
        if !points_set {
            cfg.grid.points = Grid::default_points(cfg.grid.min, cfg.grid.max);
        }
        cfg.scenarios.sort();
        cfg.scenarios.dedup();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: &str| Err(ConfigError::Invalid(m.to_string()));
        let g = &self.grid;
        if !(g.min > 0.0 && g.min < g.max && g.max.is_finite()) {
            return bad("t_f grid needs 0 < tf_min < tf_max");
        }
        if g.points < 2 {
            return bad("t_f grid needs at least 2 points");
        }
        if self.scenarios.is_empty() {
            return bad("scenario list is empty");
        }
        if self.model == Model::Tfi && self.scenarios.iter().any(|s| matches!(s, ScenarioSel::Rule(3 | 4))) {
            return bad("the tfi model supports scenarios 1, 2 and opt only");
        }
        if self.model == Model::Open && self.temperatures.is_empty() {
            return bad("temperature list is empty");
        }
        if !(self.tolerances.rel > 0.0 && self.tolerances.abs > 0.0) {
            return bad("tolerances must be positive");
        }
        if self.dtau_points < 3 || self.dtau_points.is_multiple_of(2) {
            return bad("dtau_points must be odd and at least 3");
        }
        if self.dtau_span.is_some_and(|s| !(s > 0.0 && s.is_finite())) {
            return bad("dtau_span must be positive");
        }
        // physical parameters are checked by the model constructors
        let check = match self.model {
            Model::Lz => aia_core::lz::LzParams::new(self.x, self.z_i, self.z_f, g.min).map(|_| ()),
            Model::Tfi => aia_core::tfi::TfiParams::new(self.chain_length, self.h_i, self.h_f, g.min).map(|_| ()),
            Model::Open => self.temperatures.iter().try_for_each(|&t| {
                aia_core::lindblad::OpenParams::new(self.x, self.z_i, self.z_f, g.min, t, self.g).map(|_| ())
            }),
        };
        check.map_err(|e| ConfigError::Invalid(e.to_string()))
    }
}

fn split_list(v: &str) -> impl Iterator<Item = &str> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty())
}
