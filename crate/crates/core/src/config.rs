//! Plain-text `key = value` run configuration.
//!
//! ```text
//! # model
//! t1 = 0.5
//! t2 = 1
//! n_cells = 50
//! left_kind = loss      # loss | gain | none
//! left_gamma = 0.2
//! right_kind = none
//!
//! # run
//! t_min = 0.1
//! t_max = 1000
//! t_points = 61
//! n_list = 4..16        # ranges `a..b` (inclusive), `a..b:step`, or comma lists
//! ```
//!
//! Every key can be overridden from the environment as `SSH_LINDBLAD_<KEY>`
//! (upper case), e.g. `SSH_LINDBLAD_LEFT_GAMMA=2`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{DissipatorKind, OpenChainModel, Side};
use crate::thirdq::BoundStateCriterion;

pub const ENV_PREFIX: &str = "SSH_LINDBLAD_";
/// Variables under [`ENV_PREFIX`] that belong to the command line or the build, not to the config.
pub const RESERVED_ENV: &[&str] = &["CONFIG", "OUT", "FORMAT", "THREADS", "LAPACK_LIB"];

pub const KEYS: &[&str] = &[
    "t1",
    "t2",
    "n_cells",
    "left_kind",
    "left_gamma",
    "right_kind",
    "right_gamma",
    "t_min",
    "t_max",
    "t_points",
    "times",
    "n_list",
    "dual",
    "profile",
    "max_terms",
    "ipr_threshold",
    "boundary_sites",
    "min_boundary_weight",
    "tol",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub model: OpenChainModel,
    pub t_min: f64,
    pub t_max: f64,
    pub t_points: usize,
    /// Explicit time list; replaces the log grid when present.
    pub times: Option<Vec<f64>>,
    pub n_list: Vec<usize>,
    /// Also run the model with every γ replaced by 1/γ.
    pub dual: bool,
    /// Emit per-cell density columns.
    pub profile: bool,
    pub max_terms: Option<usize>,
    pub criterion: BoundStateCriterion,
    /// Overrides the per-check tolerances of oracle validation.
    pub tol: Option<f64>,
}

impl RunConfig {
    pub fn new(model: OpenChainModel) -> Self {
        RunConfig {
            model,
            t_min: 0.1,
            t_max: 1000.0,
            t_points: 61,
            times: None,
            n_list: (4..=16).collect(),
            dual: false,
            profile: false,
            max_terms: None,
            criterion: BoundStateCriterion::default(),
            tol: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::parse_with_env(text, std::iter::empty())
    }

    /// Parses `text`, then applies `SSH_LINDBLAD_*` pairs from `env` on top.
    pub fn parse_with_env<I>(text: &str, env: I) -> Result<Self>
    where
        I: IntoIterator<Item = (String, String)>,
    {
        let mut entries: BTreeMap<String, (usize, String)> = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| config_err(line, format!("expected `key = value`, got `{content}`")))?;
            let key = key.trim().to_ascii_lowercase();
            if !KEYS.contains(&key.as_str()) {
                return Err(config_err(line, format!("unknown key `{key}`")));
            }
            if let Some((first, _)) = entries.get(&key) {
                return Err(config_err(line, format!("duplicate key `{key}` (first set on line {first})")));
            }
            entries.insert(key, (line, value.trim().to_string()));
        }
        for (name, value) in env {
            let Some(key) = name.strip_prefix(ENV_PREFIX) else { continue };
            if RESERVED_ENV.contains(&key) {
                continue;
            }
            let key = key.to_ascii_lowercase();
            if !KEYS.contains(&key.as_str()) {
                return Err(config_err(0, format!("unknown key `{key}` in environment variable {name}")));
            }
            entries.insert(key, (0, value.trim().to_string()));
        }
        Self::from_entries(&entries)
    }

    pub fn from_env_and_file(text: &str) -> Result<Self> {
        Self::parse_with_env(text, std::env::vars())
    }

    fn from_entries(entries: &BTreeMap<String, (usize, String)>) -> Result<Self> {
        let get = |key: &str| entries.get(key).map(|(l, v)| (*l, v.as_str()));
        let required = |key: &str| get(key).ok_or_else(|| config_err(0, format!("missing required key `{key}`")));

        let (l, v) = required("t1")?;
        let t1 = parse_f64(l, "t1", v)?;
        let t2 = match get("t2") {
            Some((l, v)) => parse_f64(l, "t2", v)?,
            None => 1.0,
        };
        let (l, v) = required("n_cells")?;
        let n_cells = parse_usize(l, "n_cells", v)?;
        let mut model = OpenChainModel::new(t1, t2, n_cells);
        for (side, name) in [(Side::Left, "left"), (Side::Right, "right")] {
            let kind_key = format!("{name}_kind");
            let gamma_key = format!("{name}_gamma");
            let kind = match get(&kind_key) {
                Some((l, v)) => parse_kind(l, &kind_key, v)?,
                None => None,
            };
            let gamma = match get(&gamma_key) {
                Some((l, v)) => Some((l, parse_f64(l, &gamma_key, v)?)),
                None => None,
            };
            match (kind, gamma) {
                (Some(kind), Some((_, g))) => model = model.with_dissipator(side, kind, g),
                (Some(_), None) => {
                    let line = get(&kind_key).map_or(0, |e| e.0);
                    return Err(config_err(line, format!("`{kind_key}` is set but `{gamma_key}` is missing")));
                }
                (None, Some((l, g))) if g != 0.0 => {
                    return Err(config_err(l, format!("`{gamma_key}` is nonzero but `{kind_key}` is none")));
                }
                _ => {}
            }
        }
        let diag = crate::model::validate_model(&model);
        if !diag.is_ok() {
            return Err(config_err(0, diag.messages.join("; ")));
        }

        let mut cfg = RunConfig::new(model);
        if let Some((l, v)) = get("t_min") {
            cfg.t_min = parse_f64(l, "t_min", v)?;
        }
        if let Some((l, v)) = get("t_max") {
            cfg.t_max = parse_f64(l, "t_max", v)?;
        }
        if let Some((l, v)) = get("t_points") {
            cfg.t_points = parse_usize(l, "t_points", v)?;
        }
        if let Some((l, v)) = get("times") {
            let times = v.split(',').map(|s| parse_f64(l, "times", s.trim())).collect::<Result<Vec<_>>>()?;
            if times.is_empty() || times.windows(2).any(|w| w[1] < w[0]) || times.iter().any(|t| *t < 0.0) {
                return Err(config_err(l, "`times` must be a non-decreasing list of non-negative values".into()));
            }
            cfg.times = Some(times);
        }
        if !(cfg.t_min > 0.0 && cfg.t_max > cfg.t_min) || cfg.t_points < 2 {
            let line = get("t_min").or(get("t_max")).or(get("t_points")).map_or(0, |e| e.0);
            return Err(config_err(line, "log grid needs 0 < t_min < t_max and t_points >= 2".into()));
        }
        if let Some((l, v)) = get("n_list") {
            cfg.n_list = parse_n_list(l, v)?;
        }
        if let Some((l, v)) = get("dual") {
            cfg.dual = parse_bool(l, "dual", v)?;
        }
        if let Some((l, v)) = get("profile") {
            cfg.profile = parse_bool(l, "profile", v)?;
        }
        if let Some((l, v)) = get("max_terms") {
            cfg.max_terms = Some(parse_usize(l, "max_terms", v)?);
        }
        if let Some((l, v)) = get("ipr_threshold") {
            cfg.criterion.ipr_threshold = Some(parse_f64(l, "ipr_threshold", v)?);
        }
        if let Some((l, v)) = get("boundary_sites") {
            cfg.criterion.boundary_sites = parse_usize(l, "boundary_sites", v)?;
        }
        if let Some((l, v)) = get("min_boundary_weight") {
            cfg.criterion.min_boundary_weight = parse_f64(l, "min_boundary_weight", v)?;
        }
        if let Some((l, v)) = get("tol") {
            let tol = parse_f64(l, "tol", v)?;
            cfg.tol = Some(tol);
            if tol.is_nan() || tol <= 0.0 {
                return Err(config_err(l, "`tol` must be positive".into()));
            }
        }
        Ok(cfg)
    }

    /// Times for trajectory output: the explicit list or the log grid.
    pub fn time_grid(&self) -> Vec<f64> {
        match &self.times {
            Some(t) => t.clone(),
            None => crate::dynamics::log_grid(self.t_min, self.t_max, self.t_points),
        }
    }

    /// Canonical text form; [`RunConfig::parse`] of the result gives back `self`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let m = &self.model;
        let _ = writeln!(s, "t1 = {:?}", m.t1);
        let _ = writeln!(s, "t2 = {:?}", m.t2);
        let _ = writeln!(s, "n_cells = {}", m.n_cells);
        for (side, name) in [(Side::Left, "left"), (Side::Right, "right")] {
            match m.dissipator(side) {
                Some(d) => {
                    let kind = match d.kind {
                        DissipatorKind::Loss => "loss",
                        DissipatorKind::Gain => "gain",
                    };
                    let _ = writeln!(s, "{name}_kind = {kind}");
                    let _ = writeln!(s, "{name}_gamma = {:?}", d.strength);
                }
                None => {
                    let _ = writeln!(s, "{name}_kind = none");
                }
            }
        }
        let _ = writeln!(s, "t_min = {:?}", self.t_min);
        let _ = writeln!(s, "t_max = {:?}", self.t_max);
        let _ = writeln!(s, "t_points = {}", self.t_points);
        if let Some(times) = &self.times {
            let list: Vec<String> = times.iter().map(|t| format!("{t:?}")).collect();
            let _ = writeln!(s, "times = {}", list.join(", "));
        }
        let list: Vec<String> = self.n_list.iter().map(|n| n.to_string()).collect();
        let _ = writeln!(s, "n_list = {}", list.join(", "));
        let _ = writeln!(s, "dual = {}", self.dual);
        let _ = writeln!(s, "profile = {}", self.profile);
        if let Some(k) = self.max_terms {
            let _ = writeln!(s, "max_terms = {k}");
        }
        if let Some(t) = self.criterion.ipr_threshold {
            let _ = writeln!(s, "ipr_threshold = {t:?}");
        }
        let _ = writeln!(s, "boundary_sites = {}", self.criterion.boundary_sites);
        let _ = writeln!(s, "min_boundary_weight = {:?}", self.criterion.min_boundary_weight);
        if let Some(t) = self.tol {
            let _ = writeln!(s, "tol = {t:?}");
        }
        s
    }
}

fn config_err(line: usize, message: String) -> Error {
    Error::Config { line, message }
}

fn parse_f64(line: usize, key: &str, v: &str) -> Result<f64> {
    match v.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(config_err(line, format!("`{key}` expects a finite number, got `{v}`"))),
    }
}

fn parse_usize(line: usize, key: &str, v: &str) -> Result<usize> {
    v.parse::<usize>()
        .map_err(|_| config_err(line, format!("`{key}` expects a non-negative integer, got `{v}`")))
}

fn parse_bool(line: usize, key: &str, v: &str) -> Result<bool> {
    match v.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(config_err(line, format!("`{key}` expects true or false, got `{v}`"))),
    }
}

fn parse_kind(line: usize, key: &str, v: &str) -> Result<Option<DissipatorKind>> {
    match v.to_ascii_lowercase().as_str() {
        "loss" => Ok(Some(DissipatorKind::Loss)),
        "gain" => Ok(Some(DissipatorKind::Gain)),
        "none" => Ok(None),
        _ => Err(config_err(line, format!("`{key}` expects loss, gain or none, got `{v}`"))),
    }
}

/// `4..16`, `20..160:10` or `4, 6, 8`.
pub fn parse_n_list(line: usize, v: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for part in v.split(',') {
        let part = part.trim();
        if let Some((a, rest)) = part.split_once("..") {
            let (b, step) = match rest.split_once(':') {
                Some((b, s)) => (b, parse_usize(line, "n_list", s.trim())?),
                None => (rest, 1),
            };
            let a = parse_usize(line, "n_list", a.trim())?;
            let b = parse_usize(line, "n_list", b.trim())?;
            if step == 0 || b < a {
                return Err(config_err(line, format!("bad range `{part}` in n_list")));
            }
            out.extend((a..=b).step_by(step));
        } else {
            out.push(parse_usize(line, "n_list", part)?);
        }
    }
    if out.is_empty() || out.contains(&0) || out.windows(2).any(|w| w[1] <= w[0]) {
        return Err(config_err(line, "n_list must be strictly increasing positive sizes".into()));
    }
    Ok(out)
}
