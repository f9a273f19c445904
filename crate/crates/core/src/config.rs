//! Flat `key = value` configuration for [`ExperimentConfig`].
//!
//! ```text
//! # lines starting with '#' are comments
//! n = 30
//! agents = 3
//! beta_grid = 0:1:10        # start:step:end, or a comma list
//! mode = discrete
//! methods = Quicksort, BradleyTerry
//! ```
//!
//! Keys may appear in any order. A later occurrence of a key replaces an
//! earlier one, which is how command-line overrides are layered on top of a
//! file. Unknown keys are rejected.

use std::collections::BTreeMap;
use std::path::Path;

use serde_json::{json, Value};

use crate::aggregation::Method;
use crate::btcore::Scheme;
use crate::error::{Error, Result};
use crate::portfolio::{Levels, ProbabilityMode};
use crate::simulator::{ExperimentConfig, ValueRule};

/// Every accepted key, in rendering order.
pub const KEYS: &[&str] = &[
    "n",
    "agents",
    "n_star",
    "beta_grid",
    "trials",
    "seed",
    "mode",
    "levels",
    "methods",
    "values",
    "t_min",
    "t_max",
    "e_mid",
    "zero_noise",
    "threads",
    "scheme",
    "tolerance",
    "max_iterations",
];

/// Name that stands for the built-in defaults instead of a file path.
pub const DEFAULTS: &str = "defaults";

/// Parses `key = value` lines. Errors carry the line number.
pub fn parse(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(Error::config(
                format!("line {}", no + 1),
                format!("expected `key = value`, got `{line}`"),
            ));
        };
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// Splits a command-line `key=value` override.
pub fn parse_override(s: &str) -> Result<(String, String)> {
    match s.split_once('=') {
        Some((k, v)) if !k.trim().is_empty() => Ok((k.trim().to_string(), v.trim().to_string())),
        _ => Err(Error::config(s, "override must look like key=value")),
    }
}

/// Builds a validated config from defaults plus `entries`, later entries
/// winning.
pub fn resolve(entries: &[(String, String)]) -> Result<ExperimentConfig> {
    let mut map = BTreeMap::new();
    for (k, v) in entries {
        if !KEYS.contains(&k.as_str()) {
            return Err(Error::config(k.as_str(), "unknown key"));
        }
        map.insert(k.as_str(), v.as_str());
    }
    let mut cfg = ExperimentConfig::default();
    let mut levels = None;
    if let Some(v) = map.get("levels") {
        levels = Some(Levels::new(floats("levels", v)?).map_err(|e| Error::config("levels", e.to_string()))?);
    }
    for key in KEYS {
        let Some(&v) = map.get(key) else { continue };
        match *key {
            "n" => cfg.n = int(key, v)?,
            "agents" => cfg.agents = int(key, v)?,
            "n_star" => cfg.n_star = int(key, v)?,
            "beta_grid" => cfg.beta_grid = grid(v)?,
            "trials" => cfg.trials = int(key, v)?,
            "seed" => cfg.master_seed = int(key, v)?,
            "mode" => {
                cfg.mode = match v.to_ascii_lowercase().as_str() {
                    "continuous" => ProbabilityMode::Continuous,
                    "discrete" => ProbabilityMode::Discrete(levels.clone().unwrap_or_default()),
                    _ => return Err(Error::config(*key, format!("expected continuous or discrete, got `{v}`"))),
                }
            }
            "levels" => {}
            "methods" => {
                cfg.methods = if v.eq_ignore_ascii_case("all") {
                    Method::ALL.to_vec()
                } else {
                    list(v)
                        .map(|t| t.parse::<Method>().map_err(|e| Error::config(*key, e.to_string())))
                        .collect::<Result<_>>()?
                }
            }
            "values" => {
                cfg.values = if v.eq_ignore_ascii_case("index") {
                    ValueRule::Index
                } else {
                    ValueRule::Explicit(floats(key, v)?)
                }
            }
            "t_min" => cfg.t_min = float(key, v)?,
            "t_max" => cfg.t_max = float(key, v)?,
            "e_mid" => cfg.e_mid = float(key, v)?,
            "zero_noise" => cfg.zero_noise = boolean(key, v)?,
            "threads" => cfg.threads = int(key, v)?,
            "scheme" => {
                cfg.solver.scheme = v.parse::<Scheme>().map_err(|e| Error::config(*key, e.to_string()))?
            }
            "tolerance" => cfg.solver.tolerance = float(key, v)?,
            "max_iterations" => cfg.solver.max_iterations = int(key, v)?,
            _ => unreachable!("key list and match arms disagree"),
        }
    }
    if levels.is_some() && !matches!(cfg.mode, ProbabilityMode::Discrete(_)) {
        return Err(Error::config("levels", "only meaningful with mode = discrete"));
    }
    if !(cfg.solver.tolerance > 0.0) {
        return Err(Error::config("tolerance", "must be positive"));
    }
    if cfg.solver.max_iterations == 0 {
        return Err(Error::config("max_iterations", "must be at least 1"));
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Loads `source` (a path, or [`DEFAULTS`]) and applies `overrides` after it.
pub fn load(source: Option<&str>, overrides: &[(String, String)]) -> Result<ExperimentConfig> {
    let mut entries = match source {
        None | Some(DEFAULTS) => Vec::new(),
        Some(path) => parse(&std::fs::read_to_string(Path::new(path))?)?,
    };
    entries.extend_from_slice(overrides);
    resolve(&entries)
}

/// Writes `cfg` back out in the file format; `resolve(parse(render(c)))`
/// returns `c`.
pub fn render(cfg: &ExperimentConfig) -> String {
    let join = |xs: &[f64]| xs.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", ");
    let mut out = String::new();
    for key in KEYS {
        let value = match *key {
            "n" => cfg.n.to_string(),
            "agents" => cfg.agents.to_string(),
            "n_star" => cfg.n_star.to_string(),
            "beta_grid" => join(&cfg.beta_grid),
            "trials" => cfg.trials.to_string(),
            "seed" => cfg.master_seed.to_string(),
            "mode" => cfg.mode.to_string(),
            "levels" => match &cfg.mode {
                ProbabilityMode::Discrete(l) => join(l.as_slice()),
                ProbabilityMode::Continuous => continue,
            },
            "methods" => cfg.methods.iter().map(|m| m.token()).collect::<Vec<_>>().join(", "),
            "values" => match &cfg.values {
                ValueRule::Index => "index".to_string(),
                ValueRule::Explicit(v) => join(v),
            },
            "t_min" => format!("{:?}", cfg.t_min),
            "t_max" => format!("{:?}", cfg.t_max),
            "e_mid" => format!("{:?}", cfg.e_mid),
            "zero_noise" => cfg.zero_noise.to_string(),
            "threads" => cfg.threads.to_string(),
            "scheme" => cfg.solver.scheme.to_string(),
            "tolerance" => format!("{:?}", cfg.solver.tolerance),
            "max_iterations" => cfg.solver.max_iterations.to_string(),
            _ => unreachable!(),
        };
        out.push_str(&format!("{key} = {value}\n"));
    }
    out
}

/// Resolved config as JSON, for the sidecar written next to results.
pub fn to_json(cfg: &ExperimentConfig) -> Value {
    json!({
        "n": cfg.n,
        "agents": cfg.agents,
        "n_star": cfg.n_star,
        "beta_grid": cfg.beta_grid,
        "trials": cfg.trials,
        "seed": cfg.master_seed,
        "mode": cfg.mode.to_string(),
        "levels": match &cfg.mode {
            ProbabilityMode::Discrete(l) => json!(l.as_slice()),
            ProbabilityMode::Continuous => Value::Null,
        },
        "methods": cfg.methods.iter().map(|m| m.token()).collect::<Vec<_>>(),
        "values": cfg.true_values(),
        "t_min": cfg.t_min,
        "t_max": cfg.t_max,
        "e_mid": cfg.e_mid,
        "zero_noise": cfg.zero_noise,
        "threads": cfg.threads,
        "scheme": cfg.solver.scheme.to_string(),
        "tolerance": cfg.solver.tolerance,
        "max_iterations": cfg.solver.max_iterations,
        "common_random_numbers": true,
        "seed_mixing": "splitmix64(splitmix64(splitmix64(seed) ^ beta_index) ^ trial_index)",
    })
}

fn list(v: &str) -> impl Iterator<Item = &str> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty())
}

fn int<N: std::str::FromStr>(key: &str, v: &str) -> Result<N> {
    v.replace('_', "")
        .parse()
        .map_err(|_| Error::config(key, format!("expected a nonnegative integer, got `{v}`")))
}

fn float(key: &str, v: &str) -> Result<f64> {
    match v.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(Error::config(key, format!("expected a number, got `{v}`"))),
    }
}

fn floats(key: &str, v: &str) -> Result<Vec<f64>> {
    list(v).map(|x| float(key, x)).collect()
}

fn boolean(key: &str, v: &str) -> Result<bool> {
    match v.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::config(key, format!("expected true or false, got `{v}`"))),
    }
}

/// `a:step:b` (inclusive, up to rounding) or a comma list.
fn grid(v: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = v.split(':').map(str::trim).collect();
    match parts.as_slice() {
        [a, step, b] => {
            let (a, step, b) = (float("beta_grid", a)?, float("beta_grid", step)?, float("beta_grid", b)?);
            if !(step > 0.0) || b < a {
                return Err(Error::config("beta_grid", "range needs a positive step and start <= end"));
            }
            let count = ((b - a) / step + 1e-9).floor() as usize;
            if count > 100_000 {
                return Err(Error::config("beta_grid", "range has too many points"));
            }
            Ok((0..=count).map(|k| a + step * k as f64).collect())
        }
        [_] => floats("beta_grid", v),
        _ => Err(Error::config("beta_grid", format!("cannot read `{v}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kv(pairs: &[(&str, &str)]) -> Vec<(String, String)> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    fn key_of(e: Error) -> String {
        match e {
            Error::Config { key, .. } => key,
            other => panic!("expected a config error, got {other}"),
        }
    }

    #[test]
    fn empty_input_gives_defaults() {
        assert_eq!(resolve(&[]).unwrap(), ExperimentConfig::default());
        assert_eq!(load(Some(DEFAULTS), &[]).unwrap(), ExperimentConfig::default());
    }

    #[test]
    fn parses_comments_and_grids() {
        let text = "# header\nn = 10 # inline\n\nn_star=4\nbeta_grid = 0:2.5:10\nmode = discrete\n";
        let cfg = resolve(&parse(text).unwrap()).unwrap();
        assert_eq!(cfg.n, 10);
        assert_eq!(cfg.n_star, 4);
        assert_eq!(cfg.beta_grid, vec![0.0, 2.5, 5.0, 7.5, 10.0]);
        assert_eq!(cfg.mode, ProbabilityMode::discrete());
    }

    #[test]
    fn later_entries_win() {
        let cfg = resolve(&kv(&[("trials", "5"), ("trials", "7")])).unwrap();
        assert_eq!(cfg.trials, 7);
    }

    #[test]
    fn errors_name_the_key() {
        assert_eq!(key_of(resolve(&kv(&[("bogus", "1")])).unwrap_err()), "bogus");
        assert_eq!(key_of(resolve(&kv(&[("trials", "0")])).unwrap_err()), "trials");
        assert_eq!(key_of(resolve(&kv(&[("agents", "three")])).unwrap_err()), "agents");
        assert_eq!(key_of(resolve(&kv(&[("methods", "Quicksort, Coinflip")])).unwrap_err()), "methods");
        assert_eq!(key_of(resolve(&kv(&[("levels", "0.2, 0.8")])).unwrap_err()), "levels");
        assert_eq!(key_of(resolve(&kv(&[("tolerance", "0")])).unwrap_err()), "tolerance");
        assert_eq!(key_of(parse("just words").unwrap_err()), "line 1");
        assert_eq!(key_of(parse_override("trials").unwrap_err()), "trials");
    }

    #[test]
    fn render_round_trips() {
        let cfg = resolve(&kv(&[
            ("n", "5"),
            ("n_star", "2"),
            ("beta_grid", "0.1, 3"),
            ("mode", "discrete"),
            ("levels", "0.2, 0.5, 0.8"),
            ("methods", "Borda, TwoPhaseBT"),
            ("values", "5, 4, 3, 2, 1"),
            ("scheme", "zermelo"),
            ("zero_noise", "yes"),
        ]))
        .unwrap();
        let back = resolve(&parse(&render(&cfg)).unwrap()).unwrap();
        assert_eq!(back, cfg);
        let defaults = ExperimentConfig::default();
        assert_eq!(resolve(&parse(&render(&defaults)).unwrap()).unwrap(), defaults);
    }

    #[test]
    fn json_sidecar_lists_every_key() {
        let j = to_json(&ExperimentConfig::default());
        for key in KEYS {
            assert!(j.get(key).is_some(), "{key}");
        }
        assert_eq!(j["trials"], 10_000);
    }
}
