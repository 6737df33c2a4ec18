//! Plain-text configuration: one `key = value` per line, `#` starts a comment.
//!
//! Missing keys keep their defaults, unknown keys are rejected, and the result
//! is validated as a whole. Errors carry the offending line number (0 for
//! problems that only show up once the file is complete).

use std::path::Path;

use ngr_core::baselines::TvConfig;
use ngr_core::net::{AxisWeights, Normalization};
use ngr_core::solver::{DenoiseConfig, SolverConfig};

use crate::error::{CliError, Result};

/// A configuration type that can be read from and echoed as `key = value` text.
pub trait Settings: Sized + Default {
    fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String>;
    fn pairs(&self) -> Vec<(&'static str, String)>;
    fn check(&self) -> std::result::Result<(), String>;
}

fn num<T: std::str::FromStr>(value: &str) -> std::result::Result<T, String> {
    value.parse().map_err(|_| format!("cannot parse {value:?}"))
}

fn flag(value: &str) -> std::result::Result<bool, String> {
    match value {
        "true" | "1" => Ok(true),
        "false" | "0" => Ok(false),
        _ => Err(format!("expected true or false, got {value:?}")),
    }
}

/// Applies one key, returning `Ok(false)` if the key is not a lambda key.
fn set_lambda(l: &mut AxisWeights, key: &str, value: &str) -> std::result::Result<bool, String> {
    match key {
        "lambda_h" => l.h = num(value)?,
        "lambda_v" => l.v = num(value)?,
        "lambda_t" => l.t = num(value)?,
        _ => return Ok(false),
    }
    Ok(true)
}

fn lambda_pairs(l: &AxisWeights) -> Vec<(&'static str, String)> {
    vec![("lambda_h", l.h.to_string()), ("lambda_v", l.v.to_string()), ("lambda_t", l.t.to_string())]
}

impl Settings for SolverConfig {
    fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        if set_lambda(&mut self.lambda, key, value)? {
            return Ok(());
        }
        match key {
            "mu" => self.mu = num(value)?,
            "outer_iters" => self.outer_iters = num(value)?,
            "adam_steps_per_iter" => self.adam_steps_per_iter = num(value)?,
            "lr" => self.lr = num(value)?,
            "seed" => self.seed = num(value)?,
            "input_amplitude" => self.input_amplitude = num(value)?,
            "tol" => self.tol = num(value)?,
            "snapshot_every" => self.snapshot_every = num(value)?,
            "blocks" => self.net.blocks = num(value)?,
            "width" => self.net.width = num(value)?,
            "kernel" => self.net.kernel = num(value)?,
            "skip" => self.net.skip = flag(value)?,
            "leaky_slope" => self.net.leaky_slope = num(value)?,
            "head_gain" => self.net.head_gain = num(value)?,
            "normalization" => {
                self.net.normalization =
                    Normalization::parse(value).ok_or_else(|| format!("unknown normalization {value:?}"))?
            }
            _ => return Err(format!("unknown key {key:?}")),
        }
        Ok(())
    }

    fn pairs(&self) -> Vec<(&'static str, String)> {
        let mut p = lambda_pairs(&self.lambda);
        p.extend([
            ("mu", self.mu.to_string()),
            ("outer_iters", self.outer_iters.to_string()),
            ("adam_steps_per_iter", self.adam_steps_per_iter.to_string()),
            ("lr", self.lr.to_string()),
            ("seed", self.seed.to_string()),
            ("input_amplitude", self.input_amplitude.to_string()),
            ("tol", self.tol.to_string()),
            ("snapshot_every", self.snapshot_every.to_string()),
            ("blocks", self.net.blocks.to_string()),
            ("width", self.net.width.to_string()),
            ("kernel", self.net.kernel.to_string()),
            ("skip", self.net.skip.to_string()),
            ("leaky_slope", self.net.leaky_slope.to_string()),
            ("head_gain", self.net.head_gain.to_string()),
            ("normalization", self.net.normalization.name().to_string()),
        ]);
        p
    }

    fn check(&self) -> std::result::Result<(), String> {
        self.validate().map_err(|e| e.to_string())
    }
}

impl Settings for DenoiseConfig {
    fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        match key {
            "beta" => self.beta = num(value)?,
            "tau" => self.tau = num(value)?,
            _ => self.solver.set(key, value)?,
        }
        Ok(())
    }

    fn pairs(&self) -> Vec<(&'static str, String)> {
        let mut p = self.solver.pairs();
        p.push(("beta", self.beta.to_string()));
        p.push(("tau", self.tau.to_string()));
        p
    }

    fn check(&self) -> std::result::Result<(), String> {
        self.validate().map_err(|e| e.to_string())
    }
}

impl Settings for TvConfig {
    fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        if set_lambda(&mut self.lambda, key, value)? {
            return Ok(());
        }
        match key {
            "mu" => self.mu = num(value)?,
            "iters" => self.iters = num(value)?,
            _ => return Err(format!("unknown key {key:?}")),
        }
        Ok(())
    }

    fn pairs(&self) -> Vec<(&'static str, String)> {
        let mut p = lambda_pairs(&self.lambda);
        p.push(("mu", self.mu.to_string()));
        p.push(("iters", self.iters.to_string()));
        p
    }

    fn check(&self) -> std::result::Result<(), String> {
        self.validate().map_err(|e| e.to_string())
    }
}

/// Splits `key = value`, ignoring comments and blank lines.
fn split_line(line: &str) -> Option<std::result::Result<(&str, &str), String>> {
    let line = line.split('#').next().unwrap_or("").trim();
    if line.is_empty() {
        return None;
    }
    Some(match line.split_once('=') {
        Some((k, v)) if !k.trim().is_empty() && !v.trim().is_empty() => Ok((k.trim(), v.trim())),
        _ => Err(format!("expected `key = value`, got {line:?}")),
    })
}

/// Parses `text` on top of `base`. `origin` names the source in error messages.
pub fn parse_onto<T: Settings>(mut base: T, text: &str, origin: &str) -> Result<T> {
    let err = |line: usize, msg: String| CliError::Config { path: origin.to_string(), line, msg };
    let mut seen = std::collections::HashSet::new();
    let mut last_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let Some(kv) = split_line(raw) else { continue };
        let (k, v) = kv.map_err(|m| err(i + 1, m))?;
        if !seen.insert(k.to_string()) {
            return Err(err(i + 1, format!("duplicate key {k:?}")));
        }
        base.set(k, v).map_err(|m| err(i + 1, m))?;
        // Report invariant violations against the line that introduced them.
        base.check().map_err(|m| err(i + 1, m))?;
        last_line = i + 1;
    }
    base.check().map_err(|m| err(last_line, m))?;
    Ok(base)
}

pub fn parse<T: Settings>(text: &str, origin: &str) -> Result<T> {
    parse_onto(T::default(), text, origin)
}

pub fn read_config<T: Settings>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse(&text, &path.display().to_string())
}

/// Applies `key=value` overrides given on the command line.
pub fn apply_overrides<T: Settings>(mut cfg: T, overrides: &[String]) -> Result<T> {
    for o in overrides {
        let (k, v) = o
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| CliError::Usage(format!("--set expects key=value, got {o:?}")))?;
        cfg.set(k, v).map_err(|m| CliError::Usage(format!("--set {o}: {m}")))?;
    }
    cfg.check().map_err(|m| CliError::Usage(format!("--set: {m}")))?;
    Ok(cfg)
}

/// The configuration as it would be written to a file.
pub fn to_text<T: Settings>(cfg: &T) -> String {
    cfg.pairs().into_iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
}
