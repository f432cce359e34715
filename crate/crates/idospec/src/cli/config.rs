//! Flat `key = value` run configuration shared by every subcommand.
//!
//! A config file holds one `key = value` pair per line; `#` starts a
//! comment anywhere on a line and blank lines are skipped. Unknown and
//! duplicate keys are rejected with their line numbers, so a typo cannot
//! silently fall back to a default.

use num_complex::Complex64;
use std::collections::HashSet;
use std::path::{Path, PathBuf};

use crate::chareq::SearchBox;
use crate::error::{Error, Result};
use crate::inverse::SearchStrategy;

/// Fully resolved run configuration: built-in defaults, overlaid by an
/// optional config file, overlaid by command-line flags.
#[derive(Debug, Clone)]
pub struct RunConfig {
    /// Built-in problem name: `zero-kernel`, `smooth-1` or `example2`.
    pub preset: String,
    /// Coefficient sample files (alternative to `preset`; give both files).
    pub r_file: Option<PathBuf>,
    pub v_file: Option<PathBuf>,
    /// Grid subintervals (even, at least 2).
    pub grid_n: usize,
    /// Eigenvalue search region; `None` picks a per-command default.
    pub search: Option<SearchBox>,
    /// Eigenvalue tolerance.
    pub tol: f64,
    /// Output directory for artifacts.
    pub out: PathBuf,
    /// Spectral points for `forward` traces, as `re im` pairs.
    pub lambdas: Vec<Complex64>,
    /// Derivative-chain order for `forward` traces.
    pub order: usize,
    /// Identity-report lattice resolution for `eigs`.
    pub identity_nx: usize,
    pub identity_ny: usize,
    /// Cosine basis size per coefficient function for `invert`.
    pub basis_k: usize,
    /// Number of leading spectral-data entries fitted by `invert`.
    pub fit_m: usize,
    pub w_lambda: f64,
    pub w_beta: f64,
    /// Tikhonov weight toward the initial guess.
    pub mu: f64,
    pub damping: f64,
    pub max_iter: usize,
    pub fd_step: f64,
    pub strategy: SearchStrategy,
    /// Target spectral-data CSV for `invert`.
    pub target_file: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            preset: "smooth-1".into(),
            r_file: None,
            v_file: None,
            grid_n: 2000,
            search: None,
            tol: 1e-10,
            out: PathBuf::from("."),
            lambdas: vec![Complex64::new(1.0, 0.0)],
            order: 0,
            identity_nx: 8,
            identity_ny: 4,
            basis_k: 6,
            fit_m: 12,
            w_lambda: 1.0,
            w_beta: 1.0,
            mu: 0.0,
            damping: 1e-3,
            max_iter: 100,
            fd_step: 1e-6,
            strategy: SearchStrategy::Tracked,
            target_file: None,
        }
    }
}

fn config_err(line: usize, message: impl std::fmt::Display) -> Error {
    Error::Config(format!("line {line}: {message}"))
}

fn parse_f64(value: &str, line: usize, key: &str) -> Result<f64> {
    let v: f64 = value
        .parse()
        .map_err(|_| config_err(line, format!("cannot parse {key} value {value:?} as a number")))?;
    if !v.is_finite() {
        return Err(config_err(line, format!("{key} must be finite, got {value:?}")));
    }
    Ok(v)
}

fn parse_usize(value: &str, line: usize, key: &str) -> Result<usize> {
    value
        .parse()
        .map_err(|_| config_err(line, format!("cannot parse {key} value {value:?} as a count")))
}

fn parse_box(value: &str, line: usize) -> Result<SearchBox> {
    let parts: Vec<f64> = value
        .split_whitespace()
        .map(|s| parse_f64(s, line, "box"))
        .collect::<Result<_>>()?;
    if parts.len() != 4 {
        return Err(config_err(
            line,
            format!("box needs 4 numbers (re_min re_max im_min im_max), got {}", parts.len()),
        ));
    }
    SearchBox::new(parts[0], parts[1], parts[2], parts[3])
        .map_err(|e| config_err(line, e))
}

fn parse_lambdas(value: &str, line: usize) -> Result<Vec<Complex64>> {
    let mut out = Vec::new();
    for piece in value.split(',') {
        let parts: Vec<f64> = piece
            .split_whitespace()
            .map(|s| parse_f64(s, line, "lambdas"))
            .collect::<Result<_>>()?;
        if parts.len() != 2 {
            return Err(config_err(
                line,
                format!("each lambda needs `re im`, got {piece:?}"),
            ));
        }
        out.push(Complex64::new(parts[0], parts[1]));
    }
    Ok(out)
}

fn parse_strategy(value: &str, line: usize) -> Result<SearchStrategy> {
    match value {
        "tracked" => Ok(SearchStrategy::Tracked),
        "certified" => Ok(SearchStrategy::Certified),
        other => Err(config_err(
            line,
            format!("strategy must be `tracked` or `certified`, got {other:?}"),
        )),
    }
}

impl RunConfig {
    /// Overlays `key = value` pairs from a file onto this configuration.
    pub fn apply_file(&mut self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::Config(format!("cannot read config {}: {e}", path.display()))
        })?;
        self.apply_text(&text)
    }

    /// Parses config text; see the module docs for the format.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        let mut seen: HashSet<String> = HashSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let stripped = raw.split('#').next().unwrap_or("").trim();
            if stripped.is_empty() {
                continue;
            }
            let (key, value) = stripped.split_once('=').ok_or_else(|| {
                config_err(line, format!("expected `key = value`, got {stripped:?}"))
            })?;
            let key = key.trim();
            let value = value.trim();
            if !seen.insert(key.to_string()) {
                return Err(config_err(line, format!("duplicate key `{key}`")));
            }
            self.apply_pair(key, value, line)?;
        }
        Ok(())
    }

    fn apply_pair(&mut self, key: &str, value: &str, line: usize) -> Result<()> {
        match key {
            "preset" => self.preset = value.to_string(),
            "r_file" => self.r_file = Some(PathBuf::from(value)),
            "v_file" => self.v_file = Some(PathBuf::from(value)),
            "grid_n" => self.grid_n = parse_usize(value, line, key)?,
            "box" => self.search = Some(parse_box(value, line)?),
            "tol" => self.tol = parse_f64(value, line, key)?,
            "out" => self.out = PathBuf::from(value),
            "lambdas" => self.lambdas = parse_lambdas(value, line)?,
            "order" => self.order = parse_usize(value, line, key)?,
            "identity_nx" => self.identity_nx = parse_usize(value, line, key)?,
            "identity_ny" => self.identity_ny = parse_usize(value, line, key)?,
            "k" => self.basis_k = parse_usize(value, line, key)?,
            "m" => self.fit_m = parse_usize(value, line, key)?,
            "w_lambda" => self.w_lambda = parse_f64(value, line, key)?,
            "w_beta" => self.w_beta = parse_f64(value, line, key)?,
            "mu" => self.mu = parse_f64(value, line, key)?,
            "damping" => self.damping = parse_f64(value, line, key)?,
            "max_iter" => self.max_iter = parse_usize(value, line, key)?,
            "fd_step" => self.fd_step = parse_f64(value, line, key)?,
            "strategy" => self.strategy = parse_strategy(value, line)?,
            "target_file" => self.target_file = Some(PathBuf::from(value)),
            other => {
                return Err(config_err(line, format!("unknown key `{other}`")));
            }
        }
        Ok(())
    }

    /// Shape checks that do not need any file or solver context.
    pub fn validate(&self) -> Result<()> {
        let bad = |message: String| Err(Error::Config(message));
        if self.grid_n < 2 || self.grid_n % 2 != 0 {
            return bad(format!("grid_n must be even and at least 2, got {}", self.grid_n));
        }
        if !(self.tol > 0.0) {
            return bad(format!("tol must be positive, got {}", self.tol));
        }
        if self.lambdas.is_empty() {
            return bad("lambdas must list at least one spectral point".into());
        }
        if self.identity_nx == 0 || self.identity_ny == 0 {
            return bad("identity lattice needs positive identity_nx and identity_ny".into());
        }
        if self.basis_k == 0 {
            return bad("k must be at least 1".into());
        }
        if self.fit_m == 0 {
            return bad("m must be at least 1".into());
        }
        if !(self.w_lambda >= 0.0 && self.w_beta >= 0.0) {
            return bad("weights w_lambda and w_beta must be nonnegative".into());
        }
        if self.w_lambda == 0.0 && self.w_beta == 0.0 {
            return bad("at least one of w_lambda, w_beta must be positive".into());
        }
        if !(self.mu >= 0.0) {
            return bad(format!("mu must be nonnegative, got {}", self.mu));
        }
        if !(self.damping > 0.0) {
            return bad(format!("damping must be positive, got {}", self.damping));
        }
        if self.max_iter == 0 {
            return bad("max_iter must be at least 1".into());
        }
        if !(self.fd_step > 0.0) {
            return bad(format!("fd_step must be positive, got {}", self.fd_step));
        }
        if self.r_file.is_some() != self.v_file.is_some() {
            return bad("coefficient files come in pairs: give both r_file and v_file".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let mut cfg = RunConfig::default();
        cfg.apply_text(
            "# full-line comment\n\n  grid_n = 400  # trailing comment\ntol = 1e-8\n",
        )
        .unwrap();
        assert_eq!(cfg.grid_n, 400);
        assert_eq!(cfg.tol, 1e-8);
        cfg.validate().unwrap();
    }

    #[test]
    fn unknown_keys_are_rejected_with_their_line() {
        let mut cfg = RunConfig::default();
        let err = cfg.apply_text("grid_n = 400\ngird_n = 200\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 2"), "{msg}");
        assert!(msg.contains("gird_n"), "{msg}");
    }

    #[test]
    fn duplicate_keys_are_rejected() {
        let mut cfg = RunConfig::default();
        let err = cfg.apply_text("tol = 1e-8\ntol = 1e-9\n").unwrap_err();
        assert!(err.to_string().contains("duplicate key `tol`"));
    }

    #[test]
    fn missing_equals_is_a_config_error() {
        let mut cfg = RunConfig::default();
        let err = cfg.apply_text("grid_n 400\n").unwrap_err();
        assert!(err.to_string().contains("line 1"));
    }

    #[test]
    fn box_and_lambdas_parse_their_shapes() {
        let mut cfg = RunConfig::default();
        cfg.apply_text("box = -5 5 -4 1\nlambdas = 1 0, 2 -0.5\n").unwrap();
        let b = cfg.search.unwrap();
        assert_eq!(
            (b.re_min(), b.re_max(), b.im_min(), b.im_max()),
            (-5.0, 5.0, -4.0, 1.0)
        );
        assert_eq!(cfg.lambdas.len(), 2);
        assert_eq!(cfg.lambdas[1], Complex64::new(2.0, -0.5));

        let mut cfg = RunConfig::default();
        assert!(cfg.apply_text("box = 1 2 3\n").is_err());
        assert!(cfg.apply_text("lambdas = 1\n").is_err());
        assert!(cfg.apply_text("box = 5 -5 0 1\n").is_err());
    }

    #[test]
    fn strategy_names_are_checked() {
        let mut cfg = RunConfig::default();
        cfg.apply_text("strategy = certified\n").unwrap();
        assert_eq!(cfg.strategy, SearchStrategy::Certified);
        assert!(cfg.apply_text("strategy = newton\n").is_err());
    }

    #[test]
    fn validation_rejects_degenerate_numbers() {
        let checks = [
            "grid_n = 3",
            "grid_n = 0",
            "tol = 0",
            "k = 0",
            "m = 0",
            "max_iter = 0",
            "damping = 0",
            "fd_step = -1e-6",
            "identity_nx = 0",
        ];
        for text in checks {
            let mut cfg = RunConfig::default();
            cfg.apply_text(&format!("{text}\n")).unwrap();
            assert!(cfg.validate().is_err(), "{text} passed validation");
        }
        let mut cfg = RunConfig::default();
        cfg.apply_text("r_file = r.csv\n").unwrap();
        assert!(cfg.validate().is_err(), "half a coefficient pair passed");
    }
}
