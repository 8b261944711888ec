use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::CliError;

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_POINTS: usize = 100;
pub const SEED_ENV: &str = "EPME_SEED";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

/// Named tolerances with their defaults.
pub const TOLERANCES: [(&str, f64); 8] = [
    ("eigen", 1e-9),
    ("det", 1e-9),
    ("svd", 1e-8),
    ("pencil", 1e-8),
    ("norm", 1e-10),
    ("geometry", 1e-8),
    ("dissipation", 1e-6),
    ("integrator", 1e-10),
];

#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub seed: u64,
    pub num_points: usize,
    pub tolerances: BTreeMap<String, f64>,
    #[serde(skip)]
    pub output_dir: Option<PathBuf>,
    pub format: Option<Format>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: DEFAULT_SEED,
            num_points: DEFAULT_POINTS,
            tolerances: TOLERANCES.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            output_dir: None,
            format: None,
        }
    }
}

impl RunConfig {
    pub fn tol(&self, name: &str) -> f64 {
        self.tolerances[name]
    }

    pub fn set_tol(&mut self, name: &str, value: f64) -> Result<(), CliError> {
        if !self.tolerances.contains_key(name) {
            return Err(CliError::Config(format!("unknown tolerance `{name}`")));
        }
        if !(value > 0.0 && value.is_finite()) {
            return Err(CliError::Config(format!("tolerance `{name}` must be positive")));
        }
        self.tolerances.insert(name.to_string(), value);
        Ok(())
    }

    /// Applies `key = value` lines and returns the seed they set, if any.
    /// Blank lines and `#` comments are skipped.
    pub fn apply_file(&mut self, path: &Path) -> Result<Option<u64>, CliError> {
        let mut seed = None;
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |m: &str| CliError::Config(format!("{}:{}: {m}", path.display(), i + 1));
            let (key, value) = line.split_once('=').ok_or_else(|| bad("expected `key = value`"))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "seed" => {
                    self.seed = value.parse().map_err(|_| bad("seed must be an integer"))?;
                    seed = Some(self.seed);
                }
                "points" => self.num_points = value.parse().map_err(|_| bad("points must be an integer"))?,
                "out" => self.output_dir = Some(PathBuf::from(value)),
                "format" => {
                    self.format = Some(
                        <Format as clap::ValueEnum>::from_str(value, true).map_err(|_| bad("unknown format"))?,
                    )
                }
                k => match k.strip_prefix("tol.") {
                    Some(name) => {
                        let v = value.parse().map_err(|_| bad("tolerance must be a number"))?;
                        self.set_tol(name, v).map_err(|e| bad(&e.to_string()))?;
                    }
                    None => return Err(bad(&format!("unknown key `{k}`"))),
                },
            }
        }
        Ok(seed)
    }
}

/// Seed from the flag, then the config file, then the environment.
pub fn resolve_seed(flag: Option<u64>, file: Option<u64>, env: Option<&str>) -> Result<u64, CliError> {
    if let Some(s) = flag.or(file) {
        return Ok(s);
    }
    match env {
        Some(s) => s
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("{SEED_ENV} must be an integer, got `{s}`"))),
        None => Ok(DEFAULT_SEED),
    }
}

/// Exact rational from `12`, `-0.25`, `1.5e-3` or `3/7`.
pub fn parse_rational(s: &str) -> Result<BigRational, CliError> {
    let bad = || CliError::Config(format!("not a number: `{s}`"));
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let (n, d) = (parse_rational(n)?, parse_rational(d)?);
        return if d.is_zero() { Err(bad()) } else { Ok(n / d) };
    }
    let (mantissa, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if int.is_empty() && frac.is_empty() || !(int.chars().chain(frac.chars())).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
    let ten = BigRational::from_integer(BigInt::from(10));
    let mut r = BigRational::from_integer(all);
    let shift = exp - frac.len() as i32;
    let mut scale = BigRational::one();
    for _ in 0..shift.unsigned_abs() {
        scale *= &ten;
    }
    r = if shift >= 0 { r * scale } else { r / scale };
    Ok(if neg { -r } else { r })
}

pub fn parse_triple(s: &str) -> Result<[BigRational; 3], CliError> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(CliError::Config(format!("expected three comma-separated values, got `{s}`")));
    }
    Ok([parse_rational(parts[0])?, parse_rational(parts[1])?, parse_rational(parts[2])?])
}

pub fn parse_f64_list<const N: usize>(s: &str) -> Result<[f64; N], CliError> {
    let vals: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Config(format!("not a list of numbers: `{s}`")))?;
    vals.try_into()
        .map_err(|_| CliError::Config(format!("expected {N} comma-separated values, got `{s}`")))
}
