//! Run configuration: built-in defaults, an optional `key = value` file, then
//! command-line overrides.

use std::fmt;
use std::path::{Path, PathBuf};

use conealg::grid::{CylinderGrid, PolarGrid, DEFAULT_ANGLES, DEFAULT_RADIAL_STEPS, DEFAULT_T_STEPS};
use conealg::stable_rank::{DEFAULT_CURVE_SAMPLES, DEFAULT_RNG_SEED};
use conealg::winding::RESIDUE_LIMIT;
use serde::{Deserialize, Serialize};

/// Report format version written into every report.
pub const FORMAT_VERSION: &str = "1";

pub const MAX_RADIAL_STEPS: usize = 4096;
pub const MAX_ANGLES: usize = 65536;
pub const MAX_T_STEPS: usize = 4096;
pub const MAX_DISK_STEPS: usize = 4096;
pub const MAX_CURVE_SAMPLES: usize = 1 << 20;
pub const DEFAULT_DISK_STEPS: usize = 32;
pub const DEFAULT_BEZOUT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub radial_steps: usize,
    pub angles: usize,
    pub t_steps: usize,
    pub disk_steps: usize,
    pub curve_samples: usize,
    /// `None` selects `1e-8 · max(1, sup)`.
    pub membership_tol: Option<f64>,
    pub bezout_tol: f64,
    pub winding_residue: f64,
    pub rng_seed: u64,
    pub out_dir: PathBuf,
    pub format_version: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            radial_steps: DEFAULT_RADIAL_STEPS,
            angles: DEFAULT_ANGLES,
            t_steps: DEFAULT_T_STEPS,
            disk_steps: DEFAULT_DISK_STEPS,
            curve_samples: DEFAULT_CURVE_SAMPLES,
            membership_tol: None,
            bezout_tol: DEFAULT_BEZOUT_TOL,
            winding_residue: RESIDUE_LIMIT,
            rng_seed: DEFAULT_RNG_SEED,
            out_dir: PathBuf::from("."),
            format_version: FORMAT_VERSION.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

/// Values supplied on the command line; `None` keeps the file or default.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub radial_steps: Option<usize>,
    pub angles: Option<usize>,
    pub t_steps: Option<usize>,
    pub disk_steps: Option<usize>,
    pub curve_samples: Option<usize>,
    pub membership_tol: Option<f64>,
    pub bezout_tol: Option<f64>,
    pub winding_residue: Option<f64>,
    pub rng_seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str, line: usize) -> Result<T, ConfigError> {
    value
        .parse()
        .map_err(|_| ConfigError(format!("line {line}: invalid value '{value}' for '{key}'")))
}

impl RunConfig {
    /// Applies `key = value` lines. Blank lines and `#` comments are ignored.
    pub fn apply_file_contents(&mut self, text: &str) -> Result<(), ConfigError> {
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| ConfigError(format!("line {line}: expected 'key = value'")))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "radial_steps" => self.radial_steps = parse_value(key, value, line)?,
                "angles" => self.angles = parse_value(key, value, line)?,
                "t_steps" => self.t_steps = parse_value(key, value, line)?,
                "disk_steps" => self.disk_steps = parse_value(key, value, line)?,
                "curve_samples" => self.curve_samples = parse_value(key, value, line)?,
                "membership_tol" => {
                    self.membership_tol = if value == "auto" {
                        None
                    } else {
                        Some(parse_value(key, value, line)?)
                    }
                }
                "bezout_tol" => self.bezout_tol = parse_value(key, value, line)?,
                "winding_residue" => self.winding_residue = parse_value(key, value, line)?,
                "rng_seed" => self.rng_seed = parse_value(key, value, line)?,
                "out_dir" => self.out_dir = PathBuf::from(value),
                "format_version" => {
                    if value != FORMAT_VERSION {
                        return Err(ConfigError(format!(
                            "line {line}: unsupported format_version '{value}', expected '{FORMAT_VERSION}'"
                        )));
                    }
                }
                other => return Err(ConfigError(format!("line {line}: unknown key '{other}'"))),
            }
        }
        Ok(())
    }

    pub fn apply_overrides(&mut self, o: &Overrides) {
        macro_rules! take {
            ($($field:ident),*) => {$(
                if let Some(v) = o.$field.clone() {
                    self.$field = v;
                }
            )*};
        }
        take!(radial_steps, angles, t_steps, disk_steps, curve_samples, bezout_tol, winding_residue, rng_seed, out_dir);
        if o.membership_tol.is_some() {
            self.membership_tol = o.membership_tol;
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let in_range = |name: &str, v: usize, lo: usize, hi: usize| {
            if (lo..=hi).contains(&v) {
                Ok(())
            } else {
                Err(ConfigError(format!("{name} = {v} is outside [{lo}, {hi}]")))
            }
        };
        in_range("radial_steps", self.radial_steps, 1, MAX_RADIAL_STEPS)?;
        in_range("angles", self.angles, 8, MAX_ANGLES)?;
        if !self.angles.is_power_of_two() {
            return Err(ConfigError(format!("angles = {} is not a power of two", self.angles)));
        }
        in_range("t_steps", self.t_steps, 1, MAX_T_STEPS)?;
        in_range("disk_steps", self.disk_steps, 1, MAX_DISK_STEPS)?;
        in_range("curve_samples", self.curve_samples, 16, MAX_CURVE_SAMPLES)?;
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(ConfigError(format!("{name} = {v} must be positive and finite")))
            }
        };
        if let Some(tol) = self.membership_tol {
            positive("membership_tol", tol)?;
        }
        positive("bezout_tol", self.bezout_tol)?;
        positive("winding_residue", self.winding_residue)?;
        if self.winding_residue >= 0.5 {
            return Err(ConfigError(format!(
                "winding_residue = {} must be below 0.5",
                self.winding_residue
            )));
        }
        Ok(())
    }

    /// Defaults, then `file`, then `overrides`, then validation.
    pub fn load(file: Option<&Path>, overrides: &Overrides) -> Result<Self, ConfigError> {
        let mut config = Self::default();
        if let Some(path) = file {
            let text = std::fs::read_to_string(path)
                .map_err(|e| ConfigError(format!("cannot read config {}: {e}", path.display())))?;
            config.apply_file_contents(&text)?;
        }
        config.apply_overrides(overrides);
        config.validate()?;
        Ok(config)
    }

    pub fn polar_grid(&self) -> PolarGrid {
        PolarGrid::uniform(self.radial_steps, self.angles).expect("validated grid sizes")
    }

    pub fn cylinder_grid(&self) -> CylinderGrid {
        CylinderGrid::uniform(self.polar_grid(), self.t_steps).expect("validated grid sizes")
    }

    /// Resolves an artifact path against `out_dir`.
    pub fn artifact_path(&self, name: &Path) -> PathBuf {
        if name.is_absolute() {
            name.to_path_buf()
        } else {
            self.out_dir.join(name)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_flags() {
        let mut c = RunConfig::default();
        c.apply_file_contents("# grid\nradial_steps = 32\nangles=128 # trailing\n\nmembership_tol = 1e-9\n")
            .unwrap();
        assert_eq!((c.radial_steps, c.angles, c.membership_tol), (32, 128, Some(1e-9)));
        c.apply_overrides(&Overrides {
            radial_steps: Some(16),
            ..Overrides::default()
        });
        assert_eq!(c.radial_steps, 16);
        assert_eq!(c.angles, 128);
        c.validate().unwrap();
    }

    #[test]
    fn rejects_bad_input() {
        let mut c = RunConfig::default();
        assert!(c.apply_file_contents("bogus = 1").is_err());
        assert!(c.apply_file_contents("angles = many").is_err());
        assert!(c.apply_file_contents("no equals sign").is_err());
        assert!(c.apply_file_contents("format_version = 0").is_err());
        c.angles = 100;
        assert!(c.validate().is_err());
        c = RunConfig::default();
        c.radial_steps = 0;
        assert!(c.validate().is_err());
        c = RunConfig::default();
        c.winding_residue = 0.7;
        assert!(c.validate().is_err());
    }
}
