//! Command-line and JSON-file configuration.  Every subcommand's options can
//! be given in a JSON object with the same (snake_case) keys; flags given on
//! the command line override the file.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use helmbie::geom::{make_curve, Curve};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use crate::commands::{
    billiards::BilliardsArgs, coercivity::CoercivityArgs, gmres_bench::GmresBenchArgs, mie::MieArgs, poles::PolesArgs,
    sharpness::SharpnessArgs, sweep::SweepArgs,
};
use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "helmbie", version, about = "Boundary-integral experiments for the 2-D Helmholtz equation")]
pub struct Cli {
    /// JSON file with options for the subcommand; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write the table to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Log progress to stderr.
    #[arg(long, short, global = true)]
    pub verbose: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Operator norms, conditioning, residuals and GMRES counts per wavenumber.
    Sweep(SweepArgs),
    /// DtN / NtD sharpness ratios on the circle from mode symbols.
    Sharpness(SharpnessArgs),
    /// Complex-k poles of the interior impedance problem on the unit disk.
    Poles(PolesArgs),
    /// Mie series for the sound-soft circle, optionally against a CFIE solve.
    Mie(MieArgs),
    /// Billiard escape statistics for an obstacle scene.
    Billiards(BilliardsArgs),
    /// GMRES iteration counts for η = ±a·k + i·b.
    GmresBench(GmresBenchArgs),
    /// Coercivity constants of A' for η = ±a·k + i·b.
    Coercivity(CoercivityArgs),
}

/// Overlays the flags (non-null values) on the JSON file contents.
pub fn merged<T: Serialize + DeserializeOwned + Clone>(flags: &T, file: Option<&Path>) -> Result<T, CliError> {
    let Some(path) = file else { return Ok(flags.clone()) };
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let mut base: Value = serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let Value::Object(map) = &mut base else {
        return Err(CliError::Config(format!("{}: expected a JSON object", path.display())));
    };
    let Value::Object(over) = serde_json::to_value(flags).map_err(|e| CliError::Config(e.to_string()))? else {
        unreachable!("argument structs serialise to objects")
    };
    for (k, v) in over {
        if !v.is_null() {
            map.insert(k, v);
        }
    }
    serde_json::from_value(base).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Grid-size rule for the matrix or mode path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridRule {
    /// N = max(256, ⌈10k⌉) rounded up to even.
    Auto,
    /// Fourier-mode symbols on a centred circle.
    Modes,
    Fixed(usize),
}

impl GridRule {
    pub fn parse(s: Option<&str>) -> Result<Self, CliError> {
        match s.unwrap_or("auto") {
            "auto" => Ok(GridRule::Auto),
            "modes" => Ok(GridRule::Modes),
            other => other
                .parse::<usize>()
                .ok()
                .filter(|n| n % 2 == 0 && (16..=16384).contains(n))
                .map(GridRule::Fixed)
                .ok_or_else(|| CliError::Config(format!("grid size '{other}' must be auto, modes or an even integer in [16, 16384]"))),
        }
    }

    pub fn size(self, k: f64) -> Option<usize> {
        match self {
            GridRule::Auto => {
                let n = ((10.0 * k).ceil() as usize).max(256);
                Some(n.saturating_add(n % 2))
            }
            GridRule::Modes => None,
            GridRule::Fixed(n) => Some(n),
        }
    }
}

pub fn build_curve(geometry: Option<&str>, params: Option<&[f64]>, scale: Option<f64>) -> Result<Curve, CliError> {
    let curve = make_curve(geometry.unwrap_or("circle"), params.unwrap_or(&[])).map_err(|e| CliError::Config(e.to_string()))?;
    match scale {
        Some(s) => curve.scaled(s).map_err(|e| CliError::Config(e.to_string())),
        None => Ok(curve),
    }
}

/// Wavenumbers must be positive and finite; order is kept as given.
pub fn check_wavenumbers(k: Option<&[f64]>) -> Result<Vec<f64>, CliError> {
    let k = k.unwrap_or(&[]).to_vec();
    if let Some(bad) = k.iter().find(|k| !(k.is_finite() && **k > 0.0)) {
        return Err(CliError::Config(format!("wavenumber {bad} must be positive and finite")));
    }
    Ok(k)
}

pub fn finite(name: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Config(format!("{name} must be finite, got {v}")))
    }
}

pub fn positive(name: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::Config(format!("{name} must be positive and finite, got {v}")))
    }
}
