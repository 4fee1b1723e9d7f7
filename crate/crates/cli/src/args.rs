//! Command-line surface.

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use schottky_core::zeta::{Method, Sigma};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "schottky", version, about = "Selberg zeta and trace-identity laboratory for Schottky groups")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, PartialEq)]
pub struct GlobalArgs {
    /// Group specification file (JSON).
    #[arg(long, global = true)]
    pub group: Option<PathBuf>,
    /// Cache root; defaults to $SCHOTTKY_CACHE_DIR, then the system temp dir.
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    /// Keep every cache in memory only.
    #[arg(long, global = true)]
    pub no_cache: bool,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Append records to this file instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize, PartialEq)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Check the group invariants.
    GroupValidate,
    /// Enumerate conjugacy classes.
    Classes(ClassesArgs),
    /// Evaluate the Selberg zeta function.
    ZetaEval(ZetaEvalArgs),
    /// Locate resonances in a rectangle of the λ-plane.
    ZetaZeros(ZerosArgs),
    /// Critical exponent with the Poincaré cross-check.
    Delta(DeltaArgs),
    /// Evaluate L_Γ.
    LGamma(LGammaArgs),
    /// Geometric, kernel-difference and spectral sides for heat kernels.
    TraceCompare(TraceArgs),
    /// Regularised resolvent trace against the zeta log-derivative.
    ResolventT5(ResolventArgs),
    /// Run every verification on the group.
    VerifyAll(VerifyArgs),
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, PartialEq)]
pub struct ClassesArgs {
    #[arg(long, default_value_t = 8)]
    pub n_max: usize,
    /// Emit one record per class.
    #[arg(long)]
    pub list: bool,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, PartialEq)]
pub struct TableArgs {
    /// Word-length truncation of the class table.
    #[arg(long, default_value_t = 12)]
    pub n_max: usize,
    #[arg(long, value_parser = parse_sigma, default_value = "trivial")]
    pub sigma: Sigma,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, PartialEq)]
pub struct ZetaEvalArgs {
    #[command(flatten)]
    pub table: TableArgs,
    /// Spectral parameter(s) `a`, `a+bi` or `bi`; repeat or comma-separate.
    #[arg(long, required = true, value_delimiter = ',', allow_hyphen_values = true, value_parser = parse_complex)]
    pub lambda: Vec<Complex64>,
    #[arg(long, value_parser = parse_method, default_value = "product")]
    pub method: Method,
    /// Determinant trace order.
    #[arg(long, default_value_t = 12)]
    pub order: usize,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, PartialEq)]
pub struct ZerosArgs {
    #[command(flatten)]
    pub table: TableArgs,
    /// `re_min,re_max,im_min,im_max` in the λ-plane.
    #[arg(long, value_delimiter = ',', num_args = 4, allow_hyphen_values = true,
          default_values_t = [-0.52, 0.0, -1.2, 1.2])]
    pub rect: Vec<f64>,
    #[arg(long, default_value_t = 9)]
    pub nx: usize,
    #[arg(long, default_value_t = 15)]
    pub ny: usize,
    #[arg(long, default_value_t = 12)]
    pub order: usize,
    /// Also run residue checks at this many smallest-|μ| zeros.
    #[arg(long, default_value_t = 0)]
    pub residues: usize,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, PartialEq)]
pub struct DeltaArgs {
    #[arg(long, default_value_t = 12)]
    pub n_max: usize,
    /// Largest admissible gap between the two estimates.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, PartialEq)]
pub struct LGammaArgs {
    #[command(flatten)]
    pub table: TableArgs,
    #[arg(long, required = true, value_delimiter = ',', allow_hyphen_values = true, value_parser = parse_complex)]
    pub lambda: Vec<Complex64>,
    #[arg(long, value_parser = parse_method, default_value = "determinant")]
    pub method: Method,
    #[arg(long, default_value_t = 12)]
    pub order: usize,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, PartialEq)]
pub struct TraceArgs {
    #[arg(long, default_value_t = 12)]
    pub n_max: usize,
    /// Heat times.
    #[arg(long, value_delimiter = ',', default_values_t = [0.5, 1.0, 2.0])]
    pub t: Vec<f64>,
    /// Fundamental-domain truncation radius.
    #[arg(long, default_value_t = 12.0)]
    pub radius: f64,
    /// Largest admissible relative defect.
    #[arg(long, default_value_t = 1e-3)]
    pub tol: f64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, PartialEq)]
pub struct ResolventArgs {
    #[arg(long, default_value_t = 12)]
    pub n_max: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [0.75, 1.0])]
    pub lambda: Vec<f64>,
    #[arg(long, default_value_t = 12.0)]
    pub radius: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub tol: f64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, PartialEq)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 12)]
    pub n_max: usize,
    /// Skip the fundamental-domain integrals.
    #[arg(long)]
    pub quick: bool,
}

pub fn parse_sigma(s: &str) -> Result<Sigma, String> {
    s.parse()
}

pub fn parse_method(s: &str) -> Result<Method, String> {
    s.parse()
}

/// `a`, `bi`, `a+bi` or `a-bi`, with `i` or `j`.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("cannot parse '{s}' as a complex number (a, bi or a+bi)");
    let Some(body) = t.strip_suffix('i').or_else(|| t.strip_suffix('j')) else {
        return t.parse::<f64>().map(|x| Complex64::new(x, 0.0)).map_err(|_| bad());
    };
    // split at the last sign that is not an exponent sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let coef = |x: &str| -> Result<f64, String> {
        match x {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => x.parse().map_err(|_| bad()),
        }
    };
    match split {
        Some(k) => Ok(Complex64::new(body[..k].parse().map_err(|_| bad())?, coef(&body[k..])?)),
        None => Ok(Complex64::new(0.0, coef(body)?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        assert_eq!(parse_complex("0.5").unwrap(), Complex64::new(0.5, 0.0));
        assert_eq!(parse_complex("0.1i").unwrap(), Complex64::new(0.0, 0.1));
        assert_eq!(parse_complex("-0.3-2i").unwrap(), Complex64::new(-0.3, -2.0));
        assert_eq!(parse_complex("1e-3+1e-2i").unwrap(), Complex64::new(1e-3, 1e-2));
        assert_eq!(parse_complex("-i").unwrap(), Complex64::new(0.0, -1.0));
        assert!(parse_complex("abc").is_err());
    }

    #[test]
    fn cli_is_well_formed() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
