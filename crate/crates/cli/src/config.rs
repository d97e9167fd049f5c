//! Run configuration: an optional JSON file, overridden by flags.

use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::report::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Analyze,
    Melnikov,
    Dulac,
    ZeroLocus,
    Count,
    Bounds,
}

#[derive(Debug, Parser)]
#[command(
    name = "saddleloop",
    version,
    about = "Limit cycles near perturbed two-saddle loops"
)]
pub struct Args {
    /// System description (JSON).
    pub system: Option<PathBuf>,
    /// JSON run configuration; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub command: Option<Command>,
    #[arg(long, allow_negative_numbers = true)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub radius: Option<f64>,
    /// Number of points on the halving grid in s.
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Saddle (1 or 2) for `dulac` and `zero-locus`.
    #[arg(long)]
    pub saddle: Option<usize>,
    /// Covering point `rho` for `dulac`.
    #[arg(long)]
    pub rho: Option<f64>,
    /// Covering point argument for `dulac`.
    #[arg(long, allow_negative_numbers = true)]
    pub phi: Option<f64>,
    /// `u_min,u_max` for `zero-locus`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub u_range: Option<Vec<f64>>,
    /// `nu_P,nu_d1,nu_d2,nu_d12` as rationals, e.g. `1,3/2,1,1`.
    #[arg(long, value_delimiter = ',')]
    pub nu: Option<Vec<String>>,
    /// `p,q,p1,p2` for the bound comparison table.
    #[arg(long, value_delimiter = ',')]
    pub example: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub system_file: Option<PathBuf>,
    pub command: Command,
    pub eps: Option<f64>,
    #[serde(rename = "R")]
    pub radius: Option<f64>,
    pub grid: usize,
    pub output_dir: PathBuf,
    pub seed: u64,
    pub saddle: usize,
    pub rho: Option<f64>,
    pub phi: Option<f64>,
    pub u_range: Option<[f64; 2]>,
    pub nu: Option<[String; 4]>,
    pub example: Option<[String; 4]>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            system_file: None,
            command: Command::Analyze,
            eps: None,
            radius: None,
            grid: 16,
            output_dir: PathBuf::from("out"),
            seed: 0,
            saddle: 1,
            rho: None,
            phi: None,
            u_range: None,
            nu: None,
            example: None,
        }
    }
}

fn four(v: Vec<String>) -> [String; 4] {
    let mut it = v.into_iter();
    core::array::from_fn(|_| it.next().unwrap_or_default())
}

fn count(got: Option<usize>, n: usize, flag: &str) -> Result<(), CliError> {
    match got {
        Some(k) if k != n => Err(CliError::validation(
            "cli",
            "parse_args",
            format!("--{flag} takes {n} comma-separated values"),
        )),
        _ => Ok(()),
    }
}

impl RunConfig {
    pub fn from_args(args: Args) -> Result<Self, CliError> {
        let mut cfg = match &args.config {
            Some(p) => {
                let text =
                    std::fs::read_to_string(p).map_err(|e| CliError::io("read_config", p, e))?;
                serde_json::from_str(&text)
                    .map_err(|e| CliError::validation("cli", "read_config", e.to_string()))?
            }
            None => RunConfig::default(),
        };
        if args.system.is_some() {
            cfg.system_file = args.system;
        }
        if let Some(c) = args.command {
            cfg.command = c;
        }
        cfg.eps = args.eps.or(cfg.eps);
        cfg.radius = args.radius.or(cfg.radius);
        cfg.grid = args.grid.unwrap_or(cfg.grid);
        cfg.output_dir = args.out.unwrap_or(cfg.output_dir);
        cfg.seed = args.seed.unwrap_or(cfg.seed);
        cfg.saddle = args.saddle.unwrap_or(cfg.saddle);
        cfg.rho = args.rho.or(cfg.rho);
        cfg.phi = args.phi.or(cfg.phi);
        count(args.u_range.as_ref().map(Vec::len), 2, "u-range")?;
        count(args.nu.as_ref().map(Vec::len), 4, "nu")?;
        count(args.example.as_ref().map(Vec::len), 4, "example")?;
        if let Some(u) = args.u_range {
            cfg.u_range = Some([u[0], u[1]]);
        }
        if let Some(n) = args.nu {
            cfg.nu = Some(four(n));
        }
        if let Some(n) = args.example {
            cfg.example = Some(four(n));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: &str| {
            Err(CliError::validation(
                "cli",
                "validate_config",
                m.to_string(),
            ))
        };
        if self.command != Command::Bounds && self.system_file.is_none() {
            return bad("a system file is required");
        }
        if let Some(e) = self.eps {
            if !e.is_finite() || e == 0.0 {
                return bad("eps must be finite and nonzero");
            }
        }
        if matches!(self.command, Command::Count | Command::ZeroLocus) && self.eps.is_none() {
            return bad("this command needs --eps");
        }
        if self.command == Command::Count && self.radius.is_none() {
            return bad("count needs --radius");
        }
        if self.radius.is_some_and(|r| !(r > 0.0)) {
            return bad("radius must be positive");
        }
        if self.eps.is_some() != self.radius.is_some() && self.command == Command::Analyze {
            return bad("analyze counts only when both eps and radius are given");
        }
        if !(self.saddle == 1 || self.saddle == 2) {
            return bad("saddle must be 1 or 2");
        }
        if matches!(self.command, Command::Analyze | Command::Melnikov)
            && !(12..=40).contains(&self.grid)
        {
            return bad("grid must have between 12 and 40 points");
        }
        if self.command == Command::ZeroLocus && self.grid < 2 {
            return bad("grid must have at least 2 points");
        }
        if self.command == Command::Dulac && (self.rho.is_none() || self.eps.is_none()) {
            return bad("dulac needs --eps and --rho");
        }
        if self.command == Command::Bounds && self.nu.is_none() && self.example.is_none() {
            return bad("bounds needs --nu or --example");
        }
        Ok(())
    }
}
