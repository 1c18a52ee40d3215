use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ptwell::model::{Model, ModelDescriptor};

use crate::Failure;

#[derive(Debug, Parser)]
#[command(name = "ptwell", version, about = "Discrete PT-symmetric square wells")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalues at one coupling.
    Spectrum(SpectrumArgs),
    /// Eigenvalue tracks over a coupling grid.
    Sweep(SweepArgs),
    /// Critical couplings for one or more lattice sizes.
    Critical(CriticalArgs),
    /// Quasi-Hermiticity metric below the transition.
    Metric(MetricArgs),
    /// Golden-number checks.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct Output {
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl Output {
    pub fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }
}

/// Potential shape: `q` interior breakpoints at the rationals `ℓ_1 … ℓ_q`.
#[derive(Debug, Clone, Args)]
pub struct ShapeArgs {
    #[arg(long, default_value_t = 0)]
    pub q: usize,
    /// Comma-separated rationals such as `3/8`.
    #[arg(long, value_delimiter = ',')]
    pub ell: Vec<String>,
}

impl ShapeArgs {
    fn descriptor(&self, n: usize, z: Vec<f64>) -> ModelDescriptor {
        ModelDescriptor { n, q: self.q, ell: self.ell.clone(), z }
    }

    /// Model with unit outermost strength, coupled through `ξ`.
    pub fn shape_for(&self, n: usize) -> Result<Model, Failure> {
        Ok(self.descriptor(n, vec![1.0]).to_model()?.0)
    }
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Number of lattice intervals.
    #[arg(long = "N")]
    pub n: usize,
    #[command(flatten)]
    pub shape: ShapeArgs,
}

#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct Coupling {
    /// Physical strengths: one value for the outermost region, or `q + 1`.
    #[arg(long = "Z", value_delimiter = ',', allow_negative_numbers = true)]
    pub z: Option<Vec<f64>>,
    /// Scaled coupling `ξ = Z·h²`.
    #[arg(long, allow_negative_numbers = true)]
    pub xi: Option<f64>,
}

impl ModelArgs {
    pub fn shape(&self) -> Result<Model, Failure> {
        self.shape.shape_for(self.n)
    }

    /// The model and its scaled coupling.
    pub fn coupled(&self, c: &Coupling) -> Result<(Model, f64), Failure> {
        match (&c.z, c.xi) {
            (Some(z), _) => {
                let (model, z_max) = self.shape.descriptor(self.n, z.clone()).to_model()?;
                Ok((model.clone(), model.coupling_to_scaled(z_max)))
            }
            (None, Some(xi)) => {
                if !xi.is_finite() {
                    return Err(Failure::Usage(format!("--xi must be finite, got {xi}")));
                }
                Ok((self.shape()?, xi))
            }
            (None, None) => Err(Failure::Usage("one of --Z or --xi is required".into())),
        }
    }
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub coupling: Coupling,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub xi_from: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub xi_to: f64,
    #[arg(long, default_value_t = 100)]
    pub steps: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct CriticalArgs {
    #[arg(long = "N", conflicts_with = "n_list")]
    pub n: Option<usize>,
    /// Comma-separated lattice sizes.
    #[arg(long = "N-list", value_delimiter = ',')]
    pub n_list: Vec<usize>,
    #[command(flatten)]
    pub model: ShapeArgs,
    /// Bracket width in `ξ`.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[command(flatten)]
    pub output: Output,
}

impl CriticalArgs {
    pub fn n_list(&self) -> Result<Vec<usize>, Failure> {
        match self.n {
            Some(n) => Ok(vec![n]),
            None if !self.n_list.is_empty() => Ok(self.n_list.clone()),
            None => Err(Failure::Usage("one of --N or --N-list is required".into())),
        }
    }
}

#[derive(Debug, Args)]
pub struct MetricArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub coupling: Coupling,
    /// Comma-separated positive weights, one per eigenvalue.
    #[arg(long, value_delimiter = ',')]
    pub theta: Option<Vec<f64>>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Machine-readable report.
    #[arg(long)]
    pub json: bool,
    /// Swap the 3/8 well for the 5/8 well in its check, which must then fail.
    #[arg(long)]
    pub negative_control: bool,
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
}
