use std::path::PathBuf;

use clap::builder::TypedValueParser;
use clap::{Args, Parser, Subcommand, ValueEnum};
use ncw_core::counterexample::{GeneratorChoice, DEFAULT_MAX_LEVEL};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(
    name = "ncw",
    version,
    about = "Experiments with a free function that is locally bounded but unbounded on the row ball"
)]
pub struct Cli {
    /// Worker threads (output does not depend on it)
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Polynomial identities of matrix algebras
    #[command(subcommand)]
    Pi(PiCommand),
    /// Generator families
    #[command(subcommand)]
    Family(FamilyCommand),
    /// Evaluate f at a matrix tuple
    Eval(EvalArgs),
    /// Unboundedness and local boundedness demonstrations
    #[command(subcommand)]
    Demo(DemoCommand),
    /// Truncated Fock space witnesses
    #[command(subcommand)]
    Fock(FockCommand),
}

#[derive(Subcommand, Debug)]
pub enum PiCommand {
    /// Find homogeneous identities of M_n as a numerical kernel
    Find(PiFindArgs),
    /// Check that a polynomial vanishes on random n x n tuples
    Certify(PiCertifyArgs),
}

#[derive(Subcommand, Debug)]
pub enum FamilyCommand {
    /// Build and certify a generator family
    Build(FamilyBuildArgs),
}

#[derive(Subcommand, Debug)]
pub enum DemoCommand {
    /// Lower bounds on partial sums of f over the row ball.
    ///
    /// CSV columns: K,vacuum_bound,operator_bound (operator_bound is empty
    /// when the Fock space exceeds the size cap).
    Unbounded(UnboundedArgs),
    /// Certified bound for f on a basic set, audited on sampled members.
    ///
    /// CSV columns: n,k,bound,observed,pass (k = "f" is the check on ||f(X)||).
    Localbound(LocalboundArgs),
}

#[derive(Subcommand, Debug)]
pub enum FockCommand {
    /// Write the scaled creation tuple rS, with optional bounds for a polynomial
    Witness(WitnessArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Generator {
    Standard2var,
    HallOverride,
    Kernel,
}

impl From<Generator> for GeneratorChoice {
    fn from(g: Generator) -> Self {
        match g {
            Generator::Standard2var => GeneratorChoice::Standard2var,
            Generator::HallOverride => GeneratorChoice::HallOverride,
            Generator::Kernel => GeneratorChoice::Kernel,
        }
    }
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a positive number, got {s}")),
    }
}

fn open_unit(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v < 1.0 => Ok(v),
        _ => Err(format!("expected a number in (0, 1), got {s}")),
    }
}

/// Family selection shared by commands that build one on the fly.
#[derive(Args, Debug, Clone, Serialize)]
pub struct FamilyArgs {
    /// Number of levels M
    #[arg(long, default_value_t = DEFAULT_MAX_LEVEL, value_parser = clap::value_parser!(u8).range(2..=4).map(usize::from))]
    pub max_level: usize,
    #[arg(long, value_enum, default_value_t = Generator::Standard2var)]
    pub generator: Generator,
    /// Certification trials per generator
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct PiFindArgs {
    #[arg(long, value_parser = clap::value_parser!(u16).range(1..).map(usize::from))]
    pub n: usize,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u16).range(2..).map(usize::from))]
    pub d: usize,
    #[arg(long)]
    pub deg: usize,
    /// Random tuples in the evaluation system (default: just enough for the unknowns)
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, default_value_t = 1e-9, value_parser = positive)]
    pub tol: f64,
    #[arg(long, env = "NCW_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Directory for one JSON file per identity (default: stdout)
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct PiCertifyArgs {
    /// Polynomial or identity JSON file
    #[arg(long)]
    #[serde(skip)]
    pub poly: PathBuf,
    #[arg(long, value_parser = clap::value_parser!(u16).range(1..).map(usize::from))]
    pub n: usize,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value_t = 1e-9, value_parser = positive)]
    pub tol: f64,
    #[arg(long, env = "NCW_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct FamilyBuildArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long, env = "NCW_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct EvalArgs {
    /// Matrix tuple JSON file
    #[arg(long)]
    #[serde(skip)]
    pub tuple: PathBuf,
    /// Family JSON file (default: build one from the flags below)
    #[arg(long)]
    #[serde(skip)]
    pub family_file: Option<PathBuf>,
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long, env = "NCW_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct UnboundedArgs {
    #[arg(long, default_value_t = 0.99, value_parser = open_unit)]
    pub r: f64,
    /// Maximal word length kept
    #[arg(long = "L", default_value_t = 30)]
    pub l: usize,
    #[arg(long = "Kmax", default_value_t = 40, value_parser = clap::value_parser!(u64).range(1..))]
    pub k_max: u64,
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long, env = "NCW_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    #[serde(skip)]
    pub csv: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct LocalboundArgs {
    /// Size m of the point X around which the basic set is built
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..).map(usize::from))]
    pub size: usize,
    /// Row norm of X is 1 - margin
    #[arg(long, default_value_t = 0.1, value_parser = open_unit)]
    pub margin: f64,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    /// Proposals tried (default: 20 per sample)
    #[arg(long)]
    pub attempts: Option<usize>,
    /// Size of the sampled members (default: --size)
    #[arg(long, value_parser = clap::value_parser!(u16).range(1..).map(usize::from))]
    pub sample_size: Option<usize>,
    /// Largest proposal row norm (default: the certificate radius r)
    #[arg(long, value_parser = positive)]
    pub radius: Option<f64>,
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long, env = "NCW_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    #[serde(skip)]
    pub csv: Option<PathBuf>,
    /// Certificate and audit report
    #[arg(long)]
    #[serde(skip)]
    pub json: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct WitnessArgs {
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u16).range(2..).map(usize::from))]
    pub d: usize,
    #[arg(long = "L", default_value_t = 4)]
    pub l: usize,
    #[arg(long, default_value_t = 0.9, value_parser = open_unit)]
    pub r: f64,
    /// Polynomial JSON file to bound on the witness
    #[arg(long)]
    #[serde(skip)]
    pub poly: Option<PathBuf>,
    #[arg(long, env = "NCW_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}
