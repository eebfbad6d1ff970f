//! `ptbec`: spectra, wave functions, scalar products and encirclements of
//! the PT-symmetric double-delta condensate and its matrix model, written as
//! CSV or JSON.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ptbec::gpe::{GpeConfig, Mode};

use crate::output::Format;

#[derive(Parser, Debug)]
#[command(name = "ptbec", version, about = "Spectra and exceptional points of a PT-symmetric double-delta condensate")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// κ of the condensate branches along a γ sweep.
    SpectrumGpe(SpectrumGpeArgs),
    /// Closed-form levels E1..E4 of the matrix model along a γ sweep.
    SpectrumMatrix(SpectrumMatrixArgs),
    /// Follows the levels around a circle in a complex parameter.
    Encircle(EncircleArgs),
    /// Sampled wave functions with symmetry diagnostics.
    Wavefunctions(WavefunctionArgs),
    /// Scalar product of the E4 eigenvector with the g = 0 vector.
    ScalarProduct(ScalarProductArgs),
    /// Runs the acceptance criteria and prints one PASS/FAIL line each.
    Acceptance(AcceptanceArgs),
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Naive,
    PtContinued,
    Full,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Naive => Mode::Naive,
            ModeArg::PtContinued => Mode::PtContinued,
            ModeArg::Full => Mode::FullContinuation,
        }
    }
}

/// Physical and numerical parameters shared by the condensate commands.
#[derive(Args, Debug, Clone)]
pub struct GpeArgs {
    /// Nonlinearity g.
    #[arg(long, default_value_t = 1.0)]
    pub g: f64,
    /// Well separation a.
    #[arg(long, default_value_t = 2.2)]
    pub a: f64,
    /// ODE local error tolerance.
    #[arg(long, default_value_t = 1e-12)]
    pub ode_tol: f64,
    /// Newton residual tolerance.
    #[arg(long, default_value_t = 1e-10)]
    pub newton_tol: f64,
}

impl GpeArgs {
    pub fn config(&self, mode: Mode) -> GpeConfig {
        GpeConfig {
            g: self.g,
            a: self.a,
            ode_tol: self.ode_tol,
            newton_tol: self.newton_tol,
            mode,
            ..GpeConfig::default()
        }
    }
}

/// A closed interval `lo:hi`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
}

impl std::str::FromStr for Range {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let (lo, hi) = s.split_once(':').ok_or_else(|| format!("expected lo:hi, got `{s}`"))?;
        let lo: f64 = lo.trim().parse().map_err(|e| format!("bad lower bound: {e}"))?;
        let hi: f64 = hi.trim().parse().map_err(|e| format!("bad upper bound: {e}"))?;
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(format!("need finite lo ≤ hi, got {lo}:{hi}"));
        }
        Ok(Range { lo, hi })
    }
}

impl std::fmt::Display for Range {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.lo, self.hi)
    }
}

impl Range {
    /// `n` uniform points including both ends (just `lo` for `n = 1`).
    pub fn grid(&self, n: usize) -> Vec<f64> {
        match n {
            0 => Vec::new(),
            1 => vec![self.lo],
            _ => (0..n).map(|k| self.lo + (self.hi - self.lo) * k as f64 / (n - 1) as f64).collect(),
        }
    }
}

#[derive(Args, Debug)]
pub struct SpectrumGpeArgs {
    #[command(flatten)]
    pub gpe: GpeArgs,
    #[arg(long, value_enum, default_value_t = ModeArg::Naive)]
    pub mode: ModeArg,
    /// γ interval `lo:hi`.
    #[arg(long, default_value = "0:0.5")]
    pub gamma_range: Range,
    /// Real asymmetry A, switched on from the A = 0 states.
    #[arg(long, default_value_t = 0.0)]
    pub asym: f64,
    /// Grid points.
    #[arg(long, default_value_t = 200)]
    pub steps: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct SpectrumMatrixArgs {
    #[arg(long, default_value_t = 1.0)]
    pub g: f64,
    #[arg(long, default_value = "0:1")]
    pub gamma_range: Range,
    #[arg(long, default_value_t = 200)]
    pub steps: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ProviderArg {
    /// Matrix model, circle in γ.
    Matrix,
    /// Condensate, circle in γ (ground state and broken pair).
    GpeGamma,
    /// Condensate, circle in the asymmetry A at fixed γ.
    GpeAsym,
    /// Appendix matrix, circle in y at fixed ε.
    AppendixY,
    /// Appendix matrix, circle in ε at fixed y.
    AppendixEps,
}

#[derive(Args, Debug)]
pub struct EncircleArgs {
    #[arg(long, value_enum, default_value_t = ProviderArg::Matrix)]
    pub provider: ProviderArg,
    #[command(flatten)]
    pub gpe: GpeArgs,
    /// Fixed γ of the asymmetry circle; the detected γ_cr by default.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Fixed ε of the appendix y-circle.
    #[arg(long, default_value_t = 1e-3)]
    pub eps: f64,
    /// Fixed y of the appendix ε-circle.
    #[arg(long, default_value_t = 1.0)]
    pub y: f64,
    /// Circle center (real); provider-specific default.
    #[arg(long)]
    pub contour_center: Option<f64>,
    /// Circle radius; provider-specific default.
    #[arg(long)]
    pub contour_radius: Option<f64>,
    /// Base steps per turn; provider-specific default.
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub turns: u32,
    #[arg(long)]
    pub clockwise: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct WavefunctionArgs {
    #[command(flatten)]
    pub gpe: GpeArgs,
    #[arg(long, value_enum, default_value_t = ModeArg::Full)]
    pub mode: ModeArg,
    /// Comma-separated γ values.
    #[arg(long, value_delimiter = ',', default_value = "0,0.15,0.3")]
    pub gamma: Vec<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct ScalarProductArgs {
    /// Comma-separated g values.
    #[arg(long, value_delimiter = ',', default_value = "0.2,0.1,0.02")]
    pub g: Vec<f64>,
    #[arg(long, default_value = "0:1")]
    pub gamma_range: Range,
    #[arg(long, default_value_t = 200)]
    pub steps: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct AcceptanceArgs {
    /// Comma-separated criterion numbers; all when omitted.
    #[arg(long, value_delimiter = ',')]
    pub only: Option<Vec<u8>>,
    /// Also write the report as a table.
    #[command(flatten)]
    pub output: OutputArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::SpectrumGpe(a) => commands::spectrum_gpe(&a),
        Command::SpectrumMatrix(a) => commands::spectrum_matrix(&a),
        Command::Encircle(a) => commands::encircle(&a),
        Command::Wavefunctions(a) => commands::wavefunctions(&a),
        Command::ScalarProduct(a) => commands::scalar_product(&a),
        Command::Acceptance(a) => commands::acceptance(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
