use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dirac_shell::CouplingPair;

use crate::error::{CliError, CliResult};
use crate::output::Format;

#[derive(Parser, Debug)]
#[command(
    name = "dirac-shell",
    version,
    about = "Bound states of Dirac operators with critical shell interactions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Eigenvalues z_k of the circle model, one per angular momentum channel.
    Spectrum(SpectrumArgs),
    /// Radial eigenfunctions of the circle model on a grid.
    Eigenfunction(EigenfunctionArgs),
    /// Density of a line bound state, or its observable statistics.
    Line(LineArgs),
    /// Run a suite of numerical checks and print a JSON report.
    Verify(VerifyArgs),
}

/// Either η directly (checked for criticality) or τ with the sign of η.
#[derive(Args, Debug, Clone)]
pub struct CouplingArgs {
    /// Electrostatic strength; accepts numbers and forms like `sqrt13` or `2sqrt2`.
    #[arg(long, value_parser = parse_real, allow_hyphen_values = true)]
    pub eta: Option<f64>,
    /// Lorentz-scalar strength.
    #[arg(long)]
    pub tau: Option<f64>,
    /// Sign of η when it is derived from τ as ±√(4 + τ²).
    #[arg(long, value_parser = parse_sign, default_value = "+", allow_hyphen_values = true)]
    pub eta_sign: f64,
    /// Accept (η, τ) with η² − τ² ≠ 4; results are diagnostic only.
    #[arg(long)]
    pub allow_noncritical: bool,
}

impl CouplingArgs {
    pub fn resolve(&self) -> CliResult<CouplingPair> {
        let pair = match (self.eta, self.tau) {
            (Some(eta), Some(tau)) if self.allow_noncritical => {
                CouplingPair::noncritical(eta, tau)?
            }
            (Some(eta), Some(tau)) => CouplingPair::new(eta, tau)?,
            (None, Some(tau)) => CouplingPair::from_tau(tau, self.eta_sign)?,
            (Some(eta), None) => {
                // τ = ±√(η² − 4) is ambiguous, so only the symmetric case is implied
                if (eta * eta - 4.0).abs() > dirac_shell::params::CRITICAL_TOL {
                    return Err(CliError::Invalid(format!(
                        "--eta {eta} needs --tau unless |eta| = 2"
                    )));
                }
                CouplingPair::new(eta, 0.0)?
            }
            (None, None) => {
                return Err(CliError::Invalid(
                    "give --tau (and optionally --eta-sign) or --eta with --tau".into(),
                ))
            }
        };
        Ok(pair)
    }
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SpectrumFigure {
    /// τ = −5, 0, 5 with η = +√(4 + τ²), m = R = 1, k = −30..30.
    Ev,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
pub struct SpectrumArgs {
    #[arg(long, default_value_t = 1.0)]
    pub m: f64,
    #[arg(long = "R", default_value_t = 1.0)]
    pub radius: f64,
    #[command(flatten)]
    pub coupling: CouplingArgs,
    #[arg(long)]
    pub k_min: Option<i64>,
    #[arg(long)]
    pub k_max: Option<i64>,
    /// Root tolerance relative to m.
    #[arg(long, default_value_t = dirac_shell::spectrum::DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, value_enum, conflicts_with_all = ["eta", "tau", "allow_noncritical", "m", "radius", "k_min", "k_max"])]
    pub figure: Option<SpectrumFigure>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EigenfunctionFigure {
    /// k = 5, 10, 20 with m = R = 1, τ = 0.
    Modu,
    /// k = 0 and 2 (or --k) with η = 2√2, τ = −2.
    L2t,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
pub struct EigenfunctionArgs {
    #[arg(long, default_value_t = 1.0)]
    pub m: f64,
    #[arg(long = "R", default_value_t = 1.0)]
    pub radius: f64,
    #[command(flatten)]
    pub coupling: CouplingArgs,
    /// Angular momentum channels, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub k: Vec<i64>,
    #[arg(long, default_value_t = 0.0)]
    pub r_min: f64,
    /// Defaults to 3R.
    #[arg(long)]
    pub r_max: Option<f64>,
    /// Number of radii; they sit at cell midpoints of [r_min, r_max].
    #[arg(long, default_value_t = 600)]
    pub nr: usize,
    #[arg(long, default_value_t = dirac_shell::spectrum::DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, value_enum, conflicts_with_all = ["eta", "tau", "allow_noncritical", "m", "radius"])]
    pub figure: Option<EigenfunctionFigure>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LineFigure {
    /// η = 2, τ = 0, Ξ = b₀.
    Modplots1,
    /// η = √13, τ = −3, Ξ = (2b₀ + b₁)/√5.
    Modplots2,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
pub struct LineArgs {
    #[arg(long, default_value_t = 1.0)]
    pub m: f64,
    #[command(flatten)]
    pub coupling: CouplingArgs,
    /// Form factor: `b<n>`, `hermite:c0,c1,...` (complex as `re+imi`), or `file:path.csv` with columns k, re[, im].
    #[arg(long, default_value = "b0")]
    pub xi: String,
    /// Translate the state along the line by y₀.
    #[arg(long, default_value_t = 0.0)]
    pub shift_y0: f64,
    #[arg(long, default_value_t = -4.0)]
    pub x_min: f64,
    #[arg(long, default_value_t = 4.0)]
    pub x_max: f64,
    #[arg(long, default_value_t = 161)]
    pub nx: usize,
    #[arg(long, default_value_t = -4.0)]
    pub y_min: f64,
    #[arg(long, default_value_t = 4.0)]
    pub y_max: f64,
    #[arg(long, default_value_t = 161)]
    pub ny: usize,
    /// Minimum number of k-nodes.
    #[arg(long, default_value_t = 400)]
    pub nodes: usize,
    /// Largest accepted quadrature error estimate per grid point.
    #[arg(long, default_value_t = 1e-10)]
    pub quad_tol: f64,
    /// Emit the statistics table instead of the density grid.
    #[arg(long)]
    pub observables: bool,
    #[arg(long, value_enum, conflicts_with_all = ["eta", "tau", "allow_noncritical", "m", "xi", "shift_y0"])]
    pub figure: Option<LineFigure>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Bessel,
    Circle,
    Line,
    Symmetry,
    Asymptotics,
    All,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value = "all")]
    pub suite: Suite,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// A real number, or `[-][a]sqrt[(]b[)]` meaning ±a·√b.
pub fn parse_real(s: &str) -> Result<f64, String> {
    let t = s.trim();
    if let Ok(v) = t.parse::<f64>() {
        return if v.is_finite() {
            Ok(v)
        } else {
            Err(format!("{s} is not finite"))
        };
    }
    let (sign, rest) = match t.strip_prefix('-') {
        Some(r) => (-1.0, r),
        None => (1.0, t.strip_prefix('+').unwrap_or(t)),
    };
    let Some((coef, root)) = rest.split_once("sqrt") else {
        return Err(format!("cannot read {s} as a number"));
    };
    let coef = coef.trim_end_matches('*');
    let a = if coef.is_empty() {
        1.0
    } else {
        coef.parse::<f64>()
            .map_err(|_| format!("bad coefficient in {s}"))?
    };
    let b = root
        .trim_start_matches('(')
        .trim_end_matches(')')
        .parse::<f64>()
        .map_err(|_| format!("bad radicand in {s}"))?;
    if !(b >= 0.0 && a.is_finite() && b.is_finite()) {
        return Err(format!("{s} is not a finite real"));
    }
    Ok(sign * a * b.sqrt())
}

pub fn parse_sign(s: &str) -> Result<f64, String> {
    match s.trim() {
        "+" | "+1" | "1" | "plus" => Ok(1.0),
        "-" | "-1" | "minus" => Ok(-1.0),
        _ => Err(format!("sign must be + or -, got {s}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_with_roots() {
        assert_eq!(parse_real("2").unwrap(), 2.0);
        assert_eq!(parse_real("sqrt13").unwrap(), 13f64.sqrt());
        assert_eq!(parse_real("-sqrt(13)").unwrap(), -(13f64.sqrt()));
        assert_eq!(parse_real("2sqrt2").unwrap(), 2.0 * 2f64.sqrt());
        assert_eq!(parse_real("2*sqrt(2)").unwrap(), 2.0 * 2f64.sqrt());
        assert!(parse_real("sqrt-2").is_err());
        assert!(parse_real("two").is_err());
        assert!(parse_real("inf").is_err());
    }

    #[test]
    fn critical_pairs_from_flags() {
        let args = |eta, tau, allow| CouplingArgs {
            eta,
            tau,
            eta_sign: 1.0,
            allow_noncritical: allow,
        };
        let p = args(Some(13f64.sqrt()), Some(-3.0), false)
            .resolve()
            .unwrap();
        assert!(p.critical);
        assert_eq!(args(None, Some(0.0), false).resolve().unwrap().eta, 2.0);
        assert_eq!(args(Some(-2.0), None, false).resolve().unwrap().tau, 0.0);
        assert_eq!(
            args(Some(3.0), Some(0.0), false)
                .resolve()
                .unwrap_err()
                .exit_code(),
            2
        );
        assert!(!args(Some(3.0), Some(0.0), true).resolve().unwrap().critical);
        assert_eq!(
            args(None, None, false).resolve().unwrap_err().exit_code(),
            2
        );
    }
}
