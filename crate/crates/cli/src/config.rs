//! Command-line arguments and the resolved run configuration.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C64;
use regulator_core::dilog::CrossRatioConvention;
use regulator_core::jet_forms::{AlphaCoefficients, ChNormalization, Conventions};
use regulator_core::quad::QuadratureConfig;
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "regulator", version, about = "Regulator cochains, dilogarithm presentations and transgression checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: GlobalArgs,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Also write the results as a flat CSV table.
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
    /// Include the wall time in the report (makes it run-dependent).
    #[arg(long, global = true)]
    pub timing: bool,
    /// Relative quadrature tolerance [default: 1e-8]
    #[arg(long, global = true)]
    pub rel_tol: Option<f64>,
    /// Absolute quadrature tolerance [default: 1e-13]
    #[arg(long, global = true)]
    pub abs_tol: Option<f64>,
    /// Maximum subdivision depth [default: 24]
    #[arg(long, global = true)]
    pub max_depth: Option<u32>,
    /// Odd degree of the Grundmann-Möller rule [default: 7]
    #[arg(long, global = true)]
    pub rule_degree: Option<usize>,
    /// Integrand evaluation budget [default: 20000000]
    #[arg(long, global = true)]
    pub max_evaluations: Option<usize>,
}

impl GlobalArgs {
    pub fn quadrature(&self) -> QuadratureConfig {
        let d = QuadratureConfig::default();
        QuadratureConfig {
            rel_tol: self.rel_tol.unwrap_or(d.rel_tol),
            abs_tol: self.abs_tol.unwrap_or(d.abs_tol),
            max_depth: self.max_depth.unwrap_or(d.max_depth),
            rule_degree: self.rule_degree.unwrap_or(d.rule_degree),
            max_evaluations: self.max_evaluations.unwrap_or(d.max_evaluations),
        }
    }
}

fn parse_complex(s: &str) -> Result<C64, String> {
    let parts: Vec<&str> = s.split(',').collect();
    let num = |p: &str| p.trim().parse::<f64>().map_err(|e| format!("`{p}`: {e}"));
    match parts.as_slice() {
        [re] => Ok(C64::new(num(re)?, 0.0)),
        [re, im] => Ok(C64::new(num(re)?, num(im)?)),
        _ => Err("expected `re,im`".into()),
    }
}

fn parse_convention(s: &str) -> Result<CrossRatioConvention, String> {
    s.parse().map_err(|e: regulator_core::Error| e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoefficientChoice {
    /// Coefficients as printed.
    Printed,
    /// Printed coefficients times binomial weights.
    Binomial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormalizationChoice {
    AsPrinted,
    SingleFactorial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum JetChoice {
    Exact,
    FiniteDifference,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ConventionArgs {
    /// Coefficients of the transgressed forms.
    #[arg(long, value_enum, default_value_t = CoefficientChoice::Printed)]
    pub coefficients: CoefficientChoice,
    /// Normalization of the invariant polynomial.
    #[arg(long, value_enum, default_value_t = NormalizationChoice::AsPrinted)]
    pub normalization: NormalizationChoice,
}

impl ConventionArgs {
    pub fn conventions(&self) -> Conventions {
        Conventions {
            normalization: match self.normalization {
                NormalizationChoice::AsPrinted => ChNormalization::AsPrinted,
                NormalizationChoice::SingleFactorial => ChNormalization::SingleFactorial,
            },
            coefficients: match self.coefficients {
                CoefficientChoice::Printed => AlphaCoefficients::AsPrinted,
                CoefficientChoice::Binomial => AlphaCoefficients::Binomial,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Antisymmetry,
    ProjectiveInvariance,
    FiveTerm,
    /// Presentation / i·D ratio constancy over the cross-ratio conventions.
    #[value(name = "thm46-constancy")]
    #[serde(rename = "thm46-constancy")]
    Constancy,
    /// Minor-based integrand against the regularized trace integrand.
    #[value(name = "eq500-eq600")]
    #[serde(rename = "eq500-eq600")]
    Equivalence,
    /// Transgression identity residuals on test scenes.
    #[value(name = "th1-residuals")]
    #[serde(rename = "th1-residuals")]
    Residuals,
    RealityClass,
}

impl Suite {
    pub fn default_trials(self) -> usize {
        match self {
            Suite::Antisymmetry | Suite::RealityClass => 100,
            Suite::ProjectiveInvariance | Suite::Constancy => 20,
            Suite::FiveTerm | Suite::Equivalence | Suite::Residuals => 10,
        }
    }
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Command {
    /// Li2(z) and the Bloch-Wigner function D(z).
    Dilog {
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        z: C64,
    },
    /// Chern-character group cochain of a tuple of matrices.
    Transgress {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        tuple: PathBuf,
        /// Also report the raw Borel integral (h = I).
        #[arg(long)]
        borel: bool,
        /// Regularization h + εI; overrides the file.
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Minor-based cochain of 2r vectors in C^r.
    Grassmann {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        vectors: PathBuf,
        /// Evaluate the integrand at this simplex point (free or barycentric coordinates).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        point: Option<Vec<f64>>,
        /// Compare with the regularized trace form along an ε-ladder.
        #[arg(long)]
        equivalence: bool,
    },
    /// Dilogarithm presentation of four vectors in C^2.
    DilogPresentation {
        #[arg(long)]
        vectors: PathBuf,
        /// Report the ratio to i·D under all six cross-ratio conventions.
        #[arg(long)]
        sweep_conventions: bool,
        #[arg(long, value_parser = parse_convention, default_value = "standard")]
        convention: CrossRatioConvention,
    },
    /// Cocycle defect of random tuples.
    CocycleTest {
        #[arg(long)]
        r: usize,
        #[arg(long, default_value_t = 5)]
        trials: usize,
        /// Matrix size N.
        #[arg(long, default_value_t = 2)]
        rank: usize,
    },
    /// Residuals of the transgression identity on a test scene.
    VerifyTh1 {
        #[arg(long)]
        r: usize,
        /// Degree n; all of 1..=2r-1 when omitted.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        scene: PathBuf,
        /// Number of base points; the first is the scene's own point.
        #[arg(long, default_value_t = 1)]
        points: usize,
        #[arg(long, value_enum, default_value_t = JetChoice::Exact)]
        jets: JetChoice,
        /// Step of the finite-difference jets.
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        /// Pass threshold; defaults depend on r and the jet source.
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        conventions: ConventionArgs,
    },
    /// A named property-test suite.
    Campaign {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long)]
        trials: Option<usize>,
        /// Weight for suites that take one.
        #[arg(long)]
        r: Option<usize>,
        #[command(flatten)]
        conventions: ConventionArgs,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Dilog { .. } => "dilog",
            Command::Transgress { .. } => "transgress",
            Command::Grassmann { .. } => "grassmann",
            Command::DilogPresentation { .. } => "dilog-presentation",
            Command::CocycleTest { .. } => "cocycle-test",
            Command::VerifyTh1 { .. } => "verify-th1",
            Command::Campaign { .. } => "campaign",
        }
    }
}

/// Everything that determines a run.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub seed: u64,
    pub quadrature: QuadratureConfig,
    pub output: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    #[serde(skip)]
    pub timing: bool,
}

impl From<Cli> for RunConfig {
    fn from(cli: Cli) -> Self {
        Self {
            quadrature: cli.global.quadrature(),
            seed: cli.global.seed,
            output: cli.global.output,
            csv: cli.global.csv,
            timing: cli.global.timing,
            command: cli.command,
        }
    }
}
