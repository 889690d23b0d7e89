use std::f64::consts::PI;
use std::path::PathBuf;

use bellcause_core::{BellFunctional, Scenario};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser, Serialize)]
#[command(name = "bellcause", version, about = "Bell tests against outcome-to-outcome causal influence")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GlobalArgs {
    /// Seed of every random stream used by the command.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output directory; defaults to ./out/<command>-<seed>/.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Also write every CSV table as JSON.
    #[arg(long, global = true)]
    pub json: bool,
    /// Worker thread cap; results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Evaluate a functional on every deterministic strategy, or on the
    /// vertices listed in a coordinate CSV, and check a bound.
    VerifyPolytope(VerifyPolytopeArgs),
    /// Minimal ACE from the LP and the closed form next to a simulated
    /// interventional estimate, per state angle.
    AceScan(AceScanArgs),
    /// Three-setting functional per state angle, in theory and sampled.
    S3Scan(S3ScanArgs),
    /// Efficiency and visibility grid with the critical thresholds.
    ThresholdScan(ThresholdScanArgs),
    /// Monte-Carlo distribution of the ACE estimator for one state.
    NoiseFloor(NoiseFloorArgs),
    /// Minimal ACE of a behavior given as JSON.
    MinAce(MinAceArgs),
    /// Write the deterministic strategies of a scenario.
    ExportVertices(ExportVerticesArgs),
    /// One seeded run of counts.
    Simulate(SimulateArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::VerifyPolytope(_) => "verify-polytope",
            Command::AceScan(_) => "ace-scan",
            Command::S3Scan(_) => "s3-scan",
            Command::ThresholdScan(_) => "threshold-scan",
            Command::NoiseFloor(_) => "noise-floor",
            Command::MinAce(_) => "min-ace",
            Command::ExportVertices(_) => "export-vertices",
            Command::Simulate(_) => "simulate",
        }
    }
}

/// Parses `0.3`, `pi`, `pi/8`, `3pi/16` or `3*pi/16`.
pub fn parse_angle(text: &str) -> Result<f64, String> {
    let t = text.trim().to_ascii_lowercase().replace(['*', ' '], "");
    let bad = || format!("cannot read angle `{text}`");
    if let Some(pos) = t.find("pi") {
        let factor = match &t[..pos] {
            "" => 1.0,
            "-" => -1.0,
            f => f.parse::<f64>().map_err(|_| bad())?,
        };
        let rest = &t[pos + 2..];
        let divisor = match rest.strip_prefix('/') {
            None if rest.is_empty() => 1.0,
            Some(d) => d.parse::<f64>().map_err(|_| bad())?,
            None => return Err(bad()),
        };
        Ok(factor * PI / divisor)
    } else {
        t.parse::<f64>().map_err(|_| bad())
    }
}

pub fn default_state_grid() -> Vec<f64> {
    (1..=4).map(|k| PI * f64::from(k) / 16.0).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SettingsChoice {
    /// Angles optimal for the maximally entangled state.
    Fixed,
    /// Angles optimized per state.
    Optimized,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VerifyPolytopeArgs {
    #[arg(long, default_value = "3,3,2,2")]
    pub scenario: Scenario,
    #[arg(long, default_value = "s3")]
    pub functional: BellFunctional,
    /// Bound to check; defaults to 4 for both functionals.
    #[arg(long)]
    pub bound: Option<f64>,
    /// Coordinate CSV of vertices to check instead of the enumerated ones.
    #[arg(long)]
    pub vertices: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct AceScanArgs {
    #[arg(long, value_delimiter = ',', value_parser = parse_angle, default_values = ["pi/16", "pi/8", "3pi/16", "pi/4"])]
    pub gammas: Vec<f64>,
    #[arg(long, default_value_t = 48_000)]
    pub counts: u64,
    /// Bootstrap resamples for the simulated interval.
    #[arg(long, default_value_t = 1000)]
    pub runs: usize,
    #[arg(long, value_enum, default_value_t = SettingsChoice::Fixed)]
    pub settings: SettingsChoice,
    #[arg(long, value_parser = parse_angle, default_value = "0")]
    pub tilt: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct S3ScanArgs {
    #[arg(long, value_delimiter = ',', value_parser = parse_angle,
          default_values = ["0", "pi/16", "pi/8", "3pi/16", "pi/4", "5pi/16", "3pi/8", "7pi/16", "pi/2"])]
    pub gammas: Vec<f64>,
    #[arg(long, value_enum, default_value_t = SettingsChoice::Fixed)]
    pub mode: SettingsChoice,
    /// Sample the functional from this many Poisson counts per state.
    #[arg(long)]
    pub counts: Option<u64>,
    #[arg(long, default_value_t = 1.0)]
    pub visibility: f64,
    /// Runs used for the sampled interval.
    #[arg(long, default_value_t = 1000)]
    pub runs: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ThresholdScanArgs {
    #[arg(long, value_delimiter = ',', value_parser = parse_angle, default_values = ["pi/8", "pi/4"])]
    pub gammas: Vec<f64>,
    #[arg(long, default_value = "s3")]
    pub functional: BellFunctional,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct NoiseFloorArgs {
    #[arg(long, value_parser = parse_angle, default_value = "pi/4")]
    pub gamma: f64,
    #[arg(long, default_value_t = 48_000)]
    pub counts: u64,
    #[arg(long, default_value_t = 100_000)]
    pub runs: usize,
    #[arg(long, value_enum, default_value_t = SettingsChoice::Fixed)]
    pub settings: SettingsChoice,
    #[arg(long, value_parser = parse_angle, default_value = "0")]
    pub tilt: f64,
    /// Use expected counts instead of Poisson draws.
    #[arg(long)]
    pub exact: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MinAceArgs {
    /// Behavior JSON with fields m_x, m_y, o_a, o_b and p[a][b][x][y].
    #[arg(long)]
    pub behavior: PathBuf,
    /// Project onto the no-signalling-toward-Alice subspace first.
    #[arg(long)]
    pub project: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum DirectionChoice {
    AToB,
    BToA,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VertexFormat {
    /// Response-function tables.
    Strategies,
    /// Behavior coordinates p(a,b|x,y).
    Coordinates,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ExportVerticesArgs {
    #[arg(long, default_value = "2,2,2,2")]
    pub scenario: Scenario,
    #[arg(long, value_enum, default_value_t = DirectionChoice::AToB)]
    pub direction: DirectionChoice,
    #[arg(long, value_enum, default_value_t = VertexFormat::Strategies)]
    pub format: VertexFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum SettingsPreset {
    ChshFixed,
    ChshOptimized,
    S3Fixed,
    S3Optimized,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    #[arg(long, value_parser = parse_angle, default_value = "pi/4")]
    pub gamma: f64,
    #[arg(long, default_value_t = 1.0)]
    pub visibility: f64,
    #[arg(long, default_value_t = 48_000)]
    pub counts: u64,
    #[arg(long, value_enum, default_value_t = SettingsPreset::ChshFixed)]
    pub settings: SettingsPreset,
    /// Force Alice's outcome instead of measuring it.
    #[arg(long)]
    pub intervene: bool,
    #[arg(long, value_parser = parse_angle, default_value = "0")]
    pub tilt: f64,
}
