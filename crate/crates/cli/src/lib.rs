//! Command-line front end: each command writes CSV tables (optionally
//! mirrored as JSON) and a `manifest.json` with SHA-256 digests into its
//! output directory.
//!
//! Exit codes: 0 success, 1 a checked bound or agreement failed, 2 usage
//! error, 3 numerical failure.

pub mod args;
pub mod error;
pub mod output;

use std::path::PathBuf;

use bellcause_core::experiment::{AceEstimator, RunModel};
use bellcause_core::inequalities::{
    chsh_fixed_settings, chsh_optimized_settings, s3_fixed_settings, s3_optimized_curve, s3_template_settings,
};
use bellcause_core::noise::{
    ace_samples, default_grid_axis, functional_samples, threshold_grid, PercentileSummary, Sampling, MIN_RUNS,
};
use bellcause_core::polytope::{
    coordinates_csv, enumerate_strategies, min_ace_empirical, parse_coordinates_csv, strategies_csv, strategy_behavior,
    AceStatus,
};
use bellcause_core::{
    ace_closed_form, born_behavior, chsh_value, critical_thresholds, min_ace, verify_vertex_bound, Behavior,
    BellFunctional, DetectorModel, Direction, EquatorialSetting, InterventionConfig, Scenario, TwoQubitState,
};

use crate::args::{
    AceScanArgs, Cli, Command, DirectionChoice, ExportVerticesArgs, MinAceArgs, NoiseFloorArgs, S3ScanArgs,
    SettingsChoice, SettingsPreset, SimulateArgs, ThresholdScanArgs, VerifyPolytopeArgs, VertexFormat,
};
pub use crate::error::CliError;
use crate::output::{ArtifactWriter, Cell, RunManifest, Table};

/// Largest tolerated difference between the LP and closed-form ACE.
pub const ACE_AGREEMENT_TOL: f64 = 1e-7;
/// Default vertex bound: both functionals reach at most 4 on one-way
/// outcome-influence strategies.
pub const DEFAULT_VERTEX_BOUND: f64 = 4.0;

/// What a command reports besides its files.
#[derive(Debug, Default)]
struct Verdict {
    lines: Vec<String>,
    failure: Option<String>,
}

impl Verdict {
    fn say(&mut self, line: impl Into<String>) {
        self.lines.push(line.into());
    }
}

#[derive(Debug)]
pub struct Report {
    pub out_dir: PathBuf,
    pub lines: Vec<String>,
    pub manifest: RunManifest,
}

pub fn default_out_dir(command: &str, seed: u64) -> PathBuf {
    PathBuf::from("out").join(format!("{command}-{seed}"))
}

/// Runs the parsed command. Artifacts and the manifest are written even
/// when a checked assertion fails.
pub fn run(cli: &Cli) -> Result<Report, CliError> {
    match cli.global.threads {
        Some(0) => Err(CliError::Usage("--threads must be positive".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?
            .install(|| dispatch(cli)),
        None => dispatch(cli),
    }
}

fn dispatch(cli: &Cli) -> Result<Report, CliError> {
    let name = cli.command.name();
    let seed = cli.global.seed;
    let out_dir = cli.global.out.clone().unwrap_or_else(|| default_out_dir(name, seed));
    let mut writer = ArtifactWriter::new(&out_dir, cli.global.json)?;
    let verdict = match &cli.command {
        Command::VerifyPolytope(a) => verify_polytope(a, &mut writer)?,
        Command::AceScan(a) => ace_scan(a, seed, &mut writer)?,
        Command::S3Scan(a) => s3_scan(a, seed, &mut writer)?,
        Command::ThresholdScan(a) => threshold_scan(a, &mut writer)?,
        Command::NoiseFloor(a) => noise_floor(a, seed, &mut writer)?,
        Command::MinAce(a) => min_ace_cmd(a, &mut writer)?,
        Command::ExportVertices(a) => export_vertices(a, &mut writer)?,
        Command::Simulate(a) => simulate(a, seed, &mut writer)?,
    };
    let parameters = serde_json::json!({ "args": &cli.command, "json": cli.global.json });
    let manifest = writer.finish(name, parameters, seed)?;
    if let Some(msg) = verdict.failure {
        return Err(CliError::Assertion(msg));
    }
    Ok(Report { out_dir, lines: verdict.lines, manifest })
}

fn chsh_settings(choice: SettingsChoice, gamma: f64) -> (Vec<EquatorialSetting>, Vec<EquatorialSetting>) {
    match choice {
        SettingsChoice::Fixed => chsh_fixed_settings(),
        SettingsChoice::Optimized => chsh_optimized_settings(gamma),
    }
}

fn s3_settings(
    choice: SettingsChoice,
    gamma: f64,
) -> Result<(Vec<EquatorialSetting>, Vec<EquatorialSetting>), CliError> {
    Ok(match choice {
        SettingsChoice::Fixed => s3_fixed_settings(),
        SettingsChoice::Optimized => {
            let opt = s3_optimized_curve(gamma)?;
            s3_template_settings(opt.alpha, opt.beta)
        }
    })
}

fn intervention(tilt: f64) -> Result<InterventionConfig, CliError> {
    Ok(InterventionConfig::with_tilt(tilt)?)
}

fn verify_polytope(args: &VerifyPolytopeArgs, writer: &mut ArtifactWriter) -> Result<Verdict, CliError> {
    let functional = args.functional;
    if args.scenario != functional.scenario() {
        return Err(CliError::Usage(format!(
            "functional {functional} needs scenario {}, got {}",
            functional.scenario(),
            args.scenario
        )));
    }
    let bound = args.bound.unwrap_or(DEFAULT_VERTEX_BOUND);
    let mut verdict = Verdict::default();
    let mut table = Table::new("verify_polytope", &["source", "direction", "count", "max_value", "violations"]);

    if let Some(path) = &args.vertices {
        let text = std::fs::read_to_string(path)?;
        let vertices = parse_coordinates_csv(&text)?;
        let mut offending = Table::new("violations", &["row", "value"]);
        let mut max_value = f64::NEG_INFINITY;
        for (i, v) in vertices.iter().enumerate() {
            if v.scenario() != args.scenario {
                return Err(CliError::Usage(format!(
                    "vertex file has scenario {}, expected {}",
                    v.scenario(),
                    args.scenario
                )));
            }
            let value = functional.evaluate(v)?;
            max_value = max_value.max(value);
            if value > bound + 1e-9 {
                offending.push(vec![(i + 1).into(), value.into()]);
            }
        }
        table.push(vec![
            path.display().to_string().into(),
            "file".into(),
            vertices.len().into(),
            max_value.into(),
            offending.rows.len().into(),
        ]);
        writer.write_table(&table)?;
        verdict.say(format!("{} vertices from file, max {functional} = {max_value}", vertices.len()));
        if !offending.rows.is_empty() {
            writer.write_table(&offending)?;
            let dump: Vec<String> = offending
                .rows
                .iter()
                .map(|r| match (&r[0], &r[1]) {
                    (Cell::Int(i), Cell::Num(v)) => format!("row {i}: {v}"),
                    _ => unreachable!("violation rows are (row, value)"),
                })
                .collect();
            verdict.failure = Some(format!("{} vertices exceed {bound}: {}", offending.rows.len(), dump.join("; ")));
        }
        return Ok(verdict);
    }

    let report = verify_vertex_bound(&args.scenario, functional, bound)?;
    let mut offending = Vec::new();
    for scan in &report.scans {
        table.push(vec![
            "enumeration".into(),
            scan.direction.to_string().into(),
            scan.count.into(),
            f64::from(scan.max_value).into(),
            scan.violations.len().into(),
        ]);
        verdict.say(format!("{}: {} strategies, max {functional} = {}", scan.direction, scan.count, scan.max_value));
        if !scan.violations.is_empty() {
            let strategies = enumerate_strategies(&args.scenario, scan.direction)?;
            let picked: Vec<_> = scan.violations.iter().map(|&(i, _)| strategies[i].clone()).collect();
            let name = format!("violations_{}.csv", scan.direction);
            writer.write_bytes(&name, strategies_csv(&args.scenario, scan.direction, &picked).as_bytes())?;
            offending.push(format!("{} {} strategies (see {name})", scan.violations.len(), scan.direction));
        }
    }
    writer.write_table(&table)?;
    writer.write_json("report.json", &report)?;
    if !offending.is_empty() {
        verdict.failure = Some(format!("{functional} exceeds {bound} on {}", offending.join(", ")));
    }
    Ok(verdict)
}

fn ace_scan(args: &AceScanArgs, seed: u64, writer: &mut ArtifactWriter) -> Result<Verdict, CliError> {
    let config = intervention(args.tilt)?;
    let mut table = Table::new(
        "ace_scan",
        &["gamma", "S2", "ace_lp", "ace_formula", "ace_simulated", "interval_low", "interval_high", "lp_status"],
    );
    let mut verdict = Verdict::default();
    let mut disagreements = Vec::new();
    for (i, &gamma) in args.gammas.iter().enumerate() {
        let state = TwoQubitState::pure(gamma)?;
        let (sa, sb) = chsh_settings(args.settings, gamma);
        let behavior = born_behavior(&state, &sa, &sb, &DetectorModel::PERFECT)?;
        let report = chsh_value(&behavior)?;
        let formula = ace_closed_form(&report);
        let lp = min_ace(&behavior)?;
        let status = match lp.status {
            AceStatus::Optimal => "optimal",
            AceStatus::Infeasible => "infeasible",
        };
        if let Some(v) = lp.value {
            if (v - formula).abs() > ACE_AGREEMENT_TOL {
                disagreements.push(format!("γ = {gamma}: LP {v} vs formula {formula}"));
            }
        }
        let model = RunModel::new(&state, &sa, &sb, &config, args.counts)?;
        let counts = model.sample_seeded(seed, i as u64);
        let estimator = AceEstimator { resamples: args.runs, seed: seed.wrapping_add(1 + i as u64) };
        let estimate = estimator.estimate(&counts)?;
        table.push(vec![
            gamma.into(),
            report.s2.into(),
            lp.value.into(),
            formula.into(),
            estimate.value.into(),
            estimate.interval_low.into(),
            estimate.interval_high.into(),
            status.into(),
        ]);
        verdict.say(format!(
            "γ = {gamma:.6}: S2 = {:.6}, ACE lp {} formula {formula:.6}, simulated {:.5} [{:.5}, {:.5}]",
            report.s2,
            lp.value.map_or_else(|| "infeasible".to_string(), |v| format!("{v:.6}")),
            estimate.value,
            estimate.interval_low,
            estimate.interval_high
        ));
    }
    writer.write_table(&table)?;
    if !disagreements.is_empty() {
        verdict.failure = Some(disagreements.join("; "));
    }
    Ok(verdict)
}

fn s3_scan(args: &S3ScanArgs, seed: u64, writer: &mut ArtifactWriter) -> Result<Verdict, CliError> {
    if args.counts.is_some() && args.runs == 0 {
        return Err(CliError::Usage("--runs must be positive when sampling".into()));
    }
    let mut table = Table::new("s3_scan", &["gamma", "s3_theory", "s3_sampled", "interval_low", "interval_high"]);
    let mut verdict = Verdict::default();
    for (i, &gamma) in args.gammas.iter().enumerate() {
        let state = TwoQubitState::new(gamma, args.visibility)?;
        let (sa, sb) = s3_settings(args.mode, gamma)?;
        let theory = BellFunctional::S3.evaluate(&born_behavior(&state, &sa, &sb, &DetectorModel::PERFECT)?)?;
        let (sampled, low, high) = match args.counts {
            Some(n) => {
                let model = RunModel::new(&state, &sa, &sb, &InterventionConfig::observational(), n)?;
                let value = BellFunctional::S3.evaluate(&model.sample_seeded(seed, i as u64).behavior()?)?;
                let spread =
                    functional_samples(&model, BellFunctional::S3, args.runs, seed.wrapping_add(1 + i as u64))?;
                let summary = PercentileSummary::from_samples(&spread)?;
                (Some(value), Some(summary.p0013), Some(summary.p9987))
            }
            None => (None, None, None),
        };
        table.push(vec![gamma.into(), theory.into(), sampled.into(), low.into(), high.into()]);
        verdict.say(match sampled {
            Some(s) => format!("γ = {gamma:.6}: S3 theory {theory:.6}, sampled {s:.4}"),
            None => format!("γ = {gamma:.6}: S3 theory {theory:.6}"),
        });
    }
    writer.write_table(&table)?;
    Ok(verdict)
}

fn threshold_scan(args: &ThresholdScanArgs, writer: &mut ArtifactWriter) -> Result<Verdict, CliError> {
    let axis = default_grid_axis();
    let mut grid = Table::new("threshold_grid", &["gamma", "eta", "v", "max_functional", "violated"]);
    let mut thresholds = Table::new("thresholds", &["gamma", "functional", "critical_eta", "critical_v"]);
    let mut verdict = Verdict::default();
    for &gamma in &args.gammas {
        let result = critical_thresholds(gamma, args.functional)?;
        for row in threshold_grid(gamma, args.functional, &axis, &axis)? {
            grid.push(vec![
                row.gamma.into(),
                row.eta.into(),
                row.v.into(),
                row.max_functional.into(),
                row.violated.into(),
            ]);
        }
        thresholds.push(vec![
            gamma.into(),
            args.functional.to_string().into(),
            result.critical_eta.into(),
            result.critical_v.into(),
        ]);
        verdict.say(format!(
            "γ = {gamma:.6} {}: critical η = {:.4}, critical v = {:.4}",
            args.functional, result.critical_eta, result.critical_v
        ));
    }
    writer.write_table(&grid)?;
    writer.write_table(&thresholds)?;
    Ok(verdict)
}

fn noise_floor(args: &NoiseFloorArgs, seed: u64, writer: &mut ArtifactWriter) -> Result<Verdict, CliError> {
    if args.runs < MIN_RUNS {
        return Err(CliError::Usage(format!("--runs must be at least {MIN_RUNS}")));
    }
    let state = TwoQubitState::pure(args.gamma)?;
    let (sa, sb) = chsh_settings(args.settings, args.gamma);
    let model = RunModel::new(&state, &sa, &sb, &intervention(args.tilt)?, args.counts)?;
    let sampling = if args.exact { Sampling::Exact } else { Sampling::Poisson };
    let samples = ace_samples(&model, args.runs, seed, sampling)?;
    let summary = PercentileSummary::from_samples(&samples)?;
    let mut dist = Table::new("ace_distribution", &["run", "value"]);
    for (r, &v) in samples.iter().enumerate() {
        dist.push(vec![r.into(), v.into()]);
    }
    let mut table = Table::new("summary", &["gamma", "median", "p0013", "p1587", "p8413", "p9987", "runs"]);
    table.push(vec![
        args.gamma.into(),
        summary.median.into(),
        summary.p0013.into(),
        summary.p1587.into(),
        summary.p8413.into(),
        summary.p9987.into(),
        summary.runs.into(),
    ]);
    writer.write_table(&dist)?;
    writer.write_table(&table)?;
    let mut verdict = Verdict::default();
    verdict.say(format!(
        "γ = {:.6}: median {:.5}, 3σ interval [{:.5}, {:.5}] over {} runs",
        args.gamma, summary.median, summary.p0013, summary.p9987, summary.runs
    ));
    Ok(verdict)
}

fn min_ace_cmd(args: &MinAceArgs, writer: &mut ArtifactWriter) -> Result<Verdict, CliError> {
    let behavior = Behavior::from_json(&std::fs::read_to_string(&args.behavior)?)?;
    let (result, distance) = if args.project { min_ace_empirical(&behavior)? } else { (min_ace(&behavior)?, 0.0) };
    let chsh = (behavior.scenario() == Scenario::CHSH).then(|| chsh_value(&behavior)).transpose()?;
    let status = match result.status {
        AceStatus::Optimal => "optimal",
        AceStatus::Infeasible => "infeasible",
    };
    let mut table = Table::new("min_ace", &["status", "value", "S2", "ace_formula", "projection_distance"]);
    table.push(vec![
        status.into(),
        result.value.into(),
        chsh.as_ref().map(|r| r.s2).into(),
        chsh.as_ref().map(ace_closed_form).into(),
        distance.into(),
    ]);
    writer.write_table(&table)?;
    writer.write_json("min_ace_result.json", &result)?;
    let mut verdict = Verdict::default();
    verdict.say(match result.value {
        Some(v) => format!("minimal ACE {v}"),
        None => "no outcome-influence model reproduces this behavior (certificate in min_ace_result.json)".to_string(),
    });
    Ok(verdict)
}

fn export_vertices(args: &ExportVerticesArgs, writer: &mut ArtifactWriter) -> Result<Verdict, CliError> {
    let direction = match args.direction {
        DirectionChoice::AToB => Direction::AtoB,
        DirectionChoice::BToA => Direction::BtoA,
    };
    let strategies = enumerate_strategies(&args.scenario, direction)?;
    match args.format {
        VertexFormat::Strategies => {
            writer.write_bytes("vertices.csv", strategies_csv(&args.scenario, direction, &strategies).as_bytes())?;
        }
        VertexFormat::Coordinates => {
            let behaviors =
                strategies.iter().map(|s| strategy_behavior(s, &args.scenario)).collect::<Result<Vec<_>, _>>()?;
            writer.write_bytes("vertices.csv", coordinates_csv(&behaviors)?.as_bytes())?;
        }
    }
    if writer.json_enabled() {
        writer.write_json("vertices.json", &strategies)?;
    }
    let mut verdict = Verdict::default();
    verdict.say(format!("{} {direction} strategies for scenario {}", strategies.len(), args.scenario));
    Ok(verdict)
}

fn simulate(args: &SimulateArgs, seed: u64, writer: &mut ArtifactWriter) -> Result<Verdict, CliError> {
    let (sa, sb) = match args.settings {
        SettingsPreset::ChshFixed => chsh_settings(SettingsChoice::Fixed, args.gamma),
        SettingsPreset::ChshOptimized => chsh_settings(SettingsChoice::Optimized, args.gamma),
        SettingsPreset::S3Fixed => s3_settings(SettingsChoice::Fixed, args.gamma)?,
        SettingsPreset::S3Optimized => s3_settings(SettingsChoice::Optimized, args.gamma)?,
    };
    let config = if args.intervene { intervention(args.tilt)? } else { InterventionConfig::observational() };
    let state = TwoQubitState::new(args.gamma, args.visibility)?;
    let counts = RunModel::new(&state, &sa, &sb, &config, args.counts)?.sample_seeded(seed, 0);
    let mut table = Table::new("counts", &["x", "y", "a_do", "a", "b", "count"]);
    for ((x, y, d, a, b), &c) in counts.bins().zip(counts.counts()) {
        let d: Cell = d.map_or_else(|| "-".into(), Cell::from);
        table.push(vec![x.into(), y.into(), d, a.into(), b.into(), c.into()]);
    }
    writer.write_table(&table)?;
    let mut verdict = Verdict::default();
    verdict.say(format!("{} counts drawn (target {})", counts.total(), counts.total_target()));
    Ok(verdict)
}
