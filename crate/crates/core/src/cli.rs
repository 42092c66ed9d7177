//! Batch command-line front end: every subcommand reads a JSON set
//! description, writes its artifacts under an output directory, and drops a
//! manifest with SHA-256 checksums so runs can be diffed and reproduced.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::Error;
use crate::linalg::Tolerances;
use crate::montecarlo::{self, SeedConfig};
use crate::optics;
use crate::povm::{self, PovmDescription};
use crate::smc::{self, sig12};
use crate::symmetric::{SetDescription, SymmetricSet};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn io(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_IO,
            message: message.into(),
        }
    }
    fn validation(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_VALIDATION,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError {
            code: EXIT_DOMAIN,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::io(format!("JSON error: {e}"))
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "seqmc",
    version,
    about = "Design, stage, simulate, and compile discrimination measurements for symmetric state sets"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// JSON set description {"n": ..., "coefficients": [{"re", "im"}, ...]}.
    #[arg(long)]
    pub input: PathBuf,
    /// Directory for artifacts and the run manifest.
    #[arg(long, default_value = "out")]
    pub output_dir: PathBuf,
    /// Tolerance overrides, repeatable: --tol eps_psd=1e-9
    #[arg(long = "tol")]
    pub tol: Vec<String>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build and validate the max-confidence and min-error POVMs.
    Design {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Compute the full sequential stage plan and its totals.
    Plan {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Sample measurement outcomes and check them against the plan.
    Simulate {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        trials: u64,
    },
    /// Tabulate strategy figures over a (|c0|, |c1|) grid for N = 4 qutrit
    /// sets. Grid spec: MIN:MAX:COUNT,MIN:MAX:COUNT.
    Sweep {
        /// Artifacts directory.
        #[arg(long, default_value = "out")]
        output_dir: PathBuf,
        #[arg(long)]
        grid: String,
        #[arg(long, value_enum, default_value = "csv")]
        format: OutputFormat,
        #[arg(long = "tol")]
        tol: Vec<String>,
    },
    /// Compile the two-stage optical network for an N = 4 qutrit set.
    CompileOptics {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Re-check a serialized POVM or circuit file against tolerances.
    Validate {
        /// POVM or circuit JSON file.
        #[arg(long)]
        input: PathBuf,
        #[arg(long = "tol")]
        tol: Vec<String>,
    },
}

fn parse_tolerances(overrides: &[String]) -> Result<Tolerances, CliError> {
    let mut tol = Tolerances::default();
    for item in overrides {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| CliError::io(format!("tolerance override '{item}' is not key=value")))?;
        let parsed: f64 = value
            .parse()
            .map_err(|_| CliError::io(format!("tolerance value '{value}' is not a number")))?;
        match key {
            "eps_norm" => tol.eps_norm = parsed,
            "eps_herm" => tol.eps_herm = parsed,
            "eps_psd" => tol.eps_psd = parsed,
            "eps_unitary" => tol.eps_unitary = parsed,
            "eps_prob" => tol.eps_prob = parsed,
            "eps_group" => tol.eps_group = parsed,
            other => return Err(CliError::io(format!("unknown tolerance key '{other}'"))),
        }
    }
    tol.validate().map_err(CliError::from)?;
    Ok(tol)
}

fn read_set(path: &Path) -> Result<SymmetricSet, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("cannot read {}: {e}", path.display())))?;
    let desc: SetDescription = serde_json::from_str(&text)
        .map_err(|e| CliError::io(format!("cannot parse {}: {e}", path.display())))?;
    desc.to_set().map_err(CliError::from)
}

/// Round every number in a JSON tree to 12 significant digits so artifacts
/// are diff-stable across platforms.
fn round_numbers(value: &mut Value) {
    match value {
        Value::Number(n) => {
            if let Some(f) = n.as_f64() {
                if n.as_i64().is_none() && n.as_u64().is_none() {
                    let rounded: f64 = sig12(f).parse().unwrap_or(f);
                    if let Some(num) = serde_json::Number::from_f64(rounded) {
                        *value = Value::Number(num);
                    }
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_numbers),
        Value::Object(map) => map.values_mut().for_each(round_numbers),
        _ => {}
    }
}

struct ArtifactWriter {
    dir: PathBuf,
    artifacts: Vec<Value>,
}

impl ArtifactWriter {
    fn new(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir)
            .map_err(|e| CliError::io(format!("cannot create {}: {e}", dir.display())))?;
        Ok(ArtifactWriter {
            dir: dir.to_path_buf(),
            artifacts: Vec::new(),
        })
    }

    fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let path = self.dir.join(name);
        fs::write(&path, bytes)
            .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))?;
        let digest = Sha256::digest(bytes);
        self.artifacts.push(json!({
            "file": name,
            "sha256": format!("{digest:x}"),
            "bytes": bytes.len(),
        }));
        Ok(())
    }

    fn write_json<T: Serialize>(&mut self, name: &str, payload: &T) -> Result<(), CliError> {
        let mut value = serde_json::to_value(payload)?;
        round_numbers(&mut value);
        let mut text = serde_json::to_string_pretty(&value)?;
        text.push('\n');
        self.write_bytes(name, text.as_bytes())
    }

    fn finish(self, command: &str, parameters: Value) -> Result<(), CliError> {
        let manifest = json!({
            "command": command,
            "tool_version": env!("CARGO_PKG_VERSION"),
            "parameters": parameters,
            "artifacts": self.artifacts,
        });
        let path = self.dir.join("manifest.json");
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        fs::write(&path, text)
            .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))?;
        Ok(())
    }
}

fn tol_value(tol: &Tolerances) -> Value {
    json!({
        "eps_norm": tol.eps_norm,
        "eps_herm": tol.eps_herm,
        "eps_psd": tol.eps_psd,
        "eps_unitary": tol.eps_unitary,
        "eps_prob": tol.eps_prob,
        "eps_group": tol.eps_group,
    })
}

fn cmd_design(common: &CommonArgs) -> Result<(), CliError> {
    let tol = parse_tolerances(&common.tol)?;
    let set = read_set(&common.input)?;
    let (mc, mc_report) = povm::mc_povm_symmetric(&set, &tol);
    let (me, me_report) = povm::me_povm(&set);
    let mc_check = povm::validate_povm(&mc, &tol)?;
    let me_check = povm::validate_povm(&me, &tol)?;

    let mut writer = ArtifactWriter::new(&common.output_dir)?;
    writer.write_json("povm_mc.json", &PovmDescription::from_povm(&mc))?;
    writer.write_json("povm_me.json", &PovmDescription::from_povm(&me))?;
    let uniform = set.is_uniform(&tol);
    writer.write_json(
        "design_report.json",
        &json!({
            "max_confidence": {
                "confidence_per_outcome": mc_report.confidence_per_outcome,
                "inconclusive_probability": mc_report.inconclusive_probability,
                "validation": { "pass": mc_check.pass, "completeness_deviation": mc_check.completeness_deviation },
            },
            "min_error": {
                "confidence_per_outcome": me_report.confidence_per_outcome,
                "inconclusive_probability": me_report.inconclusive_probability,
                "validation": { "pass": me_check.pass, "completeness_deviation": me_check.completeness_deviation },
            },
            "uniform_magnitudes": uniform,
            "note": if uniform { "MC = ME, no inconclusive element" } else { "MC uses an inconclusive element" },
        }),
    )?;
    writer.finish(
        "design",
        json!({ "input": common.input.display().to_string(), "tolerances": tol_value(&tol) }),
    )?;
    if !mc_check.pass || !me_check.pass {
        return Err(CliError::validation("designed POVM failed validation"));
    }
    println!(
        "design: confidence {} inconclusive {}",
        sig12(mc_report.confidence_per_outcome[0]),
        sig12(mc_report.inconclusive_probability)
    );
    Ok(())
}

fn plan_summary(plan: &smc::SmcPlan) -> Value {
    json!({
        "order": plan.order,
        "stages": plan.stages.iter().map(|s| json!({
            "index": s.index,
            "dim": s.dim,
            "multiplicity": s.multiplicity,
            "confidence": s.confidence,
            "failure_probability": s.failure_probability,
        })).collect::<Vec<_>>(),
        "termination": format!("{:?}", plan.termination),
        "p_correct_total": plan.p_correct_total,
        "p_inconclusive_total": plan.p_inconclusive_total,
        "p_error_total": plan.p_error_total,
    })
}

fn cmd_plan(common: &CommonArgs) -> Result<(), CliError> {
    let tol = parse_tolerances(&common.tol)?;
    let set = read_set(&common.input)?;
    let plan = smc::plan(&set, &tol)?;
    println!("stage  dim  mult  confidence       failure_prob");
    for s in &plan.stages {
        println!(
            "{:<5}  {:<3}  {:<4}  {:<15}  {}",
            s.index,
            s.dim,
            s.multiplicity,
            sig12(s.confidence),
            sig12(s.failure_probability)
        );
    }
    println!(
        "totals: correct {} inconclusive {} error {} ({:?})",
        sig12(plan.p_correct_total),
        sig12(plan.p_inconclusive_total),
        sig12(plan.p_error_total),
        plan.termination
    );
    let mut writer = ArtifactWriter::new(&common.output_dir)?;
    writer.write_json("plan.json", &plan_summary(&plan))?;
    writer.finish(
        "plan",
        json!({ "input": common.input.display().to_string(), "tolerances": tol_value(&tol) }),
    )?;
    Ok(())
}

fn cmd_simulate(common: &CommonArgs, seed: u64, trials: u64) -> Result<(), CliError> {
    let tol = parse_tolerances(&common.tol)?;
    let set = read_set(&common.input)?;
    let plan = smc::plan(&set, &tol)?;
    let summary = montecarlo::simulate(&plan, &SeedConfig { seed, trials })?;
    let report = montecarlo::consistency_report(&summary, &plan);
    for check in &report.checks {
        println!(
            "{:<22} analytic {} empirical {} z {:+.3}{}",
            check.name,
            sig12(check.analytic),
            sig12(check.empirical),
            check.z_score,
            if check.pass { "" } else { "  FAIL" }
        );
    }
    let mut writer = ArtifactWriter::new(&common.output_dir)?;
    writer.write_json(
        "simulation.json",
        &json!({ "summary": summary, "consistency": report }),
    )?;
    writer.finish(
        "simulate",
        json!({
            "input": common.input.display().to_string(),
            "seed": seed,
            "trials": trials,
            "tolerances": tol_value(&tol),
        }),
    )?;
    if !report.pass {
        return Err(CliError::validation(
            "empirical statistics inconsistent with the plan",
        ));
    }
    Ok(())
}

fn parse_axis(spec: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::io(format!("grid axis '{spec}' is not MIN:MAX:COUNT")));
    }
    let min: f64 = parts[0]
        .parse()
        .map_err(|_| CliError::io(format!("bad grid bound '{}'", parts[0])))?;
    let max: f64 = parts[1]
        .parse()
        .map_err(|_| CliError::io(format!("bad grid bound '{}'", parts[1])))?;
    let count: usize = parts[2]
        .parse()
        .map_err(|_| CliError::io(format!("bad grid count '{}'", parts[2])))?;
    if count == 0 || max < min {
        return Err(CliError::io(format!("degenerate grid axis '{spec}'")));
    }
    if count == 1 {
        return Ok(vec![min]);
    }
    let step = (max - min) / (count - 1) as f64;
    Ok((0..count).map(|i| min + step * i as f64).collect())
}

pub fn parse_grid(spec: &str) -> Result<Vec<(f64, f64)>, CliError> {
    let (a, b) = spec
        .split_once(',')
        .ok_or_else(|| CliError::io(format!("grid '{spec}' needs two comma-separated axes")))?;
    let xs = parse_axis(a)?;
    let ys = parse_axis(b)?;
    let mut points = Vec::with_capacity(xs.len() * ys.len());
    for &x in &xs {
        for &y in &ys {
            points.push((x, y));
        }
    }
    Ok(points)
}

fn cmd_sweep(
    output_dir: &Path,
    grid: &str,
    format: OutputFormat,
    tol_overrides: &[String],
) -> Result<(), CliError> {
    let tol = parse_tolerances(tol_overrides)?;
    let points = parse_grid(grid)?;
    let result = smc::sweep_qutrit(&points, &tol);
    let mut writer = ArtifactWriter::new(output_dir)?;
    match format {
        OutputFormat::Csv => {
            writer.write_bytes("sweep.csv", smc::sweep_csv(&result.rows).as_bytes())?
        }
        OutputFormat::Json => writer.write_json("sweep.json", &result.rows)?,
    }
    writer.finish(
        "sweep",
        json!({
            "grid": grid,
            "points": points.len(),
            "rows": result.rows.len(),
            "skipped": result.skipped.len(),
            "tolerances": tol_value(&tol),
        }),
    )?;
    println!(
        "sweep: {} rows, {} infeasible points skipped",
        result.rows.len(),
        result.skipped.len()
    );
    Ok(())
}

fn cmd_compile_optics(common: &CommonArgs) -> Result<(), CliError> {
    let tol = parse_tolerances(&common.tol)?;
    let set = read_set(&common.input)?;
    let circuit = optics::build_circuit(&set, &tol)?;
    let angles = optics::compile_angles(&set, &tol).ok();
    let mut table = Vec::new();
    for j in 0..4 {
        let dist = optics::simulate_network(&circuit, j)?;
        table.push(json!({
            "input": j,
            "stage1": dist.stage1,
            "stage2": dist.stage2,
            "inconclusive": dist.inconclusive,
            "total": dist.total(),
        }));
    }
    let mut writer = ArtifactWriter::new(&common.output_dir)?;
    writer.write_json("circuit.json", &circuit)?;
    if let Some(angles) = &angles {
        writer.write_json("angles.json", angles)?;
    }
    writer.write_json("distributions.json", &table)?;
    writer.finish(
        "compile-optics",
        json!({
            "input": common.input.display().to_string(),
            "tolerances": tol_value(&tol),
            "degenerate_beta0_convention": angles.is_none(),
        }),
    )?;
    println!(
        "compile-optics: {} elements, {} detectors",
        circuit.elements.len(),
        circuit.detectors.len()
    );
    Ok(())
}

fn cmd_validate(input: &Path, tol_overrides: &[String]) -> Result<(), CliError> {
    let tol = parse_tolerances(tol_overrides)?;
    let text = fs::read_to_string(input)
        .map_err(|e| CliError::io(format!("cannot read {}: {e}", input.display())))?;
    if let Ok(desc) = serde_json::from_str::<PovmDescription>(&text) {
        let povm = desc.to_povm()?;
        let check = povm::validate_povm(&povm, &tol)?;
        println!(
            "povm: completeness deviation {}, {} PSD violations",
            sig12(check.completeness_deviation),
            check.psd_violations.len()
        );
        if !check.pass {
            return Err(CliError::validation("POVM failed validation"));
        }
        return Ok(());
    }
    if let Ok(circuit) = serde_json::from_str::<optics::Circuit>(&text) {
        for j in 0..4 {
            let dist = optics::simulate_network(&circuit, j)?;
            let total = dist.total();
            if (total - 1.0).abs() > tol.eps_prob {
                return Err(CliError::validation(format!(
                    "circuit is lossy for input {j}: detector total {total}"
                )));
            }
        }
        println!("circuit: detector totals unit for all inputs");
        return Ok(());
    }
    Err(CliError::io(format!(
        "{} is neither a POVM nor a circuit document",
        input.display()
    )))
}

/// Dispatch a parsed command; returns the process exit code.
pub fn execute(cli: &Cli) -> i32 {
    let outcome = match &cli.command {
        Command::Design { common } => cmd_design(common),
        Command::Plan { common } => cmd_plan(common),
        Command::Simulate {
            common,
            seed,
            trials,
        } => cmd_simulate(common, *seed, *trials),
        Command::Sweep {
            output_dir,
            grid,
            format,
            tol,
        } => cmd_sweep(output_dir, grid, *format, tol),
        Command::CompileOptics { common } => cmd_compile_optics(common),
        Command::Validate { input, tol } => cmd_validate(input, tol),
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}
