//! Batch front-end: cone scans, sphere oracles, flow runs, and
//! inequality audits with deterministic CSV/JSON artifacts.
//!
//! Exit codes: 0 all checks passed, 1 a verdict failed, 2 invalid
//! configuration or input, 3 flow breakdown.

mod json;
mod manifest;

use clap::{Args, Parser, Subcommand};
use hypaf::error::Error;
use hypaf::flow;
use hypaf::hypersurface::{self, GeodesicSphere};
use hypaf::symfunc::{ConeKind, ConeSpec, ScanConfig, ScanSummary, scan_cone, DEFAULT_EXTENT};
use manifest::{write_atomic, RunManifest};
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "hypaf",
    version,
    about = "Curvature-inequality toolkit for hypersurfaces in hyperbolic space"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Seeded Monte Carlo scan of the refined symmetric-function gap over
    /// a curvature cone.
    Symcheck(SymcheckArgs),
    /// Closed-form geodesic-sphere report: all quantities and all
    /// inequality gaps.
    Sphere(SphereArgs),
    /// Integrate the inverse curvature flow from a JSON config; emits a
    /// CSV trace and a JSON verdict block.
    Flow(FlowArgs),
    /// Audit every integral inequality for a surface file.
    Afcheck(AfcheckArgs),
}

#[derive(Args)]
struct SymcheckArgs {
    /// Number of principal curvatures (>= 5).
    #[arg(long)]
    m: usize,
    /// Samples to draw.
    #[arg(long, default_value_t = 1_000_000)]
    count: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// horoconvex | pairwise | gardingk | unitbox
    #[arg(long, default_value = "horoconvex")]
    cone: String,
    /// Garding index when --cone gardingk.
    #[arg(long, default_value_t = 2)]
    garding_k: usize,
    /// Radial sampling extent K.
    #[arg(long, default_value_t = DEFAULT_EXTENT)]
    extent: f64,
    /// Write the JSON summary here (plus a manifest sidecar).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SphereArgs {
    /// Ambient dimension (>= 5).
    #[arg(long)]
    n: usize,
    /// Geodesic radius.
    #[arg(long)]
    r: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FlowArgs {
    /// JSON flow configuration.
    #[arg(long)]
    config: PathBuf,
    /// Directory for trace, verdicts, config echo, and manifest.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct AfcheckArgs {
    /// Surface file (`n N` header, then `theta r` lines).
    #[arg(long)]
    surface: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    #[cfg(feature = "parallel")]
    if let Ok(threads) = std::env::var("HYPAF_THREADS") {
        if let Ok(threads) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build_global();
        }
    }
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Symcheck(args) => cmd_symcheck(args),
        Command::Sphere(args) => cmd_sphere(args),
        Command::Flow(args) => cmd_flow(args),
        Command::Afcheck(args) => cmd_afcheck(args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::FlowBreakdown { .. } => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

#[derive(Serialize)]
struct SymcheckReport {
    cone: String,
    extent: f64,
    seed: u64,
    #[serde(flatten)]
    summary: ScanSummary,
    /// For the nonpositive-gap cones: no violations. For the unit box:
    /// both strict signs observed.
    verdict: bool,
}

fn cmd_symcheck(args: SymcheckArgs) -> hypaf::Result<ExitCode> {
    let kind = match args.cone.as_str() {
        "horoconvex" => ConeKind::Horoconvex,
        "pairwise" => ConeKind::PairwiseProduct,
        "gardingk" => ConeKind::Garding(args.garding_k),
        "unitbox" => ConeKind::UnitBox,
        other => {
            return Err(Error::Domain(format!(
                "unknown cone `{other}` (horoconvex|pairwise|gardingk|unitbox)"
            )))
        }
    };
    let cfg = ScanConfig::new(ConeSpec::new(kind, args.extent)?, args.m, args.count, args.seed)?;
    let started = Instant::now();
    let summary = scan_cone(&cfg);
    let verdict = match kind {
        ConeKind::Horoconvex | ConeKind::PairwiseProduct => summary.violations == 0,
        ConeKind::UnitBox => summary.sign_change_found(cfg.violation_tol),
        ConeKind::Garding(_) => true,
    };
    let report = SymcheckReport {
        cone: args.cone.clone(),
        extent: args.extent,
        seed: args.seed,
        summary,
        verdict,
    };
    let text = json::to_json(&report);
    match &args.out {
        Some(path) => {
            let mut manifest = RunManifest::new(args.seed, serde_json::json!({
                "m": args.m, "count": args.count, "seed": args.seed,
                "cone": args.cone, "garding_k": args.garding_k, "extent": args.extent,
            }));
            write_atomic(path, text.as_bytes())?;
            manifest.record_output(path, text.as_bytes());
            manifest.wall_ms = started.elapsed().as_millis() as u64;
            write_manifest(path, &manifest)?;
            println!(
                "symcheck {}: violations = {}, max_gap = {:.3e}, verdict = {}",
                args.cone, report.summary.violations, report.summary.max_gap, verdict
            );
        }
        None => print!("{text}"),
    }
    Ok(if verdict { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_sphere(args: SphereArgs) -> hypaf::Result<ExitCode> {
    let report = GeodesicSphere::compute(args.n, args.r)?;
    let text = json::to_json(&report);
    match &args.out {
        Some(path) => {
            let started = Instant::now();
            let mut manifest = RunManifest::new(
                0,
                serde_json::json!({ "n": args.n, "r": args.r }),
            );
            write_atomic(path, text.as_bytes())?;
            manifest.record_output(path, text.as_bytes());
            manifest.wall_ms = started.elapsed().as_millis() as u64;
            write_manifest(path, &manifest)?;
            println!("sphere n = {}, r = {}: area = {:.6e}", args.n, args.r, report.area);
        }
        None => print!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct FlowReport<'a> {
    config: &'a flow::FlowConfig,
    verdicts: &'a flow::FlowVerdicts,
    #[serde(skip_serializing_if = "Option::is_none")]
    breakdown: &'a Option<flow::Breakdown>,
    rows: usize,
}

fn cmd_flow(args: FlowArgs) -> hypaf::Result<ExitCode> {
    let started = Instant::now();
    let raw = std::fs::read_to_string(&args.config)
        .map_err(|e| Error::Format(format!("cannot read {}: {e}", args.config.display())))?;
    let config: flow::FlowConfig = serde_json::from_str(&raw)
        .map_err(|e| Error::Format(format!("bad flow config: {e}")))?;
    std::fs::create_dir_all(&args.out_dir)?;

    let out = flow::run(&config)?;
    let verdicts = flow::evaluate(&out)?;

    let mut manifest = RunManifest::new(
        0,
        serde_json::to_value(&config).expect("config serializes"),
    );
    manifest.record_input(&args.config)?;

    let csv = out.trace.to_csv();
    let csv_path = args.out_dir.join("flow_trace.csv");
    write_atomic(&csv_path, csv.as_bytes())?;
    manifest.record_output(&csv_path, csv.as_bytes());

    let config_echo = json::to_json(&config);
    let config_path = args.out_dir.join("flow_config.json");
    write_atomic(&config_path, config_echo.as_bytes())?;
    manifest.record_output(&config_path, config_echo.as_bytes());

    let report = FlowReport {
        config: &config,
        verdicts: &verdicts,
        breakdown: &out.breakdown,
        rows: out.trace.rows.len(),
    };
    let verdict_text = json::to_json(&report);
    let verdict_path = args.out_dir.join("flow_verdicts.json");
    write_atomic(&verdict_path, verdict_text.as_bytes())?;
    manifest.record_output(&verdict_path, verdict_text.as_bytes());

    if out.breakdown.is_some() {
        // dump the last good state for post-mortems
        let state_path = args.out_dir.join("flow_last_state.surface");
        let mut buf = Vec::new();
        hypersurface::write_surface_to(out.final_state.surface(), &mut buf)?;
        write_atomic(&state_path, &buf)?;
        manifest.record_output(&state_path, &buf);
    }

    manifest.wall_ms = started.elapsed().as_millis() as u64;
    write_manifest(&args.out_dir.join("flow_run"), &manifest)?;

    println!(
        "flow n = {}: rows = {}, Q {:.10} -> {:.10} (bound {:.10}), passed = {}",
        config.n,
        out.trace.rows.len(),
        verdicts.q_initial,
        verdicts.q_final,
        verdicts.q_bound,
        verdicts.passed
    );
    if let Some(b) = &out.breakdown {
        eprintln!("flow breakdown at t = {}, node {}: {}", b.t, b.node, b.message);
        return Ok(ExitCode::from(3));
    }
    Ok(if verdicts.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

#[derive(Serialize)]
struct AfcheckReport {
    surface: String,
    n: usize,
    intervals: usize,
    horoconvexity_margin: f64,
    reports: Vec<hypersurface::InequalityReport>,
    all_nonnegative: bool,
}

fn cmd_afcheck(args: AfcheckArgs) -> hypaf::Result<ExitCode> {
    let started = Instant::now();
    let surface = hypersurface::read_surface(&args.surface)?;
    let margin = hypersurface::horoconvexity_margin(&surface)?;
    let reports = hypersurface::all_checks(&surface)?;
    let all_nonnegative = reports.iter().all(|r| r.gap >= -1e-8 * r.rhs.abs());
    let report = AfcheckReport {
        surface: args.surface.display().to_string(),
        n: surface.n(),
        intervals: surface.intervals(),
        horoconvexity_margin: margin,
        reports,
        all_nonnegative,
    };
    let text = json::to_json(&report);
    match &args.out {
        Some(path) => {
            let mut manifest = RunManifest::new(
                0,
                serde_json::json!({ "surface": args.surface.display().to_string() }),
            );
            manifest.record_input(&args.surface)?;
            write_atomic(path, text.as_bytes())?;
            manifest.record_output(path, text.as_bytes());
            manifest.wall_ms = started.elapsed().as_millis() as u64;
            write_manifest(path, &manifest)?;
            println!(
                "afcheck {}: margin = {:.6e}, all gaps nonnegative = {}",
                args.surface.display(),
                margin,
                all_nonnegative
            );
        }
        None => print!("{text}"),
    }
    Ok(if all_nonnegative {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn write_manifest(artifact: &Path, manifest: &RunManifest) -> hypaf::Result<()> {
    let path = artifact.with_extension("manifest.json");
    write_atomic(&path, json::to_json(manifest).as_bytes())?;
    Ok(())
}
