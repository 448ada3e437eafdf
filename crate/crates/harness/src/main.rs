use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hcns_core::grid::Grid1D;
use hcns_core::{FluidParams, RunStatus, SolverKind};
use hcns_harness::config::{execute, RunConfig};
use hcns_harness::experiments::{
    apriori_family, boundedness_proxy, eps_sweep, tau_sweep, SweepBase,
};
use hcns_harness::initial::{compatibility_report, make_profile, IcConfig, IcFamily};
use hcns_harness::io::{write_json, write_run, Table, ENERGY_FILE};
use hcns_harness::mms::mms_convergence;
use hcns_harness::report::{
    energy_plot, eps_plot, mms_plot, report_dir, tau_plot, BoundedResult, MmsStudies, Summary,
    BOUNDED_FILE, EPS_FILE, MMS_FILE, TAU_FILE,
};
use hcns_harness::{HarnessError, Verdict};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "hcns",
    version,
    about = "Relaxed compressible Navier-Stokes solver harness"
)]
struct Cli {
    /// JSON run configuration (strict: unknown keys are rejected).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides `output_dir` from the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Suppress progress and table output.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation and write snapshot and energy CSVs.
    Run,
    /// Grid-refinement study against a manufactured solution.
    Mms(MmsArgs),
    /// Relaxation-limit sweep over tau against the parabolic reference.
    TauSweep(TauArgs),
    /// Boundary-regularization sweep over epsilon.
    EpsSweep(EpsArgs),
    /// Long-time boundedness proxy and amplitude-family energy check.
    Bounded(BoundedArgs),
    /// Compatibility and well-preparedness of the configured initial data.
    CheckIc,
    /// Re-verify saved summaries and regenerate plots.
    Report {
        /// Directory holding the artifacts (defaults to --out).
        dir: Option<PathBuf>,
    },
}

#[derive(Args)]
struct MmsArgs {
    #[arg(long, default_value_t = 65)]
    base_n: usize,
    #[arg(long, default_value_t = 4)]
    levels: usize,
    #[arg(long, default_value_t = 0.5)]
    t_end: f64,
    /// Restrict to one solver; both are studied by default.
    #[arg(long, value_parser = parse_solver)]
    solver: Option<SolverKind>,
}

#[derive(Args)]
struct TauArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [1e-1, 3e-2, 1e-2, 3e-3, 1e-3])]
    taus: Vec<f64>,
    /// Number of comparison instants in (0, t_end].
    #[arg(long, default_value_t = 200)]
    samples: usize,
    /// Skip the unprepared-data initial-layer runs.
    #[arg(long)]
    no_layer: bool,
}

#[derive(Args)]
struct EpsArgs {
    /// Positive values, strictly decreasing; the eps = 0 reference is added.
    #[arg(long, value_delimiter = ',', default_values_t = [0.2, 0.1, 0.05, 0.025])]
    epsilons: Vec<f64>,
    #[arg(long, default_value_t = 200)]
    samples: usize,
}

#[derive(Args)]
struct BoundedArgs {
    /// Amplitudes for the energy-ratio family; empty skips the family.
    #[arg(long, value_delimiter = ',', default_values_t = [0.005, 0.01, 0.02])]
    amplitudes: Vec<f64>,
}

fn parse_solver(s: &str) -> Result<SolverKind, String> {
    match s {
        "relaxed" => Ok(SolverKind::Relaxed),
        "parabolic" => Ok(SolverKind::Parabolic),
        _ => Err(format!("unknown solver `{s}` (relaxed|parabolic)")),
    }
}

struct Ctx {
    config: Option<RunConfig>,
    out: PathBuf,
    quiet: bool,
}

impl Ctx {
    fn say(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            println!("{}", msg.as_ref());
        }
    }

    fn require_config(&self) -> Result<&RunConfig, HarnessError> {
        self.config
            .as_ref()
            .ok_or_else(|| HarnessError::Config("this command needs --config".into()))
    }

    fn params(&self) -> FluidParams {
        self.config
            .as_ref()
            .map_or_else(FluidParams::default, |c| c.params)
    }

    /// Sweep settings from the config, or the stated defaults without one.
    fn base(&self, n: usize, t_end: f64, samples: usize) -> SweepBase {
        let mut base = match &self.config {
            Some(c) => SweepBase {
                cfl: c.cfl,
                ..SweepBase::new(c.params, c.n, c.t_end, c.ic.clone())
            },
            None => SweepBase::new(
                FluidParams::default(),
                n,
                t_end,
                IcConfig::new(IcFamily::WellPreparedSine, 0.01),
            ),
        };
        base.samples = samples;
        base
    }

    fn outdir(&self) -> Result<&Path, HarnessError> {
        std::fs::create_dir_all(&self.out)?;
        Ok(&self.out)
    }
}

fn worst(verdicts: impl IntoIterator<Item = Verdict>) -> i32 {
    verdicts
        .into_iter()
        .map(Verdict::exit_code)
        .max()
        .unwrap_or(0)
}

fn cmd_run(ctx: &Ctx) -> Result<i32, HarnessError> {
    let cfg = ctx.require_config()?;
    let art = execute(cfg)?;
    let dir = ctx.outdir()?;
    write_run(dir, &art)?;
    if let Some(plot) = energy_plot(&Table::read(&dir.join(ENERGY_FILE))?) {
        std::fs::write(dir.join("energy.svg"), plot.render())?;
    }
    ctx.say(format!(
        "{} steps to t = {} in {:.3} s -> {}",
        art.steps,
        art.snapshots.last().map_or(0.0, |s| s.t),
        art.wall_time,
        dir.display()
    ));
    Ok(match &art.status {
        RunStatus::Completed => 0,
        RunStatus::Aborted(reason) => {
            eprintln!("aborted: {reason}");
            3
        }
    })
}

fn cmd_mms(ctx: &Ctx, a: &MmsArgs) -> Result<i32, HarnessError> {
    let p = ctx.params();
    let cfl = ctx.config.as_ref().map_or(0.4, |c| c.cfl);
    let solvers = match a.solver {
        Some(s) => vec![s],
        None => vec![SolverKind::Relaxed, SolverKind::Parabolic],
    };
    let studies = solvers
        .into_iter()
        .map(|s| mms_convergence(s, a.base_n, a.levels, &p, a.t_end, cfl))
        .collect::<Result<Vec<_>, _>>()?;
    for s in &studies {
        ctx.say(format!("{:?}", s.solver).to_lowercase());
        for r in &s.rows {
            ctx.say(format!(
                "  n = {:5}  dx = {:.4e}  error = {:.6e}",
                r.n, r.dx, r.error
            ));
        }
        ctx.say(format!("  order {:.4}: {:?}", s.order, s.verdict));
    }
    let dir = ctx.outdir()?;
    std::fs::write(dir.join("mms.svg"), mms_plot(&studies).render())?;
    let config = json!({
        "params": p, "base_n": a.base_n, "levels": a.levels, "t_end": a.t_end, "cfl": cfl
    });
    let verdicts: Vec<Verdict> = studies.iter().map(|s| s.verdict).collect();
    Summary::new("mms", config, MmsStudies { studies }).write(&dir.join(MMS_FILE))?;
    Ok(worst(verdicts))
}

fn cmd_tau(ctx: &Ctx, a: &TauArgs) -> Result<i32, HarnessError> {
    let base = ctx.base(401, 2.0, a.samples);
    let sweep = tau_sweep(&a.taus, &base, !a.no_layer)?;
    for r in &sweep.rows {
        ctx.say(format!(
            "tau = {:.1e}  distance = {:.6e}  residual = {:.6e}",
            r.tau, r.distance, r.residual
        ));
    }
    for r in &sweep.layer {
        ctx.say(format!(
            "tau = {:.1e}  layer collapse at {} tau",
            r.tau,
            r.collapse_in_tau
                .map_or("never".into(), |k| format!("{k:.3}"))
        ));
    }
    ctx.say(format!(
        "slope {:?}  verdict {:?}  layer {:?}",
        sweep.slope, sweep.verdict, sweep.layer_verdict
    ));
    let dir = ctx.outdir()?;
    std::fs::write(dir.join("tau_sweep.svg"), tau_plot(&sweep).render())?;
    let aborted = sweep.rows.iter().any(|r| r.aborted.is_some());
    let code = worst([sweep.verdict, sweep.layer_verdict]);
    let config = json!({"base": base, "taus": a.taus, "layer": !a.no_layer});
    Summary::new("tau-sweep", config, sweep).write(&dir.join(TAU_FILE))?;
    Ok(if aborted { 3 } else { code })
}

fn cmd_eps(ctx: &Ctx, a: &EpsArgs) -> Result<i32, HarnessError> {
    let base = ctx.base(401, 2.0, a.samples);
    let mut eps = a.epsilons.clone();
    if !eps.contains(&0.0) {
        eps.push(0.0);
    }
    let sweep = eps_sweep(&eps, &base)?;
    for r in &sweep.rows {
        ctx.say(format!(
            "eps = {:<6}  distance = {:.6e}  mirrored = {:.6e}",
            r.epsilon, r.distance, r.distance_mirrored
        ));
    }
    ctx.say(format!(
        "slope {:?}  verdict {:?}",
        sweep.slope, sweep.verdict
    ));
    let dir = ctx.outdir()?;
    std::fs::write(dir.join("eps_sweep.svg"), eps_plot(&sweep).render())?;
    let aborted = sweep.rows.iter().any(|r| r.aborted.is_some());
    let code = sweep.verdict.exit_code();
    let config = json!({"base": base, "epsilons": eps});
    Summary::new("eps-sweep", config, sweep).write(&dir.join(EPS_FILE))?;
    Ok(if aborted { 3 } else { code })
}

fn cmd_bounded(ctx: &Ctx, a: &BoundedArgs) -> Result<i32, HarnessError> {
    let base = ctx.base(201, 50.0, 1);
    let boundedness = boundedness_proxy(&base)?;
    ctx.say(format!(
        "H2 sup/initial = {:.4e}/{:.4e}  tail fraction = {:.3e}: {:?}",
        boundedness.sup_h2, boundedness.initial_h2, boundedness.tail_fraction, boundedness.verdict
    ));
    if let Some(r) = &boundedness.reason {
        ctx.say(format!("  {r}"));
    }
    let apriori = if a.amplitudes.is_empty() {
        None
    } else {
        let fam = apriori_family(&a.amplitudes, &base)?;
        ctx.say(format!("energy ratio family: {:?}", fam.check));
        Some(fam)
    };
    let result = BoundedResult {
        boundedness,
        apriori,
    };
    let code = worst(result.verdicts());
    let config = json!({"base": base, "amplitudes": a.amplitudes});
    Summary::new("bounded", config, result).write(&ctx.outdir()?.join(BOUNDED_FILE))?;
    Ok(code)
}

fn cmd_check_ic(ctx: &Ctx) -> Result<i32, HarnessError> {
    let cfg = ctx.require_config()?;
    let grid = Grid1D::new(cfg.n)?;
    let profile = make_profile(&cfg.ic, &grid, &cfg.params)?;
    let report = compatibility_report(&profile, &cfg.params, &grid)?;
    ctx.say(serde_json::to_string_pretty(&report)?);
    write_json(
        &ctx.outdir()?.join("check_ic.json"),
        &json!({"config": cfg, "report": report}),
    )?;
    Ok(0)
}

fn cmd_report(ctx: &Ctx, dir: Option<&Path>) -> Result<i32, HarnessError> {
    let dir = dir.unwrap_or(&ctx.out);
    let (checks, plots) = report_dir(dir)?;
    let mut code = 0;
    for c in &checks {
        let status = if c.consistent() {
            "consistent"
        } else {
            "MISMATCH"
        };
        ctx.say(format!(
            "{} ({}): stored {:?}, recomputed {:?}: {status}",
            c.kind,
            c.file.display(),
            c.stored,
            c.recomputed
        ));
        code = code.max(if c.consistent() {
            worst(c.recomputed.clone())
        } else {
            1
        });
    }
    for p in &plots {
        ctx.say(format!("wrote {}", p.display()));
    }
    Ok(code)
}

fn dispatch(cli: &Cli) -> Result<i32, HarnessError> {
    let config = cli.config.as_deref().map(RunConfig::load).transpose()?;
    let out = cli
        .out
        .clone()
        .or_else(|| config.as_ref().map(|c| c.output_dir.clone()))
        .unwrap_or_else(|| PathBuf::from("out"));
    let ctx = Ctx {
        config,
        out,
        quiet: cli.quiet,
    };
    match &cli.command {
        Command::Run => cmd_run(&ctx),
        Command::Mms(a) => cmd_mms(&ctx, a),
        Command::TauSweep(a) => cmd_tau(&ctx, a),
        Command::EpsSweep(a) => cmd_eps(&ctx, a),
        Command::Bounded(a) => cmd_bounded(&ctx, a),
        Command::CheckIc => cmd_check_ic(&ctx),
        Command::Report { dir } => cmd_report(&ctx, dir.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = dispatch(&cli).unwrap_or_else(|e| {
        eprintln!("error: {e}");
        e.exit_code()
    });
    ExitCode::from(code as u8)
}
