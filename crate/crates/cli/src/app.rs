//! Command-line front end: argument parsing and the three subcommands.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use contact_core::diagnostics::hamiltonian_drift;
use contact_core::models::ModelKind;
use contact_core::{integrate, Scheme, Trajectory};

use crate::checks::{format_table, run_checks, CheckOptions, Fault};
use crate::config::{parse_list, RunConfig, OUT_DIR_ENV};
use crate::csv::write_trajectory;
use crate::error::CliError;
use crate::svg::{line_plot, Series};
use crate::sweep::{run_sweep, to_csv, ParamAxis};

#[derive(Debug, Parser)]
#[command(name = "contact", version, about = "Contact Hamiltonian integrator and diagnostics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate one model and write its trajectory as CSV (and optionally SVG).
    Run(RunArgs),
    /// Run the built-in self-checks and print a pass/fail table.
    Check(CheckArgs),
    /// Sweep one or two parameters and write one CSV row per grid point.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
struct SetupArgs {
    /// Config file with [model], [initial], [integrator] and [output] sections.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Preset A-D or a model name such as DampedDoubleWell.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    omega: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    a: Option<f64>,
    #[arg(long = "omega1-sq", allow_hyphen_values = true)]
    omega1_sq: Option<f64>,
    #[arg(long = "omega2-sq", allow_hyphen_values = true)]
    omega2_sq: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    g: Option<f64>,
    /// Initial positions, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    q0: Option<String>,
    /// Initial momenta, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    p0: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    z0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    lambda0: Option<f64>,
    /// Time step. Without --steps or --t-end the horizon is kept.
    #[arg(long, allow_hyphen_values = true)]
    h: Option<f64>,
    #[arg(long, conflicts_with = "t_end")]
    steps: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    t_end: Option<f64>,
    #[arg(long)]
    record_every: Option<usize>,
    /// HybridLeapfrog or Rk4Reference.
    #[arg(long)]
    scheme: Option<String>,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    setup: SetupArgs,
    /// Directory for output files; overrides CONTACT_OUT_DIR.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// CSV file name (default run.csv).
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Also write an SVG plot of q(t).
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CheckArgs {
    /// Only run these checks (comma separated or repeated).
    #[arg(long, value_delimiter = ',')]
    only: Vec<String>,
    #[arg(long, hide = true)]
    inject_fault: Option<String>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    setup: SetupArgs,
    /// `name=v1,v2,...` or `name=start:stop:count`; give one or two.
    #[arg(long = "param", required = true)]
    params: Vec<String>,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn resolve(setup: &SetupArgs) -> Result<RunConfig, CliError> {
    let kind = match &setup.preset {
        Some(p) => p.parse::<ModelKind>()?,
        None => ModelKind::DampedHoLinear,
    };
    let mut cfg = RunConfig::preset(kind);
    if let Some(path) = &setup.config {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        cfg.apply_text(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    }
    for (key, value) in [
        ("omega", setup.omega),
        ("gamma", setup.gamma),
        ("a", setup.a),
        ("omega1_sq", setup.omega1_sq),
        ("omega2_sq", setup.omega2_sq),
        ("g", setup.g),
    ] {
        if let Some(v) = value {
            cfg.model.set(key, v)?;
        }
    }
    if let Some(q) = &setup.q0 {
        cfg.initial.q = parse_list("q0", q)?;
    }
    if let Some(p) = &setup.p0 {
        cfg.initial.p = parse_list("p0", p)?;
    }
    if let Some(z) = setup.z0 {
        cfg.initial.z = z;
    }
    if let Some(l) = setup.lambda0 {
        cfg.initial.lambda = l;
    }
    if let Some(h) = setup.h {
        cfg.set_param("h", h)?;
    }
    if let Some(n) = setup.steps {
        cfg.integ.n_steps = n;
    }
    if let Some(t) = setup.t_end {
        cfg.set_param("t_end", t)?;
    }
    if let Some(r) = setup.record_every {
        cfg.integ.record_every = r;
    }
    if let Some(s) = &setup.scheme {
        cfg.integ.scheme =
            Scheme::parse(s).ok_or_else(|| CliError::Config(format!("unknown scheme `{s}`")))?;
    }
    if cfg.integ.n_steps == 0 {
        cfg.integ.record_every = 1;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn write_csv(path: &Path, n: usize, traj: &Trajectory) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    write_trajectory(BufWriter::new(file), n, traj).map_err(|e| CliError::io(path, e))
}

fn write_svg(path: &Path, title: &str, traj: &Trajectory) -> Result<(), CliError> {
    let t: Vec<f64> = traj.times().collect();
    let n = traj.states.first().map_or(0, |s| s.dof());
    let qs: Vec<Vec<f64>> = (0..n).map(|i| traj.q(i)).collect();
    let series: Vec<Series> = qs
        .iter()
        .enumerate()
        .map(|(i, q)| Series { label: format!("q{}", i + 1), x: &t, y: q })
        .collect();
    fs::write(path, line_plot(title, "t", &series)).map_err(|e| CliError::io(path, e))
}

fn cmd_run(args: RunArgs, env_out_dir: Option<PathBuf>, out: &mut dyn Write) -> Result<(), CliError> {
    let mut cfg = resolve(&args.setup)?;
    if let Some(dir) = env_out_dir {
        cfg.outputs.dir = Some(dir);
    }
    if let Some(dir) = args.out_dir {
        cfg.outputs.dir = Some(dir);
    }
    if let Some(csv) = args.csv {
        cfg.outputs.csv = Some(csv);
    }
    if let Some(svg) = args.svg {
        cfg.outputs.svg = Some(svg);
    }
    let model = cfg.model.build()?;
    let n = cfg.model.kind.dof();
    let csv_path = cfg.outputs.csv_path("run.csv");

    let traj = match integrate(&model, &cfg.initial, &cfg.integ) {
        Ok(traj) => traj,
        Err(e) => {
            write_csv(&csv_path, n, &e.partial)?;
            return Err(CliError::Integration { step: e.step, source: e.source });
        }
    };
    write_csv(&csv_path, n, &traj)?;
    if let Some(svg) = cfg.outputs.svg_path() {
        write_svg(&svg, cfg.model.kind.name(), &traj)?;
    }

    let last = traj.last().expect("initial state recorded");
    let drift = hamiltonian_drift(&traj, f64::INFINITY)?;
    let w = |e| CliError::io("stdout", e);
    writeln!(out, "model      {}", cfg.model.kind).map_err(w)?;
    writeln!(out, "scheme     {}", cfg.integ.scheme.name()).map_err(w)?;
    writeln!(out, "steps      {} (h = {})", cfg.integ.n_steps, cfg.integ.h).map_err(w)?;
    writeln!(out, "records    {}", traj.len()).map_err(w)?;
    writeln!(out, "final t    {}", last.t).map_err(w)?;
    writeln!(out, "final q    {:?}", last.q).map_err(w)?;
    writeln!(out, "H drift    {:.3e} (relative)", drift.metric).map_err(w)?;
    writeln!(out, "csv        {}", csv_path.display()).map_err(w)?;
    Ok(())
}

fn cmd_check(args: CheckArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let opts = CheckOptions {
        only: args.only,
        fault: args.inject_fault.as_deref().map(str::parse::<Fault>).transpose()?,
    };
    let results = run_checks(&opts)?;
    out.write_all(format_table(&results).as_bytes())
        .map_err(|e| CliError::io("stdout", e))?;
    match results.iter().find(|r| !r.pass) {
        Some(r) => Err(CliError::Check(format!("{}: {}", r.name, r.detail))),
        None => Ok(()),
    }
}

fn cmd_sweep(args: SweepArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let base = resolve(&args.setup)?;
    let axes = args
        .params
        .iter()
        .map(|p| ParamAxis::parse(p))
        .collect::<Result<Vec<_>, _>>()?;
    let rows = run_sweep(&base, &axes)?;
    let names: Vec<String> = axes.iter().map(|a| a.name.clone()).collect();
    let csv = to_csv(&names, base.model.kind.dof(), &rows);
    match args.out {
        Some(path) => fs::write(&path, csv).map_err(|e| CliError::io(&path, e)),
        None => out.write_all(csv.as_bytes()).map_err(|e| CliError::io("stdout", e)),
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code: 0 success, 1 configuration or I/O error,
/// 2 integration failure, 3 failed check.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let env_out_dir = std::env::var_os(OUT_DIR_ENV).filter(|v| !v.is_empty()).map(PathBuf::from);
    let result = match cli.command {
        Command::Run(a) => cmd_run(a, env_out_dir, out),
        Command::Check(a) => cmd_check(a, out),
        Command::Sweep(a) => cmd_sweep(a, out),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
