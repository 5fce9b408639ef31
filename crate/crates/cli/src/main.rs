use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qbattery_core::harness::{self, oracle_check, run_sweep, RunSettings, SweepOptions};
use qbattery_core::io::{emit, write_text, Destination, Format};
use qbattery_core::liouville::FockBasis;
use qbattery_core::{build_preset, supermode_decomposition, Branch, EngineKind, Error, RunConfig, SweepResult};
use serde_json::json;

#[derive(Parser)]
#[command(name = "qbattery", version, about = "Charging dynamics of a driven open quantum battery")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one configuration from the vacuum and write the trajectory.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the engine named in the config file.
        #[arg(long)]
        engine: Option<EngineKind>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "csv")]
        format: Format,
    },
    /// Sweep the Lamb shift over a preset scenario.
    Sweep {
        #[arg(long)]
        preset: String,
        /// Both branches are swept when omitted.
        #[arg(long)]
        branch: Option<Branch>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        lamb_grid: Option<Vec<f64>>,
        /// Keep the drive at the unshifted normal-mode frequency.
        #[arg(long)]
        fixed_drive: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "meanfield")]
        engine: EngineKind,
        #[arg(long, default_value = "csv")]
        format: Format,
        #[arg(long)]
        t_final: Option<f64>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        fock_cutoff_a: Option<usize>,
        #[arg(long)]
        fock_cutoff_b: Option<usize>,
    },
    /// Print the normal-mode frequencies and supermode mixing as JSON.
    Eigen {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run both engines on one configuration and report their deviation.
    OracleCheck {
        #[arg(long)]
        config: PathBuf,
    },
}

fn destination(out: Option<PathBuf>) -> Destination {
    out.map_or(Destination::Stdout, Destination::File)
}

fn print_json(value: &serde_json::Value) -> Result<(), Error> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
    text.push('\n');
    write_text(&text, &Destination::Stdout)
}

#[allow(clippy::too_many_arguments)]
fn sweep(
    preset: &str,
    branch: Option<Branch>,
    lamb_grid: Option<Vec<f64>>,
    fixed_drive: bool,
    engine: EngineKind,
    t_final: Option<f64>,
    dt: Option<f64>,
    cutoffs: (Option<usize>, Option<usize>),
) -> Result<SweepResult, Error> {
    let mut base = build_preset::<f64>(preset)?;
    if let Some(grid) = lamb_grid {
        if let Some(bad) = grid.iter().find(|x| !x.is_finite()) {
            return Err(Error::Parse(format!("non-finite Lamb shift {bad} in grid")));
        }
        base = base.with_lamb_grid(grid);
    }
    let mut settings = RunSettings::default().with_engine(engine);
    settings = settings.with_grid(t_final.unwrap_or(settings.t_final), dt.unwrap_or(settings.dt));
    if cutoffs.0.is_some() || cutoffs.1.is_some() {
        let basis = FockBasis::new(
            cutoffs.0.unwrap_or(settings.basis.cutoff_a()),
            cutoffs.1.unwrap_or(settings.basis.cutoff_b()),
        )?;
        settings = settings.with_basis(basis);
    }
    let options = SweepOptions { settings, fixed_drive };
    let branches = branch.map_or(Branch::ALL.to_vec(), |b| vec![b]);
    let mut result = SweepResult::default();
    for b in branches {
        result.extend(run_sweep(&base.clone().with_branch(b), &options));
    }
    Ok(result)
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::Simulate { config, engine, out, format } => {
            let cfg = RunConfig::load(&config)?;
            let params = cfg.params::<f64>()?;
            let mut settings = RunSettings::from_config(&cfg)?;
            if let Some(engine) = engine {
                settings = settings.with_engine(engine);
            }
            let sim = harness::simulate(&params, &settings)?;
            emit(&sim, format, &destination(out))
        }
        Command::Sweep {
            preset,
            branch,
            lamb_grid,
            fixed_drive,
            out,
            engine,
            format,
            t_final,
            dt,
            fock_cutoff_a,
            fock_cutoff_b,
        } => {
            let result =
                sweep(&preset, branch, lamb_grid, fixed_drive, engine, t_final, dt, (fock_cutoff_a, fock_cutoff_b))?;
            emit(&result, format, &destination(out))?;
            for f in &result.failures {
                eprintln!("warning: sweep point delta_l = {} ({}) failed: {}", f.delta_l, f.branch, f.error);
            }
            match result.failures.into_iter().next() {
                Some(f) => Err(f.error),
                None => Ok(()),
            }
        }
        Command::Eigen { config } => {
            let params = RunConfig::load(&config)?.params::<f64>()?;
            let s = supermode_decomposition(&params)?;
            print_json(&json!({
                "lambda_plus": s.lambda_plus,
                "lambda_minus": s.lambda_minus,
                "sin_alpha": s.sin_alpha,
                "cos_alpha": s.cos_alpha,
                "drive_plus": s.drive_plus,
                "drive_minus": s.drive_minus,
            }))
        }
        Command::OracleCheck { config } => {
            let cfg = RunConfig::load(&config)?;
            let params = cfg.params::<f64>()?;
            let settings = RunSettings::from_config(&cfg)?.with_engine(EngineKind::Liouville);
            let check = oracle_check(&params, &settings)?;
            print_json(&json!({
                "max_moment_deviation": check.max_dev_a.max(check.max_dev_b),
                "max_dev_a": check.max_dev_a,
                "max_dev_b": check.max_dev_b,
                "max_trace_err": check.max_trace_err,
                "max_trunc_tail": check.max_trunc_tail,
                "max_hermiticity_err": check.max_hermiticity_err,
                "min_eigenvalue": check.min_eigenvalue,
            }))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 2 } else { 1 })
        }
    }
}
