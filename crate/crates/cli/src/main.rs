use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use urn_cli::config::{self, parse_grid, parse_probability, ConfigError, Experiment, RawConfig};
use urn_cli::report::write_samples;
use urn_cli::run::{run, RunError, RunOutcome};

/// Run one Polya-Friedman urn experiment and write a JSON report.
///
/// Flags override values from the config file. Exit status: 0 all verdicts
/// pass, 1 a verdict failed, 2 bad configuration, 3 a theorem precondition
/// does not hold for the parameters.
#[derive(Debug, Parser)]
#[command(name = "urn", version)]
struct Cli {
    /// TOML config file
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    experiment: Option<Experiment>,
    #[arg(long, allow_negative_numbers = true)]
    a: Option<i64>,
    #[arg(long, allow_negative_numbers = true)]
    b: Option<i64>,
    #[arg(long, allow_negative_numbers = true)]
    c: Option<i64>,
    /// Friedman-rule probability, decimal or rational (`1/4`)
    #[arg(long)]
    p: Option<String>,
    #[arg(long = "y1-0", allow_negative_numbers = true)]
    y1_0: Option<i64>,
    #[arg(long = "y2-0", allow_negative_numbers = true)]
    y2_0: Option<i64>,
    #[arg(long)]
    horizon: Option<u64>,
    #[arg(long)]
    replicates: Option<u64>,
    #[arg(long)]
    master_seed: Option<u64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    t_points: Option<usize>,
    /// Comma-separated steps, e.g. `100,200,400`
    #[arg(long)]
    n_grid: Option<String>,
    /// Worker threads [default: $URN_WORKERS or the number of cores]
    #[arg(long)]
    workers: Option<usize>,
    /// Report path; stdout when absent
    #[arg(long = "output")]
    output_path: Option<String>,
    /// Delimited samples file for `clt` and `cf`
    #[arg(long = "samples")]
    samples_path: Option<String>,
}

impl Cli {
    fn overrides(&self) -> Result<RawConfig, ConfigError> {
        Ok(RawConfig {
            a: self.a,
            b: self.b,
            c: self.c,
            p: self.p.as_deref().map(parse_probability).transpose()?,
            y1_0: self.y1_0,
            y2_0: self.y2_0,
            experiment: self.experiment,
            horizon: self.horizon,
            replicates: self.replicates,
            master_seed: self.master_seed,
            epsilon: self.epsilon,
            t_max: self.t_max,
            t_points: self.t_points,
            n_grid: self.n_grid.as_deref().map(parse_grid).transpose()?,
            workers: self.workers,
            output_path: self.output_path.clone(),
            samples_path: self.samples_path.clone(),
        })
    }
}

fn write_to(path: &str, f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<(), RunError> {
    let io = |source| RunError::Io { path: path.to_string(), source };
    let mut out = BufWriter::new(File::create(path).map_err(io)?);
    f(&mut out).and_then(|_| out.flush()).map_err(io)
}

fn emit(outcome: &RunOutcome) -> Result<(), RunError> {
    let report = &outcome.report;
    let json = report.to_json();
    match &report.config.output_path {
        Some(path) => write_to(path, |w| writeln!(w, "{json}"))?,
        None => {
            let mut out = std::io::stdout().lock();
            if let Err(e) = writeln!(out, "{json}") {
                if e.kind() != std::io::ErrorKind::BrokenPipe {
                    return Err(RunError::Io { path: "<stdout>".into(), source: e });
                }
            }
        }
    }
    if let (Some(path), Some(samples)) = (&report.config.samples_path, &outcome.samples) {
        write_to(path, |w| write_samples(w, report, samples))?;
    }
    for v in report.verdicts.iter().filter(|v| !v.acceptable()) {
        eprintln!("FAIL {}: observed {} target {} tolerance {}", v.id, v.observed, v.target, v.tolerance);
    }
    Ok(())
}

fn main_inner(cli: Cli) -> Result<i32, RunError> {
    let file = match &cli.config {
        Some(path) => config::parse_file(path)?,
        None => RawConfig::default(),
    };
    let config = file.merge(cli.overrides()?).finish()?;
    let outcome = run(&config)?;
    emit(&outcome)?;
    Ok(outcome.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
