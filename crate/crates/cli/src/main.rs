use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nclp_cli::{run, CliError, ExperimentConfig, Format, Report};

#[derive(Parser)]
#[command(name = "nclp", version, about = "Run noncommutative L^p experiments from a config file")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML or JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's `experiment`.
        #[arg(long)]
        experiment: Option<String>,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
        /// Repeat for more detail on stderr.
        #[arg(short, long, action = clap::ArgAction::Count)]
        verbose: u8,
    },
}

fn write_report(report: &Report, out: Option<&PathBuf>, format: Format) -> Result<(), CliError> {
    match out {
        Some(path) => {
            let file = File::create(path).map_err(|e| CliError::Io(path.clone(), e))?;
            let mut w = BufWriter::new(file);
            report.emit(&mut w, format)?;
            w.flush().map_err(|e| CliError::Io(path.clone(), e))
        }
        None => report.emit(&mut io::stdout().lock(), format),
    }
}

fn execute(
    config: PathBuf,
    experiment: Option<String>,
    out: Option<PathBuf>,
    format: Option<Format>,
) -> Result<Report, CliError> {
    let mut cfg = ExperimentConfig::load(&config)?;
    if let Some(name) = experiment {
        cfg.experiment = name;
    }
    let section = cfg.output.clone().unwrap_or(nclp_cli::config::OutputConfig { path: None, format: None });
    let out = out.or(section.path);
    let by_extension = out.as_ref().and_then(|p| p.extension()).and_then(|e| e.to_str()).and_then(|e| match e {
        "json" => Some(Format::Json),
        "csv" => Some(Format::Csv),
        _ => None,
    });
    let format = format.or(section.format).or(by_extension).unwrap_or(Format::Csv);
    log::info!("running `{}` with seed {}", cfg.experiment, cfg.seed);
    let report = run(&cfg)?;
    for row in report.rows.iter().filter(|r| !r.pass) {
        log::warn!("FAIL {} [{}]: measured {:e}, expected {:e}", row.case, row.inputs, row.measured, row.expected);
    }
    write_report(&report, out.as_ref(), format)?;
    Ok(report)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Command::Run { config, experiment, out, format, verbose } = cli.command;
    let level = match verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).format_timestamp(None).init();
    match execute(config, experiment, out, format) {
        Ok(report) => {
            log::info!(
                "{}: {}/{} rows passed in {:.3}s",
                report.experiment,
                report.rows.len() - report.failures(),
                report.rows.len(),
                report.wall_time_s
            );
            if report.passed {
                ExitCode::SUCCESS
            } else {
                eprintln!("{}: {} of {} assertions failed", report.experiment, report.failures(), report.rows.len());
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
