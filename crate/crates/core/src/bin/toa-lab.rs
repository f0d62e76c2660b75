use std::process::ExitCode;

use clap::Parser;
use toa_core::cli::{execute, Command, DetectorShape, ExperimentConfig};

/// Quantum time-of-arrival distributions: CSV/SVG tables and asymptotic checks.
#[derive(Parser, Debug)]
#[command(name = "toa-lab", version)]
struct Args {
    command: Command,

    /// Config file, or a bundled preset: fig1, fig2, sweep, asymptote, asymptote-odd.
    #[arg(long)]
    config: String,

    /// Write the CSV here instead of stdout.
    #[arg(long)]
    csv: Option<String>,

    /// Also render the CSV as SVG.
    #[arg(long)]
    svg: Option<String>,

    /// Window lengths T (config time units), comma separated.
    #[arg(long = "T", value_delimiter = ',', num_args = 1..)]
    t_values: Option<Vec<f64>>,

    /// Interval detector length in units of sigma0; switches to an interval detector.
    #[arg(long)]
    delta_l: Option<f64>,

    /// Comparison tolerance used by the report checks.
    #[arg(long)]
    tol: Option<f64>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let mut cfg = match ExperimentConfig::load(&args.config) {
        Ok(cfg) => cfg,
        Err(e) => return fail(e),
    };
    if let Some(t) = args.t_values {
        cfg.t_values = t;
    }
    if let Some(l) = args.delta_l {
        cfg.detector = DetectorShape::Interval;
        cfg.delta_l = Some(l);
    }
    if args.tol.is_some() {
        cfg.tol = args.tol;
    }
    if args.csv.is_some() {
        cfg.csv = args.csv;
    }
    if args.svg.is_some() {
        cfg.svg = args.svg;
    }
    match execute(args.command, &cfg) {
        Ok(out) => {
            for line in &out.report {
                eprintln!("{line}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => fail(e),
    }
}

fn fail(e: toa_core::Error) -> ExitCode {
    eprintln!("toa-lab: {e}");
    ExitCode::from(e.exit_code() as u8)
}
