//! Reproducible runs: config in, CSV/SVG out.

mod commands;
mod config;
mod svg;
mod table;

pub use commands::{asymptote_report, cmd_asymptote, cmd_fig1, cmd_fig2, cmd_sweep, run, Command, CommandOutput};
pub use config::{preset_names, DetectorShape, ExperimentConfig, PacketShape, UnitsMode, FINEST_TOL};
pub use svg::render_svg;
pub use table::{format_number, Table};

use crate::error::{Error, Result};

/// Runs a command and writes its CSV (stdout when no path is set) and SVG.
pub fn execute(command: Command, cfg: &ExperimentConfig) -> Result<CommandOutput> {
    cfg.validate_outputs()?;
    let out = run(command, cfg)?;
    let csv = out.csv();
    match &cfg.csv {
        Some(path) => write(path, &csv)?,
        None => print!("{csv}"),
    }
    if let Some(path) = &cfg.svg {
        write(path, &render_svg(&csv)?)?;
    }
    Ok(out)
}

fn write(path: &str, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io { path: path.to_string(), source: e })
}
