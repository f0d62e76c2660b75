use rayon::prelude::*;

use super::config::{DetectorShape, ExperimentConfig};
use super::table::Table;
use crate::asymptotics::{detect_log_regime, fit_log, last_decade_growth, DivergenceReport, SweepRow, WindowSweep};
use crate::distributions::{nonarrival_curve, point_distribution, QuantumClock};
use crate::error::{Error, Kind, Result};
use crate::packet::Detector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Fig1,
    Fig2,
    Asymptote,
    Sweep,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Fig1 => "fig1",
            Command::Fig2 => "fig2",
            Command::Asymptote => "asymptote",
            Command::Sweep => "sweep",
        }
    }
}

/// A finished table plus the human-readable findings that also go into its
/// header.
#[derive(Debug, Clone)]
pub struct CommandOutput {
    pub table: Table,
    pub report: Vec<String>,
}

impl CommandOutput {
    fn new(command: Command, cfg: &ExperimentConfig, columns: &[&str]) -> Self {
        let mut table = Table::new(columns);
        table.comment(format!("toa-lab {} (toa-core {})", command.name(), env!("CARGO_PKG_VERSION")));
        table.comment("resolved config:");
        table.comment(cfg.resolved().trim_end().to_string());
        Self { table, report: vec![] }
    }

    fn note(&mut self, line: String) {
        self.report.push(line);
    }

    /// The CSV with report lines placed after the config echo.
    pub fn csv(&self) -> String {
        let mut table = self.table.clone();
        if !self.report.is_empty() {
            table.comment("report:");
            table.comments.extend(self.report.iter().cloned());
        }
        table.to_csv()
    }
}

pub fn run(command: Command, cfg: &ExperimentConfig) -> Result<CommandOutput> {
    cfg.tolerance()?;
    match command {
        Command::Fig1 => cmd_fig1(cfg),
        Command::Fig2 => cmd_fig2(cfg),
        Command::Asymptote => cmd_asymptote(cfg),
        Command::Sweep => cmd_sweep(cfg),
    }
}

fn point_x(cfg: &ExperimentConfig, what: &str) -> Result<f64> {
    match cfg.detector()? {
        Detector::Point { x } => Ok(x),
        Detector::Interval { .. } => Err(Error::Config(format!("{what} needs detector = \"point\""))),
    }
}

fn time_column(cfg: &ExperimentConfig, stem: &str) -> String {
    match cfg.time_label() {
        "seconds" => format!("{stem}_seconds"),
        _ => format!("{stem}_dimensionless"),
    }
}

fn windows_in(cfg: &ExperimentConfig) -> Result<Vec<f64>> {
    cfg.windows()?.iter().map(|&w| cfg.time_in(w)).collect()
}

/// K, F, SC and Π_QC for each T on a time grid.
pub fn cmd_fig1(cfg: &ExperimentConfig) -> Result<CommandOutput> {
    let spec = cfg.packet_spec()?;
    let x_d = point_x(cfg, "fig1")?;
    let tol = cfg.tolerance()?;
    let grid = cfg.time_grid()?;
    let times = grid.iter().map(|&t| cfg.time_in(t)).collect::<Result<Vec<_>>>()?;
    let windows = windows_in(cfg)?;
    let order = [Kind::SemiClassical, Kind::Flux, Kind::Kijowski];

    let t_col = time_column(cfg, "t");
    let qc_cols: Vec<String> = cfg.windows()?.iter().map(|w| format!("Pi_QC_T={w}")).collect();
    let mut columns = vec![t_col.as_str(), "Pi_SC", "Pi_F", "Pi_K"];
    columns.extend(qc_cols.iter().map(String::as_str));
    let mut out = CommandOutput::new(Command::Fig1, cfg, &columns);

    let curves = order
        .par_iter()
        .map(|&k| {
            let dist = point_distribution(k, &spec, x_d)?;
            times.iter().map(|&t| cfg.rate_out(dist.density(t)?)).collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let clock = QuantumClock::new(&spec, Detector::point(x_d)?, cfg.qc_window);
    let dens = clock.denominators(&windows)?;
    let rho = times.par_iter().map(|&t| clock.rho(t)).collect::<Result<Vec<_>>>()?;
    let mut qc: Vec<Vec<Option<f64>>> = vec![];
    for (&w, &n) in windows.iter().zip(&dens) {
        let col = times
            .iter()
            .zip(&rho)
            .map(|(&t, &r)| {
                if !clock.contains(t, w) {
                    return Ok(None);
                }
                clock.density_with_denominator(t, w, n)?;
                Ok(Some(cfg.rate_out(r / n)?))
            })
            .collect::<Result<Vec<_>>>()?;
        qc.push(col);
    }

    for (i, &t) in grid.iter().enumerate() {
        let mut row = vec![Some(t), Some(curves[0][i]), Some(curves[1][i]), Some(curves[2][i])];
        row.extend(qc.iter().map(|c| c[i]));
        out.table.push(row);
    }

    let mut peak_value: f64 = 0.0;
    for (k, c) in order.iter().zip(&curves) {
        let (i, v) = c.iter().enumerate().fold((0, f64::NEG_INFINITY), |b, (i, &v)| if v > b.1 { (i, v) } else { b });
        peak_value = peak_value.max(v);
        out.note(format!("peak {k}: t = {:.6e} {}, density = {v:.6e}", grid[i], cfg.time_label()));
    }
    for (a, b) in [(0, 1), (0, 2), (1, 2)] {
        let d = curves[a].iter().zip(&curves[b]).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        out.note(format!("sup |{} - {}| / peak = {:.6e}", order[a], order[b], d / peak_value));
    }
    let ordered = qc.windows(2).all(|pair| {
        pair[0].iter().zip(&pair[1]).all(|(small, large)| match (small, large) {
            (Some(s), Some(l)) => *l <= s * (1.0 + tol),
            _ => true,
        })
    });
    out.note(format!("Pi_QC nonincreasing in T at every grid time: {ordered}"));
    out.note(format!("N_QC(T): {}", dens.iter().map(|n| format!("{n:.6e}")).collect::<Vec<_>>().join(", ")));
    Ok(out)
}

/// Non-arrival probabilities vs cutoff T, with a T → 0⁺ row first.
pub fn cmd_fig2(cfg: &ExperimentConfig) -> Result<CommandOutput> {
    let spec = cfg.packet_spec()?;
    if cfg.detector != DetectorShape::Interval {
        return Err(Error::Config("fig2 needs detector = \"interval\" with delta_l".into()));
    }
    let region = cfg.detector()?;
    let x_d = region.center();
    let windows = windows_in(cfg)?;
    let t_col = time_column(cfg, "T");
    let mut out = CommandOutput::new(Command::Fig2, cfg, &[t_col.as_str(), "P_na_QC", "P_na_K", "P_na_F", "P_na_SC"]);

    let clock = QuantumClock::new(&spec, region, cfg.qc_window);
    let dens = clock.denominators(&windows)?;
    // N_QC(T)/T → ρ_D(0) as T → 0 for either window placement
    let mut qc = vec![1.0 - region.region_density(&spec, 0.0)?];
    qc.extend(windows.iter().zip(&dens).map(|(w, n)| 1.0 - n / w));

    let cutoffs: Vec<f64> = std::iter::once(0.0).chain(windows.iter().copied()).collect();
    let kfsc = Kind::KFSC
        .par_iter()
        .map(|&k| nonarrival_curve(point_distribution(k, &spec, x_d)?.as_ref(), &cutoffs))
        .collect::<Result<Vec<_>>>()?;

    let t_out: Vec<f64> = std::iter::once(0.0).chain(cfg.windows()?.iter().copied()).collect();
    for i in 0..t_out.len() {
        out.table.push(vec![Some(t_out[i]), Some(qc[i]), Some(kfsc[0][i]), Some(kfsc[1][i]), Some(kfsc[2][i])]);
    }
    for (k, c) in Kind::KFSC.iter().zip(&kfsc) {
        let mono = c.windows(2).all(|w| w[1] <= w[0]);
        out.note(format!("P_na_{k} nonincreasing: {mono}; last value {:.6e}", c[c.len() - 1]));
    }
    let (min_i, min_v) = qc.iter().enumerate().fold((0, f64::INFINITY), |b, (i, &v)| if v < b.1 { (i, v) } else { b });
    out.note(format!("P_na_QC minimum {min_v:.6e} at T = {}; last value {:.6e}", t_out[min_i], qc[qc.len() - 1]));
    Ok(out)
}

/// Table and findings for a measured N_QC(T); also the injection point for
/// synthetic denominators.
pub fn asymptote_report(
    cfg: &ExperimentConfig,
    windows: &[f64],
    denominators: &[f64],
    predicted_slope: f64,
) -> Result<CommandOutput> {
    if windows.len() != denominators.len() {
        return Err(Error::Config("windows and denominators differ in length".into()));
    }
    if let Some((w, n)) = windows.iter().zip(denominators).find(|(_, n)| !(**n > 0.0)) {
        return Err(Error::degenerate(Kind::QuantumClock, format!("N_QC(T = {w}) = {n:e}")));
    }
    let rows = windows
        .iter()
        .zip(denominators)
        .map(|(&w, &n)| SweepRow { window: w, qc_denominator: n, p_na_qc: None, p_na_kfsc: None })
        .collect();
    let sweep = WindowSweep::new(rows)?;
    let fit = match detect_log_regime(&sweep) {
        Some(range) => Some(fit_log(&sweep, range)?),
        None => None,
    };
    let report = DivergenceReport { last_decade_growth: last_decade_growth(&sweep), sweep, predicted_slope, fit };

    let mut out = CommandOutput::new(Command::Asymptote, cfg, &["T_dimensionless", "N_QC", "N_fit", "local_slope"]);
    let rows = report.sweep.rows();
    for (i, r) in rows.iter().enumerate() {
        let local = rows.get(i + 1).map(|n| (n.qc_denominator - r.qc_denominator) / (n.window / r.window).ln());
        out.table.push(vec![Some(r.window), Some(r.qc_denominator), report.fit.map(|f| f.predict(r.window)), local]);
    }
    out.note(format!("predicted_slope = {:.11e}", report.predicted_slope));
    match report.fit {
        Some(f) => {
            out.note(format!("fitted_slope = {:.11e}", f.slope));
            out.note(format!("intercept = {:.11e}", f.intercept));
            out.note(format!("residual_rms = {:.11e}", f.residual_rms));
            out.note(format!("fit_range = [{:.6e}, {:.6e}] ({} points)", f.fit_range.0, f.fit_range.1, f.points));
        }
        None => out.note("fitted_slope = none (no logarithmic regime detected)".into()),
    }
    if let Some(dev) = report.relative_deviation() {
        out.note(format!("relative_deviation = {dev:.6e}"));
    }
    if let Some(g) = report.last_decade_growth {
        out.note(format!("last_decade_growth = {g:.6e}"));
    }
    out.note(match (report.bounded(), report.fit) {
        (true, _) => "status: bounded denominator — no divergence".into(),
        (false, Some(_)) => "status: logarithmic divergence".into(),
        (false, None) => "status: undetermined (extend T_values)".into(),
    });
    Ok(out)
}

/// N_QC(T) over ≥ 3 decades of T with a ln T fit.
pub fn cmd_asymptote(cfg: &ExperimentConfig) -> Result<CommandOutput> {
    let spec = cfg.packet_spec()?;
    let windows = windows_in(cfg)?;
    if windows[windows.len() - 1] < 1e3 * windows[0] {
        return Err(Error::Config("asymptote needs T_values spanning at least 3 decades".into()));
    }
    let clock = QuantumClock::new(&spec, cfg.detector()?, cfg.qc_window);
    let dens = clock.denominators(&windows)?;
    asymptote_report(cfg, &windows, &dens, clock.predicted_log_slope())
}

/// P_QC(arrival ∈ [t1, t2]) for each T.
pub fn cmd_sweep(cfg: &ExperimentConfig) -> Result<CommandOutput> {
    let spec = cfg.packet_spec()?;
    let tol = cfg.tolerance()?;
    let (t1, t2) = match (cfg.window_t1, cfg.window_t2) {
        (Some(a), Some(b)) if a < b => (a, b),
        _ => return Err(Error::Config("sweep needs window_t1 < window_t2".into())),
    };
    let t_values = cfg.windows()?;
    if t2 >= t_values[0] / 2.0 {
        return Err(Error::Config(format!("window_t2 = {t2} must be below min(T)/2 = {}", t_values[0] / 2.0)));
    }
    let windows = windows_in(cfg)?;
    let clock = QuantumClock::new(&spec, cfg.detector()?, cfg.qc_window);
    let probs = clock.arrival_probabilities(cfg.time_in(t1)?, cfg.time_in(t2)?, &windows)?;
    let t_col = time_column(cfg, "T");
    let mut out = CommandOutput::new(Command::Sweep, cfg, &[t_col.as_str(), "P_QC_arrival"]);
    for (&w, &p) in t_values.iter().zip(&probs) {
        out.table.push(vec![Some(w), Some(p)]);
    }
    let strict = probs.windows(2).all(|w| w[1] < w[0] * (1.0 - tol));
    out.note(format!("P_QC(arrival in [{t1}, {t2}]) strictly decreasing in T: {strict}"));
    out.note(format!(
        "first/last: {:.6e} / {:.6e}",
        probs[0],
        probs[probs.len() - 1]
    ));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotics::log_spaced;
    use crate::distributions::QcWindow;

    fn preset(name: &str) -> ExperimentConfig {
        ExperimentConfig::preset(name).unwrap()
    }

    fn col(out: &CommandOutput, name: &str) -> Vec<f64> {
        out.table.column(name).unwrap().into_iter().map(|v| v.unwrap_or(f64::NAN)).collect()
    }

    /// max_t |Π_QC(T) − Π_F| / max Π_F for the largest T.
    fn qc_gap(cfg: &ExperimentConfig) -> f64 {
        let out = cmd_fig1(cfg).unwrap();
        let flux = col(&out, "Pi_F");
        let last = out.table.columns.last().unwrap().clone();
        let qc = col(&out, &last);
        let peak = flux.iter().copied().fold(0.0, f64::max);
        flux.iter().zip(&qc).map(|(f, q)| (f - q).abs()).fold(0.0, f64::max) / peak
    }

    #[test]
    fn fast_packet_brings_clock_closer() {
        let slow = preset("fig1");
        let mut fast = slow.clone();
        fast.velocity_m_s = None;
        fast.p0 = Some(7.0);
        fast.t_max = Some(0.006);
        fast.t_min = Some(1e-5);
        let (g_slow, g_fast) = (qc_gap(&slow), qc_gap(&fast));
        assert!(g_slow > 0.3, "{g_slow}");
        assert!(g_fast < 0.1 * g_slow, "{g_fast} vs {g_slow}");
    }

    #[test]
    fn qc_columns_ordered_by_window() {
        let out = cmd_fig1(&preset("fig1")).unwrap();
        let cols: Vec<Vec<f64>> = out.table.columns[4..].iter().map(|c| col(&out, c)).collect();
        for pair in cols.windows(2) {
            assert!(pair[0].iter().zip(&pair[1]).all(|(a, b)| b <= a));
        }
    }

    #[test]
    fn synthetic_denominator_gives_exact_slope() {
        let windows = log_spaced(1.0, 1e6, 5);
        let dens: Vec<f64> = windows.iter().map(|t| 3.0 * t.ln() + 1.0).collect();
        let out = asymptote_report(&preset("asymptote"), &windows, &dens, 3.0).unwrap();
        let fitted = out.report.iter().find_map(|l| l.strip_prefix("fitted_slope = ")).unwrap();
        assert!((fitted.parse::<f64>().unwrap() - 3.0).abs() < 1e-10);
        assert!(out.report.iter().any(|l| l == "status: logarithmic divergence"));
    }

    #[test]
    fn odd_preset_reports_bounded_denominator() {
        let out = cmd_asymptote(&preset("asymptote-odd")).unwrap();
        assert!(out.report.iter().any(|l| l == "status: bounded denominator — no divergence"), "{:?}", out.report);
    }

    #[test]
    fn asymptote_needs_three_decades() {
        let mut cfg = preset("asymptote");
        cfg.t_values = vec![1.0, 10.0, 100.0];
        assert!(matches!(cmd_asymptote(&cfg), Err(Error::Config(_))));
    }

    #[test]
    fn sweep_window_must_fit_inside_every_t() {
        let mut cfg = preset("sweep");
        cfg.window_t2 = Some(0.03);
        assert!(matches!(cmd_sweep(&cfg), Err(Error::Config(_))));
    }

    #[test]
    fn sweep_preset_strictly_decreasing() {
        let p = col(&cmd_sweep(&preset("sweep")).unwrap(), "P_QC_arrival");
        assert!(p.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn saturated_denominator_gives_constant_probability() {
        // |φ̃(0)|² ≈ e^{-98}: no tail, and the passage is over by t ≈ 3
        let mut cfg = preset("fig2");
        cfg.detector = DetectorShape::Point;
        cfg.window_t1 = Some(1.0);
        cfg.window_t2 = Some(2.0);
        cfg.t_values = vec![10.0, 20.0, 100.0, 1e3, 1e5];
        let p = col(&cmd_sweep(&cfg).unwrap(), "P_QC_arrival");
        assert!(p.iter().all(|v| (v - p[0]).abs() < 1e-9), "{p:?}");
    }

    #[test]
    fn doubling_window_in_log_regime() {
        let mut cfg = preset("asymptote");
        cfg.qc_window = QcWindow::Forward;
        cfg.window_t1 = Some(1.0);
        cfg.window_t2 = Some(5.0);
        let t = 1e12;
        cfg.t_values = vec![t, 2.0 * t];
        let p = col(&cmd_sweep(&cfg).unwrap(), "P_QC_arrival");
        let ratio = p[1] / p[0];
        let expected = t.ln() / (2.0 * t).ln();
        assert!((ratio - expected).abs() / expected < 0.01, "{ratio} vs {expected}");
        assert!(ratio < 1.0);
    }

    #[test]
    fn fig2_limits() {
        let out = cmd_fig2(&preset("fig2")).unwrap();
        for name in ["P_na_K", "P_na_F", "P_na_SC"] {
            let c = col(&out, name);
            assert!((c[0] - 1.0).abs() < 1e-12, "{name} at T = 0");
            assert!(c.windows(2).all(|w| w[1] <= w[0]), "{name}");
            assert!(c[c.len() - 1] < 1e-9);
        }
        let qc = col(&out, "P_na_QC");
        assert!(qc[qc.len() - 1] > 0.99);
    }

    #[test]
    fn fig2_requires_interval_and_fig1_point() {
        let mut cfg = preset("fig2");
        cfg.detector = DetectorShape::Point;
        assert!(matches!(cmd_fig2(&cfg), Err(Error::Config(_))));
        let mut cfg = preset("fig1");
        cfg.detector = DetectorShape::Interval;
        cfg.delta_l = Some(1.0);
        assert!(matches!(cmd_fig1(&cfg), Err(Error::Config(_))));
    }

    #[test]
    fn byte_identical_reruns() {
        for (cmd, name) in [(Command::Fig2, "fig2"), (Command::Sweep, "sweep"), (Command::Asymptote, "asymptote-odd")] {
            assert_eq!(run(cmd, &preset(name)).unwrap().csv(), run(cmd, &preset(name)).unwrap().csv());
        }
    }
}
