use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::distributions::QcWindow;
use crate::error::{Error, Result};
use crate::packet::{Detector, GaussianTerm, PacketSpec};
use crate::units::UnitSystem;

/// Quadrature accuracy the engines are built for; `tol` cannot ask for more.
pub const FINEST_TOL: f64 = 1e-11;

const PRESETS: &[(&str, &str)] = &[
    ("fig1", include_str!("../../presets/fig1.toml")),
    ("fig2", include_str!("../../presets/fig2.toml")),
    ("sweep", include_str!("../../presets/sweep.toml")),
    ("asymptote", include_str!("../../presets/asymptote.toml")),
    ("asymptote-odd", include_str!("../../presets/asymptote-odd.toml")),
];

pub fn preset_names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|p| p.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnitsMode {
    /// Lengths in σ0, times in mσ0²/ħ.
    #[default]
    Dimensionless,
    /// Packet from mass, σ0, velocity and flight distance; times in seconds.
    Si,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PacketShape {
    #[default]
    Gaussian,
    /// Two opposite-sign Gaussians at rest at ±odd_offset.
    Odd,
    /// Explicit term arrays.
    Superposition,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DetectorShape {
    #[default]
    Point,
    Interval,
}

/// Flat key/value experiment description. Detector positions and ΔL are
/// always in σ0 units; times follow `units`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub units: UnitsMode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mass_kg: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma0_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub velocity_m_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flight_distance_m: Option<f64>,

    pub packet: PacketShape,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub width: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub odd_offset: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub centers: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub widths: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub momenta: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub weights_re: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub weights_im: Vec<f64>,

    pub detector: DetectorShape,
    pub detector_x: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_l: Option<f64>,
    pub qc_window: QcWindow,

    #[serde(rename = "T_values")]
    pub t_values: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window_t1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window_t2: Option<f64>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub svg: Option<String>,
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| config_err(e.to_string()))
    }

    pub fn preset(name: &str) -> Option<Self> {
        PRESETS.iter().find(|p| p.0 == name).map(|p| Self::parse(p.1).expect("bundled preset parses"))
    }

    /// A bundled preset name or a path to a TOML file.
    pub fn load(source: &str) -> Result<Self> {
        if let Some(cfg) = Self::preset(source) {
            return Ok(cfg);
        }
        let path = Path::new(source);
        if !path.exists() {
            let names: Vec<_> = preset_names().collect();
            return Err(config_err(format!("{source} is neither a file nor a preset ({})", names.join(", "))));
        }
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io { path: source.to_string(), source: e })?;
        Self::parse(&text)
    }

    /// The config as it will be echoed into output headers. Output paths are
    /// left out so the same experiment gives the same bytes wherever it goes.
    pub fn resolved(&self) -> String {
        let echo = Self { csv: None, svg: None, ..self.clone() };
        toml::to_string(&echo).expect("config serializes")
    }

    pub fn unit_system(&self) -> Result<Option<UnitSystem>> {
        match self.units {
            UnitsMode::Dimensionless => Ok(None),
            UnitsMode::Si => {
                let mass = self.mass_kg.ok_or_else(|| config_err("units = \"si\" needs mass_kg"))?;
                let sigma = self.sigma0_m.ok_or_else(|| config_err("units = \"si\" needs sigma0_m"))?;
                UnitSystem::new(mass, sigma).map(Some).map_err(|e| config_err(e.to_string()))
            }
        }
    }

    /// Converts a time in config units to dimensionless.
    pub fn time_in(&self, t: f64) -> Result<f64> {
        Ok(match self.unit_system()? {
            Some(u) => u.time_to_dimensionless(t),
            None => t,
        })
    }

    pub fn time_out(&self, t: f64) -> Result<f64> {
        Ok(match self.unit_system()? {
            Some(u) => u.time_to_si(t),
            None => t,
        })
    }

    /// Converts a density per dimensionless time to config units.
    pub fn rate_out(&self, rate: f64) -> Result<f64> {
        Ok(match self.unit_system()? {
            Some(u) => u.rate_to_si(rate),
            None => rate,
        })
    }

    pub fn time_label(&self) -> &'static str {
        match self.units {
            UnitsMode::Si => "seconds",
            UnitsMode::Dimensionless => "dimensionless",
        }
    }

    pub fn packet_spec(&self) -> Result<PacketSpec> {
        let width = self.width.unwrap_or(1.0);
        let spec = match self.packet {
            PacketShape::Gaussian => {
                let (x0, p0) = match self.units {
                    UnitsMode::Dimensionless => (
                        self.x0.ok_or_else(|| config_err("gaussian packet needs x0"))?,
                        self.p0.ok_or_else(|| config_err("gaussian packet needs p0"))?,
                    ),
                    UnitsMode::Si => {
                        let u = self.unit_system()?.expect("si units");
                        let x0 = match (self.flight_distance_m, self.x0) {
                            (Some(d), None) => -u.length_to_dimensionless(d),
                            (None, Some(x0)) => x0,
                            _ => return Err(config_err("give exactly one of flight_distance_m and x0")),
                        };
                        let p0 = match (self.velocity_m_s, self.p0) {
                            (Some(v), None) => u.momentum_from_velocity(v),
                            (None, Some(p0)) => p0,
                            _ => return Err(config_err("give exactly one of velocity_m_s and p0")),
                        };
                        (x0, p0)
                    }
                };
                PacketSpec::gaussian(x0, width, p0)
            }
            PacketShape::Odd => {
                PacketSpec::odd_pair(self.odd_offset.ok_or_else(|| config_err("odd packet needs odd_offset"))?, width)
            }
            PacketShape::Superposition => {
                let n = self.centers.len();
                let im = if self.weights_im.is_empty() { vec![0.0; n] } else { self.weights_im.clone() };
                if n == 0 || [self.widths.len(), self.momenta.len(), self.weights_re.len(), im.len()].iter().any(|&l| l != n) {
                    return Err(config_err(
                        "superposition needs equally long centers, widths, momenta, weights_re (and optional weights_im)",
                    ));
                }
                let terms = (0..n)
                    .map(|i| GaussianTerm::new(Complex64::new(self.weights_re[i], im[i]), self.centers[i], self.widths[i], self.momenta[i]))
                    .collect();
                PacketSpec::new(terms)
            }
        };
        spec.map_err(|e| config_err(e.to_string()))
    }

    /// The configured detector; an interval is centred on `detector_x`.
    pub fn detector(&self) -> Result<Detector> {
        let d = match self.detector {
            DetectorShape::Point => Detector::point(self.detector_x),
            DetectorShape::Interval => {
                let l = self.delta_l.ok_or_else(|| config_err("interval detector needs delta_l"))?;
                if !(l > 0.0) {
                    return Err(config_err(format!("delta_l must be positive, got {l}")));
                }
                Detector::interval(self.detector_x - 0.5 * l, self.detector_x + 0.5 * l)
            }
        };
        d.map_err(|e| config_err(e.to_string()))
    }

    /// T values in config units, validated positive and strictly increasing.
    pub fn windows(&self) -> Result<&[f64]> {
        let t = &self.t_values;
        if t.is_empty() {
            return Err(config_err("T_values is empty"));
        }
        if t.iter().any(|&w| !(w.is_finite() && w > 0.0)) {
            return Err(config_err("T_values must be positive and finite"));
        }
        if t.windows(2).any(|w| w[1] <= w[0]) {
            return Err(config_err("T_values must be strictly increasing"));
        }
        Ok(t)
    }

    /// Uniform time grid in config units.
    pub fn time_grid(&self) -> Result<Vec<f64>> {
        let (lo, hi, n) = match (self.t_min, self.t_max, self.t_n) {
            (Some(a), Some(b), Some(n)) => (a, b, n),
            _ => return Err(config_err("time grid needs t_min, t_max and t_n")),
        };
        if !(lo.is_finite() && hi.is_finite() && lo < hi && n >= 2) {
            return Err(config_err(format!("bad time grid: t_min = {lo}, t_max = {hi}, t_n = {n}")));
        }
        Ok((0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect())
    }

    pub fn tolerance(&self) -> Result<f64> {
        let tol = self.tol.unwrap_or(1e-10);
        if !(FINEST_TOL..1.0).contains(&tol) {
            return Err(config_err(format!("tol must lie in [{FINEST_TOL:e}, 1), got {tol}")));
        }
        Ok(tol)
    }

    pub fn validate_outputs(&self) -> Result<()> {
        for path in [&self.csv, &self.svg].into_iter().flatten() {
            let parent = Path::new(path).parent().filter(|p| !p.as_os_str().is_empty());
            if parent.is_some_and(|p| !p.is_dir()) {
                return Err(config_err(format!("output directory for {path} does not exist")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_parse_and_build() {
        for name in preset_names() {
            let cfg = ExperimentConfig::preset(name).unwrap();
            cfg.packet_spec().unwrap();
            cfg.detector().unwrap();
            cfg.windows().unwrap();
            cfg.tolerance().unwrap();
        }
    }

    #[test]
    fn fig1_packet_in_natural_units() {
        let spec = ExperimentConfig::preset("fig1").unwrap().packet_spec().unwrap();
        let t = spec.terms()[0];
        assert!((t.center + 33_333.333_333).abs() < 1e-3);
        assert!((t.momentum - 0.946_59).abs() < 1e-4);
    }

    #[test]
    fn resolved_round_trips() {
        let cfg = ExperimentConfig::preset("fig2").unwrap();
        assert_eq!(ExperimentConfig::parse(&cfg.resolved()).unwrap(), cfg);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(ExperimentConfig::parse("bogus = 1"), Err(Error::Config(_))));
        let mut cfg = ExperimentConfig::preset("fig2").unwrap();
        cfg.t_values = vec![2.0, 1.0];
        assert!(cfg.windows().is_err());
        cfg.delta_l = None;
        assert!(cfg.detector().is_err());
        cfg.tol = Some(1e-14);
        assert!(cfg.tolerance().is_err());
        let mut si = ExperimentConfig::preset("fig1").unwrap();
        si.p0 = Some(7.0);
        assert!(si.packet_spec().is_err());
        assert!(ExperimentConfig::load("/nonexistent/config.toml").is_err());
    }
}
