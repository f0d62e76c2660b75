use std::fmt;

use thiserror::Error;

/// Which distribution a normalization failure belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Kind {
    #[serde(rename = "K")]
    Kijowski,
    #[serde(rename = "F")]
    Flux,
    #[serde(rename = "SC")]
    SemiClassical,
    #[serde(rename = "QC")]
    QuantumClock,
}

impl Kind {
    pub const KFSC: [Kind; 3] = [Kind::Kijowski, Kind::Flux, Kind::SemiClassical];

    pub fn label(self) -> &'static str {
        match self {
            Kind::Kijowski => "K",
            Kind::Flux => "F",
            Kind::SemiClassical => "SC",
            Kind::QuantumClock => "QC",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate normalization for {kind}: {detail}")]
    DegenerateNormalization { kind: Kind, detail: String },

    #[error(
        "quadrature did not converge on [{a}, {b}]: worst panel [{worst_a}, {worst_b}] \
         with error estimate {estimate:e} after {evaluations} evaluations"
    )]
    NonConvergence {
        a: f64,
        b: f64,
        worst_a: f64,
        worst_b: f64,
        estimate: f64,
        evaluations: usize,
    },

    #[error("spectral grid aliasing: boundary amplitude ratio {ratio:e} exceeds {limit:e}; widen the grid")]
    Aliasing { ratio: f64, limit: f64 },

    #[error("point detectors have no dimensionless inner mass; use an interval detector for {0}")]
    DimensionalInconsistency(&'static str),

    #[error("least-squares fit failed: {0}")]
    Fit(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Process exit code used by the `toa-lab` binary.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Io { .. } | Error::Domain(_) | Error::DimensionalInconsistency(_) => 2,
            Error::NonConvergence { .. } | Error::Aliasing { .. } | Error::Fit(_) => 3,
            Error::DegenerateNormalization { .. } => 4,
        }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn degenerate(kind: Kind, detail: impl Into<String>) -> Self {
        Error::DegenerateNormalization {
            kind,
            detail: detail.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
