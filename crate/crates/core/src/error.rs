use num_complex::Complex64;
use thiserror::Error;

/// Errors produced by the numerical kernels and the operations built on them.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix dimension must be at least 1")]
    EmptyMatrix,

    #[error("dimension mismatch: {left}x{left} vs {right}x{right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFiniteEntry { row: usize, col: usize },

    #[error(
        "eigenvalue iteration failed to converge after {iterations} sweeps \
         (n = {n}, residual subdiagonal {residual:.3e}, scale {scale:.3e}); \
         the matrix is likely pathologically conditioned"
    )]
    EigenNonConvergence {
        n: usize,
        iterations: usize,
        residual: f64,
        scale: f64,
    },

    #[error("singular value iteration failed to converge after {sweeps} sweeps (n = {n})")]
    SvdNonConvergence { n: usize, sweeps: usize },

    #[error(
        "contour touches spectrum: node {z} is within {distance:.3e} of the spectrum \
         (threshold {threshold:.3e})"
    )]
    ContourTouchesSpectrum {
        z: Complex64,
        distance: f64,
        threshold: f64,
    },

    #[error(
        "ambiguous numerical rank: singular value gap {above:.3e} / {below:.3e} at the \
         rank threshold is smaller than the configured gap factor {gap_factor}; \
         refine the contour or adjust rank_tol"
    )]
    AmbiguousRank {
        above: f64,
        below: f64,
        gap_factor: f64,
    },

    #[error(
        "eigenvalue(s) too close to the region boundary to classify: {}",
        format_offenders(offenders)
    )]
    BoundaryAmbiguous { offenders: Vec<(Complex64, f64)> },

    #[error("region of kind {kind} has no contour; only plain disks support contour integration")]
    NoContourBoundary { kind: &'static str },

    #[error("flag projections are not an orthogonal complete family: {reason}")]
    NonOrthogonalFlag { reason: String },

    #[error(
        "cumulative flag projection q_{k} is not invariant: residual {residual:.3e} \
         exceeds {threshold:.3e}"
    )]
    InvarianceViolation {
        k: usize,
        residual: f64,
        threshold: f64,
    },

    #[error("input is not nilpotent: |Q^{power}|^(1/{power}) = {value:.3e} (scale {scale:.3e})")]
    NotNilpotent { power: usize, value: f64, scale: f64 },

    #[error("Moebius denominator c*T + d is numerically singular")]
    SingularDenominator,

    #[error("linear solve did not reach the requested residual: {residual:.3e} > {target:.3e}")]
    SolveResidual { residual: f64, target: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

fn format_offenders(offenders: &[(Complex64, f64)]) -> String {
    offenders
        .iter()
        .map(|(z, d)| format!("{z} (distance {d:.3e})"))
        .collect::<Vec<_>>()
        .join(", ")
}

pub type Result<T> = std::result::Result<T, Error>;
