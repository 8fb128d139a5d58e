//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point {point:?} lies outside the chart domain (margin {margin})")]
    PointOutsideDomain { point: [f64; 4], margin: f64 },

    #[error("metric is not positive definite at {point:?}")]
    MetricNotPositiveDefinite { point: [f64; 4] },

    #[error("bivectors are attached to different base points")]
    MismatchedBasePoints,

    #[error("cross product arguments live in different halves of the bivector space")]
    MixedHalves,

    #[error("sphere chart is degenerate for fibre coordinate {coord:?}")]
    DegenerateSphereChart { coord: [f64; 3] },

    #[error("chart '{0}' is not Einstein with positive scalar curvature")]
    NotEinsteinPositive(String),

    #[error("no interior minimum of the residual in [{lo}, {hi}]")]
    NoInteriorMinimum { lo: f64, hi: f64 },

    #[error("residual is flat in t (distribution is totally geodesic for every t)")]
    DegenerateFlatObjective,

    #[error("unknown chart id '{0}'")]
    UnknownChart(String),

    #[error("catalog verification failed for '{id}': {detail}")]
    CatalogVerification { id: String, detail: String },

    #[error("expression parse error: {0}")]
    ExprParse(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("sampling budget below documented minimum: {0}")]
    BudgetTooSmall(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
