//! Numerical monodromy of plane curves under the projection to `x`.

mod poly;
mod resultant;
mod roots;
mod track;

use thiserror::Error;

use crate::cover::CoverError;
use crate::fiber::FiberError;

pub use poly::{PlanePolynomial, QPoly};
pub use resultant::{discriminant_resultant, resultant_y};
pub use track::{
    certify_projection, critical_values, track_monodromy, BasePointStrategy, CriticalSet,
    CriticalValue, GenericityReport, InfinityStatus, MonodromyReport, MonodromyResult,
    ProjectionReport, TrackingConfig,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumonoError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: &'static str },
    #[error("polynomial is zero")]
    ZeroPolynomial,
    #[error("polynomial has degree {0} in y; need at least 2")]
    DegreeTooLow(u32),
    #[error("polynomial is not squarefree in y (discriminant vanishes identically)")]
    NotSquarefree,
    #[error("projection is not generic: {0}")]
    NonGenericProjection(String),
    #[error("curve is singular near x = {}{:+}i, y = {}{:+}i", x[0], x[1], y[0], y[1])]
    SingularCurve { x: [f64; 2], y: [f64; 2] },
    #[error("root finding failed: {0}")]
    RootFinding(String),
    #[error("path tracking ambiguous on loop {loop_index}, piece {piece}, at t = {t}")]
    TrackingAmbiguity { loop_index: usize, piece: usize, t: f64 },
    #[error("base point: {0}")]
    BadBasePoint(String),
    #[error("monodromy relation fails: product is {product}")]
    RelationViolation { product: String },
    #[error("invalid tracking configuration: {0}")]
    InvalidConfig(&'static str),
    #[error(transparent)]
    Cover(#[from] CoverError),
    #[error(transparent)]
    Fiber(#[from] FiberError),
}

/// A rational constant such as `-3/2` or `0.25`.
pub fn parse_rational(text: &str) -> Result<num_rational::BigRational, NumonoError> {
    let p = PlanePolynomial::parse_any(text)?;
    match (p.degree_x(), p.degree_y()) {
        (Some(0) | None, Some(0) | None) => Ok(p.coefficient(0, 0)),
        _ => Err(NumonoError::Syntax {
            pos: 0,
            msg: "expected a rational constant",
        }),
    }
}
