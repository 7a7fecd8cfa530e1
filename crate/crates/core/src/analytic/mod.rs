//! Archimedean analysis on y^2 = f(x): periods, Abel–Jacobi, theta and sigma
//! functions, the local height and the Arakelov measure.

pub mod abel;
pub mod arakelov;
pub mod integrals;
pub mod linalg;
pub mod periods;
pub mod sigma;
pub mod theta;

pub use arakelov::{ArakelovMeasure, MeasureNode, PatchKind, QuadratureSettings};
pub use integrals::{arakelov_integrate, arakelov_report, chi_invariant, log_abs_delta, ArakelovReport, ChiReport, IntegrandSpec};
pub use abel::{AbelJacobi, AbelJacobiPoint, PathSource};
pub use periods::{differential_bases, periods, periods_with, DifferentialBases, PeriodMatrices};
pub use sigma::{lambda_arch, LocalHeightContext, SigmaEvaluator};
pub use theta::{Characteristic, Theta};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalyticError {
    #[error("curve is not hyperelliptic")]
    NotHyperelliptic,
    #[error("precision loss: {0}")]
    PrecisionLoss(String),
    #[error("branch collision: {0}")]
    BranchCollision(String),
    #[error("degenerate integration path: {0}")]
    PathDegeneracy(String),
    #[error("theta truncation insufficient")]
    TruncationInsufficient,
    #[error("point at infinity")]
    PointAtInfinity,
    #[error("quadrature did not converge: {0}")]
    QuadratureNonconvergence(String),
    #[error("genus {0} is below the supported range")]
    GenusTooSmall(usize),
    #[error("sigma-sharp is implemented for g <= 2, got g = {0}")]
    UnsupportedGenus(usize),
    #[error("chi = {0} is negative for a genus-2 curve")]
    NegativeChiGenus2(f64),
    #[error("point is not on the curve")]
    NotOnCurve,
}
