//! Division polynomials, sigma functions and canonical heights on superelliptic curves.

pub mod curve;
pub mod format;
pub mod mp;
pub mod mpoly;
pub mod poly;
pub mod rat;
pub mod schur_sigma;
pub mod cantor;
pub mod place;
pub mod analytic;
pub mod heights;

pub use analytic::{AnalyticError, PeriodMatrices, SigmaEvaluator};
pub use cantor::{CantorError, DivisionPolynomial};
pub use curve::{CurveError, SuperellipticCurve};
pub use heights::{HeightError, Point};
pub use place::Place;
pub use schur_sigma::SchurError;

/// Any error raised by this crate, tagged with the module it came from.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Schur(#[from] SchurError),
    #[error(transparent)]
    Cantor(#[from] CantorError),
    #[error(transparent)]
    Analytic(#[from] AnalyticError),
    #[error(transparent)]
    Height(#[from] HeightError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn module(&self) -> &'static str {
        match self {
            Error::Curve(_) => "curve",
            Error::Schur(_) => "schur_sigma",
            Error::Cantor(_) => "cantor",
            Error::Analytic(_) => "analytic",
            Error::Height(HeightError::Analytic(_)) => "analytic",
            Error::Height(HeightError::Cantor(_)) => "cantor",
            Error::Height(HeightError::Curve(_)) => "curve",
            Error::Height(_) => "heights",
            Error::Io(_) => "io",
        }
    }

    /// Variant name of the innermost error, e.g. `NotInTSet`.
    pub fn name(&self) -> String {
        let dbg = match self {
            Error::Curve(e) => format!("{e:?}"),
            Error::Schur(e) => format!("{e:?}"),
            Error::Cantor(e) => format!("{e:?}"),
            Error::Analytic(e) => format!("{e:?}"),
            Error::Height(e) => format!("{e:?}"),
            Error::Io(e) => return format!("{:?}", e.kind()),
        };
        innermost_variant(&dbg)
    }
}

fn innermost_variant(dbg: &str) -> String {
    // "Height(Cantor(ZeroEncountered(3)))" -> "ZeroEncountered"
    let mut name = dbg;
    loop {
        let end = name.find(|c: char| c == '(' || c == ' ' || c == '{').unwrap_or(name.len());
        let head = &name[..end];
        let wrapper = matches!(head, "Analytic" | "Cantor" | "Curve" | "Schur" | "Height");
        if wrapper && name[end..].starts_with('(') {
            name = &name[end + 1..];
        } else {
            return head.to_string();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_names() {
        let e = Error::from(HeightError::Cantor(CantorError::ZeroEncountered(3)));
        assert_eq!(e.name(), "ZeroEncountered");
        assert_eq!(e.module(), "cantor");
        let e = Error::from(HeightError::NotInTSet { n: 4, place: Place::Prime(2) });
        assert_eq!(e.name(), "NotInTSet");
        assert_eq!(Error::from(AnalyticError::PointAtInfinity).name(), "PointAtInfinity");
    }
}
