//! Places of Q: the archimedean one and the p-adic ones.

use crate::mp;
use crate::rat::{self, Q};
use rug::Float;
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Place {
    Infinity,
    Prime(u64),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid place '{0}': expected 'inf' or a prime")]
pub struct PlaceError(pub String);

impl Place {
    /// Local degree over Q; always 1 here.
    pub fn local_degree(&self) -> u32 {
        1
    }

    pub fn is_archimedean(&self) -> bool {
        matches!(self, Place::Infinity)
    }

    /// n_v log|r|_v, with |p|_p = 1/p.
    pub fn log_abs(&self, prec: u32, r: &Q) -> Float {
        match self {
            Place::Infinity => mp::log_abs_q(prec, r),
            Place::Prime(p) => {
                let o = rat::ord(r, *p);
                let lp = Float::with_val(prec, *p).ln();
                Float::with_val(prec, -o * lp)
            }
        }
    }
}

impl serde::Serialize for Place {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Infinity => write!(f, "inf"),
            Place::Prime(p) => write!(f, "{p}"),
        }
    }
}

impl FromStr for Place {
    type Err = PlaceError;
    fn from_str(s: &str) -> Result<Self, PlaceError> {
        let t = s.trim();
        if t == "inf" || t == "infinity" {
            return Ok(Place::Infinity);
        }
        match t.parse::<u64>() {
            Ok(p) if rat::is_prime(p) => Ok(Place::Prime(p)),
            _ => Err(PlaceError(s.to_string())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::qf;

    #[test]
    fn parse_and_log() {
        assert_eq!("inf".parse::<Place>().unwrap(), Place::Infinity);
        assert_eq!("7".parse::<Place>().unwrap(), Place::Prime(7));
        assert!("9".parse::<Place>().is_err());
        let v = Place::Prime(3).log_abs(64, &qf(18, 5)).to_f64();
        assert!((v + 2.0 * 3f64.ln()).abs() < 1e-12);
        let w = Place::Infinity.log_abs(64, &qf(-1, 4)).to_f64();
        assert!((w + 4f64.ln()).abs() < 1e-12);
    }
}
