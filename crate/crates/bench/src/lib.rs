//! Fixtures shared by the benchmarks.

use superell::rat::{self, Q};
use superell::SuperellipticCurve;

/// y^2 = x^3 - x, y^2 = x^5 + 1 and y^2 = x^7 - x.
pub fn curves() -> Vec<(&'static str, SuperellipticCurve)> {
    let mk = |c: &[i64]| SuperellipticCurve::hyperelliptic(c).expect("valid curve");
    vec![
        ("x3-x", mk(&[0, -1, 0, 1])),
        ("x5+1", mk(&[1, 0, 0, 0, 0, 1])),
        ("x7-x", mk(&[0, -1, 0, 0, 0, 0, 0, 1])),
    ]
}

pub fn rational(n: i64, d: i64) -> Q {
    rat::qf(n, d)
}

#[cfg(test)]
mod tests {
    #[test]
    fn fixtures_build() {
        let cs = super::curves();
        assert_eq!(cs.iter().map(|(_, c)| c.genus()).collect::<Vec<_>>(), [1, 2, 3]);
    }
}
