//! On-disk cache of division polynomials keyed by curve digest and n.

use super::{b_closed, psi_degree, same_parity, CantorError, DivisionPolynomial};
use crate::curve::SuperellipticCurve;
use crate::poly::QPoly;
use crate::rat::{fmt_rational, parse_rational};
use serde::{Deserialize, Serialize};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Serialize, Deserialize)]
struct Entry {
    format_version: u32,
    digest: String,
    n: usize,
    g: usize,
    coeffs: Vec<String>,
}

pub struct PsiCache {
    dir: PathBuf,
}

impl PsiCache {
    pub fn new(dir: impl AsRef<Path>) -> std::io::Result<Self> {
        fs::create_dir_all(dir.as_ref())?;
        Ok(PsiCache { dir: dir.as_ref().to_path_buf() })
    }

    fn path(&self, digest: &str, n: usize) -> PathBuf {
        self.dir.join(format!("{digest}-psi{n}.json"))
    }

    /// Load and re-verify degree and leading coefficient; bad entries are removed.
    pub fn load(&self, c: &SuperellipticCurve, n: usize) -> Option<DivisionPolynomial> {
        let digest = c.digest();
        let path = self.path(&digest, n);
        let text = fs::read_to_string(&path).ok()?;
        match decode(&text, &digest, n, c.genus()) {
            Some(d) => Some(d),
            None => {
                let _ = fs::remove_file(&path);
                None
            }
        }
    }

    /// Write through a temporary file and rename into place.
    pub fn store(&self, c: &SuperellipticCurve, d: &DivisionPolynomial) -> std::io::Result<()> {
        let digest = c.digest();
        let e = Entry {
            format_version: 1,
            digest: digest.clone(),
            n: d.n,
            g: d.g,
            coeffs: d.psi.coeffs().iter().map(fmt_rational).collect(),
        };
        let body = serde_json::to_vec(&e).map_err(std::io::Error::other)?;
        let target = self.path(&digest, d.n);
        let tmp = self.dir.join(format!(".{digest}-psi{}.{}.tmp", d.n, std::process::id()));
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(&body)?;
            f.sync_all()?;
        }
        fs::rename(&tmp, &target)
    }

    /// Cached lookup, computing and storing on a miss.
    pub fn get_or_compute(&self, c: &SuperellipticCurve, n: usize) -> Result<DivisionPolynomial, CantorError> {
        if let Some(d) = self.load(c, n) {
            return Ok(d);
        }
        let d = super::division_polynomial(c, n)?;
        let _ = self.store(c, &d);
        Ok(d)
    }
}

fn decode(text: &str, digest: &str, n: usize, g: usize) -> Option<DivisionPolynomial> {
    let e: Entry = serde_json::from_str(text).ok()?;
    if e.format_version != 1 || e.digest != digest || e.n != n || e.g != g {
        return None;
    }
    let coeffs = e.coeffs.iter().map(|s| parse_rational(s).ok()).collect::<Option<Vec<_>>>()?;
    let psi = QPoly::new(coeffs);
    let b_n = b_closed(n, g);
    if psi.degree() != Some(psi_degree(n, g)) || psi.lc() != b_n {
        return None;
    }
    Some(DivisionPolynomial { n, g, psi, b_n, same_parity: same_parity(n, g) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_and_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let cache = PsiCache::new(dir.path()).unwrap();
        let c = SuperellipticCurve::hyperelliptic(&[0, -1, 0, 1]).unwrap();
        let d = cache.get_or_compute(&c, 5).unwrap();
        assert_eq!(cache.load(&c, 5), Some(d.clone()));
        let p = cache.path(&c.digest(), 5);
        let text = fs::read_to_string(&p).unwrap().replacen("\"5\"", "\"7\"", 1);
        fs::write(&p, text.replace("coeffs\":[", "coeffs\":[\"1\",")).unwrap();
        assert_eq!(cache.load(&c, 5), None);
        assert!(!p.exists());
        fs::write(&p, "garbage").unwrap();
        assert_eq!(cache.load(&c, 5), None);
        assert_eq!(cache.get_or_compute(&c, 5).unwrap(), d);
    }
}
