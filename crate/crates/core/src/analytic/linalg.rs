//! Small dense complex and real matrices at MPFR precision.

use rug::{Complex, Float};

pub type CMat = Vec<Vec<Complex>>;
pub type RMat = Vec<Vec<Float>>;

pub fn czeros(prec: u32, r: usize, c: usize) -> CMat {
    vec![vec![Complex::new(prec); c]; r]
}

pub fn cidentity(prec: u32, n: usize) -> CMat {
    let mut m = czeros(prec, n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Complex::with_val(prec, 1);
    }
    m
}

pub fn cmul(a: &CMat, b: &CMat) -> CMat {
    let prec = a[0][0].prec().0;
    let (n, k, m) = (a.len(), b.len(), b[0].len());
    let mut out = czeros(prec, n, m);
    for i in 0..n {
        for j in 0..m {
            let mut s = Complex::new(prec);
            for t in 0..k {
                s += Complex::with_val(prec, &a[i][t] * &b[t][j]);
            }
            out[i][j] = s;
        }
    }
    out
}

pub fn cmul_vec(a: &CMat, v: &[Complex]) -> Vec<Complex> {
    let prec = a[0][0].prec().0;
    a.iter()
        .map(|row| {
            let mut s = Complex::new(prec);
            for (x, y) in row.iter().zip(v) {
                s += Complex::with_val(prec, x * y);
            }
            s
        })
        .collect()
}

pub fn ctranspose(a: &CMat) -> CMat {
    (0..a[0].len()).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

pub fn csub(a: &CMat, b: &CMat) -> CMat {
    a.iter()
        .zip(b)
        .map(|(r, s)| r.iter().zip(s).map(|(x, y)| Complex::with_val(x.prec().0, x - y)).collect())
        .collect()
}

/// Integer matrix applied on the right: a * m.
pub fn cmul_int(a: &CMat, m: &[Vec<i64>]) -> CMat {
    let prec = a[0][0].prec().0;
    let cols = m[0].len();
    let mut out = czeros(prec, a.len(), cols);
    for (i, row) in a.iter().enumerate() {
        for j in 0..cols {
            let mut s = Complex::new(prec);
            for (t, x) in row.iter().enumerate() {
                if m[t][j] != 0 {
                    s += Complex::with_val(prec, x * m[t][j]);
                }
            }
            out[i][j] = s;
        }
    }
    out
}

/// Gauss–Jordan inverse with partial pivoting; None if singular.
pub fn cinv(a: &CMat) -> Option<CMat> {
    let n = a.len();
    let prec = a[0][0].prec().0;
    let mut m: CMat = a.clone();
    let mut inv = cidentity(prec, n);
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| {
            let x = Float::with_val(prec, m[i][col].abs_ref());
            let y = Float::with_val(prec, m[j][col].abs_ref());
            x.partial_cmp(&y).unwrap()
        })?;
        if m[piv][col].is_zero() {
            return None;
        }
        m.swap(piv, col);
        inv.swap(piv, col);
        let p = Complex::with_val(prec, m[col][col].recip_ref());
        for j in 0..n {
            m[col][j] *= &p;
            inv[col][j] *= &p;
        }
        for i in 0..n {
            if i == col || m[i][col].is_zero() {
                continue;
            }
            let f = m[i][col].clone();
            for j in 0..n {
                let t = Complex::with_val(prec, &f * &m[col][j]);
                m[i][j] -= t;
                let t = Complex::with_val(prec, &f * &inv[col][j]);
                inv[i][j] -= t;
            }
        }
    }
    Some(inv)
}

pub fn cdet(a: &CMat) -> Complex {
    let n = a.len();
    let prec = a[0][0].prec().0;
    let mut m = a.clone();
    let mut det = Complex::with_val(prec, 1);
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| {
                let x = Float::with_val(prec, m[i][col].abs_ref());
                let y = Float::with_val(prec, m[j][col].abs_ref());
                x.partial_cmp(&y).unwrap()
            })
            .unwrap();
        if m[piv][col].is_zero() {
            return Complex::new(prec);
        }
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        det *= &m[col][col];
        let p = Complex::with_val(prec, m[col][col].recip_ref());
        for i in col + 1..n {
            let f = Complex::with_val(prec, &m[i][col] * &p);
            for j in col..n {
                let t = Complex::with_val(prec, &f * &m[col][j]);
                m[i][j] -= t;
            }
        }
    }
    det
}

pub fn imag_part(a: &CMat) -> RMat {
    a.iter().map(|r| r.iter().map(|x| x.imag().clone()).collect()).collect()
}

pub fn real_part(a: &CMat) -> RMat {
    a.iter().map(|r| r.iter().map(|x| x.real().clone()).collect()).collect()
}

/// Inverse of a real symmetric positive definite matrix via Cholesky; None if not PD.
pub fn spd_inverse(a: &RMat) -> Option<RMat> {
    let l = cholesky(a)?;
    let n = a.len();
    let prec = a[0][0].prec();
    // solve L L^T X = I column by column
    let mut out = vec![vec![Float::new(prec); n]; n];
    for c in 0..n {
        let mut y = vec![Float::new(prec); n];
        for i in 0..n {
            let mut s = Float::with_val(prec, if i == c { 1 } else { 0 });
            for k in 0..i {
                s -= Float::with_val(prec, &l[i][k] * &y[k]);
            }
            y[i] = s / &l[i][i];
        }
        let mut x = vec![Float::new(prec); n];
        for i in (0..n).rev() {
            let mut s = y[i].clone();
            for k in i + 1..n {
                s -= Float::with_val(prec, &l[k][i] * &x[k]);
            }
            x[i] = s / &l[i][i];
        }
        for i in 0..n {
            out[i][c] = x[i].clone();
        }
    }
    Some(out)
}

/// Lower-triangular Cholesky factor; None if the matrix is not positive definite.
pub fn cholesky(a: &RMat) -> Option<RMat> {
    let n = a.len();
    let prec = a[0][0].prec();
    let mut l = vec![vec![Float::new(prec); n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i][j].clone();
            for k in 0..j {
                s -= Float::with_val(prec, &l[i][k] * &l[j][k]);
            }
            if i == j {
                if s <= 0 {
                    return None;
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / &l[j][j];
            }
        }
    }
    Some(l)
}

pub fn to_f64(a: &RMat) -> Vec<Vec<f64>> {
    a.iter().map(|r| r.iter().map(|x| x.to_f64()).collect()).collect()
}

pub fn cholesky_f64(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            if i == j {
                if s <= 0.0 {
                    return None;
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    Some(l)
}

/// LLL reduction of a positive definite Gram matrix. Returns an integer
/// unimodular V whose columns span the lattice with Gram V^T G V reduced.
pub fn lll_gram(gram: &[Vec<f64>]) -> Vec<Vec<i64>> {
    let n = gram.len();
    let mut v: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect();
    // columns of v are basis vectors; work with b_i = column i
    let gram_of = |v: &Vec<Vec<i64>>, i: usize, j: usize| -> f64 {
        let mut s = 0.0;
        for a in 0..n {
            for b in 0..n {
                s += v[a][i] as f64 * gram[a][b] * v[b][j] as f64;
            }
        }
        s
    };
    let mut k = 1;
    let mut guard = 0;
    while k < n && guard < 10_000 {
        guard += 1;
        // Gram–Schmidt data
        let (mu, bstar) = gso(&v, n, &gram_of);
        for j in (0..k).rev() {
            let q = mu[k][j].round();
            if q != 0.0 {
                let qi = q as i64;
                for r in 0..n {
                    v[r][k] -= qi * v[r][j];
                }
            }
        }
        let (mu, bstar2) = gso(&v, n, &gram_of);
        let _ = bstar;
        if bstar2[k] >= (0.99 - mu[k][k - 1] * mu[k][k - 1]) * bstar2[k - 1] {
            k += 1;
        } else {
            for r in 0..n {
                v[r].swap(k, k - 1);
            }
            k = (k - 1).max(1);
        }
    }
    v
}

type Gso = (Vec<Vec<f64>>, Vec<f64>);

fn gso(v: &Vec<Vec<i64>>, n: usize, gram_of: &dyn Fn(&Vec<Vec<i64>>, usize, usize) -> f64) -> Gso {
    let mut mu = vec![vec![0.0; n]; n];
    let mut bstar = vec![0.0; n];
    for i in 0..n {
        for j in 0..i {
            let mut s = gram_of(v, i, j);
            for t in 0..j {
                s -= mu[j][t] * mu[i][t] * bstar[t];
            }
            mu[i][j] = s / bstar[j];
        }
        let mut s = gram_of(v, i, i);
        for t in 0..i {
            s -= mu[i][t] * mu[i][t] * bstar[t];
        }
        bstar[i] = s;
    }
    (mu, bstar)
}

/// Inverse of a unimodular integer matrix.
pub fn int_inverse(m: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = m.len();
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut inv: Vec<Vec<i128>> = (0..n).map(|i| (0..n).map(|j| (i == j) as i128).collect()).collect();
    for col in 0..n {
        // Euclid down the column to get a unit pivot
        loop {
            let nz: Vec<usize> = (col..n).filter(|&r| a[r][col] != 0).collect();
            let p = *nz.iter().min_by_key(|&&r| a[r][col].abs()).expect("singular integer matrix");
            a.swap(col, p);
            inv.swap(col, p);
            let mut done = true;
            for r in col + 1..n {
                if a[r][col] != 0 {
                    let q = a[r][col] / a[col][col];
                    for c in 0..n {
                        a[r][c] -= q * a[col][c];
                        inv[r][c] -= q * inv[col][c];
                    }
                    if a[r][col] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        assert!(a[col][col].abs() == 1, "matrix is not unimodular");
    }
    for col in (0..n).rev() {
        let s = a[col][col];
        for c in 0..n {
            a[col][c] *= s;
            inv[col][c] *= s;
        }
        for r in 0..col {
            let q = a[r][col];
            if q != 0 {
                for c in 0..n {
                    a[r][c] -= q * a[col][c];
                    inv[r][c] -= q * inv[col][c];
                }
            }
        }
    }
    inv.iter().map(|r| r.iter().map(|&x| x as i64).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_det() {
        let p = 128;
        let c = |a: f64, b: f64| Complex::with_val(p, (a, b));
        let m = vec![vec![c(2.0, 1.0), c(1.0, 0.0)], vec![c(0.5, -1.0), c(3.0, 0.0)]];
        let inv = cinv(&m).unwrap();
        let id = cmul(&m, &inv);
        for i in 0..2 {
            for j in 0..2 {
                let e = Complex::with_val(p, &id[i][j] - (i == j) as i32);
                assert!(e.abs().real().to_f64() < 1e-30);
            }
        }
        let d = cdet(&m);
        let expect = c(6.0, 3.0) - c(0.5, -1.0);
        assert!(Complex::with_val(p, d - expect).abs().real().to_f64() < 1e-30);
    }

    #[test]
    fn lll_and_int_inverse() {
        let g = vec![vec![1.0, 0.99], vec![0.99, 1.0]];
        let v = lll_gram(&g);
        let vi = int_inverse(&v);
        for i in 0..2 {
            for j in 0..2 {
                let s: i64 = (0..2).map(|k| v[i][k] * vi[k][j]).sum();
                assert_eq!(s, (i == j) as i64);
            }
        }
        let b0: f64 = (0..2).map(|a| (0..2).map(|b| v[a][0] as f64 * g[a][b] * v[b][0] as f64).sum::<f64>()).sum();
        assert!(b0 < 0.05);
    }
}
