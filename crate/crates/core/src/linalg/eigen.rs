use num_complex::Complex64;

use super::HermitianMatrix;
use crate::error::{Error, Result};

/// Householder reduction of a Hermitian matrix to a real symmetric
/// tridiagonal matrix with the same eigenvalues.
///
/// Returns `(diag, off)` where `off[i]` couples rows `i` and `i + 1`; the
/// last entry of `off` is zero. Complex off-diagonal phases are dropped,
/// which is a diagonal unitary similarity.
pub fn tridiagonalize(m: &HermitianMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = m.dim();
    let mut a = m.data().to_vec();
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n];
    let mut v = vec![Complex64::new(0.0, 0.0); n];
    let mut p = vec![Complex64::new(0.0, 0.0); n];

    for j in 0..n.saturating_sub(1) {
        diag[j] = a[j * n + j].re;
        let len = n - j - 1;
        let x0 = a[(j + 1) * n + j];
        let tail: f64 = (j + 2..n).map(|i| a[i * n + j].norm_sqr()).sum();
        if tail == 0.0 {
            off[j] = x0.norm();
            continue;
        }
        let sigma = (x0.norm_sqr() + tail).sqrt();
        let phase = if x0.norm() > 0.0 {
            x0 / x0.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let alpha = -phase * sigma;

        let v = &mut v[..len];
        for (t, vi) in v.iter_mut().enumerate() {
            *vi = a[(j + 1 + t) * n + j];
        }
        v[0] -= alpha;
        let tau = 1.0 / (sigma * (sigma + x0.norm()));

        // p = tau * B v over the trailing block B = a[j+1.., j+1..]
        let p = &mut p[..len];
        for (r, pr) in p.iter_mut().enumerate() {
            let row = &a[(j + 1 + r) * n + j + 1..(j + 1 + r) * n + n];
            let mut acc = Complex64::new(0.0, 0.0);
            for (b, vl) in row.iter().zip(v.iter()) {
                acc += b * vl;
            }
            *pr = acc * tau;
        }
        let vp: f64 = v
            .iter()
            .zip(p.iter())
            .map(|(vi, pi)| (vi.conj() * pi).re)
            .sum();
        let kk = 0.5 * tau * vp;
        for (pi, vi) in p.iter_mut().zip(v.iter()) {
            *pi -= vi * kk;
        }
        // B -= v q^* + q v^*
        for r in 0..len {
            let (vr, qr) = (v[r], p[r]);
            let row = &mut a[(j + 1 + r) * n + j + 1..(j + 1 + r) * n + n];
            for ((b, vl), ql) in row.iter_mut().zip(v.iter()).zip(p.iter()) {
                *b -= vr * ql.conj() + qr * vl.conj();
            }
        }
        off[j] = sigma;
    }
    if n > 0 {
        diag[n - 1] = a[(n - 1) * n + n - 1].re;
    }
    (diag, off)
}

/// Eigenvalues of a real symmetric tridiagonal matrix by implicit QL.
///
/// On return `diag` holds the eigenvalues in ascending order; `off` is
/// destroyed. `off[i]` couples `i` and `i + 1`.
pub fn symmetric_tridiagonal_eigenvalues(diag: &mut [f64], off: &mut [f64]) -> Result<()> {
    let n = diag.len();
    if off.len() != n {
        return Err(Error::Shape(format!(
            "off-diagonal length {} does not match diagonal length {n}",
            off.len()
        )));
    }
    if n == 0 {
        return Ok(());
    }
    off[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if off[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::InvalidMatrix(
                    "tridiagonal QL iteration did not converge".into(),
                ));
            }
            let mut g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
            let mut r = g.hypot(1.0);
            g = diag[m] - diag[l] + off[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * off[i];
                let b = c * off[i];
                r = f.hypot(g);
                off[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    off[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            diag[l] -= p;
            off[l] = g;
            off[m] = 0.0;
        }
    }
    diag.sort_by(|a, b| a.total_cmp(b));
    Ok(())
}
