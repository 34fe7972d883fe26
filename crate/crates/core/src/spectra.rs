//! Limiting spectral laws: Marcenko-Pastur edges, density, distribution
//! function and quantiles, semicircle moments.
//!
//! `MpLaw` with ratio `c` is the limit of the empirical eigenvalue
//! distribution of `W / d` for a Wishart matrix of parameters `(d, s)` with
//! `s / d -> c`. The density is the normalized form
//! `sqrt(4c - (x - 1 - c)^2) / (2 pi x)` on the bulk, plus an atom of mass
//! `max(1 - c, 0)` at zero.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Marcenko-Pastur law with ratio parameter `c`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MpLaw {
    c: f64,
    bulk_left: f64,
    right: f64,
}

impl MpLaw {
    pub fn new(c: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::InvalidParams(format!(
                "ratio c must be positive, got {c}"
            )));
        }
        let r = c.sqrt();
        Ok(Self {
            c,
            bulk_left: (r - 1.0).powi(2),
            right: (r + 1.0).powi(2),
        })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// Limit of the smallest rescaled eigenvalues: 0 when `c <= 1`, else `(sqrt c - 1)^2`.
    pub fn left_edge(&self) -> f64 {
        if self.c <= 1.0 {
            0.0
        } else {
            self.bulk_left
        }
    }

    /// Left end of the continuous part, `(sqrt c - 1)^2` for every `c`.
    pub fn bulk_left(&self) -> f64 {
        self.bulk_left
    }

    pub fn right_edge(&self) -> f64 {
        self.right
    }

    pub fn atom_mass(&self) -> f64 {
        (1.0 - self.c).max(0.0)
    }

    /// Mass of the continuous part, `min(c, 1)`.
    pub fn bulk_mass(&self) -> f64 {
        self.c.min(1.0)
    }

    pub fn density(&self, x: f64) -> f64 {
        if !(x > 0.0) || x < self.bulk_left || x > self.right {
            return 0.0;
        }
        let v = 4.0 * self.c - (x - 1.0 - self.c).powi(2);
        if v <= 0.0 {
            0.0
        } else {
            v.sqrt() / (2.0 * PI * x)
        }
    }

    /// Distribution function, including the atom at zero.
    pub fn cdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        if x <= self.bulk_left {
            return self.atom_mass();
        }
        if x >= self.right {
            return 1.0;
        }
        let theta = self.angle_of(x);
        (self.atom_mass() + self.bulk_integral(theta)).min(1.0)
    }

    /// The `x` in the bulk with `cdf(x) = q`, for `atom_mass < q < 1`.
    pub fn quantile(&self, q: f64) -> Result<f64> {
        let atom = self.atom_mass();
        if !(q > atom && q < 1.0) {
            return Err(Error::OutOfRange(format!(
                "quantile level {q} must lie in ({atom}, 1) for c = {}",
                self.c
            )));
        }
        let (mut lo, mut hi) = (self.bulk_left, self.right);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.cdf(mid) < q {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-15 * self.right {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    // x = a + (b - a)(1 - cos t)/2 maps [0, pi] onto the bulk and absorbs
    // the square-root edge singularities.
    fn angle_of(&self, x: f64) -> f64 {
        let u = (x - self.bulk_left) / (self.right - self.bulk_left);
        (1.0 - 2.0 * u).clamp(-1.0, 1.0).acos()
    }

    fn bulk_integrand(&self, t: f64) -> f64 {
        let (a, b) = (self.bulk_left, self.right);
        let half = 0.5 * (b - a);
        if a == 0.0 {
            return b * (1.0 + t.cos()) / (4.0 * PI);
        }
        let x = a + half * (1.0 - t.cos());
        let s = t.sin();
        half * half * s * s / (2.0 * PI * x)
    }

    fn bulk_integral(&self, theta: f64) -> f64 {
        adaptive_simpson(&|t| self.bulk_integrand(t), 0.0, theta, 1e-12)
    }
}

/// `(a_c, b_c)`: limits of the smallest and largest rescaled eigenvalues.
pub fn mp_edges(c: f64) -> Result<(f64, f64)> {
    let law = MpLaw::new(c)?;
    Ok((law.left_edge(), law.right_edge()))
}

pub fn mp_density(c: f64, x: f64) -> Result<f64> {
    Ok(MpLaw::new(c)?.density(x))
}

pub fn mp_cdf(c: f64, x: f64) -> Result<f64> {
    Ok(MpLaw::new(c)?.cdf(x))
}

pub fn mp_quantile(c: f64, q: f64) -> Result<f64> {
    MpLaw::new(c)?.quantile(q)
}

/// Left-most positive point of the support of `pi_t`, for `t != 1`:
/// `a_t` if `t > 1`, `a_{1/t}` if `t < 1`.
pub fn two_sided_left_edge(t: f64) -> Result<f64> {
    if !(t > 0.0) || t == 1.0 || !t.is_finite() {
        return Err(Error::InvalidParams(format!(
            "two-sided edge needs a positive ratio different from 1, got {t}"
        )));
    }
    let u = if t > 1.0 { t } else { 1.0 / t };
    Ok((u.sqrt() - 1.0).powi(2))
}

/// `j`-th moment of the standard semicircle law: the Catalan number
/// `C_{j/2}` for even `j`, zero for odd `j`.
pub fn semicircle_moment(j: i64) -> Result<f64> {
    if j < 0 {
        return Err(Error::InvalidParams(format!(
            "moment order must be >= 0, got {j}"
        )));
    }
    if j % 2 == 1 {
        return Ok(0.0);
    }
    let m = (j / 2) as u64;
    let mut catalan = 1.0_f64;
    for i in 0..m {
        catalan = catalan * 2.0 * (2 * i + 1) as f64 / (i + 2) as f64;
    }
    Ok(catalan.round())
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, eps: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let (fa, fb) = (f(a), f(b));
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, eps, 50)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    eps: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * eps {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1)
}
