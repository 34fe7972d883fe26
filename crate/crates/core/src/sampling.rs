//! Seeded samplers for Ginibre and Wishart matrices and random induced states.
//!
//! Every sample is a pure function of a [`SeedSpec`]. The per-trial stream
//! seed is `derive_trial_seed(master, trial)` and feeds a xoshiro256++
//! generator (`Xoshiro256PlusPlus::seed_from_u64`). Uniform doubles take the
//! top 53 bits of each output; complex Gaussians use one Box-Muller pair per
//! entry with variance 1/2 on each of the real and imaginary parts, so that
//! `E|g|^2 = 1`.

use num_complex::Complex64;
use rand::{Rng, RngCore, SeedableRng};
use rand_distr::Gamma;
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eigenvalues, symmetric_tridiagonal_eigenvalues, ComplexMatrix, HermitianMatrix,
};

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer applied to `master ^ trial * GOLDEN_GAMMA`.
pub fn derive_trial_seed(master: u64, trial: u64) -> u64 {
    let mut z = master ^ trial.wrapping_mul(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Identifies one independent random stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub trial_index: u64,
}

impl SeedSpec {
    pub fn new(master_seed: u64, trial_index: u64) -> Self {
        Self {
            master_seed,
            trial_index,
        }
    }

    pub fn stream_seed(&self) -> u64 {
        derive_trial_seed(self.master_seed, self.trial_index)
    }

    pub fn source(&self) -> GaussianSource {
        GaussianSource::from_seed(self.stream_seed())
    }
}

/// Uniform and Gaussian variates from a single xoshiro256++ stream.
pub struct GaussianSource {
    rng: Xoshiro256PlusPlus,
}

impl GaussianSource {
    pub fn from_seed(seed: u64) -> Self {
        Self {
            rng: Xoshiro256PlusPlus::seed_from_u64(seed),
        }
    }

    /// Uniform double in `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard complex Gaussian, `E|g|^2 = 1`, via Box-Muller.
    pub fn complex_gaussian(&mut self) -> Complex64 {
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = (-u1.ln()).sqrt();
        let (sin, cos) = (std::f64::consts::TAU * u2).sin_cos();
        Complex64::new(r * cos, r * sin)
    }

    /// Gamma(shape, 1) variate.
    pub fn gamma(&mut self, shape: f64) -> f64 {
        let g = Gamma::new(shape, 1.0).expect("positive gamma shape");
        self.rng.sample(g)
    }

    pub fn rng(&mut self) -> &mut Xoshiro256PlusPlus {
        &mut self.rng
    }
}

/// Parameters `(d, s)` of a `d x d` Wishart matrix `G G^*` with `G` of size `d x s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WishartParams {
    d: usize,
    s: usize,
}

impl WishartParams {
    pub fn new(d: usize, s: usize) -> Result<Self> {
        if d == 0 || s == 0 {
            return Err(Error::InvalidParams(format!(
                "Wishart parameters must be positive, got d={d}, s={s}"
            )));
        }
        Ok(Self { d, s })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn s(&self) -> usize {
        self.s
    }
}

pub fn sample_ginibre(d: usize, s: usize, seed: SeedSpec) -> Result<ComplexMatrix> {
    let p = WishartParams::new(d, s)?;
    let mut src = seed.source();
    Ok(ginibre_from(&mut src, p))
}

fn ginibre_from(src: &mut GaussianSource, p: WishartParams) -> ComplexMatrix {
    let data = (0..p.d * p.s).map(|_| src.complex_gaussian()).collect();
    ComplexMatrix::from_vec(p.d, p.s, data).expect("sized by construction")
}

/// `G G^*` for a `d x s` matrix `G`.
pub fn gram(g: &ComplexMatrix) -> HermitianMatrix {
    let (d, s) = (g.rows(), g.cols());
    let mut re = Vec::with_capacity(d * s);
    let mut im = Vec::with_capacity(d * s);
    for z in g.data() {
        re.push(z.re);
        im.push(z.im);
    }
    let mut data = vec![Complex64::new(0.0, 0.0); d * d];
    for i in 0..d {
        let (ai, bi) = (&re[i * s..(i + 1) * s], &im[i * s..(i + 1) * s]);
        for j in 0..=i {
            let (aj, bj) = (&re[j * s..(j + 1) * s], &im[j * s..(j + 1) * s]);
            let z = conj_dot(ai, bi, aj, bj);
            data[i * d + j] = z;
            data[j * d + i] = z.conj();
        }
        data[i * d + i].im = 0.0;
    }
    HermitianMatrix::from_raw(d, data)
}

/// `sum_t (a_i + i b_i)_t * conj((a_j + i b_j)_t)` with lane-parallel accumulators.
fn conj_dot(ai: &[f64], bi: &[f64], aj: &[f64], bj: &[f64]) -> Complex64 {
    const L: usize = 8;
    let mut acc_re = [0.0; L];
    let mut acc_im = [0.0; L];
    let chunks = ai.len() / L;
    for c in 0..chunks {
        let o = c * L;
        let (xa, xb, ya, yb) = (&ai[o..o + L], &bi[o..o + L], &aj[o..o + L], &bj[o..o + L]);
        for l in 0..L {
            acc_re[l] += xa[l] * ya[l] + xb[l] * yb[l];
            acc_im[l] += xb[l] * ya[l] - xa[l] * yb[l];
        }
    }
    let mut re: f64 = acc_re.iter().sum();
    let mut im: f64 = acc_im.iter().sum();
    for t in chunks * L..ai.len() {
        re += ai[t] * aj[t] + bi[t] * bj[t];
        im += bi[t] * aj[t] - ai[t] * bj[t];
    }
    Complex64::new(re, im)
}

pub fn sample_wishart(p: WishartParams, seed: SeedSpec) -> Result<HermitianMatrix> {
    let mut src = seed.source();
    Ok(gram(&ginibre_from(&mut src, p)))
}

/// Random induced state `W / Tr W` on `C^n (x) C^k` with environment dimension `s`.
pub fn sample_induced_state(
    n: usize,
    k: usize,
    s: usize,
    seed: SeedSpec,
) -> Result<HermitianMatrix> {
    if n == 0 || k == 0 {
        return Err(Error::InvalidParams(format!(
            "bipartition factors must be positive, got n={n}, k={k}"
        )));
    }
    let w = sample_wishart(WishartParams::new(n * k, s)?, seed)?;
    let tr = w.trace();
    Ok(w.scale(1.0 / tr))
}

/// `sqrt(ds) (W / (ds) - I / d)` for a sampled Wishart matrix.
pub fn centered_wishart(p: WishartParams, seed: SeedSpec) -> Result<HermitianMatrix> {
    let w = sample_wishart(p, seed)?;
    center_wishart(&w, p.s)
}

/// Centers and rescales a given Wishart-like matrix with environment size `s`.
pub fn center_wishart(w: &HermitianMatrix, s: usize) -> Result<HermitianMatrix> {
    let p = WishartParams::new(w.dim(), s)?;
    let ds = (p.d * p.s) as f64;
    let shift = (p.s as f64 / p.d as f64).sqrt();
    let id = HermitianMatrix::identity(p.d);
    w.combine(1.0 / ds.sqrt(), &id, -shift)
}

/// How eigenvalue-only samples of a Wishart matrix are produced.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumSampler {
    /// Form `G G^*` and run the dense Hermitian eigensolver.
    Dense,
    /// Sample the equivalent real bidiagonal model and solve the
    /// `min(d, s)`-dimensional tridiagonal problem; the remaining
    /// `d - min(d, s)` eigenvalues are exact zeros. Same law as `Dense`.
    #[default]
    Bidiagonal,
}

/// Unnormalized Wishart eigenvalues, descending, with the matrix trace.
#[derive(Clone, Debug, PartialEq)]
pub struct WishartSpectrum {
    pub eigenvalues: Vec<f64>,
    pub trace: f64,
}

pub fn sample_wishart_spectrum(
    p: WishartParams,
    seed: SeedSpec,
    sampler: SpectrumSampler,
) -> Result<WishartSpectrum> {
    match sampler {
        SpectrumSampler::Dense => {
            let w = sample_wishart(p, seed)?;
            let mut eigenvalues = hermitian_eigenvalues(&w)?;
            eigenvalues.reverse();
            Ok(WishartSpectrum {
                eigenvalues,
                trace: w.trace(),
            })
        }
        SpectrumSampler::Bidiagonal => bidiagonal_spectrum(p, &mut seed.source()),
    }
}

/// Golub-Kahan bidiagonalization of a Gaussian `G` leaves a lower bidiagonal
/// `B` with independent entries `B_ii^2 ~ Gamma(p - i)` and
/// `B_{i+1,i}^2 ~ Gamma(m - 1 - i)` where `m = min(d, s)`, `p = max(d, s)`.
fn bidiagonal_spectrum(p: WishartParams, src: &mut GaussianSource) -> Result<WishartSpectrum> {
    let (m, big) = (p.d.min(p.s), p.d.max(p.s));
    let alpha2: Vec<f64> = (0..m).map(|i| src.gamma((big - i) as f64)).collect();
    let beta2: Vec<f64> = (0..m.saturating_sub(1))
        .map(|i| src.gamma((m - 1 - i) as f64))
        .collect();
    let trace = alpha2.iter().sum::<f64>() + beta2.iter().sum::<f64>();
    let mut diag = vec![0.0; m];
    let mut off = vec![0.0; m];
    for i in 0..m {
        diag[i] = alpha2[i] + if i > 0 { beta2[i - 1] } else { 0.0 };
        if i + 1 < m {
            off[i] = (alpha2[i] * beta2[i]).sqrt();
        }
    }
    symmetric_tridiagonal_eigenvalues(&mut diag, &mut off)?;
    let mut eigenvalues: Vec<f64> = diag.into_iter().rev().map(|x| x.max(0.0)).collect();
    eigenvalues.resize(p.d, 0.0);
    Ok(WishartSpectrum { eigenvalues, trace })
}
