//! Membership tests for entanglement criteria and spectral sets.
//!
//! State-based tests (reduction, partial transpose) act on density matrices.
//! The absolute sets act on spectra only. Deterministic tests report
//! `InCertified` or `Out`; the absolutely reduction-positive test can also
//! return `InNumerical` when neither a certificate nor a witness is found.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hatmap::{self, ared_inner, SearchBudget, SimplexVector, RANK_TOL};
use crate::linalg::{
    hermitian_eigenvalues, partial_transpose, reduction_b, spectral_norm_of, Bipartition,
    ComplexMatrix, HermitianMatrix, DEFAULT_TAU,
};
use crate::sampling::gram;

const CLAMP_TOL: f64 = 1e-12;
const SPECTRUM_SUM_TOL: f64 = 1e-10;
const STATE_TRACE_TOL: f64 = 1e-8;

/// A probability vector kept in descending order, optionally tagged with the
/// bipartition it belongs to.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumVector {
    entries: Vec<f64>,
    bp: Option<Bipartition>,
}

impl SpectrumVector {
    /// Accepts entries `>= -1e-12` (clamped to zero) summing to one within
    /// `1e-10`.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        let entries = Self::clamp(values)?;
        let sum: f64 = entries.iter().sum();
        if (sum - 1.0).abs() > SPECTRUM_SUM_TOL {
            return Err(Error::InvalidSpectrum(format!("entries sum to {sum}")));
        }
        Ok(Self::sorted(entries))
    }

    /// Divides nonnegative weights by their sum.
    pub fn from_unnormalized(values: Vec<f64>) -> Result<Self> {
        let mut entries = Self::clamp(values)?;
        let sum: f64 = entries.iter().sum();
        if !(sum > 0.0) {
            return Err(Error::InvalidSpectrum("weights sum to zero".into()));
        }
        entries.iter_mut().for_each(|v| *v /= sum);
        Ok(Self::sorted(entries))
    }

    fn clamp(values: Vec<f64>) -> Result<Vec<f64>> {
        if values.is_empty() {
            return Err(Error::InvalidSpectrum("empty spectrum".into()));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < -CLAMP_TOL) {
            return Err(Error::InvalidSpectrum(format!(
                "entry {v} is negative or not finite"
            )));
        }
        Ok(values.into_iter().map(|v| v.max(0.0)).collect())
    }

    fn sorted(mut entries: Vec<f64>) -> Self {
        entries.sort_by(|a, b| b.total_cmp(a));
        Self { entries, bp: None }
    }

    /// Attaches a bipartition whose dimension must equal the length.
    pub fn with_bipartition(mut self, bp: Bipartition) -> Result<Self> {
        if bp.dim() != self.entries.len() {
            return Err(Error::Shape(format!(
                "spectrum has length {}, bipartition {}x{}",
                self.entries.len(),
                bp.n(),
                bp.k()
            )));
        }
        self.bp = Some(bp);
        Ok(self)
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn bipartition(&self) -> Option<Bipartition> {
        self.bp
    }

    /// Number of entries above `1e-12`.
    pub fn effective_rank(&self) -> usize {
        self.entries.iter().take_while(|v| **v > RANK_TOL).count()
    }

    pub fn largest(&self) -> f64 {
        self.entries[0]
    }

    /// Sum of the `p` smallest entries.
    pub fn sum_smallest(&self, p: usize) -> f64 {
        self.entries.iter().rev().take(p).sum()
    }
}

/// Three-valued membership outcome.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Status {
    InCertified,
    InNumerical,
    Out,
}

impl Status {
    pub fn is_in(self) -> bool {
        !matches!(self, Status::Out)
    }
}

/// The rule that decided a verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Certificate {
    /// Sign of the smallest eigenvalue of the mapped state.
    MinEigenvalue,
    /// Largest eigenvalue of the whitened factor against one.
    SchurComplement,
    /// A closed-form inequality on the spectrum.
    SpectralInequality,
    /// One tensor factor is trivial, so every state qualifies.
    TrivialFactor,
    /// Too few nonzero eigenvalues.
    RankBound,
    /// Largest eigenvalue at most `k + 1` times the smallest.
    EigenvalueRatio,
    /// Inner spectral set containment.
    InnerSet,
    /// Outside the outer spectral set, with an explicit witness.
    OuterSet,
    /// A witness found by numerical search.
    SearchWitness,
    /// Numerical search found no witness.
    SearchExhausted,
}

/// Outcome of a membership test. `margin` is the signed slack in the test
/// that fired; negative means violated.
#[derive(Clone, Debug, PartialEq)]
pub struct CriterionVerdict {
    pub status: Status,
    pub margin: f64,
    pub witness: Option<SimplexVector>,
    pub certificate: Certificate,
}

impl CriterionVerdict {
    fn decided(ok: bool, margin: f64, certificate: Certificate) -> Self {
        let status = if ok { Status::InCertified } else { Status::Out };
        Self {
            status,
            margin,
            witness: None,
            certificate,
        }
    }
}

fn require_state(rho: &HermitianMatrix) -> Result<()> {
    let eigs = hermitian_eigenvalues(rho)?;
    let norm = spectral_norm_of(&eigs);
    if eigs[0] < -DEFAULT_TAU * norm {
        return Err(Error::InvalidState(format!(
            "smallest eigenvalue {} is negative",
            eigs[0]
        )));
    }
    Ok(())
}

/// Decides `min eig(M) >= -tau * ||M||`.
fn psd_verdict(m: &HermitianMatrix) -> Result<CriterionVerdict> {
    let eigs = hermitian_eigenvalues(m)?;
    let margin = eigs[0];
    Ok(CriterionVerdict::decided(
        margin >= -DEFAULT_TAU * spectral_norm_of(&eigs),
        margin,
        Certificate::MinEigenvalue,
    ))
}

/// Reduction criterion: `rho_A (x) I - rho` is positive semidefinite.
/// The margin is its smallest eigenvalue.
pub fn check_red(rho: &HermitianMatrix, bp: Bipartition) -> Result<CriterionVerdict> {
    bp.check(rho)?;
    require_state(rho)?;
    psd_verdict(&reduction_b(rho, bp)?)
}

/// Positive partial transpose. The margin is the smallest eigenvalue of
/// the partial transpose.
pub fn check_ppt(rho: &HermitianMatrix, bp: Bipartition) -> Result<CriterionVerdict> {
    bp.check(rho)?;
    require_state(rho)?;
    psd_verdict(&partial_transpose(rho, bp)?)
}

/// Reduction criterion for `W = G G^*` given the factor `G` (`nk x s`).
///
/// When `s < nk` and `W_A = L L^*` is nonsingular, positivity of
/// `W_A (x) I - G G^*` is equivalent to `||(L^{-1} (x) I) G|| <= 1`, an
/// `s x s` eigenproblem. The margin is then `1 - ||(L^{-1} (x) I) G||^2`.
/// Otherwise the dense reduction is used as in [`check_red`].
pub fn check_red_factor(g: &ComplexMatrix, bp: Bipartition) -> Result<CriterionVerdict> {
    if g.rows() != bp.dim() {
        return Err(Error::Shape(format!(
            "factor has {} rows, expected {}",
            g.rows(),
            bp.dim()
        )));
    }
    if g.cols() < g.rows() {
        if let Some(v) = schur_verdict(g, bp)? {
            return Ok(v);
        }
    }
    psd_verdict(&reduction_b(&gram(g), bp)?)
}

fn schur_verdict(g: &ComplexMatrix, bp: Bipartition) -> Result<Option<CriterionVerdict>> {
    let (n, k, s) = (bp.n(), bp.k(), g.cols());
    let zero = Complex64::new(0.0, 0.0);

    let mut wa = vec![zero; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut acc = zero;
            for a in 0..k {
                let (ri, rj) = (g.row(i * k + a), g.row(j * k + a));
                acc += ri
                    .iter()
                    .zip(rj)
                    .map(|(x, y)| x * y.conj())
                    .sum::<Complex64>();
            }
            wa[i * n + j] = acc;
        }
    }
    let Some(l) = cholesky_lower(&mut wa, n) else {
        return Ok(None);
    };

    // Forward substitution on each block column: row (i, a) of Y solves
    // sum_j L[i][j] Y[(j, a)] = G[(i, a)].
    let mut y = vec![zero; k * n * s];
    for a in 0..k {
        for i in 0..n {
            let mut row: Vec<Complex64> = g.row(i * k + a).to_vec();
            for j in 0..i {
                let lij = l[i * n + j];
                let yj = &y[(j * k + a) * s..(j * k + a + 1) * s];
                row.iter_mut().zip(yj).for_each(|(r, v)| *r -= lij * v);
            }
            let inv = 1.0 / l[i * n + i].re;
            let dst = &mut y[(i * k + a) * s..(i * k + a + 1) * s];
            dst.iter_mut().zip(&row).for_each(|(d, r)| *d = r * inv);
        }
    }

    // Y^T (Y^T)^* is the entrywise conjugate of Y^* Y; same spectrum.
    let d = n * k;
    let mut yt = vec![zero; s * d];
    for r in 0..d {
        for t in 0..s {
            yt[t * d + r] = y[r * s + t];
        }
    }
    let eigs = hermitian_eigenvalues(&gram(&ComplexMatrix::from_vec(s, d, yt)?))?;
    let top = eigs[eigs.len() - 1];
    let margin = 1.0 - top;
    Ok(Some(CriterionVerdict::decided(
        margin >= -DEFAULT_TAU,
        margin,
        Certificate::SchurComplement,
    )))
}

/// In-place lower Cholesky factor of a Hermitian positive definite matrix
/// whose lower triangle is filled. `None` when a pivot is not safely
/// positive.
fn cholesky_lower(a: &mut [Complex64], n: usize) -> Option<Vec<Complex64>> {
    let scale = (0..n).map(|i| a[i * n + i].re).fold(0.0_f64, f64::max);
    for j in 0..n {
        let mut pivot = a[j * n + j].re;
        for p in 0..j {
            pivot -= a[j * n + p].norm_sqr();
        }
        if !(pivot > 1e-12 * scale) {
            return None;
        }
        let ljj = pivot.sqrt();
        a[j * n + j] = Complex64::new(ljj, 0.0);
        for i in j + 1..n {
            let mut v = a[i * n + j];
            for p in 0..j {
                v -= a[i * n + p] * a[j * n + p].conj();
            }
            a[i * n + j] = v / ljj;
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            a[i * n + j] = Complex64::new(0.0, 0.0);
        }
    }
    Some(a.to_vec())
}

/// `lambda_1 <= ` sum of the `p` smallest entries.
pub fn check_ls_p(lambda: &SpectrumVector, p: usize) -> Result<CriterionVerdict> {
    if p == 0 || p > lambda.len() {
        return Err(Error::InvalidParams(format!(
            "p = {p} outside [1, {}]",
            lambda.len()
        )));
    }
    let margin = lambda.sum_smallest(p) - lambda.largest();
    Ok(CriterionVerdict::decided(
        margin >= -DEFAULT_TAU,
        margin,
        Certificate::SpectralInequality,
    ))
}

fn resolve_bp(lambda: &SpectrumVector, bp: Option<Bipartition>) -> Result<Bipartition> {
    let bp = bp
        .or(lambda.bipartition())
        .ok_or_else(|| Error::InvalidParams("a bipartition is required".into()))?;
    if bp.dim() != lambda.len() {
        return Err(Error::Shape(format!(
            "spectrum has length {}, expected {}",
            lambda.len(),
            bp.dim()
        )));
    }
    Ok(bp)
}

/// Gershgorin-type spectral condition with `r = min(n, k)`:
/// the `r - 1` largest entries sum to at most twice the smallest plus the
/// next `r - 1` smallest.
pub fn check_ger(lambda: &SpectrumVector, bp: Option<Bipartition>) -> Result<CriterionVerdict> {
    let bp = resolve_bp(lambda, bp)?;
    let l = lambda.entries();
    let (d, r) = (l.len(), bp.min_factor());
    let lhs: f64 = l[..r - 1].iter().sum();
    let rhs = 2.0 * l[d - 1] + l[d - r..d - 1].iter().sum::<f64>();
    let margin = rhs - lhs;
    Ok(CriterionVerdict::decided(
        margin >= -DEFAULT_TAU,
        margin,
        Certificate::SpectralInequality,
    ))
}

/// Purity at most `1 / (d - 1)`.
pub fn check_sepball(lambda: &SpectrumVector) -> Result<CriterionVerdict> {
    let d = lambda.len();
    if d < 2 {
        return Err(Error::InvalidParams("dimension must be at least 2".into()));
    }
    let purity: f64 = lambda.entries().iter().map(|v| v * v).sum();
    let margin = 1.0 / (d - 1) as f64 - purity;
    Ok(CriterionVerdict::decided(
        margin >= -DEFAULT_TAU,
        margin,
        Certificate::SpectralInequality,
    ))
}

/// Absolute reduction criterion, decided by the first rule that applies:
///
/// 1. rank below `(n - 2) k + 2`: out, witnessed by `x = (1/2, 1/2)`;
/// 2. `lambda_1 <= (k + 1) lambda_min`: in;
/// 3. inside `LS_k`: in;
/// 4. outside `LS_{2k-1}`: out, with the better of `(1/2, 1/2)` and the
///    uniform vector on `min(n, k)` coordinates as witness;
/// 5. numerical search finds `x` with negative pairing: out;
/// 6. otherwise in, uncertified.
///
/// Every `Out` carries a witness whose pairing is below `-tau`.
pub fn check_ared(
    lambda: &SpectrumVector,
    bp: Option<Bipartition>,
    budget: SearchBudget,
) -> Result<CriterionVerdict> {
    let bp = resolve_bp(lambda, bp)?;
    budget.validate()?;
    let (n, k, d) = (bp.n(), bp.k(), bp.dim());
    let l = lambda.entries();
    let tau = DEFAULT_TAU;

    if bp.min_factor() == 1 {
        let margin = ared_inner(lambda, &SimplexVector::uniform(1)?, bp)?;
        return Ok(CriterionVerdict::decided(
            true,
            margin,
            Certificate::TrivialFactor,
        ));
    }

    let halves = SimplexVector::uniform(2)?;
    if lambda.effective_rank() < (n - 2) * k + 2 {
        let margin = ared_inner(lambda, &halves, bp)?;
        if margin < -tau {
            return Ok(out(margin, halves, Certificate::RankBound));
        }
    }

    let ratio_margin = (k as f64 + 1.0) * l[d - 1] - l[0];
    if ratio_margin >= 0.0 {
        return Ok(CriterionVerdict::decided(
            true,
            ratio_margin,
            Certificate::EigenvalueRatio,
        ));
    }

    let inner_margin = lambda.sum_smallest(k) - l[0];
    if inner_margin >= 0.0 {
        return Ok(CriterionVerdict::decided(
            true,
            inner_margin,
            Certificate::InnerSet,
        ));
    }

    if lambda.sum_smallest(2 * k - 1) < l[0] {
        let mut best = (ared_inner(lambda, &halves, bp)?, halves);
        let flat = SimplexVector::uniform(bp.min_factor())?;
        let v = ared_inner(lambda, &flat, bp)?;
        if v < best.0 {
            best = (v, flat);
        }
        if best.0 < -tau {
            return Ok(out(best.0, best.1, Certificate::OuterSet));
        }
    }

    let found = hatmap::search(lambda, bp, budget, Some(-tau))?;
    if found.value < -tau {
        return Ok(out(found.value, found.witness, Certificate::SearchWitness));
    }
    Ok(CriterionVerdict {
        status: Status::InNumerical,
        margin: found.value,
        witness: None,
        certificate: Certificate::SearchExhausted,
    })
}

fn out(margin: f64, witness: SimplexVector, certificate: Certificate) -> CriterionVerdict {
    CriterionVerdict {
        status: Status::Out,
        margin,
        witness: Some(witness),
        certificate,
    }
}

/// Normalized descending spectrum of a density matrix.
pub fn spectrum_of_state(rho: &HermitianMatrix) -> Result<SpectrumVector> {
    let eigs = hermitian_eigenvalues(rho)?;
    let norm = spectral_norm_of(&eigs);
    if eigs[0] < -DEFAULT_TAU * norm.max(1.0) {
        return Err(Error::InvalidState(format!(
            "smallest eigenvalue {} is negative",
            eigs[0]
        )));
    }
    let trace = rho.trace();
    if (trace - 1.0).abs() > STATE_TRACE_TOL {
        return Err(Error::InvalidState(format!("trace is {trace}")));
    }
    SpectrumVector::from_unnormalized(eigs.into_iter().map(|v| v.max(0.0)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{sample_ginibre, sample_induced_state, SeedSpec};
    use proptest::prelude::*;

    fn bp(n: usize, k: usize) -> Bipartition {
        Bipartition::new(n, k).unwrap()
    }

    fn spec(v: &[f64]) -> SpectrumVector {
        SpectrumVector::new(v.to_vec()).unwrap()
    }

    fn uniform(d: usize) -> SpectrumVector {
        spec(&vec![1.0 / d as f64; d])
    }

    fn max_entangled(n: usize) -> HermitianMatrix {
        let mut psi = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            psi[i * n + i] = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
        }
        HermitianMatrix::outer(&psi)
    }

    fn product_pure(n: usize, k: usize) -> HermitianMatrix {
        let a: Vec<Complex64> = (0..n)
            .map(|i| Complex64::new(1.0 + i as f64, 0.5 * i as f64))
            .collect();
        let b: Vec<Complex64> = (0..k)
            .map(|j| Complex64::new(0.3, 1.0 - j as f64))
            .collect();
        let mut psi: Vec<Complex64> = a
            .iter()
            .flat_map(|x| b.iter().map(move |y| x * y))
            .collect();
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        psi.iter_mut().for_each(|z| *z /= norm);
        HermitianMatrix::outer(&psi)
    }

    #[test]
    fn spectrum_vector_validation() {
        assert!(SpectrumVector::new(vec![0.5, 0.4]).is_err());
        assert!(SpectrumVector::new(vec![1.0 + 1e-12, -1e-12]).is_ok());
        assert!(SpectrumVector::new(vec![1.1, -0.1]).is_err());
        assert!(SpectrumVector::new(vec![]).is_err());
        let s = SpectrumVector::from_unnormalized(vec![1.0, 3.0]).unwrap();
        assert_eq!(s.entries(), &[0.75, 0.25]);
        assert!(s.clone().with_bipartition(bp(2, 2)).is_err());
        assert!(SpectrumVector::from_unnormalized(vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn red_examples() {
        let mixed = HermitianMatrix::identity(6).scale(1.0 / 6.0);
        let v = check_red(&mixed, bp(2, 3)).unwrap();
        assert_eq!(v.status, Status::InCertified);
        assert!((v.margin - 2.0 / 6.0).abs() < 1e-14);

        let v = check_red(&max_entangled(3), bp(3, 3)).unwrap();
        assert_eq!(v.status, Status::Out);
        assert!((v.margin + 2.0 / 3.0).abs() < 1e-12);

        let v = check_red(&product_pure(3, 2), bp(3, 2)).unwrap();
        assert!(v.status.is_in());
        assert!(v.margin.abs() < 1e-12);
    }

    #[test]
    fn ppt_examples() {
        let mixed = HermitianMatrix::identity(4).scale(0.25);
        assert_eq!(
            check_ppt(&mixed, bp(2, 2)).unwrap().status,
            Status::InCertified
        );
        for n in 2..5 {
            let v = check_ppt(&max_entangled(n), bp(n, n)).unwrap();
            assert_eq!(v.status, Status::Out);
            assert!((v.margin + 1.0 / n as f64).abs() < 1e-12);
        }
        let diag = HermitianMatrix::from_real_diagonal(&[0.1, 0.2, 0.3, 0.15, 0.05, 0.2]);
        assert!(check_ppt(&diag, bp(3, 2)).unwrap().status.is_in());
    }

    #[test]
    fn non_states_are_rejected() {
        let bad = HermitianMatrix::from_real_diagonal(&[1.5, -0.5, 0.0, 0.0]);
        assert!(matches!(
            check_red(&bad, bp(2, 2)),
            Err(Error::InvalidState(_))
        ));
        assert!(matches!(
            check_ppt(&bad, bp(2, 2)),
            Err(Error::InvalidState(_))
        ));
        assert!(matches!(check_red(&bad, bp(2, 3)), Err(Error::Shape(_))));
    }

    #[test]
    fn ls_examples() {
        let l = spec(&[0.4, 0.3, 0.2, 0.1]);
        assert_eq!(check_ls_p(&l, 2).unwrap().status, Status::Out);
        assert_eq!(check_ls_p(&l, 3).unwrap().status, Status::InCertified);
        assert!((check_ls_p(&l, 3).unwrap().margin - 0.2).abs() < 1e-15);
        for p in 1..=6 {
            assert!(check_ls_p(&uniform(6), p).unwrap().status.is_in());
        }
        assert!(check_ls_p(&l, 0).is_err());
        assert!(check_ls_p(&l, 5).is_err());
    }

    #[test]
    fn ger_examples() {
        let v = check_ger(&uniform(12), Some(bp(3, 4))).unwrap();
        assert!(v.status.is_in());
        assert!((v.margin - 2.0 / 12.0).abs() < 1e-15);
        let mut pure = vec![0.0; 9];
        pure[0] = 1.0;
        assert_eq!(
            check_ger(&spec(&pure), Some(bp(3, 3))).unwrap().status,
            Status::Out
        );
        let v = check_ger(&spec(&[0.3, 0.25, 0.25, 0.2]), Some(bp(2, 2))).unwrap();
        assert!(v.status.is_in());
        assert!((v.margin - 0.35).abs() < 1e-15);
        assert!(matches!(
            check_ger(&uniform(4), None),
            Err(Error::InvalidParams(_))
        ));
        let tagged = uniform(4).with_bipartition(bp(2, 2)).unwrap();
        assert!(check_ger(&tagged, None).is_ok());
    }

    #[test]
    fn sepball_examples() {
        assert!(check_sepball(&uniform(4)).unwrap().status.is_in());
        for d in 3..8 {
            let mut pure = vec![0.0; d];
            pure[0] = 1.0;
            assert_eq!(check_sepball(&spec(&pure)).unwrap().status, Status::Out);
        }
        // Purity (d + 2) / d^2 exceeds 1 / (d - 1) for every d >= 3.
        for d in 3..12 {
            let mut v = vec![2.0 / d as f64];
            v.extend(vec![1.0 / d as f64; d - 2]);
            v.push(0.0);
            let verdict = check_sepball(&spec(&v)).unwrap();
            assert_eq!(verdict.status, Status::Out);
            let df = d as f64;
            assert!((verdict.margin - (1.0 / (df - 1.0) - (df + 2.0) / (df * df))).abs() < 1e-15);
        }
        assert!(check_sepball(&spec(&[1.0])).is_err());
    }

    #[test]
    fn ared_examples() {
        let b = SearchBudget::default();
        let v = check_ared(&uniform(9), Some(bp(3, 3)), b).unwrap();
        assert_eq!(
            (v.status, v.certificate),
            (Status::InCertified, Certificate::EigenvalueRatio)
        );

        // n = 4, k = 2 with rank 5 < (n - 2) k + 2 = 6.
        let l = spec(&[0.3, 0.25, 0.2, 0.15, 0.1, 0.0, 0.0, 0.0]);
        let v = check_ared(&l, Some(bp(4, 2)), b).unwrap();
        assert_eq!(
            (v.status, v.certificate),
            (Status::Out, Certificate::RankBound)
        );
        assert!((v.margin + 0.15).abs() < 1e-15);

        let v = check_ared(&spec(&[0.4, 0.3, 0.2, 0.1]), Some(bp(2, 2)), b).unwrap();
        assert!(v.status.is_in());
        assert_eq!(v.certificate, Certificate::SearchExhausted);
        assert!((v.margin - (0.2 - 0.1 * 2f64.sqrt())).abs() < 1e-9);

        assert_eq!(
            check_ared(&uniform(5), Some(bp(1, 5)), b)
                .unwrap()
                .certificate,
            Certificate::TrivialFactor
        );
        assert!(matches!(
            check_ared(&uniform(5), Some(bp(2, 2)), b),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn ared_outer_set_witness() {
        // Outside LS_3 for k = 2 but of full rank.
        let l = spec(&[0.6, 0.1, 0.1, 0.1, 0.05, 0.05]);
        let v = check_ared(&l, Some(bp(3, 2)), SearchBudget::default()).unwrap();
        assert_eq!(
            (v.status, v.certificate),
            (Status::Out, Certificate::OuterSet)
        );
        let w = v.witness.unwrap();
        assert!(ared_inner(&l, &w, bp(3, 2)).unwrap() < -DEFAULT_TAU);
    }

    #[test]
    fn spectrum_of_state_examples() {
        let s = spectrum_of_state(&HermitianMatrix::identity(5).scale(0.2)).unwrap();
        assert!(s.entries().iter().all(|v| (v - 0.2).abs() < 1e-15));
        let s = spectrum_of_state(&max_entangled(2)).unwrap();
        assert!(
            (s.entries()[0] - 1.0).abs() < 1e-12 && s.entries()[1..].iter().all(|v| *v < 1e-12)
        );
        let rho = sample_induced_state(3, 3, 5, SeedSpec::new(4, 0)).unwrap();
        let s = spectrum_of_state(&rho).unwrap();
        assert!((s.entries().iter().sum::<f64>() - 1.0).abs() < 1e-10);
        assert!(spectrum_of_state(&HermitianMatrix::identity(3)).is_err());
    }

    #[test]
    fn factor_route_matches_dense_route() {
        for (n, k, s, seed) in [
            (3, 4, 2, 1),
            (4, 3, 7, 2),
            (5, 2, 9, 3),
            (2, 5, 12, 4),
            (3, 3, 20, 5),
        ] {
            for trial in 0..10 {
                let g = sample_ginibre(n * k, s, SeedSpec::new(seed, trial)).unwrap();
                let fast = check_red_factor(&g, bp(n, k)).unwrap();
                let w = gram(&g);
                let rho = w.scale(1.0 / w.trace());
                let dense = check_red(&rho, bp(n, k)).unwrap();
                assert_eq!(fast.status, dense.status, "n={n} k={k} s={s} trial={trial}");
                assert_eq!(fast.margin > 0.0, dense.margin > 0.0);
            }
        }
    }

    #[test]
    fn cholesky_rejects_singular() {
        let mut a = vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
        ];
        assert!(cholesky_lower(&mut a, 2).is_none());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn ls_nesting(w in prop::collection::vec(0.0f64..1.0, 2..16), p in 1usize..16, q in 1usize..16) {
            prop_assume!(w.iter().sum::<f64>() > 0.0);
            let l = SpectrumVector::from_unnormalized(w).unwrap();
            let (p, q) = (p.min(q).min(l.len()), p.max(q).min(l.len()));
            if check_ls_p(&l, p).unwrap().status.is_in() {
                prop_assert!(check_ls_p(&l, q).unwrap().status.is_in());
            }
        }

        #[test]
        fn ared_respects_sandwich(w in prop::collection::vec(0.0f64..1.0, 6), skew in 0.0f64..8.0) {
            let mut w = w;
            w[0] += skew;
            prop_assume!(w.iter().sum::<f64>() > 0.0);
            let l = SpectrumVector::from_unnormalized(w).unwrap();
            let b = bp(3, 2);
            let v = check_ared(&l, Some(b), SearchBudget::default()).unwrap();
            if check_ls_p(&l, 2).unwrap().status.is_in() {
                prop_assert!(v.status.is_in());
            }
            if !check_ls_p(&l, 3).unwrap().status.is_in() {
                prop_assert_eq!(v.status, Status::Out);
            }
            if v.status == Status::Out {
                let x = v.witness.unwrap();
                prop_assert!(ared_inner(&l, &x, b).unwrap() < -DEFAULT_TAU);
            }
        }
    }
}
