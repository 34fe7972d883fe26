//! The hat map: for a probability vector `x` of length `r <= min(n, k)`,
//! `hat(x)` is the spectrum of the reduction of the pure state
//! `psi = sum_i sqrt(x_i) e_i (x) f_i`, written in closed form through the
//! roots of the secular equation `sum_i x_i / (x_i - eta) = 1`.
//!
//! A spectrum `lambda` lies in the absolutely reduction-positive set exactly
//! when `<lambda desc, hat(x) asc>` is nonnegative for every such `x`.

use serde::{Deserialize, Serialize};

use crate::criteria::SpectrumVector;
use crate::error::{Error, Result};
use crate::linalg::Bipartition;
use crate::optim::nelder_mead;
use crate::sampling::GaussianSource;

/// Entries at or below this value are treated as exact zeros.
pub const RANK_TOL: f64 = 1e-12;
/// Adjacent entries closer than this share a coincidence root.
pub const COINCIDENCE_GAP: f64 = 1e-13;
const SUM_TOL: f64 = 1e-9;

/// A probability vector stored in descending order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SimplexVector {
    entries: Vec<f64>,
}

impl SimplexVector {
    /// Sorts, clamps entries in `[-1e-12, 0)` to zero and renormalizes.
    /// Rejects empty input, non-finite or negative entries, and sums off
    /// by more than `1e-9`.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSimplex("empty vector".into()));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < -RANK_TOL) {
            return Err(Error::InvalidSimplex(format!(
                "entry {v} is negative or not finite"
            )));
        }
        let mut entries: Vec<f64> = values.into_iter().map(|v| v.max(0.0)).collect();
        let sum: f64 = entries.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidSimplex(format!("entries sum to {sum}")));
        }
        entries.iter_mut().for_each(|v| *v /= sum);
        entries.sort_by(|a, b| b.total_cmp(a));
        Ok(Self { entries })
    }

    /// `(1/r, ..., 1/r)`.
    pub fn uniform(r: usize) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidSimplex("empty vector".into()));
        }
        Ok(Self {
            entries: vec![1.0 / r as f64; r],
        })
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

    /// Number of entries above [`RANK_TOL`].
    pub fn effective_rank(&self) -> usize {
        self.entries.iter().take_while(|v| **v > RANK_TOL).count()
    }

    /// The entries above [`RANK_TOL`], descending.
    pub fn support(&self) -> &[f64] {
        &self.entries[..self.effective_rank()]
    }
}

impl TryFrom<Vec<f64>> for SimplexVector {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<SimplexVector> for Vec<f64> {
    fn from(x: SimplexVector) -> Vec<f64> {
        x.entries
    }
}

/// `x` together with its secular roots and the assembled hat vector.
#[derive(Clone, Debug, PartialEq)]
pub struct HatDecomposition {
    pub x: SimplexVector,
    pub n: usize,
    pub k: usize,
    /// `eta_1 >= ... >= eta_r` over the effective support, `eta_r <= 0`.
    pub etas: Vec<f64>,
    /// Length `n k`, descending.
    pub hat: Vec<f64>,
}

struct Group {
    value: f64,
    weight: f64,
}

/// Roots of `sum_i x_i / (x_i - eta) = 1`, descending, one per support entry.
pub fn secular_roots(x: &SimplexVector) -> Vec<f64> {
    let support = x.support();
    let r = support.len();
    if r == 1 {
        return vec![0.0];
    }

    let mut groups: Vec<Group> = Vec::with_capacity(r);
    let mut multiplicity: Vec<usize> = Vec::with_capacity(r);
    for &v in support {
        match groups.last_mut() {
            Some(g) if g.value - v <= COINCIDENCE_GAP => {
                g.weight += v;
                *multiplicity.last_mut().unwrap() += 1;
            }
            _ => {
                groups.push(Group {
                    value: v,
                    weight: v,
                });
                multiplicity.push(1);
            }
        }
    }
    // A merged group behaves like a single pole of the combined weight.
    for (g, &m) in groups.iter_mut().zip(&multiplicity) {
        let mean = g.weight / m as f64;
        g.value = mean;
    }

    let mut roots = Vec::with_capacity(r);
    for (gi, g) in groups.iter().enumerate() {
        roots.extend(std::iter::repeat_n(g.value, multiplicity[gi] - 1));
        let lo = match groups.get(gi + 1) {
            Some(next) => next.value,
            None => -1.0,
        };
        let hi = if gi + 1 < groups.len() { g.value } else { 0.0 };
        roots.push(bracketed_root(&groups, lo, hi));
    }
    roots
}

/// The secular function minus one and its derivative.
fn secular(groups: &[Group], eta: f64) -> (f64, f64) {
    let (mut f, mut df) = (-1.0, 0.0);
    for g in groups {
        let t = 1.0 / (g.value - eta);
        f += g.weight * t;
        df += g.weight * t * t;
    }
    (f, df)
}

/// The secular function increases on every pole-free interval, so each
/// bracket `(lo, hi)` with `f(lo+) < 0 < f(hi-)` has exactly one root.
/// Newton steps are taken when they stay inside the current bracket.
fn bracketed_root(groups: &[Group], lo: f64, hi: f64) -> f64 {
    let (mut a, mut b) = (lo, hi);
    let mut x = 0.5 * (a + b);
    for _ in 0..200 {
        let (f, df) = secular(groups, x);
        if f == 0.0 {
            return x;
        }
        if f < 0.0 {
            a = x;
        } else {
            b = x;
        }
        let newton = x - f / df;
        let next = if newton > a && newton < b {
            newton
        } else {
            0.5 * (a + b)
        };
        if next == x || b - a <= f64::EPSILON * x.abs().max(f64::MIN_POSITIVE) {
            return next;
        }
        x = next;
    }
    x
}

fn check_rank(x: &SimplexVector, bp: Bipartition) -> Result<usize> {
    let r = x.effective_rank();
    if r > bp.min_factor() {
        return Err(Error::RankTooLarge {
            rank: r,
            limit: bp.min_factor(),
        });
    }
    Ok(r)
}

/// Computes the secular roots of `x` and lays out `hat(x)` in descending
/// order: each `x_i` repeated `k - 1` times followed by `eta_i`, then
/// `(n - r) k` zeros, then `eta_r`.
pub fn hat_decomposition(x: &SimplexVector, bp: Bipartition) -> Result<HatDecomposition> {
    let r = check_rank(x, bp)?;
    let (n, k) = (bp.n(), bp.k());
    let etas = secular_roots(x);
    let support = x.support();
    let mut hat = Vec::with_capacity(n * k);
    for i in 0..r {
        hat.extend(std::iter::repeat_n(support[i], k - 1));
        if i + 1 < r {
            hat.push(etas[i]);
        }
    }
    hat.extend(std::iter::repeat_n(0.0, (n - r) * k));
    hat.push(etas[r - 1]);
    Ok(HatDecomposition {
        x: x.clone(),
        n,
        k,
        etas,
        hat,
    })
}

/// `hat(x)` as a length `n k` vector in descending order.
pub fn hat_vector(x: &SimplexVector, bp: Bipartition) -> Result<Vec<f64>> {
    Ok(hat_decomposition(x, bp)?.hat)
}

fn check_shape(lambda: &SpectrumVector, bp: Bipartition) -> Result<()> {
    if lambda.len() != bp.dim() {
        return Err(Error::Shape(format!(
            "spectrum has length {}, expected {}",
            lambda.len(),
            bp.dim()
        )));
    }
    Ok(())
}

/// `<lambda desc, hat(x) asc>`.
pub fn ared_inner(lambda: &SpectrumVector, x: &SimplexVector, bp: Bipartition) -> Result<f64> {
    check_shape(lambda, bp)?;
    let mut hat = hat_vector(x, bp)?;
    hat.sort_by(|a, b| a.total_cmp(b));
    Ok(lambda.entries().iter().zip(&hat).map(|(l, h)| l * h).sum())
}

/// Evaluates `<lambda desc, hat(x) asc>` in `O(r^2)` per call using prefix
/// sums of `lambda` in ascending order. `hat(x)` in descending layout pairs
/// position `p` with the `p`-th smallest eigenvalue.
struct InnerEvaluator {
    bp: Bipartition,
    /// `ascending_prefix[p]` is the sum of the `p` smallest entries.
    ascending_prefix: Vec<f64>,
    ascending: Vec<f64>,
}

impl InnerEvaluator {
    fn new(lambda: &SpectrumVector, bp: Bipartition) -> Self {
        let ascending: Vec<f64> = lambda.entries().iter().rev().copied().collect();
        let mut ascending_prefix = Vec::with_capacity(ascending.len() + 1);
        ascending_prefix.push(0.0);
        let mut acc = 0.0;
        for v in &ascending {
            acc += v;
            ascending_prefix.push(acc);
        }
        Self {
            bp,
            ascending_prefix,
            ascending,
        }
    }

    fn eval(&self, x: &SimplexVector) -> f64 {
        let k = self.bp.k();
        let support = x.support();
        let r = support.len();
        let etas = secular_roots(x);
        let d = self.ascending.len();
        let mut total = 0.0;
        for (i, &xi) in support.iter().enumerate() {
            let start = i * k;
            total += xi * (self.ascending_prefix[start + k - 1] - self.ascending_prefix[start]);
            if i + 1 < r {
                total += etas[i] * self.ascending[start + k - 1];
            }
        }
        total + etas[r - 1] * self.ascending[d - 1]
    }
}

/// Budget for the multi-start search in [`ared_min_inner`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchBudget {
    /// Dirichlet(1, ..., 1) starting points per rank.
    pub random_starts: usize,
    /// Iteration cap for each local descent.
    pub max_iters: usize,
    pub seed: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            random_starts: 2,
            max_iters: 400,
            seed: 0,
        }
    }
}

impl SearchBudget {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::InvalidParams("max_iters must be positive".into()));
        }
        Ok(())
    }
}

/// Smallest inner product found and the vector attaining it.
#[derive(Clone, Debug, PartialEq)]
pub struct SearchResult {
    pub value: f64,
    pub witness: SimplexVector,
}

impl SearchResult {
    fn better_than(&self, other: &SearchResult) -> bool {
        match self.value.total_cmp(&other.value) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Greater => false,
            std::cmp::Ordering::Equal => {
                let lex = self
                    .witness
                    .entries()
                    .iter()
                    .zip(other.witness.entries())
                    .map(|(a, b)| a.total_cmp(b))
                    .find(|o| o.is_ne());
                lex.map(|o| o.is_lt())
                    .unwrap_or(self.witness.len() < other.witness.len())
            }
        }
    }
}

const DESCENT_FTOL: f64 = 1e-12;

/// Maps unconstrained coordinates to the simplex of dimension `len + 1`,
/// with the last logit pinned at zero.
fn softmax(theta: &[f64]) -> SimplexVector {
    let top = theta.iter().copied().fold(0.0_f64, f64::max);
    let mut w: Vec<f64> = theta.iter().map(|t| (t - top).exp()).collect();
    w.push((-top).exp());
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= s);
    SimplexVector::new(w).expect("softmax output lies on the simplex")
}

fn logits(x: &[f64]) -> Vec<f64> {
    let last = x[x.len() - 1].max(f64::MIN_POSITIVE);
    x[..x.len() - 1]
        .iter()
        .map(|v| (v.max(f64::MIN_POSITIVE) / last).ln())
        .collect()
}

/// Minimizes `<lambda desc, hat(x) asc>` over uniform vectors of every rank
/// up to `min(n, k)`, Dirichlet samples per rank, and Nelder-Mead descents
/// in softmax coordinates from each of those starts.
pub fn ared_min_inner(
    lambda: &SpectrumVector,
    bp: Bipartition,
    budget: SearchBudget,
) -> Result<SearchResult> {
    search(lambda, bp, budget, None)
}

/// Like [`ared_min_inner`] but returns as soon as a value below `stop_below`
/// is found.
pub(crate) fn search(
    lambda: &SpectrumVector,
    bp: Bipartition,
    budget: SearchBudget,
    stop_below: Option<f64>,
) -> Result<SearchResult> {
    check_shape(lambda, bp)?;
    budget.validate()?;
    let eval = InnerEvaluator::new(lambda, bp);
    let mut src = GaussianSource::from_seed(budget.seed);
    let mut best: Option<SearchResult> = None;
    let offer = |cand: SearchResult, best: &mut Option<SearchResult>| {
        if best.as_ref().is_none_or(|b| cand.better_than(b)) {
            *best = Some(cand);
        }
    };
    let done = |best: &Option<SearchResult>| match (best, stop_below) {
        (Some(b), Some(t)) => b.value < t,
        _ => false,
    };

    for r in 1..=bp.min_factor() {
        let mut starts = vec![SimplexVector::uniform(r)?];
        for _ in 0..budget.random_starts {
            let w: Vec<f64> = (0..r).map(|_| -(1.0 - src.uniform()).ln()).collect();
            let s: f64 = w.iter().sum();
            starts.push(SimplexVector::new(w.into_iter().map(|v| v / s).collect())?);
        }
        for start in starts {
            let value = eval.eval(&start);
            offer(
                SearchResult {
                    value,
                    witness: start.clone(),
                },
                &mut best,
            );
            if done(&best) {
                return Ok(best.unwrap());
            }
            if r == 1 {
                continue;
            }
            let mut objective = |theta: &[f64]| eval.eval(&softmax(theta));
            let m = nelder_mead(
                &mut objective,
                &logits(start.entries()),
                1.0,
                DESCENT_FTOL,
                budget.max_iters,
            );
            offer(
                SearchResult {
                    value: m.value,
                    witness: softmax(&m.point),
                },
                &mut best,
            );
            if done(&best) {
                return Ok(best.unwrap());
            }
        }
    }
    let result = best.expect("at least one candidate per rank");
    debug_assert!((eval.eval(&result.witness) - result.value).abs() < 1e-12);
    Ok(result)
}
