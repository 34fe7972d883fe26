//! Monte Carlo estimates of the probability that a random induced state
//! satisfies a criterion, over grids of dimensions and scaling constants.
//!
//! Trial `t` of every cell draws from `SeedSpec::new(master_seed, t)`, so a
//! sweep is reproducible from its master seed and cells at different `c`
//! share random streams. Trials run in parallel and are reduced in trial
//! order.

mod catalog;
mod plot;

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use catalog::{
    predicted_threshold, scale_rule, Criterion, LsRule, RegimeKind, RegimeSpec, Scale, ScaleRule,
    Threshold,
};
pub use plot::plot_script;

use crate::criteria::{
    check_ared, check_ger, check_ls_p, check_red_factor, check_sepball, SpectrumVector, Status,
};
use crate::error::{Error, Result};
use crate::fmt::g17;
use crate::hatmap::SearchBudget;
use crate::linalg::Bipartition;
use crate::sampling::{
    sample_ginibre, sample_wishart_spectrum, SeedSpec, SpectrumSampler, WishartParams,
};

/// Default cap on `d * s`, the entry count of one Ginibre factor.
pub const DEFAULT_MAX_ENTRIES: u64 = 200_000_000;
/// Environment variable overriding [`DEFAULT_MAX_ENTRIES`].
pub const MAX_ENTRIES_ENV: &str = "ET_MAX_ENTRIES";

/// Resource limits applied before any sampling.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SweepLimits {
    pub max_entries: u64,
}

impl Default for SweepLimits {
    fn default() -> Self {
        Self {
            max_entries: DEFAULT_MAX_ENTRIES,
        }
    }
}

impl SweepLimits {
    /// Reads [`MAX_ENTRIES_ENV`] if set.
    pub fn from_env() -> Result<Self> {
        match std::env::var(MAX_ENTRIES_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .map(|max_entries| Self { max_entries })
                .map_err(|_| {
                    Error::InvalidParams(format!(
                        "{MAX_ENTRIES_ENV}='{v}' is not a positive integer"
                    ))
                }),
            Err(_) => Ok(Self::default()),
        }
    }

    fn check(&self, d: usize, s: usize) -> Result<()> {
        let entries = d as u64 * s as u64;
        if entries > self.max_entries {
            return Err(Error::ResourceLimit(format!(
                "d * s = {d} * {s} = {entries} exceeds the cap of {} entries (set {MAX_ENTRIES_ENV} to raise it)",
                self.max_entries
            )));
        }
        Ok(())
    }
}

/// One cell of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub criterion: Criterion,
    pub regime: RegimeKind,
    pub n: usize,
    pub k: usize,
    pub s: usize,
    pub c: f64,
    pub trials: usize,
    pub successes: usize,
    /// `NaN` when `trials == 0`, as are the interval bounds.
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Successes that are uncertified (`InNumerical`).
    pub undecided: usize,
    pub master_seed: u64,
}

/// Rows ordered by size, then `c`.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

pub const CSV_HEADER: [&str; 13] = [
    "criterion",
    "regime",
    "n",
    "k",
    "s",
    "c",
    "trials",
    "successes",
    "p_hat",
    "ci_low",
    "ci_high",
    "undecided",
    "master_seed",
];

impl SweepResult {
    /// Writes the rows as CSV with a header line; floats use 17 significant
    /// digits and lines end in LF.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(CSV_HEADER)?;
        for r in &self.rows {
            w.write_record([
                r.criterion.to_string(),
                r.regime.to_string(),
                r.n.to_string(),
                r.k.to_string(),
                r.s.to_string(),
                g17(r.c),
                r.trials.to_string(),
                r.successes.to_string(),
                g17(r.p_hat),
                g17(r.ci_low),
                g17(r.ci_high),
                r.undecided.to_string(),
                r.master_seed.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Wilson score interval at normal quantile `z`, clamped to `[0, 1]`.
pub fn wilson_interval(successes: usize, trials: usize, z: f64) -> Result<(f64, f64)> {
    if trials == 0 {
        return Err(Error::InvalidParams(
            "Wilson interval needs at least one trial".into(),
        ));
    }
    if successes > trials {
        return Err(Error::InvalidParams(format!(
            "{successes} successes in {trials} trials"
        )));
    }
    if !(z > 0.0) {
        return Err(Error::InvalidParams("z must be positive".into()));
    }
    let nf = trials as f64;
    let p = successes as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    // Exact endpoints at p in {0, 1} are otherwise off by rounding.
    let low = if successes == 0 {
        0.0
    } else {
        (center - half).max(0.0)
    };
    let high = if successes == trials {
        1.0
    } else {
        (center + half).min(1.0)
    };
    Ok((low.min(p), high.max(p)))
}

/// Normal quantile for a two-sided 95% interval.
pub const Z95: f64 = 1.959963984540054;

fn trial_status(
    rule: &ScaleRule,
    bp: Bipartition,
    s: usize,
    seed: SeedSpec,
    budget: SearchBudget,
) -> Result<Status> {
    let d = bp.dim();
    if rule.criterion == Criterion::Red {
        let g = sample_ginibre(d, s, seed)?;
        return Ok(check_red_factor(&g, bp)?.status);
    }
    let w = sample_wishart_spectrum(WishartParams::new(d, s)?, seed, SpectrumSampler::Bidiagonal)?;
    let lambda = SpectrumVector::from_unnormalized(w.eigenvalues)?;
    let verdict = match rule.criterion {
        Criterion::Ared => check_ared(&lambda, Some(bp), budget)?,
        Criterion::Ls(ls) => check_ls_p(&lambda, ls.p_for(d))?,
        Criterion::Ger => check_ger(&lambda, Some(bp))?,
        Criterion::Sepball => check_sepball(&lambda)?,
        other => {
            return Err(Error::NotInCatalog(format!(
                "{other} has no sampling predicate"
            )));
        }
    };
    Ok(verdict.status)
}

/// Estimates the success probability for one `(n, k, c)` cell of a catalog
/// row with `trials` independent samples.
#[allow(clippy::too_many_arguments)]
pub fn run_cell(
    rule: &ScaleRule,
    n: usize,
    k: usize,
    c: f64,
    trials: usize,
    master_seed: u64,
    budget: SearchBudget,
    limits: SweepLimits,
) -> Result<SweepRow> {
    let (bp, s) = cell_shape(rule, n, k, c)?;
    limits.check(bp.dim(), s)?;
    budget.validate()?;
    let statuses = (0..trials as u64)
        .into_par_iter()
        .map(|t| trial_status(rule, bp, s, SeedSpec::new(master_seed, t), budget))
        .collect::<Result<Vec<Status>>>()?;
    let successes = statuses.iter().filter(|s| s.is_in()).count();
    let undecided = statuses
        .iter()
        .filter(|s| **s == Status::InNumerical)
        .count();
    let (p_hat, (ci_low, ci_high)) = if trials == 0 {
        (f64::NAN, (f64::NAN, f64::NAN))
    } else {
        (
            successes as f64 / trials as f64,
            wilson_interval(successes, trials, Z95)?,
        )
    };
    Ok(SweepRow {
        criterion: rule.criterion,
        regime: rule.regime,
        n,
        k,
        s,
        c,
        trials,
        successes,
        p_hat,
        ci_low,
        ci_high,
        undecided,
        master_seed,
    })
}

fn cell_shape(rule: &ScaleRule, n: usize, k: usize, c: f64) -> Result<(Bipartition, usize)> {
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::InvalidParams(format!(
            "c = {c} must be positive and finite"
        )));
    }
    let bp = Bipartition::new(n, k)?;
    let s = rule.scale.environment_dim(n, k, c);
    if s == 0 {
        return Err(Error::InvalidParams(format!(
            "c = {c} gives environment dimension 0 at n = {n}, k = {k}"
        )));
    }
    Ok((bp, s))
}

/// A full sweep: one catalog row over a size schedule and a grid of `c`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub criterion: Criterion,
    pub regime: RegimeSpec,
    pub c_grid: Vec<f64>,
    pub trials: usize,
    pub master_seed: u64,
    #[serde(default)]
    pub budget: SearchBudget,
}

impl SweepConfig {
    /// The catalog row this sweep samples.
    pub fn rule(&self) -> Result<ScaleRule> {
        scale_rule(self.criterion, self.regime.kind, self.regime.fixed_param)
    }

    /// Validates everything, including the resource cap of every cell,
    /// without sampling.
    pub fn validate(&self, limits: SweepLimits) -> Result<ScaleRule> {
        self.regime.validate()?;
        self.budget.validate()?;
        if self.c_grid.is_empty() {
            return Err(Error::InvalidParams("c grid is empty".into()));
        }
        let mut sorted = self.c_grid.clone();
        sorted.sort_by(f64::total_cmp);
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParams("c grid contains duplicates".into()));
        }
        let rule = self.rule()?;
        if matches!(rule.threshold, Threshold::Range { .. }) {
            return Err(Error::NotInCatalog(format!(
                "{} has no sampling predicate",
                rule.criterion
            )));
        }
        for &size in &self.regime.size_schedule {
            let (n, k) = self.regime.dims(size);
            for &c in &sorted {
                let (bp, s) = cell_shape(&rule, n, k, c)?;
                limits.check(bp.dim(), s)?;
                if let Criterion::Ls(ls) = rule.criterion {
                    if ls.p_for(bp.dim()) > bp.dim() {
                        return Err(Error::InvalidParams(format!(
                            "{} needs p <= d = {}",
                            rule.criterion,
                            bp.dim()
                        )));
                    }
                }
            }
        }
        Ok(rule)
    }
}

/// Runs every `(size, c)` cell; rows are ordered by size then increasing `c`.
pub fn run_sweep(config: &SweepConfig, limits: SweepLimits) -> Result<SweepResult> {
    let rule = config.validate(limits)?;
    let mut grid = config.c_grid.clone();
    grid.sort_by(f64::total_cmp);
    let mut rows = Vec::new();
    for &size in &config.regime.size_schedule {
        let (n, k) = config.regime.dims(size);
        for &c in &grid {
            rows.push(run_cell(
                &rule,
                n,
                k,
                c,
                config.trials,
                config.master_seed,
                config.budget,
                limits,
            )?);
        }
    }
    Ok(SweepResult { rows })
}
