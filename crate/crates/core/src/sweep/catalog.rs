//! Closed-form threshold catalog: for each criterion and growth regime, the
//! environment-size scaling `s ~ c * scale(n, k)` and the critical constant.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How `p` is chosen for the `LS_p` family.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LsRule {
    /// Constant `p >= 1`.
    Fixed(usize),
    /// `p = floor(sqrt(d))`, growing but `o(d)`.
    Growing,
    /// `p = floor(t d)` with `0 < t < 1`.
    Fraction(f64),
}

impl LsRule {
    /// Resolves `p` for total dimension `d`, at least 1.
    pub fn p_for(&self, d: usize) -> usize {
        let p = match *self {
            LsRule::Fixed(p) => p,
            LsRule::Growing => (d as f64).sqrt().floor() as usize,
            LsRule::Fraction(t) => (t * d as f64 + 1e-9).floor() as usize,
        };
        p.max(1)
    }
}

/// Criteria known to the catalog. `Sep`, `Rln` and `Appt` have no predicate
/// here and exist only so their catalog lookups can fail informatively.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Criterion {
    Red,
    Ppt,
    Ared,
    Ls(LsRule),
    Ger,
    Sepball,
    Sep,
    Rln,
    Appt,
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Criterion::Red => f.write_str("red"),
            Criterion::Ppt => f.write_str("ppt"),
            Criterion::Ared => f.write_str("ared"),
            Criterion::Ls(LsRule::Fixed(p)) => write!(f, "ls:{p}"),
            Criterion::Ls(LsRule::Growing) => f.write_str("ls:sqrt"),
            Criterion::Ls(LsRule::Fraction(t)) => write!(f, "ls:{t:?}"),
            Criterion::Ger => f.write_str("ger"),
            Criterion::Sepball => f.write_str("sepball"),
            Criterion::Sep => f.write_str("sep"),
            Criterion::Rln => f.write_str("rln"),
            Criterion::Appt => f.write_str("appt"),
        }
    }
}

impl FromStr for Criterion {
    type Err = Error;

    /// Accepts `red`, `ppt`, `ared`, `ger`, `sepball`, `sep`, `rln`, `appt`,
    /// and `ls:<p>` (integer), `ls:<t>` (fraction in (0, 1)), `ls:sqrt`.
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        if let Some(arg) = lower.strip_prefix("ls:") {
            return parse_ls(arg).map(Criterion::Ls);
        }
        Ok(match lower.as_str() {
            "red" => Criterion::Red,
            "ppt" => Criterion::Ppt,
            "ared" => Criterion::Ared,
            "ger" => Criterion::Ger,
            "sepball" => Criterion::Sepball,
            "sep" => Criterion::Sep,
            "rln" => Criterion::Rln,
            "appt" => Criterion::Appt,
            _ => return Err(Error::InvalidParams(format!("unknown criterion '{s}'"))),
        })
    }
}

fn parse_ls(arg: &str) -> Result<LsRule> {
    if arg == "sqrt" {
        return Ok(LsRule::Growing);
    }
    if let Ok(p) = arg.parse::<usize>() {
        if p == 0 {
            return Err(Error::InvalidParams("ls:p needs p >= 1".into()));
        }
        return Ok(LsRule::Fixed(p));
    }
    match arg.parse::<f64>() {
        Ok(t) if t > 0.0 && t < 1.0 => Ok(LsRule::Fraction(t)),
        _ => Err(Error::InvalidParams(format!(
            "ls argument '{arg}' is not an integer, a fraction in (0, 1), or 'sqrt'"
        ))),
    }
}

impl Serialize for Criterion {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Criterion {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Which dimensions grow.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegimeKind {
    /// `n = k` growing.
    Balanced,
    /// `n` fixed, `k` growing.
    FirstUnbalanced,
    /// `k` fixed, `n` growing.
    SecondUnbalanced,
    /// Only the total dimension `d` matters; cells use `n = d`, `k = 1`.
    TotalDim,
}

impl RegimeKind {
    pub fn needs_fixed(self) -> bool {
        matches!(
            self,
            RegimeKind::FirstUnbalanced | RegimeKind::SecondUnbalanced
        )
    }

    pub fn label(self) -> &'static str {
        match self {
            RegimeKind::Balanced => "balanced",
            RegimeKind::FirstUnbalanced => "first-unbalanced",
            RegimeKind::SecondUnbalanced => "second-unbalanced",
            RegimeKind::TotalDim => "total-dim",
        }
    }
}

impl fmt::Display for RegimeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for RegimeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "balanced" => Ok(RegimeKind::Balanced),
            "first-unbalanced" => Ok(RegimeKind::FirstUnbalanced),
            "second-unbalanced" => Ok(RegimeKind::SecondUnbalanced),
            "total-dim" => Ok(RegimeKind::TotalDim),
            _ => Err(Error::InvalidParams(format!("unknown regime '{s}'"))),
        }
    }
}

/// A regime together with its fixed dimension and the growing sizes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegimeSpec {
    pub kind: RegimeKind,
    #[serde(default)]
    pub fixed_param: Option<usize>,
    pub size_schedule: Vec<usize>,
}

impl RegimeSpec {
    pub fn validate(&self) -> Result<()> {
        match (self.kind.needs_fixed(), self.fixed_param) {
            (true, None) => {
                return Err(Error::InvalidParams(format!(
                    "regime {} needs a fixed dimension",
                    self.kind
                )))
            }
            (false, Some(_)) => {
                return Err(Error::InvalidParams(format!(
                    "regime {} takes no fixed dimension",
                    self.kind
                )))
            }
            (_, Some(0)) => {
                return Err(Error::InvalidParams(
                    "fixed dimension must be positive".into(),
                ))
            }
            _ => {}
        }
        if self.size_schedule.is_empty() {
            return Err(Error::InvalidParams("size schedule is empty".into()));
        }
        if self.size_schedule[0] == 0 || self.size_schedule.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParams(
                "size schedule must be positive and strictly increasing".into(),
            ));
        }
        Ok(())
    }

    /// `(n, k)` for one schedule entry.
    pub fn dims(&self, size: usize) -> (usize, usize) {
        let fixed = self.fixed_param.unwrap_or(1);
        match self.kind {
            RegimeKind::Balanced => (size, size),
            RegimeKind::FirstUnbalanced => (fixed, size),
            RegimeKind::SecondUnbalanced => (size, fixed),
            RegimeKind::TotalDim => (size, 1),
        }
    }
}

/// How the environment dimension scales with the system dimensions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    /// `s = c n`.
    N,
    /// `s = c` itself: the environment dimension does not grow.
    Fixed,
    /// `s = c n k`.
    NK,
    /// `s = c k`.
    K,
    /// `s = c min(n, k)^2 n k`.
    MinSquaredNK,
    /// `s = c (n k)^2`.
    DimSquared,
}

impl Scale {
    /// The multiplier of `c`.
    pub fn factor(self, n: usize, k: usize) -> f64 {
        let (nf, kf) = (n as f64, k as f64);
        match self {
            Scale::N => nf,
            Scale::Fixed => 1.0,
            Scale::NK => nf * kf,
            Scale::K => kf,
            Scale::MinSquaredNK => nf.min(kf).powi(2) * nf * kf,
            Scale::DimSquared => (nf * kf).powi(2),
        }
    }

    /// `floor(c * factor)`, with a `1e-9` guard against representation error
    /// in products that should be integral.
    pub fn environment_dim(self, n: usize, k: usize, c: f64) -> usize {
        (c * self.factor(n, k) + 1e-9).floor() as usize
    }
}

/// A catalogued critical value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Threshold {
    /// Critical constant `c` in `s ~ c * scale`.
    Constant(f64),
    /// Critical environment dimension that does not grow.
    FixedDim(usize),
    /// Only two-sided bounds are known: `s` between `n^lower` and
    /// `n^lower * log(n)^log_power`.
    Range { lower_exponent: u32, log_power: u32 },
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Threshold::Constant(c) => f.write_str(&crate::fmt::g17(*c)),
            Threshold::FixedDim(s) => write!(f, "{s}"),
            Threshold::Range {
                lower_exponent,
                log_power,
            } => write!(
                f,
                "n^{lower_exponent} <~ s <~ n^{lower_exponent} log^{log_power} n"
            ),
        }
    }
}

/// One catalog row.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScaleRule {
    pub criterion: Criterion,
    pub regime: RegimeKind,
    pub scale: Scale,
    pub threshold: Threshold,
}

fn fixed_of(regime: RegimeKind, fixed: Option<usize>, min: usize) -> Result<usize> {
    let m = fixed
        .ok_or_else(|| Error::InvalidParams(format!("regime {regime} needs a fixed dimension")))?;
    if m < min {
        return Err(Error::InvalidParams(format!(
            "regime {regime} needs a fixed dimension of at least {min}"
        )));
    }
    Ok(m)
}

fn missing(criterion: Criterion, regime: RegimeKind) -> Error {
    Error::NotInCatalog(format!(
        "no threshold for {criterion} in the {regime} regime"
    ))
}

/// Looks up the catalog row for `(criterion, regime)`. `fixed` is the
/// dimension held constant in the unbalanced regimes.
pub fn scale_rule(
    criterion: Criterion,
    regime: RegimeKind,
    fixed: Option<usize>,
) -> Result<ScaleRule> {
    use RegimeKind::*;
    let row = |scale, threshold| {
        Ok(ScaleRule {
            criterion,
            regime,
            scale,
            threshold,
        })
    };
    match criterion {
        Criterion::Red => match regime {
            Balanced => row(Scale::N, Threshold::Constant(1.0)),
            FirstUnbalanced => row(
                Scale::Fixed,
                Threshold::FixedDim(fixed_of(regime, fixed, 1)?),
            ),
            SecondUnbalanced => {
                let k = fixed_of(regime, fixed, 2)? as f64;
                let c = (1.0 + (k + 1.0).sqrt()).powi(2) / (k * (k - 1.0));
                row(Scale::NK, Threshold::Constant(c))
            }
            TotalDim => Err(missing(criterion, regime)),
        },
        Criterion::Ared => match regime {
            Balanced => row(Scale::NK, Threshold::Constant(1.0)),
            FirstUnbalanced => {
                let n = fixed_of(regime, fixed, 2)?;
                row(Scale::K, Threshold::Constant((n - 2) as f64))
            }
            SecondUnbalanced => {
                let k = fixed_of(regime, fixed, 1)? as f64;
                let c = (1.0 + 2.0 / k + (2.0 / k) * (k + 1.0).sqrt()).powi(2);
                row(Scale::NK, Threshold::Constant(c))
            }
            TotalDim => Err(missing(criterion, regime)),
        },
        Criterion::Ls(rule) => {
            let c = match rule {
                LsRule::Fixed(p) if p >= 2 => (1.0 + 2.0 / ((p as f64).sqrt() - 1.0)).powi(2),
                LsRule::Fixed(p) => {
                    return Err(Error::InvalidParams(format!(
                        "ls:{p} has no finite threshold; use p >= 2"
                    )))
                }
                LsRule::Growing => 1.0,
                LsRule::Fraction(t) => 1.0 - t,
            };
            row(Scale::NK, Threshold::Constant(c))
        }
        Criterion::Ger => match regime {
            Balanced => row(Scale::MinSquaredNK, Threshold::Constant(4.0)),
            FirstUnbalanced | SecondUnbalanced => {
                let m = fixed_of(regime, fixed, 1)? as f64;
                row(
                    Scale::NK,
                    Threshold::Constant((m + (m * m - 1.0).sqrt()).powi(2)),
                )
            }
            TotalDim => Err(missing(criterion, regime)),
        },
        Criterion::Sepball => row(Scale::DimSquared, Threshold::Constant(1.0)),
        Criterion::Sep => match regime {
            Balanced => row(
                Scale::N,
                Threshold::Range {
                    lower_exponent: 3,
                    log_power: 2,
                },
            ),
            _ => Err(missing(criterion, regime)),
        },
        Criterion::Ppt | Criterion::Rln | Criterion::Appt => Err(Error::NotInCatalog(format!(
            "{criterion} thresholds come from results outside this library and are not catalogued"
        ))),
    }
}

/// The critical value for `(criterion, regime)`. Rows known only up to
/// two-sided bounds report `NotInCatalog` with the bounds in the message.
pub fn predicted_threshold(
    criterion: Criterion,
    regime: RegimeKind,
    fixed: Option<usize>,
) -> Result<Threshold> {
    let rule = scale_rule(criterion, regime, fixed)?;
    match rule.threshold {
        Threshold::Range { .. } => Err(Error::NotInCatalog(format!(
            "{criterion} in the {regime} regime has no point threshold, only bounds {}",
            rule.threshold
        ))),
        t => Ok(t),
    }
}
