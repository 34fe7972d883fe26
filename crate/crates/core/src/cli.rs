//! Command-line front end. Parsing and dispatch live here; `main` only maps
//! errors to exit codes.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid input, 3 no catalog
//! entry, 4 resource limit.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::criteria::{
    check_ared, check_ger, check_ls_p, check_ppt, check_red, check_sepball, spectrum_of_state,
    CriterionVerdict, SpectrumVector,
};
use crate::error::{Error, Result};
use crate::fmt::g17;
use crate::hatmap::{hat_decomposition, SearchBudget, SimplexVector};
use crate::linalg::{Bipartition, HermitianMatrix};
use crate::sampling::{sample_induced_state, SeedSpec};
use crate::spectra::MpLaw;
use crate::sweep::{
    plot_script, predicted_threshold, run_sweep, Criterion, RegimeKind, RegimeSpec, SweepConfig,
    SweepLimits, Threshold,
};

#[derive(Debug, Parser)]
#[command(
    name = "ethresh",
    version,
    about = "Random induced states, entanglement criteria and threshold sweeps"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a random induced state and print its spectrum or matrix.
    Sample(SampleArgs),
    /// Test a state or spectrum against a criterion; prints a JSON verdict.
    Check(CheckArgs),
    /// Print the secular roots and hat vector of a probability vector.
    Hat(HatArgs),
    /// Evaluate the Marchenko-Pastur law.
    Mp(MpArgs),
    /// Print the catalogued threshold for a criterion and regime.
    Threshold(ThresholdArgs),
    /// Run a Monte Carlo threshold sweep and write CSV.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    Spectrum,
    Matrix,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub s: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Emit::Spectrum)]
    pub emit: Emit,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    /// Random starts per rank in the numerical search.
    #[arg(long, default_value_t = SearchBudget::default().random_starts)]
    pub starts: usize,
    /// Iteration cap of each local descent.
    #[arg(long, default_value_t = SearchBudget::default().max_iters)]
    pub max_iters: usize,
    #[arg(long, default_value_t = SearchBudget::default().seed)]
    pub search_seed: u64,
}

impl SearchArgs {
    fn budget(&self) -> SearchBudget {
        SearchBudget {
            random_starts: self.starts,
            max_iters: self.max_iters,
            seed: self.search_seed,
        }
    }
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// red, ppt, ared, ls:<p>, ger or sepball.
    #[arg(long)]
    pub criterion: String,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    /// Spectrum (one value per line) or matrix JSON as written by `sample`.
    #[arg(long, conflicts_with = "sample")]
    pub input: Option<PathBuf>,
    /// Sample the state instead of reading it.
    #[arg(long, requires = "s")]
    pub sample: bool,
    #[arg(long)]
    pub s: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub search: SearchArgs,
}

#[derive(Debug, Args)]
pub struct HatArgs {
    /// Comma-separated probability vector.
    #[arg(
        long,
        value_delimiter = ',',
        allow_negative_numbers = true,
        required = true
    )]
    pub x: Vec<f64>,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
}

#[derive(Debug, Args)]
#[group(id = "query", required = true, multiple = false)]
pub struct MpQuery {
    /// Print the limits of the smallest and largest eigenvalue.
    #[arg(long, group = "query")]
    pub edges: bool,
    #[arg(long, group = "query", allow_negative_numbers = true)]
    pub quantile: Option<f64>,
    #[arg(long, group = "query", allow_negative_numbers = true)]
    pub cdf: Option<f64>,
    #[arg(long, group = "query", allow_negative_numbers = true)]
    pub density: Option<f64>,
}

#[derive(Debug, Args)]
pub struct MpArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub c: f64,
    #[command(flatten)]
    pub query: MpQuery,
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    #[arg(long)]
    pub criterion: String,
    /// balanced, first-unbalanced, second-unbalanced or total-dim.
    #[arg(long, default_value = "balanced")]
    pub regime: String,
    /// The dimension held fixed in the unbalanced regimes.
    #[arg(long)]
    pub fixed: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// JSON sweep configuration; replaces the sweep flags below.
    #[arg(long, conflicts_with_all = ["criterion", "regime", "fixed", "sizes", "c_grid", "trials", "seed"])]
    pub config: Option<PathBuf>,
    #[arg(long, required_unless_present = "config")]
    pub criterion: Option<String>,
    #[arg(long, required_unless_present = "config")]
    pub regime: Option<String>,
    #[arg(long)]
    pub fixed: Option<usize>,
    /// Comma-separated growing dimensions.
    #[arg(long, value_delimiter = ',', required_unless_present = "config")]
    pub sizes: Vec<usize>,
    /// Comma-separated scaling constants.
    #[arg(long, value_delimiter = ',', required_unless_present = "config")]
    pub c_grid: Vec<f64>,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write a gnuplot script over the CSV (requires --out).
    #[arg(long, requires = "out")]
    pub plot_script: Option<PathBuf>,
    #[command(flatten)]
    pub search: SearchArgs,
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code. Errors are reported on stderr.
pub fn run_from<I, T>(args: I, stdout: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: Cli, out: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Sample(a) => cmd_sample(a, out),
        Command::Check(a) => cmd_check(a, out),
        Command::Hat(a) => cmd_hat(a, out),
        Command::Mp(a) => cmd_mp(a, out),
        Command::Threshold(a) => cmd_threshold(a, out),
        Command::Sweep(a) => cmd_sweep(a, out),
    }
}

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn json_line(v: &Value) -> String {
    let mut s = serde_json::to_string(v).expect("values are serializable");
    s.push('\n');
    s
}

fn matrix_json(m: &HermitianMatrix, bp: Bipartition) -> Value {
    let entries: Vec<Value> = m.data().iter().map(|z| json!([z.re, z.im])).collect();
    json!({ "n": bp.n(), "k": bp.k(), "dim": m.dim(), "entries": entries })
}

fn parse_matrix_json(text: &str, bp: Bipartition) -> Result<HermitianMatrix> {
    let v: Value = serde_json::from_str(text)?;
    let entries = v
        .get("entries")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("matrix JSON needs an 'entries' array".into()))?;
    let data = entries
        .iter()
        .map(|e| {
            match e.as_array().map(|p| {
                (
                    p.len(),
                    p.first().and_then(Value::as_f64),
                    p.get(1).and_then(Value::as_f64),
                )
            }) {
                Some((2, Some(re), Some(im))) => Ok(Complex64::new(re, im)),
                _ => Err(Error::Parse("each entry must be a [re, im] pair".into())),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let dim = bp.dim();
    if data.len() != dim * dim {
        return Err(Error::Shape(format!(
            "matrix has {} entries, expected {}",
            data.len(),
            dim * dim
        )));
    }
    HermitianMatrix::new(dim, data)
}

fn parse_spectrum_lines(text: &str) -> Result<Vec<f64>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(|l| {
            l.parse::<f64>()
                .map_err(|_| Error::Parse(format!("'{l}' is not a number")))
        })
        .collect()
}

fn cmd_sample(a: SampleArgs, out: &mut dyn Write) -> Result<()> {
    let bp = Bipartition::new(a.n, a.k)?;
    let rho = sample_induced_state(a.n, a.k, a.s, SeedSpec::new(a.seed, 0))?;
    let text = match a.emit {
        Emit::Spectrum => spectrum_of_state(&rho)?
            .entries()
            .iter()
            .map(|v| g17(*v) + "\n")
            .collect(),
        Emit::Matrix => json_line(&matrix_json(&rho, bp)),
    };
    emit(out, a.out.as_deref(), &text)
}

enum Input {
    State(HermitianMatrix),
    Spectrum(SpectrumVector),
}

fn verdict_json(v: &CriterionVerdict) -> Value {
    let mut obj = json!({
        "status": v.status,
        "margin": v.margin,
        "certificate": v.certificate,
    });
    if let Some(w) = &v.witness {
        obj["witness"] = json!(w.entries());
    }
    obj
}

fn cmd_check(a: CheckArgs, out: &mut dyn Write) -> Result<()> {
    let bp = Bipartition::new(a.n, a.k)?;
    let criterion: Criterion = a.criterion.parse()?;
    let budget = a.search.budget();
    budget.validate()?;

    let input = match (&a.input, a.sample) {
        (Some(path), _) => {
            let text = fs::read_to_string(path)?;
            if text.trim_start().starts_with('{') {
                Input::State(parse_matrix_json(&text, bp)?)
            } else {
                Input::Spectrum(
                    SpectrumVector::new(parse_spectrum_lines(&text)?)?.with_bipartition(bp)?,
                )
            }
        }
        (None, true) => {
            let s = a.s.expect("clap enforces --s with --sample");
            Input::State(sample_induced_state(a.n, a.k, s, SeedSpec::new(a.seed, 0))?)
        }
        (None, false) => {
            return Err(Error::InvalidParams(
                "give --input FILE or --sample with --s".into(),
            ));
        }
    };
    let spectrum = |input: &Input| -> Result<SpectrumVector> {
        match input {
            Input::State(rho) => spectrum_of_state(rho)?.with_bipartition(bp),
            Input::Spectrum(l) => Ok(l.clone()),
        }
    };
    let verdict = match criterion {
        Criterion::Red | Criterion::Ppt => {
            let Input::State(rho) = &input else {
                return Err(Error::InvalidParams(format!(
                    "{criterion} needs a matrix input"
                )));
            };
            if criterion == Criterion::Red {
                check_red(rho, bp)?
            } else {
                check_ppt(rho, bp)?
            }
        }
        Criterion::Ared => check_ared(&spectrum(&input)?, Some(bp), budget)?,
        Criterion::Ls(rule) => check_ls_p(&spectrum(&input)?, rule.p_for(bp.dim()))?,
        Criterion::Ger => check_ger(&spectrum(&input)?, Some(bp))?,
        Criterion::Sepball => check_sepball(&spectrum(&input)?)?,
        other => {
            return Err(Error::InvalidParams(format!(
                "{other} has no membership test"
            )))
        }
    };
    emit(out, None, &json_line(&verdict_json(&verdict)))
}

fn cmd_hat(a: HatArgs, out: &mut dyn Write) -> Result<()> {
    let bp = Bipartition::new(a.n, a.k)?;
    let x = SimplexVector::new(a.x)?;
    let h = hat_decomposition(&x, bp)?;
    emit(
        out,
        None,
        &json_line(&json!({ "etas": h.etas, "hat": h.hat })),
    )
}

fn cmd_mp(a: MpArgs, out: &mut dyn Write) -> Result<()> {
    let law = MpLaw::new(a.c)?;
    let q = a.query;
    let text = if q.edges {
        format!("{} {}", g17(law.left_edge()), g17(law.right_edge()))
    } else if let Some(p) = q.quantile {
        g17(law.quantile(p)?)
    } else if let Some(x) = q.cdf {
        g17(law.cdf(x))
    } else if let Some(x) = q.density {
        g17(law.density(x))
    } else {
        unreachable!("clap requires one query")
    };
    emit(out, None, &(text + "\n"))
}

fn cmd_threshold(a: ThresholdArgs, out: &mut dyn Write) -> Result<()> {
    let criterion: Criterion = a.criterion.parse()?;
    let regime: RegimeKind = a.regime.parse()?;
    let t = predicted_threshold(criterion, regime, a.fixed)?;
    emit(out, None, &format!("{t}\n"))
}

fn sweep_config(a: &SweepArgs) -> Result<SweepConfig> {
    if let Some(path) = &a.config {
        return Ok(serde_json::from_str(&fs::read_to_string(path)?)?);
    }
    let criterion: Criterion = a.criterion.as_deref().unwrap_or_default().parse()?;
    let kind: RegimeKind = a.regime.as_deref().unwrap_or_default().parse()?;
    Ok(SweepConfig {
        criterion,
        regime: RegimeSpec {
            kind,
            fixed_param: a.fixed,
            size_schedule: a.sizes.clone(),
        },
        c_grid: a.c_grid.clone(),
        trials: a.trials,
        master_seed: a.seed,
        budget: a.search.budget(),
    })
}

fn cmd_sweep(a: SweepArgs, out: &mut dyn Write) -> Result<()> {
    let config = sweep_config(&a)?;
    let limits = SweepLimits::from_env()?;
    let rule = config.validate(limits)?;
    let result = run_sweep(&config, limits)?;
    let csv = result.to_csv_string()?;
    emit(out, a.out.as_deref(), &csv)?;
    if let (Some(script), Some(csv_path)) = (&a.plot_script, &a.out) {
        let threshold = match rule.threshold {
            t @ (Threshold::Constant(_) | Threshold::FixedDim(_)) => Some(t),
            Threshold::Range { .. } => None,
        };
        fs::write(
            script,
            plot_script(&result, &csv_path.to_string_lossy(), threshold),
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (i32, String) {
        let mut buf = Vec::new();
        let code = run_from(
            std::iter::once("ethresh").chain(args.iter().copied()),
            &mut buf,
        );
        (code, String::from_utf8(buf).unwrap())
    }

    #[test]
    fn mp_queries() {
        assert_eq!(run(&["mp", "--c", "4", "--edges"]), (0, "1 9\n".into()));
        let (code, out) = run(&["mp", "--c", "1", "--density", "2"]);
        assert_eq!(code, 0);
        assert!((out.trim().parse::<f64>().unwrap() - 0.15915494309189535).abs() < 1e-12);
        assert_eq!(run(&["mp", "--c", "0.5", "--quantile", "0.4"]).0, 2);
        assert_eq!(run(&["mp", "--c", "4"]).0, 2);
        assert_eq!(run(&["mp", "--c", "-1", "--edges"]).0, 2);
    }

    #[test]
    fn threshold_queries() {
        let (code, out) = run(&[
            "threshold",
            "--criterion",
            "ared",
            "--regime",
            "second-unbalanced",
            "--fixed",
            "2",
        ]);
        assert_eq!(code, 0);
        assert!(out.starts_with("13.92820323"));
        assert_eq!(
            run(&["threshold", "--criterion", "sepball"]),
            (0, "1\n".into())
        );
        assert_eq!(run(&["threshold", "--criterion", "sep"]).0, 3);
        assert_eq!(run(&["threshold", "--criterion", "bogus"]).0, 2);
    }

    #[test]
    fn hat_output() {
        let (code, out) = run(&["hat", "--x", "0.5,0.5", "--n", "3", "--k", "3"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        let hat: Vec<f64> = serde_json::from_value(v["hat"].clone()).unwrap();
        assert_eq!(hat, vec![0.5, 0.5, 0.5, 0.5, 0.5, 0.0, 0.0, 0.0, -0.5]);
        assert_eq!(run(&["hat", "--x", "0.5,0.6", "--n", "2", "--k", "2"]).0, 2);
    }

    #[test]
    fn verdict_keys_are_sorted() {
        let v = CriterionVerdict {
            status: crate::criteria::Status::Out,
            margin: -0.5,
            witness: Some(SimplexVector::uniform(2).unwrap()),
            certificate: crate::criteria::Certificate::RankBound,
        };
        let s = serde_json::to_string(&verdict_json(&v)).unwrap();
        assert_eq!(
            s,
            r#"{"certificate":"rank_bound","margin":-0.5,"status":"Out","witness":[0.5,0.5]}"#
        );
    }
}
