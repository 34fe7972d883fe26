//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits nonzero if any fails.

use std::time::{Duration, Instant};

use ethresh::criteria::{
    check_ared, check_ls_p, check_ppt, check_red, check_sepball, spectrum_of_state, SpectrumVector,
    Status,
};
use ethresh::hatmap::{ared_inner, hat_vector, SearchBudget, SimplexVector};
use ethresh::linalg::{
    hermitian_eigenvalues, reduction_b, Bipartition, HermitianMatrix, DEFAULT_TAU,
};
use ethresh::sampling::{
    centered_wishart, sample_ginibre, sample_induced_state, sample_wishart,
    sample_wishart_spectrum, GaussianSource, SeedSpec, SpectrumSampler, WishartParams,
};
use ethresh::spectra::mp_quantile;
use ethresh::sweep::{run_cell, scale_rule, Criterion, LsRule, RegimeKind, SweepLimits, SweepRow};
use num_complex::Complex64;

type Check = (u32, &'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn within(limit_secs: u64, start: Instant) -> (bool, String) {
    let el = start.elapsed();
    (
        el <= Duration::from_secs(limit_secs),
        format!("{:.1}s of {limit_secs}s", el.as_secs_f64()),
    )
}

fn bp(n: usize, k: usize) -> Bipartition {
    Bipartition::new(n, k).unwrap()
}

fn cell(
    criterion: Criterion,
    regime: RegimeKind,
    fixed: Option<usize>,
    n: usize,
    k: usize,
    c: f64,
    trials: usize,
) -> SweepRow {
    let rule = scale_rule(criterion, regime, fixed).unwrap();
    run_cell(
        &rule,
        n,
        k,
        c,
        trials,
        2024,
        SearchBudget::default(),
        SweepLimits::default(),
    )
    .unwrap()
}

fn describe(r: &SweepRow) -> String {
    format!("c={} s={} p_hat={:.2}", r.c, r.s, r.p_hat)
}

/// Reduction spectrum of the Schmidt-form pure state, descending.
fn reduction_spectrum(x: &[f64], n: usize, k: usize) -> Vec<f64> {
    let mut psi = vec![Complex64::new(0.0, 0.0); n * k];
    for (i, xi) in x.iter().enumerate() {
        psi[i * k + i] = Complex64::new(xi.sqrt(), 0.0);
    }
    let red = reduction_b(&HermitianMatrix::outer(&psi), bp(n, k)).unwrap();
    let mut e = hermitian_eigenvalues(&red).unwrap();
    e.reverse();
    e
}

fn c01_hat_oracle() -> Outcome {
    let start = Instant::now();
    let mut src = GaussianSource::from_seed(11);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let n = 1 + (src.uniform() * 8.0) as usize;
        let k = 1 + (src.uniform() * 8.0) as usize;
        let r = 1 + (src.uniform() * n.min(k) as f64) as usize;
        let w: Vec<f64> = (0..r).map(|_| 0.05 + src.uniform()).collect();
        let s: f64 = w.iter().sum();
        let x = SimplexVector::new(w.iter().map(|v| v / s).collect()).unwrap();
        let hat = hat_vector(&x, bp(n, k)).unwrap();
        let oracle = reduction_spectrum(x.entries(), n, k);
        for (a, b) in hat.iter().zip(&oracle) {
            worst = worst.max((a - b).abs());
        }
    }
    let (fast, t) = within(10, start);
    outcome(
        worst <= 1e-10 && fast,
        format!("max deviation {worst:.2e}, {t}"),
    )
}

fn c02_mp_edges() -> Outcome {
    let start = Instant::now();
    let (d, s) = (1000, 4000);
    let w = sample_wishart(WishartParams::new(d, s).unwrap(), SeedSpec::new(2, 0)).unwrap();
    let mut e = hermitian_eigenvalues(&w).unwrap();
    e.reverse();
    let df = d as f64;
    let top = e[0] / df;
    let bottom = e[d - 1] / df;
    let rank = (0.9 * df).floor() as usize;
    let q = e[rank - 1] / df;
    let expect_q = mp_quantile(4.0, 0.1).unwrap();
    let ok = (top / 9.0 - 1.0).abs() <= 0.02
        && (bottom - 1.0).abs() <= 0.05
        && (q / expect_q - 1.0).abs() <= 0.02;
    let (fast, t) = within(120, start);
    outcome(
        ok && fast,
        format!("max {top:.4} (9), min {bottom:.4} (1), rank-900 {q:.4} ({expect_q:.4}), {t}"),
    )
}

fn c03_semicircle() -> Outcome {
    let start = Instant::now();
    let (d, s) = (200, 40_000);
    let z = centered_wishart(WishartParams::new(d, s).unwrap(), SeedSpec::new(3, 0)).unwrap();
    let e = hermitian_eigenvalues(&z).unwrap();
    let second = e.iter().map(|v| v * v).sum::<f64>() / d as f64;
    let top = e[d - 1];
    let ok = (0.95..=1.05).contains(&second) && (1.8..=2.2).contains(&top);
    let (fast, t) = within(60, start);
    outcome(
        ok && fast,
        format!("Tr Z^2 / d = {second:.4}, max {top:.4}, {t}"),
    )
}

fn c04_trace_concentration() -> Outcome {
    let (d, s, trials) = (50, 5000, 200);
    let bad = (0..trials)
        .filter(|&t| {
            let g = sample_ginibre(d, s, SeedSpec::new(4, t)).unwrap();
            let tr: f64 = g.data().iter().map(|z| z.norm_sqr()).sum();
            (tr / (d * s) as f64 - 1.0).abs() > 0.05
        })
        .count();
    let frac = bad as f64 / trials as f64;
    outcome(frac <= 0.01, format!("deviating fraction {frac:.3}"))
}

fn two_point(lo: &SweepRow, hi: &SweepRow, max_lo: f64, min_hi: f64) -> (bool, String) {
    let ok = lo.p_hat <= max_lo && hi.p_hat >= min_hi;
    (ok, format!("{}; {}", describe(lo), describe(hi)))
}

fn c05_red_second_unbalanced() -> Outcome {
    let start = Instant::now();
    let lo = cell(
        Criterion::Red,
        RegimeKind::SecondUnbalanced,
        Some(3),
        150,
        3,
        0.5,
        100,
    );
    let hi = cell(
        Criterion::Red,
        RegimeKind::SecondUnbalanced,
        Some(3),
        150,
        3,
        3.0,
        100,
    );
    let (ok, d) = two_point(&lo, &hi, 0.05, 0.95);
    let (fast, t) = within(300, start);
    outcome(ok && fast, format!("{d}, {t}"))
}

fn c06_red_first_unbalanced() -> Outcome {
    let lo = cell(
        Criterion::Red,
        RegimeKind::FirstUnbalanced,
        Some(4),
        4,
        400,
        2.0,
        100,
    );
    let hi = cell(
        Criterion::Red,
        RegimeKind::FirstUnbalanced,
        Some(4),
        4,
        400,
        8.0,
        100,
    );
    let (ok, d) = two_point(&lo, &hi, 0.05, 0.95);
    outcome(ok, d)
}

fn c07_red_balanced() -> Outcome {
    let lo = cell(Criterion::Red, RegimeKind::Balanced, None, 40, 40, 0.3, 100);
    let hi = cell(Criterion::Red, RegimeKind::Balanced, None, 40, 40, 3.0, 100);
    let (ok, d) = two_point(&lo, &hi, 0.05, 0.95);
    outcome(ok, d)
}

fn c08_ared_second_unbalanced() -> Outcome {
    let (n, k, trials) = (150, 2, 100);
    let b = bp(n, k);
    let s = (6.0 * (n * k) as f64 + 1e-9).floor() as usize;
    let mut outs = 0;
    let mut witnessed = 0;
    for t in 0..trials {
        let w = sample_wishart_spectrum(
            WishartParams::new(n * k, s).unwrap(),
            SeedSpec::new(2024, t),
            SpectrumSampler::Bidiagonal,
        )
        .unwrap();
        let lambda = SpectrumVector::from_unnormalized(w.eigenvalues).unwrap();
        let v = check_ared(&lambda, Some(b), SearchBudget::default()).unwrap();
        if v.status == Status::Out {
            outs += 1;
            if let Some(x) = &v.witness {
                if ared_inner(&lambda, x, b).unwrap() < -DEFAULT_TAU {
                    witnessed += 1;
                }
            }
        }
    }
    let p_lo = 1.0 - outs as f64 / trials as f64;
    let hi = cell(
        Criterion::Ared,
        RegimeKind::SecondUnbalanced,
        Some(2),
        n,
        k,
        30.0,
        100,
    );
    let certified = (hi.successes - hi.undecided) as f64 / hi.trials as f64;
    let ok = p_lo <= 0.05 && witnessed == outs && hi.p_hat >= 0.95 && certified >= 0.9;
    outcome(
        ok,
        format!(
            "c=6 s={s} p_hat={p_lo:.2} ({witnessed}/{outs} Out witnessed); {}, certified {certified:.2}",
            describe(&hi)
        ),
    )
}

fn c09_ared_balanced() -> Outcome {
    let lo = cell(
        Criterion::Ared,
        RegimeKind::Balanced,
        None,
        30,
        30,
        0.5,
        100,
    );
    let hi = cell(
        Criterion::Ared,
        RegimeKind::Balanced,
        None,
        30,
        30,
        2.0,
        100,
    );
    let (ok, d) = two_point(&lo, &hi, 0.05, 0.95);
    outcome(ok, format!("{d}, undecided at c=2: {}", hi.undecided))
}

fn c10_ared_first_unbalanced() -> Outcome {
    let lo = cell(
        Criterion::Ared,
        RegimeKind::FirstUnbalanced,
        Some(5),
        5,
        300,
        1.5,
        50,
    );
    let hi = cell(
        Criterion::Ared,
        RegimeKind::FirstUnbalanced,
        Some(5),
        5,
        300,
        6.0,
        50,
    );
    let (ok, d) = two_point(&lo, &hi, 0.1, 0.9);
    outcome(
        ok,
        format!("{d}, undecided {} / {}", lo.undecided, hi.undecided),
    )
}

fn c11_ls() -> Outcome {
    let fixed = Criterion::Ls(LsRule::Fixed(4));
    let a = cell(fixed, RegimeKind::TotalDim, None, 500, 1, 4.0, 100);
    let b = cell(fixed, RegimeKind::TotalDim, None, 500, 1, 16.0, 100);
    let frac = Criterion::Ls(LsRule::Fraction(0.3));
    let c = cell(frac, RegimeKind::TotalDim, None, 500, 1, 0.35, 100);
    let d = cell(frac, RegimeKind::TotalDim, None, 500, 1, 1.4, 100);
    let (ok1, d1) = two_point(&a, &b, 0.05, 0.95);
    let (ok2, d2) = two_point(&c, &d, 0.1, 0.9);
    outcome(ok1 && ok2, format!("p=4: {d1}; p=150: {d2}"))
}

fn c12_ger_unbalanced() -> Outcome {
    let lo = cell(
        Criterion::Ger,
        RegimeKind::SecondUnbalanced,
        Some(2),
        150,
        2,
        6.0,
        100,
    );
    let hi = cell(
        Criterion::Ger,
        RegimeKind::SecondUnbalanced,
        Some(2),
        150,
        2,
        30.0,
        100,
    );
    let (ok, d) = two_point(&lo, &hi, 0.05, 0.95);
    outcome(ok, d)
}

fn c13_sepball() -> Outcome {
    let lo = cell(
        Criterion::Sepball,
        RegimeKind::TotalDim,
        None,
        60,
        1,
        0.5,
        50,
    );
    let hi = cell(
        Criterion::Sepball,
        RegimeKind::TotalDim,
        None,
        60,
        1,
        2.0,
        50,
    );
    let (ok, d) = two_point(&lo, &hi, 0.1, 0.9);
    outcome(ok, d)
}

fn c14_ger_balanced() -> Outcome {
    let lo = cell(Criterion::Ger, RegimeKind::Balanced, None, 12, 12, 0.5, 50);
    let hi = cell(Criterion::Ger, RegimeKind::Balanced, None, 12, 12, 16.0, 50);
    let gap = hi.p_hat - lo.p_hat;
    outcome(
        gap >= 0.6,
        format!("{}; {}; difference {gap:.2}", describe(&lo), describe(&hi)),
    )
}

fn c15_inclusion_properties() -> Outcome {
    let start = Instant::now();
    let tau10 = 10.0 * DEFAULT_TAU;
    let mut src = GaussianSource::from_seed(15);
    let mut failures = Vec::new();

    // PPT implies RED on mixed dimensions; scale invariance of RED.
    for t in 0..500 {
        let n = 2 + (src.uniform() * 2.0) as usize;
        let k = 2 + (src.uniform() * 2.0) as usize;
        let s = 1 + (src.uniform() * (2 * n * k) as f64) as usize;
        let rho = sample_induced_state(n, k, s, SeedSpec::new(151, t)).unwrap();
        let red = check_red(&rho, bp(n, k)).unwrap();
        let ppt = check_ppt(&rho, bp(n, k)).unwrap();
        if red.margin.abs() > tau10
            && ppt.margin.abs() > tau10
            && ppt.status.is_in()
            && !red.status.is_in()
        {
            failures.push(format!("PPT but not RED at sample {t}"));
        }
        for alpha in [1e-6, 1e6] {
            if check_red(&rho.scale(alpha), bp(n, k)).unwrap().status != red.status {
                failures.push(format!("scale {alpha} changes RED at sample {t}"));
            }
        }
    }

    // PPT and RED agree for k = 2.
    for t in 0..500 {
        let n = 2 + (src.uniform() * 3.0) as usize;
        let s = 1 + (src.uniform() * (3 * n) as f64) as usize;
        let rho = sample_induced_state(n, 2, s, SeedSpec::new(152, t)).unwrap();
        let red = check_red(&rho, bp(n, 2)).unwrap();
        let ppt = check_ppt(&rho, bp(n, 2)).unwrap();
        if red.margin.abs() >= tau10 && ppt.margin.abs() >= tau10 && red.status != ppt.status {
            failures.push(format!("k=2 disagreement at sample {t}"));
        }
    }

    // LS sandwich around ARED, LS nesting, SEPBALL inside ARED.
    for t in 0..500 {
        let n = 2 + (src.uniform() * 3.0) as usize;
        let k = 2 + (src.uniform() * 3.0) as usize;
        let d = n * k;
        let s = 1 + (src.uniform() * (6 * d) as f64) as usize;
        let w = sample_wishart_spectrum(
            WishartParams::new(d, s).unwrap(),
            SeedSpec::new(153, t),
            SpectrumSampler::Bidiagonal,
        )
        .unwrap();
        let lambda = SpectrumVector::from_unnormalized(w.eigenvalues).unwrap();
        let ared = check_ared(&lambda, Some(bp(n, k)), SearchBudget::default()).unwrap();
        if check_ls_p(&lambda, k).unwrap().status.is_in() && !ared.status.is_in() {
            failures.push(format!("inside LS_k but ARED Out at sample {t}"));
        }
        if !check_ls_p(&lambda, 2 * k - 1).unwrap().status.is_in() && ared.status.is_in() {
            failures.push(format!("outside LS_(2k-1) but ARED In at sample {t}"));
        }
        if check_sepball(&lambda).unwrap().status.is_in() && !ared.status.is_in() {
            failures.push(format!("SEPBALL but ARED Out at sample {t}"));
        }
        let ins: Vec<bool> = (1..=d)
            .map(|p| check_ls_p(&lambda, p).unwrap().status.is_in())
            .collect();
        if ins.windows(2).any(|w| w[0] && !w[1]) {
            failures.push(format!("LS nesting broken at sample {t}"));
        }
    }

    // Spectra of sampled states stay normalized.
    let rho = sample_induced_state(3, 3, 4, SeedSpec::new(154, 0)).unwrap();
    let sum: f64 = spectrum_of_state(&rho).unwrap().entries().iter().sum();
    if (sum - 1.0).abs() > 1e-10 {
        failures.push("spectrum_of_state not normalized".into());
    }

    let (fast, t) = within(120, start);
    let detail = if failures.is_empty() {
        format!("1500 samples, no violations, {t}")
    } else {
        format!("{} violations, first: {}, {t}", failures.len(), failures[0])
    };
    outcome(failures.is_empty() && fast, detail)
}

fn main() {
    let criteria: [Check; 15] = [
        (1, "hat map matches reduction eigenvalues", c01_hat_oracle),
        (2, "Marchenko-Pastur edges and quantile", c02_mp_edges),
        (3, "centered Wishart semicircle", c03_semicircle),
        (4, "trace concentration", c04_trace_concentration),
        (5, "RED second unbalanced, k=3", c05_red_second_unbalanced),
        (6, "RED first unbalanced, n=4", c06_red_first_unbalanced),
        (7, "RED balanced", c07_red_balanced),
        (8, "ARED second unbalanced, k=2", c08_ared_second_unbalanced),
        (9, "ARED balanced", c09_ared_balanced),
        (10, "ARED first unbalanced, n=5", c10_ared_first_unbalanced),
        (11, "LS_p fixed and proportional p", c11_ls),
        (12, "GER unbalanced, k=2", c12_ger_unbalanced),
        (13, "SEPBALL", c13_sepball),
        (14, "GER balanced direction", c14_ger_balanced),
        (15, "set inclusion properties", c15_inclusion_properties),
    ];
    let only: Option<u32> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .and_then(|v| v.parse().ok());
    let mut failed = 0;
    for (id, name, run) in criteria {
        if only.is_some_and(|o| o != id) {
            continue;
        }
        let start = Instant::now();
        let o = run();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {id:>2} {tag} {name}: {} [{:.1}s]",
            o.detail,
            start.elapsed().as_secs_f64()
        );
        if !o.pass {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
