//! Distributional checks: the bidiagonal spectrum sampler against dense
//! Wishart matrices, and both against limiting laws.

use ethresh::sampling::{sample_wishart_spectrum, SeedSpec, SpectrumSampler, WishartParams};
use ethresh::spectra::{mp_cdf, semicircle_moment};

/// Two-sample Kolmogorov-Smirnov statistic.
fn ks(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut worst) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        worst = worst.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    worst
}

fn statistics(
    d: usize,
    s: usize,
    sampler: SpectrumSampler,
    seed: u64,
    trials: u64,
) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let p = WishartParams::new(d, s).unwrap();
    let (mut top, mut low, mut trace) = (Vec::new(), Vec::new(), Vec::new());
    let m = d.min(s);
    for t in 0..trials {
        let w = sample_wishart_spectrum(p, SeedSpec::new(seed, t), sampler).unwrap();
        top.push(w.eigenvalues[0] / w.trace);
        low.push(w.eigenvalues[m - 1] / w.trace);
        trace.push(w.trace);
    }
    (top, low, trace)
}

#[test]
fn bidiagonal_and_dense_samplers_agree_in_law() {
    const N: u64 = 2000;
    // Critical value of the two-sample KS test at level 0.001.
    let critical = 1.95 * (2.0 / N as f64).sqrt();
    for (d, s) in [(6, 3), (8, 8), (5, 20), (12, 7)] {
        let (t1, l1, r1) = statistics(d, s, SpectrumSampler::Dense, 1, N);
        let (t2, l2, r2) = statistics(d, s, SpectrumSampler::Bidiagonal, 2, N);
        for (name, a, b) in [("largest", t1, t2), ("smallest", l1, l2), ("trace", r1, r2)] {
            let stat = ks(a, b);
            assert!(
                stat < critical,
                "d={d} s={s} {name}: KS {stat:.4} >= {critical:.4}"
            );
        }
    }
}

#[test]
fn exact_zero_padding_when_s_below_d() {
    let w = sample_wishart_spectrum(
        WishartParams::new(10, 4).unwrap(),
        SeedSpec::new(1, 0),
        SpectrumSampler::Bidiagonal,
    )
    .unwrap();
    assert_eq!(w.eigenvalues.len(), 10);
    assert!(w.eigenvalues[..4].iter().all(|v| *v > 0.0));
    assert!(w.eigenvalues[4..].iter().all(|v| *v == 0.0));
    let sum: f64 = w.eigenvalues.iter().sum();
    assert!((sum / w.trace - 1.0).abs() < 1e-12);
}

#[test]
fn bidiagonal_spectrum_follows_marchenko_pastur() {
    let (d, s) = (400, 1600);
    let w = sample_wishart_spectrum(
        WishartParams::new(d, s).unwrap(),
        SeedSpec::new(5, 0),
        SpectrumSampler::Bidiagonal,
    )
    .unwrap();
    let scaled: Vec<f64> = w.eigenvalues.iter().map(|v| v / d as f64).collect();
    let mut worst = 0.0f64;
    for (i, x) in scaled.iter().rev().enumerate() {
        let empirical = (i + 1) as f64 / d as f64;
        worst = worst.max((mp_cdf(4.0, *x).unwrap() - empirical).abs());
    }
    assert!(worst < 0.03, "sup distance to the limiting CDF {worst}");
}

#[test]
fn centered_spectrum_moments_follow_semicircle() {
    let (d, s) = (100, 20_000);
    let w = sample_wishart_spectrum(
        WishartParams::new(d, s).unwrap(),
        SeedSpec::new(6, 0),
        SpectrumSampler::Bidiagonal,
    )
    .unwrap();
    let (df, sf) = (d as f64, s as f64);
    let z: Vec<f64> = w
        .eigenvalues
        .iter()
        .map(|v| (v - sf) / (df * sf).sqrt())
        .collect();
    for (j, tol) in [(2, 0.08), (3, 0.15), (4, 0.3)] {
        let m = z.iter().map(|x| x.powi(j)).sum::<f64>() / df;
        let expect = semicircle_moment(j as i64).unwrap();
        assert!((m - expect).abs() < tol, "moment {j}: {m} vs {expect}");
    }
}
