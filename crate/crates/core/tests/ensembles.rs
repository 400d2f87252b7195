use doorway::ensembles::*;
use std::f64::consts::PI;

/// Kolmogorov–Smirnov distance of `samples` from the unit exponential law.
fn ks_exponential(mut samples: Vec<f64>) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            let cdf = 1.0 - (-s).exp();
            (cdf - i as f64 / n).abs().max((i as f64 + 1.0) / n - cdf)
        })
        .fold(0.0, f64::max)
}

fn mean_and_stderr(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[test]
fn poisson_small_sample() {
    let s = sample_poisson_background(4, 2024).unwrap();
    assert_eq!(s.levels.len(), 4);
    assert!(s.levels.windows(2).all(|w| w[0] < w[1]));
    assert!(s.levels.iter().all(|x| (-1.0..=1.0).contains(x)));
    assert_eq!(s.spacing, 0.5);
    let again = sample_poisson_background(4, 2024).unwrap();
    assert_eq!(
        s.levels.iter().map(|x| x.to_bits()).collect::<Vec<_>>(),
        again.levels.iter().map(|x| x.to_bits()).collect::<Vec<_>>()
    );
}

#[test]
fn poisson_spacings_are_exponential() {
    let n = 10_000;
    let s = sample_poisson_background(n, 99).unwrap();
    let half = (n as f64).sqrt() / 2.0;
    assert!(s.levels.iter().all(|x| x.abs() <= half));
    // band centre: the middle half of the interval
    let centre: Vec<f64> = s.levels.iter().copied().filter(|x| x.abs() < half / 2.0).collect();
    let spacings: Vec<f64> = centre.windows(2).map(|w| (w[1] - w[0]) / s.spacing).collect();
    let d = ks_exponential(spacings.clone());
    let critical = 1.628 / (spacings.len() as f64).sqrt();
    assert!(d < critical, "KS distance {d} above 1% critical value {critical}");
}

#[test]
fn gue_density_at_band_centre() {
    let n = 500;
    let window = 1.0;
    let seeds = 200;
    let mut count = 0usize;
    for seed in 0..seeds {
        let s = sample_gaussian_background(n, 2, 1000 + seed).unwrap();
        count += s.levels.iter().filter(|x| x.abs() < window).count();
    }
    let density = count as f64 / (2.0 * window * seeds as f64);
    let expect = (2.0 * n as f64).sqrt() / PI;
    assert!((density / expect - 1.0).abs() < 0.03, "{density} vs {expect}");
}

fn centre_spacing(s: &Spectrum, window: f64) -> (f64, usize) {
    let c: Vec<f64> = s.levels.iter().copied().filter(|x| x.abs() < window).collect();
    (c[c.len() - 1] - c[0], c.len() - 1)
}

#[test]
fn goe_spacing_at_band_centre() {
    let n = 500;
    let (mut width, mut gaps) = (0.0, 0);
    for seed in 0..200 {
        let s = sample_gaussian_background(n, 1, 5000 + seed).unwrap();
        assert_eq!(s.spacing, PI / (2.0 * n as f64).sqrt());
        let (w, g) = centre_spacing(&s, 1.0);
        width += w;
        gaps += g;
    }
    let mean = width / gaps as f64;
    let expect = PI / (2.0 * n as f64).sqrt();
    assert!((mean / expect - 1.0).abs() < 0.03, "{mean} vs {expect}");
}

#[test]
fn dense_sampler_has_the_same_statistics() {
    let n = 200;
    let expect = PI / (2.0 * n as f64).sqrt();
    for beta in [1u8, 2] {
        let (mut width, mut gaps) = (0.0, 0);
        let mut second_moment = [0.0; 2];
        for seed in 0..100 {
            for (j, sampler) in [Sampler::Dense, Sampler::Tridiagonal].into_iter().enumerate() {
                let s = sample_gaussian_background_with(n, beta, 300 + seed, sampler).unwrap();
                second_moment[j] += s.levels.iter().map(|x| x * x).sum::<f64>() / 100.0;
                if sampler == Sampler::Dense {
                    let (w, g) = centre_spacing(&s, 1.0);
                    width += w;
                    gaps += g;
                }
            }
        }
        let mean = width / gaps as f64;
        assert!((mean / expect - 1.0).abs() < 0.03, "beta {beta}: {mean} vs {expect}");
        // E tr H² = N/β + N(N−1)/2 for both samplers
        let exact = n as f64 / beta as f64 + (n * (n - 1)) as f64 / 2.0;
        for m in second_moment {
            assert!((m / exact - 1.0).abs() < 0.01, "beta {beta}: {m} vs {exact}");
        }
    }
}

#[test]
fn coupling_variance_is_beta_independent() {
    for beta in [1u8, 2] {
        let c = sample_coupling(100_000, beta, 1.0, 1.0, 42 + beta as u64).unwrap();
        let (mean, se) = mean_and_stderr(&c.squared_magnitudes);
        assert!((mean - 1.0).abs() < 5.0 * se, "beta {beta}: {mean} ± {se}");
        let (re_mean, re_se) = mean_and_stderr(&c.entries.iter().map(|v| v.re).collect::<Vec<_>>());
        assert!(re_mean.abs() < 5.0 * re_se);
    }
    let c = sample_coupling(100_000, 2, 1.0, 1.0, 7).unwrap();
    let (re2, se) = mean_and_stderr(&c.entries.iter().map(|v| v.re * v.re).collect::<Vec<_>>());
    assert!((re2 - 0.5).abs() < 5.0 * se);
}

#[test]
fn coupling_scales_linearly_with_lambda() {
    for beta in [1u8, 2] {
        let base = sample_coupling(64, beta, 0.5, 0.3, 11).unwrap();
        for c in [0.25, 2.0, 7.0] {
            let scaled = sample_coupling(64, beta, 0.5 * c, 0.3, 11).unwrap();
            for (a, b) in base.entries.iter().zip(&scaled.entries) {
                assert!((a * c - b).norm() <= 1e-15 * b.norm().max(1e-300));
            }
        }
    }
}

#[test]
fn realizations_are_deterministic_and_distinct() {
    for bg in [Background::Poisson, Background::Goe, Background::Gue] {
        let spec = EnsembleSpec::new(bg, Coupling::Complex, 30, 0.8, 77);
        let (s0, c0) = spec.sample(3).unwrap();
        let (s1, c1) = spec.sample(3).unwrap();
        assert_eq!((&s0, &c0), (&s1, &c1));
        let (s2, c2) = spec.sample(4).unwrap();
        assert_ne!(s0.levels, s2.levels);
        assert_ne!(c0.entries, c2.entries);
        assert!((spec.coupling_scale() - 0.8 * spec.mean_spacing()).abs() < 1e-16);
        let other = EnsembleSpec::new(bg, Coupling::Complex, 30, 0.8, 78);
        assert_ne!(other.sample(3).unwrap().0.levels, s0.levels);
    }
}

#[test]
fn spec_validation() {
    assert!(EnsembleSpec::new(Background::Gue, Coupling::Real, 1, 0.5, 0).validate().is_err());
    assert!(EnsembleSpec::new(Background::Gue, Coupling::Real, 10, -0.5, 0).validate().is_err());
    assert!(EnsembleSpec::new(Background::Gue, Coupling::Real, 10, 0.0, 0).validate().is_ok());
    assert!(Coupling::from_beta(3).is_err());
}
