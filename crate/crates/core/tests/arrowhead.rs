use doorway::arrowhead::{
    decompose, dense_eigen_oracle, doorway_weights, ipr_exact, secular_eigenvalues, survival_curve_exact,
    survival_probability_exact, SpectralDecomposition,
};
use doorway::ensembles::{Background, Coupling, EnsembleSpec, Spectrum};
use proptest::prelude::*;

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn assert_interlaced(levels: &[f64], eig: &[f64]) {
    assert_eq!(eig.len(), levels.len() + 1);
    assert!(eig[0] < levels[0]);
    for i in 0..levels.len() - 1 {
        assert!(levels[i] < eig[i + 1] && eig[i + 1] < levels[i + 1], "interval {i}");
    }
    assert!(eig[levels.len()] > levels[levels.len() - 1]);
}

#[test]
fn secular_matches_dense_for_all_ensembles() {
    for background in [Background::Poisson, Background::Goe, Background::Gue] {
        for coupling in [Coupling::Real, Coupling::Complex] {
            for lambda in [0.1, 1.0, 3.0] {
                let spec = EnsembleSpec::new(background, coupling, 120, lambda, 17);
                for index in 0..3 {
                    let (s, c) = spec.sample(index).unwrap();
                    let d = decompose(&s, &c).unwrap();
                    let o = dense_eigen_oracle(&s, &c).unwrap();
                    let scale = max_abs(&o.eigenvalues);
                    for m in 0..d.len() {
                        assert!((d.eigenvalues[m] - o.eigenvalues[m]).abs() <= 1e-10 * scale);
                        assert!((d.weights[m] - o.weights[m]).abs() <= 1e-8);
                    }
                    assert!((d.weight_sum() - 1.0).abs() <= 1e-12);
                    assert_interlaced(&s.levels, &d.eigenvalues);
                }
            }
        }
    }
}

#[test]
fn production_weights_match_formula() {
    let spec = EnsembleSpec::new(Background::Gue, Coupling::Complex, 50, 0.7, 3);
    let (s, c) = spec.sample(0).unwrap();
    let e = secular_eigenvalues(&s, &c).unwrap();
    let w = doorway_weights(&s, &c, &e).unwrap();
    let d = decompose(&s, &c).unwrap();
    for (a, b) in w.iter().zip(&d.weights) {
        assert!((a - b).abs() < 1e-10);
    }
}

#[test]
fn first_moment_vanishes() {
    let spec = EnsembleSpec::new(Background::Poisson, Coupling::Complex, 200, 1.5, 8);
    let (s, c) = spec.sample(4).unwrap();
    let d = decompose(&s, &c).unwrap();
    let m1: f64 = d.eigenvalues.iter().zip(&d.weights).map(|(e, w)| e * w).sum();
    assert!(m1.abs() <= 1e-8 * max_abs(&d.eigenvalues));
}

#[test]
fn dense_trace_matches_levels() {
    let spec = EnsembleSpec::new(Background::Goe, Coupling::Real, 80, 1.0, 21);
    let (s, c) = spec.sample(0).unwrap();
    let o = dense_eigen_oracle(&s, &c).unwrap();
    let lhs: f64 = o.eigenvalues.iter().sum();
    let rhs: f64 = s.levels.iter().sum();
    assert!((lhs - rhs).abs() <= 1e-10 * 80.0 * max_abs(&s.levels));
}

#[test]
fn dense_oracle_guard() {
    let s = Spectrum {
        levels: (0..2001).map(|i| i as f64).collect(),
        spacing: 1.0,
    };
    let c = doorway::ensembles::CouplingVector::from_entries(
        Coupling::Real,
        vec![num_complex::Complex64::new(0.0, 0.0); 2001],
    );
    assert!(dense_eigen_oracle(&s, &c).is_err());
}

#[test]
fn long_time_average_is_ipr() {
    let spec = EnsembleSpec::new(Background::Gue, Coupling::Complex, 60, 0.8, 5);
    let (s, c) = spec.sample(1).unwrap();
    let d = decompose(&s, &c).unwrap();
    // average over τ ∈ [T, 2T] kills every off-diagonal term up to O(1/T)
    let t = 2000.0;
    let n = 200_000;
    let taus: Vec<f64> = (0..n).map(|i| t + t * (i as f64 + 0.5) / n as f64).collect();
    let mean = survival_curve_exact(&d, &taus, s.spacing).iter().sum::<f64>() / n as f64;
    let ipr = ipr_exact(&d);
    assert!((mean - ipr).abs() < 0.01 * ipr, "{mean} vs {ipr}");
}

#[test]
fn normalization_at_zero() {
    let spec = EnsembleSpec::new(Background::Poisson, Coupling::Real, 100, 2.0, 9);
    for i in 0..5 {
        let (s, c) = spec.sample(i).unwrap();
        let d = decompose(&s, &c).unwrap();
        assert_eq!(survival_probability_exact(&d, 0.0, s.spacing), 1.0);
        let tiny = survival_probability_exact(&d, 1e-14, s.spacing);
        assert!((tiny - 1.0).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn interlacing_and_completeness(seed in any::<u64>(), n in 2usize..60, lambda in 0.01f64..4.0, complex in any::<bool>()) {
        let coupling = if complex { Coupling::Complex } else { Coupling::Real };
        let spec = EnsembleSpec::new(Background::Poisson, coupling, n, lambda, seed);
        let (s, c) = spec.sample(0).unwrap();
        let d = decompose(&s, &c).unwrap();
        assert_interlaced(&s.levels, &d.eigenvalues);
        prop_assert!((d.weight_sum() - 1.0).abs() <= 1e-12);
        prop_assert!(d.weights.iter().all(|&w| w > 0.0 && w <= 1.0));
    }

    #[test]
    fn shift_invariance(seed in any::<u64>(), shift in -10.0f64..10.0, tau in 0.0f64..20.0) {
        let spec = EnsembleSpec::new(Background::Gue, Coupling::Complex, 30, 0.6, seed);
        let (s, c) = spec.sample(0).unwrap();
        let d = decompose(&s, &c).unwrap();
        let shifted = SpectralDecomposition {
            eigenvalues: d.eigenvalues.iter().map(|e| e + shift).collect(),
            weights: d.weights.clone(),
        };
        let a = survival_probability_exact(&d, tau, s.spacing);
        let b = survival_probability_exact(&shifted, tau, s.spacing);
        prop_assert!((a - b).abs() <= 1e-12);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&a));
    }
}
