use doorway::analytic::{fgr, ipr_gue, ipr_poisson};
use doorway::ensembles::{Background, Coupling, EnsembleSpec};
use doorway::montecarlo::*;
use num_complex::Complex64;

const ALLOWANCE: f64 = 0.01;

fn bits(v: &[f64]) -> Vec<u64> {
    v.iter().map(|x| x.to_bits()).collect()
}

#[test]
fn decoupled_curve_is_flat() {
    for bg in [Background::Poisson, Background::Goe, Background::Gue] {
        let spec = EnsembleSpec::new(bg, Coupling::Real, 40, 0.0, 3);
        let c = estimate_survival_curve(&spec, &[0.0, 0.3, 2.0, 9.0], 20, Execution::Serial).unwrap();
        assert!(c.mean.iter().all(|&m| m == 1.0));
        assert!(c.stderr.iter().all(|&s| s == 0.0));
        let ipr = estimate_ipr(&spec, 20, Execution::Serial).unwrap();
        assert_eq!((ipr.mean, ipr.stderr), (1.0, 0.0));
    }
}

#[test]
fn serial_and_parallel_agree_bitwise() {
    let spec = EnsembleSpec::new(Background::Gue, Coupling::Complex, 60, 0.7, 12);
    let grid = [0.0, 0.5, 1.0, 4.0];
    let serial = estimate_survival_curve(&spec, &grid, 150, Execution::Serial).unwrap();
    for threads in [Some(2), Some(3), None] {
        let par = estimate_survival_curve(&spec, &grid, 150, Execution::Parallel { threads }).unwrap();
        assert_eq!(bits(&serial.mean), bits(&par.mean));
        assert_eq!(bits(&serial.stderr), bits(&par.stderr));
    }
    let again = estimate_survival_curve(&spec, &grid, 150, Execution::Serial).unwrap();
    assert_eq!(serial, again);
    let other = EnsembleSpec { master_seed: 13, ..spec };
    assert_ne!(estimate_survival_curve(&other, &grid, 150, Execution::Serial).unwrap().mean, serial.mean);
}

#[test]
fn curve_values_stay_in_range() {
    let spec = EnsembleSpec::new(Background::Poisson, Coupling::Real, 80, 1.2, 5);
    let grid: Vec<f64> = (0..=20).map(|i| i as f64 * 0.5).collect();
    let c = estimate_survival_curve(&spec, &grid, 100, Execution::Serial).unwrap();
    assert_eq!((c.mean[0], c.stderr[0]), (1.0, 0.0));
    for (m, s) in c.mean.iter().zip(&c.stderr) {
        assert!(*m >= 0.0 && *m <= 1.0 + 3.0 * s);
        assert!(*s >= 0.0);
    }
}

#[test]
fn stderr_shrinks_like_inverse_root() {
    let spec = EnsembleSpec::new(Background::Gue, Coupling::Complex, 100, 0.5, 8);
    let small = estimate_ipr(&spec, 1000, Execution::Serial).unwrap();
    let large = estimate_ipr(&spec, 4000, Execution::Serial).unwrap();
    let ratio = small.stderr / large.stderr;
    assert!((ratio / 2.0 - 1.0).abs() < 0.15, "ratio {ratio}");
}

#[test]
fn poisson_saturation_matches_closed_form() {
    let spec = EnsembleSpec::new(Background::Poisson, Coupling::Complex, 400, 1.0, 21);
    let c = estimate_survival_curve(&spec, &[40.0, 50.0], 2000, Execution::default()).unwrap();
    let target = ipr_poisson(1.0).unwrap().value;
    for (m, s) in c.mean.iter().zip(&c.stderr) {
        assert!((m - target).abs() <= 3.0 * s + ALLOWANCE, "{m} ± {s} vs {target}");
    }
}

#[test]
fn ipr_matches_closed_forms() {
    let gue = EnsembleSpec::new(Background::Gue, Coupling::Complex, 400, 1.0, 22);
    let e = estimate_ipr(&gue, 2000, Execution::default()).unwrap();
    let target = ipr_gue(1.0).unwrap().value;
    assert!((e.mean - target).abs() <= 3.0 * e.stderr + ALLOWANCE, "{e:?} vs {target}");

    let poisson = EnsembleSpec::new(Background::Poisson, Coupling::Complex, 400, 2.0, 23);
    let e = estimate_ipr(&poisson, 2000, Execution::default()).unwrap();
    let target = ipr_poisson(2.0).unwrap().value;
    assert!((e.mean - target).abs() <= 3.0 * e.stderr + ALLOWANCE, "{e:?} vs {target}");
}

#[test]
fn early_decay_follows_golden_rule() {
    let spec = EnsembleSpec::new(Background::Gue, Coupling::Complex, 400, 0.5, 24);
    let grid = [0.02, 0.05, 0.1, 0.15];
    let c = estimate_survival_curve(&spec, &grid, 2000, Execution::default()).unwrap();
    for (i, &t) in grid.iter().enumerate() {
        let f = fgr(0.5, t).unwrap();
        assert!((c.mean[i] - f).abs() <= 3.0 * c.stderr[i] + ALLOWANCE, "tau {t}: {} vs {f}", c.mean[i]);
    }
}

#[test]
fn ldos_is_normalised() {
    let spec = EnsembleSpec::new(Background::Poisson, Coupling::Complex, 200, 0.8, 25);
    let edges = uniform_edges(-20.0, 20.0, 80);
    let h = estimate_ldos(&spec, &edges, 100, Execution::Serial).unwrap();
    let total: f64 = h.density.iter().zip(edges.windows(2)).map(|(d, w)| d * (w[1] - w[0])).sum();
    assert!((total - 1.0).abs() < 1e-10);
    assert!(h.density.iter().all(|&d| d >= 0.0));
    assert!(h.outside > 0.0 && h.outside < 0.1);
}

#[test]
fn ratio_estimator_edge_cases() {
    let settings = RSettings {
        lambda: 0.5,
        n: 50,
        background: Background::Gue,
        beta: 2,
        master_seed: 1,
        sampler: Default::default(),
    };
    let e = estimate_r(0.0, 1.0, &settings, 10, Execution::Serial).unwrap();
    assert_eq!(e.mean, Complex64::new(1.0, 0.0));
    assert_eq!((e.stderr_re, e.stderr_im), (0.0, 0.0));
    assert_eq!(e.z_score(Complex64::new(1.0, 0.0)), 0.0);

    let pair = estimate_r_many(&[(1.3, 0.6), (-1.3, 0.6)], &settings, 64, Execution::Serial).unwrap();
    assert!((pair[0].mean - pair[1].mean.conj()).norm() < 1e-12);

    // a level on the singular point |E| = D|s|/2
    let err = r_realization(&[-0.3, 0.1, 0.5], 0.2, 1.0, 1.0, 0.5, 2).unwrap_err();
    assert!(err.is_numerical());
    assert!(estimate_r(1.0, 1.0, &RSettings { beta: 3, ..settings }, 10, Execution::Serial).is_err());
}
