use crate::config::{Config, Formula, Source};
use crate::output::Run;
use crate::Failure;
use doorway::analytic::{self, Evaluation};
use doorway::ensembles::{Background, Coupling, EnsembleSpec};
use doorway::kernels::{r_goe, r_gue};
use doorway::montecarlo::{
    estimate_ipr, estimate_ldos, estimate_r_many, estimate_survival_curve, uniform_edges, Execution, RSettings,
};
use serde_json::json;
use std::f64::consts::PI;

const POISSON_ARGUMENT: &str = "survival_poisson: the hyperbolic terms use the argument πλ²τ/√(1−x); \
     with it the curve is normalised and matches the two-dimensional reference integral to ~1e-15";
const GUE_REFERENCE_SIGN: &str = "survival_gue_reference: the overall sign of the double integral is chosen so that \
     F(0) = 1 and the curve decays; the opposite sign yields 2 − F";
const COOPERON_WEIGHT: &str = "GOE: the Cooperon term enters with weight ½ (Pfaffian reduction, confirmed by finite-N \
     sampling); survival_goe_add(0.2, τ) stays non-negative on [0, 10]";
const IPR_ASYMPTOTES: &str = "ipr: the closed forms expand as 1 − (π^{3/2}/2)λ + O(λ²) at small λ, so a slope of −π^{3/2} \
     does not match them; ipr_poisson approaches 2/(π²λ²) slowly (12% below it at λ = 2)";

fn exec(cfg: &Config) -> Execution {
    Execution::with_threads(cfg.threads)
}

fn spec(cfg: &Config, background: Background, beta: u8, lambda: f64, n: usize, seed: u64) -> Result<EnsembleSpec, Failure> {
    Ok(EnsembleSpec::new(background, Coupling::from_beta(beta)?, n, lambda, seed).with_sampler(cfg.sampler))
}

fn evaluate(f: Formula, lambda: f64, tau: f64) -> doorway::Result<Evaluation> {
    match f {
        Formula::Poisson => analytic::survival_poisson(lambda, tau),
        Formula::Gue => analytic::survival_gue(lambda, tau),
        Formula::Goe => analytic::survival_goe(lambda, tau),
        Formula::GoeAdd => analytic::survival_goe_add(lambda, tau),
        Formula::PoissonReference => analytic::survival_poisson_reference(lambda, tau),
        Formula::GueReference => analytic::survival_gue_reference(lambda, tau),
        Formula::Fgr => analytic::fgr(lambda, tau).map(Evaluation::exact),
        Formula::GruPoisson => analytic::gru_approx(lambda, tau, Background::Poisson),
        Formula::GruGue => analytic::gru_approx(lambda, tau, Background::Gue),
        Formula::GruGoe => analytic::gru_approx(lambda, tau, Background::Goe),
    }
}

fn formula_warnings(run: &mut Run, f: Formula) {
    match f {
        Formula::Poisson | Formula::PoissonReference => run.warn(POISSON_ARGUMENT),
        Formula::GueReference => run.warn(GUE_REFERENCE_SIGN),
        Formula::Goe | Formula::GoeAdd => run.warn(COOPERON_WEIGHT),
        _ => {}
    }
}

fn analytic_curve(run: &mut Run, f: Formula, lambda: f64, taus: &[f64]) -> Result<Vec<Evaluation>, Failure> {
    formula_warnings(run, f);
    let mut out = Vec::with_capacity(taus.len());
    for &t in taus {
        let e = evaluate(f, lambda, t)?;
        run.check_error(&format!("{}(λ={lambda}, τ={t})", f.name()), e.err_est);
        out.push(e);
    }
    Ok(out)
}

pub fn mc(cfg: &Config, run: &mut Run) -> Result<(), Failure> {
    let spec = spec(cfg, cfg.background, cfg.beta, cfg.lambda, cfg.n, cfg.seed)?;
    let taus = cfg.tau.points("tau")?;
    let curve = estimate_survival_curve(&spec, &taus, cfg.samples, exec(cfg))?;
    let rows: Vec<Vec<f64>> = (0..taus.len())
        .map(|i| vec![taus[i], curve.mean[i], curve.stderr[i]])
        .collect();
    run.write_csv("survival.csv", &["tau", "mean", "stderr"], &rows)?;
    let mut summary = json!({ "n_samples": cfg.samples });
    if cfg.ipr {
        let e = estimate_ipr(&spec, cfg.samples, exec(cfg))?;
        run.write_csv("ipr.csv", &["mean", "stderr"], &[vec![e.mean, e.stderr]])?;
        summary["ipr"] = json!({ "mean": e.mean, "stderr": e.stderr });
    }
    if let Some(bins) = &cfg.ldos {
        if bins.count == 0 || !(bins.hi > bins.lo) {
            return Err(Failure::config("ldos: need hi > lo and count > 0"));
        }
        let edges = uniform_edges(bins.lo, bins.hi, bins.count);
        let h = estimate_ldos(&spec, &edges, cfg.samples, exec(cfg))?;
        let rows: Vec<Vec<f64>> = (0..bins.count)
            .map(|k| vec![edges[k], edges[k + 1], h.density[k], h.stderr[k]])
            .collect();
        run.write_csv("ldos.csv", &["lo", "hi", "density", "stderr"], &rows)?;
        let mut ldos = json!({ "outside": h.outside, "expected_hwhm": PI * cfg.lambda * cfg.lambda });
        match h.fit_lorentzian() {
            Ok(fit) => {
                ldos["fit"] = json!({
                    "hwhm": fit.hwhm,
                    "hwhm_stderr": fit.hwhm_stderr,
                    "center": fit.center,
                    "amplitude": fit.amplitude,
                    "reduced_chi2": fit.reduced_chi2(),
                });
            }
            Err(e) => run.warn(format!("ldos: Lorentzian fit failed: {e}")),
        }
        summary["ldos"] = ldos;
    }
    run.summary = Some(summary);
    Ok(())
}

pub fn analytic(cfg: &Config, run: &mut Run) -> Result<(), Failure> {
    let taus = cfg.tau.points("tau")?;
    let lambdas = cfg.lambdas.clone().unwrap_or_else(|| vec![cfg.lambda]);
    if cfg.formulas.is_empty() || lambdas.is_empty() {
        return Err(Failure::config("analytic: need at least one formula and one lambda"));
    }
    for &f in &cfg.formulas {
        for &l in &lambdas {
            let curve = analytic_curve(run, f, l, &taus)?;
            let rows: Vec<Vec<f64>> = taus.iter().zip(&curve).map(|(&t, e)| vec![t, e.value, e.err_est]).collect();
            let name = format!("analytic_{}_lambda_{}.csv", f.name(), crate::output::number(l));
            run.write_csv(&name, &["tau", "value", "err_est"], &rows)?;
        }
    }
    Ok(())
}

/// A curve with pointwise uncertainties, plus a label for the summary.
struct Side {
    label: String,
    taus: Option<Vec<f64>>,
    value: Vec<f64>,
    sigma: Vec<f64>,
}

fn resolve(cfg: &Config, run: &mut Run, source: &Source, index: u64, default_taus: &[f64]) -> Result<Side, Failure> {
    let own = match source {
        Source::Mc { tau, .. } | Source::Analytic { tau, .. } => tau.as_ref().map(|g| g.points("tau")).transpose()?,
    };
    let taus = own.clone().unwrap_or_else(|| default_taus.to_vec());
    match *source {
        Source::Mc { background, beta, lambda, n, samples, seed, .. } => {
            let background = background.unwrap_or(cfg.background);
            let beta = beta.unwrap_or(cfg.beta);
            let lambda = lambda.unwrap_or(cfg.lambda);
            let spec = spec(cfg, background, beta, lambda, n.unwrap_or(cfg.n), seed.unwrap_or(cfg.seed.wrapping_add(index)))?;
            let c = estimate_survival_curve(&spec, &taus, samples.unwrap_or(cfg.samples), exec(cfg))?;
            Ok(Side {
                label: format!("mc {} beta={beta} lambda={lambda} N={} seed={}", background.name(), spec.n, spec.master_seed),
                taus: own,
                value: c.mean,
                sigma: c.stderr,
            })
        }
        Source::Analytic { formula, lambda, .. } => {
            let lambda = lambda.unwrap_or(cfg.lambda);
            let curve = analytic_curve(run, formula, lambda, &taus)?;
            Ok(Side {
                label: format!("analytic {} lambda={lambda}", formula.name()),
                taus: own,
                value: curve.iter().map(|e| e.value).collect(),
                sigma: curve.iter().map(|e| e.err_est).collect(),
            })
        }
    }
}

fn z_score(d: f64, sigma: f64) -> f64 {
    if d == 0.0 {
        0.0
    } else {
        d / sigma
    }
}

pub fn compare(cfg: &Config, run: &mut Run) -> Result<(), Failure> {
    let default_taus = cfg.tau.points("tau")?;
    // grids are checked before any expensive evaluation
    let own = |s: &Source| match s {
        Source::Mc { tau, .. } | Source::Analytic { tau, .. } => tau.as_ref().map(|g| g.points("tau")).transpose(),
    };
    if let (Some(a), Some(b)) = (own(&cfg.left)?, own(&cfg.right)?) {
        if a != b {
            return Err(Failure::config(format!("compare: tau grids differ: {a:?} vs {b:?}")));
        }
    }
    let left = resolve(cfg, run, &cfg.left, 0, &default_taus)?;
    let right = resolve(cfg, run, &cfg.right, 1, &default_taus)?;
    let taus = left.taus.clone().or(right.taus.clone()).unwrap_or(default_taus);
    let mut rows = Vec::with_capacity(taus.len());
    let (mut max_z, mut max_za, mut tau_at) = (0.0f64, 0.0f64, taus[0]);
    for i in 0..taus.len() {
        let d = left.value[i] - right.value[i];
        let sigma = left.sigma[i].hypot(right.sigma[i]);
        let z = z_score(d, sigma);
        let excess = (d.abs() - cfg.allowance).max(0.0);
        let za = z_score(excess, sigma).copysign(d);
        if z.abs() > max_z {
            max_z = z.abs();
            tau_at = taus[i];
        }
        max_za = max_za.max(za.abs());
        rows.push(vec![taus[i], left.value[i], left.sigma[i], right.value[i], right.sigma[i], d, z, za]);
    }
    run.write_csv(
        "compare.csv",
        &["tau", "left", "left_err", "right", "right_err", "diff", "z", "z_allowed"],
        &rows,
    )?;
    run.write_csv(
        "compare_summary.csv",
        &["max_abs_z", "tau_at_max", "max_abs_z_allowed", "allowance"],
        &[vec![max_z, tau_at, max_za, cfg.allowance]],
    )?;
    run.tolerances.insert("finite_n_allowance".into(), cfg.allowance);
    run.summary = Some(json!({
        "left": left.label,
        "right": right.label,
        "max_abs_z": max_z,
        "tau_at_max": tau_at,
        "max_abs_z_allowed": max_za,
        "allowance": cfg.allowance,
    }));
    Ok(())
}

pub fn ipr_sweep(cfg: &Config, run: &mut Run) -> Result<(), Failure> {
    let lambdas = cfg.lambda_grid.points("lambda_grid")?;
    run.warn(IPR_ASYMPTOTES);
    run.warn(COOPERON_WEIGHT);
    let mut rows = Vec::with_capacity(lambdas.len());
    for &l in &lambdas {
        let p = analytic::ipr_poisson(l)?;
        let g = analytic::ipr_gue(l)?;
        let a = analytic::ipr_goe_add(l)?;
        for (what, e) in [("ipr_poisson", p), ("ipr_gue", g), ("ipr_goe_add", a)] {
            run.check_error(&format!("{what}(λ={l})"), e.err_est);
        }
        // the large-λ forms diverge at λ = 0
        let (db, asym_p, asym_g) = if l == 0.0 {
            (f64::INFINITY, f64::INFINITY, f64::INFINITY)
        } else {
            (analytic::db_saturation(l)?, analytic::ipr_poisson_asymptote(l), analytic::ipr_gue_asymptote(l))
        };
        rows.push(vec![l, p.value, g.value, a.value, db, asym_p, asym_g]);
    }
    run.write_csv(
        "ipr_sweep.csv",
        &["lambda", "ipr_poisson", "ipr_gue", "ipr_goe_add", "db", "asym_poisson", "asym_gue"],
        &rows,
    )
}

pub fn kernel_check(cfg: &Config, run: &mut Run) -> Result<(), Failure> {
    let exact: fn(f64, f64, f64) -> doorway::Result<_> = match cfg.background {
        Background::Gue => r_gue,
        Background::Goe => {
            run.warn(COOPERON_WEIGHT);
            r_goe
        }
        Background::Poisson => return Err(Failure::config("kernel-check: background must be gue or goe")),
    };
    if cfg.beta != 2 {
        return Err(Failure::config("kernel-check: closed forms exist for complex coupling (beta = 2) only"));
    }
    if cfg.points.is_empty() {
        return Err(Failure::config("kernel-check: no points"));
    }
    // points sharing λ are estimated from the same draws
    let mut lambdas: Vec<f64> = Vec::new();
    for p in &cfg.points {
        let l = p.lambda.unwrap_or(cfg.lambda);
        if !lambdas.contains(&l) {
            lambdas.push(l);
        }
    }
    let mut rows = vec![Vec::new(); cfg.points.len()];
    let mut max_z = 0.0f64;
    for &l in &lambdas {
        let idx: Vec<usize> = (0..cfg.points.len())
            .filter(|&i| cfg.points[i].lambda.unwrap_or(cfg.lambda) == l)
            .collect();
        let ks: Vec<(f64, f64)> = idx.iter().map(|&i| (cfg.points[i].k, cfg.points[i].s)).collect();
        let settings = RSettings {
            lambda: l,
            n: cfg.n,
            background: cfg.background,
            beta: cfg.beta,
            master_seed: cfg.seed,
            sampler: cfg.sampler,
        };
        let est = estimate_r_many(&ks, &settings, cfg.samples, exec(cfg))?;
        for ((&i, &(k, s)), e) in idx.iter().zip(&ks).zip(&est) {
            let x = exact(k, s, l)?;
            let z = e.z_score(x);
            max_z = max_z.max(z);
            rows[i] = vec![k, s, l, e.mean.re, e.mean.im, e.stderr(), x.re, x.im, z];
        }
    }
    run.write_csv(
        "kernel_check.csv",
        &["k", "s", "lambda", "re_mc", "im_mc", "stderr", "re_exact", "im_exact", "z"],
        &rows,
    )?;
    run.summary = Some(json!({ "max_z": max_z }));
    Ok(())
}
