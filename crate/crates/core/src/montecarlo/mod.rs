//! Ensemble averages over realizations of background and coupling.
//!
//! Realizations are grouped into fixed blocks of [`BLOCK`] consecutive
//! indices. Each block is reduced sequentially and blocks are merged in
//! index order, so the result does not depend on the number of worker
//! threads: serial and parallel runs are bit-identical.

mod fit;
mod stats;

pub use fit::{fit_lorentzian, LorentzianFit};
pub use stats::Moments;

use crate::arrowhead::{decompose, ipr_exact, survival_probability_exact};
use crate::ensembles::{sample_background, Background, EnsembleSpec, Sampler};
use crate::error::{Error, Result};
use crate::seed::{realization_seed, Stream};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Realizations per reduction block.
pub const BLOCK: u64 = 32;

/// How realizations are distributed over workers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[default]
    Serial,
    /// Worker pool; `threads = None` uses the global pool. Without the
    /// `parallel` feature this runs serially.
    Parallel { threads: Option<usize> },
}

impl Execution {
    /// `Serial` for one thread, `Parallel` otherwise (`0` = all cores).
    pub fn with_threads(threads: usize) -> Self {
        match threads {
            1 => Execution::Serial,
            0 => Execution::Parallel { threads: None },
            t => Execution::Parallel { threads: Some(t) },
        }
    }
}

/// Averages `f(index)` over `n` realizations; `f` returns a fixed-width
/// sample vector.
pub fn reduce<F>(n: u64, width: usize, exec: Execution, f: F) -> Result<Moments>
where
    F: Fn(u64) -> Result<Vec<f64>> + Sync,
{
    let blocks = n.div_ceil(BLOCK);
    let run_block = |b: u64| -> Result<Moments> {
        let mut m = Moments::new(width);
        for i in b * BLOCK..((b + 1) * BLOCK).min(n) {
            m.push(&f(i)?);
        }
        Ok(m)
    };
    let parts: Vec<Result<Moments>> = match exec {
        Execution::Serial => (0..blocks).map(run_block).collect(),
        Execution::Parallel { threads } => parallel_blocks(blocks, threads, &run_block)?,
    };
    let mut total = Moments::new(width);
    for part in parts {
        total.merge(&part?);
    }
    Ok(total)
}

#[cfg(feature = "parallel")]
fn parallel_blocks<G>(blocks: u64, threads: Option<usize>, run: &G) -> Result<Vec<Result<Moments>>>
where
    G: Fn(u64) -> Result<Moments> + Sync,
{
    use rayon::prelude::*;
    let work = || (0..blocks).into_par_iter().map(run).collect::<Vec<_>>();
    match threads {
        None => Ok(work()),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::invalid(format!("cannot build thread pool: {e}")))?;
            Ok(pool.install(work))
        }
    }
}

#[cfg(not(feature = "parallel"))]
fn parallel_blocks<G>(blocks: u64, _threads: Option<usize>, run: &G) -> Result<Vec<Result<Moments>>>
where
    G: Fn(u64) -> Result<Moments> + Sync,
{
    Ok((0..blocks).map(run).collect())
}

fn tag(spec: &EnsembleSpec, index: u64, err: Error) -> Error {
    Error::Realization {
        index,
        seed: spec.seeds(index).0,
        source: Box::new(err),
    }
}

fn check_samples(n_samples: u64) -> Result<()> {
    if n_samples < 2 {
        return Err(Error::invalid(format!("need at least 2 samples, got {n_samples}")));
    }
    Ok(())
}

/// Mean survival probability on a τ grid, with pointwise standard errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivalCurve {
    pub tau_grid: Vec<f64>,
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
    pub n_samples: u64,
    pub spec: EnsembleSpec,
}

pub fn estimate_survival_curve(
    spec: &EnsembleSpec,
    tau_grid: &[f64],
    n_samples: u64,
    exec: Execution,
) -> Result<SurvivalCurve> {
    spec.validate()?;
    check_samples(n_samples)?;
    if let Some(t) = tau_grid.iter().find(|t| !(**t >= 0.0 && t.is_finite())) {
        return Err(Error::invalid(format!("tau must be finite and non-negative, got {t}")));
    }
    let m = reduce(n_samples, tau_grid.len(), exec, |i| {
        let (s, c) = spec.sample(i).map_err(|e| tag(spec, i, e))?;
        let d = decompose(&s, &c).map_err(|e| tag(spec, i, e))?;
        Ok(tau_grid
            .iter()
            .map(|&t| survival_probability_exact(&d, t, s.spacing))
            .collect())
    })?;
    Ok(SurvivalCurve {
        tau_grid: tau_grid.to_vec(),
        stderr: m.stderr(),
        mean: m.mean,
        n_samples,
        spec: *spec,
    })
}

/// Mean and standard error of a scalar estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub n_samples: u64,
}

pub fn estimate_ipr(spec: &EnsembleSpec, n_samples: u64, exec: Execution) -> Result<Estimate> {
    spec.validate()?;
    check_samples(n_samples)?;
    let m = reduce(n_samples, 1, exec, |i| {
        let (s, c) = spec.sample(i).map_err(|e| tag(spec, i, e))?;
        let d = decompose(&s, &c).map_err(|e| tag(spec, i, e))?;
        Ok(vec![ipr_exact(&d)])
    })?;
    Ok(Estimate {
        mean: m.mean[0],
        stderr: m.stderr()[0],
        n_samples,
    })
}

/// Doorway weight per energy bin (energies in units of `D`), normalised to
/// unit integral over the binned range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LdosHistogram {
    pub bin_edges: Vec<f64>,
    pub density: Vec<f64>,
    pub stderr: Vec<f64>,
    /// Mean weight per realization that fell outside the bins.
    pub outside: f64,
    pub n_samples: u64,
}

impl LdosHistogram {
    pub fn fit_lorentzian(&self) -> Result<LorentzianFit> {
        fit_lorentzian(&self.bin_edges, &self.density, &self.stderr)
    }
}

/// `count` equal bins on `[lo, hi]`.
pub fn uniform_edges(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..=count)
        .map(|i| lo + (hi - lo) * i as f64 / count as f64)
        .collect()
}

pub fn estimate_ldos(spec: &EnsembleSpec, bin_edges: &[f64], n_samples: u64, exec: Execution) -> Result<LdosHistogram> {
    spec.validate()?;
    check_samples(n_samples)?;
    if bin_edges.len() < 2 || bin_edges.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::invalid("bin edges must be strictly increasing, at least two"));
    }
    let nb = bin_edges.len() - 1;
    let (lo, hi) = (bin_edges[0], bin_edges[nb]);
    let m = reduce(n_samples, nb + 1, exec, |i| {
        let (s, c) = spec.sample(i).map_err(|e| tag(spec, i, e))?;
        let d = decompose(&s, &c).map_err(|e| tag(spec, i, e))?;
        let mut row = vec![0.0; nb + 1];
        for (&e, &w) in d.eigenvalues.iter().zip(&d.weights) {
            let x = e / s.spacing;
            if x < lo || x >= hi {
                row[nb] += w;
                continue;
            }
            let k = bin_edges.partition_point(|&edge| edge <= x) - 1;
            row[k] += w / (bin_edges[k + 1] - bin_edges[k]);
        }
        Ok(row)
    })?;
    let stderr = m.stderr();
    let inside: f64 = (0..nb).map(|k| m.mean[k] * (bin_edges[k + 1] - bin_edges[k])).sum();
    let norm = if inside > 0.0 { 1.0 / inside } else { 0.0 };
    Ok(LdosHistogram {
        bin_edges: bin_edges.to_vec(),
        density: m.mean[..nb].iter().map(|v| v * norm).collect(),
        stderr: stderr[..nb].iter().map(|v| v * norm).collect(),
        outside: m.mean[nb],
        n_samples,
    })
}

/// Monte Carlo estimate of a complex mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexEstimate {
    pub mean: Complex64,
    pub stderr_re: f64,
    pub stderr_im: f64,
    pub n_samples: u64,
}

impl ComplexEstimate {
    /// Standard error of the complex mean, `√(σ_re² + σ_im²)`.
    pub fn stderr(&self) -> f64 {
        self.stderr_re.hypot(self.stderr_im)
    }

    /// Distance to `reference` in units of [`Self::stderr`]; zero when both
    /// the distance and the error vanish.
    pub fn z_score(&self, reference: Complex64) -> f64 {
        let d = (self.mean - reference).norm();
        if d == 0.0 {
            0.0
        } else {
            d / self.stderr()
        }
    }
}

/// Settings of the characteristic-polynomial ratio estimator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RSettings {
    pub lambda: f64,
    pub n: usize,
    pub background: Background,
    /// Exponent `β/2` of the ratio: 1 (real coupling) or 2 (complex).
    pub beta: u8,
    pub master_seed: u64,
    #[serde(default)]
    pub sampler: Sampler,
}

/// `Π_μ [(E_μ² − (Ds/2)²)/(E_μ² − (Ds/2)² + i k s D² λ²)]^{β/2}` for one
/// spectrum, accumulated in log space.
pub fn r_realization(levels: &[f64], spacing: f64, k: f64, s: f64, lambda: f64, beta: u8) -> Result<Complex64> {
    if k == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let shift = (spacing * s / 2.0).powi(2);
    let c = k * s * spacing * spacing * lambda * lambda;
    let mut log = Complex64::new(0.0, 0.0);
    for (mu, &e) in levels.iter().enumerate() {
        let a = e * e - shift;
        if a.abs() <= 1e-14 * shift.max(f64::MIN_POSITIVE) {
            return Err(Error::numerical(format!(
                "level {mu} at {e} sits on the singular point |E| = D|s|/2"
            )));
        }
        let factor = Complex64::new(a, 0.0) / Complex64::new(a, c);
        log += factor.ln();
    }
    let value = (log * (beta as f64 / 2.0)).exp();
    if !(value.re.is_finite() && value.im.is_finite()) {
        return Err(Error::numerical("non-finite ratio product"));
    }
    Ok(value)
}

/// Estimates `R(k, s)` at several points from the same background draws.
pub fn estimate_r_many(points: &[(f64, f64)], settings: &RSettings, n_samples: u64, exec: Execution) -> Result<Vec<ComplexEstimate>> {
    check_samples(n_samples)?;
    if settings.n < 2 {
        return Err(Error::invalid("N must be at least 2"));
    }
    if settings.beta != 1 && settings.beta != 2 {
        return Err(Error::invalid(format!("beta must be 1 or 2, got {}", settings.beta)));
    }
    if !(settings.lambda >= 0.0) {
        return Err(Error::invalid("lambda must be non-negative"));
    }
    let m = reduce(n_samples, 2 * points.len(), exec, |i| {
        let seed = realization_seed(settings.master_seed, Stream::Background, i);
        let tagged = |e: Error| Error::Realization {
            index: i,
            seed,
            source: Box::new(e),
        };
        let spectrum = sample_background(settings.background, settings.n, seed, settings.sampler).map_err(tagged)?;
        let mut row = Vec::with_capacity(2 * points.len());
        for &(k, s) in points {
            let r = r_realization(&spectrum.levels, spectrum.spacing, k, s, settings.lambda, settings.beta)
                .map_err(tagged)?;
            row.push(r.re);
            row.push(r.im);
        }
        Ok(row)
    })?;
    let se = m.stderr();
    Ok((0..points.len())
        .map(|j| ComplexEstimate {
            mean: Complex64::new(m.mean[2 * j], m.mean[2 * j + 1]),
            stderr_re: se[2 * j],
            stderr_im: se[2 * j + 1],
            n_samples,
        })
        .collect())
}

pub fn estimate_r(k: f64, s: f64, settings: &RSettings, n_samples: u64, exec: Execution) -> Result<ComplexEstimate> {
    estimate_r_many(&[(k, s)], settings, n_samples, exec).map(|mut v| v.remove(0))
}
