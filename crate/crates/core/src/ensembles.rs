//! Background spectra (Poisson, GOE, GUE) and Gaussian coupling vectors.

use crate::error::{Error, Result};
use crate::linalg;
use crate::seed::{realization_seed, rng_from_seed, Rng, Stream};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng as _;
use rand_distr::{ChiSquared, Distribution, StandardNormal, Uniform};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Background {
    Poisson,
    Goe,
    Gue,
}

impl Background {
    /// Dyson index of a Gaussian background; `None` for Poisson.
    pub fn beta(self) -> Option<u8> {
        match self {
            Background::Poisson => None,
            Background::Goe => Some(1),
            Background::Gue => Some(2),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Background::Poisson => "poisson",
            Background::Goe => "goe",
            Background::Gue => "gue",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Coupling {
    /// Real Gaussian couplings, β = 1.
    Real,
    /// Complex Gaussian couplings, β = 2.
    Complex,
}

impl Coupling {
    pub fn beta(self) -> u8 {
        match self {
            Coupling::Real => 1,
            Coupling::Complex => 2,
        }
    }

    pub fn from_beta(beta: u8) -> Result<Self> {
        match beta {
            1 => Ok(Coupling::Real),
            2 => Ok(Coupling::Complex),
            _ => Err(Error::invalid(format!("coupling beta must be 1 or 2, got {beta}"))),
        }
    }
}

/// How Gaussian backgrounds are drawn.
///
/// Both samplers produce the same eigenvalue distribution. `Tridiagonal`
/// uses the β-Hermite tridiagonal model and costs O(N²) per draw; `Dense`
/// builds the full matrix and costs O(N³).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sampler {
    #[default]
    Tridiagonal,
    Dense,
}

/// One statistical model: background, coupling type, size, strength, seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub background: Background,
    pub coupling: Coupling,
    pub n: usize,
    pub lambda: f64,
    pub master_seed: u64,
    #[serde(default)]
    pub sampler: Sampler,
}

impl EnsembleSpec {
    pub fn new(background: Background, coupling: Coupling, n: usize, lambda: f64, master_seed: u64) -> Self {
        EnsembleSpec {
            background,
            coupling,
            n,
            lambda,
            master_seed,
            sampler: Sampler::default(),
        }
    }

    pub fn with_sampler(mut self, sampler: Sampler) -> Self {
        self.sampler = sampler;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::invalid(format!("N must be at least 2, got {}", self.n)));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::invalid(format!("lambda must be finite and non-negative, got {}", self.lambda)));
        }
        Ok(())
    }

    /// Mean level spacing at the band centre.
    pub fn mean_spacing(&self) -> f64 {
        mean_spacing(self.background, self.n)
    }

    /// Coupling scale `v = λ·D`.
    pub fn coupling_scale(&self) -> f64 {
        self.lambda * self.mean_spacing()
    }

    /// Seeds of the background and coupling streams of realization `index`.
    pub fn seeds(&self, index: u64) -> (u64, u64) {
        (
            realization_seed(self.master_seed, Stream::Background, index),
            realization_seed(self.master_seed, Stream::Coupling, index),
        )
    }

    /// Draws realization `index`: a background spectrum and a coupling vector.
    pub fn sample(&self, index: u64) -> Result<(Spectrum, CouplingVector)> {
        self.validate()?;
        let (bg_seed, cp_seed) = self.seeds(index);
        let spectrum = sample_background(self.background, self.n, bg_seed, self.sampler)?;
        let coupling = sample_coupling(self.n, self.coupling.beta(), self.lambda, spectrum.spacing, cp_seed)?;
        Ok((spectrum, coupling))
    }
}

/// Band-centre mean level spacing: `1/√N` (Poisson) or `π/√(2N)` (GOE, GUE).
pub fn mean_spacing(background: Background, n: usize) -> f64 {
    let n = n as f64;
    match background {
        Background::Poisson => 1.0 / n.sqrt(),
        Background::Goe | Background::Gue => PI / (2.0 * n).sqrt(),
    }
}

/// Sorted background levels and their band-centre mean spacing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub levels: Vec<f64>,
    pub spacing: f64,
}

impl Spectrum {
    /// Validates that levels are finite and strictly increasing.
    pub fn check(&self) -> Result<()> {
        if let Some(i) = self.levels.iter().position(|x| !x.is_finite()) {
            return Err(Error::invalid(format!("level {i} is not finite")));
        }
        if let Some(i) = self.levels.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::invalid(format!(
                "levels not strictly increasing at {i}: {} >= {}",
                self.levels[i],
                self.levels[i + 1]
            )));
        }
        Ok(())
    }
}

/// Coupling entries `V_ν` (imaginary parts zero for real coupling) and
/// their squared magnitudes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingVector {
    pub kind: Coupling,
    pub entries: Vec<Complex64>,
    pub squared_magnitudes: Vec<f64>,
}

impl CouplingVector {
    pub fn from_entries(kind: Coupling, entries: Vec<Complex64>) -> Self {
        let squared_magnitudes = entries.iter().map(|v| v.norm_sqr()).collect();
        CouplingVector {
            kind,
            entries,
            squared_magnitudes,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

pub fn sample_background(background: Background, n: usize, seed: u64, sampler: Sampler) -> Result<Spectrum> {
    match background {
        Background::Poisson => sample_poisson_background(n, seed),
        Background::Goe => sample_gaussian_background_with(n, 1, seed, sampler),
        Background::Gue => sample_gaussian_background_with(n, 2, seed, sampler),
    }
}

/// `N` iid uniform levels on `[−√N/2, √N/2]`, sorted.
pub fn sample_poisson_background(n: usize, seed: u64) -> Result<Spectrum> {
    if n < 2 {
        return Err(Error::invalid(format!("N must be at least 2, got {n}")));
    }
    let half = (n as f64).sqrt() / 2.0;
    let mut rng = rng_from_seed(seed);
    let dist = Uniform::new_inclusive(-half, half);
    let levels: Vec<f64> = (0..n).map(|_| dist.sample(&mut rng)).collect();
    Ok(Spectrum {
        levels: sort_strict(levels),
        spacing: mean_spacing(Background::Poisson, n),
    })
}

/// Eigenvalues of a GOE (`beta_b = 1`) or GUE (`beta_b = 2`) matrix with
/// density `∝ exp(−(β_b/2)·tr H²)`, using the default sampler.
pub fn sample_gaussian_background(n: usize, beta_b: u8, seed: u64) -> Result<Spectrum> {
    sample_gaussian_background_with(n, beta_b, seed, Sampler::default())
}

pub fn sample_gaussian_background_with(n: usize, beta_b: u8, seed: u64, sampler: Sampler) -> Result<Spectrum> {
    if n < 2 {
        return Err(Error::invalid(format!("N must be at least 2, got {n}")));
    }
    let background = match beta_b {
        1 => Background::Goe,
        2 => Background::Gue,
        _ => return Err(Error::invalid(format!("background beta must be 1 or 2, got {beta_b}"))),
    };
    let mut rng = rng_from_seed(seed);
    let levels = match sampler {
        Sampler::Tridiagonal => tridiagonal_draw(n, beta_b, &mut rng)?,
        Sampler::Dense => dense_draw(n, beta_b, &mut rng)?,
    };
    Ok(Spectrum {
        levels: sort_strict(levels),
        spacing: mean_spacing(background, n),
    })
}

// β-Hermite model: (1/√(2β))·tridiag(N(0,2); χ_{β(N−1)}, …, χ_β) has the
// eigenvalue density |Δ|^β exp(−(β/2)Σλ²).
fn tridiagonal_model(n: usize, beta: u8, rng: &mut Rng) -> Result<(Vec<f64>, Vec<f64>)> {
    let beta = beta as f64;
    let scale = 1.0 / (2.0 * beta).sqrt();
    let diag: Vec<f64> = (0..n)
        .map(|_| {
            let z: f64 = rng.sample(StandardNormal);
            z * 2f64.sqrt() * scale
        })
        .collect();
    let mut off = Vec::with_capacity(n - 1);
    for k in (1..n).rev() {
        let chi2 = ChiSquared::new(beta * k as f64).map_err(|e| Error::numerical(e.to_string()))?;
        off.push(chi2.sample(rng).sqrt() * scale);
    }
    Ok((diag, off))
}

fn tridiagonal_draw(n: usize, beta: u8, rng: &mut Rng) -> Result<Vec<f64>> {
    let (diag, off) = tridiagonal_model(n, beta, rng)?;
    linalg::tridiagonal_eigenvalues(diag, &off)
}

// Diagonal variance 1/β; off-diagonal E|H_ij|² = 1/2.
fn dense_matrix(n: usize, beta: u8, rng: &mut Rng) -> DMatrix<Complex64> {
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    let diag_sd = (1.0 / beta as f64).sqrt();
    for i in 0..n {
        let z: f64 = rng.sample(StandardNormal);
        m[(i, i)] = Complex64::new(z * diag_sd, 0.0);
        for j in i + 1..n {
            let re: f64 = rng.sample(StandardNormal);
            m[(i, j)] = if beta == 1 {
                Complex64::new(re * 0.5f64.sqrt(), 0.0)
            } else {
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(re * 0.5, im * 0.5)
            };
            m[(j, i)] = m[(i, j)].conj();
        }
    }
    m
}

fn dense_draw(n: usize, beta: u8, rng: &mut Rng) -> Result<Vec<f64>> {
    let m = dense_matrix(n, beta, rng);
    if beta == 1 {
        linalg::symmetric_eigenvalues(m.map(|z| z.re))
    } else {
        linalg::hermitian_eigenvalues(m)
    }
}

/// Sorts ascending and nudges exact duplicates up by one ulp.
fn sort_strict(mut levels: Vec<f64>) -> Vec<f64> {
    levels.sort_by(f64::total_cmp);
    for i in 1..levels.len() {
        if levels[i] <= levels[i - 1] {
            levels[i] = levels[i - 1].next_up();
        }
    }
    levels
}

/// `N` iid Gaussian couplings with `E|V|² = (λD)²`: real normals for
/// `beta = 1`, complex normals with real and imaginary variance `v²/2` for
/// `beta = 2`.
pub fn sample_coupling(n: usize, beta: u8, lambda: f64, spacing: f64, seed: u64) -> Result<CouplingVector> {
    if n < 1 {
        return Err(Error::invalid("coupling vector needs N >= 1"));
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::invalid(format!("lambda must be finite and non-negative, got {lambda}")));
    }
    let kind = Coupling::from_beta(beta)?;
    let v = lambda * spacing;
    let mut rng = rng_from_seed(seed);
    let entries = (0..n)
        .map(|_| match kind {
            Coupling::Real => {
                let z: f64 = rng.sample(StandardNormal);
                Complex64::new(v * z, 0.0)
            }
            Coupling::Complex => {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(re, im) * (v * 0.5f64.sqrt())
            }
        })
        .collect();
    Ok(CouplingVector::from_entries(kind, entries))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poisson_small_case() {
        let s = sample_poisson_background(4, 11).unwrap();
        assert_eq!(s.levels.len(), 4);
        assert!(s.levels.iter().all(|x| (-1.0..=1.0).contains(x)));
        assert_eq!(s.spacing, 0.5);
        s.check().unwrap();
        assert_eq!(s, sample_poisson_background(4, 11).unwrap());
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(sample_poisson_background(1, 0).is_err());
        assert!(sample_gaussian_background(10, 3, 0).is_err());
        assert!(sample_gaussian_background(1, 1, 0).is_err());
        assert!(sample_coupling(3, 0, 1.0, 1.0, 0).is_err());
        assert!(sample_coupling(3, 2, -1.0, 1.0, 0).is_err());
    }

    #[test]
    fn ties_are_separated() {
        let v = sort_strict(vec![1.0, 0.5, 1.0, 1.0]);
        assert!(v.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(v[1], 1.0);
        assert_eq!(v[2], 1.0f64.next_up());
    }

    #[test]
    fn two_by_two_trace() {
        for beta in [1, 2] {
            let m = dense_matrix(2, beta, &mut rng_from_seed(5));
            let trace = m[(0, 0)].re + m[(1, 1)].re;
            let s = sample_gaussian_background_with(2, beta, 5, Sampler::Dense).unwrap();
            assert!((s.levels[0] + s.levels[1] - trace).abs() < 1e-12);

            let (diag, _) = tridiagonal_model(2, beta, &mut rng_from_seed(5)).unwrap();
            let s = sample_gaussian_background_with(2, beta, 5, Sampler::Tridiagonal).unwrap();
            assert!((s.levels[0] + s.levels[1] - diag.iter().sum::<f64>()).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_lambda_gives_zero_coupling() {
        let c = sample_coupling(10, 2, 0.0, 1.0, 3).unwrap();
        assert!(c.entries.iter().all(|v| *v == Complex64::new(0.0, 0.0)));
        assert!(c.squared_magnitudes.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn squared_magnitudes_are_exact() {
        let c = sample_coupling(50, 2, 0.7, 0.3, 9).unwrap();
        for (v, m) in c.entries.iter().zip(&c.squared_magnitudes) {
            assert_eq!(v.norm_sqr(), *m);
        }
        let r = sample_coupling(50, 1, 0.7, 0.3, 9).unwrap();
        assert!(r.entries.iter().all(|v| v.im == 0.0));
    }

    #[test]
    fn spacing_values() {
        assert_eq!(mean_spacing(Background::Poisson, 100), 0.1);
        assert_eq!(mean_spacing(Background::Goe, 50), PI / 10.0);
        assert_eq!(mean_spacing(Background::Gue, 50), mean_spacing(Background::Goe, 50));
    }
}
