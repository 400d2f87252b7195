//! Weighted least-squares fit of a bin-averaged Lorentzian.

use crate::error::{Error, Result};
use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LorentzianFit {
    /// Total weight under the curve.
    pub amplitude: f64,
    pub center: f64,
    /// Half width at half maximum.
    pub hwhm: f64,
    /// Standard error of `hwhm` from the fit covariance.
    pub hwhm_stderr: f64,
    pub chi2: f64,
    pub dof: usize,
}

impl LorentzianFit {
    pub fn reduced_chi2(&self) -> f64 {
        self.chi2 / self.dof as f64
    }
}

/// Mean of `A·γ/(π((x−x₀)²+γ²))` over `[a, b]`.
fn bin_average(p: &Vector3<f64>, a: f64, b: f64) -> f64 {
    let (amp, x0, g) = (p[0], p[1], p[2]);
    amp / PI * (((b - x0) / g).atan() - ((a - x0) / g).atan()) / (b - a)
}

/// Fits a Lorentzian to binned densities by Levenberg–Marquardt.
///
/// Bins with zero standard error are skipped; at least four informative
/// bins are required.
pub fn fit_lorentzian(edges: &[f64], density: &[f64], stderr: &[f64]) -> Result<LorentzianFit> {
    if edges.len() != density.len() + 1 || density.len() != stderr.len() {
        return Err(Error::invalid("histogram shape mismatch"));
    }
    let bins: Vec<(f64, f64, f64, f64)> = (0..density.len())
        .filter(|&i| stderr[i] > 0.0)
        .map(|i| (edges[i], edges[i + 1], density[i], stderr[i]))
        .collect();
    if bins.len() < 4 {
        return Err(Error::invalid("need at least four bins with non-zero error"));
    }

    let mass: f64 = (0..density.len()).map(|i| density[i] * (edges[i + 1] - edges[i])).sum();
    let peak = density.iter().cloned().fold(0.0, f64::max);
    let centre = (0..density.len())
        .map(|i| density[i] * (edges[i + 1] - edges[i]) * 0.5 * (edges[i] + edges[i + 1]))
        .sum::<f64>()
        / mass;
    let mut p = Vector3::new(mass, centre, (mass / (PI * peak)).max(1e-6));

    let chi2 = |p: &Vector3<f64>| -> f64 {
        bins.iter()
            .map(|&(a, b, y, s)| ((y - bin_average(p, a, b)) / s).powi(2))
            .sum()
    };
    let mut current = chi2(&p);
    let mut damping = 1e-3;
    let mut normal = Matrix3::zeros();
    for _ in 0..200 {
        let mut grad = Vector3::zeros();
        normal = Matrix3::zeros();
        for &(a, b, y, s) in &bins {
            let f = bin_average(&p, a, b);
            let mut j = Vector3::zeros();
            for k in 0..3 {
                let h = 1e-7 * p[k].abs().max(1e-3);
                let mut up = p;
                let mut dn = p;
                up[k] += h;
                dn[k] -= h;
                j[k] = (bin_average(&up, a, b) - bin_average(&dn, a, b)) / (2.0 * h) / s;
            }
            let r = (y - f) / s;
            grad += j * r;
            normal += j * j.transpose();
        }
        let mut improved = false;
        for _ in 0..30 {
            let mut m = normal;
            for k in 0..3 {
                m[(k, k)] *= 1.0 + damping;
            }
            let Some(step) = m.try_inverse().map(|inv| inv * grad) else {
                damping *= 10.0;
                continue;
            };
            let trial = p + step;
            if trial[2] <= 0.0 {
                damping *= 10.0;
                continue;
            }
            let c = chi2(&trial);
            if c < current {
                let converged = (current - c) <= 1e-12 * current.max(1e-300);
                p = trial;
                current = c;
                damping = (damping * 0.3).max(1e-12);
                improved = !converged;
                break;
            }
            damping *= 10.0;
        }
        if !improved {
            break;
        }
    }
    if !(current.is_finite() && p.iter().all(|x| x.is_finite())) {
        return Err(Error::numerical("Lorentzian fit diverged"));
    }
    let hwhm_stderr = normal
        .try_inverse()
        .map(|cov| cov[(2, 2)].max(0.0).sqrt())
        .unwrap_or(f64::NAN);
    Ok(LorentzianFit {
        amplitude: p[0],
        center: p[1],
        hwhm: p[2],
        hwhm_stderr,
        chi2: current,
        dof: bins.len().saturating_sub(3).max(1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_lorentzian() {
        let edges: Vec<f64> = (0..=60).map(|i| -30.0 + i as f64).collect();
        let truth = Vector3::new(0.9, 0.4, 2.5);
        let density: Vec<f64> = edges.windows(2).map(|w| bin_average(&truth, w[0], w[1])).collect();
        let err = vec![1e-3; density.len()];
        let fit = fit_lorentzian(&edges, &density, &err).unwrap();
        assert!((fit.hwhm - 2.5).abs() < 1e-6);
        assert!((fit.center - 0.4).abs() < 1e-6);
        assert!((fit.amplitude - 0.9).abs() < 1e-6);
        assert!(fit.chi2 < 1e-6);
    }

    #[test]
    fn rejects_too_few_bins() {
        let edges = [0.0, 1.0, 2.0];
        assert!(fit_lorentzian(&edges, &[1.0, 1.0], &[0.1, 0.1]).is_err());
    }
}
