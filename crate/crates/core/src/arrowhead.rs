//! Exact spectrum of the doorway Hamiltonian
//!
//! ```text
//!     ⎡ 0    V₁   V₂  …  V_N ⎤
//! H = ⎢ V₁*  E₁              ⎥
//!     ⎢ ⋮         ⋱          ⎥
//!     ⎣ V_N*             E_N ⎦
//! ```
//!
//! Eigenvalues are the roots of the secular function
//! `g(E) = E − Σ_μ |V_μ|²/(E − E_μ)`, one between each pair of consecutive
//! background levels plus one on each side. Each root is found in a
//! coordinate shifted to its nearer pole so that `E − E_μ` never suffers
//! cancellation, and the doorway weight follows from the same shifted
//! representation.

use crate::ensembles::{CouplingVector, Spectrum};
use crate::error::{Error, Result};
use crate::linalg;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// Largest background size accepted by [`dense_eigen_oracle`].
pub const DENSE_ORACLE_MAX_N: usize = 2000;

/// Eigenvalues `E_m` (ascending) and doorway weights `w_m = |⟨s|m⟩|²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub weights: Vec<f64>,
}

impl SpectralDecomposition {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn weight_sum(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Poles with non-zero residue, in ascending order.
struct Poles {
    at: Vec<f64>,
    residue: Vec<f64>,
    /// Levels decoupled from the doorway (`|V_μ|² = 0`).
    isolated: Vec<f64>,
}

impl Poles {
    fn new(spectrum: &Spectrum, coupling: &CouplingVector) -> Result<Poles> {
        if spectrum.levels.len() != coupling.len() {
            return Err(Error::invalid(format!(
                "spectrum has {} levels but coupling has {} entries",
                spectrum.levels.len(),
                coupling.len()
            )));
        }
        spectrum.check()?;
        let mut poles = Poles {
            at: Vec::with_capacity(spectrum.levels.len()),
            residue: Vec::with_capacity(spectrum.levels.len()),
            isolated: Vec::new(),
        };
        for (&e, &z) in spectrum.levels.iter().zip(&coupling.squared_magnitudes) {
            if !(z >= 0.0 && z.is_finite()) {
                return Err(Error::invalid(format!("coupling |V|² = {z} at level {e}")));
            }
            if z == 0.0 {
                poles.isolated.push(e);
            } else {
                poles.at.push(e);
                poles.residue.push(z);
            }
        }
        Ok(poles)
    }

    /// `g` at `E = origin + δ`, with `origin` one of the poles.
    fn secular(&self, origin: f64, delta: f64) -> f64 {
        let mut sum = 0.0;
        for (&p, &z) in self.at.iter().zip(&self.residue) {
            sum += z / (delta - (p - origin));
        }
        origin + delta - sum
    }

    fn weight(&self, origin: f64, delta: f64) -> f64 {
        let mut s = 0.0;
        for (&p, &z) in self.at.iter().zip(&self.residue) {
            let t = delta - (p - origin);
            s += z / (t * t);
        }
        1.0 / (1.0 + s)
    }

    /// `h = g·Π(δ − qⱼ)` over the excluded poles `qⱼ = pⱼ − origin`, and
    /// `h′`. Removing the poles next to a root leaves a smooth function on
    /// which Newton's method converges in a few steps.
    fn deflated(&self, origin: f64, delta: f64, skip: &[usize]) -> (f64, f64, f64) {
        let mut sum = 0.0;
        let mut size = 0.0;
        let mut slope = 0.0;
        for (j, (&p, &z)) in self.at.iter().zip(&self.residue).enumerate() {
            if skip.contains(&j) {
                continue;
            }
            let t = z / (delta - (p - origin));
            sum += t;
            size += t.abs();
            slope += t * t / z;
        }
        let c = origin + delta - sum;
        let dc = 1.0 + slope;
        // rounding scale of h
        size += origin.abs() + delta.abs();
        match *skip {
            [a] => {
                let ta = delta - (self.at[a] - origin);
                let za = self.residue[a];
                (c * ta - za, dc * ta + c, size * ta.abs() + za)
            }
            [a, b] => {
                let (ta, tb) = (delta - (self.at[a] - origin), delta - (self.at[b] - origin));
                let (za, zb) = (self.residue[a], self.residue[b]);
                (
                    c * ta * tb - za * tb - zb * ta,
                    dc * ta * tb + c * (ta + tb) - za - zb,
                    size * (ta * tb).abs() + za * tb.abs() + zb * ta.abs(),
                )
            }
            _ => (c, dc, size),
        }
    }

    /// Starting point: the root of `h` with the smooth part of `g` frozen
    /// at the middle of the bracket.
    fn model_root(&self, origin: f64, lo: f64, hi: f64, skip: &[usize]) -> Option<f64> {
        let mid = 0.5 * (lo + hi);
        let mut c = origin + mid;
        for (j, (&p, &z)) in self.at.iter().zip(&self.residue).enumerate() {
            if !skip.contains(&j) {
                c -= z / (mid - (p - origin));
            }
        }
        let x = match *skip {
            [a] => self.at[a] - origin + self.residue[a] / c,
            [a, b] => {
                let (qa, qb) = (self.at[a] - origin, self.at[b] - origin);
                let (za, zb) = (self.residue[a], self.residue[b]);
                // c·x² − B·x + C = 0
                let big = c * (qa + qb) + za + zb;
                let small = c * qa * qb + za * qb + zb * qa;
                let disc = big * big - 4.0 * c * small;
                if !(disc >= 0.0) {
                    return None;
                }
                let r = 0.5 * (big + disc.sqrt().copysign(big));
                let roots = [r / c, small / r];
                *roots.iter().find(|x| **x > lo && **x < hi)?
            }
            _ => return None,
        };
        (x > lo && x < hi).then_some(x)
    }

    /// Root of `g` in `origin + (lo, hi)`, where `skip` are the poles at the
    /// ends of the bracket.
    fn root(&self, origin: f64, mut lo: f64, mut hi: f64, skip: &[usize]) -> Result<f64> {
        let sign_lo = self.deflated(origin, lo, skip).0.signum();
        let mut x = self.model_root(origin, lo, hi, skip).unwrap_or(0.5 * (lo + hi));
        for _ in 0..200 {
            let (h, dh, size) = self.deflated(origin, x, skip);
            if h.abs() <= 4.0 * f64::EPSILON * size {
                return Ok(x);
            }
            if !h.is_finite() {
                break;
            }
            if h.signum() == sign_lo {
                lo = x;
            } else {
                hi = x;
            }
            let newton = x - h / dh;
            let next = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
            let step = (next - x).abs();
            x = next;
            if step <= 2.0 * f64::EPSILON * x.abs() || hi - lo <= 2.0 * f64::EPSILON * x.abs() {
                return Ok(x);
            }
        }
        if x.is_finite() && lo < x && x < hi {
            Ok(x)
        } else {
            Err(Error::numerical(format!("secular root near {origin} did not converge")))
        }
    }

    /// Lower end `δ` of a bracket below the lowest pole (or above the
    /// highest one for `sign = 1`), pushed out until `g` has the right sign.
    fn exterior_bracket(&self, origin: f64, start: f64, sign: f64) -> Result<f64> {
        let mut delta = start;
        for _ in 0..64 {
            let g = self.secular(origin, delta);
            if g * sign > 0.0 {
                return Ok(delta);
            }
            delta *= 2.0;
        }
        Err(Error::numerical(format!("cannot bracket exterior root next to {origin}")))
    }

    /// Secular roots with their shift origin and offset.
    fn roots(&self) -> Result<Vec<(f64, f64)>> {
        let k = self.at.len();
        if k == 0 {
            return Ok(vec![(0.0, 0.0)]);
        }
        let radius = self.residue.iter().sum::<f64>().sqrt();
        let mut out = Vec::with_capacity(k + 1);

        // below the lowest pole: E ≥ min(0, p₀) − √Σ|V|²
        let p0 = self.at[0];
        let lo = (p0.min(0.0) - p0 - radius) * (1.0 + 1e-12) - f64::MIN_POSITIVE;
        let lo = self.exterior_bracket(p0, lo, -1.0)?;
        out.push((p0, self.root(p0, lo, 0.0, &[0])?));

        for i in 0..k - 1 {
            let (left, right) = (self.at[i], self.at[i + 1]);
            let half = 0.5 * (right - left);
            let g_mid = self.secular(left, half);
            if g_mid >= 0.0 {
                out.push((left, self.root(left, 0.0, half, &[i, i + 1])?));
            } else {
                let mid = -(right - (left + half));
                out.push((right, self.root(right, mid, 0.0, &[i, i + 1])?));
            }
        }

        let pk = self.at[k - 1];
        let hi = (pk.max(0.0) - pk + radius) * (1.0 + 1e-12) + f64::MIN_POSITIVE;
        let hi = self.exterior_bracket(pk, hi, 1.0)?;
        out.push((pk, self.root(pk, 0.0, hi, &[k - 1])?));
        Ok(out)
    }
}

/// All `N+1` roots of `g(E) = E − Σ_μ |V_μ|²/(E − E_μ)`, ascending.
///
/// Levels with `|V_μ|² = 0` are returned unchanged as eigenvalues.
pub fn secular_eigenvalues(spectrum: &Spectrum, coupling: &CouplingVector) -> Result<Vec<f64>> {
    decompose(spectrum, coupling).map(|d| d.eigenvalues)
}

/// `w_m = [1 + Σ_μ |V_μ|²/(E_m − E_μ)²]⁻¹` for given eigenvalues.
///
/// Eigenvalues equal to a coupled level (decoupled levels get weight 0)
/// are rejected.
pub fn doorway_weights(spectrum: &Spectrum, coupling: &CouplingVector, eigenvalues: &[f64]) -> Result<Vec<f64>> {
    let poles = Poles::new(spectrum, coupling)?;
    let mut isolated = poles.isolated.clone();
    eigenvalues
        .iter()
        .map(|&e| {
            if let Some(pos) = isolated.iter().position(|&x| x == e) {
                isolated.swap_remove(pos);
                return Ok(0.0);
            }
            let mut s = 0.0;
            for (i, (&p, &z)) in poles.at.iter().zip(&poles.residue).enumerate() {
                let t = e - p;
                if t == 0.0 {
                    return Err(Error::numerical(format!(
                        "eigenvalue {e} coincides with level {i} (interval ({}, {}))",
                        if i > 0 { poles.at[i - 1] } else { f64::NEG_INFINITY },
                        poles.at.get(i + 1).copied().unwrap_or(f64::INFINITY)
                    )));
                }
                s += z / (t * t);
            }
            let w = 1.0 / (1.0 + s);
            if !w.is_finite() {
                return Err(Error::numerical(format!("non-finite weight at eigenvalue {e}")));
            }
            Ok(w)
        })
        .collect()
}

/// Eigenvalues and doorway weights via the secular equation.
pub fn decompose(spectrum: &Spectrum, coupling: &CouplingVector) -> Result<SpectralDecomposition> {
    let poles = Poles::new(spectrum, coupling)?;
    let roots = poles.roots()?;
    let mut pairs: Vec<(f64, f64)> = roots
        .iter()
        .map(|&(origin, delta)| (origin + delta, poles.weight(origin, delta)))
        .collect();
    pairs.extend(poles.isolated.iter().map(|&e| (e, 0.0)));
    if !poles.isolated.is_empty() {
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    }
    if let Some(bad) = pairs.iter().find(|(_, w)| !w.is_finite()) {
        return Err(Error::numerical(format!("non-finite weight at eigenvalue {}", bad.0)));
    }
    let (eigenvalues, weights) = pairs.into_iter().unzip();
    Ok(SpectralDecomposition { eigenvalues, weights })
}

/// Full dense eigendecomposition of the `(N+1)×(N+1)` Hamiltonian; used as
/// an independent check of [`decompose`].
pub fn dense_eigen_oracle(spectrum: &Spectrum, coupling: &CouplingVector) -> Result<SpectralDecomposition> {
    let n = spectrum.levels.len();
    if n > DENSE_ORACLE_MAX_N {
        return Err(Error::invalid(format!("dense oracle limited to N <= {DENSE_ORACLE_MAX_N}, got {n}")));
    }
    if coupling.len() != n {
        return Err(Error::invalid("spectrum and coupling sizes differ"));
    }
    // the gauge V_μ → |V_μ| is a diagonal unitary change of basis that
    // leaves the doorway component's modulus unchanged
    let mut h = DMatrix::<f64>::zeros(n + 1, n + 1);
    for (i, (&e, &v)) in spectrum.levels.iter().zip(&coupling.entries).enumerate() {
        h[(i + 1, i + 1)] = e;
        h[(0, i + 1)] = v.norm();
        h[(i + 1, 0)] = v.norm();
    }
    let (eigenvalues, vectors) = linalg::jacobi_eigen(h)?;
    let weights = (0..=n).map(|m| vectors[(0, m)].powi(2)).collect();
    Ok(SpectralDecomposition { eigenvalues, weights })
}

/// `P(τ) = |Σ_m w_m exp(−i E_m τ/D)|²`, with `τ` in units of `1/D`.
pub fn survival_probability_exact(decomp: &SpectralDecomposition, tau: f64, spacing: f64) -> f64 {
    if tau == 0.0 {
        // ⟨s|s⟩ = 1
        return 1.0;
    }
    let phase = tau / spacing;
    let mut re = 0.0;
    let mut im = 0.0;
    for (&e, &w) in decomp.eigenvalues.iter().zip(&decomp.weights) {
        let (s, c) = (e * phase).sin_cos();
        re += w * c;
        im -= w * s;
    }
    re * re + im * im
}

/// [`survival_probability_exact`] on a grid of times.
pub fn survival_curve_exact(decomp: &SpectralDecomposition, taus: &[f64], spacing: f64) -> Vec<f64> {
    taus.iter()
        .map(|&t| survival_probability_exact(decomp, t, spacing))
        .collect()
}

/// `IPR = Σ_m w_m²`.
pub fn ipr_exact(decomp: &SpectralDecomposition) -> f64 {
    decomp.weights.iter().map(|w| w * w).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::Coupling;
    use num_complex::Complex64;
    use approx::assert_relative_eq;

    fn single() -> (Spectrum, CouplingVector) {
        (
            Spectrum {
                levels: vec![1.0],
                spacing: 1.0,
            },
            CouplingVector::from_entries(Coupling::Real, vec![Complex64::new(1.0, 0.0)]),
        )
    }

    #[test]
    fn one_level_by_hand() {
        let (s, c) = single();
        let d = decompose(&s, &c).unwrap();
        let r5 = 5f64.sqrt();
        assert_relative_eq!(d.eigenvalues[0], (1.0 - r5) / 2.0, max_relative = 1e-15);
        assert_relative_eq!(d.eigenvalues[1], (1.0 + r5) / 2.0, max_relative = 1e-15);
        // w = 1/(1 + 1/(E−1)²)
        assert_relative_eq!(d.weights[0], 0.723_606_797_749_979, max_relative = 1e-14);
        assert_relative_eq!(d.weights[1], 0.276_393_202_250_021, max_relative = 1e-14);
        let w = doorway_weights(&s, &c, &d.eigenvalues).unwrap();
        assert_relative_eq!(w[0], d.weights[0], max_relative = 1e-14);
        let o = dense_eigen_oracle(&s, &c).unwrap();
        assert_relative_eq!(o.eigenvalues[1], d.eigenvalues[1], max_relative = 1e-14);
        assert_relative_eq!(o.weights[0], d.weights[0], max_relative = 1e-13);
    }

    #[test]
    fn decoupled_levels() {
        let s = Spectrum {
            levels: vec![-1.0, 0.5, 2.0],
            spacing: 1.0,
        };
        let c = CouplingVector::from_entries(Coupling::Complex, vec![Complex64::new(0.0, 0.0); 3]);
        let d = decompose(&s, &c).unwrap();
        assert_eq!(d.eigenvalues, vec![-1.0, 0.0, 0.5, 2.0]);
        assert_eq!(d.weights, vec![0.0, 1.0, 0.0, 0.0]);
        assert_eq!(ipr_exact(&d), 1.0);
        for tau in [0.0, 0.3, 7.0] {
            assert_eq!(survival_probability_exact(&d, tau, 1.0), 1.0);
        }
        let o = dense_eigen_oracle(&s, &c).unwrap();
        assert_eq!(o.eigenvalues, vec![-1.0, 0.0, 0.5, 2.0]);
        assert_relative_eq!(o.weights[1], 1.0);
    }

    #[test]
    fn partly_decoupled() {
        let s = Spectrum {
            levels: vec![-1.0, 0.5, 2.0],
            spacing: 1.0,
        };
        let c = CouplingVector::from_entries(
            Coupling::Real,
            vec![Complex64::new(0.3, 0.0), Complex64::new(0.0, 0.0), Complex64::new(-0.2, 0.0)],
        );
        let d = decompose(&s, &c).unwrap();
        let o = dense_eigen_oracle(&s, &c).unwrap();
        assert_eq!(d.len(), 4);
        assert!(d.eigenvalues.contains(&0.5));
        for m in 0..4 {
            assert!((d.eigenvalues[m] - o.eigenvalues[m]).abs() < 1e-13);
            assert!((d.weights[m] - o.weights[m]).abs() < 1e-12);
        }
        let w = doorway_weights(&s, &c, &d.eigenvalues).unwrap();
        assert_eq!(w[2], 0.0);
    }

    #[test]
    fn weight_formula_rejects_pole() {
        let (s, c) = single();
        assert!(matches!(
            doorway_weights(&s, &c, &[1.0]),
            Err(Error::NumericalFailure(_))
        ));
    }

    #[test]
    fn rejects_unsorted_spectrum() {
        let s = Spectrum {
            levels: vec![1.0, 0.0],
            spacing: 1.0,
        };
        let c = CouplingVector::from_entries(Coupling::Real, vec![Complex64::new(1.0, 0.0); 2]);
        assert!(matches!(decompose(&s, &c), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn uniform_weights_ipr() {
        let d = SpectralDecomposition {
            eigenvalues: vec![0.0, 1.0, 2.0, 3.0],
            weights: vec![0.25; 4],
        };
        assert_relative_eq!(ipr_exact(&d), 0.25);
    }
}
