//! Poisson (uncorrelated) background.

use super::{check_lambda, check_tau, clamp_probability, integrate_unit, Evaluation, FORMULA_REL_TOL};
use crate::error::Result;
use crate::quadrature::Tolerance;
use crate::special::erfcx;
use std::f64::consts::PI;

const SQRT_PI: f64 = 1.772_453_850_905_516;

/// Mean survival probability for a Poisson background:
///
/// `F = 1 + λ/(2√π) ∫₀¹ dx x^{−1/2} e^{−π²λ²x/(4(1−x))} { (π/√(1−x))(e^{−τ²λ²/x} cosh B − 1)
///       − (2τ/x) e^{−τ²λ²/x} sinh B }`, with `B = πλ²τ/√(1−x)`.
pub fn survival_poisson(lambda: f64, tau: f64) -> Result<Evaluation> {
    check_lambda(lambda)?;
    check_tau(tau)?;
    if lambda == 0.0 || tau == 0.0 {
        return Ok(Evaluation::exact(1.0));
    }
    let l2 = lambda * lambda;
    // exponents combine into −λ²(p ∓ q)² with p = π√x/(2√(1−x)), q = τ/√x
    let integrand = |x: f64, omx: f64| {
        let sx = x.sqrt();
        let so = omx.sqrt();
        let p = PI * sx / (2.0 * so);
        let q = tau / sx;
        let e_minus = (-l2 * (p - q) * (p - q)).exp();
        let e_plus = (-l2 * (p + q) * (p + q)).exp();
        let e_a = (-l2 * p * p).exp();
        ((PI / so) * (0.5 * (e_minus + e_plus) - e_a) - (tau / x) * (e_minus - e_plus)) / sx
    };
    // p = q at x* = 2τ/(√(τ²+π²)+τ)
    let peak = 2.0 * tau / ((tau * tau + PI * PI).sqrt() + tau);
    let r = integrate_unit(integrand, &[peak], Tolerance::new(FORMULA_REL_TOL, 1e-15))?;
    let scale = lambda / (2.0 * SQRT_PI);
    clamp_probability(
        Evaluation {
            value: 1.0 + scale * r.value,
            err_est: scale * r.error_estimate + f64::EPSILON,
        },
        "survival_poisson",
    )
}

/// Long-time limit `1 − (π^{3/2}λ/2) e^{(πλ/2)²} erfc(πλ/2)`.
pub fn ipr_poisson(lambda: f64) -> Result<Evaluation> {
    check_lambda(lambda)?;
    if lambda == 0.0 {
        return Ok(Evaluation::exact(1.0));
    }
    let a = PI * lambda / 2.0;
    if a >= 8.0 {
        // √π a erfcx(a) = Σ_k (−1)^k (2k−1)!!/(2a²)^k
        let y = 1.0 / (2.0 * a * a);
        let mut term = 1.0;
        let mut sum = 0.0;
        for k in 1..40 {
            term *= -((2 * k - 1) as f64) * y;
            sum -= term;
            if term.abs() <= 1e-17 * sum.abs() {
                break;
            }
        }
        return Ok(Evaluation::closed(sum));
    }
    let value = 1.0 - PI * SQRT_PI * lambda / 2.0 * erfcx(a);
    Ok(Evaluation {
        value,
        err_est: 16.0 * f64::EPSILON,
    })
}
