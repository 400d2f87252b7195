//! GUE background.

use super::{check_lambda, check_tau, clamp_probability, integrate_unit, Evaluation, FORMULA_REL_TOL};
use crate::error::Result;
use crate::quadrature::Tolerance;
use crate::special::erfcx;
use std::f64::consts::PI;

const SQRT_PI: f64 = 1.772_453_850_905_516;

/// Mean survival probability for a GUE background, as the difference of
/// two x-integrals over `W± = 1 ± √(1−x)`.
pub fn survival_gue(lambda: f64, tau: f64) -> Result<Evaluation> {
    check_lambda(lambda)?;
    check_tau(tau)?;
    if lambda == 0.0 || tau == 0.0 {
        return Ok(Evaluation::exact(1.0));
    }
    let l2 = lambda * lambda;
    // e^{−π²λ²W²/x}(1 − e^{−λ²τ²/x} cosh(2πλ²τW/x)) and the matching sinh
    // term, written as Gaussians in (τ ∓ πW)
    let bracket = |w: f64, x: f64| {
        let g_minus = (-l2 * (tau - PI * w).powi(2) / x).exp();
        let g_plus = (-l2 * (tau + PI * w).powi(2) / x).exp();
        let g0 = (-l2 * (PI * w).powi(2) / x).exp();
        PI * w * (g0 - 0.5 * (g_minus + g_plus)) + tau * 0.5 * (g_minus - g_plus)
    };
    let integrand = |x: f64, omx: f64| {
        let s = omx.sqrt();
        let w_plus = 1.0 + s;
        let w_minus = x / w_plus;
        // x/2 − W₋ = −x W₋/(2W₊)
        let upper = -x * w_minus / (2.0 * w_plus) * bracket(w_plus, x);
        let lower = (w_plus - x / 2.0) * bracket(w_minus, x);
        (upper - lower) / x / (x.sqrt() * s)
    };
    // τ = πW₊ for τ ∈ [π, 2π], τ = πW₋ for τ < π
    let mut breaks = Vec::new();
    let r = tau / PI;
    if r < 1.0 {
        let s = 1.0 - r;
        breaks.push(1.0 - s * s);
    } else if r <= 2.0 {
        let s = r - 1.0;
        breaks.push(1.0 - s * s);
    }
    let q = integrate_unit(integrand, &breaks, Tolerance::new(FORMULA_REL_TOL, 1e-15))?;
    let scale = lambda / (2.0 * SQRT_PI);
    clamp_probability(
        Evaluation {
            value: 1.0 + scale * q.value,
            err_est: scale * q.error_estimate + f64::EPSILON,
        },
        "survival_gue",
    )
}

/// Long-time limit `1 − π²λ² − (π²λ/(2√π))(1 − 2π²λ²) e^{π²λ²} erfc(πλ)`.
pub fn ipr_gue(lambda: f64) -> Result<Evaluation> {
    check_lambda(lambda)?;
    if lambda == 0.0 {
        return Ok(Evaluation::exact(1.0));
    }
    let a = PI * lambda;
    if a >= 8.0 {
        // Σ_{k≥1} (−1)^{k+1} (k+1)(2k−1)!!/(2a²)^k
        let y = 1.0 / (2.0 * a * a);
        let mut dfact = 1.0;
        let mut power = 1.0;
        let mut sum = 0.0;
        for k in 1..40 {
            let kf = k as f64;
            dfact *= 2.0 * kf - 1.0;
            power *= -y;
            let term = -(kf + 1.0) * dfact * power;
            sum += term;
            if term.abs() <= 1e-17 * sum.abs() {
                break;
            }
        }
        return Ok(Evaluation::closed(sum));
    }
    let value = 1.0 - a * a - a * SQRT_PI / 2.0 * (1.0 - 2.0 * a * a) * erfcx(a);
    Ok(Evaluation {
        value,
        err_est: 16.0 * f64::EPSILON * (1.0 + a * a * a * a),
    })
}

/// The long-time x-integral
/// `1 − (λ√π/2) ∫₀¹ dx/√(x(1−x)) e^{−π²λ²(2−x)/x} [cosh C + √(1−x) sinh C]`,
/// `C = 2π²λ²√(1−x)/x`, evaluated by quadrature.
pub fn ipr_gue_integral_check(lambda: f64) -> Result<Evaluation> {
    check_lambda(lambda)?;
    if lambda == 0.0 {
        return Ok(Evaluation::exact(1.0));
    }
    let k = PI * PI * lambda * lambda;
    // (2−x ∓ 2√(1−x)) = W∓²
    let integrand = |x: f64, omx: f64| {
        let s = omx.sqrt();
        let w_plus = 1.0 + s;
        let w_minus = x / w_plus;
        let near = (-k * w_minus * w_minus / x).exp() * (1.0 + s);
        let far = (-k * w_plus * w_plus / x).exp() * (1.0 - s);
        0.5 * (near + far) / (x.sqrt() * s)
    };
    let q = integrate_unit(integrand, &[], Tolerance::new(1e-12, 1e-15))?;
    let scale = lambda * SQRT_PI / 2.0;
    Ok(Evaluation {
        value: 1.0 - scale * q.value,
        err_est: scale * q.error_estimate + f64::EPSILON,
    })
}
