//! Two-dimensional reference forms of the Poisson and GUE survival
//! probabilities, with the Gaussian s-integral done numerically.
//!
//! These share no algebra with the production formulas beyond the starting
//! double integrals, which makes them usable as oracles.

use super::{check_lambda, check_tau, clamp_probability, Evaluation, REFERENCE_REL_TOL};
use crate::error::Result;
use crate::quadrature::{integrate_with_endpoints, QuadratureResult, Tolerance};
use std::f64::consts::PI;

/// `∫₀^∞ s sin(ws) e^{−xs²} ds` by the trapezoid rule on `u = s√x`.
///
/// The integrand is even and entire in `u`, so the trapezoid rule with
/// step `h = 2π/(ω + 25.3)` has an aliasing error below `e^{−160}`.
fn gaussian_sine_moment(w: f64, x: f64) -> f64 {
    let omega = w.abs() / x.sqrt();
    if omega == 0.0 {
        return 0.0;
    }
    // |K| ≈ (√π/4)(ω/x)e^{−ω²/4}; skip the sum once that is below 1e−16.
    // For ω ≥ 60 the bound holds for every normal x.
    if omega >= 60.0 || omega.ln() - x.ln() - omega * omega / 4.0 < -37.0 {
        return 0.0;
    }
    let h = 2.0 * PI / (omega + 25.3);
    let u_max = 6.7;
    let steps = (u_max / h).ceil() as usize;
    let mut sum = 0.0;
    for k in 1..=steps {
        let u = k as f64 * h;
        sum += u * (omega * u).sin() * (-u * u).exp();
    }
    w.signum() * h * sum / x
}

/// `½K(w+τ) + ½K(w−τ) − K(w)`: the s-integral with `s[cos τs − 1]`.
fn echo_moment(w: f64, tau: f64, x: f64) -> f64 {
    0.5 * gaussian_sine_moment(w + tau, x) + 0.5 * gaussian_sine_moment(w - tau, x)
        - gaussian_sine_moment(w, x)
}

/// Integrates `g(x, X − x)` over `[0, X]` with `X = 1/(4λ²)`, split at the
/// given break points.
fn integrate_range<G>(g: G, upper: f64, breaks: &[f64]) -> Result<QuadratureResult>
where
    G: Fn(f64, f64) -> f64,
{
    let mut points = vec![0.0];
    points.extend(breaks.iter().copied().filter(|&b| b > 0.0 && b < upper));
    points.push(upper);
    points.sort_by(f64::total_cmp);
    points.dedup();
    let tol = Tolerance::new(REFERENCE_REL_TOL, 1e-14);
    let mut total = QuadratureResult::ZERO;
    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        let piece = integrate_with_endpoints(
            |p| {
                let rest = (upper - b) + p.from_upper;
                if p.x <= 0.0 || rest <= 0.0 {
                    0.0
                } else {
                    g(p.x, rest)
                }
            },
            a,
            b,
            tol,
        )?;
        total = total.combine(piece);
    }
    Ok(total)
}

/// `1 + (1/π)∫ds s[cos τs − 1] ∫₀^{1/4λ²}dx e^{−xs²} sin(2πλ²xs/√(1−4xλ²))`
/// by direct quadrature in both variables.
pub fn survival_poisson_reference(lambda: f64, tau: f64) -> Result<Evaluation> {
    check_lambda(lambda)?;
    check_tau(tau)?;
    if lambda == 0.0 || tau == 0.0 {
        return Ok(Evaluation::exact(1.0));
    }
    let l2 = lambda * lambda;
    let upper = 1.0 / (4.0 * l2);
    let g = |x: f64, rest: f64| {
        // 1 − 4xλ² = 4λ²(X − x)
        let c = (4.0 * l2 * rest).sqrt();
        let a = 2.0 * PI * l2 * x / c;
        echo_moment(a, tau, x)
    };
    // a(x) = τ
    let crossing = tau / (2.0 * l2 * ((tau * tau + PI * PI).sqrt() + tau));
    let q = integrate_range(g, upper, &[crossing])?;
    clamp_probability(
        Evaluation {
            value: 1.0 + 2.0 / PI * q.value,
            err_est: 2.0 / PI * q.error_estimate + f64::EPSILON,
        },
        "survival_poisson_reference",
    )
}

/// The GUE double integral with the braces
/// `sin(πs√(1−4xλ²))cos(πs) − cos(πs√(1−4xλ²))sin(πs)(1−2λ²x)/√(1−4xλ²)`,
/// by direct quadrature in both variables.
///
/// The overall sign of the double integral is taken so that the result is
/// normalised and decays; with the opposite sign it would equal `2 − F`.
pub fn survival_gue_reference(lambda: f64, tau: f64) -> Result<Evaluation> {
    check_lambda(lambda)?;
    check_tau(tau)?;
    if lambda == 0.0 || tau == 0.0 {
        return Ok(Evaluation::exact(1.0));
    }
    let l2 = lambda * lambda;
    let upper = 1.0 / (4.0 * l2);
    let g = |x: f64, rest: f64| {
        let c2 = 4.0 * l2 * rest;
        let c = c2.sqrt();
        let q = (1.0 - 2.0 * l2 * x) / c;
        // sin a cos b − cos a sin b·q = ½(1−q) sin(a+b) + ½(1+q) sin(a−b)
        let w_sum = PI * (c + 1.0);
        let w_diff = -4.0 * PI * x * l2 / (1.0 + c);
        0.5 * (1.0 - q) * echo_moment(w_sum, tau, x) + 0.5 * (1.0 + q) * echo_moment(w_diff, tau, x)
    };
    // π(1+c) = τ for τ ∈ [π, 2π]; π(1−c) = τ for τ ≤ π
    let mut breaks = Vec::new();
    let r = tau / PI;
    let c = if r <= 1.0 { Some(1.0 - r) } else if r <= 2.0 { Some(r - 1.0) } else { None };
    if let Some(c) = c {
        breaks.push((1.0 - c * c) / (4.0 * l2));
    }
    let q = integrate_range(g, upper, &breaks)?;
    clamp_probability(
        Evaluation {
            value: 1.0 - 2.0 / PI * q.value,
            err_est: 2.0 / PI * q.error_estimate + f64::EPSILON,
        },
        "survival_gue_reference",
    )
}
