//! GOE background: GUE result plus a Cooperon-type correction.
//!
//! Both corrections carry a factor ½ relative to the double integrals as
//! usually written; with it the Pfaffian kernel reduces to
//! `R_GUE + ½R_add`, and the corrected curves agree with Monte Carlo.

use super::{check_lambda, check_tau, clamp_probability, gue::survival_gue, integrate_unit, Evaluation};
use crate::error::{Error, Result};
use crate::quadrature::{integrate_with_endpoints, Tolerance};
use std::f64::consts::PI;

const OUTER_REL_TOL: f64 = 1e-8;
const INNER_REL_TOL: f64 = 1e-10;
/// Gaussian envelope cut-off, `e^{−45} ≈ 3e−20`.
const ENVELOPE_EXPONENT: f64 = 45.0;

/// `H(W)` with the hyperbolic functions folded into the Gaussians
/// `G∓ = e^{−λ²(W∓π)²/x}`.
fn h(w: f64, l2: f64, x: f64) -> f64 {
    let g_minus = (-l2 * (w - PI).powi(2) / x).exp();
    let g_plus = (-l2 * (w + PI).powi(2) / x).exp();
    0.5 * (4.0 * l2 * PI / x + 1.0 / PI) * w * (g_minus - g_plus)
        - l2 / x * (PI * PI + w * w) * (g_minus + g_plus)
}

/// `∫_{π√(1−x)}^∞ du/u f(u)` where `u = πt√(1−x)`; `f` is a combination of
/// `H` at shifts of `u` whose Gaussian peaks sit at `peaks`.
fn inner<F>(f: F, x: f64, omx: f64, lambda: f64, reach: f64, peaks: &[f64]) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let lower = PI * omx.sqrt();
    let upper = reach + PI + (ENVELOPE_EXPONENT * x).sqrt() / lambda;
    let mut points = vec![lower];
    points.extend(peaks.iter().copied().filter(|&p| p > lower && p < upper));
    points.push(upper);
    points.sort_by(f64::total_cmp);
    points.dedup();
    // H is of order (λ²/x)(π² + W²); round-off in the bracket scales alike
    let l2 = lambda * lambda;
    let noise = 1e-13 * (l2 / x * (PI * PI + upper * upper) + 1.0 / PI) * upper;
    let tol = Tolerance::new(INNER_REL_TOL, noise);
    let mut total = 0.0;
    for w in points.windows(2) {
        let r = integrate_with_endpoints(|p| f(p.x) / p.x, w[0], w[1], tol)?;
        total += r.value;
    }
    Ok(total)
}

fn outer<F>(f: F, what: &str) -> Result<Evaluation>
where
    F: Fn(f64, f64) -> Result<f64>,
{
    let failure = std::cell::RefCell::new(None);
    let r = integrate_unit(
        |x, omx| match f(x, omx) {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        },
        &[],
        Tolerance::new(OUTER_REL_TOL, 1e-14),
    )?;
    if let Some(e) = failure.into_inner() {
        return Err(Error::numerical(format!("{what}: inner integral failed: {e}")));
    }
    Ok(Evaluation {
        value: r.value,
        err_est: r.error_estimate,
    })
}

/// Cooperon correction to the survival probability,
/// `½ ∫₀¹dx ∫₁^∞dt (√(πx)λ/(8t√(1−x))) [H(τ+u) + H(u−τ) − 2H(u)]`, `u = πt√(1−x)`.
pub fn survival_goe_add(lambda: f64, tau: f64) -> Result<Evaluation> {
    check_lambda(lambda)?;
    check_tau(tau)?;
    if lambda == 0.0 || tau == 0.0 {
        return Ok(Evaluation::exact(0.0));
    }
    let l2 = lambda * lambda;
    let peaks = [(PI - tau).abs(), PI, tau + PI, tau];
    let e = outer(
        |x, omx| {
            let bracket = |u: f64| h(tau + u, l2, x) + h(u - tau, l2, x) - 2.0 * h(u, l2, x);
            let v = inner(bracket, x, omx, lambda, tau, &peaks)?;
            Ok(0.5 * (PI * x).sqrt() * lambda / (8.0 * omx.sqrt()) * v)
        },
        "survival_goe_add",
    )?;
    Ok(e)
}

/// GOE survival probability: GUE result plus the Cooperon correction.
pub fn survival_goe(lambda: f64, tau: f64) -> Result<Evaluation> {
    let base = survival_gue(lambda, tau)?;
    let add = survival_goe_add(lambda, tau)?;
    clamp_probability(
        Evaluation {
            value: base.value + add.value,
            err_est: base.err_est + add.err_est,
        },
        "survival_goe",
    )
}

/// Cooperon correction to the mean IPR,
/// `−½ ∫₀¹dx ∫₁^∞dt (√(πx)λ/(4t√(1−x))) H(u)`.
pub fn ipr_goe_add(lambda: f64) -> Result<Evaluation> {
    check_lambda(lambda)?;
    if lambda == 0.0 {
        return Ok(Evaluation::exact(0.0));
    }
    let l2 = lambda * lambda;
    outer(
        |x, omx| {
            let v = inner(|u| h(u, l2, x), x, omx, lambda, 0.0, &[PI])?;
            Ok(-0.5 * (PI * x).sqrt() * lambda / (4.0 * omx.sqrt()) * v)
        },
        "ipr_goe_add",
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vanishes_at_zero_time() {
        assert_eq!(survival_goe_add(0.4, 0.0).unwrap().value, 0.0);
        assert_eq!(survival_goe(0.4, 0.0).unwrap().value, 1.0);
    }

    #[test]
    fn h_folds_hyperbolic_functions() {
        let (w, l2, x): (f64, f64, f64) = (2.3, 0.25, 0.6);
        let env = (-l2 / x * (PI * PI + w * w)).exp();
        let arg = 2.0 * PI * l2 * w / x;
        let direct = env
            * ((4.0 * l2 * PI / x + 1.0 / PI) * w * arg.sinh() - 2.0 * l2 / x * (PI * PI + w * w) * arg.cosh());
        assert!((h(w, l2, x) - direct).abs() < 1e-14);
    }
}
