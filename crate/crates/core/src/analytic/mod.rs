//! Large-N closed forms for the mean survival probability and IPR, the
//! approximations they are compared against, and independent reference
//! integrals used to check them.
//!
//! Time `τ` is measured in Heisenberg times `1/D`; `λ` is the coupling
//! strength in units of the mean level spacing.

mod goe;
mod gue;
mod poisson;
mod reference;

pub use goe::{ipr_goe_add, survival_goe, survival_goe_add};
pub use gue::{ipr_gue, ipr_gue_integral_check, survival_gue};
pub use poisson::{ipr_poisson, survival_poisson};
pub use reference::{survival_gue_reference, survival_poisson_reference};

use crate::ensembles::Background;
use crate::error::{Error, Result};
use crate::quadrature::{integrate_piecewise, integrate_with_endpoints, QuadratureResult, Tolerance};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Relative tolerance of the production formulas.
pub const FORMULA_REL_TOL: f64 = 1e-9;
/// Relative tolerance of the two-dimensional reference integrals.
pub const REFERENCE_REL_TOL: f64 = 1e-9;

/// A computed value with an estimate of its absolute numerical error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub value: f64,
    pub err_est: f64,
}

impl Evaluation {
    pub fn exact(value: f64) -> Self {
        Evaluation { value, err_est: 0.0 }
    }

    /// Closed-form value; error estimated from a few ulps.
    fn closed(value: f64) -> Self {
        Evaluation {
            value,
            err_est: 8.0 * f64::EPSILON * value.abs().max(f64::MIN_POSITIVE),
        }
    }
}

/// Clamps a survival probability into `[0, 1]`, refusing values that are
/// outside by more than the numerical slack.
fn clamp_probability(e: Evaluation, what: &str) -> Result<Evaluation> {
    let slack = 1e-9 + e.err_est;
    if e.value < -slack || e.value > 1.0 + slack || !e.value.is_finite() {
        return Err(Error::numerical(format!("{what} = {} outside [0, 1] (error estimate {:e})", e.value, e.err_est)));
    }
    Ok(Evaluation {
        value: e.value.clamp(0.0, 1.0),
        err_est: e.err_est,
    })
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::invalid(format!("lambda must be finite and non-negative, got {lambda}")));
    }
    Ok(())
}

fn check_tau(tau: f64) -> Result<()> {
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(Error::invalid(format!("tau must be finite and non-negative, got {tau}")));
    }
    Ok(())
}

/// `∫₀¹ f(x, 1−x) dx`, split at the given interior break points.
///
/// `1 − x` is passed separately so that it keeps full relative precision
/// as `x → 1`.
fn integrate_unit<F>(f: F, breaks: &[f64], tol: Tolerance) -> Result<QuadratureResult>
where
    F: Fn(f64, f64) -> f64,
{
    let mut points = vec![0.0];
    points.extend(breaks.iter().copied().filter(|&b| b > 0.0 && b < 1.0));
    points.push(1.0);
    points.sort_by(f64::total_cmp);
    points.dedup();
    let mut total = QuadratureResult::ZERO;
    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        let piece = integrate_with_endpoints(
            |p| {
                let one_minus = (1.0 - b) + p.from_upper;
                if p.x <= 0.0 || one_minus <= 0.0 {
                    0.0
                } else {
                    f(p.x, one_minus)
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

/// Spreading width in units of `D`: `Γ/D = 2πλ²`.
pub fn spreading_width(lambda: f64) -> f64 {
    2.0 * PI * lambda * lambda
}

/// Golden-rule decay `exp(−2πλ²τ)`.
pub fn fgr(lambda: f64, tau: f64) -> Result<f64> {
    check_lambda(lambda)?;
    check_tau(tau)?;
    Ok((-spreading_width(lambda) * tau).exp())
}

/// Factorised saturation estimate `D/(πΓ) = 1/(2π²λ²)`.
pub fn db_saturation(lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    if lambda == 0.0 {
        return Err(Error::invalid("saturation estimate diverges at lambda = 0"));
    }
    Ok(1.0 / (2.0 * PI * PI * lambda * lambda))
}

/// Large-λ asymptote `2/(π²λ²)` of the Poisson IPR.
pub fn ipr_poisson_asymptote(lambda: f64) -> f64 {
    2.0 / (PI * PI * lambda * lambda)
}

/// Large-λ asymptote `1/(π²λ²)` of the GUE IPR.
pub fn ipr_gue_asymptote(lambda: f64) -> f64 {
    1.0 / (PI * PI * lambda * lambda)
}

/// Two-level form factor `b₂(t)` of the background.
pub fn form_factor_b2(background: Background, t: f64) -> f64 {
    let a = t.abs();
    match background {
        Background::Poisson => 0.0,
        Background::Gue => {
            if a <= 1.0 {
                1.0 - a
            } else {
                0.0
            }
        }
        Background::Goe => {
            if a <= 1.0 {
                1.0 - 2.0 * a + a * (1.0 + 2.0 * a).ln()
            } else {
                -1.0 + a * ((2.0 * a + 1.0) / (2.0 * a - 1.0)).ln()
            }
        }
    }
}

/// Golden-rule decay plus factorised saturation minus the
/// spectral-correlation convolution:
/// `e^{−2πλ²τ} + 1/(2π²λ²) − ∫dt′ e^{−2πλ²|τ − 2πt′|} b₂(t′)`.
pub fn gru_approx(lambda: f64, tau: f64, background: Background) -> Result<Evaluation> {
    check_tau(tau)?;
    let db = db_saturation(lambda)?;
    let rate = spreading_width(lambda);
    let base = (-rate * tau).exp() + db;
    if background == Background::Poisson {
        return Ok(Evaluation::closed(base));
    }
    let kernel = |t: f64| (-rate * (tau - 2.0 * PI * t).abs()).exp() * form_factor_b2(background, t);
    let centre = tau / (2.0 * PI);
    let mut points = vec![-1.0, 0.0, 1.0];
    if background == Background::Goe {
        // b₂ decays like 1/(12t²); the exponential sets the cut-off
        let reach = (1e-12f64).ln().abs() / (2.0 * PI * rate);
        points.push(-(1.0 + reach));
        points.push(centre.max(1.0) + reach);
    }
    points.push(centre);
    points.sort_by(f64::total_cmp);
    points.dedup();
    let r = integrate_piecewise(
        |p| kernel(p.x),
        &points,
        Tolerance::new(FORMULA_REL_TOL, 1e-15),
    )?;
    Ok(Evaluation {
        value: base - r.value,
        err_est: r.error_estimate + 8.0 * f64::EPSILON * base,
    })
}

/// Lorentzian local density of states in units of `1/D`, half width `πλ²`.
pub fn ldos_lorentzian(lambda: f64, e_over_d: f64) -> Result<f64> {
    check_lambda(lambda)?;
    if lambda == 0.0 {
        return Err(Error::invalid("Lorentzian width vanishes at lambda = 0"));
    }
    let g = PI * lambda * lambda;
    Ok(g / (PI * (e_over_d * e_over_d + g * g)))
}

/// The analytic survival probability of a background.
pub fn survival(background: Background, lambda: f64, tau: f64) -> Result<Evaluation> {
    match background {
        Background::Poisson => survival_poisson(lambda, tau),
        Background::Gue => survival_gue(lambda, tau),
        Background::Goe => survival_goe(lambda, tau),
    }
}

/// The analytic mean IPR of a background.
pub fn ipr(background: Background, lambda: f64) -> Result<Evaluation> {
    match background {
        Background::Poisson => ipr_poisson(lambda),
        Background::Gue => ipr_gue(lambda),
        Background::Goe => {
            let base = ipr_gue(lambda)?;
            let add = ipr_goe_add(lambda)?;
            Ok(Evaluation {
                value: base.value + add.value,
                err_est: base.err_est + add.err_est,
            })
        }
    }
}
