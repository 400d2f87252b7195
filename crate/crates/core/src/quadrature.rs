//! Double-exponential (tanh–sinh) quadrature.
//!
//! The substitution `x = c + h·tanh(π/2·sinh t)` pushes integrable endpoint
//! singularities (`x^{-1/2}`, `(1−x)^{-1/2}`, logarithms) into a
//! double-exponentially decaying tail, so one engine serves every integral
//! in the analytic module. Integrands may ask for the exact distance of a
//! node to either endpoint through [`Abscissa`], which keeps factors such as
//! `1/√(1−x)` accurate when `x` itself rounds to the endpoint.
//!
//! The trapezoidal step is halved level by level; the difference between
//! successive levels is the error estimate.

use crate::error::{Error, Result};
use std::f64::consts::FRAC_PI_2;

/// Default evaluation budget per integral.
pub const DEFAULT_BUDGET: usize = 1 << 20;

const MIN_LEVEL: usize = 3;
const MAX_LEVEL: usize = 18;
const T_MAX: f64 = 6.6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

impl QuadratureResult {
    pub const ZERO: QuadratureResult = QuadratureResult {
        value: 0.0,
        error_estimate: 0.0,
        evaluations: 0,
    };

    /// Sum of two independent pieces; errors add.
    pub fn combine(self, other: QuadratureResult) -> QuadratureResult {
        QuadratureResult {
            value: self.value + other.value,
            error_estimate: self.error_estimate + other.error_estimate,
            evaluations: self.evaluations + other.evaluations,
        }
    }

    pub fn scale(self, factor: f64) -> QuadratureResult {
        QuadratureResult {
            value: self.value * factor,
            error_estimate: self.error_estimate * factor.abs(),
            evaluations: self.evaluations,
        }
    }
}

/// A quadrature node together with its exact distances to both ends of the
/// integration interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Abscissa {
    pub x: f64,
    pub from_lower: f64,
    pub from_upper: f64,
}

/// Tolerances and budget for one integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
    pub budget: usize,
}

impl Tolerance {
    pub fn new(rel: f64, abs: f64) -> Self {
        Tolerance {
            rel,
            abs,
            budget: DEFAULT_BUDGET,
        }
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }
}

/// `∫_a^b f(x) dx` for `f` evaluable on the open interval.
pub fn integrate_finite<F>(f: F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> Result<QuadratureResult>
where
    F: Fn(f64) -> f64,
{
    integrate_with_endpoints(interior(&f, a, b), a, b, Tolerance::new(rel_tol, abs_tol))
}

/// Wraps a plain integrand so that nodes which round onto an endpoint
/// contribute nothing instead of evaluating `f` there.
fn interior<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> impl Fn(Abscissa) -> f64 + '_ {
    move |p: Abscissa| {
        if p.x <= a || p.x >= b {
            0.0
        } else {
            f(p.x)
        }
    }
}

/// Endpoint-aware variant of [`integrate_finite`].
pub fn integrate_with_endpoints<F>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<QuadratureResult>
where
    F: Fn(Abscissa) -> f64,
{
    check_interval(a, b)?;
    let mut state = TanhSinh::new(a, b);
    let mut previous = state.advance(&f);
    let mut error = f64::INFINITY;
    for level in 1..=MAX_LEVEL {
        let current = state.advance(&f);
        error = (current - previous).abs();
        previous = current;
        if !current.is_finite() {
            return Err(Error::numerical(format!(
                "non-finite quadrature sum on [{a}, {b}] at level {level}"
            )));
        }
        if level >= MIN_LEVEL && error <= tol.abs.max(tol.rel * current.abs()) {
            return Ok(QuadratureResult {
                value: current,
                error_estimate: error,
                evaluations: state.evaluations,
            });
        }
        if state.evaluations >= tol.budget {
            break;
        }
    }
    Err(Error::QuadratureBudget {
        value: previous,
        error,
        evaluations: state.evaluations,
    })
}

/// Integrates over consecutive sub-intervals `[p₀,p₁], [p₁,p₂], …`.
///
/// Interior break points are placed where the integrand has narrow
/// features; the tanh–sinh node density is highest at interval ends.
/// Points must be non-decreasing; empty pieces are skipped.
pub fn integrate_piecewise<F>(f: F, points: &[f64], tol: Tolerance) -> Result<QuadratureResult>
where
    F: Fn(Abscissa) -> f64,
{
    if points.len() < 2 {
        return Err(Error::invalid("need at least two break points"));
    }
    let mut total = QuadratureResult::ZERO;
    for w in points.windows(2) {
        if w[1] < w[0] {
            return Err(Error::invalid(format!("break points not sorted: {} > {}", w[0], w[1])));
        }
        if w[1] == w[0] {
            continue;
        }
        let piece = integrate_with_endpoints(&f, w[0], w[1], tol)?;
        total = total.combine(piece);
    }
    Ok(total)
}

/// `∫_a^∞ f(t) dt` for integrands bounded by a decaying `envelope`.
///
/// The range is extended by doubling until the envelope falls below
/// `1e-14` of the accumulated integral, then each piece is integrated with
/// [`integrate_finite`] tolerances.
pub fn integrate_semiinfinite<F, G>(f: F, a: f64, envelope: G, rel_tol: f64) -> Result<QuadratureResult>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    if !a.is_finite() {
        return Err(Error::invalid("lower limit must be finite"));
    }
    let tol = Tolerance::new(rel_tol, 1e-300);
    let mut length = 1.0_f64.max(a.abs());
    let mut lo = a;
    let mut hi = a + length;
    let mut total = integrate_with_endpoints(interior(&f, lo, hi), lo, hi, tol)?;
    let mut last_envelope = envelope(hi);
    for _ in 0..64 {
        if last_envelope <= 1e-14 * total.value.abs() || last_envelope == 0.0 {
            return Ok(total);
        }
        lo = hi;
        length *= 2.0;
        hi = a + length;
        let env = envelope(hi);
        if !(env <= last_envelope) {
            return Err(Error::invalid(format!(
                "envelope does not decay: {last_envelope:e} at {lo} -> {env:e} at {hi}"
            )));
        }
        last_envelope = env;
        let piece = integrate_with_endpoints(interior(&f, lo, hi), lo, hi, tol)?;
        total = total.combine(piece);
    }
    Err(Error::invalid("envelope did not fall below the truncation threshold"))
}

/// Successive level estimates of `∫_a^b f`, for convergence diagnostics.
pub fn level_estimates<F>(f: F, a: f64, b: f64, levels: usize) -> Result<Vec<f64>>
where
    F: Fn(f64) -> f64,
{
    check_interval(a, b)?;
    let g = interior(&f, a, b);
    let mut state = TanhSinh::new(a, b);
    Ok((0..levels).map(|_| state.advance(&g)).collect())
}

fn check_interval(a: f64, b: f64) -> Result<()> {
    if !(a.is_finite() && b.is_finite()) || a >= b {
        return Err(Error::invalid(format!("need finite a < b, got [{a}, {b}]")));
    }
    Ok(())
}

/// Running state of a tanh–sinh rule over successive halvings of the step.
struct TanhSinh {
    a: f64,
    b: f64,
    half: f64,
    level: usize,
    /// Σ weight·f over all nodes so far, with the step factored out.
    sum: f64,
    /// Largest |t| visited in each direction at level 0 (tail cut-off).
    t_right: f64,
    t_left: f64,
    evaluations: usize,
}

impl TanhSinh {
    fn new(a: f64, b: f64) -> Self {
        TanhSinh {
            a,
            b,
            half: 0.5 * (b - a),
            level: 0,
            sum: 0.0,
            t_right: T_MAX,
            t_left: T_MAX,
            evaluations: 0,
        }
    }

    /// Node at `t ≥ 0` mirrored to the requested side, with its weight
    /// (without the step factor). `None` once the node hits the endpoint.
    fn node(&self, t: f64, right: bool) -> Option<(Abscissa, f64)> {
        let u = FRAC_PI_2 * t.sinh();
        let cu = u.cosh();
        // distance to the nearer endpoint: half·(1 − tanh u) = half·e^{−u}/cosh u
        let near = self.half * (-u).exp() / cu;
        if !(near > 0.0) || !cu.is_finite() {
            return None;
        }
        let far = 2.0 * self.half - near;
        let weight = self.half * FRAC_PI_2 * t.cosh() / (cu * cu);
        let p = if right {
            let x = self.b - near;
            Abscissa {
                x,
                from_lower: far,
                from_upper: near,
            }
        } else {
            let x = self.a + near;
            Abscissa {
                x,
                from_lower: near,
                from_upper: far,
            }
        };
        Some((p, weight))
    }

    fn advance<F: Fn(Abscissa) -> f64>(&mut self, f: &F) -> f64 {
        let h = 0.5_f64.powi(self.level as i32);
        if self.level == 0 {
            let (p, w) = self.node(0.0, true).expect("centre node");
            self.sum += w * f(p);
            self.evaluations += 1;
            let scale = self.sum.abs();
            for right in [true, false] {
                let mut small = 0;
                let mut k = 1;
                loop {
                    let t = k as f64;
                    if t > T_MAX {
                        break;
                    }
                    let Some((p, w)) = self.node(t, right) else {
                        self.set_limit(right, t);
                        break;
                    };
                    let term = w * f(p);
                    self.evaluations += 1;
                    self.sum += term;
                    if t >= 2.0 && term.abs() <= 1e-18 * scale.max(self.sum.abs()) {
                        small += 1;
                        if small >= 2 {
                            self.set_limit(right, t);
                            break;
                        }
                    } else {
                        small = 0;
                    }
                    k += 1;
                }
            }
        } else {
            // odd multiples of the new step
            for right in [true, false] {
                let limit = if right { self.t_right } else { self.t_left };
                let mut k = 1usize;
                loop {
                    let t = k as f64 * h;
                    if t > limit {
                        break;
                    }
                    match self.node(t, right) {
                        Some((p, w)) => {
                            self.sum += w * f(p);
                            self.evaluations += 1;
                        }
                        None => break,
                    }
                    k += 2;
                }
            }
        }
        self.level += 1;
        self.sum * h
    }

    fn set_limit(&mut self, right: bool, t: f64) {
        if right {
            self.t_right = t;
        } else {
            self.t_left = t;
        }
    }
}
