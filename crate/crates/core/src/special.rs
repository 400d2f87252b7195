//! Special functions: the scaled complementary error function and the
//! complex exponential integral E₁.

use num_complex::Complex64;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;

/// `exp(x²)·erfc(x)`, finite for every finite `x ≥ −26`.
pub fn erfcx(x: f64) -> f64 {
    if x < 0.0 {
        // erfc(-x) = 2 - erfc(x)
        return 2.0 * (x * x).exp() - erfcx(-x);
    }
    if x < 4.0 {
        (x * x).exp() * libm::erfc(x)
    } else {
        erfcx_continued_fraction(x)
    }
}

// Laplace continued fraction
//   erfcx(x) = (1/√π) · 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + …))))
// evaluated bottom-up with a fixed depth that is ample for x ≥ 4.
fn erfcx_continued_fraction(x: f64) -> f64 {
    let depth = 80;
    let mut tail = x;
    for k in (1..=depth).rev() {
        tail = x + (k as f64 / 2.0) / tail;
    }
    FRAC_1_SQRT_PI / tail
}

/// Exponential integral `E₁(z) = ∫₁^∞ e^{−zt}/t dt` on the principal branch.
///
/// Power series for `|z| ≤ 4`, continued fraction beyond (the fraction is
/// only used off the negative real axis where it converges).
pub fn exp_integral_e1(z: Complex64) -> Complex64 {
    let r = z.norm();
    if r == 0.0 {
        return Complex64::new(f64::INFINITY, 0.0);
    }
    if r <= 4.0 || (z.re < 0.0 && z.im.abs() < 1.0) {
        e1_series(z)
    } else {
        e1_continued_fraction(z)
    }
}

fn e1_series(z: Complex64) -> Complex64 {
    // E₁(z) = −γ − ln z − Σ_{k≥1} (−z)^k / (k·k!)
    let mut sum = Complex64::new(0.0, 0.0);
    let mut term = Complex64::new(1.0, 0.0);
    for k in 1..500 {
        let kf = k as f64;
        term *= -z / kf;
        let contrib = term / kf;
        sum += contrib;
        if contrib.norm() <= 1e-17 * sum.norm() {
            break;
        }
    }
    -EULER_GAMMA - z.ln() - sum
}

fn e1_continued_fraction(z: Complex64) -> Complex64 {
    // E₁(z) = e^{−z} / (z + 1 − 1²/(z + 3 − 2²/(z + 5 − …))), modified Lentz.
    let tiny = 1e-300;
    let one = Complex64::new(1.0, 0.0);
    let mut b = z + 1.0;
    let mut c = Complex64::new(1.0 / tiny, 0.0);
    let mut d = one / b;
    let mut h = d;
    for i in 1..1000 {
        let a = -((i * i) as f64);
        b += 2.0;
        d = one / (a * d + b);
        c = b + a / c;
        let del = c * d;
        h *= del;
        if (del - one).norm() < 1e-16 {
            break;
        }
    }
    h * (-z).exp()
}

/// `∫₁^∞ e^{iwt}/t dt` for `Im w > 0`.
pub fn oscillatory_tail_integral(w: Complex64) -> Complex64 {
    exp_integral_e1(Complex64::new(0.0, -1.0) * w)
}

/// `sin(x)/x` with the removable singularity filled in.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// `d/dx [sin(x)/x]`.
pub fn sinc_derivative(x: f64) -> f64 {
    if x.abs() < 1e-3 {
        let x2 = x * x;
        x * (-1.0 / 3.0 + x2 / 30.0 - x2 * x2 / 840.0)
    } else {
        (x * x.cos() - x.sin()) / (x * x)
    }
}

/// `d/dz [sin(z)/z]` for complex arguments.
pub fn sinc_derivative_complex(z: Complex64) -> Complex64 {
    if z.norm() < 1e-3 {
        let z2 = z * z;
        z * (-1.0 / 3.0 + z2 / 30.0 - z2 * z2 / 840.0)
    } else {
        (z * z.cos() - z.sin()) / (z * z)
    }
}

/// `sin(z)/z` for complex arguments.
pub fn sinc_complex(z: Complex64) -> Complex64 {
    if z.norm() < 1e-4 {
        let z2 = z * z;
        1.0 - z2 / 6.0 + z2 * z2 / 120.0
    } else {
        z.sin() / z
    }
}
