//! Large-N averages of ratios of characteristic polynomials over GUE and
//! GOE, and the doorway kernel `R(k, s)` that follows from them.
//!
//! Arguments are in units where the mean level spacing at the band centre
//! is `π`: the GUE average is over `H/√(2N)` of size `N`, the GOE average
//! over `H/√(4N)` of size `2N`.

use crate::error::{Error, Result};
use crate::linalg::{determinant, pfaffian};
use crate::special::{exp_integral_e1, oscillatory_tail_integral, sinc_complex, sinc_derivative, sinc_derivative_complex};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Largest number of variables per family.
pub const MAX_ORDER: usize = 8;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Arguments of the GUE average
/// `⟨Π det(H−α⁻ₖ) Π det(H−β⁻ₗ) / Π det(H−α⁺ₖ) Π det(H−β⁺ₗ)⟩`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GueArgs {
    pub alpha_minus: Vec<Complex64>,
    pub alpha_plus: Vec<Complex64>,
    pub beta_minus: Vec<Complex64>,
    pub beta_plus: Vec<Complex64>,
}

/// Arguments of the GOE average `⟨Π det(H−αₖ) / Π det(H−βₗ)⟩`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoeArgs {
    pub alpha: Vec<Complex64>,
    pub beta: Vec<Complex64>,
}

/// `√(s² − 4iksλ²)` on the principal branch.
fn root(k: f64, s: f64, lambda: f64) -> Complex64 {
    Complex64::new(s * s, -4.0 * k * s * lambda * lambda).sqrt()
}

impl GueArgs {
    /// The `n = m = 1` arguments whose average is `R_GUE(k, s)`.
    pub fn doorway(k: f64, s: f64, lambda: f64) -> Self {
        let w = root(k, s, lambda);
        GueArgs {
            alpha_minus: vec![Complex64::new(PI * s / 2.0, 0.0)],
            alpha_plus: vec![PI / 2.0 * w],
            beta_minus: vec![Complex64::new(-PI * s / 2.0, 0.0)],
            beta_plus: vec![-PI / 2.0 * w],
        }
    }

    fn validate(&self) -> Result<()> {
        let n = self.alpha_minus.len();
        let m = self.beta_minus.len();
        if self.alpha_plus.len() != n || self.beta_plus.len() != m {
            return Err(Error::invalid("numerator and denominator counts differ"));
        }
        if n > MAX_ORDER || m > MAX_ORDER {
            return Err(Error::invalid(format!("at most {MAX_ORDER} variables per family")));
        }
        if n + m == 0 {
            return Err(Error::invalid("no arguments"));
        }
        for z in self.alpha_plus.iter().chain(&self.beta_plus) {
            if z.im == 0.0 {
                return Err(Error::invalid(format!("denominator argument {z} is real")));
            }
        }
        for family in [&self.alpha_minus, &self.alpha_plus, &self.beta_minus, &self.beta_plus] {
            check_distinct(family)?;
        }
        check_disjoint(&self.alpha_minus, &self.alpha_plus)?;
        check_disjoint(&self.beta_plus, &self.beta_minus)?;
        check_disjoint(&self.beta_plus, &self.alpha_plus)?;
        Ok(())
    }
}

impl GoeArgs {
    /// The `n = m = 2` arguments whose average is `R_GOE(k, s)`.
    pub fn doorway(k: f64, s: f64, lambda: f64) -> Self {
        let w = root(k, s, lambda);
        GoeArgs {
            alpha: vec![Complex64::new(PI * s / 2.0, 0.0), Complex64::new(-PI * s / 2.0, 0.0)],
            beta: vec![PI / 2.0 * w, -PI / 2.0 * w],
        }
    }

    fn validate(&self) -> Result<()> {
        let n = self.alpha.len();
        let m = self.beta.len();
        if (n + m) % 2 == 1 {
            return Err(Error::invalid(format!("n + m = {} must be even", n + m)));
        }
        if n + m == 0 {
            return Err(Error::invalid("no arguments"));
        }
        if n + m > MAX_ORDER {
            return Err(Error::invalid(format!("n + m must not exceed {MAX_ORDER}")));
        }
        for z in &self.beta {
            if z.im == 0.0 {
                return Err(Error::invalid(format!("denominator argument {z} is real")));
            }
        }
        check_distinct(&self.alpha)?;
        check_distinct(&self.beta)?;
        check_disjoint(&self.alpha, &self.beta)?;
        Ok(())
    }
}

fn check_distinct(v: &[Complex64]) -> Result<()> {
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            if v[i] == v[j] {
                return Err(Error::invalid(format!("coincident arguments {} at positions {i} and {j}", v[i])));
            }
        }
    }
    Ok(())
}

fn check_disjoint(a: &[Complex64], b: &[Complex64]) -> Result<()> {
    for x in a {
        if b.contains(x) {
            return Err(Error::invalid(format!("argument {x} appears in two families")));
        }
    }
    Ok(())
}

/// `Π_{i<j} (vᵢ − vⱼ)`.
fn vandermonde(v: &[Complex64]) -> Complex64 {
    let mut p = Complex64::new(1.0, 0.0);
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            p *= v[i] - v[j];
        }
    }
    p
}

fn cross_product(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().flat_map(|x| b.iter().map(move |y| x - y)).product()
}

/// `e^{iz}/z`.
fn phase_over(z: Complex64) -> Complex64 {
    (I * z).exp() / z
}

/// The `(n+m)×(n+m)` matrix `S⁽²⁾` with rows `α⁻, β⁺` and columns `β⁻, α⁺`.
pub fn gue_kernel_matrix(args: &GueArgs) -> Result<DMatrix<Complex64>> {
    args.validate()?;
    let n = args.alpha_minus.len();
    let m = args.beta_minus.len();
    let size = n + m;
    let mut s = DMatrix::zeros(size, size);
    for (r, &a) in args.alpha_minus.iter().enumerate() {
        for (c, &b) in args.beta_minus.iter().enumerate() {
            s[(r, c)] = sinc_complex(a - b) / PI;
        }
        for (c, &ap) in args.alpha_plus.iter().enumerate() {
            s[(r, m + c)] = if ap.im > 0.0 { -phase_over(ap - a) } else { phase_over(a - ap) };
        }
    }
    for (r, &bp) in args.beta_plus.iter().enumerate() {
        for (c, &b) in args.beta_minus.iter().enumerate() {
            s[(n + r, c)] = if bp.im > 0.0 { phase_over(bp - b) } else { -phase_over(b - bp) };
        }
        for (c, &ap) in args.alpha_plus.iter().enumerate() {
            s[(n + r, m + c)] = if bp.im > 0.0 && ap.im < 0.0 {
                2.0 * PI * I * phase_over(bp - ap)
            } else if bp.im < 0.0 && ap.im > 0.0 {
                2.0 * PI * I * phase_over(ap - bp)
            } else {
                Complex64::new(0.0, 0.0)
            };
        }
    }
    Ok(s)
}

/// Large-N GUE average of the characteristic-polynomial ratio.
pub fn charpoly_ratio_gue(args: &GueArgs) -> Result<Complex64> {
    let s = gue_kernel_matrix(args)?;
    let n = args.alpha_minus.len();
    let m = args.beta_minus.len();
    // (−1)^{γ/2} with γ = (n+m)² + n − m, times (−1)^{n+m}: the product
    // over pairs runs as Π(α⁺ − α⁻)Π(β⁺ − β⁻). Finite-N sampling fixes this
    // sign for n + m odd, where the two orderings differ.
    let gamma = (n + m) * (n + m) + n - m;
    let sign = if (gamma / 2 + n + m) % 2 == 0 { 1.0 } else { -1.0 };
    let num = cross_product(&args.alpha_minus, &args.alpha_plus) * cross_product(&args.beta_minus, &args.beta_plus);
    let den = vandermonde(&args.alpha_minus)
        * vandermonde(&args.alpha_plus)
        * vandermonde(&args.beta_minus)
        * vandermonde(&args.beta_plus);
    Ok(sign * num / den * determinant(&s))
}

/// The skew-symmetric matrix `S⁽¹⁾` over the variables `α₁…αₙ, β₁…βₘ`.
pub fn goe_kernel_matrix(args: &GoeArgs) -> Result<DMatrix<Complex64>> {
    args.validate()?;
    let vars: Vec<(Complex64, bool)> = args
        .alpha
        .iter()
        .map(|&a| (a, false))
        .chain(args.beta.iter().map(|&b| (b, true)))
        .collect();
    let size = vars.len();
    let mut s = DMatrix::zeros(size, size);
    for i in 0..size {
        for j in i + 1..size {
            let (p, p_is_beta) = vars[i];
            let (q, q_is_beta) = vars[j];
            let v = match (p_is_beta, q_is_beta) {
                (false, false) => -sinc_derivative_complex(p - q) / PI,
                (false, true) => alpha_beta(p, q),
                (true, false) => -alpha_beta(q, p),
                (true, true) => {
                    if p.im > 0.0 && q.im < 0.0 {
                        2.0 * PI * I * oscillatory_tail_integral(p - q)
                    } else if p.im < 0.0 && q.im > 0.0 {
                        -2.0 * PI * I * oscillatory_tail_integral(q - p)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                }
            };
            s[(i, j)] = v;
            s[(j, i)] = -v;
        }
    }
    Ok(s)
}

fn alpha_beta(a: Complex64, b: Complex64) -> Complex64 {
    if b.im > 0.0 {
        -phase_over(b - a)
    } else {
        phase_over(a - b)
    }
}

/// Large-N GOE average of the characteristic-polynomial ratio.
///
/// For `n ≠ m` the unnormalised average has no finite limit and the value
/// is only the Pfaffian expression; the doorway kernel uses `n = m`.
pub fn charpoly_ratio_goe(args: &GoeArgs) -> Result<Complex64> {
    let s = goe_kernel_matrix(args)?;
    let num = cross_product(&args.alpha, &args.beta);
    let den = vandermonde(&args.alpha) * vandermonde(&args.beta);
    Ok(num / den * pfaffian(&s)?)
}

fn check_kernel_args(s: f64, lambda: f64) -> Result<()> {
    if s == 0.0 || !s.is_finite() {
        return Err(Error::invalid(format!("s must be finite and non-zero, got {s}")));
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::invalid(format!("lambda must be finite and non-negative, got {lambda}")));
    }
    Ok(())
}

/// `R_GUE(k, s) = e^{−iπσ√(s²−4iksλ²)} (cos πs + iσ sin πs (s − 2ikλ²)/√(s²−4iksλ²))`,
/// `σ = sgn(ks)`.
pub fn r_gue(k: f64, s: f64, lambda: f64) -> Result<Complex64> {
    check_kernel_args(s, lambda)?;
    if !k.is_finite() {
        return Err(Error::invalid("k must be finite"));
    }
    if k == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let sigma = (k * s).signum();
    let w = root(k, s, lambda);
    let (sn, cs) = (PI * s).sin_cos();
    let ratio = Complex64::new(s, -2.0 * k * lambda * lambda) / w;
    Ok((-I * PI * sigma * w).exp() * (cs + I * sigma * sn * ratio))
}

/// The Cooperon term of the GOE kernel,
/// `−4iσk²sλ⁴/√(s²−4iksλ²) · d/ds(sin πs/s) · E₁(iπσ√(s²−4iksλ²))`.
pub fn r_add(k: f64, s: f64, lambda: f64) -> Result<Complex64> {
    check_kernel_args(s, lambda)?;
    if k == 0.0 || lambda == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let sigma = (k * s).signum();
    let w = root(k, s, lambda);
    // d/ds sin(πs)/s = π² sinc′(πs)
    let dsinc = PI * PI * sinc_derivative(PI * s);
    let l2 = lambda * lambda;
    let pre = -4.0 * I * sigma * k * k * s * l2 * l2 / w;
    Ok(pre * dsinc * exp_integral_e1(I * PI * sigma * w))
}

/// `R_GOE(k, s) = R_GUE(k, s) + ½R_add(k, s)`.
///
/// The Pfaffian reduces to this combination; the factor ½ on the Cooperon
/// term is confirmed by finite-N sampling.
pub fn r_goe(k: f64, s: f64, lambda: f64) -> Result<Complex64> {
    Ok(r_gue(k, s, lambda)? + 0.5 * r_add(k, s, lambda)?)
}
