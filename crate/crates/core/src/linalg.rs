//! Small dense linear-algebra helpers: symmetric tridiagonal eigenvalues,
//! Hermitian eigen-decomposition, complex determinants and Pfaffians.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `d` and
/// off-diagonal `e` (`e.len() == d.len() − 1`), sorted ascending.
///
/// Implicit QL with Wilkinson shifts.
pub fn tridiagonal_eigenvalues(mut d: Vec<f64>, off: &[f64]) -> Result<Vec<f64>> {
    let n = d.len();
    if n == 0 || off.len() + 1 != n {
        return Err(Error::invalid(format!(
            "tridiagonal shape mismatch: {} diagonal, {} off-diagonal",
            n,
            off.len()
        )));
    }
    let mut e = off.to_vec();
    e.push(0.0);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::numerical(format!(
                    "tridiagonal QL did not converge for eigenvalue {l} of {n}"
                )));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                // entries are O(√N), far from overflow
                r = (f * f + g * g).sqrt();
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Eigenvalues (ascending) and orthonormal eigenvectors (columns) of a real
/// symmetric matrix, by cyclic Jacobi rotations.
///
/// Slow (O(n³) per sweep) but accurate to a few ulps of the matrix norm in
/// both values and vectors; meant for oracles on small matrices.
pub fn jacobi_eigen(mut a: DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::invalid("eigensolver needs a square matrix"));
    }
    let mut v = DMatrix::<f64>::identity(n, n);
    let norm = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    for _ in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                off += a[(i, j)] * a[(i, j)];
            }
        }
        if off.sqrt() <= f64::EPSILON * norm * 1e-2 || off == 0.0 {
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
            let values = order.iter().map(|&i| a[(i, i)]).collect();
            let vectors = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
            return Ok((values, vectors));
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    Err(Error::numerical(format!("Jacobi eigensolver did not converge (n = {n})")))
}

/// Eigenvalues (ascending) of a Hermitian matrix.
pub fn hermitian_eigenvalues(m: DMatrix<Complex64>) -> Result<Vec<f64>> {
    let n = m.nrows();
    let eig = SymmetricEigen::try_new(m, f64::EPSILON, 1000 * n.max(1))
        .ok_or_else(|| Error::numerical(format!("Hermitian eigensolver did not converge (n = {n})")))?;
    let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Eigenvalues (ascending) of a real symmetric matrix.
pub fn symmetric_eigenvalues(m: DMatrix<f64>) -> Result<Vec<f64>> {
    let n = m.nrows();
    let eig = SymmetricEigen::try_new(m, f64::EPSILON, 1000 * n.max(1))
        .ok_or_else(|| Error::numerical(format!("symmetric eigensolver did not converge (n = {n})")))?;
    let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

pub fn determinant(m: &DMatrix<Complex64>) -> Complex64 {
    m.clone().lu().determinant()
}

/// Pfaffian of a complex skew-symmetric matrix by Parlett–Reid `L T Lᵀ`
/// reduction with row/column pivoting.
pub fn pfaffian(m: &DMatrix<Complex64>) -> Result<Complex64> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::invalid("Pfaffian needs a square matrix"));
    }
    if n % 2 == 1 {
        return Err(Error::invalid(format!("Pfaffian of odd dimension {n}")));
    }
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    for i in 0..n {
        for j in 0..=i {
            if (m[(i, j)] + m[(j, i)]).norm() > 1e-12 * scale.max(f64::MIN_POSITIVE) {
                return Err(Error::invalid(format!("matrix not skew-symmetric at ({i}, {j})")));
            }
        }
    }
    let mut a = m.clone();
    let mut pf = Complex64::new(1.0, 0.0);
    let mut k = 0;
    while k + 1 < n {
        let mut kp = k + 1;
        for i in k + 2..n {
            if a[(i, k)].norm() > a[(kp, k)].norm() {
                kp = i;
            }
        }
        if kp != k + 1 {
            a.swap_rows(k + 1, kp);
            a.swap_columns(k + 1, kp);
            pf = -pf;
        }
        let pivot = a[(k, k + 1)];
        if pivot.norm() == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        pf *= pivot;
        if k + 2 < n {
            let tau: Vec<Complex64> = (k + 2..n).map(|j| a[(k, j)] / pivot).collect();
            let col: Vec<Complex64> = (k + 2..n).map(|i| a[(i, k + 1)]).collect();
            for (ii, i) in (k + 2..n).enumerate() {
                for (jj, j) in (k + 2..n).enumerate() {
                    a[(i, j)] += tau[ii] * col[jj] - col[ii] * tau[jj];
                }
            }
        }
        k += 2;
    }
    Ok(pf)
}
