//! Scaling-and-squaring matrix exponential, used as the independent oracle
//! for the diagonalized semigroup, plus the scalar phi functions of
//! exponential time stepping.

use crate::error::{Error, Result};
use crate::linalg::M6;
use num_complex::Complex64;

/// `exp(M)` by Taylor series on `M / 2^s` followed by `s` squarings. The
/// series is truncated once the rigorous tail bound drops below `tol`
/// (scaled by `2^-s` so the squarings cannot eat the budget).
pub fn matrix_exp_oracle(m: &M6, tol: f64) -> Result<M6> {
    if tol <= 0.0 {
        return Err(Error::invalid_parameter("tol", "must be positive"));
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidMatrix);
    }
    let norm = one_norm(m);
    let s = if norm <= 0.5 {
        0
    } else {
        ((norm / 0.5).log2().ceil() as u32).min(64)
    };
    let scale = 0.5f64.powi(s as i32);
    let x = m * Complex64::new(scale, 0.0);
    let series_tol = (tol * 0.5f64.powi(s as i32 + 2)).max(1e-300);

    let mut sum = M6::identity();
    let mut term = M6::identity();
    let xnorm = one_norm(&x);
    for k in 1..200 {
        term = (term * x) / Complex64::new(k as f64, 0.0);
        sum += term;
        // Tail after term k is bounded by |term_k| * xnorm / (k+1 - xnorm).
        let tail = one_norm(&term) * xnorm / (k as f64 + 1.0 - xnorm);
        if tail <= series_tol {
            break;
        }
    }
    let mut result = sum;
    for _ in 0..s {
        result *= result;
    }
    Ok(result)
}

fn one_norm(m: &M6) -> f64 {
    (0..6)
        .map(|j| (0..6).map(|i| m[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// phi1(z) = (e^z - 1)/z, continuously extended at 0.
pub fn phi1(z: f64) -> f64 {
    if z.abs() < 1e-8 {
        1.0 + z / 2.0 + z * z / 6.0
    } else {
        z.exp_m1() / z
    }
}

/// phi2(z) = (e^z - 1 - z)/z^2, continuously extended at 0. A short series
/// avoids the cancellation near zero.
pub fn phi2(z: f64) -> f64 {
    if z.abs() < 0.35 {
        let mut term = 0.5; // z^0 / 2!
        let mut sum = term;
        for k in 1..24 {
            term *= z / (k as f64 + 2.0);
            sum += term;
            if term.abs() < 1e-18 {
                break;
            }
        }
        sum
    } else {
        (z.exp_m1() - z) / (z * z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;
    use num_complex::Complex64;

    #[test]
    fn exp_of_zero_is_identity() {
        let e = matrix_exp_oracle(&M6::zeros(), 1e-12).unwrap();
        assert_eq!(max_abs(&(e - M6::identity())), 0.0);
    }

    #[test]
    fn exp_of_minus_identity() {
        let m = M6::identity() * Complex64::new(-1.0, 0.0);
        let e = matrix_exp_oracle(&m, 1e-13).unwrap();
        let expect = M6::identity() * Complex64::new((-1.0f64).exp(), 0.0);
        assert!(max_abs(&(e - expect)) < 1e-13);
    }

    #[test]
    fn exp_of_nilpotent_matches_truncated_series() {
        // Strictly upper triangular: the series terminates exactly.
        let mut m = M6::zeros();
        m[(0, 1)] = Complex64::new(2.0, 1.0);
        m[(1, 2)] = Complex64::new(-1.0, 0.5);
        let e = matrix_exp_oracle(&m, 1e-14).unwrap();
        let expect = M6::identity() + m + (m * m) * Complex64::new(0.5, 0.0);
        assert!(max_abs(&(e - expect)) < 1e-14);
    }

    #[test]
    fn rejects_nonfinite_input() {
        let mut m = M6::zeros();
        m[(0, 0)] = Complex64::new(f64::NAN, 0.0);
        assert!(matrix_exp_oracle(&m, 1e-10).is_err());
    }

    #[test]
    fn phi_functions_match_reference_values() {
        assert!((phi1(0.0) - 1.0).abs() < 1e-15);
        assert!((phi2(0.0) - 0.5).abs() < 1e-15);
        // Away from zero the direct formulas are well conditioned.
        for &z in &[-30.0, -2.0, -0.5, 0.5, 1.5] {
            let p1 = (f64::exp(z) - 1.0) / z;
            let p2 = (f64::exp(z) - 1.0 - z) / (z * z);
            assert!((phi1(z) - p1).abs() / p1.abs().max(1.0) < 1e-12, "z = {z}");
            assert!((phi2(z) - p2).abs() / p2.abs().max(1.0) < 1e-12, "z = {z}");
        }
        // Near zero compare against the Taylor expansion, where the direct
        // formula would cancel catastrophically.
        for &z in &[-1e-6, 1e-6, 1e-9] {
            let p1_ref = 1.0 + z / 2.0 + z * z / 6.0;
            let p2_ref = 0.5 + z / 6.0 + z * z / 24.0;
            assert!((phi1(z) - p1_ref).abs() < 1e-15, "z = {z}");
            assert!((phi2(z) - p2_ref).abs() < 1e-15, "z = {z}");
        }
    }
}
