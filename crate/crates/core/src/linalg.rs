//! Small dense helpers for the 6x6 complex symbol algebra.

use nalgebra::Matrix6;
use num_complex::Complex64;

pub type C64 = Complex64;
pub type M6 = Matrix6<C64>;
pub type M6r = Matrix6<f64>;

/// Entrywise absolute values.
pub fn abs_entries(m: &M6) -> M6r {
    M6r::from_fn(|i, j| m[(i, j)].norm())
}

/// Largest entry magnitude.
pub fn max_abs(m: &M6) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

/// Max deviation from self-adjointness.
pub fn hermitian_defect(m: &M6) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..6 {
        for j in 0..6 {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Frobenius-based condition estimate, adequate for threshold checks.
pub fn cond_frobenius(m: &M6, m_inv: &M6) -> f64 {
    let f = |x: &M6| x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    f(m) * f(m_inv)
}

/// Eigenvalues of a Hermitian matrix by cyclic complex Jacobi rotations,
/// returned in ascending order. Kept free of the closed-form spectral data
/// elsewhere in the crate so the two routes stay independent checks of each
/// other.
pub fn hermitian_eigenvalues_jacobi(a: &M6) -> [f64; 6] {
    let mut m = *a;
    for _ in 0..60 {
        let mut off = 0.0f64;
        for p in 0..6 {
            for q in (p + 1)..6 {
                off = off.max(m[(p, q)].norm());
            }
        }
        // Relative threshold: the spectrum of a uniformly tiny matrix still
        // has to come out with full relative accuracy.
        if off < 1e-15 * max_abs(&m).max(1e-300) {
            break;
        }
        for p in 0..6 {
            for q in (p + 1)..6 {
                let b = m[(p, q)];
                let babs = b.norm();
                if babs < 1e-300 {
                    continue;
                }
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                let tau = (aqq - app) / (2.0 * babs);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let phase = b / babs;
                let sigma = phase * s;

                for i in 0..6 {
                    if i == p || i == q {
                        continue;
                    }
                    let aip = m[(i, p)];
                    let aiq = m[(i, q)];
                    m[(i, p)] = aip * c - aiq * sigma.conj();
                    m[(i, q)] = aip * sigma + aiq * c;
                    m[(p, i)] = m[(i, p)].conj();
                    m[(q, i)] = m[(i, q)].conj();
                }
                let new_pp = c * c * app + s * s * aqq - 2.0 * s * c * babs;
                let new_qq = s * s * app + c * c * aqq + 2.0 * s * c * babs;
                m[(p, p)] = C64::new(new_pp, 0.0);
                m[(q, q)] = C64::new(new_qq, 0.0);
                m[(p, q)] = C64::ZERO;
                m[(q, p)] = C64::ZERO;
            }
        }
    }
    let mut eig = [0.0f64; 6];
    for i in 0..6 {
        eig[i] = m[(i, i)].re;
    }
    eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
    eig
}
