//! The 6x6 Fourier symbol of the linearized micropolar system.
//!
//! At frequency xi the linear system evolves (u_hat, w_hat) by exp(-tA) with
//!
//! ```text
//!     A(xi) = [ |xi|^2 I          B(xi)              ]
//!             [ B(xi)             (|xi|^2 + 2)I + C  ]
//! ```
//!
//! where `B = -i xi x .` (i times the antisymmetric curl symbol) and
//! `C = xi xi^T`. A is Hermitian; its spectrum is
//! `{|xi|^2, 2|xi|^2 + 2, |xi|^2 + 1 -+ sqrt(|xi|^2 + 1) (twice each)}`.
//!
//! Two commuting pieces drive everything downstream: `A1 = blockdiag(|xi|^2 I,
//! |xi|^2 I + C)` generates the heat-like main part `G_m`, and `A2 = A - A1 =
//! [[0, B], [B, 2I]]` carries the coupling. On the subspace orthogonal to xi
//! the shifted piece `X = [[-I, B], [B, I]]` squares to `(1 + |xi|^2) I`,
//! which yields a closed form for any scalar function of A; the hot paths use
//! that instead of matrix algebra.

use nalgebra::{Matrix3, SymmetricEigen, Vector6};

use crate::error::{Error, Result};
use crate::field::Amp6;
use crate::linalg::{cond_frobenius, max_abs, C64, M6};
use crate::matexp::matrix_exp_oracle;

pub type M3 = Matrix3<C64>;
pub type M3r = Matrix3<f64>;
pub type V6 = Vector6<C64>;

/// Relative cutoff below which the explicit diagonalizer degenerates
/// (it divides by xi_1 and xi_3).
const Q_DEGENERACY_CUTOFF: f64 = 1e-6;
/// Conditioning guard for the unnormalized explicit eigenbasis.
const Q_CONDITION_LIMIT: f64 = 1e8;
/// Runtime acceptance threshold for Q Lambda Q^-1 = A.
const Q_RECONSTRUCTION_LIMIT: f64 = 1e-10;

/// Per-frequency symbol data: the matrices, the commuting split, the
/// diagonalizer and the closed-form spectrum.
#[derive(Debug, Clone)]
pub struct SymbolBundle {
    pub xi: [f64; 3],
    pub a: M6,
    pub b_block: M3,
    pub c_block: M3r,
    pub a1: M6,
    pub a2: M6,
    pub q: M6,
    pub q_inv: M6,
    /// Eigenvalue attached to each column of `q`.
    pub column_eigenvalues: [f64; 6],
    /// Canonical closed-form list:
    /// `[|xi|^2, 2|xi|^2+2, lambda_-, lambda_-, lambda_+, lambda_+]`.
    pub eigenvalues: [f64; 6],
    pub xi_tilde_plus: f64,
    pub xi_tilde_minus: f64,
    /// True when a numerically computed orthonormal eigenbasis replaced the
    /// explicit diagonalizer.
    pub used_fallback: bool,
}

impl SymbolBundle {
    pub fn norm2(&self) -> f64 {
        self.xi.iter().map(|x| x * x).sum()
    }

    pub fn lambda_min(&self) -> f64 {
        let r2 = self.norm2();
        r2 + 1.0 - (r2 + 1.0).sqrt()
    }

    /// Full matrix `exp(-tA)` through the diagonalization.
    pub fn exp_matrix(&self, t: f64) -> Result<M6> {
        if t < 0.0 {
            return Err(Error::InvalidTime(t));
        }
        let mut d = M6::zeros();
        for k in 0..6 {
            d[(k, k)] = C64::new((-t * self.column_eigenvalues[k]).exp(), 0.0);
        }
        Ok(self.q * d * self.q_inv)
    }
}

/// Curl symbol block `B(xi) = -i xi x .` as a dense matrix.
pub fn b_matrix(xi: [f64; 3]) -> M3 {
    let i = C64::i();
    let mut b = M3::zeros();
    b[(0, 1)] = i * xi[2];
    b[(0, 2)] = -i * xi[1];
    b[(1, 0)] = -i * xi[2];
    b[(1, 2)] = i * xi[0];
    b[(2, 0)] = i * xi[1];
    b[(2, 1)] = -i * xi[0];
    b
}

pub fn c_matrix(xi: [f64; 3]) -> M3r {
    M3r::from_fn(|i, j| xi[i] * xi[j])
}

/// Assembles A(xi).
pub fn a_matrix(xi: [f64; 3]) -> M6 {
    let r2: f64 = xi.iter().map(|x| x * x).sum();
    let b = b_matrix(xi);
    let c = c_matrix(xi);
    let mut a = M6::zeros();
    for i in 0..3 {
        a[(i, i)] = C64::new(r2, 0.0);
        a[(i + 3, i + 3)] = C64::new(r2 + 2.0, 0.0);
        for j in 0..3 {
            a[(i, j + 3)] = b[(i, j)];
            a[(i + 3, j)] = b[(i, j)];
            a[(i + 3, j + 3)] += C64::new(c[(i, j)], 0.0);
        }
    }
    a
}

/// `A1 = blockdiag(|xi|^2 I, |xi|^2 I + xi xi^T)`.
pub fn a1_matrix(xi: [f64; 3]) -> M6 {
    let r2: f64 = xi.iter().map(|x| x * x).sum();
    let c = c_matrix(xi);
    let mut a1 = M6::zeros();
    for i in 0..3 {
        a1[(i, i)] = C64::new(r2, 0.0);
        a1[(i + 3, i + 3)] = C64::new(r2, 0.0);
        for j in 0..3 {
            a1[(i + 3, j + 3)] += C64::new(c[(i, j)], 0.0);
        }
    }
    a1
}

fn explicit_q(xi: [f64; 3], tp: f64, tm: f64) -> M6 {
    let [x1, x2, x3] = xi;
    let r2 = x1 * x1 + x2 * x2 + x3 * x3;
    let i = C64::i();
    let re = |x: f64| C64::new(x, 0.0);
    let mut q = M6::zeros();
    // Eigenvalue |xi|^2: (xi, 0) / xi_3.
    q[(0, 0)] = re(x1 / x3);
    q[(1, 0)] = re(x2 / x3);
    q[(2, 0)] = re(1.0);
    // Eigenvalue 2|xi|^2 + 2: (0, xi) / xi_3.
    q[(3, 1)] = re(x1 / x3);
    q[(4, 1)] = re(x2 / x3);
    q[(5, 1)] = re(1.0);
    // Two columns for lambda_- (weight xi~+), two for lambda_+ (weight xi~-).
    q[(0, 2)] = -i * x3 * tp / r2;
    q[(1, 2)] = -i * x2 * x3 * tp / (x1 * r2);
    q[(2, 2)] = i * (x1 * x1 + x2 * x2) * tp / (x1 * r2);
    q[(3, 2)] = re(-x2 / x1);
    q[(4, 2)] = re(1.0);

    q[(0, 3)] = i * x2 * tp / r2;
    q[(1, 3)] = -i * (x1 * x1 + x3 * x3) * tp / (x1 * r2);
    q[(2, 3)] = i * x2 * x3 * tp / (x1 * r2);
    q[(3, 3)] = re(-x3 / x1);
    q[(5, 3)] = re(1.0);

    q[(0, 4)] = i * x3 * tm / r2;
    q[(1, 4)] = i * x2 * x3 * tm / (x1 * r2);
    q[(2, 4)] = -i * (x1 * x1 + x2 * x2) * tm / (x1 * r2);
    q[(3, 4)] = re(-x2 / x1);
    q[(4, 4)] = re(1.0);

    q[(0, 5)] = -i * x2 * tm / r2;
    q[(1, 5)] = i * (x1 * x1 + x3 * x3) * tm / (x1 * r2);
    q[(2, 5)] = -i * x2 * x3 * tm / (x1 * r2);
    q[(3, 5)] = re(-x3 / x1);
    q[(5, 5)] = re(1.0);
    q
}

/// Builds the full symbol bundle at `xi`, falling back to a numerically
/// computed orthonormal eigenbasis when the explicit diagonalizer is
/// degenerate, ill-conditioned or fails its own reconstruction check.
pub fn build_symbol(xi: [f64; 3]) -> Result<SymbolBundle> {
    let r2: f64 = xi.iter().map(|x| x * x).sum();
    let r = r2.sqrt();
    if r == 0.0 {
        return Err(Error::SingularFrequency);
    }
    let s = (r2 + 1.0).sqrt();
    let tp = s + 1.0;
    let tm = s - 1.0;
    let lam_minus = r2 + 1.0 - s;
    let lam_plus = r2 + 1.0 + s;
    let eigenvalues = [
        r2,
        2.0 * r2 + 2.0,
        lam_minus,
        lam_minus,
        lam_plus,
        lam_plus,
    ];

    let a = a_matrix(xi);
    let a1 = a1_matrix(xi);
    let a2 = a - a1;

    let degenerate = xi[0].abs().min(xi[2].abs()) < Q_DEGENERACY_CUTOFF * r;
    let explicit = if degenerate {
        None
    } else {
        let q = explicit_q(xi, tp, tm);
        q.try_inverse().and_then(|q_inv| {
            if cond_frobenius(&q, &q_inv) > Q_CONDITION_LIMIT {
                return None;
            }
            let mut d = M6::zeros();
            for k in 0..6 {
                d[(k, k)] = C64::new(eigenvalues[k], 0.0);
            }
            let resid = max_abs(&(q * d * q_inv - a)) / max_abs(&a);
            (resid <= Q_RECONSTRUCTION_LIMIT).then_some((q, q_inv, eigenvalues))
        })
    };

    let (q, q_inv, column_eigenvalues, used_fallback) = match explicit {
        Some((q, q_inv, cols)) => (q, q_inv, cols, false),
        None => {
            let eig = SymmetricEigen::new(a);
            let q = eig.eigenvectors;
            let q_inv = q.adjoint();
            let mut cols = [0.0f64; 6];
            for k in 0..6 {
                cols[k] = eig.eigenvalues[k];
            }
            (q, q_inv, cols, true)
        }
    };

    Ok(SymbolBundle {
        xi,
        a,
        b_block: b_matrix(xi),
        c_block: c_matrix(xi),
        a1,
        a2,
        q,
        q_inv,
        column_eigenvalues,
        eigenvalues,
        xi_tilde_plus: tp,
        xi_tilde_minus: tm,
        used_fallback,
    })
}

/// `exp(-tA(xi)) v` through the diagonalizer.
pub fn semigroup_apply(bundle: &SymbolBundle, t: f64, v: &Amp6) -> Result<Amp6> {
    if t < 0.0 {
        return Err(Error::InvalidTime(t));
    }
    let vec = V6::from_row_slice(v);
    let mut y = bundle.q_inv * vec;
    for k in 0..6 {
        y[k] *= C64::new((-t * bundle.column_eigenvalues[k]).exp(), 0.0);
    }
    let out = bundle.q * y;
    let mut result = [C64::ZERO; 6];
    for k in 0..6 {
        result[k] = out[k];
    }
    Ok(result)
}

/// The projector form of the micro-rotation block of `exp(-t A1)`:
/// `R(xi, t) = e^{-t|xi|^2} (I - P) + e^{-2t|xi|^2} P` with `P = xi xi^T / |xi|^2`.
pub fn r_matrix(xi: [f64; 3], t: f64) -> M3r {
    let r2: f64 = xi.iter().map(|x| x * x).sum();
    if r2 == 0.0 {
        return M3r::identity();
    }
    let e1 = (-t * r2).exp();
    let e2 = (-2.0 * t * r2).exp();
    M3r::from_fn(|i, j| {
        let p = xi[i] * xi[j] / r2;
        let d = if i == j { 1.0 } else { 0.0 };
        e1 * (d - p) + e2 * p
    })
}

/// `G_m(xi, t) = exp(-t A1) = blockdiag(e^{-t|xi|^2} I, R(xi, t))`.
pub fn main_part_matrix(xi: [f64; 3], t: f64) -> M6 {
    let r2: f64 = xi.iter().map(|x| x * x).sum();
    let eh = (-t * r2).exp();
    let r = r_matrix(xi, t);
    let mut g = M6::zeros();
    for i in 0..3 {
        g[(i, i)] = C64::new(eh, 0.0);
        for j in 0..3 {
            g[(i + 3, j + 3)] = C64::new(r[(i, j)], 0.0);
        }
    }
    g
}

/// Splits `exp(-tA)` into the main part `G_m` and the remainder `G_r`.
pub fn split_main_remainder(bundle: &SymbolBundle, t: f64) -> Result<(M6, M6)> {
    if t < 0.0 {
        return Err(Error::InvalidTime(t));
    }
    let g_m = main_part_matrix(bundle.xi, t);
    let g_r = bundle.exp_matrix(t)? - g_m;
    Ok((g_m, g_r))
}

/// Closed-form spectral action at a single frequency. All solver and
/// quadrature hot loops go through this; no 6x6 algebra is involved.
#[derive(Debug, Clone, Copy)]
pub struct SemigroupPoint {
    xi: [f64; 3],
    r2: f64,
    theta: f64,
}

impl SemigroupPoint {
    pub fn new(xi: [f64; 3]) -> Self {
        let r2 = xi.iter().map(|x| x * x).sum();
        SemigroupPoint {
            xi,
            r2,
            theta: (r2 + 1.0f64).sqrt(),
        }
    }

    #[inline]
    pub fn norm2(&self) -> f64 {
        self.r2
    }

    #[inline]
    pub fn lambda_min(&self) -> f64 {
        self.r2 + 1.0 - self.theta
    }

    #[inline]
    pub fn lambda_max(&self) -> f64 {
        2.0 * self.r2 + 2.0
    }

    #[inline]
    fn b_apply(&self, z: [C64; 3]) -> [C64; 3] {
        // B z = -i (xi x z)
        let i = C64::i();
        let [x1, x2, x3] = self.xi;
        [
            -i * (x2 * z[2] - x3 * z[1]),
            -i * (x3 * z[0] - x1 * z[2]),
            -i * (x1 * z[1] - x2 * z[0]),
        ]
    }

    /// `f(A(xi)) v` for a scalar function applied spectrally.
    pub fn apply_fn(&self, f: impl Fn(f64) -> f64, v: &Amp6) -> Amp6 {
        if self.r2 == 0.0 {
            // A(0) = blockdiag(0, 2I).
            let (f0, f2) = (f(0.0), f(2.0));
            let mut out = [C64::ZERO; 6];
            for c in 0..3 {
                out[c] = v[c] * f0;
                out[c + 3] = v[c + 3] * f2;
            }
            return out;
        }
        let u = [v[0], v[1], v[2]];
        let w = [v[3], v[4], v[5]];
        let dot = |z: &[C64; 3]| self.xi[0] * z[0] + self.xi[1] * z[1] + self.xi[2] * z[2];
        let cu = dot(&u) / self.r2;
        let cw = dot(&w) / self.r2;
        let mut u_perp = [C64::ZERO; 3];
        let mut w_perp = [C64::ZERO; 3];
        for a in 0..3 {
            u_perp[a] = u[a] - cu * self.xi[a];
            w_perp[a] = w[a] - cw * self.xi[a];
        }
        let f_u_par = f(self.r2);
        let f_w_par = f(2.0 * self.r2 + 2.0);
        let fm = f(self.r2 + 1.0 - self.theta);
        let fp = f(self.r2 + 1.0 + self.theta);
        let half_sum = 0.5 * (fm + fp);
        let coef_x = (fp - fm) / (2.0 * self.theta);
        let bu = self.b_apply(u_perp);
        let bw = self.b_apply(w_perp);
        let mut out = [C64::ZERO; 6];
        for a in 0..3 {
            out[a] = cu * self.xi[a] * f_u_par + u_perp[a] * half_sum
                + (bw[a] - u_perp[a]) * coef_x;
            out[a + 3] = cw * self.xi[a] * f_w_par + w_perp[a] * half_sum
                + (bu[a] + w_perp[a]) * coef_x;
        }
        out
    }

    /// `exp(-tA) v`.
    pub fn apply_exp(&self, t: f64, v: &Amp6) -> Amp6 {
        self.apply_fn(|lam| (-t * lam).exp(), v)
    }

    /// `G_m(t) v`: heat factor on the velocity part, `R(xi, t)` on the
    /// micro-rotation part.
    pub fn apply_main(&self, t: f64, v: &Amp6) -> Amp6 {
        let eh = (-t * self.r2).exp();
        let mut out = [C64::ZERO; 6];
        if self.r2 == 0.0 {
            out[..3].copy_from_slice(&v[..3]);
            out[3..].copy_from_slice(&v[3..]);
            return out;
        }
        let e2 = (-2.0 * t * self.r2).exp();
        let w = [v[3], v[4], v[5]];
        let cw = (self.xi[0] * w[0] + self.xi[1] * w[1] + self.xi[2] * w[2]) / self.r2;
        for a in 0..3 {
            out[a] = v[a] * eh;
            let w_par = cw * self.xi[a];
            out[a + 3] = (w[a] - w_par) * eh + w_par * e2;
        }
        out
    }

    /// `G_r(t) v = (exp(-tA) - G_m(t)) v`.
    pub fn apply_remainder(&self, t: f64, v: &Amp6) -> Amp6 {
        let full = self.apply_exp(t, v);
        let main = self.apply_main(t, v);
        let mut out = [C64::ZERO; 6];
        for c in 0..6 {
            out[c] = full[c] - main[c];
        }
        out
    }

    /// `|G_r(t)| v` for a nonnegative vector `v`, with the absolute value
    /// taken entrywise on the remainder matrix. Uses the block closed form
    ///
    /// ```text
    ///   G_r = [ alpha_u (I-P)                  cx B        ]
    ///         [ cx B        alpha_w (I-P) + beta_w P       ]
    /// ```
    pub fn apply_abs_remainder(&self, t: f64, v: &[f64; 6]) -> [f64; 6] {
        if self.r2 == 0.0 {
            // A = A1 at xi = 0 up to the 2I shift handled below:
            // G_r(0) = exp(-tA(0)) - I on the w block.
            let d = ((-2.0 * t).exp() - 1.0).abs();
            return [0.0, 0.0, 0.0, d * v[3], d * v[4], d * v[5]];
        }
        let eh = (-t * self.r2).exp();
        let e2h = (-2.0 * t * self.r2).exp();
        let em = (-t * (self.r2 + 1.0 - self.theta)).exp();
        let ep = (-t * (self.r2 + 1.0 + self.theta)).exp();
        let half_sum = 0.5 * (em + ep);
        let cx = (ep - em) / (2.0 * self.theta);
        let alpha_u = half_sum - cx - eh;
        let alpha_w = half_sum + cx - eh;
        let beta_w = (-t * (2.0 * self.r2 + 2.0)).exp() - e2h;
        let r2 = self.r2;
        let xi = self.xi;
        let mut out = [0.0f64; 6];
        for i in 0..3 {
            for j in 0..3 {
                let d = if i == j { 1.0 } else { 0.0 };
                let imp = d - xi[i] * xi[j] / r2;
                let p = xi[i] * xi[j] / r2;
                let b_ij = b_entry_abs(xi, i, j);
                out[i] += (alpha_u * imp).abs() * v[j] + (cx * b_ij).abs() * v[j + 3];
                out[i + 3] +=
                    (cx * b_ij).abs() * v[j] + (alpha_w * imp + beta_w * p).abs() * v[j + 3];
            }
        }
        out
    }

    /// Largest entry of `|G_r(xi, t)| e^{t |xi|^2}`, evaluated in scaled form
    /// so strongly damped frequencies do not underflow. Finite whenever
    /// `t (theta - 1) < 709`.
    pub fn scaled_remainder_max_entry(&self, t: f64) -> f64 {
        if self.r2 == 0.0 {
            return ((-2.0 * t).exp() - 1.0).abs();
        }
        let em = (-t * (1.0 - self.theta)).exp();
        let ep = (-t * (1.0 + self.theta)).exp();
        let hs = 0.5 * (em + ep);
        let cx = (ep - em) / (2.0 * self.theta);
        let alpha_u = hs - cx - 1.0;
        let alpha_w = hs + cx - 1.0;
        let beta_w = (-t * (self.r2 + 2.0)).exp() - (-t * self.r2).exp();
        let xi = self.xi;
        let mut worst = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                let d = if i == j { 1.0 } else { 0.0 };
                let imp = d - xi[i] * xi[j] / self.r2;
                let p = xi[i] * xi[j] / self.r2;
                worst = worst
                    .max((alpha_u * imp).abs())
                    .max((cx * b_entry_abs(xi, i, j)).abs())
                    .max((alpha_w * imp + beta_w * p).abs());
            }
        }
        worst
    }

    /// Operator 2-norm of the remainder `G_r(xi, t)`. The remainder is
    /// Hermitian (both factors of `e^{-tA1} (e^{-tA2} - I)` are, and they
    /// commute), so the norm is the largest eigenvalue magnitude; the
    /// invariant 2-planes give it in closed form.
    pub fn remainder_op_norm(&self, t: f64) -> f64 {
        if self.r2 == 0.0 {
            return ((-2.0 * t).exp() - 1.0).abs();
        }
        let eh = (-t * self.r2).exp();
        let em = (-t * (self.r2 + 1.0 - self.theta)).exp();
        let ep = (-t * (self.r2 + 1.0 + self.theta)).exp();
        let hs = 0.5 * (em + ep);
        let cx = (ep - em) / (2.0 * self.theta);
        let alpha_u = hs - cx - eh;
        let alpha_w = hs + cx - eh;
        let beta_w = (-t * (2.0 * self.r2 + 2.0)).exp() - (-2.0 * t * self.r2).exp();
        let mid = 0.5 * (alpha_u + alpha_w);
        let rad = (0.25 * (alpha_u - alpha_w).powi(2) + cx * cx * self.r2).sqrt();
        beta_w.abs().max((mid + rad).abs()).max((mid - rad).abs())
    }

    /// Entry `R(xi, t)[row][col]` of the projector block.
    #[inline]
    pub fn r_entry(&self, t: f64, row: usize, col: usize) -> f64 {
        if self.r2 == 0.0 {
            return if row == col { 1.0 } else { 0.0 };
        }
        let e1 = (-t * self.r2).exp();
        let e2 = (-2.0 * t * self.r2).exp();
        let p = self.xi[row] * self.xi[col] / self.r2;
        let d = if row == col { 1.0 } else { 0.0 };
        e1 * (d - p) + e2 * p
    }
}

fn b_entry_abs(xi: [f64; 3], i: usize, j: usize) -> f64 {
    // |B| entries: B = -i xi x ., so |B[i][j]| = |xi_k| for the off-diagonals.
    match (i, j) {
        (0, 1) | (1, 0) => xi[2].abs(),
        (0, 2) | (2, 0) => xi[1].abs(),
        (1, 2) | (2, 1) => xi[0].abs(),
        _ => 0.0,
    }
}

/// Reference `exp(-tA)` built from the scaling-and-squaring oracle.
pub fn exp_via_oracle(xi: [f64; 3], t: f64, tol: f64) -> Result<M6> {
    matrix_exp_oracle(&(a_matrix(xi) * C64::new(-t, 0.0)), tol)
}
