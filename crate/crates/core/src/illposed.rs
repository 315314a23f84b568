//! The norm-inflation laboratory: the explicit initial-data family with cube
//! supports, the second Picard iterate evaluated by tensor quadrature over
//! the cube overlaps, and the inflation experiments contrasting r = 2
//! against r > 2.
//!
//! The data transform is
//!
//! ```text
//!   u0_hat(xi) = (i delta / sqrt(N)) sum_{j=N}^{[3N/2]+1} 2^j (chi_j^+ + chi_j^-)(xi)
//!                 (xi_2, -xi_1, 0) / |xi|,
//!   w0_hat(xi) = same prefactor and cutoffs, direction (xi_2, 0, 0) / |xi|,
//! ```
//!
//! with `chi_j^{+-}` the indicator of the side-2 cube centered at `+-2^j e_2`.
//! For observation frequencies xi near the origin only opposite-sign cube
//! pairs at equal j contribute to the quadratic term, and each contribution
//! is an integral over the intersection of two axis-aligned cubes.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{Amp6, Cube, CubeQuadSet, LatticeGrid, SpectralField, ZERO_AMP};
use crate::norms::{fb_norm, INV_TWO_PI_CUBED};
use crate::partition::DyadicPartition;
use crate::quadrature::{decaying_time_nodes, tensor_nodes, Box3, GaussLegendre};
use crate::rng::{stream, uniform_in_box};
use crate::solver::{MildSolver, SolverConfig};
use crate::symbol::SemigroupPoint;

type C64 = Complex64;

/// Parameters of the data family f^N = (u0^N, w0^N).
#[derive(Debug, Clone, Copy)]
pub struct IllposedDatum {
    pub n_param: u32,
    pub delta: f64,
}

impl IllposedDatum {
    pub fn new(n_param: u32, delta: f64) -> Result<Self> {
        if n_param < 2 {
            return Err(Error::DegenerateRange(n_param));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::invalid_parameter("delta", "must lie in (0, 1)"));
        }
        Ok(IllposedDatum { n_param, delta })
    }

    /// Cube scales j = N ..= floor(3N/2) + 1.
    pub fn j_range(&self) -> std::ops::RangeInclusive<i32> {
        let n = self.n_param as i32;
        n..=(3 * n / 2 + 1)
    }

    pub fn cubes(&self) -> Vec<Cube> {
        let mut cubes = Vec::new();
        for j in self.j_range() {
            let c = (j as f64).exp2();
            for sign in [1.0, -1.0] {
                cubes.push(Cube {
                    center: [0.0, sign * c, 0.0],
                    half_side: 1.0,
                });
            }
        }
        cubes
    }

    /// Largest |xi| on the support.
    pub fn support_radius(&self) -> f64 {
        let top = (*self.j_range().end() as f64).exp2() + 1.0;
        (top * top + 2.0).sqrt()
    }

    /// The observation time t_N = t_factor * 2^{-2N}.
    pub fn t_n(&self, t_factor: f64) -> f64 {
        t_factor * (-2.0 * self.n_param as f64).exp2()
    }

    /// Indicator of the max-norm unit cube at `center`, with value 1/2 on the
    /// boundary (the Fourier-inversion value at a jump).
    fn cutoff(&self, xi: [f64; 3], center: [f64; 3]) -> f64 {
        let mut v = 1.0;
        for a in 0..3 {
            let d = (xi[a] - center[a]).abs();
            if d > 1.0 + 1e-12 {
                return 0.0;
            }
            if (d - 1.0).abs() <= 1e-12 {
                v *= 0.5;
            }
        }
        v
    }

    /// The defining formula, evaluated anywhere.
    pub fn amplitude(&self, xi: [f64; 3]) -> Amp6 {
        let r = (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt();
        if r == 0.0 {
            return ZERO_AMP;
        }
        let mut cut = 0.0;
        for j in self.j_range() {
            let c = (j as f64).exp2();
            let chi = self.cutoff(xi, [0.0, c, 0.0]) + self.cutoff(xi, [0.0, -c, 0.0]);
            if chi > 0.0 {
                cut += c * chi;
            }
        }
        if cut == 0.0 {
            return ZERO_AMP;
        }
        let pref = C64::new(0.0, self.delta / (self.n_param as f64).sqrt() * cut / r);
        let mut v = ZERO_AMP;
        v[0] = pref * xi[1];
        v[1] = -pref * xi[0];
        v[3] = pref * xi[1];
        v
    }
}

/// Materializes the datum as a cube-quadrature field.
pub fn build_initial_data(
    n_param: u32,
    delta: f64,
    gauss_order: usize,
    panels: usize,
) -> Result<(IllposedDatum, SpectralField)> {
    let datum = IllposedDatum::new(n_param, delta)?;
    let set = CubeQuadSet::new(datum.cubes(), gauss_order, panels);
    let mut field = SpectralField::from_fn_cubes(set, |xi| datum.amplitude(xi));
    field.real_symmetric = true;
    field.div_free = true;
    Ok((datum, field))
}

/// Least-squares slope of `ln ||f^N||_{FB^{-1}_{1,r}}` against `ln N`.
pub fn data_norm_scaling(
    n_list: &[u32],
    delta: f64,
    r: f64,
    part: &DyadicPartition,
    gauss_order: usize,
) -> Result<f64> {
    if n_list.len() < 4 {
        return Err(Error::invalid_parameter(
            "n_list",
            "need at least 4 values of N for a slope fit",
        ));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &n in n_list {
        let (_, field) = build_initial_data(n, delta, gauss_order, 1)?;
        let norm = fb_norm(&field, -1.0, 1.0, r, part)?;
        xs.push((n as f64).ln());
        ys.push(norm.ln());
    }
    Ok(least_squares_slope(&xs, &ys))
}

pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let cov: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    cov / var
}

/// The fixed observation box E = [1/10, 1/2]^3 and the enlargement E-bar.
pub struct ObservationRegion;

impl ObservationRegion {
    pub fn e_box() -> Box3 {
        Box3 {
            lo: [0.1, 0.1, 0.1],
            hi: [0.5, 0.5, 0.5],
        }
    }

    /// `1/20 <= xi_1 <= 11/10 and |xi| <= 11/10`.
    pub fn in_ebar(xi: [f64; 3]) -> bool {
        let r = (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt();
        (0.05..=1.1).contains(&xi[0]) && r <= 1.1
    }

    /// Smallest j0 with `sum_{|j| <= j0} psi_j = 1` everywhere on E.
    pub fn j0() -> i32 {
        let bx = Self::e_box();
        let r_lo = (0..3).map(|a| bx.lo[a] * bx.lo[a]).sum::<f64>().sqrt();
        let r_hi = (0..3).map(|a| bx.hi[a] * bx.hi[a]).sum::<f64>().sqrt();
        for j0 in 0..32 {
            let lo_ok = 4.0 / 3.0 * (-(j0 as f64)).exp2() <= r_lo;
            let hi_ok = 0.75 * ((j0 + 1) as f64).exp2() >= r_hi;
            if lo_ok && hi_ok {
                return j0;
            }
        }
        32
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    J1,
    K11,
}

/// The sign-definite convolution kernels of the leading terms.
pub fn kernel_value(kind: KernelKind, xi: [f64; 3], eta: [f64; 3]) -> f64 {
    let zeta = [xi[0] - eta[0], xi[1] - eta[1], xi[2] - eta[2]];
    let nz = (zeta[0] * zeta[0] + zeta[1] * zeta[1] + zeta[2] * zeta[2]).sqrt();
    let ne = (eta[0] * eta[0] + eta[1] * eta[1] + eta[2] * eta[2]).sqrt();
    match kind {
        KernelKind::J1 => zeta[1] * eta[1] / (nz * ne),
        KernelKind::K11 => {
            zeta[1] * eta[1].powi(3) / (nz * ne.powi(3))
                + zeta[1].powi(3) * eta[1] / (nz.powi(3) * ne)
        }
    }
}

/// Samples the kernel over admissible pairs: xi uniform in E, eta uniform in
/// `supp chi_j^- intersect (xi - supp chi_j^+)` plus the mirrored pairing.
/// Returns the sampled (min, max).
pub fn kernel_sign_check(
    kind: KernelKind,
    j: i32,
    samples: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if j < 2 {
        return Err(Error::EmptySupport(j));
    }
    let mut rng = stream(seed, 0x4b_u64 + j as u64);
    let e_box = ObservationRegion::e_box();
    let c = (j as f64).exp2();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..samples {
        let xi = uniform_in_box(&mut rng, &e_box);
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        // eta-cube at -sign, xi - eta in the cube at +sign.
        let eta_cube = Box3::cube([0.0, -sign * c, 0.0], 1.0);
        let shifted = Box3 {
            lo: [xi[0] - 1.0, xi[1] - sign * c - 1.0, xi[2] - 1.0],
            hi: [xi[0] + 1.0, xi[1] - sign * c + 1.0, xi[2] + 1.0],
        };
        let overlap = eta_cube
            .intersect(&shifted)
            .ok_or(Error::EmptySupport(j))?;
        let eta = uniform_in_box(&mut rng, &overlap);
        let v = kernel_value(kind, xi, eta);
        lo = lo.min(v);
        hi = hi.max(v);
    }
    Ok((lo, hi))
}

/// Quadrature orders of the second-iterate evaluation.
#[derive(Debug, Clone, Copy)]
pub struct IterateQuadrature {
    pub eta_order: usize,
    pub tau_order: usize,
}

impl Default for IterateQuadrature {
    fn default() -> Self {
        IterateQuadrature {
            eta_order: 5,
            tau_order: 6,
        }
    }
}

/// Named terms of the first-component decompositions: J1..J7 bound the
/// velocity component, K1..K5 and K11..K13 the micro-rotation component.
#[derive(Debug, Clone, Copy, Default)]
pub struct JkTerms {
    pub j: [f64; 7],
    pub k: [f64; 5],
    pub k1: [f64; 3],
    /// J5 recomputed with the max-entry scalar bound on |G_r|.
    pub j5_entry_max: f64,
    /// J5 recomputed with the operator-norm scalar bound on |G_r|.
    pub j5_op_norm: f64,
}

#[derive(Debug, Clone)]
pub struct IterateSample {
    pub xi: [f64; 3],
    /// Full second Picard iterate transform at xi (all 6 components).
    pub value: Amp6,
    pub terms: JkTerms,
}

struct TauAccumulators {
    /// full x full, [k][l] with k in 0..3, l in 0..6
    full: Vec<[[C64; 6]; 3]>,
    /// heat-data x heat-data velocity pieces, [k][l] with k, l in 0..2
    mm_u: Vec<[[C64; 2]; 2]>,
    /// heat-data x main-data micro-rotation pieces, [k][l], k in 0..2, l in 0..3
    mm_w: Vec<[[C64; 3]; 2]>,
    /// remainder x main and main x remainder and remainder x remainder
    rm: Vec<[[C64; 3]; 3]>,
    mr: Vec<[[C64; 3]; 3]>,
    rr: Vec<[[C64; 3]; 3]>,
    /// |heat-data| x (|G_r| |data|), plus the two scalar-bound variants
    m_absr: Vec<[[f64; 3]; 3]>,
    m_absr_entry: Vec<[[f64; 3]; 3]>,
    m_absr_op: Vec<[[f64; 3]; 3]>,
    /// (|G_r| |data|) x (|G_r| |data|)
    absr_absr: Vec<[[f64; 3]; 3]>,
}

impl TauAccumulators {
    fn new(n_tau: usize) -> Self {
        TauAccumulators {
            full: vec![[[C64::ZERO; 6]; 3]; n_tau],
            mm_u: vec![[[C64::ZERO; 2]; 2]; n_tau],
            mm_w: vec![[[C64::ZERO; 3]; 2]; n_tau],
            rm: vec![[[C64::ZERO; 3]; 3]; n_tau],
            mr: vec![[[C64::ZERO; 3]; 3]; n_tau],
            rr: vec![[[C64::ZERO; 3]; 3]; n_tau],
            m_absr: vec![[[0.0; 3]; 3]; n_tau],
            m_absr_entry: vec![[[0.0; 3]; 3]; n_tau],
            m_absr_op: vec![[[0.0; 3]; 3]; n_tau],
            absr_absr: vec![[[0.0; 3]; 3]; n_tau],
        }
    }
}

/// Evaluates the second Picard iterate transform and its term decomposition
/// at the given frequencies by direct quadrature over the cube overlaps of
/// the data supports.
pub fn second_iterate(
    datum: &IllposedDatum,
    t: f64,
    xi_samples: &[[f64; 3]],
    quad: IterateQuadrature,
) -> Result<Vec<IterateSample>> {
    if t < 0.0 {
        return Err(Error::InvalidTime(t));
    }
    if t == 0.0 {
        // Empty time integral.
        return Ok(xi_samples
            .iter()
            .map(|&xi| IterateSample {
                xi,
                value: ZERO_AMP,
                terms: JkTerms::default(),
            })
            .collect());
    }
    let eta_rule = GaussLegendre::new(quad.eta_order);
    // One tau rule shared by all cube scales, refined for the fastest decay.
    let top = *datum.j_range().end();
    let mu = 2.0 * ((top as f64).exp2() + 2.0).powi(2);
    let tau_nodes = decaying_time_nodes(t, mu, quad.tau_order);
    let n_tau = tau_nodes.len();

    let mut out = Vec::with_capacity(xi_samples.len());
    for &xi in xi_samples {
        let mut acc = TauAccumulators::new(n_tau);
        for j in datum.j_range() {
            let c = (j as f64).exp2();
            for sign in [1.0, -1.0] {
                // eta in the cube at -sign, xi - eta in the cube at +sign.
                let eta_cube = Box3::cube([0.0, -sign * c, 0.0], 1.0);
                let shifted = Box3 {
                    lo: [xi[0] - 1.0, xi[1] - sign * c - 1.0, xi[2] - 1.0],
                    hi: [xi[0] + 1.0, xi[1] - sign * c + 1.0, xi[2] + 1.0],
                };
                let Some(overlap) = eta_cube.intersect(&shifted) else {
                    continue;
                };
                accumulate_box(datum, &overlap, xi, &eta_rule, &tau_nodes, &mut acc);
            }
        }
        out.push(assemble_sample(datum, t, xi, &tau_nodes, &acc));
    }
    Ok(out)
}

fn accumulate_box(
    datum: &IllposedDatum,
    overlap: &Box3,
    xi: [f64; 3],
    eta_rule: &GaussLegendre,
    tau_nodes: &[(f64, f64)],
    acc: &mut TauAccumulators,
) {
    for (eta, w_eta) in tensor_nodes(overlap, eta_rule, 1) {
        let zeta = [xi[0] - eta[0], xi[1] - eta[1], xi[2] - eta[2]];
        let f_eta = datum.amplitude(eta);
        let f_zeta = datum.amplitude(zeta);
        let abs_eta: [f64; 6] = std::array::from_fn(|c| f_eta[c].norm());
        let abs_zeta: [f64; 6] = std::array::from_fn(|c| f_zeta[c].norm());
        let p_eta = SemigroupPoint::new(eta);
        let p_zeta = SemigroupPoint::new(zeta);
        let norm_eta: f64 = abs_eta.iter().map(|x| x * x).sum::<f64>().sqrt();
        let norm_zeta: f64 = abs_zeta.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm_eta == 0.0 || norm_zeta == 0.0 {
            continue;
        }
        for (ti, &(tau, _)) in tau_nodes.iter().enumerate() {
            let a_full = p_eta.apply_exp(tau, &f_eta);
            let b_full = p_zeta.apply_exp(tau, &f_zeta);
            let a_main = p_eta.apply_main(tau, &f_eta);
            let b_main = p_zeta.apply_main(tau, &f_zeta);
            let a_rem: Amp6 = std::array::from_fn(|cc| a_full[cc] - a_main[cc]);
            let b_rem: Amp6 = std::array::from_fn(|cc| b_full[cc] - b_main[cc]);
            let b_absr = p_zeta.apply_abs_remainder(tau, &abs_zeta);
            let a_absr = p_eta.apply_abs_remainder(tau, &abs_eta);
            let heat_eta = (-tau * p_eta.norm2()).exp();
            let heat_zeta = (-tau * p_zeta.norm2()).exp();
            let entry_zeta = p_zeta.scaled_remainder_max_entry(tau) * heat_zeta;
            let op_zeta = p_zeta.remainder_op_norm(tau);

            let slot = &mut acc.full[ti];
            for k in 0..3 {
                let ak = a_full[k] * w_eta;
                for l in 0..6 {
                    slot[k][l] += ak * b_full[l];
                }
            }
            for k in 0..2 {
                let ak = a_main[k] * w_eta;
                for l in 0..2 {
                    acc.mm_u[ti][k][l] += ak * b_main[l];
                }
                for l in 0..3 {
                    acc.mm_w[ti][k][l] += ak * b_main[l + 3];
                }
            }
            for k in 0..3 {
                let arm = a_rem[k] * w_eta;
                let amn = a_main[k] * w_eta;
                let a_abs = abs_eta[k] * heat_eta * w_eta;
                let a_absr_k = a_absr[k] * w_eta;
                for l in 0..3 {
                    acc.rm[ti][k][l] += arm * b_main[l + 3];
                    acc.mr[ti][k][l] += amn * b_rem[l + 3];
                    acc.rr[ti][k][l] += arm * b_rem[l + 3];
                    acc.m_absr[ti][k][l] += a_abs * b_absr[l];
                    acc.m_absr_entry[ti][k][l] += a_abs * entry_zeta * abs_zeta[l];
                    acc.m_absr_op[ti][k][l] += a_abs * op_zeta * abs_zeta[l];
                    acc.absr_absr[ti][k][l] += a_absr_k * b_absr[l];
                }
            }
        }
    }
}

fn assemble_sample(
    datum: &IllposedDatum,
    t: f64,
    xi: [f64; 3],
    tau_nodes: &[(f64, f64)],
    acc: &TauAccumulators,
) -> IterateSample {
    let _ = datum;
    let p_xi = SemigroupPoint::new(xi);
    let r2 = p_xi.norm2();
    let i = C64::i();
    let common = INV_TWO_PI_CUBED;
    let leray = |v: &mut [C64; 6]| {
        if r2 > 0.0 {
            let div = (xi[0] * v[0] + xi[1] * v[1] + xi[2] * v[2]) / r2;
            for c in 0..3 {
                v[c] -= div * xi[c];
            }
        }
    };

    let mut value = ZERO_AMP;
    let mut sig_j = [C64::ZERO; 4]; // J1..J4 signed integrals
    let mut sig_j5 = [[0.0f64; 3]; 3]; // per (k, l), integrand is sign-definite
    let mut sig_j5_entry = [[0.0f64; 3]; 3];
    let mut sig_j5_op = [[0.0f64; 3]; 3];
    let mut sig_j6 = [[0.0f64; 3]; 3];
    let mut j7 = 0.0f64;
    let mut sig_k = [C64::ZERO; 4]; // K1..K4 signed
    let mut k5 = 0.0f64;
    let mut sig_k1 = [C64::ZERO; 3]; // K11..K13 signed

    let proj = |l: usize| {
        let d = if l == 0 { 1.0 } else { 0.0 };
        if r2 > 0.0 {
            d - xi[0] * xi[l] / r2
        } else {
            d
        }
    };

    for (ti, &(tau, w_tau)) in tau_nodes.iter().enumerate() {
        let s = t - tau;
        let heat_out = (-s * r2).exp();

        // Full value: -e^{-(t-tau) A(xi)} Ptilde (i xi . conv).
        let mut inner = ZERO_AMP;
        for l in 0..6 {
            let mut sum = C64::ZERO;
            for k in 0..3 {
                sum += xi[k] * acc.full[ti][k][l];
            }
            inner[l] = i * common * sum;
        }
        leray(&mut inner);
        let propagated = p_xi.apply_exp(s, &inner);
        for c in 0..6 {
            value[c] -= w_tau * propagated[c];
        }

        // J1..J4: heat-propagated velocity products with the projector
        // weights of the first component.
        let p11 = proj(0); // 1 - xi_1^2/|xi|^2
        let p12 = if r2 > 0.0 { xi[0] * xi[1] / r2 } else { 0.0 };
        sig_j[0] += w_tau * heat_out * p11 * xi[0] * common * acc.mm_u[ti][0][0];
        sig_j[1] += w_tau * heat_out * p11 * xi[1] * common * acc.mm_u[ti][1][0];
        sig_j[2] += w_tau * heat_out * p12 * xi[0] * common * acc.mm_u[ti][0][1];
        sig_j[3] += w_tau * heat_out * p12 * xi[1] * common * acc.mm_u[ti][1][1];

        // J5/J6 families: all factors in absolute value.
        for k in 0..3 {
            for l in 0..3 {
                let wgt = w_tau * heat_out * proj(l).abs() * xi[k].abs() * common;
                sig_j5[k][l] += wgt * acc.m_absr[ti][k][l];
                sig_j5_entry[k][l] += wgt * acc.m_absr_entry[ti][k][l];
                sig_j5_op[k][l] += wgt * acc.m_absr_op[ti][k][l];
                sig_j6[k][l] += wgt * acc.absr_absr[ti][k][l];
            }
        }

        // J7 / K5: outer remainder applied to the absolute full flux.
        let mut abs_inner = [0.0f64; 6];
        for c in 0..6 {
            abs_inner[c] = inner[c].norm();
        }
        let outer_abs = p_xi.apply_abs_remainder(s, &abs_inner);
        j7 += w_tau * outer_abs[0];
        k5 += w_tau * outer_abs[3];

        // K1..K4: R-row-weighted micro-rotation convolutions.
        for l in 0..3 {
            let r1l = p_xi.r_entry(s, 0, l);
            let mut main_sum = C64::ZERO;
            let mut rm_sum = C64::ZERO;
            let mut mr_sum = C64::ZERO;
            let mut rr_sum = C64::ZERO;
            for k in 0..3 {
                if k < 2 {
                    main_sum += xi[k] * acc.mm_w[ti][k][l];
                }
                rm_sum += xi[k] * acc.rm[ti][k][l];
                mr_sum += xi[k] * acc.mr[ti][k][l];
                rr_sum += xi[k] * acc.rr[ti][k][l];
            }
            sig_k[0] += w_tau * r1l * common * main_sum * i;
            sig_k[1] += w_tau * r1l * common * rm_sum * i;
            sig_k[2] += w_tau * r1l * common * mr_sum * i;
            sig_k[3] += w_tau * r1l * common * rr_sum * i;
        }
        let r11 = p_xi.r_entry(s, 0, 0);
        sig_k1[0] += w_tau * r11 * xi[0] * common * acc.mm_w[ti][0][0] * i;
        sig_k1[1] += w_tau * r11 * xi[1] * common * acc.mm_w[ti][1][0] * i;
        for l in 1..3 {
            let r1l = p_xi.r_entry(s, 0, l);
            for k in 0..2 {
                sig_k1[2] += w_tau * r1l * xi[k] * common * acc.mm_w[ti][k][l] * i;
            }
        }
    }

    let mut terms = JkTerms {
        j: [
            sig_j[0].norm(),
            sig_j[1].norm(),
            sig_j[2].norm(),
            sig_j[3].norm(),
            2.0 * sig_j5.iter().flatten().sum::<f64>(),
            sig_j6.iter().flatten().sum::<f64>(),
            j7,
        ],
        k: [
            sig_k[0].norm(),
            sig_k[1].norm(),
            sig_k[2].norm(),
            sig_k[3].norm(),
            k5,
        ],
        k1: [sig_k1[0].norm(), sig_k1[1].norm(), sig_k1[2].norm()],
        j5_entry_max: 2.0 * sig_j5_entry.iter().flatten().sum::<f64>(),
        j5_op_norm: 2.0 * sig_j5_op.iter().flatten().sum::<f64>(),
    };
    // The i factors hidden in the data make J1..J4 real up to roundoff; the
    // norms above already absorbed them.
    terms.j[0] *= 1.0;
    IterateSample { xi, value, terms }
}

/// Tensor Gauss sampling of the observation box E, returning (points,
/// weights).
pub fn e_box_samples(order: usize) -> (Vec<[f64; 3]>, Vec<f64>) {
    let rule = GaussLegendre::new(order);
    let nodes = tensor_nodes(&ObservationRegion::e_box(), &rule, 1);
    let points = nodes.iter().map(|n| n.0).collect();
    let weights = nodes.iter().map(|n| n.1).collect();
    (points, weights)
}

/// L^1(E) aggregates of the second iterate: named-term integrals, the
/// surrogate norms, and the measured negative part of the canonical values.
#[derive(Debug, Clone)]
pub struct EAggregates {
    pub t: f64,
    pub j_l1: [f64; 7],
    pub k_l1: [f64; 5],
    pub k1_l1: [f64; 3],
    pub j5_entry_max_l1: f64,
    pub j5_op_norm_l1: f64,
    /// integral over E of |F[u_2]_1| and |F[w_2]_1|
    pub u2_l1: f64,
    pub omega2_l1: f64,
    /// most negative canonical value (-Im of the component) over the samples
    pub u2_min_canonical: f64,
    pub omega2_min_canonical: f64,
    /// integral of the negative part of the canonical values
    pub u2_negative_part: f64,
    pub omega2_negative_part: f64,
}

/// One evaluation sweep over the E-box quadrature points.
#[derive(Debug, Clone)]
pub struct ESweep {
    pub samples: Vec<IterateSample>,
    pub weights: Vec<f64>,
    pub agg: EAggregates,
}

pub fn e_sweep(
    datum: &IllposedDatum,
    t: f64,
    e_order: usize,
    quad: IterateQuadrature,
) -> Result<ESweep> {
    let (points, weights) = e_box_samples(e_order);
    let samples = second_iterate(datum, t, &points, quad)?;
    let agg = aggregate_samples(t, &samples, &weights);
    Ok(ESweep {
        samples,
        weights,
        agg,
    })
}

pub fn second_iterate_on_e(
    datum: &IllposedDatum,
    t: f64,
    e_order: usize,
    quad: IterateQuadrature,
) -> Result<EAggregates> {
    Ok(e_sweep(datum, t, e_order, quad)?.agg)
}

fn aggregate_samples(t: f64, samples: &[IterateSample], weights: &[f64]) -> EAggregates {
    let mut agg = EAggregates {
        t,
        j_l1: [0.0; 7],
        k_l1: [0.0; 5],
        k1_l1: [0.0; 3],
        j5_entry_max_l1: 0.0,
        j5_op_norm_l1: 0.0,
        u2_l1: 0.0,
        omega2_l1: 0.0,
        u2_min_canonical: f64::INFINITY,
        omega2_min_canonical: f64::INFINITY,
        u2_negative_part: 0.0,
        omega2_negative_part: 0.0,
    };
    for (s, &w) in samples.iter().zip(weights) {
        for c in 0..7 {
            agg.j_l1[c] += w * s.terms.j[c];
        }
        for c in 0..5 {
            agg.k_l1[c] += w * s.terms.k[c];
        }
        for c in 0..3 {
            agg.k1_l1[c] += w * s.terms.k1[c];
        }
        agg.j5_entry_max_l1 += w * s.terms.j5_entry_max;
        agg.j5_op_norm_l1 += w * s.terms.j5_op_norm;
        agg.u2_l1 += w * s.value[0].norm();
        agg.omega2_l1 += w * s.value[3].norm();
        let cu = -s.value[0].im;
        let cw = -s.value[3].im;
        agg.u2_min_canonical = agg.u2_min_canonical.min(cu);
        agg.omega2_min_canonical = agg.omega2_min_canonical.min(cw);
        agg.u2_negative_part += w * (-cu).max(0.0);
        agg.omega2_negative_part += w * (-cw).max(0.0);
    }
    agg
}

/// Surrogate norms of the second iterate from a sweep: the partial
/// FB^{-1}_{1,inf} norm over blocks meeting E (the partition sums to one
/// there), and the (2 pi)^-3-weighted L^1(E) mass for the Besov route.
pub fn sweep_surrogates(
    sweep: &ESweep,
    space: InflationSpace,
    part: &DyadicPartition,
) -> (f64, f64) {
    match space {
        InflationSpace::FourierBesov => {
            let mut best_u = 0.0f64;
            let mut best_w = 0.0f64;
            for j in part.scales_meeting(0.1, 0.9) {
                let mut bu = 0.0;
                let mut bw = 0.0;
                for (s, &w) in sweep.samples.iter().zip(&sweep.weights) {
                    let m = DyadicPartition::psi_radial(
                        crate::partition::norm3(s.xi) * (-(j as f64)).exp2(),
                    );
                    bu += w * m * s.value[0].norm();
                    bw += w * m * s.value[3].norm();
                }
                let wgt = (-(j as f64)).exp2();
                best_u = best_u.max(wgt * bu);
                best_w = best_w.max(wgt * bw);
            }
            (best_u, best_w)
        }
        InflationSpace::BesovInfinity => (
            INV_TWO_PI_CUBED * sweep.agg.u2_l1,
            INV_TWO_PI_CUBED * sweep.agg.omega2_l1,
        ),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InflationSpace {
    FourierBesov,
    BesovInfinity,
}

/// One inflation run at fixed (N, delta, r).
#[derive(Debug, Clone)]
pub struct InflationReport {
    pub n_param: u32,
    pub delta: f64,
    pub r: f64,
    pub space: InflationSpace,
    pub t_n: f64,
    pub data_norm: f64,
    pub a1_norm: f64,
    pub u2_surrogate: f64,
    pub omega2_surrogate: f64,
    pub inflation_ratio_u: f64,
    pub inflation_ratio_omega: f64,
    pub u2_negative_part_fraction: f64,
    pub omega2_negative_part_fraction: f64,
    /// Sampled maximum of the leading kernels on E-bar (negative means the
    /// sign hypothesis of the nonnegativity argument holds).
    pub leading_kernel_max: f64,
    pub perturbative: bool,
}

/// Experiment parameters beyond (N, delta, r, space).
#[derive(Debug, Clone, Copy)]
pub struct InflationConfig {
    pub t_factor: f64,
    pub e_order: usize,
    pub quad: IterateQuadrature,
    pub gauss_order: usize,
    pub seed: u64,
}

impl Default for InflationConfig {
    fn default() -> Self {
        InflationConfig {
            t_factor: 1.0,
            e_order: 5,
            quad: IterateQuadrature::default(),
            gauss_order: 6,
            seed: 7,
        }
    }
}

pub fn inflation_experiment(
    n_param: u32,
    delta: f64,
    r: f64,
    space: InflationSpace,
    part: &DyadicPartition,
    cfg: &InflationConfig,
) -> Result<InflationReport> {
    let (datum, field) = build_initial_data(n_param, delta, cfg.gauss_order, 1)?;
    let t_n = datum.t_n(cfg.t_factor);
    if t_n <= f64::EPSILON {
        return Err(Error::InvalidTime(t_n));
    }
    let perturbative = delta <= 0.1;

    let fb_data = fb_norm(&field, -1.0, 1.0, r, part)?;
    let data_norm = match space {
        InflationSpace::FourierBesov => fb_data,
        // The embedding route the argument actually uses for the data.
        InflationSpace::BesovInfinity => INV_TWO_PI_CUBED * fb_data,
    };

    // Linear evolution at t_N, on the same cube nodes.
    let mut a1_field = field.clone();
    for (idx, xi) in field.frequencies().enumerate() {
        let p = SemigroupPoint::new(xi);
        a1_field.values[idx] = p.apply_exp(t_n, &field.values[idx]);
    }
    let fb_a1 = fb_norm(&a1_field, -1.0, 1.0, r, part)?;
    let a1_norm = match space {
        InflationSpace::FourierBesov => fb_a1,
        InflationSpace::BesovInfinity => INV_TWO_PI_CUBED * fb_a1,
    };

    // Nonnegativity hypothesis of the leading integrands on E-bar: both
    // kernels must stay strictly negative over admissible pairs.
    let mut rng = stream(cfg.seed, 0xeb);
    let mut kernel_max = f64::NEG_INFINITY;
    let ebar_box = Box3 {
        lo: [0.05, -1.1, -1.1],
        hi: [1.1, 1.1, 1.1],
    };
    for j in datum.j_range() {
        let c = (j as f64).exp2();
        for _ in 0..2000 {
            let xi = {
                let mut p = uniform_in_box(&mut rng, &ebar_box);
                while !ObservationRegion::in_ebar(p) {
                    p = uniform_in_box(&mut rng, &ebar_box);
                }
                p
            };
            let eta_cube = Box3::cube([0.0, -c, 0.0], 1.0);
            let shifted = Box3 {
                lo: [xi[0] - 1.0, xi[1] - c - 1.0, xi[2] - 1.0],
                hi: [xi[0] + 1.0, xi[1] - c + 1.0, xi[2] + 1.0],
            };
            if let Some(overlap) = eta_cube.intersect(&shifted) {
                let eta = uniform_in_box(&mut rng, &overlap);
                kernel_max = kernel_max
                    .max(kernel_value(KernelKind::J1, xi, eta))
                    .max(kernel_value(KernelKind::K11, xi, eta));
            }
        }
    }

    let sweep = e_sweep(&datum, t_n, cfg.e_order, cfg.quad)?;
    let agg = &sweep.agg;
    let (u2_surrogate, omega2_surrogate) = sweep_surrogates(&sweep, space, part);

    Ok(InflationReport {
        n_param,
        delta,
        r,
        space,
        t_n,
        data_norm,
        a1_norm,
        u2_surrogate,
        omega2_surrogate,
        inflation_ratio_u: u2_surrogate / data_norm,
        inflation_ratio_omega: omega2_surrogate / data_norm,
        u2_negative_part_fraction: agg.u2_negative_part / agg.u2_l1.max(1e-300),
        omega2_negative_part_fraction: agg.omega2_negative_part / agg.omega2_l1.max(1e-300),
        leading_kernel_max: kernel_max,
        perturbative,
    })
}

/// Cross-checks the cube-quadrature second iterate against the lattice
/// Picard path on a grid of `lattice_n` points per axis. Returns the largest
/// relative deviation over lattice points in E-bar.
pub fn grid_cross_check(n_param: u32, delta: f64, lattice_n: usize) -> Result<f64> {
    let datum = IllposedDatum::new(n_param, delta)?;
    // Lattice spacing 2/(2p+1) puts every cube boundary exactly midway
    // between lattice points, so sampled indicators integrate exactly.
    let h = match lattice_n {
        64 => 2.0 / 3.0,
        128 => 2.0 / 5.0,
        _ => {
            let need = datum.support_radius();
            let mut h = 0.0;
            for p in 1..200 {
                let cand = 2.0 / (2.0 * p as f64 + 1.0);
                if cand * (lattice_n / 2) as f64 >= need + cand {
                    h = cand;
                }
            }
            if h == 0.0 {
                return Err(Error::Resolution {
                    n: n_param,
                    needed: datum.support_radius(),
                    available: 0.0,
                });
            }
            h
        }
    };
    let grid = LatticeGrid::new(lattice_n, h);
    if grid.half_extent() < datum.support_radius() + h {
        return Err(Error::Resolution {
            n: n_param,
            needed: datum.support_radius() + h,
            available: grid.half_extent(),
        });
    }
    let t_n = datum.t_n(1.0);

    // Lattice path: sample the data, march the Picard pair.
    let mut cfg = SolverConfig::new(grid, t_n, t_n);
    cfg.dealias_fraction = 1.0;
    let mut solver = MildSolver::new(cfg)?;
    let mut f = SpectralField::from_fn_lattice(grid, |xi| datum.amplitude(xi));
    for idx in 0..grid.len() {
        if grid.is_nyquist(idx) {
            f.values[idx] = ZERO_AMP;
        }
    }
    f.real_symmetric = true;
    f.div_free = true;
    let a2_lattice = solver.picard_terms(&f, t_n, 2)?.pop().unwrap();

    // Comparison points: lattice frequencies inside E-bar.
    let mut points = Vec::new();
    let mut indices = Vec::new();
    for idx in 0..grid.len() {
        let xi = grid.xi(idx);
        if ObservationRegion::in_ebar(xi) {
            points.push(xi);
            indices.push(idx);
        }
    }
    if points.is_empty() {
        return Err(Error::Resolution {
            n: n_param,
            needed: 0.05,
            available: h,
        });
    }

    let quad = IterateQuadrature {
        eta_order: 8,
        tau_order: 8,
    };
    let cube_samples = second_iterate(&datum, t_n, &points, quad)?;

    let scale = cube_samples
        .iter()
        .map(|s| s.value.iter().map(|z| z.norm()).fold(0.0, f64::max))
        .fold(0.0, f64::max);
    let mut worst = 0.0f64;
    for (s, &idx) in cube_samples.iter().zip(&indices) {
        for c in 0..6 {
            let d = (s.value[c] - a2_lattice.values[idx][c]).norm();
            worst = worst.max(d / scale);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::make_partition;

    #[test]
    fn datum_rejects_degenerate_parameters() {
        assert!(matches!(
            IllposedDatum::new(1, 0.05),
            Err(Error::DegenerateRange(1))
        ));
        assert!(IllposedDatum::new(2, 1.5).is_err());
    }

    #[test]
    fn data_value_at_cube_center() {
        let n = 4u32;
        let delta = 0.05;
        let datum = IllposedDatum::new(n, delta).unwrap();
        let xi = [0.0, 16.0, 0.0];
        let v = datum.amplitude(xi);
        let expect = delta * 16.0 / (n as f64).sqrt();
        assert!((v[0] - C64::new(0.0, expect)).norm() < 1e-14);
        assert!(v[1].norm() < 1e-16);
        assert!(v[2].norm() < 1e-16);
        assert!((v[3] - C64::new(0.0, expect)).norm() < 1e-14);
        assert!(v[4].norm() < 1e-16 && v[5].norm() < 1e-16);
    }

    #[test]
    fn data_field_invariants() {
        let (_, field) = build_initial_data(3, 0.05, 4, 1).unwrap();
        assert!(field.divergence_residual() <= 1e-10 * field.max_amp());
        assert!(field.hermitian_residual().unwrap() <= 1e-12 * field.max_amp());
        assert!(field.max_amp() > 0.0);
    }

    #[test]
    fn j_range_follows_the_floor_rule() {
        assert_eq!(IllposedDatum::new(2, 0.05).unwrap().j_range(), 2..=4);
        assert_eq!(IllposedDatum::new(3, 0.05).unwrap().j_range(), 3..=5);
        assert_eq!(IllposedDatum::new(4, 0.05).unwrap().j_range(), 4..=7);
        assert_eq!(IllposedDatum::new(5, 0.05).unwrap().j_range(), 5..=8);
    }

    #[test]
    fn kernel_boundary_value_is_minus_one() {
        // Symmetric point: xi2 - eta2 = |xi - eta|, eta2 = -|eta|.
        let xi = [0.0, 0.3, 0.0];
        let eta = [0.0, -4.0, 0.0];
        let v = kernel_value(KernelKind::J1, xi, eta);
        assert!((v + 1.0).abs() < 1e-14);
        let w = kernel_value(KernelKind::K11, xi, eta);
        assert!((w + 2.0).abs() < 1e-14);
    }

    #[test]
    fn kernel_ranges_on_admissible_pairs() {
        for j in [2, 4] {
            let (lo, hi) = kernel_sign_check(KernelKind::J1, j, 20_000, 11).unwrap();
            assert!(lo >= -1.0 - 1e-9, "J1 min {lo}");
            assert!(hi <= -1.0 / 16.0 + 1e-9, "J1 max {hi}");
            let (lo, hi) = kernel_sign_check(KernelKind::K11, j, 20_000, 11).unwrap();
            assert!(lo >= -2.0 - 1e-9, "K11 min {lo}");
            assert!(hi <= -1.0 / 256.0 + 1e-9, "K11 max {hi}");
        }
    }

    #[test]
    fn observation_region_properties() {
        let bx = ObservationRegion::e_box();
        // E sits inside E-bar and satisfies the transversality bound.
        for corner in 0..8 {
            let xi = [
                if corner & 1 == 0 { bx.lo[0] } else { bx.hi[0] },
                if corner & 2 == 0 { bx.lo[1] } else { bx.hi[1] },
                if corner & 4 == 0 { bx.lo[2] } else { bx.hi[2] },
            ];
            assert!(ObservationRegion::in_ebar(xi));
            let r2: f64 = xi.iter().map(|x| x * x).sum();
            assert!(r2 <= 1.0);
            assert!(1.0 - xi[0] * xi[0] / r2 >= 0.038);
        }
        assert_eq!(ObservationRegion::j0(), 3);
    }

    #[test]
    fn second_iterate_at_time_zero_vanishes() {
        let datum = IllposedDatum::new(2, 0.05).unwrap();
        let samples = second_iterate(
            &datum,
            0.0,
            &[[0.3, 0.3, 0.3]],
            IterateQuadrature::default(),
        )
        .unwrap();
        assert_eq!(samples[0].value, ZERO_AMP);
        assert!(second_iterate(&datum, -1.0, &[[0.3; 3]], IterateQuadrature::default()).is_err());
    }

    #[test]
    fn second_iterate_leading_term_dominates_and_sign_is_canonical() {
        let datum = IllposedDatum::new(3, 0.05).unwrap();
        let t = datum.t_n(1.0);
        let samples = second_iterate(
            &datum,
            t,
            &[[0.3, 0.3, 0.3], [0.2, 0.4, 0.1]],
            IterateQuadrature::default(),
        )
        .unwrap();
        for s in &samples {
            // J1 positive and larger than each correction term.
            assert!(s.terms.j[0] > 0.0);
            for c in 1..7 {
                assert!(s.terms.j[0] > s.terms.j[c], "J1 vs J{}", c + 1);
            }
            assert!(s.terms.k1[0] > s.terms.k1[1]);
            assert!(s.terms.k1[0] > s.terms.k1[2]);
            // The canonical (real) values are positive: -Im F[u2] > 0.
            assert!(-s.value[0].im > 0.0);
            assert!(-s.value[3].im > 0.0);
            // The component is imaginary to leading order; the real part
            // enters through the remainder coupling at relative size
            // O(2^{-N/2}).
            assert!(s.value[0].re.abs() <= 0.6 * s.value[0].im.abs());
        }
    }

    #[test]
    fn second_iterate_scales_quadratically_in_delta() {
        let a = IllposedDatum::new(3, 0.04).unwrap();
        let b = IllposedDatum::new(3, 0.08).unwrap();
        let quad = IterateQuadrature::default();
        let t = a.t_n(1.0);
        let xa = second_iterate(&a, t, &[[0.25, 0.3, 0.35]], quad).unwrap();
        let xb = second_iterate(&b, t, &[[0.25, 0.3, 0.35]], quad).unwrap();
        for c in 0..6 {
            let ratio = xb[0].value[c].norm() / xa[0].value[c].norm().max(1e-300);
            if xa[0].value[c].norm() > 1e-14 {
                assert!((ratio - 4.0).abs() < 1e-9, "component {c}: {ratio}");
            }
        }
    }

    #[test]
    fn data_norm_scaling_matches_the_predicted_exponents() {
        let part = make_partition(-6, 22).unwrap();
        // The r = 2 norm is asymptotically N-free, but the block count
        // floor(N/2) + 2 leaves a finite-N transient of about -0.17 on this
        // window; the exact exponent emerges only for large N.
        let slope2 = data_norm_scaling(&[4, 6, 8, 10], 0.05, 2.0, &part, 5).unwrap();
        assert!(slope2.abs() <= 0.2, "r = 2 slope {slope2}");
        // Wider window (still within f64's additive resolution for the cube
        // geometry, which needs 2^{3N/2+1} + 1 to be representable): the
        // transient shrinks toward the clean exponent.
        let wide_part = make_partition(-6, 46).unwrap();
        let slope2_wide =
            data_norm_scaling(&[12, 16, 20, 24, 28], 0.05, 2.0, &wide_part, 5).unwrap();
        assert!(slope2_wide.abs() <= 0.12, "r = 2 wide slope {slope2_wide}");
        assert!(slope2_wide.abs() < slope2.abs());
        let slope_inf = data_norm_scaling(&[4, 6, 8, 10], 0.05, f64::INFINITY, &part, 5).unwrap();
        assert!((slope_inf + 0.5).abs() <= 0.1, "r = inf slope {slope_inf}");
    }
}
