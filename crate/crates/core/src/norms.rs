//! Fourier-Besov, Besov and Chemin-Lerner norms over a dyadic partition.
//!
//! Frequency-side L^p integrals use the field's own quadrature (Riemann cells
//! on a lattice, tensor Gauss nodes on cube supports). The pointwise magnitude
//! of the 6-component amplitude is its Euclidean norm.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::partition::{exp2i, norm3, DyadicPartition};

pub const INV_TWO_PI_CUBED: f64 =
    1.0 / (8.0 * std::f64::consts::PI * std::f64::consts::PI * std::f64::consts::PI);

fn check_exponent(name: &'static str, value: f64) -> Result<()> {
    if value.is_nan() || value < 1.0 {
        return Err(Error::invalid_parameter(name, "must lie in [1, inf]"));
    }
    Ok(())
}

/// Per-scale `||psi(2^-j .) f_hat||_{L^p}` for every retained scale, in one
/// pass over the samples. Only scales whose annulus meets a sample can be
/// nonzero.
pub fn block_lp_profile(f: &SpectralField, p: f64, part: &DyadicPartition) -> Vec<f64> {
    let n_scales = (part.j_max() - part.j_min() + 1) as usize;
    let mut acc = vec![0.0f64; n_scales];
    for (idx, xi) in f.frequencies().enumerate() {
        let amp = f.amp_norm(idx);
        if amp == 0.0 {
            continue;
        }
        let r = norm3(xi);
        let w = f.weight(idx);
        for j in part.scales_meeting(r, r) {
            let m = DyadicPartition::psi_radial(r * exp2i(-j));
            if m == 0.0 {
                continue;
            }
            let slot = (j - part.j_min()) as usize;
            if p.is_infinite() {
                acc[slot] = acc[slot].max(m * amp);
            } else {
                acc[slot] += w * (m * amp).powf(p);
            }
        }
    }
    if !p.is_infinite() {
        for v in &mut acc {
            *v = v.powf(1.0 / p);
        }
    }
    acc
}

fn ell_r(profile: impl Iterator<Item = f64>, r: f64) -> f64 {
    if r.is_infinite() {
        profile.fold(0.0, f64::max)
    } else {
        profile.map(|v| v.powf(r)).sum::<f64>().powf(1.0 / r)
    }
}

/// Homogeneous Fourier-Besov norm
/// `( sum_j 2^{jsr} ||psi(2^-j .) f_hat||_{L^p}^r )^{1/r}`.
pub fn fb_norm(f: &SpectralField, s: f64, p: f64, r: f64, part: &DyadicPartition) -> Result<f64> {
    check_exponent("p", p)?;
    check_exponent("r", r)?;
    if f.is_empty() {
        return Ok(0.0);
    }
    let profile = block_lp_profile(f, p, part);
    Ok(ell_r(
        profile
            .iter()
            .enumerate()
            .map(|(slot, &v)| exp2i(part.j_min() + slot as i32).powf(s) * v),
        r,
    ))
}

/// Uniform physical-space grid used to evaluate inverse transforms; always
/// contains the origin.
#[derive(Debug, Clone, Copy)]
pub struct PhysicalGrid {
    pub n: usize,
    pub half_extent: f64,
}

impl PhysicalGrid {
    pub fn points(&self) -> impl Iterator<Item = [f64; 3]> + '_ {
        let n = self.n;
        let dx = 2.0 * self.half_extent / n as f64;
        (0..n * n * n).map(move |idx| {
            let m2 = idx % n;
            let rest = idx / n;
            let (m0, m1) = (rest / n, rest % n);
            let coord = |m: usize| (m as i64 - (n / 2) as i64) as f64 * dx;
            [coord(m0), coord(m1), coord(m2)]
        })
    }
}

/// Homogeneous Besov norm with p = infinity:
/// `( sum_j 2^{jsr} ||Delta_j f||_{L^inf}^r )^{1/r}`, the sup taken over the
/// physical grid through the inverse discrete transform of each block.
pub fn besov_norm(
    f: &SpectralField,
    s: f64,
    p: f64,
    r: f64,
    part: &DyadicPartition,
    grid: &PhysicalGrid,
) -> Result<f64> {
    if !p.is_infinite() {
        return Err(Error::invalid_parameter(
            "p",
            "physical-space norms are computed for p = infinity only",
        ));
    }
    check_exponent("r", r)?;
    f.lattice()?;

    // Gather nonzero samples once; block sups reuse them.
    let samples: Vec<(usize, [f64; 3], f64)> = f
        .frequencies()
        .enumerate()
        .filter(|(idx, _)| f.amp_norm(*idx) > 0.0)
        .map(|(idx, xi)| (idx, xi, norm3(xi)))
        .collect();
    if samples.is_empty() {
        return Ok(0.0);
    }
    let r_lo = samples.iter().map(|s| s.2).fold(f64::INFINITY, f64::min);
    let r_hi = samples.iter().map(|s| s.2).fold(0.0, f64::max);

    let mut total: Vec<f64> = Vec::new();
    for j in part.scales_meeting(r_lo, r_hi) {
        let scale = exp2i(-j);
        let block: Vec<(usize, [f64; 3], f64)> = samples
            .iter()
            .filter_map(|&(idx, xi, rr)| {
                let m = DyadicPartition::psi_radial(rr * scale);
                (m != 0.0).then_some((idx, xi, m))
            })
            .collect();
        if block.is_empty() {
            continue;
        }
        let mut sup = 0.0f64;
        for x in grid.points() {
            let mut acc = [Complex64::ZERO; 6];
            for &(idx, xi, m) in &block {
                let phase = Complex64::from_polar(1.0, x[0] * xi[0] + x[1] * xi[1] + x[2] * xi[2]);
                let w = f.weight(idx) * m;
                for c in 0..6 {
                    acc[c] += f.values[idx][c] * phase * w;
                }
            }
            let mag = acc.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() * INV_TWO_PI_CUBED;
            sup = sup.max(mag);
        }
        total.push(exp2i(j).powf(s) * sup);
    }
    Ok(ell_r(total.into_iter(), r))
}

/// Chemin-Lerner norm: the time integral runs inside the block sum,
/// `( sum_j 2^{jsr} || ||psi_j f_hat(t)||_{L^p} ||_{L^lambda(0,T)}^r )^{1/r}`.
/// Time integration is trapezoidal over the sampled instants.
#[allow(clippy::too_many_arguments)]
pub fn chemin_lerner_norm(
    times: &[f64],
    fields: &[SpectralField],
    lambda: f64,
    s: f64,
    p: f64,
    r: f64,
    t_end: f64,
    part: &DyadicPartition,
) -> Result<f64> {
    check_exponent("lambda", lambda)?;
    check_exponent("p", p)?;
    check_exponent("r", r)?;
    assert_eq!(times.len(), fields.len());
    if !lambda.is_infinite() && times.len() < 2 {
        return Err(Error::InsufficientSampling(format!(
            "{} time samples cannot carry an L^{lambda} time integral",
            times.len()
        )));
    }
    let keep: Vec<usize> = (0..times.len()).filter(|&i| times[i] <= t_end).collect();
    if keep.is_empty() {
        return Ok(0.0);
    }
    let kept_times: Vec<f64> = keep.iter().map(|&i| times[i]).collect();
    let weights = trapezoid_weights(&kept_times);

    let n_scales = (part.j_max() - part.j_min() + 1) as usize;
    let mut time_acc = vec![0.0f64; n_scales];
    for (pos, &i) in keep.iter().enumerate() {
        let profile = block_lp_profile(&fields[i], p, part);
        for slot in 0..n_scales {
            if lambda.is_infinite() {
                time_acc[slot] = time_acc[slot].max(profile[slot]);
            } else {
                time_acc[slot] += weights[pos] * profile[slot].powf(lambda);
            }
        }
    }
    if !lambda.is_infinite() {
        for v in &mut time_acc {
            *v = v.powf(1.0 / lambda);
        }
    }
    Ok(ell_r(
        time_acc
            .iter()
            .enumerate()
            .map(|(slot, &v)| exp2i(part.j_min() + slot as i32).powf(s) * v),
        r,
    ))
}

pub(crate) fn trapezoid_weights(times: &[f64]) -> Vec<f64> {
    let n = times.len();
    let mut w = vec![0.0f64; n];
    for i in 0..n.saturating_sub(1) {
        let half = 0.5 * (times[i + 1] - times[i]);
        w[i] += half;
        w[i + 1] += half;
    }
    w
}

/// The solution-space norm of the fixed-point argument:
/// `||U||_{X^alpha_T} = ||U||_{L~^{2/(1+alpha)} FB^{alpha}_{1,r}}
///                    + ||U||_{L~^{2/(1-alpha)} FB^{-alpha}_{1,r}}`.
pub fn x_alpha_norm(
    times: &[f64],
    fields: &[SpectralField],
    alpha: f64,
    r: f64,
    t_end: f64,
    part: &DyadicPartition,
) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid_parameter("alpha", "must lie in (0, 1)"));
    }
    let plus = chemin_lerner_norm(
        times,
        fields,
        2.0 / (1.0 + alpha),
        alpha,
        1.0,
        r,
        t_end,
        part,
    )?;
    let minus = chemin_lerner_norm(
        times,
        fields,
        2.0 / (1.0 - alpha),
        -alpha,
        1.0,
        r,
        t_end,
        part,
    )?;
    Ok(plus + minus)
}

/// Measured constant of the product law: the ratio
///
/// ```text
///   ||fg||_{L~^1(0,T; FB^0_{1,2})}
///   -----------------------------------------------------------------
///   ||f||_{L~^{2/(1+a)} FB^a} ||g||_{L~^{2/(1-a)} FB^-a}
///     + ||g||_{L~^{2/(1+a)} FB^a} ||f||_{L~^{2/(1-a)} FB^-a}
/// ```
///
/// with the product formed componentwise by frequency-space convolution at
/// each sampled time. The summability index is fixed at r = 2, the index the
/// fixed-point argument runs at.
pub fn product_law_ratio(
    times: &[f64],
    f_fields: &[SpectralField],
    g_fields: &[SpectralField],
    alpha: f64,
    t_end: f64,
    part: &DyadicPartition,
) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid_parameter("alpha", "must lie in (0, 1)"));
    }
    let r = 2.0;
    let mut products = Vec::with_capacity(times.len());
    let mut engine: Option<crate::lattice::SpectralEngine> = None;
    for (f, g) in f_fields.iter().zip(g_fields) {
        let grid = f.lattice()?;
        let eng = engine.get_or_insert_with(|| crate::lattice::SpectralEngine::new(grid));
        products.push(eng.convolve_componentwise(f, g)?);
    }
    let lam_plus = 2.0 / (1.0 + alpha);
    let lam_minus = 2.0 / (1.0 - alpha);
    let num = chemin_lerner_norm(times, &products, 1.0, 0.0, 1.0, r, t_end, part)?;
    let f_plus = chemin_lerner_norm(times, f_fields, lam_plus, alpha, 1.0, r, t_end, part)?;
    let f_minus = chemin_lerner_norm(times, f_fields, lam_minus, -alpha, 1.0, r, t_end, part)?;
    let g_plus = chemin_lerner_norm(times, g_fields, lam_plus, alpha, 1.0, r, t_end, part)?;
    let g_minus = chemin_lerner_norm(times, g_fields, lam_minus, -alpha, 1.0, r, t_end, part)?;
    let denom = f_plus * g_minus + g_plus * f_minus;
    if denom == 0.0 {
        return Err(Error::UndefinedRatio);
    }
    Ok(num / denom)
}
