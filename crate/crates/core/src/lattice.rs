//! Pseudo-spectral machinery on the frequency lattice: batched 3-D FFTs,
//! dealiasing masks, and frequency-space convolution.
//!
//! Discrete dictionary: a stored transform `f_hat` on the lattice stands for
//! the continuum transform sampled at `xi = k h`; the physical field is
//! `f(x) = (2 pi)^-3 h^3 sum_k f_hat(k) e^{i k h . x}` on the periodic box of
//! period `2 pi / h`. A pointwise product in physical space therefore pulls
//! back to `(2 pi)^-3 h^3` times the discrete circular convolution.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::Result;
use crate::field::{LatticeGrid, SpectralField};

pub struct SpectralEngine {
    pub grid: LatticeGrid,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
    rows: Vec<Complex64>,
}

impl SpectralEngine {
    pub fn new(grid: LatticeGrid) -> Self {
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(grid.n);
        let inv = planner.plan_fft_inverse(grid.n);
        let scratch_len = fwd
            .get_inplace_scratch_len()
            .max(inv.get_inplace_scratch_len());
        SpectralEngine {
            grid,
            fwd,
            inv,
            scratch: vec![Complex64::ZERO; scratch_len],
            rows: vec![Complex64::ZERO; grid.n * grid.n],
        }
    }

    /// Unnormalized 3-D transform in place; `inverse` selects the sign.
    pub fn fft3(&mut self, data: &mut [Complex64], inverse: bool) {
        let n = self.grid.n;
        assert_eq!(data.len(), n * n * n);
        let plan = if inverse { &self.inv } else { &self.fwd };

        // Axis 2: rows are contiguous, one batched call.
        plan.process_with_scratch(data, &mut self.scratch);

        // Axes 0 and 1: gather a plane of strided rows, transform, scatter.
        for axis in [0usize, 1] {
            for outer in 0..n {
                // Collect n rows of length n into the plane buffer.
                for inner in 0..n {
                    for pos in 0..n {
                        let idx = match axis {
                            0 => (pos * n + outer) * n + inner,
                            _ => (outer * n + pos) * n + inner,
                        };
                        self.rows[inner * n + pos] = data[idx];
                    }
                }
                plan.process_with_scratch(&mut self.rows, &mut self.scratch);
                for inner in 0..n {
                    for pos in 0..n {
                        let idx = match axis {
                            0 => (pos * n + outer) * n + inner,
                            _ => (outer * n + pos) * n + inner,
                        };
                        data[idx] = self.rows[inner * n + pos];
                    }
                }
            }
        }
    }

    /// Keep-table of the dealiasing rule: a mode survives when every signed
    /// axis index satisfies `|k| <= fraction * n/2`, and unpaired Nyquist
    /// planes are always dropped.
    pub fn dealias_keep(&self, fraction: f64) -> Vec<bool> {
        let n = self.grid.n;
        let cut = fraction * (n as f64) / 2.0;
        (0..n * n * n)
            .map(|idx| {
                let k = self.grid.k_vec(idx);
                k.iter().all(|&ki| (ki.abs() as f64) <= cut) && !self.grid.is_nyquist(idx)
            })
            .collect()
    }

    /// Extracts one component, zeroing masked-out modes.
    pub fn component_masked(
        &self,
        f: &SpectralField,
        comp: usize,
        keep: Option<&[bool]>,
    ) -> Vec<Complex64> {
        (0..f.len())
            .map(|idx| {
                if keep.map_or(true, |k| k[idx]) {
                    f.values[idx][comp]
                } else {
                    Complex64::ZERO
                }
            })
            .collect()
    }

    /// Componentwise product in physical space, i.e. the frequency-space
    /// circular convolution scaled by `(2 pi)^-3 h^3`. No dealiasing is
    /// applied; callers pick grids large enough for their spectra.
    pub fn convolve_componentwise(
        &mut self,
        f: &SpectralField,
        g: &SpectralField,
    ) -> Result<SpectralField> {
        let grid = f.lattice()?;
        let grid_g = g.lattice()?;
        assert_eq!(grid, grid_g, "operands live on different lattices");
        assert_eq!(grid, self.grid, "engine built for a different lattice");
        let n3 = grid.len();
        let scale = crate::norms::INV_TWO_PI_CUBED * grid.cell_volume() / n3 as f64;
        let mut out = SpectralField::zeros_lattice(grid);
        for c in 0..6 {
            let mut a = self.component_masked(f, c, None);
            let mut b = self.component_masked(g, c, None);
            self.fft3(&mut a, true);
            self.fft3(&mut b, true);
            for (x, y) in a.iter_mut().zip(&b) {
                *x *= y;
            }
            self.fft3(&mut a, false);
            for idx in 0..n3 {
                out.values[idx][c] = a[idx] * scale;
            }
        }
        Ok(out)
    }
}

/// Leray projection: `u_hat <- u_hat - xi (xi . u_hat) / |xi|^2`, the zero
/// mode set to zero, micro-rotation components untouched.
pub fn leray_project(f: &SpectralField) -> SpectralField {
    let mut out = f.clone();
    for (idx, xi) in f.frequencies().enumerate() {
        let r2: f64 = xi.iter().map(|x| x * x).sum();
        if r2 == 0.0 {
            for c in 0..3 {
                out.values[idx][c] = Complex64::ZERO;
            }
            continue;
        }
        let v = &f.values[idx];
        let div = (xi[0] * v[0] + xi[1] * v[1] + xi[2] * v[2]) / r2;
        for c in 0..3 {
            out.values[idx][c] = v[c] - div * xi[c];
        }
    }
    out.div_free = true;
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::ZERO_AMP as ZERO;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn fft_roundtrip_scales_by_n3() {
        let grid = LatticeGrid::new(8, 0.5);
        let mut engine = SpectralEngine::new(grid);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let data: Vec<Complex64> = (0..grid.len())
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let mut work = data.clone();
        engine.fft3(&mut work, true);
        engine.fft3(&mut work, false);
        let n3 = grid.len() as f64;
        for (w, d) in work.iter().zip(&data) {
            assert!((w / n3 - d).norm() < 1e-12);
        }
    }

    #[test]
    fn fft_matches_direct_dft_on_single_mode() {
        let grid = LatticeGrid::new(4, 1.0);
        let mut engine = SpectralEngine::new(grid);
        // Place a single unit at k = (1, -2, 3 mod 4 = -1).
        let mut data = vec![Complex64::ZERO; grid.len()];
        let slot = grid.index([grid.slot(1), grid.slot(-2), grid.slot(-1)]);
        data[slot] = Complex64::new(1.0, 0.0);
        engine.fft3(&mut data, true);
        // Inverse DFT of a delta is the plane wave e^{2 pi i k.m / n}.
        for idx in 0..grid.len() {
            let m = grid.multi_index(idx);
            let phase = 2.0 * std::f64::consts::PI
                * (1.0 * m[0] as f64 - 2.0 * m[1] as f64 - 1.0 * m[2] as f64)
                / 4.0;
            let expect = Complex64::from_polar(1.0, phase);
            assert!((data[idx] - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn convolution_matches_dense_oracle() {
        let grid = LatticeGrid::new(8, 0.75);
        let mut engine = SpectralEngine::new(grid);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut rand_field = |density: f64| {
            let mut f = SpectralField::zeros_lattice(grid);
            for idx in 0..grid.len() {
                if rng.random::<f64>() < density {
                    f.values[idx][0] =
                        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                }
            }
            f
        };
        let f = rand_field(0.3);
        let g = rand_field(0.3);
        let got = engine.convolve_componentwise(&f, &g).unwrap();

        // Dense O(n^2) circular convolution over stored frequencies.
        let n = grid.n as i64;
        let scale = crate::norms::INV_TWO_PI_CUBED * grid.cell_volume();
        for out_idx in [0usize, 5, 77, 300, 511] {
            let k = grid.k_vec(out_idx);
            let mut acc = Complex64::ZERO;
            for q_idx in 0..grid.len() {
                let q = grid.k_vec(q_idx);
                let d = [
                    (k[0] - q[0]).rem_euclid(n),
                    (k[1] - q[1]).rem_euclid(n),
                    (k[2] - q[2]).rem_euclid(n),
                ];
                let d_idx = grid.index([d[0] as usize, d[1] as usize, d[2] as usize]);
                acc += f.values[q_idx][0] * g.values[d_idx][0];
            }
            acc *= scale;
            assert!(
                (got.values[out_idx][0] - acc).norm() < 1e-10,
                "idx {out_idx}"
            );
        }
    }

    #[test]
    fn dealias_mask_cuts_above_fraction() {
        let grid = LatticeGrid::new(12, 0.5);
        let engine = SpectralEngine::new(grid);
        let keep = engine.dealias_keep(2.0 / 3.0);
        for idx in 0..grid.len() {
            let k = grid.k_vec(idx);
            let expect = k.iter().all(|&ki| ki.abs() <= 4) && !grid.is_nyquist(idx);
            assert_eq!(keep[idx], expect, "k = {k:?}");
        }
    }

    #[test]
    fn leray_examples() {
        let grid = LatticeGrid::new(4, 1.0);
        // Pure gradient direction is annihilated; solenoidal is fixed.
        let mut f = SpectralField::zeros_lattice(grid);
        let idx_grad = grid.index([grid.slot(1), grid.slot(2), grid.slot(-2)]);
        let xi = grid.xi(idx_grad);
        for c in 0..3 {
            f.values[idx_grad][c] = Complex64::new(xi[c], 0.0);
        }
        let idx_sol = grid.index([grid.slot(1), grid.slot(0), grid.slot(0)]);
        f.values[idx_sol] = ZERO;
        f.values[idx_sol][1] = Complex64::new(0.7, -0.2); // perpendicular to xi = (1,0,0) h
        let p = leray_project(&f);
        for c in 0..3 {
            assert!(p.values[idx_grad][c].norm() < 1e-14);
        }
        assert!((p.values[idx_sol][1] - f.values[idx_sol][1]).norm() < 1e-14);

        // xi = (1,2,2), u = e1 -> (8/9, -2/9, -2/9); n = 8 so k = 2 is exact.
        let grid = LatticeGrid::new(8, 1.0);
        let mut g = SpectralField::zeros_lattice(grid);
        let idx = grid.index([grid.slot(1), grid.slot(2), grid.slot(2)]);
        assert_eq!(grid.xi(idx), [1.0, 2.0, 2.0]);
        g.values[idx][0] = Complex64::new(1.0, 0.0);
        let pg = leray_project(&g);
        let expect = [8.0 / 9.0, -2.0 / 9.0, -2.0 / 9.0];
        for c in 0..3 {
            assert!((pg.values[idx][c].re - expect[c]).abs() < 1e-14);
            assert!(pg.values[idx][c].im.abs() < 1e-16);
        }
        assert!(pg.divergence_residual() < 1e-10 * pg.max_amp().max(1e-30));
    }
}
