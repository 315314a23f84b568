//! Mild solutions of the nonlinear system by exponential time stepping.
//!
//! One step of the Duhamel equation
//!
//! ```text
//!   U(t+dt) = e^{-dt A} U(t) - int_0^dt e^{-(dt-s) A} F(U(t+s)) ds
//! ```
//!
//! uses an exponential-Euler predictor (frozen flux) and a corrector that
//! interpolates the flux linearly in s under the exact semigroup kernel:
//! weights `W0 = dt (phi1 - phi2)(-dt A)`, `W1 = dt phi2(-dt A)`. The linear
//! part is propagated exactly, so all discretization error sits in the
//! bilinear term.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{Amp6, LatticeGrid, SpectralField, ZERO_AMP};
use crate::lattice::{leray_project, SpectralEngine};
use crate::matexp::{phi1, phi2};
use crate::norms::{block_lp_profile, x_alpha_norm};
use crate::partition::{exp2i, DyadicPartition};
use crate::symbol::SemigroupPoint;

#[derive(Debug, Clone, Copy)]
pub struct SolverConfig {
    pub grid: LatticeGrid,
    pub dt: f64,
    pub t_end: f64,
    /// Exponent of the solution space X^alpha_T.
    pub alpha: f64,
    /// Summability index of the Fourier-Besov norms.
    pub r: f64,
    pub picard_depth: usize,
    pub dealias_fraction: f64,
    /// Baseline step count for the Picard-expansion march on nonstiff data.
    pub picard_steps: usize,
    /// Diagnostic switch: propagate the linear semigroup only.
    pub disable_nonlinearity: bool,
}

impl SolverConfig {
    pub fn new(grid: LatticeGrid, dt: f64, t_end: f64) -> Self {
        SolverConfig {
            grid,
            dt,
            t_end,
            alpha: 0.5,
            r: 2.0,
            picard_depth: 2,
            dealias_fraction: 2.0 / 3.0,
            picard_steps: 64,
            disable_nonlinearity: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) {
            return Err(Error::invalid_parameter("dt", "must be positive"));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::invalid_parameter("alpha", "must lie in (0, 1)"));
        }
        if !(self.dealias_fraction > 0.0 && self.dealias_fraction <= 1.0) {
            return Err(Error::invalid_parameter(
                "dealias_fraction",
                "must lie in (0, 1]",
            ));
        }
        Ok(())
    }

    /// Partition adapted to the lattice: blocks fully below the resolution
    /// floor or above the extent are dropped.
    pub fn partition(&self) -> Result<DyadicPartition> {
        let j_min = (4.0 * self.grid.h / 3.0).log2().ceil() as i32;
        let j_max = (3.0 * self.grid.half_extent() / 8.0).log2().floor() as i32;
        crate::partition::make_partition(j_min.min(j_max - 1), j_max)
    }
}

#[derive(Debug, Clone)]
pub struct StepDiagnostics {
    pub time: f64,
    /// max |xi . u_hat| / max |u_hat|.
    pub divergence_residual: f64,
    pub hermitian_residual: f64,
    /// 2^{-j} ||psi_j f_hat||_{L^1} per retained scale.
    pub block_norms: Vec<f64>,
    pub halvings: u32,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<SpectralField>,
    pub diagnostics: Vec<StepDiagnostics>,
}

impl Trajectory {
    pub fn x_alpha_norm(&self, alpha: f64, r: f64, t_end: f64, part: &DyadicPartition) -> Result<f64> {
        x_alpha_norm(&self.times, &self.states, alpha, r, t_end, part)
    }
}

/// FB^{-1} block profile used by the step-rejection rule.
fn inverse_weighted_blocks(f: &SpectralField, part: &DyadicPartition) -> Vec<f64> {
    block_lp_profile(f, 1.0, part)
        .iter()
        .enumerate()
        .map(|(slot, &v)| exp2i(-(part.j_min() + slot as i32)) * v)
        .collect()
}

pub struct MildSolver {
    pub cfg: SolverConfig,
    engine: SpectralEngine,
    keep: Vec<bool>,
    points: Vec<SemigroupPoint>,
    part: DyadicPartition,
}

impl MildSolver {
    pub fn new(cfg: SolverConfig) -> Result<Self> {
        cfg.validate()?;
        let engine = SpectralEngine::new(cfg.grid);
        let keep = engine.dealias_keep(cfg.dealias_fraction);
        let points = (0..cfg.grid.len())
            .map(|idx| SemigroupPoint::new(cfg.grid.xi(idx)))
            .collect();
        let part = cfg.partition()?;
        Ok(MildSolver {
            cfg,
            engine,
            keep,
            points,
            part,
        })
    }

    pub fn partition(&self) -> &DyadicPartition {
        &self.part
    }

    fn check_grid(&self, f: &SpectralField) -> Result<()> {
        let grid = f.lattice()?;
        assert_eq!(grid, self.cfg.grid, "field lattice differs from solver grid");
        Ok(())
    }

    /// Applies `f(A(xi))` at every lattice frequency, forcing the zero mode
    /// and Nyquist planes to zero.
    fn apply_spectral(&self, state: &SpectralField, f: impl Fn(&SemigroupPoint, &Amp6) -> Amp6) -> SpectralField {
        let mut out = state.clone();
        for idx in 0..state.len() {
            if self.points[idx].norm2() == 0.0 || self.cfg.grid.is_nyquist(idx) {
                out.values[idx] = ZERO_AMP;
            } else {
                out.values[idx] = f(&self.points[idx], &state.values[idx]);
            }
        }
        out
    }

    /// Fourier coefficients of `( P div(u (x) u'), div(u (x) w') )` for the
    /// pair `(U, V)`, with the 2/3-rule mask applied before and after the
    /// products.
    pub fn bilinear_flux(&mut self, u_field: &SpectralField, v_field: &SpectralField) -> Result<SpectralField> {
        self.check_grid(u_field)?;
        self.check_grid(v_field)?;
        let grid = self.cfg.grid;
        let n3 = grid.len();
        let same = std::ptr::eq(u_field, v_field);

        // Physical factors: u of the first field, u and w of the second.
        let mut phys_u: Vec<Vec<Complex64>> = Vec::with_capacity(3);
        for c in 0..3 {
            let mut a = self.engine.component_masked(u_field, c, Some(&self.keep));
            self.engine.fft3(&mut a, true);
            phys_u.push(a);
        }
        let phys_v: Vec<Vec<Complex64>> = if same {
            Vec::new()
        } else {
            (0..3)
                .map(|c| {
                    let mut a = self.engine.component_masked(v_field, c, Some(&self.keep));
                    self.engine.fft3(&mut a, true);
                    a
                })
                .collect()
        };
        let mut phys_w: Vec<Vec<Complex64>> = Vec::with_capacity(3);
        for c in 3..6 {
            let mut a = self.engine.component_masked(v_field, c, Some(&self.keep));
            self.engine.fft3(&mut a, true);
            phys_w.push(a);
        }
        let second_u = |k: usize| -> &Vec<Complex64> {
            if same {
                &phys_u[k]
            } else {
                &phys_v[k]
            }
        };

        let scale = crate::norms::INV_TWO_PI_CUBED * grid.cell_volume() / n3 as f64;
        let mut out = SpectralField::zeros_lattice(grid);
        let mut prod = vec![Complex64::ZERO; n3];
        // l-th output component accumulates i xi_k F[u_k v_l].
        for l in 0..6 {
            let target: &Vec<Complex64> = if l < 3 { second_u(l) } else { &phys_w[l - 3] };
            for k in 0..3 {
                for idx in 0..n3 {
                    prod[idx] = phys_u[k][idx] * target[idx];
                }
                self.engine.fft3(&mut prod, false);
                for idx in 0..n3 {
                    if !self.keep[idx] {
                        continue;
                    }
                    let xi = grid.xi(idx);
                    out.values[idx][l] += Complex64::new(0.0, xi[k] * scale) * prod[idx];
                }
            }
        }
        let mut projected = leray_project(&out);
        projected.real_symmetric = u_field.real_symmetric && v_field.real_symmetric;
        Ok(projected)
    }

    /// `F(U)` of the mild formulation.
    pub fn nonlinear_flux(&mut self, state: &SpectralField) -> Result<SpectralField> {
        if self.cfg.disable_nonlinearity {
            let mut z = SpectralField::zeros_lattice(self.cfg.grid);
            z.real_symmetric = state.real_symmetric;
            z.div_free = true;
            return Ok(z);
        }
        self.bilinear_flux(state, state)
    }

    /// One step of the two-stage exponential integrator. Returns the new
    /// state or `StepTooLarge` when the corrector moves a dyadic block norm
    /// by more than 20 percent relative to the predictor.
    pub fn duhamel_step(&mut self, state: &SpectralField, dt: f64) -> Result<SpectralField> {
        self.check_grid(state)?;
        let linear = self.apply_spectral(state, |p, v| p.apply_exp(dt, v));
        let f0 = self.nonlinear_flux(state)?;

        // Predictor: exponential Euler.
        let mut predictor = linear.clone();
        {
            let shift = self.apply_spectral(&f0, |p, v| {
                p.apply_fn(|lam| dt * phi1(-dt * lam), v)
            });
            predictor.axpy(Complex64::new(-1.0, 0.0), &shift);
        }

        let f1 = self.nonlinear_flux(&predictor)?;

        // Corrector: trapezoidal-in-s with exact semigroup weights.
        let mut corrected = linear;
        {
            let w0 = self.apply_spectral(&f0, |p, v| {
                p.apply_fn(|lam| dt * (phi1(-dt * lam) - phi2(-dt * lam)), v)
            });
            let w1 = self.apply_spectral(&f1, |p, v| {
                p.apply_fn(|lam| dt * phi2(-dt * lam), v)
            });
            corrected.axpy(Complex64::new(-1.0, 0.0), &w0);
            corrected.axpy(Complex64::new(-1.0, 0.0), &w1);
        }

        if !self.cfg.disable_nonlinearity {
            let before = inverse_weighted_blocks(&predictor, &self.part);
            let after = inverse_weighted_blocks(&corrected, &self.part);
            let floor = 1e-10 * before.iter().cloned().fold(0.0, f64::max);
            let mut worst = 0.0f64;
            for (b, a) in before.iter().zip(&after) {
                if *b > floor && floor > 0.0 {
                    worst = worst.max((a - b).abs() / b);
                }
            }
            if worst > 0.2 {
                return Err(Error::StepTooLarge { worst });
            }
        }
        Ok(corrected)
    }

    fn advance(&mut self, state: &SpectralField, dt: f64, depth: u32, t: f64) -> Result<(SpectralField, u32)> {
        match self.duhamel_step(state, dt) {
            Ok(next) => Ok((next, depth)),
            Err(Error::StepTooLarge { .. }) if depth < 3 => {
                let (half1, d1) = self.advance(state, dt / 2.0, depth + 1, t)?;
                let (half2, d2) = self.advance(&half1, dt / 2.0, depth + 1, t + dt / 2.0)?;
                Ok((half2, d1.max(d2)))
            }
            Err(Error::StepTooLarge { .. }) => Err(Error::BlowUpSuspected { t, halvings: depth }),
            Err(e) => Err(e),
        }
    }

    fn diagnostics_for(&self, t: f64, f: &SpectralField, halvings: u32) -> StepDiagnostics {
        let max_amp = f.max_amp();
        StepDiagnostics {
            time: t,
            divergence_residual: if max_amp > 0.0 {
                f.divergence_residual() / max_amp
            } else {
                0.0
            },
            hermitian_residual: f.hermitian_residual().unwrap_or(f64::NAN),
            block_norms: inverse_weighted_blocks(f, &self.part),
            halvings,
        }
    }

    /// Marches the mild solution to `t_end` on the configured step. A step
    /// that keeps rejecting after 3 halvings aborts with the partial
    /// trajectory attached to the error context.
    pub fn solve_mild(&mut self, u0: &SpectralField) -> Result<Trajectory> {
        self.check_grid(u0)?;
        let mut state = self.apply_spectral(u0, |_, v| *v); // scrub zero mode / Nyquist
        state.real_symmetric = u0.real_symmetric;
        state.div_free = u0.div_free;
        let steps = (self.cfg.t_end / self.cfg.dt).round() as usize;
        let mut traj = Trajectory {
            times: vec![0.0],
            states: vec![state.clone()],
            diagnostics: vec![self.diagnostics_for(0.0, &state, 0)],
        };
        for i in 0..steps {
            let t = i as f64 * self.cfg.dt;
            let (next, halvings) = self.advance(&state, self.cfg.dt, 0, t)?;
            state = next;
            let t_next = t + self.cfg.dt;
            traj.times.push(t_next);
            traj.diagnostics.push(self.diagnostics_for(t_next, &state, halvings));
            traj.states.push(state.clone());
        }
        Ok(traj)
    }

    /// Exact linear evolution sampled at the given times.
    pub fn linear_trajectory(&self, u0: &SpectralField, times: &[f64]) -> Vec<SpectralField> {
        times
            .iter()
            .map(|&t| self.apply_spectral(u0, |p, v| p.apply_exp(t, v)))
            .collect()
    }

    /// Step layout for the Picard march: uniform when the data is nonstiff,
    /// otherwise geometrically growing from a step resolving the fastest
    /// decay rate of the paired heat factors.
    fn picard_steps_layout(&self, f: &SpectralField, t: f64) -> Vec<f64> {
        let mut r2_max = 0.0f64;
        for (idx, xi) in f.frequencies().enumerate() {
            if f.amp_norm(idx) > 0.0 {
                r2_max = r2_max.max(xi.iter().map(|x| x * x).sum());
            }
        }
        let mu = r2_max.max(1e-12);
        let base = self.cfg.picard_steps.max(8);
        if mu * t <= 8.0 {
            return vec![t / base as f64; base];
        }
        // Stiff data: resolve the initial decay layer of the paired heat
        // factors, then grow the step geometrically.
        let mut times = Vec::new();
        let mut dt = 0.25 / mu;
        let cap = t / 8.0;
        let mut acc = 0.0;
        while acc < t {
            let step = dt.min(cap).min(t - acc);
            times.push(step);
            acc += step;
            dt *= 1.25;
        }
        times
    }

    /// The Picard-expansion maps: `A_1(f)(t) = G(t) f` and
    ///
    /// ```text
    ///   A_n(f)(t) = - sum_{n1+n2=n} int_0^t G(t-s) Ptilde div(A_{n1} (x) A_{n2})(s) ds,
    /// ```
    ///
    /// all levels marched together by the same two-stage integrator as
    /// `duhamel_step`. Returns `[A_1(t), ..., A_{n_max}(t)]`.
    pub fn picard_terms(&mut self, f: &SpectralField, t: f64, n_max: usize) -> Result<Vec<SpectralField>> {
        if n_max < 1 {
            return Err(Error::invalid_parameter("n_max", "must be at least 1"));
        }
        self.check_grid(f)?;
        let mut levels: Vec<SpectralField> = Vec::with_capacity(n_max);
        levels.push(self.apply_spectral(f, |_, v| *v));
        for _ in 1..n_max {
            levels.push(SpectralField::zeros_lattice(self.cfg.grid));
        }

        let steps = self.picard_steps_layout(f, t);
        // Forcing of level n at the current time; level 1 is force-free.
        let mut forcing_now: Vec<SpectralField> = Vec::new();
        for n in 2..=n_max {
            forcing_now.push(self.level_forcing(&levels, n)?);
        }
        for &dt in &steps {
            // Predictor: exponential Euler on every level.
            let mut predicted: Vec<SpectralField> = Vec::with_capacity(n_max);
            for (lvl, state) in levels.iter().enumerate() {
                let mut p = self.apply_spectral(state, |pt, v| pt.apply_exp(dt, v));
                if lvl >= 1 {
                    let shift = self.apply_spectral(&forcing_now[lvl - 1], |pt, v| {
                        pt.apply_fn(|lam| dt * phi1(-dt * lam), v)
                    });
                    p.axpy(Complex64::new(1.0, 0.0), &shift);
                }
                predicted.push(p);
            }
            // Corrector with endpoint forcing from the predicted levels.
            let mut next: Vec<SpectralField> = Vec::with_capacity(n_max);
            next.push(predicted[0].clone()); // A_1 marches exactly
            let mut forcing_next: Vec<SpectralField> = Vec::new();
            for n in 2..=n_max {
                forcing_next.push(self.level_forcing(&predicted, n)?);
            }
            for lvl in 1..n_max {
                let mut c = self.apply_spectral(&levels[lvl], |pt, v| pt.apply_exp(dt, v));
                let w0 = self.apply_spectral(&forcing_now[lvl - 1], |pt, v| {
                    pt.apply_fn(|lam| dt * (phi1(-dt * lam) - phi2(-dt * lam)), v)
                });
                let w1 = self.apply_spectral(&forcing_next[lvl - 1], |pt, v| {
                    pt.apply_fn(|lam| dt * phi2(-dt * lam), v)
                });
                c.axpy(Complex64::new(1.0, 0.0), &w0);
                c.axpy(Complex64::new(1.0, 0.0), &w1);
                next.push(c);
            }
            levels = next;
            // For levels whose inputs marched exactly (only level 2), the
            // endpoint forcing is already the forcing at the new time.
            for (slot, f_next) in forcing_next.into_iter().enumerate() {
                let n = slot + 2;
                if n == 2 {
                    forcing_now[slot] = f_next;
                } else {
                    forcing_now[slot] = self.level_forcing(&levels, n)?;
                }
            }
        }
        Ok(levels)
    }

    /// `- sum_{n1 + n2 = n} Ptilde div(A_{n1} (x) A_{n2})`.
    fn level_forcing(&mut self, levels: &[SpectralField], n: usize) -> Result<SpectralField> {
        let mut total = SpectralField::zeros_lattice(self.cfg.grid);
        for n1 in 1..n {
            let n2 = n - n1;
            let flux = self.bilinear_flux(&levels[n1 - 1], &levels[n2 - 1])?;
            total.axpy(Complex64::new(-1.0, 0.0), &flux);
        }
        Ok(total)
    }

    /// Duhamel integral of a fixed bilinear pair,
    /// `B(U1, U2)(t) = int_0^t G(t-s) Ptilde div(U1 (x)~ U2)(s) ds`,
    /// marched on the trajectories' shared time grid. Returns the values at
    /// every grid time.
    pub fn bilinear_duhamel(
        &mut self,
        times: &[f64],
        u1: &[SpectralField],
        u2: &[SpectralField],
    ) -> Result<Vec<SpectralField>> {
        assert_eq!(times.len(), u1.len());
        assert_eq!(times.len(), u2.len());
        let mut state = SpectralField::zeros_lattice(self.cfg.grid);
        let mut out = vec![state.clone()];
        let mut flux_prev = self.bilinear_flux(&u1[0], &u2[0])?;
        for i in 1..times.len() {
            let dt = times[i] - times[i - 1];
            let flux_next = self.bilinear_flux(&u1[i], &u2[i])?;
            let mut next = self.apply_spectral(&state, |pt, v| pt.apply_exp(dt, v));
            let w0 = self.apply_spectral(&flux_prev, |pt, v| {
                pt.apply_fn(|lam| dt * (phi1(-dt * lam) - phi2(-dt * lam)), v)
            });
            let w1 = self.apply_spectral(&flux_next, |pt, v| {
                pt.apply_fn(|lam| dt * phi2(-dt * lam), v)
            });
            next.axpy(Complex64::new(1.0, 0.0), &w0);
            next.axpy(Complex64::new(1.0, 0.0), &w1);
            out.push(next.clone());
            state = next;
            flux_prev = flux_next;
        }
        Ok(out)
    }

    /// One sweep of the Picard fixed-point map: marches
    /// `Phi(U)(t) = G(t) u0 - int_0^t G(t - s) F(U(s)) ds` with the flux
    /// evaluated on the previous iterate's trajectory.
    pub fn picard_sweep(&mut self, u0: &SpectralField, previous: &Trajectory) -> Result<Trajectory> {
        let mut state = self.apply_spectral(u0, |_, v| *v);
        let mut traj = Trajectory {
            times: vec![0.0],
            states: vec![state.clone()],
            diagnostics: vec![self.diagnostics_for(0.0, &state, 0)],
        };
        let mut flux_prev = self.nonlinear_flux(&previous.states[0])?;
        for i in 1..previous.times.len() {
            let dt = previous.times[i] - previous.times[i - 1];
            let flux_next = self.nonlinear_flux(&previous.states[i])?;
            let mut next = self.apply_spectral(&state, |pt, v| pt.apply_exp(dt, v));
            let w0 = self.apply_spectral(&flux_prev, |pt, v| {
                pt.apply_fn(|lam| dt * (phi1(-dt * lam) - phi2(-dt * lam)), v)
            });
            let w1 = self.apply_spectral(&flux_next, |pt, v| {
                pt.apply_fn(|lam| dt * phi2(-dt * lam), v)
            });
            next.axpy(Complex64::new(-1.0, 0.0), &w0);
            next.axpy(Complex64::new(-1.0, 0.0), &w1);
            let t = previous.times[i];
            traj.times.push(t);
            traj.diagnostics.push(self.diagnostics_for(t, &next, 0));
            traj.states.push(next.clone());
            state = next;
            flux_prev = flux_next;
        }
        Ok(traj)
    }
}

#[derive(Debug, Clone)]
pub struct PicardIterationReport {
    pub sweeps: usize,
    /// X^alpha_T distances between successive iterates.
    pub difference_norms: Vec<f64>,
    /// Successive ratios of those distances.
    pub contraction_ratios: Vec<f64>,
    pub final_x_norm: f64,
}

/// Runs Picard fixed-point sweeps on [0, T] and measures the contraction.
pub fn picard_iteration(
    solver: &mut MildSolver,
    u0: &SpectralField,
    t_end: f64,
    sweeps: usize,
) -> Result<PicardIterationReport> {
    let part = solver.partition().clone();
    let alpha = solver.cfg.alpha;
    let r = solver.cfg.r;
    let n_steps = (t_end / solver.cfg.dt).round().max(1.0) as usize;
    let times: Vec<f64> = (0..=n_steps).map(|i| i as f64 * t_end / n_steps as f64).collect();
    let states = solver.linear_trajectory(u0, &times);
    let mut current = Trajectory {
        diagnostics: Vec::new(),
        times,
        states,
    };
    let mut difference_norms = Vec::new();
    for _ in 0..sweeps {
        let next = solver.picard_sweep(u0, &current)?;
        let mut diff_states = Vec::with_capacity(next.states.len());
        for (a, b) in next.states.iter().zip(&current.states) {
            let mut d = a.clone();
            d.axpy(Complex64::new(-1.0, 0.0), b);
            diff_states.push(d);
        }
        let d = x_alpha_norm(&next.times, &diff_states, alpha, r, t_end, &part)?;
        difference_norms.push(d);
        current = next;
    }
    let contraction_ratios = difference_norms
        .windows(2)
        .map(|w| if w[0] > 0.0 { w[1] / w[0] } else { 0.0 })
        .collect();
    let final_x_norm = current.x_alpha_norm(alpha, r, t_end, &part)?;
    Ok(PicardIterationReport {
        sweeps,
        difference_norms,
        contraction_ratios,
        final_x_norm,
    })
}

/// Bisects the horizon until the linear evolution is small in X^alpha_T
/// (threshold `1 / (4 C1)` of the fixed-point argument), then measures the
/// Picard contraction ratio on the found interval.
pub fn find_local_existence_time(
    u0: &SpectralField,
    cfg: &SolverConfig,
    c1_hat: f64,
) -> Result<(f64, f64)> {
    let mut solver = MildSolver::new(*cfg)?;
    let part = solver.partition().clone();
    let threshold = 1.0 / (4.0 * c1_hat);
    let n_steps = (cfg.t_end / cfg.dt).round().max(1.0) as usize;
    let times: Vec<f64> = (0..=n_steps).map(|i| i as f64 * cfg.dt).collect();
    let states = solver.linear_trajectory(u0, &times);
    let small = |t: f64| -> Result<bool> {
        Ok(x_alpha_norm(&times, &states, cfg.alpha, cfg.r, t, &part)? < threshold)
    };
    if u0.max_amp() == 0.0 {
        return Ok((cfg.t_end, 0.0));
    }
    if !small(cfg.dt)? {
        return Err(Error::TimeResolution { dt: cfg.dt });
    }
    // Bisect on the discrete time grid.
    let (mut lo, mut hi) = (1usize, n_steps);
    if small(cfg.t_end)? {
        lo = n_steps;
    }
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if small(times[mid])? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t_loc = times[lo];
    let report = picard_iteration(&mut solver, u0, t_loc, 5)?;
    let ratio = report
        .contraction_ratios
        .iter()
        .cloned()
        .fold(0.0, f64::max);
    Ok((t_loc, ratio))
}
