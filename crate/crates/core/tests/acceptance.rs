//! Acceptance suite: one test per numbered criterion, each printing a
//! pass/fail line per asserted quantity (run with `--nocapture` to see the
//! lines of passing tests). Thresholds are pinned here, not computed.

use std::sync::OnceLock;

use num_complex::Complex64;
use rand::Rng;

use micropolar::calibration::{bilinear_corpus, corpus_field, load_calibration, Calibration};
use micropolar::field::{LatticeGrid, SpectralField, ZERO_AMP};
use micropolar::illposed::{
    build_initial_data, data_norm_scaling, e_sweep, grid_cross_check, kernel_sign_check,
    sweep_surrogates, ESweep, IllposedDatum, InflationSpace, IterateQuadrature, KernelKind,
};
use micropolar::linalg::{hermitian_defect, hermitian_eigenvalues_jacobi, max_abs, M6};
use micropolar::matexp::matrix_exp_oracle;
use micropolar::norms::{fb_norm, x_alpha_norm};
use micropolar::partition::exp2i;
use micropolar::report::ExperimentReport;
use micropolar::rng::{log_uniform_direction, stream};
use micropolar::solver::{picard_iteration, MildSolver, SolverConfig};
use micropolar::symbol::{build_symbol, r_matrix, split_main_remainder, SemigroupPoint};
use micropolar::{apply_block, make_partition};

const DELTA: f64 = 0.05;

fn check(lines: &mut Vec<(bool, String)>, name: &str, pass: bool, detail: String) {
    let line = format!(
        "[{}] {name}: {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    println!("{line}");
    lines.push((pass, line));
}

fn finish(criterion: &str, lines: Vec<(bool, String)>) {
    let failed: Vec<&String> = lines.iter().filter(|(p, _)| !p).map(|(_, l)| l).collect();
    assert!(
        failed.is_empty(),
        "{criterion}: {} of {} checks failed:\n{}",
        failed.len(),
        lines.len(),
        failed
            .iter()
            .map(|s| s.as_str())
            .collect::<Vec<_>>()
            .join("\n")
    );
}

fn spread(values: &[f64]) -> f64 {
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    (max - min) / mean
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    micropolar::illposed::least_squares_slope(xs, ys)
}

#[test]
fn criterion_01_partition_of_unity() {
    let mut lines = Vec::new();
    let part = make_partition(-6, 22).unwrap();
    let (lo, hi) = part.resolved_band();
    let mut rng = stream(42, 1);
    let mut residual = 0.0f64;
    for _ in 0..100_000 {
        let xi = log_uniform_direction(&mut rng, lo, hi);
        residual = residual.max((part.partition_sum(xi) - 1.0).abs());
    }
    check(
        &mut lines,
        "1. partition residual over 1e5 samples",
        residual <= 1e-10,
        format!("{residual:.3e} <= 1e-10"),
    );

    // Delta_j Delta_k = 0 for |j - k| >= 2, exercised through apply_block.
    let grid = LatticeGrid::new(16, 0.5);
    let mut rng2 = stream(42, 2);
    let field = SpectralField::from_fn_lattice(grid, |_| {
        let mut v = ZERO_AMP;
        v[0] = Complex64::new(rng2.random_range(-1.0..1.0), 0.0);
        v
    });
    let mut worst = 0.0f64;
    let lp = make_partition(-3, 3).unwrap();
    for j in lp.scales() {
        let block = apply_block(&field, j, &lp).unwrap();
        for k in lp.scales() {
            if (j - k).abs() >= 2 {
                worst = worst.max(apply_block(&block, k, &lp).unwrap().max_amp());
            }
        }
    }
    check(
        &mut lines,
        "1. disjoint blocks annihilate",
        worst == 0.0,
        format!("max |Delta_j Delta_k f| = {worst:.3e} (|j-k| >= 2)"),
    );
    finish("criterion 1", lines);
}

#[test]
fn criterion_02_symbol_algebra() {
    let mut lines = Vec::new();
    let mut rng = stream(42, 3);
    let mut herm = 0.0f64;
    let mut trace_dev = 0.0f64;
    let mut eig_dev = 0.0f64;
    let mut fallback_cases = 0usize;
    for trial in 0..1000 {
        let mut xi = log_uniform_direction(&mut rng, 1e-3, 1e3);
        if trial % 5 == 0 {
            xi[0] = 0.0;
        }
        if trial % 7 == 0 {
            xi[2] = 0.0;
        }
        if xi == [0.0, 0.0, 0.0] {
            xi[1] = 1.0;
        }
        let b = build_symbol(xi).unwrap();
        herm = herm.max(hermitian_defect(&b.a) / max_abs(&b.a).max(1.0));
        let trace: f64 = (0..6).map(|k| b.a[(k, k)].re).sum();
        let expect = 7.0 * b.norm2() + 6.0;
        trace_dev = trace_dev.max((trace - expect).abs() / expect);
        let mut closed = b.eigenvalues;
        closed.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let numeric = hermitian_eigenvalues_jacobi(&b.a);
        for k in 0..6 {
            eig_dev = eig_dev.max((closed[k] - numeric[k]).abs() / closed[5].max(1.0));
        }
        if b.used_fallback {
            fallback_cases += 1;
        }
    }
    check(
        &mut lines,
        "2. hermiticity",
        herm <= 1e-12,
        format!("{herm:.3e} <= 1e-12"),
    );
    check(
        &mut lines,
        "2. trace identity 7|xi|^2 + 6",
        trace_dev <= 1e-10,
        format!("{trace_dev:.3e} <= 1e-10 relative"),
    );
    check(
        &mut lines,
        "2. closed-form spectrum vs numerical eigensolver",
        eig_dev <= 1e-8,
        format!("{eig_dev:.3e} <= 1e-8 over 1e3 seeded xi"),
    );
    check(
        &mut lines,
        "2. coordinate-plane fallback exercised",
        fallback_cases > 200,
        format!("{fallback_cases} fallback cases"),
    );
    finish("criterion 2", lines);
}

#[test]
fn criterion_03_semigroup_correctness() {
    let mut lines = Vec::new();
    let mut rng = stream(42, 4);
    let mut oracle_dev = 0.0f64;
    let mut comp_dev = 0.0f64;
    let mut commutation = 0.0f64;
    let mut gm_dev = 0.0f64;
    let mut r_dev = 0.0f64;
    for _ in 0..1000 {
        let xi = log_uniform_direction(&mut rng, 1e-3, 5.0);
        let t: f64 = rng.random_range(0.0..10.0);
        let b = build_symbol(xi).unwrap();
        let e = b.exp_matrix(t).unwrap();
        let oracle = matrix_exp_oracle(&(b.a * Complex64::new(-t, 0.0)), 1e-12).unwrap();
        oracle_dev = oracle_dev.max(max_abs(&(e - oracle)) / max_abs(&oracle).max(1e-300));

        let s: f64 = rng.random_range(0.0..2.0);
        let point = SemigroupPoint::new(xi);
        let mut v = ZERO_AMP;
        for c in v.iter_mut() {
            *c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        }
        let once = point.apply_exp(s + t, &v);
        let twice = point.apply_exp(s, &point.apply_exp(t, &v));
        let scale: f64 = once.iter().map(|z| z.norm()).fold(1e-8, f64::max);
        for c in 0..6 {
            comp_dev = comp_dev.max((once[c] - twice[c]).norm() / scale);
        }

        let comm = b.a1 * b.a2 - b.a2 * b.a1;
        commutation = commutation.max(max_abs(&comm) / max_abs(&b.a).max(1.0));

        let (g_m, _) = split_main_remainder(&b, t).unwrap();
        let a1_exp = matrix_exp_oracle(&(b.a1 * Complex64::new(-t, 0.0)), 1e-12).unwrap();
        gm_dev = gm_dev.max(max_abs(&(g_m - a1_exp)) / max_abs(&g_m).max(1e-300));

        let r = r_matrix(xi, t);
        let heat = (-t * b.norm2()).exp();
        let heat2 = (-2.0 * t * b.norm2()).exp();
        for i in 0..3 {
            for j in 0..3 {
                let p = xi[i] * xi[j] / b.norm2();
                let d = if i == j { 1.0 } else { 0.0 };
                r_dev = r_dev.max((r[(i, j)] - (heat * (d - p) + heat2 * p)).abs());
            }
        }
    }
    check(
        &mut lines,
        "3. Q-path e^{-tA} vs scaling-and-squaring oracle",
        oracle_dev <= 1e-8,
        format!("{oracle_dev:.3e} <= 1e-8 over 1e3 (xi, t) pairs, t in [0, 10]"),
    );
    check(
        &mut lines,
        "3. semigroup composition",
        comp_dev <= 1e-8,
        format!("{comp_dev:.3e} <= 1e-8"),
    );
    check(
        &mut lines,
        "3. A1 A2 commutation",
        commutation <= 1e-10,
        format!("{commutation:.3e} <= 1e-10"),
    );
    check(
        &mut lines,
        "3. G_m equals exp(-t A1)",
        gm_dev <= 1e-8,
        format!("{gm_dev:.3e} <= 1e-8"),
    );
    check(
        &mut lines,
        "3. R block matches the closed projector form",
        r_dev <= 1e-12,
        format!("{r_dev:.3e} <= 1e-12"),
    );
    finish("criterion 3", lines);
}

#[test]
fn criterion_04_decay_rate() {
    let mut lines = Vec::new();
    let mut rng = stream(42, 5);
    let mut decay_dev = 0.0f64;
    let mut floor = f64::INFINITY;
    for _ in 0..600 {
        let xi = log_uniform_direction(&mut rng, 1e-2, 10.0);
        let t: f64 = rng.random_range(0.0..3.0);
        let b = build_symbol(xi).unwrap();
        let e = b.exp_matrix(t).unwrap();
        let eig = hermitian_eigenvalues_jacobi(&e);
        let expect = (-t * b.lambda_min()).exp();
        decay_dev = decay_dev.max((eig[5] - expect).abs() / expect);
        floor = floor.min(b.lambda_min() / (b.norm2() / 2.0));
    }
    check(
        &mut lines,
        "4. op-norm of e^{-tA} equals e^{-t(|xi|^2+1-sqrt(|xi|^2+1))}",
        decay_dev <= 1e-8,
        format!("{decay_dev:.3e} <= 1e-8"),
    );
    check(
        &mut lines,
        "4. lambda_min >= |xi|^2 / 2",
        floor >= 1.0 - 1e-12,
        format!("min ratio {floor:.12}"),
    );
    finish("criterion 4", lines);
}

#[test]
fn criterion_05_kernel_sign_bounds() {
    let mut lines = Vec::new();
    for j in 2..=8 {
        let (lo, hi) = kernel_sign_check(KernelKind::J1, j, 1_000_000, 42).unwrap();
        check(
            &mut lines,
            &format!("5. J1 kernel range at j = {j}"),
            lo >= -1.0 - 1e-9 && hi <= -1.0 / 16.0 + 1e-9,
            format!("[{lo:.6}, {hi:.6}] within [-1, -1/16]"),
        );
        let (lo, hi) = kernel_sign_check(KernelKind::K11, j, 1_000_000, 42).unwrap();
        check(
            &mut lines,
            &format!("5. K11 kernel range at j = {j}"),
            lo >= -2.0 - 1e-9 && hi <= -1.0 / 256.0 + 1e-9,
            format!("[{lo:.6}, {hi:.6}] within [-2, -1/256]"),
        );
    }
    finish("criterion 5", lines);
}

#[test]
fn criterion_06_data_norm_scaling() {
    let mut lines = Vec::new();
    let part = make_partition(-6, 22).unwrap();
    let n_list = [4u32, 6, 8, 10, 12];
    for (label, r) in [("2", 2.0), ("4", 4.0), ("inf", f64::INFINITY)] {
        let slope = data_norm_scaling(&n_list, DELTA, r, &part, 6).unwrap();
        let predicted = if r.is_infinite() { -0.5 } else { 1.0 / r - 0.5 };
        check(
            &mut lines,
            &format!("6. data-norm slope at r = {label}"),
            (slope - predicted).abs() <= 0.1,
            format!("fitted {slope:.4} vs predicted {predicted:.4} (tolerance 0.1)"),
        );
    }
    finish("criterion 6", lines);
}

struct Sweeps {
    /// (N, sweep) at N = 3, 4, 5 with t = 2^{-2N} and delta = DELTA.
    runs: Vec<(u32, ESweep)>,
}

fn shared_sweeps() -> &'static Sweeps {
    static SWEEPS: OnceLock<Sweeps> = OnceLock::new();
    SWEEPS.get_or_init(|| {
        let runs = [3u32, 4, 5]
            .iter()
            .map(|&n| {
                let datum = IllposedDatum::new(n, DELTA).unwrap();
                let sweep = e_sweep(
                    &datum,
                    datum.t_n(1.0),
                    5,
                    IterateQuadrature::default(),
                )
                .unwrap();
                (n, sweep)
            })
            .collect();
        Sweeps { runs }
    })
}

#[test]
fn criterion_07_j_term_hierarchy() {
    let mut lines = Vec::new();
    let sweeps = shared_sweeps();
    let d2 = DELTA * DELTA;
    let j1: Vec<f64> = sweeps.runs.iter().map(|(_, s)| s.agg.j_l1[0] / d2).collect();
    check(
        &mut lines,
        "7. J1 lower bound is N-stable",
        j1.iter().all(|&v| v > 0.0) && spread(&j1) <= 0.25,
        format!(
            "J1/delta^2 = [{:.4e}, {:.4e}, {:.4e}], spread {:.1}% <= 25%",
            j1[0],
            j1[1],
            j1[2],
            spread(&j1) * 100.0
        ),
    );

    // Correction families and the pinned theoretical consecutive-N ratios.
    let family = |pick: &dyn Fn(&ESweep) -> f64| -> Vec<f64> {
        sweeps.runs.iter().map(|(_, s)| pick(s) / d2).collect()
    };
    let j23 = family(&|s| s.agg.j_l1[1] + s.agg.j_l1[2]);
    let j4 = family(&|s| s.agg.j_l1[3]);
    let j56 = family(&|s| s.agg.j_l1[4] + s.agg.j_l1[5]);
    let j7 = family(&|s| s.agg.j_l1[6]);
    let cases: [(&str, &Vec<f64>, &dyn Fn(u32) -> f64); 4] = [
        ("J2+J3", &j23, &|n| 0.5 * n as f64 / (n as f64 + 1.0)),
        ("J4", &j4, &|_| 0.25),
        ("J5+J6", &j56, &|_| 0.5f64.sqrt()),
        ("J7", &j7, &|_| 0.25),
    ];
    for (name, values, theory) in cases {
        for (i, n) in [3u32, 4].iter().enumerate() {
            let ratio = values[i + 1] / values[i];
            let th = theory(*n);
            check(
                &mut lines,
                &format!("7. {name} consecutive-N ratio at N = {n}"),
                ratio >= th / 1.7 && ratio <= th * 1.7,
                format!("{ratio:.4} within factor 1.7 of {th:.4}"),
            );
        }
    }
    finish("criterion 7", lines);
}

#[test]
fn criterion_08_inflation_dichotomy() {
    let mut lines = Vec::new();
    let sweeps = shared_sweeps();
    let part = make_partition(-6, 22).unwrap();

    let mut ratios_inf = Vec::new();
    let mut omega_floor = Vec::new();
    let mut data_r2 = Vec::new();
    let mut ratios_r2 = Vec::new();
    for (n, sweep) in &sweeps.runs {
        let (_, field) = build_initial_data(*n, DELTA, 6, 1).unwrap();
        let dn_inf = fb_norm(&field, -1.0, 1.0, f64::INFINITY, &part).unwrap();
        let dn_2 = fb_norm(&field, -1.0, 1.0, 2.0, &part).unwrap();
        let (su, sw) = sweep_surrogates(sweep, InflationSpace::FourierBesov, &part);
        ratios_inf.push(su / dn_inf);
        omega_floor.push(sw / (DELTA * DELTA));
        data_r2.push(dn_2);
        ratios_r2.push(su / dn_2);
    }
    let xs: Vec<f64> = [3.0f64, 4.0, 5.0].iter().map(|n| n.ln()).collect();
    let ys: Vec<f64> = ratios_inf.iter().map(|v| v.ln()).collect();
    let slope = least_squares_slope(&xs, &ys);
    check(
        &mut lines,
        "8. r = inf inflation-ratio log-slope",
        (slope - 0.5).abs() <= 0.15,
        format!(
            "slope {slope:.3} vs 0.5 +- 0.15 (ratios {:.4e}, {:.4e}, {:.4e})",
            ratios_inf[0], ratios_inf[1], ratios_inf[2]
        ),
    );
    check(
        &mut lines,
        "8. omega_2 surrogate obeys the same N-stable lower bound",
        omega_floor.iter().all(|&v| v > 0.0) && spread(&omega_floor) <= 0.25,
        format!(
            "omega2/delta^2 = [{:.4e}, {:.4e}, {:.4e}], spread {:.1}%",
            omega_floor[0],
            omega_floor[1],
            omega_floor[2],
            spread(&omega_floor) * 100.0
        ),
    );
    check(
        &mut lines,
        "8. r = 2 data norm is N-stable",
        spread(&data_r2) <= 0.25,
        format!("spread {:.1}% <= 25%", spread(&data_r2) * 100.0),
    );
    check(
        &mut lines,
        "8. r = 2 ratio is N-stable",
        spread(&ratios_r2) <= 0.25,
        format!("spread {:.1}% <= 25%", spread(&ratios_r2) * 100.0),
    );
    finish("criterion 8", lines);
}

#[test]
fn criterion_09_path_equivalence() {
    let mut lines = Vec::new();
    let dev64 = grid_cross_check(2, DELTA, 64).unwrap();
    check(
        &mut lines,
        "9. cube vs lattice second iterate at 64^3",
        dev64 <= 0.05,
        format!("relative deviation {dev64:.4} <= 0.05"),
    );
    let dev128 = grid_cross_check(2, DELTA, 128).unwrap();
    check(
        &mut lines,
        "9. deviation decreases at 128^3",
        dev128 < dev64,
        format!("{dev128:.4} < {dev64:.4}"),
    );
    finish("criterion 9", lines);
}

#[test]
fn criterion_10_solver_contracts() {
    let mut lines = Vec::new();
    let grid = LatticeGrid::new(16, 0.5);
    let mut cfg = SolverConfig::new(grid, 0.01, 0.2);
    let mut rng = stream(42, 6);
    let base = corpus_field(grid, &mut rng, 1.0);

    // Divergence and symmetry at every accepted step of a nonlinear run.
    let mut solver = MildSolver::new(cfg).unwrap();
    let traj = solver.solve_mild(&base.scaled(Complex64::new(0.2, 0.0))).unwrap();
    let div = traj
        .diagnostics
        .iter()
        .map(|d| d.divergence_residual)
        .fold(0.0, f64::max);
    check(
        &mut lines,
        "10. divergence residual at every step",
        div <= 1e-10,
        format!("{div:.3e} <= 1e-10"),
    );

    // Linear consistency with the flux disabled.
    cfg.disable_nonlinearity = true;
    let mut linear_solver = MildSolver::new(cfg).unwrap();
    let ltraj = linear_solver.solve_mild(&base).unwrap();
    let mut lin_dev = 0.0f64;
    for (i, t) in ltraj.times.iter().enumerate() {
        let expect = linear_solver.linear_trajectory(&base, &[*t]).pop().unwrap();
        let mut d = ltraj.states[i].clone();
        d.axpy(Complex64::new(-1.0, 0.0), &expect);
        lin_dev = lin_dev.max(d.max_amp() / expect.max_amp().max(1e-300));
    }
    check(
        &mut lines,
        "10. linear consistency",
        lin_dev <= 1e-8,
        format!("{lin_dev:.3e} <= 1e-8"),
    );
    cfg.disable_nonlinearity = false;

    // One-step self-convergence at order 2.
    let mut solver = MildSolver::new(cfg).unwrap();
    let u = base.scaled(Complex64::new(0.05, 0.0));
    let dt = 0.04;
    let reference = {
        let mut s = u.clone();
        for _ in 0..8 {
            s = solver.duhamel_step(&s, dt / 8.0).unwrap();
        }
        s
    };
    let defect = |state: &SpectralField| -> f64 {
        let mut d = state.clone();
        d.axpy(Complex64::new(-1.0, 0.0), &reference);
        d.max_amp()
    };
    let coarse = defect(&solver.duhamel_step(&u, dt).unwrap());
    let fine = {
        let mid = solver.duhamel_step(&u, dt / 2.0).unwrap();
        defect(&solver.duhamel_step(&mid, dt / 2.0).unwrap())
    };
    let ratio = coarse / fine;
    check(
        &mut lines,
        "10. one-step self-convergence order 2",
        (3.4..=4.6).contains(&ratio),
        format!("defect ratio {ratio:.3} in [3.4, 4.6]"),
    );

    // Picard truncation: || U - A1 - A2 || ~ delta^3 under amplitude scaling,
    // with the expansion marched on the same step sequence as the solver.
    let mut tr_cfg = SolverConfig::new(grid, 0.015625, 0.125);
    tr_cfg.picard_steps = 8;
    let part = tr_cfg.partition().unwrap();
    let deltas = [0.02, 0.04, 0.08];
    let mut defects = Vec::new();
    for &delta in &deltas {
        let mut s = MildSolver::new(tr_cfg).unwrap();
        let u0 = base.scaled(Complex64::new(delta, 0.0));
        let traj = s.solve_mild(&u0).unwrap();
        let terms = s.picard_terms(&u0, tr_cfg.t_end, 2).unwrap();
        let mut diff = traj.states.last().unwrap().clone();
        diff.axpy(Complex64::new(-1.0, 0.0), &terms[0]);
        diff.axpy(Complex64::new(-1.0, 0.0), &terms[1]);
        defects.push(fb_norm(&diff, -1.0, 1.0, 2.0, &part).unwrap());
    }
    let slope = (defects[2] / defects[0]).ln() / (deltas[2] / deltas[0]).ln();
    check(
        &mut lines,
        "10. Picard truncation slope",
        (slope - 3.0).abs() <= 0.2,
        format!("{slope:.3} within 3.0 +- 0.2"),
    );
    finish("criterion 10", lines);
}

fn committed_calibration() -> Calibration {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../calibration.json");
    load_calibration(&path).expect("repository calibration.json (run `micropolar calibrate`)")
}

#[test]
fn criterion_11_small_data_fixed_point() {
    let mut lines = Vec::new();
    let cal = committed_calibration();

    // The bilinear constant must stay within 1 percent of the calibrated one.
    let (c1, _) = bilinear_corpus(cal.seed, 50).unwrap();
    check(
        &mut lines,
        "11. bilinear constant consistency",
        c1 <= cal.c1_hat * 1.01,
        format!("{c1:.6e} <= 1.01 * {:.6e}", cal.c1_hat),
    );

    // Contraction at the calibrated smallness.
    let grid = LatticeGrid::new(16, 0.5);
    let cfg = SolverConfig::new(grid, 1.0 / 64.0, 0.5);
    let part = cfg.partition().unwrap();
    let mut solver = MildSolver::new(cfg).unwrap();
    let mut rng = stream(42, 7);
    let raw = corpus_field(grid, &mut rng, 1.0);
    let times: Vec<f64> = (0..=32).map(|i| i as f64 * cfg.dt).collect();
    let lin = solver.linear_trajectory(&raw, &times);
    let lin_norm = x_alpha_norm(&times, &lin, cfg.alpha, cfg.r, cfg.t_end, &part).unwrap();
    let u0 = raw.scaled(Complex64::new(0.9 * cal.epsilon / lin_norm, 0.0));
    let run = picard_iteration(&mut solver, &u0, cfg.t_end, 6).unwrap();
    let worst = run
        .contraction_ratios
        .iter()
        .cloned()
        .fold(0.0f64, f64::max);
    check(
        &mut lines,
        "11. Picard successive-difference ratios",
        worst <= 0.5,
        format!("max ratio {worst:.4} <= 0.5"),
    );
    check(
        &mut lines,
        "11. converged norm inside the fixed-point ball",
        run.final_x_norm < 1.0 / (2.0 * cal.c1_hat),
        format!(
            "{:.6e} < 1/(2 C1) = {:.6e}",
            run.final_x_norm,
            1.0 / (2.0 * cal.c1_hat)
        ),
    );

    // Determinism: the same seed yields byte-identical reports.
    let build_report = || {
        let mut r = ExperimentReport::new("determinism-probe", "fixed".into(), 42);
        let (lo, hi) = kernel_sign_check(KernelKind::J1, 3, 10_000, 42).unwrap();
        r.value("j1_min", lo);
        r.value("j1_max", hi);
        let (_, field) = build_initial_data(3, DELTA, 5, 1).unwrap();
        let lp = make_partition(-6, 22).unwrap();
        r.value("data_norm", fb_norm(&field, -1.0, 1.0, 2.0, &lp).unwrap());
        r.check_le("j1_upper", hi, -1.0 / 16.0 + 1e-9);
        r.to_json().unwrap()
    };
    let a = build_report();
    let b = build_report();
    check(
        &mut lines,
        "11. identical seeds give byte-identical reports",
        a == b,
        format!("{} bytes", a.len()),
    );
    finish("criterion 11", lines);
}

/// Supplementary: the eigen-sorted spectrum also matches on a wide magnitude
/// range including |xi| near the fp limits of the closed form.
#[test]
fn symbol_wide_range_spot_checks() {
    let mut rng = stream(42, 8);
    for _ in 0..100 {
        let xi = log_uniform_direction(&mut rng, 1e-3, 1e3);
        let b = build_symbol(xi).unwrap();
        let e0 = b.exp_matrix(0.0).unwrap();
        assert!(max_abs(&(e0 - M6::identity())) <= 1e-9);
    }
}

/// Supplementary: calibration quadrature robustness (constants shift < 2%
/// when the Gauss order changes).
#[test]
fn calibration_is_quadrature_robust() {
    let cal = committed_calibration();
    let shifted = micropolar::calibration::calibrate(cal.seed, cal.gauss_order + 2).unwrap();
    let rel = |a: f64, b: f64| (a - b).abs() / a.abs();
    assert!(rel(cal.c0_u, shifted.c0_u) < 0.02, "c0_u moved");
    assert!(rel(cal.c0_omega, shifted.c0_omega) < 0.02, "c0_omega moved");
    assert!(rel(cal.c_prime, shifted.c_prime) < 0.02, "c_prime moved");
    assert!(rel(cal.c1_hat, shifted.c1_hat) < 0.02, "c1_hat moved");
}

/// Supplementary: dyadic dilation scales the (s = -1, p = 1) norm exactly.
#[test]
fn dilation_scaling_acceptance() {
    let part = make_partition(-6, 26).unwrap();
    let (_, field) = build_initial_data(4, DELTA, 5, 1).unwrap();
    let base = fb_norm(&field, -1.0, 1.0, 1.0, &part).unwrap();
    for k in [1, 2, 3] {
        let scaled = fb_norm(&field.dilate(k), -1.0, 1.0, 1.0, &part).unwrap();
        assert!(
            (scaled - base * exp2i(-k)).abs() <= 1e-6 * base,
            "k = {k}"
        );
    }
}
