//! Acceptance suite: end-to-end checks of the toolkit at its stated
//! tolerances. Each criterion prints one pass/fail line; run with
//! `cargo test --test acceptance -- --nocapture` to see them.

use boussinesq_ist::asymptotics::{u_asymptotic, AsymptoticConfig, CircleInterp};
use boussinesq_ist::painleve::{left_tail, solve_hastings_mcleod};
use boussinesq_ist::scattering::{
    build_potential, estimate_blowup_t, reference_initial_data, reflection_coefficients,
    scattering_sample, verify_identities, InitialData, RaySample, ReflectionTable, SamplingPlan,
    VolterraConfig, DEFAULT_BLOWUP_WINDOW,
};
use boussinesq_ist::sim::{init_simulation, sim_grid, DampingConfig, SimConfig};
use boussinesq_ist::special::airy_ai;
use boussinesq_ist::spectral::{eval_lz, eval_phase, p_inv_third_column, saddle_points, PhasePair, Regime, OMEGA};
use boussinesq_ist::wmodel::{coeff_m2j1, eval_mw, eval_mw_boundary, jump_vw};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::time::Instant;

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn report(criterion: &str, pass: bool, detail: &str) {
    println!("[{}] {criterion}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "{criterion}: {detail}");
}

/// Gaussian quadrature is overkill here: the grids are uniform and the
/// integrands smooth, so composite Simpson reaches well below the target
/// tolerances. Requires an odd number of points.
fn simpson(h: f64, f: &[Complex64]) -> Complex64 {
    assert!(f.len() % 2 == 1);
    let mut s = f[0] + f[f.len() - 1];
    for (m, v) in f.iter().enumerate().skip(1).take(f.len() - 2) {
        s += if m % 2 == 1 { 4.0 * *v } else { 2.0 * *v };
    }
    s * (h / 3.0)
}

/// Reflection table of the reference data at the acceptance resolution:
/// N_x = 4096, 552 circle angles, narrow exclusion arcs so that >= 500
/// samples survive and the limit extrapolation toward k = +-1 resolves.
fn acceptance_table() -> ReflectionTable {
    let data = reference_initial_data(4096, 2.0);
    let plan = SamplingPlan { n_theta: 552, exclusion: 0.02, ..SamplingPlan::default() };
    reflection_coefficients(&data, &plan, &VolterraConfig::default()).unwrap()
}

#[test]
fn criterion_1_identity_suite() {
    // Single-threaded as stated: confine rayon to one worker.
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let start = Instant::now();
    let table = pool.install(acceptance_table);
    let elapsed = start.elapsed().as_secs_f64();

    let n_samples = (0..table.circle.len()).filter(|&i| table.at(i).is_some()).count();
    let checks = verify_identities(&table, 1e-6, 1e-8);
    let mut max_res = 0.0f64;
    let mut ok = n_samples >= 500 && elapsed < 300.0;
    for name in [
        "circle_relation",
        "conjugate_symmetry_r2_rtilde_r1",
        "r2_reconstruction_from_r1",
        "f_equals_inverse_abs_s11_squared",
    ] {
        let ch = checks.iter().find(|c| c.name == name).unwrap();
        max_res = max_res.max(ch.max_residual);
        ok &= ch.pass;
    }
    report(
        "criterion 1 identity suite",
        ok,
        &format!("max residual {max_res:.2e} over {n_samples} samples in {elapsed:.1} s"),
    );
}

#[test]
fn criterion_2_inequality_suite() {
    let table = acceptance_table();
    let checks = verify_identities(&table, 1e-6, 1e-8);
    let mut ok = true;
    let mut max_res = 0.0f64;
    for name in [
        "f_nonnegative",
        "f_at_most_one_on_arcs",
        "one_plus_r1r2_positive_on_arcs",
        "nu_hat1_nonnegative",
        "nu_hat2_nonnegative",
    ] {
        let ch = checks.iter().find(|c| c.name == name).unwrap();
        max_res = max_res.max(ch.max_residual);
        ok &= ch.pass;
    }
    // f -> 0 at the sixth roots: monotone decrease over the nearest samples,
    // and the circle limits r1 -> 1, r2 -> -1 at +-1 resolve.
    let monotone = checks.iter().find(|c| c.name == "f_vanishes_monotonically_at_roots").unwrap();
    let limits = checks.iter().find(|c| c.name == "r1_r2_limits_at_pm1").unwrap();
    ok &= monotone.pass && monotone.max_residual == 0.0 && limits.pass;
    report(
        "criterion 2 inequality suite",
        ok,
        &format!(
            "max inequality residual {max_res:.2e}, limit extrapolation {:.2e}",
            limits.max_residual
        ),
    );
}

#[test]
fn criterion_3_saddles_and_phase() {
    // Saddle residuals |dPhi21/dk| on zeta in (0, 10].
    let mut max_saddle = 0.0f64;
    for n in 1..=1000 {
        let zeta = 0.01 * n as f64;
        let sc = saddle_points(zeta).unwrap();
        for kj in [sc.k1, sc.k2, sc.k3, sc.k4] {
            max_saddle = max_saddle.max(eval_phase(zeta, kj, PhasePair::P21).unwrap().dk.norm());
        }
    }

    // Closed-form saddle locations at the three distinguished slopes.
    let e = |th: f64| c64(th.cos(), th.sin());
    let mut max_loc = 0.0f64;
    let sc = saddle_points(0.0).unwrap();
    for (got, want) in [
        (sc.k1, e(3.0 * PI / 4.0)),
        (sc.k2, e(-3.0 * PI / 4.0)),
        (sc.k3, e(PI / 4.0)),
        (sc.k4, e(-PI / 4.0)),
    ] {
        max_loc = max_loc.max((got - want).norm());
    }
    let sc = saddle_points(1.0 / 3f64.sqrt()).unwrap();
    assert_eq!(sc.regime, Regime::Midrange);
    max_loc = max_loc.max((sc.k3 - e(PI / 6.0)).norm()).max((sc.k4 - e(-PI / 6.0)).norm());
    let sc = saddle_points(1.0).unwrap();
    assert_eq!(sc.regime, Regime::Transition);
    for (got, want) in [
        (sc.k1, OMEGA),
        (sc.k2, OMEGA * OMEGA),
        (sc.k3, c64(1.0, 0.0)),
        (sc.k4, c64(1.0, 0.0)),
    ] {
        max_loc = max_loc.max((got - want).norm());
    }

    // Re Phi21 vanishes identically on the unit circle.
    let mut max_re = 0.0f64;
    for n in 0..200 {
        let th = 2.0 * PI * n as f64 / 200.0;
        let k = e(th);
        for &zeta in &[0.0, 0.3, 1.0, 2.5, 10.0] {
            let ph = eval_phase(zeta, k, PhasePair::P21).unwrap();
            max_re = max_re.max(ph.value.re.abs() / (1.0 + ph.value.norm()));
        }
    }

    let ok = max_saddle < 1e-10 && max_loc < 1e-12 && max_re < 1e-12;
    report(
        "criterion 3 saddle/phase suite",
        ok,
        &format!("saddle residual {max_saddle:.2e}, locations {max_loc:.2e}, Re Phi21 {max_re:.2e}"),
    );
}

#[test]
fn criterion_4_born_order() {
    // Scattering at amplitude eps minus the first Born term is O(eps^2);
    // the Born term comes from an independent direct quadrature.
    let n = 2049;
    let xmax = 5.0;
    let xs: Vec<f64> = (0..n).map(|i| -xmax + 2.0 * xmax * i as f64 / (n - 1) as f64).collect();
    let make = |eps: f64| {
        let u0: Vec<f64> = xs.iter().map(|&x| eps * (-x * x).exp()).collect();
        let v0: Vec<f64> = xs.iter().map(|&x| eps * (-x * x).exp() * (1.0 - 0.3 * x)).collect();
        InitialData::new(xs.clone(), u0, v0, 1e-9).unwrap()
    };
    let unit = make(1.0);
    let h = unit.h();
    let ks = [c64(0.55, 0.62), c64(-0.2, 0.85), c64(0.9, 0.35)];
    let mut errs = Vec::new();
    for &eps in &[1e-2, 1e-3] {
        let data = make(eps);
        let mut max_err = 0.0f64;
        for &k in &ks {
            // b_j(x) recovered from the rank-one factorization U = a b^T.
            let a = p_inv_third_column(k).unwrap();
            let l = eval_lz(k).unwrap().l;
            let pot = build_potential(&unit, k).unwrap();
            let s = scattering_sample(&data, k, &VolterraConfig::default()).unwrap();
            for j in 0..2 {
                let mu = l[0] - l[j];
                let f: Vec<Complex64> = pot
                    .iter()
                    .map(|p| (-p.x * mu).exp() * p.u[(0, j)] / a[0])
                    .collect();
                let s1 = -a[0] * simpson(h, &f);
                let got = if j == 0 { s.s11 - 1.0 } else { s.s12 };
                max_err = max_err.max((got - eps * s1).norm());
            }
        }
        errs.push(max_err);
    }
    let order = (errs[0] / errs[1]).log10();
    report(
        "criterion 4 Born-oracle order",
        order >= 1.9,
        &format!("observed order {order:.3} (errors {:.2e}, {:.2e})", errs[0], errs[1]),
    );
}

/// Independent Hastings-McLeod oracle: Chebyshev collocation with dense
/// Newton, evaluated at the middle node y = 0.
fn chebyshev_u0(y_max: f64, n: usize) -> f64 {
    use nalgebra::{DMatrix, DVector};
    let np = n + 1;
    let x: Vec<f64> = (0..np).map(|j| (PI * j as f64 / n as f64).cos()).collect();
    let cbar = |j: usize| if j == 0 || j == n { 2.0 } else { 1.0 };
    let mut d = DMatrix::<f64>::zeros(np, np);
    for i in 0..np {
        for j in 0..np {
            if i != j {
                let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                d[(i, j)] = cbar(i) / cbar(j) * sign / (x[i] - x[j]);
            }
        }
    }
    for i in 0..np {
        let mut s = 0.0;
        for j in 0..np {
            if i != j {
                s += d[(i, j)];
            }
        }
        d[(i, i)] = -s;
    }
    let d = d / y_max;
    let d2 = &d * &d;
    let y: Vec<f64> = x.iter().map(|&v| v * y_max).collect();
    let mut u = DVector::<f64>::from_iterator(
        np,
        y.iter().map(|&yi| (((yi * yi + 4.0).sqrt() - yi) / 4.0).sqrt()),
    );
    u[0] = airy_ai(y_max);
    u[np - 1] = left_tail(-y_max).0;
    for _ in 0..200 {
        let mut f = &d2 * &u;
        let mut jac = d2.clone();
        for i in 0..np {
            f[i] -= y[i] * u[i] + 2.0 * u[i].powi(3);
            jac[(i, i)] -= y[i] + 6.0 * u[i] * u[i];
        }
        for &row in &[0usize, np - 1] {
            for j in 0..np {
                jac[(row, j)] = if j == row { 1.0 } else { 0.0 };
            }
            f[row] = 0.0;
        }
        let res = f.amax();
        let du = jac.lu().solve(&(-f)).expect("Chebyshev Newton solve");
        u += if res > 1.0 { 0.5 } else { 1.0 } * du;
        if res < 1e-12 {
            break;
        }
    }
    let mid = n / 2;
    assert!(x[mid].abs() < 1e-14);
    u[mid]
}

#[test]
fn criterion_5_hastings_mcleod() {
    let hm = solve_hastings_mcleod(10.0, 16001).unwrap();
    let h = hm.y_grid[1] - hm.y_grid[0];
    let mut ode_res = 0.0f64;
    for i in 1..hm.u.len() - 1 {
        let r = (hm.u[i - 1] - 2.0 * hm.u[i] + hm.u[i + 1]) / (h * h)
            - hm.y_grid[i] * hm.u[i]
            - 2.0 * hm.u[i].powi(3);
        ode_res = ode_res.max(r.abs());
    }
    let (u8, _) = hm.eval_u(8.0);
    let airy_err = (u8 - airy_ai(8.0)).abs();
    let (u0_fd, _) = solve_hastings_mcleod(8.0, 32001).unwrap().eval_u(0.0);
    let u0_cheb = chebyshev_u0(8.0, 80);
    let origin_gap = (u0_fd - u0_cheb).abs();
    let ok = hm.converged && ode_res < 1e-8 && airy_err < 1e-6 && origin_gap < 1e-8;
    report(
        "criterion 5 Hastings-McLeod",
        ok,
        &format!(
            "ODE residual {ode_res:.2e}, Ai gap at y=8 {airy_err:.2e}, u(0) FD vs Chebyshev {origin_gap:.2e}"
        ),
    );
}

#[test]
fn criterion_6_error_function_model() {
    let s = c64(0.8, -0.45);
    // Jump relation m_+ = m_- v^W at 50 points on e^{i pi/6} R.
    let dir = c64((PI / 6.0).cos(), (PI / 6.0).sin());
    let mut jump_res = 0.0f64;
    for &yt in &[-0.5, 0.0, 1.7] {
        for n in 0..50 {
            let w = (-5.0 + 10.0 * (n as f64 + 0.5) / 50.0) * dir;
            let mp = eval_mw_boundary(yt, s, w, true).unwrap();
            let mm = eval_mw_boundary(yt, s, w, false).unwrap();
            let v = jump_vw(yt, s, w).unwrap();
            jump_res = jump_res.max((mp - mm * v).norm());
        }
    }
    // Leading coefficient by two-stage Richardson in 1/w^2.
    let dir = c64((2.0 * PI / 3.0).cos(), (2.0 * PI / 3.0).sin());
    let mut coeff_rel = 0.0f64;
    for &yt in &[-0.4, 0.0, 1.0] {
        let a: Vec<Complex64> = [25.0, 50.0, 100.0]
            .iter()
            .map(|&r| {
                let w = r * dir;
                w * eval_mw(yt, s, w).unwrap().value[(0, 1)]
            })
            .collect();
        let b1 = (4.0 * a[1] - a[0]) / 3.0;
        let b2 = (4.0 * a[2] - a[1]) / 3.0;
        let extrap = (16.0 * b2 - b1) / 15.0;
        let exact = coeff_m2j1(yt, s, 0).unwrap();
        coeff_rel = coeff_rel.max((extrap - exact).norm() / exact.norm());
    }
    let ok = jump_res < 1e-11 && coeff_rel < 1e-6;
    report(
        "criterion 6 error-function model",
        ok,
        &format!("jump residual {jump_res:.2e}, leading coefficient rel error {coeff_rel:.2e}"),
    );
}

#[test]
fn criterion_7_simulator_physics() {
    let undamped = |n: usize, l: f64, dt: f64| SimConfig {
        l,
        n,
        dt,
        damping: DampingConfig { enabled: false, ..Default::default() },
        ..Default::default()
    };

    // Dispersion: standing wave at tiny amplitude oscillates at omega(kappa).
    let l = 16.0 * PI;
    let n = 128;
    let x = sim_grid(l, n);
    let mut disp_rel = 0.0f64;
    for mode in [4i64, 8, 12] {
        let kappa = mode as f64 / 16.0;
        let u0: Vec<f64> = x.iter().map(|&xi| 1e-8 * (kappa * xi).cos()).collect();
        let mut sim = init_simulation(&u0, &vec![0.0; n], undamped(n, l, 0.005)).unwrap();
        let c0 = sim.mode(mode).re;
        for _ in 0..400 {
            sim.step().unwrap();
        }
        let omega_num = (sim.mode(mode).re / c0).clamp(-1.0, 1.0).acos() / 2.0;
        let omega = (kappa * kappa * (1.0 - kappa * kappa)).sqrt();
        disp_rel = disp_rel.max((omega_num - omega).abs() / omega);
    }

    // Mass drift with damping and nonlinearity active.
    let l = 30.0;
    let n = 512;
    let x = sim_grid(l, n);
    let u0: Vec<f64> = x.iter().map(|&xi| -0.3 * (-xi * xi).exp()).collect();
    let u1: Vec<f64> = x.iter().map(|&xi| 0.2 * xi * (-xi * xi).exp()).collect();
    let mut cfg = undamped(n, l, 0.01);
    cfg.damping.enabled = true;
    let mut sim = init_simulation(&u0, &u1, cfg).unwrap();
    let mass0 = sim.mode(0).re * 2.0 * l;
    for _ in 0..500 {
        sim.step().unwrap();
    }
    let mass_drift = ((sim.mode(0).re * 2.0 * l - mass0) / 5.0).abs();

    // RK4 self-convergence order on a kappa_max = 1 grid (no unstable band).
    let l = 32.0 * PI;
    let n = 64;
    let x = sim_grid(l, n);
    let u0: Vec<f64> = x
        .iter()
        .map(|&xi| 0.1 * (-(xi / 12.0).powi(2)).exp() * (0.5 * xi).cos())
        .collect();
    let run = |dt: f64| -> Vec<f64> {
        let mut sim = init_simulation(&u0, &vec![0.0; n], undamped(n, l, dt)).unwrap();
        for _ in 0..(1.0 / dt).round() as usize {
            sim.step().unwrap();
        }
        sim.u()
    };
    let reference = run(0.003125);
    let err = |dt: f64| -> f64 {
        run(dt).iter().zip(&reference).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
    };
    let rk4_order = (err(0.05) / err(0.025)).log2();

    // Unstable-mode growth rate sqrt(kappa^4 - kappa^2), damping disabled.
    let l = 16.0 * PI;
    let n = 64;
    let x = sim_grid(l, n);
    let kappa = 1.5;
    let u0: Vec<f64> = x.iter().map(|&xi| 1e-8 * (kappa * xi).cos()).collect();
    let mut sim = init_simulation(&u0, &vec![0.0; n], undamped(n, l, 0.002)).unwrap();
    let sigma = (kappa.powi(4) - kappa * kappa).sqrt();
    for _ in 0..1500 {
        sim.step().unwrap();
    }
    let a0 = sim.mode(24).norm();
    for _ in 0..500 {
        sim.step().unwrap();
    }
    let rate = (sim.mode(24).norm() / a0).ln() / (500.0 * 0.002);
    let growth_rel = (rate - sigma).abs() / sigma;

    let ok = disp_rel < 1e-3 && mass_drift < 1e-10 && rk4_order >= 3.9 && growth_rel < 1e-3;
    report(
        "criterion 7 simulator physics",
        ok,
        &format!(
            "dispersion {disp_rel:.2e}, mass drift {mass_drift:.2e}/unit time, RK4 order {rk4_order:.3}, growth rate {growth_rel:.2e}"
        ),
    );
}

#[test]
fn criterion_8_long_time_profile() {
    let start = Instant::now();

    // Scattering data of u0 = -0.05 exp(-0.02 x^2), u1 = 0.
    let n_sc = 2001;
    let xmax = 40.0;
    let xs: Vec<f64> = (0..n_sc).map(|i| -xmax + 2.0 * xmax * i as f64 / (n_sc - 1) as f64).collect();
    let u0_of = |x: f64| -0.05 * (-0.02 * x * x).exp();
    let u0: Vec<f64> = xs.iter().map(|&x| u0_of(x)).collect();
    let data = InitialData::new(xs, u0, vec![0.0; n_sc], 1e-13).unwrap();
    let table = reflection_coefficients(&data, &SamplingPlan::default(), &VolterraConfig::default()).unwrap();
    let interp = CircleInterp::new(&table).unwrap();
    let hm = solve_hastings_mcleod(10.0, 16001).unwrap();
    let acfg = AsymptoticConfig::default();

    // Simulation at the figure resolution.
    let times = [200.0, 500.0, 750.0];
    let cfg = SimConfig {
        l: 2400.0,
        n: 16384,
        dt: 0.05,
        t_end: 750.0,
        snapshot_times: times.to_vec(),
        // Near-cutoff radiation (group speed diverges at kappa = 1) reaches
        // the boundary at ~1e-6 amplitude early in the run; the sector I gap
        // bound below is the real guard against wrap-around contamination.
        edge_guard: 1e-4,
        ..Default::default()
    };
    let grid = sim_grid(cfg.l, cfg.n);
    let u0_sim: Vec<f64> = grid.iter().map(|&x| u0_of(x)).collect();
    let mut sim = init_simulation(&u0_sim, &vec![0.0; cfg.n], cfg).unwrap();
    let snaps = sim.run().unwrap();
    assert_eq!(snaps.len(), times.len());

    // Windowed sup-norm gaps between simulation and asymptotics.
    let gap = |snap: &boussinesq_ist::sim::FieldSnapshot, x_lo: f64, x_hi: f64| -> f64 {
        let mut g = 0.0f64;
        let mut count = 0usize;
        for (&x, &u) in snap.x.iter().zip(&snap.u) {
            if x >= x_lo && x <= x_hi {
                let term = u_asymptotic(&interp, &hm, x, snap.t, &acfg).unwrap();
                g = g.max((u - term.value).abs());
                count += 1;
            }
        }
        assert!(count > 20, "window [{x_lo}, {x_hi}] too sparse");
        g
    };

    let mut iv_scaled = Vec::new();
    let mut i_gaps = Vec::new();
    let mut iii_scaled = Vec::new();
    for snap in &snaps {
        let t = snap.t;
        iv_scaled.push(gap(snap, 0.65 * t, 0.95 * t) * t.sqrt());
        i_gaps.push(gap(snap, 2.0 * t, (3.0 * t).min(2350.0)));
        let hw = 2.0 * t.cbrt();
        iii_scaled.push(gap(snap, t - hw, t + hw) * t.powf(2.0 / 3.0));
    }

    let iv_decreasing = iv_scaled.windows(2).all(|w| w[1] < w[0]);
    let i_small = i_gaps.iter().all(|&g| g < 1e-6);
    let iii_lo = iii_scaled.iter().cloned().fold(f64::INFINITY, f64::min);
    let iii_hi = iii_scaled.iter().cloned().fold(0.0f64, f64::max);
    let iii_bounded = iii_hi / iii_lo < 3.0;
    let elapsed = start.elapsed().as_secs_f64();

    let ok = iv_decreasing && i_small && iii_bounded && elapsed < 1800.0;
    report(
        "criterion 8 long-time profile",
        ok,
        &format!(
            "IV gap*sqrt(t) {:.3e} -> {:.3e} -> {:.3e} (decreasing: {iv_decreasing}), I gap max {:.2e}, III gap*t^(2/3) spread {:.2} (< 3), {elapsed:.0} s",
            iv_scaled[0],
            iv_scaled[1],
            iv_scaled[2],
            i_gaps.iter().cloned().fold(0.0f64, f64::max),
            iii_hi / iii_lo
        ),
    );
}

#[test]
fn criterion_9_blowup_estimator() {
    let make_ray = |f: &dyn Fn(f64) -> f64| -> Vec<RaySample> {
        (1..=95)
            .map(|j| {
                let tau = j as f64 * 0.01;
                RaySample { tau, r1: c64(f(tau), 0.0), converged: true }
            })
            .collect()
    };
    let t_planted = 0.37;
    let est = estimate_blowup_t(
        &make_ray(&|tau| 0.8 * (-t_planted / (4.0 * tau * tau)).exp()),
        DEFAULT_BLOWUP_WINDOW,
    )
    .unwrap();
    let planted_err = (est.t_est - t_planted).abs();
    let est_zero = estimate_blowup_t(&make_ray(&|_| 0.0), DEFAULT_BLOWUP_WINDOW).unwrap();
    let est_poly = estimate_blowup_t(&make_ray(&|tau| tau.powi(5)), DEFAULT_BLOWUP_WINDOW).unwrap();
    let ok = planted_err < 1e-6 && est_zero.t_est.is_infinite() && est_poly.t_est == 0.0;
    report(
        "criterion 9 blow-up estimator",
        ok,
        &format!(
            "planted T error {planted_err:.2e}, zero ray -> {}, polynomial decay -> {}",
            est_zero.t_est, est_poly.t_est
        ),
    );
}
