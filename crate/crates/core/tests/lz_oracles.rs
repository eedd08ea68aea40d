use aia_core::lz::{
    adiabatic_state, aia_distance_for_dtau, coupling_matrix_element, evolve_schrodinger, lz_eigensystem,
    optimize_dtau, state_distance, switching_times, LzParams, Regime, Scenario, StateVector,
};
use aia_core::numkit::{Tolerances, C64};

fn params(t_f: f64) -> LzParams {
    LzParams::new(0.1, -1.0, 1.0, t_f).unwrap()
}

/// Fixed-step RK4 in the σᶻ basis with one Richardson extrapolation.
fn rk4_reference(p: &LzParams) -> StateVector {
    let run = |n: usize| {
        let dt = p.t_f / n as f64;
        let f = |t: f64, v: [C64; 2]| {
            let (x, z) = (p.x, p.z_at(t));
            let mi = C64::new(0.0, -1.0);
            [mi * (z * v[0] + x * v[1]), mi * (x * v[0] - z * v[1])]
        };
        let g = lz_eigensystem(p.x, p.z_i).unwrap().psi1;
        let mut v = [C64::new(g[0], 0.0), C64::new(g[1], 0.0)];
        let step = |v: [C64; 2], k: [C64; 2], s: f64| [v[0] + k[0] * s, v[1] + k[1] * s];
        for i in 0..n {
            let t = i as f64 * dt;
            let k1 = f(t, v);
            let k2 = f(t + 0.5 * dt, step(v, k1, 0.5 * dt));
            let k3 = f(t + 0.5 * dt, step(v, k2, 0.5 * dt));
            let k4 = f(t + dt, step(v, k3, dt));
            v = [0, 1].map(|j| v[j] + (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]) * (dt / 6.0));
        }
        v
    };
    let n = (200.0 * p.t_f).ceil() as usize;
    let (a, b) = (run(n), run(2 * n));
    StateVector::new((b[0] * 16.0 - a[0]) / 15.0, (b[1] * 16.0 - a[1]) / 15.0)
}

#[test]
fn schrodinger_matches_richardson_rk4() {
    for t_f in [1.0, 20.0, 150.0] {
        let p = params(t_f);
        let got = evolve_schrodinger(&p, Tolerances::new(1e-12, 1e-14)).unwrap();
        let want = rk4_reference(&p);
        let diff = (got.0[0] - want.0[0]).norm() + (got.0[1] - want.0[1]).norm();
        assert!(diff < 1e-9, "t_f = {t_f}: {diff:e}");
    }
}

#[test]
fn real_gauge_has_no_berry_connection() {
    let (x, h) = (0.1, 1e-5);
    for z in [-1.0, -0.3, -0.05, 0.0, 0.02, 0.4, 1.0] {
        let (lo, mid, hi) = (lz_eigensystem(x, z - h).unwrap(), lz_eigensystem(x, z).unwrap(), lz_eigensystem(x, z + h).unwrap());
        let d1 = [(hi.psi1[0] - lo.psi1[0]) / (2.0 * h), (hi.psi1[1] - lo.psi1[1]) / (2.0 * h)];
        // ⟨ψ₁|∂ψ₁⟩ = 0 and ⟨ψ₂|∂_zψ₁⟩ = ⟨ψ₂|σᶻ|ψ₁⟩ / (E₁ − E₂)
        let berry = mid.psi1[0] * d1[0] + mid.psi1[1] * d1[1];
        let mixing = mid.psi2[0] * d1[0] + mid.psi2[1] * d1[1];
        let hf = (mid.psi2[0] * mid.psi1[0] - mid.psi2[1] * mid.psi1[1]) / (mid.e1 - mid.e2);
        assert!(berry.abs() < 1e-8, "z = {z}: {berry:e}");
        assert!((mixing - hf).abs() < 1e-6 * hf.abs().max(1.0), "z = {z}: {mixing} vs {hf}");
        // gauge is continuous: neighbouring ground states overlap positively
        assert!(lo.psi1[0] * hi.psi1[0] + lo.psi1[1] * hi.psi1[1] > 0.0);
    }
}

/// Checks the condition defining each scenario at both switching times.
#[test]
fn switching_times_solve_their_defining_conditions() {
    for t_f in [3.0, 7.0, 20.0, 40.0, 90.0, 400.0, 5000.0] {
        let p = params(t_f);
        let zdot = p.rate();
        let b = |t: f64| p.x.hypot(p.z_at(t));
        for sc in Scenario::ALL {
            let st = switching_times(&p, sc);
            if st.regime != Regime::Interior {
                continue;
            }
            for tau in [st.tau_minus, st.tau_plus] {
                let gap = 2.0 * b(tau);
                let (lhs, rhs) = match sc {
                    Scenario::KibbleZurek => (1.0 / gap, p.z_at(tau).abs() / zdot),
                    Scenario::ModifiedKibbleZurek => (1.0 / gap, b(tau) / zdot),
                    Scenario::GapTime => (1.0 / gap, t_f),
                    Scenario::AdiabaticCondition => (coupling_matrix_element(&p, tau).unwrap().abs(), gap * gap),
                };
                assert!((lhs - rhs).abs() < 1e-9 * rhs.abs().max(1.0), "{sc:?} t_f = {t_f}: {lhs} vs {rhs}");
            }
        }
    }
}

#[test]
fn kibble_zurek_interval_approaches_inverse_coupling() {
    let st = switching_times(&params(1e6), Scenario::KibbleZurek);
    assert!((st.dtau() - 10.0).abs() < 1e-4);
}

#[test]
fn optimizer_beats_brute_force_grid() {
    let tol = Tolerances::new(1e-11, 1e-13);
    for t_f in [10.0, 100.0, 2000.0] {
        let p = params(t_f);
        let exact = evolve_schrodinger(&p, tol).unwrap();
        let opt = optimize_dtau(&p, tol).unwrap();
        // coarse grid over the whole range plus a fine one near zero
        let coarse = (0..=20_000).map(|i| -t_f + 2.0 * t_f * i as f64 / 20_000.0);
        let fine = (0..=20_000).map(|i| -0.5 + i as f64 / 20_000.0);
        let best = coarse
            .chain(fine)
            .map(|d| aia_distance_for_dtau(&p, &exact, d).unwrap())
            .fold(f64::INFINITY, f64::min);
        assert!(opt.distance <= best + 1e-12, "t_f = {t_f}: {} vs grid {best}", opt.distance);
        let at_opt = aia_distance_for_dtau(&p, &exact, opt.dtau).unwrap();
        assert!((at_opt - opt.distance).abs() < 1e-15);
    }
}

#[test]
fn zero_interval_reproduces_adiabatic_state() {
    for t_f in [0.5, 30.0, 3000.0] {
        let p = params(t_f);
        let exact = evolve_schrodinger(&p, Tolerances::default()).unwrap();
        let adi = state_distance(&exact, &adiabatic_state(&p).unwrap());
        assert!((aia_distance_for_dtau(&p, &exact, 0.0).unwrap() - adi).abs() < 1e-13);
    }
}
