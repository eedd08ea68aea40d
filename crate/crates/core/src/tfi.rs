//! Transverse-field Ising chain in the even-parity sector, reduced to
//! independent two-level systems, one per positive pseudo-momentum.
//!
//! Each mode lives in the pair basis `{|0ₖ0₋ₖ⟩, |1ₖ1₋ₖ⟩}` and evolves under
//! `−2[(h − cos k) σᶻ + sin k σʸ]`, whose spectrum is `∓εₖ`. Many-body
//! fidelities are products of per-mode fidelities.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{ModelError, Result};
use crate::lz::{state_distance, Regime, StateVector, SwitchingTimes};
use crate::numkit::{
    complete_elliptic_e, find_root_bracketed, integrate, integrate_ode, minimize_scalar_with,
    ComplexMatrix, Tolerances,
};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Field sweep `h(t) = h_i + (h_f − h_i) t / t_f` across the critical point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TfiParams {
    pub l: usize,
    pub h_i: f64,
    pub h_f: f64,
    pub t_f: f64,
}

impl TfiParams {
    pub fn new(l: usize, h_i: f64, h_f: f64, t_f: f64) -> Result<Self> {
        if l == 0 || !l.is_multiple_of(2) {
            return Err(ModelError::InvalidParams(format!("chain length must be even and positive, got {l}")));
        }
        if !((0.0..1.0).contains(&h_i) && h_f > 1.0 && h_f.is_finite()) {
            return Err(ModelError::InvalidParams(format!(
                "field must cross h = 1 with 0 <= h_i < 1 < h_f, got h_i = {h_i}, h_f = {h_f}"
            )));
        }
        if !(t_f > 0.0 && t_f.is_finite()) {
            return Err(ModelError::InvalidParams(format!("t_f must be positive, got {t_f}")));
        }
        Ok(Self { l, h_i, h_f, t_f })
    }

    pub fn with_tf(&self, t_f: f64) -> Result<Self> {
        Self::new(self.l, self.h_i, self.h_f, t_f)
    }

    /// `δh = h_f − h_i`
    pub fn dh(&self) -> f64 {
        self.h_f - self.h_i
    }

    pub fn h_at(&self, t: f64) -> f64 {
        self.h_i + self.dh() * t / self.t_f
    }

    pub fn time_at(&self, h: f64) -> f64 {
        (h - self.h_i) * self.t_f / self.dh()
    }

    pub fn rate(&self) -> f64 {
        self.dh() / self.t_f
    }
}

/// Bogoliubov data of a single mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TfiModeData {
    pub k: f64,
    pub theta: f64,
    pub energy: f64,
}

impl TfiModeData {
    pub fn new(h: f64, k: f64) -> Self {
        Self { k, theta: bogoliubov_angle(h, k), energy: excitation_energy(h, k) }
    }

    /// `(cos θ/2, i sin θ/2)`
    pub fn ground(&self) -> StateVector {
        let (s, c) = (0.5 * self.theta).sin_cos();
        StateVector::new(C64::new(c, 0.0), C64::new(0.0, s))
    }

    /// `(i sin θ/2, cos θ/2)`, orthogonal to the ground vector.
    pub fn excited(&self) -> StateVector {
        let (s, c) = (0.5 * self.theta).sin_cos();
        StateVector::new(C64::new(0.0, s), C64::new(c, 0.0))
    }
}

/// `εₖ = 2√((h − cos k)² + sin² k)`
pub fn excitation_energy(h: f64, k: f64) -> f64 {
    2.0 * (h - k.cos()).hypot(k.sin())
}

/// `θₖ = atan2(sin k, h − cos k)`, continuous through `h = cos k`.
pub fn bogoliubov_angle(h: f64, k: f64) -> f64 {
    k.sin().atan2(h - k.cos())
}

/// Positive pseudo-momenta `(2j − 1)π/L`, `j = 1..L/2`.
pub fn momenta(l: usize) -> Vec<f64> {
    (1..=l / 2).map(|j| (2 * j - 1) as f64 * PI / l as f64).collect()
}

/// Pair-basis mode Hamiltonian `−2[(h − cos k) σᶻ + sin k σʸ]`.
pub fn mode_hamiltonian(h: f64, k: f64) -> ComplexMatrix {
    let a = h - k.cos();
    let s = k.sin();
    ComplexMatrix::new2([
        [C64::new(-2.0 * a, 0.0), C64::new(0.0, 2.0 * s)],
        [C64::new(0.0, -2.0 * s), C64::new(2.0 * a, 0.0)],
    ])
}

/// Product state over the positive momenta.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeRegister {
    pub modes: Vec<(f64, StateVector)>,
}

impl ModeRegister {
    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn momenta(&self) -> impl Iterator<Item = f64> + '_ {
        self.modes.iter().map(|(k, _)| *k)
    }
}

/// Ground state at field `h`.
pub fn ground_register(l: usize, h: f64) -> ModeRegister {
    ModeRegister {
        modes: momenta(l).into_iter().map(|k| (k, TfiModeData::new(h, k).ground())).collect(),
    }
}

/// `Σₖ ⟨ψₖ|Hₖ|ψₖ⟩` in the pair basis.
pub fn register_energy(reg: &ModeRegister, h: f64) -> f64 {
    reg.modes
        .iter()
        .map(|(k, psi)| {
            let hv = mode_hamiltonian(h, *k).mul_vec(&psi.0);
            (psi.0[0].conj() * hv[0] + psi.0[1].conj() * hv[1]).re
        })
        .sum()
}

/// Thermodynamic ground-state energy `−(L/2π) ∫₀^π εₖ dk`.
pub fn gs_energy_thermo(h: f64, l: usize) -> Result<f64> {
    if !(h >= 0.0) {
        return Err(ModelError::InvalidParams(format!("field must be non-negative, got {h}")));
    }
    // Integrand has a kink at k = 0 when h = 1 only; it is smooth inside.
    let integral = integrate(|k| excitation_energy(h, k), 0.0, PI, 1e-13)?;
    Ok(-(l as f64) / (2.0 * PI) * integral)
}

/// The printed closed form `−(L/2π) 2(1+h) E[4h/(1+h)²]`, kept for comparison.
pub fn gs_energy_elliptic_printed(h: f64, l: usize) -> Result<f64> {
    let m = 4.0 * h / (1.0 + h).powi(2);
    Ok(-(l as f64) / (2.0 * PI) * 2.0 * (1.0 + h) * complete_elliptic_e(m.min(1.0))?)
}

/// Gap convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GapKind {
    /// Minimum of `εₖ` over the allowed momenta of a chain of length `L`.
    FiniteChain,
    /// `k → 0` limit `2|h − 1|`.
    Thermodynamic,
}

pub fn tfi_gap(h: f64, l: usize, kind: GapKind) -> f64 {
    match kind {
        GapKind::FiniteChain => momenta(l)
            .into_iter()
            .map(|k| excitation_energy(h, k))
            .fold(f64::INFINITY, f64::min),
        GapKind::Thermodynamic => 2.0 * (h - 1.0).abs(),
    }
}

fn evolve_mode(p: &TfiParams, k: f64, tol: Tolerances) -> Result<StateVector> {
    let psi0 = TfiModeData::new(p.h_i, k).ground();
    let (s, c) = k.sin_cos();
    let rhs = |t: f64, y: &[C64], d: &mut [C64]| {
        let a = p.h_at(t) - c;
        // i ψ' = H ψ with H = [[-2a, 2is], [-2is, 2a]]
        let h0 = y[0] * (-2.0 * a) + y[1] * C64::new(0.0, 2.0 * s);
        let h1 = y[0] * C64::new(0.0, -2.0 * s) + y[1] * (2.0 * a);
        d[0] = -I * h0;
        d[1] = -I * h1;
    };
    let y = integrate_ode(rhs, &psi0.0, 0.0, p.t_f, tol)?;
    Ok(StateVector::new(y[0], y[1]))
}

/// Exact evolution of every mode from the `h_i` ground state; modes run in
/// parallel and are returned in ascending momentum order.
pub fn evolve_register(p: &TfiParams, tol: Tolerances) -> Result<ModeRegister> {
    let modes = momenta(p.l)
        .into_par_iter()
        .map(|k| evolve_mode(p, k, tol).map(|s| (k, s)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ModeRegister { modes })
}

/// `∫ εₖ(h(t)) dt` over `[t_a, t_b]` by adaptive quadrature.
pub fn mode_phase_integral(p: &TfiParams, k: f64, t_a: f64, t_b: f64) -> Result<f64> {
    if t_a == t_b {
        return Ok(0.0);
    }
    // Work in h to keep the integrand O(1); dt = dh / ḣ.
    let (ha, hb) = (p.h_at(t_a), p.h_at(t_b));
    let v = integrate(|h| excitation_energy(h, k), ha, hb, 1e-14)?;
    Ok(v / p.rate())
}

/// Per-mode precomputation shared by every AIA evaluation at one `t_f`.
#[derive(Debug, Clone)]
struct ModeTransport {
    k: f64,
    /// `∫₀^{t_f} εₖ dt`
    total_phase: f64,
    fin: TfiModeData,
}

fn mode_transports(p: &TfiParams) -> Result<Vec<ModeTransport>> {
    momenta(p.l)
        .into_iter()
        .map(|k| {
            Ok(ModeTransport {
                k,
                total_phase: mode_phase_integral(p, k, 0.0, p.t_f)?,
                fin: TfiModeData::new(p.h_f, k),
            })
        })
        .collect()
}

/// Adiabatic register: each mode in its `h_f` ground state with phase
/// `e^{+i∫εₖ dt}` (ground energy `−εₖ`, zero Berry connection).
pub fn adiabatic_register(p: &TfiParams) -> Result<ModeRegister> {
    let modes = mode_transports(p)?
        .into_iter()
        .map(|m| (m.k, m.fin.ground().scale(C64::from_polar(1.0, m.total_phase))))
        .collect();
    Ok(ModeRegister { modes })
}

fn aia_mode(p: &TfiParams, m: &ModeTransport, st: &SwitchingTimes) -> Result<StateVector> {
    let (tm, tp) = (st.tau_minus, st.tau_plus);
    let start = TfiModeData::new(p.h_at(tm), m.k).ground();
    let jump = TfiModeData::new(p.h_at(tp), m.k);
    // ∫₀^{τ₋} and ∫_{τ₊}^{t_f} of εₖ
    let before = mode_phase_integral(p, m.k, 0.0, tm)?;
    let after = mode_phase_integral(p, m.k, tp, p.t_f)?;
    let pre = C64::from_polar(1.0, before);
    let c1 = jump.ground().inner(&start) * pre * C64::from_polar(1.0, after);
    let c2 = jump.excited().inner(&start) * pre * C64::from_polar(1.0, -after);
    Ok(m.fin.ground().scale(c1).add(&m.fin.excited().scale(c2)))
}

/// Adiabatic-impulse register for the given switching times.
pub fn aia_register(p: &TfiParams, st: &SwitchingTimes) -> Result<ModeRegister> {
    let transports = mode_transports(p)?;
    let modes = transports
        .iter()
        .map(|m| aia_mode(p, m, st).map(|s| (m.k, s)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ModeRegister { modes })
}

/// `√(1 − Πₖ |⟨ψₖ|φₖ⟩|²)` for registers over the same momenta.
pub fn register_distance(a: &ModeRegister, b: &ModeRegister) -> Result<f64> {
    if a.len() != b.len() || a.momenta().zip(b.momenta()).any(|(x, y)| x != y) {
        return Err(ModelError::InvalidParams("registers have different momenta".into()));
    }
    Ok(distance_from_mode_distances(
        a.modes.iter().zip(&b.modes).map(|((_, x), (_, y))| state_distance(x, y)),
    ))
}

/// Combines per-mode distances `dₖ` into `√(1 − Π(1 − dₖ²))` without
/// losing the small-distance tail.
pub(crate) fn distance_from_mode_distances(ds: impl Iterator<Item = f64>) -> f64 {
    let log_fid: f64 = ds.map(|d| (-d * d).ln_1p()).sum();
    (-log_fid.exp_m1()).clamp(0.0, 1.0).sqrt()
}

/// Switching-time rules for the chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TfiScenario {
    /// `1/Δ = |λ/∂ₜλ|` with `λ = h − 1`, `Δ = 2|h − 1|`.
    KibbleZurek = 1,
    /// `1/|h − 1| = (h + 1) E[4h/(h+1)²] / (π ∂ₜh)`.
    ModifiedKibbleZurek = 2,
}

/// Switching times for the two chain scenarios.
pub fn switching_times_tfi(p: &TfiParams, scenario: TfiScenario) -> Result<SwitchingTimes> {
    let t_f = p.t_f;
    let dh = p.dh();
    match scenario {
        TfiScenario::KibbleZurek => {
            if t_f < 0.5 * dh / (p.h_f - 1.0).powi(2) {
                return Ok(SwitchingTimes::new(0.0, t_f, Regime::WholeIntervalImpulse));
            }
            let center = -(p.h_i - 1.0) / dh * t_f;
            let half = t_f.sqrt() / (2f64.sqrt() * dh.sqrt());
            Ok(SwitchingTimes::new(center - half, center + half, Regime::Interior).clamped(t_f))
        }
        TfiScenario::ModifiedKibbleZurek => {
            let rate = p.rate();
            // g(h) = π ∂ₜh − |h − 1| (h + 1) E[4h/(h+1)²]; positive at h = 1.
            let g = |h: f64| {
                let m = (4.0 * h / (h + 1.0).powi(2)).min(1.0);
                let e = complete_elliptic_e(m).unwrap_or(f64::NAN);
                PI * rate - (h - 1.0).abs() * (h + 1.0) * e
            };
            let tol = 1e-14;
            let h_minus = if g(p.h_i) >= 0.0 { p.h_i } else { find_root_bracketed(g, p.h_i, 1.0, tol)? };
            let h_plus = if g(p.h_f) >= 0.0 { p.h_f } else { find_root_bracketed(g, 1.0, p.h_f, tol)? };
            let regime = if h_minus == p.h_i && h_plus == p.h_f {
                Regime::WholeIntervalImpulse
            } else {
                Regime::Interior
            };
            Ok(SwitchingTimes::new(p.time_at(h_minus), p.time_at(h_plus), regime).clamped(t_f))
        }
    }
}

/// Minimizes the register distance over centred impulse intervals
/// `Δτ ∈ [−t_f, t_f]`.
pub fn optimize_dtau_tfi(p: &TfiParams, tol: Tolerances) -> Result<crate::lz::DtauOptimum> {
    let exact = evolve_register(p, tol)?;
    optimize_dtau_tfi_against(p, &exact)
}

/// Scan size for the chain optimizer; each point costs one quadrature per mode.
pub const TFI_DTAU_SCAN_POINTS: usize = 1201;

pub fn optimize_dtau_tfi_against(p: &TfiParams, exact: &ModeRegister) -> Result<crate::lz::DtauOptimum> {
    let transports = mode_transports(p)?;
    let f = |dtau: f64| {
        aia_distance_with(p, &transports, exact, &SwitchingTimes::centered(p.t_f, dtau))
            .unwrap_or(f64::INFINITY)
    };
    let m = minimize_scalar_with(f, -p.t_f, p.t_f, 1e-9 * p.t_f, TFI_DTAU_SCAN_POINTS);
    Ok(crate::lz::DtauOptimum { dtau: m.x, distance: m.value })
}

fn aia_distance_with(
    p: &TfiParams,
    transports: &[ModeTransport],
    exact: &ModeRegister,
    st: &SwitchingTimes,
) -> Result<f64> {
    let mut ds = Vec::with_capacity(transports.len());
    for (m, (_, ex)) in transports.iter().zip(&exact.modes) {
        ds.push(state_distance(ex, &aia_mode(p, m, st)?));
    }
    Ok(distance_from_mode_distances(ds.into_iter()))
}

/// Register distance of the AIA state with centred interval `dtau`.
pub fn aia_distance_for_dtau(p: &TfiParams, exact: &ModeRegister, dtau: f64) -> Result<f64> {
    let transports = mode_transports(p)?;
    aia_distance_with(p, &transports, exact, &SwitchingTimes::centered(p.t_f, dtau))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    #[test]
    fn momenta_examples() {
        let m = momenta(4);
        assert_eq!(m.len(), 2);
        assert!((m[0] - FRAC_PI_4).abs() < 1e-15 && (m[1] - 3.0 * FRAC_PI_4).abs() < 1e-15);
        assert_eq!(momenta(2), vec![FRAC_PI_2]);
        let m = momenta(150);
        assert_eq!(m.len(), 75);
        assert!((m[74] - 149.0 * PI / 150.0).abs() < 1e-14);
    }

    #[test]
    fn params_validation() {
        assert!(TfiParams::new(3, 0.5, 1.5, 1.0).is_err());
        assert!(TfiParams::new(4, 1.2, 1.5, 1.0).is_err());
        assert!(TfiParams::new(4, 0.5, 0.9, 1.0).is_err());
        assert!(TfiParams::new(4, 0.5, 1.5, -1.0).is_err());
    }

    #[test]
    fn mode_hamiltonian_at_critical_zone_boundary() {
        let m = mode_hamiltonian(1.0, PI);
        assert!((m[(0, 0)].re + 4.0).abs() < 1e-15);
        assert!((m[(1, 1)].re - 4.0).abs() < 1e-15);
        assert!(m[(0, 1)].norm() < 1e-15);
        assert!((excitation_energy(1.0, PI) - 4.0).abs() < 1e-15);
    }

    #[test]
    fn zero_field_spectrum_is_flat() {
        for k in momenta(10) {
            assert!((excitation_energy(0.0, k) - 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn ground_vector_at_zero_field() {
        let d = TfiModeData::new(0.0, FRAC_PI_2);
        assert!((d.theta - FRAC_PI_2).abs() < 1e-15);
        let g = d.ground();
        assert!((g.0[0].re - FRAC_PI_4.cos()).abs() < 1e-15);
        assert!((g.0[1].im - FRAC_PI_4.sin()).abs() < 1e-15);
    }

    #[test]
    fn strong_field_register_is_empty_pairs() {
        let r = ground_register(8, 1e9);
        for (_, s) in &r.modes {
            assert!((s.0[0].re - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn ground_energy_matches_spectrum_sum() {
        for h in [0.0, 0.3, 1.0, 1.7] {
            let r = ground_register(20, h);
            let direct: f64 = momenta(20).iter().map(|&k| excitation_energy(h, k)).sum();
            assert!((register_energy(&r, h) + direct).abs() < 1e-12);
        }
    }

    #[test]
    fn thermodynamic_energy_limits() {
        assert!((gs_energy_thermo(0.0, 10).unwrap() + 10.0).abs() < 1e-12);
        let h = 1e4;
        let e = gs_energy_thermo(h, 10).unwrap();
        assert!((e / (-10.0 * h) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn printed_elliptic_form_is_half_the_integral() {
        for h in [0.0, 0.4, 1.0, 2.5] {
            let a = gs_energy_thermo(h, 12).unwrap();
            let b = gs_energy_elliptic_printed(h, 12).unwrap();
            assert!((a - 2.0 * b).abs() < 1e-10, "h = {h}: {a} vs {b}");
        }
    }

    #[test]
    fn gaps() {
        assert!((tfi_gap(1.5, 150, GapKind::Thermodynamic) - 1.0).abs() < 1e-15);
        let g = tfi_gap(1.0, 150, GapKind::FiniteChain);
        assert!((g - excitation_energy(1.0, PI / 150.0)).abs() < 1e-15);
        assert!((g - 0.0419).abs() < 1e-4);
    }

    #[test]
    fn register_distance_examples() {
        let a = ground_register(4, 0.3);
        assert_eq!(register_distance(&a, &a).unwrap(), 0.0);

        let up = StateVector::from_real([1.0, 0.0]);
        let down = StateVector::from_real([0.0, 1.0]);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = StateVector::from_real([s, s]);
        let ks = momenta(4);
        let r1 = ModeRegister { modes: vec![(ks[0], up), (ks[1], up)] };
        let r2 = ModeRegister { modes: vec![(ks[0], up), (ks[1], down)] };
        assert_eq!(register_distance(&r1, &r2).unwrap(), 1.0);
        let r3 = ModeRegister { modes: vec![(ks[0], plus), (ks[1], plus)] };
        assert!((register_distance(&r1, &r3).unwrap() - 0.75f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn mismatched_registers_rejected() {
        assert!(register_distance(&ground_register(4, 0.3), &ground_register(6, 0.3)).is_err());
    }

    #[test]
    fn kz_switching_closed_form() {
        let p = TfiParams::new(150, 0.5, 1.5, 100.0).unwrap();
        let st = switching_times_tfi(&p, TfiScenario::KibbleZurek).unwrap();
        assert!((st.dtau() - 2f64.sqrt() * 10.0).abs() < 1e-12);
        let p = TfiParams::new(150, 0.5, 1.5, 1.0).unwrap();
        let st = switching_times_tfi(&p, TfiScenario::KibbleZurek).unwrap();
        assert_eq!(st.regime, Regime::WholeIntervalImpulse);
        assert_eq!(st.dtau(), 1.0);
    }
}
