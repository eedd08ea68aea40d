//! Driven Landau-Zener qubit `H = x σˣ + z(t) σᶻ` with a linear detuning
//! sweep `z(t) = z_i + (z_f − z_i) t / t_f`.
//!
//! Exact evolution is obtained by integrating the Schrödinger equation in
//! the fixed σᶻ basis. The adiabatic, first-order corrected and
//! adiabatic-impulse states are built from the instantaneous eigenvectors
//! in a real gauge, in which both Berry connections vanish identically.

use std::fmt;

use num_complex::Complex64 as C64;

use crate::error::{ModelError, Result};
use crate::numkit::{integrate, integrate_ode, minimize_scalar_with, Tolerances};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Normalized two-level state in a fixed basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateVector(pub [C64; 2]);

impl StateVector {
    pub fn new(c1: C64, c2: C64) -> Self {
        Self([c1, c2])
    }

    pub fn from_real(v: [f64; 2]) -> Self {
        Self([C64::new(v[0], 0.0), C64::new(v[1], 0.0)])
    }

    pub fn norm(&self) -> f64 {
        (self.0[0].norm_sqr() + self.0[1].norm_sqr()).sqrt()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        Self([self.0[0] / n, self.0[1] / n])
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.0[0].conj() * other.0[0] + self.0[1].conj() * other.0[1]
    }

    pub fn scale(&self, s: C64) -> Self {
        Self([self.0[0] * s, self.0[1] * s])
    }

    pub fn add(&self, other: &StateVector) -> Self {
        Self([self.0[0] + other.0[0], self.0[1] + other.0[1]])
    }
}

/// Fidelity distance `√(1 − |⟨ψ|φ⟩|²)`, clamped to `[0, 1]`.
///
/// Evaluated as `|ψ₁φ₂ − ψ₂φ₁| / (‖ψ‖‖φ‖)`, which equals the fidelity form
/// (Lagrange identity) but keeps full relative accuracy for nearly equal
/// states and is insensitive to small normalization drift.
pub fn state_distance(psi: &StateVector, phi: &StateVector) -> f64 {
    let cross = psi.0[0] * phi.0[1] - psi.0[1] * phi.0[0];
    (cross.norm() / (psi.norm() * phi.norm())).clamp(0.0, 1.0)
}

/// Which branch of a piecewise switching-time formula produced the times.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// Whole evolution treated as impulse: `(0, t_f)`.
    WholeIntervalImpulse,
    /// Interior solution of the switching condition.
    Interior,
    /// Impulse window shrunk to a point.
    Collapsed,
    /// Optimizer output with `τ₊ < τ₋` (region crossed twice).
    Reversed,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Regime::WholeIntervalImpulse => "whole-interval-impulse",
            Regime::Interior => "interior",
            Regime::Collapsed => "collapsed",
            Regime::Reversed => "reversed",
        };
        f.write_str(s)
    }
}

/// Adiabatic-to-impulse and impulse-to-adiabatic switching instants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwitchingTimes {
    pub tau_minus: f64,
    pub tau_plus: f64,
    pub regime: Regime,
}

impl SwitchingTimes {
    pub fn new(tau_minus: f64, tau_plus: f64, regime: Regime) -> Self {
        Self { tau_minus, tau_plus, regime }
    }

    /// Times centred on `t_f / 2` with impulse interval `dtau` (may be negative).
    pub fn centered(t_f: f64, dtau: f64) -> Self {
        let regime = if dtau < 0.0 {
            Regime::Reversed
        } else if dtau == 0.0 {
            Regime::Collapsed
        } else {
            Regime::Interior
        };
        Self { tau_minus: 0.5 * t_f - 0.5 * dtau, tau_plus: 0.5 * t_f + 0.5 * dtau, regime }
    }

    /// Impulse interval `τ₊ − τ₋`.
    pub fn dtau(&self) -> f64 {
        self.tau_plus - self.tau_minus
    }

    pub(crate) fn clamped(mut self, t_f: f64) -> Self {
        self.tau_minus = self.tau_minus.clamp(0.0, t_f);
        self.tau_plus = self.tau_plus.clamp(self.tau_minus, t_f);
        self
    }
}

/// Rules for placing the impulse window of the Landau-Zener sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    /// Inverse gap equals `|z / ∂ₜz|`.
    KibbleZurek = 1,
    /// Inverse gap equals `‖H‖ / ‖∂ₜH‖`.
    ModifiedKibbleZurek = 2,
    /// Inverse gap equals the total time.
    GapTime = 3,
    /// `|⟨ψ₂|∂ₜH|ψ₁⟩| = Δ²`.
    AdiabaticCondition = 4,
}

impl Scenario {
    pub const ALL: [Scenario; 4] = [
        Scenario::KibbleZurek,
        Scenario::ModifiedKibbleZurek,
        Scenario::GapTime,
        Scenario::AdiabaticCondition,
    ];

    pub fn from_index(i: u8) -> Option<Self> {
        match i {
            1 => Some(Self::KibbleZurek),
            2 => Some(Self::ModifiedKibbleZurek),
            3 => Some(Self::GapTime),
            4 => Some(Self::AdiabaticCondition),
            _ => None,
        }
    }

    pub fn index(self) -> u8 {
        self as u8
    }
}

/// Sweep parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LzParams {
    pub x: f64,
    pub z_i: f64,
    pub z_f: f64,
    pub t_f: f64,
}

impl LzParams {
    pub fn new(x: f64, z_i: f64, z_f: f64, t_f: f64) -> Result<Self> {
        if !(x > 0.0 && x.is_finite()) {
            return Err(ModelError::InvalidParams(format!("coupling x must be positive, got {x}")));
        }
        if !(z_i < 0.0 && 0.0 < z_f && z_f.is_finite() && z_i.is_finite()) {
            return Err(ModelError::InvalidParams(format!(
                "sweep must cross z = 0 (z_i < 0 < z_f), got z_i = {z_i}, z_f = {z_f}"
            )));
        }
        if !(t_f > 0.0 && t_f.is_finite()) {
            return Err(ModelError::InvalidParams(format!("t_f must be positive, got {t_f}")));
        }
        Ok(Self { x, z_i, z_f, t_f })
    }

    /// Same sweep with another total time.
    pub fn with_tf(&self, t_f: f64) -> Result<Self> {
        Self::new(self.x, self.z_i, self.z_f, t_f)
    }

    /// `δz = z_f − z_i`
    pub fn dz(&self) -> f64 {
        self.z_f - self.z_i
    }

    pub fn z_at(&self, t: f64) -> f64 {
        self.z_i + self.dz() * t / self.t_f
    }

    /// `∂ₜz`
    pub fn rate(&self) -> f64 {
        self.dz() / self.t_f
    }

    /// Time at which the detuning passes through `z`.
    pub fn time_at(&self, z: f64) -> f64 {
        (z - self.z_i) * self.t_f / self.dz()
    }
}

/// Instantaneous energies and real eigenvectors of the 2x2 Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LzEigen {
    pub e1: f64,
    pub e2: f64,
    pub psi1: [f64; 2],
    pub psi2: [f64; 2],
}

impl LzEigen {
    pub fn ground(&self) -> StateVector {
        StateVector::from_real(self.psi1)
    }

    pub fn excited(&self) -> StateVector {
        StateVector::from_real(self.psi2)
    }

    /// Gap `Δ = E₂ − E₁ = 2b`.
    pub fn gap(&self) -> f64 {
        self.e2 - self.e1
    }
}

/// `(b − z, b + z)` computed without cancellation.
fn b_minus_plus(x: f64, z: f64, b: f64) -> (f64, f64) {
    if z >= 0.0 {
        (x * x / (b + z), b + z)
    } else {
        (b - z, x * x / (b - z))
    }
}

/// Eigenpairs `E₁,₂ = ∓b`, `ψ₁,₂ = ∓√((b∓z)/2b) |φ₁⟩ + √((b±z)/2b) |φ₂⟩`.
pub fn lz_eigensystem(x: f64, z: f64) -> Result<LzEigen> {
    let b = x.hypot(z);
    if b == 0.0 {
        return Err(ModelError::Degenerate);
    }
    let (bm, bp) = b_minus_plus(x, z, b);
    let lo = (bm / (2.0 * b)).sqrt();
    let hi = (bp / (2.0 * b)).sqrt();
    Ok(LzEigen { e1: -b, e2: b, psi1: [-lo, hi], psi2: [hi, lo] })
}

/// Exact state at `t_f`, starting from the ground state at `t = 0`.
pub fn evolve_schrodinger(p: &LzParams, tol: Tolerances) -> Result<StateVector> {
    let g = lz_eigensystem(p.x, p.z_i)?.ground();
    let rhs = |t: f64, c: &[C64], d: &mut [C64]| {
        let z = p.z_at(t);
        d[0] = -I * (c[0] * z + c[1] * p.x);
        d[1] = -I * (c[0] * p.x - c[1] * z);
    };
    let y = integrate_ode(rhs, &g.0, 0.0, p.t_f, tol)?;
    Ok(StateVector::new(y[0], y[1]))
}

/// `½ [b z + x² ln(z + b)]`, the antiderivative of `b(z)`.
fn b_antiderivative(x: f64, z: f64) -> f64 {
    let b = x.hypot(z);
    let (_, bp) = b_minus_plus(x, z, b);
    0.5 * (b * z + x * x * bp.ln())
}

/// Ground-state dynamical phase `δ₁(t_a, t_b) = ∫ E₁ dt`, in closed form.
pub fn dynamical_phase_gs(p: &LzParams, t_a: f64, t_b: f64) -> f64 {
    if t_a == t_b {
        return 0.0;
    }
    let (za, zb) = (p.z_at(t_a), p.z_at(t_b));
    -(p.t_f / p.dz()) * (b_antiderivative(p.x, zb) - b_antiderivative(p.x, za))
}

/// `e^{−iδ₁(0, t_f)} |ψ₁(t_f)⟩`
pub fn adiabatic_state(p: &LzParams) -> Result<StateVector> {
    let delta1 = dynamical_phase_gs(p, 0.0, p.t_f);
    let g = lz_eigensystem(p.x, p.z_f)?.ground();
    Ok(g.scale(C64::from_polar(1.0, -delta1)))
}

/// `⟨ψ₂|∂ₜH|ψ₁⟩` at time `t` (real in this gauge).
pub fn coupling_matrix_element(p: &LzParams, t: f64) -> Result<f64> {
    let e = lz_eigensystem(p.x, p.z_at(t))?;
    // ∂ₜH = ż σᶻ
    Ok(p.rate() * (e.psi2[0] * e.psi1[0] - e.psi2[1] * e.psi1[1]))
}

/// `M₂₁(t) = t_f ⟨ψ₂|∂ₜH|ψ₁⟩ / (E₂ − E₁)²`
pub fn m21(p: &LzParams, t: f64) -> Result<f64> {
    let gap = 2.0 * p.x.hypot(p.z_at(t));
    Ok(p.t_f * coupling_matrix_element(p, t)? / (gap * gap))
}

/// `J₂₁(t) = t_f ∫₀ᵗ |⟨ψ₂|∂H|ψ₁⟩|² / (E₂ − E₁)³ dt'`, by adaptive quadrature.
pub fn j21(p: &LzParams, t: f64) -> Result<f64> {
    let integrand = |s: f64| {
        let me = coupling_matrix_element(p, s).unwrap_or(0.0);
        let gap = 2.0 * p.x.hypot(p.z_at(s));
        me * me / (gap * gap * gap)
    };
    // The integrand peaks at the crossing; split there so the quadrature sees it.
    let t_cross = p.time_at(0.0).clamp(0.0, t);
    let first = integrate_quiet(integrand, 0.0, t_cross)?;
    let second = integrate_quiet(integrand, t_cross, t)?;
    Ok(p.t_f * (first + second))
}

fn integrate_quiet<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64) -> Result<f64> {
    Ok(integrate(f, a, b, 1e-300)?)
}

/// Adiabatic state with the first-order correction in `1/t_f`, normalized.
pub fn adiabatic_first_order(p: &LzParams) -> Result<StateVector> {
    let delta1 = dynamical_phase_gs(p, 0.0, p.t_f);
    let fin = lz_eigensystem(p.x, p.z_f)?;
    let (psi1, psi2) = (fin.ground(), fin.excited());
    let j = j21(p, p.t_f)?;
    let m_end = m21(p, p.t_f)?;
    let m_start = m21(p, 0.0)?;
    let ph1 = C64::from_polar(1.0, -delta1);
    // δ₂ = −δ₁
    let ph2 = C64::from_polar(1.0, delta1);
    let adi = psi1.scale(ph1);
    let corr = psi1
        .scale(I * ph1 * j)
        .add(&psi2.scale(-I * ph1 * m_end))
        .add(&psi2.scale(I * ph2 * m_start));
    Ok(adi.add(&corr.scale(C64::new(1.0 / p.t_f, 0.0))).normalized())
}

/// Adiabatic-impulse state: adiabatic transport to `τ₋`, frozen until `τ₊`,
/// then adiabatic transport of both levels to `t_f`.
pub fn aia_state(p: &LzParams, st: &SwitchingTimes) -> Result<StateVector> {
    let (tm, tp) = (st.tau_minus, st.tau_plus);
    let start = lz_eigensystem(p.x, p.z_at(tm))?.ground();
    let jump = lz_eigensystem(p.x, p.z_at(tp))?;
    let fin = lz_eigensystem(p.x, p.z_f)?;
    let before = C64::from_polar(1.0, -dynamical_phase_gs(p, 0.0, tm));
    let d1_after = dynamical_phase_gs(p, tp, p.t_f);
    let c1 = jump.ground().inner(&start) * before * C64::from_polar(1.0, -d1_after);
    let c2 = jump.excited().inner(&start) * before * C64::from_polar(1.0, d1_after);
    Ok(fin.ground().scale(c1).add(&fin.excited().scale(c2)))
}

/// Piecewise switching times for the four closed-form scenarios.
pub fn switching_times(p: &LzParams, scenario: Scenario) -> SwitchingTimes {
    let (x, z_i, z_f, t_f) = (p.x, p.z_i, p.z_f, p.t_f);
    let dz = p.dz();
    let x2 = x * x;
    let center = -z_i / dz * t_f;
    let whole = SwitchingTimes::new(0.0, t_f, Regime::WholeIntervalImpulse);
    let interior = |half: f64| {
        SwitchingTimes::new(center - half, center + half, Regime::Interior).clamped(t_f)
    };
    let collapsed = |at: f64| SwitchingTimes::new(at, at, Regime::Collapsed);
    match scenario {
        Scenario::KibbleZurek => {
            let lower = 0.5 * dz / (z_f * x.hypot(z_f));
            if t_f < lower {
                whole
            } else {
                let r = dz / (x2 * t_f);
                // √(1 + r²) − 1 written to avoid cancellation for small r.
                let s = r * r / ((1.0 + r * r).sqrt() + 1.0);
                interior(x / (2f64.sqrt() * dz) * t_f * s.sqrt())
            }
        }
        Scenario::ModifiedKibbleZurek => {
            let lower = 0.5 * dz / (x2 + z_i * z_i);
            let upper = 0.5 * dz / x2;
            if t_f < lower {
                whole
            } else if t_f < upper {
                let s = (-2.0 + dz / (x2 * t_f)).max(0.0);
                interior(x / (2f64.sqrt() * dz) * t_f * s.sqrt())
            } else {
                collapsed(0.5 * t_f)
            }
        }
        Scenario::GapTime => {
            let lower = 0.5 / x.hypot(z_f);
            let upper = 0.5 / x;
            if t_f < lower {
                whole
            } else if t_f < upper {
                let s = (-1.0 + (0.5 / (x * t_f)).powi(2)).max(0.0);
                interior(x / dz * t_f * s.sqrt())
            } else {
                collapsed(center)
            }
        }
        Scenario::AdiabaticCondition => {
            let lower = 0.25 * x * dz / (x2 + z_i * z_i);
            let upper = 0.25 * dz / x2;
            if t_f < lower {
                whole
            } else if t_f < upper {
                let s = (-2.0 + (dz / (2f64.sqrt() * x2 * t_f)).powf(2.0 / 3.0)).max(0.0);
                interior(x / (2f64.sqrt() * dz) * t_f * s.sqrt())
            } else {
                collapsed(0.5 * t_f)
            }
        }
    }
}

/// Optimal centred impulse interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DtauOptimum {
    pub dtau: f64,
    pub distance: f64,
}

impl DtauOptimum {
    pub fn switching_times(&self, t_f: f64) -> SwitchingTimes {
        SwitchingTimes::centered(t_f, self.dtau)
    }
}

/// Grid size of the coarse Δτ scan used by the optimizers.
pub const DTAU_SCAN_POINTS: usize = 4001;

/// Distance between `exact` and the AIA state with centred interval `dtau`.
pub fn aia_distance_for_dtau(p: &LzParams, exact: &StateVector, dtau: f64) -> Result<f64> {
    let st = SwitchingTimes::centered(p.t_f, dtau);
    Ok(state_distance(exact, &aia_state(p, &st)?))
}

/// Minimizes the AIA distance over `Δτ ∈ [−t_f, t_f]` with `τ± = t_f/2 ± Δτ/2`.
pub fn optimize_dtau(p: &LzParams, tol: Tolerances) -> Result<DtauOptimum> {
    let exact = evolve_schrodinger(p, tol)?;
    optimize_dtau_against(p, &exact)
}

/// [`optimize_dtau`] against an already computed exact state.
pub fn optimize_dtau_against(p: &LzParams, exact: &StateVector) -> Result<DtauOptimum> {
    let f = |dtau: f64| aia_distance_for_dtau(p, exact, dtau).unwrap_or(f64::INFINITY);
    let m = minimize_scalar_with(f, -p.t_f, p.t_f, 1e-9 * p.t_f, DTAU_SCAN_POINTS);
    Ok(DtauOptimum { dtau: m.x, distance: m.value })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn params(t_f: f64) -> LzParams {
        LzParams::new(0.1, -1.0, 1.0, t_f).unwrap()
    }

    #[test]
    fn eigensystem_at_symmetric_point() {
        let e = lz_eigensystem(0.1, 0.0).unwrap();
        assert!((e.psi1[0] + FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((e.psi1[1] - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((e.e1 + 0.1).abs() < 1e-15);
    }

    #[test]
    fn degenerate_point_is_rejected() {
        assert_eq!(lz_eigensystem(0.0, 0.0), Err(ModelError::Degenerate));
    }

    #[test]
    fn params_validation() {
        assert!(LzParams::new(0.0, -1.0, 1.0, 1.0).is_err());
        assert!(LzParams::new(0.1, 1.0, 2.0, 1.0).is_err());
        assert!(LzParams::new(0.1, -1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn phase_vanishes_on_empty_interval() {
        assert_eq!(dynamical_phase_gs(&params(10.0), 3.0, 3.0), 0.0);
    }

    #[test]
    fn ground_phase_is_negative() {
        assert!(dynamical_phase_gs(&params(1.0), 0.0, 1.0) < 0.0);
    }

    #[test]
    fn adiabatic_state_is_normalized() {
        let s = adiabatic_state(&params(123.0)).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn global_phase_does_not_change_distance() {
        let p = params(50.0);
        let a = adiabatic_state(&p).unwrap();
        let b = aia_state(&p, &switching_times(&p, Scenario::KibbleZurek)).unwrap();
        let d0 = state_distance(&a, &b);
        let d1 = state_distance(&a.scale(C64::from_polar(1.0, 0.7)), &b);
        let d2 = state_distance(&a, &b.scale(C64::from_polar(1.0, -2.1)));
        assert!((d0 - d1).abs() < 1e-14 && (d0 - d2).abs() < 1e-14);
    }

    #[test]
    fn distance_examples() {
        let up = StateVector::from_real([1.0, 0.0]);
        let down = StateVector::from_real([0.0, 1.0]);
        let plus = StateVector::from_real([FRAC_1_SQRT_2, FRAC_1_SQRT_2]);
        assert_eq!(state_distance(&up, &up), 0.0);
        assert_eq!(state_distance(&up, &down), 1.0);
        assert!((state_distance(&up, &plus) - FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn scenario_two_collapses_above_threshold() {
        let st = switching_times(&params(200.0), Scenario::ModifiedKibbleZurek);
        assert_eq!(st.regime, Regime::Collapsed);
        assert_eq!((st.tau_minus, st.tau_plus), (100.0, 100.0));
    }

    #[test]
    fn scenario_three_collapses_above_threshold() {
        let st = switching_times(&params(10.0), Scenario::GapTime);
        assert_eq!(st.regime, Regime::Collapsed);
        assert_eq!((st.tau_minus, st.tau_plus), (5.0, 5.0));
    }

    #[test]
    fn scenario_four_boundary() {
        let st = switching_times(&params(50.0), Scenario::AdiabaticCondition);
        assert!(st.dtau().abs() < 1e-12);
    }

    #[test]
    fn whole_interval_below_threshold() {
        for s in Scenario::ALL {
            let st = switching_times(&params(0.01), s);
            assert_eq!(st.regime, Regime::WholeIntervalImpulse, "{s:?}");
            assert_eq!((st.tau_minus, st.tau_plus), (0.0, 0.01));
        }
    }

    #[test]
    fn sudden_limit_aia_returns_initial_ground_state() {
        let p = params(7.0);
        let st = SwitchingTimes::new(0.0, p.t_f, Regime::WholeIntervalImpulse);
        let s = aia_state(&p, &st).unwrap();
        let g0 = lz_eigensystem(p.x, p.z_i).unwrap().ground();
        assert!(state_distance(&s, &g0) < 1e-12);
        assert!((s.inner(&g0) - C64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn m21_at_crossing() {
        let p = params(37.0);
        let m = m21(&p, p.time_at(0.0)).unwrap();
        assert!((m.abs() - p.dz() / (4.0 * p.x * p.x)).abs() < 1e-12);
        // Real gauge of the eigenvectors makes the element negative.
        assert!(m < 0.0);
    }

    #[test]
    fn scenario_index_roundtrip() {
        for s in Scenario::ALL {
            assert_eq!(Scenario::from_index(s.index()), Some(s));
        }
        assert_eq!(Scenario::from_index(5), None);
    }
}
