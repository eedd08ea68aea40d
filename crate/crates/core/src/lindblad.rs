//! Dissipative Landau-Zener qubit under a Davies generator with an Ohmic
//! bath coupled through `σʸ`.
//!
//! States and superoperators are written in the normalized Pauli basis
//! `Γ = (1/√2){1, σˣ, σʸ, σᶻ}`, so every density matrix is a real
//! 4-vector with `c₁ = 1/√2` and every generator is a real 4×4 matrix.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64 as C64;

use crate::error::{ModelError, Result};
use crate::lz::{self, DtauOptimum, LzParams, Scenario, SwitchingTimes};
use crate::numkit::{eig_hermitian, integrate, integrate_ode, minimize_scalar_with, ComplexMatrix, Tolerances};

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Sweep `z(t) = z_i + (z_f − z_i) t / t_f` at fixed `x`, bath temperature `T`
/// and coupling `g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpenParams {
    pub lz: LzParams,
    pub temperature: f64,
    pub g: f64,
}

impl OpenParams {
    pub fn new(x: f64, z_i: f64, z_f: f64, t_f: f64, temperature: f64, g: f64) -> Result<Self> {
        let lz = LzParams::new(x, z_i, z_f, t_f)?;
        if !(temperature > 0.0 && temperature.is_finite()) {
            return Err(ModelError::InvalidParams(format!("temperature must be positive, got {temperature}")));
        }
        if !(g >= 0.0 && g.is_finite()) {
            return Err(ModelError::InvalidParams(format!("coupling must be non-negative, got {g}")));
        }
        Ok(Self { lz, temperature, g })
    }

    pub fn with_tf(&self, t_f: f64) -> Result<Self> {
        Ok(Self { lz: self.lz.with_tf(t_f)?, ..*self })
    }

    pub fn beta(&self) -> f64 {
        1.0 / self.temperature
    }

    pub fn t_f(&self) -> f64 {
        self.lz.t_f
    }

    pub fn x(&self) -> f64 {
        self.lz.x
    }
}

/// Real coefficients of `ρ = Σ cᵢ Γᵢ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceVector(pub [f64; 4]);

impl CoherenceVector {
    /// Maximally mixed state.
    pub fn mixed() -> Self {
        Self([FRAC_1_SQRT_2, 0.0, 0.0, 0.0])
    }

    pub fn from_density(rho: &ComplexMatrix) -> Self {
        let mut c = [0.0; 4];
        for (i, ci) in c.iter_mut().enumerate() {
            *ci = (&pauli_basis(i) * rho).trace().re;
        }
        Self(c)
    }

    pub fn to_density(&self) -> ComplexMatrix {
        let [a, b, c, d] = self.0.map(|v| v * FRAC_1_SQRT_2);
        ComplexMatrix::new2([
            [C64::new(a + d, 0.0), C64::new(b, -c)],
            [C64::new(b, c), C64::new(a - d, 0.0)],
        ])
    }

    pub fn trace(&self) -> f64 {
        SQRT_2 * self.0[0]
    }

    /// Smallest eigenvalue of the reconstructed density matrix.
    pub fn min_eigenvalue(&self) -> f64 {
        let r = (self.0[1].powi(2) + self.0[2].powi(2) + self.0[3].powi(2)).sqrt();
        FRAC_1_SQRT_2 * (self.0[0] - r)
    }

    pub fn purity(&self) -> f64 {
        self.0.iter().map(|c| c * c).sum()
    }
}

/// `Γᵢ` as a 2×2 matrix, `i = 0..4`.
pub fn pauli_basis(i: usize) -> ComplexMatrix {
    let s = C64::new(FRAC_1_SQRT_2, 0.0);
    let z = C64::new(0.0, 0.0);
    let is = C64::new(0.0, FRAC_1_SQRT_2);
    match i {
        0 => ComplexMatrix::new2([[s, z], [z, s]]),
        1 => ComplexMatrix::new2([[z, s], [s, z]]),
        2 => ComplexMatrix::new2([[z, -is], [is, z]]),
        3 => ComplexMatrix::new2([[s, z], [z, -s]]),
        _ => panic!("Pauli basis index {i} out of range"),
    }
}

/// Ohmic spectral function `2πg² ω / (1 − e^{−βω})`.
pub fn spectral_gamma(omega: f64, beta: f64, g: f64) -> f64 {
    let pref = 2.0 * PI * g * g;
    let bw = beta * omega;
    if bw == 0.0 {
        return pref / beta;
    }
    // ω / (1 − e^{−βω}) = ω / (−expm1(−βω)), accurate for small βω
    pref * omega / (-(-bw).exp_m1())
}

/// `γ(Δ) + γ(−Δ) = 2πg² Δ coth(βΔ/2)` and `γ(−Δ) − γ(Δ) = −2πg² Δ`.
fn gamma_sum_diff(delta: f64, beta: f64, g: f64) -> (f64, f64) {
    let pref = 2.0 * PI * g * g;
    let sum = if delta == 0.0 { 2.0 * pref / beta } else { pref * delta / (0.5 * beta * delta).tanh() };
    (sum, -pref * delta)
}

fn gap(x: f64, z: f64) -> Result<f64> {
    if x == 0.0 && z == 0.0 {
        return Err(ModelError::Degenerate);
    }
    Ok(2.0 * x.hypot(z))
}

/// Jump operators `(L₀, L₊, L₋)`; `L₊` lowers the energy and is weighted by `γ(Δ)`.
pub fn lindblad_ops(x: f64, z: f64) -> Result<(ComplexMatrix, ComplexMatrix, ComplexMatrix)> {
    let b = 0.5 * gap(x, z)?;
    let i = C64::new(0.0, 1.0);
    let half = C64::new(0.5, 0.0);
    // (iz/2b) σˣ + ½ σʸ − (ix/2b) σᶻ
    let zb = i * (z / (2.0 * b));
    let xb = i * (x / (2.0 * b));
    let lp = ComplexMatrix::new2([[-xb, zb - i * half], [zb + i * half, xb]]);
    let lm = lp.dagger();
    Ok((ComplexMatrix::zeros(2), lp, lm))
}

/// Applies the generator in operator form; used to assemble the matrix
/// independently of the closed-form entries.
pub fn apply_generator(x: f64, z: f64, beta: f64, g: f64, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    let delta = gap(x, z)?;
    let h = lz_hamiltonian(x, z);
    let i = C64::new(0.0, 1.0);
    let mut out = (&(&h * rho) - &(rho * &h)).scale(-i);
    let (_, lp, lm) = lindblad_ops(x, z)?;
    for (op, rate) in [(lp, spectral_gamma(delta, beta, g)), (lm, spectral_gamma(-delta, beta, g))] {
        let od = op.dagger();
        let odo = &od * &op;
        let jump = &(&op * rho) * &od;
        let anti = &(&odo * rho) + &(rho * &odo);
        out = &out + &(&jump - &anti.scale(C64::new(0.5, 0.0))).scale(C64::new(rate, 0.0));
    }
    Ok(out)
}

fn lz_hamiltonian(x: f64, z: f64) -> ComplexMatrix {
    ComplexMatrix::new2([[C64::new(z, 0.0), C64::new(x, 0.0)], [C64::new(x, 0.0), C64::new(-z, 0.0)]])
}

/// `𝓛ᵢⱼ = Tr[Γᵢ 𝓛(Γⱼ)]` assembled from [`apply_generator`].
pub fn liouvillian_matrix_assembled(x: f64, z: f64, beta: f64, g: f64) -> Result<[[f64; 4]; 4]> {
    let mut m = [[0.0; 4]; 4];
    for j in 0..4 {
        let lg = apply_generator(x, z, beta, g, &pauli_basis(j))?;
        for (i, row) in m.iter_mut().enumerate() {
            row[j] = (&pauli_basis(i) * &lg).trace().re;
        }
    }
    Ok(m)
}

/// Closed-form generator matrix in the Pauli basis.
///
/// The `(3,3)` damping is `−½[γ(−Δ) + γ(Δ)]`; see
/// [`liouvillian_matrix_printed`] for the variant with a difference there.
pub fn liouvillian_matrix(x: f64, z: f64, beta: f64, g: f64) -> Result<[[f64; 4]; 4]> {
    let mut m = liouvillian_matrix_printed(x, z, beta, g)?;
    let (sum, _) = gamma_sum_diff(gap(x, z)?, beta, g);
    m[2][2] = -0.5 * sum;
    Ok(m)
}

/// The closed form with `−½[γ(−Δ) − γ(Δ)]` in the `(3,3)` slot. That entry
/// is not the generator of the Davies dynamics (it has the wrong sign and
/// temperature dependence); kept to quantify the difference.
pub fn liouvillian_matrix_printed(x: f64, z: f64, beta: f64, g: f64) -> Result<[[f64; 4]; 4]> {
    let delta = gap(x, z)?;
    let (sum, diff) = gamma_sum_diff(delta, beta, g);
    let d2 = delta * delta;
    Ok([
        [0.0, 0.0, 0.0, 0.0],
        [2.0 * x / delta * diff, -2.0 * (x * x + 0.25 * d2) * sum / d2, -2.0 * z, -2.0 * x * z * sum / d2],
        [0.0, 2.0 * z, -0.5 * diff, -2.0 * x],
        [2.0 * z * diff / delta, -2.0 * x * z * sum / d2, 2.0 * x, -2.0 * (0.25 * d2 + z * z) * sum / d2],
    ])
}

pub fn apply_matrix(m: &[[f64; 4]; 4], c: &CoherenceVector) -> CoherenceVector {
    let mut out = [0.0; 4];
    for (o, row) in out.iter_mut().zip(m) {
        *o = row.iter().zip(&c.0).map(|(a, b)| a * b).sum();
    }
    CoherenceVector(out)
}

/// Eigenvalues with biorthonormal right/left vectors, `⟨⟨Lₙ|Rₘ⟩⟩ = Σₖ Lₙₖ Rₘₖ = δₙₘ`.
#[derive(Debug, Clone, PartialEq)]
pub struct LiouvillianSpectrum {
    pub values: [C64; 4],
    pub right: [[C64; 4]; 4],
    pub left: [[C64; 4]; 4],
}

impl LiouvillianSpectrum {
    /// `⟨⟨Lₙ|v⟩⟩` for a real vector.
    pub fn left_overlap(&self, n: usize, v: &CoherenceVector) -> C64 {
        self.left[n].iter().zip(&v.0).map(|(l, c)| l * c).sum()
    }

    /// `Σₙ lₙ |Rₙ⟩⟩⟨⟨Lₙ|`
    pub fn reconstruct(&self) -> [[C64; 4]; 4] {
        let mut m = [[C64::new(0.0, 0.0); 4]; 4];
        for n in 0..4 {
            for (i, row) in m.iter_mut().enumerate() {
                for (j, e) in row.iter_mut().enumerate() {
                    *e += self.values[n] * self.right[n][i] * self.left[n][j];
                }
            }
        }
        m
    }
}

/// Closed-form spectrum. The normalized vectors are written without `1/z`
/// factors, so `z = 0` needs no special casing.
pub fn liouvillian_spectrum(x: f64, z: f64, beta: f64, g: f64) -> Result<LiouvillianSpectrum> {
    if x == 0.0 {
        return Err(ModelError::InvalidParams("x = 0 decouples the coherences; spectrum form needs x != 0".into()));
    }
    let delta = gap(x, z)?;
    let (sum, _) = gamma_sum_diff(delta, beta, g);
    let th = (0.5 * beta * delta).tanh();
    let l2 = -sum;
    let r = |v: f64| C64::new(v, 0.0);
    let (sx, sz) = (SQRT_2 * x / delta, SQRT_2 * z / delta);
    let hi = C64::new(0.0, FRAC_1_SQRT_2);
    let values = [r(0.0), r(l2), C64::new(0.5 * l2, -delta), C64::new(0.5 * l2, delta)];
    let right = [
        [r(FRAC_1_SQRT_2), r(-sx * th), r(0.0), r(-sz * th)],
        [r(0.0), r(SQRT_2 * sx), r(0.0), r(SQRT_2 * sz)],
        [r(0.0), r(-sz), -hi, r(sx)],
        [r(0.0), r(-sz), hi, r(sx)],
    ];
    let left = [
        [r(SQRT_2), r(0.0), r(0.0), r(0.0)],
        [r(th), r(SQRT_2 * sx), r(0.0), r(SQRT_2 * sz)],
        [r(0.0), r(-sz), hi, r(sx)],
        [r(0.0), r(-sz), -hi, r(sx)],
    ];
    Ok(LiouvillianSpectrum { values, right, left })
}

/// `min{|l₂|, |l₃|}`
pub fn liouvillian_gap(x: f64, z: f64, beta: f64, g: f64) -> Result<f64> {
    let s = liouvillian_spectrum(x, z, beta, g)?;
    Ok(s.values[1].norm().min(s.values[2].norm()))
}

/// Gibbs state `e^{−βH}/Z`.
pub fn steady_state(x: f64, z: f64, beta: f64) -> Result<CoherenceVector> {
    let delta = gap(x, z)?;
    let th = (0.5 * beta * delta).tanh();
    Ok(CoherenceVector([FRAC_1_SQRT_2, -SQRT_2 * x / delta * th, 0.0, -SQRT_2 * z / delta * th]))
}

/// Integrates the master equation from the Gibbs state at `z_i`.
pub fn evolve_master(p: &OpenParams, tol: Tolerances) -> Result<CoherenceVector> {
    let c0 = steady_state(p.x(), p.lz.z_i, p.beta())?;
    propagate_master(p, &c0, 0.0, p.t_f(), tol)
}

/// Propagates an arbitrary coherence vector from `t0` to `t1` along the sweep.
pub fn propagate_master(p: &OpenParams, c0: &CoherenceVector, t0: f64, t1: f64, tol: Tolerances) -> Result<CoherenceVector> {
    let y = integrate_ode(master_rhs(p), &c0.0, t0, t1, tol)?;
    Ok(CoherenceVector([y[0], y[1], y[2], y[3]]))
}

/// Same as [`evolve_master`] but returning the state at each of `times`.
pub fn evolve_master_sampled(p: &OpenParams, times: &[f64], tol: Tolerances) -> Result<Vec<CoherenceVector>> {
    let c0 = steady_state(p.x(), p.lz.z_i, p.beta())?;
    let ys = crate::numkit::integrate_ode_sampled(master_rhs(p), &c0.0, times, tol)?;
    Ok(ys.into_iter().map(|y| CoherenceVector([y[0], y[1], y[2], y[3]])).collect())
}

fn master_rhs(p: &OpenParams) -> impl FnMut(f64, &[f64], &mut [f64]) + '_ {
    let x = p.x();
    let beta = p.beta();
    let k = 2.0 * PI * p.g * p.g;
    move |t, c, d| {
        let z = p.lz.z_at(t);
        let b = x.hypot(z);
        // b ≥ x > 0 along the sweep
        let kc = k / (beta * b).tanh();
        d[0] = 0.0;
        d[1] = -2.0 * k * x * c[0] - kc * (x * x + b * b) / b * c[1] - 2.0 * z * c[2] - kc * x * z / b * c[3];
        d[2] = 2.0 * z * c[1] - kc * b * c[2] - 2.0 * x * c[3];
        d[3] = -2.0 * k * z * c[0] - kc * x * z / b * c[1] + 2.0 * x * c[2] - kc * (b * b + z * z) / b * c[3];
    }
}

/// Adiabatic state: the instantaneous steady state at `z_f`; both the
/// dynamical and the geometric phase vanish for the kernel.
pub fn adiabatic_state_open(p: &OpenParams) -> Result<CoherenceVector> {
    steady_state(p.x(), p.lz.z_f, p.beta())
}

/// `ℓⱼ(t_a, t_b) = ∫ lⱼ dt` for `j = 2, 3` (`ℓ₄ = ℓ₃*`).
pub fn open_phase_integrals(p: &OpenParams, t_a: f64, t_b: f64) -> Result<(f64, C64)> {
    if t_a == t_b {
        return Ok((0.0, C64::new(0.0, 0.0)));
    }
    let x = p.x();
    let beta = p.beta();
    let g = p.g;
    let (za, zb) = (p.lz.z_at(t_a), p.lz.z_at(t_b));
    // Integrate in z; the integrands are smooth and O(g²) or O(1).
    let damp = integrate(|z| gamma_sum_diff(2.0 * x.hypot(z), beta, g).0, za, zb, 1e-300)?;
    let osc = integrate(|z| 2.0 * x.hypot(z), za, zb, 1e-300)?;
    let rate = p.lz.rate();
    let l2 = -damp / rate;
    Ok((l2, C64::new(0.5 * l2, -osc / rate)))
}

/// `Σⱼ e^{ℓⱼ(τ₊,t_f)} ⟨⟨Lⱼ(τ₊)|R₁(τ₋)⟩⟩ |Rⱼ(t_f)⟩⟩`.
pub fn aia_state_open(p: &OpenParams, st: &SwitchingTimes) -> Result<CoherenceVector> {
    let x = p.x();
    let beta = p.beta();
    let start = steady_state(x, p.lz.z_at(st.tau_minus), beta)?;
    let jump = liouvillian_spectrum(x, p.lz.z_at(st.tau_plus), beta, p.g)?;
    let fin = liouvillian_spectrum(x, p.lz.z_f, beta, p.g)?;
    let (l2, l3) = open_phase_integrals(p, st.tau_plus, p.t_f())?;
    let weights = [C64::new(1.0, 0.0), C64::new(l2.exp(), 0.0), l3.exp(), l3.conj().exp()];
    let mut c = [C64::new(0.0, 0.0); 4];
    for n in 0..4 {
        let w = weights[n] * jump.left_overlap(n, &start);
        for (ci, r) in c.iter_mut().zip(&fin.right[n]) {
            *ci += w * r;
        }
    }
    Ok(CoherenceVector(c.map(|v| v.re)))
}

/// `½ Σ |eigenvalues(ρ_a − ρ_b)|`
pub fn trace_distance(a: &CoherenceVector, b: &CoherenceVector) -> Result<f64> {
    let diff = &a.to_density() - &b.to_density();
    let e = eig_hermitian(&diff)?;
    Ok(0.5 * e.values.iter().map(|v| v.abs()).sum::<f64>())
}

/// The impulse window is set by the Hamiltonian gap, exactly as in the
/// closed model.
pub fn switching_times_open(p: &OpenParams, scenario: Scenario) -> SwitchingTimes {
    lz::switching_times(&p.lz, scenario)
}

pub const OPEN_DTAU_SCAN_POINTS: usize = 2001;

pub fn aia_distance_open_for_dtau(p: &OpenParams, exact: &CoherenceVector, dtau: f64) -> Result<f64> {
    trace_distance(exact, &aia_state_open(p, &SwitchingTimes::centered(p.t_f(), dtau))?)
}

pub fn optimize_dtau_open(p: &OpenParams, tol: Tolerances) -> Result<DtauOptimum> {
    let exact = evolve_master(p, tol)?;
    optimize_dtau_open_against(p, &exact)
}

pub fn optimize_dtau_open_against(p: &OpenParams, exact: &CoherenceVector) -> Result<DtauOptimum> {
    let t_f = p.t_f();
    let f = |dtau: f64| aia_distance_open_for_dtau(p, exact, dtau).unwrap_or(f64::INFINITY);
    let m = minimize_scalar_with(f, -t_f, t_f, 1e-9 * t_f, OPEN_DTAU_SCAN_POINTS);
    Ok(DtauOptimum { dtau: m.x, distance: m.value })
}
