//! Adiabatic intertwiners for the Davies qubit: the single-level map `W₁`
//! as a limit of kernel-projector products, its holonomy, and the full
//! intertwiner `Û` that transports every spectral sector at once.
//!
//! Time is rescaled to `s = t/t_f ∈ [0, 1]`. Superoperators act on
//! coherence vectors in the normalized Pauli basis and are stored as
//! complex 4×4 matrices because the oscillating sectors are complex.

use num_complex::Complex64 as C64;

use crate::error::Result;
use crate::lindblad::{liouvillian_matrix, liouvillian_spectrum, pauli_basis, LiouvillianSpectrum, OpenParams};
use crate::numkit::{eig_hermitian, fit_power_law, integrate_ode, ComplexMatrix, FitResult, Tolerances};

/// Finite-difference step on `s` for projector derivatives.
pub const DERIVATIVE_STEP: f64 = 1e-6;

/// The Davies-qubit sweep viewed as a path `s ↦ 𝓛(s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DaviesPath {
    pub params: OpenParams,
}

impl DaviesPath {
    pub fn new(params: OpenParams) -> Self {
        Self { params }
    }

    pub fn z(&self, s: f64) -> f64 {
        let lz = &self.params.lz;
        lz.z_i + (lz.z_f - lz.z_i) * s
    }

    pub fn spectrum(&self, s: f64) -> Result<LiouvillianSpectrum> {
        let p = &self.params;
        liouvillian_spectrum(p.x(), self.z(s), p.beta(), p.g)
    }

    /// `𝓛(s)` as a complex 4×4 matrix.
    pub fn generator(&self, s: f64) -> Result<ComplexMatrix> {
        let p = &self.params;
        let m = liouvillian_matrix(p.x(), self.z(s), p.beta(), p.g)?;
        Ok(ComplexMatrix::from_fn(4, |i, j| C64::new(m[i][j], 0.0)))
    }

    /// `Pₙ(s) = |Rₙ⟩⟩⟨⟨Lₙ|`, `n = 0..4` (0 is the kernel).
    pub fn projector(&self, n: usize, s: f64) -> Result<ComplexMatrix> {
        Ok(projector_from(&self.spectrum(s)?, n))
    }

    /// Central difference of `Pₙ` in `s`.
    pub fn projector_derivative(&self, n: usize, s: f64, step: f64) -> Result<ComplexMatrix> {
        let a = self.projector(n, s + step)?;
        let b = self.projector(n, s - step)?;
        Ok((&a - &b).scale(C64::new(0.5 / step, 0.0)))
    }

    /// `½ Σₙ [Ṗₙ, Pₙ]`
    pub fn connection(&self, s: f64, step: f64) -> Result<ComplexMatrix> {
        let mut acc = ComplexMatrix::zeros(4);
        for n in 0..4 {
            let p = self.projector(n, s)?;
            let dp = self.projector_derivative(n, s, step)?;
            acc = &acc + &(&(&dp * &p) - &(&p * &dp));
        }
        Ok(acc.scale(C64::new(0.5, 0.0)))
    }
}

fn projector_from(spec: &LiouvillianSpectrum, n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(4, |i, j| spec.right[n][i] * spec.left[n][j])
}

/// `P₁(s_N) ⋯ P₁(s₁) P₁(s₀)` at `N + 1` equally spaced points of `[0, s_end]`.
pub fn w1_projector_product(path: &DaviesPath, s_end: f64, n: usize) -> Result<ComplexMatrix> {
    if n < 2 {
        return Err(crate::ModelError::InvalidParams(format!("need at least 2 steps, got {n}")));
    }
    let mut w = path.projector(0, 0.0)?;
    for j in 1..=n {
        let s = s_end * j as f64 / n as f64;
        w = &path.projector(0, s)? * &w;
    }
    Ok(w)
}

/// `A₁(s) = ⟨⟨L₁(s)|∂ₛR₁(s)⟩⟩` by central differences.
pub fn holonomy_matrix_a1(path: &DaviesPath, s: f64, step: f64) -> Result<C64> {
    let l = path.spectrum(s)?.left[0];
    let rp = path.spectrum(s + step)?.right[0];
    let rm = path.spectrum(s - step)?.right[0];
    Ok((0..4).map(|k| l[k] * (rp[k] - rm[k]) / (2.0 * step)).sum())
}

fn flatten(m: &ComplexMatrix) -> Vec<C64> {
    m.entries().to_vec()
}

fn unflatten(v: &[C64]) -> ComplexMatrix {
    ComplexMatrix::from_row_major(4, v.to_vec())
}

/// Solves `dÛ/ds = (t_f 𝓛 + ½ Σ[Ṗₙ, Pₙ]) Û`, `Û(0) = 1`, up to `s_end`.
pub fn full_intertwiner(path: &DaviesPath, s_end: f64, tol: Tolerances) -> Result<ComplexMatrix> {
    let t_f = path.params.t_f();
    let mut err = None;
    let rhs = |s: f64, y: &[C64], d: &mut [C64]| {
        let gen = match (path.generator(s), path.connection(s, DERIVATIVE_STEP)) {
            (Ok(l), Ok(a)) => &l.scale(C64::new(t_f, 0.0)) + &a,
            (Err(e), _) | (_, Err(e)) => {
                err.get_or_insert(e);
                ComplexMatrix::zeros(4)
            }
        };
        d.copy_from_slice(&flatten(&(&gen * &unflatten(y))));
    };
    let y = integrate_ode(rhs, &flatten(&ComplexMatrix::identity(4)), 0.0, s_end, tol)?;
    if let Some(e) = err {
        return Err(e);
    }
    Ok(unflatten(&y))
}

/// Exact propagator `𝓔(s, 0)`, `∂ₛ𝓔 = t_f 𝓛 𝓔`.
pub fn exact_propagator(path: &DaviesPath, s_end: f64, tol: Tolerances) -> Result<ComplexMatrix> {
    let t_f = path.params.t_f();
    let p = path.params;
    let rhs = |s: f64, y: &[f64], d: &mut [f64]| {
        // the schedule never hits x = z = 0 since x > 0
        let m = liouvillian_matrix(p.x(), path.z(s), p.beta(), p.g).expect("x > 0 keeps the gap open");
        for i in 0..4 {
            for j in 0..4 {
                d[4 * i + j] = t_f * (0..4).map(|k| m[i][k] * y[4 * k + j]).sum::<f64>();
            }
        }
    };
    let mut id = [0.0; 16];
    for i in 0..4 {
        id[5 * i] = 1.0;
    }
    let y = integrate_ode(rhs, &id, 0.0, s_end, tol)?;
    Ok(ComplexMatrix::from_fn(4, |i, j| C64::new(y[4 * i + j], 0.0)))
}

/// Coefficients of an arbitrary 2×2 operator in the Pauli basis.
fn operator_coefficients(op: &ComplexMatrix) -> [C64; 4] {
    std::array::from_fn(|k| (&pauli_basis(k) * op).trace())
}

fn operator_from_coefficients(c: &[C64]) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(2);
    for (k, ck) in c.iter().enumerate() {
        m = &m + &pauli_basis(k).scale(*ck);
    }
    m
}

/// Applies a superoperator to a 2×2 operator.
pub fn apply_superoperator(s: &ComplexMatrix, op: &ComplexMatrix) -> ComplexMatrix {
    let c = operator_coefficients(op);
    operator_from_coefficients(&s.mul_vec(&c))
}

/// `C = Σᵢⱼ S(|i⟩⟨j|) ⊗ |i⟩⟨j|`, output factor first.
pub fn choi_matrix(s: &ComplexMatrix) -> ComplexMatrix {
    let mut c = ComplexMatrix::zeros(4);
    for i in 0..2 {
        for j in 0..2 {
            let mut unit = ComplexMatrix::zeros(2);
            unit[(i, j)] = C64::new(1.0, 0.0);
            let out = apply_superoperator(s, &unit);
            for a in 0..2 {
                for b in 0..2 {
                    c[(2 * a + i, 2 * b + j)] = out[(a, b)];
                }
            }
        }
    }
    c
}

/// Trace preservation and complete positivity of a qubit superoperator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CptpDiagnostics {
    /// `maxₖ |tr S(Γₖ) − tr Γₖ|`
    pub trace_error: f64,
    /// Smallest eigenvalue of the Hermitian part of the Choi matrix.
    pub min_choi_eig: f64,
    /// Frobenius norm of the anti-Hermitian part of the Choi matrix.
    pub hermiticity_defect: f64,
}

pub fn cptp_diagnostics(s: &ComplexMatrix) -> Result<CptpDiagnostics> {
    let mut trace_error = 0.0f64;
    for k in 0..4 {
        let out = s.mul_vec(&std::array::from_fn::<C64, 4, _>(|i| C64::new((i == k) as u8 as f64, 0.0)));
        // tr Γₖ = √2 δₖ₀
        let want = if k == 0 { std::f64::consts::SQRT_2 } else { 0.0 };
        trace_error = trace_error.max((out[0] * std::f64::consts::SQRT_2 - want).norm());
    }
    let c = choi_matrix(s);
    let herm = (&c + &c.dagger()).scale(C64::new(0.5, 0.0));
    let anti = (&c - &c.dagger()).scale(C64::new(0.5, 0.0));
    let e = eig_hermitian(&herm)?;
    Ok(CptpDiagnostics { trace_error, min_choi_eig: e.values[0], hermiticity_defect: anti.norm_fro() })
}

/// Trace norm of a 2×2 matrix: `√(‖A‖²_F + 2|det A|)`.
pub fn trace_norm_2x2(a: &ComplexMatrix) -> f64 {
    let f2 = a.norm_fro().powi(2);
    (f2 + 2.0 * a.det2().norm()).sqrt()
}

/// `‖A‖` induced by trace norms over the Pauli-basis probes.
pub fn probe_norm(a: &ComplexMatrix) -> f64 {
    (0..4).map(|k| trace_norm_2x2(&apply_superoperator(a, &pauli_basis(k)))).fold(0.0, f64::max)
}

/// `‖𝓔(1) − Û(1)‖` and the CPTP diagnostics of `Û(1)` at one `t_f`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosenessSample {
    pub t_f: f64,
    pub distance: f64,
    pub intertwiner: CptpDiagnostics,
}

pub fn closeness_sample(params: &OpenParams, tol: Tolerances) -> Result<ClosenessSample> {
    let path = DaviesPath::new(*params);
    let u = full_intertwiner(&path, 1.0, tol)?;
    let e = exact_propagator(&path, 1.0, tol)?;
    Ok(ClosenessSample {
        t_f: params.t_f(),
        distance: probe_norm(&(&e - &u)),
        intertwiner: cptp_diagnostics(&u)?,
    })
}

/// Samples `‖𝓔 − Û‖` over `t_fs` and fits a power law.
pub fn closeness_bound_check(
    params: &OpenParams,
    t_fs: &[f64],
    tol: Tolerances,
) -> Result<(FitResult, Vec<ClosenessSample>)> {
    let samples = t_fs
        .iter()
        .map(|&t| closeness_sample(&params.with_tf(t)?, tol))
        .collect::<Result<Vec<_>>>()?;
    let fit = fit_power_law(&samples.iter().map(|s| (s.t_f, s.distance)).collect::<Vec<_>>())?;
    Ok((fit, samples))
}
