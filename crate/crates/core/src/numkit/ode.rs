//! Dormand-Prince 5(4) integration with embedded error control.

use std::ops::{Add, Mul};

use num_complex::Complex64 as C64;

use super::NumError;

/// Element type of an ODE state vector.
pub trait OdeScalar: Copy + Add<Output = Self> + Mul<f64, Output = Self> + Send + Sync {
    fn zero() -> Self;
    fn magnitude(self) -> f64;
    fn is_finite(self) -> bool;
}

impl OdeScalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
}

impl OdeScalar for C64 {
    fn zero() -> Self {
        C64::new(0.0, 0.0)
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
    fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// Relative and absolute local error tolerances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rel: f64,
    pub abs: f64,
}

impl Tolerances {
    pub fn new(rel: f64, abs: f64) -> Self {
        Self { rel, abs }
    }

    /// Both tolerances scaled by `factor`.
    pub fn scaled(self, factor: f64) -> Self {
        Self { rel: self.rel * factor, abs: self.abs * factor }
    }

    fn validate(self) -> Result<(), NumError> {
        if self.rel > 0.0 && self.abs > 0.0 && self.rel.is_finite() && self.abs.is_finite() {
            Ok(())
        } else {
            Err(NumError::BadTolerance { rel: self.rel, abs: self.abs })
        }
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { rel: 1e-10, abs: 1e-12 }
    }
}

// Dormand-Prince tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// Difference between the 5th and embedded 4th order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const MAX_STEPS: usize = 50_000_000;

struct Stepper<T> {
    k: [Vec<T>; 7],
    ytmp: Vec<T>,
    ynew: Vec<T>,
}

impl<T: OdeScalar> Stepper<T> {
    fn new(n: usize) -> Self {
        let z = || vec![T::zero(); n];
        Self { k: [z(), z(), z(), z(), z(), z(), z()], ytmp: z(), ynew: z() }
    }

    fn combine(out: &mut [T], y: &[T], h: f64, terms: &[(f64, &[T])]) {
        for i in 0..y.len() {
            let mut acc = T::zero();
            for (c, k) in terms {
                acc = acc + k[i] * *c;
            }
            out[i] = y[i] + acc * h;
        }
    }

    /// One trial step. Leaves the 5th-order result in `ynew` and returns the
    /// scaled RMS error estimate. `k[0]` must already hold f(t, y).
    fn attempt<F>(&mut self, rhs: &mut F, t: f64, y: &[T], h: f64, tol: Tolerances) -> f64
    where
        F: FnMut(f64, &[T], &mut [T]),
    {
        let [k1, k2, k3, k4, k5, k6, k7] = &mut self.k;
        Self::combine(&mut self.ytmp, y, h, &[(A21, k1)]);
        rhs(t + C2 * h, &self.ytmp, k2);
        Self::combine(&mut self.ytmp, y, h, &[(A31, k1), (A32, k2)]);
        rhs(t + C3 * h, &self.ytmp, k3);
        Self::combine(&mut self.ytmp, y, h, &[(A41, k1), (A42, k2), (A43, k3)]);
        rhs(t + C4 * h, &self.ytmp, k4);
        Self::combine(&mut self.ytmp, y, h, &[(A51, k1), (A52, k2), (A53, k3), (A54, k4)]);
        rhs(t + C5 * h, &self.ytmp, k5);
        Self::combine(
            &mut self.ytmp,
            y,
            h,
            &[(A61, k1), (A62, k2), (A63, k3), (A64, k4), (A65, k5)],
        );
        rhs(t + h, &self.ytmp, k6);
        Self::combine(
            &mut self.ynew,
            y,
            h,
            &[(A71, k1), (A73, k3), (A74, k4), (A75, k5), (A76, k6)],
        );
        rhs(t + h, &self.ynew, k7);

        let n = y.len() as f64;
        let mut sum = 0.0;
        for i in 0..y.len() {
            let e = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7)
                * h;
            let scale = tol.abs + tol.rel * y[i].magnitude().max(self.ynew[i].magnitude());
            let r = e.magnitude() / scale;
            sum += r * r;
        }
        (sum / n).sqrt()
    }
}

fn initial_step<T: OdeScalar>(y: &[T], f0: &[T], span: f64, tol: Tolerances) -> f64 {
    let mut d0 = 0.0;
    let mut d1 = 0.0;
    for (yi, fi) in y.iter().zip(f0) {
        let sc = tol.abs + tol.rel * yi.magnitude();
        d0 += (yi.magnitude() / sc).powi(2);
        d1 += (fi.magnitude() / sc).powi(2);
    }
    let n = y.len().max(1) as f64;
    let (d0, d1) = ((d0 / n).sqrt(), (d1 / n).sqrt());
    let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h.min(span).max(f64::MIN_POSITIVE)
}

/// Integrates `y' = rhs(t, y)` from `t0` to `t1` and returns `y(t1)`.
///
/// The right-hand side writes the derivative into its third argument. Uses
/// the Dormand-Prince 5(4) pair with a scaled RMS error norm.
pub fn integrate_ode<T, F>(
    mut rhs: F,
    y0: &[T],
    t0: f64,
    t1: f64,
    tol: Tolerances,
) -> Result<Vec<T>, NumError>
where
    T: OdeScalar,
    F: FnMut(f64, &[T], &mut [T]),
{
    let mut out = integrate_ode_sampled(&mut rhs, y0, &[t0, t1], tol)?;
    Ok(out.pop().expect("two sample times"))
}

/// Integrates through an ascending list of times and returns the state at
/// each of them (the first entry is `y0` itself).
pub fn integrate_ode_sampled<T, F>(
    mut rhs: F,
    y0: &[T],
    times: &[f64],
    tol: Tolerances,
) -> Result<Vec<Vec<T>>, NumError>
where
    T: OdeScalar,
    F: FnMut(f64, &[T], &mut [T]),
{
    tol.validate()?;
    if times.is_empty() {
        return Ok(Vec::new());
    }
    for w in times.windows(2) {
        if !(w[1] >= w[0]) || !w[0].is_finite() || !w[1].is_finite() {
            return Err(NumError::BadInterval { t0: w[0], t1: w[1] });
        }
    }

    let n = y0.len();
    let mut st = Stepper::new(n);
    let mut y = y0.to_vec();
    let mut out = Vec::with_capacity(times.len());
    out.push(y.clone());
    let mut h_next: Option<f64> = None;
    let mut steps = 0usize;

    for w in times.windows(2) {
        let (mut t, t_end) = (w[0], w[1]);
        if t_end == t {
            out.push(y.clone());
            continue;
        }
        rhs(t, &y, &mut st.k[0]);
        if st.k[0].iter().any(|v| !v.is_finite()) {
            return Err(NumError::NonFinite { t });
        }
        let mut h = h_next.unwrap_or_else(|| initial_step(&y, &st.k[0], t_end - t, tol));
        let mut last_rejected = false;
        while t < t_end {
            let remaining = t_end - t;
            let hit_end = h >= remaining;
            if hit_end {
                h = remaining;
            }
            if h <= 1e-15 * t.abs().max(1.0) {
                return Err(NumError::StepUnderflow { t, h });
            }
            steps += 1;
            if steps > MAX_STEPS {
                return Err(NumError::StepUnderflow { t, h });
            }
            let err = st.attempt(&mut rhs, t, &y, h, tol);
            if !err.is_finite() {
                if st.ynew.iter().any(|v| !v.is_finite()) && h <= 1e-12 * remaining.max(1.0) {
                    return Err(NumError::NonFinite { t });
                }
                h *= FAC_MIN;
                last_rejected = true;
                continue;
            }
            if err <= 1.0 {
                t = if hit_end { t_end } else { t + h };
                std::mem::swap(&mut y, &mut st.ynew);
                // FSAL: k7 at the accepted point becomes k1 of the next step.
                st.k.swap(0, 6);
                let mut fac = if err == 0.0 { FAC_MAX } else { SAFETY * err.powf(-0.2) };
                fac = fac.clamp(FAC_MIN, FAC_MAX);
                if last_rejected {
                    fac = fac.min(1.0);
                }
                let proposed = h * fac;
                // a step clipped to the endpoint should not shrink the next one
                if !hit_end || h_next.is_none() {
                    h_next = Some(proposed);
                }
                h = proposed;
                last_rejected = false;
            } else {
                h *= (SAFETY * err.powf(-0.2)).max(FAC_MIN);
                last_rejected = true;
            }
        }
        out.push(y.clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn exponential_decay() {
        let y = integrate_ode(|_, y: &[f64], d: &mut [f64]| d[0] = -y[0], &[1.0], 0.0, 1.0, Tolerances::default())
            .unwrap();
        assert!((y[0] - (-1.0f64).exp()).abs() < 1e-9);
        assert!((y[0] - 0.3678794412).abs() < 1e-9);
    }

    #[test]
    fn phase_rotation_keeps_norm() {
        let i = C64::new(0.0, 1.0);
        let y = integrate_ode(
            |_, y: &[C64], d: &mut [C64]| d[0] = i * y[0],
            &[C64::new(1.0, 0.0)],
            0.0,
            PI,
            Tolerances::default(),
        )
        .unwrap();
        assert!((y[0] - C64::new(-1.0, 0.0)).norm() < 1e-9);
        assert!((y[0].norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn zero_length_interval_returns_initial_state() {
        let y = integrate_ode(|_, _: &[f64], d: &mut [f64]| d[0] = 1.0, &[2.5], 3.0, 3.0, Tolerances::default())
            .unwrap();
        assert_eq!(y, vec![2.5]);
    }

    #[test]
    fn reversed_interval_is_rejected() {
        let r = integrate_ode(|_, _: &[f64], d: &mut [f64]| d[0] = 1.0, &[0.0], 1.0, 0.0, Tolerances::default());
        assert!(matches!(r, Err(NumError::BadInterval { .. })));
    }

    #[test]
    fn bad_tolerance_is_rejected() {
        let r = integrate_ode(|_, _: &[f64], d: &mut [f64]| d[0] = 1.0, &[0.0], 0.0, 1.0, Tolerances::new(0.0, 1e-12));
        assert!(matches!(r, Err(NumError::BadTolerance { .. })));
    }

    #[test]
    fn singular_rhs_reports_failing_time() {
        // y' = 1/(1 - t) blows up at t = 1.
        let r = integrate_ode(|t, _: &[f64], d: &mut [f64]| d[0] = 1.0 / (1.0 - t), &[0.0], 0.0, 2.0, Tolerances::default());
        match r {
            Err(NumError::StepUnderflow { t, .. }) | Err(NumError::NonFinite { t }) => {
                assert!((t - 1.0).abs() < 1e-3, "failed at {t}")
            }
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn sampled_matches_direct() {
        let f = |_: f64, y: &[f64], d: &mut [f64]| {
            d[0] = y[1];
            d[1] = -y[0];
        };
        let times: Vec<f64> = (0..=10).map(|i| i as f64 * 0.7).collect();
        let samples = integrate_ode_sampled(f, &[1.0, 0.0], &times, Tolerances::default()).unwrap();
        for (t, s) in times.iter().zip(&samples) {
            assert!((s[0] - t.cos()).abs() < 1e-9);
            assert!((s[1] + t.sin()).abs() < 1e-9);
        }
    }
}
