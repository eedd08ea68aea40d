use std::f64::consts::FRAC_PI_2;

use super::NumError;

/// Complete elliptic integral of the second kind,
/// E(m) = ∫₀^{π/2} √(1 − m sin²x) dx, via the arithmetic-geometric mean.
pub fn complete_elliptic_e(m: f64) -> Result<f64, NumError> {
    if !(0.0..=1.0).contains(&m) {
        return Err(NumError::ParameterOutOfRange(m));
    }
    if m == 1.0 {
        return Ok(1.0);
    }
    let mut a = 1.0f64;
    let mut b = (1.0 - m).sqrt();
    let mut c = m.sqrt();
    // E = K (1 - Σ 2^{n-1} c_n²), K = π / (2 AGM)
    let mut sum = 0.5 * c * c;
    let mut pow = 0.5;
    for _ in 0..64 {
        if c <= f64::EPSILON * a {
            break;
        }
        let an = 0.5 * (a + b);
        let bn = (a * b).sqrt();
        // c_{n+1} = (a_n − b_n)/2 = c_n² / (4 a_{n+1}), free of cancellation
        c = c * c / (4.0 * an);
        a = an;
        b = bn;
        pow *= 2.0;
        sum += pow * c * c;
    }
    Ok(FRAC_PI_2 / a * (1.0 - sum))
}
