use super::NumError;

/// Power law `d = amplitude * t^exponent` fitted in log-log space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub amplitude: f64,
    pub exponent: f64,
    /// RMS of the log residuals.
    pub residual: f64,
}

impl FitResult {
    pub fn eval(&self, t: f64) -> f64 {
        self.amplitude * t.powf(self.exponent)
    }
}

/// Ordinary least-squares line through `(ln t, ln d)`.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<FitResult, NumError> {
    if points.len() < 3 {
        return Err(NumError::TooFewPoints { need: 3, got: points.len() });
    }
    if let Some(&(t, d)) = points.iter().find(|(t, d)| !(*t > 0.0 && *d > 0.0)) {
        return Err(NumError::NonPositive { t, d });
    }
    let n = points.len() as f64;
    let logs: Vec<(f64, f64)> = points.iter().map(|(t, d)| (t.ln(), d.ln())).collect();
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(NumError::TooFewPoints { need: 3, got: 1 });
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = logs.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    Ok(FitResult { amplitude: intercept.exp(), exponent: slope, residual: (ss / n).sqrt() })
}
