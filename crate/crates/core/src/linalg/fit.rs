use crate::error::{Error, Result};

/// value ≈ exp(log_prefactor) · k^exponent.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct FitResult {
    pub exponent: f64,
    pub log_prefactor: f64,
    pub r_squared: f64,
}

/// Least-squares line through (ln k, ln value).
pub fn fit_power_law(pairs: &[(f64, f64)]) -> Result<FitResult> {
    if pairs.len() < 3 {
        return Err(Error::InvalidParameter(format!("need at least 3 points, got {}", pairs.len())));
    }
    if pairs.iter().any(|&(k, v)| !(k > 0.0 && v > 0.0 && k.is_finite() && v.is_finite())) {
        return Err(Error::InvalidParameter("k and values must be positive and finite".into()));
    }
    let n = pairs.len() as f64;
    let xs: Vec<f64> = pairs.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = pairs.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx <= 1e-300 {
        return Err(Error::InvalidParameter("all k values are equal".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let ss_res: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let r_squared = if ss_tot <= 1e-28 * (1.0 + my * my) { 1.0 } else { (1.0 - ss_res / ss_tot).clamp(0.0, 1.0) };
    Ok(FitResult { exponent: slope, log_prefactor: intercept, r_squared })
}
