//! Log-log rate fits.

use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    /// Empirical rate exponent.
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fit in log space.
    pub residual: f64,
    pub n_points: usize,
}

/// Ordinary least squares of `ln(loss)` on `ln(k)`.
pub fn fit_rate(points: &[(f64, f64)]) -> Result<RateFit> {
    if points.len() < 3 {
        return Err(HarnessError::Fit(format!(
            "need at least 3 points, got {}",
            points.len()
        )));
    }
    for &(k, loss) in points {
        if !(k > 0.0 && k.is_finite()) {
            return Err(HarnessError::Fit(format!("k = {k} is not positive")));
        }
        if !(loss > 0.0 && loss.is_finite()) {
            return Err(HarnessError::Fit(format!("loss {loss} at k = {k} is not positive")));
        }
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(HarnessError::Fit("all k values are equal".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    Ok(RateFit {
        slope,
        intercept,
        residual: (sse / n).sqrt(),
        n_points: points.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_laws() {
        let ks = [8.0, 16.0, 32.0, 64.0];
        let f = fit_rate(&ks.map(|k| (k, 7.0 / k))).unwrap();
        assert!((f.slope + 1.0).abs() < 1e-9);
        assert!((f.intercept - 7f64.ln()).abs() < 1e-9);
        assert!(f.residual < 1e-12);
        assert_eq!(f.n_points, 4);
        let f = fit_rate(&ks.map(|k| (k, 3.0 / k.sqrt()))).unwrap();
        assert!((f.slope + 0.5).abs() < 1e-9);
    }

    #[test]
    fn zero_loss_names_its_k() {
        let err = fit_rate(&[(8.0, 1.0), (16.0, 0.0), (32.0, 0.2)]).unwrap_err();
        assert!(err.to_string().contains("k = 16"), "{err}");
    }

    #[test]
    fn too_few_points() {
        assert!(fit_rate(&[(8.0, 1.0), (16.0, 0.5)]).is_err());
    }
}
