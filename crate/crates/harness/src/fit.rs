//! Power-law fits `|y| ≈ e^c q^m` by least squares on `(log q, log|y|)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FitError {
    #[error("need at least 2 points with nonzero y, got {usable} ({dropped} zero values dropped)")]
    Degenerate { usable: usize, dropped: usize },
    #[error("all abscissae coincide")]
    Collinear,
}

pub const MODEL: &str = "log|y| = slope·log q + intercept";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope; 0 with exactly two points.
    pub stderr: f64,
    pub n_points: usize,
    /// Points with `y = 0` (or non-finite) left out of the fit.
    pub dropped: usize,
    pub model: String,
}

pub fn fit_decay_exponent(points: &[(f64, f64)]) -> Result<FitResult, FitError> {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|(q, y)| *y != 0.0 && y.is_finite() && *q > 0.0)
        .map(|(q, y)| (q.ln(), y.abs().ln()))
        .collect();
    let dropped = points.len() - usable.len();
    let n = usable.len();
    if n < 2 {
        return Err(FitError::Degenerate { usable: n, dropped });
    }
    let nf = n as f64;
    let mx = usable.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = usable.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = usable.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(FitError::Collinear);
    }
    let sxy: f64 = usable.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let stderr = if n > 2 {
        let ssr: f64 = usable
            .iter()
            .map(|p| (p.1 - intercept - slope * p.0).powi(2))
            .sum();
        (ssr / (nf - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok(FitResult {
        slope,
        intercept,
        stderr,
        n_points: n,
        dropped,
        model: MODEL.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let pts: Vec<(f64, f64)> = (0..20).map(|i| {
            let q = 100.0 * 1.3f64.powi(i);
            (q, q.powf(-0.5))
        }).collect();
        let f = fit_decay_exponent(&pts).unwrap();
        assert!((f.slope + 0.5).abs() < 1e-12);
        assert!(f.intercept.abs() < 1e-10);
        assert!(f.stderr < 1e-12);
    }

    #[test]
    fn wobbly_power_law() {
        // The window spans one full period of the wobble in log q.
        let pts: Vec<(f64, f64)> = (0..40).map(|i| {
            let q = 100.0 * 1e4f64.powf(i as f64 / 39.0);
            (q, 3.0 * q.powf(-0.5) * (1.0 + 0.1 * q.ln().sin()))
        }).collect();
        assert!((fit_decay_exponent(&pts).unwrap().slope + 0.5).abs() < 0.05);
    }

    #[test]
    fn scaling_y_only_moves_the_intercept() {
        let pts = [(10.0, 0.3), (50.0, 0.11), (300.0, 0.05), (999.0, 0.02)];
        let a = fit_decay_exponent(&pts).unwrap();
        let scaled: Vec<(f64, f64)> = pts.iter().map(|(q, y)| (*q, -7.0 * y)).collect();
        let b = fit_decay_exponent(&scaled).unwrap();
        assert!((a.slope - b.slope).abs() < 1e-12);
        assert!((b.intercept - a.intercept - 7f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(matches!(fit_decay_exponent(&[(10.0, 1.0)]), Err(FitError::Degenerate { .. })));
        assert_eq!(
            fit_decay_exponent(&[(10.0, 0.0), (20.0, 0.0), (30.0, 0.0)]),
            Err(FitError::Degenerate { usable: 0, dropped: 3 })
        );
        let f = fit_decay_exponent(&[(10.0, 1.0), (20.0, 0.0), (40.0, 0.25)]).unwrap();
        assert_eq!((f.n_points, f.dropped), (2, 1));
        assert!((f.slope + 1.0).abs() < 1e-12);
    }
}
