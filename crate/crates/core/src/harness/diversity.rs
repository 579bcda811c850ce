//! Diversity order as the high-SNR log-log slope of a BER curve.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::ber::BerPoint;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiversityEstimate {
    /// `-d log10(BER) / d log10(SNR)`, SNR on a linear power scale.
    pub slope: f64,
    /// SNR window in dB, inclusive.
    pub window: (f64, f64),
    pub r2: f64,
    /// Points that entered the fit.
    pub points_used: usize,
    /// Points inside the window left out for having too few errors.
    pub points_flagged: usize,
}

/// Least-squares slope over points in `window` with at least `min_errors`
/// bit errors. Needs three qualifying points.
pub fn estimate_diversity(points: &[BerPoint], window: (f64, f64), min_errors: u64) -> Result<DiversityEstimate> {
    let in_window: Vec<&BerPoint> = points
        .iter()
        .filter(|p| p.snr_db >= window.0 - 1e-9 && p.snr_db <= window.1 + 1e-9)
        .collect();
    let used: Vec<(f64, f64)> = in_window
        .iter()
        .filter(|p| p.bit_errors >= min_errors && p.ber > 0.0)
        .map(|p| (p.snr_db / 10.0, p.ber.log10()))
        .collect();
    if used.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "{} of {} points in {}..{} dB have at least {min_errors} errors; need 3",
            used.len(),
            in_window.len(),
            window.0,
            window.1
        )));
    }
    let n = used.len() as f64;
    let mx = used.iter().map(|p| p.0).sum::<f64>() / n;
    let my = used.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = used.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = used.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = used.iter().map(|p| (p.1 - my).powi(2)).sum();
    let beta = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { beta * sxy / syy };
    Ok(DiversityEstimate {
        slope: -beta,
        window,
        r2,
        points_used: used.len(),
        points_flagged: in_window.len() - used.len(),
    })
}
