//! Moments of the endpoint difference implied by `α`, the decline
//! probability `Φ(−μ/σ)`, the admissible-difference band, and a rolling
//! application of the whole pipeline to tick data.

use rayon::prelude::*;
use serde::Serialize;

use crate::counting::normal_cdf;
use crate::error::{Error, Result};
use crate::structure::{density_profile, structure_params};
use crate::ticks::{partition, TickSeries};
use crate::variation::segment_oscillations;

/// Estimated `α` is clamped to `±ALPHA_CLAMP` before use.
pub const ALPHA_CLAMP: f64 = 1.0 - 1e-9;

fn check_domain(n: u64, alpha: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::domain("n", "must be at least 1"));
    }
    if !(alpha.abs() < 1.0) {
        return Err(Error::domain("alpha", format!("{alpha} outside (-1, 1)")));
    }
    Ok(())
}

/// `μ = −2nα·ω` and `σ = ω·√(2n(1 − |α|))`, in price units.
pub fn moments_from_alpha(n: u64, alpha: f64, omega_bar: f64) -> Result<(f64, f64)> {
    check_domain(n, alpha)?;
    if !(omega_bar > 0.0 && omega_bar.is_finite()) {
        return Err(Error::domain("omega_bar", "must be positive and finite"));
    }
    let two_n = 2.0 * n as f64;
    Ok((
        -two_n * alpha * omega_bar,
        omega_bar * (two_n * (1.0 - alpha.abs())).sqrt(),
    ))
}

/// Inverts the moment relations given `μ/ω` and `σ²/ω²`:
/// `2n = σ² + |μ|`, `α = −μ/(2n)`.
pub fn alpha_from_moments(mu_omega: f64, sigma_omega_sq: f64) -> Result<(u64, f64)> {
    if !(sigma_omega_sq > 0.0 && sigma_omega_sq.is_finite()) {
        return Err(Error::domain(
            "sigma_omega_sq",
            "must be positive and finite",
        ));
    }
    if !mu_omega.is_finite() {
        return Err(Error::domain("mu_omega", "must be finite"));
    }
    let n = ((sigma_omega_sq + mu_omega.abs()) / 2.0).round();
    if n < 1.0 {
        return Err(Error::domain(
            "sigma_omega_sq",
            "σ² + |μ| must be at least 2 (one transition)",
        ));
    }
    let alpha = -mu_omega / (2.0 * n);
    if !(alpha.abs() < 1.0) {
        return Err(Error::domain("mu_omega", "implies |α| ≥ 1"));
    }
    Ok((n as u64, alpha))
}

/// `P(D ≤ 0) = Φ(−μ/σ)`.
pub fn prob_decline(mu: f64, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(Error::domain("sigma", "must be positive"));
    }
    Ok(normal_cdf(-mu / sigma))
}

/// Price band of admissible differences `|d − z0| ≤ 2n − |z0|` with
/// `z0 = −2nα`, scaled by `ω` and anchored at `anchor_price`.
pub fn variation_band(n: u64, alpha: f64, omega_bar: f64, anchor_price: f64) -> Result<(f64, f64)> {
    check_domain(n, alpha)?;
    let two_n = 2.0 * n as f64;
    let z0 = -two_n * alpha;
    let half = two_n - z0.abs();
    Ok((
        anchor_price + omega_bar * (z0 - half),
        anchor_price + omega_bar * (z0 + half),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IndicatorSnapshot {
    pub window_end: i64,
    pub n: u64,
    pub omega_bar: f64,
    pub alpha: f64,
    /// Estimated `α` before clamping.
    pub alpha_raw: f64,
    pub mu: f64,
    pub sigma: f64,
    pub p_decline: f64,
    pub band_lower: f64,
    pub band_upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RollingIndicator {
    pub window_ticks: usize,
    pub stride: usize,
    pub transitions: usize,
    pub epsilon_rho: f64,
    pub alpha_clamp: f64,
    pub snapshots: Vec<IndicatorSnapshot>,
    pub warnings: Vec<String>,
}

impl RollingIndicator {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("window_end,n,alpha,mu,sigma,p_decline,band_lower,band_upper\n");
        for s in &self.snapshots {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                s.window_end, s.n, s.alpha, s.mu, s.sigma, s.p_decline, s.band_lower, s.band_upper
            ));
        }
        out
    }
}

/// Window stride: a quarter window, at least one tick.
pub fn stride_for(window_ticks: usize) -> usize {
    ((window_ticks as f64 / 4.0).round() as usize).max(1)
}

fn snapshot(
    window: &TickSeries,
    transitions: usize,
    epsilon_rho: f64,
) -> Result<IndicatorSnapshot> {
    let part = partition(window, transitions)?;
    let osc = segment_oscillations(window, &part)?;
    let profile = density_profile(&osc, epsilon_rho)?;
    let params = structure_params(&osc, &profile)?;
    let alpha = params.alpha.clamp(-ALPHA_CLAMP, ALPHA_CLAMP);
    let n = transitions as u64;
    let omega_bar = profile.mean_oscillation();
    let (mu, sigma) = moments_from_alpha(n, alpha, omega_bar)?;
    let anchor = *window.prices().last().expect("series has ≥ 2 points");
    let (band_lower, band_upper) = variation_band(n, alpha, omega_bar, anchor)?;
    Ok(IndicatorSnapshot {
        window_end: window.span().1,
        n,
        omega_bar,
        alpha,
        alpha_raw: params.alpha,
        mu,
        sigma,
        p_decline: prob_decline(mu, sigma)?,
        band_lower,
        band_upper,
    })
}

/// Slides a window of `window_ticks` ticks over the series with stride
/// [`stride_for`]; windows whose estimation fails are skipped and noted in
/// `warnings`.
pub fn rolling_indicator(
    series: &TickSeries,
    window_ticks: usize,
    transitions: usize,
    epsilon_rho: f64,
) -> Result<RollingIndicator> {
    if transitions == 0 {
        return Err(Error::domain("transitions", "must be at least 1"));
    }
    if window_ticks < transitions + 1 {
        return Err(Error::domain(
            "window",
            format!(
                "{window_ticks} ticks cannot fill {} segments",
                transitions + 1
            ),
        ));
    }
    if window_ticks > series.len() {
        return Err(Error::domain(
            "window",
            format!("{window_ticks} exceeds series length {}", series.len()),
        ));
    }
    if !(epsilon_rho > 0.0 && epsilon_rho < 1.0) {
        return Err(Error::domain("epsilon_rho", "must lie in (0, 1)"));
    }
    let stride = stride_for(window_ticks);
    let starts: Vec<usize> = (0..=series.len() - window_ticks).step_by(stride).collect();
    let results: Vec<std::result::Result<IndicatorSnapshot, String>> = starts
        .par_iter()
        .map(|&start| {
            let window = series
                .slice(start..start + window_ticks)
                .map_err(|e| e.to_string())?;
            snapshot(&window, transitions, epsilon_rho)
                .map_err(|e| format!("window ending at {}: {e}", window.span().1))
        })
        .collect();

    let mut snapshots = Vec::new();
    let mut warnings = Vec::new();
    for r in results {
        match r {
            Ok(s) => snapshots.push(s),
            Err(w) => warnings.push(w),
        }
    }
    Ok(RollingIndicator {
        window_ticks,
        stride,
        transitions,
        epsilon_rho,
        alpha_clamp: ALPHA_CLAMP,
        snapshots,
        warnings,
    })
}
