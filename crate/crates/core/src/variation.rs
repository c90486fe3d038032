//! Total variation, the Jordan decomposition `f = f⁺ − f⁻`, and the
//! oscillation-level variation estimate built from per-segment bounds.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ticks::{SegmentPartition, TickSeries};

/// Monotone non-decreasing components with `f_plus[i] − f_minus[i] = price[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct JordanPair {
    pub f_plus: Vec<f64>,
    pub f_minus: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VariationSummary {
    /// Total variation in price units.
    pub total: f64,
    /// Endpoint difference `f(b) − f(a)`.
    pub difference: f64,
    pub sigma_plus: f64,
    pub sigma_minus: f64,
}

impl VariationSummary {
    /// Residuals of `Σ⁺ − Σ⁻ = D`, `Σ⁺ + Σ⁻ = V` and `Σ⁺Σ⁻ = (V² − D²)/4`,
    /// each relative to the magnitude of the quantities involved.
    pub fn hyperbola_residuals(&self) -> HyperbolaResiduals {
        let scale = self
            .total
            .abs()
            .max(self.difference.abs())
            .max(f64::MIN_POSITIVE);
        let v2d2 = (self.total * self.total - self.difference * self.difference) / 4.0;
        HyperbolaResiduals {
            difference: (self.sigma_plus - self.sigma_minus - self.difference).abs() / scale,
            sum: (self.sigma_plus + self.sigma_minus - self.total).abs() / scale,
            product: (self.sigma_plus * self.sigma_minus - v2d2).abs() / (scale * scale),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HyperbolaResiduals {
    pub difference: f64,
    pub sum: f64,
    pub product: f64,
}

impl HyperbolaResiduals {
    pub fn max(&self) -> f64 {
        self.difference.max(self.sum).max(self.product)
    }
}

/// Supremum and infimum of prices inside one elementary segment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Oscillation {
    pub upper: f64,
    pub lower: f64,
    pub omega: f64,
}

impl Oscillation {
    pub fn new(upper: f64, lower: f64) -> Self {
        debug_assert!(lower <= upper);
        Self {
            upper,
            lower,
            omega: upper - lower,
        }
    }

    pub fn midpoint(&self) -> f64 {
        (self.upper + self.lower) / 2.0
    }

    /// `min(|M_k − m_{k−1}|, |M_{k−1} − m_k|)` between `prev` and `self`.
    pub fn transition_gap(&self, prev: &Oscillation) -> f64 {
        (self.upper - prev.lower)
            .abs()
            .min((prev.upper - self.lower).abs())
    }
}

/// Running variation `V(t_i)` along the sample, starting at 0.
pub fn running_variation(prices: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    std::iter::once(0.0)
        .chain(prices.windows(2).map(|w| {
            acc += (w[1] - w[0]).abs();
            acc
        }))
        .collect()
}

/// `f⁺ = (V + f)/2`, `f⁻ = (V − f)/2` evaluated at every tick.
///
/// Both parts accumulate one-signed increments from `±f(a)/2`, so they are
/// non-decreasing exactly, not just up to rounding.
pub fn jordan_decompose(series: &TickSeries) -> JordanPair {
    let prices = series.prices();
    let mut up = prices[0] / 2.0;
    let mut down = -prices[0] / 2.0;
    let mut f_plus = Vec::with_capacity(prices.len());
    let mut f_minus = Vec::with_capacity(prices.len());
    f_plus.push(up);
    f_minus.push(down);
    for w in prices.windows(2) {
        let step = w[1] - w[0];
        if step > 0.0 {
            up += step;
        } else {
            down -= step;
        }
        f_plus.push(up);
        f_minus.push(down);
    }
    JordanPair { f_plus, f_minus }
}

pub fn variation_summary(series: &TickSeries) -> VariationSummary {
    let prices = series.prices();
    let pair = jordan_decompose(series);
    let last = prices.len() - 1;
    let total: f64 = prices.windows(2).map(|w| (w[1] - w[0]).abs()).sum();
    VariationSummary {
        total,
        difference: prices[last] - prices[0],
        sigma_plus: pair.f_plus[last] - pair.f_plus[0],
        sigma_minus: pair.f_minus[last] - pair.f_minus[0],
    }
}

/// Per-segment `M`, `m` and `ω = M − m`.
pub fn segment_oscillations(
    series: &TickSeries,
    partition: &SegmentPartition,
) -> Result<Vec<Oscillation>> {
    let ranges = partition.assign(series)?;
    let prices = series.prices();
    Ok(ranges
        .into_par_iter()
        .map(|r| {
            let seg = &prices[r];
            let upper = seg.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lower = seg.iter().copied().fold(f64::INFINITY, f64::min);
            Oscillation::new(upper, lower)
        })
        .collect())
}

/// Oscillation-level variation:
/// `Σ_{k=1..n} (ω_{k−1} + ω_k) + Σ_{k=1..n} min(|M_k − m_{k−1}|, |M_{k−1} − m_k|)`.
pub fn oscillation_variation(oscillations: &[Oscillation]) -> Result<f64> {
    if oscillations.len() < 2 {
        return Err(Error::domain(
            "oscillations",
            format!("need at least 2, got {}", oscillations.len()),
        ));
    }
    Ok(oscillations
        .windows(2)
        .map(|w| w[0].omega + w[1].omega + w[1].transition_gap(&w[0]))
        .sum())
}
