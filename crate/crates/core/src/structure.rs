//! Density of oscillation over elementary segments and the structure
//! parameters derived from it: non-uniformity `α₁`, anisotropy `α₂`, their
//! sum `α`, and the model variation `2nλρ(1 + α)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::variation::Oscillation;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityProfile {
    /// Oscillation bound `λ`: the largest segment oscillation.
    pub lambda: f64,
    /// `ρ_k = ω_k / λ`, one per segment.
    pub densities: Vec<f64>,
    /// Mean density over all `n + 1` segments.
    pub rho_bar: f64,
    pub epsilon_rho: f64,
    /// Transition count (segments − 1).
    pub n: usize,
}

impl DensityProfile {
    /// Average oscillation `ω = λρ` in price units.
    pub fn mean_oscillation(&self) -> f64 {
        self.lambda * self.rho_bar
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StructureParams {
    pub alpha1: f64,
    pub alpha2: f64,
    pub alpha: f64,
    /// `2nλρ(1 + α₁ + α₂)`.
    pub v_model: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityCondition {
    /// Share of neighbouring segment pairs with `|ρ_k − ρ_{k−1}| < ε_ρ`.
    pub fraction_ok: f64,
    pub worst_gap: f64,
}

pub fn density_profile(oscillations: &[Oscillation], epsilon_rho: f64) -> Result<DensityProfile> {
    if oscillations.len() < 2 {
        return Err(Error::domain(
            "oscillations",
            format!("need at least 2, got {}", oscillations.len()),
        ));
    }
    if !(epsilon_rho > 0.0 && epsilon_rho < 1.0) {
        return Err(Error::domain("epsilon_rho", "must lie in (0, 1)"));
    }
    let lambda = oscillations.iter().map(|o| o.omega).fold(0.0, f64::max);
    if !(lambda > 0.0) {
        return Err(Error::ZeroOscillation);
    }
    let densities: Vec<f64> = oscillations.iter().map(|o| o.omega / lambda).collect();
    let rho_bar = densities.iter().sum::<f64>() / densities.len() as f64;
    Ok(DensityProfile {
        lambda,
        densities,
        rho_bar,
        epsilon_rho,
        n: oscillations.len() - 1,
    })
}

/// First `digits` binary digits of `rho` in `[0, 1]`, truncating.
///
/// `rho = 1` yields all ones, the largest expansion representable with a
/// leading zero-integer part.
pub fn binary_digits(rho: f64, digits: usize) -> Result<Vec<u8>> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::domain("rho", format!("{rho} outside [0, 1]")));
    }
    if digits == 0 {
        return Err(Error::domain("digits", "must be at least 1"));
    }
    // doubling and subtracting 1 are exact in binary floating point
    let mut x = rho;
    Ok((0..digits)
        .map(|_| {
            x *= 2.0;
            if x >= 1.0 {
                x -= 1.0;
                1
            } else {
                0
            }
        })
        .collect())
}

/// `Σ_j bit_j / 2^j`.
pub fn reconstruct(bits: &[u8]) -> f64 {
    bits.iter()
        .enumerate()
        .map(|(j, &b)| b as f64 * 0.5f64.powi(j as i32 + 1))
        .sum()
}

pub fn density_condition(profile: &DensityProfile) -> DensityCondition {
    let gaps: Vec<f64> = profile
        .densities
        .windows(2)
        .map(|w| (w[1] - w[0]).abs())
        .collect();
    let ok = gaps.iter().filter(|&&g| g < profile.epsilon_rho).count();
    DensityCondition {
        fraction_ok: ok as f64 / gaps.len() as f64,
        worst_gap: gaps.iter().copied().fold(0.0, f64::max),
    }
}

/// Direction of the transition from `prev` to `next`: −1 when the segment
/// midpoint rises, +1 when it falls, 0 on ties.
pub fn transition_sign(prev: &Oscillation, next: &Oscillation) -> f64 {
    let delta = next.midpoint() - prev.midpoint();
    if delta > 0.0 {
        -1.0
    } else if delta < 0.0 {
        1.0
    } else {
        0.0
    }
}

pub fn structure_params(
    oscillations: &[Oscillation],
    profile: &DensityProfile,
) -> Result<StructureParams> {
    if oscillations.len() != profile.densities.len() {
        return Err(Error::domain(
            "profile",
            "built from a different oscillation sequence",
        ));
    }
    let n = profile.n as f64;
    let rho = &profile.densities;
    let norm = 2.0 * n * profile.rho_bar;
    let alpha1 = (rho[0] - rho[profile.n]) / norm;
    let shift: f64 = oscillations
        .windows(2)
        .map(|w| transition_sign(&w[0], &w[1]) * w[1].transition_gap(&w[0]))
        .sum();
    let alpha2 = shift / (norm * profile.lambda);
    let alpha = alpha1 + alpha2;
    Ok(StructureParams {
        alpha1,
        alpha2,
        alpha,
        v_model: norm * profile.lambda * (1.0 + alpha),
    })
}
