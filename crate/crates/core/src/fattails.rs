//! Heavy-tailed distribution of the scaled difference.
//!
//! The drift is made a nonlinear odd function of `ζ`:
//! `α√(2n) = −sign(ζ)·(C₁ + C₂ζ²/2)`. Two constraints pin the coefficients:
//! a three-sigma point in the absolute frame maps to six sigma in the
//! relative frame (`C₁ + 18C₂ = 3`), and a small `ζ₀` in the relative frame
//! maps to zero (`C₁ + C₂ζ₀²/2 = ζ₀`). The closed-form CDF
//! `Φ[ζ − sign(ζ)(ζ² − ζ₀²)/12]` corresponds to `C₁ = −ζ₀²/12, C₂ = 1/6`;
//! both variants are available.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::counting::{normal_cdf, zeta_transform, SAMPLE_CHUNK};
use crate::error::{Error, Result};

/// Upper end of the monotone segment `(0, 6]` of the closed-form distortion.
pub const MONOTONE_LIMIT: f64 = 6.0;

/// Bisection width for inverting the distortion.
pub const INVERSION_TOL: f64 = 1e-10;

/// Thresholds at which tail masses are reported.
pub const TAIL_THRESHOLDS: [f64; 4] = [3.0, 4.0, 5.0, 6.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FatTailModel {
    pub zeta0: f64,
    pub c1: f64,
    pub c2: f64,
}

impl FatTailModel {
    /// Residuals of the two defining equations.
    pub fn residuals(&self) -> (f64, f64) {
        (
            self.c1 + 18.0 * self.c2 - 3.0,
            self.c1 + self.zeta0 * self.zeta0 / 2.0 * self.c2 - self.zeta0,
        )
    }
}

pub fn solve_coeffs(zeta0: f64) -> Result<FatTailModel> {
    if !(zeta0.is_finite() && zeta0 >= 0.0) {
        return Err(Error::domain(
            "zeta0",
            format!("{zeta0} must be finite and ≥ 0"),
        ));
    }
    let det = 18.0 - zeta0 * zeta0 / 2.0;
    if det == 0.0 {
        return Err(Error::domain(
            "zeta0",
            "singular coefficient system at ζ₀ = 6",
        ));
    }
    let c2 = (3.0 - zeta0) / det;
    Ok(FatTailModel {
        zeta0,
        c1: 3.0 - 18.0 * c2,
        c2,
    })
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// `α√(2n) = −sign(ζ)(C₁ + C₂ζ²/2)`; undefined at `ζ = 0`.
pub fn correction_term(zeta: f64, model: &FatTailModel) -> Result<f64> {
    if zeta == 0.0 {
        return Err(Error::domain("zeta", "correction is undefined at 0"));
    }
    Ok(-sign(zeta) * (model.c1 + model.c2 * zeta * zeta / 2.0))
}

/// Closed-form distortion `ζ − sign(ζ)(ζ² − ζ₀²)/12`, taken as 0 at `ζ = 0`.
pub fn distortion(zeta: f64, zeta0: f64) -> f64 {
    zeta - sign(zeta) * (zeta * zeta - zeta0 * zeta0) / 12.0
}

/// `P(ζ) ≈ Φ[ζ − sign(ζ)(ζ² − ζ₀²)/12]`.
pub fn fat_tail_cdf(zeta: f64, zeta0: f64) -> f64 {
    normal_cdf(distortion(zeta, zeta0))
}

/// CDF built from the solved coefficients: `Φ(ζ + α√(2n))`, small-`α` limit.
pub fn coefficient_cdf(zeta: f64, model: &FatTailModel) -> f64 {
    match correction_term(zeta, model) {
        Ok(c) => normal_cdf(zeta + c),
        Err(_) => 0.5,
    }
}

/// Largest `|closed form − coefficient form|` over `zeta_grid`.
pub fn coefficient_discrepancy(zeta0: f64, zeta_grid: &[f64]) -> Result<f64> {
    let model = solve_coeffs(zeta0)?;
    Ok(zeta_grid
        .iter()
        .map(|&z| (fat_tail_cdf(z, zeta0) - coefficient_cdf(z, &model)).abs())
        .fold(0.0, f64::max))
}

/// Grid points where the closed-form CDF decreases between neighbours.
pub fn monotonicity_violations(zeta0: f64, zeta_grid: &[f64]) -> Vec<f64> {
    zeta_grid
        .windows(2)
        .filter(|w| fat_tail_cdf(w[1], zeta0) < fat_tail_cdf(w[0], zeta0))
        .map(|w| w[1])
        .collect()
}

/// `Φ(ζ') − Φ(ζ)` with `ζ'` the absolute-frame transform.
pub fn tail_excess(zeta: f64, alpha: f64, n: u64) -> Result<f64> {
    Ok(normal_cdf(zeta_transform(zeta, alpha, n)?) - normal_cdf(zeta))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inversion {
    pub zeta: f64,
    /// The target lies beyond the monotone segment; `zeta` is pinned to its end.
    pub saturated: bool,
}

/// Solves `distortion(ζ, ζ₀) = u` on the monotone segment `[−6, 6]`.
///
/// Targets inside the jump `(−ζ₀²/12, ζ₀²/12)` map to 0; targets beyond
/// `distortion(6)` pin to `±6` and are flagged as saturated.
pub fn invert_distortion(u: f64, zeta0: f64) -> Inversion {
    let target = u.abs();
    let floor = zeta0 * zeta0 / 12.0;
    let ceiling = distortion(MONOTONE_LIMIT, zeta0);
    let s = sign(u);
    if target <= floor {
        return Inversion {
            zeta: 0.0,
            saturated: false,
        };
    }
    if target >= ceiling {
        return Inversion {
            zeta: s * MONOTONE_LIMIT,
            saturated: true,
        };
    }
    let (mut lo, mut hi) = (0.0, MONOTONE_LIMIT);
    while hi - lo > INVERSION_TOL {
        let mid = 0.5 * (lo + hi);
        if distortion(mid, zeta0) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Inversion {
        zeta: s * 0.5 * (lo + hi),
        saturated: false,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailMass {
    pub threshold: f64,
    pub model: f64,
    pub normal: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FatTailHistogram {
    pub samples: usize,
    pub edges: Vec<f64>,
    pub counts_model: Vec<u64>,
    pub counts_normal: Vec<u64>,
    /// `P(|ζ| > t)` for each of [`TAIL_THRESHOLDS`].
    pub tails: Vec<TailMass>,
    pub max_abs_model: f64,
    pub max_abs_normal: f64,
    /// Samples whose target fell beyond the monotone segment.
    pub saturated: u64,
    /// `ζ₀` of the first few saturated samples, in sample order.
    pub saturated_zeta0: Vec<f64>,
}

const SATURATION_EXAMPLES: usize = 5;
const HISTOGRAM_RANGE: f64 = MONOTONE_LIMIT;

impl FatTailHistogram {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_left,bin_right,count_model,count_normal\n");
        for (i, w) in self.edges.windows(2).enumerate() {
            out.push_str(&format!(
                "{},{},{},{}\n",
                w[0], w[1], self.counts_model[i], self.counts_normal[i]
            ));
        }
        out
    }
}

struct ChunkTally {
    model: Vec<u64>,
    normal: Vec<u64>,
    tail_model: [u64; 4],
    tail_normal: [u64; 4],
    max_model: f64,
    max_normal: f64,
    saturated: u64,
    saturated_zeta0: Vec<f64>,
}

fn bin_of(x: f64, bins: usize) -> usize {
    let w = 2.0 * HISTOGRAM_RANGE / bins as f64;
    (((x + HISTOGRAM_RANGE) / w).floor().max(0.0) as usize).min(bins - 1)
}

/// Monte-Carlo histogram of the heavy-tailed model next to the plain normal.
///
/// Each sample draws `ζ₀ ~ U[0, 1)` and `u ~ N(0, 1)`; the normal histogram
/// records `u` and the model records the inverse distortion of `u`, so both
/// share the same underlying draws. Bins split `[−6, 6]` evenly.
pub fn simulate_histogram(samples: usize, bins: usize, seed: u64) -> Result<FatTailHistogram> {
    if samples < 1000 {
        return Err(Error::domain("samples", "must be at least 1000"));
    }
    if bins < 20 {
        return Err(Error::domain("bins", "must be at least 20"));
    }
    let chunks = samples.div_ceil(SAMPLE_CHUNK);
    let tallies: Vec<ChunkTally> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk as u64);
            let len = SAMPLE_CHUNK.min(samples - chunk * SAMPLE_CHUNK);
            let mut t = ChunkTally {
                model: vec![0; bins],
                normal: vec![0; bins],
                tail_model: [0; 4],
                tail_normal: [0; 4],
                max_model: 0.0,
                max_normal: 0.0,
                saturated: 0,
                saturated_zeta0: Vec::new(),
            };
            for _ in 0..len {
                let zeta0: f64 = rng.random();
                let u: f64 = rng.sample(StandardNormal);
                let inv = invert_distortion(u, zeta0);
                if inv.saturated {
                    t.saturated += 1;
                    if t.saturated_zeta0.len() < SATURATION_EXAMPLES {
                        t.saturated_zeta0.push(zeta0);
                    }
                }
                t.model[bin_of(inv.zeta, bins)] += 1;
                t.normal[bin_of(u, bins)] += 1;
                for (i, &th) in TAIL_THRESHOLDS.iter().enumerate() {
                    t.tail_model[i] += (inv.zeta.abs() > th) as u64;
                    t.tail_normal[i] += (u.abs() > th) as u64;
                }
                t.max_model = t.max_model.max(inv.zeta.abs());
                t.max_normal = t.max_normal.max(u.abs());
            }
            t
        })
        .collect();

    let mut counts_model = vec![0u64; bins];
    let mut counts_normal = vec![0u64; bins];
    let mut tail_model = [0u64; 4];
    let mut tail_normal = [0u64; 4];
    let mut max_abs_model: f64 = 0.0;
    let mut max_abs_normal: f64 = 0.0;
    let mut saturated = 0;
    let mut saturated_zeta0 = Vec::new();
    for t in tallies {
        counts_model
            .iter_mut()
            .zip(&t.model)
            .for_each(|(a, b)| *a += b);
        counts_normal
            .iter_mut()
            .zip(&t.normal)
            .for_each(|(a, b)| *a += b);
        for i in 0..4 {
            tail_model[i] += t.tail_model[i];
            tail_normal[i] += t.tail_normal[i];
        }
        max_abs_model = max_abs_model.max(t.max_model);
        max_abs_normal = max_abs_normal.max(t.max_normal);
        saturated += t.saturated;
        saturated_zeta0.extend(t.saturated_zeta0);
    }
    saturated_zeta0.truncate(SATURATION_EXAMPLES);

    let w = 2.0 * HISTOGRAM_RANGE / bins as f64;
    let edges = (0..=bins)
        .map(|i| -HISTOGRAM_RANGE + i as f64 * w)
        .collect();
    let tails = TAIL_THRESHOLDS
        .iter()
        .enumerate()
        .map(|(i, &threshold)| TailMass {
            threshold,
            model: tail_model[i] as f64 / samples as f64,
            normal: tail_normal[i] as f64 / samples as f64,
        })
        .collect();
    Ok(FatTailHistogram {
        samples,
        edges,
        counts_model,
        counts_normal,
        tails,
        max_abs_model,
        max_abs_normal,
        saturated,
        saturated_zeta0,
    })
}
