//! Counting functions by their endpoint difference.
//!
//! Over `2n` unit oscillations each assigned to the rising or falling part,
//! the number with difference `z` (in units of the mean oscillation) is
//! `C(2n, z + n)`. A drift shifts the admissible window by `z0` and leaves
//! `n' = n − |z0|/2` free oscillations.

mod binomial;
mod normal;
mod paths;

pub use binomial::{
    binom_pz_exact, binomial, binomial_row, pz_exact_ratio, pz_gaussian, pz_log_space, DyadicProb,
    EXACT_LIMIT,
};
pub use normal::{normal_cdf, normal_pdf};
pub use paths::{enumerate_paths, sample_difference, MAX_ENUMERATION, SAMPLE_CHUNK};

use serde::Serialize;

use crate::error::{Error, Result};

/// Exact `p(z)` table over `z ∈ [−n, n]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CountingDistribution {
    pub n: u64,
    pub probabilities: Vec<(i64, f64)>,
}

impl CountingDistribution {
    pub fn new(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("n", "must be at least 1"));
        }
        let probabilities = if n <= EXACT_LIMIT {
            binomial_row(n)
                .into_iter()
                .enumerate()
                .map(|(k, c)| {
                    let p = DyadicProb {
                        numerator: c,
                        log2_denominator: 2 * n,
                    };
                    (k as i64 - n as i64, p.to_f64())
                })
                .collect()
        } else {
            (-(n as i64)..=n as i64)
                .map(|z| (z, pz_log_space(n, z)))
                .collect()
        };
        Ok(Self { n, probabilities })
    }

    pub fn get(&self, z: i64) -> f64 {
        if z.unsigned_abs() > self.n {
            return 0.0;
        }
        self.probabilities[(z + self.n as i64) as usize].1
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().map(|(_, p)| p).sum()
    }
}

/// `ζ_z = z·√(2/n)`.
pub fn zeta_of_z(n: u64, z: i64) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("n", "must be at least 1"));
    }
    Ok(z as f64 * (2.0 / n as f64).sqrt())
}

/// Grid spacing `Δζ = √(2/n)`.
pub fn zeta_step(n: u64) -> f64 {
    (2.0 / n as f64).sqrt()
}

/// The difference window after shifting by `z0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ShiftedFrame {
    pub n: u64,
    pub z0: i64,
    pub n_prime: u64,
    pub z_min: i64,
    pub z_max: i64,
}

impl ShiftedFrame {
    /// True iff `|2z − z0| ≤ 2n − |z0|`.
    pub fn admits(&self, z: i64) -> bool {
        (2 * z - self.z0).abs() <= 2 * self.n as i64 - self.z0.abs()
    }

    /// Shifted `p(z) = C(2n', z − z0/2 + n') / 2^{2n'}`, normalized over the
    /// `n'` support.
    pub fn pz(&self, z: i64) -> f64 {
        binom_pz_exact(self.n_prime, z - self.z0 / 2).unwrap_or(0.0)
    }
}

pub fn shift_frame(n: u64, z0: i64) -> Result<ShiftedFrame> {
    if n == 0 {
        return Err(Error::domain("n", "must be at least 1"));
    }
    if z0 % 2 != 0 {
        return Err(Error::domain("z0", format!("{z0} is odd")));
    }
    if z0.unsigned_abs() >= 2 * n {
        return Err(Error::domain(
            "z0",
            format!(
                "|z0| = {} leaves no free oscillations for n = {n}",
                z0.abs()
            ),
        ));
    }
    let ni = n as i64;
    Ok(ShiftedFrame {
        n,
        z0,
        n_prime: n - z0.unsigned_abs() / 2,
        z_min: (-ni).max(-ni + z0),
        z_max: ni.min(ni + z0),
    })
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha.abs() < 1.0) {
        return Err(Error::domain("alpha", format!("{alpha} outside (-1, 1)")));
    }
    Ok(())
}

/// `−2nα` rounded to the nearest even integer; exact odd values round
/// toward zero.
pub fn even_shift(n: u64, alpha: f64) -> i64 {
    let half = -(n as f64) * alpha;
    let lower = half.floor();
    let frac = half - lower;
    // on a tie, step toward zero: down for positive, up for negative
    let k = if frac > 0.5 || (frac == 0.5 && half < 0.0) {
        lower + 1.0
    } else {
        lower
    };
    2 * k as i64
}

/// Frame for drift `alpha`: `z0 = even_shift(n, alpha)`.
pub fn frame_for_alpha(n: u64, alpha: f64) -> Result<ShiftedFrame> {
    check_alpha(alpha)?;
    shift_frame(n, even_shift(n, alpha))
}

/// `ζ' = (ζ + α√(2n)) / √(1 − |α|)`.
pub fn zeta_transform(zeta: f64, alpha: f64, n: u64) -> Result<f64> {
    check_alpha(alpha)?;
    if n == 0 {
        return Err(Error::domain("n", "must be at least 1"));
    }
    Ok((zeta + alpha * (2.0 * n as f64).sqrt()) / (1.0 - alpha.abs()).sqrt())
}

/// `P(ζ ≤ 0) = Φ(α√(2n) / √(1 − |α|))`.
pub fn prob_nonpositive(alpha: f64, n: u64) -> Result<f64> {
    Ok(normal_cdf(zeta_transform(0.0, alpha, n)?))
}

/// One row of the exported distribution table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistRow {
    pub z: i64,
    pub p_exact: f64,
    pub p_gauss: f64,
    pub zeta: f64,
}

/// Table over the admissible window of the frame for `(n, alpha)`.
pub fn distribution_table(n: u64, alpha: f64) -> Result<(ShiftedFrame, Vec<DistRow>)> {
    let frame = frame_for_alpha(n, alpha)?;
    let shift = frame.z0 / 2;
    let rows = (frame.z_min..=frame.z_max)
        .map(|z| DistRow {
            z,
            p_exact: frame.pz(z),
            p_gauss: pz_gaussian(frame.n_prime, z - shift),
            zeta: z as f64 * zeta_step(n),
        })
        .collect();
    Ok((frame, rows))
}

pub fn table_to_csv(rows: &[DistRow]) -> String {
    let mut out = String::from("z,p_exact,p_gauss,zeta\n");
    for r in rows {
        out.push_str(&format!(
            "{},{:e},{:e},{}\n",
            r.z, r.p_exact, r.p_gauss, r.zeta
        ));
    }
    out
}
