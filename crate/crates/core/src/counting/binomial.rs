//! `p(z) = C(2n, z + n) / 2^{2n}`: exact big-integer evaluation for moderate
//! `n` and a saddle-point log-space evaluation beyond.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest `n` evaluated with exact integer arithmetic.
pub const EXACT_LIMIT: u64 = 500;

/// A probability `numerator / 2^log2_denominator` held exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DyadicProb {
    pub numerator: BigUint,
    pub log2_denominator: u64,
}

impl DyadicProb {
    /// Correctly rounded conversion (barring subnormal results).
    pub fn to_f64(&self) -> f64 {
        if self.numerator.is_zero() {
            return 0.0;
        }
        let bits = self.numerator.bits();
        let (mantissa, shift) = if bits <= 64 {
            (self.numerator.to_u64().expect("fits in 64 bits"), 0)
        } else {
            let shift = bits - 64;
            let top = (&self.numerator >> shift)
                .to_u64()
                .expect("fits in 64 bits");
            // fold discarded bits into a sticky bit so u64 -> f64 rounds correctly
            let lost = self.numerator.trailing_zeros().unwrap_or(0) < shift;
            (top | lost as u64, shift)
        };
        let exp = shift as i64 - self.log2_denominator as i64;
        libm::ldexp(
            mantissa as f64,
            exp.clamp(i32::MIN as i64, i32::MAX as i64) as i32,
        )
    }
}

/// `C(m, k)` by the multiplicative recurrence.
pub fn binomial(m: u64, k: u64) -> BigUint {
    if k > m {
        return BigUint::zero();
    }
    let k = k.min(m - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= m - i;
        acc /= i + 1;
    }
    acc
}

/// Row `C(2n, 0..=2n)` of Pascal's triangle.
pub fn binomial_row(n: u64) -> Vec<BigUint> {
    let m = 2 * n;
    let mut row = Vec::with_capacity(m as usize + 1);
    let mut c = BigUint::one();
    row.push(c.clone());
    for k in 0..m {
        c = c * (m - k) / (k + 1);
        row.push(c.clone());
    }
    row
}

fn check_n(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::domain("n", "must be at least 1"));
    }
    Ok(())
}

/// Exact `p(z)` as a dyadic rational.
pub fn pz_exact_ratio(n: u64, z: i64) -> Result<DyadicProb> {
    check_n(n)?;
    let numerator = if z.unsigned_abs() > n {
        BigUint::zero()
    } else {
        binomial(2 * n, (z + n as i64) as u64)
    };
    Ok(DyadicProb {
        numerator,
        log2_denominator: 2 * n,
    })
}

/// `p(z)`: exact for `n ≤ EXACT_LIMIT`, log-space beyond.
pub fn binom_pz_exact(n: u64, z: i64) -> Result<f64> {
    check_n(n)?;
    if z.unsigned_abs() > n {
        return Ok(0.0);
    }
    if n <= EXACT_LIMIT {
        Ok(pz_exact_ratio(n, z)?.to_f64())
    } else {
        Ok(pz_log_space(n, z))
    }
}

/// Gaussian approximation `e^{−z²/n} / √(πn)`.
pub fn pz_gaussian(n: u64, z: i64) -> f64 {
    let n = n as f64;
    let z = z as f64;
    (-z * z / n).exp() / (std::f64::consts::PI * n).sqrt()
}

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// `ln(k!) − [(k + ½)ln k − k + ln√(2π)]`, the Stirling remainder.
fn stirling_error(k: f64) -> f64 {
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    if k <= 15.0 {
        let ln_fact: f64 = (2..=k as u64).map(|i| i as f64).product::<f64>().ln();
        return ln_fact - (k + 0.5) * k.ln() + k - LN_SQRT_2PI;
    }
    let kk = k * k;
    if k > 500.0 {
        (S0 - S1 / kk) / k
    } else if k > 80.0 {
        (S0 - (S1 - S2 / kk) / kk) / k
    } else if k > 35.0 {
        (S0 - (S1 - (S2 - S3 / kk) / kk) / kk) / k
    } else {
        (S0 - (S1 - (S2 - (S3 - S4 / kk) / kk) / kk) / kk) / k
    }
}

/// Deviance term `x ln(x/m) + m − x`, computed without cancellation near `x = m`.
fn deviance(x: f64, m: f64) -> f64 {
    if (x - m).abs() < 0.1 * (x + m) {
        let v = (x - m) / (x + m);
        let v2 = v * v;
        let mut s = (x - m) * v;
        let mut ej = 2.0 * x * v;
        for j in 1.. {
            ej *= v2;
            let next = s + ej / (2 * j + 1) as f64;
            if next == s {
                break;
            }
            s = next;
        }
        s
    } else {
        x * (x / m).ln() + m - x
    }
}

/// Saddle-point evaluation of `C(2n, k) / 2^{2n}` with `k = z + n`.
pub fn pz_log_space(n: u64, z: i64) -> f64 {
    if z.unsigned_abs() > n {
        return 0.0;
    }
    let trials = (2 * n) as f64;
    // the table is symmetric; evaluate on one side so p(z) = p(−z) exactly
    let k = (n - z.unsigned_abs()) as f64;
    if k == 0.0 || k == trials {
        return libm::ldexp(1.0, -(2 * n as i64).min(i32::MAX as i64) as i32);
    }
    let half = trials / 2.0;
    let lc = stirling_error(trials)
        - stirling_error(k)
        - stirling_error(trials - k)
        - deviance(k, half)
        - deviance(trials - k, half);
    let lf = LN_2PI + k.ln() + (-k / trials).ln_1p();
    (lc - 0.5 * lf).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(binom_pz_exact(1, 0).unwrap(), 0.5);
        assert_eq!(binom_pz_exact(1, 1).unwrap(), 0.25);
        assert_eq!(binom_pz_exact(1, -1).unwrap(), 0.25);
        assert_eq!(binom_pz_exact(2, 0).unwrap(), 6.0 / 16.0);
        assert_eq!(binom_pz_exact(5, 7).unwrap(), 0.0);
        assert!(binom_pz_exact(0, 0).is_err());
    }

    #[test]
    fn binomial_known() {
        assert_eq!(binomial(5, 2), BigUint::from(10u32));
        assert_eq!(binomial(10, 5), BigUint::from(252u32));
        assert_eq!(binomial(0, 0), BigUint::one());
        assert_eq!(binomial(1000, 2), BigUint::from(499_500u32));
        assert_eq!(binomial(3, 4), BigUint::zero());
        let row = binomial_row(30);
        for (k, c) in row.iter().enumerate() {
            assert_eq!(*c, binomial(60, k as u64));
        }
    }

    #[test]
    fn dyadic_conversion_rounds() {
        // 2^70 + 1 over 2^70 rounds to 1
        let p = DyadicProb {
            numerator: (BigUint::one() << 70u32) + 1u32,
            log2_denominator: 70,
        };
        assert_eq!(p.to_f64(), 1.0);
        // halfway + sticky rounds up: 2^64 + 2^11 + 1 has 65 bits
        let num = (BigUint::one() << 64u32) + (BigUint::one() << 11u32) + 1u32;
        let expect = 1.0 + 2f64.powi(-52);
        let p = DyadicProb {
            numerator: num,
            log2_denominator: 64,
        };
        assert_eq!(p.to_f64(), expect);
    }

    #[test]
    fn log_space_matches_exact_at_limit() {
        let n = EXACT_LIMIT;
        for z in -(n as i64)..=(n as i64) {
            let exact = binom_pz_exact(n, z).unwrap();
            let approx = pz_log_space(n, z);
            assert!(
                ((approx - exact) / exact).abs() < 1e-12,
                "z = {z}: {approx} vs {exact}"
            );
        }
    }

    #[test]
    fn log_space_small_n() {
        for n in 1..40u64 {
            for z in -(n as i64)..=(n as i64) {
                let exact = binom_pz_exact(n, z).unwrap();
                let approx = pz_log_space(n, z);
                assert!(((approx - exact) / exact).abs() < 1e-12, "n={n} z={z}");
            }
        }
    }

    #[test]
    fn log_space_normalized_large_n() {
        let n = 5000u64;
        let total: f64 = (-(n as i64)..=n as i64)
            .map(|z| binom_pz_exact(n, z).unwrap())
            .sum();
        assert!((total - 1.0).abs() < 1e-12, "{total}");
    }

    #[test]
    fn gaussian_values() {
        assert!((pz_gaussian(100, 0) - 0.056_418_958_354_775_63).abs() < 1e-15);
        assert!((pz_gaussian(100, 10) - 0.020_755_374_871_029_7).abs() < 1e-15);
        assert_eq!(pz_gaussian(37, 5), pz_gaussian(37, -5));
    }
}
