//! Brute-force path enumeration and seeded sampling of differences.

use std::collections::BTreeMap;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::frame_for_alpha;
use crate::error::{Error, Result};

/// Largest `n'` accepted by [`enumerate_paths`] (`2^{24}` assignments).
pub const MAX_ENUMERATION: u64 = 12;

/// Samples per independently seeded chunk.
pub const SAMPLE_CHUNK: usize = 1 << 16;

/// Walks every assignment of `2n'` unit oscillations to the rising or falling
/// part and counts the resulting differences `z = (#rising − n') + z0/2`.
pub fn enumerate_paths(n_prime: u64, z0: i64) -> Result<BTreeMap<i64, u64>> {
    if n_prime == 0 || n_prime > MAX_ENUMERATION {
        return Err(Error::domain(
            "n_prime",
            format!("must lie in 1..={MAX_ENUMERATION}, got {n_prime}"),
        ));
    }
    if z0 % 2 != 0 {
        return Err(Error::domain("z0", format!("{z0} is odd")));
    }
    let steps = 2 * n_prime as u32;
    let mut tally = vec![0u64; steps as usize + 1];
    for mask in 0u64..1 << steps {
        tally[mask.count_ones() as usize] += 1;
    }
    Ok(tally
        .into_iter()
        .enumerate()
        .map(|(rising, count)| (rising as i64 - n_prime as i64 + z0 / 2, count))
        .collect())
}

/// Number of rising oscillations among `steps` fair assignments.
fn rising_count(rng: &mut ChaCha8Rng, steps: u64) -> u64 {
    let mut left = steps;
    let mut rising = 0;
    while left >= 64 {
        rising += rng.next_u64().count_ones() as u64;
        left -= 64;
    }
    if left > 0 {
        rising += (rng.next_u64() & ((1u64 << left) - 1)).count_ones() as u64;
    }
    rising
}

/// Draws `count` scaled differences `d = 2z` for transition count `n` under
/// drift `alpha`.
///
/// Chunk `i` of [`SAMPLE_CHUNK`] samples uses ChaCha stream `i` of `seed`,
/// so the output depends only on `(n, alpha, count, seed)`.
pub fn sample_difference(n: u64, alpha: f64, count: usize, seed: u64) -> Result<Vec<i64>> {
    let frame = frame_for_alpha(n, alpha)?;
    let steps = 2 * frame.n_prime;
    let offset = frame.z0 - 2 * frame.n_prime as i64;

    let mut out = vec![0i64; count];
    out.par_chunks_mut(SAMPLE_CHUNK)
        .enumerate()
        .for_each(|(chunk, slots)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk as u64);
            for slot in slots {
                *slot = 2 * rising_count(&mut rng, steps) as i64 + offset;
            }
        });
    Ok(out)
}
