//! Oracles shared by the integration suites. Nothing here calls into the
//! code paths it is used to check.

#![allow(dead_code)]

use std::path::PathBuf;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7]
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for i in 0..7 {
        let dx = h * XGK[i];
        let s = f(c - dx) + f(c + dx);
        kronrod += WGK[i] * s;
        if i % 2 == 1 {
            gauss += WG[i / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Adaptive Gauss–Kronrod (7/15) integration to absolute tolerance `tol`.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let (v, err) = gk15(f, a, b);
        if err <= tol || depth == 0 {
            return v;
        }
        let m = 0.5 * (a + b);
        rec(f, a, m, tol / 2.0, depth - 1) + rec(f, m, b, tol / 2.0, depth - 1)
    }
    rec(f, a, b, tol, 40)
}

pub fn gaussian_density(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// `Φ(x) = ½ + ∫₀ˣ φ`, by quadrature.
pub fn phi_quadrature(x: f64) -> f64 {
    if x >= 0.0 {
        0.5 + integrate(&gaussian_density, 0.0, x, 1e-16)
    } else {
        0.5 - integrate(&gaussian_density, x, 0.0, 1e-16)
    }
}

/// Sum of positive and negative increments, computed directly.
pub fn positive_negative_parts(prices: &[f64]) -> (f64, f64) {
    prices.windows(2).fold((0.0, 0.0), |(up, down), w| {
        let d = w[1] - w[0];
        if d > 0.0 {
            (up + d, down)
        } else {
            (up, down - d)
        }
    })
}

/// Counts of `#rising − n` over all `2^{2n}` sign sequences, by explicit walk.
pub fn walk_counts(n: u32) -> Vec<u64> {
    let steps = 2 * n;
    let mut counts = vec![0u64; steps as usize + 1];
    for mask in 0u32..(1 << steps) {
        let mut position: i64 = 0;
        for bit in 0..steps {
            position += if mask >> bit & 1 == 1 { 1 } else { -1 };
        }
        // position = 2·rising − 2n, so rising = position/2 + n
        counts[(position / 2 + n as i64) as usize] += 1;
    }
    counts
}

pub fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

/// Two-sided Kolmogorov–Smirnov 1% critical value, large-sample form.
pub fn ks_critical_99(samples: usize) -> f64 {
    1.628 / (samples as f64).sqrt()
}

/// Golden output file and the CLI arguments producing it, relative to the
/// crate directory.
pub const GOLDEN_CASES: &[(&str, &[&str])] = &[
    (
        "analyze_three.json",
        &["analyze", "--input", "tests/golden/three.csv"],
    ),
    (
        "analyze_ticks.json",
        &["analyze", "--input", "tests/golden/ticks.csv"],
    ),
    (
        "dist_n50_a010.json",
        &["dist", "--n", "50", "--alpha", "0.1"],
    ),
    ("dist_n20.csv", &["dist", "--n", "20", "--format", "csv"]),
    (
        "simulate_n50_a010.json",
        &[
            "simulate",
            "--n",
            "50",
            "--alpha",
            "0.1",
            "--samples",
            "20000",
            "--seed",
            "3",
        ],
    ),
    (
        "fattails.json",
        &[
            "fattails",
            "--samples",
            "20000",
            "--bins",
            "40",
            "--seed",
            "1",
        ],
    ),
    (
        "fattails.csv",
        &[
            "fattails",
            "--samples",
            "20000",
            "--bins",
            "40",
            "--seed",
            "1",
            "--format",
            "csv",
        ],
    ),
    (
        "indicator.csv",
        &[
            "indicator",
            "--input",
            "tests/golden/ticks.csv",
            "--window",
            "400",
            "--n",
            "8",
        ],
    ),
    (
        "indicator.json",
        &[
            "indicator",
            "--input",
            "tests/golden/ticks.csv",
            "--window",
            "400",
            "--n",
            "8",
            "--format",
            "json",
        ],
    ),
];

/// Runs the built binary from the crate directory.
pub fn run_cli(bin: &str, args: &[&str]) -> std::process::Output {
    std::process::Command::new(bin)
        .args(args)
        .current_dir(crate_dir())
        .output()
        .expect("spawn cli")
}
