//! Independent oracles shared by the integration tests.
//!
//! These deliberately avoid the crate's planner so they can catch it being wrong.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const INDEX_MAX: u32 = 30;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_angle(rng: &mut ChaCha8Rng) -> f64 {
    rng.gen_range(-std::f64::consts::FRAC_PI_2..=std::f64::consts::FRAC_PI_2)
}

fn sign(r: f64) -> i8 {
    if r >= 0.0 {
        1
    } else {
        -1
    }
}

/// Brute-force greedy: each step picks the index whose micro-angle brings the
/// residual closest to zero in absolute terms.
pub fn greedy_linear(theta: f64, eps: f64) -> (Vec<u32>, Vec<i8>) {
    greedy(theta, eps, |r, i| {
        (r.abs() - (2f64).powi(-(i as i32)).atan()).abs()
    })
}

/// Brute-force greedy: each step picks the index whose micro-angle is closest
/// to the residual in ratio (log) terms.
pub fn greedy_log_ratio(theta: f64, eps: f64) -> (Vec<u32>, Vec<i8>) {
    greedy(theta, eps, |r, i| (r.abs().log2() + i as f64).abs())
}

fn greedy(theta: f64, eps: f64, cost: impl Fn(f64, u32) -> f64) -> (Vec<u32>, Vec<i8>) {
    let (mut r, mut idx, mut dir) = (theta, Vec::new(), Vec::new());
    while r.abs() > eps && idx.len() < 64 {
        let best = (0..=INDEX_MAX)
            .min_by(|&a, &b| cost(r, a).total_cmp(&cost(r, b)))
            .unwrap();
        let s = sign(r);
        r -= s as f64 * (2f64).powi(-(best as i32)).atan();
        idx.push(best);
        dir.push(s);
    }
    (idx, dir)
}

/// Direct O(N²) DCT-II with the ½C(k) normalization.
pub fn naive_dct8(x: &[f64; 8]) -> [f64; 8] {
    let mut out = [0.0; 8];
    for (k, o) in out.iter_mut().enumerate() {
        let c = if k == 0 {
            std::f64::consts::FRAC_1_SQRT_2
        } else {
            1.0
        };
        *o = 0.5
            * c
            * x.iter()
                .enumerate()
                .map(|(n, v)| {
                    v * ((2 * n + 1) as f64 * k as f64 * std::f64::consts::PI / 16.0).cos()
                })
                .sum::<f64>();
    }
    out
}

pub fn random_int8_vec(rng: &mut ChaCha8Rng) -> [f64; 8] {
    std::array::from_fn(|_| rng.gen_range(-128i32..=127) as f64)
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}
