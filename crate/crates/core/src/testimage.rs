//! Deterministic synthetic test images.
//!
//! Stand-ins for natural photographs when no reference image is at hand.
//! Everything is seeded, so the same call always yields the same pixels.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

use crate::codec::GrayImage;

pub const DEFAULT_SEED: u64 = 0x00C0_D1C0;

fn to_u8(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

fn field(width: usize, height: usize, f: impl Fn(usize, usize) -> f64) -> GrayImage {
    GrayImage::from_fn(width, height, |x, y| to_u8(f(x, y)))
}

/// Approximately normal noise (Irwin-Hall with four terms), unit variance.
fn normal_noise(width: usize, height: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..width * height)
        .map(|_| ((0..4).map(|_| rng.gen::<f64>()).sum::<f64>() - 2.0) * 3f64.sqrt())
        .collect()
}

/// Separable box blur with edge clamping.
fn box_blur(data: &[f64], width: usize, height: usize, radius: usize) -> Vec<f64> {
    let span = (2 * radius + 1) as f64;
    let mut tmp = vec![0.0; data.len()];
    for y in 0..height {
        for x in 0..width {
            let s: f64 = (0..=2 * radius)
                .map(|k| data[y * width + (x + k).saturating_sub(radius).min(width - 1)])
                .sum();
            tmp[y * width + x] = s / span;
        }
    }
    let mut out = vec![0.0; data.len()];
    for y in 0..height {
        for x in 0..width {
            let s: f64 = (0..=2 * radius)
                .map(|k| tmp[(y + k).saturating_sub(radius).min(height - 1) * width + x])
                .sum();
            out[y * width + x] = s / span;
        }
    }
    out
}

/// Smooth ramp with a quadratic vertical term.
pub fn gradient(width: usize, height: usize) -> GrayImage {
    field(width, height, |x, y| {
        let (u, v) = (x as f64 / width as f64, y as f64 / height as f64);
        20.0 + 150.0 * u + 80.0 * v * v
    })
}

/// Circular zone plate whose local frequency reaches Nyquist at the edges.
pub fn zone_plate(width: usize, height: usize) -> GrayImage {
    let (cx, cy) = (width as f64 / 2.0, height as f64 / 2.0);
    let n = width.max(height) as f64;
    field(width, height, |x, y| {
        let r2 = (x as f64 - cx).powi(2) + (y as f64 - cy).powi(2);
        127.5 + 100.0 * (PI * r2 / n).cos()
    })
}

/// Uniform white noise.
pub fn noise(width: usize, height: usize, seed: u64) -> GrayImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    GrayImage::from_fn(width, height, |_, _| rng.gen())
}

/// Low-pass filtered noise around mid gray.
pub fn texture(width: usize, height: usize, seed: u64) -> GrayImage {
    let blurred = box_blur(
        &box_blur(&normal_noise(width, height, seed), width, height, 2),
        width,
        height,
        1,
    );
    field(width, height, |x, y| 128.0 + 180.0 * blurred[y * width + x])
}

/// Photograph-like composite: illumination gradient, soft waves, flat
/// objects with sharp edges, a ring pattern, and fine-grained texture.
pub fn scene(width: usize, height: usize, seed: u64) -> GrayImage {
    let g = normal_noise(width, height, seed);
    let soft = box_blur(&box_blur(&g, width, height, 1), width, height, 1);
    let (w, h) = (width as f64, height as f64);
    field(width, height, |x, y| {
        let (xf, yf) = (x as f64, y as f64);
        let mut v = 60.0 + 100.0 * xf / w + 40.0 * (yf / (h / 13.8)).sin() * (xf / (w / 9.7)).cos();
        if (xf - 0.35 * w).powi(2) + (yf - 0.39 * h).powi(2) < (0.18 * w).powi(2) {
            v += 50.0;
        }
        if (xf - 0.74 * w).abs() < 0.12 * w && (yf - 0.64 * h).abs() < 0.18 * h {
            v -= 40.0;
        }
        let r2 = (xf - 0.78 * w).powi(2) + (yf - 0.21 * h).powi(2);
        if r2 < (0.16 * w).powi(2) {
            v += 30.0 * (r2 / (w * w / 290.0)).cos();
        }
        let i = y * width + x;
        v + 40.0 * soft[i] + 3.0 * g[i]
    })
}

/// The bundled 512×512 corpus, by name.
pub fn corpus(seed: u64) -> Vec<(&'static str, GrayImage)> {
    vec![
        ("scene", scene(512, 512, seed)),
        ("gradient", gradient(512, 512)),
        ("zone_plate", zone_plate(512, 512)),
        ("texture", texture(512, 512, seed)),
    ]
}

pub fn by_name(name: &str, width: usize, height: usize, seed: u64) -> Option<GrayImage> {
    Some(match name {
        "scene" => scene(width, height, seed),
        "gradient" => gradient(width, height),
        "zone_plate" => zone_plate(width, height),
        "texture" => texture(width, height, seed),
        "noise" => noise(width, height, seed),
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        assert_eq!(scene(64, 48, 7), scene(64, 48, 7));
        assert_ne!(scene(64, 48, 7), scene(64, 48, 8));
        assert_eq!(noise(16, 16, 1), noise(16, 16, 1));
    }

    #[test]
    fn images_use_the_dynamic_range() {
        for (name, img) in corpus(DEFAULT_SEED) {
            let (lo, hi) = img
                .samples()
                .iter()
                .fold((255u8, 0u8), |(lo, hi), &v| (lo.min(v), hi.max(v)));
            assert!(hi - lo > 100, "{name}: {lo}..{hi}");
        }
    }

    #[test]
    fn lookup_by_name() {
        assert!(by_name("zone_plate", 8, 8, 0).is_some());
        assert!(by_name("lena", 8, 8, 0).is_none());
    }
}
