//! JPEG-style block codec used to measure how rotator precision affects
//! image quality.
//!
//! The chain is level shift, 8×8 forward DCT, quality-scaled luminance
//! quantization, then dequantization and an exact inverse DCT. There is no
//! entropy coding: PSNR depends only on the quantized coefficients.
//! Rounding is half away from zero everywhere, so reports are bit-reproducible.

use rayon::prelude::*;
use serde::{Serialize, Serializer};
use std::fmt::Write as _;

use crate::dct8::{dct2d_oracle, idct2d_oracle, Block8, BlockTransform, DctEngine, EngineConfig};
use crate::error::{Error, Result};
use crate::fixed::ArithmeticMode;
use crate::ops::OpCounts;
use crate::planner::IndexPolicy;

/// Row-major 8-bit grayscale image.
#[derive(Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    samples: Vec<u8>,
}

impl std::fmt::Debug for GrayImage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "GrayImage({}x{})", self.width, self.height)
    }
}

impl GrayImage {
    pub fn new(width: usize, height: usize, samples: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::DimensionMismatch(format!(
                "empty image {width}x{height}"
            )));
        }
        if samples.len() != width * height {
            return Err(Error::DimensionMismatch(format!(
                "{} samples for a {width}x{height} image",
                samples.len()
            )));
        }
        Ok(Self {
            width,
            height,
            samples,
        })
    }

    /// Panics if either dimension is zero.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u8) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be positive");
        let samples = (0..height)
            .flat_map(|y| (0..width).map(move |x| (x, y)))
            .map(|(x, y)| f(x, y))
            .collect();
        Self {
            width,
            height,
            samples,
        }
    }

    pub fn constant(width: usize, height: usize, value: u8) -> Self {
        Self::from_fn(width, height, |_, _| value)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn samples(&self) -> &[u8] {
        &self.samples
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.samples[y * self.width + x]
    }

    /// Sample with coordinates clamped to the image (edge replication).
    #[inline]
    fn get_clamped(&self, x: usize, y: usize) -> u8 {
        self.get(x.min(self.width - 1), y.min(self.height - 1))
    }

    fn blocks_wide(&self) -> usize {
        self.width.div_ceil(8)
    }

    fn blocks_high(&self) -> usize {
        self.height.div_ceil(8)
    }

    /// The 8×8 block at block coordinates `(bx, by)`, padded by edge replication.
    pub fn block(&self, bx: usize, by: usize) -> Block8 {
        Block8::from_fn(|r, c| self.get_clamped(bx * 8 + c, by * 8 + r) as f64)
    }
}

/// ITU-T T.81 Annex K luminance quantization table, row-major.
pub const LUMINANCE_BASE: [u16; 64] = [
    16, 11, 10, 16, 24, 40, 51, 61, //
    12, 12, 14, 19, 26, 58, 60, 55, //
    14, 13, 16, 24, 40, 57, 69, 56, //
    14, 17, 22, 29, 51, 87, 80, 62, //
    18, 22, 37, 56, 68, 109, 103, 77, //
    24, 35, 55, 64, 81, 104, 113, 92, //
    49, 64, 78, 87, 103, 121, 120, 101, //
    72, 92, 95, 98, 112, 100, 103, 99,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuantMatrix([u16; 64]);

impl QuantMatrix {
    pub fn new(steps: [u16; 64]) -> Result<Self> {
        if let Some(bad) = steps.iter().find(|&&q| q == 0 || q > 255) {
            return Err(Error::Domain(format!(
                "quantizer step {bad} outside [1, 255]"
            )));
        }
        Ok(Self(steps))
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> u16 {
        self.0[u * 8 + v]
    }

    pub fn steps(&self) -> &[u16; 64] {
        &self.0
    }
}

/// IJG-style quality scaling of the luminance table.
pub fn quant_table_for_quality(quality: u32) -> Result<QuantMatrix> {
    if !(1..=100).contains(&quality) {
        return Err(Error::Domain(format!("quality {quality} outside [1, 100]")));
    }
    let scale = if quality < 50 {
        5000 / quality
    } else {
        200 - 2 * quality
    };
    Ok(QuantMatrix(LUMINANCE_BASE.map(|b| {
        ((scale * b as u32 + 50) / 100).clamp(1, 255) as u16
    })))
}

/// Quantized coefficients of one block, row-major `(u, v)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuantizedBlock(pub [i32; 64]);

/// Forward transform and quantization of one block.
pub fn encode_block(
    block: &Block8,
    transform: &dyn BlockTransform,
    q: &QuantMatrix,
) -> Result<QuantizedBlock> {
    Ok(encode_block_detailed(block, transform, q, &mut OpCounts::new())?.0)
}

/// Also returns the scaled, unquantized coefficients.
fn encode_block_detailed(
    block: &Block8,
    transform: &dyn BlockTransform,
    q: &QuantMatrix,
    counts: &mut OpCounts,
) -> Result<(QuantizedBlock, Block8)> {
    if let Some(bad) = block.0.iter().find(|v| !(0.0..=255.0).contains(*v)) {
        return Err(Error::Domain(format!("pixel value {bad} outside [0, 255]")));
    }
    let shifted = Block8(block.0.map(|v| v - 128.0));
    let raw = transform.forward_block(&shifted, counts)?;
    let coefs = Block8::from_fn(|u, v| raw.get(u, v) * transform.prescale(u, v));
    let quantized = std::array::from_fn(|i| (coefs.0[i] / q.0[i] as f64).round() as i32);
    Ok((QuantizedBlock(quantized), coefs))
}

/// Dequantization, exact inverse DCT, level shift back and clamp to `[0, 255]`.
pub fn decode_block(coefs: &QuantizedBlock, q: &QuantMatrix) -> Block8 {
    let dequant = Block8(std::array::from_fn(|i| coefs.0[i] as f64 * q.0[i] as f64));
    let pixels = idct2d_oracle(&dequant);
    Block8(pixels.0.map(|v| (v + 128.0).round().clamp(0.0, 255.0)))
}

/// `10·log₁₀(255²/MSE)`; identical images give `+∞`.
pub fn psnr(a: &GrayImage, b: &GrayImage) -> Result<f64> {
    if (a.width, a.height) != (b.width, b.height) {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} vs {}x{}",
            a.width, a.height, b.width, b.height
        )));
    }
    let sse: u64 = a
        .samples
        .iter()
        .zip(&b.samples)
        .map(|(&x, &y)| {
            let d = x as i64 - y as i64;
            (d * d) as u64
        })
        .sum();
    if sse == 0 {
        return Ok(f64::INFINITY);
    }
    let mse = sse as f64 / a.samples.len() as f64;
    Ok(10.0 * (255.0 * 255.0 / mse).log10())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Parallelism {
    Serial,
    #[default]
    Blocks,
}

#[derive(Debug, Clone)]
pub struct RoundTrip {
    pub image: GrayImage,
    /// Mean `|transform − exact DCT|` over every coefficient of every block.
    pub mean_abs_coef_err: f64,
    pub counts: OpCounts,
}

struct BlockOutcome {
    pixels: Block8,
    abs_err_sum: f64,
    counts: OpCounts,
}

fn process_block(
    img: &GrayImage,
    index: usize,
    transform: &dyn BlockTransform,
    q: &QuantMatrix,
) -> Result<BlockOutcome> {
    let (bx, by) = (index % img.blocks_wide(), index / img.blocks_wide());
    let block = img.block(bx, by);
    let mut counts = OpCounts::new();
    let (quantized, coefs) = encode_block_detailed(&block, transform, q, &mut counts)?;
    let reference = dct2d_oracle(&Block8(block.0.map(|v| v - 128.0)));
    let abs_err_sum = coefs
        .0
        .iter()
        .zip(&reference.0)
        .map(|(a, b)| (a - b).abs())
        .sum();
    Ok(BlockOutcome {
        pixels: decode_block(&quantized, q),
        abs_err_sum,
        counts,
    })
}

/// Encodes and decodes every block of `img`. Output is identical for every
/// [`Parallelism`] setting.
pub fn roundtrip_with_stats(
    img: &GrayImage,
    transform: &dyn BlockTransform,
    quality: u32,
    parallelism: Parallelism,
) -> Result<RoundTrip> {
    let q = quant_table_for_quality(quality)?;
    let n = img.blocks_wide() * img.blocks_high();
    let outcomes: Vec<BlockOutcome> = match parallelism {
        Parallelism::Serial => (0..n)
            .map(|i| process_block(img, i, transform, &q))
            .collect::<Result<_>>()?,
        Parallelism::Blocks => (0..n)
            .into_par_iter()
            .map(|i| process_block(img, i, transform, &q))
            .collect::<Result<_>>()?,
    };

    let mut samples = vec![0u8; img.width * img.height];
    let mut counts = OpCounts::new();
    let mut abs_err = 0.0;
    for (i, o) in outcomes.iter().enumerate() {
        let (bx, by) = (i % img.blocks_wide(), i / img.blocks_wide());
        for r in 0..8 {
            let y = by * 8 + r;
            if y >= img.height {
                break;
            }
            for c in 0..8 {
                let x = bx * 8 + c;
                if x < img.width {
                    samples[y * img.width + x] = o.pixels.get(r, c) as u8;
                }
            }
        }
        abs_err += o.abs_err_sum;
        counts += o.counts;
    }
    Ok(RoundTrip {
        image: GrayImage {
            width: img.width,
            height: img.height,
            samples,
        },
        mean_abs_coef_err: abs_err / (64 * n) as f64,
        counts,
    })
}

/// Compresses and reconstructs `img` at quality `quality`.
pub fn roundtrip_image(
    img: &GrayImage,
    transform: &dyn BlockTransform,
    quality: u32,
) -> Result<GrayImage> {
    Ok(roundtrip_with_stats(img, transform, quality, Parallelism::default())?.image)
}

fn serialize_psnr<S: Serializer>(value: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if value.is_infinite() {
        s.serialize_str("inf")
    } else {
        s.serialize_f64((value * 1000.0).round() / 1000.0)
    }
}

pub fn format_psnr(value: f64) -> String {
    if value.is_infinite() {
        "inf".to_string()
    } else {
        format!("{value:.3}")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub epsilon: f64,
    pub quality: u32,
    #[serde(serialize_with = "serialize_psnr")]
    pub psnr_db: f64,
    pub mean_abs_coef_err: f64,
    pub saturations: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct PsnrReport {
    pub rows: Vec<ReportRow>,
}

impl PsnrReport {
    pub fn row(&self, epsilon: f64, quality: u32) -> Option<&ReportRow> {
        self.rows
            .iter()
            .find(|r| r.epsilon == epsilon && r.quality == quality)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("epsilon,quality,psnr_db,mean_abs_coef_err,saturations\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:e},{},{},{:.6},{}",
                r.epsilon,
                r.quality,
                format_psnr(r.psnr_db),
                r.mean_abs_coef_err,
                r.saturations
            );
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.rows).expect("report serializes") + "\n"
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{:>9}  {:>3}  {:>9}  {:>12}  {:>11}\n",
            "epsilon", "Q", "PSNR(dB)", "|coef err|", "saturations"
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:>9}  {:>3}  {:>9}  {:>12.6}  {:>11}",
                format!("{:e}", r.epsilon),
                r.quality,
                format_psnr(r.psnr_db),
                r.mean_abs_coef_err,
                r.saturations
            );
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub epsilons: Vec<f64>,
    pub qualities: Vec<u32>,
    pub policy: IndexPolicy,
    pub mode: ArithmeticMode,
    pub fold_into_quantizer: bool,
    pub parallelism: Parallelism,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            epsilons: vec![1e-3, 1e-4],
            qualities: vec![95, 90, 85, 80, 75],
            policy: IndexPolicy::NearestIndex,
            mode: ArithmeticMode::ExactFloat,
            fold_into_quantizer: false,
            parallelism: Parallelism::default(),
        }
    }
}

/// One report row per `(ε, Q)`, sorted by ε then Q, both descending.
pub fn sweep(img: &GrayImage, config: &SweepConfig) -> Result<PsnrReport> {
    let mut epsilons = config.epsilons.clone();
    epsilons.sort_by(|a, b| b.total_cmp(a));
    epsilons.dedup();
    let mut qualities = config.qualities.clone();
    qualities.sort_by(|a, b| b.cmp(a));
    qualities.dedup();
    for &q in &qualities {
        quant_table_for_quality(q)?;
    }

    let mut rows = Vec::with_capacity(epsilons.len() * qualities.len());
    for &epsilon in &epsilons {
        let engine = DctEngine::new(EngineConfig {
            epsilon,
            policy: config.policy,
            mode: config.mode,
            fold_into_quantizer: config.fold_into_quantizer,
        })?;
        for &quality in &qualities {
            let rt = roundtrip_with_stats(img, &engine, quality, config.parallelism)?;
            rows.push(ReportRow {
                epsilon,
                quality,
                psnr_db: psnr(img, &rt.image)?,
                mean_abs_coef_err: rt.mean_abs_coef_err,
                saturations: rt.counts.saturations,
            });
        }
    }
    Ok(PsnrReport { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dct8::OracleDct;
    use crate::fixed::{FixedPointFormat, OverflowPolicy};

    fn engine(eps: f64) -> DctEngine {
        DctEngine::exact_float(eps).unwrap()
    }

    #[test]
    fn quality_scaling() {
        assert_eq!(
            quant_table_for_quality(50).unwrap().steps(),
            &LUMINANCE_BASE
        );
        assert!(quant_table_for_quality(100)
            .unwrap()
            .steps()
            .iter()
            .all(|&q| q == 1));
        let q95 = quant_table_for_quality(95).unwrap();
        assert_eq!(q95.get(0, 0), 2);
        // S = 5000/10 = 500 -> 16 * 5 = 80
        assert_eq!(quant_table_for_quality(10).unwrap().get(0, 0), 80);
        assert_eq!(quant_table_for_quality(1).unwrap().get(7, 7), 255);
        assert!(quant_table_for_quality(0).is_err());
        assert!(quant_table_for_quality(101).is_err());
    }

    #[test]
    fn quant_matrix_validation() {
        assert!(QuantMatrix::new([0; 64]).is_err());
        assert!(QuantMatrix::new([256; 64]).is_err());
        assert!(QuantMatrix::new([1; 64]).is_ok());
    }

    #[test]
    fn encode_constant_blocks() {
        let q50 = quant_table_for_quality(50).unwrap();
        let e = engine(1e-3);
        assert_eq!(
            encode_block(&Block8::constant(128.0), &e, &q50).unwrap(),
            QuantizedBlock([0; 64])
        );

        // 127·8/16 = 63.5 sits on a rounding tie; the exact transform rounds it away from zero
        let exact = encode_block(&Block8::constant(255.0), &OracleDct, &q50).unwrap();
        assert_eq!(exact.0[0], 64);
        let white = encode_block(&Block8::constant(255.0), &e, &q50).unwrap();
        assert!((63..=64).contains(&white.0[0]));
        for coefs in [exact, white] {
            assert!(coefs.0[1..].iter().all(|&c| c == 0));
            let decoded = decode_block(&coefs, &q50);
            assert!(decoded.0.iter().all(|&v| (v - 255.0).abs() <= 1.0));
        }
    }

    #[test]
    fn quality_100_is_rounded_transform() {
        let q = quant_table_for_quality(100).unwrap();
        let block = Block8::from_fn(|r, c| ((r * 31 + c * 17) % 256) as f64);
        let e = engine(1e-3);
        let coefs = encode_block(&block, &e, &q).unwrap();
        let f = e.forward_2d(&Block8(block.0.map(|v| v - 128.0))).unwrap();
        for i in 0..64 {
            assert_eq!(coefs.0[i], f.0[i].round() as i32);
        }
    }

    #[test]
    fn zero_coefficients_decode_to_mid_gray() {
        let q = quant_table_for_quality(75).unwrap();
        assert_eq!(
            decode_block(&QuantizedBlock([0; 64]), &q),
            Block8::constant(128.0)
        );
    }

    #[test]
    fn near_lossless_at_quality_100() {
        let q = quant_table_for_quality(100).unwrap();
        let e = engine(1e-6);
        let mut state = 12345u32;
        for _ in 0..50 {
            let block = Block8::from_fn(|_, _| {
                state = state.wrapping_mul(1103515245).wrapping_add(12345);
                ((state >> 16) & 0xff) as f64
            });
            let back = decode_block(&encode_block(&block, &e, &q).unwrap(), &q);
            assert!(back.max_abs_diff(&block) <= 1.0);
        }
    }

    #[test]
    fn encode_rejects_out_of_range_pixels() {
        let q = quant_table_for_quality(75).unwrap();
        assert!(encode_block(&Block8::constant(256.0), &engine(1e-3), &q).is_err());
    }

    #[test]
    fn psnr_examples() {
        let a = GrayImage::from_fn(16, 16, |x, y| (x * 7 + y * 3) as u8);
        assert_eq!(psnr(&a, &a).unwrap(), f64::INFINITY);

        let b = GrayImage::from_fn(16, 16, |x, y| (x * 7 + y * 3) as u8 + 1);
        assert!((psnr(&a, &b).unwrap() - 48.1308036086791).abs() < 1e-9);

        let c = GrayImage::from_fn(16, 16, |x, y| {
            (x * 7 + y * 3) as u8 + if y < 8 { 2 } else { 0 }
        });
        assert!((psnr(&a, &c).unwrap() - 45.12050365203929).abs() < 1e-9);

        let d = GrayImage::constant(8, 16, 0);
        assert!(matches!(psnr(&a, &d), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn gray_image_validation() {
        assert!(GrayImage::new(2, 2, vec![0; 3]).is_err());
        assert!(GrayImage::new(0, 2, vec![]).is_err());
        assert!(GrayImage::new(2, 2, vec![0; 4]).is_ok());
    }

    #[test]
    fn constant_mid_gray_survives() {
        let img = GrayImage::constant(20, 13, 128);
        for quality in [10, 75, 95] {
            let out = roundtrip_image(&img, &engine(1e-3), quality).unwrap();
            assert_eq!(psnr(&img, &out).unwrap(), f64::INFINITY);
        }
    }

    #[test]
    fn single_block_image_matches_block_codec() {
        let img = GrayImage::from_fn(8, 8, |x, y| (x * 29 + y * 13) as u8);
        let e = engine(1e-3);
        let q = quant_table_for_quality(80).unwrap();
        let expected = decode_block(&encode_block(&img.block(0, 0), &e, &q).unwrap(), &q);
        let out = roundtrip_image(&img, &e, 80).unwrap();
        for y in 0..8 {
            for x in 0..8 {
                assert_eq!(out.get(x, y) as f64, expected.get(y, x));
            }
        }
    }

    #[test]
    fn padding_replicates_edges() {
        let img = GrayImage::from_fn(10, 9, |x, y| (x * 20 + y) as u8);
        let block = img.block(1, 1);
        assert_eq!(block.get(0, 0), img.get(8, 8) as f64);
        assert_eq!(block.get(7, 7), img.get(9, 8) as f64);
        let out = roundtrip_image(&img, &engine(1e-3), 90).unwrap();
        assert_eq!((out.width(), out.height()), (10, 9));
    }

    #[test]
    fn serial_and_parallel_agree() {
        let img = GrayImage::from_fn(40, 24, |x, y| ((x * x + 3 * y * y) % 256) as u8);
        let e = engine(1e-3);
        let a = roundtrip_with_stats(&img, &e, 85, Parallelism::Serial).unwrap();
        let b = roundtrip_with_stats(&img, &e, 85, Parallelism::Blocks).unwrap();
        assert_eq!(a.image, b.image);
        assert_eq!(a.mean_abs_coef_err.to_bits(), b.mean_abs_coef_err.to_bits());
        assert_eq!(a.counts, b.counts);
    }

    #[test]
    fn oracle_transform_has_zero_coefficient_error() {
        let img = GrayImage::from_fn(16, 16, |x, y| (x * 9 + y * 5) as u8);
        let rt = roundtrip_with_stats(&img, &OracleDct, 90, Parallelism::Serial).unwrap();
        assert_eq!(rt.mean_abs_coef_err, 0.0);
    }

    #[test]
    fn sweep_shape_and_ordering() {
        let img = GrayImage::from_fn(32, 32, |x, y| ((x * 5 + y * 11) % 256) as u8);
        let config = SweepConfig {
            epsilons: vec![1e-4, 1e-3],
            qualities: vec![75, 95],
            ..SweepConfig::default()
        };
        let report = sweep(&img, &config).unwrap();
        let keys: Vec<_> = report.rows.iter().map(|r| (r.epsilon, r.quality)).collect();
        assert_eq!(keys, [(1e-3, 95), (1e-3, 75), (1e-4, 95), (1e-4, 75)]);

        let one = sweep(
            &img,
            &SweepConfig {
                epsilons: vec![1e-3],
                qualities: vec![95],
                ..SweepConfig::default()
            },
        )
        .unwrap();
        assert_eq!(one.rows.len(), 1);
        assert!(sweep(
            &img,
            &SweepConfig {
                qualities: vec![0],
                ..SweepConfig::default()
            }
        )
        .is_err());
    }

    #[test]
    fn report_formats() {
        let report = PsnrReport {
            rows: vec![
                ReportRow {
                    epsilon: 1e-3,
                    quality: 95,
                    psnr_db: 43.53456,
                    mean_abs_coef_err: 0.0125,
                    saturations: 0,
                },
                ReportRow {
                    epsilon: 1e-4,
                    quality: 100,
                    psnr_db: f64::INFINITY,
                    mean_abs_coef_err: 0.0,
                    saturations: 2,
                },
            ],
        };
        assert_eq!(
            report.to_csv(),
            "epsilon,quality,psnr_db,mean_abs_coef_err,saturations\n1e-3,95,43.535,0.012500,0\n1e-4,100,inf,0.000000,2\n"
        );
        let json: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
        assert_eq!(json[0]["psnr_db"], serde_json::json!(43.535));
        assert_eq!(json[1]["psnr_db"], serde_json::json!("inf"));
        assert_eq!(json[1]["saturations"], serde_json::json!(2));
        assert!(report.to_text().contains("43.535"));
    }

    #[test]
    fn fixed_point_sweep_reports_saturations_column() {
        let img = GrayImage::from_fn(
            16,
            16,
            |x, y| if (x / 8 + y / 8) % 2 == 0 { 0 } else { 255 },
        );
        let config = SweepConfig {
            epsilons: vec![1e-3],
            qualities: vec![90],
            mode: ArithmeticMode::fixed(FixedPointFormat::DCT, OverflowPolicy::Saturate),
            ..SweepConfig::default()
        };
        let report = sweep(&img, &config).unwrap();
        assert_eq!(report.rows[0].saturations, 0);
        assert!(report.rows[0].psnr_db > 30.0);
    }
}
