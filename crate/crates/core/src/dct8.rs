//! 8-point DCT built from butterflies, four fixed-angle CORDIC rotators and
//! post-scaling, plus the separable 8×8 transform and exact matrix oracles.
//!
//! The transform is the orthonormal type-II DCT
//! `F(k) = ½·C(k)·Σₓ f(x)·cos((2x+1)kπ/16)`, `C(0) = 1/√2`.
//!
//! Flow graph, with `uₖ = xₖ + x₇₋ₖ`, `vₖ = xₖ − x₇₋ₖ`:
//!
//! ```text
//! even:  p = u0+u3  q = u1+u2  r = u0−u3  s = u1−u2
//!        (g0, g1) = R(π/4)(p, q)      F0 = g1/2   F4 = g0/2
//!        (h0, h1) = R(3π/8)(r, s)     F2 = h1/2   F6 = h0/2
//! odd:   (a', a) = R(π/16)(v3, v0)
//!        (b', b) = R(3π/16)(v2, v1)
//!        F1 = (a+b)/2                 F7 = (b'−a')/2
//!        F3 = ((a−a')−(b+b'))/(2√2)   F5 = ((a+a')−(b−b'))/(2√2)
//! ```
//!
//! Rotators run uncompensated. The odd outputs mix two rotators with
//! different gains, so the 3π/16 outputs are first rebalanced by
//! `gain(3π/16)/gain(π/16)`; every remaining gain and constant is folded into
//! eight per-output post-scales.

use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};
use std::fmt;
use std::sync::OnceLock;

use crate::cordic::{csd_scale, rotate_f64, rotate_raw, CsdScale};
use crate::error::{Error, Result};
use crate::fixed::{ArithmeticMode, FixedAlu, FixedPointFormat};
use crate::ops::OpCounts;
use crate::planner::{decompose, IndexPolicy, RotationPlan};

pub type SampleVec8 = [f64; 8];
pub type CoefVec8 = [f64; 8];

/// Rotation angles of the flow graph: π/4, 3π/8, π/16, 3π/16.
pub const ROTATOR_ANGLES: [f64; 4] = [PI / 4.0, 3.0 * PI / 8.0, PI / 16.0, 3.0 * PI / 16.0];

/// Row-major 8×8 grid.
#[derive(Clone, Copy, PartialEq)]
pub struct Block8(pub [f64; 64]);

impl Block8 {
    pub const ZERO: Block8 = Block8([0.0; 64]);

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> f64) -> Self {
        Block8(std::array::from_fn(|i| f(i / 8, i % 8)))
    }

    pub fn constant(value: f64) -> Self {
        Block8([value; 64])
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.0[row * 8 + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.0[row * 8 + col] = value;
    }

    pub fn row(&self, row: usize) -> [f64; 8] {
        std::array::from_fn(|c| self.get(row, c))
    }

    pub fn transpose(&self) -> Block8 {
        Block8::from_fn(|r, c| self.get(c, r))
    }

    pub fn max_abs_diff(&self, other: &Block8) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn map_rows(&self, mut f: impl FnMut(&[f64; 8]) -> Result<[f64; 8]>) -> Result<Block8> {
        let mut out = Block8::ZERO;
        for r in 0..8 {
            out.0[r * 8..r * 8 + 8].copy_from_slice(&f(&self.row(r))?);
        }
        Ok(out)
    }
}

impl fmt::Debug for Block8 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.chunks(8)).finish()
    }
}

/// `M[k][x] = ½·C(k)·cos((2x+1)kπ/16)`.
pub fn oracle_matrix() -> &'static [[f64; 8]; 8] {
    static M: OnceLock<[[f64; 8]; 8]> = OnceLock::new();
    M.get_or_init(|| {
        std::array::from_fn(|k| {
            let ck = if k == 0 { FRAC_1_SQRT_2 } else { 1.0 };
            std::array::from_fn(|x| 0.5 * ck * (((2 * x + 1) * k) as f64 * PI / 16.0).cos())
        })
    })
}

/// Direct evaluation of the DCT sum in binary64.
pub fn dct8_oracle(x: &SampleVec8) -> CoefVec8 {
    let m = oracle_matrix();
    std::array::from_fn(|k| (0..8).map(|i| m[k][i] * x[i]).sum())
}

/// Exact inverse (the transpose of the orthonormal oracle matrix).
pub fn idct8_oracle(f: &CoefVec8) -> SampleVec8 {
    let m = oracle_matrix();
    std::array::from_fn(|i| (0..8).map(|k| m[k][i] * f[k]).sum())
}

pub fn dct2d_oracle(block: &Block8) -> Block8 {
    separable(block, |row| Ok(dct8_oracle(row))).expect("oracle is infallible")
}

pub fn idct2d_oracle(block: &Block8) -> Block8 {
    separable(block, |row| Ok(idct8_oracle(row))).expect("oracle is infallible")
}

/// Rows, transpose, rows, transpose.
fn separable(
    block: &Block8,
    mut pass: impl FnMut(&[f64; 8]) -> Result<[f64; 8]>,
) -> Result<Block8> {
    let rows = block.map_rows(&mut pass)?.transpose();
    Ok(rows.map_rows(&mut pass)?.transpose())
}

/// Construction parameters of a [`DctEngine`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EngineConfig {
    pub epsilon: f64,
    pub policy: IndexPolicy,
    pub mode: ArithmeticMode,
    /// Leave post-scaling to the quantizer instead of applying it in the transform.
    pub fold_into_quantizer: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            epsilon: 1e-3,
            policy: IndexPolicy::NearestIndex,
            mode: ArithmeticMode::ExactFloat,
            fold_into_quantizer: false,
        }
    }
}

#[derive(Debug, Clone)]
struct FixedScales {
    post: [CsdScale; 8],
    odd_balance: CsdScale,
}

/// CORDIC DCT with fixed rotator plans and folded post-scales.
#[derive(Debug, Clone)]
pub struct DctEngine {
    config: EngineConfig,
    plans: [RotationPlan; 4],
    post_scales: [f64; 8],
    odd_balance: f64,
    fixed_scales: Option<FixedScales>,
}

impl DctEngine {
    pub fn new(config: EngineConfig) -> Result<Self> {
        let plans = [
            decompose(ROTATOR_ANGLES[0], config.epsilon, config.policy)?,
            decompose(ROTATOR_ANGLES[1], config.epsilon, config.policy)?,
            decompose(ROTATOR_ANGLES[2], config.epsilon, config.policy)?,
            decompose(ROTATOR_ANGLES[3], config.epsilon, config.policy)?,
        ];
        let [k4, k38, k16, k316] = [
            plans[0].gain(),
            plans[1].gain(),
            plans[2].gain(),
            plans[3].gain(),
        ];
        let post_scales = [
            k4 / 2.0,
            k16 / 2.0,
            k38 / 2.0,
            k16 / (2.0 * SQRT_2),
            k4 / 2.0,
            k16 / (2.0 * SQRT_2),
            k38 / 2.0,
            k16 / 2.0,
        ];
        let odd_balance = k316 / k16;

        let fixed_scales = match config.mode {
            ArithmeticMode::ExactFloat => None,
            ArithmeticMode::FixedPoint { format, .. } => {
                let tol = (-(format.frac_bits() as f64 + 6.0)).exp2();
                let post = post_scales.map(|s| csd_scale(s, 16, tol));
                let post = post.into_iter().collect::<Result<Vec<_>>>()?;
                Some(FixedScales {
                    post: post.try_into().expect("eight post-scales"),
                    odd_balance: csd_scale(odd_balance, 16, tol)?,
                })
            }
        };

        Ok(Self {
            config,
            plans,
            post_scales,
            odd_balance,
            fixed_scales,
        })
    }

    /// Floating-point engine at tolerance `epsilon` with the default policy.
    pub fn exact_float(epsilon: f64) -> Result<Self> {
        Self::new(EngineConfig {
            epsilon,
            ..EngineConfig::default()
        })
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn epsilon(&self) -> f64 {
        self.config.epsilon
    }

    pub fn mode(&self) -> ArithmeticMode {
        self.config.mode
    }

    /// Plans for π/4, 3π/8, π/16 and 3π/16, in that order.
    pub fn plans(&self) -> &[RotationPlan; 4] {
        &self.plans
    }

    pub fn post_scales(&self) -> &[f64; 8] {
        &self.post_scales
    }

    pub fn odd_balance(&self) -> f64 {
        self.odd_balance
    }

    pub fn folds_into_quantizer(&self) -> bool {
        self.config.fold_into_quantizer
    }

    /// 8-point forward transform.
    pub fn forward(&self, x: &SampleVec8) -> Result<CoefVec8> {
        self.forward_counted(x, &mut OpCounts::new())
    }

    pub fn forward_counted(&self, x: &SampleVec8, counts: &mut OpCounts) -> Result<CoefVec8> {
        match self.config.mode {
            ArithmeticMode::ExactFloat => {
                check_finite(x)?;
                flow(
                    &mut FloatPath {
                        engine: self,
                        counts,
                    },
                    *x,
                )
            }
            ArithmeticMode::FixedPoint { format, overflow } => {
                let mut alu = FixedAlu::new(format, overflow, counts);
                let mut raw = [0i64; 8];
                for (r, &v) in raw.iter_mut().zip(x) {
                    *r = alu.load(v)?;
                }
                let out = self.forward_raw(&mut alu, raw)?;
                Ok(out.map(|r| format.to_f64(r)))
            }
        }
    }

    fn forward_raw(&self, alu: &mut FixedAlu<'_>, x: [i64; 8]) -> Result<[i64; 8]> {
        let scales = self
            .fixed_scales
            .as_ref()
            .expect("fixed-point engine carries CSD scales");
        flow(
            &mut FixedPath {
                engine: self,
                alu,
                scales,
            },
            x,
        )
    }

    /// Separable 8×8 forward transform.
    pub fn forward_2d(&self, block: &Block8) -> Result<Block8> {
        self.forward_2d_counted(block, &mut OpCounts::new())
    }

    pub fn forward_2d_counted(&self, block: &Block8, counts: &mut OpCounts) -> Result<Block8> {
        match self.config.mode {
            ArithmeticMode::ExactFloat => separable(block, |row| self.forward_counted(row, counts)),
            ArithmeticMode::FixedPoint { format, overflow } => {
                // Intermediate rows stay in raw fixed point between the two passes.
                let mut alu = FixedAlu::new(format, overflow, counts);
                let mut grid = [[0i64; 8]; 8];
                for (r, row) in grid.iter_mut().enumerate() {
                    for (c, v) in row.iter_mut().enumerate() {
                        *v = alu.load(block.get(r, c))?;
                    }
                }
                for row in grid.iter_mut() {
                    *row = self.forward_raw(&mut alu, *row)?;
                }
                let mut cols: [[i64; 8]; 8] =
                    std::array::from_fn(|c| std::array::from_fn(|r| grid[r][c]));
                for col in cols.iter_mut() {
                    *col = self.forward_raw(&mut alu, *col)?;
                }
                Ok(Block8::from_fn(|r, c| format.to_f64(cols[c][r])))
            }
        }
    }

    /// Factor applied to output `k`; 1-D outputs carry it unless folding is on.
    pub fn post_scale(&self, k: usize) -> f64 {
        self.post_scales[k]
    }

    /// Operation counts of a single 8-point transform. Counts do not depend
    /// on the data except for saturations, which are zero for the impulse used.
    pub fn op_count_report(&self) -> Result<OpCounts> {
        let mut counts = OpCounts::new();
        let mut impulse = [0.0; 8];
        impulse[0] = 1.0;
        self.forward_counted(&impulse, &mut counts)?;
        if self.config.mode.is_fixed() {
            // `load` is data conversion, not datapath work.
            debug_assert_eq!(counts.multiplies, 0);
        }
        Ok(counts)
    }
}

/// Word-level operations the flow graph needs.
trait Datapath {
    type Word: Copy;
    fn add(&mut self, a: Self::Word, b: Self::Word) -> Result<Self::Word>;
    fn sub(&mut self, a: Self::Word, b: Self::Word) -> Result<Self::Word>;
    /// Rotator `which` (index into [`ROTATOR_ANGLES`]) without gain compensation.
    fn rotate(
        &mut self,
        which: usize,
        x: Self::Word,
        y: Self::Word,
    ) -> Result<(Self::Word, Self::Word)>;
    fn balance_odd(&mut self, w: Self::Word) -> Result<Self::Word>;
    fn post_scale(&mut self, k: usize, w: Self::Word) -> Result<Self::Word>;
    fn folds(&self) -> bool;
}

fn flow<D: Datapath>(d: &mut D, x: [D::Word; 8]) -> Result<[D::Word; 8]> {
    let u0 = d.add(x[0], x[7])?;
    let u1 = d.add(x[1], x[6])?;
    let u2 = d.add(x[2], x[5])?;
    let u3 = d.add(x[3], x[4])?;
    let v0 = d.sub(x[0], x[7])?;
    let v1 = d.sub(x[1], x[6])?;
    let v2 = d.sub(x[2], x[5])?;
    let v3 = d.sub(x[3], x[4])?;

    // even part
    let p = d.add(u0, u3)?;
    let q = d.add(u1, u2)?;
    let r = d.sub(u0, u3)?;
    let s = d.sub(u1, u2)?;
    let (g0, g1) = d.rotate(0, p, q)?;
    let (h0, h1) = d.rotate(1, r, s)?;

    // odd part
    let (a_, a) = d.rotate(2, v3, v0)?;
    let (b_, b) = d.rotate(3, v2, v1)?;
    let b_ = d.balance_odd(b_)?;
    let b = d.balance_odd(b)?;

    let f1 = d.add(a, b)?;
    let f7 = d.sub(b_, a_)?;
    let t = d.sub(a, a_)?;
    let w = d.add(b, b_)?;
    let f3 = d.sub(t, w)?;
    let t = d.add(a, a_)?;
    let w = d.sub(b, b_)?;
    let f5 = d.sub(t, w)?;

    let mut out = [g1, f1, h1, f3, g0, f5, h0, f7];
    if !d.folds() {
        for (k, o) in out.iter_mut().enumerate() {
            *o = d.post_scale(k, *o)?;
        }
    }
    Ok(out)
}

struct FloatPath<'e, 'c> {
    engine: &'e DctEngine,
    counts: &'c mut OpCounts,
}

impl Datapath for FloatPath<'_, '_> {
    type Word = f64;

    fn add(&mut self, a: f64, b: f64) -> Result<f64> {
        self.counts.add();
        Ok(a + b)
    }

    fn sub(&mut self, a: f64, b: f64) -> Result<f64> {
        self.counts.add();
        Ok(a - b)
    }

    fn rotate(&mut self, which: usize, x: f64, y: f64) -> Result<(f64, f64)> {
        Ok(rotate_f64(x, y, &self.engine.plans[which], self.counts))
    }

    fn balance_odd(&mut self, w: f64) -> Result<f64> {
        self.counts.multiply();
        Ok(w * self.engine.odd_balance)
    }

    fn post_scale(&mut self, k: usize, w: f64) -> Result<f64> {
        self.counts.multiply();
        Ok(w * self.engine.post_scales[k])
    }

    fn folds(&self) -> bool {
        self.engine.config.fold_into_quantizer
    }
}

struct FixedPath<'e, 'a, 'c> {
    engine: &'e DctEngine,
    alu: &'a mut FixedAlu<'c>,
    scales: &'e FixedScales,
}

impl Datapath for FixedPath<'_, '_, '_> {
    type Word = i64;

    fn add(&mut self, a: i64, b: i64) -> Result<i64> {
        self.alu.add(a, b)
    }

    fn sub(&mut self, a: i64, b: i64) -> Result<i64> {
        self.alu.sub(a, b)
    }

    fn rotate(&mut self, which: usize, x: i64, y: i64) -> Result<(i64, i64)> {
        rotate_raw(self.alu, x, y, &self.engine.plans[which])
    }

    fn balance_odd(&mut self, w: i64) -> Result<i64> {
        self.scales.odd_balance.apply_raw(self.alu, w)
    }

    fn post_scale(&mut self, k: usize, w: i64) -> Result<i64> {
        self.scales.post[k].apply_raw(self.alu, w)
    }

    fn folds(&self) -> bool {
        self.engine.config.fold_into_quantizer
    }
}

/// A forward 8×8 transform usable by the codec.
pub trait BlockTransform: Sync {
    fn forward_block(&self, block: &Block8, counts: &mut OpCounts) -> Result<Block8>;

    /// Factor the quantizer multiplies into coefficient `(u, v)` before dividing by the step size.
    fn prescale(&self, _u: usize, _v: usize) -> f64 {
        1.0
    }
}

impl BlockTransform for DctEngine {
    fn forward_block(&self, block: &Block8, counts: &mut OpCounts) -> Result<Block8> {
        self.forward_2d_counted(block, counts)
    }

    fn prescale(&self, u: usize, v: usize) -> f64 {
        if self.config.fold_into_quantizer {
            self.post_scales[u] * self.post_scales[v]
        } else {
            1.0
        }
    }
}

/// The exact matrix DCT, as a drop-in reference for the CORDIC engine.
#[derive(Debug, Clone, Copy, Default)]
pub struct OracleDct;

impl BlockTransform for OracleDct {
    fn forward_block(&self, block: &Block8, _counts: &mut OpCounts) -> Result<Block8> {
        Ok(dct2d_oracle(block))
    }
}

/// Default fixed-point format for level-shifted 8-bit pixels.
pub fn default_fixed_format() -> FixedPointFormat {
    FixedPointFormat::DCT
}

pub(crate) fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().find(|v| !v.is_finite()) {
        Some(v) => Err(Error::Domain(format!("non-finite sample {v}"))),
        None => Ok(()),
    }
}
