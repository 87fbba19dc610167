//! Shift-add execution of rotation plans.
//!
//! A micro-rotation is applied without its norm correction:
//! `x' = x − σ·2⁻ⁱ·y`, `y' = y + σ·2⁻ⁱ·x`. The aggregate gain of a plan is
//! applied once at the end, as a float multiply in [`ArithmeticMode::ExactFloat`]
//! or as a signed power-of-two expansion ([`CsdScale`]) in fixed point.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fixed::{ArithmeticMode, FixedAlu};
use crate::ops::OpCounts;
use crate::planner::{Direction, MicroRotation, RotationPlan};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vector2 {
    pub x: f64,
    pub y: f64,
}

impl Vector2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(&self, other: &Vector2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Row-major 2×2 matrix `[[a, b], [c, d]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Matrix2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Matrix2 {
    pub const IDENTITY: Matrix2 = Matrix2 {
        a: 1.0,
        b: 0.0,
        c: 0.0,
        d: 1.0,
    };

    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { a, b, c, d }
    }

    pub fn mul(&self, rhs: &Matrix2) -> Matrix2 {
        Matrix2 {
            a: self.a * rhs.a + self.b * rhs.c,
            b: self.a * rhs.b + self.b * rhs.d,
            c: self.c * rhs.a + self.d * rhs.c,
            d: self.c * rhs.b + self.d * rhs.d,
        }
    }

    pub fn apply(&self, v: Vector2) -> Vector2 {
        Vector2::new(self.a * v.x + self.b * v.y, self.c * v.x + self.d * v.y)
    }

    pub fn scale(&self, k: f64) -> Matrix2 {
        Matrix2::new(self.a * k, self.b * k, self.c * k, self.d * k)
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn frobenius_distance(&self, other: &Matrix2) -> f64 {
        let (da, db, dc, dd) = (
            self.a - other.a,
            self.b - other.b,
            self.c - other.c,
            self.d - other.d,
        );
        (da * da + db * db + dc * dc + dd * dd).sqrt()
    }

    pub fn max_abs_diff(&self, other: &Matrix2) -> f64 {
        [
            self.a - other.a,
            self.b - other.b,
            self.c - other.c,
            self.d - other.d,
        ]
        .into_iter()
        .fold(0.0, |m, e| m.max(e.abs()))
    }
}

/// `[[cos θ, −sin θ], [sin θ, cos θ]]`.
pub fn ideal_rotation_matrix(theta: f64) -> Matrix2 {
    let (s, c) = theta.sin_cos();
    Matrix2::new(c, -s, s, c)
}

fn step_matrix(step: &MicroRotation) -> Matrix2 {
    let t = step.direction().sign() * (-(step.index() as f64)).exp2();
    Matrix2::new(1.0, -t, t, 1.0)
}

/// Product of the unscaled step matrices, later steps multiplied on the left.
pub fn plan_matrix(plan: &RotationPlan) -> Matrix2 {
    plan.steps()
        .iter()
        .fold(Matrix2::IDENTITY, |m, s| step_matrix(s).mul(&m))
}

/// A constant written as `Σ sign·2^(−shift)`, for multiplier-free scaling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsdScale {
    value: f64,
    terms: Vec<(i32, Direction)>,
    error: f64,
}

impl CsdScale {
    pub fn value(&self) -> f64 {
        self.value
    }

    /// `(shift, sign)` pairs with strictly increasing shifts. A shift of −1 is a left shift.
    pub fn terms(&self) -> &[(i32, Direction)] {
        &self.terms
    }

    /// `|value − Σ terms|` at the point the expansion stopped.
    pub fn error(&self) -> f64 {
        self.error
    }

    /// The constant actually realized by the terms.
    pub fn approximation(&self) -> f64 {
        self.terms
            .iter()
            .map(|&(j, d)| d.sign() * (-(j as f64)).exp2())
            .sum()
    }

    /// Applies the expansion with shifts and adds only.
    pub fn apply_raw(&self, alu: &mut FixedAlu<'_>, x: i64) -> Result<i64> {
        let mut acc: Option<i64> = None;
        for &(shift, dir) in &self.terms {
            let t = alu.shift(x, shift)?;
            acc = Some(match (acc, dir) {
                (None, Direction::Positive) => t,
                (None, Direction::Negative) => alu.sub(0, t)?,
                (Some(a), Direction::Positive) => alu.add(a, t)?,
                (Some(a), Direction::Negative) => alu.sub(a, t)?,
            });
        }
        Ok(acc.unwrap_or(0))
    }
}

/// Greedy signed power-of-two expansion of `value`.
///
/// Each term is the power of two closest to the remainder (ties go to the
/// larger power), which at least quarters the remainder and keeps shifts
/// strictly increasing.
pub fn csd_scale(value: f64, max_terms: usize, tolerance: f64) -> Result<CsdScale> {
    if !(value > 0.0 && value < 2.0) {
        return Err(Error::Domain(format!("scale {value} outside (0, 2)")));
    }
    if max_terms == 0 || max_terms > 16 {
        return Err(Error::Domain(format!(
            "max_terms {max_terms} outside [1, 16]"
        )));
    }
    if tolerance.is_nan() || tolerance < 0.0 {
        return Err(Error::Domain(format!(
            "tolerance {tolerance} must be non-negative"
        )));
    }

    let mut remainder = value;
    let mut terms = Vec::new();
    while remainder.abs() > tolerance {
        if terms.len() == max_terms {
            return Err(Error::ToleranceUnreachable {
                value,
                terms: max_terms,
                remainder,
                tolerance,
            });
        }
        let magnitude = remainder.abs();
        let upper = (-magnitude.log2()).floor() as i32;
        let (hi, lo) = ((-upper as f64).exp2(), (-(upper + 1) as f64).exp2());
        let shift = if hi - magnitude <= magnitude - lo {
            upper
        } else {
            upper + 1
        };
        let dir = Direction::of(remainder);
        remainder -= dir.sign() * (-shift as f64).exp2();
        terms.push((shift, dir));
    }
    Ok(CsdScale {
        value,
        terms,
        error: remainder.abs(),
    })
}

/// Expansion used to compensate a plan's gain in fixed point.
pub(crate) fn gain_csd(gain: f64, frac_bits: u32) -> Result<CsdScale> {
    csd_scale(gain, 16, (-(frac_bits as f64 + 1.0)).exp2())
}

#[inline]
pub(crate) fn micro_rotate_f64(
    x: f64,
    y: f64,
    step: &MicroRotation,
    counts: &mut OpCounts,
) -> (f64, f64) {
    let shift = step.index() as i32;
    let k = (-(shift as f64)).exp2();
    let (tx, ty) = (y * k, x * k);
    counts.shift(shift);
    counts.shift(shift);
    counts.add();
    counts.add();
    match step.direction() {
        Direction::Positive => (x - tx, y + ty),
        Direction::Negative => (x + tx, y - ty),
    }
}

#[inline]
pub(crate) fn micro_rotate_raw(
    alu: &mut FixedAlu<'_>,
    x: i64,
    y: i64,
    step: &MicroRotation,
) -> Result<(i64, i64)> {
    let shift = step.index() as i32;
    let tx = alu.shift(y, shift)?;
    let ty = alu.shift(x, shift)?;
    Ok(match step.direction() {
        Direction::Positive => (alu.sub(x, tx)?, alu.add(y, ty)?),
        Direction::Negative => (alu.add(x, tx)?, alu.sub(y, ty)?),
    })
}

pub(crate) fn rotate_f64(x: f64, y: f64, plan: &RotationPlan, counts: &mut OpCounts) -> (f64, f64) {
    plan.steps()
        .iter()
        .fold((x, y), |(x, y), s| micro_rotate_f64(x, y, s, counts))
}

pub(crate) fn rotate_raw(
    alu: &mut FixedAlu<'_>,
    x: i64,
    y: i64,
    plan: &RotationPlan,
) -> Result<(i64, i64)> {
    plan.steps()
        .iter()
        .try_fold((x, y), |(x, y), s| micro_rotate_raw(alu, x, y, s))
}

/// One unscaled micro-rotation.
pub fn micro_rotate(v: Vector2, step: &MicroRotation, mode: ArithmeticMode) -> Result<Vector2> {
    micro_rotate_counted(v, step, mode, &mut OpCounts::new())
}

pub fn micro_rotate_counted(
    v: Vector2,
    step: &MicroRotation,
    mode: ArithmeticMode,
    counts: &mut OpCounts,
) -> Result<Vector2> {
    match mode {
        ArithmeticMode::ExactFloat => {
            let (x, y) = micro_rotate_f64(v.x, v.y, step, counts);
            Ok(Vector2::new(x, y))
        }
        ArithmeticMode::FixedPoint { format, overflow } => {
            let mut alu = FixedAlu::new(format, overflow, counts);
            let (x, y) = (alu.load(v.x)?, alu.load(v.y)?);
            let (x, y) = micro_rotate_raw(&mut alu, x, y, step)?;
            Ok(Vector2::new(format.to_f64(x), format.to_f64(y)))
        }
    }
}

/// Rotates `v` through every step of `plan`, optionally restoring the norm.
pub fn apply_plan(
    v: Vector2,
    plan: &RotationPlan,
    mode: ArithmeticMode,
    compensate: bool,
) -> Result<Vector2> {
    apply_plan_counted(v, plan, mode, compensate, &mut OpCounts::new())
}

pub fn apply_plan_counted(
    v: Vector2,
    plan: &RotationPlan,
    mode: ArithmeticMode,
    compensate: bool,
    counts: &mut OpCounts,
) -> Result<Vector2> {
    if plan.is_empty() {
        return Ok(v);
    }
    match mode {
        ArithmeticMode::ExactFloat => {
            let (mut x, mut y) = rotate_f64(v.x, v.y, plan, counts);
            if compensate {
                x *= plan.gain();
                y *= plan.gain();
                counts.multiply();
                counts.multiply();
            }
            Ok(Vector2::new(x, y))
        }
        ArithmeticMode::FixedPoint { format, overflow } => {
            let csd = if compensate {
                Some(gain_csd(plan.gain(), format.frac_bits())?)
            } else {
                None
            };
            let mut alu = FixedAlu::new(format, overflow, counts);
            let (x, y) = (alu.load(v.x)?, alu.load(v.y)?);
            let (mut x, mut y) = rotate_raw(&mut alu, x, y, plan)?;
            if let Some(csd) = csd {
                x = csd.apply_raw(&mut alu, x)?;
                y = csd.apply_raw(&mut alu, y)?;
            }
            Ok(Vector2::new(format.to_f64(x), format.to_f64(y)))
        }
    }
}
