//! Runtime-parameterized two's-complement fixed point.
//!
//! Word length and binary point are chosen per run (8 to 32 bits), so the
//! arithmetic lives on plain `i64` raw values checked against the active
//! [`FixedPointFormat`]. [`FixedAlu`] deliberately exposes only add, subtract
//! and arithmetic shift: a datapath built on it cannot multiply.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ops::OpCounts;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixedPointFormat {
    total_bits: u32,
    frac_bits: u32,
}

impl FixedPointFormat {
    /// Unit-scaled rotator data: Q3.12 in a 16-bit word.
    pub const UNIT: FixedPointFormat = FixedPointFormat {
        total_bits: 16,
        frac_bits: 12,
    };
    /// 8-bit pixel data through the two-pass DCT: 8 fractional bits and
    /// 15 integer bits of headroom.
    pub const DCT: FixedPointFormat = FixedPointFormat {
        total_bits: 24,
        frac_bits: 8,
    };

    pub fn new(total_bits: u32, frac_bits: u32) -> Result<Self> {
        if !(8..=32).contains(&total_bits) {
            return Err(Error::Domain(format!(
                "total_bits {total_bits} not in [8, 32]"
            )));
        }
        if frac_bits + 2 > total_bits {
            return Err(Error::Domain(format!(
                "frac_bits {frac_bits} not in [0, {}]",
                total_bits - 2
            )));
        }
        Ok(Self {
            total_bits,
            frac_bits,
        })
    }

    pub fn total_bits(&self) -> u32 {
        self.total_bits
    }

    pub fn frac_bits(&self) -> u32 {
        self.frac_bits
    }

    pub fn min_raw(&self) -> i64 {
        -(1i64 << (self.total_bits - 1))
    }

    pub fn max_raw(&self) -> i64 {
        (1i64 << (self.total_bits - 1)) - 1
    }

    /// Weight of one least significant bit.
    pub fn lsb(&self) -> f64 {
        (-(self.frac_bits as f64)).exp2()
    }

    pub fn min_value(&self) -> f64 {
        self.min_raw() as f64 * self.lsb()
    }

    pub fn max_value(&self) -> f64 {
        self.max_raw() as f64 * self.lsb()
    }

    /// Nearest raw value, ties away from zero. Range is not checked here.
    pub fn quantize(&self, value: f64) -> i64 {
        (value * (self.frac_bits as f64).exp2()).round() as i64
    }

    pub fn to_f64(&self, raw: i64) -> f64 {
        raw as f64 * self.lsb()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum OverflowPolicy {
    Saturate,
    #[default]
    Error,
}

/// How rotator and transform arithmetic is carried out.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub enum ArithmeticMode {
    #[default]
    ExactFloat,
    FixedPoint {
        format: FixedPointFormat,
        overflow: OverflowPolicy,
    },
}

impl ArithmeticMode {
    pub fn fixed(format: FixedPointFormat, overflow: OverflowPolicy) -> Self {
        ArithmeticMode::FixedPoint { format, overflow }
    }

    pub fn is_fixed(&self) -> bool {
        matches!(self, ArithmeticMode::FixedPoint { .. })
    }
}

/// Shift-add integer unit bound to one format and overflow policy.
#[derive(Debug)]
pub struct FixedAlu<'a> {
    format: FixedPointFormat,
    overflow: OverflowPolicy,
    counts: &'a mut OpCounts,
}

impl<'a> FixedAlu<'a> {
    pub fn new(
        format: FixedPointFormat,
        overflow: OverflowPolicy,
        counts: &'a mut OpCounts,
    ) -> Self {
        Self {
            format,
            overflow,
            counts,
        }
    }

    pub fn format(&self) -> FixedPointFormat {
        self.format
    }

    /// Brings a value into range according to the overflow policy.
    pub fn check(&mut self, value: i64) -> Result<i64> {
        let (min, max) = (self.format.min_raw(), self.format.max_raw());
        if (min..=max).contains(&value) {
            return Ok(value);
        }
        match self.overflow {
            OverflowPolicy::Error => Err(Error::Overflow { value, min, max }),
            OverflowPolicy::Saturate => {
                self.counts.saturate();
                Ok(value.clamp(min, max))
            }
        }
    }

    /// Converts a real sample into the format, honouring the overflow policy.
    pub fn load(&mut self, value: f64) -> Result<i64> {
        if !value.is_finite() {
            return Err(Error::Domain(format!("non-finite sample {value}")));
        }
        let raw = self.format.quantize(value);
        self.check(raw)
    }

    pub fn add(&mut self, a: i64, b: i64) -> Result<i64> {
        self.counts.add();
        self.check(a + b)
    }

    pub fn sub(&mut self, a: i64, b: i64) -> Result<i64> {
        self.counts.add();
        self.check(a - b)
    }

    /// Arithmetic shift: right (floor) for positive `amount`, left for negative.
    pub fn shift(&mut self, a: i64, amount: i32) -> Result<i64> {
        self.counts.shift(amount);
        if amount >= 0 {
            Ok(a >> amount.min(63))
        } else {
            self.check(a << (-amount))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn format_bounds() {
        let f = FixedPointFormat::new(16, 12).unwrap();
        assert_eq!(f.min_raw(), -32768);
        assert_eq!(f.max_raw(), 32767);
        assert_eq!(f.min_value(), -8.0);
        assert_eq!(f.max_value(), 8.0 - 1.0 / 4096.0);
        assert!(FixedPointFormat::new(7, 0).is_err());
        assert!(FixedPointFormat::new(33, 0).is_err());
        assert!(FixedPointFormat::new(16, 15).is_err());
        assert!(FixedPointFormat::new(16, 14).is_ok());
    }

    #[test]
    fn shift_rounds_toward_negative_infinity() {
        let mut counts = OpCounts::new();
        let mut alu = FixedAlu::new(FixedPointFormat::UNIT, OverflowPolicy::Error, &mut counts);
        assert_eq!(alu.shift(5, 1).unwrap(), 2);
        assert_eq!(alu.shift(-5, 1).unwrap(), -3);
        assert_eq!(alu.shift(-1, 10).unwrap(), -1);
        assert_eq!(alu.shift(3, -2).unwrap(), 12);
    }

    #[test]
    fn overflow_policies() {
        let f = FixedPointFormat::new(8, 4).unwrap();
        let mut counts = OpCounts::new();
        {
            let mut alu = FixedAlu::new(f, OverflowPolicy::Error, &mut counts);
            assert!(matches!(
                alu.add(100, 100),
                Err(Error::Overflow { value: 200, .. })
            ));
        }
        {
            let mut alu = FixedAlu::new(f, OverflowPolicy::Saturate, &mut counts);
            assert_eq!(alu.add(100, 100).unwrap(), 127);
            assert_eq!(alu.sub(-100, 100).unwrap(), -128);
        }
        assert_eq!(counts.saturations, 2);
        assert_eq!(counts.adds, 3);
        assert_eq!(counts.multiplies, 0);
    }

    #[test]
    fn load_quantizes_to_nearest() {
        let mut counts = OpCounts::new();
        let mut alu = FixedAlu::new(FixedPointFormat::UNIT, OverflowPolicy::Error, &mut counts);
        assert_eq!(alu.load(0.5).unwrap(), 2048);
        assert_eq!(alu.load(-1.0).unwrap(), -4096);
        assert!(alu.load(9.0).is_err());
        assert!(alu.load(f64::NAN).is_err());
    }
}
