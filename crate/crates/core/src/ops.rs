//! Operation-count instrumentation.
//!
//! Every datapath in the crate threads an [`OpCounts`] through its
//! arithmetic so that the shift-add character of a transform can be
//! checked and reported. Shifts by zero are free wires and are not counted.

use serde::{Deserialize, Serialize};
use std::ops::AddAssign;

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpCounts {
    /// Additions and subtractions.
    pub adds: u64,
    /// Arithmetic shifts by a non-zero amount.
    pub shifts: u64,
    /// General multiplications (only the floating-point datapath uses them).
    pub multiplies: u64,
    /// Fixed-point results clamped by a saturating overflow policy.
    pub saturations: u64,
}

impl OpCounts {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub(crate) fn add(&mut self) {
        self.adds += 1;
    }

    #[inline]
    pub(crate) fn shift(&mut self, amount: i32) {
        if amount != 0 {
            self.shifts += 1;
        }
    }

    #[inline]
    pub(crate) fn multiply(&mut self) {
        self.multiplies += 1;
    }

    #[inline]
    pub(crate) fn saturate(&mut self) {
        self.saturations += 1;
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain struct serializes")
    }
}

impl AddAssign for OpCounts {
    fn add_assign(&mut self, rhs: Self) {
        self.adds += rhs.adds;
        self.shifts += rhs.shifts;
        self.multiplies += rhs.multiplies;
        self.saturations += rhs.saturations;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_shift_is_free() {
        let mut c = OpCounts::new();
        c.shift(0);
        c.shift(3);
        c.shift(-1);
        assert_eq!(c.shifts, 2);
    }

    #[test]
    fn accumulate() {
        let mut a = OpCounts {
            adds: 1,
            shifts: 2,
            multiplies: 3,
            saturations: 4,
        };
        a += a;
        assert_eq!(
            a,
            OpCounts {
                adds: 2,
                shifts: 4,
                multiplies: 6,
                saturations: 8
            }
        );
        let back: OpCounts = serde_json::from_str(&a.to_json()).unwrap();
        assert_eq!(back, a);
    }
}
