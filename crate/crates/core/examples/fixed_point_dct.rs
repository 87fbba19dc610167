//! Multiplier-free 2-D DCT in fixed point, and its operation counts.
//!
//! ```text
//! cargo run --example fixed_point_dct
//! ```

use cordic_dct::dct8::{dct2d_oracle, Block8, DctEngine, EngineConfig};
use cordic_dct::fixed::{ArithmeticMode, FixedPointFormat, OverflowPolicy};
use cordic_dct::ops::OpCounts;

fn main() -> cordic_dct::Result<()> {
    let block = Block8::from_fn(|r, c| ((r * 37 + c * 11) % 256) as f64 - 128.0);
    let exact = dct2d_oracle(&block);
    for (bits, frac) in [(16, 2), (20, 4), (24, 8), (32, 16)] {
        let format = FixedPointFormat::new(bits, frac)?;
        let engine = DctEngine::new(EngineConfig {
            epsilon: 1e-4,
            mode: ArithmeticMode::fixed(format, OverflowPolicy::Saturate),
            ..EngineConfig::default()
        })?;
        let mut ops = OpCounts::new();
        let got = engine.forward_2d_counted(&block, &mut ops)?;
        println!(
            "Q{bits}.{frac:<2}  max err={:8.4}  adds={} shifts={} multiplies={} saturations={}",
            got.max_abs_diff(&exact),
            ops.adds,
            ops.shifts,
            ops.multiplies,
            ops.saturations
        );
    }
    Ok(())
}
