//! Rotating a vector through a plan: matrix form, float and fixed point.
//!
//! ```text
//! cargo run --example rotate_vector
//! ```

use std::f64::consts::PI;

use cordic_dct::cordic::{apply_plan_counted, ideal_rotation_matrix, plan_matrix, Vector2};
use cordic_dct::fixed::{ArithmeticMode, FixedPointFormat, OverflowPolicy};
use cordic_dct::ops::OpCounts;
use cordic_dct::planner::{decompose, IndexPolicy};

fn main() -> cordic_dct::Result<()> {
    let plan = decompose(PI / 16.0, 1e-4, IndexPolicy::NearestIndex)?;
    let m = plan_matrix(&plan);
    println!(
        "pi/16 plan {} {}",
        plan.indices_string(),
        plan.directions_string()
    );
    println!("uncompensated matrix:");
    println!("  [{:+.6} {:+.6}]", m.a, m.b);
    println!("  [{:+.6} {:+.6}]", m.c, m.d);
    let ideal = ideal_rotation_matrix(PI / 16.0);
    println!(
        "|M*gain - R|max = {:.2e}",
        m.scale(plan.gain()).max_abs_diff(&ideal)
    );

    let v = Vector2::new(0.6, -0.3);
    let want = ideal.apply(v);
    let modes = [
        ("float", ArithmeticMode::ExactFloat),
        (
            "fixed Q16.12",
            ArithmeticMode::fixed(FixedPointFormat::UNIT, OverflowPolicy::Error),
        ),
        (
            "fixed Q24.20",
            ArithmeticMode::fixed(FixedPointFormat::new(24, 20)?, OverflowPolicy::Error),
        ),
    ];
    for (name, mode) in modes {
        let mut ops = OpCounts::new();
        let got = apply_plan_counted(v, &plan, mode, true, &mut ops)?;
        println!(
            "{name:<13} ({:+.6}, {:+.6})  err={:.2e}  adds={} shifts={} multiplies={}",
            got.x,
            got.y,
            got.distance(&want),
            ops.adds,
            ops.shifts,
            ops.multiplies
        );
    }
    Ok(())
}
