//! Micro-rotation plans for the four DCT rotator angles.
//!
//! ```text
//! cargo run --example decompose_angles
//! ```

use cordic_dct::dct8::ROTATOR_ANGLES;
use cordic_dct::planner::{decompose, reconstruct_angle, IndexPolicy};

fn main() -> cordic_dct::Result<()> {
    for policy in [IndexPolicy::NearestIndex, IndexPolicy::PaperLiteral] {
        println!("policy: {policy}");
        for eps in [1e-3, 1e-4] {
            for &theta in &ROTATOR_ANGLES {
                let plan = decompose(theta, eps, policy)?;
                println!(
                    "  theta={:<20} eps={eps:e}  i={:<16} sigma={:<8} steps={} residual={:+.3e} gain={:.9}",
                    theta,
                    plan.indices_string(),
                    plan.directions_string(),
                    plan.len(),
                    theta - reconstruct_angle(&plan),
                    plan.gain()
                );
            }
        }
    }
    Ok(())
}
