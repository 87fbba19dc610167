//! Shift-add (signed power of two) approximations of the rotator gains.
//!
//! ```text
//! cargo run --example csd_gain
//! ```

use cordic_dct::cordic::csd_scale;
use cordic_dct::dct8::ROTATOR_ANGLES;
use cordic_dct::planner::{decompose, IndexPolicy};

fn main() -> cordic_dct::Result<()> {
    for &theta in &ROTATOR_ANGLES {
        let plan = decompose(theta, 1e-4, IndexPolicy::NearestIndex)?;
        println!("theta={theta:.6} gain={:.12}", plan.gain());
        for bits in [8, 12, 16, 20] {
            let csd = csd_scale(plan.gain(), 16, (-(bits as f64)).exp2())?;
            let terms: Vec<String> = csd
                .terms()
                .iter()
                .map(|(shift, dir)| format!("{}2^-{shift}", dir.symbol()))
                .collect();
            println!(
                "  tol 2^-{bits:<2}: {:<48} error={:.3e}",
                terms.join(" "),
                csd.error()
            );
        }
    }
    Ok(())
}
