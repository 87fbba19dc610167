//! The CORDIC flow-graph DCT against the exact transform, across tolerances.
//!
//! ```text
//! cargo run --example dct_flow_graph
//! ```

use cordic_dct::dct8::{dct8_oracle, DctEngine};

fn main() -> cordic_dct::Result<()> {
    let x = [52.0, 55.0, 61.0, 66.0, 70.0, 61.0, 64.0, 73.0];
    let exact = dct8_oracle(&x);
    println!("exact: {}", fmt(&exact));
    for eps in [1e-2, 1e-3, 1e-4, 1e-6] {
        let engine = DctEngine::exact_float(eps)?;
        let got = engine.forward(&x)?;
        let err = got
            .iter()
            .zip(&exact)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        let ops = engine.op_count_report()?;
        println!(
            "eps={eps:e}  max err={err:.2e}  adds={} shifts={} multiplies={}",
            ops.adds, ops.shifts, ops.multiplies
        );
    }
    let engine = DctEngine::exact_float(1e-4)?;
    println!("1e-4:  {}", fmt(&engine.forward(&x)?));
    println!("post-scales: {}", fmt(engine.post_scales()));
    Ok(())
}

fn fmt(v: &[f64; 8]) -> String {
    v.iter()
        .map(|c| format!("{c:9.4}"))
        .collect::<Vec<_>>()
        .join(" ")
}
