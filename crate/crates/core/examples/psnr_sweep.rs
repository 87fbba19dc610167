//! PSNR of the CORDIC codec over tolerance and quality.
//!
//! ```text
//! cargo run --release --example psnr_sweep [IMAGE.pgm]
//! ```
//!
//! Without an argument a synthetic 512×512 scene is used.

use cordic_dct::codec::{roundtrip_image, sweep, SweepConfig};
use cordic_dct::dct8::OracleDct;
use cordic_dct::{pgm, testimage};

fn main() -> cordic_dct::Result<()> {
    let img = match std::env::args().nth(1) {
        Some(path) => pgm::read(path)?,
        None => testimage::scene(512, 512, testimage::DEFAULT_SEED),
    };
    let report = sweep(&img, &SweepConfig::default())?;
    print!("{}", report.to_text());

    println!("exact DCT reference:");
    for q in [95, 75] {
        let decoded = roundtrip_image(&img, &OracleDct, q)?;
        println!("  Q{q}: {:.3} dB", cordic_dct::codec::psnr(&img, &decoded)?);
    }
    Ok(())
}
