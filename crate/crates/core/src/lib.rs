//! Shift-and-add CORDIC rotators and an 8-point DCT built from them.
//!
//! The crate decomposes rotation angles into micro-rotations by angles
//! `atan(2^-i)`, executes them in floating point or in fixed point with only
//! additions and shifts, assembles four rotators into an 8-point DCT flow
//! graph, and measures the effect of the approximation on a JPEG-style codec.
//!
//! Runnable examples live in `examples/`:
//!
//! | example            | shows                                              |
//! |--------------------|----------------------------------------------------|
//! | `decompose_angles` | micro-rotation plans for the DCT rotator angles    |
//! | `rotate_vector`    | plan matrices and fixed vs float rotation          |
//! | `csd_gain`         | shift-add approximations of the rotator gain       |
//! | `dct_flow_graph`   | the flow-graph DCT against the exact transform     |
//! | `fixed_point_dct`  | multiplier-free 2-D DCT and its operation counts   |
//! | `psnr_sweep`       | PSNR over tolerance and quality on an image        |
//!
//! ```
//! use cordic_dct::planner::{decompose, IndexPolicy};
//!
//! let plan = decompose(std::f64::consts::PI / 16.0, 1e-4, IndexPolicy::NearestIndex).unwrap();
//! assert_eq!(plan.indices_string(), "2/4/6/9/13");
//! assert_eq!(plan.directions_string(), "+-+-+");
//! ```

pub mod angle;
pub mod cli;
pub mod codec;
pub mod cordic;
pub mod dct8;
pub mod error;
pub mod fixed;
pub mod ops;
pub mod pgm;
pub mod planner;
pub mod testimage;

pub use error::{Error, Result};
