//! Angle expressions: `pi/16`, `3pi/8`, `-3*pi/16`, `0.25`, `deg:22.5`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Parses an angle expression into radians.
pub fn parse_angle(text: &str) -> Result<f64> {
    let s = text.trim();
    let bad = || Error::Parse(format!("cannot parse angle {text:?}"));

    let value = if let Some(deg) = s.strip_prefix("deg:") {
        deg.trim().parse::<f64>().map_err(|_| bad())?.to_radians()
    } else if let Some(at) = s.find("pi") {
        let (coef, rest) = (
            s[..at].trim().trim_end_matches('*').trim(),
            s[at + 2..].trim(),
        );
        let coef = match coef {
            "" | "+" => 1.0,
            "-" => -1.0,
            c => c.parse::<f64>().map_err(|_| bad())?,
        };
        let denom = match rest {
            "" => 1.0,
            r => r
                .strip_prefix('/')
                .ok_or_else(bad)?
                .trim()
                .parse::<f64>()
                .map_err(|_| bad())?,
        };
        if denom == 0.0 {
            return Err(bad());
        }
        coef * PI / denom
    } else {
        s.parse::<f64>().map_err(|_| bad())?
    };

    if value.is_finite() {
        Ok(value)
    } else {
        Err(bad())
    }
}

/// Shortest decimal that parses back to the same radians.
pub fn format_angle(radians: f64) -> String {
    format!("{radians:?}")
}
