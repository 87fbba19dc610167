//! Binary PGM (`P5`, maxval 255) reading and writing.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::codec::GrayImage;
use crate::error::{Error, Result};

/// Parses a `P5` image. Header comments (`#` to end of line) are skipped.
pub fn decode(bytes: &[u8]) -> Result<GrayImage> {
    let mut pos = 0;
    let magic = token(bytes, &mut pos)?;
    if magic != b"P5" {
        return Err(Error::Pgm(format!(
            "magic {:?}, expected P5",
            String::from_utf8_lossy(magic)
        )));
    }
    let width = number(bytes, &mut pos, "width")?;
    let height = number(bytes, &mut pos, "height")?;
    let maxval = number(bytes, &mut pos, "maxval")?;
    if maxval != 255 {
        return Err(Error::Pgm(format!(
            "maxval {maxval}, only 255 is supported"
        )));
    }
    // exactly one whitespace byte separates the header from the raster
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => return Err(Error::Pgm("missing whitespace after maxval".into())),
    }
    let len = width * height;
    let raster = bytes.get(pos..pos + len).ok_or_else(|| {
        Error::Pgm(format!(
            "raster truncated: need {len} bytes, have {}",
            bytes.len() - pos
        ))
    })?;
    GrayImage::new(width, height, raster.to_vec())
}

pub fn encode(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.samples());
    out
}

pub fn read(path: impl AsRef<Path>) -> Result<GrayImage> {
    decode(&fs::read(path)?)
}

pub fn write(img: &GrayImage, path: impl AsRef<Path>) -> Result<()> {
    let mut f = fs::File::create(path)?;
    f.write_all(&encode(img))?;
    Ok(())
}

fn skip_space_and_comments(bytes: &[u8], pos: &mut usize) {
    while let Some(&b) = bytes.get(*pos) {
        if b == b'#' {
            while bytes.get(*pos).is_some_and(|&c| c != b'\n') {
                *pos += 1;
            }
        } else if b.is_ascii_whitespace() {
            *pos += 1;
        } else {
            break;
        }
    }
}

fn token<'a>(bytes: &'a [u8], pos: &mut usize) -> Result<&'a [u8]> {
    skip_space_and_comments(bytes, pos);
    let start = *pos;
    while bytes.get(*pos).is_some_and(|b| !b.is_ascii_whitespace()) {
        *pos += 1;
    }
    if start == *pos {
        return Err(Error::Pgm("unexpected end of header".into()));
    }
    Ok(&bytes[start..*pos])
}

fn number(bytes: &[u8], pos: &mut usize, what: &str) -> Result<usize> {
    let tok = token(bytes, pos)?;
    std::str::from_utf8(tok)
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::Pgm(format!("bad {what} {:?}", String::from_utf8_lossy(tok))))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_with_comment() {
        let mut bytes = b"P5\n# made by hand\n3 2\n255\n".to_vec();
        bytes.extend([0, 1, 2, 253, 254, 255]);
        let img = decode(&bytes).unwrap();
        assert_eq!((img.width(), img.height()), (3, 2));
        assert_eq!(img.samples(), [0, 1, 2, 253, 254, 255]);
        assert_eq!(
            encode(&img),
            [b"P5\n3 2\n255\n".as_slice(), &[0, 1, 2, 253, 254, 255]].concat()
        );
    }

    #[test]
    fn raster_may_start_with_whitespace_byte() {
        let mut bytes = b"P5 2 1 255 ".to_vec();
        bytes.extend(*b" \n");
        assert_eq!(decode(&bytes).unwrap().samples(), [b' ', b'\n']);
    }

    #[test]
    fn rejects_malformed() {
        assert!(matches!(decode(b"P2\n1 1\n255\n0"), Err(Error::Pgm(_))));
        assert!(matches!(decode(b"P5\n1 1\n65535\n00"), Err(Error::Pgm(_))));
        assert!(matches!(decode(b"P5\n4 4\n255\n0123"), Err(Error::Pgm(_))));
        assert!(matches!(decode(b"P5\nx 4\n255\n"), Err(Error::Pgm(_))));
        assert!(decode(b"P5\n0 4\n255\n").is_err());
    }
}
