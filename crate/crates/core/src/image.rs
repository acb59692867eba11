//! 8-bit grayscale images and PGM (netpbm) serialization.
//!
//! Reads both the ASCII (`P2`) and binary (`P5`) variants with `#` comments
//! anywhere whitespace is allowed in the header; writes canonical `P5` with
//! a fixed header layout so identical images produce identical bytes. Only
//! maxval 255 is handled, and parse failures name the byte offset at which
//! the data stopped making sense.

use crate::error::{Error, Result};
use std::path::Path;

/// A width x height grid of 8-bit pixels, row-major from the top-left.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<GrayImage> {
        if width == 0 || height == 0 {
            return Err(Error::EmptyImage { width, height });
        }
        let expected = width * height;
        if pixels.len() != expected {
            return Err(Error::PixelCount {
                width,
                height,
                expected,
                got: pixels.len(),
            });
        }
        Ok(GrayImage {
            width,
            height,
            pixels,
        })
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> u8,
    ) -> Result<GrayImage> {
        if width == 0 || height == 0 {
            return Err(Error::EmptyImage { width, height });
        }
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        GrayImage::new(width, height, pixels)
    }

    pub fn constant(width: usize, height: usize, value: u8) -> Result<GrayImage> {
        GrayImage::new(width, height, vec![value; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Pixel at column `x`, row `y`.
    pub fn get(&self, x: usize, y: usize) -> u8 {
        assert!(
            x < self.width && y < self.height,
            "pixel ({x}, {y}) out of range for {}x{}",
            self.width,
            self.height
        );
        self.pixels[y * self.width + x]
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }
}

struct HeaderCursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> HeaderCursor<'a> {
    /// Skips whitespace and `#` comments (which run to end of line).
    fn skip_separators(&mut self) {
        while self.pos < self.data.len() {
            match self.data[self.pos] {
                b' ' | b'\t' | b'\r' | b'\n' => self.pos += 1,
                b'#' => {
                    while self.pos < self.data.len() && self.data[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                _ => return,
            }
        }
    }

    fn read_number(&mut self, what: &'static str) -> Result<(u64, usize)> {
        self.skip_separators();
        let start = self.pos;
        if start == self.data.len() {
            return Err(Error::TruncatedImage { offset: start });
        }
        let mut value: u64 = 0;
        while self.pos < self.data.len() && self.data[self.pos].is_ascii_digit() {
            value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add(u64::from(self.data[self.pos] - b'0')))
                .ok_or(Error::MalformedHeader {
                    offset: start,
                    reason: what,
                })?;
            self.pos += 1;
        }
        if self.pos == start {
            return Err(Error::MalformedHeader {
                offset: start,
                reason: what,
            });
        }
        Ok((value, start))
    }
}

/// Parses a `P2` or `P5` grayscale image from bytes.
pub fn pgm_from_bytes(data: &[u8]) -> Result<GrayImage> {
    if data.len() < 2 {
        return Err(Error::TruncatedImage { offset: data.len() });
    }
    let magic = &data[..2];
    if magic != b"P2" && magic != b"P5" {
        return Err(Error::UnsupportedFormat {
            offset: 0,
            magic: String::from_utf8_lossy(magic).into_owned(),
        });
    }
    let binary = magic == b"P5";
    let mut cursor = HeaderCursor { data, pos: 2 };
    let (width, _) = cursor.read_number("expected width")?;
    let (height, _) = cursor.read_number("expected height")?;
    let (maxval, maxval_offset) = cursor.read_number("expected maxval")?;
    if maxval != 255 {
        return Err(Error::UnsupportedMaxval {
            offset: maxval_offset,
            maxval,
        });
    }
    if width == 0 || height == 0 {
        return Err(Error::EmptyImage {
            width: width as usize,
            height: height as usize,
        });
    }
    let width = width as usize;
    let height = height as usize;
    let count = width.checked_mul(height).ok_or(Error::MalformedHeader {
        offset: maxval_offset,
        reason: "image dimensions overflow",
    })?;

    if binary {
        // Exactly one whitespace byte separates the header from the payload.
        if cursor.pos >= data.len() {
            return Err(Error::TruncatedImage { offset: data.len() });
        }
        if !data[cursor.pos].is_ascii_whitespace() {
            return Err(Error::MalformedHeader {
                offset: cursor.pos,
                reason: "expected single whitespace before pixel data",
            });
        }
        let payload = cursor.pos + 1;
        if data.len() < payload + count {
            return Err(Error::TruncatedImage { offset: data.len() });
        }
        GrayImage::new(width, height, data[payload..payload + count].to_vec())
    } else {
        let mut pixels = Vec::with_capacity(count);
        for _ in 0..count {
            let (value, offset) = cursor.read_number("expected pixel value")?;
            if value > 255 {
                return Err(Error::PixelOutOfRange { offset, value });
            }
            pixels.push(value as u8);
        }
        GrayImage::new(width, height, pixels)
    }
}

/// Canonical `P5` encoding: `P5\n<width> <height>\n255\n` then one byte per
/// pixel, row-major.
pub fn pgm_to_bytes(img: &GrayImage) -> Vec<u8> {
    let header = format!("P5\n{} {}\n255\n", img.width, img.height);
    let mut out = Vec::with_capacity(header.len() + img.pixels.len());
    out.extend_from_slice(header.as_bytes());
    out.extend_from_slice(&img.pixels);
    out
}

pub fn read_pgm(path: impl AsRef<Path>) -> Result<GrayImage> {
    pgm_from_bytes(&std::fs::read(path)?)
}

pub fn write_pgm(path: impl AsRef<Path>, img: &GrayImage) -> Result<()> {
    std::fs::write(path, pgm_to_bytes(img))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp(width: usize, height: usize) -> GrayImage {
        GrayImage::from_fn(width, height, |x, y| (x * 7 + y * 13 % 256) as u8).unwrap()
    }

    #[test]
    fn constructor_validates_shape() {
        assert!(matches!(
            GrayImage::new(0, 4, vec![]),
            Err(Error::EmptyImage { .. })
        ));
        assert!(matches!(
            GrayImage::new(2, 2, vec![0; 3]),
            Err(Error::PixelCount { .. })
        ));
    }

    #[test]
    fn binary_roundtrip_is_bit_exact() {
        let img = ramp(13, 9);
        let bytes = pgm_to_bytes(&img);
        assert!(bytes.starts_with(b"P5\n13 9\n255\n"));
        let back = pgm_from_bytes(&bytes).unwrap();
        assert_eq!(back, img);
        assert_eq!(pgm_to_bytes(&back), bytes);
    }

    #[test]
    fn ascii_variant_parses_with_comments() {
        let text = b"P2 # ascii\n# a comment line\n3 2\n255\n0 128 255\n7 9 11\n";
        let img = pgm_from_bytes(text).unwrap();
        assert_eq!((img.width(), img.height()), (3, 2));
        assert_eq!(img.pixels(), &[0, 128, 255, 7, 9, 11]);
        assert_eq!(img.get(1, 0), 128);
        assert_eq!(img.get(2, 1), 11);
    }

    #[test]
    fn binary_header_allows_comments() {
        let mut bytes = b"P5\n# generated\n2 2\n255\n".to_vec();
        bytes.extend_from_slice(&[1, 2, 3, 4]);
        let img = pgm_from_bytes(&bytes).unwrap();
        assert_eq!(img.pixels(), &[1, 2, 3, 4]);
    }

    #[test]
    fn color_and_unknown_magics_are_rejected() {
        for magic in [&b"P6"[..], b"P3", b"P4", b"XY"] {
            let mut bytes = magic.to_vec();
            bytes.extend_from_slice(b"\n2 2\n255\n....");
            match pgm_from_bytes(&bytes) {
                Err(Error::UnsupportedFormat { offset: 0, .. }) => {}
                other => panic!("{magic:?}: unexpected result {other:?}"),
            }
        }
    }

    #[test]
    fn wrong_maxval_is_rejected_at_its_offset() {
        let err = pgm_from_bytes(b"P5\n2 2\n65535\n....").unwrap_err();
        match err {
            Error::UnsupportedMaxval {
                offset: 7,
                maxval: 65535,
            } => {}
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn truncated_payload_reports_end_offset() {
        let img = ramp(4, 4);
        let mut bytes = pgm_to_bytes(&img);
        bytes.pop();
        // Header is "P5\n4 4\n255\n" (11 bytes); a payload one byte short
        // fails at 11 + 16 - 1.
        let err = pgm_from_bytes(&bytes).unwrap_err();
        match err {
            Error::TruncatedImage { offset } => assert_eq!(offset, 11 + 16 - 1),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn ascii_pixel_overflow_is_rejected() {
        let err = pgm_from_bytes(b"P2\n2 1\n255\n12 300\n").unwrap_err();
        match err {
            Error::PixelOutOfRange {
                offset: 14,
                value: 300,
            } => {}
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn ascii_missing_pixels_is_truncation() {
        let err = pgm_from_bytes(b"P2\n2 2\n255\n1 2 3\n").unwrap_err();
        assert!(matches!(err, Error::TruncatedImage { .. }));
    }

    #[test]
    fn garbage_header_is_malformed() {
        let err = pgm_from_bytes(b"P5\nwx 4\n255\n").unwrap_err();
        assert!(matches!(err, Error::MalformedHeader { offset: 3, .. }));
    }

    #[test]
    fn zero_dimensions_are_rejected() {
        let err = pgm_from_bytes(b"P5\n0 4\n255\n").unwrap_err();
        assert!(matches!(err, Error::EmptyImage { .. }));
    }
}
