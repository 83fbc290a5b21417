//! Pixel substrate: RGB and gray rasters, decoding, ROI cropping.
//!
//! Images are immutable once built. Every operation returns a fresh buffer.

use std::fs;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// An 8-bit RGB triple.
pub type Rgb = [u8; 3];

const PNG_MAGIC: &[u8] = b"\x89PNG\r\n\x1a\n";

#[derive(Debug, Error)]
pub enum RasterError {
    #[error("unsupported image format")]
    UnsupportedFormat,
    #[error("corrupt image file: {0}")]
    CorruptFile(String),
    #[error("i/o failure: {0}")]
    Io(#[from] io::Error),
    #[error("invalid dimensions {width}x{height}")]
    InvalidDimensions { width: usize, height: usize },
    #[error("pixel buffer holds {got} pixels, expected {expected}")]
    BufferLength { expected: usize, got: usize },
    #[error("roi {roi} lies outside the {width}x{height} image")]
    RoiOutOfBounds { roi: Roi, width: usize, height: usize },
    #[error("roi must have positive width and height, got {width}x{height}")]
    EmptyRoi { width: usize, height: usize },
}

/// Row-major RGB image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RasterImage {
    width: usize,
    height: usize,
    pixels: Vec<Rgb>,
}

impl RasterImage {
    pub fn new(width: usize, height: usize, pixels: Vec<Rgb>) -> Result<Self, RasterError> {
        if width == 0 || height == 0 {
            return Err(RasterError::InvalidDimensions { width, height });
        }
        if pixels.len() != width * height {
            return Err(RasterError::BufferLength {
                expected: width * height,
                got: pixels.len(),
            });
        }
        Ok(RasterImage { width, height, pixels })
    }

    /// Image with every pixel set to `color`.
    pub fn filled(width: usize, height: usize, color: Rgb) -> Result<Self, RasterError> {
        Self::new(width, height, vec![color; width * height])
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> Rgb,
    ) -> Result<Self, RasterError> {
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        Self::new(width, height, pixels)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[Rgb] {
        &self.pixels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> Rgb {
        self.pixels[y * self.width + x]
    }

    /// The whole image as an ROI.
    pub fn full_roi(&self) -> Roi {
        Roi { x0: 0, y0: 0, width: self.width, height: self.height }
    }
}

/// Row-major gray-level image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    values: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, values: Vec<u8>) -> Result<Self, RasterError> {
        if width == 0 || height == 0 {
            return Err(RasterError::InvalidDimensions { width, height });
        }
        if values.len() != width * height {
            return Err(RasterError::BufferLength {
                expected: width * height,
                got: values.len(),
            });
        }
        Ok(GrayImage { width, height, values })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[u8] {
        &self.values
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.values[y * self.width + x]
    }
}

/// Operator-selected rectangle, in image pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Roi {
    pub x0: usize,
    pub y0: usize,
    pub width: usize,
    pub height: usize,
}

impl Roi {
    pub fn new(x0: usize, y0: usize, width: usize, height: usize) -> Result<Self, RasterError> {
        if width == 0 || height == 0 {
            return Err(RasterError::EmptyRoi { width, height });
        }
        Ok(Roi { x0, y0, width, height })
    }

    /// Fails unless the ROI is nonempty and lies entirely inside a `width`x`height` image.
    pub fn check_within(&self, width: usize, height: usize) -> Result<(), RasterError> {
        if self.width == 0 || self.height == 0 {
            return Err(RasterError::EmptyRoi { width: self.width, height: self.height });
        }
        let fits_x = self.x0.checked_add(self.width).is_some_and(|r| r <= width);
        let fits_y = self.y0.checked_add(self.height).is_some_and(|b| b <= height);
        if fits_x && fits_y {
            Ok(())
        } else {
            Err(RasterError::RoiOutOfBounds { roi: *self, width, height })
        }
    }

    /// Integer pixel nearest the ROI centre, in ROI-local coordinates.
    pub fn local_center(&self) -> (usize, usize) {
        (self.width / 2, self.height / 2)
    }
}

impl std::fmt::Display for Roi {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{},{},{},{}", self.x0, self.y0, self.width, self.height)
    }
}

impl std::str::FromStr for Roi {
    type Err = String;

    /// Parses `x,y,w,h`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(format!("expected X,Y,W,H but got {s:?}"));
        }
        let mut nums = [0usize; 4];
        for (slot, part) in nums.iter_mut().zip(&parts) {
            *slot = part
                .parse()
                .map_err(|_| format!("invalid roi component {part:?} in {s:?}"))?;
        }
        Roi::new(nums[0], nums[1], nums[2], nums[3]).map_err(|e| e.to_string())
    }
}

/// Rec.601 luma, rounded half-up. Integer arithmetic keeps the rounding exact.
#[inline]
pub fn luma(rgb: Rgb) -> u8 {
    let [r, g, b] = rgb.map(u32::from);
    let scaled = 299 * r + 587 * g + 114 * b;
    ((scaled + 500) / 1000).min(255) as u8
}

pub fn to_grayscale(img: &RasterImage) -> GrayImage {
    GrayImage {
        width: img.width,
        height: img.height,
        values: img.pixels.iter().map(|&p| luma(p)).collect(),
    }
}

pub fn crop_roi(img: &RasterImage, roi: &Roi) -> Result<RasterImage, RasterError> {
    roi.check_within(img.width, img.height)?;
    let mut pixels = Vec::with_capacity(roi.width * roi.height);
    for y in roi.y0..roi.y0 + roi.height {
        let start = y * img.width + roi.x0;
        pixels.extend_from_slice(&img.pixels[start..start + roi.width]);
    }
    RasterImage::new(roi.width, roi.height, pixels)
}

pub fn load_image(path: impl AsRef<Path>) -> Result<RasterImage, RasterError> {
    let bytes = fs::read(path)?;
    decode_image(&bytes)
}

/// Decodes PNG or binary PPM (P6), sniffed from the leading bytes.
pub fn decode_image(bytes: &[u8]) -> Result<RasterImage, RasterError> {
    if bytes.starts_with(PNG_MAGIC) {
        decode_png(bytes)
    } else if bytes.starts_with(b"P6") {
        decode_ppm(bytes)
    } else {
        Err(RasterError::UnsupportedFormat)
    }
}

fn decode_png(bytes: &[u8]) -> Result<RasterImage, RasterError> {
    let decoded = image::load_from_memory_with_format(bytes, image::ImageFormat::Png)
        .map_err(|e| RasterError::CorruptFile(e.to_string()))?;
    let rgb = decoded.to_rgb8();
    let (w, h) = (rgb.width() as usize, rgb.height() as usize);
    let pixels = rgb.pixels().map(|p| p.0).collect();
    RasterImage::new(w, h, pixels)
}

fn decode_ppm(bytes: &[u8]) -> Result<RasterImage, RasterError> {
    let mut pos = 2;
    let mut header = [0usize; 3];
    for field in header.iter_mut() {
        *field = ppm_header_number(bytes, &mut pos)?;
    }
    let [width, height, maxval] = header;
    if maxval != 255 {
        return Err(RasterError::CorruptFile(format!("unsupported PPM maxval {maxval}")));
    }
    if width == 0 || height == 0 {
        return Err(RasterError::InvalidDimensions { width, height });
    }
    // exactly one whitespace byte separates the header from the raster
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => return Err(RasterError::CorruptFile("missing raster separator".into())),
    }
    let needed = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(3))
        .ok_or_else(|| RasterError::CorruptFile("dimensions overflow".into()))?;
    let data = &bytes[pos..];
    if data.len() < needed {
        return Err(RasterError::CorruptFile(format!(
            "raster truncated: {} of {needed} bytes",
            data.len()
        )));
    }
    let pixels = data[..needed].chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect();
    RasterImage::new(width, height, pixels)
}

fn ppm_header_number(bytes: &[u8], pos: &mut usize) -> Result<usize, RasterError> {
    loop {
        match bytes.get(*pos) {
            Some(b'#') => {
                while bytes.get(*pos).is_some_and(|&b| b != b'\n') {
                    *pos += 1;
                }
            }
            Some(b) if b.is_ascii_whitespace() => *pos += 1,
            Some(_) => break,
            None => return Err(RasterError::CorruptFile("PPM header truncated".into())),
        }
    }
    let start = *pos;
    while bytes.get(*pos).is_some_and(u8::is_ascii_digit) {
        *pos += 1;
    }
    if start == *pos {
        return Err(RasterError::CorruptFile("malformed PPM header".into()));
    }
    std::str::from_utf8(&bytes[start..*pos])
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| RasterError::CorruptFile("PPM header number out of range".into()))
}

pub fn encode_ppm(img: &RasterImage) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", img.width, img.height).into_bytes();
    out.reserve(img.pixels.len() * 3);
    for p in &img.pixels {
        out.extend_from_slice(p);
    }
    out
}

pub fn encode_png(img: &RasterImage) -> Result<Vec<u8>, RasterError> {
    let flat: Vec<u8> = img.pixels.iter().flatten().copied().collect();
    let buffer = image::RgbImage::from_raw(img.width as u32, img.height as u32, flat)
        .ok_or(RasterError::BufferLength { expected: img.width * img.height, got: img.pixels.len() })?;
    let mut out = io::Cursor::new(Vec::new());
    buffer
        .write_to(&mut out, image::ImageFormat::Png)
        .map_err(|e| RasterError::Io(io::Error::other(e)))?;
    Ok(out.into_inner())
}

/// Writes PNG or PPM depending on the file extension (`.ppm` selects PPM, anything else PNG).
pub fn save_image(img: &RasterImage, path: impl AsRef<Path>) -> Result<(), RasterError> {
    let path = path.as_ref();
    let is_ppm = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("ppm"));
    let bytes = if is_ppm { encode_ppm(img) } else { encode_png(img)? };
    fs::write(path, bytes)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn decodes_small_white_ppm() {
        let mut bytes = b"P6\n2 2\n255\n".to_vec();
        bytes.extend(std::iter::repeat(255u8).take(12));
        let img = decode_image(&bytes).unwrap();
        assert_eq!((img.width(), img.height()), (2, 2));
        assert!(img.pixels().iter().all(|&p| p == [255, 255, 255]));
    }

    #[test]
    fn ppm_header_comments_are_skipped() {
        let mut bytes = b"P6\n# made by hand\n1 1\n255\n".to_vec();
        bytes.extend([1, 2, 3]);
        assert_eq!(decode_image(&bytes).unwrap().get(0, 0), [1, 2, 3]);
    }

    #[test]
    fn truncated_ppm_is_corrupt() {
        let mut bytes = b"P6\n2 2\n255\n".to_vec();
        bytes.extend([0u8; 7]);
        assert!(matches!(decode_image(&bytes), Err(RasterError::CorruptFile(_))));
        assert!(matches!(decode_image(b"P6\n2"), Err(RasterError::CorruptFile(_))));
    }

    #[test]
    fn unknown_magic_is_unsupported() {
        assert!(matches!(
            decode_image(b"hello, world"),
            Err(RasterError::UnsupportedFormat)
        ));
    }

    #[test]
    fn truncated_png_is_corrupt() {
        let img = RasterImage::filled(4, 4, [9, 9, 9]).unwrap();
        let png = encode_png(&img).unwrap();
        let cut = &png[..png.len() / 2];
        assert!(matches!(decode_image(cut), Err(RasterError::CorruptFile(_))));
    }

    #[test]
    fn smear_sized_image_keeps_dimensions() {
        let img = RasterImage::filled(1600, 1200, [240, 220, 210]).unwrap();
        let back = decode_image(&encode_png(&img).unwrap()).unwrap();
        assert_eq!((back.width(), back.height()), (1600, 1200));
        let back = decode_image(&encode_ppm(&img)).unwrap();
        assert_eq!((back.width(), back.height()), (1600, 1200));
    }

    #[test]
    fn luma_examples() {
        assert_eq!(luma([255, 255, 255]), 255);
        assert_eq!(luma([0, 0, 0]), 0);
        // 76.245 + 130.314 + 24.966 = 231.525, rounds up
        assert_eq!(luma([255, 222, 219]), 232);
    }

    #[test]
    fn crop_examples() {
        let img = RasterImage::from_fn(5, 4, |x, y| [x as u8, y as u8, 0]).unwrap();
        assert_eq!(crop_roi(&img, &img.full_roi()).unwrap(), img);
        let one = crop_roi(&img, &Roi::new(0, 0, 1, 1).unwrap()).unwrap();
        assert_eq!(one.pixels(), &[img.get(0, 0)]);
        let sub = crop_roi(&img, &Roi::new(2, 1, 3, 2).unwrap()).unwrap();
        assert_eq!(sub.get(0, 0), [2, 1, 0]);
        assert_eq!(sub.get(2, 1), [4, 2, 0]);
        assert!(matches!(
            crop_roi(&img, &Roi::new(3, 0, 3, 1).unwrap()),
            Err(RasterError::RoiOutOfBounds { .. })
        ));
    }

    #[test]
    fn roi_parsing() {
        assert_eq!("1,2,3,4".parse::<Roi>().unwrap(), Roi::new(1, 2, 3, 4).unwrap());
        assert!("1,2,0,4".parse::<Roi>().is_err());
        assert!("1,2,3".parse::<Roi>().is_err());
        assert!("a,2,3,4".parse::<Roi>().is_err());
    }

    #[test]
    fn buffer_length_is_validated() {
        assert!(RasterImage::new(2, 2, vec![[0; 3]; 3]).is_err());
        assert!(RasterImage::new(0, 2, vec![]).is_err());
    }

    proptest! {
        #[test]
        fn achromatic_gray_is_identity(v in 0u8..=255) {
            prop_assert_eq!(luma([v, v, v]), v);
        }

        #[test]
        fn luma_is_monotone_per_channel(r in 0u8..=255, g in 0u8..=255, b in 0u8..=255, ch in 0usize..3) {
            let base = [r, g, b];
            let mut up = base;
            up[ch] = up[ch].saturating_add(1);
            prop_assert!(luma(up) >= luma(base));
        }

        #[test]
        fn full_extent_crop_is_idempotent(w in 1usize..12, h in 1usize..12, seed in any::<u64>(),
                                          x0 in 0usize..6, y0 in 0usize..6) {
            let img = RasterImage::from_fn(w + x0, h + y0, |x, y| {
                let v = seed.wrapping_mul((x * 31 + y * 17 + 1) as u64);
                [v as u8, (v >> 8) as u8, (v >> 16) as u8]
            }).unwrap();
            let once = crop_roi(&img, &Roi::new(x0, y0, w, h).unwrap()).unwrap();
            let twice = crop_roi(&once, &once.full_roi()).unwrap();
            prop_assert_eq!(once, twice);
        }
    }
}
