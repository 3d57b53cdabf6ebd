//! 8-bit grayscale images: binary PGM and palettized BMP I/O, synthetic
//! test images and grey-level histograms.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::RngState;

/// Number of grey levels.
pub const LEVELS: usize = 256;

#[derive(Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    /// Pixels are row-major, top row first.
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if width.checked_mul(height) != Some(pixels.len()) {
            return Err(Error::SizeMismatch(format!(
                "{width}x{height} image needs {} pixels, got {}",
                width.saturating_mul(height),
                pixels.len()
            )));
        }
        Ok(GrayImage { width, height, pixels })
    }

    pub fn filled(width: usize, height: usize, level: u8) -> Self {
        GrayImage { width, height, pixels: vec![level; width * height] }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn pixels_mut(&mut self) -> &mut [u8] {
        &mut self.pixels
    }

    pub fn into_pixels(self) -> Vec<u8> {
        self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    pub fn same_dimensions(&self, other: &GrayImage) -> bool {
        self.width == other.width && self.height == other.height
    }

    pub(crate) fn check_same_dimensions(&self, other: &GrayImage) -> Result<()> {
        if self.same_dimensions(other) {
            Ok(())
        } else {
            Err(Error::SizeMismatch(format!("{}x{} vs {}x{}", self.width, self.height, other.width, other.height)))
        }
    }
}

impl fmt::Debug for GrayImage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GrayImage({}x{})", self.width, self.height)
    }
}

/// Occurrence count of each grey level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Histogram {
    pub bins: Vec<u64>,
    pub total: u64,
}

impl Histogram {
    pub fn from_counts(bins: [u64; LEVELS]) -> Self {
        Histogram { total: bins.iter().sum(), bins: bins.to_vec() }
    }

    /// Share of pixels at `level`, in percent.
    pub fn percent(&self, level: usize) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            100.0 * self.bins[level] as f64 / self.total as f64
        }
    }
}

pub fn histogram(img: &GrayImage) -> Histogram {
    let mut bins = [0u64; LEVELS];
    for &p in img.pixels() {
        bins[p as usize] += 1;
    }
    Histogram::from_counts(bins)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ImageFormat {
    Pgm,
    Bmp,
}

impl ImageFormat {
    /// Guesses the format from a file extension.
    pub fn from_path(path: &Path) -> Option<Self> {
        let ext = path.extension()?.to_str()?.to_ascii_lowercase();
        match ext.as_str() {
            "pgm" => Some(ImageFormat::Pgm),
            "bmp" => Some(ImageFormat::Bmp),
            _ => None,
        }
    }
}

impl FromStr for ImageFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "pgm" => Ok(ImageFormat::Pgm),
            "bmp" => Ok(ImageFormat::Bmp),
            other => Err(format!("unknown image format {other:?}")),
        }
    }
}

pub fn load_image(path: impl AsRef<Path>) -> Result<GrayImage> {
    decode_image(&fs::read(path)?)
}

pub fn save_image(img: &GrayImage, path: impl AsRef<Path>, format: ImageFormat) -> Result<()> {
    let bytes = match format {
        ImageFormat::Pgm => encode_pgm(img),
        ImageFormat::Bmp => encode_bmp(img),
    };
    fs::write(path, bytes)?;
    Ok(())
}

/// Decodes a binary PGM or an 8-bit BMP, chosen by magic number.
pub fn decode_image(data: &[u8]) -> Result<GrayImage> {
    match data {
        [b'P', b'5', ..] => decode_pgm(data),
        [b'B', b'M', ..] => decode_bmp(data),
        [b'P', c, ..] if c.is_ascii_digit() => {
            Err(Error::UnsupportedFormat(format!("netpbm P{} (only binary P5 is read)", *c as char)))
        }
        _ => Err(Error::UnsupportedFormat("neither PGM nor BMP".into())),
    }
}

pub fn encode_pgm(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width, img.height).into_bytes();
    out.extend_from_slice(&img.pixels);
    out
}

pub fn decode_pgm(data: &[u8]) -> Result<GrayImage> {
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for field in fields.iter_mut() {
        // whitespace and comments before each header field
        loop {
            match data.get(pos) {
                Some(c) if c.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while data.get(pos).is_some_and(|&c| c != b'\n') {
                        pos += 1;
                    }
                }
                _ => break,
            }
        }
        let start = pos;
        while data.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        if start == pos {
            return Err(Error::CorruptHeader("PGM header field is not a number".into()));
        }
        *field = std::str::from_utf8(&data[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::CorruptHeader("PGM header field out of range".into()))?;
    }
    if !data.get(pos).is_some_and(u8::is_ascii_whitespace) {
        return Err(Error::CorruptHeader("missing whitespace after PGM maxval".into()));
    }
    pos += 1;
    let [width, height, maxval] = fields;
    if maxval != 255 {
        return Err(Error::UnsupportedFormat(format!("PGM maxval {maxval} (need 255)")));
    }
    let n = width.checked_mul(height).ok_or_else(|| Error::CorruptHeader("PGM dimensions overflow".into()))?;
    let body = &data[pos..];
    if body.len() < n {
        return Err(Error::SizeMismatch(format!("PGM needs {n} pixel bytes, found {}", body.len())));
    }
    GrayImage::new(width, height, body[..n].to_vec())
}

const BMP_FILE_HEADER: usize = 14;
const BMP_INFO_HEADER: usize = 40;
const BMP_PALETTE: usize = 256 * 4;

fn bmp_stride(width: usize) -> usize {
    (width + 3) & !3
}

/// 8bpp BI_RGB, bottom-up, identity grayscale palette.
pub fn encode_bmp(img: &GrayImage) -> Vec<u8> {
    let stride = bmp_stride(img.width);
    let data_offset = BMP_FILE_HEADER + BMP_INFO_HEADER + BMP_PALETTE;
    let image_size = stride * img.height;
    let file_size = data_offset + image_size;

    let mut out = Vec::with_capacity(file_size);
    out.extend_from_slice(b"BM");
    out.extend_from_slice(&(file_size as u32).to_le_bytes());
    out.extend_from_slice(&0u32.to_le_bytes());
    out.extend_from_slice(&(data_offset as u32).to_le_bytes());

    out.extend_from_slice(&(BMP_INFO_HEADER as u32).to_le_bytes());
    out.extend_from_slice(&(img.width as i32).to_le_bytes());
    out.extend_from_slice(&(img.height as i32).to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&8u16.to_le_bytes());
    out.extend_from_slice(&0u32.to_le_bytes());
    out.extend_from_slice(&(image_size as u32).to_le_bytes());
    out.extend_from_slice(&2835i32.to_le_bytes());
    out.extend_from_slice(&2835i32.to_le_bytes());
    out.extend_from_slice(&256u32.to_le_bytes());
    out.extend_from_slice(&0u32.to_le_bytes());

    for g in 0..=255u8 {
        out.extend_from_slice(&[g, g, g, 0]);
    }
    let pad = [0u8; 3];
    for row in img.pixels.chunks(img.width.max(1)).rev() {
        out.extend_from_slice(row);
        out.extend_from_slice(&pad[..stride - img.width]);
    }
    out
}

fn le_u16(d: &[u8], at: usize) -> Result<u16> {
    d.get(at..at + 2)
        .map(|b| u16::from_le_bytes([b[0], b[1]]))
        .ok_or_else(|| Error::CorruptHeader("truncated BMP header".into()))
}

fn le_u32(d: &[u8], at: usize) -> Result<u32> {
    d.get(at..at + 4)
        .map(|b| u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
        .ok_or_else(|| Error::CorruptHeader("truncated BMP header".into()))
}

/// Reads an 8bpp uncompressed BMP whose palette is grayscale. Each index is
/// mapped through the palette to its grey level.
pub fn decode_bmp(data: &[u8]) -> Result<GrayImage> {
    let data_offset = le_u32(data, 10)? as usize;
    let info_size = le_u32(data, 14)? as usize;
    if info_size < BMP_INFO_HEADER {
        return Err(Error::UnsupportedFormat(format!("BMP info header of {info_size} bytes")));
    }
    let width = le_u32(data, 18)? as i32;
    let height = le_u32(data, 22)? as i32;
    let bpp = le_u16(data, 28)?;
    let compression = le_u32(data, 30)?;
    let colors_used = le_u32(data, 46)? as usize;

    if bpp != 8 {
        return Err(Error::UnsupportedFormat(format!("{bpp} bits per pixel (need 8)")));
    }
    if compression != 0 {
        return Err(Error::UnsupportedFormat(format!("BMP compression {compression}")));
    }
    if width <= 0 || height == 0 {
        return Err(Error::CorruptHeader(format!("BMP dimensions {width}x{height}")));
    }
    let (width, top_down) = (width as usize, height < 0);
    let height = height.unsigned_abs() as usize;

    let entries = if colors_used == 0 { 256 } else { colors_used };
    if entries > 256 {
        return Err(Error::CorruptHeader(format!("BMP palette of {entries} entries")));
    }
    let pal_start = BMP_FILE_HEADER + info_size;
    let pal = data
        .get(pal_start..pal_start + entries * 4)
        .ok_or_else(|| Error::CorruptHeader("truncated BMP palette".into()))?;
    let mut levels = [0u8; 256];
    for (i, e) in pal.chunks_exact(4).enumerate() {
        if e[0] != e[1] || e[1] != e[2] {
            return Err(Error::UnsupportedFormat("BMP palette is not grayscale".into()));
        }
        levels[i] = e[0];
    }

    let stride = bmp_stride(width);
    let need = stride.checked_mul(height).ok_or_else(|| Error::CorruptHeader("BMP dimensions overflow".into()))?;
    let body = data.get(data_offset..).unwrap_or(&[]);
    if body.len() < need {
        return Err(Error::SizeMismatch(format!("BMP needs {need} pixel bytes, found {}", body.len())));
    }

    let mut pixels = Vec::with_capacity(width * height);
    for y in 0..height {
        let row = if top_down { y } else { height - 1 - y };
        for &idx in &body[row * stride..row * stride + width] {
            if idx as usize >= entries {
                return Err(Error::CorruptHeader(format!("pixel index {idx} beyond palette")));
            }
            pixels.push(levels[idx as usize]);
        }
    }
    GrayImage::new(width, height, pixels)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SynthKind {
    /// `(x + y) mod 256`.
    Gradient,
    /// Uniform noise under a 9x9 mean filter, stretched to 0..=255.
    SmoothNoise,
    /// Every pixel equals `seed mod 256`.
    Constant,
}

impl FromStr for SynthKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "gradient" => Ok(SynthKind::Gradient),
            "smooth_noise" => Ok(SynthKind::SmoothNoise),
            "constant" => Ok(SynthKind::Constant),
            other => Err(format!("unknown synthetic image kind {other:?}")),
        }
    }
}

const BLUR_RADIUS: usize = 4;

pub fn synth_image(kind: SynthKind, width: usize, height: usize, seed: u64) -> GrayImage {
    assert!(width >= 1 && height >= 1, "synthetic images need at least one pixel");
    match kind {
        SynthKind::Gradient => {
            let pixels = (0..height).flat_map(|y| (0..width).map(move |x| ((x + y) % 256) as u8)).collect();
            GrayImage { width, height, pixels }
        }
        SynthKind::Constant => GrayImage::filled(width, height, (seed % 256) as u8),
        SynthKind::SmoothNoise => smooth_noise(width, height, seed),
    }
}

fn smooth_noise(width: usize, height: usize, seed: u64) -> GrayImage {
    let mut rng = RngState::new(seed);
    let noise: Vec<u32> = (0..width * height).map(|_| (rng.next_u64() >> 56) as u32).collect();

    // Separable box sum with edges clamped; both passes cover 9 taps.
    let taps = |n: usize, i: usize| {
        (i as isize - BLUR_RADIUS as isize..=i as isize + BLUR_RADIUS as isize)
            .map(move |j| j.clamp(0, n as isize - 1) as usize)
    };
    let mut rows = vec![0u32; width * height];
    for y in 0..height {
        for x in 0..width {
            rows[y * width + x] = taps(width, x).map(|xx| noise[y * width + xx]).sum();
        }
    }
    let mut sums = vec![0u32; width * height];
    for y in 0..height {
        for x in 0..width {
            sums[y * width + x] = taps(height, y).map(|yy| rows[yy * width + x]).sum();
        }
    }

    let lo = *sums.iter().min().unwrap();
    let hi = *sums.iter().max().unwrap();
    let span = (hi - lo).max(1) as f64;
    let pixels = sums.iter().map(|&s| ((s - lo) as f64 * 255.0 / span).round() as u8).collect();
    GrayImage { width, height, pixels }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    #[test]
    fn pgm_header_parses() {
        let mut data = b"P5\n2 2\n255\n".to_vec();
        data.extend_from_slice(&[1, 2, 3, 4]);
        let img = decode_image(&data).unwrap();
        assert_eq!((img.width(), img.height()), (2, 2));
        assert_eq!(img.pixels(), &[1, 2, 3, 4]);
    }

    #[test]
    fn pgm_comments_and_errors() {
        let img = decode_pgm(b"P5 # made by hand\n1 1 255\n\x07").unwrap();
        assert_eq!(img.pixels(), &[7]);
        assert!(matches!(decode_pgm(b"P5\n2 2\n255\n\x01"), Err(Error::SizeMismatch(_))));
        assert!(matches!(decode_pgm(b"P5\n2 2\n65535\n"), Err(Error::UnsupportedFormat(_))));
        assert!(matches!(decode_pgm(b"P5\nx 2\n255\n"), Err(Error::CorruptHeader(_))));
        assert!(matches!(decode_image(b"P2\n1 1\n255\n0"), Err(Error::UnsupportedFormat(_))));
        assert!(matches!(decode_image(b"\x89PNG"), Err(Error::UnsupportedFormat(_))));
    }

    #[test]
    fn bmp_rows_are_padded_and_bottom_up() {
        let img = GrayImage::new(3, 2, vec![1, 2, 3, 4, 5, 6]).unwrap();
        let bmp = encode_bmp(&img);
        let offset = BMP_FILE_HEADER + BMP_INFO_HEADER + BMP_PALETTE;
        assert_eq!(bmp.len(), offset + 2 * 4);
        assert_eq!(&bmp[offset..], &[4, 5, 6, 0, 1, 2, 3, 0]);
        assert_eq!(decode_image(&bmp).unwrap(), img);
    }

    #[test]
    fn bmp_palette_is_applied_and_colour_rejected() {
        let img = GrayImage::new(4, 1, vec![0, 1, 2, 3]).unwrap();
        let mut bmp = encode_bmp(&img);
        let pal = BMP_FILE_HEADER + BMP_INFO_HEADER;
        // map index 1 to grey 200
        bmp[pal + 4..pal + 7].copy_from_slice(&[200, 200, 200]);
        assert_eq!(decode_bmp(&bmp).unwrap().pixels(), &[0, 200, 2, 3]);
        bmp[pal + 4] = 10;
        assert!(matches!(decode_bmp(&bmp), Err(Error::UnsupportedFormat(_))));
    }

    #[test]
    fn bmp_rejects_other_depths_and_compression() {
        let img = GrayImage::filled(4, 4, 9);
        let mut bmp = encode_bmp(&img);
        bmp[28] = 24;
        assert!(matches!(decode_bmp(&bmp), Err(Error::UnsupportedFormat(_))));
        let mut bmp = encode_bmp(&img);
        bmp[30] = 1;
        assert!(matches!(decode_bmp(&bmp), Err(Error::UnsupportedFormat(_))));
        let bmp = encode_bmp(&img);
        assert!(matches!(decode_bmp(&bmp[..bmp.len() - 1]), Err(Error::SizeMismatch(_))));
        assert!(matches!(decode_bmp(&bmp[..20]), Err(Error::CorruptHeader(_))));
    }

    #[test]
    fn bmp_top_down_rows() {
        let img = GrayImage::new(2, 2, vec![1, 2, 3, 4]).unwrap();
        let mut bmp = encode_bmp(&img);
        bmp[22..26].copy_from_slice(&(-2i32).to_le_bytes());
        // stored rows are now read top-first
        assert_eq!(decode_bmp(&bmp).unwrap().pixels(), &[3, 4, 1, 2]);
    }

    #[test]
    fn synth_kinds() {
        assert_eq!(synth_image(SynthKind::Gradient, 4, 1, 0).pixels(), &[0, 1, 2, 3]);
        let c = synth_image(SynthKind::Constant, 5, 2, 263);
        assert!(c.pixels().iter().all(|&p| p == 7));
        let h = histogram(&c);
        assert_eq!(h.bins[7], 10);
        assert_eq!(h.bins.iter().filter(|&&b| b != 0).count(), 1);
        let a = synth_image(SynthKind::SmoothNoise, 32, 16, 5);
        assert_eq!(a, synth_image(SynthKind::SmoothNoise, 32, 16, 5));
        assert_ne!(a, synth_image(SynthKind::SmoothNoise, 32, 16, 6));
        assert_eq!(a.pixels().iter().min(), Some(&0));
        assert_eq!(a.pixels().iter().max(), Some(&255));
    }

    #[test]
    fn gradient_histogram_is_flat() {
        let h = histogram(&synth_image(SynthKind::Gradient, 256, 1, 0));
        assert!(h.bins.iter().all(|&b| b == 1));
        assert_eq!(h.total, 256);
    }

    #[test]
    fn size_mismatch_on_construction() {
        assert!(matches!(GrayImage::new(2, 2, vec![0; 3]), Err(Error::SizeMismatch(_))));
    }

    fn any_image() -> impl Strategy<Value = GrayImage> {
        (1usize..20, 1usize..20).prop_flat_map(|(w, h)| {
            prop::collection::vec(any::<u8>(), w * h).prop_map(move |px| GrayImage::new(w, h, px).unwrap())
        })
    }

    proptest! {
        #[test]
        fn encode_decode_roundtrip(img in any_image()) {
            prop_assert_eq!(&decode_image(&encode_pgm(&img)).unwrap(), &img);
            prop_assert_eq!(&decode_image(&encode_bmp(&img)).unwrap(), &img);
        }

        #[test]
        fn histogram_sums_to_pixel_count(img in any_image()) {
            let h = histogram(&img);
            prop_assert_eq!(h.bins.iter().sum::<u64>(), (img.width() * img.height()) as u64);
            prop_assert_eq!(h.total, img.len() as u64);
        }
    }
}
