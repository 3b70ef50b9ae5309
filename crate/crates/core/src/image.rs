//! Dense 2D grids (color images, masks, 16-bit depth) and their PNG encodings.

use std::io::Cursor;
use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Row-major 2D grid, row 0 at the top.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid<T> {
    width: usize,
    height: usize,
    data: Vec<T>,
}

pub type Image<S> = Grid<[S; 3]>;
pub type Mask = Grid<bool>;

impl<T: Clone> Grid<T> {
    pub fn filled(width: usize, height: usize, value: T) -> Self {
        Self {
            width,
            height,
            data: vec![value; width * height],
        }
    }

    pub fn from_vec(width: usize, height: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::Dimensions(format!(
                "{} values for a {width}x{height} grid",
                data.len()
            )));
        }
        Ok(Self { width, height, data })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self { width, height, data }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> &T {
        &self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: T) {
        self.data[y * self.width + x] = v;
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn map<U: Clone>(&self, f: impl FnMut(&T) -> U) -> Grid<U> {
        Grid {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn same_dims<U>(&self, other: &Grid<U>) -> bool {
        self.width == other.width && self.height == other.height
    }

    pub(crate) fn check_dims<U>(&self, other: &Grid<U>, what: &str) -> Result<()> {
        if self.same_dims(other) {
            Ok(())
        } else {
            Err(Error::Dimensions(format!(
                "{what}: {}x{} vs {}x{}",
                self.width, self.height, other.width, other.height
            )))
        }
    }
}

impl Mask {
    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }

    pub fn and(&self, other: &Mask) -> Mask {
        Grid {
            width: self.width,
            height: self.height,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| a && b).collect(),
        }
    }

    pub fn to_png(&self) -> Result<Vec<u8>> {
        let bytes: Vec<u8> = self.data.iter().map(|&b| if b { 255 } else { 0 }).collect();
        encode_png(self.width, self.height, png::ColorType::Grayscale, png::BitDepth::Eight, &bytes)
    }

    /// Decodes a grayscale (or color) PNG; any nonzero first channel is `true`.
    pub fn from_png(bytes: &[u8]) -> Result<Mask> {
        let (w, h, rgb) = decode_rgb8(bytes)?;
        Ok(Grid {
            width: w,
            height: h,
            data: rgb.chunks_exact(3).map(|c| c[0] >= 128).collect(),
        })
    }
}

impl<S: Real> Image<S> {
    /// Quantizes to 8-bit (round to nearest, clamped to [0,1]).
    pub fn to_rgb8(&self) -> Vec<u8> {
        self.data
            .iter()
            .flat_map(|px| px.map(quantize8))
            .collect()
    }

    pub fn from_rgb8(width: usize, height: usize, bytes: &[u8]) -> Result<Self> {
        if bytes.len() != width * height * 3 {
            return Err(Error::Dimensions(format!(
                "{} bytes for a {width}x{height} RGB image",
                bytes.len()
            )));
        }
        let scale = S::one() / S::lit(255.0);
        Ok(Grid {
            width,
            height,
            data: bytes
                .chunks_exact(3)
                .map(|c| [S::lit(c[0] as f64) * scale, S::lit(c[1] as f64) * scale, S::lit(c[2] as f64) * scale])
                .collect(),
        })
    }

    pub fn to_png(&self) -> Result<Vec<u8>> {
        encode_png(self.width, self.height, png::ColorType::Rgb, png::BitDepth::Eight, &self.to_rgb8())
    }

    pub fn from_png(bytes: &[u8]) -> Result<Self> {
        let (w, h, rgb) = decode_rgb8(bytes)?;
        Self::from_rgb8(w, h, &rgb)
    }

    pub fn save_png(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_png()?).map_err(|e| Error::io(path, e))
    }

    pub fn load_png(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_png(&bytes)
    }

    /// 8-bit round trip, as any PNG consumer would see this image.
    pub fn quantized(&self) -> Self {
        let scale = S::one() / S::lit(255.0);
        self.map(|px| px.map(|c| S::lit(quantize8(c) as f64) * scale))
    }
}

impl Grid<u16> {
    pub fn to_png(&self) -> Result<Vec<u8>> {
        let bytes: Vec<u8> = self.data.iter().flat_map(|v| v.to_be_bytes()).collect();
        encode_png(self.width, self.height, png::ColorType::Grayscale, png::BitDepth::Sixteen, &bytes)
    }

    pub fn from_png(bytes: &[u8]) -> Result<Self> {
        let mut decoder = png::Decoder::new(Cursor::new(bytes));
        decoder.set_transformations(png::Transformations::EXPAND);
        let mut reader = decoder.read_info().map_err(png_err)?;
        let mut buf = vec![0; reader.output_buffer_size().ok_or_else(|| Error::Png("image too large".into()))?];
        let info = reader.next_frame(&mut buf).map_err(png_err)?;
        let (w, h) = (info.width as usize, info.height as usize);
        let buf = &buf[..info.buffer_size()];
        let data = match (info.color_type, info.bit_depth) {
            (png::ColorType::Grayscale, png::BitDepth::Sixteen) => {
                buf.chunks_exact(2).map(|c| u16::from_be_bytes([c[0], c[1]])).collect()
            }
            (png::ColorType::Grayscale, png::BitDepth::Eight) => buf.iter().map(|&b| b as u16 * 257).collect(),
            other => return Err(Error::Png(format!("expected grayscale depth PNG, got {other:?}"))),
        };
        Ok(Grid { width: w, height: h, data })
    }
}

#[inline]
pub fn quantize8<S: Real>(c: S) -> u8 {
    (c.max(S::zero()).min(S::one()) * S::lit(255.0)).round().to_u8().unwrap_or(0)
}

fn png_err(e: impl std::fmt::Display) -> Error {
    Error::Png(e.to_string())
}

fn encode_png(w: usize, h: usize, color: png::ColorType, depth: png::BitDepth, bytes: &[u8]) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut out, w as u32, h as u32);
        enc.set_color(color);
        enc.set_depth(depth);
        let mut writer = enc.write_header().map_err(png_err)?;
        writer.write_image_data(bytes).map_err(png_err)?;
    }
    Ok(out)
}

/// Decodes any 8-bit PNG (gray, gray+alpha, RGB, RGBA, palette) to packed RGB.
fn decode_rgb8(bytes: &[u8]) -> Result<(usize, usize, Vec<u8>)> {
    let mut decoder = png::Decoder::new(Cursor::new(bytes));
    decoder.set_transformations(png::Transformations::EXPAND | png::Transformations::STRIP_16);
    let mut reader = decoder.read_info().map_err(png_err)?;
    let mut buf = vec![0; reader.output_buffer_size().ok_or_else(|| Error::Png("image too large".into()))?];
    let info = reader.next_frame(&mut buf).map_err(png_err)?;
    let (w, h) = (info.width as usize, info.height as usize);
    let buf = &buf[..info.buffer_size()];
    let rgb = match info.color_type {
        png::ColorType::Rgb => buf.to_vec(),
        png::ColorType::Rgba => buf.chunks_exact(4).flat_map(|c| [c[0], c[1], c[2]]).collect(),
        png::ColorType::Grayscale => buf.iter().flat_map(|&g| [g, g, g]).collect(),
        png::ColorType::GrayscaleAlpha => buf.chunks_exact(2).flat_map(|c| [c[0], c[0], c[0]]).collect(),
        png::ColorType::Indexed => return Err(Error::Png("unexpanded palette image".into())),
    };
    Ok((w, h, rgb))
}

/// Concatenates two grids left to right.
pub fn splice_horizontal<T: Clone>(a: &Grid<T>, b: &Grid<T>) -> Result<Grid<T>> {
    if a.height != b.height {
        return Err(Error::Dimensions(format!(
            "splice needs equal heights, got {} and {}",
            a.height, b.height
        )));
    }
    let width = a.width + b.width;
    let mut data = Vec::with_capacity(width * a.height);
    for y in 0..a.height {
        data.extend_from_slice(&a.data[y * a.width..(y + 1) * a.width]);
        data.extend_from_slice(&b.data[y * b.width..(y + 1) * b.width]);
    }
    Ok(Grid {
        width,
        height: a.height,
        data,
    })
}

/// Splits a grid into the columns `[0, left_width)` and `[left_width, width)`.
pub fn split_horizontal<T: Clone>(g: &Grid<T>, left_width: usize) -> Result<(Grid<T>, Grid<T>)> {
    if left_width > g.width {
        return Err(Error::Dimensions(format!(
            "split at column {left_width} of a {}-wide grid",
            g.width
        )));
    }
    let right_width = g.width - left_width;
    let mut left = Vec::with_capacity(left_width * g.height);
    let mut right = Vec::with_capacity(right_width * g.height);
    for row in g.data.chunks_exact(g.width.max(1)).take(g.height) {
        left.extend_from_slice(&row[..left_width]);
        right.extend_from_slice(&row[left_width..]);
    }
    Ok((
        Grid {
            width: left_width,
            height: g.height,
            data: left,
        },
        Grid {
            width: right_width,
            height: g.height,
            data: right,
        },
    ))
}
