//! Pseudocolor rendering of depth and time maps to binary PPM.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::palette::TURBO;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum ColorRange<T> {
    /// Stretch over the valid values of the map.
    #[default]
    Auto,
    Fixed {
        min: T,
        max: T,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    pub width: usize,
    pub height: usize,
    /// Row-major RGB triples.
    pub data: Vec<u8>,
}

impl RgbImage {
    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        let i = 3 * (y * self.width + x);
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }
}

pub const INVALID_COLOR: [u8; 3] = [0, 0, 0];

/// Palette index of `v` on `[min, max]`, clamped; a collapsed range maps to the middle.
pub fn palette_index<T: Scalar>(v: T, min: T, max: T) -> usize {
    if !(max > min) {
        return TURBO.len() / 2;
    }
    let top = T::from_usize_lossy(TURBO.len() - 1);
    let s = ((v - min) / (max - min) * top).round();
    s.max(T::zero()).min(top).to_usize().unwrap_or(0)
}

pub fn palette_color(index: usize) -> [u8; 3] {
    TURBO[index.min(TURBO.len() - 1)]
}

/// Colors `map` blue (low) to red (high); invalid cells are black.
pub fn colorize<T: Scalar>(map: &Grid<T>, range: ColorRange<T>) -> RgbImage {
    let (min, max) = match range {
        ColorRange::Fixed { min, max } => (min, max),
        ColorRange::Auto => map.value_range().unwrap_or((T::zero(), T::zero())),
    };
    let mut data = Vec::with_capacity(map.len() * 3);
    for c in map.cells() {
        let rgb = c.map_or(INVALID_COLOR, |v| palette_color(palette_index(v, min, max)));
        data.extend_from_slice(&rgb);
    }
    RgbImage {
        width: map.width(),
        height: map.height(),
        data,
    }
}

pub fn write_ppm_to<W: Write>(img: &RgbImage, out: &mut W) -> std::io::Result<()> {
    write!(out, "P6\n{} {}\n255\n", img.width, img.height)?;
    out.write_all(&img.data)
}

pub fn write_ppm(img: &RgbImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    write_ppm_to(img, &mut out)
        .and_then(|_| out.flush())
        .map_err(|e| Error::io(path, e))
}
