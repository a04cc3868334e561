//! Single-channel PFM images (`Pf`), used for depth, disparity and time maps.
//!
//! Samples are little-endian `f32`, rows stored bottom to top, invalid cells as NaN.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::scalar::Scalar;

pub fn write_pfm_to<T: Scalar, W: Write>(map: &Grid<T>, out: &mut W) -> std::io::Result<()> {
    write!(out, "Pf\n{} {}\n-1.0\n", map.width(), map.height())?;
    let mut row = Vec::with_capacity(map.width() * 4);
    for y in (0..map.height()).rev() {
        row.clear();
        for x in 0..map.width() {
            let v = map
                .get(x, y)
                .map_or(f32::NAN, |v| v.to_f32().unwrap_or(f32::NAN));
            row.extend_from_slice(&v.to_le_bytes());
        }
        out.write_all(&row)?;
    }
    Ok(())
}

pub fn write_pfm<T: Scalar>(map: &Grid<T>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    write_pfm_to(map, &mut out)
        .and_then(|_| out.flush())
        .map_err(|e| Error::io(path, e))
}

fn header_token<R: BufRead>(input: &mut R, line: usize) -> Result<String> {
    let mut s = String::new();
    let n = input
        .read_line(&mut s)
        .map_err(|e| Error::parse(line, format!("unreadable header: {e}")))?;
    if n == 0 {
        return Err(Error::parse(line, "truncated header"));
    }
    Ok(s.trim().to_string())
}

pub fn read_pfm_from<T: Scalar, R: BufRead>(mut input: R) -> Result<Grid<T>> {
    let magic = header_token(&mut input, 1)?;
    if magic != "Pf" {
        return Err(Error::parse(
            1,
            format!("expected single-channel 'Pf', found '{magic}'"),
        ));
    }
    let dims = header_token(&mut input, 2)?;
    let mut it = dims.split_whitespace().map(str::parse::<usize>);
    let (Some(Ok(width)), Some(Ok(height)), None) = (it.next(), it.next(), it.next()) else {
        return Err(Error::parse(2, format!("bad dimensions '{dims}'")));
    };
    let scale: f64 = header_token(&mut input, 3)?
        .parse()
        .map_err(|_| Error::parse(3, "bad scale"))?;
    if scale == 0.0 {
        return Err(Error::parse(3, "scale must be nonzero"));
    }
    let little = scale < 0.0;

    let mut bytes = vec![0u8; width * height * 4];
    input
        .read_exact(&mut bytes)
        .map_err(|_| Error::parse(4, format!("expected {} bytes of samples", bytes.len())))?;
    let mut cells = vec![None; width * height];
    for (i, chunk) in bytes.chunks_exact(4).enumerate() {
        let raw = [chunk[0], chunk[1], chunk[2], chunk[3]];
        let v = if little {
            f32::from_le_bytes(raw)
        } else {
            f32::from_be_bytes(raw)
        };
        let (x, y_from_bottom) = (i % width, i / width);
        let y = height - 1 - y_from_bottom;
        cells[y * width + x] = v.is_finite().then(|| T::from(v).expect("f32 fits scalar"));
    }
    Grid::from_cells(width, height, cells)
}

pub fn read_pfm<T: Scalar>(path: impl AsRef<Path>) -> Result<Grid<T>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_pfm_from(BufReader::new(file))
}
