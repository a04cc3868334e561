//! Dense 2D grids of optional values.
//!
//! Depth maps, disparity maps and the payload of time maps are all `Grid`s. A cell is
//! either `None` (no estimate) or a finite value; there is no sentinel value.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct Grid<T> {
    width: usize,
    height: usize,
    cells: Vec<Option<T>>,
}

/// Per-pixel depth along the camera optical axis, in meters.
pub type DepthMap<T> = Grid<T>;

/// Per-pixel disparity in camera pixels (camera column minus projector column).
pub type DisparityMap<T> = Grid<T>;

impl<T: Copy> Grid<T> {
    /// An all-invalid grid.
    pub fn new(width: usize, height: usize) -> Self {
        Grid {
            width,
            height,
            cells: vec![None; width * height],
        }
    }

    pub fn filled(width: usize, height: usize, value: T) -> Self {
        Grid {
            width,
            height,
            cells: vec![Some(value); width * height],
        }
    }

    pub fn from_cells(width: usize, height: usize, cells: Vec<Option<T>>) -> Result<Self> {
        if cells.len() != width * height {
            return Err(Error::config(format!(
                "grid of {width}x{height} needs {} cells, got {}",
                width * height,
                cells.len()
            )));
        }
        Ok(Grid {
            width,
            height,
            cells,
        })
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> Option<T>,
    ) -> Self {
        let mut cells = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                cells.push(f(x, y));
            }
        }
        Grid {
            width,
            height,
            cells,
        }
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
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    #[inline]
    pub fn same_shape<U>(&self, other: &Grid<U>) -> bool {
        self.width == other.width && self.height == other.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> Option<T> {
        self.cells[y * self.width + x]
    }

    /// Like `get` but tolerates coordinates outside the grid.
    #[inline]
    pub fn get_signed(&self, x: isize, y: isize) -> Option<T> {
        if x < 0 || y < 0 || x as usize >= self.width || y as usize >= self.height {
            None
        } else {
            self.cells[y as usize * self.width + x as usize]
        }
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: Option<T>) {
        self.cells[y * self.width + x] = value;
    }

    pub fn cells(&self) -> &[Option<T>] {
        &self.cells
    }

    pub fn cells_mut(&mut self) -> &mut [Option<T>] {
        &mut self.cells
    }

    pub fn rows(&self) -> std::slice::Chunks<'_, Option<T>> {
        self.cells.chunks(self.width.max(1))
    }

    pub fn valid_count(&self) -> usize {
        self.cells.iter().filter(|c| c.is_some()).count()
    }

    pub fn valid_values(&self) -> impl Iterator<Item = T> + '_ {
        self.cells.iter().filter_map(|c| *c)
    }

    pub fn map<U: Copy>(&self, mut f: impl FnMut(T) -> Option<U>) -> Grid<U> {
        Grid {
            width: self.width,
            height: self.height,
            cells: self.cells.iter().map(|c| c.and_then(&mut f)).collect(),
        }
    }

    /// Keeps cells of `self` only where `mask` is valid.
    pub fn masked_by<U: Copy>(&self, mask: &Grid<U>) -> Grid<T> {
        assert!(self.same_shape(mask), "mask shape mismatch");
        Grid {
            width: self.width,
            height: self.height,
            cells: self
                .cells
                .iter()
                .zip(&mask.cells)
                .map(|(c, m)| if m.is_some() { *c } else { None })
                .collect(),
        }
    }
}

impl<T: Scalar> Grid<T> {
    /// Smallest and largest valid values, if any.
    pub fn value_range(&self) -> Option<(T, T)> {
        self.valid_values().fold(None, |acc, v| match acc {
            None => Some((v, v)),
            Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
        })
    }

    /// Anisotropic total variation over pairs of horizontally or vertically adjacent
    /// valid cells.
    pub fn total_variation(&self) -> T {
        let mut tv = T::zero();
        for y in 0..self.height {
            for x in 0..self.width {
                let Some(v) = self.get(x, y) else { continue };
                if x + 1 < self.width {
                    if let Some(r) = self.get(x + 1, y) {
                        tv += (r - v).abs();
                    }
                }
                if y + 1 < self.height {
                    if let Some(b) = self.get(x, y + 1) {
                        tv += (b - v).abs();
                    }
                }
            }
        }
        tv
    }

    /// Converts to another scalar type, cell by cell.
    pub fn cast<U: Scalar>(&self) -> Grid<U> {
        self.map(|v| U::from(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_cells_checks_length() {
        assert!(Grid::<f64>::from_cells(2, 2, vec![None; 3]).is_err());
        assert!(Grid::<f64>::from_cells(2, 2, vec![None; 4]).is_ok());
    }

    #[test]
    fn signed_access_outside_is_invalid() {
        let g = Grid::filled(3, 2, 1.0f64);
        assert_eq!(g.get_signed(-1, 0), None);
        assert_eq!(g.get_signed(3, 0), None);
        assert_eq!(g.get_signed(2, 1), Some(1.0));
    }

    #[test]
    fn total_variation_skips_invalid_pairs() {
        let mut g = Grid::from_fn(3, 1, |x, _| Some(x as f64));
        assert_eq!(g.total_variation(), 2.0);
        g.set(1, 0, None);
        assert_eq!(g.total_variation(), 0.0);
    }

    #[test]
    fn value_range_of_empty_is_none() {
        assert_eq!(Grid::<f64>::new(4, 4).value_range(), None);
    }
}
