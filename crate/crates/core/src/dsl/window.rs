use std::fmt;

use super::DslError;
use crate::image::BoundaryMode;

/// Extents of a sliding window and the cell that sits over the output pixel.
///
/// Centered windows have odd extents and the anchor in the middle. Anchored
/// windows may be asymmetric, e.g. a search window that extends only to the
/// left along the epipolar line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WindowShape {
    rows: usize,
    cols: usize,
    anchor_row: usize,
    anchor_col: usize,
}

impl WindowShape {
    pub fn centered(rows: usize, cols: usize) -> Result<Self, DslError> {
        if rows == 0 || cols == 0 || rows.is_multiple_of(2) || cols.is_multiple_of(2) {
            return Err(DslError::EvenExtent { rows, cols });
        }
        Ok(Self {
            rows,
            cols,
            anchor_row: rows / 2,
            anchor_col: cols / 2,
        })
    }

    pub fn anchored(rows: usize, cols: usize, anchor_row: usize, anchor_col: usize) -> Result<Self, DslError> {
        if rows == 0 || cols == 0 || anchor_row >= rows || anchor_col >= cols {
            return Err(DslError::BadAnchor {
                rows,
                cols,
                anchor_row,
                anchor_col,
            });
        }
        Ok(Self {
            rows,
            cols,
            anchor_row,
            anchor_col,
        })
    }

    pub fn point() -> Self {
        Self {
            rows: 1,
            cols: 1,
            anchor_row: 0,
            anchor_col: 0,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn anchor(&self) -> (usize, usize) {
        (self.anchor_row, self.anchor_col)
    }

    pub fn cells(&self) -> usize {
        self.rows * self.cols
    }

    /// Rows above the anchor.
    pub fn reach_up(&self) -> usize {
        self.anchor_row
    }

    /// Rows below the anchor.
    pub fn reach_down(&self) -> usize {
        self.rows - 1 - self.anchor_row
    }

    /// Columns left of the anchor.
    pub fn reach_left(&self) -> usize {
        self.anchor_col
    }

    /// Columns right of the anchor.
    pub fn reach_right(&self) -> usize {
        self.cols - 1 - self.anchor_col
    }

    /// Fills `out` with the window anchored at `(x, y)` of a `width` x
    /// `height` grid, row-major, resolving every cell through `mode`.
    /// `fetch` receives in-range coordinates only.
    #[inline]
    #[allow(clippy::too_many_arguments)]
    pub fn gather(
        &self,
        x: usize,
        y: usize,
        width: usize,
        height: usize,
        mode: BoundaryMode,
        mut fetch: impl FnMut(usize, usize) -> u64,
        out: &mut Vec<u64>,
    ) {
        out.clear();
        let x0 = x as i64 - self.anchor_col as i64;
        let y0 = y as i64 - self.anchor_row as i64;
        for r in 0..self.rows as i64 {
            let sy = mode.resolve(y0 + r, height);
            for c in 0..self.cols as i64 {
                let sx = mode.resolve(x0 + c, width);
                out.push(fetch(sx, sy));
            }
        }
    }
}

impl fmt::Display for WindowShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.rows, self.cols)?;
        if self.anchor_row != self.rows / 2
            || self.anchor_col != self.cols / 2
            || self.rows.is_multiple_of(2)
            || self.cols.is_multiple_of(2)
        {
            write!(f, "@({},{})", self.anchor_row, self.anchor_col)?;
        }
        Ok(())
    }
}

/// Read-only view of one input's window for a single output pixel.
#[derive(Debug, Clone, Copy)]
pub struct Window<'a> {
    shape: WindowShape,
    cells: &'a [u64],
}

impl<'a> Window<'a> {
    pub fn new(shape: WindowShape, cells: &'a [u64]) -> Result<Self, DslError> {
        if cells.len() != shape.cells() {
            return Err(DslError::WindowLength {
                expected: shape.cells(),
                found: cells.len(),
            });
        }
        Ok(Self { shape, cells })
    }

    pub(crate) fn new_unchecked(shape: WindowShape, cells: &'a [u64]) -> Self {
        debug_assert_eq!(cells.len(), shape.cells());
        Self { shape, cells }
    }

    pub fn shape(&self) -> WindowShape {
        self.shape
    }

    pub fn rows(&self) -> usize {
        self.shape.rows
    }

    pub fn cols(&self) -> usize {
        self.shape.cols
    }

    pub fn cells(&self) -> &'a [u64] {
        self.cells
    }

    /// Cell by absolute row/column inside the window.
    #[inline]
    pub fn cell(&self, row: usize, col: usize) -> u64 {
        self.cells[row * self.shape.cols + col]
    }

    /// Cell by offset from the anchor.
    #[inline]
    pub fn at(&self, dy: i64, dx: i64) -> u64 {
        let r = (self.shape.anchor_row as i64 + dy) as usize;
        let c = (self.shape.anchor_col as i64 + dx) as usize;
        self.cell(r, c)
    }

    #[inline]
    pub fn center(&self) -> u64 {
        self.cell(self.shape.anchor_row, self.shape.anchor_col)
    }

    /// Sub-window of `rows` x `cols` cells starting at `(row, col)`.
    pub fn sub(&self, row: usize, col: usize, rows: usize, cols: usize) -> SubWindow<'a> {
        assert!(row + rows <= self.shape.rows && col + cols <= self.shape.cols);
        SubWindow {
            parent: *self,
            row,
            col,
            rows,
            cols,
        }
    }
}

/// Rectangular slice of a [`Window`], used for per-candidate blocks.
#[derive(Debug, Clone, Copy)]
pub struct SubWindow<'a> {
    parent: Window<'a>,
    row: usize,
    col: usize,
    rows: usize,
    cols: usize,
}

impl<'a> SubWindow<'a> {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn cell(&self, row: usize, col: usize) -> u64 {
        self.parent.cell(self.row + row, self.col + col)
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.rows).flat_map(move |r| (0..self.cols).map(move |c| self.cell(r, c)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes() {
        assert!(WindowShape::centered(3, 4).is_err());
        assert!(WindowShape::centered(0, 1).is_err());
        let s = WindowShape::anchored(3, 6, 1, 4).unwrap();
        assert_eq!((s.reach_left(), s.reach_right()), (4, 1));
        assert!(WindowShape::anchored(3, 6, 3, 0).is_err());
        assert_eq!(WindowShape::centered(5, 5).unwrap().to_string(), "5x5");
        assert_eq!(s.to_string(), "3x6@(1,4)");
    }

    #[test]
    fn gather_clamps_at_corner() {
        let s = WindowShape::centered(3, 3).unwrap();
        let mut out = Vec::new();
        s.gather(0, 0, 4, 4, BoundaryMode::Clamp, |x, y| (y * 4 + x) as u64, &mut out);
        assert_eq!(out, vec![0, 0, 1, 0, 0, 1, 4, 4, 5]);
        let w = Window::new(s, &out).unwrap();
        assert_eq!(w.center(), 0);
        assert_eq!(w.at(1, 1), 5);
        assert_eq!(w.sub(1, 1, 2, 2).iter().collect::<Vec<_>>(), vec![0, 1, 4, 5]);
    }
}
