//! Block-matching cost functions and the minimum selector.

use std::ops::ControlFlow;

use super::MatchError;
use crate::dsl::{iterate, StaticBound, SubWindow, Window};

/// Rectangular block of pixel values.
pub trait BlockView {
    fn rows(&self) -> usize;
    fn cols(&self) -> usize;
    fn cell(&self, row: usize, col: usize) -> u64;
}

impl BlockView for Window<'_> {
    fn rows(&self) -> usize {
        Window::rows(self)
    }
    fn cols(&self) -> usize {
        Window::cols(self)
    }
    #[inline]
    fn cell(&self, row: usize, col: usize) -> u64 {
        Window::cell(self, row, col)
    }
}

impl BlockView for SubWindow<'_> {
    fn rows(&self) -> usize {
        SubWindow::rows(self)
    }
    fn cols(&self) -> usize {
        SubWindow::cols(self)
    }
    #[inline]
    fn cell(&self, row: usize, col: usize) -> u64 {
        SubWindow::cell(self, row, col)
    }
}

/// Row-major block over a borrowed 8-bit slice.
#[derive(Debug, Clone, Copy)]
pub struct Block<'a> {
    rows: usize,
    cols: usize,
    cells: &'a [u8],
}

impl<'a> Block<'a> {
    pub fn new(rows: usize, cols: usize, cells: &'a [u8]) -> Result<Self, MatchError> {
        if cells.len() != rows * cols {
            return Err(MatchError::ExtentMismatch {
                left: (rows, cols),
                right: (cells.len(), 1),
            });
        }
        Ok(Self { rows, cols, cells })
    }
}

impl BlockView for Block<'_> {
    fn rows(&self) -> usize {
        self.rows
    }
    fn cols(&self) -> usize {
        self.cols
    }
    #[inline]
    fn cell(&self, row: usize, col: usize) -> u64 {
        u64::from(self.cells[row * self.cols + col])
    }
}

/// Sum of absolute differences between two equally sized blocks.
pub fn sad_cost(reference: &impl BlockView, target: &impl BlockView) -> Result<u32, MatchError> {
    let (rows, cols) = (reference.rows(), reference.cols());
    if (rows, cols) != (target.rows(), target.cols()) {
        return Err(MatchError::ExtentMismatch {
            left: (rows, cols),
            right: (target.rows(), target.cols()),
        });
    }
    let mut sum = 0u32;
    for r in 0..rows {
        for c in 0..cols {
            sum += reference.cell(r, c).abs_diff(target.cell(r, c)) as u32;
        }
    }
    Ok(sum)
}

/// Census transform of one window: one bit per non-center cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CensusVector {
    bits: u64,
    width: u32,
}

impl CensusVector {
    pub fn new(bits: u64, width: u32) -> Result<Self, MatchError> {
        if width > 64 || (width < 64 && bits >> width != 0) {
            return Err(MatchError::InvalidConfig(format!(
                "census vector {bits:#x} does not fit in {width} bits"
            )));
        }
        Ok(Self { bits, width })
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn width(&self) -> u32 {
        self.width
    }
}

/// Bit `k` is set iff the `k`-th non-center cell (row-major) is strictly
/// brighter than the center.
pub fn census_vector(window: &impl BlockView) -> Result<CensusVector, MatchError> {
    let (rows, cols) = (window.rows(), window.cols());
    if rows % 2 == 0 || cols % 2 == 0 {
        return Err(MatchError::InvalidConfig(format!(
            "census window {rows}x{cols} must have odd extents"
        )));
    }
    let width = (rows * cols - 1) as u32;
    if width > 64 {
        return Err(MatchError::InvalidConfig(format!(
            "census window {rows}x{cols} needs {width} bits, more than 64"
        )));
    }
    let (cr, cc) = (rows / 2, cols / 2);
    let center = window.cell(cr, cc);
    let mut bits = 0u64;
    let mut k = 0;
    for r in 0..rows {
        for c in 0..cols {
            if r == cr && c == cc {
                continue;
            }
            if window.cell(r, c) > center {
                bits |= 1 << k;
            }
            k += 1;
        }
    }
    Ok(CensusVector { bits, width })
}

/// Result of [`bounded_bit_count`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BitCount {
    pub count: u32,
    pub iterations: u32,
}

/// Population count by repeatedly clearing the lowest set bit, with the loop
/// bounded by the word width and an early exit once the word is zero.
pub fn bounded_bit_count(v: u64, width: u32) -> BitCount {
    debug_assert!(width >= 64 || v >> width == 0, "{v:#x} exceeds {width} bits");
    let Ok(bound) = StaticBound::new(width) else {
        return BitCount {
            count: 0,
            iterations: 0,
        };
    };
    let mut val = v;
    let mut count = 0;
    let iterations = iterate(bound, |_| {
        if val == 0 {
            return ControlFlow::Break(());
        }
        val &= val - 1;
        count += 1;
        ControlFlow::Continue(())
    });
    BitCount { count, iterations }
}

/// Hamming distance between two census vectors of equal width.
pub fn census_cost(a: CensusVector, b: CensusVector) -> Result<u32, MatchError> {
    if a.width != b.width {
        return Err(MatchError::WidthMismatch {
            left: a.width,
            right: b.width,
        });
    }
    Ok(bounded_bit_count(a.bits ^ b.bits, a.width).count)
}

/// Minimum cost and its index, computed as a binary reduction tree whose
/// comparators prefer the left operand on ties. The lowest index of the
/// minimum wins.
pub fn min_index(costs: &[u32]) -> Result<(u32, usize), MatchError> {
    if costs.is_empty() {
        return Err(MatchError::EmptyCosts);
    }
    let mut level: Vec<(u32, usize)> = costs.iter().copied().zip(0..).collect();
    while level.len() > 1 {
        level = level
            .chunks(2)
            .map(|pair| match pair {
                [a, b] if b.0 < a.0 => *b,
                [a, ..] => *a,
                [] => unreachable!(),
            })
            .collect();
    }
    Ok(level[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn block(rows: usize, cols: usize, cells: &[u8]) -> Block<'_> {
        Block::new(rows, cols, cells).unwrap()
    }

    #[test]
    fn sad_examples() {
        let a = [1, 2, 3, 4];
        let b = [1, 1, 1, 1];
        assert_eq!(sad_cost(&block(2, 2, &a), &block(2, 2, &a)).unwrap(), 0);
        assert_eq!(sad_cost(&block(2, 2, &a), &block(2, 2, &b)).unwrap(), 6);
        assert!(matches!(
            sad_cost(&block(2, 2, &a), &block(1, 4, &b)),
            Err(MatchError::ExtentMismatch { .. })
        ));
    }

    #[test]
    fn sad_matches_double_loop() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let a: Vec<u8> = (0..9).map(|_| rng.gen()).collect();
            let b: Vec<u8> = (0..9).map(|_| rng.gen()).collect();
            let mut want = 0i32;
            for r in 0..3 {
                for c in 0..3 {
                    want += (a[r * 3 + c] as i32 - b[r * 3 + c] as i32).abs();
                }
            }
            let got = sad_cost(&block(3, 3, &a), &block(3, 3, &b)).unwrap();
            assert_eq!(got as i32, want);
            assert_eq!(got == 0, a == b);
        }
    }

    #[test]
    fn census_examples() {
        let flat = [7u8; 9];
        assert_eq!(census_vector(&block(3, 3, &flat)).unwrap().bits(), 0);

        let mut one = [5u8; 9];
        one[0] = 9;
        let v = census_vector(&block(3, 3, &one)).unwrap();
        assert_eq!((v.bits(), v.width()), (0b1, 8));

        // ties and darker cells are zero, center is skipped
        let w = [5, 4, 6, 5, 5, 6, 0, 5, 255];
        assert_eq!(census_vector(&block(3, 3, &w)).unwrap().bits(), 0b1001_0100);

        let big = [0u8; 25];
        assert_eq!(census_vector(&block(5, 5, &big)).unwrap().width(), 24);
        assert!(census_vector(&block(2, 2, &[0; 4])).is_err());
    }

    #[test]
    fn bit_count_examples() {
        assert_eq!(
            bounded_bit_count(0, 8),
            BitCount {
                count: 0,
                iterations: 0
            }
        );
        assert_eq!(
            bounded_bit_count(0xFF, 8),
            BitCount {
                count: 8,
                iterations: 8
            }
        );
        assert_eq!(
            bounded_bit_count(0b1011, 8),
            BitCount {
                count: 3,
                iterations: 3
            }
        );
        assert_eq!(bounded_bit_count(u64::MAX, 64).count, 64);
        assert_eq!(bounded_bit_count(0, 0).count, 0);
    }

    #[test]
    fn bit_count_exhaustive_16() {
        let table: Vec<u32> = (0..=255u32)
            .map(|b| (0..8).filter(|i| b >> i & 1 == 1).count() as u32)
            .collect();
        for v in 0..(1u64 << 16) {
            let want = table[(v & 0xFF) as usize] + table[(v >> 8) as usize];
            let got = bounded_bit_count(v, 16);
            assert_eq!(got.count, want);
            assert_eq!(got.iterations, got.count);
            assert!(got.iterations <= 16);
        }
    }

    #[test]
    fn census_cost_examples() {
        let a = CensusVector::new(0b1010, 4).unwrap();
        let b = CensusVector::new(0b0110, 4).unwrap();
        assert_eq!(census_cost(a, a).unwrap(), 0);
        assert_eq!(census_cost(a, b).unwrap(), 2);
        let c = CensusVector::new(0b0110, 8).unwrap();
        assert_eq!(census_cost(a, c), Err(MatchError::WidthMismatch { left: 4, right: 8 }));
        assert!(CensusVector::new(0x100, 8).is_err());
    }

    #[test]
    fn census_cost_matches_bit_loop() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(24);
        for _ in 0..2_000 {
            let x: u64 = rng.gen_range(0..1 << 24);
            let y: u64 = rng.gen_range(0..1 << 24);
            let want = (0..24).filter(|i| (x >> i & 1) != (y >> i & 1)).count() as u32;
            let got = census_cost(CensusVector::new(x, 24).unwrap(), CensusVector::new(y, 24).unwrap());
            assert_eq!(got.unwrap(), want);
        }
    }

    #[test]
    fn min_index_examples() {
        assert_eq!(min_index(&[5]).unwrap(), (5, 0));
        assert_eq!(min_index(&[3, 1, 1, 4]).unwrap(), (1, 1));
        assert_eq!(min_index(&[2, 2, 2]).unwrap(), (2, 0));
        assert_eq!(min_index(&[]), Err(MatchError::EmptyCosts));
    }

    #[test]
    fn min_index_matches_linear_scan() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(60);
        for _ in 0..1_000 {
            let costs: Vec<u32> = (0..60).map(|_| rng.gen_range(0..20)).collect();
            let mut best = (costs[0], 0);
            for (i, &c) in costs.iter().enumerate() {
                if c < best.0 {
                    best = (c, i);
                }
            }
            assert_eq!(min_index(&costs).unwrap(), best);
        }
    }
}
