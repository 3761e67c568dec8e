//! Local-operator constructs: masks, domains, reductions and bounded loops.

use std::num::NonZeroU32;
use std::ops::ControlFlow;

use super::window::Window;
use super::DslError;

/// Filter coefficients over an odd-sized window.
#[derive(Debug, Clone, PartialEq)]
pub struct Mask {
    rows: usize,
    cols: usize,
    coefficients: Vec<f64>,
}

impl Mask {
    pub fn new(rows: usize, cols: usize, coefficients: Vec<f64>) -> Result<Self, DslError> {
        check_odd(rows, cols)?;
        if coefficients.len() != rows * cols {
            return Err(DslError::WindowLength {
                expected: rows * cols,
                found: coefficients.len(),
            });
        }
        Ok(Self {
            rows,
            cols,
            coefficients,
        })
    }

    pub fn from_array<const R: usize, const C: usize>(rows: &[[f64; C]; R]) -> Result<Self, DslError> {
        Self::new(R, C, rows.iter().flatten().copied().collect())
    }

    pub fn ones(rows: usize, cols: usize) -> Result<Self, DslError> {
        Self::new(rows, cols, vec![1.0; rows * cols])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn coef(&self, row: usize, col: usize) -> f64 {
        self.coefficients[row * self.cols + col]
    }

    pub fn sum(&self) -> f64 {
        self.coefficients.iter().sum()
    }
}

/// Boolean iteration space of a sliding window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Domain {
    rows: usize,
    cols: usize,
    active: Vec<bool>,
}

impl Domain {
    pub fn new(rows: usize, cols: usize, active: Vec<bool>) -> Result<Self, DslError> {
        check_odd(rows, cols)?;
        if active.len() != rows * cols {
            return Err(DslError::WindowLength {
                expected: rows * cols,
                found: active.len(),
            });
        }
        if !active.iter().any(|&a| a) {
            return Err(DslError::EmptyDomain);
        }
        Ok(Self { rows, cols, active })
    }

    pub fn full(rows: usize, cols: usize) -> Result<Self, DslError> {
        Self::new(rows, cols, vec![true; rows * cols])
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Result<Self, DslError> {
        let active = (0..rows)
            .flat_map(|r| (0..cols).map(move |c| (r, c)))
            .map(|(r, c)| f(r, c))
            .collect();
        Self::new(rows, cols, active)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_active(&self, row: usize, col: usize) -> bool {
        self.active[row * self.cols + col]
    }

    pub fn active_count(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }
}

fn check_odd(rows: usize, cols: usize) -> Result<(), DslError> {
    if rows == 0 || cols == 0 || rows.is_multiple_of(2) || cols.is_multiple_of(2) {
        Err(DslError::EvenExtent { rows, cols })
    } else {
        Ok(())
    }
}

/// Reduction applied across window cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReduceOp {
    Sum,
    Min,
    Max,
}

/// Value types that can be folded by a [`ReduceOp`].
pub trait Accumulator: Copy {
    fn identity(op: ReduceOp) -> Self;
    fn combine(op: ReduceOp, acc: Self, value: Self) -> Self;
}

macro_rules! int_accumulator {
    ($($t:ty),*) => {$(
        impl Accumulator for $t {
            fn identity(op: ReduceOp) -> Self {
                match op {
                    ReduceOp::Sum => 0,
                    ReduceOp::Min => <$t>::MAX,
                    ReduceOp::Max => <$t>::MIN,
                }
            }

            #[inline]
            fn combine(op: ReduceOp, acc: Self, value: Self) -> Self {
                match op {
                    ReduceOp::Sum => acc.wrapping_add(value),
                    ReduceOp::Min => acc.min(value),
                    ReduceOp::Max => acc.max(value),
                }
            }
        }
    )*};
}

int_accumulator!(i32, i64, u32, u64);

impl Accumulator for f64 {
    fn identity(op: ReduceOp) -> Self {
        match op {
            ReduceOp::Sum => 0.0,
            ReduceOp::Min => f64::INFINITY,
            ReduceOp::Max => f64::NEG_INFINITY,
        }
    }

    #[inline]
    fn combine(op: ReduceOp, acc: Self, value: Self) -> Self {
        match op {
            ReduceOp::Sum => acc + value,
            ReduceOp::Min => acc.min(value),
            ReduceOp::Max => acc.max(value),
        }
    }
}

/// One window cell as seen by a convolve/reduce body.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tap {
    /// Row offset from the window anchor.
    pub dy: i64,
    /// Column offset from the window anchor.
    pub dx: i64,
    pub value: u64,
    /// Mask coefficient; 1.0 under [`reduce`].
    pub coef: f64,
}

/// Folds `body` over every mask cell in row-major order.
pub fn convolve<T: Accumulator>(
    window: &Window<'_>,
    mask: &Mask,
    op: ReduceOp,
    mut body: impl FnMut(Tap) -> T,
) -> Result<T, DslError> {
    if window.rows() != mask.rows || window.cols() != mask.cols {
        return Err(DslError::ExtentMismatch {
            expected: (window.rows(), window.cols()),
            found: (mask.rows, mask.cols),
        });
    }
    let (ar, ac) = window.shape().anchor();
    let mut acc = T::identity(op);
    for r in 0..mask.rows {
        for c in 0..mask.cols {
            let tap = Tap {
                dy: r as i64 - ar as i64,
                dx: c as i64 - ac as i64,
                value: window.cell(r, c),
                coef: mask.coef(r, c),
            };
            acc = T::combine(op, acc, body(tap));
        }
    }
    Ok(acc)
}

/// Folds `body` over the active cells of `domain` in row-major order.
pub fn reduce<T: Accumulator>(
    window: &Window<'_>,
    domain: &Domain,
    op: ReduceOp,
    mut body: impl FnMut(Tap) -> T,
) -> Result<T, DslError> {
    if window.rows() != domain.rows || window.cols() != domain.cols {
        return Err(DslError::ExtentMismatch {
            expected: (window.rows(), window.cols()),
            found: (domain.rows, domain.cols),
        });
    }
    let (ar, ac) = window.shape().anchor();
    let mut acc = T::identity(op);
    for r in 0..domain.rows {
        for c in 0..domain.cols {
            if !domain.is_active(r, c) {
                continue;
            }
            let tap = Tap {
                dy: r as i64 - ar as i64,
                dx: c as i64 - ac as i64,
                value: window.cell(r, c),
                coef: 1.0,
            };
            acc = T::combine(op, acc, body(tap));
        }
    }
    Ok(acc)
}

/// Loop trip count fixed when the pipeline is built.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StaticBound(NonZeroU32);

impl StaticBound {
    pub fn new(bound: u32) -> Result<Self, DslError> {
        NonZeroU32::new(bound).map(Self).ok_or(DslError::ZeroBound)
    }

    pub fn get(self) -> u32 {
        self.0.get()
    }
}

/// Runs `body` at most `bound` times. A `Break` from the body ends the loop
/// without counting that step. Returns the number of completed steps.
pub fn iterate(bound: StaticBound, mut body: impl FnMut(u32) -> ControlFlow<()>) -> u32 {
    let mut done = 0;
    for step in 0..bound.get() {
        if body(step).is_break() {
            break;
        }
        done += 1;
    }
    done
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::window::WindowShape;

    fn ramp_window(cells: &[u64]) -> Window<'_> {
        Window::new(WindowShape::centered(3, 3).unwrap(), cells).unwrap()
    }

    const RAMP: [u64; 9] = [1, 2, 3, 4, 5, 6, 7, 8, 9];

    #[test]
    fn convolve_examples() {
        let w = ramp_window(&RAMP);
        let ones = Mask::ones(3, 3).unwrap();
        let sum: f64 = convolve(&w, &ones, ReduceOp::Sum, |t| t.coef * t.value as f64).unwrap();
        assert_eq!(sum, 45.0);
        let min: u64 = convolve(&w, &ones, ReduceOp::Min, |t| t.value).unwrap();
        assert_eq!(min, 1);

        let bad = Mask::ones(5, 5).unwrap();
        assert!(matches!(
            convolve(&w, &bad, ReduceOp::Sum, |t| t.value),
            Err(DslError::ExtentMismatch { .. })
        ));
    }

    #[test]
    fn reduce_examples() {
        let w = ramp_window(&RAMP);
        let center = Domain::from_fn(3, 3, |r, c| r == 1 && c == 1).unwrap();
        assert_eq!(reduce(&w, &center, ReduceOp::Sum, |t| t.value).unwrap(), 5u64);

        let full = Domain::full(3, 3).unwrap();
        let ones = Mask::ones(3, 3).unwrap();
        let a: u64 = reduce(&w, &full, ReduceOp::Sum, |t| t.value).unwrap();
        let b: u64 = convolve(&w, &ones, ReduceOp::Sum, |t| t.value).unwrap();
        assert_eq!((a, b), (45, 45));

        let ring = Domain::from_fn(3, 3, |r, c| !(r == 1 && c == 1)).unwrap();
        let got: u64 = reduce(&w, &ring, ReduceOp::Max, |t| t.value).unwrap();
        // brute force over the active cells
        let expect = RAMP
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != 4)
            .map(|(_, &v)| v)
            .max()
            .unwrap();
        assert_eq!(got, expect);
        let ring_min: u64 = reduce(&w, &ring, ReduceOp::Min, |t| t.value).unwrap();
        assert_eq!(ring_min, 1);
    }

    #[test]
    fn domain_and_mask_validation() {
        assert_eq!(Domain::new(3, 3, vec![false; 9]), Err(DslError::EmptyDomain));
        assert!(matches!(Mask::ones(2, 3), Err(DslError::EvenExtent { .. })));
        assert!(matches!(
            Mask::new(3, 3, vec![0.0; 8]),
            Err(DslError::WindowLength { .. })
        ));
    }

    #[test]
    fn taps_are_relative_to_anchor() {
        let w = ramp_window(&RAMP);
        let mut seen = Vec::new();
        let _: u64 = reduce(&w, &Domain::full(3, 3).unwrap(), ReduceOp::Sum, |t| {
            seen.push((t.dy, t.dx));
            0
        })
        .unwrap();
        assert_eq!(seen.first(), Some(&(-1, -1)));
        assert_eq!(seen.last(), Some(&(1, 1)));
    }

    fn kernighan(mut v: u64, bound: u32) -> (u32, u32) {
        let mut count = 0;
        let steps = iterate(StaticBound::new(bound).unwrap(), |_| {
            if v == 0 {
                return ControlFlow::Break(());
            }
            v &= v - 1;
            count += 1;
            ControlFlow::Continue(())
        });
        (count, steps)
    }

    #[test]
    fn iterate_examples() {
        assert_eq!(kernighan(0, 8), (0, 0));
        assert_eq!(kernighan(0xFF, 8), (8, 8));
        assert_eq!(kernighan(0b1011, 8), (3, 3));
        assert_eq!(StaticBound::new(0), Err(DslError::ZeroBound));
    }

    #[test]
    fn iterate_never_exceeds_bound() {
        for bound in 1..20 {
            let mut calls = 0;
            let steps = iterate(StaticBound::new(bound).unwrap(), |_| {
                calls += 1;
                ControlFlow::Continue(())
            });
            assert_eq!((steps, calls), (bound, bound));
        }
    }
}
