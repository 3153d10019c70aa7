//! Row-major phase images and inpainting masks.

use crate::circle::{is_canonical, wrap_radians};
use crate::error::{Error, Result};

pub type Shape = (usize, usize);

fn check_shape(rows: usize, cols: usize) -> Result<usize> {
    if rows == 0 || cols == 0 {
        return Err(Error::invalid(format!("empty shape {rows}x{cols}")));
    }
    rows.checked_mul(cols)
        .ok_or_else(|| Error::invalid(format!("shape {rows}x{cols} overflows")))
}

/// A rectangular grid of canonical angles, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseImage {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl PhaseImage {
    /// Builds an image from canonical values. Values outside `[-π, π)` are
    /// rejected rather than wrapped.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        let len = check_shape(rows, cols)?;
        if data.len() != len {
            return Err(Error::invalid(format!(
                "{rows}x{cols} image needs {len} values, got {}",
                data.len()
            )));
        }
        if let Some(i) = data.iter().position(|v| !is_canonical(*v)) {
            return Err(Error::OutOfRange {
                row: i / cols,
                col: i % cols,
                value: data[i],
            });
        }
        Ok(PhaseImage { rows, cols, data })
    }

    /// Builds an image by evaluating `f(row, col)` and wrapping the result.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let len = check_shape(rows, cols)?;
        let mut data = Vec::with_capacity(len);
        for r in 0..rows {
            for c in 0..cols {
                let v = f(r, c);
                if !v.is_finite() {
                    return Err(Error::invalid(format!("non-finite value at ({r}, {c})")));
                }
                data.push(wrap_radians(v));
            }
        }
        Ok(PhaseImage { rows, cols, data })
    }

    pub fn constant(rows: usize, cols: usize, value: f64) -> Result<Self> {
        Self::from_fn(rows, cols, |_, _| value)
    }

    /// Caller guarantees canonical values and a matching length.
    pub(crate) fn from_raw(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        PhaseImage { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> Shape {
        (self.rows, self.cols)
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    /// Returns `wrap(x + shift)` pixelwise.
    pub fn shifted(&self, shift: f64) -> PhaseImage {
        let data = self.data.iter().map(|v| wrap_radians(v + shift)).collect();
        PhaseImage::from_raw(self.rows, self.cols, data)
    }

    pub(crate) fn ensure_shape(&self, shape: Shape) -> Result<()> {
        if self.shape() != shape {
            return Err(Error::ShapeMismatch {
                expected: shape,
                actual: self.shape(),
            });
        }
        Ok(())
    }
}

/// Marks which pixels carry data (`known`) and which are to be inpainted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mask {
    rows: usize,
    cols: usize,
    known: Vec<bool>,
}

impl Mask {
    pub fn new(rows: usize, cols: usize, known: Vec<bool>) -> Result<Self> {
        let len = check_shape(rows, cols)?;
        if known.len() != len {
            return Err(Error::invalid(format!(
                "{rows}x{cols} mask needs {len} entries, got {}",
                known.len()
            )));
        }
        Ok(Mask { rows, cols, known })
    }

    pub fn from_fn(rows: usize, cols: usize, mut known: impl FnMut(usize, usize) -> bool) -> Result<Self> {
        let len = check_shape(rows, cols)?;
        let mut v = Vec::with_capacity(len);
        for r in 0..rows {
            for c in 0..cols {
                v.push(known(r, c));
            }
        }
        Ok(Mask { rows, cols, known: v })
    }

    pub fn all_known(rows: usize, cols: usize) -> Result<Self> {
        Self::from_fn(rows, cols, |_, _| true)
    }

    pub fn all_unknown(rows: usize, cols: usize) -> Result<Self> {
        Self::from_fn(rows, cols, |_, _| false)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> Shape {
        (self.rows, self.cols)
    }

    pub fn is_known(&self, row: usize, col: usize) -> bool {
        self.known[row * self.cols + col]
    }

    #[inline]
    pub fn is_known_at(&self, index: usize) -> bool {
        self.known[index]
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.known
    }

    pub fn count_known(&self) -> usize {
        self.known.iter().filter(|k| **k).count()
    }

    pub fn count_unknown(&self) -> usize {
        self.known.len() - self.count_known()
    }

    pub(crate) fn ensure_shape(&self, shape: Shape) -> Result<()> {
        if self.shape() != shape {
            return Err(Error::ShapeMismatch {
                expected: shape,
                actual: self.shape(),
            });
        }
        Ok(())
    }
}
