//! Synthetic phase images, masks, noise and error metrics.

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use std::f64::consts::PI;

use crate::circle::{arc_distance, wrap_radians};
use crate::error::{Error, Result};
use crate::image::{Mask, PhaseImage, Shape};

fn check_shape(shape: Shape) -> Result<()> {
    if shape.0 == 0 || shape.1 == 0 {
        return Err(Error::invalid(format!("empty shape {}x{}", shape.0, shape.1)));
    }
    Ok(())
}

/// `atan2(y_i, x_j)` on an `n × n` grid of `[-½, ½]²`; row `i` carries `y_i`.
pub fn gen_atan2(n: usize) -> Result<PhaseImage> {
    if n < 2 {
        return Err(Error::invalid(format!("atan2 grid needs n >= 2, got {n}")));
    }
    let sample = |k: usize| -0.5 + k as f64 / (n - 1) as f64;
    PhaseImage::from_fn(n, n, |i, j| sample(i).atan2(sample(j)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RampDirection {
    /// Increases along each row (with the column index).
    Horizontal,
    /// Increases down each column (with the row index).
    Vertical,
}

/// `wrap(slope · coordinate)`.
pub fn gen_wrapped_ramp(shape: Shape, slope: f64, direction: RampDirection) -> Result<PhaseImage> {
    check_shape(shape)?;
    if !slope.is_finite() {
        return Err(Error::invalid(format!("slope must be finite, got {slope}")));
    }
    PhaseImage::from_fn(shape.0, shape.1, |r, c| {
        let t = match direction {
            RampDirection::Horizontal => c,
            RampDirection::Vertical => r,
        };
        slope * t as f64
    })
}

/// Geometry of [`gen_blocks`], as fractions of the image extent.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlocksGeometry {
    pub background: f64,
    pub foreground: f64,
    /// `(row_start, row_end, col_start, col_end)` of the constant block.
    pub foreground_rect: (f64, f64, f64, f64),
    /// Same for the block carrying the vertical ramp.
    pub ramp_rect: (f64, f64, f64, f64),
    /// Total increase of the ramp from its first to its last row.
    pub ramp_span: f64,
}

impl Default for BlocksGeometry {
    fn default() -> Self {
        BlocksGeometry {
            background: -2.0,
            foreground: 1.0,
            foreground_rect: (0.15, 0.45, 0.20, 0.80),
            ramp_rect: (0.55, 0.90, 0.20, 0.80),
            ramp_span: 4.0 * PI,
        }
    }
}

fn pixel_range(extent: usize, from: f64, to: f64) -> std::ops::Range<usize> {
    let a = (from * extent as f64).round() as usize;
    let b = (to * extent as f64).round() as usize;
    a.min(extent)..b.min(extent)
}

/// A constant block and a twice-wrapped ramp block on a constant background.
pub fn gen_blocks(shape: Shape, geometry: &BlocksGeometry) -> Result<PhaseImage> {
    if shape.0 < 64 || shape.1 < 64 {
        return Err(Error::invalid(format!(
            "blocks image needs at least 64x64, got {}x{}",
            shape.0, shape.1
        )));
    }
    let (rows, cols) = shape;
    let g = geometry;
    let fg = (
        pixel_range(rows, g.foreground_rect.0, g.foreground_rect.1),
        pixel_range(cols, g.foreground_rect.2, g.foreground_rect.3),
    );
    let ramp = (
        pixel_range(rows, g.ramp_rect.0, g.ramp_rect.1),
        pixel_range(cols, g.ramp_rect.2, g.ramp_rect.3),
    );
    let ramp_height = ramp.0.len().max(2);
    let slope = g.ramp_span / (ramp_height - 1) as f64;
    PhaseImage::from_fn(rows, cols, |r, c| {
        if ramp.0.contains(&r) && ramp.1.contains(&c) {
            slope * (r - ramp.0.start) as f64
        } else if fg.0.contains(&r) && fg.1.contains(&c) {
            g.foreground
        } else {
            g.background
        }
    })
}

/// Keeps every third row and column: pixel known iff `row % 3 == 0 && col % 3 == 0`.
pub fn mask_subsample3(shape: Shape) -> Result<Mask> {
    Mask::from_fn(shape.0, shape.1, |r, c| r % 3 == 0 && c % 3 == 0)
}

/// Marks exactly `round(fraction_lost · N · M)` pixels unknown, drawn
/// uniformly without replacement.
pub fn mask_random(shape: Shape, fraction_lost: f64, seed: u64) -> Result<Mask> {
    check_shape(shape)?;
    if !(0.0..=1.0).contains(&fraction_lost) {
        return Err(Error::invalid(format!("fraction must lie in [0, 1], got {fraction_lost}")));
    }
    let n = shape.0 * shape.1;
    let lost = (fraction_lost * n as f64).round() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut known = vec![true; n];
    for i in index::sample(&mut rng, n, lost) {
        known[i] = false;
    }
    Mask::new(shape.0, shape.1, known)
}

/// Unknown disc of the given radius (in pixels) around the image centre.
pub fn mask_disc(shape: Shape, radius: f64) -> Result<Mask> {
    check_shape(shape)?;
    if !(radius >= 0.0 && radius.is_finite()) {
        return Err(Error::invalid(format!("radius must be nonnegative, got {radius}")));
    }
    let cr = (shape.0 as f64 - 1.0) / 2.0;
    let cc = (shape.1 as f64 - 1.0) / 2.0;
    Mask::from_fn(shape.0, shape.1, |r, c| {
        let (dr, dc) = (r as f64 - cr, c as f64 - cc);
        dr * dr + dc * dc > radius * radius
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BandOrientation {
    /// A strip of columns.
    Vertical,
    /// A strip of rows.
    Horizontal,
}

/// Unknown strip `start..start + width` of columns (vertical) or rows (horizontal).
pub fn mask_band(shape: Shape, orientation: BandOrientation, start: usize, width: usize) -> Result<Mask> {
    check_shape(shape)?;
    let extent = match orientation {
        BandOrientation::Vertical => shape.1,
        BandOrientation::Horizontal => shape.0,
    };
    if start + width > extent {
        return Err(Error::invalid(format!(
            "band {start}..{} exceeds extent {extent}",
            start + width
        )));
    }
    let band = start..start + width;
    Mask::from_fn(shape.0, shape.1, |r, c| match orientation {
        BandOrientation::Vertical => !band.contains(&c),
        BandOrientation::Horizontal => !band.contains(&r),
    })
}

/// Pixelwise `wrap(x + σ g)` with standard normal `g`.
pub fn add_wrapped_gaussian_noise(x: &PhaseImage, sigma: f64, seed: u64) -> Result<PhaseImage> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::invalid(format!("sigma must be nonnegative, got {sigma}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = x
        .as_slice()
        .iter()
        .map(|v| {
            let g: f64 = StandardNormal.sample(&mut rng);
            wrap_radians(v + sigma * g)
        })
        .collect();
    Ok(PhaseImage::from_raw(x.rows(), x.cols(), data))
}

/// Mean squared and maximal geodesic distance between two images.
pub fn cyclic_error(x: &PhaseImage, y: &PhaseImage) -> Result<(f64, f64)> {
    y.ensure_shape(x.shape())?;
    let (mut sum, mut max) = (0.0, 0.0f64);
    for (a, b) in x.as_slice().iter().zip(y.as_slice()) {
        let d = arc_distance(*a, *b);
        sum += d * d;
        max = max.max(d);
    }
    Ok((sum / x.len() as f64, max))
}

/// Root of the mean squared geodesic distance.
pub fn cyclic_rmse(x: &PhaseImage, y: &PhaseImage) -> Result<f64> {
    Ok(cyclic_error(x, y)?.0.sqrt())
}
