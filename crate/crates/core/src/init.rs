//! Initialization of the inpainting region.
//!
//! Known pixels are copied from the data. Unknown pixels are filled layer by
//! layer from the boundary of the initialized area: whenever a stencil has
//! exactly one uninitialized pixel, that pixel is set so the stencil's cyclic
//! difference vanishes. Each layer is computed from the state at the start of
//! the sweep, so growth is symmetric and independent of scan direction.

use std::f64::consts::PI;

use crate::circle::{inner, wrap_radians, DifferenceFilter};
use crate::error::Result;
use crate::image::{Mask, PhaseImage};
use crate::model::Weights;

/// How a pixel was filled.
#[derive(Clone, Debug, PartialEq)]
pub struct Fill {
    pub pixel: usize,
    pub filter: DifferenceFilter,
    /// Flat indices of the stencil, in tap order.
    pub stencil: Vec<usize>,
    /// `wrap(<x_S, w>)` right after filling.
    pub residual: f64,
    /// Sweep (layer) in which the pixel was filled, starting at 0.
    pub sweep: usize,
}

#[derive(Clone, Debug)]
pub struct InitReport {
    pub image: PhaseImage,
    pub fills: Vec<Fill>,
    /// Pixels no stencil could reach; set to 0.
    pub unreachable: Vec<usize>,
}

#[derive(Clone, Copy)]
struct Family {
    filter: DifferenceFilter,
    offsets: &'static [(isize, isize)],
    /// Positions of the unknown pixel within the stencil, in order of preference.
    positions: &'static [usize],
}

// Preference: second-order before mixed before first-order. Within a family,
// extrapolation (unknown at an end) comes before interpolation.
const FAMILIES: [Family; 7] = [
    Family { filter: DifferenceFilter::Second, offsets: &[(0, 0), (0, 1), (0, 2)], positions: &[2, 0, 1] },
    Family { filter: DifferenceFilter::Second, offsets: &[(0, 0), (1, 0), (2, 0)], positions: &[2, 0, 1] },
    Family { filter: DifferenceFilter::Mixed, offsets: &[(0, 0), (1, 0), (0, 1), (1, 1)], positions: &[3, 2, 1, 0] },
    Family { filter: DifferenceFilter::First, offsets: &[(0, 0), (0, 1)], positions: &[1, 0] },
    Family { filter: DifferenceFilter::First, offsets: &[(0, 0), (1, 0)], positions: &[1, 0] },
    Family { filter: DifferenceFilter::First, offsets: &[(0, 0), (1, 1)], positions: &[1, 0] },
    Family { filter: DifferenceFilter::First, offsets: &[(0, 1), (1, 0)], positions: &[1, 0] },
];

fn family_active(index: usize, w: &Weights) -> bool {
    match index {
        0 => w.beta[0] > 0.0,
        1 => w.beta[1] > 0.0,
        2 => w.gamma > 0.0,
        3 => w.alpha[0] > 0.0,
        4 => w.alpha[1] > 0.0,
        5 => w.alpha[2] > 0.0,
        6 => w.alpha[3] > 0.0,
        _ => false,
    }
}

/// Value of `x[pos]` making `wrap(<x, w>) = 0`, given the other entries.
fn solve_zero_difference(x: &[f64], pos: usize, filter: DifferenceFilter) -> f64 {
    match (filter, pos) {
        (DifferenceFilter::First, 0) => x[1],
        (DifferenceFilter::First, _) => x[0],
        (DifferenceFilter::Second, 0) => wrap_radians(2.0 * x[1] - x[2]),
        (DifferenceFilter::Second, 2) => wrap_radians(2.0 * x[1] - x[0]),
        (DifferenceFilter::Second, _) => {
            // Two solutions half a turn apart; take the one nearer x[0].
            let a = wrap_radians(0.5 * (x[0] + x[2]));
            let b = wrap_radians(a + PI);
            if wrap_radians(b - x[0]).abs() < wrap_radians(a - x[0]).abs() {
                b
            } else {
                a
            }
        }
        (DifferenceFilter::Mixed, _) => {
            let taps = filter.taps();
            let rest: f64 = (0..4).filter(|&j| j != pos).map(|j| taps[j] * x[j]).sum();
            wrap_radians(-taps[pos] * rest)
        }
    }
}

/// Fills the unknown pixels of `f`. Known pixels are returned unchanged.
pub fn initialize(f: &PhaseImage, mask: &Mask, weights: &Weights) -> Result<PhaseImage> {
    Ok(initialize_with_report(f, mask, weights)?.image)
}

/// [`initialize`], also returning how each pixel was filled.
pub fn initialize_with_report(f: &PhaseImage, mask: &Mask, weights: &Weights) -> Result<InitReport> {
    let (rows, cols) = f.shape();
    mask.ensure_shape(f.shape())?;
    weights.validate()?;

    let active: Vec<Family> = FAMILIES
        .iter()
        .enumerate()
        .filter(|(i, _)| family_active(*i, weights))
        .map(|(_, fam)| *fam)
        .collect();

    let mut x = f.as_slice().to_vec();
    let mut ready: Vec<bool> = mask.as_slice().to_vec();
    let mut pending: Vec<usize> = (0..x.len()).filter(|&i| !ready[i]).collect();
    let mut fills = Vec::with_capacity(pending.len());
    let mut sweep = 0;

    let mut stencil = Vec::with_capacity(4);
    let mut values = [0.0; 4];
    while !pending.is_empty() {
        let mut layer = Vec::new();
        'pixel: for &p in &pending {
            let (pr, pc) = ((p / cols) as isize, (p % cols) as isize);
            for fam in &active {
                for &pos in fam.positions {
                    let (dr, dc) = fam.offsets[pos];
                    let (ar, ac) = (pr - dr, pc - dc);
                    stencil.clear();
                    let fits = fam.offsets.iter().all(|&(or, oc)| {
                        let (r, c) = (ar + or, ac + oc);
                        let inside = r >= 0 && c >= 0 && (r as usize) < rows && (c as usize) < cols;
                        if inside {
                            stencil.push(r as usize * cols + c as usize);
                        }
                        inside
                    });
                    if !fits {
                        continue;
                    }
                    let others_ready = stencil.iter().enumerate().all(|(j, &i)| j == pos || ready[i]);
                    if !others_ready {
                        continue;
                    }
                    let arity = fam.filter.arity();
                    for (v, &i) in values.iter_mut().zip(&stencil) {
                        *v = x[i];
                    }
                    let value = solve_zero_difference(&values[..arity], pos, fam.filter);
                    layer.push((p, value, fam.filter, stencil.clone(), pos));
                    continue 'pixel;
                }
            }
        }
        if layer.is_empty() {
            break;
        }
        for (p, value, _, _, _) in &layer {
            x[*p] = *value;
            ready[*p] = true;
        }
        for (p, _, filter, stencil, _) in layer {
            let vals: Vec<f64> = stencil.iter().map(|&i| x[i]).collect();
            fills.push(Fill {
                pixel: p,
                filter,
                residual: wrap_radians(inner(&vals, filter)),
                stencil,
                sweep,
            });
        }
        pending.retain(|&i| !ready[i]);
        sweep += 1;
    }

    for &p in &pending {
        x[p] = 0.0;
    }
    Ok(InitReport {
        image: PhaseImage::from_raw(rows, cols, x),
        fills,
        unreachable: pending,
    })
}
