//! The inpainting functionals and their splitting into sub-functionals.
//!
//! The regularizer is a weighted sum of absolute cyclic differences along
//! seven stencil families (four first-order directions, two second-order
//! directions and the mixed 2×2 difference). Each family is split by the
//! parity (or residue mod 3) of its anchor index so that the stencils within
//! one sub-functional never share a pixel; the proximal mapping of a
//! sub-functional is then the independent proximal mapping of each stencil.
//!
//! Labels follow the cycle order:
//!
//! | labels  | filter | direction                   | split by            |
//! |---------|--------|-----------------------------|---------------------|
//! | 1, 2    | b1     | horizontal `(r,c)-(r,c+1)`  | `c mod 2`           |
//! | 3, 4    | b1     | vertical `(r,c)-(r+1,c)`    | `r mod 2`           |
//! | 5, 6    | b1     | diagonal `(r,c)-(r+1,c+1)`  | `r mod 2`           |
//! | 7, 8    | b1     | anti-diagonal `(r,c+1)-(r+1,c)` | `r mod 2`       |
//! | 9..=11  | b2     | horizontal                  | `c mod 3`           |
//! | 12..=14 | b2     | vertical                    | `r mod 3`           |
//! | 15..=18 | b1,1   | 2×2 block                   | `(r mod 2, c mod 2)` = (0,0), (1,0), (0,1), (1,1) |
//! | 19      | data   | noisy model only            |                     |
//!
//! Anchors `(r, c)` are the top-left corner of the stencil's bounding box.
//! Diagonal weights carry the factor `1/√2`.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::circle::{arc_distance, inner, wrap_radians, DifferenceFilter};
use crate::error::{Error, Result};
use crate::image::{Mask, PhaseImage, Shape};

/// Label of the data-fidelity sub-functional in the noisy model.
pub const DATA_LABEL: usize = 19;

/// Number of regularizer sub-functionals in the full splitting.
pub const REGULARIZER_GROUPS: usize = 18;

/// Regularization weights.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Weights {
    /// First-order weights: horizontal, vertical, diagonal, anti-diagonal.
    pub alpha: [f64; 4],
    /// Second-order weights: horizontal, vertical.
    pub beta: [f64; 2],
    /// Mixed second-order weight.
    pub gamma: f64,
}

impl Weights {
    pub fn new(alpha: [f64; 4], beta: [f64; 2], gamma: f64) -> Result<Self> {
        let w = Weights { alpha, beta, gamma };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        let all = self.alpha.iter().chain(&self.beta).chain(std::iter::once(&self.gamma));
        let mut any_positive = false;
        for &v in all {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("weights must be finite and nonnegative, got {v}")));
            }
            any_positive |= v > 0.0;
        }
        if !any_positive {
            return Err(Error::invalid("at least one weight must be positive"));
        }
        Ok(())
    }
}

/// Which variational model to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModelKind {
    /// Exact interpolation: `x = f` on known pixels, regularizer restricted
    /// to stencils touching the inpainting region.
    Noiseless,
    /// Squared-distance data term on known pixels, regularizer everywhere.
    Noisy,
}

struct Group {
    label: usize,
    filter: DifferenceFilter,
    offsets: &'static [(usize, usize)],
    /// (modulus on rows, residue, modulus on cols, residue); modulus 1 means unconstrained.
    split: (usize, usize, usize, usize),
}

const HORIZONTAL_1: &[(usize, usize)] = &[(0, 0), (0, 1)];
const VERTICAL_1: &[(usize, usize)] = &[(0, 0), (1, 0)];
const DIAGONAL_1: &[(usize, usize)] = &[(0, 0), (1, 1)];
const ANTI_DIAGONAL_1: &[(usize, usize)] = &[(0, 1), (1, 0)];
const HORIZONTAL_2: &[(usize, usize)] = &[(0, 0), (0, 1), (0, 2)];
const VERTICAL_2: &[(usize, usize)] = &[(0, 0), (1, 0), (2, 0)];
const BLOCK: &[(usize, usize)] = &[(0, 0), (1, 0), (0, 1), (1, 1)];

const fn group(
    label: usize,
    filter: DifferenceFilter,
    offsets: &'static [(usize, usize)],
    split: (usize, usize, usize, usize),
) -> Group {
    Group { label, filter, offsets, split }
}

use DifferenceFilter::{First, Mixed, Second};

const GROUPS: [Group; REGULARIZER_GROUPS] = [
    group(1, First, HORIZONTAL_1, (1, 0, 2, 0)),
    group(2, First, HORIZONTAL_1, (1, 0, 2, 1)),
    group(3, First, VERTICAL_1, (2, 0, 1, 0)),
    group(4, First, VERTICAL_1, (2, 1, 1, 0)),
    group(5, First, DIAGONAL_1, (2, 0, 1, 0)),
    group(6, First, DIAGONAL_1, (2, 1, 1, 0)),
    group(7, First, ANTI_DIAGONAL_1, (2, 0, 1, 0)),
    group(8, First, ANTI_DIAGONAL_1, (2, 1, 1, 0)),
    group(9, Second, HORIZONTAL_2, (1, 0, 3, 0)),
    group(10, Second, HORIZONTAL_2, (1, 0, 3, 1)),
    group(11, Second, HORIZONTAL_2, (1, 0, 3, 2)),
    group(12, Second, VERTICAL_2, (3, 0, 1, 0)),
    group(13, Second, VERTICAL_2, (3, 1, 1, 0)),
    group(14, Second, VERTICAL_2, (3, 2, 1, 0)),
    group(15, Mixed, BLOCK, (2, 0, 2, 0)),
    group(16, Mixed, BLOCK, (2, 1, 2, 0)),
    group(17, Mixed, BLOCK, (2, 0, 2, 1)),
    group(18, Mixed, BLOCK, (2, 1, 2, 1)),
];

fn group_weight(label: usize, w: &Weights) -> f64 {
    match label {
        1 | 2 => w.alpha[0],
        3 | 4 => w.alpha[1],
        5 | 6 => w.alpha[2] * FRAC_1_SQRT_2,
        7 | 8 => w.alpha[3] * FRAC_1_SQRT_2,
        9..=11 => w.beta[0],
        12..=14 => w.beta[1],
        15..=18 => w.gamma,
        _ => unreachable!("no regularizer group {label}"),
    }
}

/// One stencil: the flat pixel indices a filter is applied to, in tap order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Stencil<'a> {
    pub filter: DifferenceFilter,
    pub pixels: &'a [usize],
    pub weight: f64,
}

impl Stencil<'_> {
    /// Pixel positions as `(row, col)` for an image with `cols` columns.
    pub fn coords(&self, cols: usize) -> Vec<(usize, usize)> {
        self.pixels.iter().map(|i| (i / cols, i % cols)).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Term {
    Difference {
        filter: DifferenceFilter,
        weight: f64,
        pixels: Vec<usize>,
    },
    Data,
}

/// One summand `J_l` of the splitting.
#[derive(Clone, Debug, PartialEq)]
pub struct SubFunctional {
    label: usize,
    term: Term,
}

impl SubFunctional {
    pub fn label(&self) -> usize {
        self.label
    }

    pub fn is_data_term(&self) -> bool {
        matches!(self.term, Term::Data)
    }

    pub fn filter(&self) -> Option<DifferenceFilter> {
        match self.term {
            Term::Difference { filter, .. } => Some(filter),
            Term::Data => None,
        }
    }

    /// Weight of every stencil in this sub-functional (1 for the data term).
    pub fn weight(&self) -> f64 {
        match self.term {
            Term::Difference { weight, .. } => weight,
            Term::Data => 1.0,
        }
    }

    /// Flat pixel indices of all stencils, concatenated in tap order.
    pub fn pixels(&self) -> &[usize] {
        match &self.term {
            Term::Difference { pixels, .. } => pixels,
            Term::Data => &[],
        }
    }

    pub fn num_stencils(&self) -> usize {
        match &self.term {
            Term::Difference { filter, pixels, .. } => pixels.len() / filter.arity(),
            Term::Data => 0,
        }
    }

    pub fn stencils(&self) -> impl Iterator<Item = Stencil<'_>> + '_ {
        let (filter, weight, pixels): (DifferenceFilter, f64, &[usize]) = match &self.term {
            Term::Difference { filter, weight, pixels } => (*filter, *weight, pixels),
            Term::Data => (First, 0.0, &[]),
        };
        pixels.chunks_exact(filter.arity()).map(move |p| Stencil {
            filter,
            pixels: p,
            weight,
        })
    }

    /// The same sub-functional with its stencils listed in `order`
    /// (a permutation of `0..num_stencils()`).
    pub fn reordered(&self, order: &[usize]) -> Result<SubFunctional> {
        let Term::Difference { filter, weight, pixels } = &self.term else {
            return Ok(self.clone());
        };
        let n = self.num_stencils();
        let mut seen = vec![false; n];
        if order.len() != n || !order.iter().all(|&i| i < n && !std::mem::replace(&mut seen[i], true)) {
            return Err(Error::invalid("stencil order is not a permutation"));
        }
        let arity = filter.arity();
        let pixels = order
            .iter()
            .flat_map(|&i| pixels[i * arity..(i + 1) * arity].iter().copied())
            .collect();
        Ok(SubFunctional {
            label: self.label,
            term: Term::Difference {
                filter: *filter,
                weight: *weight,
                pixels,
            },
        })
    }

    /// `Σ weight · |wrap(<x_S, w>)|` over the stencils.
    pub(crate) fn regularizer_energy(&self, x: &[f64]) -> f64 {
        let Term::Difference { filter, weight, pixels } = &self.term else {
            return 0.0;
        };
        let mut buf = [0.0; 4];
        let arity = filter.arity();
        let sum: f64 = pixels
            .chunks_exact(arity)
            .map(|st| {
                for (b, &i) in buf.iter_mut().zip(st) {
                    *b = x[i];
                }
                wrap_radians(inner(&buf[..arity], *filter)).abs()
            })
            .sum();
        weight * sum
    }
}

/// Splits the functional into sub-functionals with pairwise disjoint stencils.
///
/// Stencils must fit inside the image. In the noiseless model a stencil is
/// kept only if it touches at least one unknown pixel; in the noisy model all
/// stencils are kept and the data term (label 19) is appended. Groups with
/// zero weight or no stencils are omitted.
pub fn enumerate_stencils(
    shape: Shape,
    mask: &Mask,
    weights: &Weights,
    kind: ModelKind,
) -> Result<Vec<SubFunctional>> {
    let (rows, cols) = shape;
    if rows == 0 || cols == 0 {
        return Err(Error::invalid(format!("empty shape {rows}x{cols}")));
    }
    mask.ensure_shape(shape)?;
    weights.validate()?;

    let mut out = Vec::new();
    for g in &GROUPS {
        let weight = group_weight(g.label, weights);
        if weight == 0.0 {
            continue;
        }
        let height = 1 + g.offsets.iter().map(|o| o.0).max().unwrap_or(0);
        let width = 1 + g.offsets.iter().map(|o| o.1).max().unwrap_or(0);
        if height > rows || width > cols {
            continue;
        }
        let (rm, rr, cm, cr) = g.split;
        let mut pixels = Vec::new();
        for r in (rr..=rows - height).step_by(rm) {
            for c in (cr..=cols - width).step_by(cm) {
                let start = pixels.len();
                pixels.extend(g.offsets.iter().map(|(dr, dc)| (r + dr) * cols + c + dc));
                let keep = kind == ModelKind::Noisy
                    || pixels[start..].iter().any(|&i| !mask.is_known_at(i));
                if !keep {
                    pixels.truncate(start);
                }
            }
        }
        if !pixels.is_empty() {
            out.push(SubFunctional {
                label: g.label,
                term: Term::Difference {
                    filter: g.filter,
                    weight,
                    pixels,
                },
            });
        }
    }
    if kind == ModelKind::Noisy {
        out.push(SubFunctional {
            label: DATA_LABEL,
            term: Term::Data,
        });
    }
    Ok(out)
}

/// Value of the functional at `x`, given the splitting `groups`.
pub(crate) fn energy_of(groups: &[SubFunctional], x: &[f64], f: &[f64], mask: &Mask) -> f64 {
    groups
        .iter()
        .map(|g| {
            if g.is_data_term() {
                data_energy(x, f, mask)
            } else {
                g.regularizer_energy(x)
            }
        })
        .sum()
}

fn data_energy(x: &[f64], f: &[f64], mask: &Mask) -> f64 {
    x.iter()
        .zip(f)
        .zip(mask.as_slice())
        .filter(|(_, known)| **known)
        .map(|((a, b), _)| arc_distance(*a, *b).powi(2))
        .sum()
}

/// Checks that `x` agrees with `f` on every known pixel, bit for bit.
pub(crate) fn check_constraint(x: &PhaseImage, f: &PhaseImage, mask: &Mask) -> Result<()> {
    let cols = x.cols();
    for (i, ((a, b), known)) in x.as_slice().iter().zip(f.as_slice()).zip(mask.as_slice()).enumerate() {
        if *known && a.to_bits() != b.to_bits() {
            return Err(Error::ConstraintViolation {
                row: i / cols,
                col: i % cols,
                value: *a,
                data: *b,
            });
        }
    }
    Ok(())
}

/// Energy of `x` under the chosen model.
///
/// The noiseless model requires `x = f` on known pixels.
pub fn energy(
    x: &PhaseImage,
    f: &PhaseImage,
    mask: &Mask,
    weights: &Weights,
    kind: ModelKind,
) -> Result<f64> {
    let shape = x.shape();
    f.ensure_shape(shape)?;
    mask.ensure_shape(shape)?;
    if kind == ModelKind::Noiseless {
        check_constraint(x, f, mask)?;
    }
    let groups = enumerate_stencils(shape, mask, weights, kind)?;
    Ok(energy_of(&groups, x.as_slice(), f.as_slice(), mask))
}
