//! Arithmetic on the unit circle.
//!
//! A point on S¹ is represented by its canonical angle in the half-open
//! interval `[-π, π)`. Odd multiples of π always map to `-π`.

use std::f64::consts::{PI, TAU};
use std::fmt;

use crate::error::{Error, Result};

/// A canonical angle in `[-π, π)`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Default)]
#[repr(transparent)]
pub struct Angle(f64);

impl Angle {
    /// Wraps an arbitrary finite number of radians onto the circle.
    pub fn new(radians: f64) -> Result<Self> {
        wrap(radians)
    }

    /// Accepts `radians` only if it is already canonical.
    pub fn from_canonical(radians: f64) -> Result<Self> {
        if is_canonical(radians) {
            Ok(Angle(radians))
        } else {
            Err(Error::invalid(format!("{radians} is not in [-pi, pi)")))
        }
    }

    pub fn radians(self) -> f64 {
        self.0
    }
}

impl From<Angle> for f64 {
    fn from(a: Angle) -> f64 {
        a.0
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// `true` iff `t` is finite and lies in `[-π, π)`.
#[inline]
pub fn is_canonical(t: f64) -> bool {
    (-PI..PI).contains(&t)
}

/// Reduces `t` to its representant in `[-π, π)`.
///
/// Non-finite input is rejected; see [`wrap_radians`] for the unchecked
/// variant used in inner loops.
pub fn wrap(t: f64) -> Result<Angle> {
    if !t.is_finite() {
        return Err(Error::invalid(format!("cannot wrap non-finite value {t}")));
    }
    Ok(Angle(wrap_radians(t)))
}

/// Unchecked [`wrap`]. Canonical inputs are returned unchanged, bit for bit.
#[inline]
pub fn wrap_radians(t: f64) -> f64 {
    if is_canonical(t) {
        return t;
    }
    let r = (t + PI).rem_euclid(TAU) - PI;
    // rem_euclid may round up to TAU itself.
    if r >= PI {
        r - TAU
    } else {
        r
    }
}

/// Geodesic (arc-length) distance between two points, in `[0, π]`.
pub fn dist(p: Angle, q: Angle) -> f64 {
    arc_distance(p.0, q.0)
}

/// Geodesic distance between two raw representants.
#[inline]
pub fn arc_distance(p: f64, q: f64) -> f64 {
    wrap_radians(q - p).abs()
}

/// Exponential map at `q` applied to the tangent vector `t`.
pub fn exp_map(q: Angle, t: f64) -> Result<Angle> {
    if !t.is_finite() {
        return Err(Error::invalid(format!("tangent vector {t} is not finite")));
    }
    Ok(Angle(wrap_radians(q.0 + t)))
}

/// The three zero-sum difference filters used by the regularizers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DifferenceFilter {
    /// Forward difference `(-1, 1)`.
    First,
    /// Second difference `(1, -2, 1)`.
    Second,
    /// Mixed second difference `(-1, 1, 1, -1)` over a 2×2 block.
    Mixed,
}

impl DifferenceFilter {
    pub const ALL: [DifferenceFilter; 3] = [Self::First, Self::Second, Self::Mixed];

    pub const fn taps(self) -> &'static [f64] {
        match self {
            Self::First => &[-1.0, 1.0],
            Self::Second => &[1.0, -2.0, 1.0],
            Self::Mixed => &[-1.0, 1.0, 1.0, -1.0],
        }
    }

    pub const fn arity(self) -> usize {
        match self {
            Self::First => 2,
            Self::Second => 3,
            Self::Mixed => 4,
        }
    }

    /// Squared Euclidean norm of the taps.
    pub const fn norm_sq(self) -> f64 {
        match self {
            Self::First => 2.0,
            Self::Second => 6.0,
            Self::Mixed => 4.0,
        }
    }
}

fn check_arity(x: &[f64], w: DifferenceFilter) -> Result<()> {
    if x.len() != w.arity() {
        return Err(Error::invalid(format!(
            "{w:?} filter needs {} values, got {}",
            w.arity(),
            x.len()
        )));
    }
    if let Some(v) = x.iter().find(|v| !v.is_finite()) {
        return Err(Error::invalid(format!("non-finite input {v}")));
    }
    Ok(())
}

#[inline]
pub(crate) fn inner(x: &[f64], w: DifferenceFilter) -> f64 {
    x.iter().zip(w.taps()).map(|(a, b)| a * b).sum()
}

/// `wrap(<x, w>)`, the signed cyclic difference.
pub fn signed_cyclic_diff(x: &[f64], w: DifferenceFilter) -> Result<f64> {
    check_arity(x, w)?;
    Ok(wrap_radians(inner(x, w)))
}

/// Absolute cyclic difference `|wrap(<x, w>)|`, in `[0, π]`.
pub fn abs_cyclic_diff(x: &[f64], w: DifferenceFilter) -> Result<f64> {
    check_arity(x, w)?;
    Ok(wrap_radians(inner(x, w)).abs())
}

/// Reference evaluation of the absolute cyclic difference as the minimum
/// over all base-point shifts `α` of `|<wrap(x + α), w>|`.
///
/// The objective is piecewise constant in `α`; one representative per
/// piece is evaluated. Intended for testing, not for production use.
pub fn oracle_cyclic_diff(x: &[f64], w: DifferenceFilter) -> Result<f64> {
    check_arity(x, w)?;
    // x_j + α crosses an odd multiple of π at α = π - x_j (mod 2π).
    let mut breaks: Vec<f64> = x.iter().map(|&xj| (PI - xj).rem_euclid(TAU)).collect();
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();

    let mut best = f64::INFINITY;
    for (i, &lo) in breaks.iter().enumerate() {
        let hi = if i + 1 < breaks.len() {
            breaks[i + 1]
        } else {
            breaks[0] + TAU
        };
        let alpha = 0.5 * (lo + hi);
        let value: f64 = x
            .iter()
            .zip(w.taps())
            .map(|(&xj, &wj)| wj * wrap_radians(xj + alpha))
            .sum();
        best = best.min(value.abs());
    }
    Ok(best)
}
