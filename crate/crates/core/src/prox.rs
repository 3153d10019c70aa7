//! Closed-form proximal mappings on the circle.
//!
//! [`prox_diff`] is the proximal mapping of `λ·|wrap(<x, w>)|` with respect
//! to `½ Σ d(x_j, f_j)²`; [`prox_data`] that of the quadratic data term
//! `Σ d(g_j, x_j)² + λ d(f_j, x_j)²`.

use std::f64::consts::{PI, TAU};

use crate::circle::{arc_distance, inner, wrap_radians, DifferenceFilter};
use crate::error::{Error, Result};

/// Within this distance of ±π the proximal mapping is two-valued.
pub const ANTIPODAL_TOLERANCE: f64 = 1e-12;

/// Output of [`prox_diff`]. `secondary` is set only in the antipodal case,
/// where both candidates attain the same objective.
#[derive(Clone, Debug, PartialEq)]
pub struct ProxDiffResult {
    pub primary: Vec<f64>,
    pub secondary: Option<Vec<f64>>,
}

impl ProxDiffResult {
    pub fn is_two_valued(&self) -> bool {
        self.secondary.is_some()
    }
}

#[inline]
fn is_antipodal(theta: f64) -> bool {
    theta.abs() >= PI - ANTIPODAL_TOLERANCE
}

/// Signed step `s·m` of the shrinkage; the stencil moves by `-step·w`.
#[inline]
fn shrink_step(x: &[f64], lambda: f64, w: DifferenceFilter) -> (f64, bool) {
    let theta = wrap_radians(inner(x, w));
    let s = if theta < 0.0 { -1.0 } else { 1.0 };
    let m = lambda.min(theta.abs() / w.norm_sq());
    (s * m, is_antipodal(theta))
}

/// In-place [`prox_diff`] keeping the primary candidate. Returns whether the
/// input was antipodal.
#[inline]
pub(crate) fn prox_diff_in_place(x: &mut [f64], lambda: f64, w: DifferenceFilter) -> bool {
    let (step, antipodal) = shrink_step(x, lambda, w);
    if step != 0.0 {
        for (v, t) in x.iter_mut().zip(w.taps()) {
            *v = wrap_radians(*v - step * t);
        }
    }
    antipodal
}

fn check_prox_args(f: &[f64], lambda: f64, w: DifferenceFilter) -> Result<()> {
    if f.len() != w.arity() {
        return Err(Error::invalid(format!(
            "{w:?} filter needs {} values, got {}",
            w.arity(),
            f.len()
        )));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::invalid(format!("lambda must be positive, got {lambda}")));
    }
    if let Some(v) = f.iter().find(|v| !v.is_finite()) {
        return Err(Error::invalid(format!("non-finite input {v}")));
    }
    Ok(())
}

/// Proximal mapping of `lambda · d(·; w)` at `f`.
pub fn prox_diff(f: &[f64], lambda: f64, w: DifferenceFilter) -> Result<ProxDiffResult> {
    check_prox_args(f, lambda, w)?;
    let f: Vec<f64> = f.iter().map(|v| wrap_radians(*v)).collect();
    let (step, antipodal) = shrink_step(&f, lambda, w);
    let moved = |sign: f64| -> Vec<f64> {
        f.iter()
            .zip(w.taps())
            .map(|(v, t)| wrap_radians(v - sign * step * t))
            .collect()
    };
    Ok(ProxDiffResult {
        primary: moved(1.0),
        secondary: antipodal.then(|| moved(-1.0)),
    })
}

/// `½ Σ d(x_j, f_j)² + λ |wrap(<x, w>)|`, the objective minimized by [`prox_diff`].
pub fn prox_objective(x: &[f64], f: &[f64], lambda: f64, w: DifferenceFilter) -> f64 {
    let fidelity: f64 = x
        .iter()
        .zip(f)
        .map(|(a, b)| arc_distance(*a, *b).powi(2))
        .sum();
    0.5 * fidelity + lambda * wrap_radians(inner(x, w)).abs()
}

#[inline]
pub(crate) fn prox_data_scalar(g: f64, f: f64, lambda: f64) -> f64 {
    let diff = g - f;
    let v = if diff.abs() <= PI { 0.0 } else { diff.signum() };
    let t = lambda / (1.0 + lambda);
    wrap_radians((g + lambda * f) / (1.0 + lambda) + t * TAU * v)
}

/// Minimizer of `Σ d(g_j, x_j)² + λ d(f_j, x_j)²`: the point on the shorter
/// arc from `g_j` to `f_j` at fraction `λ/(1+λ)`.
pub fn prox_data(g: &[f64], f: &[f64], lambda: f64) -> Result<Vec<f64>> {
    if g.len() != f.len() {
        return Err(Error::invalid(format!(
            "length mismatch: {} vs {}",
            g.len(),
            f.len()
        )));
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::invalid(format!("lambda must be nonnegative, got {lambda}")));
    }
    if let Some(v) = g.iter().chain(f).find(|v| !v.is_finite()) {
        return Err(Error::invalid(format!("non-finite input {v}")));
    }
    Ok(g.iter()
        .zip(f)
        .map(|(&gj, &fj)| prox_data_scalar(wrap_radians(gj), wrap_radians(fj), lambda))
        .collect())
}

/// Grid-search reference for [`prox_diff`].
///
/// Scans `x = wrap(f - t·w)` for `t` on a grid of spacing `grid_step` over
/// `[-(λ + π), λ + π]` and returns the best sample. Used by tests only.
pub fn oracle_prox_diff(
    f: &[f64],
    lambda: f64,
    w: DifferenceFilter,
    grid_step: f64,
) -> Result<Vec<f64>> {
    check_prox_args(f, lambda, w)?;
    if !(grid_step > 0.0 && grid_step.is_finite()) {
        return Err(Error::invalid(format!("grid step must be positive, got {grid_step}")));
    }
    let f: Vec<f64> = f.iter().map(|v| wrap_radians(*v)).collect();
    let reach = lambda + PI;
    let n = (reach / grid_step).ceil() as i64;
    let mut candidate = vec![0.0; f.len()];
    let mut best = f.clone();
    let mut best_value = prox_objective(&f, &f, lambda, w);
    for i in -n..=n {
        let t = i as f64 * grid_step;
        for ((c, v), tap) in candidate.iter_mut().zip(&f).zip(w.taps()) {
            *c = wrap_radians(v - t * tap);
        }
        let value = prox_objective(&candidate, &f, lambda, w);
        if value < best_value {
            best_value = value;
            best.copy_from_slice(&candidate);
        }
    }
    Ok(best)
}
