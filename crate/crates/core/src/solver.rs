//! Cyclic proximal point algorithm.
//!
//! One sweep applies the proximal mapping of `λ_k J_l` for every
//! sub-functional `J_l` in cycle order, with `λ_k = λ₀ / (k + 1)`. Stencils
//! within a sub-functional are disjoint, so their proximal steps are
//! independent and may run concurrently. In the noiseless model known
//! pixels are reset to the data after every sub-functional.

use std::f64::consts::FRAC_PI_2;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::image::{Mask, PhaseImage};
use crate::model::{self, enumerate_stencils, ModelKind, SubFunctional, Weights, DATA_LABEL, REGULARIZER_GROUPS};
use crate::prox::{prox_data_scalar, prox_diff_in_place};

/// Sub-functionals with fewer stencils than this are processed serially.
const PARALLEL_THRESHOLD: usize = 2048;

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    /// Initial step `λ₀`.
    pub lambda0: f64,
    /// Number of sweeps `k_max`.
    pub max_sweeps: usize,
    /// Cycle order as a permutation of the labels `1..=18` (`1..=19` for the
    /// noisy model). `None` means ascending.
    pub order: Option<Vec<usize>>,
    /// Record the energy after every this many sweeps; 0 records only the
    /// initial and final energy.
    pub record_energy_every: usize,
    /// Spread large sub-functionals over the rayon thread pool. Results are
    /// identical either way.
    pub parallel: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            lambda0: FRAC_PI_2,
            max_sweeps: 700,
            order: None,
            record_energy_every: 1,
            parallel: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self, kind: ModelKind) -> Result<()> {
        if !(self.lambda0 > 0.0 && self.lambda0.is_finite()) {
            return Err(Error::invalid(format!("lambda0 must be positive, got {}", self.lambda0)));
        }
        if self.max_sweeps == 0 {
            return Err(Error::invalid("max_sweeps must be at least 1"));
        }
        if let Some(order) = &self.order {
            let n = match kind {
                ModelKind::Noiseless => REGULARIZER_GROUPS,
                ModelKind::Noisy => DATA_LABEL,
            };
            let mut sorted = order.clone();
            sorted.sort_unstable();
            if sorted != (1..=n).collect::<Vec<_>>() {
                return Err(Error::invalid(format!("cycle order must be a permutation of 1..={n}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct SolverReport {
    pub image: PhaseImage,
    /// `(sweeps completed, energy)`; the first entry is the starting point.
    pub energy_trace: Vec<(usize, f64)>,
    pub sweeps: usize,
    pub elapsed: Duration,
}

/// Step size of sweep `k` (0-based): `λ₀ / (k + 1)`.
///
/// The sequence is not summable while its squares are.
pub fn lambda_schedule(k: usize, lambda0: f64) -> f64 {
    lambda0 / (k as f64 + 1.0)
}

/// Applies the proximal mapping of `lambda · J` to `x` for a regularizer
/// sub-functional `J`. Known pixels of `mask` are left untouched when
/// `project` is set. Returns `false` if a non-finite value was produced.
pub fn apply_regularizer(
    x: &mut [f64],
    sub: &SubFunctional,
    lambda: f64,
    mask: &Mask,
    project: bool,
    parallel: bool,
) -> bool {
    let Some(filter) = sub.filter() else {
        return true;
    };
    let arity = filter.arity();
    let step = lambda * sub.weight();
    let pixels = sub.pixels();
    let known = mask.as_slice();
    let writable = |i: usize| !(project && known[i]);

    if parallel && sub.num_stencils() >= PARALLEL_THRESHOLD {
        let xs: &[f64] = x;
        let updated: Vec<[f64; 4]> = pixels
            .par_chunks_exact(arity)
            .map(|st| {
                let mut buf = [0.0; 4];
                for (b, &i) in buf.iter_mut().zip(st) {
                    *b = xs[i];
                }
                prox_diff_in_place(&mut buf[..arity], step, filter);
                buf
            })
            .collect();
        let mut finite = true;
        for (st, buf) in pixels.chunks_exact(arity).zip(&updated) {
            for (&i, &v) in st.iter().zip(buf) {
                if writable(i) {
                    finite &= v.is_finite();
                    x[i] = v;
                }
            }
        }
        finite
    } else {
        let mut finite = true;
        let mut buf = [0.0; 4];
        for st in pixels.chunks_exact(arity) {
            for (b, &i) in buf.iter_mut().zip(st) {
                *b = x[i];
            }
            prox_diff_in_place(&mut buf[..arity], step, filter);
            for (&i, &v) in st.iter().zip(&buf) {
                if writable(i) {
                    finite &= v.is_finite();
                    x[i] = v;
                }
            }
        }
        finite
    }
}

/// Proximal step of `lambda · Σ_{known} d(x, f)²` applied to `x`.
fn apply_data_term(x: &mut [f64], f: &[f64], mask: &Mask, lambda: f64) -> bool {
    // prox_data minimizes d(g,x)² + μ d(f,x)²; the proximal objective is
    // ½ d(g,x)² + λ d(f,x)², hence μ = 2λ.
    let mu = 2.0 * lambda;
    let mut finite = true;
    for ((xi, &fi), &known) in x.iter_mut().zip(f).zip(mask.as_slice()) {
        if known {
            *xi = prox_data_scalar(*xi, fi, mu);
            finite &= xi.is_finite();
        }
    }
    finite
}

/// Runs the cyclic proximal point algorithm from `x0`.
///
/// For the noiseless model `x0` must agree with `f` on known pixels, as
/// produced by [`crate::init::initialize`].
pub fn run_cppa(
    x0: &PhaseImage,
    f: &PhaseImage,
    mask: &Mask,
    weights: &Weights,
    kind: ModelKind,
    config: &SolverConfig,
) -> Result<SolverReport> {
    let groups = enumerate_stencils(x0.shape(), mask, weights, kind)?;
    run_cppa_with(x0, f, mask, &groups, kind, config)
}

/// [`run_cppa`] on an explicit splitting.
pub fn run_cppa_with(
    x0: &PhaseImage,
    f: &PhaseImage,
    mask: &Mask,
    groups: &[SubFunctional],
    kind: ModelKind,
    config: &SolverConfig,
) -> Result<SolverReport> {
    let start = Instant::now();
    config.validate(kind)?;
    let shape = x0.shape();
    f.ensure_shape(shape)?;
    mask.ensure_shape(shape)?;
    if kind == ModelKind::Noiseless {
        model::check_constraint(x0, f, mask)?;
    }

    let cycle: Vec<&SubFunctional> = match &config.order {
        None => groups.iter().collect(),
        Some(order) => order
            .iter()
            .filter_map(|l| groups.iter().find(|g| g.label() == *l))
            .collect(),
    };

    let fdata = f.as_slice();
    let mut x = x0.as_slice().to_vec();
    let project = kind == ModelKind::Noiseless;
    let mut trace = vec![(0, model::energy_of(groups, &x, fdata, mask))];

    for k in 0..config.max_sweeps {
        let lambda = lambda_schedule(k, config.lambda0);
        for sub in &cycle {
            let finite = if sub.is_data_term() {
                apply_data_term(&mut x, fdata, mask, lambda)
            } else {
                apply_regularizer(&mut x, sub, lambda, mask, project, config.parallel)
            };
            if !finite {
                return Err(Error::Numerical {
                    sweep: k,
                    label: sub.label(),
                });
            }
        }
        let done = k + 1;
        let due = config.record_energy_every > 0 && done % config.record_energy_every == 0;
        if due || done == config.max_sweeps {
            trace.push((done, model::energy_of(groups, &x, fdata, mask)));
        }
    }

    Ok(SolverReport {
        image: PhaseImage::from_raw(shape.0, shape.1, x),
        energy_trace: trace,
        sweeps: config.max_sweeps,
        elapsed: start.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::energy;
    use std::f64::consts::PI;

    #[test]
    fn schedule_values() {
        let l0 = PI / 2.0;
        assert_eq!(lambda_schedule(0, l0), PI / 2.0);
        assert_eq!(lambda_schedule(1, l0), PI / 4.0);
        assert_eq!(lambda_schedule(2, l0), PI / 6.0);
    }

    #[test]
    fn schedule_sum_conditions() {
        let l0 = PI / 2.0;
        let k_max = 1_000_000;
        let (mut sum, mut sum_sq) = (0.0, 0.0);
        for k in 0..k_max {
            let l = lambda_schedule(k, l0);
            sum += l;
            sum_sq += l * l;
        }
        assert!(sum_sq <= l0 * l0 * PI * PI / 6.0);
        assert!(sum >= l0 * ((k_max + 1) as f64).ln());
    }

    #[test]
    fn config_validation() {
        let mut c = SolverConfig { lambda0: 0.0, ..Default::default() };
        assert!(c.validate(ModelKind::Noiseless).is_err());
        c.lambda0 = 1.0;
        c.max_sweeps = 0;
        assert!(c.validate(ModelKind::Noiseless).is_err());
        c.max_sweeps = 3;
        c.order = Some((1..=18).rev().collect());
        assert!(c.validate(ModelKind::Noiseless).is_ok());
        assert!(c.validate(ModelKind::Noisy).is_err());
        c.order = Some(vec![1, 1, 2]);
        assert!(c.validate(ModelKind::Noiseless).is_err());
    }

    #[test]
    fn empty_region_is_a_fixed_point() {
        let f = PhaseImage::from_fn(5, 5, |r, c| r as f64 * 1.3 - c as f64).unwrap();
        let mask = Mask::all_known(5, 5).unwrap();
        let w = Weights::new([1.0; 4], [1.0; 2], 1.0).unwrap();
        let cfg = SolverConfig { max_sweeps: 10, ..Default::default() };
        let r = run_cppa(&f, &f, &mask, &w, ModelKind::Noiseless, &cfg).unwrap();
        assert_eq!(r.image, f);
        assert_eq!(r.energy_trace.len(), 11);
    }

    #[test]
    fn single_unknown_between_two_values_reaches_a_minimizer() {
        // Any value in [0, 1] minimizes d(0, x) + d(x, 1); the iteration must land there.
        let f = PhaseImage::new(1, 3, vec![0.0, 0.0, 1.0]).unwrap();
        let mask = Mask::new(1, 3, vec![true, false, true]).unwrap();
        let w = Weights::new([1.0, 0.0, 0.0, 0.0], [0.0; 2], 0.0).unwrap();
        let x0 = crate::init::initialize(&f, &mask, &w).unwrap();
        let cfg = SolverConfig { max_sweeps: 2000, ..Default::default() };
        let r = run_cppa(&x0, &f, &mask, &w, ModelKind::Noiseless, &cfg).unwrap();
        let centre = r.image.get(0, 1);
        assert!((0.0..=1.0).contains(&centre), "{centre}");
        let e = energy(&r.image, &f, &mask, &w, ModelKind::Noiseless).unwrap();
        assert!((e - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_unprojected_start() {
        let f = PhaseImage::constant(3, 3, 0.0).unwrap();
        let x0 = PhaseImage::constant(3, 3, 0.5).unwrap();
        let mask = Mask::from_fn(3, 3, |r, _| r == 0).unwrap();
        let w = Weights::new([1.0; 4], [0.0; 2], 0.0).unwrap();
        let cfg = SolverConfig::default();
        assert!(run_cppa(&x0, &f, &mask, &w, ModelKind::Noiseless, &cfg).is_err());
        assert!(run_cppa(&x0, &f, &mask, &w, ModelKind::Noisy, &SolverConfig { max_sweeps: 2, ..cfg }).is_ok());
    }

    #[test]
    fn noisy_model_pulls_towards_data() {
        let f = PhaseImage::new(1, 2, vec![0.0, 1.0]).unwrap();
        let mask = Mask::all_known(1, 2).unwrap();
        let w = Weights::new([0.1, 0.0, 0.0, 0.0], [0.0; 2], 0.0).unwrap();
        let cfg = SolverConfig { max_sweeps: 500, ..Default::default() };
        let r = run_cppa(&f, &f, &mask, &w, ModelKind::Noisy, &cfg).unwrap();
        // minimizer of d(x0,0)² + d(x1,1)² + 0.1 |x1 - x0|: shrink the gap by 0.1 in total
        assert!((r.image.get(0, 0) - 0.05).abs() < 1e-2, "{:?}", r.image);
        assert!((r.image.get(0, 1) - 0.95).abs() < 1e-2, "{:?}", r.image);
        let (_, first) = r.energy_trace[0];
        let (_, last) = *r.energy_trace.last().unwrap();
        assert!(last < first);
    }
}
