//! Variational inpainting and denoising of cyclic (phase-valued) images.
//!
//! Images take values on the unit circle, stored as canonical angles in
//! `[-π, π)`. The regularizers are absolute cyclic first-order, second-order
//! and mixed differences; the functional is split into sub-functionals with
//! pairwise disjoint stencils and minimized by a cyclic proximal point
//! algorithm whose proximal steps are available in closed form.
//!
//! ```
//! use cyclic_inpaint::{synth, init, model::{ModelKind, Weights}, solver};
//!
//! let truth = synth::gen_wrapped_ramp((16, 16), 0.8, synth::RampDirection::Horizontal).unwrap();
//! let mask = synth::mask_band((16, 16), synth::BandOrientation::Vertical, 6, 4).unwrap();
//! let weights = Weights::new([0.0; 4], [1.0, 1.0], 1.0).unwrap();
//! let x0 = init::initialize(&truth, &mask, &weights).unwrap();
//! let config = solver::SolverConfig { max_sweeps: 20, ..Default::default() };
//! let report = solver::run_cppa(&x0, &truth, &mask, &weights, ModelKind::Noiseless, &config).unwrap();
//! let (_, max_err) = synth::cyclic_error(&report.image, &truth).unwrap();
//! assert!(max_err < 1e-6);
//! ```

pub mod circle;
pub mod error;
pub mod image;
pub mod init;
pub mod io;
pub mod model;
pub mod prox;
pub mod solver;
pub mod synth;

pub use circle::{Angle, DifferenceFilter};
pub use error::{Error, Result};
pub use image::{Mask, PhaseImage};
pub use model::{ModelKind, SubFunctional, Weights};
pub use solver::{SolverConfig, SolverReport};
