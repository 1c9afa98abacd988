//! Optimal perfect amplification of symmetric coherent-state sets.
//!
//! A set of `n` coherent states `|α ω^k⟩` (with `ω = e^{2πi/n}`) is fully
//! described, up to unitaries, by the eigenvalues of its Gram matrix. This
//! crate computes those spectra, derives the best success probability of a
//! probabilistic map `|α ω^k⟩ → |β ω^k⟩` from them, and simulates a
//! linear-optics discriminate-and-reprepare baseline.
//!
//! ```
//! use coherent_amp::transform::{leaky_optimum, upper_bound, AmplificationRequest};
//!
//! let req = AmplificationRequest::new(4, 2.0, 2.3).unwrap();
//! let p_up = upper_bound(&req).unwrap().p_up;
//! let plan = leaky_optimum(&req).unwrap();
//! assert!(plan.p <= p_up);
//! ```

// `!(x > 0.0)` style guards also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod coherent;
pub mod lp;
pub mod optics_sim;
pub mod spectral;
pub mod transform;

pub use coherent::{CoherentError, GramMatrix, Spectrum, SymmetricCoherentSet};
pub use optics_sim::{Detector, Scenario, SimError, SimReport};
pub use spectral::SpectralError;
pub use transform::{AmplificationRequest, TransformError, TransformPlan, UpperBound};
