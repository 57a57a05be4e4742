//! Exact Fourier analysis and regularity machinery for subsets of `F_p^n`.
//!
//! The crate is organised bottom-up:
//!
//! * [`vectorspace`]: the ambient group, points, dense subsets, subspaces
//!   in canonical echelon form, cosets and localisation `(A + v) ∩ H`.
//! * [`fourier`]: transforms relative to an arbitrary subspace, inversion,
//!   convolution and a numerical check of the classical identities.
//! * [`cayley`]: edge counts in Cayley graphs `G_A`, relative pair
//!   densities, σ-regularity certificates, sparseness probes and the
//!   midpoint ("petal") graphs.
//! * [`regularity`]: ε-regular vectors and subspaces, the energy
//!   `d(A, H)`, the refinement step and the full energy-increment iteration.
//! * [`threeap`]: three-term progression counting, cap-set oracle,
//!   density refutation search and flower construction.
//! * [`randmodel`]: random set models, tail bounds and Monte Carlo
//!   experiments.

pub mod cayley;
pub mod error;
pub mod fourier;
pub mod randmodel;
pub mod regularity;
pub mod rng;
pub mod threeap;
pub mod vectorspace;

pub use error::{Error, Result};

/// Library version echoed in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub use fourier::{DenseFunction, Spectrum};
pub use regularity::{RegularityReport, StopReason, TowerValue, VectorClassification};
pub use threeap::{ApTriple, Flower};
pub use vectorspace::{CosetSystem, DenseSubset, Point, SpaceDescriptor, SubspaceBasis};
