//! Exact arithmetic in `V = F_p^n`.

mod linalg;
mod space;
mod subset;
mod subspace;

pub use space::{Point, SpaceDescriptor, MAX_DIM, MAX_POINTS, MAX_PRIME};
pub use subset::{DenseSubset, SubsetWire};
pub use subspace::{localize, localized_values, CosetSystem, SubspaceBasis, SubspaceWire};
