//! Three-term arithmetic progressions: counting, existence, cap sets,
//! randomized density testing and flower search.

mod capset;
mod count;
mod flower;

use serde::{Deserialize, Serialize};

use crate::vectorspace::{DenseSubset, Point, SpaceDescriptor, SubspaceBasis};

pub use capset::{capset_max, CapsetMethod, CapsetResult, CAPSET_MAX_POINTS};
pub use count::{count_3aps_fourier, count_3aps_naive, density_test, find_nontrivial_3ap, is_3ap_free, DensityTestReport};
pub use flower::{
    build_petal_candidates, flower_find, split_canonical, validate_flower, FlowerCase, FlowerDiagnostics,
    FlowerSearch, FlowerStage, FlowerValidation, PetalCandidates,
};

/// The progression `a, a + d, a + 2d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ApTriple {
    pub a: Point,
    pub d: Point,
}

impl ApTriple {
    pub fn is_trivial(&self) -> bool {
        self.d.0 == 0
    }

    pub fn terms(&self, space: &SpaceDescriptor) -> [Point; 3] {
        let b = space.add(self.a, self.d);
        [self.a, b, space.add(b, self.d)]
    }
}

/// A center coset where one part is regular and dense, together with coset
/// pairs `(x, y)` forming progressions `x, c, y` in `V/H` (so `x + y ≡ 2c`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Flower {
    pub subspace: SubspaceBasis,
    /// The split of `A` the flower was built from.
    pub parts: Vec<DenseSubset>,
    /// `(i0, j0, k0)`: center part, then the two petal parts.
    pub indices: (usize, usize, usize),
    pub center: Point,
    pub petals: Vec<(Point, Point)>,
    pub eps: f64,
    pub alpha: f64,
    pub m: usize,
}

impl Flower {
    pub fn petal_count(&self) -> usize {
        self.petals.len()
    }
}
