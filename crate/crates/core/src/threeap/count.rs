use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use super::ApTriple;
use crate::error::{invalid, Result};
use crate::fourier::{dft_values, Spectrum};
use crate::rng::substream;
use crate::vectorspace::{DenseSubset, SubspaceBasis};

/// Ordered pairs `(a, d)` with `a, a + d, a + 2d ∈ A`, enumerated as pairs
/// of endpoints `(a, c)` whose midpoint lies in `A`.
pub fn count_3aps_naive(a: &DenseSubset, include_trivial: bool) -> u64 {
    let s = *a.space();
    let i2 = s.inv2();
    let members = a.to_vec();
    let mut count = 0u64;
    for &x in &members {
        for &z in &members {
            if x != z && a.contains(s.lin2(i2, x, i2, z)) {
                count += 1;
            }
        }
    }
    if include_trivial {
        count + members.len() as u64
    } else {
        count
    }
}

/// `N² Σ_ξ Â(-ξ)² Â(2ξ)`, rounded; includes the `|A|` trivial pairs.
pub fn count_3aps_fourier(a: &DenseSubset) -> u64 {
    let s = *a.space();
    let v = SubspaceBasis::whole(s);
    let spectrum = Spectrum::new(v.clone(), dft_values(&a.indicator(), &v)).expect("full-space table");
    let total: f64 = s
        .points()
        .map(|xi| {
            let m = spectrum.at(s.neg(xi));
            (m * m * spectrum.at(s.scale(2, xi))).re
        })
        .sum();
    let n = s.size() as f64;
    (total * n * n).round().max(0.0) as u64
}

/// The first nontrivial progression in `(a, d)` order: `a` ascending, then
/// `d` ascending.
pub fn find_nontrivial_3ap(a: &DenseSubset) -> Option<ApTriple> {
    let s = *a.space();
    let i2 = s.inv2();
    let members = a.to_vec();
    for &x in &members {
        let best = members
            .iter()
            .filter(|&&z| z != x && a.contains(s.lin2(i2, x, i2, z)))
            .map(|&z| s.scale(i2, s.sub(z, x)))
            .min();
        if let Some(d) = best {
            return Some(ApTriple { a: x, d });
        }
    }
    None
}

pub fn is_3ap_free(a: &DenseSubset) -> bool {
    find_nontrivial_3ap(a).is_none()
}

/// Randomized refutation search for `(α, 3AP)`-density.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityTestReport {
    pub alpha: f64,
    /// `⌈α |R|⌉`.
    pub subset_size: usize,
    pub trials: usize,
    pub failures: usize,
    pub frequency: f64,
    /// Up to [`DensityTestReport::MAX_WITNESSES`] 3AP-free subsets, in trial order.
    pub witnesses: Vec<DenseSubset>,
}

impl DensityTestReport {
    pub const MAX_WITNESSES: usize = 10;
}

/// `⌈x⌉` tolerant to representation error just above an integer.
pub(crate) fn ceil_tol(x: f64) -> usize {
    (x - 1e-9).ceil().max(0.0) as usize
}

/// Samples `trials` uniform `⌈α|R|⌉`-subsets of `R` and reports how many
/// contain no nontrivial progression.
pub fn density_test(r: &DenseSubset, alpha: f64, trials: usize, seed: u64) -> Result<DensityTestReport> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return invalid(format!("alpha = {alpha} must lie in (0, 1]"));
    }
    let k = ceil_tol(alpha * r.card() as f64);
    if k > r.card() {
        return invalid(format!("subset size {k} exceeds |R| = {}", r.card()));
    }
    let members = r.to_vec();
    let mut failures = 0;
    let mut witnesses = Vec::new();
    for t in 0..trials {
        let mut rng = substream(seed, t as u64);
        let pick = sample(&mut rng, members.len(), k);
        let sub = DenseSubset::from_points(*r.space(), pick.iter().map(|i| members[i]))?;
        if is_3ap_free(&sub) {
            failures += 1;
            if witnesses.len() < DensityTestReport::MAX_WITNESSES {
                witnesses.push(sub);
            }
        }
    }
    Ok(DensityTestReport {
        alpha,
        subset_size: k,
        trials,
        failures,
        frequency: if trials == 0 { 0.0 } else { failures as f64 / trials as f64 },
        witnesses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vectorspace::{Point, SpaceDescriptor};
    use proptest::prelude::*;

    fn brute(a: &DenseSubset) -> u64 {
        let s = *a.space();
        let mut c = 0;
        for x in s.points() {
            for d in s.points() {
                let y = s.add(x, d);
                if a.contains(x) && a.contains(y) && a.contains(s.add(y, d)) {
                    c += 1;
                }
            }
        }
        c
    }

    #[test]
    fn counting_examples() {
        let s = SpaceDescriptor::new(3, 2).unwrap();
        let v = DenseSubset::full(s);
        assert_eq!(count_3aps_naive(&v, true), 81);
        assert_eq!(count_3aps_naive(&v, false), 72);
        assert_eq!(count_3aps_fourier(&v), 81);
        let cap = DenseSubset::from_indices(s, [0, 3, 1, 4]).unwrap();
        assert_eq!(count_3aps_naive(&cap, false), 0);
        assert!(find_nontrivial_3ap(&cap).is_none());
        let line = DenseSubset::from_indices(s, [0, 1, 2]).unwrap();
        assert_eq!(count_3aps_naive(&line, true), 9);
        assert_eq!(count_3aps_fourier(&line), 9);
        let s1 = SpaceDescriptor::new(3, 1).unwrap();
        assert_eq!(count_3aps_naive(&DenseSubset::from_indices(s1, [0, 1]).unwrap(), false), 0);
        assert_eq!(find_nontrivial_3ap(&DenseSubset::full(s1)), Some(ApTriple { a: Point(0), d: Point(1) }));
        assert!(find_nontrivial_3ap(&DenseSubset::empty(s)).is_none());
    }

    #[test]
    fn exhaustive_f3_squared() {
        let s = SpaceDescriptor::new(3, 2).unwrap();
        for mask in 0u32..512 {
            let a = DenseSubset::from_predicate(s, |x| mask >> x.0 & 1 == 1);
            let naive = count_3aps_naive(&a, true);
            assert_eq!(naive, brute(&a));
            assert_eq!(count_3aps_fourier(&a), naive);
            assert_eq!(find_nontrivial_3ap(&a).is_none(), naive == a.card() as u64);
        }
    }

    #[test]
    fn find_matches_scan_order() {
        let s = SpaceDescriptor::new(5, 2).unwrap();
        let a = DenseSubset::from_indices(s, [1, 3, 7, 13, 19, 24]).unwrap();
        let mut expected = None;
        'outer: for x in a.iter() {
            for d in s.points().skip(1) {
                let y = s.add(x, d);
                if a.contains(y) && a.contains(s.add(y, d)) {
                    expected = Some(ApTriple { a: x, d });
                    break 'outer;
                }
            }
        }
        assert_eq!(find_nontrivial_3ap(&a), expected);
    }

    #[test]
    fn density_examples() {
        let s = SpaceDescriptor::new(3, 2).unwrap();
        let r = density_test(&DenseSubset::full(s), 1.0, 5, 1).unwrap();
        assert_eq!(r.failures, 0);
        let cap = DenseSubset::from_indices(s, [0, 1, 3, 4]).unwrap();
        let r = density_test(&cap, 1.0, 5, 1).unwrap();
        assert_eq!(r.frequency, 1.0);
        assert_eq!(r.witnesses[0], cap);
        assert!(density_test(&cap, 0.0, 5, 1).is_err());
        assert_eq!(density_test(&cap, 0.5, 3, 9).unwrap(), density_test(&cap, 0.5, 3, 9).unwrap());
    }

    proptest! {
        #[test]
        fn fourier_matches_naive_f3_4(bits in proptest::collection::vec(any::<bool>(), 81)) {
            let s = SpaceDescriptor::new(3, 4).unwrap();
            let a = DenseSubset::from_predicate(s, |x| bits[x.index()]);
            prop_assert_eq!(count_3aps_fourier(&a), count_3aps_naive(&a, true));
        }

        #[test]
        fn count_is_monotone(bits in proptest::collection::vec(any::<bool>(), 25), extra in 0u64..25) {
            let s = SpaceDescriptor::new(5, 2).unwrap();
            let a = DenseSubset::from_predicate(s, |x| bits[x.index()]);
            let mut b = a.clone();
            b.insert(Point(extra as u32));
            prop_assert!(count_3aps_naive(&b, false) >= count_3aps_naive(&a, false));
        }
    }
}
