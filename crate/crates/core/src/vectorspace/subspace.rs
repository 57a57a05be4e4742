use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::linalg::{nullspace, rref_high_pivot};
use super::space::{Point, SpaceDescriptor};
use super::subset::DenseSubset;
use crate::error::{invalid, Error, Result};

/// A subspace `H ≤ F_p^n` stored by its canonical echelon basis.
///
/// Pivots sit at the highest nonzero coordinate of each row, so reducing a
/// vector against the basis lands on the minimal flat index of its coset.
/// Element enumeration and the dual representative table are derived lazily
/// and cached.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "SubspaceWire", into = "SubspaceWire")]
pub struct SubspaceBasis {
    space: SpaceDescriptor,
    rows: Vec<Vec<u8>>,
    pivots: Vec<usize>,
    row_points: Vec<Point>,
    elements: OnceLock<Vec<Point>>,
    dual_reps: OnceLock<Vec<Point>>,
}

/// Wire form: `{p, n, rows}` with rows given as digit lists.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubspaceWire {
    pub p: u32,
    pub n: u32,
    pub rows: Vec<Vec<u8>>,
}

impl TryFrom<SubspaceWire> for SubspaceBasis {
    type Error = Error;
    fn try_from(w: SubspaceWire) -> Result<Self> {
        let space = SpaceDescriptor::new(w.p, w.n)?;
        let points = w
            .rows
            .iter()
            .map(|r| space.from_digits(r))
            .collect::<Result<Vec<_>>>()?;
        Ok(SubspaceBasis::span(space, &points))
    }
}

impl From<SubspaceBasis> for SubspaceWire {
    fn from(h: SubspaceBasis) -> Self {
        SubspaceWire { p: h.space.p(), n: h.space.n(), rows: h.rows }
    }
}

impl PartialEq for SubspaceBasis {
    fn eq(&self, other: &Self) -> bool {
        self.space == other.space && self.rows == other.rows
    }
}

impl Eq for SubspaceBasis {}

impl SubspaceBasis {
    fn from_rows(space: SpaceDescriptor, rows: Vec<Vec<u8>>) -> Self {
        let (rows, pivots) = rref_high_pivot(rows, space.p(), space.n() as usize);
        let row_points = rows.iter().map(|r| space.pack(r)).collect();
        SubspaceBasis {
            space,
            rows,
            pivots,
            row_points,
            elements: OnceLock::new(),
            dual_reps: OnceLock::new(),
        }
    }

    /// Canonical basis of the span of `vectors` (empty input gives `{0}`).
    pub fn span(space: SpaceDescriptor, vectors: &[Point]) -> Self {
        let rows = vectors.iter().map(|&v| space.digits(v)).collect();
        Self::from_rows(space, rows)
    }

    pub fn checked_span(space: SpaceDescriptor, vectors: &[Point]) -> Result<Self> {
        if let Some(v) = vectors.iter().find(|v| !space.contains(**v)) {
            return invalid(format!("vector {v} is not in {space}"));
        }
        Ok(Self::span(space, vectors))
    }

    pub fn whole(space: SpaceDescriptor) -> Self {
        let n = space.n() as usize;
        let rows = (0..n)
            .map(|i| {
                let mut r = vec![0u8; n];
                r[i] = 1;
                r
            })
            .collect();
        Self::from_rows(space, rows)
    }

    pub fn zero(space: SpaceDescriptor) -> Self {
        Self::from_rows(space, Vec::new())
    }

    #[inline]
    pub fn space(&self) -> &SpaceDescriptor {
        &self.space
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// `|H| = p^dim`.
    #[inline]
    pub fn size(&self) -> usize {
        (self.space.p() as usize).pow(self.dim() as u32)
    }

    /// `|V/H|`.
    #[inline]
    pub fn index(&self) -> usize {
        self.space.size() / self.size()
    }

    pub fn rows(&self) -> &[Vec<u8>] {
        &self.rows
    }

    pub fn row_points(&self) -> &[Point] {
        &self.row_points
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn is_whole(&self) -> bool {
        self.dim() == self.space.n() as usize
    }

    /// Minimal-index element of the coset `x + H`.
    pub fn reduce(&self, x: Point) -> Point {
        let p = self.space.p();
        let mut d = self.space.digits(x);
        for (row, &pc) in self.rows.iter().zip(&self.pivots) {
            let c = d[pc] as u32;
            if c == 0 {
                continue;
            }
            for (di, &ri) in d.iter_mut().zip(row) {
                *di = ((*di as u32 + p * p - c * ri as u32) % p) as u8;
            }
        }
        self.space.pack(&d)
    }

    pub fn contains(&self, x: Point) -> bool {
        self.space.contains(x) && self.reduce(x) == Point::ZERO
    }

    pub fn is_subspace_of(&self, other: &SubspaceBasis) -> bool {
        self.space == other.space && self.row_points.iter().all(|&r| other.contains(r))
    }

    /// Coordinate index of `h ∈ H`: the packed coefficients of `h` in the
    /// basis, `Σ c_k p^k`. The caller must ensure `h ∈ H`.
    pub fn coordinate_index(&self, h: Point) -> usize {
        let p = self.space.p() as usize;
        self.pivots
            .iter()
            .rev()
            .fold(0usize, |acc, &pc| acc * p + self.space.digit(h, pc) as usize)
    }

    /// All elements of `H`, position `c` holding `Σ c_k b_k` for the packed
    /// coefficient index `c`.
    pub fn elements(&self) -> &[Point] {
        self.elements.get_or_init(|| {
            let mut elems = vec![Point::ZERO];
            for &b in &self.row_points {
                let len = elems.len();
                let mut next = Vec::with_capacity(len * self.space.p() as usize);
                next.extend_from_slice(&elems);
                let mut shift = b;
                for _ in 1..self.space.p() {
                    next.extend(elems[..len].iter().map(|&e| self.space.add(e, shift)));
                    shift = self.space.add(shift, b);
                }
                elems = next;
            }
            elems
        })
    }

    /// Membership mask of `H` as a dense subset.
    pub fn to_subset(&self) -> DenseSubset {
        let mut s = DenseSubset::empty(self.space);
        for &h in self.elements() {
            s.insert(h);
        }
        s
    }

    /// `H' = {x ∈ H : <x, ξ> = 0 for every ξ in frequencies}`.
    pub fn annihilator_within(&self, frequencies: &[Point]) -> SubspaceBasis {
        let p = self.space.p();
        let matrix: Vec<Vec<u8>> = frequencies
            .iter()
            .map(|&xi| self.row_points.iter().map(|&b| self.space.pairing(b, xi) as u8).collect())
            .collect();
        let coeffs = nullspace(matrix, p, self.dim());
        let vectors: Vec<Point> = coeffs
            .iter()
            .map(|c| {
                c.iter().zip(&self.row_points).fold(Point::ZERO, |acc, (&ck, &b)| {
                    self.space.lin2(1, acc, ck as u32, b)
                })
            })
            .collect();
        SubspaceBasis::span(self.space, &vectors)
    }

    pub fn checked_annihilator_within(&self, frequencies: &[Point]) -> Result<SubspaceBasis> {
        if let Some(xi) = frequencies.iter().find(|x| !self.space.contains(**x)) {
            return invalid(format!("frequency {xi} is not in {}", self.space));
        }
        Ok(self.annihilator_within(frequencies))
    }

    /// `H^⊥` inside `V`.
    pub fn orthogonal_complement(&self) -> SubspaceBasis {
        SubspaceBasis::whole(self.space).annihilator_within(&self.row_points)
    }

    /// Packed character coordinates `η_k = <b_k, ξ>` of a frequency.
    ///
    /// Two frequencies give the same character of `H` exactly when they agree
    /// modulo `H^⊥`.
    pub fn character_index(&self, xi: Point) -> usize {
        let p = self.space.p() as usize;
        self.row_points
            .iter()
            .rev()
            .fold(0usize, |acc, &b| acc * p + self.space.pairing(b, xi) as usize)
    }

    /// Canonical dual representatives: entry `η` holds the minimal-index
    /// `ξ ∈ V` whose character coordinates are `η`.
    pub fn dual_representatives(&self) -> &[Point] {
        self.dual_reps.get_or_init(|| {
            let perp = self.orthogonal_complement();
            let mut table = vec![Point::ZERO; self.size()];
            for &xi in CosetSystem::new(&perp).reps() {
                table[self.character_index(xi)] = xi;
            }
            table
        })
    }

    pub fn cosets(&self) -> CosetSystem {
        CosetSystem::new(self)
    }
}

/// Canonical coset representatives of `V/H`.
///
/// Representatives are the minimal-index elements of their cosets, listed in
/// ascending order.
#[derive(Debug, Clone)]
pub struct CosetSystem {
    subspace: SubspaceBasis,
    free: Vec<usize>,
    reps: Vec<Point>,
}

impl CosetSystem {
    pub fn new(h: &SubspaceBasis) -> Self {
        let space = h.space;
        let n = space.n() as usize;
        let free: Vec<usize> = (0..n).filter(|c| !h.pivots.contains(c)).collect();
        let weights: Vec<u32> = free.iter().map(|&c| space.p().pow(c as u32)).collect();
        let k = h.index();
        let p = space.p() as usize;
        let reps = (0..k)
            .map(|pos| {
                let mut rem = pos;
                let mut idx = 0u32;
                for &w in &weights {
                    idx += (rem % p) as u32 * w;
                    rem /= p;
                }
                Point(idx)
            })
            .collect();
        CosetSystem { subspace: h.clone(), free, reps }
    }

    pub fn subspace(&self) -> &SubspaceBasis {
        &self.subspace
    }

    pub fn reps(&self) -> &[Point] {
        &self.reps
    }

    /// `K = |V/H|`.
    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    /// Position in [`Self::reps`] of the coset containing `x`.
    pub fn coset_index(&self, x: Point) -> usize {
        let space = self.subspace.space;
        let r = self.subspace.reduce(x);
        let p = space.p() as usize;
        self.free.iter().rev().fold(0usize, |acc, &c| acc * p + space.digit(r, c) as usize)
    }

    pub fn rep_of(&self, x: Point) -> Point {
        self.subspace.reduce(x)
    }

    /// `|A ∩ (rep_i + H)|` for every coset.
    pub fn counts(&self, a: &DenseSubset) -> Vec<usize> {
        let mut counts = vec![0usize; self.len()];
        for x in a.iter() {
            counts[self.coset_index(x)] += 1;
        }
        counts
    }

    /// `|A_H^v|` for every coset representative `v`, via `A_H^v = A ∩ (H - v)`.
    pub fn localized_counts(&self, a: &DenseSubset) -> Vec<usize> {
        let counts = self.counts(a);
        let space = self.subspace.space;
        self.reps.iter().map(|&v| counts[self.coset_index(space.neg(v))]).collect()
    }
}

/// The localisation `A_H^v = (A + v) ∩ H`.
pub fn localize(a: &DenseSubset, h: &SubspaceBasis, v: Point) -> Result<DenseSubset> {
    a.check_space(&h.space)?;
    if !h.space.contains(v) {
        return invalid(format!("shift {v} is not in {}", h.space));
    }
    let mut out = DenseSubset::empty(h.space);
    for &x in h.elements() {
        if a.contains(h.space.sub(x, v)) {
            out.insert(x);
        }
    }
    Ok(out)
}

/// Indicator of `A_H^v` in the coordinate order of `H`.
pub fn localized_values(a: &DenseSubset, h: &SubspaceBasis, v: Point) -> Vec<f64> {
    h.elements()
        .iter()
        .map(|&x| if a.contains(h.space.sub(x, v)) { 1.0 } else { 0.0 })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f32_() -> SpaceDescriptor {
        SpaceDescriptor::new(3, 2).unwrap()
    }

    fn pt(s: &SpaceDescriptor, d: &[u8]) -> Point {
        s.from_digits(d).unwrap()
    }

    fn line(s: &SpaceDescriptor) -> SubspaceBasis {
        SubspaceBasis::span(*s, &[pt(s, &[1, 0])])
    }

    #[test]
    fn rref_examples() {
        let s = f32_();
        let h = SubspaceBasis::span(s, &[pt(&s, &[1, 0]), pt(&s, &[2, 0])]);
        assert_eq!(h.rows(), &[vec![1, 0]]);
        assert_eq!(h.dim(), 1);
        let h = SubspaceBasis::span(s, &[pt(&s, &[1, 1]), pt(&s, &[0, 1])]);
        assert_eq!(h.rows(), &[vec![1, 0], vec![0, 1]]);
        let z = SubspaceBasis::span(s, &[]);
        assert_eq!((z.dim(), z.size()), (0, 1));
        assert!(SubspaceBasis::checked_span(s, &[Point(9)]).is_err());
    }

    #[test]
    fn annihilator_examples() {
        let s = f32_();
        let v = SubspaceBasis::whole(s);
        assert_eq!(v.annihilator_within(&[Point::ZERO]), v);
        let h = v.annihilator_within(&[pt(&s, &[0, 1])]);
        assert_eq!(h, line(&s));
        assert_eq!(h.size(), 3);
        let h2 = line(&s).annihilator_within(&[pt(&s, &[1, 0])]);
        assert_eq!(h2.size(), 1);
    }

    #[test]
    fn coset_examples() {
        let s = f32_();
        assert_eq!(SubspaceBasis::whole(s).cosets().reps(), &[Point::ZERO]);
        let all: Vec<Point> = s.points().collect();
        assert_eq!(SubspaceBasis::zero(s).cosets().reps(), all.as_slice());
        let reps = line(&s).cosets();
        assert_eq!(reps.reps(), &[pt(&s, &[0, 0]), pt(&s, &[0, 1]), pt(&s, &[0, 2])]);
    }

    #[test]
    fn localize_examples() {
        let s = f32_();
        let l = line(&s);
        let full = DenseSubset::full(s);
        assert_eq!(localize(&full, &l, Point(4)).unwrap(), l.to_subset());
        assert!(localize(&DenseSubset::empty(s), &l, Point(4)).unwrap().is_empty());
        let a = l.to_subset();
        assert_eq!(localize(&a, &l, pt(&s, &[0, 1])).unwrap().card(), 0);
        assert_eq!(localize(&a, &l, pt(&s, &[0, 0])).unwrap().card(), 3);
    }

    #[test]
    fn dual_reps_are_canonical() {
        let s = SpaceDescriptor::new(3, 3).unwrap();
        let h = SubspaceBasis::span(s, &[Point(1), Point(3 + 9)]);
        let perp = h.orthogonal_complement();
        let table = h.dual_representatives();
        assert_eq!(table.len(), h.size());
        for (eta, &xi) in table.iter().enumerate() {
            assert_eq!(h.character_index(xi), eta);
            assert_eq!(perp.reduce(xi), xi);
        }
        let v = SubspaceBasis::whole(s);
        let ident: Vec<Point> = s.points().collect();
        assert_eq!(v.dual_representatives(), ident.as_slice());
    }

    fn space_strategy() -> impl Strategy<Value = SpaceDescriptor> {
        (prop::sample::select(vec![3u32, 5, 7]), 1u32..=4)
            .prop_map(|(p, n)| SpaceDescriptor::new(p, n).unwrap())
    }

    fn subspace_strategy() -> impl Strategy<Value = (SpaceDescriptor, Vec<u32>, Vec<u32>)> {
        space_strategy().prop_flat_map(|s| {
            let n = s.size() as u32;
            (Just(s), prop::collection::vec(0..n, 0..4), prop::collection::vec(0..n, 0..4))
        })
    }

    proptest! {
        #[test]
        fn rref_idempotent((s, gens, _) in subspace_strategy()) {
            let pts: Vec<Point> = gens.into_iter().map(Point).collect();
            let h = SubspaceBasis::span(s, &pts);
            let again = SubspaceBasis::span(s, h.row_points());
            prop_assert_eq!(&again, &h);
            prop_assert_eq!(h.elements().len(), h.size());
            for &g in &pts {
                prop_assert!(h.contains(g));
            }
            for (c, &e) in h.elements().iter().enumerate() {
                prop_assert_eq!(h.coordinate_index(e), c);
            }
        }

        #[test]
        fn annihilator_is_exact((s, gens, freqs) in subspace_strategy()) {
            let h = SubspaceBasis::span(s, &gens.into_iter().map(Point).collect::<Vec<_>>());
            let freqs: Vec<Point> = freqs.into_iter().map(Point).collect();
            let hp = h.annihilator_within(&freqs);
            prop_assert!(hp.is_subspace_of(&h));
            let brute: Vec<Point> = h.elements().iter().copied()
                .filter(|&x| freqs.iter().all(|&xi| s.pairing(x, xi) == 0))
                .collect();
            prop_assert_eq!(brute.len(), hp.size());
            prop_assert!(hp.size() * (s.p() as usize).pow(freqs.len() as u32) >= h.size());
        }

        #[test]
        fn cosets_partition_space((s, gens, _) in subspace_strategy(), raw in any::<u32>()) {
            let h = SubspaceBasis::span(s, &gens.into_iter().map(Point).collect::<Vec<_>>());
            let cs = h.cosets();
            prop_assert_eq!(cs.len() * h.size(), s.size());
            let mut seen = vec![0usize; cs.len()];
            for x in s.points() {
                let i = cs.coset_index(x);
                seen[i] += 1;
                prop_assert!(cs.reps()[i] <= x);
                prop_assert!(h.contains(s.sub(x, cs.reps()[i])));
            }
            prop_assert!(seen.iter().all(|&c| c == h.size()));
            let a = DenseSubset::from_predicate(s, |x| (x.0 ^ raw) % 3 == 0);
            let loc = cs.localized_counts(&a);
            prop_assert_eq!(loc.iter().sum::<usize>(), a.card());
            let v = Point(raw % s.size() as u32);
            for &w in h.elements().iter().take(5) {
                let l1 = localize(&a, &h, v).unwrap().card();
                let l2 = localize(&a, &h, s.add(v, w)).unwrap().card();
                prop_assert_eq!(l1, l2);
            }
            prop_assert_eq!(localize(&a, &h, v).unwrap().card(), loc[cs.coset_index(v)]);
        }
    }
}
