use serde::{Deserialize, Serialize};

use super::space::{Point, SpaceDescriptor};
use crate::error::{invalid, Error, Result};

/// A subset of `F_p^n` held as a bit mask with its cardinality cached.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "SubsetWire", into = "SubsetWire")]
pub struct DenseSubset {
    space: SpaceDescriptor,
    words: Vec<u64>,
    card: usize,
}

/// Wire form: `{p, n, members}` with `members` sorted ascending.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubsetWire {
    pub p: u32,
    pub n: u32,
    pub members: Vec<u64>,
}

impl TryFrom<SubsetWire> for DenseSubset {
    type Error = Error;
    fn try_from(w: SubsetWire) -> Result<Self> {
        let space = SpaceDescriptor::new(w.p, w.n)?;
        DenseSubset::from_indices(space, w.members)
    }
}

impl From<DenseSubset> for SubsetWire {
    fn from(s: DenseSubset) -> Self {
        SubsetWire {
            p: s.space.p(),
            n: s.space.n(),
            members: s.iter().map(|x| x.0 as u64).collect(),
        }
    }
}

impl DenseSubset {
    pub fn empty(space: SpaceDescriptor) -> Self {
        DenseSubset { space, words: vec![0; space.size().div_ceil(64)], card: 0 }
    }

    pub fn full(space: SpaceDescriptor) -> Self {
        let mut s = Self::empty(space);
        for x in space.points() {
            s.insert(x);
        }
        s
    }

    /// Builds a subset from raw indices; duplicates are merged.
    pub fn from_indices(space: SpaceDescriptor, indices: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut s = Self::empty(space);
        for i in indices {
            let x = space.point(i)?;
            s.insert(x);
        }
        Ok(s)
    }

    pub fn from_points(space: SpaceDescriptor, points: impl IntoIterator<Item = Point>) -> Result<Self> {
        Self::from_indices(space, points.into_iter().map(|x| x.0 as u64))
    }

    pub fn from_predicate(space: SpaceDescriptor, mut pred: impl FnMut(Point) -> bool) -> Self {
        let mut s = Self::empty(space);
        for x in space.points() {
            if pred(x) {
                s.insert(x);
            }
        }
        s
    }

    #[inline]
    pub fn space(&self) -> &SpaceDescriptor {
        &self.space
    }

    #[inline]
    pub fn card(&self) -> usize {
        self.card
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.card == 0
    }

    #[inline]
    pub fn contains(&self, x: Point) -> bool {
        let i = x.index();
        i < self.space.size() && (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    /// Inserts `x`, returning whether it was newly added.
    pub fn insert(&mut self, x: Point) -> bool {
        let i = x.index();
        debug_assert!(i < self.space.size());
        let mask = 1u64 << (i % 64);
        if self.words[i / 64] & mask != 0 {
            return false;
        }
        self.words[i / 64] |= mask;
        self.card += 1;
        true
    }

    pub fn remove(&mut self, x: Point) -> bool {
        let i = x.index();
        let mask = 1u64 << (i % 64);
        if i >= self.space.size() || self.words[i / 64] & mask == 0 {
            return false;
        }
        self.words[i / 64] &= !mask;
        self.card -= 1;
        true
    }

    /// Members in ascending index order.
    pub fn iter(&self) -> impl Iterator<Item = Point> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &word)| {
            let mut bits = word;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let t = bits.trailing_zeros();
                bits &= bits - 1;
                Some(Point((w * 64) as u32 + t))
            })
        })
    }

    pub fn to_vec(&self) -> Vec<Point> {
        self.iter().collect()
    }

    /// Indicator values `1_A(x)` over all of `V`.
    pub fn indicator(&self) -> Vec<f64> {
        self.space.points().map(|x| if self.contains(x) { 1.0 } else { 0.0 }).collect()
    }

    fn zip_words(&self, other: &Self, f: impl Fn(u64, u64) -> u64) -> Result<Self> {
        self.space.ensure_same(&other.space)?;
        let words: Vec<u64> = self.words.iter().zip(&other.words).map(|(&a, &b)| f(a, b)).collect();
        let card = words.iter().map(|w| w.count_ones() as usize).sum();
        Ok(DenseSubset { space: self.space, words, card })
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        self.zip_words(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &Self) -> Result<Self> {
        self.zip_words(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &Self) -> Result<Self> {
        self.zip_words(other, |a, b| a & !b)
    }

    pub fn is_disjoint(&self, other: &Self) -> Result<bool> {
        self.space.ensure_same(&other.space)?;
        Ok(self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0))
    }

    pub fn is_subset_of(&self, other: &Self) -> Result<bool> {
        self.space.ensure_same(&other.space)?;
        Ok(self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0))
    }

    /// The translate `A + v`.
    pub fn translate(&self, v: Point) -> Self {
        let mut out = Self::empty(self.space);
        for a in self.iter() {
            out.insert(self.space.add(a, v));
        }
        out
    }

    pub(crate) fn check_space(&self, space: &SpaceDescriptor) -> Result<()> {
        if &self.space == space {
            Ok(())
        } else {
            invalid(format!("set lives in {} but {} was expected", self.space, space))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn card_tracks_mask() {
        let s = SpaceDescriptor::new(3, 3).unwrap();
        let mut a = DenseSubset::from_indices(s, [0, 5, 5, 26]).unwrap();
        assert_eq!(a.card(), 3);
        assert!(a.insert(Point(7)));
        assert!(!a.insert(Point(7)));
        assert!(a.remove(Point(0)));
        assert_eq!(a.to_vec(), vec![Point(5), Point(7), Point(26)]);
        assert_eq!(a.card(), a.iter().count());
        assert!(DenseSubset::from_indices(s, [27]).is_err());
    }

    #[test]
    fn wire_round_trip_sorted() {
        let s = SpaceDescriptor::new(5, 2).unwrap();
        let a = DenseSubset::from_indices(s, [17, 3, 9]).unwrap();
        let json = serde_json::to_string(&a).unwrap();
        assert_eq!(json, r#"{"p":5,"n":2,"members":[3,9,17]}"#);
        let back: DenseSubset = serde_json::from_str(&json).unwrap();
        assert_eq!(back, a);
        assert!(serde_json::from_str::<DenseSubset>(r#"{"p":5,"n":2,"members":[25]}"#).is_err());
        assert!(serde_json::from_str::<DenseSubset>(r#"{"p":4,"n":2,"members":[]}"#).is_err());
    }

    #[test]
    fn set_algebra_checks_space() {
        let s = SpaceDescriptor::new(3, 2).unwrap();
        let t = SpaceDescriptor::new(3, 3).unwrap();
        let a = DenseSubset::full(s);
        assert!(a.union(&DenseSubset::empty(t)).is_err());
        let b = DenseSubset::from_indices(s, [1, 2]).unwrap();
        assert_eq!(a.difference(&b).unwrap().card(), 7);
        assert!(b.is_subset_of(&a).unwrap());
        assert!(!b.is_disjoint(&a).unwrap());
    }
}
