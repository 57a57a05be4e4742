use serde::{Deserialize, Serialize};

use super::count::is_3ap_free;
use crate::error::{Error, Result};
use crate::vectorspace::{DenseSubset, Point, SpaceDescriptor};

/// Largest space the oracle accepts.
pub const CAPSET_MAX_POINTS: usize = 27;

const EXHAUSTIVE_MAX_POINTS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CapsetMethod {
    Exhaustive,
    Backtracking,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapsetResult {
    pub size: usize,
    /// The lexicographically smallest maximum 3AP-free set.
    pub witness: DenseSubset,
    pub method: CapsetMethod,
}

/// Maximum size of a 3AP-free subset of `F_p^n`: all subsets when
/// `N ≤ 12`, otherwise branch and bound up to `N = 27`.
pub fn capset_max(p: u32, n: u32) -> Result<CapsetResult> {
    let s = SpaceDescriptor::new(p, n)?;
    let size = s.size();
    if size > CAPSET_MAX_POINTS {
        return Err(Error::CapExceeded(format!(
            "cap-set oracle is limited to N <= {CAPSET_MAX_POINTS}, got N = {size}"
        )));
    }
    let (mask, method) = if size <= EXHAUSTIVE_MAX_POINTS {
        (exhaustive(&s), CapsetMethod::Exhaustive)
    } else {
        (backtrack(&s), CapsetMethod::Backtracking)
    };
    let witness = DenseSubset::from_predicate(s, |x| mask >> x.0 & 1 == 1);
    Ok(CapsetResult { size: witness.card(), witness, method })
}

fn members(mask: u32) -> impl Iterator<Item = u32> {
    (0..32).filter(move |i| mask >> i & 1 == 1)
}

fn lex_less(a: u32, b: u32) -> bool {
    members(a).lt(members(b))
}

fn exhaustive(s: &SpaceDescriptor) -> u32 {
    let mut best = 0u32;
    for mask in 0u32..(1 << s.size()) {
        let (c, b) = (mask.count_ones(), best.count_ones());
        if c < b || (c == b && !lex_less(mask, best)) {
            continue;
        }
        if is_3ap_free(&DenseSubset::from_predicate(*s, |x| mask >> x.0 & 1 == 1)) {
            best = mask;
        }
    }
    best
}

/// Include-first search in ascending point order, so the first maximum found
/// is lexicographically smallest. Every 3AP-free set of size ≥ 2 is an affine
/// image of one containing `{0, 1}`, which fixes the first two choices.
fn backtrack(s: &SpaceDescriptor) -> u32 {
    let size = s.size();
    let i2 = s.inv2();
    // completions[x][y]: points that would form a progression with x and y
    let mut completions = vec![vec![0u32; size]; size];
    for x in 0..size {
        for y in 0..size {
            if x != y {
                let (px, py) = (Point(x as u32), Point(y as u32));
                for z in [s.lin2(2, px, s.p() - 1, py), s.lin2(2, py, s.p() - 1, px), s.lin2(i2, px, i2, py)] {
                    completions[x][y] |= 1 << z.0;
                }
            }
        }
    }
    let all = if size == 32 { u32::MAX } else { (1u32 << size) - 1 };
    let mut state = Search { completions, best: 0b11 };
    let allowed = all & !0b11 & !state.completions[0][1];
    state.run(&[0, 1], allowed);
    state.best
}

struct Search {
    completions: Vec<Vec<u32>>,
    best: u32,
}

impl Search {
    fn run(&mut self, chosen: &[usize], mut allowed: u32) {
        let mask: u32 = chosen.iter().map(|&c| 1u32 << c).sum();
        if chosen.len() > self.best.count_ones() as usize {
            self.best = mask;
        }
        while allowed != 0 {
            if chosen.len() + allowed.count_ones() as usize <= self.best.count_ones() as usize {
                return;
            }
            let z = allowed.trailing_zeros() as usize;
            allowed &= !(1 << z);
            let forbid = chosen.iter().fold(0u32, |acc, &x| acc | self.completions[x][z]);
            let mut next = chosen.to_vec();
            next.push(z);
            self.run(&next, allowed & !forbid);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::threeap::find_nontrivial_3ap;

    #[test]
    fn small_capsets() {
        let r = capset_max(3, 1).unwrap();
        assert_eq!((r.size, r.witness.to_vec()), (2, vec![Point(0), Point(1)]));
        let r = capset_max(3, 2).unwrap();
        assert_eq!(r.size, 4);
        assert_eq!(r.witness.to_vec(), [0, 1, 3, 4].map(Point).to_vec());
        assert_eq!(r.method, CapsetMethod::Exhaustive);
        let r = capset_max(5, 1).unwrap();
        assert_eq!(r.size, 2);
        assert!(find_nontrivial_3ap(&r.witness).is_none());
    }

    #[test]
    fn f3_cubed_by_backtracking() {
        let r = capset_max(3, 3).unwrap();
        assert_eq!(r.size, 9);
        assert_eq!(r.method, CapsetMethod::Backtracking);
        assert!(find_nontrivial_3ap(&r.witness).is_none());
    }

    #[test]
    fn backtracking_agrees_with_exhaustive() {
        for (p, n) in [(3, 1), (3, 2), (5, 1), (7, 1), (11, 1)] {
            let s = SpaceDescriptor::new(p, n).unwrap();
            assert_eq!(backtrack(&s), exhaustive(&s), "p={p} n={n}");
        }
    }

    #[test]
    fn cap_exceeded() {
        assert!(matches!(capset_max(3, 4), Err(Error::CapExceeded(_))));
    }
}
