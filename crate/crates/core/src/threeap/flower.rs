use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::count::ceil_tol;
use super::Flower;
use crate::error::{invalid, Result};
use crate::regularity::{classify_vectors, regularize_multi, restricted_sup, tower, RegularizeParams, StopReason, SUP_SLACK};
use crate::vectorspace::{localize, DenseSubset, Point, SubspaceBasis};

/// Splits `A` into `m` runs of consecutive members (ascending index), the
/// first `|A| mod m` runs one longer than the rest.
pub fn split_canonical(a: &DenseSubset, m: usize) -> Result<Vec<DenseSubset>> {
    if m == 0 {
        return invalid("number of parts must be at least 1");
    }
    let members = a.to_vec();
    let (q, r) = (members.len() / m, members.len() % m);
    let mut parts = Vec::with_capacity(m);
    let mut start = 0;
    for i in 0..m {
        let len = q + usize::from(i < r);
        parts.push(DenseSubset::from_points(*a.space(), members[start..start + len].iter().copied())?);
        start += len;
    }
    Ok(parts)
}

/// The set `B_i` of coset representatives usable for part `A_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PetalCandidates {
    /// Qualifying representatives, truncated to `target` when larger.
    pub reps: DenseSubset,
    /// Number of qualifying representatives before truncation.
    pub qualifying: usize,
    /// `⌈(α / 4m) K⌉`.
    pub target: usize,
    pub shortfall: bool,
}

fn dense_enough(local: usize, part: usize, h: usize, n: usize) -> bool {
    4 * local * n >= part * h
}

/// Representatives `v` that are ε-regular for `A_i` with
/// `|(A_i)_H^v| ≥ |A_i||H| / 4N`, keeping the lowest `⌈(α/4m)K⌉`.
pub fn build_petal_candidates(a_i: &DenseSubset, h: &SubspaceBasis, eps: f64, alpha: f64, m: usize) -> Result<PetalCandidates> {
    if m == 0 {
        return invalid("number of parts must be at least 1");
    }
    let class = classify_vectors(a_i, h, eps)?;
    let n = h.space().size();
    let good: Vec<Point> = class
        .records
        .iter()
        .filter(|r| r.regular && r.local_count > 0 && dense_enough(r.local_count, a_i.card(), h.size(), n))
        .map(|r| r.rep)
        .collect();
    let target = ceil_tol(alpha / (4.0 * m as f64) * h.index() as f64).max(1);
    let reps = DenseSubset::from_points(*h.space(), good.iter().take(target).copied())?;
    Ok(PetalCandidates { reps, qualifying: good.len(), target, shortfall: good.len() < target })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowerStage {
    NoRegularSubspace,
    EmptyCandidates,
    NoCrossPart3aps,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowerCase {
    /// Many representatives lie in three candidate sets; progressions are
    /// taken inside that shared set.
    Shared,
    /// Few shared representatives; the remaining ones are split into disjoint
    /// candidate sets.
    Disjoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowerDiagnostics {
    pub iterations: u64,
    pub stop_reason: StopReason,
    pub index: usize,
    pub candidates: Vec<PetalCandidates>,
    pub case: Option<FlowerCase>,
    /// `|B|`: representatives in at least three candidate sets.
    pub shared: usize,
    /// `(α / 8m) K`.
    pub shared_threshold: f64,
    /// Sizes of the sets the progressions are drawn from, per part.
    pub working_sizes: Vec<usize>,
    /// Ordered quotient progressions inside the working union.
    pub quotient_3aps: u64,
    /// Of those, progressions with two terms assigned to one part.
    pub same_part_3aps: u64,
    /// `3 Σ |B_i'|²`.
    pub same_part_bound: u64,
    /// Quotient progressions with terms from three distinct parts.
    pub cross_part_3aps: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowerSearch {
    pub flower: Option<Flower>,
    pub failure: Option<FlowerStage>,
    pub diagnostics: FlowerDiagnostics,
}

/// Runs the flower construction on `A` split into `m` parts and returns the
/// midpoint-centered flower with the most petals.
pub fn flower_find(a: &DenseSubset, m: usize, eps: f64, alpha: f64, floor: usize) -> Result<FlowerSearch> {
    if m < 3 {
        return invalid(format!("a flower needs m >= 3 parts, got {m}"));
    }
    let parts = split_canonical(a, m)?;
    let params = RegularizeParams { eps, alpha, floor, certified_delta: None };
    let report = regularize_multi(&parts, &params)?;
    let h = report.final_subspace.clone();
    let cosets = h.cosets();
    let k = cosets.len();
    let mut diag = FlowerDiagnostics {
        iterations: report.iterations,
        stop_reason: report.stop_reason,
        index: k,
        candidates: Vec::new(),
        case: None,
        shared: 0,
        shared_threshold: alpha / (8.0 * m as f64) * k as f64,
        working_sizes: Vec::new(),
        quotient_3aps: 0,
        same_part_3aps: 0,
        same_part_bound: 0,
        cross_part_3aps: 0,
    };
    let fail = |stage, diagnostics| Ok(FlowerSearch { flower: None, failure: Some(stage), diagnostics });
    if !report.succeeded {
        return fail(FlowerStage::NoRegularSubspace, diag);
    }

    diag.candidates = parts.iter().map(|p| build_petal_candidates(p, &h, eps, alpha, m)).collect::<Result<_>>()?;
    if diag.candidates.iter().filter(|c| !c.reps.is_empty()).count() < 3 {
        return fail(FlowerStage::EmptyCandidates, diag);
    }

    // membership[c][i]: coset c is in B_i
    let mut membership = vec![vec![false; m]; k];
    for (i, c) in diag.candidates.iter().enumerate() {
        for v in c.reps.iter() {
            membership[cosets.coset_index(v)][i] = true;
        }
    }
    let multiplicity: Vec<usize> = membership.iter().map(|row| row.iter().filter(|&&b| b).count()).collect();
    diag.shared = multiplicity.iter().filter(|&&c| c >= 3).count();

    // working[i]: cosets drawn from for part i; owner: single owner in the disjoint case
    let mut working = vec![BTreeSet::new(); m];
    let mut owner: Vec<Option<usize>> = vec![None; k];
    if diag.shared as f64 >= diag.shared_threshold {
        diag.case = Some(FlowerCase::Shared);
        for c in 0..k {
            if multiplicity[c] >= 3 {
                for i in 0..m {
                    if membership[c][i] {
                        working[i].insert(c);
                    }
                }
            }
        }
    } else {
        diag.case = Some(FlowerCase::Disjoint);
        for c in 0..k {
            if (1..3).contains(&multiplicity[c]) {
                let i = membership[c].iter().position(|&b| b).expect("multiplicity is positive");
                working[i].insert(c);
                owner[c] = Some(i);
            }
        }
    }
    diag.working_sizes = working.iter().map(|w| w.len()).collect();

    let s = *h.space();
    let i2 = s.inv2();
    let rep = |c: usize| cosets.reps()[c];
    let union: BTreeSet<usize> = working.iter().flatten().copied().collect();
    let midpoint = |x: usize, z: usize| cosets.coset_index(s.lin2(i2, rep(x), i2, rep(z)));
    for &x in &union {
        for &z in &union {
            let y = midpoint(x, z);
            if !union.contains(&y) {
                continue;
            }
            diag.quotient_3aps += 1;
            if diag.case == Some(FlowerCase::Disjoint) {
                let (ox, oy, oz) = (owner[x], owner[y], owner[z]);
                if ox == oy || oy == oz || ox == oz {
                    diag.same_part_3aps += 1;
                }
            }
        }
    }
    diag.same_part_bound = 3 * working.iter().map(|w| (w.len() * w.len()) as u64).sum::<u64>();
    for a_ in 0..m {
        for b_ in 0..m {
            for c_ in 0..m {
                if a_ == b_ || b_ == c_ || a_ == c_ {
                    continue;
                }
                for &x in &working[a_] {
                    for &z in &working[c_] {
                        if working[b_].contains(&midpoint(x, z)) {
                            diag.cross_part_3aps += 1;
                        }
                    }
                }
            }
        }
    }

    // maximise petals over (i0, j0 < k0) distinct and centers in the working set of i0
    let mut best: Option<(usize, (usize, usize, usize), usize, Vec<(Point, Point)>)> = None;
    for i0 in 0..m {
        for j0 in 0..m {
            for k0 in j0 + 1..m {
                if i0 == j0 || i0 == k0 {
                    continue;
                }
                for &c in &working[i0] {
                    let two_c = s.scale(2, rep(c));
                    let petals: Vec<(Point, Point)> = working[j0]
                        .iter()
                        .filter_map(|&x| {
                            let y = cosets.coset_index(s.sub(two_c, rep(x)));
                            working[k0].contains(&y).then(|| (rep(x), rep(y)))
                        })
                        .collect();
                    if petals.len() > best.as_ref().map_or(0, |b| b.0) {
                        best = Some((petals.len(), (i0, j0, k0), c, petals));
                    }
                }
            }
        }
    }
    let Some((_, indices, center, petals)) = best else {
        return fail(FlowerStage::NoCrossPart3aps, diag);
    };
    Ok(FlowerSearch {
        flower: Some(Flower { subspace: h, parts, indices, center: rep(center), petals, eps, alpha, m }),
        failure: None,
        diagnostics: diag,
    })
}

/// Independent re-verification of a flower's defining properties.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowerValidation {
    /// Parts are disjoint, cover `A`, and differ in size by at most one.
    pub parts_ok: bool,
    /// `H` is ε-regular for every part and its index is within the tower bound.
    pub subspace_ok: bool,
    /// The center is ε-regular and dense for `A_{i0}`.
    pub center_ok: bool,
    /// Every petal's first coset is dense for `A_{j0}`.
    pub petals_j_ok: bool,
    /// Every petal's second coset is dense for `A_{k0}`.
    pub petals_k_ok: bool,
    /// Every `(x, c, y)` is a progression in `V/H`.
    pub progressions_ok: bool,
    pub failures: Vec<String>,
}

impl FlowerValidation {
    pub fn passed(&self) -> bool {
        self.parts_ok && self.subspace_ok && self.center_ok && self.petals_j_ok && self.petals_k_ok && self.progressions_ok
    }
}

pub fn validate_flower(flower: &Flower, a: &DenseSubset) -> Result<FlowerValidation> {
    let h = &flower.subspace;
    let s = *h.space();
    a.space().ensure_same(&s)?;
    let n = s.size();
    let mut failures = Vec::new();
    let (i0, j0, k0) = flower.indices;
    let m = flower.parts.len();

    let mut parts_ok = m == flower.m && i0 < m && j0 < m && k0 < m && i0 != j0 && j0 != k0 && i0 != k0;
    if parts_ok {
        let mut union = DenseSubset::empty(s);
        for (i, p) in flower.parts.iter().enumerate() {
            if !union.is_disjoint(p)? {
                parts_ok = false;
                failures.push(format!("part {i} overlaps an earlier part"));
            }
            union = union.union(p)?;
        }
        if union != *a {
            parts_ok = false;
            failures.push("parts do not cover A exactly".into());
        }
        let sizes: Vec<usize> = flower.parts.iter().map(|p| p.card()).collect();
        if sizes.iter().max().unwrap_or(&0) - sizes.iter().min().unwrap_or(&0) > 1 {
            parts_ok = false;
            failures.push(format!("part sizes {sizes:?} differ by more than one"));
        }
    } else {
        failures.push(format!("indices {:?} invalid for {m} parts", flower.indices));
    }
    if !parts_ok {
        return Ok(FlowerValidation {
            parts_ok,
            subspace_ok: false,
            center_ok: false,
            petals_j_ok: false,
            petals_k_ok: false,
            progressions_ok: false,
            failures,
        });
    }

    let mut subspace_ok = true;
    for (i, p) in flower.parts.iter().enumerate() {
        let c = classify_vectors(p, h, flower.eps)?;
        if !c.subspace_regular {
            subspace_ok = false;
            failures.push(format!("H is not regular for part {i}"));
        }
    }
    let level = crate::regularity::step_cap(flower.eps, flower.alpha, m).max(1);
    if let Some(w) = tower(level, s.p())?.exact() {
        if h.index() as u64 > w {
            subspace_ok = false;
            failures.push(format!("index {} exceeds W({level}) = {w}", h.index()));
        }
    }

    let dense = |part: &DenseSubset, v: Point| -> Result<bool> {
        let local = localize(part, h, v)?.card();
        Ok(local > 0 && dense_enough(local, part.card(), h.size(), n))
    };
    let a_i = &flower.parts[i0];
    let threshold = flower.eps * a_i.card() as f64 / n as f64;
    let sup = restricted_sup(a_i, h, flower.center)?;
    let center_ok = sup <= threshold + SUP_SLACK && dense(a_i, flower.center)?;
    if !center_ok {
        failures.push(format!("center {} is not regular and dense for part {i0}", flower.center));
    }
    let (mut petals_j_ok, mut petals_k_ok, mut progressions_ok) = (true, true, true);
    let two_c = s.scale(2, flower.center);
    for &(x, y) in &flower.petals {
        if !dense(&flower.parts[j0], x)? {
            petals_j_ok = false;
            failures.push(format!("petal coset {x} is sparse for part {j0}"));
        }
        if !dense(&flower.parts[k0], y)? {
            petals_k_ok = false;
            failures.push(format!("petal coset {y} is sparse for part {k0}"));
        }
        if !h.contains(s.sub(s.add(x, y), two_c)) {
            progressions_ok = false;
            failures.push(format!("({x}, {}, {y}) is not a progression mod H", flower.center));
        }
    }
    if flower.petals.is_empty() {
        progressions_ok = false;
        failures.push("flower has no petals".into());
    }
    Ok(FlowerValidation { parts_ok, subspace_ok, center_ok, petals_j_ok, petals_k_ok, progressions_ok, failures })
}
