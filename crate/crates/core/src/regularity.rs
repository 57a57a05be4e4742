//! ε-regular vectors and subspaces, the energy `d(A, H)` and the
//! energy-increment iteration that produces a subspace regular for `A`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::fourier::{dft_values, Spectrum};
use crate::vectorspace::{localized_values, DenseSubset, Point, SpaceDescriptor, SubspaceBasis};

/// Absolute slack when comparing a Fourier sup against `ε|A|/N`.
pub const SUP_SLACK: f64 = 1e-12;

/// Slack allowed on the per-step energy increment `ε³`.
pub const ENERGY_SLACK: f64 = 1e-9;

fn check_inputs(a: &DenseSubset, h: &SubspaceBasis) -> Result<()> {
    a.space().ensure_same(h.space())
}

fn check_unit(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        invalid(format!("{name} = {x} must lie in (0, 1)"))
    }
}

/// `sup_{ξ ∉ H^⊥} |(A_H^v)^(ξ)|` and the minimal-index frequency attaining
/// it; `None` when `H = {0}` (no nontrivial characters).
pub fn restricted_sup_witness(a: &DenseSubset, h: &SubspaceBasis, v: Point) -> Result<Option<(f64, Point)>> {
    check_inputs(a, h)?;
    if !h.space().contains(v) {
        return invalid(format!("shift {v} is not in {}", h.space()));
    }
    let spectrum = Spectrum::new(h.clone(), dft_values(&localized_values(a, h, v), h))?;
    Ok(spectrum.nontrivial_sup())
}

/// `sup_{ξ ∉ H^⊥} |(A_H^v)^(ξ)|`, the transform taken over `H`.
pub fn restricted_sup(a: &DenseSubset, h: &SubspaceBasis, v: Point) -> Result<f64> {
    Ok(restricted_sup_witness(a, h, v)?.map_or(0.0, |(s, _)| s))
}

/// Regularity record for one coset `v + H`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CosetRecord {
    pub rep: Point,
    /// `|A_H^v|`.
    pub local_count: usize,
    pub sup_value: f64,
    pub witness: Option<Point>,
    pub regular: bool,
}

/// Classification of every coset of `V/H` as ε-regular or not for `A`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorClassification {
    pub subspace: SubspaceBasis,
    pub eps: f64,
    /// `ε |A| / N`.
    pub threshold: f64,
    pub records: Vec<CosetRecord>,
    /// `Σ |H|` over irregular cosets: the number of irregular vectors.
    pub irregular_mass: usize,
    /// Whether `irregular_mass ≤ εN`.
    pub subspace_regular: bool,
}

impl VectorClassification {
    pub fn irregular(&self) -> impl Iterator<Item = &CosetRecord> {
        self.records.iter().filter(|r| !r.regular)
    }

    pub fn record_for(&self, v: Point) -> &CosetRecord {
        let rep = self.subspace.reduce(v);
        let pos = self.records.binary_search_by_key(&rep, |r| r.rep).expect("records cover every coset");
        &self.records[pos]
    }
}

/// Classifies every coset representative; cosets are processed in parallel
/// and collected in representative order.
pub fn classify_vectors(a: &DenseSubset, h: &SubspaceBasis, eps: f64) -> Result<VectorClassification> {
    check_inputs(a, h)?;
    check_unit("eps", eps)?;
    let s = *h.space();
    let n = s.size();
    let threshold = eps * a.card() as f64 / n as f64;
    let cosets = h.cosets();
    let counts = cosets.localized_counts(a);
    h.dual_representatives();
    h.elements();
    let records: Vec<CosetRecord> = cosets
        .reps()
        .par_iter()
        .zip(counts.par_iter())
        .map(|(&rep, &local_count)| {
            // empty or full localisations have no nontrivial spectrum
            let (sup_value, witness) = if local_count == 0 || local_count == h.size() {
                (0.0, None)
            } else {
                let spectrum = Spectrum::new(h.clone(), dft_values(&localized_values(a, h, rep), h))
                    .expect("coordinate table matches |H|");
                match spectrum.nontrivial_sup() {
                    Some((v, w)) => (v, Some(w)),
                    None => (0.0, None),
                }
            };
            let regular = sup_value <= threshold + SUP_SLACK;
            CosetRecord { rep, local_count, sup_value, witness: if regular { None } else { witness }, regular }
        })
        .collect();
    let irregular_mass = records.iter().filter(|r| !r.regular).count() * h.size();
    Ok(VectorClassification {
        subspace: h.clone(),
        eps,
        threshold,
        irregular_mass,
        subspace_regular: irregular_mass as f64 <= eps * n as f64,
        records,
    })
}

/// `d(A, H) = (1/N) Σ_v (|A_H^v| / |H|)² / (|A| / N)²`, evaluated from exact
/// integer coset counts as `N Σ_C |A ∩ C|² / (|H| |A|²)`.
pub fn energy(a: &DenseSubset, h: &SubspaceBasis) -> Result<f64> {
    check_inputs(a, h)?;
    if a.is_empty() {
        return invalid("energy is undefined for the empty set");
    }
    let sq: u128 = h.cosets().counts(a).iter().map(|&c| (c as u128) * (c as u128)).sum();
    let num = sq * h.space().size() as u128;
    let den = h.size() as u128 * (a.card() as u128) * (a.card() as u128);
    Ok(num as f64 / den as f64)
}

/// Result of one refinement `H → H'`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefineOutcome {
    pub refined: SubspaceBasis,
    /// One maximising frequency per irregular coset, ascending, deduplicated.
    pub witnesses: Vec<Point>,
    pub irregular_cosets: usize,
    pub energy_before: f64,
    pub energy_after: f64,
    pub index_before: usize,
    pub index_after: usize,
    /// `|V/H'| ≤ |V/H| p^{|V/H|}`, checked as `dim H - dim H' ≤ |V/H|`.
    pub index_bound_held: bool,
    /// `d(A, H') ≥ d(A, H) + ε³` up to [`ENERGY_SLACK`].
    pub increment_held: bool,
}

fn refine_from(a: &DenseSubset, class: &VectorClassification) -> Result<RefineOutcome> {
    let h = &class.subspace;
    if class.subspace_regular {
        return Err(Error::Contract(format!(
            "refine_step called on a subspace that is {}-regular (irregular mass {})",
            class.eps, class.irregular_mass
        )));
    }
    let mut witnesses: Vec<Point> = class.irregular().filter_map(|r| r.witness).collect();
    witnesses.sort();
    witnesses.dedup();
    let refined = h.annihilator_within(&witnesses);
    let energy_before = energy(a, h)?;
    let energy_after = energy(a, &refined)?;
    let index_before = h.index();
    Ok(RefineOutcome {
        index_bound_held: h.dim() - refined.dim() <= index_before,
        increment_held: energy_after >= energy_before + class.eps.powi(3) - ENERGY_SLACK,
        index_after: refined.index(),
        irregular_cosets: class.irregular().count(),
        refined,
        witnesses,
        energy_before,
        energy_after,
        index_before,
    })
}

/// One refinement step: annihilate, inside `H`, a maximising frequency of
/// every irregular coset. Fails with a contract error when `H` is already
/// ε-regular for `A`.
pub fn refine_step(a: &DenseSubset, h: &SubspaceBasis, eps: f64) -> Result<RefineOutcome> {
    let class = classify_vectors(a, h, eps)?;
    refine_from(a, &class)
}

/// Magnitude of a tower value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TowerMagnitude {
    Exact(u64),
    Overflow,
}

/// `W(t)` with `W(1) = 2p`, `W(t) = (2p)^{W(t-1)}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerValue {
    pub level: u64,
    pub value: TowerMagnitude,
}

impl TowerValue {
    pub fn exact(&self) -> Option<u64> {
        match self.value {
            TowerMagnitude::Exact(v) => Some(v),
            TowerMagnitude::Overflow => None,
        }
    }
}

const TOWER_LIMIT: u64 = 1 << 63;

pub fn tower(t: u64, p: u32) -> Result<TowerValue> {
    if t == 0 {
        return invalid("tower level must be at least 1");
    }
    let base = 2 * p as u64;
    let mut value = TowerMagnitude::Exact(base);
    for _ in 1..t {
        value = match value {
            TowerMagnitude::Exact(prev) => match u32::try_from(prev).ok().and_then(|e| base.checked_pow(e)) {
                Some(v) if v <= TOWER_LIMIT => TowerMagnitude::Exact(v),
                _ => TowerMagnitude::Overflow,
            },
            TowerMagnitude::Overflow => break,
        };
    }
    Ok(TowerValue { level: t, value })
}

/// `⌈4 m² ε⁻³ α⁻²⌉`, the iteration cap from the energy bound.
pub fn step_cap(eps: f64, alpha: f64, m: usize) -> u64 {
    (4.0 * (m * m) as f64 / (eps.powi(3) * alpha * alpha) - 1e-9).ceil() as u64
}

/// `max(1, σN)` with `σ = 1 / (2 W(cap))`; almost always 1 at desk scale.
pub fn default_floor(space: &SpaceDescriptor, eps: f64, alpha: f64, m: usize) -> usize {
    match tower(step_cap(eps, alpha, m).max(1), space.p()).map(|t| t.exact()) {
        Ok(Some(w)) => ((space.size() as f64 / (2.0 * w as f64)).floor() as usize).max(1),
        _ => 1,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Regular,
    StepCap,
    FloorHit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegularizeParams {
    pub eps: f64,
    pub alpha: f64,
    /// Smallest admissible `|H|`.
    pub floor: usize,
    /// When the input sits inside a `(σ, δ)`-certified set with `|A| = α|R|`,
    /// the `δ` of that certificate; enables the energy ceiling check.
    pub certified_delta: Option<f64>,
}

impl RegularizeParams {
    pub fn new(eps: f64, alpha: f64) -> Self {
        RegularizeParams { eps, alpha, floor: 1, certified_delta: None }
    }
}

/// One subspace visited by the iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: u64,
    pub size: usize,
    pub index: usize,
    pub energy: f64,
    /// Summed over parts for the multi-set iteration.
    pub irregular_mass: usize,
    /// Part refined to leave this subspace, if any.
    pub refined_part: Option<usize>,
    pub witnesses: usize,
    pub index_bound_held: Option<bool>,
    pub increment_held: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularityReport {
    pub final_subspace: SubspaceBasis,
    pub iterations: u64,
    pub energy_trace: Vec<f64>,
    pub steps: Vec<StepRecord>,
    /// Final classification, one per part.
    pub classifications: Vec<VectorClassification>,
    pub succeeded: bool,
    pub stop_reason: StopReason,
    pub step_cap: u64,
    pub eps: f64,
    pub alpha: f64,
    pub parts: usize,
    /// Tower level from the statement of the result, `⌈4 m² (εα)⁻²⌉`.
    pub statement_level: u64,
    pub statement_index_bound: TowerValue,
    /// Tower level from the step count of the proof, `⌈4 m² ε⁻³ α⁻²⌉`.
    pub proof_level: u64,
    pub proof_index_bound: TowerValue,
    /// `(1 + δ)² 4 m² / α²` when a certificate `δ` was supplied.
    pub energy_ceiling: Option<f64>,
    pub energy_ceiling_held: Option<bool>,
    /// Every refinement met the `ε³` increment and the index growth bound.
    pub increments_held: bool,
}

/// Runs the energy-increment iteration from `H = V` for a single set.
pub fn regularize(a: &DenseSubset, params: &RegularizeParams) -> Result<RegularityReport> {
    run_iteration(std::slice::from_ref(a), params)
}

/// Iterates until `H` is ε-regular for every part, using the summed energy
/// `Σ d(A_i, H)`. Parts must be disjoint with sizes differing by at most 1.
pub fn regularize_multi(parts: &[DenseSubset], params: &RegularizeParams) -> Result<RegularityReport> {
    if parts.is_empty() {
        return invalid("regularize_multi needs at least one part");
    }
    for (i, a) in parts.iter().enumerate() {
        for b in &parts[i + 1..] {
            if !a.is_disjoint(b)? {
                return invalid("parts must be pairwise disjoint");
            }
        }
    }
    let lo = parts.iter().map(|a| a.card()).min().unwrap_or(0);
    let hi = parts.iter().map(|a| a.card()).max().unwrap_or(0);
    if hi - lo > 1 {
        return invalid(format!("part sizes must differ by at most 1 (got {lo}..{hi})"));
    }
    run_iteration(parts, params)
}

fn summed_energy(parts: &[DenseSubset], h: &SubspaceBasis) -> Result<f64> {
    parts.iter().filter(|a| !a.is_empty()).map(|a| energy(a, h)).sum()
}

fn run_iteration(parts: &[DenseSubset], params: &RegularizeParams) -> Result<RegularityReport> {
    check_unit("eps", params.eps)?;
    if !(params.alpha > 0.0 && params.alpha <= 1.0) {
        return invalid(format!("alpha = {} must lie in (0, 1]", params.alpha));
    }
    if params.floor == 0 {
        return invalid("floor must be at least 1");
    }
    let space = *parts[0].space();
    for a in parts {
        a.space().ensure_same(&space)?;
    }
    let (eps, alpha) = (params.eps, params.alpha);
    let m = parts.len();
    let cap = step_cap(eps, alpha, m);
    let statement_level = (4.0 * (m * m) as f64 / (eps * alpha).powi(2) - 1e-9).ceil() as u64;
    let all_empty = parts.iter().all(|a| a.is_empty());

    let mut h = SubspaceBasis::whole(space);
    let mut steps: Vec<StepRecord> = Vec::new();
    let mut trace = Vec::new();
    let mut iterations = 0u64;
    let mut increments_held = true;
    let (classifications, stop_reason) = loop {
        let classes = parts.iter().map(|a| classify_vectors(a, &h, eps)).collect::<Result<Vec<_>>>()?;
        let e = if all_empty { None } else { Some(summed_energy(parts, &h)?) };
        if let Some(e) = e {
            trace.push(e);
        }
        let mut record = StepRecord {
            step: iterations,
            size: h.size(),
            index: h.index(),
            energy: e.unwrap_or(0.0),
            irregular_mass: classes.iter().map(|c| c.irregular_mass).sum(),
            refined_part: None,
            witnesses: 0,
            index_bound_held: None,
            increment_held: None,
        };
        let failing = classes.iter().position(|c| !c.subspace_regular);
        let Some(part) = failing else {
            steps.push(record);
            break (classes, StopReason::Regular);
        };
        if iterations >= cap {
            steps.push(record);
            break (classes, StopReason::StepCap);
        }
        let outcome = refine_from(&parts[part], &classes[part])?;
        if outcome.refined.size() < params.floor {
            steps.push(record);
            break (classes, StopReason::FloorHit);
        }
        record.refined_part = Some(part);
        record.witnesses = outcome.witnesses.len();
        record.index_bound_held = Some(outcome.index_bound_held);
        record.increment_held = Some(outcome.increment_held);
        increments_held &= outcome.index_bound_held && outcome.increment_held;
        steps.push(record);
        h = outcome.refined;
        iterations += 1;
    };

    let energy_ceiling = params
        .certified_delta
        .map(|d| (1.0 + d).powi(2) * 4.0 * (m * m) as f64 / (alpha * alpha));
    let energy_ceiling_held = energy_ceiling.map(|c| trace.iter().all(|&e| e <= c + ENERGY_SLACK));
    Ok(RegularityReport {
        final_subspace: h,
        iterations,
        energy_trace: trace,
        steps,
        classifications,
        succeeded: stop_reason == StopReason::Regular,
        stop_reason,
        step_cap: cap,
        eps,
        alpha,
        parts: m,
        statement_level,
        statement_index_bound: tower(statement_level.max(1), space.p())?,
        proof_level: cap,
        proof_index_bound: tower(cap.max(1), space.p())?,
        energy_ceiling,
        energy_ceiling_held,
        increments_held,
    })
}
