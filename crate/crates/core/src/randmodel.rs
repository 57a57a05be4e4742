//! Random set models, tail bounds and Monte Carlo estimates for random sets.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cayley::BipartiteMatrix;
use crate::error::{invalid, Error, Result};
use crate::fourier::dft_values;
use crate::rng::{child_seed, stream, substream, RNG_ALGORITHM};
use crate::threeap::density_test;
use crate::vectorspace::{DenseSubset, Point, SpaceDescriptor, SubspaceBasis};

/// Size model of a random set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SizeModel {
    Exact(usize),
    Bernoulli(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub space: SpaceDescriptor,
    pub model: SizeModel,
    pub trials: usize,
    pub seed: u64,
}

impl TrialConfig {
    pub fn validate(&self) -> Result<()> {
        match self.model {
            SizeModel::Exact(r) if r > self.space.size() => {
                return invalid(format!("r = {r} exceeds N = {}", self.space.size()))
            }
            SizeModel::Bernoulli(q) if !(0.0..=1.0).contains(&q) => return invalid(format!("q = {q} must lie in [0, 1]")),
            _ => {}
        }
        if self.trials == 0 {
            return invalid("trials must be at least 1");
        }
        Ok(())
    }

    /// The set drawn for trial `t`.
    pub fn sample(&self, t: usize) -> Result<DenseSubset> {
        let seed = child_seed(self.seed, t as u64);
        match self.model {
            SizeModel::Exact(r) => sample_exact(self.space, r, seed),
            SizeModel::Bernoulli(q) => sample_bernoulli(self.space, q, seed),
        }
    }
}

/// A uniform `r`-subset of `V`.
pub fn sample_exact(space: SpaceDescriptor, r: usize, seed: u64) -> Result<DenseSubset> {
    if r > space.size() {
        return invalid(format!("r = {r} exceeds N = {}", space.size()));
    }
    let idx = sample(&mut stream(seed), space.size(), r);
    DenseSubset::from_indices(space, idx.iter().map(|i| i as u64))
}

/// Includes each point independently with probability `q`.
pub fn sample_bernoulli(space: SpaceDescriptor, q: f64, seed: u64) -> Result<DenseSubset> {
    if !(0.0..=1.0).contains(&q) {
        return invalid(format!("q = {q} must lie in [0, 1]"));
    }
    let mut rng = stream(seed);
    Ok(DenseSubset::from_predicate(space, |_| rng.gen::<f64>() < q))
}

/// The two-stage construction: `R_1` Bernoulli at `q = (1 - σ⁴) r / N`, then
/// `R_2` a uniform `(r - |R_1|)`-subset of `V \ R_1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoupledSample {
    pub set: DenseSubset,
    pub q: f64,
    pub r1_size: usize,
    pub r2_size: usize,
    /// `|R_1| ∈ [(1 - 2σ⁴) r, r]`.
    pub in_window: bool,
    /// `|R_1| > r`: `R_1` was cut down to a uniform `r`-subset.
    pub truncated: bool,
}

pub fn sample_coupled(space: SpaceDescriptor, r: usize, sigma: f64, seed: u64) -> Result<CoupledSample> {
    let n = space.size();
    if r > n {
        return invalid(format!("r = {r} exceeds N = {n}"));
    }
    if !(sigma > 0.0 && sigma < 1.0) {
        return invalid(format!("sigma = {sigma} must lie in (0, 1)"));
    }
    let s4 = sigma.powi(4);
    let q = (1.0 - s4) * r as f64 / n as f64;
    let mut rng = stream(seed);
    let r1 = DenseSubset::from_predicate(space, |_| rng.gen::<f64>() < q);
    let r1_size = r1.card();
    let in_window = r1_size <= r && r1_size as f64 >= (1.0 - 2.0 * s4) * r as f64;
    if r1_size > r {
        let members = r1.to_vec();
        let keep = sample(&mut rng, members.len(), r);
        let set = DenseSubset::from_points(space, keep.iter().map(|i| members[i]))?;
        return Ok(CoupledSample { set, q, r1_size, r2_size: 0, in_window, truncated: true });
    }
    let rest: Vec<Point> = space.points().filter(|&x| !r1.contains(x)).collect();
    let pick = sample(&mut rng, rest.len(), r - r1_size);
    let mut set = r1;
    for i in pick.iter() {
        set.insert(rest[i]);
    }
    Ok(CoupledSample { set, q, r1_size, r2_size: r - r1_size, in_window, truncated: false })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourierSupReport {
    pub size: usize,
    /// `sup_{ξ ≠ 0} |1_R^(ξ)|`.
    pub sup: f64,
    pub witness: Point,
    /// `|R| / (N ln N)`.
    pub bound: f64,
    pub passed: bool,
}

pub fn fourier_sup_report(r: &DenseSubset) -> Result<FourierSupReport> {
    if r.is_empty() {
        return invalid("R must be nonempty");
    }
    let s = *r.space();
    let spectrum = dft_values(&r.indicator(), &SubspaceBasis::whole(s));
    let (mut sup, mut witness) = (0.0, Point(1));
    // full-space character order coincides with flat index order
    for (i, z) in spectrum.iter().enumerate().skip(1) {
        if z.norm() > sup * (1.0 + 1e-12) {
            sup = z.norm();
            witness = Point(i as u32);
        }
    }
    let n = s.size() as f64;
    let bound = r.card() as f64 / (n * n.ln());
    Ok(FourierSupReport { size: r.card(), sup, witness, bound, passed: sup < bound })
}

/// Inputs of `P(X > λ) ≤ exp(t² q N - t λ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailBoundInputs {
    pub q: f64,
    pub n: usize,
    pub lambda: f64,
    pub t: f64,
}

pub fn chernoff_bound(inputs: &TailBoundInputs) -> Result<f64> {
    let TailBoundInputs { q, n, lambda, t } = *inputs;
    if !(t > 0.0 && t <= 1.0) {
        return invalid(format!("t = {t} must lie in (0, 1]"));
    }
    if !(0.0..=1.0).contains(&q) {
        return invalid(format!("q = {q} must lie in [0, 1]"));
    }
    Ok((t * t * q * n as f64 - t * lambda).exp())
}

/// The bound at `λ = r / ln N`, `t = λ / (2qN)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizedTail {
    pub lambda: f64,
    pub t: f64,
    /// Whether `t` falls in `(0, 1]`, where the bound is valid.
    pub t_admissible: bool,
    /// `exp(-λ² / (4qN))`.
    pub bound: f64,
    /// `-r / (4 ln² N)`, the exponent the substitution gives at `q = r/N`.
    pub exponent_derived: f64,
    /// `-r / (2 ln² N)`, the exponent usually quoted for this bound.
    pub exponent_stated: f64,
}

pub fn optimized_tail(q: f64, n: usize, r: usize) -> Result<OptimizedTail> {
    if !(q > 0.0 && q <= 1.0) || n < 3 {
        return invalid(format!("need q in (0, 1] and N >= 3 (got q = {q}, N = {n})"));
    }
    let ln = (n as f64).ln();
    let lambda = r as f64 / ln;
    let qn = q * n as f64;
    let t = lambda / (2.0 * qn);
    Ok(OptimizedTail {
        lambda,
        t,
        t_admissible: t > 0.0 && t <= 1.0,
        bound: (-lambda * lambda / (4.0 * qn)).exp(),
        exponent_derived: -(r as f64) / (4.0 * ln * ln),
        exponent_stated: -(r as f64) / (2.0 * ln * ln),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailReport {
    pub q: f64,
    pub lambda: f64,
    pub xi: Point,
    pub trials: usize,
    pub hits: usize,
    pub frequency: f64,
    pub stderr: f64,
    /// `t* = min(1, λ / (2qN))`, minimising the bound over `(0, 1]`.
    pub t_star: f64,
    pub bound: f64,
    /// `frequency ≤ bound + 3 stderr`.
    pub within: bool,
}

/// Frequency of `N Re 1_R^(ξ) ≥ λ` for Bernoulli(`q`) sets `R`.
pub fn empirical_tail(space: SpaceDescriptor, q: f64, lambda: f64, xi: Point, trials: usize, seed: u64) -> Result<TailReport> {
    if !space.contains(xi) {
        return invalid(format!("frequency {xi} is not in {space}"));
    }
    if xi.0 == 0 {
        return invalid("xi must be nonzero: X is not centered at the trivial character");
    }
    if !(q > 0.0 && q <= 1.0) || trials == 0 || lambda < 0.0 {
        return invalid("need q in (0, 1], lambda >= 0 and trials >= 1");
    }
    let p = space.p();
    let cosines: Vec<f64> = (0..p).map(|k| (2.0 * std::f64::consts::PI * k as f64 / p as f64).cos()).collect();
    let weights: Vec<f64> = space.points().map(|v| cosines[space.pairing(v, xi) as usize]).collect();
    let mut hits = 0;
    for t in 0..trials {
        let mut rng = substream(seed, t as u64);
        let x: f64 = weights.iter().filter(|_| rng.gen::<f64>() < q).sum();
        if x >= lambda {
            hits += 1;
        }
    }
    let qn = q * space.size() as f64;
    let t_star = (lambda / (2.0 * qn)).clamp(f64::MIN_POSITIVE, 1.0);
    let bound = chernoff_bound(&TailBoundInputs { q, n: space.size(), lambda, t: t_star })?;
    let frequency = hits as f64 / trials as f64;
    let stderr = (frequency * (1.0 - frequency) / trials as f64).sqrt();
    Ok(TailReport { q, lambda, xi, trials, hits, frequency, stderr, t_star, bound, within: frequency <= bound + 3.0 * stderr })
}

/// Chooses the excluded sets `S_1 ⊆ U_1` and, after seeing `T_1`, `S_2 ⊆ U_2`.
pub trait Adversary {
    fn name(&self) -> String;
    fn first(&self, g: &BipartiteMatrix) -> Vec<usize>;
    fn second(&self, g: &BipartiteMatrix, t1: &[usize]) -> Vec<usize>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BuiltinAdversary {
    /// Excludes nothing.
    Trivial,
    /// Excludes the `⌊u/2⌋` highest-degree left vertices, then the `⌊u/2⌋`
    /// right vertices with most neighbours in `T_1`.
    Greedy,
}

fn top_half(scores: impl Iterator<Item = usize>, u: usize) -> Vec<usize> {
    let mut order: Vec<(usize, usize)> = scores.enumerate().collect();
    order.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    let mut out: Vec<usize> = order.into_iter().take(u / 2).map(|(i, _)| i).collect();
    out.sort_unstable();
    out
}

impl Adversary for BuiltinAdversary {
    fn name(&self) -> String {
        match self {
            BuiltinAdversary::Trivial => "trivial".into(),
            BuiltinAdversary::Greedy => "greedy".into(),
        }
    }

    fn first(&self, g: &BipartiteMatrix) -> Vec<usize> {
        match self {
            BuiltinAdversary::Trivial => Vec::new(),
            BuiltinAdversary::Greedy => top_half((0..g.u()).map(|i| g.left_degree(i)), g.u()),
        }
    }

    fn second(&self, g: &BipartiteMatrix, t1: &[usize]) -> Vec<usize> {
        match self {
            BuiltinAdversary::Trivial => Vec::new(),
            BuiltinAdversary::Greedy => {
                top_half((0..g.u()).map(|j| t1.iter().filter(|&&i| g.has_edge(i, j)).count()), g.u())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Klr11Report {
    pub adversary: String,
    pub u: usize,
    pub density: f64,
    pub t1: usize,
    pub t2: usize,
    pub trials: usize,
    pub no_edge: usize,
    pub frequency: f64,
    pub seed: u64,
    pub rng: String,
}

/// The first `t` entries of a Fisher-Yates shuffle of `pool`; for a fixed
/// stream, smaller `t` gives a prefix of larger `t`.
fn shuffled_prefix(pool: &mut [usize], t: usize, rng: &mut impl Rng) -> Vec<usize> {
    for i in 0..t {
        let j = rng.gen_range(i..pool.len());
        pool.swap(i, j);
    }
    pool[..t].to_vec()
}

fn complement(u: usize, s: &[usize]) -> Vec<usize> {
    let mut mask = vec![true; u];
    for &i in s {
        mask[i] = false;
    }
    (0..u).filter(|&i| mask[i]).collect()
}

/// Estimates the probability that a random `(t_1, t_2)`-subgraph chosen
/// around an adversary has no edge. Trial `i` draws `T_1` from stream `2i`
/// and `T_2` from stream `2i + 1`.
pub fn mc_klr11(
    g: &BipartiteMatrix,
    t1: usize,
    t2: usize,
    adversary: &dyn Adversary,
    trials: usize,
    seed: u64,
) -> Result<Klr11Report> {
    let u = g.u();
    if t1 == 0 || t2 == 0 || 2 * t1 >= u || 2 * t2 >= u {
        return invalid(format!("need 1 <= t1, t2 < u/2 (u = {u}, t1 = {t1}, t2 = {t2})"));
    }
    let check = |s: &[usize], side: &str| -> Result<()> {
        if 2 * s.len() > u || s.iter().any(|&i| i >= u) {
            return Err(Error::Contract(format!(
                "adversary {} returned {} {side} vertices; at most {} allowed",
                adversary.name(),
                s.len(),
                u / 2
            )));
        }
        Ok(())
    };
    let s1 = adversary.first(g);
    check(&s1, "left")?;
    let pool1 = complement(u, &s1);
    let mut no_edge = 0;
    for t in 0..trials as u64 {
        let mut pool = pool1.clone();
        let first = shuffled_prefix(&mut pool, t1, &mut substream(seed, 2 * t));
        let s2 = adversary.second(g, &first);
        check(&s2, "right")?;
        let mut pool = complement(u, &s2);
        let second = shuffled_prefix(&mut pool, t2, &mut substream(seed, 2 * t + 1));
        if !first.iter().any(|&i| second.iter().any(|&j| g.has_edge(i, j))) {
            no_edge += 1;
        }
    }
    Ok(Klr11Report {
        adversary: adversary.name(),
        u,
        density: g.density(),
        t1,
        t2,
        trials,
        no_edge,
        frequency: if trials == 0 { 0.0 } else { no_edge as f64 / trials as f64 },
        seed,
        rng: RNG_ALGORITHM.into(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityFailureReport {
    pub r: usize,
    pub alpha: f64,
    pub outer_trials: usize,
    pub inner_trials: usize,
    /// Per sampled `R`, the number of inner subsets found 3AP-free.
    pub witnessed: Vec<usize>,
    pub failures: usize,
    /// Fraction of sampled `R` with a witnessed 3AP-free `α`-subset. A lower
    /// estimate of the failure probability, since witnesses are only sampled.
    pub frequency: f64,
    pub seed: u64,
    pub rng: String,
}

pub fn mc_density_failure(
    space: SpaceDescriptor,
    r: usize,
    alpha: f64,
    outer_trials: usize,
    inner_trials: usize,
    seed: u64,
) -> Result<DensityFailureReport> {
    if r > space.size() {
        return invalid(format!("r = {r} exceeds N = {}", space.size()));
    }
    let mut witnessed = Vec::with_capacity(outer_trials);
    for t in 0..outer_trials as u64 {
        let set = sample_exact(space, r, child_seed(seed, 2 * t))?;
        let report = density_test(&set, alpha, inner_trials, child_seed(seed, 2 * t + 1))?;
        witnessed.push(report.failures);
    }
    let failures = witnessed.iter().filter(|&&w| w > 0).count();
    Ok(DensityFailureReport {
        r,
        alpha,
        outer_trials,
        inner_trials,
        failures,
        frequency: if outer_trials == 0 { 0.0 } else { failures as f64 / outer_trials as f64 },
        witnessed,
        seed,
        rng: RNG_ALGORITHM.into(),
    })
}
