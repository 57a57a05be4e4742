//! Cayley graphs `G_A` on `(V, V)`: `(v1, v2)` is an edge when `v2 - v1 ∈ A`.

use num_complex::Complex64;
use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::fourier::dft_values;
use crate::regularity::restricted_sup;
use crate::rng::substream;
use crate::vectorspace::{localize, DenseSubset, Point, SpaceDescriptor, SubspaceBasis};

/// The Cayley graph generated by a set `A`; it is `|A|`-regular.
#[derive(Debug, Clone, PartialEq)]
pub struct CayleyGraph {
    generator: DenseSubset,
}

impl CayleyGraph {
    pub fn new(generator: DenseSubset) -> Self {
        CayleyGraph { generator }
    }

    pub fn generator(&self) -> &DenseSubset {
        &self.generator
    }

    pub fn space(&self) -> &SpaceDescriptor {
        self.generator.space()
    }

    pub fn degree(&self) -> usize {
        self.generator.card()
    }

    pub fn has_edge(&self, v1: Point, v2: Point) -> bool {
        self.generator.contains(self.space().sub(v2, v1))
    }

    /// Global edge density `d(G_A) = |A| / N`.
    pub fn density(&self) -> f64 {
        self.generator.card() as f64 / self.space().size() as f64
    }

    pub fn edges_between(&self, x: &DenseSubset, y: &DenseSubset) -> Result<u64> {
        edge_count_direct(&self.generator, x, y)
    }
}

fn same_space(a: &DenseSubset, x: &DenseSubset, y: &DenseSubset) -> Result<()> {
    a.space().ensure_same(x.space())?;
    a.space().ensure_same(y.space())
}

/// Number of pairs `(x, y) ∈ X × Y` with `y - x ∈ A`, by whichever of the
/// three scans is cheapest.
pub fn edge_count_direct(a: &DenseSubset, x: &DenseSubset, y: &DenseSubset) -> Result<u64> {
    same_space(a, x, y)?;
    let s = *a.space();
    let (na, nx, ny) = (a.card(), x.card(), y.card());
    let count = if nx * ny <= nx * na && nx * ny <= ny * na {
        x.iter()
            .map(|u| y.iter().filter(|&w| a.contains(s.sub(w, u))).count() as u64)
            .sum()
    } else if nx <= ny {
        x.iter()
            .map(|u| a.iter().filter(|&d| y.contains(s.add(u, d))).count() as u64)
            .sum()
    } else {
        y.iter()
            .map(|w| a.iter().filter(|&d| x.contains(s.sub(w, d))).count() as u64)
            .sum()
    };
    Ok(count)
}

/// `N² Σ_ξ 1_A^(ξ) 1_X^(ξ) 1_Y^(-ξ)` over full-space transforms.
pub fn edge_count_fourier(a: &DenseSubset, x: &DenseSubset, y: &DenseSubset) -> Result<f64> {
    same_space(a, x, y)?;
    let s = *a.space();
    let v = SubspaceBasis::whole(s);
    let fa = dft_values(&a.indicator(), &v);
    let fx = dft_values(&x.indicator(), &v);
    let fy = dft_values(&y.indicator(), &v);
    let sum: Complex64 = s
        .points()
        .map(|xi| fa[xi.index()] * fx[xi.index()] * fy[s.neg(xi).index()])
        .sum();
    let n = s.size() as f64;
    Ok(n * n * sum.re)
}

/// Edge count choosing the pair scan or the spectral formula by cost.
pub fn edge_count(a: &DenseSubset, x: &DenseSubset, y: &DenseSubset) -> Result<u64> {
    let s = a.space();
    let scan = (x.card() * y.card()).min(a.card() * x.card().min(y.card()));
    let spectral = 4 * s.size() * s.n() as usize * s.p() as usize;
    if scan <= spectral {
        edge_count_direct(a, x, y)
    } else {
        Ok(edge_count_fourier(a, x, y)?.round().max(0.0) as u64)
    }
}

/// One sampled pair `X ⊆ v_i + H`, `Y ⊆ v_j + H`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairSample {
    pub x_size: usize,
    pub y_size: usize,
    pub edges: u64,
    pub deviation: f64,
    pub bound: f64,
    pub ratio: f64,
}

/// Outcome of probing relative regularity of the pair `(v_i + H, v_j + H)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairDensityReport {
    pub applicable: bool,
    pub reason: Option<String>,
    /// The vector whose regularity governs the pair, `v_i - v_j`.
    pub shift: Point,
    pub sup_value: f64,
    pub threshold: f64,
    /// `d(H_i, H_j) = |A_H^{v_i - v_j}| / |H|`.
    pub coset_density: f64,
    pub coset_edges_direct: u64,
    pub coset_edges_formula: u64,
    pub samples: Vec<PairSample>,
    pub max_ratio: f64,
    pub passed: bool,
}

/// Samples subsets of two cosets and compares their edge density with the
/// coset-pair density against `ε |A| |H|² / (|X| |Y| N)`.
///
/// Edges run from `v_i + H` to `v_j + H`, so their differences lie in
/// `v_j - v_i + H` and the localisation that controls the pair is
/// `A_H^{v_i - v_j}`.
pub fn pair_density_check(
    a: &DenseSubset,
    h: &SubspaceBasis,
    vi: Point,
    vj: Point,
    eps: f64,
    samples: usize,
    seed: u64,
) -> Result<PairDensityReport> {
    a.space().ensure_same(h.space())?;
    if !(eps > 0.0 && eps < 1.0) {
        return invalid(format!("eps = {eps} must lie in (0, 1)"));
    }
    let s = *h.space();
    let n = s.size() as f64;
    let hs = h.size();
    let shift = s.sub(vi, vj);
    let sup_value = restricted_sup(a, h, shift)?;
    let threshold = eps * a.card() as f64 / n;
    let local = localize(a, h, shift)?.card();
    let coset = |v: Point| DenseSubset::from_points(s, h.elements().iter().map(|&e| s.add(e, v)));
    let (hi, hj) = (coset(vi)?, coset(vj)?);
    let coset_edges_direct = edge_count_direct(a, &hi, &hj)?;
    let coset_edges_formula = (hs * local) as u64;
    let coset_density = local as f64 / hs as f64;

    let mut report = PairDensityReport {
        applicable: true,
        reason: None,
        shift,
        sup_value,
        threshold,
        coset_density,
        coset_edges_direct,
        coset_edges_formula,
        samples: Vec::new(),
        max_ratio: 0.0,
        passed: coset_edges_direct == coset_edges_formula,
    };
    if sup_value > threshold + crate::regularity::SUP_SLACK {
        report.applicable = false;
        report.reason = Some(format!("v_i - v_j = {shift} is not {eps}-regular (sup {sup_value:.6} > {threshold:.6})"));
        return Ok(report);
    }

    let min_size = ((eps.cbrt() * hs as f64).ceil() as usize).clamp(1, hs);
    for t in 0..samples {
        let mut rng = substream(seed, t as u64);
        let pick = |v: Point, rng: &mut crate::rng::Stream| {
            let k = rng.gen_range(min_size..=hs);
            let idx = sample(rng, hs, k);
            DenseSubset::from_points(s, idx.iter().map(|c| s.add(h.elements()[c], v)))
        };
        let x = pick(vi, &mut rng)?;
        let y = pick(vj, &mut rng)?;
        let edges = edge_count_direct(a, &x, &y)?;
        let xy = (x.card() * y.card()) as f64;
        let deviation = (edges as f64 / xy - coset_density).abs();
        let bound = eps * a.card() as f64 * (hs * hs) as f64 / (xy * n);
        let ratio = if bound > 0.0 { deviation / bound } else if deviation == 0.0 { 0.0 } else { f64::INFINITY };
        report.max_ratio = report.max_ratio.max(ratio);
        report.samples.push(PairSample { x_size: x.card(), y_size: y.card(), edges, deviation, bound, ratio });
    }
    report.passed = report.passed && report.max_ratio <= 1.0;
    Ok(report)
}

/// A `(σ, δ)`-regularity certificate for a set `R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegularityCertificate {
    pub sigma: f64,
    pub delta: f64,
    /// `sup_{ξ ≠ 0} |1_R^(ξ)|`.
    pub fourier_sup: f64,
    /// `δ σ |R| / N`; the certificate passes when the sup is at most this.
    pub threshold: f64,
    pub passed: bool,
}

/// Certifies that `|e_R(X,Y) - |R||X||Y|/N| ≤ δ |R||X||Y|/N` whenever
/// `|X|, |Y| ≥ σN`, via the sufficient condition `sup ≤ δσ|R|/N`.
pub fn sigma_certificate(r: &DenseSubset, sigma: f64, delta: f64) -> Result<RegularityCertificate> {
    if !(sigma > 0.0 && sigma < 1.0) || !(delta > 0.0 && delta < 1.0) {
        return invalid(format!("sigma = {sigma} and delta = {delta} must lie in (0, 1)"));
    }
    let s = r.space();
    let v = SubspaceBasis::whole(*s);
    let spectrum = dft_values(&r.indicator(), &v);
    let fourier_sup = spectrum.iter().skip(1).map(|z| z.norm()).fold(0.0, f64::max);
    let threshold = delta * sigma * r.card() as f64 / s.size() as f64;
    Ok(RegularityCertificate { sigma, delta, fourier_sup, threshold, passed: fourier_sup <= threshold })
}

/// Whether `e_R(X,Y)` is within relative error `δ` of `|R||X||Y|/N`.
pub fn edge_bound_holds(r: &DenseSubset, x: &DenseSubset, y: &DenseSubset, delta: f64) -> Result<bool> {
    let e = edge_count(r, x, y)? as f64;
    let expected = (r.card() * x.card()) as f64 * y.card() as f64 / r.space().size() as f64;
    Ok((e - expected).abs() <= delta * expected)
}

/// Sampled check of the edge bound a certificate promises.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SoundnessReport {
    pub certificate: RegularityCertificate,
    pub samples: usize,
    /// Pairs with `|X|, |Y| ≥ σN` violating the `δ` edge bound.
    pub violations: usize,
    pub max_relative_error: f64,
}

/// Draws `samples` pairs `X, Y` with sizes uniform in `[⌈σN⌉, N]` and checks
/// `|e_R(X,Y) - |R||X||Y|/N| ≤ δ |R||X||Y|/N` for each. Sample `t` uses
/// substream `t`.
pub fn certificate_soundness(r: &DenseSubset, sigma: f64, delta: f64, samples: usize, seed: u64) -> Result<SoundnessReport> {
    let certificate = sigma_certificate(r, sigma, delta)?;
    let s = *r.space();
    let n = s.size();
    let lo = ((sigma * n as f64 - 1e-9).ceil() as usize).clamp(1, n);
    let mut violations = 0;
    let mut max_relative_error: f64 = 0.0;
    for t in 0..samples {
        let mut rng = substream(seed, t as u64);
        let mut pick = || {
            let k = rng.gen_range(lo..=n);
            DenseSubset::from_indices(s, sample(&mut rng, n, k).iter().map(|i| i as u64))
        };
        let (x, y) = (pick()?, pick()?);
        let e = edge_count(r, &x, &y)? as f64;
        let expected = (r.card() * x.card()) as f64 * y.card() as f64 / n as f64;
        if expected > 0.0 {
            max_relative_error = max_relative_error.max((e - expected).abs() / expected);
        }
        if !edge_bound_holds(r, &x, &y, delta)? {
            violations += 1;
        }
    }
    Ok(SoundnessReport { certificate, samples, violations, max_relative_error })
}

/// A pair of vertex sets whose density exceeds the sparseness bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseWitness {
    pub x: DenseSubset,
    pub y: DenseSubset,
    pub density: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseReport {
    pub b: f64,
    pub sigma: f64,
    pub global_density: f64,
    pub samples: usize,
    pub max_ratio: f64,
    pub holds: bool,
    pub witness: Option<SparseWitness>,
}

/// `d(X, Y) = e(X, Y) / (|X| |Y|)` in `G_A`.
pub fn pair_density(a: &DenseSubset, x: &DenseSubset, y: &DenseSubset) -> Result<f64> {
    if x.is_empty() || y.is_empty() {
        return Ok(0.0);
    }
    Ok(edge_count(a, x, y)? as f64 / (x.card() as f64 * y.card() as f64))
}

/// Probes `(b, σ)`-sparseness of `G_A`: `d(X, Y) ≤ b d(G_A)` for sampled
/// `|X| = |Y| = ⌈σN⌉`. Even samples draw `X` and `Y` independently; odd
/// samples use `Y = X`, which is where difference sets concentrate edges.
pub fn sparse_check(a: &DenseSubset, b: f64, sigma: f64, samples: usize, seed: u64) -> Result<SparseReport> {
    if b <= 0.0 {
        return invalid(format!("b = {b} must be positive"));
    }
    if !(sigma > 0.0 && sigma <= 1.0) {
        return invalid(format!("sigma = {sigma} must lie in (0, 1]"));
    }
    let s = *a.space();
    let n = s.size();
    let k = ((sigma * n as f64).ceil() as usize).clamp(1, n);
    let global_density = a.card() as f64 / n as f64;
    let bound = b * global_density;
    let mut report = SparseReport { b, sigma, global_density, samples, max_ratio: 0.0, holds: true, witness: None };
    for t in 0..samples {
        let mut rng = substream(seed, t as u64);
        let x = DenseSubset::from_indices(s, sample(&mut rng, n, k).iter().map(|i| i as u64))?;
        let y = if t % 2 == 1 {
            x.clone()
        } else {
            DenseSubset::from_indices(s, sample(&mut rng, n, k).iter().map(|i| i as u64))?
        };
        let density = pair_density(a, &x, &y)?;
        let ratio = if bound > 0.0 { density / bound } else if density == 0.0 { 0.0 } else { f64::INFINITY };
        report.max_ratio = report.max_ratio.max(ratio);
        if density > bound && report.witness.is_none() {
            report.holds = false;
            report.witness = Some(SparseWitness { x, y, density, bound });
        }
    }
    Ok(report)
}

/// Whether an explicit pair violates `d(X, Y) ≤ b d(G_A)`.
pub fn violates_sparseness(a: &DenseSubset, b: f64, x: &DenseSubset, y: &DenseSubset) -> Result<bool> {
    let density = pair_density(a, x, y)?;
    Ok(density > b * a.card() as f64 / a.space().size() as f64)
}

/// Dense adjacency of a bipartite graph on `U_1 × U_2`, `|U_1| = |U_2| = u`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteMatrix {
    u: usize,
    words_per_row: usize,
    bits: Vec<u64>,
}

impl BipartiteMatrix {
    pub fn from_fn(u: usize, mut edge: impl FnMut(usize, usize) -> bool) -> Self {
        let words_per_row = u.div_ceil(64);
        let mut bits = vec![0u64; u * words_per_row];
        for i in 0..u {
            for j in 0..u {
                if edge(i, j) {
                    bits[i * words_per_row + j / 64] |= 1 << (j % 64);
                }
            }
        }
        BipartiteMatrix { u, words_per_row, bits }
    }

    pub fn complete(u: usize) -> Self {
        Self::from_fn(u, |_, _| true)
    }

    pub fn empty(u: usize) -> Self {
        Self::from_fn(u, |_, _| false)
    }

    pub fn u(&self) -> usize {
        self.u
    }

    #[inline]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        (self.bits[i * self.words_per_row + j / 64] >> (j % 64)) & 1 == 1
    }

    pub fn edge_count(&self) -> u64 {
        self.bits.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// `e(G) / u²`.
    pub fn density(&self) -> f64 {
        self.edge_count() as f64 / (self.u * self.u) as f64
    }

    pub fn left_degree(&self, i: usize) -> usize {
        let row = &self.bits[i * self.words_per_row..(i + 1) * self.words_per_row];
        row.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn right_degree(&self, j: usize) -> usize {
        (0..self.u).filter(|&i| self.has_edge(i, j)).count()
    }
}

/// The midpoint graph on `(H - v_1, H - v_2)`: `x_1 ~ x_2` when
/// `(x_1 + x_2) / 2 ∈ A`. Vertices are indexed by `H`'s coordinate order.
#[derive(Debug, Clone)]
pub struct PetalGraph {
    generator: DenseSubset,
    h: SubspaceBasis,
    v1: Point,
    v2: Point,
}

impl PetalGraph {
    pub fn new(generator: DenseSubset, h: SubspaceBasis, v1: Point, v2: Point) -> Result<Self> {
        generator.space().ensure_same(h.space())?;
        if !h.space().contains(v1) || !h.space().contains(v2) {
            return invalid("coset shifts must lie in the ambient space");
        }
        Ok(PetalGraph { generator, h, v1, v2 })
    }

    pub fn u(&self) -> usize {
        self.h.size()
    }

    pub fn left_vertex(&self, c: usize) -> Point {
        self.h.space().sub(self.h.elements()[c], self.v1)
    }

    pub fn right_vertex(&self, c: usize) -> Point {
        self.h.space().sub(self.h.elements()[c], self.v2)
    }

    pub fn has_edge(&self, c1: usize, c2: usize) -> bool {
        let s = self.h.space();
        let i2 = s.inv2();
        let mid = s.lin2(i2, self.left_vertex(c1), i2, self.right_vertex(c2));
        self.generator.contains(mid)
    }

    pub fn to_matrix(&self) -> BipartiteMatrix {
        let left: Vec<Point> = (0..self.u()).map(|c| self.left_vertex(c)).collect();
        let right: Vec<Point> = (0..self.u()).map(|c| self.right_vertex(c)).collect();
        let s = *self.h.space();
        let i2 = s.inv2();
        BipartiteMatrix::from_fn(self.u(), |a, b| self.generator.contains(s.lin2(i2, left[a], i2, right[b])))
    }

    pub fn edge_count(&self) -> u64 {
        (0..self.u())
            .map(|a| (0..self.u()).filter(|&b| self.has_edge(a, b)).count() as u64)
            .sum()
    }

    pub fn density(&self) -> f64 {
        self.edge_count() as f64 / (self.u() * self.u()) as f64
    }
}
