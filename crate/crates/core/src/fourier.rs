//! Discrete Fourier analysis on `V` and on subspaces `H ≤ V`.
//!
//! A function on `H` is held in the coordinate order of `H`'s canonical
//! basis, which identifies `H` with `F_p^d`. The characters of `H` are the
//! cosets `V/H^⊥`, indexed here by the packed coordinates `η_k = <b_k, ξ>`;
//! each one is represented by its minimal-index frequency `ξ`. The forward
//! transform is
//!
//! ```text
//! f^(ξ) = E_{x ∈ H} f(x) e(-<x, ξ>/p)
//! ```
//!
//! computed as `d` sequential length-`p` passes.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::vectorspace::{Point, SpaceDescriptor, SubspaceBasis};

/// `ω^k = exp(-2πik/p)` for `k < p`.
pub(crate) fn forward_roots(p: u32) -> Vec<Complex64> {
    (0..p)
        .map(|k| {
            let (s, c) = (2.0 * PI * k as f64 / p as f64).sin_cos();
            Complex64::new(c, -s)
        })
        .collect()
}

/// Unnormalised transform over `(Z/p)^dim` in place: `out(η) = Σ_c x(c) ω^{<c,η>}`.
pub(crate) fn transform_in_place(data: &mut [Complex64], p: usize, dim: usize, roots: &[Complex64]) {
    debug_assert_eq!(data.len(), p.pow(dim as u32));
    let mut fiber = vec![Complex64::new(0.0, 0.0); p];
    let mut out = vec![Complex64::new(0.0, 0.0); p];
    let mut stride = 1;
    for _ in 0..dim {
        let block = stride * p;
        for start in (0..data.len()).step_by(block) {
            for inner in 0..stride {
                let base = start + inner;
                for (j, slot) in fiber.iter_mut().enumerate() {
                    *slot = data[base + j * stride];
                }
                for (m, o) in out.iter_mut().enumerate() {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (j, &x) in fiber.iter().enumerate() {
                        acc += x * roots[(j * m) % p];
                    }
                    *o = acc;
                }
                for (m, &o) in out.iter().enumerate() {
                    data[base + m * stride] = o;
                }
            }
        }
        stride = block;
    }
}

/// Normalised forward transform of values given in `H`'s coordinate order.
pub fn dft_values(values: &[f64], h: &SubspaceBasis) -> Vec<Complex64> {
    let p = h.space().p();
    let mut data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    transform_in_place(&mut data, p as usize, h.dim(), &forward_roots(p));
    let scale = 1.0 / values.len() as f64;
    data.iter_mut().for_each(|z| *z *= scale);
    data
}

/// Inverse of [`dft_values`]: `f(x) = Σ_ξ f^(ξ) e(<x, ξ>/p)`, complex output.
pub fn idft_values(entries: &[Complex64], h: &SubspaceBasis) -> Vec<Complex64> {
    let p = h.space().p();
    let roots: Vec<Complex64> = forward_roots(p).iter().map(|z| z.conj()).collect();
    let mut data = entries.to_vec();
    transform_in_place(&mut data, p as usize, h.dim(), &roots);
    data
}

/// A real function on `V` or on a subspace of it.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseFunction {
    space: SpaceDescriptor,
    support: Option<SubspaceBasis>,
    values: Vec<f64>,
}

impl DenseFunction {
    /// A function on all of `V`, indexed by flat point index.
    pub fn on_space(space: SpaceDescriptor, values: Vec<f64>) -> Result<Self> {
        if values.len() != space.size() {
            return invalid(format!("expected {} values, got {}", space.size(), values.len()));
        }
        Self::check_finite(&values)?;
        Ok(DenseFunction { space, support: None, values })
    }

    /// A function on `H`, indexed by `H`'s coordinate order.
    pub fn on_subspace(h: &SubspaceBasis, values: Vec<f64>) -> Result<Self> {
        if values.len() != h.size() {
            return invalid(format!("expected {} values, got {}", h.size(), values.len()));
        }
        Self::check_finite(&values)?;
        let support = if h.is_whole() { None } else { Some(h.clone()) };
        Ok(DenseFunction { space: *h.space(), support, values })
    }

    pub fn from_fn(h: &SubspaceBasis, mut f: impl FnMut(Point) -> f64) -> Result<Self> {
        let values = h.elements().iter().map(|&x| f(x)).collect();
        Self::on_subspace(h, values)
    }

    fn check_finite(values: &[f64]) -> Result<()> {
        if values.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            invalid("function values must be finite")
        }
    }

    pub fn space(&self) -> &SpaceDescriptor {
        &self.space
    }

    /// The support subspace; `None` means all of `V`.
    pub fn support(&self) -> Option<&SubspaceBasis> {
        self.support.as_ref()
    }

    pub fn support_basis(&self) -> SubspaceBasis {
        self.support.clone().unwrap_or_else(|| SubspaceBasis::whole(self.space))
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value_at(&self, x: Point) -> Option<f64> {
        match &self.support {
            None => self.values.get(x.index()).copied(),
            Some(h) => h.contains(x).then(|| self.values[h.coordinate_index(x)]),
        }
    }

    /// Restriction to `h`, which must lie inside the current support.
    pub fn restrict_to(&self, h: &SubspaceBasis) -> Result<DenseFunction> {
        if h.space() != &self.space {
            return Err(Error::SpaceMismatch { left: self.space.to_string(), right: h.space().to_string() });
        }
        let inside = match &self.support {
            None => true,
            Some(s) => h.is_subspace_of(s),
        };
        if !inside {
            return invalid("target subspace is not contained in the function's support");
        }
        if self.support.as_ref().map_or(h.is_whole(), |s| s == h) {
            return Ok(self.clone());
        }
        let values = h.elements().iter().map(|&x| self.value_at(x).unwrap_or(0.0)).collect();
        DenseFunction::on_subspace(h, values)
    }
}

/// Fourier coefficients over a subspace `H`, one per character of `H`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    base: SubspaceBasis,
    entries: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(base: SubspaceBasis, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != base.size() {
            return invalid(format!("spectrum over |H| = {} needs {} entries, got {}", base.size(), base.size(), entries.len()));
        }
        Ok(Spectrum { base, entries })
    }

    pub fn base(&self) -> &SubspaceBasis {
        &self.base
    }

    /// Entries in character-coordinate order.
    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `f^(ξ)` for any `ξ ∈ V`; depends only on `ξ` modulo `H^⊥`.
    pub fn at(&self, xi: Point) -> Complex64 {
        self.entries[self.base.character_index(xi)]
    }

    /// `(ξ, f^(ξ))` pairs over canonical dual representatives, ascending in `ξ`.
    pub fn by_frequency(&self) -> Vec<(Point, Complex64)> {
        let mut out: Vec<(Point, Complex64)> = self
            .base
            .dual_representatives()
            .iter()
            .zip(&self.entries)
            .map(|(&xi, &z)| (xi, z))
            .collect();
        out.sort_by_key(|(xi, _)| *xi);
        out
    }

    /// Largest modulus over characters outside `H^⊥` together with the
    /// minimal-index frequency attaining it (moduli within `1e-12` relative
    /// count as ties). `None` when `H = {0}`.
    pub fn nontrivial_sup(&self) -> Option<(f64, Point)> {
        let reps = self.base.dual_representatives();
        let max = self.entries.iter().skip(1).map(|z| z.norm()).fold(f64::NEG_INFINITY, f64::max);
        if !max.is_finite() {
            return None;
        }
        let tol = 1e-12 * max.max(1e-300);
        let witness = self
            .entries
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, z)| z.norm() >= max - tol)
            .map(|(eta, _)| reps[eta])
            .min()?;
        Some((max, witness))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpectrumWire {
    p: u32,
    n: u32,
    h_rows: Vec<Vec<u8>>,
    entries: Vec<(u32, f64, f64)>,
}

impl Serialize for Spectrum {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        SpectrumWire {
            p: self.base.space().p(),
            n: self.base.space().n(),
            h_rows: self.base.rows().to_vec(),
            entries: self.by_frequency().into_iter().map(|(xi, z)| (xi.0, z.re, z.im)).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Spectrum {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let w = SpectrumWire::deserialize(deserializer)?;
        let space = SpaceDescriptor::new(w.p, w.n).map_err(D::Error::custom)?;
        let rows = w.h_rows.iter().map(|r| space.from_digits(r)).collect::<Result<Vec<_>>>().map_err(D::Error::custom)?;
        let base = SubspaceBasis::span(space, &rows);
        if w.entries.len() != base.size() {
            return Err(D::Error::custom("entry count does not match |H|"));
        }
        let mut entries = vec![None; base.size()];
        for (xi, re, im) in w.entries {
            let xi = space.point(xi as u64).map_err(D::Error::custom)?;
            let eta = base.character_index(xi);
            if base.dual_representatives()[eta] != xi || entries[eta].is_some() {
                return Err(D::Error::custom(format!("frequency {xi} is not a fresh canonical dual representative")));
            }
            entries[eta] = Some(Complex64::new(re, im));
        }
        Ok(Spectrum { base, entries: entries.into_iter().map(|z| z.unwrap()).collect() })
    }
}

/// Transform of `f` over `h`; `f` is restricted to `h` first when its
/// support is larger.
pub fn dft(f: &DenseFunction, h: &SubspaceBasis) -> Result<Spectrum> {
    let restricted = f.restrict_to(h)?;
    Ok(Spectrum { base: h.clone(), entries: dft_values(&restricted.values, h) })
}

/// Fourier inversion; the result is supported on the spectrum's base.
pub fn idft(s: &Spectrum) -> DenseFunction {
    let values: Vec<f64> = idft_values(&s.entries, &s.base).iter().map(|z| z.re).collect();
    DenseFunction::on_subspace(&s.base, values).expect("inverse transform of finite entries is finite")
}

/// Index table of `c + w` over all packed coordinates `c` of `(Z/p)^dim`.
fn shifted_indices(w: usize, p: usize, dim: usize) -> Vec<usize> {
    let mut table = vec![0usize];
    let mut rem = w;
    let mut weight = 1;
    for _ in 0..dim {
        let wk = rem % p;
        rem /= p;
        let prev = std::mem::take(&mut table);
        table.reserve(prev.len() * p);
        for j in 0..p {
            let digit = (j + wk) % p;
            table.extend(prev.iter().map(|&i| digit * weight + i));
        }
        weight *= p;
    }
    table
}

/// `(f * g)(h) = E_{x ∈ H} f(x) g(h - x)`, by direct summation.
pub fn convolve(f: &DenseFunction, g: &DenseFunction, h: &SubspaceBasis) -> Result<DenseFunction> {
    let f = f.restrict_to(h)?;
    let g = g.restrict_to(h)?;
    let p = h.space().p() as usize;
    let dim = h.dim();
    let size = h.size();
    let mut out = vec![0.0; size];
    for (x, &fx) in f.values.iter().enumerate() {
        if fx == 0.0 {
            continue;
        }
        // out[c + x] += f(x) g(c)
        let shift = shifted_indices(x, p, dim);
        for (c, &gc) in g.values.iter().enumerate() {
            out[shift[c]] += fx * gc;
        }
    }
    let scale = 1.0 / size as f64;
    out.iter_mut().for_each(|v| *v *= scale);
    DenseFunction::on_subspace(h, out)
}

/// Maximum deviations in the four classical identities over `H`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    /// `|E f² - Σ |f^|²|`
    pub parseval: f64,
    /// `|E fg - Σ f^ conj(g^)|`
    pub plancherel: f64,
    /// `max_x |Σ f^(ξ) e(<x,ξ>) - f(x)|`
    pub inversion: f64,
    /// `max_ξ |(f*g)^(ξ) - f^(ξ) g^(ξ)|`
    pub convolution: f64,
}

impl IdentityReport {
    pub fn max(&self) -> f64 {
        self.parseval.max(self.plancherel).max(self.inversion).max(self.convolution)
    }
}

pub fn identity_suite(f: &DenseFunction, g: &DenseFunction, h: &SubspaceBasis) -> Result<IdentityReport> {
    let fr = f.restrict_to(h)?;
    let gr = g.restrict_to(h)?;
    let size = h.size() as f64;
    let fh = dft(&fr, h)?;
    let gh = dft(&gr, h)?;

    let mean_sq = fr.values.iter().map(|v| v * v).sum::<f64>() / size;
    let spectral_sq: f64 = fh.entries.iter().map(|z| z.norm_sqr()).sum();
    let mean_fg = fr.values.iter().zip(&gr.values).map(|(a, b)| a * b).sum::<f64>() / size;
    let spectral_fg: Complex64 = fh.entries.iter().zip(&gh.entries).map(|(a, b)| a * b.conj()).sum();

    let back = idft_values(&fh.entries, h);
    let inversion = back
        .iter()
        .zip(&fr.values)
        .map(|(z, &v)| (z - Complex64::new(v, 0.0)).norm())
        .fold(0.0, f64::max);

    let conv = dft(&convolve(&fr, &gr, h)?, h)?;
    let convolution = conv
        .entries
        .iter()
        .zip(fh.entries.iter().zip(&gh.entries))
        .map(|(c, (a, b))| (c - a * b).norm())
        .fold(0.0, f64::max);

    Ok(IdentityReport {
        parseval: (mean_sq - spectral_sq).abs(),
        plancherel: (Complex64::new(mean_fg, 0.0) - spectral_fg).norm(),
        inversion,
        convolution,
    })
}

/// A subspace of `space` of dimension `dim` spanned by uniform vectors.
pub fn random_subspace(space: SpaceDescriptor, dim: usize, rng: &mut impl Rng) -> Result<SubspaceBasis> {
    if dim > space.n() as usize {
        return invalid(format!("dimension {dim} exceeds n = {}", space.n()));
    }
    let mut vectors = Vec::with_capacity(dim);
    let mut h = SubspaceBasis::zero(space);
    while h.dim() < dim {
        let v = Point(rng.gen_range(0..space.size() as u32));
        if !h.contains(v) {
            vectors.push(v);
            h = SubspaceBasis::span(space, &vectors);
        }
    }
    Ok(h)
}

/// One seeded `(f, g, H)` triple of an identity sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityTrial {
    pub dim: usize,
    pub report: IdentityReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentitySweep {
    pub trials: Vec<IdentityTrial>,
    /// Componentwise maximum over all trials.
    pub max: IdentityReport,
}

/// Runs [`identity_suite`] on `trials` random triples: `dim H` uniform in
/// `0..=n`, values of `f` and `g` uniform in `[-1, 1]`. Trial `t` uses
/// substream `t`.
pub fn identity_sweep(space: SpaceDescriptor, trials: usize, seed: u64) -> Result<IdentitySweep> {
    let mut out = Vec::with_capacity(trials);
    let mut max = IdentityReport { parseval: 0.0, plancherel: 0.0, inversion: 0.0, convolution: 0.0 };
    for t in 0..trials {
        let mut rng = crate::rng::substream(seed, t as u64);
        let dim = rng.gen_range(0..=space.n() as usize);
        let h = random_subspace(space, dim, &mut rng)?;
        let f = DenseFunction::on_subspace(&h, (0..h.size()).map(|_| rng.gen_range(-1.0..=1.0)).collect())?;
        let g = DenseFunction::on_subspace(&h, (0..h.size()).map(|_| rng.gen_range(-1.0..=1.0)).collect())?;
        let report = identity_suite(&f, &g, &h)?;
        max.parseval = max.parseval.max(report.parseval);
        max.plancherel = max.plancherel.max(report.plancherel);
        max.inversion = max.inversion.max(report.inversion);
        max.convolution = max.convolution.max(report.convolution);
        out.push(IdentityTrial { dim, report });
    }
    Ok(IdentitySweep { trials: out, max })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vectorspace::{localized_values, CosetSystem, DenseSubset};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    /// Direct O(|H|²) summation over actual points and the pairing.
    fn naive_dft(f: &DenseFunction, h: &SubspaceBasis) -> Vec<Complex64> {
        let s = h.space();
        let p = s.p() as f64;
        h.dual_representatives()
            .iter()
            .map(|&xi| {
                let sum: Complex64 = h
                    .elements()
                    .iter()
                    .map(|&x| {
                        let ang = -2.0 * PI * s.pairing(x, xi) as f64 / p;
                        f.value_at(x).unwrap() * Complex64::new(ang.cos(), ang.sin())
                    })
                    .sum();
                sum / h.size() as f64
            })
            .collect()
    }

    fn space(p: u32, n: u32) -> SpaceDescriptor {
        SpaceDescriptor::new(p, n).unwrap()
    }

    fn close(a: Complex64, b: f64) -> bool {
        (a - Complex64::new(b, 0.0)).norm() < 1e-12
    }

    #[test]
    fn constant_has_dc_only() {
        let s = space(3, 2);
        let v = SubspaceBasis::whole(s);
        let f = DenseFunction::on_space(s, vec![1.0; 9]).unwrap();
        let spectrum = dft(&f, &v).unwrap();
        assert!(close(spectrum.at(Point::ZERO), 1.0));
        assert!(spectrum.entries().iter().skip(1).all(|&z| close(z, 0.0)));
    }

    #[test]
    fn delta_is_flat() {
        let s = space(3, 1);
        let v = SubspaceBasis::whole(s);
        let f = DenseFunction::on_space(s, vec![1.0, 0.0, 0.0]).unwrap();
        let spectrum = dft(&f, &v).unwrap();
        assert!(spectrum.entries().iter().all(|&z| close(z, 1.0 / 3.0)));
    }

    #[test]
    fn line_indicator_spectrum() {
        let s = space(3, 2);
        let v = SubspaceBasis::whole(s);
        let line = DenseSubset::from_predicate(s, |x| s.digit(x, 1) == 0);
        let f = DenseFunction::on_space(s, line.indicator()).unwrap();
        let spectrum = dft(&f, &v).unwrap();
        for xi in s.points() {
            let expect = if s.digit(xi, 0) == 0 { 1.0 / 3.0 } else { 0.0 };
            assert!(close(spectrum.at(xi), expect), "xi = {xi}");
        }
    }

    #[test]
    fn inverse_edge_cases() {
        let s = space(5, 2);
        let v = SubspaceBasis::whole(s);
        let zero = idft(&Spectrum::new(v.clone(), vec![Complex64::new(0.0, 0.0); 25]).unwrap());
        assert!(zero.values().iter().all(|&x| x == 0.0));
        let mut dc = vec![Complex64::new(0.0, 0.0); 25];
        dc[0] = Complex64::new(2.5, 0.0);
        let c = idft(&Spectrum::new(v, dc).unwrap());
        assert!(c.values().iter().all(|&x| (x - 2.5).abs() < 1e-12));
    }

    #[test]
    fn convolution_identities() {
        let s = space(3, 2);
        let h = SubspaceBasis::span(s, &[Point(1)]);
        let ones = DenseFunction::from_fn(&h, |_| 1.0).unwrap();
        let c = convolve(&ones, &ones, &h).unwrap();
        assert!(c.values().iter().all(|&x| (x - 1.0).abs() < 1e-12));
        let f = DenseFunction::on_subspace(&h, vec![0.5, -1.0, 2.0]).unwrap();
        let delta = DenseFunction::from_fn(&h, |x| if x == Point::ZERO { 1.0 } else { 0.0 }).unwrap();
        let c = convolve(&f, &delta, &h).unwrap();
        for (a, b) in c.values().iter().zip(f.values()) {
            assert!((a - b / 3.0).abs() < 1e-12);
        }
        let other = SubspaceBasis::span(s, &[Point(3)]);
        assert!(convolve(&f, &f, &other).is_err());
    }

    #[test]
    fn trivial_identity_suite() {
        let s = space(5, 2);
        let h = SubspaceBasis::span(s, &[Point(6)]);
        let ones = DenseFunction::from_fn(&h, |_| 1.0).unwrap();
        let r = identity_suite(&ones, &ones, &h).unwrap();
        assert!(r.max() <= 1e-12, "{r:?}");
        let delta = DenseFunction::from_fn(&h, |x| if x == Point::ZERO { 1.0 } else { 0.0 }).unwrap();
        let spectrum = dft(&delta, &h).unwrap();
        let total: f64 = spectrum.entries().iter().map(|z| z.norm_sqr()).sum();
        assert!((total - 1.0 / 5.0).abs() < 1e-12);
    }

    #[test]
    fn spectrum_wire_round_trip() {
        let s = space(3, 3);
        let h = SubspaceBasis::span(s, &[Point(4), Point(9)]);
        let f = DenseFunction::from_fn(&h, |x| x.0 as f64).unwrap();
        let spectrum = dft(&f, &h).unwrap();
        let json = serde_json::to_string(&spectrum).unwrap();
        let back: Spectrum = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spectrum);
    }

    fn random_subspace(rng: &mut ChaCha20Rng, s: SpaceDescriptor) -> SubspaceBasis {
        let k = rng.gen_range(0..=s.n() as usize);
        let gens: Vec<Point> = (0..k).map(|_| Point(rng.gen_range(0..s.size() as u32))).collect();
        SubspaceBasis::span(s, &gens)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn fast_matches_naive(p in prop::sample::select(vec![3u32, 5, 7]), n in 1u32..=3, seed in any::<u64>()) {
            let s = space(p, n);
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let h = random_subspace(&mut rng, s);
            let f = DenseFunction::on_space(s, (0..s.size()).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
            let fast = dft(&f, &h).unwrap();
            let slow = naive_dft(&f.restrict_to(&h).unwrap(), &h);
            for (a, b) in fast.entries().iter().zip(&slow) {
                prop_assert!((a - b).norm() < 1e-10);
            }
            for xi in s.points() {
                let eta = h.character_index(xi);
                prop_assert!((fast.at(xi) - fast.entries()[eta]).norm() == 0.0);
            }
        }

        #[test]
        fn localisation_symmetries(n in 2u32..=4, seed in any::<u64>()) {
            let s = space(3, n);
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let h = random_subspace(&mut rng, s);
            let a = DenseSubset::from_predicate(s, |_| rng.gen_bool(0.4));
            let perp = h.orthogonal_complement();
            let v = Point(rng.gen_range(0..s.size() as u32));
            let w = s.add(v, h.elements()[rng.gen_range(0..h.size())]);
            let fv = dft_values(&localized_values(&a, &h, v), &h);
            let fw = dft_values(&localized_values(&a, &h, w), &h);
            for (x, y) in fv.iter().zip(&fw) {
                prop_assert!((x.norm() - y.norm()).abs() < 1e-12);
            }
            let count = localized_values(&a, &h, v).iter().sum::<f64>();
            let spectrum = Spectrum::new(h.clone(), fv).unwrap();
            for &xi in perp.elements().iter().take(10) {
                prop_assert!((spectrum.at(xi) - Complex64::new(count / h.size() as f64, 0.0)).norm() < 1e-12);
            }
            let _ = CosetSystem::new(&h);
        }
    }
}
