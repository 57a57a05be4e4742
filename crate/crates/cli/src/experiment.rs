use std::path::{Path, PathBuf};

use anyhow::{bail, Result};
use clap::{Args, Subcommand, ValueEnum};
use fpreg_core::cayley::{certificate_soundness, BipartiteMatrix, PetalGraph};
use fpreg_core::fourier::identity_sweep;
use fpreg_core::randmodel::{
    empirical_tail, fourier_sup_report, mc_density_failure, mc_klr11, optimized_tail, BuiltinAdversary,
};
use fpreg_core::regularity::{
    classify_vectors, default_floor, regularize, regularize_multi, tower, RegularityReport, RegularizeParams,
};
use fpreg_core::threeap::{
    capset_max, count_3aps_fourier, count_3aps_naive, density_test, find_nontrivial_3ap, flower_find, split_canonical,
    validate_flower,
};
use fpreg_core::{Point, SpaceDescriptor, SubspaceBasis};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::emit::{fmt_float, Table};
use crate::input::SetInput;

/// One experiment, as given on the command line or in a config file.
#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Experiment {
    /// Parseval, Plancherel, inversion and convolution residuals on random triples
    FourierCheck(FourierCheckArgs),
    /// Energy-increment regularization of one set
    Regularize(RegularizeArgs),
    /// Simultaneous regularization of a set split into m parts
    RegularizeMulti(RegularizeMultiArgs),
    /// Exact 3AP counts, naive and spectral
    RothCount(SetArgs),
    /// Largest 3AP-free subset of a small space
    Capset(CapsetArgs),
    /// Random alpha-subsets of R searched for 3AP-free ones
    DensityTest(DensityTestArgs),
    /// Flower search and independent validation
    FlowerFind(FlowerFindArgs),
    /// Fourier certificate for (sigma, delta)-regularity plus sampled edge checks
    SigmaCert(SigmaCertArgs),
    /// Empirical tail of N Re 1_R(xi) against the exponential bound
    TailBound(TailBoundArgs),
    /// Adversarial random subgraph experiment
    Klr11(Klr11Args),
    /// Tower function W(t)
    Tower(TowerArgs),
    /// Monte Carlo failure estimate for (alpha, 3AP)-density of random sets
    DensityFailure(DensityFailureArgs),
    /// Largest nontrivial Fourier coefficient against |R| / (N ln N)
    FourierSup(SetArgs),
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FourierCheckArgs {
    #[arg(long)]
    pub p: u32,
    #[arg(long)]
    pub n: u32,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-9)]
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

fn default_tolerance() -> f64 {
    1e-9
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetArgs {
    #[arg(long)]
    pub p: u32,
    #[arg(long)]
    pub n: u32,
    #[command(flatten)]
    #[serde(default)]
    pub input: SetInput,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegularizeArgs {
    #[arg(long)]
    pub p: u32,
    #[arg(long)]
    pub n: u32,
    #[command(flatten)]
    #[serde(default)]
    pub input: SetInput,
    #[arg(long)]
    pub eps: f64,
    #[arg(long)]
    pub alpha: f64,
    /// Smallest admissible |H|; defaults to max(1, sigma N) with the tower sigma
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub floor: Option<usize>,
    /// Certificate delta of an ambient set, enabling the energy ceiling check
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegularizeMultiArgs {
    #[arg(long)]
    pub p: u32,
    #[arg(long)]
    pub n: u32,
    #[command(flatten)]
    #[serde(default)]
    pub input: SetInput,
    /// Number of parts in the canonical split
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub eps: f64,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub floor: Option<usize>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapsetArgs {
    #[arg(long)]
    pub p: u32,
    #[arg(long)]
    pub n: u32,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityTestArgs {
    #[arg(long)]
    pub p: u32,
    #[arg(long)]
    pub n: u32,
    #[command(flatten)]
    #[serde(default)]
    pub input: SetInput,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub trials: usize,
    #[arg(long)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowerFindArgs {
    #[arg(long)]
    pub p: u32,
    #[arg(long)]
    pub n: u32,
    #[command(flatten)]
    #[serde(default)]
    pub input: SetInput,
    #[arg(long, default_value_t = 3)]
    pub m: usize,
    #[arg(long)]
    pub eps: f64,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1)]
    #[serde(default = "one")]
    pub floor: usize,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SigmaCertArgs {
    #[arg(long)]
    pub p: u32,
    #[arg(long)]
    pub n: u32,
    #[command(flatten)]
    #[serde(default)]
    pub input: SetInput,
    #[arg(long)]
    pub sigma: f64,
    #[arg(long)]
    pub delta: f64,
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    #[arg(long)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TailBoundArgs {
    #[arg(long)]
    pub p: u32,
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub q: f64,
    #[arg(long)]
    pub lambda: f64,
    /// Frequency index (nonzero)
    #[arg(long, default_value_t = 1)]
    pub xi: u32,
    #[arg(long)]
    pub trials: usize,
    #[arg(long)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphKind {
    Complete,
    Empty,
    Petal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AdversaryKind {
    Trivial,
    Greedy,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Klr11Args {
    #[arg(long)]
    pub p: u32,
    #[arg(long)]
    pub n: u32,
    #[arg(long, value_enum)]
    pub graph: GraphKind,
    /// Side size for complete and empty graphs
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<usize>,
    /// The generating set A of a petal graph
    #[command(flatten)]
    #[serde(default)]
    pub input: SetInput,
    /// H is spanned by the first h-dim coordinate vectors
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_dim: Option<usize>,
    #[arg(long, default_value_t = 0)]
    #[serde(default)]
    pub v1: u32,
    #[arg(long, default_value_t = 0)]
    #[serde(default)]
    pub v2: u32,
    #[arg(long)]
    pub t1: usize,
    #[arg(long)]
    pub t2: usize,
    #[arg(long, value_enum, default_value_t = AdversaryKind::Trivial)]
    pub adversary: AdversaryKind,
    #[arg(long)]
    pub trials: usize,
    #[arg(long)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TowerArgs {
    #[arg(long)]
    pub p: u32,
    #[arg(long)]
    pub t: u64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityFailureArgs {
    #[arg(long)]
    pub p: u32,
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub r: usize,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub outer: usize,
    #[arg(long)]
    pub inner: usize,
    #[arg(long)]
    pub seed: u64,
}

/// The outcome of one experiment before formatting.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub result: Value,
    pub table: Table,
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}

fn kv_table(pairs: &[(&str, String)]) -> Table {
    Table {
        header: pairs.iter().map(|(k, _)| k.to_string()).collect(),
        rows: vec![pairs.iter().map(|(_, v)| v.clone()).collect()],
    }
}

fn step_table(report: &RegularityReport) -> Table {
    Table {
        header: ["step", "size", "index", "energy", "irregular_mass"].map(String::from).to_vec(),
        rows: report
            .steps
            .iter()
            .map(|s| {
                vec![s.step.to_string(), s.size.to_string(), s.index.to_string(), fmt_float(s.energy), s.irregular_mass.to_string()]
            })
            .collect(),
    }
}

fn params(space: &SpaceDescriptor, eps: f64, alpha: f64, floor: Option<usize>, delta: Option<f64>, m: usize) -> RegularizeParams {
    RegularizeParams {
        eps,
        alpha,
        floor: floor.unwrap_or_else(|| default_floor(space, eps, alpha, m)),
        certified_delta: delta,
    }
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::FourierCheck(_) => "fourier-check",
            Experiment::Regularize(_) => "regularize",
            Experiment::RegularizeMulti(_) => "regularize-multi",
            Experiment::RothCount(_) => "roth-count",
            Experiment::Capset(_) => "capset",
            Experiment::DensityTest(_) => "density-test",
            Experiment::FlowerFind(_) => "flower-find",
            Experiment::SigmaCert(_) => "sigma-cert",
            Experiment::TailBound(_) => "tail-bound",
            Experiment::Klr11(_) => "klr11",
            Experiment::Tower(_) => "tower",
            Experiment::DensityFailure(_) => "density-failure",
            Experiment::FourierSup(_) => "fourier-sup",
        }
    }

    fn input_mut(&mut self) -> Option<&mut SetInput> {
        match self {
            Experiment::Regularize(a) => Some(&mut a.input),
            Experiment::RegularizeMulti(a) => Some(&mut a.input),
            Experiment::RothCount(a) | Experiment::FourierSup(a) => Some(&mut a.input),
            Experiment::DensityTest(a) => Some(&mut a.input),
            Experiment::FlowerFind(a) => Some(&mut a.input),
            Experiment::SigmaCert(a) => Some(&mut a.input),
            Experiment::Klr11(a) => Some(&mut a.input),
            _ => None,
        }
    }

    /// Resolves relative set paths against a config file's directory.
    pub fn rebase(&mut self, dir: &Path) {
        if let Some(input) = self.input_mut() {
            input.rebase(dir);
        }
    }

    pub fn input_path(&self) -> Option<PathBuf> {
        self.clone().input_mut().and_then(|i| i.path().map(Path::to_path_buf))
    }

    pub fn execute(&self) -> Result<Outcome> {
        match self {
            Experiment::FourierCheck(a) => {
                let space = SpaceDescriptor::new(a.p, a.n)?;
                let sweep = identity_sweep(space, a.trials, a.seed)?;
                let table = Table {
                    header: ["trial", "dim", "parseval", "plancherel", "inversion", "convolution"].map(String::from).to_vec(),
                    rows: sweep
                        .trials
                        .iter()
                        .enumerate()
                        .map(|(t, r)| {
                            let x = r.report;
                            vec![
                                t.to_string(),
                                r.dim.to_string(),
                                fmt_float(x.parseval),
                                fmt_float(x.plancherel),
                                fmt_float(x.inversion),
                                fmt_float(x.convolution),
                            ]
                        })
                        .collect(),
                };
                let passed = sweep.max.max() <= a.tolerance;
                Ok(Outcome { result: json!({"max": sweep.max, "trials": sweep.trials, "passed": passed}), table })
            }
            Experiment::Regularize(a) => {
                let space = SpaceDescriptor::new(a.p, a.n)?;
                let set = a.input.load(space)?;
                let prm = params(&space, a.eps, a.alpha, a.floor, a.delta, 1);
                let report = regularize(&set, &prm)?;
                let reverified = classify_vectors(&set, &report.final_subspace, a.eps)?.subspace_regular;
                let table = step_table(&report);
                Ok(Outcome {
                    result: json!({"floor": prm.floor, "report": to_value(&report)?, "reverified": reverified}),
                    table,
                })
            }
            Experiment::RegularizeMulti(a) => {
                let space = SpaceDescriptor::new(a.p, a.n)?;
                let set = a.input.load(space)?;
                let parts = split_canonical(&set, a.m)?;
                let prm = params(&space, a.eps, a.alpha, a.floor, a.delta, a.m);
                let report = regularize_multi(&parts, &prm)?;
                let reverified = parts
                    .iter()
                    .map(|p| Ok(classify_vectors(p, &report.final_subspace, a.eps)?.subspace_regular))
                    .collect::<Result<Vec<bool>>>()?;
                let table = step_table(&report);
                Ok(Outcome {
                    result: json!({"floor": prm.floor, "part_sizes": parts.iter().map(|p| p.card()).collect::<Vec<_>>(),
                                   "report": to_value(&report)?, "reverified": reverified}),
                    table,
                })
            }
            Experiment::RothCount(a) => {
                let space = SpaceDescriptor::new(a.p, a.n)?;
                let set = a.input.load(space)?;
                let total = count_3aps_naive(&set, true);
                let spectral = count_3aps_fourier(&set);
                let first = find_nontrivial_3ap(&set);
                let nontrivial = total - set.card() as u64;
                let table = kv_table(&[
                    ("size", set.card().to_string()),
                    ("total", total.to_string()),
                    ("nontrivial", nontrivial.to_string()),
                    ("fourier", spectral.to_string()),
                ]);
                Ok(Outcome {
                    result: json!({"size": set.card(), "total": total, "nontrivial": nontrivial, "fourier": spectral,
                                   "agree": total == spectral, "first": first}),
                    table,
                })
            }
            Experiment::Capset(a) => {
                let r = capset_max(a.p, a.n)?;
                let table = kv_table(&[("size", r.size.to_string()), ("method", format!("{:?}", r.method).to_lowercase())]);
                Ok(Outcome { result: to_value(&r)?, table })
            }
            Experiment::DensityTest(a) => {
                let space = SpaceDescriptor::new(a.p, a.n)?;
                let set = a.input.load(space)?;
                let r = density_test(&set, a.alpha, a.trials, a.seed)?;
                let table = kv_table(&[
                    ("subset_size", r.subset_size.to_string()),
                    ("trials", r.trials.to_string()),
                    ("failures", r.failures.to_string()),
                    ("frequency", fmt_float(r.frequency)),
                ]);
                Ok(Outcome { result: to_value(&r)?, table })
            }
            Experiment::FlowerFind(a) => {
                let space = SpaceDescriptor::new(a.p, a.n)?;
                let set = a.input.load(space)?;
                let search = flower_find(&set, a.m, a.eps, a.alpha, a.floor)?;
                let validation = search.flower.as_ref().map(|f| validate_flower(f, &set)).transpose()?;
                let passed = validation.as_ref().map(|v| v.passed());
                let rows = search
                    .flower
                    .as_ref()
                    .map(|f| f.petals.iter().enumerate().map(|(l, (x, y))| vec![l.to_string(), x.to_string(), y.to_string()]).collect())
                    .unwrap_or_default();
                Ok(Outcome {
                    result: json!({"search": to_value(&search)?, "validation": validation, "validated": passed}),
                    table: Table { header: ["petal", "x", "y"].map(String::from).to_vec(), rows },
                })
            }
            Experiment::SigmaCert(a) => {
                let space = SpaceDescriptor::new(a.p, a.n)?;
                let set = a.input.load(space)?;
                let r = certificate_soundness(&set, a.sigma, a.delta, a.samples, a.seed)?;
                let table = kv_table(&[
                    ("fourier_sup", fmt_float(r.certificate.fourier_sup)),
                    ("threshold", fmt_float(r.certificate.threshold)),
                    ("certified", r.certificate.passed.to_string()),
                    ("violations", r.violations.to_string()),
                ]);
                Ok(Outcome { result: to_value(&r)?, table })
            }
            Experiment::TailBound(a) => {
                let space = SpaceDescriptor::new(a.p, a.n)?;
                let tail = empirical_tail(space, a.q, a.lambda, Point(a.xi), a.trials, a.seed)?;
                let r = (a.q * space.size() as f64).round() as usize;
                let optimized = optimized_tail(a.q, space.size(), r)?;
                let table = kv_table(&[
                    ("frequency", fmt_float(tail.frequency)),
                    ("bound", fmt_float(tail.bound)),
                    ("stderr", fmt_float(tail.stderr)),
                    ("within", tail.within.to_string()),
                ]);
                Ok(Outcome { result: json!({"tail": tail, "optimized": optimized}), table })
            }
            Experiment::Klr11(a) => {
                let space = SpaceDescriptor::new(a.p, a.n)?;
                let g = match a.graph {
                    GraphKind::Complete | GraphKind::Empty => {
                        let Some(u) = a.u else { bail!("--u is required for complete and empty graphs") };
                        if a.graph == GraphKind::Complete {
                            BipartiteMatrix::complete(u)
                        } else {
                            BipartiteMatrix::empty(u)
                        }
                    }
                    GraphKind::Petal => {
                        let Some(d) = a.h_dim else { bail!("--h-dim is required for petal graphs") };
                        if d > a.n as usize {
                            bail!("--h-dim {d} exceeds n = {}", a.n);
                        }
                        let set = a.input.load(space)?;
                        let basis: Vec<Point> = (0..d as u32).map(|i| Point(a.p.pow(i))).collect();
                        let h = SubspaceBasis::span(space, &basis);
                        PetalGraph::new(set, h, space.point(a.v1 as u64)?, space.point(a.v2 as u64)?)?.to_matrix()
                    }
                };
                let adversary = match a.adversary {
                    AdversaryKind::Trivial => BuiltinAdversary::Trivial,
                    AdversaryKind::Greedy => BuiltinAdversary::Greedy,
                };
                let r = mc_klr11(&g, a.t1, a.t2, &adversary, a.trials, a.seed)?;
                let table = kv_table(&[
                    ("u", r.u.to_string()),
                    ("density", fmt_float(r.density)),
                    ("no_edge", r.no_edge.to_string()),
                    ("frequency", fmt_float(r.frequency)),
                ]);
                Ok(Outcome { result: to_value(&r)?, table })
            }
            Experiment::Tower(a) => {
                SpaceDescriptor::new(a.p, 1)?;
                let w = tower(a.t, a.p)?;
                let value = w.exact().map_or("overflow".to_string(), |v| v.to_string());
                Ok(Outcome { result: to_value(&w)?, table: kv_table(&[("t", a.t.to_string()), ("value", value)]) })
            }
            Experiment::DensityFailure(a) => {
                let space = SpaceDescriptor::new(a.p, a.n)?;
                let r = mc_density_failure(space, a.r, a.alpha, a.outer, a.inner, a.seed)?;
                let table = Table {
                    header: vec!["trial".into(), "witnessed".into()],
                    rows: r.witnessed.iter().enumerate().map(|(t, w)| vec![t.to_string(), w.to_string()]).collect(),
                };
                Ok(Outcome { result: to_value(&r)?, table })
            }
            Experiment::FourierSup(a) => {
                let space = SpaceDescriptor::new(a.p, a.n)?;
                let set = a.input.load(space)?;
                let r = fourier_sup_report(&set)?;
                let table = kv_table(&[
                    ("size", r.size.to_string()),
                    ("sup", fmt_float(r.sup)),
                    ("bound", fmt_float(r.bound)),
                    ("passed", r.passed.to_string()),
                ]);
                Ok(Outcome { result: to_value(&r)?, table })
            }
        }
    }
}
