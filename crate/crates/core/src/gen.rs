//! Synthetic directed graphs and outdegree power-law analysis.

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{CompactDigraph, EdgeList};

pub const DEFAULT_K_MIN: u64 = 5;

/// KS distance above which a power-law fit is flagged as poor. Exact power-law
/// samples and the generator presets stay below 0.05; Erdős–Rényi outdegrees
/// land above 0.2.
pub const POOR_FIT_KS: f64 = 0.1;

#[derive(Debug, Error, PartialEq)]
pub enum GenError {
    #[error("infeasible generator spec: {0}")]
    Infeasible(String),
    #[error("not enough data to fit: {0}")]
    InsufficientData(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    PowerLaw,
    Uniform,
}

impl FromStr for Model {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "powerlaw" | "power-law" => Ok(Model::PowerLaw),
            "uniform" => Ok(Model::Uniform),
            other => Err(format!("unknown model {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenSpec {
    pub model: Model,
    pub node_count: u64,
    pub target_arcs: u64,
    /// Outdegree exponent, power-law model only.
    pub exponent: f64,
    pub seed: u64,
}

/// Desk-scale stand-ins for three real scale-free datasets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Citation-network-like, outdegree exponent 3.126.
    PatentsLike,
    /// Social-network-like, outdegree exponent 2.127.
    OrkutLike,
    /// Web-crawl-like, outdegree exponent 1.516.
    WebgraphLike,
}

impl Preset {
    pub fn exponent(self) -> f64 {
        match self {
            Preset::PatentsLike => 3.126,
            Preset::OrkutLike => 2.127,
            Preset::WebgraphLike => 1.516,
        }
    }

    pub fn spec(self, seed: u64) -> GenSpec {
        let (node_count, target_arcs) = match self {
            Preset::PatentsLike => (200_000, 400_000),
            Preset::OrkutLike => (100_000, 1_000_000),
            Preset::WebgraphLike => (100_000, 2_400_000),
        };
        GenSpec {
            model: Model::PowerLaw,
            node_count,
            target_arcs,
            exponent: self.exponent(),
            seed,
        }
    }
}

impl FromStr for Preset {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "patents-like" => Ok(Preset::PatentsLike),
            "orkut-like" => Ok(Preset::OrkutLike),
            "webgraph-like" => Ok(Preset::WebgraphLike),
            other => Err(format!(
                "unknown preset {other:?} (patents-like, orkut-like, webgraph-like)"
            )),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Preset::PatentsLike => "patents-like",
            Preset::OrkutLike => "orkut-like",
            Preset::WebgraphLike => "webgraph-like",
        })
    }
}

impl GenSpec {
    pub fn validate(&self) -> Result<(), GenError> {
        let n = self.node_count;
        if n == 0 {
            return Err(GenError::Infeasible("node count must be at least 1".into()));
        }
        if n > crate::graph::MAX_NODES {
            return Err(GenError::Infeasible(format!("node count {n} exceeds capacity")));
        }
        let max_arcs = n as u128 * (n as u128 - 1);
        if self.target_arcs as u128 > max_arcs {
            return Err(GenError::Infeasible(format!(
                "{} arcs requested but a simple digraph on {n} nodes holds at most {max_arcs}",
                self.target_arcs
            )));
        }
        if self.model == Model::PowerLaw {
            if !(self.exponent.is_finite() && self.exponent > 1.0) {
                return Err(GenError::Infeasible(format!(
                    "power-law exponent must exceed 1, got {}",
                    self.exponent
                )));
            }
            if n < 2 && self.target_arcs > 0 {
                return Err(GenError::Infeasible("power-law model needs at least 2 nodes".into()));
            }
        }
        Ok(())
    }
}

pub fn generate(spec: &GenSpec) -> Result<EdgeList, GenError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    Ok(match spec.model {
        Model::Uniform => uniform(spec.node_count, spec.target_arcs, &mut rng),
        Model::PowerLaw => power_law(spec, &mut rng),
    })
}

/// `m` distinct arcs drawn uniformly from all `n(n-1)` non-loop arcs, sorted.
fn uniform(n: u64, m: u64, rng: &mut ChaCha8Rng) -> EdgeList {
    if m == 0 {
        return EdgeList::new();
    }
    let span = n * (n - 1);
    let mut picks: Vec<u64> = index::sample(rng, span as usize, m as usize)
        .into_iter()
        .map(|i| i as u64)
        .collect();
    picks.sort_unstable();
    picks
        .into_iter()
        .map(|i| {
            let src = i / (n - 1);
            let r = i % (n - 1);
            (src, if r >= src { r + 1 } else { r })
        })
        .collect()
}

/// Discrete power law `P(k) ∝ k^-γ` on `1..=k_max`, sampled by inverse CDF.
pub struct PowerLawSampler {
    cdf: Vec<f64>,
}

impl PowerLawSampler {
    pub fn new(exponent: f64, k_max: u64) -> PowerLawSampler {
        let mut acc = 0.0;
        let cdf = (1..=k_max.max(1))
            .map(|k| {
                acc += (k as f64).powf(-exponent);
                acc
            })
            .collect();
        PowerLawSampler { cdf }
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> u64 {
        let x = rng.random::<f64>() * self.cdf[self.cdf.len() - 1];
        (self.cdf.partition_point(|&c| c <= x).min(self.cdf.len() - 1) + 1) as u64
    }
}

fn power_law(spec: &GenSpec, rng: &mut ChaCha8Rng) -> EdgeList {
    let n = spec.node_count;
    let m = spec.target_arcs;
    if m == 0 {
        return EdgeList::new();
    }
    let k_max = n - 1;
    let sampler = PowerLawSampler::new(spec.exponent, k_max);
    let raw: Vec<u64> = (0..n).map(|_| sampler.sample(rng)).collect();
    let raw_sum: u64 = raw.iter().sum();

    // Scale to the target with stochastic rounding, then settle the residual
    // one arc at a time so the total is exactly m.
    let scale = m as f64 / raw_sum as f64;
    let mut degrees: Vec<u64> = raw
        .iter()
        .map(|&d| {
            let x = d as f64 * scale;
            let floor = x.floor();
            let up = rng.random::<f64>() < x - floor;
            (floor as u64 + up as u64).min(k_max)
        })
        .collect();
    let mut total: u64 = degrees.iter().sum();
    while total < m {
        let u = rng.random_range(0..n) as usize;
        if degrees[u] < k_max {
            degrees[u] += 1;
            total += 1;
        }
    }
    while total > m {
        let u = rng.random_range(0..n) as usize;
        if degrees[u] > 0 {
            degrees[u] -= 1;
            total -= 1;
        }
    }

    let mut edges = EdgeList {
        pairs: Vec::with_capacity(m as usize),
    };
    let mut targets = Vec::new();
    for (u, &d) in degrees.iter().enumerate() {
        if d == 0 {
            continue;
        }
        let u = u as u64;
        targets.clear();
        targets.extend(
            index::sample(rng, k_max as usize, d as usize)
                .into_iter()
                .map(|t| t as u64)
                .map(|t| if t >= u { t + 1 } else { t }),
        );
        targets.sort_unstable();
        edges.pairs.extend(targets.iter().map(|&t| (u, t)));
    }
    edges
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Out,
    In,
}

impl FromStr for Direction {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "out" => Ok(Direction::Out),
            "in" => Ok(Direction::In),
            other => Err(format!("unknown direction {other:?}")),
        }
    }
}

/// `(degree, node count)` pairs in increasing degree, zero counts omitted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeHistogram {
    pub direction: Direction,
    pub bins: Vec<(u64, u64)>,
}

impl DegreeHistogram {
    pub fn from_degrees<I: IntoIterator<Item = u64>>(direction: Direction, degrees: I) -> Self {
        let mut counts: std::collections::BTreeMap<u64, u64> = Default::default();
        for d in degrees {
            *counts.entry(d).or_default() += 1;
        }
        DegreeHistogram {
            direction,
            bins: counts.into_iter().collect(),
        }
    }

    pub fn node_count(&self) -> u64 {
        self.bins.iter().map(|b| b.1).sum()
    }

    pub fn degree_sum(&self) -> u64 {
        self.bins.iter().map(|&(d, c)| d * c).sum()
    }

    pub fn count(&self, degree: u64) -> u64 {
        self.bins
            .binary_search_by_key(&degree, |b| b.0)
            .map_or(0, |i| self.bins[i].1)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("degree,count\n");
        for (d, c) in &self.bins {
            out.push_str(&format!("{d},{c}\n"));
        }
        out
    }
}

pub fn degree_histogram(g: &CompactDigraph, direction: Direction) -> DegreeHistogram {
    let bit = match direction {
        Direction::Out => 0b01,
        Direction::In => 0b10,
    };
    let degrees = (0..g.node_count() as u32).map(|u| {
        g.neighbors_unchecked(u)
            .iter()
            .filter(|e| e.code_bits() & bit != 0)
            .count() as u64
    });
    DegreeHistogram::from_degrees(direction, degrees)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub k_min: u64,
    /// Nodes with degree at least `k_min`.
    pub sample_size: u64,
    /// Mean log-likelihood per sample at the estimate.
    pub log_likelihood: f64,
    /// Log-likelihood ratio against a geometric tail fitted to the same
    /// sample, per sample. Negative means the geometric tail explains the data better.
    pub likelihood_ratio: f64,
    /// Largest gap between empirical and fitted tail distributions.
    pub ks_distance: f64,
    pub poor_fit: bool,
}

/// Discrete maximum-likelihood exponent over degrees `>= k_min`.
///
/// Maximizes `L(γ) = -γ Σ ln k_i - N ln ζ(γ, k_min)`, which is concave in γ,
/// by golden-section search on `(1, 20]`.
pub fn fit_exponent(h: &DegreeHistogram, k_min: u64) -> Result<PowerLawFit, GenError> {
    let k_min = k_min.max(1);
    let tail: Vec<(u64, u64)> = h.bins.iter().copied().filter(|&(d, _)| d >= k_min).collect();
    if tail.len() < 2 {
        return Err(GenError::InsufficientData(format!(
            "need at least 2 distinct degrees >= {k_min}, found {}",
            tail.len()
        )));
    }
    let samples: u64 = tail.iter().map(|t| t.1).sum();
    let n = samples as f64;
    let sum_ln: f64 = tail.iter().map(|&(d, c)| c as f64 * (d as f64).ln()).sum();
    let q = k_min as f64;
    let ll = |g: f64| -g * sum_ln - n * hurwitz_zeta(g, q).ln();

    let (mut lo, mut hi) = (1.0 + 1e-9, 20.0);
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - phi * (hi - lo);
    let mut b = lo + phi * (hi - lo);
    let (mut fa, mut fb) = (ll(a), ll(b));
    while hi - lo > 1e-10 {
        if fa < fb {
            lo = a;
            a = b;
            fa = fb;
            b = lo + phi * (hi - lo);
            fb = ll(b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - phi * (hi - lo);
            fa = ll(a);
        }
    }
    let gamma = (lo + hi) / 2.0;
    let log_likelihood = ll(gamma) / n;

    // geometric tail p(k) = (1 - λ) λ^(k - k_min)
    let excess: f64 = tail.iter().map(|&(d, c)| c as f64 * (d - k_min) as f64).sum::<f64>() / n;
    let lambda = excess / (excess + 1.0);
    let geo_ll = (1.0 - lambda).ln() + if excess > 0.0 { excess * lambda.ln() } else { 0.0 };
    let likelihood_ratio = log_likelihood - geo_ll;

    let z_min = hurwitz_zeta(gamma, q);
    let mut ks: f64 = 0.0;
    let mut at_or_above = n;
    for &(d, c) in &tail {
        let model = hurwitz_zeta(gamma, d as f64) / z_min;
        ks = ks.max((at_or_above / n - model).abs());
        at_or_above -= c as f64;
    }

    Ok(PowerLawFit {
        exponent: gamma,
        k_min,
        sample_size: samples,
        log_likelihood,
        likelihood_ratio,
        ks_distance: ks,
        poor_fit: ks > POOR_FIT_KS || likelihood_ratio < 0.0,
    })
}

/// Hurwitz zeta `Σ_{k>=0} (k + q)^-s` for `s > 1`, `q > 0`, by direct
/// summation of the first terms plus an Euler–Maclaurin tail.
pub fn hurwitz_zeta(s: f64, q: f64) -> f64 {
    const DIRECT: usize = 16;
    // B_{2j} / (2j)!
    const BERNOULLI_OVER_FACT: [f64; 6] = [
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30240.0,
        -1.0 / 1209600.0,
        1.0 / 47900160.0,
        -691.0 / 1307674368000.0,
    ];
    let mut sum = 0.0;
    for k in 0..DIRECT {
        sum += (q + k as f64).powf(-s);
    }
    let a = q + DIRECT as f64;
    sum += a.powf(1.0 - s) / (s - 1.0) + 0.5 * a.powf(-s);
    // rising factorial s (s+1) ... (s+2j-2) times a^(-s-2j+1)
    let mut rising = s;
    let mut power = a.powf(-s - 1.0);
    for (j, coef) in BERNOULLI_OVER_FACT.iter().enumerate() {
        sum += coef * rising * power;
        let j = j as f64 + 1.0;
        rising *= (s + 2.0 * j - 1.0) * (s + 2.0 * j);
        power /= a * a;
    }
    sum
}
