//! Product measure `μ_p` of upsets, exactly and by sampling, and the
//! threshold `p_c` where `μ_p` crosses 1/2.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::prob::Probability;
use crate::rng::{sample_from, RandomSeed};
use crate::subset::{GroundSet, Subset};

/// Largest `n` for which `μ_p` is computed by full enumeration of `2^X`.
pub const DEFAULT_EXACT_LIMIT: usize = 22;
pub const DEFAULT_PC_TOL: f64 = 1e-9;
pub const DEFAULT_MC_TRIALS: u64 = 100_000;

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureEstimate {
    pub point: f64,
    /// Wilson 95% half-width; zero for exact values.
    pub half_width: f64,
    /// Number of samples; zero for exact values.
    pub trials: u64,
}

impl MeasureEstimate {
    pub fn exact(point: f64) -> Self {
        MeasureEstimate {
            point,
            half_width: 0.0,
            trials: 0,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.trials == 0
    }

    /// Midpoint of the Wilson interval, which sits slightly towards 1/2 from `point`.
    pub fn center(&self) -> f64 {
        if self.is_exact() {
            return self.point;
        }
        let z2n = Z95 * Z95 / self.trials as f64;
        (self.point + z2n / 2.0) / (1.0 + z2n)
    }

    pub fn contains(&self, x: f64) -> bool {
        (self.center() - x).abs() <= self.half_width
    }
}

/// Half-width of the Wilson score interval for `hits` out of `trials`.
pub fn wilson_half_width(hits: u64, trials: u64) -> f64 {
    let n = trials as f64;
    let phat = hits as f64 / n;
    let z2 = Z95 * Z95;
    Z95 / (1.0 + z2 / n) * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt()
}

/// Number of members of `⟨H⟩` of each cardinality.
///
/// `μ_p(⟨H⟩)` is then the polynomial `Σ_k counts[k] p^k (1-p)^(n-k)`, so one
/// enumeration serves every `p` of a bisection.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UpsetProfile {
    n: usize,
    counts: Vec<u64>,
}

impl UpsetProfile {
    pub fn compute(h: &Hypergraph, limit: usize) -> Result<Self> {
        let n = h.n();
        if n > limit {
            return Err(Error::TooLargeForExact { n, limit });
        }
        let edges = h.minimal_antichain();
        let mut counts = vec![0u64; n + 1];
        for bits in 0..(1u64 << n) {
            let a = Subset::from_bits(bits);
            if edges.in_upset(a) {
                counts[a.len()] += 1;
            }
        }
        Ok(UpsetProfile { n, counts })
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn mu(&self, p: Probability) -> f64 {
        let p = p.get();
        let q = 1.0 - p;
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(k, &c)| c as f64 * p.powi(k as i32) * q.powi((self.n - k) as i32))
            .sum()
    }
}

/// `μ_p(⟨H⟩)` by enumerating all of `2^X`.
pub fn mu_exact(h: &Hypergraph, p: Probability) -> Result<MeasureEstimate> {
    mu_exact_with_limit(h, p, DEFAULT_EXACT_LIMIT)
}

pub fn mu_exact_with_limit(h: &Hypergraph, p: Probability, limit: usize) -> Result<MeasureEstimate> {
    Ok(MeasureEstimate::exact(UpsetProfile::compute(h, limit)?.mu(p)))
}

/// One draw of `X_p`.
pub fn sample_xp<R: Rng + ?Sized>(rng: &mut R, n: usize, p: Probability) -> Subset {
    (0..n).filter(|_| rng.random::<f64>() < p.get()).collect()
}

/// Monte Carlo estimate of `μ_p(⟨H⟩)`; trial `t` uses sub-stream `t` of `seed`.
pub fn mu_mc(h: &Hypergraph, p: Probability, trials: u64, seed: RandomSeed) -> Result<MeasureEstimate> {
    if trials == 0 {
        return Err(Error::BadParameter("Monte Carlo needs at least one trial".into()));
    }
    let n = h.n();
    let hit = |t: u64| h.in_upset(sample_xp(&mut seed.rng(t), n, p));
    let hits = count_hits(trials, hit);
    Ok(MeasureEstimate {
        point: hits as f64 / trials as f64,
        half_width: wilson_half_width(hits, trials),
        trials,
    })
}

#[cfg(feature = "parallel")]
fn count_hits(trials: u64, hit: impl Fn(u64) -> bool + Sync) -> u64 {
    use rayon::prelude::*;
    (0..trials).into_par_iter().filter(|&t| hit(t)).count() as u64
}

#[cfg(not(feature = "parallel"))]
fn count_hits(trials: u64, hit: impl Fn(u64) -> bool) -> u64 {
    (0..trials).filter(|&t| hit(t)).count() as u64
}

/// A uniformly random `m`-subset `X_m` of the ground set.
pub fn sample_uniform_m_subset(g: GroundSet, m: usize, seed: RandomSeed) -> Result<Subset> {
    if m > g.size() {
        return Err(Error::BadCardinality { m, n: g.size() });
    }
    sample_from(&mut seed.rng(0), g.full(), m)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum PcMode {
    Exact { limit: usize },
    MonteCarlo { trials: u64 },
}

impl PcMode {
    pub fn exact() -> Self {
        PcMode::Exact {
            limit: DEFAULT_EXACT_LIMIT,
        }
    }

    pub fn monte_carlo() -> Self {
        PcMode::MonteCarlo {
            trials: DEFAULT_MC_TRIALS,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PcResult {
    pub p_c: Probability,
    /// `μ` at the returned point.
    pub mu: MeasureEstimate,
    /// Set for Monte Carlo answers: the crossing is only located up to sampling error.
    pub approximate: bool,
    pub probes: u32,
}

impl PcResult {
    pub fn residual(&self) -> f64 {
        (self.mu.point - 0.5).abs()
    }
}

/// Locates `p_c`, the unique `p` with `μ_p(⟨H⟩) = 1/2`, by bisection.
///
/// Monte Carlo probes all reuse `seed`, so the estimated curve is monotone in
/// `p` (common random numbers). The search stops once the bracket is narrower
/// than `tol` or once 1/2 falls inside the confidence interval at a probe.
pub fn p_c_bisect(h: &Hypergraph, mode: PcMode, tol: f64, seed: RandomSeed) -> Result<PcResult> {
    if h.is_empty() {
        return Err(Error::DegenerateFamily("no edges: μ_p is identically 0"));
    }
    if h.has_empty_edge() {
        return Err(Error::DegenerateFamily("∅ is an edge: μ_p is identically 1"));
    }
    if !(tol > 0.0) {
        return Err(Error::BadParameter(format!("tolerance must be positive, got {tol}")));
    }
    let prob = |x: f64| Probability::new(x.clamp(0.0, 1.0)).expect("clamped");
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut probes = 0;
    match mode {
        PcMode::Exact { limit } => {
            let profile = UpsetProfile::compute(h, limit)?;
            while hi - lo > tol {
                let mid = 0.5 * (lo + hi);
                probes += 1;
                if profile.mu(prob(mid)) < 0.5 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let mut p = 0.5 * (lo + hi);
            let mut mu = profile.mu(prob(p));
            // a steep curve can leave the residual above tol; keep narrowing
            while (mu - 0.5).abs() > tol && hi > lo && probes < 1100 {
                if mu < 0.5 {
                    lo = p;
                } else {
                    hi = p;
                }
                let next = 0.5 * (lo + hi);
                if next == p {
                    break;
                }
                p = next;
                mu = profile.mu(prob(p));
                probes += 1;
            }
            Ok(PcResult {
                p_c: prob(p),
                mu: MeasureEstimate::exact(mu),
                approximate: false,
                probes,
            })
        }
        PcMode::MonteCarlo { trials } => {
            loop {
                let mid = 0.5 * (lo + hi);
                let est = mu_mc(h, prob(mid), trials, seed)?;
                probes += 1;
                if est.contains(0.5) || hi - lo <= tol {
                    return Ok(PcResult {
                        p_c: prob(mid),
                        mu: est,
                        approximate: true,
                        probes,
                    });
                }
                if est.point < 0.5 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
        }
    }
}
