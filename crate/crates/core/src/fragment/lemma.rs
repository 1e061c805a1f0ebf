//! Exhaustive and sampled checks of the cover-cost counting bound.
//!
//! For `w = ⌈L p n⌉` and each size `m ≥ 0.9ℓ`, the number of pairs
//! `(W, T(S, W))` with `|W| = w` and `t(S, W) = m` is at most
//! `C(n, w + m) 2^ℓ ≤ C(n, w) (Lp)^(-m) 2^ℓ`, so the summed cost
//! `Σ_W Σ_{U ∈ U_m(W)} p^m` is at most `C(n, w) L^(-m) 2^ℓ`, and for
//! `L ≥ 1024` the total over `m` is below `C(n, w) L^(-0.6ℓ)`.

use serde::{Deserialize, Serialize};

use super::{fragment_among, ln_cover_cost};
use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::prob::{binomial, ceil_tolerant, ln_binomial, ln_sum, Probability};
use crate::rng::{sample_from, RandomSeed};
use crate::subset::{k_subsets, Subset};

pub const DEFAULT_ENUMERATION_BUDGET: u128 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lemma31Row {
    pub m: usize,
    /// Number of distinct pairs `(W, T)` with `|T| = m`.
    pub pairs: u128,
    /// `ln Σ_W Σ_{U ∈ U_m(W)} p^m`.
    #[serde(with = "crate::prob::log_value")]
    pub ln_lhs: f64,
    /// `ln (C(n, w) L^(-m) 2^ℓ)`.
    pub ln_rhs_step: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lemma31Table {
    pub n: usize,
    pub w: usize,
    pub ell: usize,
    pub p: Probability,
    #[serde(rename = "L")]
    pub big_l: f64,
    /// `C(n, w)`, the number of draws enumerated.
    pub draws: u128,
    pub rows: Vec<Lemma31Row>,
    #[serde(with = "crate::prob::log_value")]
    pub ln_lhs_total: f64,
    /// `ln (C(n, w) L^(-0.6ℓ))`.
    pub ln_rhs_total: f64,
    pub total_holds: bool,
}

impl Lemma31Table {
    pub fn all_steps_hold(&self) -> bool {
        self.rows.iter().all(|r| r.holds)
    }

    /// Exact mean of `Σ_{U ∈ U(W)} p^|U|` over uniform `W`.
    pub fn exact_mean_cost(&self) -> f64 {
        (self.ln_lhs_total - ln_binomial(self.n as u64, self.w as u64)).exp()
    }
}

fn draw_size(h: &Hypergraph, p: Probability, big_l: f64) -> Result<usize> {
    if !(big_l.is_finite() && big_l >= 1.0) {
        return Err(Error::BadParameter(format!("L = {big_l} must be at least 1")));
    }
    let w = ceil_tolerant(big_l * p.get() * h.n() as f64) as usize;
    if w > h.n() {
        return Err(Error::InsufficientGround { needed: w, n: h.n() });
    }
    Ok(w)
}

/// Smallest fragment size counted: `⌈0.9ℓ⌉`.
fn min_counted(ell: usize) -> usize {
    (0.9 * ell as f64).ceil() as usize
}

/// Distinct minimum fragments of size at least `⌈0.9ℓ⌉` for one draw `w`.
fn large_fragments(edges: &[Subset], w: Subset, floor: usize, out: &mut Vec<Subset>) {
    out.clear();
    for &s in edges {
        let f = fragment_among(edges, s, w);
        if f.size >= floor {
            out.push(f.fragment);
        }
    }
    out.sort_unstable();
    out.dedup();
}

/// Enumerates every `w`-subset `W` and counts, per size `m`, the distinct
/// minimum fragments `T(S, W)` of that size. All comparisons are in log space.
pub fn lemma31_bruteforce(h: &Hypergraph, p: Probability, big_l: f64, budget: u128) -> Result<Lemma31Table> {
    if h.is_empty() {
        return Err(Error::NoEdges);
    }
    let n = h.n();
    let w = draw_size(h, p, big_l)?;
    let draws = binomial(n as u64, w as u64);
    if draws > budget {
        return Err(Error::BudgetExceeded {
            what: "draws W to enumerate",
            needed: draws,
            limit: budget,
        });
    }
    let ell = h.ell_bound();
    let floor = min_counted(ell);
    let mut pairs = vec![0u128; ell + 1];
    let mut frags = Vec::new();
    for draw in k_subsets(n, w) {
        large_fragments(h.edges(), draw, floor, &mut frags);
        for t in &frags {
            pairs[t.len()] += 1;
        }
    }

    let ln_draws = ln_binomial(n as u64, w as u64);
    let ln_l = big_l.ln();
    let rows: Vec<Lemma31Row> = (floor..=ell)
        .map(|m| {
            let count = pairs[m];
            let ln_lhs = if count == 0 {
                f64::NEG_INFINITY
            } else {
                (count as f64).ln() + p.ln_pow(m)
            };
            let ln_rhs_step = ln_draws - m as f64 * ln_l + ell as f64 * std::f64::consts::LN_2;
            Lemma31Row {
                m,
                pairs: count,
                ln_lhs,
                ln_rhs_step,
                holds: ln_lhs <= ln_rhs_step,
            }
        })
        .collect();
    let ln_lhs_total = ln_sum(rows.iter().map(|r| r.ln_lhs));
    let ln_rhs_total = ln_draws - 0.6 * ell as f64 * ln_l;
    Ok(Lemma31Table {
        n,
        w,
        ell,
        p,
        big_l,
        draws,
        total_holds: ln_lhs_total <= ln_rhs_total,
        rows,
        ln_lhs_total,
        ln_rhs_total,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalLemma31 {
    pub w: usize,
    pub trials: u64,
    pub failures: u64,
    /// Fraction of draws with `Σ_{U ∈ U(W)} p^|U| ≥ L^(-ℓ/2)`.
    pub fail_rate: f64,
    pub mean_cost: f64,
    /// Normal-approximation 95% half-width of `mean_cost`.
    pub mean_cost_half_width: f64,
    /// `L^(-0.1ℓ)`, the failure probability bound.
    pub fail_bound: f64,
    /// `L^(-0.6ℓ)`, the mean cost bound.
    pub cost_bound: f64,
    /// `L ≥ 1024`; outside it the bounds are reported but carry no guarantee.
    pub theorem_regime: bool,
}

/// Samples `W` uniformly `trials` times (trial `t` on sub-stream `t`).
pub fn empirical_lemma31(
    h: &Hypergraph,
    p: Probability,
    big_l: f64,
    trials: u64,
    seed: RandomSeed,
) -> Result<EmpiricalLemma31> {
    if trials == 0 {
        return Err(Error::BadParameter("need at least one trial".into()));
    }
    if h.is_empty() {
        return Err(Error::NoEdges);
    }
    let w = draw_size(h, p, big_l)?;
    let ell = h.ell_bound();
    let floor = min_counted(ell);
    let ln_fail_at = -0.5 * ell as f64 * big_l.ln();
    let full = h.ground().full();

    let mut failures = 0u64;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut frags = Vec::new();
    for t in 0..trials {
        let draw = sample_from(&mut seed.rng(t), full, w)?;
        large_fragments(h.edges(), draw, floor, &mut frags);
        let ln_cost = ln_cover_cost(&frags, p);
        if ln_cost >= ln_fail_at {
            failures += 1;
        }
        let cost = ln_cost.exp();
        sum += cost;
        sum_sq += cost * cost;
    }
    let nt = trials as f64;
    let mean = sum / nt;
    let var = if trials > 1 {
        ((sum_sq - nt * mean * mean) / (nt - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(EmpiricalLemma31 {
        w,
        trials,
        failures,
        fail_rate: failures as f64 / nt,
        mean_cost: mean,
        mean_cost_half_width: 1.959_963_984_540_054 * (var / nt).sqrt(),
        fail_bound: big_l.powf(-0.1 * ell as f64),
        cost_bound: big_l.powf(-0.6 * ell as f64),
        theorem_regime: big_l >= super::THEOREM_MIN_L,
    })
}
