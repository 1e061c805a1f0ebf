//! Minimum fragments and the round-by-round cover-building process.
//!
//! For an edge `S` and a set `W`, an `(S, W)`-fragment is `S' \ W` for an
//! edge `S' ⊆ S ∪ W`. One round of the process draws `W`, keeps the edges
//! whose minimum fragment is still large (the good set) and covers them by
//! those fragments, and hands the small fragments of the remaining edges to
//! the next round.

mod lemma;
mod process;
mod schedule;

pub use lemma::{
    empirical_lemma31, lemma31_bruteforce, EmpiricalLemma31, Lemma31Row, Lemma31Table,
    DEFAULT_ENUMERATION_BUDGET,
};
pub use process::{run_process, verify_transcript, ProcessTranscript, ReplayReport, RoundRecord};
pub use schedule::{build_schedule, ScheduleParams, THEOREM_MIN_L};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::prob::{ln_sum, Probability};
use crate::subset::Subset;

/// A minimum `(S, W)`-fragment together with the edge it was cut from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FragmentResult {
    /// `T(S, W) = witness \ W`.
    pub fragment: Subset,
    /// `t(S, W) = |T|`.
    pub size: usize,
    /// The edge `S' ⊆ S ∪ W` realizing the minimum.
    pub witness: Subset,
}

/// Minimum fragment of `s` with respect to `w`, ties broken by the canonical
/// order of the witnessing edge.
pub fn min_fragment(h: &Hypergraph, s: Subset, w: Subset) -> Result<FragmentResult> {
    if !h.contains_edge(s) {
        return Err(Error::NotAnEdge(s));
    }
    Ok(fragment_among(h.edges(), s, w))
}

/// `edges` must be in canonical order and contain `s`.
pub(crate) fn fragment_among(edges: &[Subset], s: Subset, w: Subset) -> FragmentResult {
    let host = s.union(w);
    let mut best: Option<FragmentResult> = None;
    for &e in edges {
        if !e.is_subset_of(host) {
            continue;
        }
        let t = e.difference(w);
        if best.is_none_or(|b| t.len() < b.size) {
            best = Some(FragmentResult {
                fragment: t,
                size: t.len(),
                witness: e,
            });
            if t.is_empty() {
                break;
            }
        }
    }
    best.expect("s itself is a candidate witness")
}

/// One round: the good set, its cover, and the leftover hypergraph.
#[derive(Clone, Debug, PartialEq)]
pub struct RoundSplit {
    /// Indices (into the input's edge list) of edges with `t(S, W) ≥ threshold`.
    pub good: Vec<usize>,
    /// `{T(S, W) : S good}`, deduplicated and sorted.
    pub cover: Vec<Subset>,
    /// `{T(S, W) : S not good}` on the same ground set.
    pub leftover: Hypergraph,
}

/// Splits `h` with respect to `w` at `threshold` (0.9 times the current edge bound).
pub fn split_round(h: &Hypergraph, w: Subset, threshold: f64) -> Result<RoundSplit> {
    let mut good = Vec::new();
    let mut cover = Vec::new();
    let mut rest = Vec::new();
    for (j, &s) in h.edges().iter().enumerate() {
        let f = fragment_among(h.edges(), s, w);
        if f.size as f64 >= threshold {
            if !f.fragment.is_subset_of(s) {
                return Err(Error::InvariantViolation(format!(
                    "fragment {} of good edge {s} is not contained in it",
                    f.fragment
                )));
            }
            good.push(j);
            cover.push(f.fragment);
        } else {
            rest.push(f.fragment);
        }
    }
    cover.sort_unstable();
    cover.dedup();
    Ok(RoundSplit {
        good,
        cover,
        leftover: Hypergraph::new(h.n(), rest)?,
    })
}

/// `ln Σ_{U ∈ cover} p^|U|`; `-inf` for an empty cover.
pub fn ln_cover_cost(cover: &[Subset], p: Probability) -> f64 {
    ln_sum(cover.iter().map(|u| p.ln_pow(u.len())))
}

/// `ln L_i^(-ℓ_i / 2)`.
pub fn ln_success1_bound(big_l_i: f64, ell_i: f64) -> f64 {
    -0.5 * ell_i * big_l_i.ln()
}

/// Whether the round's cover is cheap: `Σ p^|U| < L_i^(-ℓ_i / 2)`, compared in log space.
pub fn check_success1(cover: &[Subset], p: Probability, big_l_i: f64, ell_i: f64) -> bool {
    ln_cover_cost(cover, p) < ln_success1_bound(big_l_i, ell_i)
}
