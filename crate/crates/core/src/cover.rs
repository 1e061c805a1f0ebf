//! Covers, their cost `Σ p^|U|`, exact minimum-cost covers, and the
//! expectation-threshold `q`.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::prob::Probability;
use crate::subset::Subset;

pub const DEFAULT_CANDIDATE_BUDGET: usize = 2_000_000;
pub const DEFAULT_Q_TOL: f64 = 1e-9;

/// `Σ_{U ∈ sets} p^|U|`, where the empty set costs 1.
pub fn cover_cost(sets: &[Subset], p: Probability) -> f64 {
    sets.iter().map(|u| p.pow(u.len())).sum()
}

/// Whether every edge of `h` contains some member of `sets`.
pub fn is_cover(sets: &[Subset], h: &Hypergraph) -> bool {
    uncovered_edge(sets, h).is_none()
}

/// The first edge (canonical order) containing no member of `sets`.
pub fn uncovered_edge(sets: &[Subset], h: &Hypergraph) -> Option<Subset> {
    h.edges()
        .iter()
        .copied()
        .find(|e| !sets.iter().any(|u| u.is_subset_of(*e)))
}

/// A family `G` offered as evidence that `⟨H⟩ ⊆ ⟨G⟩` at cost at most 1/2.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverCertificate {
    pub p: Probability,
    pub sets: Vec<Subset>,
    pub cost: f64,
}

impl CoverCertificate {
    pub fn new(sets: Vec<Subset>, p: Probability) -> Self {
        let cost = cover_cost(&sets, p);
        CoverCertificate { p, sets, cost }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    Valid,
    NotACover { uncovered: Subset },
    CostExceedsHalf { cost: f64 },
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid)
    }
}

/// Checks a certificate; the cost is recomputed from the sets, never trusted.
pub fn check_certificate(cert: &CoverCertificate, h: &Hypergraph) -> Verdict {
    if let Some(uncovered) = uncovered_edge(&cert.sets, h) {
        return Verdict::NotACover { uncovered };
    }
    let cost = cover_cost(&cert.sets, cert.p);
    if cost <= 0.5 {
        Verdict::Valid
    } else {
        Verdict::CostExceedsHalf { cost }
    }
}

pub fn verify_certificate(cert: &CoverCertificate, h: &Hypergraph) -> bool {
    check_certificate(cert, h).is_valid()
}

#[derive(Clone, Debug, PartialEq)]
pub struct MinCover {
    pub cost: f64,
    pub sets: Vec<Subset>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QResult {
    pub q: Probability,
    pub witness: CoverCertificate,
}

/// Exact weighted covering with a bound on the candidate universe.
#[derive(Clone, Copy, Debug)]
pub struct CoverSolver {
    pub max_candidates: usize,
}

impl Default for CoverSolver {
    fn default() -> Self {
        CoverSolver {
            max_candidates: DEFAULT_CANDIDATE_BUDGET,
        }
    }
}

impl CoverSolver {
    pub fn new(max_candidates: usize) -> Self {
        CoverSolver { max_candidates }
    }

    /// Minimum of `cover_cost` over all covers of `h`, with an optimal family.
    ///
    /// Ties are broken towards fewer sets, then the lexicographically
    /// smallest sorted family.
    pub fn min_cover_cost(&self, h: &Hypergraph, p: Probability) -> Result<MinCover> {
        CoverProblem::build(h, self.max_candidates)?.solve(p)
    }

    /// The largest `p` (up to `tol`) at which `h` is `p`-small.
    pub fn q_exact(&self, h: &Hypergraph, tol: f64) -> Result<QResult> {
        if h.is_empty() {
            return Err(Error::NoEdges);
        }
        if h.has_empty_edge() {
            return Err(Error::DegenerateFamily("∅ is an edge: every cover costs at least 1"));
        }
        if !(tol > 0.0) {
            return Err(Error::BadParameter(format!("tolerance must be positive, got {tol}")));
        }
        let problem = CoverProblem::build(h, self.max_candidates)?;
        let at_one = problem.solve(Probability::ONE)?;
        if at_one.cost <= 0.5 {
            return Err(Error::InvariantViolation(format!(
                "minimum cover cost at p = 1 is {} ≤ 1/2",
                at_one.cost
            )));
        }
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        let mut witness = None;
        while hi - lo > tol {
            let mid = Probability::new(0.5 * (lo + hi))?;
            let sol = problem.solve(mid)?;
            if sol.cost <= 0.5 {
                lo = mid.get();
                witness = Some(sol);
            } else {
                hi = mid.get();
            }
        }
        let q = Probability::new(lo)?;
        let witness = match witness {
            Some(w) => w,
            None => problem.solve(q)?,
        };
        Ok(QResult {
            q,
            witness: CoverCertificate::new(witness.sets, q),
        })
    }
}

pub fn min_cover_cost(h: &Hypergraph, p: Probability) -> Result<MinCover> {
    CoverSolver::default().min_cover_cost(h, p)
}

pub fn q_exact(h: &Hypergraph, tol: f64) -> Result<QResult> {
    CoverSolver::default().q_exact(h, tol)
}

/// Fixed-width set of edge indices.
#[derive(Clone, Debug, PartialEq, Eq)]
struct EdgeSet(Vec<u64>);

impl EdgeSet {
    fn empty(m: usize) -> Self {
        EdgeSet(vec![0; m.div_ceil(64)])
    }

    fn full(m: usize) -> Self {
        let mut s = EdgeSet::empty(m);
        for i in 0..m {
            s.insert(i);
        }
        s
    }

    fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    fn remove_all(&mut self, other: &EdgeSet) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a &= !b;
        }
    }

    fn count_common(&self, other: &EdgeSet) -> u32 {
        self.0.iter().zip(&other.0).map(|(a, b)| (a & b).count_ones()).sum()
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(64 * k + b)
            })
        })
    }
}

/// The covering instance underlying every `p`: minimal edges, and for each
/// candidate `U` (a subset of some minimal edge) the edges it covers.
///
/// Restricting to subsets of edges loses nothing: a cover set `U` serving an
/// edge `S` can be replaced by `U ∩ S` at no greater cost. Among those, a set
/// that is not an intersection of edges is never cheaper than the
/// intersection of the edges containing it, so the cost search only uses
/// intersections (`closed`); the tie-break search uses every candidate.
struct CoverProblem {
    edges: Vec<Subset>,
    candidates: Vec<Subset>,
    covers: Vec<EdgeSet>,
    closed: Vec<bool>,
    /// Candidate indices contained in each edge, ascending.
    inside: Vec<Vec<usize>>,
}

impl CoverProblem {
    fn build(h: &Hypergraph, budget: usize) -> Result<Self> {
        if h.is_empty() {
            return Err(Error::NoEdges);
        }
        let edges = h.minimal_antichain().edges().to_vec();
        let mut seen = HashSet::new();
        for e in &edges {
            let needed = 1u128 << e.len();
            if needed > budget as u128 {
                return Err(Error::BudgetExceeded {
                    what: "cover candidates",
                    needed,
                    limit: budget as u128,
                });
            }
            for u in e.subsets() {
                seen.insert(u);
                if seen.len() > budget {
                    return Err(Error::BudgetExceeded {
                        what: "cover candidates",
                        needed: seen.len() as u128,
                        limit: budget as u128,
                    });
                }
            }
        }
        let mut candidates: Vec<Subset> = seen.into_iter().collect();
        candidates.sort_unstable();
        let m = edges.len();
        let mut covers = vec![EdgeSet::empty(m); candidates.len()];
        let mut inside = vec![Vec::new(); m];
        for (j, e) in edges.iter().enumerate() {
            for u in e.subsets() {
                let c = candidates.binary_search(&u).expect("candidate collected above");
                covers[c].insert(j);
                inside[j].push(c);
            }
        }
        for list in &mut inside {
            list.sort_unstable();
        }
        let closed = candidates
            .iter()
            .zip(&covers)
            .map(|(&u, cov)| cov.iter().fold(Subset::full(h.n()), |acc, j| acc.intersection(edges[j])) == u)
            .collect();
        Ok(CoverProblem {
            edges,
            candidates,
            covers,
            closed,
            inside,
        })
    }

    fn solve(&self, p: Probability) -> Result<MinCover> {
        let weights: Vec<f64> = self.candidates.iter().map(|u| p.pow(u.len())).collect();
        let m = self.edges.len();

        let mut search = CostSearch {
            problem: self,
            weights: &weights,
            best: f64::INFINITY,
            best_count: usize::MAX,
            depth: 0,
            forbidden: self.closed.iter().map(|c| !c).collect(),
        };
        // incumbents: the edges themselves, and the empty set alone
        search.best = cover_cost(&self.edges, p).min(1.0);
        search.best_count = if cover_cost(&self.edges, p) < 1.0 { m } else { 1 };
        search.branch(EdgeSet::full(m), 0.0);
        let target = search.best;

        let mut canon = CanonicalSearch {
            problem: self,
            weights: &weights,
            limit: target + tie_slack(target),
            max_sets: search.best_count,
            chosen: Vec::new(),
            found: None,
        };
        canon.descend(0, EdgeSet::full(m), 0.0);
        let chosen = canon.found.expect("an optimal family exists");
        let sets: Vec<Subset> = chosen.iter().map(|&c| self.candidates[c]).collect();
        Ok(MinCover {
            cost: cover_cost(&sets, p),
            sets,
        })
    }

    /// `Σ_{j uncovered} min_c w_c / |covers(c) ∩ uncovered|` over admissible
    /// candidates `c` inside edge `j`: each uncovered edge must be paid for by
    /// some candidate inside it, and charging a candidate's weight evenly to
    /// the uncovered edges it covers never overcounts. `None` when some edge
    /// has no admissible candidate left.
    fn lower_bound(&self, weights: &[f64], uncovered: &EdgeSet, admissible: impl Fn(usize) -> bool) -> Option<f64> {
        let mut total = 0.0;
        for j in uncovered.iter() {
            let share = self.inside[j]
                .iter()
                .filter(|&&c| admissible(c))
                .map(|&c| weights[c] / self.covers[c].count_common(uncovered) as f64)
                .fold(f64::INFINITY, f64::min);
            if share.is_infinite() {
                return None;
            }
            total += share;
        }
        Some(total)
    }
}

fn tie_slack(cost: f64) -> f64 {
    1e-12 * cost.abs().max(1.0)
}

/// Branch and bound for the optimal cost (and the size of some optimal family).
struct CostSearch<'a> {
    problem: &'a CoverProblem,
    weights: &'a [f64],
    best: f64,
    best_count: usize,
    depth: usize,
    forbidden: Vec<bool>,
}

impl CostSearch<'_> {
    fn branch(&mut self, uncovered: EdgeSet, cost: f64) {
        if uncovered.is_empty() {
            if cost < self.best || (cost <= self.best && self.depth < self.best_count) {
                self.best = cost;
                self.best_count = self.depth;
            }
            return;
        }
        let forbidden = &self.forbidden;
        let Some(bound) = self.problem.lower_bound(self.weights, &uncovered, |c| !forbidden[c]) else {
            return;
        };
        if cost + bound >= self.best - tie_slack(self.best) {
            return;
        }
        // branch on the uncovered edge with the fewest admissible candidates
        let edge = uncovered
            .iter()
            .min_by_key(|&j| self.problem.inside[j].iter().filter(|&&c| !self.forbidden[c]).count())
            .expect("nonempty");
        let mut options: Vec<(f64, usize)> = self.problem.inside[edge]
            .iter()
            .filter(|&&c| !self.forbidden[c])
            .map(|&c| {
                let hit = self.problem.covers[c].count_common(&uncovered) as f64;
                (self.weights[c] / hit, c)
            })
            .collect();
        options.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

        let mut excluded = Vec::new();
        for (_, c) in options {
            let mut rest = uncovered.clone();
            rest.remove_all(&self.problem.covers[c]);
            self.depth += 1;
            self.branch(rest, cost + self.weights[c]);
            self.depth -= 1;
            // every cover using c has now been explored
            self.forbidden[c] = true;
            excluded.push(c);
        }
        for c in excluded {
            self.forbidden[c] = false;
        }
    }
}

/// Finds, among covers costing at most `limit`, the one with the fewest sets
/// and then the lexicographically smallest sorted list.
///
/// Candidates are decided in canonical order, taking each before skipping it,
/// so covers of a given size are met in lexicographic order; after a hit only
/// strictly smaller covers are sought.
struct CanonicalSearch<'a> {
    problem: &'a CoverProblem,
    weights: &'a [f64],
    limit: f64,
    max_sets: usize,
    chosen: Vec<usize>,
    found: Option<Vec<usize>>,
}

impl CanonicalSearch<'_> {
    fn descend(&mut self, next: usize, uncovered: EdgeSet, cost: f64) {
        if cost > self.limit {
            return;
        }
        if uncovered.is_empty() {
            self.max_sets = self.chosen.len() - 1;
            self.found = Some(self.chosen.clone());
            return;
        }
        let room = self.max_sets.saturating_sub(self.chosen.len());
        if room == 0 {
            return;
        }
        let Some(bound) = self.problem.lower_bound(self.weights, &uncovered, |c| c >= next) else {
            return;
        };
        if cost + bound > self.limit {
            return;
        }
        let widest = (next..self.problem.candidates.len())
            .map(|c| self.problem.covers[c].count_common(&uncovered))
            .max()
            .unwrap_or(0) as usize;
        let remaining = uncovered.iter().count();
        if widest == 0 || remaining.div_ceil(widest) > room {
            return;
        }
        for c in next..self.problem.candidates.len() {
            // a set covering nothing new never appears in a smallest cover
            if self.problem.covers[c].count_common(&uncovered) == 0 {
                continue;
            }
            let mut rest = uncovered.clone();
            rest.remove_all(&self.problem.covers[c]);
            self.chosen.push(c);
            self.descend(c + 1, rest, cost + self.weights[c]);
            self.chosen.pop();
            if self.max_sets < self.chosen.len() + 1 {
                return;
            }
            // skipping c: every uncovered edge still needs a candidate after c
            if self.problem.lower_bound(self.weights, &uncovered, |d| d > c).is_none() {
                return;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[usize]) -> Subset {
        v.iter().copied().collect()
    }

    fn p(x: f64) -> Probability {
        Probability::new(x).unwrap()
    }

    fn singletons(n: usize) -> Hypergraph {
        Hypergraph::new(n, (0..n).map(Subset::singleton)).unwrap()
    }

    #[test]
    fn cover_cost_examples() {
        assert!((cover_cost(&[s(&[0]), s(&[1, 2])], p(0.5)) - 0.75).abs() < 1e-15);
        assert_eq!(cover_cost(&[Subset::EMPTY], p(0.3)), 1.0);
        assert_eq!(cover_cost(&[Subset::EMPTY], p(0.0)), 1.0);
        assert_eq!(cover_cost(&[], p(0.3)), 0.0);
    }

    #[test]
    fn is_cover_examples() {
        let h = Hypergraph::from_lists(3, &[&[0, 1], &[0, 2]]).unwrap();
        assert!(is_cover(&[Subset::EMPTY], &h));
        assert!(is_cover(&[s(&[0])], &h));
        let h = Hypergraph::from_lists(2, &[&[0]]).unwrap();
        assert!(!is_cover(&[s(&[1])], &h));
        assert_eq!(uncovered_edge(&[s(&[1])], &h), Some(s(&[0])));
    }

    #[test]
    fn verify_certificate_examples() {
        let h = Hypergraph::from_lists(2, &[&[0, 1]]).unwrap();
        let cert = CoverCertificate::new(vec![s(&[0, 1])], p(0.7));
        assert!((cert.cost - 0.49).abs() < 1e-12);
        assert!(verify_certificate(&cert, &h));
        let cert = CoverCertificate::new(vec![s(&[0, 1])], p(0.8));
        assert!(!verify_certificate(&cert, &h));
        assert!(matches!(check_certificate(&cert, &h), Verdict::CostExceedsHalf { .. }));
        let cert = CoverCertificate::new(vec![Subset::EMPTY], p(0.1));
        assert_eq!(check_certificate(&cert, &h), Verdict::CostExceedsHalf { cost: 1.0 });
    }

    #[test]
    fn min_cover_examples() {
        let h = Hypergraph::from_lists(2, &[&[0, 1]]).unwrap();
        let m = min_cover_cost(&h, p(0.6)).unwrap();
        assert!((m.cost - 0.36).abs() < 1e-12);
        assert_eq!(m.sets, vec![s(&[0, 1])]);
        let m = min_cover_cost(&h, p(0.3)).unwrap();
        assert!((m.cost - 0.09).abs() < 1e-12);
        assert_eq!(m.sets, vec![s(&[0, 1])]);

        let m = min_cover_cost(&singletons(8), p(0.05)).unwrap();
        assert!((m.cost - 0.4).abs() < 1e-12);
        assert_eq!(m.sets, singletons(8).edges());
    }

    #[test]
    fn empty_set_wins_when_everything_else_is_dearer() {
        let m = min_cover_cost(&singletons(8), p(0.5)).unwrap();
        assert_eq!(m.cost, 1.0);
        assert_eq!(m.sets, vec![Subset::EMPTY]);
    }

    #[test]
    fn shared_subset_beats_separate_edges() {
        // {0} covers both edges for p versus 2p^2 for the edges themselves
        let h = Hypergraph::from_lists(3, &[&[0, 1], &[0, 2]]).unwrap();
        let m = min_cover_cost(&h, p(0.4)).unwrap();
        assert!((m.cost - 0.32).abs() < 1e-12);
        let m = min_cover_cost(&h, p(0.6)).unwrap();
        assert!((m.cost - 0.6).abs() < 1e-12);
        assert_eq!(m.sets, vec![s(&[0])]);
    }

    #[test]
    fn ties_prefer_fewer_sets() {
        // at p = 0 every nonempty family is free
        let h = Hypergraph::from_lists(3, &[&[0, 1], &[0, 2]]).unwrap();
        let m = min_cover_cost(&h, p(0.0)).unwrap();
        assert_eq!(m.cost, 0.0);
        assert_eq!(m.sets, vec![s(&[0])]);
    }

    #[test]
    fn budget_is_enforced() {
        let h = Hypergraph::from_lists(3, &[&[0, 1, 2]]).unwrap();
        assert!(matches!(
            CoverSolver::new(7).min_cover_cost(&h, p(0.5)),
            Err(Error::BudgetExceeded { .. })
        ));
        assert!(CoverSolver::new(8).min_cover_cost(&h, p(0.5)).is_ok());
    }

    #[test]
    fn q_examples() {
        let h = Hypergraph::from_lists(2, &[&[0, 1]]).unwrap();
        let r = q_exact(&h, 1e-9).unwrap();
        assert!((r.q.get() - 0.5f64.sqrt()).abs() < 1e-8);
        assert_eq!(r.witness.sets, vec![s(&[0, 1])]);
        assert!(verify_certificate(&r.witness, &h));

        let r = q_exact(&singletons(8), 1e-9).unwrap();
        assert!((r.q.get() - 0.0625).abs() < 1e-8);
        assert_eq!(r.witness.sets.len(), 8);

        let h = Hypergraph::from_lists(1, &[&[0]]).unwrap();
        assert!((q_exact(&h, 1e-9).unwrap().q.get() - 0.5).abs() < 1e-8);
    }

    #[test]
    fn q_degenerate_inputs() {
        let h = Hypergraph::new(2, [Subset::EMPTY, s(&[0])]).unwrap();
        assert!(matches!(q_exact(&h, 1e-9), Err(Error::DegenerateFamily(_))));
        let h = Hypergraph::from_lists(2, &[]).unwrap();
        assert_eq!(q_exact(&h, 1e-9).unwrap_err(), Error::NoEdges);
    }
}
