//! Named instance families and the threshold report pipeline.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cover::{cover_cost, CoverSolver, DEFAULT_Q_TOL};
use crate::error::{Error, Result};
use crate::fragment::{build_schedule, run_process};
use crate::hypergraph::Hypergraph;
use crate::measures::{p_c_bisect, PcMode, DEFAULT_PC_TOL};
use crate::prob::{binomial, Probability};
use crate::rng::{sample_from, RandomSeed};
use crate::subset::{Subset, MAX_GROUND};

pub const MAX_GENERATED_EDGES: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum InstanceSpec {
    SingleEdge { k: usize },
    Singletons { n: usize },
    RandomKUniform { n: usize, k: usize, count: usize, seed: u64 },
    /// Ground set: the edges of `K_v`; hyperedges: its triangles.
    Triangles { v: usize },
    /// Ground set: the edges of `K_v`; hyperedges: its perfect matchings.
    PerfectMatchings { v: usize },
}

impl InstanceSpec {
    pub fn family(&self) -> &'static str {
        match self {
            InstanceSpec::SingleEdge { .. } => "single_edge",
            InstanceSpec::Singletons { .. } => "singletons",
            InstanceSpec::RandomKUniform { .. } => "random_k_uniform",
            InstanceSpec::Triangles { .. } => "triangles",
            InstanceSpec::PerfectMatchings { .. } => "perfect_matchings",
        }
    }

    /// `key=value` list, e.g. `n=10,k=3,count=5,seed=1`.
    pub fn params(&self) -> String {
        match *self {
            InstanceSpec::SingleEdge { k } => format!("k={k}"),
            InstanceSpec::Singletons { n } => format!("n={n}"),
            InstanceSpec::RandomKUniform { n, k, count, seed } => {
                format!("n={n},k={k},count={count},seed={seed}")
            }
            InstanceSpec::Triangles { v } | InstanceSpec::PerfectMatchings { v } => format!("v={v}"),
        }
    }
}

impl fmt::Display for InstanceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.family(), self.params())
    }
}

impl FromStr for InstanceSpec {
    type Err = Error;

    /// Parses `family:key=value,...`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: String| Error::BadParameter(format!("instance spec {s:?}: {why}"));
        let (family, rest) = s.trim().split_once(':').unwrap_or((s.trim(), ""));
        let mut params = std::collections::BTreeMap::new();
        for kv in rest.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| bad(format!("expected key=value, got {kv:?}")))?;
            let v: u64 = v
                .trim()
                .parse()
                .map_err(|_| bad(format!("{k} is not a nonnegative integer")))?;
            if params.insert(k.trim().to_string(), v).is_some() {
                return Err(bad(format!("{k} given twice")));
            }
        }
        let mut take = |key: &str| {
            params
                .remove(key)
                .ok_or_else(|| bad(format!("missing parameter {key}")))
        };
        let spec = match family {
            "single_edge" => InstanceSpec::SingleEdge { k: take("k")? as usize },
            "singletons" => InstanceSpec::Singletons { n: take("n")? as usize },
            "random_k_uniform" => InstanceSpec::RandomKUniform {
                n: take("n")? as usize,
                k: take("k")? as usize,
                count: take("count")? as usize,
                seed: take("seed")?,
            },
            "triangles" => InstanceSpec::Triangles { v: take("v")? as usize },
            "perfect_matchings" => InstanceSpec::PerfectMatchings { v: take("v")? as usize },
            other => return Err(bad(format!("unknown family {other:?}"))),
        };
        if let Some(extra) = params.keys().next() {
            return Err(bad(format!("unexpected parameter {extra}")));
        }
        Ok(spec)
    }
}

/// Index of the edge `{a, b}` (`a < b`) of `K_v` in lexicographic order.
fn slot(v: usize, a: usize, b: usize) -> usize {
    debug_assert!(a < b && b < v);
    a * (2 * v - a - 1) / 2 + (b - a - 1)
}

fn complete_graph_ground(v: usize) -> Result<usize> {
    let n = v * v.saturating_sub(1) / 2;
    if n == 0 {
        return Err(Error::TooLarge(format!("K_{v} has no edges")));
    }
    if n > MAX_GROUND {
        return Err(Error::TooLarge(format!(
            "K_{v} has {n} edges, more than {MAX_GROUND} ground elements"
        )));
    }
    Ok(n)
}

fn perfect_matchings(v: usize, remaining: u64, acc: Subset, out: &mut Vec<Subset>) {
    if remaining == 0 {
        out.push(acc);
        return;
    }
    let a = remaining.trailing_zeros() as usize;
    let rest = remaining & !(1 << a);
    let mut others = rest;
    while others != 0 {
        let b = others.trailing_zeros() as usize;
        others &= others - 1;
        perfect_matchings(v, rest & !(1 << b), acc.with(slot(v, a, b)), out);
    }
}

/// Builds the hypergraph of a named family.
pub fn generate(spec: &InstanceSpec) -> Result<Hypergraph> {
    match *spec {
        InstanceSpec::SingleEdge { k } => {
            if k == 0 || k > MAX_GROUND {
                return Err(Error::TooLarge(format!("single_edge needs 1 ≤ k ≤ {MAX_GROUND}")));
            }
            Hypergraph::new(k, [Subset::full(k)])
        }
        InstanceSpec::Singletons { n } => {
            if n == 0 || n > MAX_GROUND {
                return Err(Error::TooLarge(format!("singletons needs 1 ≤ n ≤ {MAX_GROUND}")));
            }
            Hypergraph::new(n, (0..n).map(Subset::singleton))
        }
        InstanceSpec::RandomKUniform { n, k, count, seed } => {
            if n == 0 || n > MAX_GROUND {
                return Err(Error::TooLarge(format!("random_k_uniform needs 1 ≤ n ≤ {MAX_GROUND}")));
            }
            if k > n {
                return Err(Error::BadCardinality { m: k, n });
            }
            if count == 0 || count > MAX_GENERATED_EDGES || count as u128 > binomial(n as u64, k as u64) {
                return Err(Error::TooLarge(format!(
                    "cannot draw {count} distinct {k}-subsets of {n} elements"
                )));
            }
            let mut rng = RandomSeed::new(seed, 0).rng(0);
            let full = Subset::full(n);
            let mut edges = BTreeSet::new();
            while edges.len() < count {
                edges.insert(sample_from(&mut rng, full, k)?);
            }
            Hypergraph::new(n, edges)
        }
        InstanceSpec::Triangles { v } => {
            let n = complete_graph_ground(v)?;
            let mut edges = Vec::new();
            for a in 0..v {
                for b in a + 1..v {
                    for c in b + 1..v {
                        edges.push(Subset::from_elements([slot(v, a, b), slot(v, a, c), slot(v, b, c)]));
                    }
                }
            }
            if edges.is_empty() {
                return Err(Error::TooLarge(format!("K_{v} has no triangles")));
            }
            Hypergraph::new(n, edges)
        }
        InstanceSpec::PerfectMatchings { v } => {
            if v % 2 == 1 {
                return Err(Error::BadParameter(format!("perfect matchings need an even v, got {v}")));
            }
            let n = complete_graph_ground(v)?;
            let mut edges = Vec::new();
            perfect_matchings(v, (1u64 << v) - 1, Subset::EMPTY, &mut edges);
            if edges.len() > MAX_GENERATED_EDGES {
                return Err(Error::TooLarge(format!("{} perfect matchings", edges.len())));
            }
            Hypergraph::new(n, edges)
        }
    }
}

/// The corpus the acceptance suite runs the `q ≤ p_c` chain on.
pub fn default_corpus() -> Vec<InstanceSpec> {
    let mut v: Vec<InstanceSpec> = (1..=5).map(|k| InstanceSpec::SingleEdge { k }).collect();
    v.extend((2..=10).map(|n| InstanceSpec::Singletons { n }));
    v.extend([
        InstanceSpec::Triangles { v: 4 },
        InstanceSpec::Triangles { v: 5 },
        InstanceSpec::PerfectMatchings { v: 4 },
        InstanceSpec::PerfectMatchings { v: 6 },
    ]);
    v
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KkConfig {
    pub tol: f64,
    pub pc_mode: PcMode,
    pub master_seed: u64,
    /// `L` for the process runs.
    #[serde(rename = "L")]
    pub big_l: f64,
    pub exploratory: bool,
    /// Extra probabilities to run the process at, besides `p = q`.
    pub extra_p: Vec<Probability>,
    pub max_candidates: usize,
}

impl Default for KkConfig {
    fn default() -> Self {
        KkConfig {
            tol: DEFAULT_Q_TOL.max(DEFAULT_PC_TOL),
            pc_mode: PcMode::exact(),
            master_seed: 0,
            big_l: crate::fragment::THEOREM_MIN_L,
            exploratory: false,
            extra_p: Vec::new(),
            max_candidates: crate::cover::DEFAULT_CANDIDATE_BUDGET,
        }
    }
}

/// Process outcomes at one `p`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProcessStats {
    pub p: Probability,
    pub runs: u64,
    pub successes: u64,
    pub success_rate: Option<f64>,
    pub mean_cost: Option<f64>,
    /// Why no runs happened (for instance an infeasible schedule).
    pub skipped: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KkReport {
    pub instance: InstanceSpec,
    pub n: usize,
    pub ell: usize,
    pub q: Probability,
    pub p_c: Probability,
    /// `p_c / (q log₂ ℓ)`; undefined for `ℓ < 2`.
    pub ratio: Option<f64>,
    pub seeds: u64,
    pub process: Vec<ProcessStats>,
}

fn process_stats(h: &Hypergraph, ell: usize, p: Probability, seeds: u64, config: &KkConfig) -> ProcessStats {
    let mut stats = ProcessStats {
        p,
        runs: 0,
        successes: 0,
        success_rate: None,
        mean_cost: None,
        skipped: None,
    };
    if seeds == 0 {
        stats.skipped = Some("no seeds requested".into());
        return stats;
    }
    let schedule = match build_schedule(config.big_l, ell, p, h.n(), config.exploratory) {
        Ok(s) => s,
        Err(e) => {
            stats.skipped = Some(e.to_string());
            return stats;
        }
    };
    let mut total_cost = 0.0;
    for k in 0..seeds {
        match run_process(h, &schedule, RandomSeed::new(config.master_seed, k)) {
            Ok(t) => {
                stats.runs += 1;
                stats.successes += t.terminated_successfully as u64;
                total_cost += cover_cost(&t.assembled_cover, p);
            }
            Err(e) => {
                stats.skipped = Some(e.to_string());
                break;
            }
        }
    }
    if stats.runs > 0 {
        stats.success_rate = Some(stats.successes as f64 / stats.runs as f64);
        stats.mean_cost = Some(total_cost / stats.runs as f64);
    }
    stats
}

/// Computes `ℓ`, `q`, `p_c` and process statistics for one instance, and
/// checks `q ≤ p_c` up to twice the tolerance.
pub fn run_kk_report(spec: &InstanceSpec, seeds: u64, config: &KkConfig) -> Result<KkReport> {
    let h = generate(spec)?;
    let ell = h.largest_minimal_element()?;
    let solver = CoverSolver::new(config.max_candidates);
    let q = solver.q_exact(&h, config.tol)?.q;
    let p_c = p_c_bisect(&h, config.pc_mode, config.tol, RandomSeed::new(config.master_seed, 0))?.p_c;
    if q.get() > p_c.get() + 2.0 * config.tol {
        return Err(Error::InvariantViolation(format!(
            "{spec}: q = {q} exceeds p_c = {p_c}"
        )));
    }
    let ratio = (ell >= 2).then(|| p_c.get() / (q.get() * (ell as f64).log2()));

    // the process runs on the minimal edges, whose bound is ℓ(⟨H⟩)
    let minimal = h.minimal_antichain();
    let mut process = vec![process_stats(&minimal, ell, q, seeds, config)];
    for &p in &config.extra_p {
        process.push(process_stats(&minimal, ell, p, seeds, config));
    }
    Ok(KkReport {
        instance: spec.clone(),
        n: h.n(),
        ell,
        q,
        p_c,
        ratio,
        seeds,
        process,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_parsing_round_trips() {
        for s in [
            "single_edge:k=3",
            "singletons:n=8",
            "random_k_uniform:n=10,k=3,count=5,seed=42",
            "triangles:v=4",
            "perfect_matchings:v=6",
        ] {
            let spec: InstanceSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
        }
        assert!("single_edge".parse::<InstanceSpec>().is_err());
        assert!("single_edge:k=x".parse::<InstanceSpec>().is_err());
        assert!("single_edge:k=2,k=3".parse::<InstanceSpec>().is_err());
        assert!("single_edge:k=2,n=3".parse::<InstanceSpec>().is_err());
        assert!("cliques:k=3".parse::<InstanceSpec>().is_err());
    }

    #[test]
    fn generator_examples() {
        let h = generate(&InstanceSpec::SingleEdge { k: 3 }).unwrap();
        assert_eq!(h.n(), 3);
        assert_eq!(h.edges(), &[Subset::full(3)]);

        let h = generate(&InstanceSpec::Triangles { v: 4 }).unwrap();
        assert_eq!(h.n(), 6);
        assert_eq!(h.edges().len(), 4);
        assert!(h.edges().iter().all(|e| e.len() == 3));

        let h = generate(&InstanceSpec::PerfectMatchings { v: 4 }).unwrap();
        assert_eq!(h.n(), 6);
        assert_eq!(h.edges().len(), 3);
        assert!(h.edges().iter().all(|e| e.len() == 2));
    }

    #[test]
    fn matchings_and_triangles_counts() {
        // (v-1)!! perfect matchings, C(v,3) triangles
        assert_eq!(generate(&InstanceSpec::PerfectMatchings { v: 6 }).unwrap().edges().len(), 15);
        assert_eq!(generate(&InstanceSpec::PerfectMatchings { v: 8 }).unwrap().edges().len(), 105);
        assert_eq!(generate(&InstanceSpec::Triangles { v: 5 }).unwrap().edges().len(), 10);
        let pm = generate(&InstanceSpec::PerfectMatchings { v: 6 }).unwrap();
        // each matching uses every vertex once: its 3 slots are pairwise vertex-disjoint
        for e in pm.edges() {
            assert_eq!(e.len(), 3);
        }
        assert!(generate(&InstanceSpec::PerfectMatchings { v: 5 }).is_err());
        assert!(generate(&InstanceSpec::Triangles { v: 12 }).is_err());
    }

    #[test]
    fn random_family_is_seed_reproducible() {
        let spec = InstanceSpec::RandomKUniform { n: 12, k: 3, count: 6, seed: 9 };
        let a = generate(&spec).unwrap();
        assert_eq!(a, generate(&spec).unwrap());
        assert_eq!(a.edges().len(), 6);
        assert!(a.edges().iter().all(|e| e.len() == 3));
        let other = InstanceSpec::RandomKUniform { n: 12, k: 3, count: 6, seed: 10 };
        assert_ne!(a, generate(&other).unwrap());
        assert!(generate(&InstanceSpec::RandomKUniform { n: 4, k: 2, count: 7, seed: 0 }).is_err());
    }

    #[test]
    fn kk_report_closed_forms() {
        let cfg = KkConfig::default();
        let r = run_kk_report(&InstanceSpec::SingleEdge { k: 2 }, 0, &cfg).unwrap();
        assert!((r.q.get() - 0.5f64.sqrt()).abs() < 1e-6);
        assert!((r.p_c.get() - 0.5f64.sqrt()).abs() < 1e-6);
        // q = p_c and log₂ 2 = 1
        assert!((r.ratio.unwrap() - 1.0).abs() < 1e-5);

        let r = run_kk_report(&InstanceSpec::Singletons { n: 8 }, 0, &cfg).unwrap();
        assert!((r.q.get() - 0.0625).abs() < 1e-6);
        assert!((r.p_c.get() - 0.0829960).abs() < 1e-6);
        assert_eq!(r.ell, 1);
        assert_eq!(r.ratio, None);

        let r = run_kk_report(&InstanceSpec::PerfectMatchings { v: 4 }, 0, &cfg).unwrap();
        assert!(r.q.get() <= r.p_c.get());
    }

    #[test]
    fn kk_report_serialization_round_trips() {
        let cfg = KkConfig {
            big_l: 2.0,
            exploratory: true,
            extra_p: vec![Probability::new(0.01).unwrap()],
            ..KkConfig::default()
        };
        let r = run_kk_report(&InstanceSpec::Singletons { n: 6 }, 5, &cfg).unwrap();
        assert_eq!(r.process.len(), 2);
        let json = serde_json::to_string(&r).unwrap();
        assert_eq!(serde_json::from_str::<KkReport>(&json).unwrap(), r);
    }

    #[test]
    fn infeasible_process_is_reported_not_fatal() {
        let r = run_kk_report(&InstanceSpec::SingleEdge { k: 2 }, 3, &KkConfig::default()).unwrap();
        let stats = &r.process[0];
        assert_eq!(stats.runs, 0);
        assert!(stats.skipped.is_some());
        assert_eq!(stats.success_rate, None);
    }
}
