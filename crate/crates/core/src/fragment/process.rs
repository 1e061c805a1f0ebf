use serde::{Deserialize, Serialize};

use super::schedule::{build_schedule, ScheduleParams};
use super::{check_success1, ln_cover_cost, ln_success1_bound, split_round};
use crate::cover::{cover_cost, is_cover};
use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::prob::ln_sum;
use crate::rng::{sample_from, RandomSeed};
use crate::subset::Subset;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub i: usize,
    /// `W_i`, drawn from the elements not consumed by earlier rounds.
    pub w: Subset,
    /// Indices into the previous round's edge list (`H_{i-1}`).
    pub good: Vec<usize>,
    /// `U_i`: minimum fragments of the good edges.
    pub cover: Vec<Subset>,
    /// Edges of `H_i`.
    pub leftover: Vec<Subset>,
    pub cost: f64,
    #[serde(with = "crate::prob::log_value")]
    pub ln_cost: f64,
    pub success1: bool,
    pub success2: bool,
}

/// Everything needed to re-verify a run offline, without the generator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProcessTranscript {
    #[serde(flatten)]
    pub instance: Hypergraph,
    pub seed: RandomSeed,
    pub schedule: ScheduleParams,
    pub rounds: Vec<RoundRecord>,
    pub i_max: usize,
    pub terminated_successfully: bool,
    pub assembled_cover: Vec<Subset>,
    pub w_union: Subset,
}

impl ProcessTranscript {
    pub fn assembled_cost(&self) -> f64 {
        cover_cost(&self.assembled_cover, self.schedule.p)
    }

    /// First round whose leftover contains `∅`.
    pub fn first_success2_failure(&self) -> Option<usize> {
        self.rounds.iter().find(|r| !r.success2).map(|r| r.i)
    }
}

fn check_inputs(h: &Hypergraph, schedule: &ScheduleParams) -> Result<()> {
    if h.is_empty() {
        return Err(Error::DegenerateInput("hypergraph has no edges"));
    }
    if h.has_empty_edge() {
        return Err(Error::DegenerateInput("∅ is an edge of the initial hypergraph"));
    }
    if schedule.n != h.n() {
        return Err(Error::BadParameter(format!(
            "schedule is for n = {}, hypergraph has n = {}",
            schedule.n,
            h.n()
        )));
    }
    if schedule.ell < h.ell_bound() {
        return Err(Error::BadParameter(format!(
            "schedule assumes edges of size at most {}, hypergraph has an edge of size {}",
            schedule.ell,
            h.ell_bound()
        )));
    }
    if schedule.total_draw > h.n() {
        return Err(Error::InsufficientGround {
            needed: schedule.total_draw,
            n: h.n(),
        });
    }
    Ok(())
}

fn terminal(leftover: &Hypergraph) -> bool {
    leftover.edges().iter().all(|e| e.is_empty())
}

/// Runs the process: `H_0 = h`, and round `i` draws `W_i` uniformly from the
/// unconsumed elements and replaces `H_{i-1}` by its leftover, until the
/// leftover is contained in `{∅}`.
pub fn run_process(h: &Hypergraph, schedule: &ScheduleParams, seed: RandomSeed) -> Result<ProcessTranscript> {
    check_inputs(h, schedule)?;
    let p = schedule.p;
    let mut rng = seed.rng(0);
    let mut unused = h.ground().full();
    let mut current = h.clone();
    let mut rounds = Vec::new();
    let mut i_max = None;

    for i in 1..=schedule.gamma {
        let w = sample_from(&mut rng, unused, schedule.w_i[i - 1])?;
        unused = unused.difference(w);
        let split = split_round(&current, w, schedule.threshold(i))?;
        let success1 = check_success1(&split.cover, p, schedule.l_i[i - 1], schedule.ell_i[i]);
        let success2 = !split.leftover.has_empty_edge();
        let done = terminal(&split.leftover);
        rounds.push(RoundRecord {
            i,
            w,
            good: split.good,
            cost: cover_cost(&split.cover, p),
            ln_cost: ln_cover_cost(&split.cover, p),
            cover: split.cover,
            leftover: split.leftover.edges().to_vec(),
            success1,
            success2,
        });
        current = split.leftover;
        if done {
            i_max = Some(i);
            break;
        }
    }
    let i_max = i_max.ok_or_else(|| {
        Error::InvariantViolation(format!("process did not terminate within γ = {} rounds", schedule.gamma))
    })?;

    let mut assembled: Vec<Subset> = rounds.iter().flat_map(|r| r.cover.iter().copied()).collect();
    assembled.sort_unstable();
    assembled.dedup();
    Ok(ProcessTranscript {
        instance: h.clone(),
        seed,
        schedule: schedule.clone(),
        terminated_successfully: rounds.iter().all(|r| r.success1 && r.success2),
        w_union: rounds.iter().fold(Subset::EMPTY, |acc, r| acc.union(r.w)),
        assembled_cover: assembled,
        rounds,
        i_max,
    })
}

/// Outcome of re-deriving a transcript from its own contents.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ReplayReport {
    pub rounds_checked: usize,
    pub checks: usize,
    pub violations: Vec<String>,
}

impl ReplayReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.violations.push(what());
        }
    }
}

/// Re-verifies every round and every end-of-run property of a transcript.
///
/// Only the recorded draws `W_i` are taken on trust (as draws); everything
/// else is recomputed and compared bit for bit.
pub fn verify_transcript(t: &ProcessTranscript) -> ReplayReport {
    let mut rep = ReplayReport::default();
    let h = &t.instance;
    let s = &t.schedule;

    match build_schedule(s.big_l, s.ell, s.p, s.n, s.exploratory) {
        Ok(rebuilt) => rep.check(&rebuilt == s, || "schedule does not match its own parameters".into()),
        Err(e) => rep.check(false, || format!("schedule parameters are invalid: {e}")),
    }
    if let Err(e) = check_inputs(h, s) {
        rep.check(false, || format!("instance does not fit the schedule: {e}"));
        return rep;
    }
    rep.check(t.i_max >= 1 && t.i_max <= s.gamma, || {
        format!("i_max = {} outside 1..={}", t.i_max, s.gamma)
    });
    rep.check(t.rounds.len() == t.i_max, || {
        format!("{} rounds recorded but i_max = {}", t.rounds.len(), t.i_max)
    });
    if t.rounds.len() > s.gamma {
        return rep;
    }

    let p = s.p;
    let mut unused = h.ground().full();
    let mut drawn = Subset::EMPTY;
    let mut current = h.clone();
    let mut assembled = Vec::new();
    let mut all_success = true;
    for (k, r) in t.rounds.iter().enumerate() {
        let i = k + 1;
        rep.rounds_checked += 1;
        rep.check(r.i == i, || format!("round {i} is labelled {}", r.i));
        rep.check(r.w.is_subset_of(unused), || format!("W_{i} reuses consumed elements"));
        rep.check(r.w.len() == s.w_i[k], || {
            format!("|W_{i}| = {} but w_{i} = {}", r.w.len(), s.w_i[k])
        });
        unused = unused.difference(r.w);
        drawn = drawn.union(r.w);

        let threshold = s.threshold(i);
        let split = match split_round(&current, r.w, threshold) {
            Ok(x) => x,
            Err(e) => {
                rep.check(false, || format!("round {i}: {e}"));
                return rep;
            }
        };
        rep.check(split.good == r.good, || format!("round {i}: good set differs"));
        rep.check(split.cover == r.cover, || format!("round {i}: cover differs"));
        rep.check(split.leftover.edges() == r.leftover.as_slice(), || {
            format!("round {i}: leftover differs")
        });
        let cost = cover_cost(&split.cover, p);
        let ln_cost = ln_cover_cost(&split.cover, p);
        rep.check(cost.to_bits() == r.cost.to_bits(), || format!("round {i}: cost differs"));
        rep.check(ln_cost.to_bits() == r.ln_cost.to_bits(), || {
            format!("round {i}: log cost differs")
        });
        let success1 = check_success1(&split.cover, p, s.l_i[k], s.ell_i[i]);
        let success2 = !split.leftover.has_empty_edge();
        rep.check(success1 == r.success1, || format!("round {i}: success1 flag differs"));
        rep.check(success2 == r.success2, || format!("round {i}: success2 flag differs"));
        rep.check(
            split.leftover.edges().iter().all(|e| (e.len() as f64) < threshold),
            || format!("round {i}: leftover is not {threshold}-bounded"),
        );
        let mut both: Vec<Subset> = split.cover.clone();
        both.extend_from_slice(split.leftover.edges());
        rep.check(is_cover(&both, &current), || {
            format!("round {i}: cover plus leftover does not cover H_{}", i - 1)
        });
        if !success2 {
            rep.check(h.in_upset(drawn), || {
                format!("round {i}: ∅ in leftover but W_1 ∪ .. ∪ W_{i} contains no edge")
            });
        }
        let done = terminal(&split.leftover);
        rep.check(done == (i == t.i_max), || {
            format!("round {i}: termination does not match i_max = {}", t.i_max)
        });
        all_success &= success1 && success2;
        assembled.extend_from_slice(&split.cover);
        current = split.leftover;
    }

    assembled.sort_unstable();
    assembled.dedup();
    rep.check(assembled == t.assembled_cover, || "assembled cover differs".into());
    rep.check(drawn == t.w_union, || "W union differs".into());
    rep.check(all_success == t.terminated_successfully, || {
        "terminated_successfully flag differs".into()
    });
    if t.terminated_successfully {
        rep.check(is_cover(&assembled, h), || "successful run does not cover H".into());
        let ln_total = ln_cover_cost(&assembled, p);
        let ln_budget = ln_sum((0..t.i_max).map(|k| ln_success1_bound(s.l_i[k], s.ell_i[k + 1])));
        rep.check(ln_total <= ln_budget, || {
            "successful run costs more than the sum of per-round bounds".into()
        });
    }
    rep
}
