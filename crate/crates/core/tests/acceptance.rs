//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

mod common;

use std::time::Instant;

use common::*;
use hyperthresh::cover::{is_cover, min_cover_cost, q_exact};
use hyperthresh::experiments::{default_corpus, generate, InstanceSpec};
use hyperthresh::formats::{from_document, to_document};
use hyperthresh::fragment::{
    build_schedule, lemma31_bruteforce, min_fragment, run_process, verify_transcript, ProcessTranscript,
    ScheduleParams, DEFAULT_ENUMERATION_BUDGET,
};
use hyperthresh::measures::{mu_exact, mu_mc, p_c_bisect, PcMode};
use hyperthresh::prob::binomial;
use hyperthresh::{Hypergraph, Probability, RandomSeed, Subset};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

const Q_LE_PC_TOL: f64 = 2e-6;
const CLOSED_FORM_TOL: f64 = 1e-6;
const ORACLE_TOL: f64 = 1e-12;
const BISECT_TOL: f64 = 1e-9;
const MC_TRIALS: u64 = 4_000;
const MC_MIN_COVERAGE: f64 = 0.94;

fn p(x: f64) -> Probability {
    Probability::new(x).unwrap()
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn q_le_pc(h: &Hypergraph) -> Result<f64, String> {
    let q = q_exact(h, BISECT_TOL).map_err(|e| e.to_string())?;
    let pc = p_c_bisect(h, PcMode::exact(), BISECT_TOL, RandomSeed::from_master(0)).map_err(|e| e.to_string())?;
    Ok(q.q.get() - pc.p_c.get())
}

fn criterion1() -> Outcome {
    let mut r = rng(101);
    let mut worst = f64::NEG_INFINITY;
    let mut bad = Vec::new();
    let mut count = 0;
    let mut check = |label: String, h: &Hypergraph| match q_le_pc(h) {
        Ok(gap) => {
            count += 1;
            worst = worst.max(gap);
            if gap > Q_LE_PC_TOL {
                bad.push(format!("{label}: q - p_c = {gap:e}"));
            }
        }
        Err(e) => bad.push(format!("{label}: {e}")),
    };
    for k in 0..200 {
        let n = r.random_range(1..=10);
        let h = random_hypergraph(&mut r, n, 6, 4);
        check(format!("random #{k}"), &h);
    }
    for spec in default_corpus() {
        let h = generate(&spec).unwrap();
        check(spec.to_string(), &h);
    }
    outcome(
        bad.is_empty(),
        format!("{count} instances, max(q - p_c) = {worst:.3e} (tol {Q_LE_PC_TOL:e}); failures: {bad:?}"),
    )
}

fn criterion2() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut bad = Vec::new();
    let mut record = |label: String, got: f64, want: f64| {
        let err = (got - want).abs();
        worst = worst.max(err);
        if !(err <= CLOSED_FORM_TOL) {
            bad.push(format!("{label}: {got} vs {want}"));
        }
    };
    let seed = RandomSeed::from_master(0);
    for k in 1..=5usize {
        let h = generate(&InstanceSpec::SingleEdge { k }).unwrap();
        let want = 0.5f64.powf(1.0 / k as f64);
        record(format!("single_edge({k}) q"), q_exact(&h, BISECT_TOL).unwrap().q.get(), want);
        let pc = p_c_bisect(&h, PcMode::exact(), BISECT_TOL, seed).unwrap();
        record(format!("single_edge({k}) p_c"), pc.p_c.get(), want);
    }
    for n in 2..=10usize {
        let h = generate(&InstanceSpec::Singletons { n }).unwrap();
        record(format!("singletons({n}) q"), q_exact(&h, BISECT_TOL).unwrap().q.get(), 0.5 / n as f64);
        let pc = p_c_bisect(&h, PcMode::exact(), BISECT_TOL, seed).unwrap();
        record(format!("singletons({n}) p_c"), pc.p_c.get(), 1.0 - 0.5f64.powf(1.0 / n as f64));
    }
    outcome(bad.is_empty(), format!("28 values, max error {worst:.3e} (tol {CLOSED_FORM_TOL:e}); failures: {bad:?}"))
}

fn criterion3() -> Outcome {
    let mut r = rng(303);
    let mut violations = 0usize;
    let mut checked = 0usize;
    for _ in 0..10_000 {
        let n = r.random_range(2..=16);
        let h = random_hypergraph(&mut r, n, 10, 6);
        let s = h.edges()[r.random_range(0..h.edges().len())];
        let density = r.random_range(0.0..0.7);
        let w = random_subset(&mut r, n, density);
        let t = min_fragment(&h, s, w).unwrap().fragment;
        let z = w.union(t);
        for &hat in h.edges() {
            if hat.is_subset_of(z) {
                checked += 1;
                if !t.is_subset_of(hat) {
                    violations += 1;
                }
            }
        }
    }
    outcome(
        violations == 0,
        format!("10000 triples, {checked} edges inside W ∪ T checked, {violations} violations (tol 0)"),
    )
}

#[derive(Default)]
struct ProcessStats {
    runs: usize,
    theorem_regime: usize,
    successes: usize,
    cover_violations: usize,
    suc2_failures: usize,
    suc2_violations: usize,
    leftover_violations: usize,
    imax_violations: usize,
    replay_violations: usize,
}

fn random_schedule(r: &mut ChaCha8Rng, h: &Hypergraph) -> Option<ScheduleParams> {
    let ell = h.ell_bound();
    if r.random_bool(0.2) && ell >= 2 {
        let x = r.random_range(0.3..1.0) / (1024.0 * h.n() as f64);
        return build_schedule(1024.0, ell, p(x), h.n(), false).ok();
    }
    let big_l = r.random_range(1.5..8.0);
    let per_round = r.random_range(0.2..1.2);
    let x = per_round / (big_l * h.n() as f64 * (ell as f64).log2().max(1.0));
    build_schedule(big_l, ell, p(x), h.n(), true).ok()
}

fn process_sweep() -> ProcessStats {
    let mut r = rng(404);
    let mut st = ProcessStats::default();
    while st.runs < 1_500 {
        let n = r.random_range(12..=48);
        let h = random_hypergraph(&mut r, n, 8, 6);
        let Some(s) = random_schedule(&mut r, &h) else { continue };
        let t = run_process(&h, &s, RandomSeed::new(r.random(), 0)).unwrap();
        st.runs += 1;
        st.theorem_regime += s.in_theorem_regime() as usize;
        if t.terminated_successfully {
            st.successes += 1;
            st.cover_violations += !is_cover(&t.assembled_cover, &h) as usize;
        }
        if let Some(j) = t.first_success2_failure() {
            st.suc2_failures += 1;
            let union = t.rounds[..j].iter().fold(Subset::EMPTY, |acc, r| acc.union(r.w));
            st.suc2_violations += !h.in_upset(union) as usize;
        }
        for rd in &t.rounds {
            let bound = s.threshold(rd.i);
            st.leftover_violations += rd.leftover.iter().filter(|e| e.len() as f64 >= bound).count();
        }
        st.imax_violations += (t.i_max > s.gamma) as usize;
        st.replay_violations += !verify_transcript(&t).is_ok() as usize;
    }
    st
}

fn criterion4(st: &ProcessStats) -> Outcome {
    outcome(
        st.runs >= 1_000 && st.cover_violations == 0 && st.successes > 0,
        format!(
            "{} runs ({} with L = 1024), {} successful, {} assembled covers missing an edge (tol 0)",
            st.runs, st.theorem_regime, st.successes, st.cover_violations
        ),
    )
}

fn criterion5(st: &ProcessStats) -> Outcome {
    outcome(
        st.suc2_violations == 0 && st.suc2_failures > 0,
        format!(
            "{} runs with an empty leftover edge, {} whose draws contain no edge (tol 0)",
            st.suc2_failures, st.suc2_violations
        ),
    )
}

fn criterion6() -> Outcome {
    let mut r = rng(606);
    let mut done = 0;
    let mut bad = Vec::new();
    let mut margin = f64::INFINITY;
    let mut pairs = 0u128;
    while done < 30 {
        let n = r.random_range(8..=22);
        let w = r.random_range(1..=3);
        if binomial(n as u64, w) > 100_000 {
            continue;
        }
        let h = random_hypergraph(&mut r, n, 8, 5);
        if h.ell_bound() < 2 {
            continue;
        }
        let x = w as f64 / (1024.0 * n as f64);
        let t = lemma31_bruteforce(&h, p(x), 1024.0, DEFAULT_ENUMERATION_BUDGET).unwrap();
        assert_eq!(t.w, w as usize);
        done += 1;
        pairs += t.rows.iter().map(|row| row.pairs).sum::<u128>();
        for row in &t.rows {
            margin = margin.min(row.ln_rhs_step - row.ln_lhs);
        }
        margin = margin.min(t.ln_rhs_total - t.ln_lhs_total);
        if !(t.all_steps_hold() && t.total_holds) {
            bad.push(format!("n={n} w={w} edges={:?}", h.edges()));
        }
    }
    outcome(
        bad.is_empty(),
        format!("{done} enumerated instances, {pairs} (W, T) pairs, min log-margin {margin:.3} (tol 0); failures: {bad:?}"),
    )
}

fn criterion7() -> Outcome {
    let mut r = rng(707);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let n = r.random_range(1..=8);
        let h = random_hypergraph(&mut r, n, 5, n);
        let x = r.random_range(0.0..=1.0);
        let got = min_cover_cost(&h, p(x)).unwrap().cost;
        worst = worst.max((got - min_cover_by_dp(&h, x)).abs());
    }
    outcome(worst <= ORACLE_TOL, format!("100 instances, max |solver - DP| = {worst:.3e} (tol {ORACLE_TOL:e})"))
}

fn criterion8(st: &ProcessStats) -> Outcome {
    let mut bad = Vec::new();
    for ell in 2..=10_000usize {
        let s = build_schedule(1024.0, ell, p(1e-15), 100_000, false).unwrap();
        let want = ((ell as f64).ln() / (10.0f64 / 9.0).ln()).floor() as usize + 1;
        let last = s.ell_i[s.gamma];
        if s.gamma != want || !(last > 0.0 && last < 1.0) {
            bad.push(format!("ell={ell}: gamma {} (want {want}), ell_gamma {last}", s.gamma));
        }
    }
    let ok = bad.is_empty() && st.leftover_violations == 0 && st.imax_violations == 0;
    outcome(
        ok,
        format!(
            "ell 2..=10000: {} schedule mismatches; {} oversized leftover edges and {} runs past gamma in {} runs; failures: {bad:?}",
            bad.len(),
            st.leftover_violations,
            st.imax_violations,
            st.runs
        ),
    )
}

fn criterion9(st: &ProcessStats) -> Outcome {
    let h = Hypergraph::from_lists(10, &[&[0, 1, 2], &[2, 3], &[4, 5, 6], &[1, 7, 8, 9]]).unwrap();
    let x = p(0.45);
    let exact = mu_exact(&h, x).unwrap().point;
    let covered = (0..200u64)
        .filter(|&k| mu_mc(&h, x, MC_TRIALS, RandomSeed::from_master(k)).unwrap().contains(exact))
        .count();
    let coverage = covered as f64 / 200.0;

    let g = Hypergraph::from_lists(40, &[&[0, 1, 2], &[3, 4], &[5, 6, 7, 8], &[2, 9, 10]]).unwrap();
    let s = build_schedule(3.0, 4, p(0.002), 40, true).unwrap();
    let t = run_process(&g, &s, RandomSeed::new(99, 0)).unwrap();
    let path = std::env::temp_dir().join(format!("hyperthresh-acceptance-{}.json", std::process::id()));
    std::fs::write(&path, to_document(&t)).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let _ = std::fs::remove_file(&path);
    let back: ProcessTranscript = from_document(&text).unwrap();
    let replay = verify_transcript(&back);
    let identical = back == t
        && to_document(&back) == text
        && back.rounds.iter().zip(&t.rounds).all(|(a, b)| {
            a.cost.to_bits() == b.cost.to_bits() && a.ln_cost.to_bits() == b.ln_cost.to_bits()
        });
    outcome(
        coverage >= MC_MIN_COVERAGE && replay.is_ok() && identical && st.replay_violations == 0,
        format!(
            "coverage {covered}/200 = {coverage:.3} (min {MC_MIN_COVERAGE}); file replay: {} checks, {} violations, bit-identical {identical}; sweep replays failing: {}",
            replay.checks,
            replay.violations.len(),
            st.replay_violations
        ),
    )
}

fn main() {
    let start = Instant::now();
    let sweep = process_sweep();
    let results: Vec<(&str, Outcome)> = vec![
        ("1 q <= p_c", criterion1()),
        ("2 closed forms", criterion2()),
        ("3 fragment containment", criterion3()),
        ("4 successful runs cover", criterion4(&sweep)),
        ("5 empty leftover means W holds an edge", criterion5(&sweep)),
        ("6 exact counting bound", criterion6()),
        ("7 cover oracle equivalence", criterion7()),
        ("8 schedule arithmetic", criterion8(&sweep)),
        ("9 MC calibration and replay", criterion9(&sweep)),
    ];
    let mut failed = 0;
    for (name, o) in &results {
        println!("criterion {name}: {} | {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += !o.pass as usize;
    }
    println!("acceptance: {}/9 passed in {:.1}s", 9 - failed, start.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
