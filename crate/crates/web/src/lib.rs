//! WebAssembly bindings behind `www/index.html`.
//!
//! Every export takes plain strings and numbers and returns a JSON document,
//! so the page needs no glue beyond `JSON.parse`.

use hyperthresh::cover::min_cover_cost;
use hyperthresh::experiments::{generate, InstanceSpec};
use hyperthresh::formats::from_document;
use hyperthresh::fragment::{build_schedule, min_fragment, run_process};
use hyperthresh::measures::{p_c_bisect, PcMode, UpsetProfile, DEFAULT_EXACT_LIMIT};
use hyperthresh::{cover, Hypergraph, Probability, RandomSeed, Subset};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Browsers get small instances only.
const MAX_DEMO_EDGES: usize = 400;

fn load(source: &str) -> Result<Hypergraph, String> {
    let source = source.trim();
    let h = if source.starts_with('{') {
        from_document(source).map_err(|e| e.to_string())?
    } else {
        let spec: InstanceSpec = source.parse().map_err(|e: hyperthresh::Error| e.to_string())?;
        generate(&spec).map_err(|e| e.to_string())?
    };
    if h.edges().len() > MAX_DEMO_EDGES {
        return Err(format!("{} edges is too many for the demo (limit {MAX_DEMO_EDGES})", h.edges().len()));
    }
    Ok(h)
}

fn prob(x: f64) -> Result<Probability, String> {
    Probability::new(x).map_err(|e| e.to_string())
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("demo documents serialize")
}

#[derive(Serialize)]
struct Curves {
    n: usize,
    edges: Vec<Subset>,
    p: Vec<f64>,
    mu: Vec<f64>,
    /// Minimum cover cost, capped at 1 for plotting.
    cover_cost: Vec<f64>,
    q: f64,
    p_c: f64,
}

pub fn curves_json(source: &str, points: usize) -> Result<String, String> {
    let h = load(source)?;
    let points = points.clamp(2, 200);
    let profile = UpsetProfile::compute(&h, DEFAULT_EXACT_LIMIT).map_err(|e| e.to_string())?;
    let q = cover::q_exact(&h, 1e-9).map_err(|e| e.to_string())?;
    let pc = p_c_bisect(&h, PcMode::exact(), 1e-9, RandomSeed::default()).map_err(|e| e.to_string())?;
    let mut out = Curves {
        n: h.n(),
        edges: h.edges().to_vec(),
        p: Vec::with_capacity(points),
        mu: Vec::with_capacity(points),
        cover_cost: Vec::with_capacity(points),
        q: q.q.get(),
        p_c: pc.p_c.get(),
    };
    for k in 0..points {
        let p = prob(k as f64 / (points - 1) as f64)?;
        let c = min_cover_cost(&h, p).map_err(|e| e.to_string())?;
        out.p.push(p.get());
        out.mu.push(profile.mu(p));
        out.cover_cost.push(c.cost.min(1.0));
    }
    Ok(json(&out))
}

#[derive(Serialize)]
struct RoundView {
    i: usize,
    w: Subset,
    good: usize,
    cover: Vec<Subset>,
    leftover: Vec<Subset>,
    cost: f64,
}

#[derive(Serialize)]
struct ProcessView {
    gamma: usize,
    w_sizes: Vec<usize>,
    rounds: Vec<RoundView>,
    terminated_successfully: bool,
    assembled_cover: Vec<Subset>,
    assembled_cost: f64,
    replay_ok: bool,
}

pub fn process_json(source: &str, big_l: f64, p: f64, seed: u64) -> Result<String, String> {
    let h = load(source)?.minimal_antichain();
    let ell = h.largest_minimal_element().map_err(|e| e.to_string())?;
    let schedule = build_schedule(big_l, ell, prob(p)?, h.n(), true).map_err(|e| e.to_string())?;
    let t = run_process(&h, &schedule, RandomSeed::from_master(seed)).map_err(|e| e.to_string())?;
    let view = ProcessView {
        gamma: schedule.gamma,
        w_sizes: schedule.w_i.clone(),
        rounds: t
            .rounds
            .iter()
            .map(|r| RoundView {
                i: r.i,
                w: r.w,
                good: r.good.len(),
                cover: r.cover.clone(),
                leftover: r.leftover.clone(),
                cost: r.cost,
            })
            .collect(),
        terminated_successfully: t.terminated_successfully,
        assembled_cover: t.assembled_cover.clone(),
        assembled_cost: t.assembled_cost(),
        replay_ok: hyperthresh::fragment::verify_transcript(&t).is_ok(),
    };
    Ok(json(&view))
}

#[derive(Serialize)]
struct FragmentRow {
    edge: Subset,
    fragment: Subset,
    witness: Subset,
    size: usize,
}

pub fn fragments_json(source: &str, w: &[u32]) -> Result<String, String> {
    let h = load(source)?;
    let w = w
        .iter()
        .map(|&e| e as usize)
        .filter(|&e| e < h.n())
        .collect::<Subset>();
    let rows = h
        .edges()
        .iter()
        .map(|&s| {
            let f = min_fragment(&h, s, w).map_err(|e| e.to_string())?;
            Ok(FragmentRow {
                edge: s,
                fragment: f.fragment,
                witness: f.witness,
                size: f.size,
            })
        })
        .collect::<Result<Vec<_>, String>>()?;
    Ok(json(&rows))
}

/// `μ_p`, minimum cover cost, `q` and `p_c` on a grid of `points` values of `p`.
#[wasm_bindgen]
pub fn curves(source: &str, points: usize) -> Result<String, JsError> {
    curves_json(source, points).map_err(|e| JsError::new(&e))
}

/// One exploratory run of the fragment process.
#[wasm_bindgen]
pub fn process(source: &str, big_l: f64, p: f64, seed: u64) -> Result<String, JsError> {
    process_json(source, big_l, p, seed).map_err(|e| JsError::new(&e))
}

/// Minimum fragment of every edge against the element list `w`.
#[wasm_bindgen]
pub fn fragments(source: &str, w: &[u32]) -> Result<String, JsError> {
    fragments_json(source, w).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    #[test]
    fn curves_bracket_the_thresholds() {
        let v: Value = serde_json::from_str(&curves_json("single_edge:k=2", 11).unwrap()).unwrap();
        let mu = v["mu"].as_array().unwrap();
        assert_eq!(mu.len(), 11);
        assert!((mu[5].as_f64().unwrap() - 0.25).abs() < 1e-12);
        assert!((v["p_c"].as_f64().unwrap() - 0.5f64.sqrt()).abs() < 1e-6);
        assert!(v["q"].as_f64().unwrap() <= v["p_c"].as_f64().unwrap() + 1e-9);
    }

    #[test]
    fn fragments_shrink_by_w() {
        let doc = r#"{"n": 4, "edges": [[0, 1], [1, 2, 3]]}"#;
        let v: Value = serde_json::from_str(&fragments_json(doc, &[1, 9]).unwrap()).unwrap();
        assert_eq!(v[0]["size"], 1);
        // nothing smaller fits inside {1, 2, 3}
        assert_eq!(v[1]["size"], 2);
        assert_eq!(v[1]["fragment"], serde_json::json!([2, 3]));
    }

    #[test]
    fn process_replays() {
        let v: Value = serde_json::from_str(&process_json("random_k_uniform:n=30,k=3,count=6,seed=2", 3.0, 0.002, 4).unwrap()).unwrap();
        assert_eq!(v["replay_ok"], true);
    }

    #[test]
    fn oversized_and_malformed_inputs_are_refused() {
        assert!(load("{\"n\": 2").is_err());
        assert!(load("perfect_matchings:v=10").unwrap_err().contains("too many"));
    }
}
