//! Documents (JSON) and reports (CSV).
//!
//! Instances are `{"n": .., "edges": [[..], ..]}`; certificates are
//! `{"p": "0.49", "sets": [[..]], "cost": ..}`; transcripts extend the instance
//! document with `seed`, `schedule` and `rounds`. Probabilities are decimal
//! strings.

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::experiments::KkReport;
use crate::fragment::{ln_success1_bound, ProcessTranscript};

pub fn to_document<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("documents contain only serializable data")
}

pub fn from_document<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::BadParameter(format!("malformed document: {e}")))
}

/// `x` with 12 significant digits in plain decimal notation.
pub fn sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return x.to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    if !(-30..=30).contains(&magnitude) {
        return format!("{x:.11e}");
    }
    let decimals = (11 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "NA".to_string(), sig12)
}

pub const KK_COLUMNS: [&str; 10] = [
    "family",
    "params",
    "n",
    "ell",
    "q",
    "p_c",
    "ratio",
    "seeds",
    "success_rate",
    "mean_cost",
];

/// One row per report; process columns describe the runs at `p = q`.
pub fn kk_csv(reports: &[KkReport]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(KK_COLUMNS).expect("in-memory write");
    for r in reports {
        let at_q = r.process.first();
        w.write_record([
            r.instance.family().to_string(),
            r.instance.params(),
            r.n.to_string(),
            r.ell.to_string(),
            sig12(r.q.get()),
            sig12(r.p_c.get()),
            opt(r.ratio),
            r.seeds.to_string(),
            opt(at_q.and_then(|s| s.success_rate)),
            opt(at_q.and_then(|s| s.mean_cost)),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

/// Per-round cost curve of a transcript, ready for plotting.
pub fn round_curve_csv(t: &ProcessTranscript) -> String {
    let s = &t.schedule;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "round",
        "ell_i",
        "threshold",
        "L_i",
        "w_i",
        "good",
        "cover_sets",
        "leftover_edges",
        "cost",
        "ln_cost",
        "ln_bound",
        "success1",
        "success2",
    ])
    .expect("in-memory write");
    for r in &t.rounds {
        let k = r.i - 1;
        w.write_record([
            r.i.to_string(),
            sig12(s.ell_i[r.i]),
            sig12(s.threshold(r.i)),
            sig12(s.l_i[k]),
            s.w_i[k].to_string(),
            r.good.len().to_string(),
            r.cover.len().to_string(),
            r.leftover.len().to_string(),
            sig12(r.cost),
            sig12(r.ln_cost),
            sig12(ln_success1_bound(s.l_i[k], s.ell_i[r.i])),
            r.success1.to_string(),
            r.success2.to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}
