//! Text and JSON renderings of prover results.

use std::fmt::Write;

use linrep::engine::{ProverResult, Stats, Verdict, Witness};
use serde_json::{json, Value};

pub fn stats_table(stats: &Stats) -> String {
    let mut out = String::from("statistics\n   r size simple   reps\n");
    for (&(r, i, j), &c) in &stats.cells {
        writeln!(out, "{r:>4} {i:>4} {j:>6} {c:>6}").unwrap();
    }
    writeln!(out, "rank evaluations: {}", stats.rank_evaluations).unwrap();
    writeln!(out, "p-map nodes: {}", stats.pmap_nodes).unwrap();
    if stats.resumption_fallbacks > 0 {
        writeln!(out, "resumption fallbacks: {}", stats.resumption_fallbacks).unwrap();
    }
    if let Some(t) = stats.elapsed {
        writeln!(out, "time: {:.3} s", t.as_secs_f64()).unwrap();
    }
    out
}

pub fn stats_csv(stats: &Stats) -> String {
    let mut out = String::from("r,size,simple,reps\n");
    for (&(r, i, j), &c) in &stats.cells {
        writeln!(out, "{r},{i},{j},{c}").unwrap();
    }
    out
}

pub fn stats_json(stats: &Stats) -> Value {
    let cells: Vec<Value> = stats.cells.iter().map(|(&(r, i, j), &c)| json!({"r": r, "size": i, "simple": j, "reps": c})).collect();
    let mut v = json!({
        "cells": cells,
        "rank_evaluations": stats.rank_evaluations,
        "pmap_nodes": stats.pmap_nodes,
        "resumption_fallbacks": stats.resumption_fallbacks,
    });
    if let Some(t) = stats.elapsed {
        v["seconds"] = json!(t.as_secs_f64());
    }
    v
}

pub fn witness_json(w: &Witness) -> Value {
    let elements: Vec<Value> = w
        .spaces
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let rows: Vec<Vec<u8>> = s.basis().data().chunks(w.r.max(1)).take(s.dim()).map(<[u8]>::to_vec).collect();
            json!({"element": i + 1, "label": w.cert.images[i] + 1, "matrix": rows})
        })
        .collect();
    json!({"q": w.field.q(), "r": w.r, "elements": elements})
}

pub fn result_text(res: &ProverResult) -> String {
    let mut out = format!("verdict: {}\n", res.verdict);
    if let Some(n) = &res.note {
        writeln!(out, "note: {n}").unwrap();
    }
    if let Some(w) = &res.witness {
        writeln!(out, "witness over GF({}) in dimension {}", w.field.q(), w.r).unwrap();
        out.push_str(&w.display());
    }
    out.push_str(&stats_table(&res.stats));
    out
}

pub fn result_json(command: &str, res: &ProverResult) -> Value {
    json!({
        "command": command,
        "verdict": res.verdict.to_string(),
        "witness": res.witness.as_ref().map(witness_json),
        "note": res.note,
        "stats": stats_json(&res.stats),
    })
}

pub fn exit_code(v: Verdict) -> u8 {
    match v {
        Verdict::Yes => 0,
        Verdict::No => 1,
        Verdict::Inconclusive => 2,
    }
}
