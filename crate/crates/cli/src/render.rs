//! Human-readable rendering of report JSON files.

use std::fmt::Write as _;

use canon_core::{LMat, Laurent};
use serde_json::Value;

use crate::CliError;

fn laurent(v: &Value) -> String {
    serde_json::from_value::<Laurent>(v.clone()).map(|x| x.to_string()).unwrap_or_else(|_| v.to_string())
}

fn matrix(v: &Value, labels: &[String], out: &mut String) {
    let Ok(m) = serde_json::from_value::<LMat>(v.clone()) else {
        let _ = writeln!(out, "    {v}");
        return;
    };
    for (r, c, x) in m.entries() {
        if !x.is_zero() {
            let _ = writeln!(out, "    [{} , {}] {x}", lbl(labels, r), lbl(labels, c));
        }
    }
}

fn lbl(labels: &[String], i: usize) -> &str {
    labels.get(i).map(String::as_str).unwrap_or("?")
}

fn strings(v: &Value) -> Vec<String> {
    v.as_array().map(|a| a.iter().map(|x| x.as_str().map(str::to_string).unwrap_or_else(|| x.to_string())).collect()).unwrap_or_default()
}

fn flag(v: &Value) -> &'static str {
    match v.as_bool() {
        Some(true) => "yes",
        Some(false) => "no",
        None => "-",
    }
}

/// Render a report produced by any subcommand.
pub fn render(report: &Value) -> Result<String, CliError> {
    let header = report.get("header").ok_or_else(|| CliError::Config("not a report: missing \"header\"".into()))?;
    let command = header["command"].as_str().unwrap_or("?");
    let mut out = String::new();
    let _ = writeln!(out, "{command} report");
    let _ = writeln!(out, "  config hash: {}", header["config_hash"].as_str().unwrap_or("?"));
    let _ = writeln!(out, "  truncation: {}  seed: {}", header["truncation"], header["seed"]);
    match command {
        "tensor" => tensor(report, &mut out),
        "dual" => dual(report, &mut out),
        "hecke" => hecke(report, &mut out),
        "klr-selftest" => klr(report, &mut out),
        "udot" => udot(report, &mut out),
        other => return Err(CliError::Config(format!("unknown report kind {other:?}"))),
    }
    let v = strings(&report["violations"]);
    if v.is_empty() {
        out.push_str("result: pass\n");
    } else {
        let _ = writeln!(out, "result: {} violation(s)", v.len());
        for x in v {
            let _ = writeln!(out, "  - {x}");
        }
    }
    Ok(out)
}

fn tensor(r: &Value, out: &mut String) {
    let _ = writeln!(out, "  cartan: {}  weights: {}  eps: {}  mode: {}", r["cartan"], r["weights"], r["eps"], r["mode"]);
    let _ = writeln!(out, "  canonical vectors: {}", r["canonical_vectors"]);
    for w in r["weight_spaces"].as_array().into_iter().flatten() {
        let labels = strings(&w["labels"]);
        let _ = writeln!(out, "weight {} (dim {}, {} sweeps)", w["weight"], w["dim"], w["iterations"]);
        let _ = writeln!(out, "  standards: {}", labels.join(" "));
        let _ = writeln!(
            out,
            "  audit: bar-fixed {}  unitriangular {}  almost orthonormal {}  negative transition {}",
            flag(&w["audit"]["bar_fixed"]),
            flag(&w["audit"]["unitriangular"]),
            flag(&w["audit"]["almost_orthonormal"]),
            flag(&w["audit"]["transition_negative"])
        );
        let _ = writeln!(out, "  transition:");
        matrix(&w["transition"], &labels, out);
        let _ = writeln!(out, "  gram of standards:");
        matrix(&w["structure"]["gram"], &labels, out);
    }
    let neg = r["actions"].as_array().map(|a| a.iter().filter(|x| x["nonnegative"] == Value::Bool(false)).count()).unwrap_or(0);
    let total = r["actions"].as_array().map(Vec::len).unwrap_or(0);
    let _ = writeln!(out, "  action matrices: {total} computed, {neg} with negative coefficients");
}

fn dual(r: &Value, out: &mut String) {
    for b in r["blocks"].as_array().into_iter().flatten() {
        let _ = writeln!(
            out,
            "block {}: identity {}  balanced {}  balanced positive {}",
            b["name"].as_str().unwrap_or("?"),
            flag(&b["identity_holds"]),
            flag(&b["positivity"]["balanced"]),
            flag(&b["positivity"]["balanced_positive"])
        );
        if let Some(d) = b["positivity"]["dual"].as_object() {
            let _ = writeln!(out, "  dual balanced positive in p = -q^-1: {}", flag(&d["confirmed"]));
        }
    }
}

fn hecke(r: &Value, out: &mut String) {
    let _ = writeln!(out, "  S_{}: {} elements", r["rank"], r["labels"].as_array().map(Vec::len).unwrap_or(0));
    let _ = writeln!(out, "Kazhdan-Lusztig polynomials (x < w, nontrivial):");
    for e in r["kl_polynomials"].as_array().into_iter().flatten() {
        if e["x"] != e["w"] {
            let _ = writeln!(out, "  P[{}, {}] = {}", e["x"].as_str().unwrap_or("?"), e["w"].as_str().unwrap_or("?"), laurent(&e["polynomial"]));
        }
    }
    if let Some(d) = r["positivity"]["dual"].as_object() {
        let _ = writeln!(out, "  dual balanced positive: {}", flag(&d["confirmed"]));
    }
}

fn klr(r: &Value, out: &mut String) {
    let _ = writeln!(out, "  trials: {}", r["trials"]);
    for w in strings(&r["warnings"]) {
        let _ = writeln!(out, "  warning: {w}");
    }
    for run in r["runs"].as_array().into_iter().flatten() {
        let tag = if run["corrupted"] == Value::Bool(true) { " (corrupted Q)" } else { "" };
        let _ = writeln!(out, "{} {}{}: {}", run["cartan"].as_str().unwrap_or("?"), run["action"].as_str().unwrap_or("?"), tag, if run["pass"] == Value::Bool(true) { "pass" } else { "FAIL" });
        if let Some(rel) = run["relations"]["relations"].as_object() {
            for (name, o) in rel {
                let _ = writeln!(out, "  {name}: {} checked, {} failed", o["checked"], o["failed"]);
            }
        }
    }
    let g = &r["affine_geometric"];
    let _ = writeln!(out, "affine sl2, geometric Q: degree {}, x^2 = c x with c = {}", g["degree"], g["quasi_idempotent_constant"]);
    let s = &r["affine_sum_of_squares"];
    let _ = writeln!(out, "affine sl2, Q = u^2 + v^2: nilpotency order {}", s["nilpotency_order"]);
}

fn udot(r: &Value, out: &mut String) {
    let _ = writeln!(out, "  n: {}  bound: {}  mode: {}", r["n"], r["bound"], r["mode"]);
    for w in r["words"].as_array().into_iter().flatten() {
        let stab = if w["stabilized"] == Value::Bool(true) { "stabilized" } else { "NOT stabilized" };
        let _ = writeln!(out, "{}: {stab} after {} samples", w["word"].as_str().unwrap_or("?"), w["samples"].as_array().map(Vec::len).unwrap_or(0));
        if let Some(c) = w["coordinates"].as_object() {
            for (k, x) in c {
                let _ = writeln!(out, "  {k}: {}", laurent(x));
            }
        }
        let sign = match w["sign"]["outcome"].as_str() {
            Some("plus") | Some("minus") => format!("{} {}", w["sign"]["outcome"].as_str().unwrap_or(""), w["sign_label"].as_str().unwrap_or("?")),
            Some(o) => o.to_string(),
            None => "none".into(),
        };
        let _ = writeln!(out, "  sign: {sign}");
    }
}
