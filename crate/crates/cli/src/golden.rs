//! Frozen regression values: `golden/<suite>/<name>.json`.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use shimura::cm::{cm_pair_scan, hecke_elements, repulsion_experiment, Label};
use shimura::genus::{threshold_search, GenusContext};
use shimura::quat::{LatticeOrder, QuatAlgebra};
use shimura::volume::{default_zoo, verify_conj_ratio};

use crate::config::RunConfig;

pub const SUITES: [&str; 5] = ["cm", "hecke", "repulsion", "audit", "volume"];

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct GoldenValue {
    pub suite: String,
    pub name: String,
    /// Relative tolerance on numbers; `None` means exact.
    pub tolerance: Option<f64>,
    pub value: Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct GoldenReport {
    pub suite: String,
    pub mode: &'static str,
    pub checked: Vec<String>,
    /// `name: path: expected vs got` for every mismatch or missing file.
    pub diffs: Vec<String>,
    pub pass: bool,
}

fn order(cfg: &RunConfig) -> shimura::Result<Arc<LatticeOrder>> {
    let alg = QuatAlgebra::from_ints(cfg.algebra.0, cfg.algebra.1)?;
    Ok(Arc::new(LatticeOrder::maximal(&alg)?))
}

/// Current values of a suite.
pub fn compute(suite: &str, cfg: &RunConfig) -> shimura::Result<Vec<GoldenValue>> {
    let gv = |name: &str, tolerance: Option<f64>, value: Value| GoldenValue {
        suite: suite.to_string(),
        name: name.to_string(),
        tolerance,
        value,
    };
    let mut out = Vec::new();
    match suite {
        "cm" => {
            let o = order(cfg)?;
            for p in [5, 7] {
                let scan = cm_pair_scan(&o, p, cfg.height("cm"))?;
                let heegner = scan.iter().filter(|c| c.label == Label::Heegner).count();
                out.push(gv(
                    &format!("scan_p{p}"),
                    None,
                    json!({"pairs": scan.len(), "heegner": heegner, "anti_heegner": scan.len() - heegner}),
                ));
            }
        }
        "hecke" => {
            let o = order(cfg)?;
            let mut counts = serde_json::Map::new();
            for m in [5, 7] {
                counts.insert(format!("m{m}"), json!(hecke_elements(&o, m, cfg.height("hecke"))?.elements.len()));
            }
            out.push(gv("class_counts", None, Value::Object(counts)));
        }
        "repulsion" => {
            let rep = repulsion_experiment(&order(cfg)?, 5, 1.0, cfg.height("repulsion"))?;
            out.push(gv(
                "p5_r1",
                None,
                json!({
                    "heegner_pairs": rep.heegner_pairs,
                    "entries": rep.entries.len(),
                    "max_m": rep.max_m,
                    "redundant_hits": rep.redundant_hits,
                    "degenerate_hits": rep.degenerate_hits,
                    "off_hecke": rep.off_hecke,
                }),
            ));
        }
        "audit" => {
            let t = threshold_search(2, 6, &cfg.constants)?;
            out.push(gv(
                "threshold_k2_d6",
                None,
                json!({"p_threshold": t.p_threshold, "genus_level": t.genus_level}),
            ));
            let ctx = GenusContext::from_catalog(6)?;
            let genera = [5, 7, 11, 13]
                .iter()
                .map(|&p| ctx.level_genus(p).map(|l| l.genus_per_component))
                .collect::<shimura::Result<Vec<_>>>()?;
            out.push(gv("level_genus_d6", None, json!(genera)));
        }
        "volume" => {
            let zoo = default_zoo()?;
            for (tag, name) in [("graph_conj", "conj_ratio_graph_conj"), ("hecke_translate(5)", "conj_ratio_hecke_translate_5")] {
                let curve = zoo.iter().find(|c| c.tag == tag).expect("bundled zoo curve");
                let mut ratios = Vec::new();
                for norm in shimura::hyper::Normalization::ALL {
                    let rep = verify_conj_ratio(curve, 1.0, 2.0, norm, &cfg.quadrature)?;
                    ratios.push(json!({"normalization": norm, "ratio": rep.measured_value}));
                }
                out.push(gv(name, Some(1e-6), json!(ratios)));
            }
        }
        other => {
            return Err(shimura::Error::InvalidInput(format!(
                "unknown golden suite {other}; known: {}",
                SUITES.join(", ")
            )))
        }
    }
    Ok(out)
}

fn numbers_match(a: f64, b: f64, tol: Option<f64>) -> bool {
    match tol {
        None => a == b,
        Some(t) => (a - b).abs() <= t * a.abs().max(b.abs()).max(1.0),
    }
}

/// Located differences between two JSON values.
pub fn diff(path: &str, want: &Value, got: &Value, tol: Option<f64>, out: &mut Vec<String>) {
    match (want, got) {
        (Value::Number(a), Value::Number(b)) if a != b => {
            let (x, y) = (a.as_f64().unwrap_or(f64::NAN), b.as_f64().unwrap_or(f64::NAN));
            if !numbers_match(x, y, tol) {
                out.push(format!("{path}: expected {a}, got {b}"));
            }
        }
        (Value::Array(a), Value::Array(b)) => {
            if a.len() != b.len() {
                out.push(format!("{path}: expected {} items, got {}", a.len(), b.len()));
            }
            for (k, (x, y)) in a.iter().zip(b).enumerate() {
                diff(&format!("{path}[{k}]"), x, y, tol, out);
            }
        }
        (Value::Object(a), Value::Object(b)) => {
            for (k, x) in a {
                match b.get(k) {
                    Some(y) => diff(&format!("{path}.{k}"), x, y, tol, out),
                    None => out.push(format!("{path}.{k}: missing")),
                }
            }
            for k in b.keys().filter(|k| !a.contains_key(*k)) {
                out.push(format!("{path}.{k}: unexpected"));
            }
        }
        (a, b) if a != b => out.push(format!("{path}: expected {a}, got {b}")),
        _ => {}
    }
}

fn file_of(dir: &Path, v: &GoldenValue) -> std::path::PathBuf {
    dir.join(&v.suite).join(format!("{}.json", v.name))
}

pub fn record(dir: &Path, values: &[GoldenValue]) -> std::io::Result<GoldenReport> {
    for v in values {
        let path = file_of(dir, v);
        std::fs::create_dir_all(path.parent().unwrap())?;
        let mut text = serde_json::to_string_pretty(v).map_err(std::io::Error::other)?;
        text.push('\n');
        std::fs::write(path, text)?;
    }
    Ok(GoldenReport {
        suite: values.first().map(|v| v.suite.clone()).unwrap_or_default(),
        mode: "record",
        checked: values.iter().map(|v| v.name.clone()).collect(),
        diffs: Vec::new(),
        pass: true,
    })
}

pub fn check(dir: &Path, values: &[GoldenValue]) -> GoldenReport {
    let mut diffs = Vec::new();
    for v in values {
        let path = file_of(dir, v);
        let stored = std::fs::read_to_string(&path)
            .map_err(|e| e.to_string())
            .and_then(|t| serde_json::from_str::<GoldenValue>(&t).map_err(|e| e.to_string()));
        match stored {
            Ok(g) => {
                let mut d = Vec::new();
                diff("$", &g.value, &v.value, g.tolerance, &mut d);
                diffs.extend(d.into_iter().map(|x| format!("{}: {x}", v.name)));
            }
            Err(e) => diffs.push(format!("{}: cannot read {}: {e}", v.name, path.display())),
        }
    }
    GoldenReport {
        suite: values.first().map(|v| v.suite.clone()).unwrap_or_default(),
        mode: "check",
        checked: values.iter().map(|v| v.name.clone()).collect(),
        pass: diffs.is_empty(),
        diffs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Vec<GoldenValue> {
        vec![GoldenValue {
            suite: "t".into(),
            name: "x".into(),
            tolerance: Some(1e-6),
            value: json!({"a": [1.0, 2.0], "b": "s"}),
        }]
    }

    #[test]
    fn record_then_check_passes() {
        let dir = tempfile::tempdir().unwrap();
        record(dir.path(), &sample()).unwrap();
        assert!(check(dir.path(), &sample()).pass);
    }

    #[test]
    fn perturbation_is_located() {
        let dir = tempfile::tempdir().unwrap();
        record(dir.path(), &sample()).unwrap();
        let mut now = sample();
        now[0].value = json!({"a": [1.0, 2.1], "b": "s"});
        let rep = check(dir.path(), &now);
        assert!(!rep.pass);
        assert_eq!(rep.diffs, vec!["x: $.a[1]: expected 2.0, got 2.1"]);
        now[0].value = json!({"a": [1.0, 2.0000001], "b": "s"});
        assert!(check(dir.path(), &now).pass);
    }

    #[test]
    fn missing_file_fails() {
        let dir = tempfile::tempdir().unwrap();
        assert!(!check(dir.path(), &sample()).pass);
    }
}
