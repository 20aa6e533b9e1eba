use std::fs;
use std::path::Path;

use diracsim::config::SimConfig;
use diracsim::experiment::convergence_ladder;
use diracsim::groundstate::{default_ladder, expected_classification, verify_regularity, Classification, GroundStateModel};

use crate::output::{sha256_hex, write_json, write_lines, Failure, Outcome};

/// `(ν, σ)` classification table; fails if a row contradicts the threshold
/// outside the margin.
pub fn groundstate(root: &Path, nus: &[f64], sigmas: &[f64], a: Option<f64>) -> Outcome {
    if nus.is_empty() || sigmas.is_empty() {
        return Err(Failure::Config("groundstate needs at least one nu and one sigma".into()));
    }
    let dir = root.join("groundstate");
    let mut reports = Vec::new();
    let mut rows = Vec::new();
    let mut mismatches = Vec::new();
    for &nu in nus {
        let model = GroundStateModel::new(nu, a).map_err(|e| Failure::Config(e.to_string()))?;
        let tail = model.fourier_tail_exponent(50.0, 500.0)?;
        for &sigma in sigmas {
            let rep = verify_regularity(&model, sigma, &default_ladder()).map_err(|e| Failure::Config(e.to_string()))?;
            let expected = expected_classification(nu, sigma)?;
            let consistent = expected == Classification::Indeterminate || rep.classification == expected;
            if !consistent {
                mismatches.push(format!("nu={nu} sigma={sigma}: {} vs expected {expected}", rep.classification));
            }
            let last = rep.truncated.last().map_or(f64::NAN, |p| p.1);
            rows.push(format!(
                "{nu:?},{:?},{sigma:?},{:?},{},{expected},{:?},{:?},{last:?}",
                model.a, rep.threshold, rep.classification, rep.growth_exponent, tail
            ));
            reports.push(rep);
        }
    }
    fs::create_dir_all(&dir)?;
    write_lines(
        &dir.join("classification.csv"),
        "nu,a,sigma,threshold,classification,expected,growth_exponent,fourier_tail_exponent,truncated_integral",
        rows.iter().cloned(),
    )?;
    write_json(&dir.join("classification.json"), &reports)?;
    for r in &rows {
        println!("{r}");
    }
    if !mismatches.is_empty() {
        return Err(Failure::Invariant(format!("classification inconsistent with threshold: {}", mismatches.join("; "))));
    }
    Ok(())
}

/// Empirical-order table of the product formula along the configured
/// ballistic trajectory; every defined order must be at least 1.
pub fn convergence(root: &Path, config_path: &Path, ladder: &[usize]) -> Outcome {
    let raw = fs::read(config_path)
        .map_err(|e| Failure::Config(format!("cannot read config {}: {e}", config_path.display())))?;
    let text = String::from_utf8(raw.clone()).map_err(|_| Failure::Config("config is not valid UTF-8".into()))?;
    let cfg = SimConfig::from_toml_str(&text)?;
    let setup = cfg.prepare(config_path.parent().unwrap_or(Path::new(".")))?;
    let rows = convergence_ladder(&setup, ladder).map_err(|e| Failure::Config(e.to_string()))?;
    let dir = root.join(&cfg.output.path).join("convergence");
    fs::create_dir_all(&dir)?;
    let fmt = |v: Option<f64>| v.map_or(String::new(), |x| format!("{x:?}"));
    write_lines(
        &dir.join("convergence.csv"),
        "n_slices,difference,order,charge",
        rows.iter().map(|r| format!("{},{},{},{:?}", r.n_slices, fmt(r.difference), fmt(r.order), r.charge)),
    )?;
    write_json(
        &dir.join("manifest.json"),
        &serde_json::json!({ "config_sha256": sha256_hex(&raw), "ladder": ladder, "rows": rows }),
    )?;
    for r in &rows {
        println!("{} {} {}", r.n_slices, fmt(r.difference), fmt(r.order));
    }
    let low: Vec<String> =
        rows.iter().filter_map(|r| r.order.filter(|o| !(*o >= 1.0)).map(|o| format!("n={} order {o:.3}", r.n_slices))).collect();
    if !low.is_empty() {
        return Err(Failure::Invariant(format!("empirical order below 1: {}", low.join(", "))));
    }
    Ok(())
}
