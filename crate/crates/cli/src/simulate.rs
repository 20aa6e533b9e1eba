use std::fs;
use std::path::Path;

use diracsim::config::SimConfig;
use diracsim::experiment::{simulate, TimeSeriesRecord};

use crate::output::{sha256_hex, write_json, write_lines, Failure, Outcome};

pub fn run(root: &Path, config_path: &Path) -> Outcome {
    let raw = fs::read(config_path)
        .map_err(|e| Failure::Config(format!("cannot read config {}: {e}", config_path.display())))?;
    let text = String::from_utf8(raw.clone()).map_err(|_| Failure::Config("config is not valid UTF-8".into()))?;
    let cfg = match SimConfig::from_toml_str(&text) {
        Ok(c) => c,
        Err(e) => {
            let f = Failure::from(e);
            f.write_record(root);
            return Err(f);
        }
    };
    let dir = root.join(&cfg.output.path);
    let result = execute(&cfg, config_path, &raw, &dir);
    if let Err(f) = &result {
        f.write_record(&dir);
    }
    result
}

fn execute(cfg: &SimConfig, config_path: &Path, raw: &[u8], dir: &Path) -> Outcome {
    let base = config_path.parent().unwrap_or(Path::new("."));
    let setup = cfg.prepare(base)?;
    let out = simulate(&setup)?;
    fs::create_dir_all(dir)?;

    let n = setup.nuclei.len();
    write_lines(&dir.join("timeseries.csv"), &TimeSeriesRecord::csv_header(n), out.records.iter().map(|r| r.csv_row()))?;
    out.checkpoint.save(dir.join("final.dns"))?;
    let manifest = serde_json::json!({
        "program": "diracsim",
        "version": env!("CARGO_PKG_VERSION"),
        "config_path": config_path.display().to_string(),
        "config_sha256": sha256_hex(raw),
        "config": cfg,
        "summary": out.summary,
        "records": out.records.len(),
        "final_time": out.checkpoint.time,
        "files": { "timeseries": "timeseries.csv", "checkpoint": "final.dns" },
    });
    write_json(&dir.join("manifest.json"), &manifest)?;

    if !out.summary.admissible {
        return Err(Failure::Solver("admissibility of the final trajectory lost".into()));
    }
    if !out.records.iter().all(TimeSeriesRecord::is_finite) {
        return Err(Failure::Invariant("non-finite entries in the time series".into()));
    }
    if out.records.windows(2).any(|w| !(w[1].t > w[0].t)) {
        return Err(Failure::Invariant("time series is not monotone in t".into()));
    }
    println!(
        "simulate: {} records, charge drift {:.3e}, energy drift {:.3e}, output {}",
        out.records.len(),
        out.summary.charge_drift,
        out.summary.energy_drift,
        dir.display()
    );
    Ok(())
}
