use std::fs;
use std::io::Write;
use std::path::Path;

use clap::ValueEnum;
use serde::Serialize;

use diracsim::analysis::{
    coulomb_multiplier_report, hardy_report, radial_decomposition_check, random_smooth_family, regularization_rate,
    rellich_ratio, rellich_report, shell_field, RadialProfile, RELLICH_CLASSICAL, RELLICH_QUOTED,
};
use diracsim::hartree::bilinear_estimate_report;
use diracsim::lattice::{GridSpec, SpinorField};

use crate::output::{write_json, Failure, Outcome};

/// Side of the periodic box used by every suite.
const BOX_LENGTH: f64 = 12.0;
const FAMILY_SIZE: usize = 6;
const SIGMAS: [f64; 3] = [1.0, 1.2, 1.4];
const RATE_SIGMA: f64 = 1.4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Hardy,
    Coulomb,
    Rellich,
    Radial,
    Rate,
    Bilinear,
    All,
}

impl Suite {
    fn members(self) -> Vec<Suite> {
        match self {
            Suite::All => vec![Suite::Hardy, Suite::Coulomb, Suite::Rellich, Suite::Radial, Suite::Rate, Suite::Bilinear],
            s => vec![s],
        }
    }

    fn name(self) -> &'static str {
        match self {
            Suite::Hardy => "hardy",
            Suite::Coulomb => "coulomb",
            Suite::Rellich => "rellich",
            Suite::Radial => "radial",
            Suite::Rate => "rate",
            Suite::Bilinear => "bilinear",
            Suite::All => "all",
        }
    }
}

#[derive(Debug, Serialize)]
struct Check {
    suite: &'static str,
    name: String,
    value: f64,
    bound: String,
    passed: bool,
}

struct Lab {
    grid: GridSpec,
    seed: u64,
    family: Vec<(String, SpinorField)>,
}

#[derive(Default)]
struct Checks(Vec<Check>);

impl Checks {
    fn check(&mut self, suite: Suite, name: impl Into<String>, value: f64, bound: &str, passed: bool) {
        self.0.push(Check { suite: suite.name(), name: name.into(), value, bound: bound.into(), passed });
    }
}

fn jsonl(path: &Path, rows: &[impl Serialize]) -> Result<(), Failure> {
    let mut w = std::io::BufWriter::new(fs::File::create(path)?);
    for r in rows {
        let line = serde_json::to_string(r).map_err(|e| Failure::Io(e.to_string()))?;
        writeln!(w, "{line}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn run(root: &Path, suite: Suite, n: usize, seed: u64) -> Outcome {
    let grid = GridSpec::new(n, BOX_LENGTH).map_err(|e| Failure::Config(e.to_string()))?;
    let dir = root.join("validate");
    fs::create_dir_all(&dir)?;
    let family = random_smooth_family(grid, FAMILY_SIZE, 1.0, 1.5, seed)
        .into_iter()
        .enumerate()
        .map(|(i, u)| (format!("random-{i}"), u))
        .collect();
    let lab = Lab { grid, seed, family };
    let mut checks = Checks::default();
    let members = suite.members();
    for s in &members {
        let result = match s {
            Suite::Hardy | Suite::Coulomb => singular_weights(&lab, &mut checks, *s, &dir),
            Suite::Rellich => rellich(&lab, &mut checks, &dir),
            Suite::Radial => radial(&mut checks, &dir),
            Suite::Rate => rate(&lab, &mut checks, &dir),
            Suite::Bilinear => bilinear(&lab, &mut checks, &dir),
            Suite::All => unreachable!(),
        };
        if let Err(f) = result {
            f.write_record(&dir);
            return Err(f);
        }
    }
    let failed: Vec<&Check> = checks.0.iter().filter(|c| !c.passed).collect();
    let summary = serde_json::json!({
        "suite": suite.name(),
        "suites": members.iter().map(|s| s.name()).collect::<Vec<_>>(),
        "grid_n": n,
        "box_length": BOX_LENGTH,
        "seed": seed,
        "family": { "generator": "random_smooth_family", "count": FAMILY_SIZE, "width": 1.0, "spread": 1.5 },
        "checks": checks.0,
        "failed": failed.len(),
    });
    write_json(&dir.join(format!("{}-summary.json", suite.name())), &summary)?;
    for c in &checks.0 {
        println!("{} {}: {} = {:.6e} ({})", if c.passed { "ok  " } else { "FAIL" }, c.suite, c.name, c.value, c.bound);
    }
    if !failed.is_empty() {
        let names: Vec<String> = failed.iter().map(|c| format!("{}/{}", c.suite, c.name)).collect();
        let f = Failure::Invariant(format!("hard invariants failed: {}", names.join(", ")));
        f.write_record(&dir);
        return Err(f);
    }
    Ok(())
}

/// Hardy and Coulomb-multiplier sup ratios; the invariant is finiteness.
fn singular_weights(lab: &Lab, checks: &mut Checks, suite: Suite, dir: &Path) -> Outcome {
    let mut reports = Vec::new();
    for sigma in SIGMAS {
        let rep = match suite {
            Suite::Hardy => hardy_report("random_smooth", &lab.family, sigma, Some(lab.seed))?,
            _ => coulomb_multiplier_report("random_smooth", &lab.family, sigma, Some(lab.seed))?,
        };
        checks.check(suite, format!("sup_ratio(sigma={sigma})"), rep.sup_ratio, "finite", rep.sup_ratio.is_finite());
        reports.push(rep);
    }
    jsonl(&dir.join(format!("{}.jsonl", suite.name())), &reports)
}

/// Rellich ratios on fields inside (shells) and outside (random) the
/// hypothesis, reported against both candidate constants.
fn rellich(lab: &Lab, checks: &mut Checks, dir: &Path) -> Outcome {
    let shells: Vec<(String, SpinorField)> = [(1.0, 3.0), (1.5, 4.0), (0.75, 2.5)]
        .iter()
        .map(|&(a, b)| (format!("shell-{a}-{b}"), shell_field(lab.grid, a, b)))
        .collect();
    let inside = rellich_report("shell", &shells)?;
    let outside = rellich_report("random_smooth", &lab.family)?;
    let details: Vec<_> = shells.iter().map(|(l, u)| rellich_ratio(u).map(|r| (l.clone(), r))).collect::<Result<_, _>>()?;
    for (label, r) in &details {
        checks.check(Suite::Rellich, format!("{label} ratio vs 16/9"), r.ratio, "reported", true);
        checks.check(Suite::Rellich, format!("{label} ratio vs 9/16"), r.ratio, "reported", true);
    }
    checks.check(Suite::Rellich, "shell sup_ratio", inside.sup_ratio, "finite", inside.sup_ratio.is_finite());
    jsonl(&dir.join("rellich.jsonl"), &[&inside, &outside])?;
    let constants = serde_json::json!({
        "classical": RELLICH_CLASSICAL,
        "quoted": RELLICH_QUOTED,
        "shell_sup": inside.sup_ratio,
        "shell_within_classical": inside.sup_ratio <= RELLICH_CLASSICAL,
        "shell_within_quoted": inside.sup_ratio <= RELLICH_QUOTED,
        "details": details.iter().map(|(l, r)| serde_json::json!({ "label": l, "report": r })).collect::<Vec<_>>(),
    });
    write_json(&dir.join("rellich-constants.json"), &constants)
}

/// Radial decomposition of `∫|Δu|²`: the integrated-by-parts form must
/// match the direct value; the stated coefficient is reported alongside.
fn radial(checks: &mut Checks, dir: &Path) -> Outcome {
    let mut rows = Vec::new();
    for degree in 0..=2u32 {
        for profile in [
            RadialProfile::GaussianMonomial { power: degree, width: 1.0 },
            RadialProfile::PolynomialBump { inner: 1.0, outer: 3.0 },
        ] {
            let d = radial_decomposition_check(&profile, degree)?;
            checks.check(Suite::Radial, format!("k={degree} {profile:?} corrected"), d.corrected_residual, "< 1e-8", d.corrected_residual < 1e-8);
            rows.push(serde_json::json!({ "profile": profile, "result": d }));
        }
    }
    jsonl(&dir.join("radial.jsonl"), &rows)
}

/// Convergence rate of the regularized Coulomb weight at `σ = 1.4`.
fn rate(lab: &Lab, checks: &mut Checks, dir: &Path) -> Outcome {
    let h = lab.grid.spacing();
    let mut rows = Vec::new();
    for (label, u) in &lab.family {
        let fit = regularization_rate(u, RATE_SIGMA, &[8.0 * h, 4.0 * h, 2.0 * h, 0.0])?;
        rows.push(serde_json::json!({ "label": label, "sigma": RATE_SIGMA, "fit": fit }));
        let bound = RATE_SIGMA - 1.0 - 0.1;
        checks.check(Suite::Rate, format!("{label} slope"), fit.slope, ">= sigma - 1 - 0.1", fit.slope >= bound);
    }
    jsonl(&dir.join("rate.jsonl"), &rows)
}

/// Trilinear Hartree estimates on consecutive triples of the family.
fn bilinear(lab: &Lab, checks: &mut Checks, dir: &Path) -> Outcome {
    let mut rows = Vec::new();
    let m = lab.family.len();
    for i in 0..m {
        let (u, v, w) = (&lab.family[i].1, &lab.family[(i + 1) % m].1, &lab.family[(i + 2) % m].1);
        let r = bilinear_estimate_report(u, v, w, 0.25)?;
        let worst = r.l2_ratio.max(r.h1_ratio).max(r.fractional_ratio);
        checks.check(Suite::Bilinear, format!("triple-{i} max ratio"), worst, "finite", worst.is_finite());
        rows.push(serde_json::json!({ "triple": i, "report": r }));
    }
    jsonl(&dir.join("bilinear.jsonl"), &rows)
}
