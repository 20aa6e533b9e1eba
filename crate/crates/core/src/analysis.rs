//! Measured constants of the Hardy, Rellich and Coulomb-multiplier
//! inequalities, the radial form of `∫|Δu|²`, and the rate at which the
//! regularized Coulomb weight converges.
//!
//! Singular weights are evaluated with `|x|` clipped from below at `h/2`.

use std::io::Write;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{homogeneous_sobolev_norm, sobolev_norm, GridSpec, SpinorField, Vec3};
use crate::quadrature::simpson;

/// Classical Rellich constant in three dimensions, `16/9`.
pub const RELLICH_CLASSICAL: f64 = 16.0 / 9.0;
/// The reciprocal `(3/4)²`, quoted as optimal for the same inequality.
pub const RELLICH_QUOTED: f64 = 9.0 / 16.0;
/// Simpson intervals of the radial checks.
pub const RADIAL_NODES: usize = 8192;

/// `max(|x|, h/2)` at every grid point.
fn clipped_radius(grid: &GridSpec) -> Vec<f64> {
    let clip = 0.5 * grid.spacing();
    let mut out = Vec::with_capacity(grid.len());
    grid.for_each_position(|_, x| out.push(x.norm().max(clip)));
    out
}

fn weighted_l2_squared(u: &SpinorField, weight: impl Fn(f64) -> f64) -> f64 {
    let grid = *u.grid();
    let rho = u.in_position().density();
    clipped_radius(&grid)
        .iter()
        .zip(rho.data())
        .map(|(r, p)| weight(*r) * p)
        .sum::<f64>()
        * grid.cell_volume()
}

fn weighted_field(u: &SpinorField, weight: impl Fn(f64) -> f64) -> SpinorField {
    let grid = *u.grid();
    let mut out = u.in_position();
    let w: Vec<Complex64> = clipped_radius(&grid).iter().map(|r| Complex64::new(weight(*r), 0.0)).collect();
    out.multiply_pointwise(&w);
    out
}

fn ratio(lhs: f64, rhs: f64) -> f64 {
    if lhs == 0.0 {
        0.0
    } else {
        lhs / rhs
    }
}

/// `h³Σ|u|²/max(|x|, h/2)^{2σ}` over `‖u‖²_{Ḣ^σ}`.
pub fn hardy_ratio(u: &SpinorField, sigma: f64) -> Result<f64> {
    if !(0.0..1.5).contains(&sigma) {
        return Err(Error::InvalidArgument(format!("Hardy index must lie in [0, 3/2), got {sigma}")));
    }
    let lhs = weighted_l2_squared(u, |r| r.powf(-2.0 * sigma));
    let rhs = if sigma == 0.0 { u.norm().powi(2) } else { homogeneous_sobolev_norm(u, sigma)?.powi(2) };
    Ok(ratio(lhs, rhs))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RellichReport {
    /// `∫|u|²/|x|⁴`.
    pub lhs: f64,
    /// `∫|Δu|²`.
    pub rhs: f64,
    pub ratio: f64,
    /// Fraction of the charge within `2h` of the origin.
    pub origin_fraction: f64,
    /// The input does not vanish near the origin, so it lies outside the
    /// inequality's hypothesis.
    pub outside_hypothesis: bool,
    pub within_classical: bool,
    pub within_quoted: bool,
}

/// Rellich ratio `∫|u|²/|x|⁴ / ∫|Δu|²`, compared with both candidate constants.
pub fn rellich_ratio(u: &SpinorField) -> Result<RellichReport> {
    let grid = *u.grid();
    let lhs = weighted_l2_squared(u, |r| r.powi(-4));
    let rhs = homogeneous_sobolev_norm(u, 2.0)?.powi(2);
    let r0 = 2.0 * grid.spacing();
    let total = u.charge();
    let near = weighted_l2_squared(u, |r| if r < r0 { 1.0 } else { 0.0 });
    let origin_fraction = if total == 0.0 { 0.0 } else { near / total };
    let ratio = ratio(lhs, rhs);
    Ok(RellichReport {
        lhs,
        rhs,
        ratio,
        origin_fraction,
        outside_hypothesis: origin_fraction > 1e-10,
        within_classical: ratio <= RELLICH_CLASSICAL,
        within_quoted: ratio <= RELLICH_QUOTED,
    })
}

/// `‖u/|x|‖_{H^{σ-1}} / ‖u‖_{H^σ}`.
pub fn coulomb_multiplier_ratio(u: &SpinorField, sigma: f64) -> Result<f64> {
    if !(1.0..1.5).contains(&sigma) {
        return Err(Error::InvalidArgument(format!("Coulomb multiplier index must lie in [1, 3/2), got {sigma}")));
    }
    let lhs = sobolev_norm(&weighted_field(u, |r| 1.0 / r), sigma - 1.0)?;
    Ok(ratio(lhs, sobolev_norm(u, sigma)?))
}

/// Radial profile `u_k(r)` with its first two derivatives.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RadialProfile {
    /// `r^p e^{-r²/(2w²)}`.
    GaussianMonomial { power: u32, width: f64 },
    /// `((r - a)(b - r))⁴` on `[a, b]`, zero elsewhere.
    PolynomialBump { inner: f64, outer: f64 },
}

impl RadialProfile {
    pub fn support(&self) -> (f64, f64) {
        match *self {
            RadialProfile::GaussianMonomial { width, .. } => (0.0, 14.0 * width),
            RadialProfile::PolynomialBump { inner, outer } => (inner, outer),
        }
    }

    /// `(u, u', u'')` at `r`.
    pub fn eval(&self, r: f64) -> (f64, f64, f64) {
        match *self {
            RadialProfile::GaussianMonomial { power, width } => {
                let p = power as f64;
                let s = 1.0 / (width * width);
                let g = (-0.5 * s * r * r).exp();
                let rp = |e: i32| if e < 0 { 0.0 } else { r.powi(e) };
                let pi = power as i32;
                let v = rp(pi) * g;
                let d1 = (p * rp(pi - 1) - s * rp(pi + 1)) * g;
                let d2 = (p * (p - 1.0) * rp(pi - 2) - (2.0 * p + 1.0) * s * rp(pi) + s * s * rp(pi + 2)) * g;
                (v, d1, d2)
            }
            RadialProfile::PolynomialBump { inner, outer } => {
                if r <= inner || r >= outer {
                    return (0.0, 0.0, 0.0);
                }
                let p = (r - inner) * (outer - r);
                let dp = inner + outer - 2.0 * r;
                (p.powi(4), 4.0 * p.powi(3) * dp, 12.0 * p * p * dp * dp - 8.0 * p.powi(3))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialDecomposition {
    pub degree: u32,
    /// `∫|Δ(u_k Y_k)|²` from the pointwise radial Laplacian.
    pub direct: f64,
    /// Integrated-by-parts form with last coefficient `c_k(c_k - 1)`.
    pub stated: f64,
    /// The same form with the coefficient `c_k(c_k - 2)` that integration
    /// by parts actually produces.
    pub corrected: f64,
    pub stated_residual: f64,
    pub corrected_residual: f64,
}

/// Compares `∫|Δ(u_k Y_k)|²` with
/// `∫|u_k''|²r² + 2(c_k+1)∫|u_k'|² + C∫u_k²/r²`, `c_k = k(k+1)`, for both
/// candidate coefficients `C`, by composite Simpson quadrature.
pub fn radial_decomposition_check(profile: &RadialProfile, degree: u32) -> Result<RadialDecomposition> {
    if degree > 2 {
        return Err(Error::InvalidArgument(format!("harmonic degree must be 0, 1 or 2, got {degree}")));
    }
    let c = (degree * (degree + 1)) as f64;
    let (a, b) = profile.support();
    // (Δu) r = u'' r + 2u' - c u / r; at r = 0 the limit vanishes for u ~ r^k.
    let direct = simpson(
        |r| {
            if r == 0.0 {
                return 0.0;
            }
            let (v, d1, d2) = profile.eval(r);
            (d2 * r + 2.0 * d1 - c * v / r).powi(2)
        },
        a,
        b,
        RADIAL_NODES,
    );
    let second = simpson(|r| profile.eval(r).2.powi(2) * r * r, a, b, RADIAL_NODES);
    let first = simpson(|r| profile.eval(r).1.powi(2), a, b, RADIAL_NODES);
    let inverse = if c == 0.0 {
        0.0
    } else {
        simpson(|r| if r == 0.0 { 0.0 } else { (profile.eval(r).0 / r).powi(2) }, a, b, RADIAL_NODES)
    };
    let head = second + 2.0 * (c + 1.0) * first;
    let stated = head + c * (c - 1.0) * inverse;
    let corrected = head + c * (c - 2.0) * inverse;
    Ok(RadialDecomposition {
        degree,
        direct,
        stated,
        corrected,
        stated_residual: (direct - stated).abs() / direct,
        corrected_residual: (direct - corrected).abs() / direct,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    /// `(ε, ‖(w_ε - w₀)u‖_{L²})` entries used in the fit.
    pub points: Vec<(f64, f64)>,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Value at `ε = 0` when supplied; zero by construction and not fitted.
    pub baseline: Option<f64>,
}

/// Least-squares line through `(x, y)`: `(slope, intercept, R²)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, my - slope * mx, r2)
}

/// Fits `log ‖(1/√(|x|²+ε²) - 1/|x|)u‖_{L²}` against `log ε`.
pub fn regularization_rate(u: &SpinorField, sigma: f64, eps_list: &[f64]) -> Result<RateFit> {
    if !(sigma > 1.0 && sigma < 1.5) {
        return Err(Error::InvalidArgument(format!("regularization rate needs sigma in (1, 3/2), got {sigma}")));
    }
    let h = u.grid().spacing();
    let mut baseline = None;
    let mut eps = Vec::new();
    for &e in eps_list {
        if e == 0.0 {
            baseline = Some(0.0);
        } else if e < 2.0 * h * (1.0 - 1e-12) {
            return Err(Error::InvalidArgument(format!(
                "epsilon {e} is below the grid resolution 2h = {}",
                2.0 * h
            )));
        } else {
            eps.push(e);
        }
    }
    if eps.len() < 2 {
        return Err(Error::InvalidArgument("need at least two positive epsilons".into()));
    }
    let mut sorted = eps.clone();
    sorted.sort_by(f64::total_cmp);
    let q = sorted[1] / sorted[0];
    if sorted.windows(2).any(|w| ((w[1] / w[0]) / q - 1.0).abs() > 1e-9) {
        return Err(Error::InvalidArgument("epsilon list must be geometric".into()));
    }
    let diff = |e: f64| weighted_l2_squared(u, |r| (1.0 / (r * r + e * e).sqrt() - 1.0 / r).powi(2)).sqrt();
    if baseline.is_some() {
        baseline = Some(diff(0.0));
    }
    let points: Vec<(f64, f64)> = eps.iter().map(|&e| (e, diff(e))).collect();
    let (x, y): (Vec<f64>, Vec<f64>) = points.iter().map(|(e, d)| (e.ln(), d.ln())).unzip();
    let (slope, intercept, r_squared) = linear_fit(&x, &y);
    Ok(RateFit { points, slope, intercept, r_squared, baseline })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalitySample {
    pub label: String,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

/// Measured ratios of one inequality over a family of test functions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub inequality: String,
    pub family: String,
    pub sigma: Option<f64>,
    pub grid_n: usize,
    pub box_length: f64,
    /// Lower clip of `|x|` in singular weights.
    pub weight_clip: f64,
    pub seed: Option<u64>,
    pub samples: Vec<InequalitySample>,
    pub sup_ratio: f64,
}

impl InequalityReport {
    pub fn new(inequality: &str, family: &str, sigma: Option<f64>, grid: &GridSpec, seed: Option<u64>) -> Self {
        Self {
            inequality: inequality.into(),
            family: family.into(),
            sigma,
            grid_n: grid.n(),
            box_length: grid.box_length(),
            weight_clip: 0.5 * grid.spacing(),
            seed,
            samples: Vec::new(),
            sup_ratio: 0.0,
        }
    }

    pub fn push(&mut self, label: impl Into<String>, lhs: f64, rhs: f64) -> Result<()> {
        let ratio = ratio(lhs, rhs);
        if !(ratio.is_finite() && ratio >= 0.0) {
            return Err(Error::NonFinite("inequality ratio"));
        }
        self.sup_ratio = self.sup_ratio.max(ratio);
        self.samples.push(InequalitySample { label: label.into(), lhs, rhs, ratio });
        Ok(())
    }

    /// Appends the report as one JSON line.
    pub fn write_jsonl(&self, mut out: impl Write) -> Result<()> {
        let line = serde_json::to_string(self).map_err(|e| Error::Format(e.to_string()))?;
        writeln!(out, "{line}")?;
        Ok(())
    }
}

/// Hardy report over a family: LHS is the clipped weighted norm, RHS `‖u‖²_{Ḣ^σ}`.
pub fn hardy_report(family: &str, fields: &[(String, SpinorField)], sigma: f64, seed: Option<u64>) -> Result<InequalityReport> {
    let grid = *fields.first().ok_or_else(|| Error::InvalidArgument("empty family".into()))?.1.grid();
    let mut rep = InequalityReport::new("hardy", family, Some(sigma), &grid, seed);
    for (label, u) in fields {
        let lhs = weighted_l2_squared(u, |r| r.powf(-2.0 * sigma));
        let rhs = homogeneous_sobolev_norm(u, sigma)?.powi(2);
        rep.push(label.clone(), lhs, rhs)?;
    }
    Ok(rep)
}

/// Coulomb-multiplier report: `‖u/|x|‖_{H^{σ-1}}` against `‖u‖_{H^σ}`.
pub fn coulomb_multiplier_report(
    family: &str,
    fields: &[(String, SpinorField)],
    sigma: f64,
    seed: Option<u64>,
) -> Result<InequalityReport> {
    let grid = *fields.first().ok_or_else(|| Error::InvalidArgument("empty family".into()))?.1.grid();
    let mut rep = InequalityReport::new("coulomb_multiplier", family, Some(sigma), &grid, seed);
    for (label, u) in fields {
        coulomb_multiplier_ratio(u, sigma)?;
        let lhs = sobolev_norm(&weighted_field(u, |r| 1.0 / r), sigma - 1.0)?;
        rep.push(label.clone(), lhs, sobolev_norm(u, sigma)?)?;
    }
    Ok(rep)
}

/// Rellich report over a family.
pub fn rellich_report(family: &str, fields: &[(String, SpinorField)]) -> Result<InequalityReport> {
    let grid = *fields.first().ok_or_else(|| Error::InvalidArgument("empty family".into()))?.1.grid();
    let mut rep = InequalityReport::new("rellich", family, None, &grid, None);
    for (label, u) in fields {
        let r = rellich_ratio(u)?;
        rep.push(label.clone(), r.lhs, r.rhs)?;
    }
    Ok(rep)
}

/// Radial shell `((|x|-a)(b-|x|))⁴` on `a < |x| < b` times `e₁`.
pub fn shell_field(grid: GridSpec, inner: f64, outer: f64) -> SpinorField {
    let profile = RadialProfile::PolynomialBump { inner, outer };
    let zero = Complex64::new(0.0, 0.0);
    SpinorField::from_fn(grid, |x| [Complex64::new(profile.eval(x.norm()).0, 0.0), zero, zero, zero])
}

/// `count` smooth random fields: each a sum of three Gaussians with random
/// centers within `spread` of the origin, widths in `[0.8, 1.5]·width` and
/// random spinor weights. Seeded and reproducible.
pub fn random_smooth_family(grid: GridSpec, count: usize, width: f64, spread: f64, seed: u64) -> Vec<SpinorField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let bumps: Vec<(Vec3, f64, [Complex64; 4])> = (0..3)
                .map(|_| {
                    let c = Vec3::new(
                        rng.gen_range(-spread..=spread),
                        rng.gen_range(-spread..=spread),
                        rng.gen_range(-spread..=spread),
                    );
                    let w = width * rng.gen_range(0.8..1.5);
                    let s = std::array::from_fn(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
                    (c, w, s)
                })
                .collect();
            SpinorField::from_fn(grid, |x| {
                let mut out = [Complex64::new(0.0, 0.0); 4];
                for (c, w, s) in &bumps {
                    let g = (-grid.min_image(x - c).norm_squared() / (2.0 * w * w)).exp();
                    for (o, si) in out.iter_mut().zip(s) {
                        *o += si * g;
                    }
                }
                out
            })
        })
        .collect()
}
