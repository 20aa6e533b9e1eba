use serde::{Deserialize, Serialize};

use super::Nucleus;
use crate::error::{Error, Result};
use crate::lattice::Vec3;

/// Time-sampled nuclear paths on a uniform grid `t₀, t₀ + Δt, …`.
///
/// Positions and velocities are both stored, and evaluation between samples
/// uses the cubic Hermite interpolant they define, so uniform motion is
/// reproduced exactly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    t0: f64,
    dt: f64,
    charges: Vec<f64>,
    masses: Vec<f64>,
    positions: Vec<Vec<Vec3>>,
    velocities: Vec<Vec<Vec3>>,
}

impl Trajectory {
    pub fn new(
        t0: f64,
        dt: f64,
        charges: Vec<f64>,
        masses: Vec<f64>,
        positions: Vec<Vec<Vec3>>,
        velocities: Vec<Vec<Vec3>>,
    ) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidArgument(format!("trajectory step must be positive, got {dt}")));
        }
        let n = charges.len();
        if masses.len() != n || positions.len() != n || velocities.len() != n {
            return Err(Error::InvalidArgument("per-nucleus arrays differ in length".into()));
        }
        let samples = positions.first().map_or(2, Vec::len);
        if samples < 2 {
            return Err(Error::InvalidArgument("a trajectory needs at least two samples".into()));
        }
        if positions.iter().chain(&velocities).any(|p| p.len() != samples) {
            return Err(Error::InvalidArgument("ragged trajectory samples".into()));
        }
        if positions.iter().chain(&velocities).flatten().any(|v| !v.iter().all(|c| c.is_finite())) {
            return Err(Error::NonFinite("trajectory"));
        }
        Ok(Self { t0, dt, charges, masses, positions, velocities })
    }

    /// Samples `path(k, t) -> (q, q̇)` on `steps + 1` uniform times.
    pub fn from_fn(
        nuclei: &[Nucleus],
        t0: f64,
        duration: f64,
        steps: usize,
        path: impl Fn(usize, f64) -> (Vec3, Vec3),
    ) -> Result<Self> {
        if steps == 0 || !(duration > 0.0) {
            return Err(Error::InvalidArgument("trajectory needs a positive duration and step count".into()));
        }
        let dt = duration / steps as f64;
        let mut positions = Vec::with_capacity(nuclei.len());
        let mut velocities = Vec::with_capacity(nuclei.len());
        for k in 0..nuclei.len() {
            let (p, v): (Vec<Vec3>, Vec<Vec3>) = (0..=steps).map(|i| path(k, t0 + i as f64 * dt)).unzip();
            positions.push(p);
            velocities.push(v);
        }
        Self::new(
            t0,
            dt,
            nuclei.iter().map(|n| n.charge).collect(),
            nuclei.iter().map(|n| n.mass).collect(),
            positions,
            velocities,
        )
    }

    /// Uniform motion `qₖ(t) = aₖ + bₖ (t - t₀)` from the nuclei's state.
    pub fn ballistic(nuclei: &[Nucleus], t0: f64, duration: f64, steps: usize) -> Result<Self> {
        Self::from_fn(nuclei, t0, duration, steps, |k, t| {
            let n = &nuclei[k];
            (n.position + n.velocity * (t - t0), n.velocity)
        })
    }

    pub fn nuclei_count(&self) -> usize {
        self.charges.len()
    }

    pub fn samples(&self) -> usize {
        self.positions.first().map_or(0, Vec::len)
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn t_end(&self) -> f64 {
        self.t0 + (self.samples().max(1) - 1) as f64 * self.dt
    }

    pub fn duration(&self) -> f64 {
        self.t_end() - self.t0
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    pub fn charges(&self) -> &[f64] {
        &self.charges
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn sample_position(&self, k: usize, i: usize) -> Vec3 {
        self.positions[k][i]
    }

    pub fn sample_velocity(&self, k: usize, i: usize) -> Vec3 {
        self.velocities[k][i]
    }

    pub fn sample_positions(&self, k: usize) -> &[Vec3] {
        &self.positions[k]
    }

    pub fn sample_velocities(&self, k: usize) -> &[Vec3] {
        &self.velocities[k]
    }

    /// Nuclei states at sample `i`.
    pub fn nuclei_at(&self, i: usize) -> Vec<Nucleus> {
        (0..self.nuclei_count())
            .map(|k| Nucleus {
                charge: self.charges[k],
                mass: self.masses[k],
                position: self.positions[k][i],
                velocity: self.velocities[k][i],
            })
            .collect()
    }

    fn locate(&self, t: f64) -> (usize, f64) {
        let last = self.samples() - 1;
        let u = ((t - self.t0) / self.dt).clamp(0.0, last as f64);
        let i = (u.floor() as usize).min(last - 1);
        (i, u - i as f64)
    }

    /// Hermite-interpolated position of nucleus `k`; clamped to the sampled span.
    pub fn position(&self, k: usize, t: f64) -> Vec3 {
        let (i, s) = self.locate(t);
        let (p0, p1) = (self.positions[k][i], self.positions[k][i + 1]);
        let (m0, m1) = (self.velocities[k][i] * self.dt, self.velocities[k][i + 1] * self.dt);
        let s2 = s * s;
        let s3 = s2 * s;
        p0 * (2.0 * s3 - 3.0 * s2 + 1.0) + m0 * (s3 - 2.0 * s2 + s) + p1 * (-2.0 * s3 + 3.0 * s2) + m1 * (s3 - s2)
    }

    /// Derivative of the Hermite interpolant.
    pub fn velocity(&self, k: usize, t: f64) -> Vec3 {
        let (i, s) = self.locate(t);
        let (p0, p1) = (self.positions[k][i], self.positions[k][i + 1]);
        let (m0, m1) = (self.velocities[k][i] * self.dt, self.velocities[k][i + 1] * self.dt);
        let s2 = s * s;
        (p0 * (6.0 * s2 - 6.0 * s) + m0 * (3.0 * s2 - 4.0 * s + 1.0) + p1 * (-6.0 * s2 + 6.0 * s) + m1 * (3.0 * s2 - 2.0 * s))
            / self.dt
    }

    pub fn positions_at(&self, t: f64) -> Vec<Vec3> {
        (0..self.nuclei_count()).map(|k| self.position(k, t)).collect()
    }

    pub fn sup_velocity(&self) -> f64 {
        self.velocities.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Discrete `‖q̈ₖ‖_{L¹}`, i.e. the total variation of the sampled velocity.
    pub fn acceleration_l1(&self, k: usize) -> f64 {
        self.velocities[k].windows(2).map(|w| (w[1] - w[0]).norm()).sum()
    }

    /// Smallest pairwise distance over all samples: `(distance, k, l, t)`.
    pub fn min_separation(&self) -> Option<(f64, usize, usize, f64)> {
        let mut best: Option<(f64, usize, usize, f64)> = None;
        for i in 0..self.samples() {
            for k in 0..self.nuclei_count() {
                for l in k + 1..self.nuclei_count() {
                    let d = (self.positions[k][i] - self.positions[l][i]).norm();
                    if best.is_none_or(|b| d < b.0) {
                        best = Some((d, k, l, self.time(i)));
                    }
                }
            }
        }
        best
    }

    /// `(1 - θ)·self + θ·other`, sample by sample.
    pub fn blend(&self, other: &Trajectory, theta: f64) -> Result<Trajectory> {
        self.check_compatible(other)?;
        let mix = |a: &Vec<Vec<Vec3>>, b: &Vec<Vec<Vec3>>| -> Vec<Vec<Vec3>> {
            a.iter()
                .zip(b)
                .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p * (1.0 - theta) + q * theta).collect())
                .collect()
        };
        Ok(Trajectory {
            positions: mix(&self.positions, &other.positions),
            velocities: mix(&self.velocities, &other.velocities),
            ..self.clone()
        })
    }

    fn check_compatible(&self, other: &Trajectory) -> Result<()> {
        if self.nuclei_count() != other.nuclei_count()
            || self.samples() != other.samples()
            || (self.dt - other.dt).abs() > 1e-12 * self.dt
            || (self.t0 - other.t0).abs() > 1e-12
        {
            return Err(Error::InvalidArgument("trajectories are sampled on different grids".into()));
        }
        Ok(())
    }

    /// `sup_{k,i} |q̇ₖ(tᵢ) - q̇'ₖ(tᵢ)|`.
    pub fn velocity_distance(&self, other: &Trajectory) -> Result<f64> {
        self.check_compatible(other)?;
        Ok(self
            .velocities
            .iter()
            .flatten()
            .zip(other.velocities.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Sampled `C¹` distance: `sup |q - q'| + sup |q̇ - q̇'|`.
    pub fn c1_distance(&self, other: &Trajectory) -> Result<f64> {
        let dv = self.velocity_distance(other)?;
        let dq = self
            .positions
            .iter()
            .flatten()
            .zip(other.positions.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        Ok(dq + dv)
    }
}

/// A failed trajectory hypothesis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Violation {
    /// `(1 + T·1_{N≥2}) sup_k ‖q̇_k‖_∞` exceeded its cap.
    Velocity { value: f64, cap: f64 },
    /// Two nuclei came within `4ε₀`.
    Separation { k: usize, l: usize, t: f64, distance: f64, threshold: f64 },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::Velocity { value, cap } => write!(
                f,
                "hypothesis (1 + T 1_{{N>=2}}) sup_k |q'_k| <= C violated: {value:.6e} > {cap:.6e}"
            ),
            Violation::Separation { k, l, t, distance, threshold } => write!(
                f,
                "hypothesis |q_k(t) - q_l(t)| > 4 eps0 violated: nuclei {k},{l} at t = {t:.6} are {distance:.6e} apart (threshold {threshold:.6e})"
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub sup_velocity: f64,
    /// `(1 + T·1_{N≥2}) · sup_k ‖q̇_k‖_∞`, the quantity compared with the cap.
    pub velocity_measure: f64,
    pub acceleration_l1: Vec<f64>,
    pub min_separation: Option<f64>,
    pub violations: Vec<Violation>,
}

impl AdmissibilityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<AdmissibilityReport> {
        if self.passed() {
            Ok(self)
        } else {
            let msg: Vec<String> = self.violations.iter().map(ToString::to_string).collect();
            Err(Error::Admissibility(msg.join("; ")))
        }
    }
}

/// Velocity cap and pairwise-separation diagnostics over the sampled path.
pub fn admissibility_check(traj: &Trajectory, eps0: f64, velocity_cap: f64, horizon: f64) -> AdmissibilityReport {
    let several = traj.nuclei_count() >= 2;
    let sup_velocity = traj.sup_velocity();
    let velocity_measure = (1.0 + if several { horizon } else { 0.0 }) * sup_velocity;
    let mut violations = Vec::new();
    if velocity_measure > velocity_cap {
        violations.push(Violation::Velocity { value: velocity_measure, cap: velocity_cap });
    }
    let threshold = 4.0 * eps0;
    let mut min_separation = None;
    if several {
        'outer: for i in 0..traj.samples() {
            for k in 0..traj.nuclei_count() {
                for l in k + 1..traj.nuclei_count() {
                    let d = (traj.sample_position(k, i) - traj.sample_position(l, i)).norm();
                    if d <= threshold {
                        violations.push(Violation::Separation { k, l, t: traj.time(i), distance: d, threshold });
                        break 'outer;
                    }
                }
            }
        }
        min_separation = traj.min_separation().map(|m| m.0);
    }
    AdmissibilityReport {
        sup_velocity,
        velocity_measure,
        acceleration_l1: (0..traj.nuclei_count()).map(|k| traj.acceleration_l1(k)).collect(),
        min_separation,
        violations,
    }
}
