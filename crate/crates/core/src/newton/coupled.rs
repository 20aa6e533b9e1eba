use serde::{Deserialize, Serialize};

use super::{energy_breakdown, force_breakdown, total_momentum, EnergyBreakdown, ForceBreakdown};
use crate::dirac::FreeStep;
use crate::error::{Error, Result};
use crate::hartree::hartree_potential;
use crate::lattice::{sobolev_norm, ScalarField, Space, SpinorField, Vec3};
use crate::potentials::{admissibility_check, coulomb_potential, AdmissibilityReport, Nucleus, Trajectory};
use crate::propagator::{
    duhamel_picard, field_energy, potential_phases, FieldSolution, PicardOptions, PicardReport, PropagatorPlan,
    Resolution,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoupledOptions {
    /// Uniform steps of the trajectory grid (and of the Duhamel quadrature).
    pub steps: usize,
    /// Damping of the outer iteration `q ← (1-θ)q + θP(q)`.
    pub theta: f64,
    /// Stop when `sup_k ‖q̇ⁿ⁺¹ - q̇ⁿ‖_∞` falls below this.
    pub tolerance: f64,
    pub max_outer: usize,
    pub picard: PicardOptions,
    /// Cap on the initial speeds `|b_k|`.
    pub velocity_cap: f64,
    /// Cap on `(1 + T·1_{N≥2}) sup|q̇|` for trajectories produced by `P`.
    pub trajectory_velocity_cap: f64,
    /// Separation scale; `None` derives `min_{k≠l}|a_k - a_l| / 8`.
    pub eps0: Option<f64>,
}

impl Default for CoupledOptions {
    fn default() -> Self {
        Self {
            steps: 16,
            theta: 0.5,
            tolerance: 1e-8,
            max_outer: 60,
            picard: PicardOptions::default(),
            velocity_cap: 0.25,
            trajectory_velocity_cap: 1.0,
            eps0: None,
        }
    }
}

impl CoupledOptions {
    fn validate(&self) -> Result<()> {
        if self.steps == 0 || !(self.theta > 0.0 && self.theta <= 1.0) || !(self.tolerance > 0.0) {
            return Err(Error::InvalidArgument(
                "coupled solver needs steps >= 1, theta in (0, 1] and a positive tolerance".into(),
            ));
        }
        Ok(())
    }
}

/// Result of one application of the trajectory map.
#[derive(Clone, Debug)]
pub struct MapOutput {
    pub trajectory: Trajectory,
    /// Field solved along the input trajectory, one snapshot per sample.
    pub field: FieldSolution,
    pub picard: PicardReport,
    /// Forces along the input trajectory.
    pub forces: Vec<ForceBreakdown>,
    /// Hypothesis check of the output; violations are reported, not clipped.
    pub admissibility: AdmissibilityReport,
}

#[derive(Clone, Debug)]
pub struct CoupledSolution {
    pub field: FieldSolution,
    pub trajectory: Trajectory,
    /// `sup_k ‖q̇ⁿ⁺¹ - q̇ⁿ‖_∞` per outer iteration.
    pub history: Vec<f64>,
    pub outer_iterations: usize,
    /// `max |Δ²q/Δt² - F/m|` over interior samples.
    pub newton_residual: f64,
    pub forces: Vec<ForceBreakdown>,
    pub admissibility: AdmissibilityReport,
}

#[derive(Clone, Debug)]
pub struct DirectSolution {
    pub field: FieldSolution,
    pub trajectory: Trajectory,
    pub energies: Vec<EnergyBreakdown>,
    pub momenta: Vec<Vec3>,
    pub forces: Vec<ForceBreakdown>,
}

impl DirectSolution {
    /// `max |E(t) - E(0)| / |E(0)|`.
    pub fn energy_drift(&self) -> f64 {
        let e0 = self.energies[0].total;
        let worst = self.energies.iter().map(|e| (e.total - e0).abs()).fold(0.0, f64::max);
        if e0 == 0.0 {
            worst
        } else {
            worst / e0.abs()
        }
    }

    /// `max |P(t) - P(0)| / |P(0)|`, absolute when `P(0) = 0`.
    pub fn momentum_drift(&self) -> f64 {
        let p0 = self.momenta[0];
        let worst = self.momenta.iter().map(|p| (p - p0).norm()).fold(0.0, f64::max);
        if p0.norm() == 0.0 {
            worst
        } else {
            worst / p0.norm()
        }
    }
}

fn initial_separation(nuclei: &[Nucleus]) -> Option<f64> {
    let mut best: Option<f64> = None;
    for k in 0..nuclei.len() {
        for l in k + 1..nuclei.len() {
            let d = (nuclei[k].position - nuclei[l].position).norm();
            best = Some(best.map_or(d, |b| b.min(d)));
        }
    }
    best
}

fn eps0_for(traj: &Trajectory, opts: &CoupledOptions) -> f64 {
    opts.eps0.unwrap_or_else(|| initial_separation(&traj.nuclei_at(0)).map_or(1.0, |d| d / 8.0))
}

/// The map `P`: solve the field along `traj_in`, evaluate the forces it
/// exerts, and integrate `m_k q̈_k = F_k` by velocity Verlet from the input's
/// initial state. `warm` seeds the Picard iteration.
pub fn trajectory_map(
    traj_in: &Trajectory,
    u0: &SpinorField,
    plan: &PropagatorPlan,
    opts: &CoupledOptions,
    warm: Option<&[SpinorField]>,
) -> Result<MapOutput> {
    let steps = traj_in.samples() - 1;
    let grid = *u0.grid();
    let eps = plan.epsilon_for(&grid);
    let field_plan = PropagatorPlan { snapshot_stride: 1, ..plan.clone() };
    let picard_opts = PicardOptions { steps, ..opts.picard.clone() };
    let (field, picard) = duhamel_picard(u0, traj_in, traj_in.t_end(), &field_plan, &picard_opts, warm)?;

    let n = traj_in.nuclei_count();
    let masses = traj_in.masses();
    let mut forces = Vec::with_capacity(steps + 1);
    for (j, (t, u)) in field.snapshots.iter().enumerate() {
        forces.push(force_breakdown(*t, &u.density(), &traj_in.nuclei_at(j), eps)?);
    }
    let dt = traj_in.dt();
    let mut positions = vec![Vec::with_capacity(steps + 1); n];
    let mut velocities = vec![Vec::with_capacity(steps + 1); n];
    for k in 0..n {
        let acc = |j: usize| forces[j].total[k] / masses[k];
        let (mut q, mut v) = (traj_in.sample_position(k, 0), traj_in.sample_velocity(k, 0));
        positions[k].push(q);
        velocities[k].push(v);
        for j in 0..steps {
            q += v * dt + acc(j) * (0.5 * dt * dt);
            v += (acc(j) + acc(j + 1)) * (0.5 * dt);
            positions[k].push(q);
            velocities[k].push(v);
        }
    }
    let trajectory = Trajectory::new(
        traj_in.t0(),
        dt,
        traj_in.charges().to_vec(),
        masses.to_vec(),
        positions,
        velocities,
    )?;
    let admissibility =
        admissibility_check(&trajectory, eps0_for(traj_in, opts), opts.trajectory_velocity_cap, trajectory.duration());
    Ok(MapOutput { trajectory, field, picard, forces, admissibility })
}

fn snapshot_fields(field: &FieldSolution) -> Vec<SpinorField> {
    field.snapshots.iter().map(|(_, u)| u.clone()).collect()
}

fn check_initial_data(nuclei: &[Nucleus], opts: &CoupledOptions) -> Result<()> {
    for (k, n) in nuclei.iter().enumerate() {
        if n.velocity.norm() > opts.velocity_cap {
            return Err(Error::Admissibility(format!(
                "hypothesis |b_k| <= {} violated: |b_{k}| = {:.6e}",
                opts.velocity_cap,
                n.velocity.norm()
            )));
        }
    }
    if let (Some(eps0), Some(d)) = (opts.eps0, initial_separation(nuclei)) {
        if d < 8.0 * eps0 {
            return Err(Error::Admissibility(format!(
                "hypothesis |a_k - a_l| >= 8 eps0 violated: {d:.6e} < {:.6e}",
                8.0 * eps0
            )));
        }
    }
    Ok(())
}

/// Self-consistent field and trajectory on `[0, T]` by the damped iteration
/// `q ← (1-θ)q + θP(q)` started from uniform motion. The returned trajectory
/// is `P` of the last iterate, and the field is re-solved along it.
pub fn coupled_fixed_point(
    u0: &SpinorField,
    nuclei0: &[Nucleus],
    horizon: f64,
    plan: &PropagatorPlan,
    opts: &CoupledOptions,
) -> Result<CoupledSolution> {
    opts.validate()?;
    check_initial_data(nuclei0, opts)?;
    let mut q = Trajectory::ballistic(nuclei0, 0.0, horizon, opts.steps)?;
    let mut history = Vec::new();
    let mut warm: Option<Vec<SpinorField>> = None;
    loop {
        let out = trajectory_map(&q, u0, plan, opts, warm.as_deref())?;
        out.admissibility.clone().into_result()?;
        let next = q.blend(&out.trajectory, opts.theta)?;
        let d = next.velocity_distance(&q)?;
        history.push(d);
        warm = Some(snapshot_fields(&out.field));
        q = next;
        if d < opts.tolerance {
            break;
        }
        if history.len() >= opts.max_outer {
            return Err(Error::NotConverged { what: "coupled fixed-point iteration", iterations: history.len(), history });
        }
    }
    let star = trajectory_map(&q, u0, plan, opts, warm.as_deref())?.trajectory;
    let fin = trajectory_map(&star, u0, plan, opts, warm.as_deref())?;
    let newton_residual = newton_residual(&star, &fin.forces);
    let admissibility =
        admissibility_check(&star, eps0_for(&star, opts), opts.trajectory_velocity_cap, star.duration());
    Ok(CoupledSolution {
        field: fin.field,
        trajectory: star,
        outer_iterations: history.len(),
        history,
        newton_residual,
        forces: fin.forces,
        admissibility,
    })
}

/// `max_{k, 0<j<n} |(q_{j+1} - 2q_j + q_{j-1})/Δt² - F_k(t_j)/m_k|`.
pub(crate) fn newton_residual(traj: &Trajectory, forces: &[ForceBreakdown]) -> f64 {
    let dt2 = traj.dt() * traj.dt();
    let mut worst: f64 = 0.0;
    for k in 0..traj.nuclei_count() {
        let q = traj.sample_positions(k);
        let m = traj.masses()[k];
        for j in 1..q.len() - 1 {
            let fd = (q[j + 1] - q[j] * 2.0 + q[j - 1]) / dt2;
            worst = worst.max((fd - forces[j].total[k] / m).norm());
        }
    }
    worst
}

fn nuclear_potential(grid: &crate::lattice::GridSpec, charges: &[f64], positions: &[Vec3], eps: f64) -> Result<Option<ScalarField>> {
    if charges.iter().all(|z| *z == 0.0) {
        return Ok(None);
    }
    coulomb_potential(grid, charges, positions, eps).map(Some)
}

fn half_phase(u: &mut SpinorField, nuclear: Option<&ScalarField>, tau: f64) {
    let mut v = hartree_potential(u);
    if let Some(w) = nuclear {
        v.add(w);
    }
    u.multiply_pointwise(&potential_phases(&v, tau));
}

/// Interleaved integrator: velocity Verlet for the nuclei around a
/// nonlinear Strang step for the field,
/// `kick · e^{-iΔt/2 V(qₙ)} · (drift, e^{-iΔtH₀}) · e^{-iΔt/2 V(qₙ₊₁)} · kick`.
/// Each factor is an exact sub-flow of the coupled Hamiltonian, so the
/// scheme is a symplectic second-order splitting.
pub fn coupled_direct(
    u0: &SpinorField,
    nuclei0: &[Nucleus],
    horizon: f64,
    dt: f64,
    plan: &PropagatorPlan,
) -> Result<DirectSolution> {
    plan.validate()?;
    if !(dt > 0.0) || !(horizon > 0.0) {
        return Err(Error::InvalidArgument("direct integrator needs dt > 0 and a positive horizon".into()));
    }
    let grid = *u0.grid();
    let eps = plan.epsilon_for(&grid);
    let min_gap = grid.spacing();
    let steps = ((horizon / dt - 1e-9).ceil() as usize).max(1);
    let tau = horizon / steps as f64;
    let charges: Vec<f64> = nuclei0.iter().map(|n| n.charge).collect();
    let masses: Vec<f64> = nuclei0.iter().map(|n| n.mass).collect();
    let mut nuclei = nuclei0.to_vec();
    let mut u = u0.in_position();
    let kinetic = FreeStep::new(grid, tau, Vec3::zeros());

    let mut field = FieldSolution::new(Resolution { n_slices: steps, substeps: 1, epsilon: eps, refinements: 0, last_difference: 0.0 });
    let mut positions: Vec<Vec<Vec3>> = nuclei.iter().map(|n| vec![n.position]).collect();
    let mut velocities: Vec<Vec<Vec3>> = nuclei.iter().map(|n| vec![n.velocity]).collect();
    let mut energies = Vec::with_capacity(steps + 1);
    let mut momenta = Vec::with_capacity(steps + 1);
    let mut forces = Vec::with_capacity(steps + 1);

    let pos = |ns: &[Nucleus]| ns.iter().map(|n| n.position).collect::<Vec<Vec3>>();
    let mut force = force_breakdown(0.0, &u.density(), &nuclei, eps)?;
    let mut potential = nuclear_potential(&grid, &charges, &pos(&nuclei), eps)?;
    let record = |t: f64,
                  u: &SpinorField,
                  nuclei: &[Nucleus],
                  potential: Option<&ScalarField>,
                  field: &mut FieldSolution,
                  energies: &mut Vec<EnergyBreakdown>,
                  momenta: &mut Vec<Vec3>,
                  keep: bool|
     -> Result<()> {
        let e = energy_breakdown(u, nuclei, eps)?;
        energies.push(e);
        momenta.push(total_momentum(u, nuclei));
        field.record(t, u, field_energy(u, potential, true), plan.sigma, keep)
    };
    record(0.0, &u, &nuclei, potential.as_ref(), &mut field, &mut energies, &mut momenta, true)?;
    forces.push(force.clone());

    for step in 1..=steps {
        let t = if step == steps { horizon } else { step as f64 * tau };
        for (k, n) in nuclei.iter_mut().enumerate() {
            n.velocity += force.total[k] * (0.5 * tau / masses[k]);
        }
        half_phase(&mut u, potential.as_ref(), 0.5 * tau);
        for n in nuclei.iter_mut() {
            n.position += n.velocity * tau;
        }
        let p = pos(&nuclei);
        for k in 0..p.len() {
            for l in k + 1..p.len() {
                if (p[k] - p[l]).norm() < min_gap {
                    return Err(Error::Collision(k, l));
                }
            }
        }
        let mut uh = u.into_momentum();
        kinetic.apply_momentum(&mut uh);
        u = uh.into_position();
        potential = nuclear_potential(&grid, &charges, &p, eps)?;
        half_phase(&mut u, potential.as_ref(), 0.5 * tau);
        force = force_breakdown(t, &u.density(), &nuclei, eps)?;
        for (k, n) in nuclei.iter_mut().enumerate() {
            n.velocity += force.total[k] * (0.5 * tau / masses[k]);
        }
        for (k, n) in nuclei.iter().enumerate() {
            positions[k].push(n.position);
            velocities[k].push(n.velocity);
        }
        let keep = step == steps || (plan.snapshot_stride > 0 && step % plan.snapshot_stride == 0);
        record(t, &u, &nuclei, potential.as_ref(), &mut field, &mut energies, &mut momenta, keep)?;
        forces.push(force.clone());
    }
    if u0.space() == Space::Momentum {
        for s in &mut field.snapshots {
            s.1 = s.1.in_momentum();
        }
    }
    let trajectory = Trajectory::new(0.0, tau, charges, masses, positions, velocities)?;
    Ok(DirectSolution { field, trajectory, energies, momenta, forces })
}

/// `‖u₀‖_{H^σ}`-based time window `1/(C(1 + ‖u₀‖²_{H^σ}))`.
pub fn time_window(u0: &SpinorField, sigma: f64, constant: f64) -> Result<f64> {
    Ok(1.0 / (constant * (1.0 + sobolev_norm(u0, sigma)?.powi(2))))
}
