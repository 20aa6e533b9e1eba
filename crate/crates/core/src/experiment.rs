//! Experiment pipelines shared by the command-line front end: coupled runs
//! flattened into time-series records, and propagator refinement ladders.

use serde::{Deserialize, Serialize};

use crate::config::{Integrator, Setup};
use crate::error::{Error, Result};
use crate::lattice::{sobolev_norm, Checkpoint, SpinorField, Vec3};
use crate::newton::{coupled_direct, coupled_fixed_point, energy_breakdown, total_momentum, EnergyBreakdown, ForceBreakdown};
use crate::potentials::{Nucleus, Trajectory};
use crate::propagator::{product_formula_evolve, Frame, PropagatorPlan};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NucleusRecord {
    pub position: Vec3,
    pub velocity: Vec3,
    pub field_force: Vec3,
    pub internuclear_force: Vec3,
    pub total_force: Vec3,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeSeriesRecord {
    pub t: f64,
    pub charge: f64,
    pub sobolev_norm: f64,
    pub energy: EnergyBreakdown,
    pub momentum: Vec3,
    pub nuclei: Vec<NucleusRecord>,
}

impl TimeSeriesRecord {
    fn new(t: f64, u: &SpinorField, nuclei: &[Nucleus], force: &ForceBreakdown, sigma: f64, eps: f64) -> Result<Self> {
        let energy = energy_breakdown(u, nuclei, eps)?;
        let records = nuclei
            .iter()
            .enumerate()
            .map(|(k, n)| NucleusRecord {
                position: n.position,
                velocity: n.velocity,
                field_force: force.field[k],
                internuclear_force: force.internuclear[k],
                total_force: force.total[k],
            })
            .collect();
        Ok(Self {
            t,
            charge: u.charge(),
            sobolev_norm: sobolev_norm(u, sigma)?,
            energy,
            momentum: total_momentum(u, nuclei),
            nuclei: records,
        })
    }

    pub fn csv_header(nuclei: usize) -> String {
        let mut cols: Vec<String> = [
            "t", "charge", "sobolev_norm", "e_field_kinetic", "e_interaction", "e_hartree", "e_nuclear_kinetic",
            "e_repulsion", "e_total", "p_x", "p_y", "p_z",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        for k in 1..=nuclei {
            for group in ["q", "v", "f_field", "f_nuc", "f_total"] {
                for axis in ["x", "y", "z"] {
                    cols.push(format!("{group}{k}_{axis}"));
                }
            }
        }
        cols.join(",")
    }

    /// One CSV row; floats use the shortest round-trip representation.
    pub fn csv_row(&self) -> String {
        let e = &self.energy;
        let mut vals = vec![
            self.t,
            self.charge,
            self.sobolev_norm,
            e.field_kinetic,
            e.interaction,
            e.hartree,
            e.nuclear_kinetic,
            e.repulsion,
            e.total,
            self.momentum.x,
            self.momentum.y,
            self.momentum.z,
        ];
        for n in &self.nuclei {
            for v in [n.position, n.velocity, n.field_force, n.internuclear_force, n.total_force] {
                vals.extend(v.iter());
            }
        }
        vals.iter().map(|v| format!("{v:?}")).collect::<Vec<_>>().join(",")
    }

    pub fn is_finite(&self) -> bool {
        self.csv_row().split(',').all(|s| s.parse::<f64>().is_ok_and(f64::is_finite))
    }
}

/// Achieved tolerances and convergence data of a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub integrator: Integrator,
    pub steps: usize,
    pub charge_drift: f64,
    pub energy_drift: f64,
    pub momentum_drift: f64,
    /// Outer fixed-point history `sup_k ‖q̇ⁿ⁺¹ - q̇ⁿ‖_∞` (empty for the
    /// direct integrator).
    pub outer_history: Vec<f64>,
    pub newton_residual: Option<f64>,
    pub admissible: bool,
    pub window: f64,
}

#[derive(Clone, Debug)]
pub struct SimulationOutcome {
    pub records: Vec<TimeSeriesRecord>,
    pub checkpoint: Checkpoint,
    pub trajectory: Trajectory,
    pub summary: RunSummary,
}

fn relative_drift(values: &[f64]) -> f64 {
    let v0 = values[0];
    let worst = values.iter().map(|v| (v - v0).abs()).fold(0.0, f64::max);
    if v0 == 0.0 {
        worst
    } else {
        worst / v0.abs()
    }
}

fn vector_drift(values: &[Vec3]) -> f64 {
    let v0 = values[0];
    let worst = values.iter().map(|v| (v - v0).norm()).fold(0.0, f64::max);
    if v0.norm() == 0.0 {
        worst
    } else {
        worst / v0.norm()
    }
}

fn keep(j: usize, last: usize, every: usize) -> bool {
    j.is_multiple_of(every) || j == last
}

/// Runs the configured coupled solver and flattens the result.
pub fn simulate(setup: &Setup) -> Result<SimulationOutcome> {
    if setup.plan.frame != Frame::Lab {
        return Err(Error::Config(
            "coupled runs are solved in the lab frame; the comoving frame is available to the convergence ladder".into(),
        ));
    }
    let eps = setup.plan.epsilon_for(&setup.grid);
    let sigma = setup.plan.sigma;
    let mut records = Vec::new();
    let (trajectory, final_field, summary) = match setup.integrator {
        Integrator::FixedPoint => {
            let sol = coupled_fixed_point(&setup.u0, &setup.nuclei, setup.horizon, &setup.plan, &setup.options)?;
            let traj = &sol.trajectory;
            let last = traj.samples() - 1;
            if sol.field.snapshots.len() != traj.samples() || sol.forces.len() != traj.samples() {
                return Err(Error::InvalidArgument("field snapshots do not match the trajectory samples".into()));
            }
            let mut energies = Vec::with_capacity(traj.samples());
            let mut momenta = Vec::with_capacity(traj.samples());
            for j in 0..traj.samples() {
                let (t, u) = &sol.field.snapshots[j];
                let nuclei = traj.nuclei_at(j);
                let rec = TimeSeriesRecord::new(*t, u, &nuclei, &sol.forces[j], sigma, eps)?;
                energies.push(rec.energy.total);
                momenta.push(rec.momentum);
                if keep(j, last, setup.every) {
                    records.push(rec);
                }
            }
            let summary = RunSummary {
                integrator: Integrator::FixedPoint,
                steps: last,
                charge_drift: sol.field.charge_drift(),
                energy_drift: relative_drift(&energies),
                momentum_drift: vector_drift(&momenta),
                outer_history: sol.history.clone(),
                newton_residual: Some(sol.newton_residual),
                admissible: sol.admissibility.passed(),
                window: setup.window,
            };
            (sol.trajectory.clone(), sol.field.final_state().clone(), summary)
        }
        Integrator::Direct => {
            let plan = PropagatorPlan { snapshot_stride: 1, ..setup.plan.clone() };
            let sol = coupled_direct(&setup.u0, &setup.nuclei, setup.horizon, setup.dt, &plan)?;
            let traj = &sol.trajectory;
            let last = traj.samples() - 1;
            for j in 0..traj.samples() {
                if !keep(j, last, setup.every) {
                    continue;
                }
                let (t, u) = &sol.field.snapshots[j];
                records.push(TimeSeriesRecord::new(*t, u, &traj.nuclei_at(j), &sol.forces[j], sigma, eps)?);
            }
            let summary = RunSummary {
                integrator: Integrator::Direct,
                steps: last,
                charge_drift: sol.field.charge_drift(),
                energy_drift: sol.energy_drift(),
                momentum_drift: sol.momentum_drift(),
                outer_history: Vec::new(),
                newton_residual: None,
                admissible: true,
                window: setup.window,
            };
            (sol.trajectory.clone(), sol.field.final_state().clone(), summary)
        }
    };
    let last = trajectory.samples() - 1;
    let checkpoint = Checkpoint::new(trajectory.time(last), trajectory.nuclei_at(last), final_field);
    Ok(SimulationOutcome { records, checkpoint, trajectory, summary })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n_slices: usize,
    /// `‖u_n - u_{2n}‖` against the next rung (absent on the last rung).
    pub difference: Option<f64>,
    /// `log₂(d_i / d_{i+1})` (absent where undefined).
    pub order: Option<f64>,
    pub charge: f64,
}

/// Self-convergence of the product-formula propagator along the ballistic
/// trajectory of the configured nuclei. Successive rungs must double.
pub fn convergence_ladder(setup: &Setup, ladder: &[usize]) -> Result<Vec<ConvergenceRow>> {
    if ladder.len() < 2 || ladder.windows(2).any(|w| w[1] != 2 * w[0]) || ladder[0] == 0 {
        return Err(Error::InvalidArgument("refinement ladder must double, e.g. 64,128,256".into()));
    }
    let traj = Trajectory::ballistic(&setup.nuclei, 0.0, setup.horizon, setup.options.steps.max(1))?;
    let fields: Vec<SpinorField> = ladder
        .iter()
        .map(|&n| product_formula_evolve(&setup.u0, 0.0, setup.horizon, &traj, &setup.plan.with_slices(n)))
        .collect::<Result<_>>()?;
    let diffs: Vec<f64> = fields.windows(2).map(|w| w[0].distance(&w[1])).collect();
    Ok(ladder
        .iter()
        .enumerate()
        .map(|(i, &n)| ConvergenceRow {
            n_slices: n,
            difference: diffs.get(i).copied(),
            order: match (diffs.get(i), diffs.get(i + 1)) {
                (Some(a), Some(b)) if *b > 0.0 => Some((a / b).log2()),
                _ => None,
            },
            charge: fields[i].charge(),
        })
        .collect())
}
