use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{
    check_trajectory, field_energy, pieces, potential_phases, product_formula_evolve, slice_hamiltonian, FieldSolution,
    PropagatorPlan, Resolution,
};
use crate::dirac::FreeStep;
use crate::error::{Error, Result};
use crate::hartree::{apply_nonlinearity, hartree_potential};
use crate::lattice::{sobolev_norm, ScalarField, SpinorField};
use crate::potentials::Trajectory;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PicardOptions {
    /// Uniform time steps of the Duhamel quadrature grid.
    pub steps: usize,
    /// Stop once the max-over-time L² distance of successive iterates drops below this.
    pub tolerance: f64,
    pub max_iter: usize,
    /// `C` in the admissible window `T ≤ 1/(C(1 + ‖u₀‖²_{H^σ}))`.
    pub window_constant: f64,
}

impl Default for PicardOptions {
    fn default() -> Self {
        Self { steps: 16, tolerance: 1e-10, max_iter: 60, window_constant: 1.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PicardReport {
    pub iterations: usize,
    /// `max_j ‖u⁽ᵐ⁾(t_j) - u⁽ᵐ⁻¹⁾(t_j)‖_{L²}` per iteration.
    pub distances: Vec<f64>,
    /// Distances strictly decrease from the second iteration on.
    pub contraction_monotone: bool,
    /// `1/(C(1 + ‖u₀‖²_{H^σ}))`.
    pub window: f64,
}

impl PicardReport {
    /// Ratios of successive distances.
    pub fn contraction_factors(&self) -> Vec<f64> {
        self.distances.windows(2).map(|w| w[1] / w[0]).collect()
    }
}

/// Fixed point of the Duhamel map
/// `u(t) = U_q(t, 0)u₀ - i ∫₀ᵗ U_q(t, τ) N(u(τ)) dτ`
/// on a uniform grid, with trapezoid quadrature for the integral.
pub fn duhamel_picard(
    u0: &SpinorField,
    traj: &Trajectory,
    t_final: f64,
    plan: &PropagatorPlan,
    options: &PicardOptions,
    initial_guess: Option<&[SpinorField]>,
) -> Result<(FieldSolution, PicardReport)> {
    let t0 = traj.t0();
    check_trajectory(traj, t0, t_final, plan)?;
    if options.steps == 0 || !(t_final > t0) {
        return Err(Error::InvalidArgument("Picard iteration needs a positive horizon and step count".into()));
    }
    let grid = *u0.grid();
    let window = 1.0 / (options.window_constant * (1.0 + sobolev_norm(u0, plan.sigma)?.powi(2)));
    if t_final - t0 > window {
        return Err(Error::Admissibility(format!(
            "Picard window T <= 1/(C(1 + |u0|^2_H^sigma)) violated: T = {} > {window:.6e}",
            t_final - t0
        )));
    }
    let steps = options.steps;
    let dt = (t_final - t0) / steps as f64;
    let times: Vec<f64> = (0..=steps).map(|j| if j == steps { t_final } else { t0 + j as f64 * dt }).collect();
    let mut report = PicardReport { iterations: 0, distances: Vec::new(), contraction_monotone: true, window };

    let mut linear = Vec::with_capacity(steps + 1);
    linear.push(u0.in_position());
    for j in 0..steps {
        // Zero data stays zero; skip the propagation.
        let next = if u0.is_zero() {
            linear[j].clone()
        } else {
            product_formula_evolve(&linear[j], times[j], times[j + 1], traj, plan)?
        };
        linear.push(next);
    }

    let mut current: Vec<SpinorField> = if u0.is_zero() {
        report.iterations = 1;
        report.distances.push(0.0);
        linear.clone()
    } else {
        let mut iterate = match initial_guess {
            Some(g) if g.len() == steps + 1 => g.iter().map(SpinorField::in_position).collect(),
            Some(_) => return Err(Error::InvalidArgument("initial guess does not match the time grid".into())),
            None => linear.clone(),
        };
        loop {
            let nl: Vec<SpinorField> = iterate.iter().map(apply_nonlinearity).collect();
            let half = Complex64::new(0.5 * dt, 0.0);
            let mut w = SpinorField::zeros(grid, crate::lattice::Space::Position);
            let mut next = Vec::with_capacity(steps + 1);
            next.push(linear[0].clone());
            for j in 0..steps {
                w.add_scaled(half, &nl[j]);
                w = product_formula_evolve(&w, times[j], times[j + 1], traj, plan)?;
                w.add_scaled(half, &nl[j + 1]);
                let mut u = linear[j + 1].clone();
                u.add_scaled(Complex64::new(0.0, -1.0), &w);
                next.push(u);
            }
            let d = next.iter().zip(&iterate).map(|(a, b)| a.distance(b)).fold(0.0, f64::max);
            if !d.is_finite() {
                return Err(Error::NonFinite("Picard iterate"));
            }
            report.distances.push(d);
            report.iterations += 1;
            iterate = next;
            if d < options.tolerance {
                break;
            }
            if report.iterations >= options.max_iter {
                return Err(Error::NotConverged {
                    what: "Duhamel-Picard iteration",
                    iterations: report.iterations,
                    history: report.distances,
                });
            }
        }
        iterate
    };
    report.contraction_monotone = report.distances.windows(2).skip(1).all(|w| w[1] < w[0]);

    let mut sol = FieldSolution::new(Resolution {
        n_slices: plan.n_slices,
        substeps: plan.substeps,
        epsilon: plan.epsilon_for(&grid),
        refinements: 0,
        last_difference: report.distances.last().copied().unwrap_or(0.0),
    });
    let stride = plan.snapshot_stride;
    for (j, u) in current.drain(..).enumerate() {
        let h = slice_hamiltonian(&grid, traj, times[j], plan)?;
        let e = field_energy(&u, h.potential.as_ref(), true);
        let keep = j == steps || j == 0 || (stride > 0 && j % stride == 0);
        sol.record(times[j], &u, e, plan.sigma, keep)?;
    }
    Ok((sol, report))
}

fn add_fields(a: Option<&ScalarField>, b: Option<&ScalarField>) -> Option<ScalarField> {
    match (a, b) {
        (Some(a), Some(b)) => {
            let mut out = a.clone();
            out.add(b);
            Some(out)
        }
        (Some(a), None) => Some(a.clone()),
        (None, Some(b)) => Some(b.clone()),
        (None, None) => None,
    }
}

/// Strang splitting with the Hartree potential refreshed at each half step.
/// The nuclear potential follows the plan's slicing (frozen at `k/n`); each
/// slice is cut into steps no wider than `dt`. With `nonlinear = false` this
/// is the linear product formula with matching substeps.
pub fn split_step_nonlinear(
    u0: &SpinorField,
    traj: &Trajectory,
    t_final: f64,
    dt: f64,
    plan: &PropagatorPlan,
    nonlinear: bool,
) -> Result<FieldSolution> {
    let t0 = traj.t0();
    check_trajectory(traj, t0, t_final, plan)?;
    if !(dt > 0.0) || !(t_final >= t0) {
        return Err(Error::InvalidArgument("split-step needs dt > 0 and a forward horizon".into()));
    }
    let grid = *u0.grid();
    let mut sol = FieldSolution::new(Resolution {
        n_slices: plan.n_slices,
        substeps: 0,
        epsilon: plan.epsilon_for(&grid),
        refinements: 0,
        last_difference: 0.0,
    });
    let mut u = u0.in_position();
    let energy = |u: &SpinorField, v: Option<&ScalarField>| field_energy(u, v, nonlinear);
    let h0 = slice_hamiltonian(&grid, traj, t0, plan)?;
    sol.record(t0, &u, energy(&u, h0.potential.as_ref()), plan.sigma, true)?;
    let mut count = 0usize;
    let mut kinetic: Option<FreeStep> = None;
    let list = pieces(t0, t_final, plan.n_slices);
    for (pi, p) in list.iter().enumerate() {
        let h = slice_hamiltonian(&grid, traj, p.freeze, plan)?;
        let width = p.end - p.start;
        let m = ((width / dt - 1e-9).ceil() as usize).max(1);
        let tau = width / m as f64;
        if kinetic.as_ref().is_none_or(|k| k.dt() != tau || k.drift() != h.drift) {
            kinetic = Some(FreeStep::new(grid, tau, h.drift));
        }
        let kin = kinetic.as_ref().expect("kinetic step");
        for i in 0..m {
            let vh = nonlinear.then(|| hartree_potential(&u));
            if let Some(v) = add_fields(h.potential.as_ref(), vh.as_ref()) {
                u.multiply_pointwise(&potential_phases(&v, 0.5 * tau));
            }
            let mut uh = u.into_momentum();
            kin.apply_momentum(&mut uh);
            u = uh.into_position();
            let vh = nonlinear.then(|| hartree_potential(&u));
            let total = add_fields(h.potential.as_ref(), vh.as_ref());
            if let Some(v) = &total {
                u.multiply_pointwise(&potential_phases(v, 0.5 * tau));
            }
            count += 1;
            let t = if i + 1 == m { p.end } else { p.start + (i + 1) as f64 * tau };
            let last = pi + 1 == list.len() && i + 1 == m;
            let keep = last || (plan.snapshot_stride > 0 && count.is_multiple_of(plan.snapshot_stride));
            sol.record(t, &u, energy(&u, h.potential.as_ref()), plan.sigma, keep)?;
        }
    }
    if list.is_empty() {
        sol.snapshots.clear();
        sol.snapshots.push((t0, u));
    }
    Ok(sol)
}
