//! Linear two-parameter propagator `U_q(t, s)` by time slicing with frozen
//! Hamiltonians, and nonlinear field solvers built on it.

mod nonlinear;

pub use nonlinear::{duhamel_picard, split_step_nonlinear, PicardOptions, PicardReport};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dirac::{apply_free_dirac, FreeStep};
use crate::error::{Error, Result};
use crate::hartree::self_energy;
use crate::lattice::{sobolev_norm, translate, GridSpec, ScalarField, Space, SpinorField, Vec3};
use crate::potentials::{admissibility_check, coulomb_potential, Nucleus, Trajectory};

/// Snap tolerance when locating slice boundaries `k/n`.
const SLICE_SNAP: f64 = 1e-9;
/// Pieces narrower than this are dropped.
const MIN_PIECE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Frame {
    Lab,
    /// Coordinates moving with the only nucleus, which stays at its initial
    /// position; the motion enters as the drift term `i q̇·∇`.
    ComovingSingle,
}

/// Hypothesis caps checked before a linear evolution.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityLimits {
    pub eps0: f64,
    pub velocity_cap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropagatorPlan {
    pub frame: Frame,
    /// Slices per unit time: the Hamiltonian is frozen at `k/n`.
    pub n_slices: usize,
    /// Strang steps per full slice.
    pub substeps: usize,
    /// Coulomb regularization; `None` means two grid spacings.
    pub epsilon: Option<f64>,
    /// Target L² difference between successive refinements.
    pub tolerance: f64,
    pub max_refinements: usize,
    /// Index of the `H^σ` diagnostics.
    pub sigma: f64,
    pub admissibility: Option<AdmissibilityLimits>,
    /// Keep every `k`-th snapshot of time-resolved runs (`0`: endpoints only).
    pub snapshot_stride: usize,
}

impl Default for PropagatorPlan {
    fn default() -> Self {
        Self {
            frame: Frame::Lab,
            n_slices: 8,
            substeps: 2,
            epsilon: None,
            tolerance: 1e-4,
            max_refinements: 5,
            sigma: 1.25,
            admissibility: None,
            snapshot_stride: 1,
        }
    }
}

impl PropagatorPlan {
    pub fn validate(&self) -> Result<()> {
        if self.n_slices == 0 || self.substeps == 0 {
            return Err(Error::InvalidArgument("n_slices and substeps must be at least 1".into()));
        }
        if let Some(e) = self.epsilon {
            if !(e > 0.0 && e.is_finite()) {
                return Err(Error::InvalidArgument(format!("epsilon must be positive, got {e}")));
            }
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidArgument("tolerance must be positive".into()));
        }
        Ok(())
    }

    pub fn epsilon_for(&self, grid: &GridSpec) -> f64 {
        self.epsilon.unwrap_or(2.0 * grid.spacing())
    }

    pub fn with_frame(&self, frame: Frame) -> Self {
        Self { frame, ..self.clone() }
    }

    pub fn with_slices(&self, n_slices: usize) -> Self {
        Self { n_slices, ..self.clone() }
    }
}

/// Time-resolved field with per-record diagnostics.
#[derive(Clone, Debug)]
pub struct FieldSolution {
    pub times: Vec<f64>,
    /// `(time, field)` pairs kept according to the snapshot stride.
    pub snapshots: Vec<(f64, SpinorField)>,
    pub charges: Vec<f64>,
    pub sobolev_norms: Vec<f64>,
    pub energies: Vec<f64>,
    pub resolution: Resolution,
}

/// Resolution actually used to produce a [`FieldSolution`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Resolution {
    pub n_slices: usize,
    pub substeps: usize,
    pub epsilon: f64,
    pub refinements: usize,
    /// L² difference between the last two refinement levels.
    pub last_difference: f64,
}

impl FieldSolution {
    pub(crate) fn new(resolution: Resolution) -> Self {
        Self {
            times: Vec::new(),
            snapshots: Vec::new(),
            charges: Vec::new(),
            sobolev_norms: Vec::new(),
            energies: Vec::new(),
            resolution,
        }
    }

    pub(crate) fn record(&mut self, t: f64, u: &SpinorField, energy: f64, sigma: f64, keep: bool) -> Result<()> {
        if !u.is_finite() {
            return Err(Error::NonFinite("field snapshot"));
        }
        self.times.push(t);
        self.charges.push(u.charge());
        self.sobolev_norms.push(sobolev_norm(u, sigma)?);
        self.energies.push(energy);
        if keep {
            self.snapshots.push((t, u.clone()));
        }
        Ok(())
    }

    pub fn final_state(&self) -> &SpinorField {
        &self.snapshots.last().expect("solution has no snapshots").1
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("solution has no records")
    }

    /// `max |Q(t) - Q(t₀)| / Q(t₀)`.
    pub fn charge_drift(&self) -> f64 {
        let q0 = self.charges.first().copied().unwrap_or(0.0);
        if q0 == 0.0 {
            return 0.0;
        }
        self.charges.iter().map(|q| (q - q0).abs() / q0).fold(0.0, f64::max)
    }
}

/// `⟨u, (D + β)u⟩ + ⟨u, V u⟩`, plus `½ ∫ρ(ρ∗1/|x|)` when `hartree` is set.
pub fn field_energy(u: &SpinorField, potential: Option<&ScalarField>, hartree: bool) -> f64 {
    let mut e = u.inner(&apply_free_dirac(u)).re;
    if let Some(v) = potential {
        let rho = u.density();
        e += rho.data().iter().zip(v.data()).map(|(a, b)| a * b).sum::<f64>() * u.grid().cell_volume();
    }
    if hartree {
        e += self_energy(u);
    }
    e
}

/// `e^{-iτV(x)}` per grid point.
pub(crate) fn potential_phases(potential: &ScalarField, tau: f64) -> Vec<Complex64> {
    potential.data().iter().map(|v| Complex64::cis(-tau * v)).collect()
}

/// `m` Strang steps of width `dt` for a frozen Hamiltonian
/// `D + β + V - drift·(-i∇)`, palindromic so that `dt → -dt` inverts it.
pub(crate) fn strang_steps(
    u: SpinorField,
    potential: Option<&ScalarField>,
    dt: f64,
    drift: Vec3,
    m: usize,
    kinetic: Option<&FreeStep>,
) -> SpinorField {
    let grid = *u.grid();
    let space = u.space();
    let owned;
    let kin = match kinetic {
        Some(k) if k.dt() == dt && k.drift() == drift => k,
        _ => {
            owned = FreeStep::new(grid, dt, drift);
            &owned
        }
    };
    let mut u = u.into_position();
    let (half, full) = match potential {
        Some(v) => (Some(potential_phases(v, 0.5 * dt)), Some(potential_phases(v, dt))),
        None => (None, None),
    };
    if let Some(h) = &half {
        u.multiply_pointwise(h);
    }
    for i in 0..m {
        let mut uh = u.into_momentum();
        kin.apply_momentum(&mut uh);
        u = uh.into_position();
        if let (Some(h), Some(f)) = (&half, &full) {
            u.multiply_pointwise(if i + 1 == m { h } else { f });
        }
    }
    match space {
        Space::Position => u,
        Space::Momentum => u.into_momentum(),
    }
}

/// One Strang step `e^{-iΔt/2 V} e^{-iΔt H₀} e^{-iΔt/2 V}` with the nuclei
/// frozen. In the comoving frame the nuclei's velocities become the drift.
pub fn frozen_step(u: &SpinorField, nuclei: &[Nucleus], dt: f64, plan: &PropagatorPlan) -> Result<SpinorField> {
    plan.validate()?;
    let grid = *u.grid();
    let v = coulomb_field_of(nuclei, plan.epsilon_for(&grid), &grid)?;
    let drift = match plan.frame {
        Frame::Lab => Vec3::zeros(),
        Frame::ComovingSingle => single(nuclei.len()).map(|_| nuclei[0].velocity)?,
    };
    Ok(strang_steps(u.clone(), v.as_ref(), dt, drift, 1, None))
}

fn single(count: usize) -> Result<()> {
    if count != 1 {
        return Err(Error::InvalidArgument(format!(
            "the comoving frame needs exactly one nucleus, got {count}"
        )));
    }
    Ok(())
}

/// Regularized potential, or `None` when every charge vanishes.
fn coulomb_field_of(nuclei: &[Nucleus], eps: f64, grid: &GridSpec) -> Result<Option<ScalarField>> {
    if nuclei.iter().all(|n| n.charge == 0.0) {
        return Ok(None);
    }
    let charges: Vec<f64> = nuclei.iter().map(|n| n.charge).collect();
    let positions: Vec<Vec3> = nuclei.iter().map(|n| n.position).collect();
    coulomb_potential(grid, &charges, &positions, eps).map(Some)
}

/// A stretch of `[s, t]` inside one slice, with the slice's freeze time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Piece {
    pub start: f64,
    pub end: f64,
    pub freeze: f64,
}

/// Splits `[a, b]` (`a ≤ b`) at the slice boundaries `k/n`.
pub(crate) fn pieces(a: f64, b: f64, n: usize) -> Vec<Piece> {
    let nf = n as f64;
    let slot = |x: f64| {
        let y = x * nf;
        let r = y.round();
        if (y - r).abs() < SLICE_SNAP {
            r
        } else {
            y.floor()
        }
    };
    let mut out = Vec::new();
    let mut k = slot(a) as i64;
    loop {
        let lo = k as f64 / nf;
        let hi = (k + 1) as f64 / nf;
        let start = if k == slot(a) as i64 { a } else { lo };
        let end = if hi >= b - SLICE_SNAP / nf { b } else { hi };
        if end - start > MIN_PIECE {
            out.push(Piece { start, end, freeze: lo });
        }
        if end >= b {
            break;
        }
        k += 1;
    }
    out
}

fn substeps_for(piece: &Piece, plan: &PropagatorPlan) -> usize {
    let frac = (piece.end - piece.start) * plan.n_slices as f64;
    ((plan.substeps as f64 * frac - 1e-9).ceil() as usize).max(1)
}

/// Frozen Hamiltonian of one slice.
pub(crate) struct SliceHamiltonian {
    pub potential: Option<ScalarField>,
    pub drift: Vec3,
}

pub(crate) fn slice_hamiltonian(
    grid: &GridSpec,
    traj: &Trajectory,
    tau: f64,
    plan: &PropagatorPlan,
) -> Result<SliceHamiltonian> {
    let eps = plan.epsilon_for(grid);
    let charges = traj.charges();
    let nuclei_positions = match plan.frame {
        Frame::Lab => traj.positions_at(tau),
        Frame::ComovingSingle => vec![traj.sample_position(0, 0)],
    };
    let drift = match plan.frame {
        Frame::Lab => Vec3::zeros(),
        Frame::ComovingSingle => traj.velocity(0, tau),
    };
    let potential = if charges.iter().all(|z| *z == 0.0) {
        None
    } else {
        Some(coulomb_potential(grid, charges, &nuclei_positions, eps)?)
    };
    Ok(SliceHamiltonian { potential, drift })
}

fn check_trajectory(traj: &Trajectory, s: f64, t: f64, plan: &PropagatorPlan) -> Result<()> {
    plan.validate()?;
    let (lo, hi) = (s.min(t), s.max(t));
    if lo < traj.t0() - SLICE_SNAP || hi > traj.t_end() + SLICE_SNAP {
        return Err(Error::InvalidArgument(format!(
            "trajectory covers [{}, {}] but evolution needs [{lo}, {hi}]",
            traj.t0(),
            traj.t_end()
        )));
    }
    if plan.frame == Frame::ComovingSingle {
        single(traj.nuclei_count())?;
    }
    if let Some(lim) = plan.admissibility {
        admissibility_check(traj, lim.eps0, lim.velocity_cap, traj.duration()).into_result()?;
    }
    Ok(())
}

/// Product-formula approximation of `U_q(t, s)u₀`. Each slice `[k/n, (k+1)/n)`
/// uses the Hamiltonian frozen at `k/n` and `substeps` Strang steps; for
/// `t < s` the adjoint product (reversed order, negated steps) is applied.
pub fn product_formula_evolve(
    u0: &SpinorField,
    s: f64,
    t: f64,
    traj: &Trajectory,
    plan: &PropagatorPlan,
) -> Result<SpinorField> {
    check_trajectory(traj, s, t, plan)?;
    if !u0.is_finite() {
        return Err(Error::NonFinite("initial field"));
    }
    let grid = *u0.grid();
    let forward = t >= s;
    let mut list = pieces(s.min(t), s.max(t), plan.n_slices);
    if !forward {
        list.reverse();
    }
    let mut u = u0.in_position();
    let mut kinetic: Option<FreeStep> = None;
    for p in &list {
        let h = slice_hamiltonian(&grid, traj, p.freeze, plan)?;
        let m = substeps_for(p, plan);
        let dt = (p.end - p.start) / m as f64 * if forward { 1.0 } else { -1.0 };
        if kinetic.as_ref().is_none_or(|k| k.dt() != dt || k.drift() != h.drift) {
            kinetic = Some(FreeStep::new(grid, dt, h.drift));
        }
        u = strang_steps(u, h.potential.as_ref(), dt, h.drift, m, kinetic.as_ref());
    }
    if !u.is_finite() {
        return Err(Error::NonFinite("evolved field"));
    }
    Ok(match u0.space() {
        Space::Position => u,
        Space::Momentum => u.into_momentum(),
    })
}

/// `U_q(t, s)u₀` with the number of slices doubled until two successive
/// answers differ by less than the plan tolerance in L².
pub fn evolve_linear(u0: &SpinorField, s: f64, t: f64, traj: &Trajectory, plan: &PropagatorPlan) -> Result<FieldSolution> {
    check_trajectory(traj, s, t, plan)?;
    let grid = *u0.grid();
    let eps = plan.epsilon_for(&grid);
    let mut current = plan.clone();
    let mut prev = product_formula_evolve(u0, s, t, traj, &current)?;
    let mut history = Vec::new();
    let mut converged = s == t;
    let mut last = 0.0;
    let mut refinements = 0;
    while !converged {
        if refinements == plan.max_refinements {
            return Err(Error::NotConverged { what: "linear propagator refinement", iterations: refinements, history });
        }
        current = current.with_slices(current.n_slices * 2);
        let next = product_formula_evolve(u0, s, t, traj, &current)?;
        last = next.distance(&prev);
        history.push(last);
        refinements += 1;
        prev = next;
        converged = last < plan.tolerance;
    }
    let mut sol = FieldSolution::new(Resolution {
        n_slices: current.n_slices,
        substeps: current.substeps,
        epsilon: eps,
        refinements,
        last_difference: last,
    });
    for (time, field) in [(s, u0.in_position()), (t, prev.in_position())] {
        let h = slice_hamiltonian(&grid, traj, time, &current)?;
        let e = field_energy(&field, h.potential.as_ref(), false);
        sol.record(time, &field, e, plan.sigma, true)?;
    }
    Ok(sol)
}

/// Relative L² difference between lab-frame evolution and the translated
/// comoving-frame evolution of the same data, for one nucleus.
pub fn frame_equivalence_residual(u0: &SpinorField, t: f64, traj: &Trajectory, plan: &PropagatorPlan) -> Result<f64> {
    single(traj.nuclei_count())?;
    let s = traj.t0();
    let lab = product_formula_evolve(u0, s, t, traj, &plan.with_frame(Frame::Lab))?;
    let moving = product_formula_evolve(u0, s, t, traj, &plan.with_frame(Frame::ComovingSingle))?;
    // Comoving coordinates: v(t, x) = u(t, x + q(t) - q(s)).
    let shift = traj.position(0, t) - traj.sample_position(0, 0);
    let back = translate(&moving, -shift);
    let norm = u0.norm();
    Ok(if norm == 0.0 { 0.0 } else { lab.distance(&back) / norm })
}

/// `‖U_{q₁}(t, t₀)u₀ - U_{q₂}(t, t₀)u₀‖_{H^{σ-1}}` at the plan's resolution.
pub fn trajectory_sensitivity(
    u0: &SpinorField,
    t: f64,
    traj1: &Trajectory,
    traj2: &Trajectory,
    plan: &PropagatorPlan,
) -> Result<f64> {
    if traj1.nuclei_count() != traj2.nuclei_count() {
        return Err(Error::InvalidArgument("trajectories have different nuclei counts".into()));
    }
    let start_gap = (0..traj1.nuclei_count())
        .map(|k| (traj1.sample_position(k, 0) - traj2.sample_position(k, 0)).norm())
        .fold(0.0, f64::max);
    if start_gap > 1e-12 || (traj1.t0() - traj2.t0()).abs() > 1e-12 {
        return Err(Error::InvalidArgument("trajectories must share their initial positions".into()));
    }
    let a = product_formula_evolve(u0, traj1.t0(), t, traj1, plan)?;
    let b = product_formula_evolve(u0, traj2.t0(), t, traj2, plan)?;
    let mut diff = a;
    diff.add_scaled(Complex64::new(-1.0, 0.0), &b);
    sobolev_norm(&diff, (plan.sigma - 1.0).max(0.0))
}
