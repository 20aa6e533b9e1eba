//! Forces on the nuclei, conserved-quantity diagnostics, and the coupled
//! field–nuclei solvers.

mod coupled;

pub use coupled::{
    coupled_direct, coupled_fixed_point, time_window, trajectory_map, CoupledOptions, CoupledSolution, DirectSolution,
    MapOutput,
};

use serde::{Deserialize, Serialize};

use crate::dirac::apply_free_dirac;
use crate::error::{Error, Result};
use crate::hartree::self_energy;
use crate::lattice::{GridSpec, ScalarField, SpinorField, Vec3};
use crate::potentials::{coulomb_potential, Nucleus};

/// Per-axis minimum-image offsets `x_i - c` over one grid axis.
fn axis_offsets(grid: &GridSpec, c: f64) -> Vec<f64> {
    let l = grid.box_length();
    grid.axis_coordinates()
        .into_iter()
        .map(|x| {
            let d = x - c;
            d - l * (d / l).round()
        })
        .collect()
}

/// Hellmann–Feynman force of the electron density on a point charge:
/// `F = Z h³ Σₓ ρ(x) (x - q)/(|x - q|² + ε²)^{3/2}`, the exact negative
/// q-gradient of the discrete interaction energy `-Z h³ Σₓ ρ/√(|x-q|²+ε²)`.
pub fn field_force_from_density(density: &ScalarField, charge: f64, position: Vec3, epsilon: f64) -> Vec3 {
    if charge == 0.0 {
        return Vec3::zeros();
    }
    let grid = density.grid();
    let (dx, dy, dz) = (
        axis_offsets(grid, position.x),
        axis_offsets(grid, position.y),
        axis_offsets(grid, position.z),
    );
    let eps2 = epsilon * epsilon;
    let rho = density.data();
    let mut acc = Vec3::zeros();
    let mut idx = 0;
    for ax in &dx {
        for ay in &dy {
            let (mut sw, mut sz) = (0.0, 0.0);
            let base = ax * ax + ay * ay + eps2;
            for az in &dz {
                let r = rho[idx];
                idx += 1;
                if r == 0.0 {
                    continue;
                }
                let s = base + az * az;
                let w = r / (s * s.sqrt());
                sw += w;
                sz += w * az;
            }
            acc.x += sw * ax;
            acc.y += sw * ay;
            acc.z += sz;
        }
    }
    acc * (charge * grid.cell_volume())
}

/// [`field_force_from_density`] for a spinor field.
pub fn field_force(u: &SpinorField, nucleus: &Nucleus, epsilon: f64) -> Vec3 {
    field_force_from_density(&u.density(), nucleus.charge, nucleus.position, epsilon)
}

fn check_collisions(positions: &[Vec3], min_distance: f64) -> Result<()> {
    for k in 0..positions.len() {
        for l in k + 1..positions.len() {
            if (positions[k] - positions[l]).norm() <= min_distance {
                return Err(Error::Collision(k, l));
            }
        }
    }
    Ok(())
}

/// `F_k = Σ_{l≠k} Z_k Z_l (q_k - q_l)/|q_k - q_l|³` (free-space distances).
pub fn internuclear_force(charges: &[f64], positions: &[Vec3]) -> Result<Vec<Vec3>> {
    check_collisions(positions, 0.0)?;
    let n = positions.len();
    let mut out = vec![Vec3::zeros(); n];
    for k in 0..n {
        for l in k + 1..n {
            let d = positions[k] - positions[l];
            let r = d.norm();
            let f = d * (charges[k] * charges[l] / (r * r * r));
            out[k] += f;
            out[l] -= f;
        }
    }
    Ok(out)
}

/// `Σ_{k<l} Z_k Z_l / |q_k - q_l|`.
pub fn internuclear_energy(charges: &[f64], positions: &[Vec3]) -> f64 {
    let mut e = 0.0;
    for k in 0..positions.len() {
        for l in k + 1..positions.len() {
            e += charges[k] * charges[l] / (positions[k] - positions[l]).norm();
        }
    }
    e
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForceBreakdown {
    pub time: f64,
    pub field: Vec<Vec3>,
    pub internuclear: Vec<Vec3>,
    pub total: Vec<Vec3>,
}

/// Field and internuclear forces on every nucleus.
pub fn force_breakdown(time: f64, density: &ScalarField, nuclei: &[Nucleus], epsilon: f64) -> Result<ForceBreakdown> {
    let charges: Vec<f64> = nuclei.iter().map(|n| n.charge).collect();
    let positions: Vec<Vec3> = nuclei.iter().map(|n| n.position).collect();
    let internuclear = internuclear_force(&charges, &positions)?;
    let field: Vec<Vec3> = nuclei
        .iter()
        .map(|n| field_force_from_density(density, n.charge, n.position, epsilon))
        .collect();
    let total = field.iter().zip(&internuclear).map(|(a, b)| a + b).collect();
    Ok(ForceBreakdown { time, field, internuclear, total })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    /// `⟨u, (D + β)u⟩`.
    pub field_kinetic: f64,
    /// `∫ρ V_ε`.
    pub interaction: f64,
    /// `½ ∫ρ(ρ∗1/|x|)`.
    pub hartree: f64,
    pub nuclear_kinetic: f64,
    pub repulsion: f64,
    pub total: f64,
}

/// Energy of the coupled system with the propagator's regularized potential.
pub fn energy_breakdown(u: &SpinorField, nuclei: &[Nucleus], epsilon: f64) -> Result<EnergyBreakdown> {
    let grid = *u.grid();
    let field_kinetic = u.inner(&apply_free_dirac(u)).re;
    let charges: Vec<f64> = nuclei.iter().map(|n| n.charge).collect();
    let positions: Vec<Vec3> = nuclei.iter().map(|n| n.position).collect();
    let interaction = if nuclei.is_empty() || charges.iter().all(|z| *z == 0.0) {
        0.0
    } else {
        let v = coulomb_potential(&grid, &charges, &positions, epsilon)?;
        let rho = u.density();
        rho.data().iter().zip(v.data()).map(|(a, b)| a * b).sum::<f64>() * grid.cell_volume()
    };
    let hartree = self_energy(u);
    let nuclear_kinetic: f64 = nuclei.iter().map(|n| 0.5 * n.mass * n.velocity.norm_squared()).sum();
    let repulsion = internuclear_energy(&charges, &positions);
    let total = field_kinetic + interaction + hartree + nuclear_kinetic + repulsion;
    if !total.is_finite() {
        return Err(Error::NonFinite("energy"));
    }
    Ok(EnergyBreakdown { field_kinetic, interaction, hartree, nuclear_kinetic, repulsion, total })
}

/// Field momentum `⟨u, -i∇u⟩ = L⁻³ Σ_ξ ξ |û(ξ)|²`.
pub fn field_momentum(u: &SpinorField) -> Vec3 {
    let uh = u.in_momentum();
    let grid = *u.grid();
    let mut acc = Vec3::zeros();
    grid.for_each_derivative_mode(|idx, xi| {
        let w: f64 = uh.components().iter().map(|c| c[idx].norm_sqr()).sum();
        acc += xi * w;
    });
    acc / grid.volume()
}

/// Field momentum plus `Σ m_k q̇_k`.
pub fn total_momentum(u: &SpinorField, nuclei: &[Nucleus]) -> Vec3 {
    nuclei.iter().fold(field_momentum(u), |acc, n| acc + n.velocity * n.mass)
}
