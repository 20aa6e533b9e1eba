//! Nuclei, regularized multi-center Coulomb potentials, the cutoff profile,
//! trajectories and the nuclei-freezing change of variables.

mod cutoff;
mod freezing;
mod trajectory;

pub use cutoff::CutoffProfile;
pub use freezing::{FreezingMap, GradientDecomposition, Pullback, ResidualPotential};
pub use trajectory::{admissibility_check, AdmissibilityReport, Trajectory, Violation};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{GridSpec, ScalarField, Vec3};

/// Largest admissible nuclear charge, `√3/2`.
pub const CRITICAL_CHARGE: f64 = 0.866_025_403_784_438_6;

/// Classical point nucleus.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Nucleus {
    pub charge: f64,
    pub mass: f64,
    pub position: Vec3,
    pub velocity: Vec3,
}

impl Nucleus {
    /// Checks `|Z| < √3/2` and `m > 0`. A zero charge is accepted as the
    /// decoupled control case.
    pub fn new(charge: f64, mass: f64, position: Vec3, velocity: Vec3) -> Result<Self> {
        if !(charge.abs() < CRITICAL_CHARGE) {
            return Err(Error::InvalidArgument(format!(
                "hypothesis |Z_k| < sqrt(3)/2 violated: Z = {charge}"
            )));
        }
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::InvalidArgument(format!("nuclear mass must be positive, got {mass}")));
        }
        if !(position.iter().chain(velocity.iter()).all(|v| v.is_finite())) {
            return Err(Error::NonFinite("nucleus state"));
        }
        Ok(Self { charge, mass, position, velocity })
    }
}

/// `-Σₖ Zₖ / √(d(x, qₖ)² + ε²)` at a single point, with `d` the
/// minimum-image distance on `grid`'s torus. `ε = 0` gives the bare Coulomb
/// law (infinite at a nucleus).
pub fn coulomb_value(grid: &GridSpec, x: Vec3, charges: &[f64], positions: &[Vec3], epsilon: f64) -> f64 {
    let eps2 = epsilon * epsilon;
    charges
        .iter()
        .zip(positions)
        .map(|(z, q)| -z / (grid.min_image(x - q).norm_squared() + eps2).sqrt())
        .sum()
}

/// Regularized Coulomb potential of point charges sampled on the grid.
pub fn coulomb_potential(grid: &GridSpec, charges: &[f64], positions: &[Vec3], epsilon: f64) -> Result<ScalarField> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "Coulomb regularization must be positive, got {epsilon}"
        )));
    }
    if charges.len() != positions.len() {
        return Err(Error::InvalidArgument("charges and positions differ in length".into()));
    }
    let mut out = ScalarField::zeros(*grid);
    if charges.iter().all(|z| *z == 0.0) {
        return Ok(out);
    }
    let data = out.data_mut();
    let eps2 = epsilon * epsilon;
    for (z, q) in charges.iter().zip(positions) {
        if *z == 0.0 {
            continue;
        }
        // Per-axis minimum-image offsets, reused across the cube.
        let axis = |c: usize| -> Vec<f64> {
            grid.axis_coordinates()
                .into_iter()
                .map(|x| {
                    let d = x - q[c];
                    let l = grid.box_length();
                    let d = d - l * (d / l).round();
                    d * d
                })
                .collect()
        };
        let (dx, dy, dz) = (axis(0), axis(1), axis(2));
        let mut idx = 0;
        for ax in &dx {
            for ay in &dy {
                let axy = ax + ay + eps2;
                for az in &dz {
                    data[idx] -= z / (axy + az).sqrt();
                    idx += 1;
                }
            }
        }
    }
    Ok(out)
}

/// [`coulomb_potential`] for a list of nuclei at their current positions.
pub fn coulomb_field(nuclei: &[Nucleus], epsilon: f64, grid: &GridSpec) -> Result<ScalarField> {
    let charges: Vec<f64> = nuclei.iter().map(|n| n.charge).collect();
    let positions: Vec<Vec3> = nuclei.iter().map(|n| n.position).collect();
    coulomb_potential(grid, &charges, &positions, epsilon)
}
