//! The Hartree self-interaction `(|u|² ∗ 1/|x|) u` and its bilinear
//! estimates.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::lattice::{forward_plane, inverse_plane, sobolev_norm, GridSpec, ScalarField, Space, SpinorField};
use crate::Result;

/// Fourier multiplier `4π/|ξ|²` of the periodic Coulomb kernel, with the
/// mean (`ξ = 0`) mode removed.
#[derive(Clone, Debug)]
pub struct HartreeKernel {
    grid: GridSpec,
    multiplier: Vec<f64>,
}

impl HartreeKernel {
    pub fn new(grid: GridSpec) -> Self {
        let multiplier = grid
            .wavenumber_squared()
            .into_iter()
            .map(|k2| if k2 == 0.0 { 0.0 } else { 4.0 * PI / k2 })
            .collect();
        Self { grid, multiplier }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn multiplier(&self) -> &[f64] {
        &self.multiplier
    }

    /// `f ∗ 1/|x|` for position-space samples, returned in position space.
    pub fn convolve(&self, data: &[Complex64]) -> Vec<Complex64> {
        let mut buf = data.to_vec();
        let mut work = Vec::new();
        forward_plane(&self.grid, &mut buf, &mut work);
        buf.iter_mut().zip(&self.multiplier).for_each(|(v, m)| *v *= m);
        inverse_plane(&self.grid, &mut buf, &mut work);
        buf
    }

    /// Potential `ρ ∗ 1/|x|` of a real density.
    pub fn potential(&self, density: &ScalarField) -> ScalarField {
        assert_eq!(density.grid(), &self.grid, "grid mismatch");
        let data: Vec<Complex64> = density.data().iter().map(|r| Complex64::new(*r, 0.0)).collect();
        let out = self.convolve(&data).into_iter().map(|v| v.re).collect();
        ScalarField::from_vec(self.grid, out).expect("grid-sized buffer")
    }
}

/// `V_H = |u|² ∗ 1/|x|` (zero-mean convention).
pub fn hartree_potential(u: &SpinorField) -> ScalarField {
    HartreeKernel::new(*u.grid()).potential(&u.density())
}

/// Multiplies `u` by a real potential; the result is in `u`'s representation.
pub fn apply_potential(u: &SpinorField, potential: &ScalarField) -> SpinorField {
    let mut out = u.in_position();
    let f: Vec<Complex64> = potential.data().iter().map(|v| Complex64::new(*v, 0.0)).collect();
    out.multiply_pointwise(&f);
    match u.space() {
        Space::Position => out,
        Space::Momentum => out.into_momentum(),
    }
}

/// `N(u) = (|u|² ∗ 1/|x|) u`.
pub fn apply_nonlinearity(u: &SpinorField) -> SpinorField {
    apply_potential(u, &hartree_potential(u))
}

/// `½ ∫ ρ (ρ ∗ 1/|x|)`, nonnegative since the multiplier is.
pub fn self_energy(u: &SpinorField) -> f64 {
    let rho = u.density();
    let v = HartreeKernel::new(*u.grid()).potential(&rho);
    0.5 * rho.data().iter().zip(v.data()).map(|(a, b)| a * b).sum::<f64>() * u.grid().cell_volume()
}

/// LHS/RHS ratios of the trilinear Hartree estimates for one triple.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct BilinearReport {
    /// `‖(uv∗|x|⁻¹)w‖_{L²} / (‖u‖_{L²} ‖v‖_{H¹} ‖w‖_{L²})`.
    pub l2_ratio: f64,
    /// `‖(uv∗|x|⁻¹)w‖_{H¹} / (‖u‖_{H¹} ‖v‖_{H¹} ‖w‖_{H¹})`.
    pub h1_ratio: f64,
    /// Same with `H^{s+1}` throughout.
    pub fractional_ratio: f64,
    pub s: f64,
}

fn ratio(lhs: f64, rhs: f64) -> f64 {
    if rhs == 0.0 {
        0.0
    } else {
        lhs / rhs
    }
}

/// `(uv ∗ 1/|x|) w` with `uv = ⟨u(x), v(x)⟩_{ℂ⁴}`.
pub fn trilinear(u: &SpinorField, v: &SpinorField, w: &SpinorField) -> SpinorField {
    let grid = *u.grid();
    let (up, vp) = (u.in_position(), v.in_position());
    let mut pair = vec![Complex64::new(0.0, 0.0); grid.len()];
    for (a, b) in up.components().iter().zip(vp.components()) {
        for ((p, x), y) in pair.iter_mut().zip(a).zip(b) {
            *p += x.conj() * y;
        }
    }
    let phi = HartreeKernel::new(grid).convolve(&pair);
    let mut out = w.in_position();
    out.multiply_pointwise(&phi);
    out
}

/// Ratios for the `L²`, `H¹` and `H^{s+1}` trilinear estimates, `s ∈ (0, 1/2)`.
pub fn bilinear_estimate_report(u: &SpinorField, v: &SpinorField, w: &SpinorField, s: f64) -> Result<BilinearReport> {
    if !(s > 0.0 && s < 0.5) {
        return Err(crate::Error::InvalidArgument(format!("fractional index must lie in (0, 1/2), got {s}")));
    }
    for f in [u, v, w] {
        if !f.is_finite() {
            return Err(crate::Error::NonFinite("bilinear estimate input"));
        }
    }
    let t = trilinear(u, v, w);
    let n = |f: &SpinorField, sigma: f64| sobolev_norm(f, sigma);
    Ok(BilinearReport {
        l2_ratio: ratio(t.norm(), u.norm() * n(v, 1.0)? * w.norm()),
        h1_ratio: ratio(n(&t, 1.0)?, n(u, 1.0)? * n(v, 1.0)? * n(w, 1.0)?),
        fractional_ratio: ratio(n(&t, s + 1.0)?, n(u, s + 1.0)? * n(v, s + 1.0)? * n(w, s + 1.0)?),
        s,
    })
}
