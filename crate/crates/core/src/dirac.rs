//! Dirac algebra in the standard representation, the free operator `D + β`
//! and its exact per-mode propagator.
//!
//! In momentum space `D + β` acts as the Hermitian symbol
//! `H_ξ = Σⱼ αⱼ ξⱼ + β`, which squares to `(1 + |ξ|²) I`. Every mode
//! exponential therefore has the closed form
//! `exp(-iτH_ξ) = cos(τλ) I - i sin(τλ)/λ H_ξ` with `λ = √(1 + |ξ|²)`.

use num_complex::Complex64;

use crate::lattice::{GridSpec, Space, Spinor, SpinorField, Vec3};

pub type Matrix4 = [[Complex64; 4]; 4];

const O: Complex64 = Complex64::new(0.0, 0.0);
const I1: Complex64 = Complex64::new(1.0, 0.0);
const IM: Complex64 = Complex64::new(0.0, 1.0);

/// `α₁, α₂, α₃` and `β` in the Dirac representation.
#[derive(Clone, Debug, PartialEq)]
pub struct DiracMatrices {
    pub alpha: [Matrix4; 3],
    pub beta: Matrix4,
}

pub fn dirac_matrices() -> DiracMatrices {
    let pauli: [[[Complex64; 2]; 2]; 3] = [
        [[O, I1], [I1, O]],
        [[O, -IM], [IM, O]],
        [[I1, O], [O, -I1]],
    ];
    let alpha = pauli.map(|s| {
        let mut m = [[O; 4]; 4];
        for r in 0..2 {
            for c in 0..2 {
                m[r][c + 2] = s[r][c];
                m[r + 2][c] = s[r][c];
            }
        }
        m
    });
    let mut beta = [[O; 4]; 4];
    for (i, row) in beta.iter_mut().enumerate() {
        row[i] = if i < 2 { I1 } else { -I1 };
    }
    DiracMatrices { alpha, beta }
}

pub fn matmul(a: &Matrix4, b: &Matrix4) -> Matrix4 {
    let mut out = [[O; 4]; 4];
    for r in 0..4 {
        for c in 0..4 {
            out[r][c] = (0..4).map(|k| a[r][k] * b[k][c]).sum();
        }
    }
    out
}

/// `H_ξ w = (Σⱼ αⱼ ξⱼ + β) w`, written out for the standard representation.
#[inline]
pub fn apply_symbol(xi: Vec3, w: &Spinor) -> Spinor {
    let (x, y, z) = (xi.x, xi.y, xi.z);
    let minus = Complex64::new(x, -y);
    let plus = Complex64::new(x, y);
    [
        z * w[2] + minus * w[3] + w[0],
        plus * w[2] - z * w[3] + w[1],
        z * w[0] + minus * w[1] - w[2],
        plus * w[0] - z * w[1] - w[3],
    ]
}

/// Returns `(D + β) u` in the representation of the input.
pub fn apply_free_dirac(u: &SpinorField) -> SpinorField {
    let space = u.space();
    let mut uh = u.in_momentum();
    let grid = *u.grid();
    grid.for_each_derivative_mode(|idx, xi| {
        let w = uh.get(idx);
        uh.set(idx, apply_symbol(xi, &w));
    });
    match space {
        Space::Position => uh.into_position(),
        Space::Momentum => uh,
    }
}

/// Precomputed per-mode coefficients of `exp(-iτ(H_ξ - drift·ξ))`.
///
/// The drift term is the Fourier image of `i q̇·∇`, the extra kinetic term
/// that appears when the field is written in coordinates moving with a
/// nucleus. `drift = 0` gives the lab-frame kinetic step.
#[derive(Clone, Debug)]
pub struct FreeStep {
    grid: GridSpec,
    dt: f64,
    drift: Vec3,
    cos: Vec<f64>,
    sinc: Vec<f64>,
    phase: Option<Vec<Complex64>>,
}

impl FreeStep {
    pub fn new(grid: GridSpec, dt: f64, drift: Vec3) -> Self {
        let n = grid.len();
        let mut cos = Vec::with_capacity(n);
        let mut sinc = Vec::with_capacity(n);
        let has_drift = drift != Vec3::zeros();
        let mut phase = has_drift.then(|| Vec::with_capacity(n));
        let mut xi_full = Vec::with_capacity(if has_drift { n } else { 0 });
        if has_drift {
            grid.for_each_mode(|_, xi| xi_full.push(xi));
        }
        grid.for_each_derivative_mode(|idx, xi| {
            let lambda = (1.0 + xi.norm_squared()).sqrt();
            let (s, c) = (dt * lambda).sin_cos();
            cos.push(c);
            sinc.push(s / lambda);
            if let Some(p) = phase.as_mut() {
                p.push(Complex64::cis(dt * drift.dot(&xi_full[idx])));
            }
        });
        Self { grid, dt, drift, cos, sinc, phase }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn drift(&self) -> Vec3 {
        self.drift
    }

    /// Applies the step to a momentum-space field in place.
    pub fn apply_momentum(&self, uh: &mut SpinorField) {
        assert_eq!(uh.space(), Space::Momentum);
        assert_eq!(*uh.grid(), self.grid);
        let grid = self.grid;
        grid.for_each_derivative_mode(|idx, xi| {
            let w = uh.get(idx);
            let hw = apply_symbol(xi, &w);
            let c = self.cos[idx];
            let s = Complex64::new(0.0, -self.sinc[idx]);
            let mut out: Spinor = std::array::from_fn(|k| c * w[k] + s * hw[k]);
            if let Some(p) = &self.phase {
                out.iter_mut().for_each(|v| *v *= p[idx]);
            }
            uh.set(idx, out);
        });
    }
}

/// One exact kinetic step `exp(-iΔt(H_ξ - drift·ξ))`, returned in the
/// representation of the input.
pub fn free_propagator_step(u: &SpinorField, dt: f64, drift: Vec3) -> SpinorField {
    let space = u.space();
    let mut uh = u.in_momentum();
    FreeStep::new(*u.grid(), dt, drift).apply_momentum(&mut uh);
    match space {
        Space::Position => uh.into_position(),
        Space::Momentum => uh,
    }
}
