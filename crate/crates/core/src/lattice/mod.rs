//! Periodic cubic grid, spinor and scalar fields, and the discrete Fourier
//! transform they share.
//!
//! Transform convention: `û(ξ) = h³ Σₓ u(x) e^{-iξ·x}` with inverse
//! `u(x) = L⁻³ Σ_ξ û(ξ) e^{iξ·x}`, so that `∂ⱼ ↦ iξⱼ` and
//! `h³ Σₓ |u|² = L⁻³ Σ_ξ |û|²` hold exactly on the torus.
//!
//! Grid index `j` along an axis maps to the coordinate `j·h` for `j < n/2`
//! and `(j - n)·h` otherwise, so positions cover `[-L/2, L/2)` with the
//! origin at index 0. Wavenumbers use the same wrapping.

pub mod checkpoint;
pub use checkpoint::Checkpoint;
mod fft;

use nalgebra::Vector3;
use num_complex::Complex64;
use rustfft::FftDirection;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;
pub type Spinor = [Complex64; 4];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Uniform periodic grid with `n` points per axis on a cube of side `L`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    n: usize,
    box_length: f64,
}

impl GridSpec {
    pub fn new(n: usize, box_length: f64) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "points per axis must be a power of two >= 8, got {n}"
            )));
        }
        if !(box_length > 0.0 && box_length.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "box length must be positive and finite, got {box_length}"
            )));
        }
        Ok(Self { n, box_length })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    pub fn spacing(&self) -> f64 {
        self.box_length / self.n as f64
    }

    /// Number of grid points, `n³`.
    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(3)
    }

    pub fn volume(&self) -> f64 {
        self.box_length.powi(3)
    }

    /// Fundamental frequency `2π/L`.
    pub fn dk(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.box_length
    }

    /// Signed integer frequency of axis index `j`, in `-n/2..n/2`.
    pub fn signed_index(&self, j: usize) -> i64 {
        let n = self.n as i64;
        let j = j as i64;
        if j < n / 2 {
            j
        } else {
            j - n
        }
    }

    pub fn axis_coordinate(&self, j: usize) -> f64 {
        self.signed_index(j) as f64 * self.spacing()
    }

    pub fn axis_wavenumber(&self, j: usize) -> f64 {
        self.signed_index(j) as f64 * self.dk()
    }

    pub fn axis_coordinates(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.axis_coordinate(j)).collect()
    }

    pub fn axis_wavenumbers(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.axis_wavenumber(j)).collect()
    }

    pub fn index(&self, ix: usize, iy: usize, iz: usize) -> usize {
        (ix * self.n + iy) * self.n + iz
    }

    pub fn unflatten(&self, idx: usize) -> (usize, usize, usize) {
        let n = self.n;
        (idx / (n * n), (idx / n) % n, idx % n)
    }

    pub fn position(&self, idx: usize) -> Vec3 {
        let (ix, iy, iz) = self.unflatten(idx);
        Vec3::new(
            self.axis_coordinate(ix),
            self.axis_coordinate(iy),
            self.axis_coordinate(iz),
        )
    }

    pub fn wavevector(&self, idx: usize) -> Vec3 {
        let (ix, iy, iz) = self.unflatten(idx);
        Vec3::new(
            self.axis_wavenumber(ix),
            self.axis_wavenumber(iy),
            self.axis_wavenumber(iz),
        )
    }

    /// `|ξ|²` for every mode, in storage order.
    pub fn wavenumber_squared(&self) -> Vec<f64> {
        Self::squares(&self.axis_wavenumbers())
    }

    /// `|ξ|²` built from [`GridSpec::derivative_wavenumbers`], so that
    /// `‖∇u‖` agrees with the first-order operators.
    pub fn derivative_wavenumber_squared(&self) -> Vec<f64> {
        Self::squares(&self.derivative_wavenumbers())
    }

    fn squares(k: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(k.len().pow(3));
        for kx in k {
            for ky in k {
                for kz in k {
                    out.push(kx * kx + ky * ky + kz * kz);
                }
            }
        }
        out
    }

    /// Minimum-image representative of a displacement on the torus.
    pub fn min_image(&self, d: Vec3) -> Vec3 {
        let l = self.box_length;
        d.map(|c| c - l * (c / l).round())
    }

    /// Calls `f(idx, x)` for every grid point in storage order.
    pub fn for_each_position(&self, mut f: impl FnMut(usize, Vec3)) {
        let c = self.axis_coordinates();
        let mut idx = 0;
        for x in &c {
            for y in &c {
                for z in &c {
                    f(idx, Vec3::new(*x, *y, *z));
                    idx += 1;
                }
            }
        }
    }

    /// Wavenumbers of first-order operators: the unpaired Nyquist entry is
    /// set to zero so that `-i∂` stays Hermitian and parity-odd.
    pub fn derivative_wavenumbers(&self) -> Vec<f64> {
        let n = self.n as i64;
        (0..self.n)
            .map(|j| if n % 2 == 0 && self.signed_index(j) == -n / 2 { 0.0 } else { self.axis_wavenumber(j) })
            .collect()
    }

    /// [`GridSpec::for_each_mode`] with [`GridSpec::derivative_wavenumbers`].
    pub fn for_each_derivative_mode(&self, f: impl FnMut(usize, Vec3)) {
        Self::visit(&self.derivative_wavenumbers(), f);
    }

    /// Calls `f(idx, ξ)` for every mode in storage order.
    pub fn for_each_mode(&self, f: impl FnMut(usize, Vec3)) {
        Self::visit(&self.axis_wavenumbers(), f);
    }

    fn visit(k: &[f64], mut f: impl FnMut(usize, Vec3)) {
        let mut idx = 0;
        for x in k {
            for y in k {
                for z in k {
                    f(idx, Vec3::new(*x, *y, *z));
                    idx += 1;
                }
            }
        }
    }
}

/// Which representation a field's samples are stored in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Space {
    Position,
    Momentum,
}

/// Forward transform of one cube with the grid's normalization.
pub(crate) fn forward_plane(grid: &GridSpec, data: &mut [Complex64], work: &mut Vec<Complex64>) {
    fft::fft3(grid.n(), data, work, FftDirection::Forward);
    let s = grid.cell_volume();
    data.iter_mut().for_each(|v| *v *= s);
}

/// Inverse transform of one cube with the grid's normalization.
pub(crate) fn inverse_plane(grid: &GridSpec, data: &mut [Complex64], work: &mut Vec<Complex64>) {
    fft::fft3(grid.n(), data, work, FftDirection::Inverse);
    let s = 1.0 / grid.volume();
    data.iter_mut().for_each(|v| *v *= s);
}

/// Four-component complex field on a [`GridSpec`], stored as one cube per
/// spinor component.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinorField {
    grid: GridSpec,
    space: Space,
    comps: [Vec<Complex64>; 4],
}

impl SpinorField {
    pub fn zeros(grid: GridSpec, space: Space) -> Self {
        let n = grid.len();
        Self {
            grid,
            space,
            comps: std::array::from_fn(|_| vec![ZERO; n]),
        }
    }

    /// Samples `f` at every grid position.
    pub fn from_fn(grid: GridSpec, mut f: impl FnMut(Vec3) -> Spinor) -> Self {
        let mut out = Self::zeros(grid, Space::Position);
        grid.for_each_position(|idx, x| {
            let s = f(x);
            for c in 0..4 {
                out.comps[c][idx] = s[c];
            }
        });
        out
    }

    pub fn from_components(grid: GridSpec, space: Space, comps: [Vec<Complex64>; 4]) -> Result<Self> {
        if comps.iter().any(|c| c.len() != grid.len()) {
            return Err(Error::GridMismatch);
        }
        Ok(Self { grid, space, comps })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn components(&self) -> &[Vec<Complex64>; 4] {
        &self.comps
    }

    pub fn components_mut(&mut self) -> &mut [Vec<Complex64>; 4] {
        &mut self.comps
    }

    pub fn get(&self, idx: usize) -> Spinor {
        std::array::from_fn(|c| self.comps[c][idx])
    }

    pub fn set(&mut self, idx: usize, value: Spinor) {
        for (c, v) in value.into_iter().enumerate() {
            self.comps[c][idx] = v;
        }
    }

    pub fn is_finite(&self) -> bool {
        self.comps
            .iter()
            .all(|c| c.iter().all(|v| v.re.is_finite() && v.im.is_finite()))
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.iter().all(|v| *v == ZERO))
    }

    /// Transforms to momentum space. The field must be in position space.
    pub fn to_momentum(&self) -> Result<SpinorField> {
        if self.space != Space::Position {
            return Err(Error::SpaceMismatch { expected: Space::Position });
        }
        if !self.is_finite() {
            return Err(Error::NonFinite("to_momentum input"));
        }
        Ok(self.clone().into_momentum())
    }

    /// Transforms to position space. The field must be in momentum space.
    pub fn to_position(&self) -> Result<SpinorField> {
        if self.space != Space::Momentum {
            return Err(Error::SpaceMismatch { expected: Space::Momentum });
        }
        if !self.is_finite() {
            return Err(Error::NonFinite("to_position input"));
        }
        Ok(self.clone().into_position())
    }

    /// Converts in place if needed; a no-op when already in momentum space.
    pub fn into_momentum(mut self) -> SpinorField {
        if self.space == Space::Position {
            let mut work = Vec::new();
            for c in self.comps.iter_mut() {
                forward_plane(&self.grid, c, &mut work);
            }
            self.space = Space::Momentum;
        }
        self
    }

    pub fn into_position(mut self) -> SpinorField {
        if self.space == Space::Momentum {
            let mut work = Vec::new();
            for c in self.comps.iter_mut() {
                inverse_plane(&self.grid, c, &mut work);
            }
            self.space = Space::Position;
        }
        self
    }

    pub fn in_momentum(&self) -> SpinorField {
        self.clone().into_momentum()
    }

    pub fn in_position(&self) -> SpinorField {
        self.clone().into_position()
    }

    fn measure(&self) -> f64 {
        match self.space {
            Space::Position => self.grid.cell_volume(),
            Space::Momentum => 1.0 / self.grid.volume(),
        }
    }

    /// `h³ Σₓ ⟨u,u⟩` (or its Parseval equivalent in momentum space).
    pub fn charge(&self) -> f64 {
        let s: f64 = self
            .comps
            .iter()
            .map(|c| c.iter().map(|v| v.norm_sqr()).sum::<f64>())
            .sum();
        s * self.measure()
    }

    pub fn norm(&self) -> f64 {
        self.charge().sqrt()
    }

    /// `⟨self, other⟩_{L²}`, antilinear in `self`. Both operands must share a
    /// grid and representation.
    pub fn inner(&self, other: &SpinorField) -> Complex64 {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        assert_eq!(self.space, other.space, "representation mismatch");
        let mut acc = ZERO;
        for c in 0..4 {
            acc += self.comps[c]
                .iter()
                .zip(&other.comps[c])
                .map(|(a, b)| a.conj() * b)
                .sum::<Complex64>();
        }
        acc * self.measure()
    }

    pub fn scale(&mut self, factor: Complex64) {
        for c in self.comps.iter_mut() {
            c.iter_mut().for_each(|v| *v *= factor);
        }
    }

    pub fn scaled(&self, factor: Complex64) -> SpinorField {
        let mut out = self.clone();
        out.scale(factor);
        out
    }

    /// `self += factor * other`.
    pub fn add_scaled(&mut self, factor: Complex64, other: &SpinorField) {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        assert_eq!(self.space, other.space, "representation mismatch");
        for c in 0..4 {
            for (a, b) in self.comps[c].iter_mut().zip(&other.comps[c]) {
                *a += factor * b;
            }
        }
    }

    /// L² distance, computed in the representation of `self`.
    pub fn distance(&self, other: &SpinorField) -> f64 {
        let other = match self.space {
            Space::Position => other.in_position(),
            Space::Momentum => other.in_momentum(),
        };
        let mut diff = self.clone();
        diff.add_scaled(Complex64::new(-1.0, 0.0), &other);
        diff.norm()
    }

    /// Pointwise charge density `⟨u(x),u(x)⟩_{ℂ⁴}`.
    pub fn density(&self) -> ScalarField {
        let u = self.in_position();
        let mut data = vec![0.0; self.grid.len()];
        for c in &u.comps {
            for (d, v) in data.iter_mut().zip(c) {
                *d += v.norm_sqr();
            }
        }
        ScalarField { grid: self.grid, data }
    }

    /// Multiplies each position sample by the matching scalar.
    pub fn multiply_pointwise(&mut self, factors: &[Complex64]) {
        assert_eq!(self.space, Space::Position, "pointwise product needs position space");
        for c in self.comps.iter_mut() {
            for (v, f) in c.iter_mut().zip(factors) {
                *v *= f;
            }
        }
    }
}

/// Real scalar field (potentials, densities).
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    grid: GridSpec,
    data: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            data: vec![0.0; grid.len()],
        }
    }

    pub fn from_fn(grid: GridSpec, mut f: impl FnMut(Vec3) -> f64) -> Self {
        let mut data = vec![0.0; grid.len()];
        grid.for_each_position(|idx, x| data[idx] = f(x));
        Self { grid, data }
    }

    pub fn from_vec(grid: GridSpec, data: Vec<f64>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        Ok(Self { grid, data })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `h³ Σₓ f(x)`.
    pub fn integral(&self) -> f64 {
        self.data.iter().sum::<f64>() * self.grid.cell_volume()
    }

    pub fn add(&mut self, other: &ScalarField) {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        self.data.iter_mut().zip(&other.data).for_each(|(a, b)| *a += b);
    }
}

/// `(Σ_ξ m(|ξ|²) |û(ξ)|² / L³)^{1/2}` for a nonnegative multiplier `m`.
pub(crate) fn multiplier_norm(u: &SpinorField, multiplier: impl Fn(f64) -> f64) -> f64 {
    let uh = u.in_momentum();
    let k2 = u.grid().derivative_wavenumber_squared();
    let mut acc = 0.0;
    for c in uh.components() {
        for (v, k) in c.iter().zip(&k2) {
            acc += multiplier(*k) * v.norm_sqr();
        }
    }
    (acc / u.grid().volume()).sqrt()
}

fn check_sigma(sigma: f64) -> Result<()> {
    if !(0.0..=2.0).contains(&sigma) {
        return Err(Error::InvalidArgument(format!(
            "Sobolev index must lie in [0, 2], got {sigma}"
        )));
    }
    Ok(())
}

/// Inhomogeneous Sobolev norm with multiplier `(1 + |ξ|²)^{σ/2}`.
pub fn sobolev_norm(u: &SpinorField, sigma: f64) -> Result<f64> {
    check_sigma(sigma)?;
    if sigma == 0.0 {
        return Ok(u.norm());
    }
    Ok(multiplier_norm(u, |k2| (1.0 + k2).powf(sigma)))
}

/// Homogeneous Sobolev norm with multiplier `|ξ|^σ`; the zero mode is dropped.
pub fn homogeneous_sobolev_norm(u: &SpinorField, sigma: f64) -> Result<f64> {
    check_sigma(sigma)?;
    Ok(multiplier_norm(u, |k2| if k2 == 0.0 { 0.0 } else { k2.powf(sigma) }))
}

/// Spectral translation: returns `v` with `v(x) = u(x + d)`, exact for
/// band-limited data. Output is in the representation of the input.
pub fn translate(u: &SpinorField, d: Vec3) -> SpinorField {
    let space = u.space();
    let mut uh = u.in_momentum();
    let grid = *u.grid();
    let phases = translation_phases(&grid, d);
    for c in uh.components_mut().iter_mut() {
        c.iter_mut().zip(&phases).for_each(|(v, p)| *v *= p);
    }
    match space {
        Space::Position => uh.into_position(),
        Space::Momentum => uh,
    }
}

/// Per-mode factors `e^{iξ·d}`.
pub(crate) fn translation_phases(grid: &GridSpec, d: Vec3) -> Vec<Complex64> {
    let k = grid.axis_wavenumbers();
    let px: Vec<Complex64> = k.iter().map(|kx| Complex64::cis(kx * d.x)).collect();
    let py: Vec<Complex64> = k.iter().map(|ky| Complex64::cis(ky * d.y)).collect();
    let pz: Vec<Complex64> = k.iter().map(|kz| Complex64::cis(kz * d.z)).collect();
    let mut out = Vec::with_capacity(grid.len());
    for a in &px {
        for b in &py {
            let ab = a * b;
            for c in &pz {
                out.push(ab * c);
            }
        }
    }
    out
}

/// Gaussian wave packet `A·exp(-|x-c|²/(2w²) + i k·(x-c)) · w_spinor`,
/// evaluated with minimum-image distances.
pub fn gaussian_packet(
    grid: GridSpec,
    center: Vec3,
    width: f64,
    momentum: Vec3,
    spinor: Spinor,
) -> SpinorField {
    SpinorField::from_fn(grid, |x| {
        let d = grid.min_image(x - center);
        let amp = Complex64::from_polar((-d.norm_squared() / (2.0 * width * width)).exp(), momentum.dot(&d));
        spinor.map(|s| s * amp)
    })
}
