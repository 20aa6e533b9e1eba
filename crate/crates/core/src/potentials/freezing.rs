use std::f64::consts::PI;

use nalgebra::Matrix3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{CutoffProfile, Trajectory};
use crate::error::{Error, Result};
use crate::lattice::{
    forward_plane, inverse_plane, sobolev_norm, translation_phases, GridSpec, ScalarField, Space, SpinorField, Vec3,
};

/// Radial samples per unit of `r/ε₀` used for the sampled Jacobian sup.
const JACOBIAN_SAMPLES: usize = 20_001;
const MAX_NODES: usize = 128;

/// Multi-center change of variables
/// `φ(t, x) = x + Σₖ ζ(|x - aₖ|/ε₀) (qₖ(t) - aₖ)`.
///
/// Distances to the anchors use the minimum-image convention of the grid
/// the map is applied on.
#[derive(Clone, Debug)]
pub struct FreezingMap {
    anchors: Vec<Vec3>,
    eps0: f64,
    trajectory: Trajectory,
    cutoff: CutoffProfile,
}

/// `Φ(t)u = u∘φ(t)` together with its per-call diagnostics.
#[derive(Clone, Debug)]
pub struct Pullback {
    pub field: SpinorField,
    /// `‖Φ(t)u‖ / ‖u‖`.
    pub norm_ratio: f64,
    /// The ratio must lie in `[1/C, C]`.
    pub norm_constant: f64,
    pub jacobian_bound: f64,
    /// Chebyshev nodes in the displacement parameter.
    pub nodes: usize,
    /// Relative L² difference against a pullback with twice the nodes.
    pub interpolation_error: Option<f64>,
}

/// Sampled residual potential `R(t, ·)` on a grid.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResidualPotential {
    pub sup: f64,
    /// Largest `|R|` at grid points within `ε₀` of some anchor.
    pub sup_inside_balls: f64,
    /// Reference scale `3 Σ|Zₖ| / ε₀`.
    pub reference: f64,
    pub within_reference: bool,
}

/// `‖∇(Φu) - (∇u)∘φ‖` against `b ‖u‖_{H¹}`, `b` the Jacobian bound.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct GradientDecomposition {
    pub lhs: f64,
    pub rhs: f64,
    pub jacobian_bound: f64,
    pub holds: bool,
}

impl FreezingMap {
    pub fn new(anchors: Vec<Vec3>, eps0: f64, trajectory: Trajectory) -> Result<Self> {
        if !(eps0 > 0.0 && eps0.is_finite()) {
            return Err(Error::InvalidArgument(format!("eps0 must be positive, got {eps0}")));
        }
        if anchors.len() != trajectory.nuclei_count() {
            return Err(Error::InvalidArgument("one anchor per nucleus is required".into()));
        }
        for k in 0..anchors.len() {
            for l in k + 1..anchors.len() {
                let d = (anchors[k] - anchors[l]).norm();
                if d < 4.0 * eps0 {
                    return Err(Error::Admissibility(format!(
                        "cutoff supports overlap: anchors {k},{l} are {d:.6e} apart, below 4 eps0 = {:.6e}",
                        4.0 * eps0
                    )));
                }
            }
        }
        Ok(Self { anchors, eps0, trajectory, cutoff: CutoffProfile::new() })
    }

    /// Anchors at the initial nuclear positions.
    pub fn from_trajectory(trajectory: Trajectory, eps0: f64) -> Result<Self> {
        let anchors = (0..trajectory.nuclei_count()).map(|k| trajectory.sample_position(k, 0)).collect();
        Self::new(anchors, eps0, trajectory)
    }

    pub fn anchors(&self) -> &[Vec3] {
        &self.anchors
    }

    pub fn eps0(&self) -> f64 {
        self.eps0
    }

    pub fn trajectory(&self) -> &Trajectory {
        &self.trajectory
    }

    pub fn cutoff(&self) -> &CutoffProfile {
        &self.cutoff
    }

    /// `qₖ(t) - aₖ`.
    pub fn displacements(&self, t: f64) -> Vec<Vec3> {
        self.anchors.iter().enumerate().map(|(k, a)| self.trajectory.position(k, t) - a).collect()
    }

    fn offset(&self, grid: Option<&GridSpec>, x: Vec3, a: Vec3) -> Vec3 {
        match grid {
            Some(g) => g.min_image(x - a),
            None => x - a,
        }
    }

    fn apply_with(&self, grid: Option<&GridSpec>, d: &[Vec3], x: Vec3) -> Vec3 {
        let mut y = x;
        for (a, dk) in self.anchors.iter().zip(d) {
            let r = self.offset(grid, x, *a).norm() / self.eps0;
            if r < 2.0 {
                y += dk * self.cutoff.value(r);
            }
        }
        y
    }

    /// `φ(t, x)` in free space.
    pub fn apply(&self, t: f64, x: Vec3) -> Vec3 {
        self.apply_with(None, &self.displacements(t), x)
    }

    /// `φ(t, x)` with torus distances on `grid`.
    pub fn apply_on(&self, grid: &GridSpec, t: f64, x: Vec3) -> Vec3 {
        self.apply_with(Some(grid), &self.displacements(t), x)
    }

    /// Analytic `Jac φ(t, x)`, entry `(i, j) = ∂ⱼ φᵢ`.
    pub fn jacobian(&self, t: f64, x: Vec3) -> Matrix3<f64> {
        let d = self.displacements(t);
        let mut jac = Matrix3::identity();
        for (a, dk) in self.anchors.iter().zip(&d) {
            let off = x - a;
            let r = off.norm();
            if r > 0.0 && r < 2.0 * self.eps0 {
                let slope = self.cutoff.derivative(r / self.eps0) / self.eps0;
                jac += dk * (off / r).transpose() * slope;
            }
        }
        jac
    }

    /// Sampled `sup_x ‖Jac φ(t, x) - I‖` (spectral norm).
    ///
    /// Supports are disjoint, and inside the `k`-th one `Jac - I` is the
    /// rank-one matrix `ζ'(r/ε₀)/ε₀ · dₖ ⊗ x̂`, so the sup over `x` reduces to
    /// a radial sup of `|ζ'|`.
    pub fn jacobian_bound(&self, t: f64) -> f64 {
        let slope = self.cutoff.sampled_max_slope(3 * JACOBIAN_SAMPLES);
        self.displacements(t).iter().map(|d| slope * d.norm() / self.eps0).fold(0.0, f64::max)
    }

    /// `(3/2) maxₖ |qₖ(t) - aₖ| / ε₀`.
    pub fn analytic_bound(&self, t: f64) -> f64 {
        self.displacements(t).iter().map(|d| 1.5 * d.norm() / self.eps0).fold(0.0, f64::max)
    }

    /// The map is a bijection while the Jacobian bound stays below 1.
    pub fn is_bijective(&self, t: f64) -> bool {
        self.jacobian_bound(t) < 1.0
    }

    fn chebyshev_nodes(grid: &GridSpec, d: &[Vec3]) -> usize {
        let kmax = PI / grid.spacing();
        let omega = d.iter().map(|v| kmax * v.abs().sum()).fold(0.0, f64::max);
        ((0.75 * omega).ceil() as usize + 12).min(MAX_NODES)
    }

    /// Pulls back position-space planes through `φ(t)` with `m + 1`
    /// Chebyshev–Lobatto nodes in the displacement parameter.
    ///
    /// Inside the support of the `k`-th cutoff `u(φ(x)) = u(x + s dₖ)` with
    /// `s = ζ(|x - aₖ|/ε₀) ∈ [0, 1]`. The translates `u(· + sⱼ dₖ)` are exact
    /// spectral shifts; their values are interpolated in `s` barycentrically.
    fn pull_planes(&self, grid: &GridSpec, d: &[Vec3], planes: &[Vec<Complex64>], m: usize) -> Vec<Vec<Complex64>> {
        let mut out: Vec<Vec<Complex64>> = planes.to_vec();
        let nodes: Vec<f64> = (0..=m).map(|j| 0.5 * (1.0 - (PI * j as f64 / m as f64).cos())).collect();
        let weights: Vec<f64> = (0..=m)
            .map(|j| {
                let w = if j % 2 == 0 { 1.0 } else { -1.0 };
                if j == 0 || j == m {
                    0.5 * w
                } else {
                    w
                }
            })
            .collect();
        let mut work = Vec::new();
        let spectra: Vec<Vec<Complex64>> = planes
            .iter()
            .map(|p| {
                let mut h = p.clone();
                forward_plane(grid, &mut h, &mut work);
                h
            })
            .collect();
        for (a, dk) in self.anchors.iter().zip(d) {
            if dk.norm() == 0.0 {
                continue;
            }
            let mut points = Vec::new();
            grid.for_each_position(|idx, x| {
                let r = grid.min_image(x - a).norm() / self.eps0;
                if r < 2.0 {
                    points.push((idx, self.cutoff.value(r)));
                }
            });
            if points.is_empty() {
                continue;
            }
            // Barycentric coefficients per point, or an exact node hit.
            let coeffs: Vec<Result<usize, Vec<f64>>> = points
                .iter()
                .map(|&(_, s)| {
                    if let Some(j) = nodes.iter().position(|sj| (s - sj).abs() < 1e-15) {
                        return Ok(j);
                    }
                    let raw: Vec<f64> = nodes.iter().zip(&weights).map(|(sj, w)| w / (s - sj)).collect();
                    let total: f64 = raw.iter().sum();
                    Err(raw.into_iter().map(|c| c / total).collect())
                })
                .collect();
            for (plane, spectrum) in out.iter_mut().zip(&spectra) {
                let mut acc = vec![Complex64::new(0.0, 0.0); points.len()];
                let mut buf = Vec::with_capacity(grid.len());
                for (j, sj) in nodes.iter().enumerate() {
                    let phases = translation_phases(grid, dk * *sj);
                    buf.clear();
                    buf.extend(spectrum.iter().zip(&phases).map(|(v, p)| v * p));
                    inverse_plane(grid, &mut buf, &mut work);
                    for ((acc, &(idx, _)), c) in acc.iter_mut().zip(&points).zip(&coeffs) {
                        match c {
                            Ok(hit) if *hit == j => *acc = buf[idx],
                            Ok(_) => {}
                            Err(w) => *acc += buf[idx] * w[j],
                        }
                    }
                }
                for (&(idx, _), v) in points.iter().zip(acc) {
                    plane[idx] = v;
                }
            }
        }
        out
    }

    fn pullback_inner(&self, t: f64, u: &SpinorField, nodes: usize) -> Result<(SpinorField, f64)> {
        if !u.is_finite() {
            return Err(Error::NonFinite("pullback input"));
        }
        let bound = self.jacobian_bound(t);
        if bound >= 1.0 {
            return Err(Error::Admissibility(format!(
                "freezing map is not a bijection at t = {t}: Jacobian bound {bound:.6} >= 1"
            )));
        }
        let grid = *u.grid();
        let d = self.displacements(t);
        let pos = u.in_position();
        let planes = pos.components().to_vec();
        let pulled = self.pull_planes(&grid, &d, &planes, nodes);
        let comps: [Vec<Complex64>; 4] = pulled.try_into().expect("four components");
        let mut field = SpinorField::from_components(grid, Space::Position, comps)?;
        if !field.is_finite() {
            return Err(Error::NonFinite("pullback output"));
        }
        if u.space() == Space::Momentum {
            field = field.into_momentum();
        }
        Ok((field, bound))
    }

    /// `Φ(t)u = u∘φ(t)` with the L² equivalence `‖Φu‖/‖u‖ ∈ [1/C, C]`,
    /// `C = (1 - b)^{-3/2}`, checked on every call.
    pub fn pullback(&self, t: f64, u: &SpinorField) -> Result<Pullback> {
        let nodes = Self::chebyshev_nodes(u.grid(), &self.displacements(t));
        self.finish_pullback(t, u, nodes, None)
    }

    /// [`FreezingMap::pullback`] plus an interpolation-error estimate
    /// against twice as many nodes.
    pub fn pullback_checked(&self, t: f64, u: &SpinorField) -> Result<Pullback> {
        let nodes = Self::chebyshev_nodes(u.grid(), &self.displacements(t));
        let (fine, _) = self.pullback_inner(t, u, 2 * nodes)?;
        self.finish_pullback(t, u, nodes, Some(fine))
    }

    fn finish_pullback(&self, t: f64, u: &SpinorField, nodes: usize, fine: Option<SpinorField>) -> Result<Pullback> {
        let (field, bound) = self.pullback_inner(t, u, nodes)?;
        let base = u.norm();
        let norm_ratio = if base == 0.0 { 1.0 } else { field.norm() / base };
        let norm_constant = (1.0 - bound).powf(-1.5);
        if !(norm_ratio <= norm_constant && norm_ratio >= 1.0 / norm_constant) {
            return Err(Error::Admissibility(format!(
                "pullback norm ratio {norm_ratio:.6} outside [1/C, C] with C = {norm_constant:.6}"
            )));
        }
        let interpolation_error = fine.map(|f| if base == 0.0 { 0.0 } else { field.distance(&f) / base });
        Ok(Pullback { field, norm_ratio, norm_constant, jacobian_bound: bound, nodes, interpolation_error })
    }

    /// `R(t, x) = Σₖ Zₖ (1/|x - aₖ| - 1/|φ(t, x) - qₖ(t)|)`, torus distances.
    pub fn residual_value(&self, grid: &GridSpec, t: f64, x: Vec3) -> f64 {
        let d = self.displacements(t);
        let y = self.apply_with(Some(grid), &d, x);
        let mut acc = 0.0;
        for (k, a) in self.anchors.iter().enumerate() {
            let z = self.trajectory.charges()[k];
            if z == 0.0 {
                continue;
            }
            let q = a + d[k];
            acc += z * (1.0 / grid.min_image(x - a).norm() - 1.0 / grid.min_image(y - q).norm());
        }
        acc
    }

    /// Grid samples of `R(t, ·)`. Points where both distances vanish (exact
    /// cancellation at an anchor) contribute zero.
    pub fn residual_field(&self, grid: &GridSpec, t: f64) -> ScalarField {
        let d = self.displacements(t);
        let charges = self.trajectory.charges();
        ScalarField::from_fn(*grid, |x| {
            let y = self.apply_with(Some(grid), &d, x);
            let mut acc = 0.0;
            for (k, a) in self.anchors.iter().enumerate() {
                if charges[k] == 0.0 {
                    continue;
                }
                let r1 = grid.min_image(x - a).norm();
                let r2 = grid.min_image(y - a - d[k]).norm();
                if (r1 - r2).abs() <= 1e-12 * r1.max(r2) || (r1 == 0.0 && r2 == 0.0) {
                    continue;
                }
                acc += charges[k] * (1.0 / r1 - 1.0 / r2);
            }
            acc
        })
    }

    pub fn residual_potential(&self, grid: &GridSpec, t: f64) -> ResidualPotential {
        let field = self.residual_field(grid, t);
        let mut sup_inside_balls = 0.0f64;
        grid.for_each_position(|idx, x| {
            if self.anchors.iter().any(|a| grid.min_image(x - a).norm() < self.eps0) {
                sup_inside_balls = sup_inside_balls.max(field.data()[idx].abs());
            }
        });
        let sup = field.max_abs();
        let reference = 3.0 * self.trajectory.charges().iter().map(|z| z.abs()).sum::<f64>() / self.eps0;
        ResidualPotential { sup, sup_inside_balls, reference, within_reference: sup <= reference + 1e-6 }
    }

    /// Checks `‖∇(Φu) - (∇u)∘φ‖ ≤ b ‖u‖_{H¹}` with spectral derivatives.
    pub fn gradient_decomposition(&self, t: f64, u: &SpinorField) -> Result<GradientDecomposition> {
        let grid = *u.grid();
        let d = self.displacements(t);
        let nodes = Self::chebyshev_nodes(&grid, &d);
        let pulled = self.pullback_inner(t, u, nodes)?.0.into_momentum();
        let uh = u.in_momentum();
        let bound = self.jacobian_bound(t);
        let mut work = Vec::new();
        let mut acc = 0.0;
        for axis in 0..3 {
            let grads: Vec<Vec<Complex64>> = uh
                .components()
                .iter()
                .map(|c| spectral_derivative(&grid, c, axis, &mut work))
                .collect();
            let pulled_grads = self.pull_planes(&grid, &d, &grads, nodes);
            for (c, g) in pulled.components().iter().zip(&pulled_grads) {
                let lhs = spectral_derivative(&grid, c, axis, &mut work);
                acc += lhs.iter().zip(g).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>();
            }
        }
        let lhs = (acc * grid.cell_volume()).sqrt();
        let rhs = bound * sobolev_norm(u, 1.0)?;
        Ok(GradientDecomposition { lhs, rhs, jacobian_bound: bound, holds: lhs <= rhs })
    }
}

/// Position-space samples of `∂_axis u` from a momentum-space plane.
fn spectral_derivative(grid: &GridSpec, spectrum: &[Complex64], axis: usize, work: &mut Vec<Complex64>) -> Vec<Complex64> {
    let mut out: Vec<Complex64> = Vec::with_capacity(grid.len());
    grid.for_each_derivative_mode(|idx, xi| out.push(spectrum[idx] * Complex64::new(0.0, xi[axis])));
    inverse_plane(grid, &mut out, work);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{gaussian_packet, translate};
    use crate::potentials::Nucleus;

    fn single(v: Vec3, z: f64) -> Trajectory {
        let n = [Nucleus::new(z, 50.0, Vec3::zeros(), v).unwrap()];
        Trajectory::ballistic(&n, 0.0, 1.0, 8).unwrap()
    }

    fn spinor() -> [Complex64; 4] {
        [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.5), Complex64::new(0.2, 0.0), Complex64::new(0.0, 0.0)]
    }

    #[test]
    fn identity_cases() {
        let map = FreezingMap::from_trajectory(single(Vec3::new(0.3, 0.0, 0.0), 0.5), 1.0).unwrap();
        let x = Vec3::new(0.4, 0.5, -0.2);
        assert_eq!(map.apply(0.0, x), x);
        assert_eq!(map.jacobian_bound(0.0), 0.0);
        let far = Vec3::new(2.5, 0.0, 0.0);
        assert_eq!(map.apply(1.0, far), far);
        let near = Vec3::new(0.2, -0.3, 0.1);
        assert!((map.apply(1.0, near) - (near + Vec3::new(0.3, 0.0, 0.0))).norm() < 1e-15);
    }

    #[test]
    fn overlapping_supports_rejected() {
        let n = [
            Nucleus::new(0.5, 1.0, Vec3::zeros(), Vec3::zeros()).unwrap(),
            Nucleus::new(0.5, 1.0, Vec3::new(3.0, 0.0, 0.0), Vec3::zeros()).unwrap(),
        ];
        let tr = Trajectory::ballistic(&n, 0.0, 1.0, 2).unwrap();
        assert!(FreezingMap::from_trajectory(tr.clone(), 1.0).is_err());
        assert!(FreezingMap::from_trajectory(tr, 0.75).is_ok());
    }

    #[test]
    fn jacobian_bound_matches_sampled_matrices() {
        let delta = 0.4;
        let map = FreezingMap::from_trajectory(single(Vec3::new(delta, 0.2, 0.0), 0.5), 1.0).unwrap();
        let b = map.jacobian_bound(1.0);
        let analytic = map.analytic_bound(1.0);
        assert!(b <= analytic + 1e-6);
        assert!(b > 0.999 * analytic);
        // Direct sampling of the full 3×3 Jacobian never exceeds the radial sup.
        let mut sampled = 0.0f64;
        for i in 0..40 {
            for j in 0..40 {
                let r = 1.0 + i as f64 / 39.0;
                let th = PI * j as f64 / 39.0;
                let x = Vec3::new(r * th.cos(), r * th.sin(), 0.1);
                let m = map.jacobian(1.0, x) - Matrix3::identity();
                sampled = sampled.max(m.singular_values().max());
            }
        }
        assert!(sampled <= b + 1e-9);
        assert!(sampled > 0.8 * b);
    }

    #[test]
    fn jacobian_agrees_with_finite_differences() {
        let map = FreezingMap::from_trajectory(single(Vec3::new(0.3, -0.1, 0.2), 0.5), 1.0).unwrap();
        let x = Vec3::new(1.2, 0.4, -0.5);
        let jac = map.jacobian(1.0, x);
        let h = 1e-6;
        for j in 0..3 {
            let mut e = Vec3::zeros();
            e[j] = h;
            let col = (map.apply(1.0, x + e) - map.apply(1.0, x - e)) / (2.0 * h);
            for i in 0..3 {
                assert!((col[i] - jac[(i, j)]).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn large_displacement_flagged() {
        let map = FreezingMap::from_trajectory(single(Vec3::new(0.8, 0.0, 0.0), 0.5), 1.0).unwrap();
        assert!(!map.is_bijective(1.0));
        let g = GridSpec::new(16, 8.0).unwrap();
        let u = gaussian_packet(g, Vec3::zeros(), 0.5, Vec3::zeros(), spinor());
        assert!(matches!(map.pullback(1.0, &u), Err(Error::Admissibility(_))));
    }

    #[test]
    fn plateau_pullback_is_spectral_translate() {
        let g = GridSpec::new(32, 12.0).unwrap();
        let d = Vec3::new(0.3, -0.15, 0.1);
        let map = FreezingMap::from_trajectory(single(d, 0.5), 3.0).unwrap();
        let u = gaussian_packet(g, Vec3::zeros(), 0.5, Vec3::zeros(), spinor());
        let pb = map.pullback_checked(1.0, &u).unwrap();
        let exact = translate(&u, d);
        let rel = pb.field.distance(&exact) / u.norm();
        assert!(rel < 1e-4, "rel {rel}");
        assert!(pb.interpolation_error.unwrap() < 1e-6);
    }

    #[test]
    fn identity_map_leaves_field_unchanged() {
        let g = GridSpec::new(16, 8.0).unwrap();
        let map = FreezingMap::from_trajectory(single(Vec3::new(0.3, 0.0, 0.0), 0.5), 1.0).unwrap();
        let u = gaussian_packet(g, Vec3::new(0.5, 0.0, 0.0), 0.8, Vec3::new(0.5, 0.0, 0.0), spinor());
        let pb = map.pullback(0.0, &u).unwrap();
        assert_eq!(pb.field, u);
        assert_eq!(pb.norm_ratio, 1.0);
    }

    #[test]
    fn transition_region_pullback_matches_pointwise_map() {
        // A band-limited plane wave can be evaluated exactly at φ(x).
        let g = GridSpec::new(16, 8.0).unwrap();
        let k = Vec3::new(2.0 * PI / 8.0, 0.0, 4.0 * PI / 8.0);
        let u = SpinorField::from_fn(g, |x| spinor().map(|s| s * Complex64::cis(k.dot(&x))));
        let map = FreezingMap::from_trajectory(single(Vec3::new(0.5, 0.3, 0.0), 0.5), 1.5).unwrap();
        let pb = map.pullback(1.0, &u).unwrap();
        let mut worst = 0.0f64;
        g.for_each_position(|idx, x| {
            let y = map.apply_on(&g, 1.0, x);
            let exact = Complex64::cis(k.dot(&y));
            worst = worst.max((pb.field.components()[0][idx] - exact).norm());
        });
        assert!(worst < 1e-10, "worst {worst}");
        // Exact L² ratio squared is ∫ 1/det, inside [1/(1+b), 1/(1-b)].
        let b = pb.jacobian_bound;
        assert!(pb.norm_ratio >= (1.0 + b).powf(-0.5) - 1e-3 && pb.norm_ratio <= (1.0 - b).powf(-0.5) + 1e-3);
    }

    #[test]
    fn residual_vanishes_on_plateau_and_stays_bounded() {
        let g = GridSpec::new(32, 12.0).unwrap();
        let map = FreezingMap::from_trajectory(single(Vec3::new(0.3, 0.2, 0.0), 0.6), 1.5).unwrap();
        let r = map.residual_potential(&g, 1.0);
        assert!(r.sup_inside_balls < 1e-9, "inside {}", r.sup_inside_balls);
        assert!(r.within_reference && r.sup > 0.0);
        assert_eq!(map.residual_potential(&g, 0.0).sup, 0.0);
    }

    #[test]
    fn gradient_decomposition_bound() {
        let g = GridSpec::new(32, 12.0).unwrap();
        let map = FreezingMap::from_trajectory(single(Vec3::new(0.3, 0.0, 0.1), 0.5), 2.0).unwrap();
        let u = gaussian_packet(g, Vec3::new(2.5, 0.0, 0.0), 0.8, Vec3::zeros(), spinor());
        let gd = map.gradient_decomposition(1.0, &u).unwrap();
        assert!(gd.lhs > 0.0);
        assert!(gd.holds, "{gd:?}");
    }
}
