//! Property tests for the type and operation invariants.

use num_complex::Complex64;
use proptest::prelude::*;

use diracsim::analysis::{hardy_ratio, rellich_ratio};
use diracsim::dirac::{apply_free_dirac, dirac_matrices, Matrix4};
use diracsim::groundstate::GroundStateModel;
use diracsim::hartree::{hartree_potential, HartreeKernel};
use diracsim::lattice::{gaussian_packet, translate, GridSpec, Space, SpinorField, Vec3};
use diracsim::newton::{force_breakdown, internuclear_force};
use diracsim::potentials::{Nucleus, Trajectory};
use diracsim::propagator::{product_formula_evolve, PropagatorPlan};

const CRITICAL: f64 = 0.866_025_403_784_438_6;

fn spinor(a: f64, b: f64) -> [Complex64; 4] {
    [Complex64::new(1.0, 0.0), Complex64::new(0.0, a), Complex64::new(b, 0.0), Complex64::new(0.0, -0.2)]
}

fn vec3() -> impl Strategy<Value = Vec3> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64).prop_map(|(x, y, z)| Vec3::new(x, y, z))
}

fn packet(grid: GridSpec, center: Vec3, kick: Vec3, a: f64, b: f64) -> SpinorField {
    gaussian_packet(grid, center, 1.0, kick, spinor(a, b))
}

fn is_hermitian(m: &Matrix4) -> bool {
    (0..4).all(|i| (0..4).all(|j| m[i][j] == m[j][i].conj()))
}

#[test]
fn dirac_matrices_are_hermitian() {
    let m = dirac_matrices();
    assert!(m.alpha.iter().chain(std::iter::once(&m.beta)).all(is_hermitian));
}

#[test]
fn hartree_multiplier_invariants() {
    let kernel = HartreeKernel::new(GridSpec::new(16, 10.0).unwrap());
    let m = kernel.multiplier();
    assert_eq!(m[0], 0.0);
    assert!(m.iter().all(|v| v.is_finite() && *v >= 0.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn grid_accepts_only_powers_of_two(n in 1usize..300, l in 0.1f64..50.0) {
        let g = GridSpec::new(n, l);
        prop_assert_eq!(g.is_ok(), n >= 8 && n.is_power_of_two());
        if let Ok(g) = g {
            prop_assert_eq!(g.spacing(), l / n as f64);
            // Symmetric except the unpaired Nyquist entry.
            let k = g.axis_wavenumbers();
            let nyq = k.iter().cloned().fold(f64::INFINITY, f64::min);
            prop_assert!(!k.contains(&-nyq));
            prop_assert!(k.iter().filter(|v| **v != nyq).all(|v| k.contains(&-v)));
        }
    }

    #[test]
    fn nucleus_hypotheses(z in -1.5f64..1.5, m in -1.0f64..10.0) {
        let ok = Nucleus::new(z, m, Vec3::zeros(), Vec3::zeros()).is_ok();
        prop_assert_eq!(ok, z.abs() < CRITICAL && m > 0.0);
    }

    #[test]
    fn ground_state_parameters(nu in 0.001f64..0.866, a in 0.1f64..5.0) {
        let g = GroundStateModel::new(nu, Some(a)).unwrap();
        prop_assert!(g.b > 0.5 && g.b < 1.0 && g.a > 0.0);
        prop_assert!(g.radial(0.3).unwrap() > 0.0);
    }

    #[test]
    fn hartree_potential_even_under_reflection(c in vec3(), k in vec3()) {
        let grid = GridSpec::new(16, 10.0).unwrap();
        let u = packet(grid, c, k, 0.3, 0.1);
        let mirrored = packet(grid, -c, -k, 0.3, 0.1);
        let (v, w) = (hartree_potential(&u), hartree_potential(&mirrored));
        let n = grid.n();
        let reflect = |i: usize| (n - i) % n;
        let mut worst: f64 = 0.0;
        for idx in 0..grid.len() {
            let (x, y, z) = grid.unflatten(idx);
            let j = grid.index(reflect(x), reflect(y), reflect(z));
            worst = worst.max((v.data()[idx] - w.data()[j]).abs());
        }
        prop_assert!(worst < 1e-10 * v.max_abs());
    }

    #[test]
    fn grid_translation_equivariance(shift in (-3i32..3, -3i32..3, -3i32..3), c in vec3(), k in vec3()) {
        let grid = GridSpec::new(16, 10.0).unwrap();
        let h = grid.spacing();
        let d = Vec3::new(shift.0 as f64, shift.1 as f64, shift.2 as f64) * h;
        let u = packet(grid, c, k, 0.5, -0.4);
        let moved = translate(&u, d);
        // Both the free Dirac operator and the Hartree map commute with shifts.
        let a = translate(&apply_free_dirac(&u), d);
        let b = apply_free_dirac(&moved);
        prop_assert!(a.distance(&b) < 1e-10 * a.norm());
        let va = hartree_potential(&moved);
        let vb = hartree_potential(&u);
        // `translate` gives u(x + d), so its potential at x is V[u](x + d).
        let wrap = |v: f64| ((v / h).round() as i64).rem_euclid(grid.n() as i64) as usize;
        let mut worst: f64 = 0.0;
        for idx in 0..grid.len() {
            let x = grid.position(idx) + d;
            let j = grid.index(wrap(x[0]), wrap(x[1]), wrap(x[2]));
            worst = worst.max((va.data()[idx] - vb.data()[j]).abs());
        }
        prop_assert!(worst < 1e-10 * vb.max_abs());
    }

    #[test]
    fn internuclear_action_reaction(qs in prop::collection::vec(vec3(), 2..5), zs in prop::collection::vec(0.1f64..0.8, 5)) {
        let positions: Vec<Vec3> = qs.iter().enumerate().map(|(i, q)| q + Vec3::new(3.0 * i as f64, 0.0, 0.0)).collect();
        let charges = &zs[..positions.len()];
        let f = internuclear_force(charges, &positions).unwrap();
        let sum: Vec3 = f.iter().sum();
        prop_assert!(sum.norm() < 1e-12);
    }

    #[test]
    fn force_breakdown_sums_exactly(c in vec3(), q in vec3()) {
        let grid = GridSpec::new(16, 10.0).unwrap();
        let rho = packet(grid, c, Vec3::zeros(), 0.2, 0.0).density();
        let nuclei = [
            Nucleus::new(0.5, 1.0, q, Vec3::zeros()).unwrap(),
            Nucleus::new(0.3, 1.0, q + Vec3::new(2.5, 0.0, 0.0), Vec3::zeros()).unwrap(),
        ];
        let f = force_breakdown(0.0, &rho, &nuclei, 2.0 * grid.spacing()).unwrap();
        for k in 0..2 {
            prop_assert_eq!(f.total[k], f.field[k] + f.internuclear[k]);
        }
    }

    #[test]
    fn inequality_ratios_finite_nonnegative(c in vec3(), k in vec3(), sigma in 0.0f64..1.49) {
        let grid = GridSpec::new(16, 10.0).unwrap();
        let u = packet(grid, c, k, 0.1, 0.2);
        let r = hardy_ratio(&u, sigma).unwrap();
        prop_assert!(r.is_finite() && r >= 0.0);
        let zero = SpinorField::zeros(grid, Space::Position);
        prop_assert_eq!(hardy_ratio(&zero, sigma).unwrap(), 0.0);
        let rel = rellich_ratio(&u).unwrap();
        prop_assert!(rel.ratio.is_finite() && rel.ratio >= 0.0);
    }

    #[test]
    fn product_formula_preserves_charge(
        z in 0.0f64..0.85,
        v in vec3(),
        n_slices in 1usize..6,
        substeps in 1usize..3,
        t in 0.1f64..1.0,
    ) {
        let grid = GridSpec::new(16, 10.0).unwrap();
        let u = packet(grid, Vec3::zeros(), Vec3::new(0.3, 0.0, 0.0), 0.4, 0.1);
        let n = [Nucleus::new(z, 50.0, Vec3::zeros(), v * 0.2).unwrap()];
        let traj = Trajectory::ballistic(&n, 0.0, 1.0, 16).unwrap();
        let plan = PropagatorPlan { n_slices, substeps, ..Default::default() };
        let out = product_formula_evolve(&u, 0.0, t, &traj, &plan).unwrap();
        prop_assert!(out.is_finite());
        prop_assert!(((out.charge() - u.charge()) / u.charge()).abs() < 1e-12);
    }

    #[test]
    fn plan_rejects_empty_slicing(n_slices in 0usize..3, substeps in 0usize..3) {
        let plan = PropagatorPlan { n_slices, substeps, ..Default::default() };
        prop_assert_eq!(plan.validate().is_ok(), n_slices >= 1 && substeps >= 1);
    }
}
