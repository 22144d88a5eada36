use faddeev_core::geometry::{build_k_3d, lambda_to_k, ComplexMomentum, Energy, LambdaCoord, RealLimitMomentum};
use faddeev_core::green::{eval_G, eval_G_gamma, eval_G_plus};
use faddeev_core::solver::{Momentum, PointSource, PotentialConfig, Regime, ScatteringKind, Solver};
use faddeev_core::{Complex64, FaddeevError, QuadratureSpec};
use proptest::prelude::*;
use std::f64::consts::PI;

fn cfg(dim: usize, e: f64, pts: &[(&[f64], f64)]) -> PotentialConfig {
    let points = pts
        .iter()
        .map(|(z, a)| PointSource {
            z: z.to_vec(),
            alpha: *a,
        })
        .collect();
    PotentialConfig::new(dim, e, points).unwrap()
}

fn k3(e: f64, beta: f64) -> ComplexMomentum {
    build_k_3d(Energy::new(e).unwrap(), &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], beta).unwrap()
}

fn k2(lam: Complex64, e: f64) -> ComplexMomentum {
    lambda_to_k(LambdaCoord::new(lam).unwrap(), Energy::new(e).unwrap()).unwrap()
}

fn solver() -> Solver {
    Solver::new(QuadratureSpec::tight())
}

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + b.norm())
}

#[test]
fn single_point_three_dimensions() {
    let c = cfg(3, 4.0, &[(&[0.3, -0.2, 0.5], 5.0)]);
    let k = Momentum::Complex(k3(4.0, 1.3));
    let s = solver();
    let sys = s.assemble_system(&c, &k).unwrap();
    assert!(close(
        sys.matrix.get(0, 0),
        Complex64::new(0.2 - 1.3 / (4.0 * PI), 0.0),
        1e-15
    ));
    assert!(close(sys.rhs[0], k.plane_wave(&[0.3, -0.2, 0.5]), 1e-15));
    let sol = s.solve_coefficients(&c, &k).unwrap();
    let want = 5.0 / (1.0 - 5.0 * 1.3 / (4.0 * PI));
    assert!(close(sol.gauge[0], Complex64::new(want, 0.0), 1e-13));
    let det = s.det_a(&c, &k).unwrap();
    assert!(close(det.value, Complex64::new(0.2 - 1.3 / (4.0 * PI), 0.0), 1e-15));
}

#[test]
fn single_point_at_diagonal_zero_is_singular() {
    let c = cfg(3, 4.0, &[(&[0.0, 0.0, 0.0], 5.0)]);
    let k = Momentum::Complex(k3(4.0, 4.0 * PI / 5.0));
    match solver().solve_coefficients(&c, &k) {
        Err(FaddeevError::SpectralSingularity { .. }) => {}
        other => panic!("expected a spectral singularity, got {other:?}"),
    }
}

#[test]
fn two_points_match_cramer_rule() {
    let spec = QuadratureSpec::tight();
    let z1 = [0.1, 0.4, -0.3];
    let z2 = [-0.5, 0.2, 0.6];
    let (a1, a2) = (3.0, -2.0);
    let c = cfg(3, 4.0, &[(&z1, a1), (&z2, a2)]);
    let kc = k3(4.0, 1.1);
    let k = Momentum::Complex(kc);
    let d12 = [z1[0] - z2[0], z1[1] - z2[1], z1[2] - z2[2]];
    let d21 = [-d12[0], -d12[1], -d12[2]];
    let g12 = eval_G(&d12, &kc, &spec).unwrap().value;
    let g21 = eval_G(&d21, &kc, &spec).unwrap().value;
    let diag = |a: f64| Complex64::new(1.0 / a - 1.1 / (4.0 * PI), 0.0);
    let det = diag(a1) * diag(a2) - g12 * g21;
    let (b1, b2) = (kc.plane_wave(&z1), kc.plane_wave(&z2));
    let c1 = (b1 * diag(a2) + g12 * b2) / det;
    let c2 = (diag(a1) * b2 + g21 * b1) / det;

    let s = solver();
    let sol = s.solve_coefficients(&c, &k).unwrap();
    assert!(close(sol.det, det, 1e-12));
    assert!(close(sol.coefficients[0], c1, 1e-11));
    assert!(close(sol.coefficients[1], c2, 1e-11));
    assert!(sol.residual <= 1e-10 * b1.norm().max(b2.norm()));
    assert_eq!(sol.regime, Regime::Complex);
}

#[test]
fn outgoing_diagonals() {
    let c = cfg(2, 4.0, &[(&[0.0, 0.0], 2.0)]);
    let k = Momentum::plus(2, &[0.0, 2.0]).unwrap();
    let sys = solver().assemble_system(&c, &k).unwrap();
    let want = 0.5 + Complex64::new(-2.0 * 2f64.ln(), PI) / (4.0 * PI);
    assert!(close(sys.matrix.get(0, 0), want, 1e-15));

    let c = cfg(3, 4.0, &[(&[0.0, 0.0, 0.0], 2.0)]);
    let k = Momentum::plus(3, &[0.0, 2.0, 0.0]).unwrap();
    let sys = solver().assemble_system(&c, &k).unwrap();
    assert!(close(
        sys.matrix.get(0, 0),
        Complex64::new(0.5, 2.0 / (4.0 * PI)),
        1e-15
    ));

    let g = RealLimitMomentum::new(2, &[2.0, 0.0], &[0.0, 1.0]).unwrap();
    let c = cfg(2, 4.0, &[(&[0.0, 0.0], 2.0)]);
    let sys = solver().assemble_system(&c, &Momentum::Gamma(g)).unwrap();
    assert!(close(
        sys.matrix.get(0, 0),
        Complex64::new(0.5 - 2f64.ln() / (2.0 * PI), 0.0),
        1e-15
    ));
}

#[test]
fn outgoing_three_dimensions_closed_form() {
    // Two points: every entry is elementary, so Cramer's rule gives an exact reference.
    let spec = QuadratureSpec::tight();
    let z1 = [0.0, 0.0, 0.0];
    let z2 = [0.7, 0.0, 0.0];
    let c = cfg(3, 4.0, &[(&z1, 4.0), (&z2, 6.0)]);
    let kv = [0.0, 0.0, 2.0];
    let k = Momentum::plus(3, &kv).unwrap();
    let g = eval_G_plus(&[0.7, 0.0, 0.0], &kv, &spec).unwrap().value;
    let r = 0.7f64;
    assert!(close(g, -Complex64::from_polar(1.0, 2.0 * r) / (4.0 * PI * r), 1e-15));
    let d1 = Complex64::new(0.25, 2.0 / (4.0 * PI));
    let d2 = Complex64::new(1.0 / 6.0, 2.0 / (4.0 * PI));
    let det = d1 * d2 - g * g;
    let sol = solver().solve_coefficients(&c, &k).unwrap();
    assert!(close(sol.det, det, 1e-14));
    let c1 = (d2 + g) / det;
    assert!(close(sol.coefficients[0], c1, 1e-13));
}

#[test]
fn inert_points_give_plane_waves() {
    let c = cfg(3, 4.0, &[(&[0.0, 0.0, 0.0], 0.0), (&[1.0, 0.0, 0.0], 0.0)]);
    let kc = k3(4.0, 0.8);
    let k = Momentum::Complex(kc);
    let s = solver();
    let x = [0.2, 0.3, -0.1];
    let p = s.eval_psi(&c, &x, &k).unwrap();
    assert_eq!(p.psi, kc.plane_wave(&x));
    assert_eq!(p.mu, Complex64::new(1.0, 0.0));
    let h = s.eval_h(&c, &k, &kc).unwrap();
    assert_eq!(h.value, Complex64::new(0.0, 0.0));
    assert_eq!(h.kind, ScatteringKind::H);
}

#[test]
fn inert_point_is_decoupled() {
    let s = solver();
    let kc = k3(4.0, 0.8);
    let k = Momentum::Complex(kc);
    let with = cfg(3, 4.0, &[(&[0.0, 0.0, 0.0], 3.0), (&[1.0, 0.0, 0.0], 0.0)]);
    let without = cfg(3, 4.0, &[(&[0.0, 0.0, 0.0], 3.0)]);
    let x = [0.2, 0.3, -0.1];
    let a = s.eval_psi(&with, &x, &k).unwrap().psi;
    let b = s.eval_psi(&without, &x, &k).unwrap().psi;
    assert_eq!(a, b);
}

#[test]
fn gauge_forms_agree() {
    let spec = QuadratureSpec::tight();
    let s = solver();
    let c = cfg(2, 4.0, &[(&[0.0, 0.0], 5.0), (&[0.5, 0.0], 6.0)]);
    let kc = k2(Complex64::new(1.3, 0.4), 4.0);
    let k = Momentum::Complex(kc);
    let sol = s.solve_coefficients(&c, &k).unwrap();
    let x = [0.3, -0.8];
    let mut direct = kc.plane_wave(&[0.3, -0.8, 0.0]);
    for (j, z) in [[0.0, 0.0], [0.5, 0.0]].iter().enumerate() {
        direct += sol.coefficients[j] * eval_G(&[x[0] - z[0], x[1] - z[1]], &kc, &spec).unwrap().value;
    }
    let p = s.eval_psi(&c, &x, &k).unwrap();
    assert!(close(p.psi, direct, 1e-13), "{} vs {direct}", p.psi);
    assert!(close(p.mu * kc.plane_wave(&[0.3, -0.8, 0.0]), p.psi, 1e-15));
}

#[test]
fn gamma_regime_uses_gamma_green() {
    let spec = QuadratureSpec::tight();
    let kg = RealLimitMomentum::new(3, &[2.0, 0.0, 0.0], &[0.0, 0.0, 1.0]).unwrap();
    let z2 = [0.3, 0.4, 0.5];
    let c = cfg(3, 4.0, &[(&[0.0, 0.0, 0.0], 5.0), (&z2, 6.0)]);
    let sys = solver().assemble_system(&c, &Momentum::Gamma(kg)).unwrap();
    let g = eval_G_gamma(&[-0.3, -0.4, -0.5], &kg, &spec).unwrap().value;
    assert!(close(sys.matrix.get(0, 1), -g, 1e-14));
    assert!(close(sys.matrix.get(0, 0), Complex64::new(0.2, 0.0), 1e-15));
}

#[test]
fn scattering_data_identities() {
    let s = solver();
    let c = cfg(3, 4.0, &[(&[0.0, 0.1, 0.0], 5.0), (&[0.5, 0.0, 0.2], 6.0)]);
    let kc = k3(4.0, 1.1);
    let k = Momentum::Complex(kc);
    let sol = s.solve_coefficients(&c, &k).unwrap();
    let hkk = s.eval_h(&c, &k, &kc).unwrap().value;
    let want = (sol.gauge[0] + sol.gauge[1]) / (2.0 * PI).powi(3);
    assert!(close(hkk, want, 1e-14));

    let a = (4.0f64 + 1.21).sqrt();
    for t in [0.3f64, 1.1, 2.5, 4.0] {
        let l = build_k_3d(
            Energy::new(4.0).unwrap(),
            &[t.cos(), 0.0, t.sin()],
            &[0.0, 1.0, 0.0],
            1.1,
        )
        .unwrap();
        let h = s.eval_h(&c, &k, &l).unwrap().value;
        let p = [a - a * t.cos(), 0.0, -a * t.sin()];
        let big = s.eval_H(&c, &k, &p).unwrap();
        assert_eq!(big.kind, ScatteringKind::BigH);
        assert!(close(big.value, h, 1e-13));
    }
    let off = build_k_3d(Energy::new(4.0).unwrap(), &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], 1.0).unwrap();
    assert!(matches!(s.eval_h(&c, &k, &off), Err(FaddeevError::OffVariety(_))));
}

#[test]
fn gamma_amplitude_single_point_phase() {
    let s = solver();
    let z = [0.4, -0.3, 0.2];
    let c = cfg(3, 4.0, &[(&z, 5.0)]);
    let kg = RealLimitMomentum::new(3, &[2.0, 0.0, 0.0], &[0.0, 0.0, 1.0]).unwrap();
    let k = Momentum::Gamma(kg);
    let base = s.eval_h(&c, &k, &kg.as_real()).unwrap().value;
    assert!(close(base, Complex64::new(5.0 / (2.0 * PI).powi(3), 0.0), 1e-14));
    let l = ComplexMomentum::real(3, &[0.0, 2.0, 0.0]).unwrap();
    let h = s.eval_h(&c, &k, &l).unwrap();
    assert_eq!(h.kind, ScatteringKind::HGamma);
    let phase = Complex64::from_polar(1.0, 2.0 * z[0] - 2.0 * z[1]);
    assert!(close(h.value, base * phase, 1e-14));
}

#[test]
fn config_validation() {
    assert!(PotentialConfig::new(3, 4.0, vec![]).is_err());
    let dup = vec![
        PointSource {
            z: vec![0.0, 0.0],
            alpha: 1.0,
        },
        PointSource {
            z: vec![0.0, 0.0],
            alpha: 2.0,
        },
    ];
    assert!(PotentialConfig::new(2, 4.0, dup).is_err());
    assert!(PotentialConfig::new(
        2,
        -1.0,
        vec![PointSource {
            z: vec![0.0, 0.0],
            alpha: 1.0
        }]
    )
    .is_err());
    assert!(PotentialConfig::new(
        3,
        4.0,
        vec![PointSource {
            z: vec![0.0, 0.0],
            alpha: 1.0
        }]
    )
    .is_err());
    assert!(PotentialConfig::new(
        3,
        4.0,
        vec![PointSource {
            z: vec![0.0; 3],
            alpha: f64::NAN
        }]
    )
    .is_err());
    let c = PotentialConfig::from_json(
        r#"{"dimension":2,"energy":4,"points":[{"z":[0,0],"alpha":5},{"z":[0.5,0],"alpha":6}]}"#,
    )
    .unwrap();
    assert_eq!(c.n(), 2);
    let back = PotentialConfig::from_json(&serde_json::to_string(&c).unwrap()).unwrap();
    assert_eq!(back, c);
    // Wrong energy for the momentum.
    let k = Momentum::Complex(k3(5.0, 1.0));
    let c3 = cfg(3, 4.0, &[(&[0.0; 3], 1.0)]);
    assert!(matches!(
        solver().solve_coefficients(&c3, &k),
        Err(FaddeevError::OffVariety(_))
    ));
    assert!(solver()
        .eval_psi(&c3, &[0.0; 3], &Momentum::Complex(k3(4.0, 1.0)))
        .is_err());
}

#[test]
fn determinant_is_real_on_the_variety() {
    let s = solver();
    let c = cfg(2, 4.0, &[(&[0.0, 0.0], 5.0), (&[0.5, 0.0], 6.0), (&[0.1, -0.7], -2.0)]);
    for (r, t) in [(0.3, 0.4), (1.7, 2.0), (2.5, -1.0), (0.8, 3.0)] {
        let k = Momentum::Complex(k2(Complex64::from_polar(r, t), 4.0));
        let d = s.det_a(&c, &k).unwrap();
        assert!(d.reality_defect <= 1e-6, "{d:?}");
    }
    let c = cfg(3, -1.0, &[(&[0.0; 3], 5.0), (&[0.5, 0.0, 0.3], 6.0)]);
    let d = s.det_a(&c, &Momentum::Complex(k3(-1.0, 1.8))).unwrap();
    assert!(d.reality_defect <= 1e-6, "{d:?}");
}

#[test]
fn cache_is_shared_across_calls() {
    let s = solver();
    let c = cfg(3, 4.0, &[(&[0.0; 3], 5.0), (&[0.5, 0.0, 0.3], 6.0)]);
    let k = Momentum::Complex(k3(4.0, 1.0));
    s.det_a(&c, &k).unwrap();
    let n = s.cache().len();
    assert_eq!(n, 2);
    s.solve_coefficients(&c, &k).unwrap();
    assert_eq!(s.cache().len(), n);
}

fn three_points(dim: usize) -> Vec<(Vec<f64>, f64)> {
    if dim == 2 {
        vec![(vec![0.0, 0.0], 5.0), (vec![0.5, 0.1], 6.0), (vec![-0.3, 0.6], 2.0)]
    } else {
        vec![
            (vec![0.0, 0.0, 0.0], 5.0),
            (vec![0.5, 0.1, -0.2], 6.0),
            (vec![-0.3, 0.6, 0.4], 2.0),
        ]
    }
}

fn config_from(dim: usize, e: f64, pts: &[(Vec<f64>, f64)]) -> PotentialConfig {
    PotentialConfig::new(
        dim,
        e,
        pts.iter()
            .map(|(z, a)| PointSource {
                z: z.clone(),
                alpha: *a,
            })
            .collect(),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn permutation_invariance(r in 0.3f64..3.0, t in 0.0f64..std::f64::consts::TAU, perm in 0usize..6) {
        let orders = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let pts = three_points(2);
        let shuffled: Vec<_> = orders[perm].iter().map(|&i| pts[i].clone()).collect();
        let a = config_from(2, 4.0, &pts);
        let b = config_from(2, 4.0, &shuffled);
        let kc = k2(Complex64::from_polar(r, t), 4.0);
        prop_assume!(kc.im_norm() > 1e-3);
        let k = Momentum::Complex(kc);
        let s = solver();
        let x = [0.9, -0.4];
        let (pa, pb) = (s.eval_psi(&a, &x, &k), s.eval_psi(&b, &x, &k));
        prop_assume!(pa.is_ok());
        prop_assert!(close(pa.unwrap().psi, pb.unwrap().psi, 1e-11));
        let (da, db) = (s.det_a(&a, &k).unwrap().value, s.det_a(&b, &k).unwrap().value);
        prop_assert!(close(da, db, 1e-12));
        prop_assert!(close(s.eval_h(&a, &k, &kc).unwrap().value, s.eval_h(&b, &k, &kc).unwrap().value, 1e-11));
    }

    #[test]
    fn translation_covariance(beta in 0.3f64..2.5, t0 in -1.0f64..1.0, t1 in -1.0f64..1.0, t2 in -1.0f64..1.0) {
        let pts = three_points(3);
        let moved: Vec<_> = pts
            .iter()
            .map(|(z, a)| (vec![z[0] + t0, z[1] + t1, z[2] + t2], *a))
            .collect();
        let kc = k3(4.0, beta);
        let k = Momentum::Complex(kc);
        let s = solver();
        let x = [0.9, -0.4, 0.2];
        let a = s.eval_psi(&config_from(3, 4.0, &pts), &x, &k);
        prop_assume!(a.is_ok());
        let b = s
            .eval_psi(&config_from(3, 4.0, &moved), &[x[0] + t0, x[1] + t1, x[2] + t2], &k)
            .unwrap();
        let shift = kc.plane_wave(&[t0, t1, t2]);
        prop_assert!(close(b.psi, shift * a.unwrap().psi, 1e-10));
    }
}

#[test]
fn distant_points_at_large_imaginary_part() {
    // |Im k| |z_2 - z_1| ~ 50: the A-form off-diagonals differ by e^{100} in size.
    let c = cfg(2, 5.0, &[(&[0.0, 0.0], 6.0), (&[10.0, 0.0], 6.8)]);
    let k = Momentum::Complex(k2(Complex64::from_polar(3.0, 0.3), 5.0));
    let s = Solver::new(QuadratureSpec::default());
    let sol = s.solve_coefficients(&c, &k).unwrap();
    let a = s.assemble_system(&c, &k).unwrap();
    let det_a = a.matrix.lu().det();
    assert!(
        (sol.det - det_a).norm() <= 1e-10 * sol.det.norm(),
        "{} vs {det_a}",
        sol.det
    );
    assert!(sol.condition_estimate < 1e3);
    // The unbalanced form still solves to the same C.
    let back = a.matrix.mul_vec(&sol.coefficients);
    for (x, b) in back.iter().zip(&a.rhs) {
        assert!((x - b).norm() <= 1e-9 * b.norm(), "{x} vs {b}");
    }
}
