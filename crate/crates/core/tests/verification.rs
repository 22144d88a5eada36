use faddeev_core::geometry::{build_k_3d, lambda_to_k, Energy, LambdaCoord, RealLimitMomentum};
use faddeev_core::singularities::figure_preset;
use faddeev_core::solver::{Momentum, PointSource, PotentialConfig};
use faddeev_core::verification::{
    check_dbar, check_helmholtz, check_limit_relation, check_mu_asymptotic, check_reality, default_suite, rel_error,
    AsymptoticPath, DbarTarget, IdentityId, LimitTarget, SuiteOptions, DEFAULT_DBAR_STEPS, DEFAULT_HELMHOLTZ_STEPS,
    DEFAULT_MU_EDGES,
};
use faddeev_core::{Complex64, QuadratureSpec};

fn pair3() -> PotentialConfig {
    PotentialConfig::new(
        3,
        4.0,
        vec![
            PointSource {
                z: vec![0.0, 0.0, 0.0],
                alpha: 2.0,
            },
            PointSource {
                z: vec![0.6, -0.2, 0.3],
                alpha: -1.5,
            },
        ],
    )
    .unwrap()
}

#[test]
fn relative_error_definition() {
    let e = rel_error(Complex64::new(3.0, 0.0), Complex64::new(1.0, 0.0));
    assert!((e - 0.5).abs() < 1e-15);
    assert_eq!(rel_error(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)), 0.0);
}

#[test]
fn dbar_psi_on_first_preset() {
    let (c, _) = figure_preset(1).unwrap();
    let spec = QuadratureSpec::tight();
    for l in [
        Complex64::new(2.0, 0.3),
        Complex64::new(0.3, 0.5),
        Complex64::new(-1.5, 2.0),
    ] {
        let r = check_dbar(&c, l, &DbarTarget::Psi(vec![0.3, -0.4]), &DEFAULT_DBAR_STEPS, &spec).unwrap();
        assert_eq!(r.identity_id, IdentityId::DbarPsi);
        assert!(r.passed, "{r:?}");
        assert!(r.rel_error < 1e-6, "{r:?}");
        let o = r.diagnostics.order.unwrap();
        assert!((1.5..=2.5).contains(&o), "{o}");
        assert!(r.diagnostics.oracle_error.unwrap() < 1e-6, "{r:?}");
    }
}

#[test]
fn dbar_h_on_fourth_preset() {
    let (c, _) = figure_preset(4).unwrap();
    let spec = QuadratureSpec::tight();
    let r = check_dbar(
        &c,
        Complex64::new(1.4, -0.9),
        &DbarTarget::H(vec![0.7, 0.2]),
        &DEFAULT_DBAR_STEPS,
        &spec,
    )
    .unwrap();
    assert_eq!(r.identity_id, IdentityId::DbarH);
    assert!(r.passed, "{r:?}");
}

#[test]
fn dbar_rejects_bad_input() {
    let spec = QuadratureSpec::default();
    let (c, _) = figure_preset(1).unwrap();
    assert!(check_dbar(
        &pair3(),
        Complex64::new(2.0, 0.0),
        &DbarTarget::Psi(vec![1.0, 1.0, 1.0]),
        &DEFAULT_DBAR_STEPS,
        &spec
    )
    .is_err());
    assert!(check_dbar(
        &c,
        Complex64::new(0.6, 0.8),
        &DbarTarget::Psi(vec![1.0, 1.0]),
        &DEFAULT_DBAR_STEPS,
        &spec
    )
    .is_err());
    assert!(check_dbar(
        &c,
        Complex64::new(2.0, 0.0),
        &DbarTarget::Psi(vec![1.0, 1.0]),
        &[1e-3, 0.0, 1e-4],
        &spec
    )
    .is_err());
}

#[test]
fn inert_potential_has_trivial_dbar() {
    let (c, _) = figure_preset(2).unwrap();
    let c = c.with_alphas(&[0.0, 0.0]).unwrap();
    let r = check_dbar(
        &c,
        Complex64::new(1.7, 0.4),
        &DbarTarget::Psi(vec![0.2, 0.1]),
        &DEFAULT_DBAR_STEPS,
        &QuadratureSpec::tight(),
    );
    // H vanishes, so the oracle ratio is undefined but both sides are zero.
    let r = r.unwrap();
    assert_eq!(r.rhs, Complex64::new(0.0, 0.0));
    assert!(r.lhs.norm() < 1e-8);
}

#[test]
fn limit_relation_three_dimensions() {
    let spec = QuadratureSpec::tight();
    let single = PotentialConfig::new(
        3,
        4.0,
        vec![PointSource {
            z: vec![0.1, 0.0, -0.2],
            alpha: 3.0,
        }],
    )
    .unwrap();
    for c in [single, pair3()] {
        let r = check_limit_relation(
            &c,
            &[2.0, 0.0, 0.0],
            &[0.0, 0.6, 0.8],
            &LimitTarget::Psi(vec![0.5, 0.4, -0.3]),
            &spec,
        )
        .unwrap();
        assert!(r.passed, "{r:?}");
        let r = check_limit_relation(
            &c,
            &[2.0, 0.0, 0.0],
            &[0.0, 0.6, 0.8],
            &LimitTarget::H(vec![0.0, 1.2, 1.6]),
            &spec,
        )
        .unwrap();
        assert_eq!(r.identity_id, IdentityId::LimitH);
        assert!(r.passed, "{r:?}");
    }
}

#[test]
fn limit_relation_two_dimensions() {
    let (c, _) = figure_preset(1).unwrap();
    let spec = QuadratureSpec::tight();
    let r = check_limit_relation(&c, &[0.0, 2.0], &[-1.0, 0.0], &LimitTarget::Psi(vec![0.3, -0.4]), &spec).unwrap();
    assert!(r.passed, "{r:?}");
    let r = check_limit_relation(&c, &[1.2, 1.6], &[0.8, -0.6], &LimitTarget::H(vec![2.0, 0.0]), &spec).unwrap();
    assert!(r.passed, "{r:?}");
}

#[test]
fn mu_decays_along_paths() {
    let spec = QuadratureSpec::default();
    let r = check_mu_asymptotic(
        &pair3(),
        &[0.4, 0.5, -0.6],
        &AsymptoticPath::Spatial {
            a_dir: [1.0, 0.0, 0.0],
            b_dir: [0.0, 0.0, 1.0],
        },
        &DEFAULT_MU_EDGES,
        &spec,
    )
    .unwrap();
    assert!(r.passed, "{r:?}");
    assert!(r.diagnostics.order.unwrap() <= -0.8);
    let (c, _) = figure_preset(1).unwrap();
    let r = check_mu_asymptotic(
        &c,
        &[0.3, -0.4],
        &AsymptoticPath::Planar { theta: 0.7 },
        &DEFAULT_MU_EDGES,
        &spec,
    )
    .unwrap();
    assert!(r.passed, "{r:?}");
}

#[test]
fn helmholtz_in_every_regime() {
    let spec = QuadratureSpec::default();
    let c3 = pair3();
    let x3 = [0.9, 0.7, -0.8];
    let k = build_k_3d(Energy::new(4.0).unwrap(), &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], 1.1).unwrap();
    let momenta = [
        Momentum::Complex(k),
        Momentum::Gamma(RealLimitMomentum::new(3, &[2.0, 0.0, 0.0], &[0.0, 1.0, 0.0]).unwrap()),
        Momentum::plus(3, &[0.0, 2.0, 0.0]).unwrap(),
    ];
    for m in &momenta {
        let r = check_helmholtz(&c3, &x3, m, &DEFAULT_HELMHOLTZ_STEPS, &spec).unwrap();
        assert!(r.passed, "{r:?}");
    }
    let (c2, _) = figure_preset(1).unwrap();
    let k = lambda_to_k(
        LambdaCoord::new(Complex64::new(0.5, 0.4)).unwrap(),
        Energy::new(4.0).unwrap(),
    )
    .unwrap();
    let r = check_helmholtz(
        &c2,
        &[1.1, -0.9],
        &Momentum::Complex(k),
        &DEFAULT_HELMHOLTZ_STEPS,
        &spec,
    )
    .unwrap();
    assert!(r.passed, "{r:?}");
    // Too close to a point source for the stencil.
    assert!(check_helmholtz(&c2, &[0.2, 0.0], &Momentum::Complex(k), &DEFAULT_HELMHOLTZ_STEPS, &spec).is_err());
}

#[test]
fn reality_of_green_function() {
    let spec = QuadratureSpec::default();
    let k = build_k_3d(Energy::new(-1.0).unwrap(), &[0.6, 0.8, 0.0], &[0.0, 0.0, 1.0], 2.0).unwrap();
    let r = check_reality(&[0.3, -0.2, 0.5], &k, &spec).unwrap();
    assert!(r.passed, "{r:?}");
}

#[test]
fn suite_is_reproducible_and_passes() {
    let (c, _) = figure_preset(1).unwrap();
    let opts = SuiteOptions { seed: 11, samples: 1 };
    let spec = QuadratureSpec::tight();
    let a = default_suite(&c, &opts, &spec).unwrap();
    let b = default_suite(&c, &opts, &spec).unwrap();
    assert_eq!(a, b);
    assert!(a.len() >= 8);
    for r in &a {
        assert!(r.passed, "{r:?}");
    }
    let a3 = default_suite(&pair3(), &SuiteOptions { seed: 3, samples: 1 }, &spec).unwrap();
    for r in &a3 {
        assert!(r.passed, "{r:?}");
    }
}
