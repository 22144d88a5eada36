use faddeev_core::geometry::RealLimitMomentum;
use faddeev_core::green::eval_G_gamma;
use faddeev_core::singularities::{
    det_at, extract_zero_curves, figure_preset, real_singularity_alphas, refine_zero, scan_det_grid,
    split_alpha_product, CellFlag, CurvesDocument, GridSpec,
};
use faddeev_core::solver::{Momentum, PointSource, PotentialConfig, Solver};
use faddeev_core::{Complex64, FaddeevError, QuadratureSpec};
use std::f64::consts::PI;

fn small() -> GridSpec {
    GridSpec {
        r_min: 0.2,
        r_max: 5.0,
        n_r: 60,
        n_theta: 96,
    }
}

#[test]
fn presets_follow_captions() {
    let (c, g) = figure_preset(1).unwrap();
    assert_eq!(c.energy, 4.0);
    assert_eq!(c.points[1].z, vec![0.5, 0.0]);
    assert_eq!(c.alphas(), vec![5.0, 6.0]);
    assert_eq!(g, GridSpec::default());
    let (c, _) = figure_preset(2).unwrap();
    assert_eq!((c.energy, c.alphas()), (6.0, vec![5.0, 6.0]));
    let (c, _) = figure_preset(3).unwrap();
    assert_eq!((c.energy, c.points[1].z[0], c.alphas()), (5.0, 10.0, vec![6.0, 6.0]));
    let (c, _) = figure_preset(4).unwrap();
    assert_eq!(c.energy, 5.0);
    assert_eq!(c.points[1].z, vec![10.0, 0.0]);
    assert_eq!(c.alphas(), vec![6.0, 6.8]);
    assert!(figure_preset(5).is_err());
    assert!(figure_preset(0).is_err());
}

#[test]
fn inert_pair_has_no_curves() {
    let (c, _) = figure_preset(1).unwrap();
    let c = c.with_alphas(&[0.0, 0.0]).unwrap();
    let spec = QuadratureSpec::default();
    let grid = scan_det_grid(&c, &small(), &spec).unwrap();
    assert!(grid.values.iter().all(|&v| v == 1.0));
    let set = extract_zero_curves(&grid, &spec, 1e-8).unwrap();
    assert!(set.curves.is_empty());
}

#[test]
fn first_preset_curves() {
    let (c, _) = figure_preset(1).unwrap();
    let spec = QuadratureSpec::default();
    let grid = scan_det_grid(&c, &small(), &spec).unwrap();
    assert!(grid.reality_ok(1e-6));
    let ok: Vec<f64> = grid
        .values
        .iter()
        .zip(&grid.flags)
        .filter(|(_, f)| **f == CellFlag::Ok)
        .map(|(v, _)| *v)
        .collect();
    assert!(ok.iter().any(|&v| v > 0.0) && ok.iter().any(|&v| v < 0.0));
    let set = extract_zero_curves(&grid, &spec, 1e-8).unwrap();
    assert!(!set.curves.is_empty());
    assert!(!set.excluded.is_empty());
    let solver = Solver::new(spec);
    for v in set.curves.iter().flatten() {
        let l = v.complex();
        assert!(det_at(&solver, &c, l).unwrap().norm() <= 1e-8);
        assert!((l.norm() - 1.0).abs() > 1e-3);
        // The reflected vertex is a zero as well.
        assert!(det_at(&solver, &c, 1.0 / l.conj()).unwrap().norm() <= 1e-8);
    }
    let doc = CurvesDocument::new(&set, Some(1), &c);
    let json = serde_json::to_value(&doc).unwrap();
    assert!(json["curves"][0][0]["re"].is_f64());
    assert_eq!(json["preset"], 1);
    assert_eq!(json["config"]["energy"], 4.0);
}

#[test]
fn grid_rows_are_tabulated() {
    let (c, _) = figure_preset(2).unwrap();
    let g = GridSpec {
        r_min: 0.5,
        r_max: 2.0,
        n_r: 3,
        n_theta: 4,
    };
    let grid = scan_det_grid(&c, &g, &QuadratureSpec::default()).unwrap();
    let rows: Vec<_> = grid.rows().collect();
    assert_eq!(rows.len(), 12);
    // The middle radius is exactly the unit circle.
    assert!(rows[4..8]
        .iter()
        .all(|r| r.flag == CellFlag::UnitCircle && r.det_re.is_nan()));
    assert!(rows[..4].iter().all(|r| r.flag == CellFlag::Ok));
}

#[test]
fn lambda_symmetries_of_the_determinant() {
    let solver = Solver::new(QuadratureSpec::tight());
    for id in 1..=4 {
        let (c, _) = figure_preset(id).unwrap();
        for l in [
            Complex64::new(0.4, 0.3),
            Complex64::new(2.0, -1.0),
            Complex64::new(-0.2, 0.7),
        ] {
            let d = det_at(&solver, &c, l).unwrap();
            for image in [1.0 / l.conj(), -l, l.conj()] {
                let e = det_at(&solver, &c, image).unwrap();
                assert!(
                    (d - e).norm() <= 1e-10 * (1.0 + d.norm()),
                    "preset {id} at {l}: {d} vs {e}"
                );
            }
        }
    }
}

#[test]
fn single_point_zero_matches_scalar_equation() {
    let alpha = 5.0;
    let c = PotentialConfig::new(
        2,
        4.0,
        vec![PointSource {
            z: vec![0.0, 0.0],
            alpha,
        }],
    )
    .unwrap();
    let outer = (2.0 * PI / alpha).exp() / 2.0;
    for (seed, want) in [(1.7, outer), (0.55, 1.0 / outer)] {
        let l = refine_zero(
            &c,
            Complex64::new(seed, 0.0),
            Complex64::new(1.0, 0.0),
            &QuadratureSpec::tight(),
        )
        .unwrap();
        assert!((l.value().norm() - want).abs() < 1e-9, "{} vs {want}", l.value());
    }
    // Tangent lines from outside the root circle never reach it.
    let r = refine_zero(
        &c,
        Complex64::new(3.0, 0.0),
        Complex64::new(0.0, 1.0),
        &QuadratureSpec::tight(),
    );
    assert!(matches!(r, Err(FaddeevError::NoBracket(_))));
}

#[test]
fn third_preset_real_axis_root() {
    let (c, _) = figure_preset(3).unwrap();
    let spec = QuadratureSpec::tight();
    let l = refine_zero(&c, Complex64::new(0.70, 0.0), Complex64::new(1.0, 0.0), &spec).unwrap();
    assert!(det_at(&Solver::new(spec), &c, l.value()).unwrap().norm() <= 1e-8);
    assert!(l.value().im.abs() < 1e-12 && l.value().re > 0.65 && l.value().re < 0.75);
}

#[test]
fn real_singularity_construction() {
    let spec = QuadratureSpec::tight();
    let cases = [
        ([0.0, 0.0, 0.0], [0.5, 0.2, -0.1], [2.0, 0.0, 0.0], [0.0, 0.6, 0.8]),
        ([0.1, -0.3, 0.2], [1.1, 0.4, 0.9], [0.0, 1.5, 0.0], [0.0, 0.0, -1.0]),
    ];
    for (z1, z2, k, gamma) in cases {
        let p = real_singularity_alphas(&z1, &z2, &k, &gamma, &spec).unwrap();
        let (a1, a2) = split_alpha_product(p);
        assert!((a1 * a2 - p).abs() < 1e-12 * p.abs());
        let c = PotentialConfig::new(
            3,
            k.iter().map(|v| v * v).sum(),
            vec![
                PointSource {
                    z: z1.to_vec(),
                    alpha: a1,
                },
                PointSource {
                    z: z2.to_vec(),
                    alpha: a2,
                },
            ],
        )
        .unwrap();
        let m = Momentum::Gamma(RealLimitMomentum::new(3, &k, &gamma).unwrap());
        let det = Solver::new(spec).det_a(&c, &m).unwrap().value;
        assert!(det.norm() <= 1e-8, "{det}");
    }
}

#[test]
fn vanishing_green_product_is_rejected() {
    let spec = QuadratureSpec::tight();
    let k = RealLimitMomentum::new(3, &[2.0, 0.0, 0.0], &[0.0, 0.0, 1.0]).unwrap();
    let g = |s: f64| eval_G_gamma(&[s, 0.0, 0.0], &k, &spec).unwrap().value.re;
    // G_gamma is real and oscillates in |x|; bracket a zero along the axis.
    let (mut lo, mut hi) = (0.3, 0.3);
    while g(lo).signum() == g(hi).signum() {
        hi += 0.05;
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if g(mid).signum() == g(lo).signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let r = real_singularity_alphas(&[0.0; 3], &[lo, 0.0, 0.0], &[2.0, 0.0, 0.0], &[0.0, 0.0, 1.0], &spec);
    assert!(matches!(r, Err(FaddeevError::Degenerate(_))), "{r:?}");
}
