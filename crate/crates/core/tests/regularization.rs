use faddeev_core::geometry::{build_k_3d, lambda_to_k, ComplexMomentum, Energy, LambdaCoord};
use faddeev_core::green::{ball_integrals, eval_g};
use faddeev_core::regularization::{
    assemble_a_n, convergence_study, epsilon_of_n, log_log_slope, renormalization_pole, solve_c_n, CutoffModel,
};
use faddeev_core::solver::{PointSource, PotentialConfig};
use faddeev_core::{Complex64, FaddeevError, QuadratureSpec};
use std::f64::consts::{E, PI};

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

fn k3(beta: f64) -> ComplexMomentum {
    build_k_3d(Energy::new(4.0).unwrap(), &[1.0, 0.0, 0.0], &[0.0, 0.6, 0.8], beta).unwrap()
}

#[test]
fn renormalized_coupling_values() {
    let v = epsilon_of_n(5.0, 10.0, 3).unwrap();
    assert!((v - 5.0 / (1.0 - 50.0 / (2.0 * PI * PI))).abs() < 1e-14);
    assert!((v + 3.2616).abs() < 1e-4);
    assert_eq!(epsilon_of_n(0.0, 37.0, 2).unwrap(), 0.0);
    assert!(matches!(
        epsilon_of_n(2.0 * PI, E, 2),
        Err(FaddeevError::RenormalizationPole { .. })
    ));
    let pole = renormalization_pole(2.0, 3).unwrap();
    assert!(matches!(
        epsilon_of_n(2.0, pole, 3),
        Err(FaddeevError::RenormalizationPole { .. })
    ));
    assert!(renormalization_pole(-1.0, 3).is_none());
    assert!(epsilon_of_n(1.0, 0.0, 3).is_err());
}

#[test]
fn single_point_cutoff_solution() {
    let spec = QuadratureSpec::default();
    let c = cfg(3, 4.0, &[(&[0.2, 0.0, -0.1], 5.0)]);
    let k = k3(1.2);
    let model = CutoffModel::new(&c, 30.0).unwrap();
    let got = solve_c_n(&model, &k, &spec).unwrap()[0];
    let i = ball_integrals(&[0.0; 3], &k, &[30.0], &spec).unwrap()[0].value / (2.0 * PI).powi(3);
    let eps = model.eps[0];
    let want = eps / (1.0 + eps * i);
    assert!((got - want).norm() < 1e-12 * want.norm());
}

#[test]
fn off_diagonal_entries_tend_to_minus_g() {
    let spec = QuadratureSpec::default();
    let c = cfg(3, 4.0, &[(&[0.0; 3], 1.0), (&[0.4, -0.3, 0.2], 1.0)]);
    let k = k3(1.2);
    let g = eval_g(&[-0.4, 0.3, -0.2], &k, &QuadratureSpec::tight()).unwrap().value;
    let errs: Vec<f64> = [50.0, 400.0]
        .iter()
        .map(|&n| {
            let model = CutoffModel::new(&c, n).unwrap();
            let a = assemble_a_n(&model, &k, &spec).unwrap();
            (a.get(0, 1) / model.eps[0] + g).norm()
        })
        .collect();
    assert!(errs[1] < 0.2 * g.norm() && errs[1] < errs[0], "{errs:?}");
}

#[test]
fn inert_points_have_zero_error() {
    let c = cfg(3, 4.0, &[(&[0.0; 3], 0.0), (&[0.4, -0.3, 0.2], 0.0)]);
    let r = convergence_study(&c, &k3(1.0), &[25.0, 50.0, 100.0], &QuadratureSpec::default()).unwrap();
    assert!(r.rows.iter().all(|row| row.err_abs == 0.0 && !row.excluded_flag));
    assert!(r.rate.is_none());
}

#[test]
fn single_point_rate_three_dimensions() {
    let c = cfg(3, 4.0, &[(&[0.1, 0.2, 0.3], 5.0)]);
    let beta = 1.3;
    let r = convergence_study(&c, &k3(beta), &[25.0, 50.0, 100.0, 200.0], &QuadratureSpec::default()).unwrap();
    let want = 5.0 / (1.0 - 5.0 * beta / (4.0 * PI));
    assert!((r.limit[0] - Complex64::new(want, 0.0)).norm() < 1e-12 * want);
    assert!(r.rate.unwrap() <= -0.8, "{:?}", r.rows);
}

#[test]
fn poles_are_stepped_over() {
    let alpha = 2.0 * PI * PI / 100.0;
    let c = cfg(3, 4.0, &[(&[0.0; 3], alpha)]);
    let r = convergence_study(&c, &k3(1.0), &[25.0, 50.0, 102.0, 200.0], &QuadratureSpec::default()).unwrap();
    let flags: Vec<bool> = r.rows.iter().map(|row| row.excluded_flag).collect();
    assert_eq!(flags, vec![false, false, true, false]);
    assert!(r.rows[2].err_abs.is_nan());
    assert!(r.coefficients[2].is_none());
}

#[test]
fn two_dimensional_pair_decreases() {
    let c = cfg(2, 4.0, &[(&[0.0, 0.0], 5.0), (&[0.5, 0.0], 6.0)]);
    let k = lambda_to_k(
        LambdaCoord::new(Complex64::new(0.5, 0.3)).unwrap(),
        Energy::new(4.0).unwrap(),
    )
    .unwrap();
    let r = convergence_study(&c, &k, &[25.0, 50.0, 100.0, 200.0, 400.0], &QuadratureSpec::default()).unwrap();
    let errs: Vec<f64> = r.rows.iter().map(|row| row.err_abs).collect();
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
}

#[test]
fn slope_fit() {
    let pts: Vec<(f64, f64)> = [10.0f64, 20.0, 40.0].iter().map(|&x| (x, 3.0 * x.powf(-1.5))).collect();
    assert!((log_log_slope(&pts).unwrap() + 1.5).abs() < 1e-12);
    assert!(log_log_slope(&pts[..1]).is_none());
}
