//! Cutoff potentials with renormalized couplings and their `N -> inf` limit.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{FaddeevError, Result};
use crate::geometry::{sub, ComplexMomentum};
use crate::green::ball_integrals;
use crate::linalg::CMatrix;
use crate::quadrature::QuadratureSpec;
use crate::solver::{Momentum, PotentialConfig, Solver, RESIDUAL_REL};

/// Relative distance to a pole below which a sweep skips the cutoff.
pub const POLE_EXCLUSION: f64 = 0.05;

pub const DEFAULT_CUTOFFS: [f64; 5] = [25.0, 50.0, 100.0, 200.0, 400.0];

/// Cutoff at which `epsilon(N)` diverges, if any.
pub fn renormalization_pole(alpha: f64, dim: usize) -> Option<f64> {
    if alpha <= 0.0 {
        return None;
    }
    Some(match dim {
        3 => 2.0 * PI * PI / alpha,
        _ => (2.0 * PI / alpha).exp(),
    })
}

/// `alpha / (1 - alpha N / (2 pi^2))` in d = 3, `alpha / (1 - alpha ln N / (2 pi))` in d = 2.
pub fn epsilon_of_n(alpha: f64, cutoff: f64, dim: usize) -> Result<f64> {
    crate::geometry::check_dim(dim)?;
    if !(cutoff > 0.0 && cutoff.is_finite()) || !alpha.is_finite() {
        return Err(FaddeevError::InvalidInput(format!(
            "need finite alpha and N > 0, got N = {cutoff}"
        )));
    }
    if alpha == 0.0 {
        return Ok(0.0);
    }
    let denom = match dim {
        3 => 1.0 - alpha * cutoff / (2.0 * PI * PI),
        _ => 1.0 - alpha * cutoff.ln() / (2.0 * PI),
    };
    if denom.abs() <= 64.0 * f64::EPSILON {
        return Err(FaddeevError::RenormalizationPole {
            alpha,
            pole: renormalization_pole(alpha, dim).unwrap_or(cutoff),
        });
    }
    Ok(alpha / denom)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CutoffModel {
    pub config: PotentialConfig,
    pub cutoff: f64,
    pub eps: Vec<f64>,
}

impl CutoffModel {
    pub fn new(config: &PotentialConfig, cutoff: f64) -> Result<Self> {
        config.validate()?;
        let eps = config
            .points
            .iter()
            .map(|p| epsilon_of_n(p.alpha, cutoff, config.dimension))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            config: config.clone(),
            cutoff,
            eps,
        })
    }
}

/// `(2 pi)^{-d} I_N(z_m - z_j)` for every ordered pair and cutoff; indexed `[N][m][j]`.
fn scaled_integrals(
    config: &PotentialConfig,
    k: &ComplexMomentum,
    cutoffs: &[f64],
    spec: &QuadratureSpec,
) -> Result<Vec<Vec<Vec<Complex64>>>> {
    let n = config.n();
    let norm = (2.0 * PI).powi(config.dimension as i32);
    let mut pairs: Vec<(usize, usize)> = vec![(0, 0)];
    pairs.extend((0..n).flat_map(|m| (0..n).filter(move |&j| j != m).map(move |j| (m, j))));
    let values = pairs
        .par_iter()
        .map(|&(m, j)| {
            let x = if m == j {
                [0.0; 3]
            } else {
                sub(&config.z(m), &config.z(j))
            };
            ball_integrals(&x[..config.dimension], k, cutoffs, spec)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = vec![vec![vec![Complex64::new(0.0, 0.0); n]; n]; cutoffs.len()];
    for (&(m, j), est) in pairs.iter().zip(&values) {
        for (i, e) in est.iter().enumerate() {
            if m == j {
                (0..n).for_each(|d| out[i][d][d] = e.value / norm);
            } else {
                out[i][m][j] = e.value / norm;
            }
        }
    }
    Ok(out)
}

fn matrix_from(model: &CutoffModel, integrals: &[Vec<Complex64>]) -> CMatrix {
    CMatrix::from_fn(model.config.n(), |m, j| {
        let delta = if m == j { 1.0 } else { 0.0 };
        delta + model.eps[m] * integrals[m][j]
    })
}

fn check_k(config: &PotentialConfig, k: &ComplexMomentum) -> Result<()> {
    if k.dim() != config.dimension || k.im_norm() == 0.0 {
        return Err(FaddeevError::InvalidInput(
            "cutoff systems need Im k != 0 in the config dimension".into(),
        ));
    }
    Ok(())
}

/// `A_N(k)`: `delta_mj + eps_m (2 pi)^{-d} I_N(z_m - z_j)`.
pub fn assemble_a_n(model: &CutoffModel, k: &ComplexMomentum, spec: &QuadratureSpec) -> Result<CMatrix> {
    check_k(&model.config, k)?;
    let ints = scaled_integrals(&model.config, k, &[model.cutoff], spec)?;
    Ok(matrix_from(model, &ints[0]))
}

fn solve_with(model: &CutoffModel, a: &CMatrix) -> Result<Vec<Complex64>> {
    let b: Vec<Complex64> = model.eps.iter().map(|&e| Complex64::new(e, 0.0)).collect();
    let lu = a.lu();
    let c = lu.solve(&b)?;
    let b_norm = b.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let residual = a
        .mul_vec(&c)
        .iter()
        .zip(&b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max);
    if residual > RESIDUAL_REL * b_norm || c.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(FaddeevError::SingularSystem);
    }
    Ok(c)
}

/// `c_N(k)` from `A_N c_N = eps(N)`.
pub fn solve_c_n(model: &CutoffModel, k: &ComplexMomentum, spec: &QuadratureSpec) -> Result<Vec<Complex64>> {
    let a = assemble_a_n(model, k, spec)?;
    solve_with(model, &a)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    #[serde(rename = "N")]
    pub cutoff: f64,
    pub err_abs: f64,
    pub err_rel: f64,
    pub excluded_flag: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    pub limit: Vec<Complex64>,
    pub coefficients: Vec<Option<Vec<Complex64>>>,
    /// Least-squares slope of `ln err` against `ln N`, smallest cutoff dropped.
    pub rate: Option<f64>,
}

fn near_pole(config: &PotentialConfig, cutoff: f64) -> bool {
    config.points.iter().any(|p| {
        renormalization_pole(p.alpha, config.dimension)
            .is_some_and(|pole| (cutoff - pole).abs() < POLE_EXCLUSION * pole)
    })
}

/// Least-squares slope through `(ln x, ln y)`.
pub fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}

/// `||c_N - c||` over a cutoff sweep, with `c` from the limiting system.
pub fn convergence_study(
    config: &PotentialConfig,
    k: &ComplexMomentum,
    cutoffs: &[f64],
    spec: &QuadratureSpec,
) -> Result<ConvergenceReport> {
    check_k(config, k)?;
    let limit = Solver::new(*spec)
        .solve_coefficients(config, &Momentum::Complex(*k))?
        .gauge;
    let included: Vec<f64> = cutoffs.iter().copied().filter(|&n| !near_pole(config, n)).collect();
    let ints = if included.is_empty() {
        Vec::new()
    } else {
        scaled_integrals(config, k, &included, spec)?
    };
    let limit_norm = limit.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut rows = Vec::with_capacity(cutoffs.len());
    let mut coefficients = Vec::with_capacity(cutoffs.len());
    let mut next = 0;
    for &n in cutoffs {
        if near_pole(config, n) {
            rows.push(ConvergenceRow {
                cutoff: n,
                err_abs: f64::NAN,
                err_rel: f64::NAN,
                excluded_flag: true,
            });
            coefficients.push(None);
            continue;
        }
        let model = CutoffModel::new(config, n)?;
        let c = solve_with(&model, &matrix_from(&model, &ints[next]))?;
        next += 1;
        let err = c.iter().zip(&limit).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        rows.push(ConvergenceRow {
            cutoff: n,
            err_abs: err,
            err_rel: if limit_norm > 0.0 { err / limit_norm } else { err },
            excluded_flag: false,
        });
        coefficients.push(Some(c));
    }
    let mut tail: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| !r.excluded_flag)
        .map(|r| (r.cutoff, r.err_abs))
        .collect();
    tail.sort_by(|a, b| a.0.total_cmp(&b.0));
    let rate = if tail.len() > 2 {
        log_log_slope(&tail[1..])
    } else {
        log_log_slope(&tail)
    };
    Ok(ConvergenceReport {
        rows,
        limit,
        coefficients,
        rate,
    })
}
