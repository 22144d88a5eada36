//! Numerical checks of the dbar equations, the limit relations, the large-`k`
//! asymptotic, the Helmholtz equation and reality.
//!
//! Every check computes both sides independently and reports
//! `rel_error = |lhs - rhs| / (1 + max(|lhs|, |rhs|))`.
//!
//! The delta measure `delta(xi^2 + 2k xi)` on real `xi` is the product of the
//! deltas of its real and imaginary parts. In d = 2 its support is `{0, -2 Re k}`
//! and the weight at `-2 Re k` is `1 / (4 |Re k| |Im k|)`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{FaddeevError, Result};
use crate::geometry::{
    build_k_3d, dot, lambda_tangent, lambda_to_k, norm, orthogonal_unit, scale, sub, vec3, ComplexMomentum, Energy,
    LambdaCoord, RealLimitMomentum, Vec3,
};
use crate::green::eval_G;
use crate::quadrature::{integrate, QuadratureSpec};
use crate::regularization::log_log_slope;
use crate::solver::{Momentum, PotentialConfig, Solver};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdentityId {
    DbarPsi,
    DbarH,
    LimitPsi,
    LimitH,
    MuAsymptotic,
    Helmholtz,
    Reality,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Finite-difference steps, path parameters or mollifier widths.
    pub steps: Vec<f64>,
    /// Quantity tabulated against `steps`.
    pub errors: Vec<f64>,
    /// Observed convergence order or fitted decay exponent.
    pub order: Option<f64>,
    /// Relative gap between the point-mass formula and the mollified-delta oracle.
    pub oracle_error: Option<f64>,
    pub notes: Vec<String>,
    /// Order band, oracle agreement and similar conditions besides the error threshold.
    pub side_conditions_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub identity_id: IdentityId,
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub rel_error: f64,
    pub threshold: f64,
    pub passed: bool,
    pub diagnostics: Diagnostics,
}

impl Default for Diagnostics {
    fn default() -> Self {
        Self {
            steps: Vec::new(),
            errors: Vec::new(),
            order: None,
            oracle_error: None,
            notes: Vec::new(),
            side_conditions_ok: true,
        }
    }
}

impl IdentityReport {
    /// Re-judges the report against `scale * threshold`; side conditions are kept.
    pub fn with_tol_scale(mut self, scale: f64) -> Self {
        self.threshold *= scale;
        self.passed =
            self.diagnostics.side_conditions_ok && self.rel_error.is_finite() && self.rel_error < self.threshold;
        self
    }
}

pub fn rel_error(lhs: Complex64, rhs: Complex64) -> f64 {
    (lhs - rhs).norm() / (1.0 + lhs.norm().max(rhs.norm()))
}

fn report(
    id: IdentityId,
    lhs: Complex64,
    rhs: Complex64,
    threshold: f64,
    extra_ok: bool,
    mut diagnostics: Diagnostics,
) -> IdentityReport {
    let e = rel_error(lhs, rhs);
    diagnostics.side_conditions_ok = extra_ok;
    IdentityReport {
        identity_id: id,
        lhs,
        rhs,
        rel_error: e,
        threshold,
        passed: e.is_finite() && e < threshold && extra_ok,
        diagnostics,
    }
}

pub const DBAR_THRESHOLD: f64 = 1e-4;
pub const DEFAULT_DBAR_STEPS: [f64; 3] = [2e-3, 1e-3, 5e-4];
pub const DEFAULT_HELMHOLTZ_STEPS: [f64; 3] = [0.04, 0.02, 0.01];
pub const ORACLE_THRESHOLD: f64 = 1e-6;
const ORDER_BAND: (f64, f64) = (1.5, 2.5);

#[derive(Debug, Clone, PartialEq)]
pub enum DbarTarget {
    /// `psi(x, k)` at this `x`.
    Psi(Vec<f64>),
    /// `H(k, p)` at this `p`.
    H(Vec<f64>),
}

/// `k(lambda)` off the unit circle.
fn planar_k(config: &PotentialConfig, lambda: Complex64) -> Result<ComplexMomentum> {
    let k = lambda_to_k(LambdaCoord::new(lambda)?, Energy::new(config.energy)?)?;
    if k.im_norm() == 0.0 {
        return Err(FaddeevError::InvalidInput("lambda must be off the unit circle".into()));
    }
    Ok(k)
}

/// Observed order from three successive central differences at halving steps.
fn halving_order(d: &[Complex64]) -> Option<f64> {
    let e1 = (d[0] - d[1]).norm();
    let e2 = (d[1] - d[2]).norm();
    let scale = d[2].norm().max(1e-300);
    // Differences at rounding level mean the derivative is resolved exactly.
    if e1 <= 1e-12 * scale || e2 <= 1e-13 * scale {
        return None;
    }
    Some((e1 / e2).log2())
}

/// `d/d(conj lambda)` of `psi` or `H` compared with the point-mass right-hand side.
pub fn check_dbar(
    config: &PotentialConfig,
    lambda: Complex64,
    target: &DbarTarget,
    steps: &[f64],
    spec: &QuadratureSpec,
) -> Result<IdentityReport> {
    if config.dimension != 2 {
        return Err(FaddeevError::InvalidInput(
            "dbar checks use the lambda chart and need d = 2".into(),
        ));
    }
    if steps.len() != 3 || steps.iter().any(|h| !(*h > 0.0)) {
        return Err(FaddeevError::InvalidInput("three positive steps are required".into()));
    }
    let solver = Solver::new(*spec);
    let k = planar_k(config, lambda)?;
    let (id, point) = match target {
        DbarTarget::Psi(x) => (IdentityId::DbarPsi, x.clone()),
        DbarTarget::H(p) => (IdentityId::DbarH, p.clone()),
    };
    let value = |l: Complex64| -> Result<Complex64> {
        let m = Momentum::Complex(planar_k(config, l)?);
        match target {
            DbarTarget::Psi(x) => Ok(solver.eval_psi(config, x, &m)?.psi),
            DbarTarget::H(p) => Ok(solver.eval_H(config, &m, p)?.value),
        }
    };
    let mut diffs = Vec::with_capacity(3);
    for &h in steps {
        let hi = Complex64::new(0.0, h);
        let du = (value(lambda + h)? - value(lambda - h)?) / (2.0 * h);
        let dv = (value(lambda + hi)? - value(lambda - hi)?) / (2.0 * h);
        diffs.push(0.5 * (du + Complex64::i() * dv));
    }
    let order = halving_order(&diffs);
    let lhs = diffs[2] + (diffs[2] - diffs[1]) / 3.0;

    let rhs = point_mass_rhs(&solver, config, lambda, &k, target)?;
    let oracle = point_mass_oracle(&solver, config, lambda, &k, &point)?;
    let order_ok = order.is_none_or(|o| (ORDER_BAND.0..=ORDER_BAND.1).contains(&o));
    let oracle_ok = oracle <= ORACLE_THRESHOLD;
    let mut notes = Vec::new();
    if order.is_none() {
        notes.push("finite differences agree to rounding; order not observable".into());
    }
    Ok(report(
        id,
        lhs,
        rhs,
        DBAR_THRESHOLD,
        order_ok && oracle_ok,
        Diagnostics {
            steps: steps.to_vec(),
            errors: diffs.windows(2).map(|w| (w[0] - w[1]).norm()).collect(),
            order,
            oracle_error: Some(oracle),
            notes,
            side_conditions_ok: true,
        },
    ))
}

/// `xi . conj(dk/dlambda)`, the pairing of `xi` with the antiholomorphic tangent.
fn tangent_pairing(xi: &Vec3, lambda: Complex64, energy: f64) -> Complex64 {
    let t = lambda_tangent(lambda, energy);
    xi[0] * t[0].conj() + xi[1] * t[1].conj()
}

fn point_mass_rhs(
    solver: &Solver,
    config: &PotentialConfig,
    lambda: Complex64,
    k: &ComplexMomentum,
    target: &DbarTarget,
) -> Result<Complex64> {
    let a = k.re();
    let xi = scale(a, -2.0);
    let weight = tangent_pairing(&xi, lambda, config.energy) / (4.0 * k.re_norm() * k.im_norm());
    let m = Momentum::Complex(*k);
    let h = solver.eval_H(config, &m, &[-xi[0], -xi[1]])?.value;
    let shifted = Momentum::Complex(k.shifted(&xi));
    let tail = match target {
        DbarTarget::Psi(x) => solver.eval_psi(config, x, &shifted)?.psi,
        DbarTarget::H(p) => solver.eval_H(config, &shifted, &[p[0] + xi[0], p[1] + xi[1]])?.value,
    };
    Ok(-2.0 * PI * weight * h * tail)
}

/// Relative gap between the point-mass formula and a Gaussian-mollified
/// evaluation of `int (xi . w) H(k, -xi) e^{i xi y} delta(xi^2 + 2k xi) dxi`.
fn point_mass_oracle(
    solver: &Solver,
    config: &PotentialConfig,
    lambda: Complex64,
    k: &ComplexMomentum,
    y: &[f64],
) -> Result<f64> {
    let sol = solver.solve_coefficients(config, &Momentum::Complex(*k))?;
    let zs: Vec<Vec3> = (0..config.n()).map(|j| config.z(j)).collect();
    let y = vec3(2, y)?;
    let norm_d = (2.0 * PI).powi(2);
    let f = |xi: &Vec3| -> Complex64 {
        let h: Complex64 = zs
            .iter()
            .zip(&sol.gauge)
            .map(|(z, c)| c * Complex64::from_polar(1.0, -dot(xi, z)))
            .sum::<Complex64>()
            / norm_d;
        tangent_pairing(xi, lambda, config.energy) * h * Complex64::from_polar(1.0, dot(xi, &y))
    };
    let (an, bn) = (k.re_norm(), k.im_norm());
    let ahat = scale(k.re(), 1.0 / an);
    let bhat = scale(k.im(), 1.0 / bn);
    let point = f(&scale(k.re(), -2.0)) / (4.0 * an * bn);

    let tight = QuadratureSpec {
        rel_tol: 1e-12,
        abs_tol: 1e-15,
        ..QuadratureSpec::default()
    };
    let mollified = |eps: f64| -> Result<Complex64> {
        let rho = |t: f64| (-(t * t) / (2.0 * eps * eps)).exp() / ((2.0 * PI).sqrt() * eps);
        let wv = 9.0 * eps / (2.0 * bn);
        let wu = 9.0 * eps / (2.0 * an);
        let mut total = Complex64::new(0.0, 0.0);
        for centre in [-2.0 * an, 0.0] {
            let e = integrate(
                |u: f64| {
                    integrate(
                        |v: f64| {
                            let xi = [u * ahat[0] + v * bhat[0], u * ahat[1] + v * bhat[1], 0.0];
                            let f1 = u * u + v * v + 2.0 * an * u;
                            f(&xi) * (rho(f1) * rho(2.0 * bn * v))
                        },
                        -wv,
                        wv,
                        &[0.0],
                        4,
                        &tight,
                    )
                    .map(|e| e.value)
                    .unwrap_or(Complex64::new(f64::NAN, f64::NAN))
                },
                centre - wu,
                centre + wu,
                &[centre],
                4,
                &tight,
            )?;
            total += e.value;
        }
        Ok(total)
    };
    let eps0 = 0.05 * an.min(bn).min(1.0);
    let m0 = mollified(eps0)?;
    let m1 = mollified(eps0 / 2.0)?;
    let m2 = mollified(eps0 / 4.0)?;
    // Even expansion in eps: two Richardson levels remove eps^2 and eps^4.
    let r1 = (4.0 * m1 - m0) / 3.0;
    let r2 = (4.0 * m2 - m1) / 3.0;
    let oracle = (16.0 * r2 - r1) / 15.0;
    Ok((oracle - point).norm() / point.norm().max(1e-300))
}

#[derive(Debug, Clone, PartialEq)]
pub enum LimitTarget {
    /// `psi_gamma(x, k)` against `psi+` and the half-sphere term.
    Psi(Vec<f64>),
    /// `h_gamma(k, l)` against `f` and the half-sphere term.
    H(Vec<f64>),
}

/// `int_{|xi| = |k|, xi . gamma > 0} F(xi) delta(xi^2 - k^2) dxi`.
fn half_sphere<F: Fn(&Vec3) -> Result<Complex64>>(
    k: &RealLimitMomentum,
    f: F,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    let kk = norm(k.k_prime());
    let e1 = scale(k.k_prime(), 1.0 / kk);
    let g = *k.gamma();
    let fail = std::cell::Cell::new(None);
    let eval = |xi: &Vec3| match f(xi) {
        Ok(v) => v,
        Err(e) => {
            fail.set(Some(e));
            Complex64::new(0.0, 0.0)
        }
    };
    let value = if k.dim() == 2 {
        let e = integrate(
            |phi: f64| {
                let xi = [
                    kk * (phi.cos() * e1[0] + phi.sin() * g[0]),
                    kk * (phi.cos() * e1[1] + phi.sin() * g[1]),
                    0.0,
                ];
                eval(&xi)
            },
            0.0,
            PI,
            &[],
            8,
            spec,
        )?;
        0.5 * e.value
    } else {
        let e2 = crate::geometry::cross(&g, &e1);
        let e = integrate(
            |theta: f64| {
                let (st, ct) = theta.sin_cos();
                integrate(
                    |phi: f64| {
                        let (sp, cp) = phi.sin_cos();
                        let w: Vec3 = std::array::from_fn(|i| ct * g[i] + st * (cp * e1[i] + sp * e2[i]));
                        eval(&scale(&w, kk)) * st
                    },
                    0.0,
                    2.0 * PI,
                    &[],
                    8,
                    spec,
                )
                .map(|e| e.value)
                .unwrap_or(Complex64::new(f64::NAN, f64::NAN))
            },
            0.0,
            PI / 2.0,
            &[],
            4,
            spec,
        )?;
        0.5 * kk * e.value
    };
    match fail.take() {
        Some(e) => Err(e),
        None => Ok(value),
    }
}

/// The relation between gamma-limit data and outgoing data with a half-sphere correction.
pub fn check_limit_relation(
    config: &PotentialConfig,
    k_prime: &[f64],
    gamma: &[f64],
    target: &LimitTarget,
    spec: &QuadratureSpec,
) -> Result<IdentityReport> {
    let k = RealLimitMomentum::on_shell(config.dimension, k_prime, gamma, Energy::new(config.energy)?)?;
    let solver = Solver::new(*spec);
    let dim = config.dimension;
    let norm_d = (2.0 * PI).powi(dim as i32);
    let kg = Momentum::Gamma(k);
    let c_gamma = solver.solve_coefficients(config, &kg)?.gauge;
    let zs: Vec<Vec3> = (0..config.n()).map(|j| config.z(j)).collect();
    let kp = *k.k_prime();
    // h_gamma(k, xi) for real xi.
    let h_gamma = |xi: &Vec3| -> Complex64 {
        zs.iter()
            .zip(&c_gamma)
            .map(|(z, c)| c * Complex64::from_polar(1.0, dot(&sub(&kp, xi), z)))
            .sum::<Complex64>()
            / norm_d
    };
    let plus = |xi: &Vec3| Momentum::plus(dim, &xi[..dim]);
    let quad = QuadratureSpec {
        rel_tol: 1e-11,
        abs_tol: 1e-14,
        ..*spec
    };
    let (id, lhs, rhs, threshold) = match target {
        LimitTarget::Psi(x) => {
            let lhs = solver.eval_psi(config, x, &kg)?.psi;
            let base = solver.eval_psi(config, x, &plus(&kp)?)?.psi;
            let term = half_sphere(
                &k,
                |xi| Ok(h_gamma(xi) * solver.eval_psi(config, x, &plus(xi)?)?.psi),
                &quad,
            )?;
            (
                IdentityId::LimitPsi,
                lhs,
                base + 2.0 * PI * Complex64::i() * term,
                limit_threshold(config),
            )
        }
        LimitTarget::H(l) => {
            let lv = ComplexMomentum::real(dim, l)?;
            let lhs = solver.eval_h(config, &kg, &lv)?.value;
            let base = solver.eval_h(config, &plus(&kp)?, &lv)?.value;
            let term = half_sphere(
                &k,
                |xi| Ok(h_gamma(xi) * solver.eval_h(config, &plus(xi)?, &lv)?.value),
                &quad,
            )?;
            (
                IdentityId::LimitH,
                lhs,
                base + 2.0 * PI * Complex64::i() * term,
                limit_threshold(config),
            )
        }
    };
    Ok(report(id, lhs, rhs, threshold, true, Diagnostics::default()))
}

fn limit_threshold(config: &PotentialConfig) -> f64 {
    if config.dimension == 3 && config.n() == 1 {
        1e-6
    } else {
        1e-4
    }
}

/// A path `k(t)` on the variety with `|Im k(t)| = t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum AsymptoticPath {
    /// d = 2: the ray `arg lambda = theta`, `|lambda| > 1`.
    Planar { theta: f64 },
    /// d = 3: `Re k` along `a_dir`, `Im k` along `b_dir`.
    Spatial { a_dir: [f64; 3], b_dir: [f64; 3] },
}

impl AsymptoticPath {
    pub fn k_at(&self, t: f64, energy: f64) -> Result<ComplexMomentum> {
        match *self {
            AsymptoticPath::Planar { theta } => {
                let s = t / energy.sqrt();
                let r = s + (s * s + 1.0).sqrt();
                lambda_to_k(LambdaCoord::new(Complex64::from_polar(r, theta))?, Energy::new(energy)?)
            }
            AsymptoticPath::Spatial { a_dir, b_dir } => build_k_3d(Energy::new(energy)?, &a_dir, &b_dir, t),
        }
    }
}

/// Samples per window in [`check_mu_asymptotic`], log-spaced.
pub const MU_WINDOW_SAMPLES: usize = 24;

pub const DEFAULT_MU_EDGES: [f64; 7] = [5.0, 10.0, 20.0, 40.0, 80.0, 160.0, 320.0];

/// Envelope of `|mu(x, k(t)) - 1|` along the path: its maximum over each window
/// `[t_j, t_{j+1})`, which must strictly decrease; in d = 3 the log-log slope
/// of the envelope against `t_j` must also be at most `-0.8`.
///
/// Pointwise values oscillate with the phase of `Re k . x`, so only the envelope is monotone.
pub fn check_mu_asymptotic(
    config: &PotentialConfig,
    x: &[f64],
    path: &AsymptoticPath,
    edges: &[f64],
    spec: &QuadratureSpec,
) -> Result<IdentityReport> {
    if edges.len() < 3 || edges.windows(2).any(|w| !(w[0] > 0.0 && w[1] > w[0])) {
        return Err(FaddeevError::InvalidInput(
            "need at least three increasing positive window edges".into(),
        ));
    }
    let solver = Solver::new(*spec);
    let mut steps = Vec::new();
    let mut errors = Vec::new();
    let mut notes = Vec::new();
    let mut last = Complex64::new(1.0, 0.0);
    for w in edges.windows(2) {
        let ratio = (w[1] / w[0]).ln() / MU_WINDOW_SAMPLES as f64;
        let mut envelope: f64 = 0.0;
        for i in 0..MU_WINDOW_SAMPLES {
            let t = w[0] * (ratio * i as f64).exp();
            let k = path.k_at(t, config.energy)?;
            match solver.eval_psi(config, x, &Momentum::Complex(k)) {
                Ok(v) => {
                    envelope = envelope.max((v.mu - 1.0).norm());
                    last = v.mu;
                }
                Err(FaddeevError::SpectralSingularity { .. }) => {
                    notes.push(format!("t = {t} skipped: spectral singularity"))
                }
                Err(e) => return Err(e),
            }
        }
        steps.push(w[0]);
        errors.push(envelope);
    }
    let all_zero = errors.iter().all(|&e| e == 0.0);
    let monotone = errors.windows(2).all(|w| w[1] < w[0]);
    let pts: Vec<(f64, f64)> = steps.iter().copied().zip(errors.iter().copied()).collect();
    let order = log_log_slope(&pts);
    let ok = all_zero || (monotone && (config.dimension == 2 || order.is_some_and(|o| o <= -0.8)));
    let rhs = Complex64::new(1.0, 0.0);
    Ok(IdentityReport {
        identity_id: IdentityId::MuAsymptotic,
        lhs: last,
        rhs,
        rel_error: rel_error(last, rhs),
        threshold: f64::INFINITY,
        passed: ok,
        diagnostics: Diagnostics {
            steps,
            errors,
            order,
            oracle_error: None,
            notes,
            side_conditions_ok: ok,
        },
    })
}

/// Second-difference Laplacian residual `|-Delta_h psi - E psi| / |E psi|` over a step sequence.
pub fn check_helmholtz(
    config: &PotentialConfig,
    x: &[f64],
    k: &Momentum,
    steps: &[f64],
    spec: &QuadratureSpec,
) -> Result<IdentityReport> {
    if steps.len() < 2 || steps.iter().any(|h| !(*h > 0.0)) {
        return Err(FaddeevError::InvalidInput(
            "at least two positive steps are required".into(),
        ));
    }
    let dim = config.dimension;
    let xv = vec3(dim, x)?;
    let hmax = steps.iter().copied().fold(0.0, f64::max);
    for j in 0..config.n() {
        if norm(&sub(&xv, &config.z(j))) <= 10.0 * hmax {
            return Err(FaddeevError::InvalidInput(format!("x is within 10 h of point {j}")));
        }
    }
    let solver = Solver::new(*spec);
    let sol = solver.solve_coefficients(config, k)?;
    let psi = |p: &Vec3| solver.psi_from(config, p, k, &sol).map(|v| v.psi);
    let centre = psi(&xv)?;
    let rhs = config.energy * centre;
    let mut residuals = Vec::new();
    let mut lhs = Complex64::new(0.0, 0.0);
    for &h in steps {
        let mut lap = -2.0 * dim as f64 * centre;
        for j in 0..dim {
            for s in [-1.0, 1.0] {
                let mut p = xv;
                p[j] += s * h;
                lap += psi(&p)?;
            }
        }
        lhs = -lap / (h * h);
        residuals.push((lhs - rhs).norm() / rhs.norm().max(1e-300));
    }
    let n = residuals.len();
    let order = (residuals[n - 2] / residuals[n - 1]).ln() / (steps[n - 2] / steps[n - 1]).ln();
    let exact = residuals.iter().all(|&r| r < 1e-12);
    let ok = exact || order >= 1.7;
    Ok(IdentityReport {
        identity_id: IdentityId::Helmholtz,
        lhs,
        rhs,
        rel_error: residuals[n - 1],
        threshold: f64::INFINITY,
        passed: ok,
        diagnostics: Diagnostics {
            steps: steps.to_vec(),
            errors: residuals,
            order: Some(order),
            oracle_error: None,
            notes: vec![],
            side_conditions_ok: ok,
        },
    })
}

/// `|Im G(x, k)| <= 1e-6 (1 + |G|)` for `k` on the variety with real `E`.
pub fn check_reality(x: &[f64], k: &ComplexMomentum, spec: &QuadratureSpec) -> Result<IdentityReport> {
    let g = eval_G(x, k, spec)?.value;
    Ok(report(
        IdentityId::Reality,
        g,
        Complex64::new(g.re, 0.0),
        1e-6,
        true,
        Diagnostics::default(),
    ))
}

/// Sampling controls for [`default_suite`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuiteOptions {
    pub seed: u64,
    pub samples: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self { seed: 0, samples: 4 }
    }
}

fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> Vec3 {
    loop {
        let v: Vec3 = std::array::from_fn(|i| if i < dim { rng.random_range(-1.0..1.0) } else { 0.0 });
        let n = norm(&v);
        if n > 0.1 && n <= 1.0 {
            return scale(&v, 1.0 / n);
        }
    }
}

fn random_x(rng: &mut ChaCha8Rng, config: &PotentialConfig, clearance: f64) -> Vec<f64> {
    loop {
        let x: Vec3 = std::array::from_fn(|i| {
            if i < config.dimension {
                rng.random_range(-1.0..1.5)
            } else {
                0.0
            }
        });
        if (0..config.n()).all(|j| norm(&sub(&x, &config.z(j))) > clearance) {
            return x[..config.dimension].to_vec();
        }
    }
}

/// Reproducible batch of checks at randomly sampled admissible points.
///
/// Samples where the system is singular are skipped and noted in place of a report.
pub fn default_suite(
    config: &PotentialConfig,
    options: &SuiteOptions,
    spec: &QuadratureSpec,
) -> Result<Vec<IdentityReport>> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let dim = config.dimension;
    let e = config.energy;
    let mut out = Vec::new();
    let mut push = |r: Result<IdentityReport>| -> Result<()> {
        match r {
            Ok(r) => out.push(r),
            Err(FaddeevError::SpectralSingularity { .. }) => {}
            Err(e) => return Err(e),
        }
        Ok(())
    };
    let complex_k = |rng: &mut ChaCha8Rng| -> Result<ComplexMomentum> {
        if dim == 2 {
            let r: f64 = if rng.random_bool(0.5) {
                rng.random_range(1.3..3.0)
            } else {
                rng.random_range(0.33..0.77)
            };
            lambda_to_k(
                LambdaCoord::new(Complex64::from_polar(r, rng.random_range(0.0..2.0 * PI)))?,
                Energy::new(e)?,
            )
        } else {
            let a = random_unit(rng, 3);
            let b = orthogonal_unit(3, &a);
            let beta = rng.random_range(0.5f64..2.5).max((-e).max(0.0).sqrt() + 0.5);
            build_k_3d(Energy::new(e)?, &a, &b, beta)
        }
    };
    for _ in 0..options.samples {
        let x = random_x(&mut rng, config, 0.5);
        let k = complex_k(&mut rng)?;
        push(check_reality(&x, &k, spec))?;
        push(check_helmholtz(
            config,
            &x,
            &Momentum::Complex(k),
            &DEFAULT_HELMHOLTZ_STEPS,
            spec,
        ))?;
        if e > 0.0 {
            let dir = random_unit(&mut rng, dim);
            let kp = scale(&dir, e.sqrt());
            let gamma = orthogonal_unit(dim, &kp);
            let gamma = if rng.random_bool(0.5) {
                gamma
            } else {
                scale(&gamma, -1.0)
            };
            let km = RealLimitMomentum::new(dim, &kp[..dim], &gamma[..dim])?;
            push(check_helmholtz(
                config,
                &x,
                &Momentum::Gamma(km),
                &DEFAULT_HELMHOLTZ_STEPS,
                spec,
            ))?;
            push(check_helmholtz(
                config,
                &x,
                &Momentum::plus(dim, &kp[..dim])?,
                &DEFAULT_HELMHOLTZ_STEPS,
                spec,
            ))?;
            push(check_limit_relation(
                config,
                &kp[..dim],
                &gamma[..dim],
                &LimitTarget::Psi(x.clone()),
                spec,
            ))?;
            let ldir = random_unit(&mut rng, dim);
            let l = scale(&ldir, e.sqrt());
            push(check_limit_relation(
                config,
                &kp[..dim],
                &gamma[..dim],
                &LimitTarget::H(l[..dim].to_vec()),
                spec,
            ))?;
        }
        if dim == 2 {
            let lambda = crate::geometry::k_to_lambda(&k, Energy::new(e)?)?.value();
            push(check_dbar(
                config,
                lambda,
                &DbarTarget::Psi(x.clone()),
                &DEFAULT_DBAR_STEPS,
                spec,
            ))?;
            let p = random_x(&mut rng, config, 0.0);
            push(check_dbar(config, lambda, &DbarTarget::H(p), &DEFAULT_DBAR_STEPS, spec))?;
        }
    }
    let x = random_x(&mut rng, config, 0.5);
    let path = if dim == 2 {
        AsymptoticPath::Planar {
            theta: rng.random_range(0.0..2.0 * PI),
        }
    } else {
        let a = random_unit(&mut rng, 3);
        let b = orthogonal_unit(3, &a);
        AsymptoticPath::Spatial { a_dir: a, b_dir: b }
    };
    push(check_mu_asymptotic(config, &x, &path, &DEFAULT_MU_EDGES, spec))?;
    Ok(out)
}
