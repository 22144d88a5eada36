//! Faddeev Green functions `g`, `G = e^{ikx} g`, the real-limit `g_gamma` and
//! the outgoing `g_plus`.
//!
//! With `k = a + i b`, `beta = |b|`, `y = x . b/beta`, `r = |x - y b/beta|`, the
//! Fourier integral is reduced by residues along `b`. What remains is the
//! outgoing Helmholtz kernel plus one-dimensional integrals over bounded
//! ranges:
//!
//! ```text
//! G = G+(|x|) + w_d [J_in + J_mid],      w_d = pi / (2 pi)^d
//! J_mid = int_{u0}^{beta} M(u) e^{-u y} du
//! M_2(u) = 2 cos(r s) / s,  M_3(u) = 2 pi J0(r s),  s = sqrt(E + u^2)
//! ```
//!
//! `J_in` is the arc (d = 2) or cap (d = 3) integral over the real sphere
//! `|xi| = sqrt(E)` with `xi . b > 0`. For `y > 0` and `beta y > 1` the
//! equivalent tail form `G = -w_d int_beta^inf M(u) e^{-u y} du` is used
//! instead, because the direct form cancels there.

mod ball;
mod cache;
mod oracle;

pub use ball::{ball_integral, ball_integrals, cutoff_integral};
pub use cache::GreenCache;
pub use oracle::{oracle_g_direct, oracle_g_sweep, OracleEstimate, OracleMesh};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{FaddeevError, Result};
use crate::geometry::{dot, norm, scale, sub, ComplexMomentum, RealLimitMomentum, Vec3};
use crate::quadrature::{integrate, Estimate, QuadratureSpec};
use crate::special::{bessel_j0, hankel_h0};

/// How a Green value was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GreenMethod {
    ReducedQuadrature,
    ClosedForm,
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GreenEvaluation {
    pub value: Complex64,
    pub abs_error_estimate: f64,
    pub method: GreenMethod,
}

impl GreenEvaluation {
    fn scaled(self, factor: Complex64) -> Self {
        Self {
            value: self.value * factor,
            abs_error_estimate: self.abs_error_estimate * factor.norm(),
            ..self
        }
    }
}

/// Tail integrals are cut where `e^{-(u - beta) y}` drops below `e^{-42}`.
const TAIL_DECAY: f64 = 42.0;
const MAX_START_PANELS: usize = 4096;
const ROUNDOFF: f64 = 4.0 * f64::EPSILON;

/// `pi / (2 pi)^d`
pub(crate) fn weight(dim: usize) -> f64 {
    PI / (2.0 * PI).powi(dim as i32)
}

fn panels(length: f64, frequency: f64) -> usize {
    let n = (length.abs() * frequency / PI).ceil();
    (n as usize).clamp(1, MAX_START_PANELS) + 1
}

fn require_nonzero_x(x: &Vec3) -> Result<()> {
    if norm(x) == 0.0 {
        Err(FaddeevError::InvalidInput(
            "the Green function is singular at x = 0".into(),
        ))
    } else {
        Ok(())
    }
}

fn vector_arg(dim: usize, x: &[f64]) -> Result<Vec3> {
    crate::geometry::vec3(dim, x)
}

/// Outgoing solution of `(Delta + E) G = delta` as a function of `R = |x|`.
///
/// For `d = 3` any real `E` is accepted (decaying branch for `E < 0`).
pub fn outgoing_kernel(dim: usize, energy: f64, radius: f64) -> Result<Complex64> {
    match dim {
        3 => {
            let kappa = Complex64::new(energy, 0.0).sqrt();
            Ok(-(Complex64::i() * kappa * radius).exp() / (4.0 * PI * radius))
        }
        2 if energy > 0.0 => Ok(Complex64::new(0.0, -0.25) * hankel_h0(energy.sqrt() * radius)),
        2 => Err(FaddeevError::InvalidInput(format!(
            "d = 2 requires E > 0, got {energy}"
        ))),
        _ => Err(FaddeevError::InvalidInput(format!("unsupported dimension {dim}"))),
    }
}

/// Radial weight `M_d(u)`.
fn radial_weight(dim: usize, energy: f64, r: f64, u: f64) -> f64 {
    let s = (energy + u * u).max(0.0).sqrt();
    if dim == 2 {
        2.0 * (r * s).cos() / s
    } else {
        2.0 * PI * bessel_j0(r * s)
    }
}

/// Cap/arc integral over `|xi| = sqrt(E)`, `xi . bhat > 0`, without the weight `w_d`.
fn cap_integral(dim: usize, energy: f64, r: f64, y: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    if energy <= 0.0 {
        return Ok(Estimate::zero());
    }
    let kappa = energy.sqrt();
    let freq = kappa * (r * r + y * y).sqrt();
    if dim == 2 {
        let e = integrate(
            |t: f64| (Complex64::i() * kappa * (r * t.cos() + y * t.sin())).exp(),
            0.0,
            PI,
            &[],
            panels(PI, freq),
            spec,
        )?;
        Ok(scaled(e, Complex64::i()))
    } else {
        let e = integrate(
            |q: f64| {
                let s = (energy - q * q).max(0.0).sqrt();
                Complex64::from_polar(bessel_j0(r * s), q * y)
            },
            0.0,
            kappa,
            &[],
            panels(kappa, r.max(y.abs())),
            spec,
        )?;
        Ok(scaled(e, Complex64::new(0.0, 2.0 * PI)))
    }
}

fn scaled(e: Estimate, f: Complex64) -> Estimate {
    Estimate {
        value: e.value * f,
        abs_error: e.abs_error * f.norm(),
        evaluations: e.evaluations,
    }
}

/// `g(x, k)` for `Im k != 0`.
pub fn eval_g(x: &[f64], k: &ComplexMomentum, spec: &QuadratureSpec) -> Result<GreenEvaluation> {
    spec.validate()?;
    let x = vector_arg(k.dim(), x)?;
    require_nonzero_x(&x)?;
    reduced_g(&x, k, spec)
}

fn reduced_g(x: &Vec3, k: &ComplexMomentum, spec: &QuadratureSpec) -> Result<GreenEvaluation> {
    let dim = k.dim();
    let beta = k.im_norm();
    if beta == 0.0 {
        return Err(FaddeevError::InvalidInput(
            "eval_g needs Im k != 0; use eval_g_gamma or eval_g_plus on the real boundary".into(),
        ));
    }
    let energy = k.energy();
    if dim == 2 && energy <= 0.0 {
        return Err(FaddeevError::InvalidInput(format!(
            "d = 2 requires E > 0, got {energy}"
        )));
    }
    let bhat = scale(k.im(), 1.0 / beta);
    let y = dot(x, &bhat);
    let r = norm(&sub(x, &scale(&bhat, y)));
    let w = weight(dim);
    let phase = Complex64::from_polar(1.0, -dot(k.re(), x));

    if y > 0.0 && beta * y > 1.0 {
        let span = TAIL_DECAY / y;
        let e = integrate(
            |u: f64| Complex64::new(radial_weight(dim, energy, r, u) * (-(u - beta) * y).exp(), 0.0),
            beta,
            beta + span,
            &[],
            panels(span, r),
            spec,
        )?;
        let value = -w * phase * e.value;
        return Ok(GreenEvaluation {
            value,
            abs_error_estimate: w * e.abs_error + ROUNDOFF * value.norm(),
            method: GreenMethod::ReducedQuadrature,
        });
    }

    let outgoing = outgoing_kernel(dim, energy, norm(x))?;
    let cap = cap_integral(dim, energy, r, y, spec)?;
    let u_lo = (-energy).max(0.0).sqrt();
    let mid = integrate(
        |u: f64| Complex64::new(radial_weight(dim, energy, r, u) * ((beta - u) * y).exp(), 0.0),
        u_lo,
        beta,
        &[],
        panels(beta - u_lo, r + 0.25 * y.abs()),
        spec,
    )?;
    let grow = (beta * y).exp();
    let regular = outgoing + w * cap.value;
    let value = phase * (grow * regular + w * mid.value);
    let err = grow * (w * cap.abs_error + ROUNDOFF * (outgoing.norm() + w * cap.value.norm()))
        + w * mid.abs_error
        + ROUNDOFF * value.norm();
    Ok(GreenEvaluation {
        value,
        abs_error_estimate: err,
        method: GreenMethod::ReducedQuadrature,
    })
}

/// `G(x, k) = e^{ikx} g(x, k)`; real-valued for real `E`.
#[allow(non_snake_case)]
pub fn eval_G(x: &[f64], k: &ComplexMomentum, spec: &QuadratureSpec) -> Result<GreenEvaluation> {
    let g = eval_g(x, k, spec)?;
    let xv = vector_arg(k.dim(), x)?;
    Ok(g.scaled(k.plane_wave(&xv)))
}

/// `g_plus(x, k) = e^{-ikx} G+(|x|, |k|)` for real `k != 0`.
pub fn eval_g_plus(x: &[f64], k_real: &[f64], _spec: &QuadratureSpec) -> Result<GreenEvaluation> {
    let dim = x.len();
    let xv = vector_arg(dim, x)?;
    let kv = vector_arg(dim, k_real)?;
    require_nonzero_x(&xv)?;
    if norm(&kv) == 0.0 {
        return Err(FaddeevError::InvalidInput("g_plus needs k != 0".into()));
    }
    let big = outgoing_kernel(dim, dot(&kv, &kv), norm(&xv))?;
    let value = big * Complex64::from_polar(1.0, -dot(&kv, &xv));
    Ok(GreenEvaluation {
        value,
        abs_error_estimate: ROUNDOFF * 4.0 * value.norm(),
        method: GreenMethod::ClosedForm,
    })
}

/// `G+(x, k)` for real `k != 0`.
#[allow(non_snake_case)]
pub fn eval_G_plus(x: &[f64], k_real: &[f64], spec: &QuadratureSpec) -> Result<GreenEvaluation> {
    let g = eval_g_plus(x, k_real, spec)?;
    let phase: f64 = x.iter().zip(k_real).map(|(a, b)| a * b).sum();
    Ok(g.scaled(Complex64::from_polar(1.0, phase)))
}

/// `g_gamma(x, k') = e^{-ik'x} G_gamma(x, k')`, the limit of `g(x, k' + i eps gamma)`.
pub fn eval_g_gamma(x: &[f64], k: &RealLimitMomentum, spec: &QuadratureSpec) -> Result<GreenEvaluation> {
    let big = eval_G_gamma(x, k, spec)?;
    let xv = vector_arg(k.dim(), x)?;
    Ok(big.scaled(Complex64::from_polar(1.0, -dot(k.k_prime(), &xv))))
}

/// `G_gamma(x, k') = G+(x, k') + w_d J_in`, with the cap taken about `gamma`.
#[allow(non_snake_case)]
pub fn eval_G_gamma(x: &[f64], k: &RealLimitMomentum, spec: &QuadratureSpec) -> Result<GreenEvaluation> {
    spec.validate()?;
    let xv = vector_arg(k.dim(), x)?;
    require_nonzero_x(&xv)?;
    let energy = k.energy();
    let y = dot(&xv, k.gamma());
    let r = norm(&sub(&xv, &scale(k.gamma(), y)));
    let outgoing = outgoing_kernel(k.dim(), energy, norm(&xv))?;
    let cap = cap_integral(k.dim(), energy, r, y, spec)?;
    let w = weight(k.dim());
    let value = outgoing + w * cap.value;
    Ok(GreenEvaluation {
        value,
        abs_error_estimate: w * cap.abs_error + ROUNDOFF * (outgoing.norm() + w * cap.value.norm()),
        method: GreenMethod::ReducedQuadrature,
    })
}

/// The correction `G_gamma - G+` at `x`, i.e. `w_d J_in` (finite at `x = 0`).
pub fn gamma_correction(dim: usize, x: &[f64], k: &RealLimitMomentum, spec: &QuadratureSpec) -> Result<Complex64> {
    let xv = vector_arg(dim, x)?;
    let y = dot(&xv, k.gamma());
    let r = norm(&sub(&xv, &scale(k.gamma(), y)));
    Ok(weight(dim) * cap_integral(dim, k.energy(), r, y, spec)?.value)
}
