//! Truncated Fourier integrals `I_N(x) = int_{|xi| <= N} e^{i xi x} / (xi^2 + 2 k xi) dxi`.
//!
//! Write `xi = eta + t bhat` with `eta` orthogonal to `b`. Then
//! `xi^2 + 2 k xi = (t + i beta)^2 + c(eta)` with `c = |eta|^2 + 2 a.eta + beta^2`,
//! and the `t`-integral over `|t| <= sqrt(N^2 - |eta|^2)` has a closed form in
//! terms of the scaled exponential integral. The remaining `eta` integral is
//! adaptive, in polar coordinates about the origin, with breakpoints on the
//! circle `c = beta^2` where the `t`-integral jumps.

use num_complex::Complex64;
use std::cell::RefCell;
use std::f64::consts::{FRAC_PI_2, PI};

use super::panels;
use crate::error::{FaddeevError, Result};
use crate::geometry::{cross, dot, orthogonal_unit, scale, sub, ComplexMomentum, Vec3};
use crate::quadrature::{integrate, integrate_semi_infinite, Estimate, QuadratureSpec};
use crate::special::expint_e1_scaled;

/// `int_{-L}^{L} e^{i y t} / (t - p) dt`.
fn pole_integral(p: Complex64, half: f64, y: f64) -> Complex64 {
    if y == 0.0 {
        // Constant imaginary part along the path; +0 keeps both arguments on one side.
        let im = if p.im == 0.0 { 0.0 } else { -p.im };
        let hi = Complex64::new(half - p.re, im);
        let lo = Complex64::new(-half - p.re, im);
        return Complex64::new((hi.norm() / lo.norm()).ln(), hi.im.atan2(hi.re) - lo.im.atan2(lo.re));
    }
    let w = |t: f64| Complex64::new(-y * p.im, -y * (t - p.re));
    let mut v = Complex64::from_polar(1.0, -y * half) * expint_e1_scaled(w(-half))
        - Complex64::from_polar(1.0, y * half) * expint_e1_scaled(w(half));
    if y * p.im > 0.0 && p.re.abs() < half {
        // The path crosses the branch cut of E1.
        v += Complex64::new(0.0, 2.0 * PI * y.signum()) * (Complex64::i() * y * p).exp();
    }
    v
}

/// `int_{-L}^{L} e^{i y t} / ((t + i beta)^2 + c) dt`.
fn line_integral(c: f64, beta: f64, half: f64, y: f64, spec: &QuadratureSpec) -> Result<Complex64> {
    if half <= 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let sc = Complex64::new(c, 0.0).sqrt();
    let i = Complex64::i();
    let plus = Complex64::new(0.0, -beta) + i * sc;
    let minus = Complex64::new(0.0, -beta) - i * sc;
    if 2.0 * sc.norm() >= 1e-3 * plus.norm().max(half) {
        return Ok((pole_integral(plus, half, y) - pole_integral(minus, half, y)) / (2.0 * i * sc));
    }
    // Nearly double pole at -i beta: partial fractions cancel, integrate directly.
    let e = integrate(
        |t: f64| {
            let d = (Complex64::new(t, beta)).powi(2) + c;
            Complex64::from_polar(1.0, y * t) / d
        },
        -half,
        half,
        &[],
        panels(2.0 * half, y.abs() + 1.0 / beta.max(1e-3)),
        spec,
    )?;
    Ok(e.value)
}

pub(crate) struct Frame {
    dim: usize,
    beta: f64,
    a_norm: f64,
    y: f64,
    x_a: f64,
    x_e: f64,
}

impl Frame {
    pub(crate) fn new(x: &Vec3, k: &ComplexMomentum) -> Result<Self> {
        let beta = k.im_norm();
        if beta == 0.0 {
            return Err(FaddeevError::InvalidInput("cutoff integrals need Im k != 0".into()));
        }
        let bhat = scale(k.im(), 1.0 / beta);
        let a_norm = k.re_norm();
        let ahat = if a_norm > 0.0 {
            scale(k.re(), 1.0 / a_norm)
        } else {
            orthogonal_unit(k.dim(), &bhat)
        };
        let y = dot(x, &bhat);
        let xp = sub(x, &scale(&bhat, y));
        let x_a = dot(&xp, &ahat);
        let x_e = if k.dim() == 3 {
            dot(&xp, &cross(&bhat, &ahat))
        } else {
            0.0
        };
        Ok(Self {
            dim: k.dim(),
            beta,
            a_norm,
            y,
            x_a,
            x_e,
        })
    }

    fn transverse(&self) -> f64 {
        (self.x_a * self.x_a + self.x_e * self.x_e).sqrt()
    }
}

/// `I_N(x)` for `Im k != 0` and `N > 0`.
pub fn ball_integral(x: &[f64], k: &ComplexMomentum, cutoff: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    Ok(ball_integrals(x, k, &[cutoff], spec)?.remove(0))
}

/// `I_N(x)` for several cutoffs, sharing the work below the smallest one.
pub fn ball_integrals(x: &[f64], k: &ComplexMomentum, cutoffs: &[f64], spec: &QuadratureSpec) -> Result<Vec<Estimate>> {
    spec.validate()?;
    if let Some(bad) = cutoffs.iter().find(|n| !(**n > 0.0 && n.is_finite())) {
        return Err(FaddeevError::InvalidInput(format!(
            "cutoff must be positive, got {bad}"
        )));
    }
    let xv = crate::geometry::vec3(k.dim(), x)?;
    let frame = Frame::new(&xv, k)?;
    let inner_spec = QuadratureSpec {
        rel_tol: spec.rel_tol * 0.1,
        abs_tol: spec.abs_tol * 0.1,
        ..*spec
    };
    let core = |n: f64| -> Result<Estimate> {
        if frame.dim == 2 {
            let mut total = Estimate::zero();
            for sign in [1.0, -1.0] {
                total = total + radial(&frame, n, sign, 0.0, &inner_spec)?;
            }
            Ok(total)
        } else {
            azimuthal(&frame, n, spec, &inner_spec)
        }
    };
    if frame.dim == 2 {
        return cutoffs.iter().map(|&n| core(n)).collect();
    }
    // Beyond 2|a| the sphere integral has a Laplace representation; only the
    // core ball needs the slab decomposition.
    let start = 2.0 * frame.a_norm + 2.0;
    let mut order: Vec<usize> = (0..cutoffs.len()).collect();
    order.sort_by(|&i, &j| cutoffs[i].total_cmp(&cutoffs[j]));
    let mut out = vec![Estimate::zero(); cutoffs.len()];
    let mut running: Option<(f64, Estimate)> = None;
    for i in order {
        let n = cutoffs[i];
        let est = if n <= start {
            core(n)?
        } else {
            let (from, base) = match running {
                Some(state) => state,
                None => (start, core(start)?),
            };
            base + shell_3d(&xv, k, from, n, spec)?
        };
        if n > start {
            running = Some((n, est));
        }
        out[i] = est;
    }
    Ok(out)
}

/// `e^{-tau rho} int_{S^2} e^{omega . v} domega` with `z = v . v`.
fn sphere_mean(z: Complex64, decay: f64) -> Complex64 {
    let w = z.sqrt();
    if w.norm_sqr() < 1e-4 {
        let series = 1.0 + z / 6.0 + z * z / 120.0 + z * z * z / 5040.0;
        return series * (4.0 * PI * (-decay).exp());
    }
    ((w - decay).exp() - (-w - decay).exp()) * (2.0 * PI) / w
}

/// Shell `r0 < |xi| < r1` in d = 3 for `r0 > 2|a|`, using
/// `1/(rho + 2 k.omega) = int_0^inf e^{-tau (rho + 2 k.omega)} dtau`.
fn shell_3d(x: &Vec3, k: &ComplexMomentum, r0: f64, r1: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    let xx = dot(x, x);
    let kx = k.dot_real(x);
    let kk = k.square();
    let a = k.re_norm();
    let inner_spec = QuadratureSpec {
        rel_tol: spec.rel_tol * 0.1,
        abs_tol: spec.abs_tol * 0.1,
        ..*spec
    };
    let failure = RefCell::new(None);
    let inner_error = RefCell::new(0.0f64);
    let integrand = |rho: f64| {
        let f = |tau: f64| {
            let z = -rho * rho * xx - Complex64::i() * (4.0 * rho * tau) * kx + 4.0 * tau * tau * kk;
            sphere_mean(z, tau * rho)
        };
        match integrate_semi_infinite(f, 0.0, 1.0 / (rho - a), &inner_spec) {
            Ok(e) => {
                let mut m = inner_error.borrow_mut();
                *m = m.max(rho * e.abs_error);
                e.value * rho
            }
            Err(err) => {
                failure.borrow_mut().get_or_insert(err);
                Complex64::new(0.0, 0.0)
            }
        }
    };
    let e = integrate(integrand, r0, r1, &[], panels(r1 - r0, xx.sqrt()), spec)?;
    if let Some(err) = failure.into_inner() {
        return Err(err);
    }
    Ok(Estimate {
        abs_error: e.abs_error + (r1 - r0) * inner_error.into_inner(),
        ..e
    })
}

#[cfg(test)]
pub(super) fn slab_only(x: &[f64], k: &ComplexMomentum, cutoff: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    let xv = crate::geometry::vec3(k.dim(), x)?;
    let frame = Frame::new(&xv, k)?;
    let inner = QuadratureSpec {
        rel_tol: spec.rel_tol * 0.1,
        abs_tol: spec.abs_tol * 0.1,
        ..*spec
    };
    azimuthal(&frame, cutoff, spec, &inner)
}

/// Integral along one ray `eta = rho (cos phi ahat + sin phi ehat)`, weighted by `rho^{d-2}`.
pub(crate) fn radial(
    frame: &Frame,
    cutoff: f64,
    cos_phi: f64,
    sin_phi: f64,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    let failure = RefCell::new(None);
    let proj = cos_phi * frame.x_a + sin_phi * frame.x_e;
    let n = cutoff;
    let two_a = 2.0 * frame.a_norm;
    let integrand = |theta: f64| {
        let (s, c) = theta.sin_cos();
        let rho = n * s;
        let half = n * c;
        let cc = rho * rho + two_a * rho * cos_phi + frame.beta * frame.beta;
        let jac = if frame.dim == 2 { n * c } else { n * n * s * c };
        match line_integral(cc, frame.beta, half, frame.y, spec) {
            Ok(v) => v * Complex64::from_polar(jac, rho * proj),
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                Complex64::new(0.0, 0.0)
            }
        }
    };
    let mut breaks = Vec::new();
    let jump = -two_a * cos_phi;
    if jump > 0.0 && jump < n {
        breaks.push((jump / n).asin());
    }
    let freq = n * (proj.abs() + frame.y.abs());
    let e = integrate(integrand, 0.0, FRAC_PI_2, &breaks, panels(FRAC_PI_2, freq), spec)?;
    match failure.into_inner() {
        Some(err) => Err(err),
        None => Ok(e),
    }
}

fn azimuthal(frame: &Frame, cutoff: f64, spec: &QuadratureSpec, inner: &QuadratureSpec) -> Result<Estimate> {
    let failure = RefCell::new(None);
    let inner_error = RefCell::new(0.0f64);
    let integrand = |phi: f64| {
        let (s, c) = phi.sin_cos();
        match radial(frame, cutoff, c, s, inner) {
            Ok(e) => {
                let mut m = inner_error.borrow_mut();
                *m = m.max(e.abs_error);
                e.value
            }
            Err(err) => {
                failure.borrow_mut().get_or_insert(err);
                Complex64::new(0.0, 0.0)
            }
        }
    };
    let mut breaks = vec![-FRAC_PI_2, 0.0, FRAC_PI_2];
    let two_a = 2.0 * frame.a_norm;
    if cutoff < two_a {
        let phi = (-cutoff / two_a).acos();
        breaks.extend([phi, -phi]);
    }
    let symmetric = frame.x_e == 0.0;
    let (lo, factor) = if symmetric { (0.0, 2.0) } else { (-PI, 1.0) };
    let freq = cutoff * frame.transverse();
    let e = integrate(integrand, lo, PI, &breaks, panels(PI - lo, freq), spec)?;
    if let Some(err) = failure.into_inner() {
        return Err(err);
    }
    Ok(Estimate {
        value: e.value * factor,
        abs_error: factor * (e.abs_error + (PI - lo) * inner_error.into_inner()),
        evaluations: e.evaluations,
    })
}

/// The diagonal cutoff integral `I_N(0)`.
pub fn cutoff_integral(cutoff: f64, k: &ComplexMomentum, spec: &QuadratureSpec) -> Result<Estimate> {
    let zero = vec![0.0; k.dim()];
    ball_integral(&zero, k, cutoff, spec)
}
