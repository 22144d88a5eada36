//! Complex momenta on the fixed-energy varieties and the planar lambda chart.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{FaddeevError, Result};

/// Relative tolerance for variety membership.
pub const VARIETY_REL_TOL: f64 = 1e-10;
/// Absolute tolerance for variety membership.
pub const VARIETY_ABS_TOL: f64 = 1e-12;

/// A real vector in dimension 2 or 3, zero-padded to three slots.
pub type Vec3 = [f64; 3];

#[inline]
pub fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn norm(a: &Vec3) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn sub(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn add(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn scale(a: &Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Copy a slice of length `dim` into a padded vector.
pub fn vec3(dim: usize, v: &[f64]) -> Result<Vec3> {
    check_dim(dim)?;
    if v.len() != dim {
        return Err(FaddeevError::InvalidInput(format!(
            "expected a {dim}-vector, got {} components",
            v.len()
        )));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(FaddeevError::InvalidInput("vector components must be finite".into()));
    }
    let mut out = [0.0; 3];
    out[..dim].copy_from_slice(v);
    Ok(out)
}

pub fn check_dim(dim: usize) -> Result<()> {
    if dim == 2 || dim == 3 {
        Ok(())
    } else {
        Err(FaddeevError::InvalidInput(format!(
            "dimension must be 2 or 3, got {dim}"
        )))
    }
}

fn close(a: f64, b: f64, scale: f64) -> bool {
    (a - b).abs() <= VARIETY_ABS_TOL + VARIETY_REL_TOL * scale
}

/// Fixed real energy.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Energy(f64);

impl Energy {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() {
            Ok(Self(value))
        } else {
            Err(FaddeevError::InvalidInput("energy must be finite".into()))
        }
    }

    pub fn positive(value: f64) -> Result<Self> {
        let e = Self::new(value)?;
        if value > 0.0 {
            Ok(e)
        } else {
            Err(FaddeevError::InvalidInput(format!(
                "energy must be positive for the lambda chart, got {value}"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// `k = a + i b` with `a . b = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexMomentum {
    dim: usize,
    re: Vec3,
    im: Vec3,
}

impl ComplexMomentum {
    /// Checks the orthogonality `a . b = 0`.
    pub fn new(dim: usize, re: &[f64], im: &[f64]) -> Result<Self> {
        let re = vec3(dim, re)?;
        let im = vec3(dim, im)?;
        let scale = norm(&re) * norm(&im);
        if !close(dot(&re, &im), 0.0, scale) {
            return Err(FaddeevError::OffVariety(format!(
                "Re k . Im k = {:e} is not zero",
                dot(&re, &im)
            )));
        }
        Ok(Self { dim, re, im })
    }

    pub(crate) fn from_parts(dim: usize, re: Vec3, im: Vec3) -> Self {
        Self { dim, re, im }
    }

    /// A real momentum (the `b = 0` boundary).
    pub fn real(dim: usize, k: &[f64]) -> Result<Self> {
        let re = vec3(dim, k)?;
        Ok(Self { dim, re, im: [0.0; 3] })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn re(&self) -> &Vec3 {
        &self.re
    }

    pub fn im(&self) -> &Vec3 {
        &self.im
    }

    pub fn re_norm(&self) -> f64 {
        norm(&self.re)
    }

    pub fn im_norm(&self) -> f64 {
        norm(&self.im)
    }

    /// `k . k`
    pub fn square(&self) -> Complex64 {
        Complex64::new(
            dot(&self.re, &self.re) - dot(&self.im, &self.im),
            2.0 * dot(&self.re, &self.im),
        )
    }

    /// The energy `|a|^2 - |b|^2` carried by this momentum.
    pub fn energy(&self) -> f64 {
        dot(&self.re, &self.re) - dot(&self.im, &self.im)
    }

    /// `k . x` for real `x`.
    pub fn dot_real(&self, x: &Vec3) -> Complex64 {
        Complex64::new(dot(&self.re, x), dot(&self.im, x))
    }

    /// `e^{i k . x}`
    pub fn plane_wave(&self, x: &Vec3) -> Complex64 {
        (Complex64::i() * self.dot_real(x)).exp()
    }

    pub fn neg(&self) -> Self {
        Self {
            dim: self.dim,
            re: scale(&self.re, -1.0),
            im: scale(&self.im, -1.0),
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            dim: self.dim,
            re: self.re,
            im: scale(&self.im, -1.0),
        }
    }

    pub fn shifted(&self, xi: &Vec3) -> Self {
        Self {
            dim: self.dim,
            re: add(&self.re, xi),
            im: self.im,
        }
    }

    pub fn components(&self) -> Vec<Complex64> {
        (0..self.dim).map(|j| Complex64::new(self.re[j], self.im[j])).collect()
    }

    pub fn is_on_variety(&self, energy: Energy) -> bool {
        let s = self.square();
        let scale = dot(&self.re, &self.re) + dot(&self.im, &self.im);
        close(s.re, energy.value(), scale) && close(s.im, 0.0, scale)
    }

    pub fn require_on_variety(&self, energy: Energy) -> Result<()> {
        if self.is_on_variety(energy) {
            Ok(())
        } else {
            Err(FaddeevError::OffVariety(format!(
                "k^2 = {} differs from E = {}",
                self.square(),
                energy.value()
            )))
        }
    }
}

/// Nonzero chart coordinate on the planar variety.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaCoord(Complex64);

impl LambdaCoord {
    pub fn new(value: Complex64) -> Result<Self> {
        if !(value.re.is_finite() && value.im.is_finite()) {
            return Err(FaddeevError::InvalidInput("lambda must be finite".into()));
        }
        if value.norm() == 0.0 {
            return Err(FaddeevError::InvalidInput("lambda must be nonzero".into()));
        }
        Ok(Self(value))
    }

    pub fn value(self) -> Complex64 {
        self.0
    }
}

/// `k1 = (1/l + l) sqrt(E)/2`, `k2 = i (1/l - l) sqrt(E)/2`.
pub fn lambda_to_k(lambda: LambdaCoord, energy: Energy) -> Result<ComplexMomentum> {
    let e = Energy::positive(energy.value())?;
    let l = lambda.value();
    let half = 0.5 * e.value().sqrt();
    let inv = l.inv();
    let k1 = (inv + l) * half;
    let k2 = Complex64::i() * (inv - l) * half;
    // a . b = 0 holds identically; rounding is removed by projecting b.
    let re = [k1.re, k2.re, 0.0];
    let mut im = [k1.im, k2.im, 0.0];
    let rr = dot(&re, &re);
    if rr > 0.0 {
        let p = dot(&re, &im) / rr;
        im = sub(&im, &scale(&re, p));
    }
    Ok(ComplexMomentum::from_parts(2, re, im))
}

/// Inverse chart: `lambda = (k1 + i k2) / sqrt(E)`.
pub fn k_to_lambda(k: &ComplexMomentum, energy: Energy) -> Result<LambdaCoord> {
    if k.dim() != 2 {
        return Err(FaddeevError::InvalidInput(
            "the lambda chart exists only for d = 2".into(),
        ));
    }
    let e = Energy::positive(energy.value())?;
    k.require_on_variety(e)?;
    let c = k.components();
    LambdaCoord::new((c[0] + Complex64::i() * c[1]) / e.value().sqrt())
}

/// `dk/dlambda` along the chart.
pub fn lambda_tangent(lambda: Complex64, energy: f64) -> [Complex64; 2] {
    let half = 0.5 * energy.sqrt();
    let inv2 = (lambda * lambda).inv();
    [
        (Complex64::new(1.0, 0.0) - inv2) * half,
        -Complex64::i() * (Complex64::new(1.0, 0.0) + inv2) * half,
    ]
}

/// `k = sqrt(E + |b|^2) a_dir + i |b| b_dir` on the 3D variety.
pub fn build_k_3d(energy: Energy, a_dir: &[f64], b_dir: &[f64], b_norm: f64) -> Result<ComplexMomentum> {
    let a = vec3(3, a_dir)?;
    let b = vec3(3, b_dir)?;
    for (v, name) in [(&a, "a_dir"), (&b, "b_dir")] {
        if !close(norm(v), 1.0, 1.0) {
            return Err(FaddeevError::InvalidInput(format!("{name} must be a unit vector")));
        }
    }
    if !close(dot(&a, &b), 0.0, 1.0) {
        return Err(FaddeevError::InvalidInput(format!(
            "a_dir . b_dir = {} must vanish",
            dot(&a, &b)
        )));
    }
    if !(b_norm >= 0.0 && b_norm.is_finite()) {
        return Err(FaddeevError::InvalidInput("b_norm must be nonnegative".into()));
    }
    let re_sq = energy.value() + b_norm * b_norm;
    if re_sq <= 0.0 {
        return Err(FaddeevError::InvalidInput(format!(
            "E + |b|^2 = {re_sq} must be positive"
        )));
    }
    Ok(ComplexMomentum::from_parts(
        3,
        scale(&a, re_sq.sqrt()),
        scale(&b, b_norm),
    ))
}

/// Membership in the pair variety: equal imaginary parts, both on the energy shell.
pub fn validate_pair_theta(k: &ComplexMomentum, l: &ComplexMomentum, energy: Energy) -> bool {
    if k.dim() != l.dim() {
        return false;
    }
    let scale = k.im_norm().max(l.im_norm()).max(1.0);
    let same_im = (0..3).all(|j| close(k.im()[j], l.im()[j], scale));
    same_im && k.is_on_variety(energy) && l.is_on_variety(energy)
}

/// Real momentum `k'` with a unit direction `gamma`, `k' . gamma = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealLimitMomentum {
    dim: usize,
    k_prime: Vec3,
    gamma: Vec3,
}

impl RealLimitMomentum {
    pub fn new(dim: usize, k_prime: &[f64], gamma: &[f64]) -> Result<Self> {
        let k = vec3(dim, k_prime)?;
        let g = vec3(dim, gamma)?;
        if !close(norm(&g), 1.0, 1.0) {
            return Err(FaddeevError::InvalidInput("gamma must be a unit vector".into()));
        }
        if norm(&k) == 0.0 {
            return Err(FaddeevError::InvalidInput("k' must be nonzero".into()));
        }
        if !close(dot(&k, &g), 0.0, norm(&k)) {
            return Err(FaddeevError::InvalidInput(format!(
                "k' . gamma = {} must vanish",
                dot(&k, &g)
            )));
        }
        Ok(Self {
            dim,
            k_prime: k,
            gamma: g,
        })
    }

    /// Also checks `k'^2 = E`.
    pub fn on_shell(dim: usize, k_prime: &[f64], gamma: &[f64], energy: Energy) -> Result<Self> {
        let m = Self::new(dim, k_prime, gamma)?;
        let kk = dot(&m.k_prime, &m.k_prime);
        if !close(kk, energy.value(), kk) {
            return Err(FaddeevError::OffVariety(format!("k'^2 = {kk} differs from E")));
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn k_prime(&self) -> &Vec3 {
        &self.k_prime
    }

    pub fn gamma(&self) -> &Vec3 {
        &self.gamma
    }

    pub fn energy(&self) -> f64 {
        dot(&self.k_prime, &self.k_prime)
    }

    pub fn flipped(&self) -> Self {
        Self {
            gamma: scale(&self.gamma, -1.0),
            ..*self
        }
    }

    /// `k' + i eps gamma`, which sits on the variety of energy `E - eps^2`.
    pub fn offset(&self, eps: f64) -> ComplexMomentum {
        ComplexMomentum::from_parts(self.dim, self.k_prime, scale(&self.gamma, eps))
    }

    pub fn as_real(&self) -> ComplexMomentum {
        ComplexMomentum::from_parts(self.dim, self.k_prime, [0.0; 3])
    }
}

/// A unit vector orthogonal to `v` (nonzero), in the same dimension.
pub fn orthogonal_unit(dim: usize, v: &Vec3) -> Vec3 {
    if dim == 2 {
        let n = norm(v);
        return [-v[1] / n, v[0] / n, 0.0];
    }
    let trial = if v[0].abs() < 0.6 * norm(v) {
        [1.0, 0.0, 0.0]
    } else {
        [0.0, 1.0, 0.0]
    };
    let c = cross(v, &trial);
    scale(&c, 1.0 / norm(&c))
}
