//! Multipoint systems `A C = B` in the complex, gamma-limit and outgoing regimes.
//!
//! Points with `alpha = 0` are inert: they are removed before assembly and
//! receive a zero coefficient, which is the decoupled limit of the
//! renormalized system. Determinants are those of the active subsystem.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{FaddeevError, Result};
use crate::geometry::{dot, norm, sub, vec3, ComplexMomentum, Energy, RealLimitMomentum, Vec3};
use crate::green::{eval_g_plus, GreenCache};
use crate::linalg::CMatrix;
use crate::quadrature::QuadratureSpec;

/// `|det A| < SINGULARITY_REL * ||A||_inf^n` is reported as a spectral singularity.
pub const SINGULARITY_REL: f64 = 1e-8;
/// Accepted residual of the balanced solve, whose right-hand side is all ones.
pub const RESIDUAL_REL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointSource {
    pub z: Vec<f64>,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialConfig {
    pub dimension: usize,
    pub energy: f64,
    pub points: Vec<PointSource>,
}

impl PotentialConfig {
    pub fn new(dimension: usize, energy: f64, points: Vec<PointSource>) -> Result<Self> {
        let c = Self {
            dimension,
            energy,
            points,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let c: Self =
            serde_json::from_str(text).map_err(|e| FaddeevError::InvalidInput(format!("config JSON: {e}")))?;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        crate::geometry::check_dim(self.dimension)?;
        if !self.energy.is_finite() {
            return Err(FaddeevError::InvalidInput("energy must be finite".into()));
        }
        if self.dimension == 2 && self.energy <= 0.0 {
            return Err(FaddeevError::InvalidInput("d = 2 needs E > 0".into()));
        }
        if self.points.is_empty() {
            return Err(FaddeevError::InvalidInput("at least one point is required".into()));
        }
        for (j, p) in self.points.iter().enumerate() {
            if p.z.len() != self.dimension || p.z.iter().any(|v| !v.is_finite()) {
                return Err(FaddeevError::InvalidInput(format!(
                    "point {j}: z must be a finite {}-vector",
                    self.dimension
                )));
            }
            if !p.alpha.is_finite() {
                return Err(FaddeevError::InvalidInput(format!("point {j}: alpha must be finite")));
            }
            for (m, q) in self.points[..j].iter().enumerate() {
                if q.z == p.z {
                    return Err(FaddeevError::InvalidInput(format!("points {m} and {j} coincide")));
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn z(&self, j: usize) -> Vec3 {
        vec3(self.dimension, &self.points[j].z).expect("validated")
    }

    pub fn alphas(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.alpha).collect()
    }

    pub fn with_alphas(&self, alphas: &[f64]) -> Result<Self> {
        if alphas.len() != self.n() {
            return Err(FaddeevError::InvalidInput(
                "alpha count differs from point count".into(),
            ));
        }
        let points = self
            .points
            .iter()
            .zip(alphas)
            .map(|(p, &alpha)| PointSource { z: p.z.clone(), alpha })
            .collect();
        Self::new(self.dimension, self.energy, points)
    }

    /// Indices of points with `alpha != 0`.
    pub fn active(&self) -> Vec<usize> {
        (0..self.n()).filter(|&j| self.points[j].alpha != 0.0).collect()
    }

    fn energy_record(&self) -> Energy {
        Energy::new(self.energy).expect("validated")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Complex,
    Gamma,
    Plus,
}

/// A momentum together with the regime it selects.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Momentum {
    /// `k` with `Im k != 0`.
    Complex(ComplexMomentum),
    /// `k' + i0 gamma`.
    Gamma(RealLimitMomentum),
    /// Real `k`; the imaginary part is zero.
    Plus(ComplexMomentum),
}

impl Momentum {
    pub fn plus(dim: usize, k: &[f64]) -> Result<Self> {
        let k = ComplexMomentum::real(dim, k)?;
        if k.re_norm() == 0.0 {
            return Err(FaddeevError::InvalidInput("k must be nonzero".into()));
        }
        Ok(Momentum::Plus(k))
    }

    pub fn regime(&self) -> Regime {
        match self {
            Momentum::Complex(_) => Regime::Complex,
            Momentum::Gamma(_) => Regime::Gamma,
            Momentum::Plus(_) => Regime::Plus,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Momentum::Complex(k) | Momentum::Plus(k) => k.dim(),
            Momentum::Gamma(k) => k.dim(),
        }
    }

    /// The momentum as a complex vector; the gamma regime gives `k'`.
    pub fn vector(&self) -> ComplexMomentum {
        match self {
            Momentum::Complex(k) | Momentum::Plus(k) => *k,
            Momentum::Gamma(k) => k.as_real(),
        }
    }

    /// `e^{ikx}`.
    pub fn plane_wave(&self, x: &Vec3) -> Complex64 {
        self.vector().plane_wave(x)
    }

    fn require_energy(&self, energy: Energy) -> Result<()> {
        self.vector().require_on_variety(energy)
    }
}

/// `A_mm - 1/alpha_m`, the renormalized self-interaction.
pub fn diagonal_shift(k: &Momentum) -> Complex64 {
    let v = k.vector();
    let dim = k.dim();
    match (k, dim) {
        (Momentum::Complex(_), 3) => Complex64::new(-v.im_norm() / (4.0 * PI), 0.0),
        (Momentum::Complex(_), _) => Complex64::new(-(v.re_norm() + v.im_norm()).ln() / (2.0 * PI), 0.0),
        (Momentum::Gamma(_), 3) => Complex64::new(0.0, 0.0),
        (Momentum::Gamma(_), _) => Complex64::new(-v.re_norm().ln() / (2.0 * PI), 0.0),
        (Momentum::Plus(_), 3) => Complex64::new(0.0, v.re_norm() / (4.0 * PI)),
        (Momentum::Plus(_), _) => Complex64::new(-2.0 * v.re_norm().ln(), PI) / (4.0 * PI),
    }
}

/// Assembled active subsystem.
#[derive(Debug, Clone)]
pub struct SystemMatrix {
    pub matrix: CMatrix,
    pub rhs: Vec<Complex64>,
    /// Config indices of the rows.
    pub active: Vec<usize>,
    pub regime: Regime,
    pub momentum: Momentum,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSolution {
    /// `C_j`, zero for inert points.
    pub coefficients: Vec<Complex64>,
    /// `c_j = e^{-ikz_j} C_j`.
    pub gauge: Vec<Complex64>,
    pub det: Complex64,
    pub condition_estimate: f64,
    pub residual: f64,
    pub regime: Regime,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Determinant {
    pub value: Complex64,
    /// `|Im det| / (1 + |det|)`; expected near zero where the diagonal is real.
    pub reality_defect: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiValue {
    pub psi: Complex64,
    /// `mu = e^{-ikx} psi`.
    pub mu: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScatteringKind {
    #[serde(rename = "h")]
    H,
    #[serde(rename = "h_gamma")]
    HGamma,
    #[serde(rename = "f")]
    F,
    #[serde(rename = "H")]
    BigH,
    #[serde(rename = "H_gamma")]
    BigHGamma,
    #[serde(rename = "F")]
    BigF,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringData {
    pub kind: ScatteringKind,
    pub value: Complex64,
    pub k: Momentum,
    /// Second momentum: `l` for h-type data, `p = k - l` for H-type data.
    pub second: ComplexMomentum,
}

/// Owns the Green cache shared by assembly calls; safe to use from many threads.
#[derive(Debug, Default)]
pub struct Solver {
    spec: QuadratureSpec,
    cache: GreenCache,
}

impl Solver {
    pub fn new(spec: QuadratureSpec) -> Self {
        Self {
            spec,
            cache: GreenCache::new(),
        }
    }

    pub fn spec(&self) -> &QuadratureSpec {
        &self.spec
    }

    pub fn cache(&self) -> &GreenCache {
        &self.cache
    }

    /// Reduced Green function `g_.(x) = e^{-ikx} G_.(x)` of the regime.
    pub fn reduced_green(&self, x: &Vec3, k: &Momentum) -> Result<Complex64> {
        match k {
            Momentum::Complex(k) => Ok(self.cache.g(x, k, &self.spec)?.value),
            Momentum::Gamma(k) => {
                let big = self.cache.G_gamma(x, k, &self.spec)?.value;
                Ok(big * Complex64::from_polar(1.0, -dot(k.k_prime(), x)))
            }
            Momentum::Plus(k) => Ok(eval_g_plus(&x[..k.dim()], &k.re()[..k.dim()], &self.spec)?.value),
        }
    }

    /// `G_.(x)` of the regime.
    pub fn green(&self, x: &Vec3, k: &Momentum) -> Result<Complex64> {
        Ok(k.plane_wave(x) * self.reduced_green(x, k)?)
    }

    fn check(&self, config: &PotentialConfig, k: &Momentum) -> Result<()> {
        config.validate()?;
        if k.dim() != config.dimension {
            return Err(FaddeevError::InvalidInput(
                "momentum and config dimensions differ".into(),
            ));
        }
        if let Momentum::Complex(v) = k {
            if v.im_norm() == 0.0 {
                return Err(FaddeevError::InvalidInput("complex regime needs Im k != 0".into()));
            }
        }
        k.require_energy(config.energy_record())
    }

    pub fn assemble_system(&self, config: &PotentialConfig, k: &Momentum) -> Result<SystemMatrix> {
        self.check(config, k)?;
        let active = config.active();
        let shift = diagonal_shift(k);
        let n = active.len();
        let mut matrix = CMatrix::zeros(n);
        for (r, &m) in active.iter().enumerate() {
            let zm = config.z(m);
            for (c, &j) in active.iter().enumerate() {
                let v = if m == j {
                    1.0 / config.points[m].alpha + shift
                } else {
                    -self.green(&sub(&zm, &config.z(j)), k)?
                };
                matrix.set(r, c, v);
            }
        }
        let rhs = active.iter().map(|&m| k.plane_wave(&config.z(m))).collect();
        Ok(SystemMatrix {
            matrix,
            rhs,
            active,
            regime: k.regime(),
            momentum: *k,
        })
    }

    /// `M = D^{-1} A D` with `D = diag(e^{ikz_j})`: off-diagonals `-g_.(z_m - z_j)`, unit right-hand side.
    ///
    /// `det M = det A`, and `M` stays balanced when `|Im k| |z_m - z_j|` is large.
    fn balanced_system(&self, config: &PotentialConfig, k: &Momentum) -> Result<(CMatrix, Vec<usize>)> {
        self.check(config, k)?;
        let active = config.active();
        let shift = diagonal_shift(k);
        let mut matrix = CMatrix::zeros(active.len());
        for (r, &m) in active.iter().enumerate() {
            let zm = config.z(m);
            for (c, &j) in active.iter().enumerate() {
                let v = if m == j {
                    1.0 / config.points[m].alpha + shift
                } else {
                    -self.reduced_green(&sub(&zm, &config.z(j)), k)?
                };
                matrix.set(r, c, v);
            }
        }
        Ok((matrix, active))
    }

    pub fn det_a(&self, config: &PotentialConfig, k: &Momentum) -> Result<Determinant> {
        let (m, _) = self.balanced_system(config, k)?;
        let value = m.lu().det();
        Ok(Determinant {
            value,
            reality_defect: value.im.abs() / (1.0 + value.norm()),
        })
    }

    /// Solves in the balanced form; `C_j = e^{ikz_j} c_j`.
    pub fn solve_coefficients(&self, config: &PotentialConfig, k: &Momentum) -> Result<CoefficientSolution> {
        let (matrix, active) = self.balanced_system(config, k)?;
        let n = active.len();
        let regime = k.regime();
        let mut gauge = vec![Complex64::new(0.0, 0.0); config.n()];
        if n == 0 {
            return Ok(CoefficientSolution {
                coefficients: gauge.clone(),
                gauge,
                det: Complex64::new(1.0, 0.0),
                condition_estimate: 1.0,
                residual: 0.0,
                regime,
            });
        }
        let lu = matrix.lu();
        let det = lu.det();
        let condition = lu.condition_inf(&matrix);
        let threshold = SINGULARITY_REL * matrix.norm_inf().powi(n as i32);
        if !(det.norm() > threshold) {
            return Err(FaddeevError::SpectralSingularity {
                det_abs: det.norm(),
                threshold,
                condition,
            });
        }
        let rhs = vec![Complex64::new(1.0, 0.0); n];
        let mut sol = lu.solve(&rhs)?;
        let mut residual = residual_inf(&matrix, &sol, &rhs);
        if residual > RESIDUAL_REL {
            // One refinement step recovers the digits lost to pivot growth.
            let r: Vec<Complex64> = rhs.iter().zip(matrix.mul_vec(&sol)).map(|(b, a)| b - a).collect();
            let d = lu.solve(&r)?;
            sol.iter_mut().zip(d).for_each(|(s, d)| *s += d);
            residual = residual_inf(&matrix, &sol, &rhs);
            if residual > RESIDUAL_REL {
                return Err(FaddeevError::SingularSystem);
            }
        }
        for (&j, v) in active.iter().zip(sol) {
            gauge[j] = v;
        }
        let coefficients = gauge
            .iter()
            .enumerate()
            .map(|(j, c)| c * k.plane_wave(&config.z(j)))
            .collect();
        Ok(CoefficientSolution {
            coefficients,
            gauge,
            det,
            condition_estimate: condition,
            residual,
            regime,
        })
    }

    /// `psi(x)` and `mu(x)`, through `mu = 1 + sum_j c_j g_.(x - z_j)`.
    pub fn eval_psi(&self, config: &PotentialConfig, x: &[f64], k: &Momentum) -> Result<PsiValue> {
        let xv = vec3(config.dimension, x)?;
        for j in 0..config.n() {
            if norm(&sub(&xv, &config.z(j))) == 0.0 {
                return Err(FaddeevError::InvalidInput(format!("x coincides with point {j}")));
            }
        }
        let sol = self.solve_coefficients(config, k)?;
        self.psi_from(config, &xv, k, &sol)
    }

    /// `psi` from an existing solution, for repeated evaluation at many `x`.
    pub fn psi_from(
        &self,
        config: &PotentialConfig,
        x: &Vec3,
        k: &Momentum,
        sol: &CoefficientSolution,
    ) -> Result<PsiValue> {
        let mut mu = Complex64::new(1.0, 0.0);
        for j in config.active() {
            mu += sol.gauge[j] * self.reduced_green(&sub(x, &config.z(j)), k)?;
        }
        Ok(PsiValue {
            psi: k.plane_wave(x) * mu,
            mu,
        })
    }

    /// `h(k, l)`, `h_gamma(k, l)` or `f(k, l)` according to the regime of `k`.
    pub fn eval_h(&self, config: &PotentialConfig, k: &Momentum, l: &ComplexMomentum) -> Result<ScatteringData> {
        self.check(config, k)?;
        require_second(config, k, l)?;
        let sol = self.solve_coefficients(config, k)?;
        let kv = k.vector();
        let mut sum = Complex64::new(0.0, 0.0);
        for j in 0..config.n() {
            let z = config.z(j);
            let dk = Complex64::new(dot(&sub(kv.re(), l.re()), &z), dot(&sub(kv.im(), l.im()), &z));
            sum += sol.gauge[j] * (Complex64::i() * dk).exp();
        }
        let kind = match k.regime() {
            Regime::Complex => ScatteringKind::H,
            Regime::Gamma => ScatteringKind::HGamma,
            Regime::Plus => ScatteringKind::F,
        };
        Ok(ScatteringData {
            kind,
            value: sum / (2.0 * PI).powi(config.dimension as i32),
            k: *k,
            second: *l,
        })
    }

    /// `H(k, p) = (2 pi)^{-d} sum_j c_j(k) e^{ipz_j}` for any real `p`; equals `h(k, k - p)` when `k - p` lies on the variety.
    #[allow(non_snake_case)]
    pub fn eval_H(&self, config: &PotentialConfig, k: &Momentum, p: &[f64]) -> Result<ScatteringData> {
        self.check(config, k)?;
        let pv = vec3(config.dimension, p)?;
        let sol = self.solve_coefficients(config, k)?;
        let sum: Complex64 = (0..config.n())
            .map(|j| sol.gauge[j] * Complex64::from_polar(1.0, dot(&pv, &config.z(j))))
            .sum();
        let kind = match k.regime() {
            Regime::Complex => ScatteringKind::BigH,
            Regime::Gamma => ScatteringKind::BigHGamma,
            Regime::Plus => ScatteringKind::BigF,
        };
        Ok(ScatteringData {
            kind,
            value: sum / (2.0 * PI).powi(config.dimension as i32),
            k: *k,
            second: ComplexMomentum::real(config.dimension, p)?,
        })
    }
}

fn require_second(config: &PotentialConfig, k: &Momentum, l: &ComplexMomentum) -> Result<()> {
    if l.dim() != config.dimension {
        return Err(FaddeevError::InvalidInput("l has the wrong dimension".into()));
    }
    let energy = config.energy_record();
    match k {
        Momentum::Complex(k) => {
            if !crate::geometry::validate_pair_theta(k, l, energy) {
                return Err(FaddeevError::OffVariety("(k, l) needs l^2 = E and Im l = Im k".into()));
            }
        }
        _ => {
            if l.im_norm() != 0.0 {
                return Err(FaddeevError::OffVariety("l must be real in the real regimes".into()));
            }
            l.require_on_variety(energy)?;
        }
    }
    Ok(())
}

fn residual_inf(a: &CMatrix, x: &[Complex64], b: &[Complex64]) -> f64 {
    a.mul_vec(x)
        .iter()
        .zip(b)
        .map(|(ax, b)| (ax - b).norm())
        .fold(0.0, f64::max)
}

pub fn assemble_system(config: &PotentialConfig, k: &Momentum, spec: &QuadratureSpec) -> Result<SystemMatrix> {
    Solver::new(*spec).assemble_system(config, k)
}

pub fn solve_coefficients(
    config: &PotentialConfig,
    k: &Momentum,
    spec: &QuadratureSpec,
) -> Result<CoefficientSolution> {
    Solver::new(*spec).solve_coefficients(config, k)
}

pub fn eval_psi(config: &PotentialConfig, x: &[f64], k: &Momentum, spec: &QuadratureSpec) -> Result<PsiValue> {
    Solver::new(*spec).eval_psi(config, x, k)
}

pub fn eval_h(
    config: &PotentialConfig,
    k: &Momentum,
    l: &ComplexMomentum,
    spec: &QuadratureSpec,
) -> Result<ScatteringData> {
    Solver::new(*spec).eval_h(config, k, l)
}

pub fn det_a(config: &PotentialConfig, k: &Momentum, spec: &QuadratureSpec) -> Result<Determinant> {
    Solver::new(*spec).det_a(config, k)
}
