//! Adaptive Gauss-Legendre quadrature for complex-valued integrands.
//!
//! Each panel is estimated twice: once with a single 10-point rule and once
//! as the sum over its two halves. The difference is the panel error and the
//! halves are kept as the value, so a refinement reuses both half estimates.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BinaryHeap;
use std::sync::OnceLock;

use crate::error::{FaddeevError, Result};

/// Tolerances and limits for every adaptive integration in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    /// Largest cutoff used by the brute-force lattice oracle.
    pub oracle_cutoff: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-12,
            max_subdivisions: 1 << 16,
            oracle_cutoff: 80.0,
        }
    }
}

impl QuadratureSpec {
    /// Tight preset used where values are later differentiated numerically.
    pub fn tight() -> Self {
        Self {
            rel_tol: 1e-12,
            abs_tol: 1e-14,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) || self.max_subdivisions == 0 {
            return Err(FaddeevError::InvalidInput(
                "quadrature tolerances must be positive and max_subdivisions >= 1".into(),
            ));
        }
        Ok(())
    }

    pub fn tightened(&self) -> Self {
        Self {
            rel_tol: self.rel_tol * 1e-2,
            abs_tol: self.abs_tol * 1e-2,
            max_subdivisions: self.max_subdivisions * 4,
            ..*self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: Complex64,
    pub abs_error: f64,
    pub evaluations: usize,
}

impl Estimate {
    pub fn zero() -> Self {
        Self {
            value: Complex64::new(0.0, 0.0),
            abs_error: 0.0,
            evaluations: 0,
        }
    }
}

impl std::ops::Add for Estimate {
    type Output = Estimate;
    fn add(self, rhs: Estimate) -> Estimate {
        Estimate {
            value: self.value + rhs.value,
            abs_error: self.abs_error + rhs.abs_error,
            evaluations: self.evaluations + rhs.evaluations,
        }
    }
}

/// Nodes and weights of the n-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 {
                1.0
            } else if n == 1 {
                x
            } else {
                p1
            };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pn1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn gl10() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(10))
}

/// Fixed-order Gauss-Legendre over `[a, b]` with the 10-point rule.
#[inline]
pub fn gl_panel<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Complex64 {
    let (nodes, weights) = gl10();
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut s = Complex64::new(0.0, 0.0);
    for (t, w) in nodes.iter().zip(weights) {
        s += f(mid + half * t) * *w;
    }
    s * half
}

struct Panel {
    a: f64,
    b: f64,
    left: Complex64,
    right: Complex64,
    error: f64,
}

impl Panel {
    fn new<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64, whole: Complex64) -> Self {
        let m = 0.5 * (a + b);
        let left = gl_panel(f, a, m);
        let right = gl_panel(f, m, b);
        let error = (left + right - whole).norm();
        Self {
            a,
            b,
            left,
            right,
            error,
        }
    }
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Adaptive integration of `f` over `[a, b]`.
///
/// `breakpoints` are interior points where `f` may be non-smooth;
/// `min_panels` forces an initial uniform subdivision, used for oscillatory
/// integrands so each starting panel holds about one period.
pub fn integrate<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    min_panels: usize,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(FaddeevError::InvalidInput("integration limits must be finite".into()));
    }
    if a == b {
        return Ok(Estimate::zero());
    }
    if b < a {
        let e = integrate(f, b, a, breakpoints, min_panels, spec)?;
        return Ok(Estimate { value: -e.value, ..e });
    }
    let mut cuts: Vec<f64> = breakpoints.iter().copied().filter(|&p| p > a && p < b).collect();
    cuts.push(a);
    cuts.push(b);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let per_piece = min_panels.max(1).div_ceil(cuts.len() - 1).max(1);
    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    for w in cuts.windows(2) {
        let width = (w[1] - w[0]) / per_piece as f64;
        for p in 0..per_piece {
            let lo = w[0] + width * p as f64;
            let hi = if p + 1 == per_piece { w[1] } else { lo + width };
            let whole = gl_panel(&f, lo, hi);
            heap.push(Panel::new(&f, lo, hi, whole));
            evaluations += 30;
        }
    }

    let mut subdivisions = heap.len();
    let mut value: Complex64 = heap.iter().map(|p| p.left + p.right).sum();
    let mut error: f64 = heap.iter().map(|p| p.error).sum();
    loop {
        if !value.re.is_finite() || !value.im.is_finite() {
            return Err(FaddeevError::Quadrature {
                estimate: format!("{value}"),
                error: f64::INFINITY,
                subdivisions,
            });
        }
        let target = spec.abs_tol.max(spec.rel_tol * value.norm());
        if error <= target {
            // Running sums drift; finish with exact totals.
            let value: Complex64 = heap.iter().map(|p| p.left + p.right).sum();
            let error: f64 = heap.iter().map(|p| p.error).sum();
            return Ok(Estimate {
                value,
                abs_error: error,
                evaluations,
            });
        }
        if subdivisions >= spec.max_subdivisions {
            return Err(FaddeevError::Quadrature {
                estimate: format!("{value}"),
                error,
                subdivisions,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        value -= worst.left + worst.right;
        error -= worst.error;
        let m = 0.5 * (worst.a + worst.b);
        let pieces = if m <= worst.a || m >= worst.b {
            // Panel cannot be split further in floating point; accept it.
            vec![Panel { error: 0.0, ..worst }]
        } else {
            evaluations += 40;
            subdivisions += 1;
            vec![
                Panel::new(&f, worst.a, m, worst.left),
                Panel::new(&f, m, worst.b, worst.right),
            ]
        };
        for p in pieces {
            value += p.left + p.right;
            error += p.error;
            heap.push(p);
        }
        if subdivisions % 256 == 0 {
            value = heap.iter().map(|p| p.left + p.right).sum();
            error = heap.iter().map(|p| p.error).sum();
        }
    }
}

/// Integrate over `[a, inf)` through the map `t = a + s/(1-s)`.
pub fn integrate_semi_infinite<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    scale: f64,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    let g = |s: f64| {
        if s >= 1.0 {
            return Complex64::new(0.0, 0.0);
        }
        let one_minus = 1.0 - s;
        let t = a + scale * s / one_minus;
        let v = f(t);
        if v.re == 0.0 && v.im == 0.0 {
            v
        } else {
            v * (scale / (one_minus * one_minus))
        }
    };
    integrate(g, 0.0, 1.0, &[], 4, spec)
}
