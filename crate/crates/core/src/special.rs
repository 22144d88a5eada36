//! Cylinder functions of order zero for real positive arguments.
//!
//! Three regimes: power series below 8, Bessel integral representations on
//! `[8, 25)`, and the Hankel asymptotic expansion from 25 on.

use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::sync::OnceLock;

use crate::quadrature::gauss_legendre;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const SERIES_LIMIT: f64 = 8.0;
const ASYMPTOTIC_LIMIT: f64 = 25.0;

/// Bessel function of the first kind, order zero.
pub fn bessel_j0(x: f64) -> f64 {
    let x = x.abs();
    if x < SERIES_LIMIT {
        j0_series(x)
    } else if x < ASYMPTOTIC_LIMIT {
        j0_integral(x)
    } else {
        hankel_asymptotic(x).re
    }
}

/// Bessel function of the second kind, order zero. Requires `x > 0`.
pub fn bessel_y0(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x < SERIES_LIMIT {
        y0_series(x)
    } else if x < ASYMPTOTIC_LIMIT {
        y0_integral(x)
    } else {
        hankel_asymptotic(x).im
    }
}

/// Hankel function `H0^(1)(x) = J0(x) + i Y0(x)` for `x > 0`.
pub fn hankel_h0(x: f64) -> Complex64 {
    if x >= ASYMPTOTIC_LIMIT {
        hankel_asymptotic(x)
    } else {
        Complex64::new(bessel_j0(x), bessel_y0(x))
    }
}

pub(crate) fn j0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for m in 1..200 {
        let mf = m as f64;
        term *= -q / (mf * mf);
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) && m > 2 {
            break;
        }
    }
    sum
}

pub(crate) fn y0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut harmonic = 0.0;
    let mut tail = 0.0;
    for m in 1..200 {
        let mf = m as f64;
        term *= -q / (mf * mf);
        harmonic += 1.0 / mf;
        let t = -term * harmonic;
        tail += t;
        if t.abs() < 1e-17 * tail.abs().max(1e-300) && m > 2 {
            break;
        }
    }
    (2.0 / PI) * (((0.5 * x).ln() + EULER_GAMMA) * j0_series(x) + tail)
}

fn gl20() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(20))
}

/// Composite 20-point Gauss-Legendre over `[a, b]` split into `panels`.
fn composite<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let (nodes, weights) = gl20();
    let width = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = a + width * p as f64;
        let mid = lo + 0.5 * width;
        let half = 0.5 * width;
        let mut s = 0.0;
        for (t, w) in nodes.iter().zip(weights) {
            s += w * f(mid + half * t);
        }
        total += s * half;
    }
    total
}

// J0(x) = (1/pi) int_0^pi cos(x sin t) dt; the integrand is smooth and
// pi-periodic so the trapezoid rule converges geometrically.
fn j0_integral(x: f64) -> f64 {
    let m = (x.ceil() as usize) + 40;
    let h = PI / m as f64;
    let mut s = 0.0;
    for j in 0..m {
        s += (x * (h * j as f64).sin()).cos();
    }
    s / m as f64
}

// Y0(x) = (2/pi) int_0^{pi/2} sin(x sin t) dt - (2/pi) int_0^inf exp(-x sinh t) dt
fn y0_integral(x: f64) -> f64 {
    let panels = (x / 3.0).ceil() as usize + 2;
    let oscill = composite(|t| (x * t.sin()).sin(), 0.0, FRAC_PI_2, panels);
    let upper = (60.0 / x).asinh();
    let decay = composite(|t| (-x * t.sinh()).exp(), 0.0, upper, 6);
    (2.0 / PI) * (oscill - decay)
}

fn hankel_asymptotic(x: f64) -> Complex64 {
    // H0^(1)(x) ~ sqrt(2/(pi x)) e^{i(x - pi/4)} sum_k (-i)^k a_k / x^k,
    // a_k = prod_{j<=k} (2j-1)^2 / (k! 8^k).
    let mut sum = Complex64::new(1.0, 0.0);
    let mut a = 1.0;
    let mut ik = Complex64::new(1.0, 0.0);
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let kf = k as f64;
        a *= (2.0 * kf - 1.0).powi(2) / (kf * 8.0 * x);
        if a > last {
            break;
        }
        ik *= -Complex64::i();
        sum += ik * a;
        last = a;
        if a < 1e-18 {
            break;
        }
    }
    let amp = (2.0 / (PI * x)).sqrt();
    Complex64::from_polar(amp, x - FRAC_PI_4) * sum
}

/// `(e^{z} - 1) / z`, accurate near `z = 0`.
pub fn exprel(z: Complex64) -> Complex64 {
    if z.norm() < 1e-3 {
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = term;
        for n in 2..10 {
            term *= z / n as f64;
            sum += term;
        }
        sum
    } else {
        (z.exp() - 1.0) / z
    }
}

/// `e^z E1(z)` for complex `z` off the cut `(-inf, 0]`, principal branch.
pub fn expint_e1_scaled(z: Complex64) -> Complex64 {
    let m = z.norm();
    if m < 1.0 || (z.re < 0.0 && m < E1_ASYMPTOTIC && z.im.abs() < E1_SERIES_SLOPE * -z.re) {
        z.exp() * e1_series(z)
    } else if m >= E1_ASYMPTOTIC {
        e1_asymptotic(z)
    } else {
        e1_continued_fraction(z)
    }
}

const E1_ASYMPTOTIC: f64 = 40.0;
const E1_SERIES_SLOPE: f64 = 1.0;

fn e1_series(z: Complex64) -> Complex64 {
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    for n in 1..400 {
        term *= -z / n as f64;
        let t = term / n as f64;
        sum += t;
        if t.norm_sqr() <= 1e-34 * sum.norm_sqr() {
            break;
        }
    }
    -EULER_GAMMA - z.ln() - sum
}

fn e1_continued_fraction(z: Complex64) -> Complex64 {
    let tiny = 1e-300;
    let mut b = z + 1.0;
    let mut c = Complex64::new(1.0 / tiny, 0.0);
    let mut d = b.inv();
    let mut h = d;
    for i in 1..5000 {
        let a = -((i * i) as f64);
        b += 2.0;
        d = (d * a + b).inv();
        c = b + c.inv() * a;
        let del = c * d;
        h *= del;
        if (del - 1.0).norm_sqr() < 1e-32 {
            break;
        }
    }
    h
}

fn e1_asymptotic(z: Complex64) -> Complex64 {
    let inv = z.inv();
    let mut term = inv;
    let mut sum = inv;
    for n in 1..200 {
        let next = term * (-(n as f64)) * inv;
        if next.norm_sqr() >= term.norm_sqr() {
            break;
        }
        term = next;
        sum += term;
        if term.norm_sqr() <= 1e-34 * sum.norm_sqr() {
            break;
        }
    }
    sum
}
