//! Brute-force lattice quadrature of the Fourier integral for `g`.
//!
//! The lattice is aligned with `Re k` and `Im k` and has nodes exactly on the
//! two points where `xi^2 + 2 k xi` vanishes in the `(Re k, Im k)` plane; those
//! nodes are skipped. A smooth radial window of radius `N` replaces the sharp
//! cutoff, and Richardson extrapolation in the spacing removes the leading
//! lattice errors. For `d = 3` the coordinate orthogonal to both `Re k` and
//! `Im k` is integrated in closed form first.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::weight;
use crate::error::{FaddeevError, Result};
use crate::geometry::{cross, dot, scale, vec3, ComplexMomentum};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleMesh {
    /// Lattice cells between the two singular nodes on the coarsest level.
    pub cells_per_gap: usize,
    /// Number of spacing halvings (at least 2).
    pub levels: usize,
}

impl Default for OracleMesh {
    fn default() -> Self {
        Self {
            cells_per_gap: 16,
            levels: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleEstimate {
    pub value: Complex64,
    /// Difference between the last two extrapolants.
    pub error: f64,
    /// Raw lattice sums, coarsest first.
    pub raw: Vec<Complex64>,
}

/// Smooth cutoff: 1 on `[0, 1/2]`, 0 from 1 on.
fn window(t: f64) -> f64 {
    if t <= 0.5 {
        return 1.0;
    }
    if t >= 1.0 {
        return 0.0;
    }
    let s = 2.0 * t - 1.0;
    let bump = |u: f64| if u <= 0.0 { 0.0 } else { (-1.0 / u).exp() };
    let (l, r) = (bump(1.0 - s), bump(s));
    l / (l + r)
}

/// Lattice estimate of `g(x, k)` with window radius `cutoff`.
pub fn oracle_g_direct(x: &[f64], k: &ComplexMomentum, cutoff: f64, mesh: OracleMesh) -> Result<OracleEstimate> {
    let dim = k.dim();
    let xv = vec3(dim, x)?;
    let beta = k.im_norm();
    let a = k.re_norm();
    if beta == 0.0 || a == 0.0 {
        return Err(FaddeevError::InvalidInput(
            "the lattice oracle needs Re k != 0 and Im k != 0".into(),
        ));
    }
    if mesh.cells_per_gap == 0 || mesh.levels < 2 || !(cutoff > 2.0 * a) {
        return Err(FaddeevError::InvalidInput(
            "oracle mesh needs cells_per_gap >= 1, levels >= 2 and cutoff > 2|Re k|".into(),
        ));
    }
    let ahat = scale(k.re(), 1.0 / a);
    let bhat = scale(k.im(), 1.0 / beta);
    let xp = dot(&xv, &ahat);
    let xq = dot(&xv, &bhat);
    let xs = if dim == 3 {
        dot(&xv, &cross(&ahat, &bhat)).abs()
    } else {
        0.0
    };

    let kernel = move |p: f64, q: f64, on_axis: bool| -> Complex64 {
        let plane = Complex64::from_polar(1.0, p * xp + q * xq);
        let real = p * p + q * q + 2.0 * a * p;
        if dim == 2 {
            return plane / Complex64::new(real, 2.0 * beta * q);
        }
        if on_axis && real < 0.0 {
            // Mean of the two one-sided limits across the cut.
            let m = (-real).sqrt();
            return plane * (-PI * (m * xs).sin() / m);
        }
        let sc = Complex64::new(real, 2.0 * beta * q).sqrt();
        plane * PI * (-sc * xs).exp() / sc
    };

    let mut raw = Vec::with_capacity(mesh.levels);
    for level in 0..mesh.levels {
        let m = mesh.cells_per_gap << level;
        let h = 2.0 * a / m as f64;
        let reach = (cutoff / h).ceil() as i64;
        let gap = m as i64;
        let sum: Complex64 = (-reach..=reach)
            .into_par_iter()
            .map(|j| {
                let q = j as f64 * h;
                let mut row = Complex64::new(0.0, 0.0);
                for i in -reach..=reach {
                    if j == 0 && (i == 0 || i == -gap) {
                        continue;
                    }
                    let p = i as f64 * h;
                    let w = window((p * p + q * q).sqrt() / cutoff);
                    if w == 0.0 {
                        continue;
                    }
                    row += kernel(p, q, j == 0) * w;
                }
                row
            })
            .sum();
        raw.push(-sum * (h * h) * weight(dim) / PI);
    }

    let exponents: Vec<f64> = if dim == 2 {
        vec![2.0, 4.0, 6.0, 8.0]
    } else {
        vec![1.5, 2.0, 2.5, 3.0]
    };
    let mut table = raw.clone();
    let mut last_two = (table[table.len() - 2], table[table.len() - 1]);
    for e in exponents.iter().take(mesh.levels - 1) {
        let f = 2f64.powf(*e) - 1.0;
        let next: Vec<Complex64> = table.windows(2).map(|w| w[1] + (w[1] - w[0]) / f).collect();
        if next.len() >= 2 {
            last_two = (next[next.len() - 2], next[next.len() - 1]);
        } else {
            last_two = (table[table.len() - 1], next[0]);
        }
        table = next;
    }
    Ok(OracleEstimate {
        value: last_two.1,
        error: (last_two.1 - last_two.0).norm(),
        raw,
    })
}

/// Lattice estimates over increasing window radii; the error bar adds the
/// change between the last two radii to the lattice extrapolation error.
pub fn oracle_g_sweep(x: &[f64], k: &ComplexMomentum, cutoffs: &[f64], mesh: OracleMesh) -> Result<OracleEstimate> {
    if cutoffs.len() < 2 {
        return Err(FaddeevError::InvalidInput(
            "the cutoff sweep needs at least two radii".into(),
        ));
    }
    let runs = cutoffs
        .iter()
        .map(|&n| oracle_g_direct(x, k, n, mesh))
        .collect::<Result<Vec<_>>>()?;
    let last = &runs[runs.len() - 1];
    let prev = &runs[runs.len() - 2];
    Ok(OracleEstimate {
        value: last.value,
        error: last.error + (last.value - prev.value).norm(),
        raw: runs.iter().map(|r| r.value).collect(),
    })
}
