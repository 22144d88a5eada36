//! Zero curves of `det A(k(lambda))` in the lambda plane (d = 2) and real
//! spectral singularities for two points in d = 3.
//!
//! The scan samples a log-radial, uniform-angular grid. Cells straddling the
//! unit circle are never contoured: the complex regime is undefined there and
//! the two sides converge to different gamma limits.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::PI;

use crate::error::{FaddeevError, Result};
use crate::geometry::{lambda_to_k, sub, vec3, Energy, LambdaCoord, RealLimitMomentum};
use crate::green::eval_G_gamma;
use crate::quadrature::QuadratureSpec;
use crate::solver::{Momentum, PointSource, PotentialConfig, Solver};

pub const DEFAULT_REFINEMENT_TOL: f64 = 1e-8;
const MAX_BISECTIONS: usize = 60;
/// Radii this close to 1 in log scale are treated as lying on the unit circle.
const UNIT_CIRCLE_BAND: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub r_min: f64,
    pub r_max: f64,
    pub n_r: usize,
    pub n_theta: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            r_min: 0.1,
            r_max: 10.0,
            n_r: 400,
            n_theta: 720,
        }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.r_min > 0.0 && self.r_min < self.r_max && self.r_max.is_finite()) || self.n_r < 2 || self.n_theta < 3
        {
            return Err(FaddeevError::InvalidInput(
                "grid needs 0 < r_min < r_max, n_r >= 2 and n_theta >= 3".into(),
            ));
        }
        Ok(())
    }

    pub fn radius(&self, i: usize) -> f64 {
        let t = i as f64 / (self.n_r - 1) as f64;
        (self.r_min.ln() * (1.0 - t) + self.r_max.ln() * t).exp()
    }

    pub fn angle(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.n_theta as f64
    }

    pub fn lambda(&self, i: usize, j: usize) -> Complex64 {
        Complex64::from_polar(self.radius(i), self.angle(j))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellFlag {
    Ok,
    UnitCircle,
    Failed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub re_lambda: f64,
    pub im_lambda: f64,
    #[serde(rename = "detA_re")]
    pub det_re: f64,
    #[serde(rename = "detA_im_residual")]
    pub det_im_residual: f64,
    pub flag: CellFlag,
}

/// Sampled `det A` over the grid, row-major in `(radius, angle)`.
#[derive(Debug, Clone)]
pub struct ScanGrid {
    pub spec: GridSpec,
    pub config: PotentialConfig,
    pub values: Vec<f64>,
    pub imag: Vec<f64>,
    pub flags: Vec<CellFlag>,
    /// Largest `|Im det A|` over good samples.
    pub reality_residual: f64,
    pub max_abs: f64,
}

impl ScanGrid {
    fn idx(&self, i: usize, j: usize) -> usize {
        i * self.spec.n_theta + j
    }

    pub fn value(&self, i: usize, j: usize) -> Option<f64> {
        let n = self.idx(i, j);
        (self.flags[n] == CellFlag::Ok).then_some(self.values[n])
    }

    pub fn rows(&self) -> impl Iterator<Item = GridRow> + '_ {
        (0..self.spec.n_r).flat_map(move |i| {
            (0..self.spec.n_theta).map(move |j| {
                let n = self.idx(i, j);
                let l = self.spec.lambda(i, j);
                GridRow {
                    re_lambda: l.re,
                    im_lambda: l.im,
                    det_re: self.values[n],
                    det_im_residual: self.imag[n],
                    flag: self.flags[n],
                }
            })
        })
    }

    /// `max |Im det| <= tol (1 + max |det|)`.
    pub fn reality_ok(&self, tol: f64) -> bool {
        self.reality_residual <= tol * (1.0 + self.max_abs)
    }
}

fn require_planar(config: &PotentialConfig) -> Result<()> {
    config.validate()?;
    if config.dimension != 2 {
        return Err(FaddeevError::InvalidInput("lambda-plane scans need d = 2".into()));
    }
    Ok(())
}

/// `det A(k(lambda))` in the complex regime.
pub fn det_at(solver: &Solver, config: &PotentialConfig, lambda: Complex64) -> Result<Complex64> {
    let k = lambda_to_k(LambdaCoord::new(lambda)?, Energy::new(config.energy)?)?;
    if k.im_norm() == 0.0 {
        return Err(FaddeevError::InvalidInput(
            "lambda on the unit circle gives real k".into(),
        ));
    }
    Ok(solver.det_a(config, &Momentum::Complex(k))?.value)
}

fn on_unit_circle(lambda: Complex64) -> bool {
    lambda.norm().ln().abs() < UNIT_CIRCLE_BAND
}

pub fn scan_det_grid(config: &PotentialConfig, grid: &GridSpec, spec: &QuadratureSpec) -> Result<ScanGrid> {
    require_planar(config)?;
    grid.validate()?;
    let samples: Vec<(f64, f64, CellFlag)> = (0..grid.n_r)
        .into_par_iter()
        .flat_map_iter(|i| {
            // One short-lived solver per radius keeps the Green cache small.
            let solver = Solver::new(*spec);
            let retry = Solver::new(spec.tightened());
            (0..grid.n_theta)
                .map(|j| {
                    let l = grid.lambda(i, j);
                    if on_unit_circle(l) {
                        return (f64::NAN, f64::NAN, CellFlag::UnitCircle);
                    }
                    match det_at(&solver, config, l).or_else(|_| det_at(&retry, config, l)) {
                        Ok(d) if d.re.is_finite() && d.im.is_finite() => (d.re, d.im.abs(), CellFlag::Ok),
                        _ => (f64::NAN, f64::NAN, CellFlag::Failed),
                    }
                })
                .collect::<Vec<_>>()
        })
        .collect();
    let mut out = ScanGrid {
        spec: *grid,
        config: config.clone(),
        values: Vec::with_capacity(samples.len()),
        imag: Vec::with_capacity(samples.len()),
        flags: Vec::with_capacity(samples.len()),
        reality_residual: 0.0,
        max_abs: 0.0,
    };
    for (v, im, f) in samples {
        if f == CellFlag::Ok {
            out.reality_residual = out.reality_residual.max(im);
            out.max_abs = out.max_abs.max(v.hypot(im));
        }
        out.values.push(v);
        out.imag.push(im);
        out.flags.push(f);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaPoint {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for LambdaPoint {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl LambdaPoint {
    pub fn complex(self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularCurveSet {
    pub curves: Vec<Vec<LambdaPoint>>,
    pub refinement_tol: f64,
    /// Regions never contoured, e.g. the unit circle.
    pub excluded: Vec<String>,
}

/// Curves JSON document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvesDocument {
    pub curves: Vec<Vec<LambdaPoint>>,
    pub preset: Option<u8>,
    pub config: PotentialConfig,
    pub refinement_tol: f64,
    pub excluded: Vec<String>,
}

impl CurvesDocument {
    pub fn new(set: &SingularCurveSet, preset: Option<u8>, config: &PotentialConfig) -> Self {
        Self {
            curves: set.curves.clone(),
            preset,
            config: config.clone(),
            refinement_tol: set.refinement_tol,
            excluded: set.excluded.clone(),
        }
    }
}

/// Point on the segment between two grid nodes, linear in `(ln r, theta)`.
fn edge_point(a: Complex64, b: Complex64, t: f64) -> Complex64 {
    let (ra, ta) = a.to_polar();
    let (rb, mut tb) = b.to_polar();
    if tb - ta > PI {
        tb -= 2.0 * PI;
    } else if ta - tb > PI {
        tb += 2.0 * PI;
    }
    Complex64::from_polar((ra.ln() * (1.0 - t) + rb.ln() * t).exp(), ta * (1.0 - t) + tb * t)
}

/// Bisection on `Re det` along the edge `a -> b`, given opposite signs `fa`, `fb`.
fn bisect_edge(
    solver: &Solver,
    config: &PotentialConfig,
    a: Complex64,
    b: Complex64,
    fa: f64,
    tol: f64,
) -> Result<Complex64> {
    let (mut lo, mut hi) = (0.0, 1.0);
    let mut f_lo = fa;
    let mut best = (f64::INFINITY, a);
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        let l = edge_point(a, b, mid);
        let d = det_at(solver, config, l)?;
        if d.norm() < best.0 {
            best = (d.norm(), l);
        }
        if d.norm() <= 0.01 * tol || hi - lo < 1e-15 {
            break;
        }
        if (d.re > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = d.re;
        } else {
            hi = mid;
        }
    }
    if best.0 <= tol {
        Ok(best.1)
    } else {
        Err(FaddeevError::NoBracket(format!(
            "|det| = {:e} above tolerance after bisection",
            best.0
        )))
    }
}

/// Polish a zero near `seed`, searching for a sign change of `Re det` along `direction`.
pub fn refine_zero(
    config: &PotentialConfig,
    seed: Complex64,
    direction: Complex64,
    spec: &QuadratureSpec,
) -> Result<LambdaCoord> {
    require_planar(config)?;
    if direction.norm() == 0.0 {
        return Err(FaddeevError::InvalidInput("direction must be nonzero".into()));
    }
    let solver = Solver::new(*spec);
    let f0 = det_at(&solver, config, seed)?.re;
    let unit = direction / direction.norm();
    let mut step = 1e-3 * seed.norm().max(1e-3);
    for _ in 0..40 {
        for s in [1.0, -1.0] {
            let p = seed + unit * (s * step);
            if on_unit_circle(p) || p.norm() == 0.0 || (p.norm().ln() * seed.norm().ln() < 0.0) {
                continue;
            }
            if let Ok(d) = det_at(&solver, config, p) {
                if (d.re > 0.0) != (f0 > 0.0) {
                    return linear_bisect(&solver, config, seed, p, f0).map(LambdaCoord::new)?;
                }
            }
        }
        step *= 1.5;
    }
    Err(FaddeevError::NoBracket(format!("no sign change of det A near {seed}")))
}

fn linear_bisect(solver: &Solver, config: &PotentialConfig, a: Complex64, b: Complex64, fa: f64) -> Result<Complex64> {
    let (mut lo, mut hi, mut f_lo) = (a, b, fa);
    let mut best = (f64::INFINITY, a);
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        let d = det_at(solver, config, mid)?;
        if d.norm() < best.0 {
            best = (d.norm(), mid);
        }
        if d.norm() <= 1e-12 || (hi - lo).norm() < 1e-15 * mid.norm() {
            break;
        }
        if (d.re > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = d.re;
        } else {
            hi = mid;
        }
    }
    Ok(best.1)
}

type EdgeKey = (usize, usize, u8);

/// Marching squares on the real field at level zero, with refined vertices.
pub fn extract_zero_curves(grid: &ScanGrid, spec: &QuadratureSpec, refinement_tol: f64) -> Result<SingularCurveSet> {
    let g = &grid.spec;
    let nt = g.n_theta;
    // Cells joining radii i and i+1, angles j and j+1 (wrapping).
    let cells: Vec<(usize, usize)> = (0..g.n_r - 1)
        .filter(|&i| (g.radius(i) - 1.0) * (g.radius(i + 1) - 1.0) > 0.0)
        .flat_map(|i| (0..nt).map(move |j| (i, j)))
        .collect();

    // Edge (i, j, 0): radial edge from (i, j) to (i+1, j); (i, j, 1): angular edge from (i, j) to (i, j+1).
    let edge_nodes = |e: EdgeKey| -> ((usize, usize), (usize, usize)) {
        let (i, j, dir) = e;
        if dir == 0 {
            ((i, j), (i + 1, j))
        } else {
            ((i, j), (i, (j + 1) % nt))
        }
    };
    let crosses = |e: EdgeKey| -> bool {
        let (p, q) = edge_nodes(e);
        match (grid.value(p.0, p.1), grid.value(q.0, q.1)) {
            (Some(a), Some(b)) => (a > 0.0) != (b > 0.0),
            _ => false,
        }
    };

    let mut segments: Vec<(EdgeKey, EdgeKey)> = Vec::new();
    for &(i, j) in &cells {
        let j1 = (j + 1) % nt;
        let corners = [
            grid.value(i, j),
            grid.value(i + 1, j),
            grid.value(i + 1, j1),
            grid.value(i, j1),
        ];
        if corners.iter().any(|c| c.is_none()) {
            continue;
        }
        // Edges in cyclic order around corners (i,j), (i+1,j), (i+1,j1), (i,j1).
        let edges: [EdgeKey; 4] = [(i, j, 0), (i + 1, j, 1), (i, j1, 0), (i, j, 1)];
        let hits: Vec<EdgeKey> = edges.iter().copied().filter(|&e| crosses(e)).collect();
        match hits.len() {
            2 => segments.push((hits[0], hits[1])),
            4 => {
                let centre: f64 = corners.iter().map(|c| c.unwrap()).sum::<f64>() / 4.0;
                let first_positive = corners[0].unwrap() > 0.0;
                // Connect around the corner whose sign differs from the centre.
                if (centre > 0.0) == first_positive {
                    segments.push((hits[0], hits[1]));
                    segments.push((hits[2], hits[3]));
                } else {
                    segments.push((hits[0], hits[3]));
                    segments.push((hits[1], hits[2]));
                }
            }
            _ => {}
        }
    }

    let mut unique: Vec<EdgeKey> = segments.iter().flat_map(|s| [s.0, s.1]).collect();
    unique.sort_unstable();
    unique.dedup();
    let refined: Vec<Option<Complex64>> = unique
        .par_iter()
        .map_init(
            || Solver::new(*spec),
            |solver, &e| {
                let (p, q) = edge_nodes(e);
                let a = g.lambda(p.0, p.1);
                let b = g.lambda(q.0, q.1);
                bisect_edge(
                    solver,
                    &grid.config,
                    a,
                    b,
                    grid.value(p.0, p.1).unwrap(),
                    refinement_tol,
                )
                .ok()
            },
        )
        .collect();
    let vertex: HashMap<EdgeKey, Option<Complex64>> = unique.iter().copied().zip(refined).collect();

    let curves = link_segments(&segments, &vertex);
    Ok(SingularCurveSet {
        curves,
        refinement_tol,
        excluded: vec!["unit circle |lambda| = 1 (real momenta; complex regime undefined)".into()],
    })
}

/// Chains segments sharing an edge into polylines; unrefined vertices split a chain.
fn link_segments(
    segments: &[(EdgeKey, EdgeKey)],
    vertex: &HashMap<EdgeKey, Option<Complex64>>,
) -> Vec<Vec<LambdaPoint>> {
    let mut adj: HashMap<EdgeKey, Vec<usize>> = HashMap::new();
    for (s, &(a, b)) in segments.iter().enumerate() {
        adj.entry(a).or_default().push(s);
        adj.entry(b).or_default().push(s);
    }
    let mut used = vec![false; segments.len()];
    let mut chains: Vec<Vec<EdgeKey>> = Vec::new();
    // Open chains start at edges with one segment; closed loops are picked up after.
    let mut starts: Vec<EdgeKey> = adj.iter().filter(|(_, v)| v.len() == 1).map(|(k, _)| *k).collect();
    starts.sort_unstable();
    let mut all: Vec<EdgeKey> = adj.keys().copied().collect();
    all.sort_unstable();
    starts.extend(all);
    for start in starts {
        let Some(&first) = adj[&start].iter().find(|&&s| !used[s]) else {
            continue;
        };
        let mut chain = vec![start];
        let mut at = start;
        let mut seg = first;
        loop {
            used[seg] = true;
            let (a, b) = segments[seg];
            let next = if a == at { b } else { a };
            chain.push(next);
            at = next;
            match adj[&at].iter().find(|&&s| !used[s]) {
                Some(&s) => seg = s,
                None => break,
            }
        }
        chains.push(chain);
    }
    let mut curves = Vec::new();
    for chain in chains {
        let mut current: Vec<LambdaPoint> = Vec::new();
        for e in chain {
            match vertex.get(&e).copied().flatten() {
                Some(z) => current.push(z.into()),
                None => {
                    if current.len() > 1 {
                        curves.push(std::mem::take(&mut current));
                    }
                    current.clear();
                }
            }
        }
        if current.len() > 1 {
            curves.push(current);
        }
    }
    curves
}

/// Caption parameters of the four planar presets, with `z_1` at the origin.
pub fn figure_preset(id: u8) -> Result<(PotentialConfig, GridSpec)> {
    let (energy, dz, a1, a2) = match id {
        1 => (4.0, 0.5, 5.0, 6.0),
        2 => (6.0, 0.5, 5.0, 6.0),
        3 => (5.0, 10.0, 6.0, 6.0),
        4 => (5.0, 10.0, 6.0, 6.8),
        _ => return Err(FaddeevError::InvalidInput(format!("preset id must be 1..=4, got {id}"))),
    };
    let config = PotentialConfig::new(
        2,
        energy,
        vec![
            PointSource {
                z: vec![0.0, 0.0],
                alpha: a1,
            },
            PointSource {
                z: vec![dz, 0.0],
                alpha: a2,
            },
        ],
    )?;
    Ok((config, GridSpec::default()))
}

/// `alpha_1 alpha_2 = 1 / (G_gamma(z1 - z2) G_gamma(z2 - z1))`, which zeroes `det A(k' + i0 gamma)` in d = 3.
pub fn real_singularity_alphas(
    z1: &[f64],
    z2: &[f64],
    k_prime: &[f64],
    gamma: &[f64],
    spec: &QuadratureSpec,
) -> Result<f64> {
    let k = RealLimitMomentum::new(3, k_prime, gamma)?;
    let a = vec3(3, z1)?;
    let b = vec3(3, z2)?;
    let d = sub(&a, &b);
    let g12 = eval_G_gamma(&d, &k, spec)?;
    let g21 = eval_G_gamma(&[-d[0], -d[1], -d[2]], &k, spec)?;
    let product = g12.value * g21.value;
    let noise = g12.abs_error_estimate * g21.value.norm() + g21.abs_error_estimate * g12.value.norm();
    let scale = g12.value.norm() * g21.value.norm();
    if !(product.norm() > 1e3 * noise) || product.norm() < 1e-12 {
        return Err(FaddeevError::Degenerate(format!(
            "Green product {product} vanishes at this configuration"
        )));
    }
    if product.im.abs() > 1e-8 * scale.max(1e-300) {
        return Err(FaddeevError::Degenerate(format!("Green product {product} is not real")));
    }
    Ok(1.0 / product.re)
}

/// Split a product into real `(alpha_1, alpha_2)` of equal magnitude.
pub fn split_alpha_product(product: f64) -> (f64, f64) {
    let m = product.abs().sqrt();
    if product >= 0.0 {
        (m, m)
    } else {
        (m, -m)
    }
}
