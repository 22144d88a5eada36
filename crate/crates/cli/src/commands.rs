use faddeev_core::geometry::{build_k_3d, lambda_to_k, ComplexMomentum, Energy, LambdaCoord, RealLimitMomentum};
use faddeev_core::green::{eval_G, eval_G_gamma, eval_G_plus, eval_g, eval_g_gamma, eval_g_plus, GreenEvaluation};
use faddeev_core::regularization::convergence_study;
use faddeev_core::singularities::{extract_zero_curves, figure_preset, scan_det_grid, CurvesDocument, GridSpec};
use faddeev_core::solver::{Momentum, PointSource, PotentialConfig, Regime, Solver};
use faddeev_core::verification::{default_suite, IdentityId, IdentityReport, SuiteOptions};
use faddeev_core::{Complex64, FaddeevError, QuadratureSpec};
use serde::Serialize;
use std::path::Path;

use crate::args::*;
use crate::CliError;

/// Relative size of `Im k` below which a chart point counts as real.
const REAL_EPS: f64 = 1e-12;

fn read_config(path: &Path) -> Result<PotentialConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    Ok(PotentialConfig::from_json(&text)?)
}

fn build_momentum(m: &MomentumArgs, dim: usize, energy: f64) -> Result<Momentum, CliError> {
    let e = Energy::new(energy)?;
    let k = if let Some(l) = &m.lambda {
        if dim != 2 {
            return Err(CliError::Config("--lambda needs d = 2".into()));
        }
        let im = l.get(1).copied().unwrap_or(0.0);
        lambda_to_k(LambdaCoord::new(Complex64::new(l[0], im))?, e)?
    } else if let Some(re) = &m.k_re {
        let zero = vec![0.0; re.len()];
        ComplexMomentum::new(dim, re, m.k_im.as_deref().unwrap_or(&zero))?
    } else if let (Some(a), Some(b), Some(beta)) = (&m.a_dir, &m.b_dir, m.beta) {
        if dim != 3 {
            return Err(CliError::Config("--a-dir/--b-dir/--beta need d = 3".into()));
        }
        build_k_3d(e, a, b, beta)?
    } else {
        return Err(CliError::Config(
            "a momentum is required: --lambda, --k-re or --a-dir/--b-dir/--beta".into(),
        ));
    };
    let real = k.im_norm() <= REAL_EPS * (1.0 + k.re_norm());
    let regime = m
        .regime
        .unwrap_or(if real { RegimeArg::Plus } else { RegimeArg::Complex });
    let re = &k.re()[..dim];
    match regime {
        RegimeArg::Complex => {
            if real {
                return Err(CliError::Config("the complex regime needs Im k != 0".into()));
            }
            k.require_on_variety(e)?;
            Ok(Momentum::Complex(k))
        }
        RegimeArg::Plus | RegimeArg::Gamma if !real => Err(CliError::Config("real regimes need Im k = 0".into())),
        RegimeArg::Plus => {
            let m = Momentum::plus(dim, re)?;
            m.vector().require_on_variety(e)?;
            Ok(m)
        }
        RegimeArg::Gamma => {
            let gamma = m
                .gamma
                .as_ref()
                .ok_or_else(|| CliError::Config("--gamma is required in the gamma regime".into()))?;
            Ok(Momentum::Gamma(RealLimitMomentum::on_shell(dim, re, gamma, e)?))
        }
    }
}

fn regime_name(r: Regime) -> &'static str {
    match r {
        Regime::Complex => "complex",
        Regime::Gamma => "gamma",
        Regime::Plus => "plus",
    }
}

pub struct Output {
    pub body: Vec<u8>,
    /// Checks failed; exit code 1 after writing.
    pub failed: bool,
}

impl Output {
    fn ok(body: Vec<u8>) -> Self {
        Self { body, failed: false }
    }
}

fn json<T: Serialize + ?Sized>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut out = serde_json::to_vec_pretty(value).map_err(|e| CliError::Numeric(e.to_string()))?;
    out.push(b'\n');
    Ok(out)
}

fn csv_rows<T: Serialize>(rows: impl IntoIterator<Item = T>) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| CliError::Numeric(e.to_string()))?;
    }
    w.into_inner().map_err(|e| CliError::Numeric(e.to_string()))
}

fn render<T: Serialize, R: Serialize>(
    format: Format,
    doc: &T,
    rows: impl IntoIterator<Item = R>,
) -> Result<Vec<u8>, CliError> {
    match format {
        Format::Json => json(doc),
        Format::Csv => csv_rows(rows),
    }
}

#[derive(Serialize)]
struct ScatteringOut {
    kind: faddeev_core::solver::ScatteringKind,
    value: Complex64,
    second_re: Vec<f64>,
    second_im: Vec<f64>,
}

#[derive(Serialize)]
struct EvalOut {
    regime: &'static str,
    x: Vec<f64>,
    k_re: Vec<f64>,
    k_im: Vec<f64>,
    psi: Complex64,
    mu: Complex64,
    det: Complex64,
    condition_estimate: f64,
    coefficients: Vec<Complex64>,
    scattering: Vec<ScatteringOut>,
}

#[derive(Serialize)]
struct EvalRow {
    regime: &'static str,
    psi_re: f64,
    psi_im: f64,
    mu_re: f64,
    mu_im: f64,
    det_re: f64,
    det_im: f64,
}

pub fn eval(a: &EvalArgs, format: Format, spec: QuadratureSpec) -> Result<Output, CliError> {
    let mut config = read_config(&a.config)?;
    if let Some(e) = a.energy {
        config.energy = e;
        config.validate()?;
    }
    let dim = config.dimension;
    let k = build_momentum(&a.momentum, dim, config.energy)?;
    let solver = Solver::new(spec);
    let psi = solver.eval_psi(&config, &a.x, &k)?;
    let sol = solver.solve_coefficients(&config, &k)?;
    let kv = k.vector();
    let mut scattering = Vec::new();
    let pack = |d: faddeev_core::solver::ScatteringData| ScatteringOut {
        kind: d.kind,
        value: d.value,
        second_re: d.second.re()[..dim].to_vec(),
        second_im: d.second.im()[..dim].to_vec(),
    };
    if let Some(l) = &a.l {
        let im = &kv.im()[..dim];
        scattering.push(pack(solver.eval_h(&config, &k, &ComplexMomentum::new(dim, l, im)?)?));
    }
    if let Some(p) = &a.p {
        scattering.push(pack(solver.eval_H(&config, &k, p)?));
    }
    let doc = EvalOut {
        regime: regime_name(k.regime()),
        x: a.x.clone(),
        k_re: kv.re()[..dim].to_vec(),
        k_im: kv.im()[..dim].to_vec(),
        psi: psi.psi,
        mu: psi.mu,
        det: sol.det,
        condition_estimate: sol.condition_estimate,
        coefficients: sol.coefficients,
        scattering,
    };
    let row = EvalRow {
        regime: doc.regime,
        psi_re: psi.psi.re,
        psi_im: psi.psi.im,
        mu_re: psi.mu.re,
        mu_im: psi.mu.im,
        det_re: sol.det.re,
        det_im: sol.det.im,
    };
    Ok(Output::ok(render(format, &doc, [row])?))
}

#[derive(Serialize)]
struct GreenOut {
    regime: &'static str,
    kind: &'static str,
    value: Complex64,
    abs_error_estimate: f64,
    method: faddeev_core::green::GreenMethod,
}

#[derive(Serialize)]
struct GreenRow {
    regime: &'static str,
    kind: &'static str,
    value_re: f64,
    value_im: f64,
    abs_error_estimate: f64,
}

pub fn green(a: &GreenArgs, format: Format, spec: QuadratureSpec) -> Result<Output, CliError> {
    let dim = a.x.len();
    let k = build_momentum(&a.momentum, dim, a.energy)?;
    let full = a.kind == GreenKind::Full;
    let v: GreenEvaluation = match (&k, full) {
        (Momentum::Complex(k), false) => eval_g(&a.x, k, &spec)?,
        (Momentum::Complex(k), true) => eval_G(&a.x, k, &spec)?,
        (Momentum::Plus(k), false) => eval_g_plus(&a.x, &k.re()[..dim], &spec)?,
        (Momentum::Plus(k), true) => eval_G_plus(&a.x, &k.re()[..dim], &spec)?,
        (Momentum::Gamma(k), false) => eval_g_gamma(&a.x, k, &spec)?,
        (Momentum::Gamma(k), true) => eval_G_gamma(&a.x, k, &spec)?,
    };
    let kind = if full { "full" } else { "reduced" };
    let regime = regime_name(k.regime());
    let doc = GreenOut {
        regime,
        kind,
        value: v.value,
        abs_error_estimate: v.abs_error_estimate,
        method: v.method,
    };
    let row = GreenRow {
        regime,
        kind,
        value_re: v.value.re,
        value_im: v.value.im,
        abs_error_estimate: v.abs_error_estimate,
    };
    Ok(Output::ok(render(format, &doc, [row])?))
}

fn grid_from(base: GridSpec, g: &GridArgs) -> GridSpec {
    GridSpec {
        r_min: g.r_min.unwrap_or(base.r_min),
        r_max: g.r_max.unwrap_or(base.r_max),
        n_r: g.n_r.unwrap_or(base.n_r),
        n_theta: g.n_theta.unwrap_or(base.n_theta),
    }
}

fn curves_for(
    config: &PotentialConfig,
    grid: GridSpec,
    g: &GridArgs,
    preset: Option<u8>,
    format: Format,
    spec: QuadratureSpec,
) -> Result<Output, CliError> {
    if !(g.tol > 0.0) {
        return Err(CliError::Config("--tol must be positive".into()));
    }
    let scan = scan_det_grid(config, &grid, &spec)?;
    if let Some(path) = &g.grid_out {
        let bytes = csv_rows(scan.rows())?;
        std::fs::write(path, bytes).map_err(|e| CliError::Numeric(format!("{}: {e}", path.display())))?;
    }
    let body = match format {
        Format::Csv => csv_rows(scan.rows())?,
        Format::Json => {
            let set = extract_zero_curves(&scan, &spec, g.tol)?;
            json(&CurvesDocument::new(&set, preset, config))?
        }
    };
    Ok(Output::ok(body))
}

pub fn curves(a: &CurvesArgs, format: Format, spec: QuadratureSpec) -> Result<Output, CliError> {
    let config = read_config(&a.config)?;
    curves_for(
        &config,
        grid_from(GridSpec::default(), &a.grid),
        &a.grid,
        None,
        format,
        spec,
    )
}

pub fn figures(a: &FiguresArgs, format: Format, spec: QuadratureSpec) -> Result<Output, CliError> {
    let (config, grid) = figure_preset(a.id)?;
    curves_for(&config, grid_from(grid, &a.grid), &a.grid, Some(a.id), format, spec)
}

#[derive(Serialize)]
struct ConvergeOut {
    rows: Vec<faddeev_core::regularization::ConvergenceRow>,
    rate: Option<f64>,
    limit: Vec<Complex64>,
}

pub fn converge(a: &ConvergeArgs, format: Format, spec: QuadratureSpec) -> Result<Output, CliError> {
    let config = read_config(&a.config)?;
    let k = match build_momentum(&a.momentum, config.dimension, config.energy)? {
        Momentum::Complex(k) => k,
        _ => return Err(CliError::Config("cutoff convergence needs Im k != 0".into())),
    };
    let r = convergence_study(&config, &k, &a.cutoffs, &spec)?;
    let doc = ConvergeOut {
        rows: r.rows.clone(),
        rate: r.rate,
        limit: r.limit,
    };
    Ok(Output::ok(render(format, &doc, r.rows)?))
}

/// Presets 1 to 4 and two three-dimensional potentials.
pub fn default_configs() -> Vec<PotentialConfig> {
    let mut out: Vec<PotentialConfig> = (1..=4).map(|id| figure_preset(id).expect("preset").0).collect();
    let p = |z: [f64; 3], alpha| PointSource { z: z.to_vec(), alpha };
    out.push(PotentialConfig::new(3, 4.0, vec![p([0.1, 0.0, -0.2], 3.0)]).expect("valid"));
    out.push(PotentialConfig::new(3, 4.0, vec![p([0.0; 3], 2.0), p([0.6, -0.2, 0.3], -1.5)]).expect("valid"));
    out
}

fn in_suite(id: IdentityId, suite: Suite) -> bool {
    match suite {
        Suite::All => true,
        Suite::Dbar => matches!(id, IdentityId::DbarPsi | IdentityId::DbarH),
        Suite::Limit => matches!(id, IdentityId::LimitPsi | IdentityId::LimitH),
        Suite::Helmholtz => id == IdentityId::Helmholtz,
        Suite::Asymptotic => id == IdentityId::MuAsymptotic,
        Suite::Reality => id == IdentityId::Reality,
    }
}

#[derive(Serialize)]
struct ReportRow {
    identity_id: IdentityId,
    rel_error: f64,
    threshold: f64,
    passed: bool,
    order: Option<f64>,
}

pub fn verify(a: &VerifyArgs, format: Format, spec: QuadratureSpec) -> Result<Output, CliError> {
    if !(a.tol_scale > 0.0) {
        return Err(CliError::Config("--tol-scale must be positive".into()));
    }
    let configs = if a.config.is_empty() {
        default_configs()
    } else {
        a.config.iter().map(|p| read_config(p)).collect::<Result<_, _>>()?
    };
    let mut reports: Vec<IdentityReport> = Vec::new();
    for (i, c) in configs.iter().enumerate() {
        let opts = SuiteOptions {
            seed: a.seed.wrapping_add(i as u64),
            samples: a.samples,
        };
        let batch = default_suite(c, &opts, &spec)?;
        reports.extend(
            batch
                .into_iter()
                .filter(|r| in_suite(r.identity_id, a.suite))
                .map(|r| r.with_tol_scale(a.tol_scale)),
        );
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    eprintln!("{} checks, {} failed", reports.len(), failed);
    let rows = reports.iter().map(|r| ReportRow {
        identity_id: r.identity_id,
        rel_error: r.rel_error,
        threshold: r.threshold,
        passed: r.passed,
        order: r.diagnostics.order,
    });
    let body = render(format, &reports, rows)?;
    Ok(Output {
        body,
        failed: failed > 0,
    })
}

impl From<FaddeevError> for CliError {
    fn from(e: FaddeevError) -> Self {
        match e {
            FaddeevError::InvalidInput(_) | FaddeevError::OffVariety(_) => CliError::Config(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}
