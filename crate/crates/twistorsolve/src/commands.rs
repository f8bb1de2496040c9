//! The five subcommands. Each writes its outputs before reporting solver
//! failures, so a run with holes still leaves inspectable files.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rayon::ThreadPool;
use serde_json::{json, Value};
use twistor_core::annulus::{h_split, winding_index, CircleFunction};
use twistor_core::backlund::{
    assemble_backlund_field, coefficients, leaf_trace, verify_system, BacklundError, SystemReport, TraceOptions,
};
use twistor_core::glue::{
    apply_psi, check_transversality, finish_table, glue_row, preimage_points, GlueError, GlueOptions, SampledGluing,
    TransversalCurve,
};
use twistor_core::pde::{
    abc_from_lambda_triple, equation_residual, Grid3, GridOracle, LambdaTriple, ScalarField3, SolutionOracle,
};
use twistor_core::riemann::{
    assemble_wave_field, check_wave_gluing, solve_strip, wave_point, wave_strips, GluingFunction, Hole, Method,
    PolynomialGluing, SolverOptions, WaveField,
};
use twistor_core::Complex64 as C;

use crate::config::{Command, CurveSpec, Cx, FixtureSpec, RunConfig, SourceSpec};
use crate::error::AppError;
use crate::io::{self, GluingFile, GridRecord, HoleRecord, Sidecar};

/// Name of the echoed config in the output directory.
pub const RESOLVED_CONFIG: &str = "config.resolved.json";

/// What a successful run produced.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub written: Vec<PathBuf>,
    pub summary: Value,
}

/// Everything a command needs besides the config.
#[derive(Debug)]
pub struct Context<'a> {
    pub config: &'a RunConfig,
    pub hash: String,
    pub out: &'a Path,
    /// Relative input paths in the config resolve against this directory.
    pub base_dir: &'a Path,
    pub pool: ThreadPool,
}

impl Context<'_> {
    fn input(&self, path: &str) -> PathBuf {
        self.base_dir.join(path)
    }

    fn sidecar(&self, csv: &str, grid: &Grid3, holes: Vec<HoleRecord>, stats: Value) -> Sidecar {
        Sidecar {
            config_hash: self.hash.clone(),
            command: self.config.command().to_string(),
            csv: csv.to_string(),
            grid: GridRecord::from(grid),
            holes,
            stats,
        }
    }
}

/// Thread pool with exactly `jobs` workers.
pub fn thread_pool(jobs: usize) -> Result<ThreadPool, AppError> {
    if jobs == 0 {
        return Err(AppError::config("--jobs must be at least 1"));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| AppError::solver(format!("cannot start worker threads: {e}")))
}

/// Runs the command recorded in `ctx.config`, writing into `ctx.out`.
pub fn run(ctx: &Context<'_>) -> Result<RunOutcome, AppError> {
    std::fs::create_dir_all(ctx.out).map_err(|e| AppError::io(ctx.out, e))?;
    let resolved = ctx.out.join(RESOLVED_CONFIG);
    io::write_text(&resolved, &ctx.config.resolved_json())?;
    log::info!("config hash {}", ctx.hash);
    let mut outcome = match ctx.config.command() {
        Command::Solve => solve(ctx),
        Command::Glue => glue(ctx),
        Command::Backlund => backlund(ctx),
        Command::Roundtrip => roundtrip(ctx),
        Command::Verify => verify(ctx),
    }?;
    outcome.written.insert(0, resolved);
    Ok(outcome)
}

fn hole_records(grid: &Grid3, holes: &[Hole]) -> Vec<HoleRecord> {
    holes
        .iter()
        .map(|h| HoleRecord {
            index: h.index,
            point: grid.point(h.index),
            code: h.code.as_str().to_string(),
        })
        .collect()
}

fn hole_histogram(holes: &[HoleRecord]) -> BTreeMap<String, usize> {
    let mut m = BTreeMap::new();
    for h in holes {
        *m.entry(h.code.clone()).or_insert(0) += 1;
    }
    m
}

/// Fails with the hole count when the field is incomplete.
fn require_no_holes(what: &str, holes: &[HoleRecord], total: usize) -> Result<(), AppError> {
    if holes.is_empty() {
        return Ok(());
    }
    Err(AppError::solver(format!(
        "{} of {total} {what} points are holes ({:?})",
        holes.len(),
        hole_histogram(holes)
    )))
}

/// Scaled equation residual when every axis has interior points.
fn residual_of(field: &ScalarField3, lambdas: [C; 3]) -> Option<f64> {
    if field.grid().shape.iter().any(|&n| n < 3) {
        return None;
    }
    let abc = abc_from_lambda_triple(lambdas[0], lambdas[1], lambdas[2]).ok()?;
    equation_residual(field, &abc).ok().map(|r| r.scaled_max())
}

/// Solves every strip of `grid` at the given boundary points, in parallel
/// and in a fixed order.
fn sweep(
    pool: &ThreadPool,
    g: &dyn GluingFunction,
    lambdas: [C; 3],
    grid: &Grid3,
    points: &dyn Fn(usize) -> [C; 3],
    opts: &SolverOptions,
    method: Method,
) -> WaveField {
    let strips = wave_strips(grid);
    let inputs: Vec<Vec<[C; 3]>> = strips.iter().map(|s| s.iter().map(|&i| points(i)).collect()).collect();
    let results = pool.install(|| {
        inputs
            .par_iter()
            .map(|pts| solve_strip(g, lambdas, pts, opts, method))
            .collect()
    });
    assemble_wave_field(*grid, &strips, results)
}

fn solve(ctx: &Context<'_>) -> Result<RunOutcome, AppError> {
    let cfg = ctx.config;
    let grid = cfg.grid()?;
    let mut opts = cfg.solver.options();
    let method = cfg.solver.method();
    let table: SampledGluing;
    let poly: PolynomialGluing;
    let g: &dyn GluingFunction = match cfg.source()? {
        SourceSpec::Polynomial { power, coeffs, delta } => {
            poly = PolynomialGluing::new(*power, coeffs.iter().map(|c| c.get()), *delta);
            &poly
        }
        SourceSpec::GluingFile { path } => {
            table = io::read_gluing(&ctx.input(path))?;
            let stored = table.lambdas().as_array();
            if stored.iter().zip(cfg.lambda_array()).any(|(a, b)| (a - b).norm() > 1e-12 * b.norm()) {
                return Err(AppError::config(format!(
                    "gluing table was built for λ = {stored:?}, config has {:?}",
                    cfg.lambda_array()
                )));
            }
            opts.half_order = table.lambda_samples().len() / 2;
            &table
        }
        _ => unreachable!("source kind checked during validation"),
    };
    check_wave_gluing(g, &opts).map_err(|e| AppError::solver(e.to_string()))?;
    let lambdas = cfg.lambda_array();
    let wf = sweep(&ctx.pool, g, lambdas, &grid, &|i| grid.cpoint(i), &opts, method);
    let holes = hole_records(&grid, &wf.holes);
    let stats = json!({
        "max_newton_iters": wf.max_newton_iters,
        "hole_count": holes.len(),
        "hole_codes": hole_histogram(&holes),
        "scaled_residual": residual_of(&wf.field, lambdas),
        "half_order": opts.half_order,
    });
    let sidecar = ctx.sidecar("field.csv", &grid, holes.clone(), stats.clone());
    let written = io::write_field(ctx.out, "field", &wf.field, &sidecar, true)?;
    require_no_holes("grid", &holes, grid.len())?;
    Ok(RunOutcome { written, summary: stats })
}

fn fixture_source(cfg: &RunConfig) -> Result<&FixtureSpec, AppError> {
    match cfg.source()? {
        SourceSpec::Fixture(f) => Ok(f),
        _ => unreachable!("source kind checked during validation"),
    }
}

fn build_curve(
    cfg: &RunConfig,
    oracle: &Arc<dyn SolutionOracle>,
    opts: &GlueOptions,
) -> Result<TransversalCurve, AppError> {
    let lt = cfg.lambda_triple();
    let abc = lt.abc().map_err(|e| AppError::config(e.to_string()))?;
    let curve = match &cfg.curve {
        CurveSpec::Canonical => TransversalCurve::canonical(oracle.clone(), abc, opts.t_max, opts.ode),
        CurveSpec::Polynomial { coeffs } => {
            TransversalCurve::polynomial(coeffs.iter().map(|c| c.get()).collect(), opts.t_max)
        }
    }
    .map_err(|e| AppError::solver(format!("transversal curve: {e}")))?;
    let report = check_transversality(&**oracle, lt, &curve).map_err(|e| AppError::solver(e.to_string()))?;
    log::info!("transversality Q = {}, |(Qλ1 − λ2)/(Q − 1)| = {}", report.q, report.lhs);
    if !report.ok {
        return Err(AppError::solver(format!(
            "transversality fails: |(Qλ1 − λ2)/(Q − 1)| = {} with Q = {}",
            report.lhs, report.q
        )));
    }
    Ok(curve)
}

/// Glue rows for every circle sample, shot in parallel.
fn glue_table(
    pool: &ThreadPool,
    oracle: &dyn SolutionOracle,
    lambdas: LambdaTriple,
    curve: &TransversalCurve,
    opts: &GlueOptions,
) -> Result<SampledGluing, AppError> {
    let rows = pool.install(|| {
        (0..2 * opts.half_order)
            .into_par_iter()
            .map(|j| glue_row(oracle, lambdas, curve, opts, j))
            .collect::<Vec<_>>()
    });
    let rows = rows
        .into_iter()
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| AppError::solver(format!("gluing: {e}")))?;
    finish_table(lambdas, curve, opts, rows).map_err(|e| AppError::solver(format!("gluing: {e}")))
}

fn glue(ctx: &Context<'_>) -> Result<RunOutcome, AppError> {
    let cfg = ctx.config;
    let oracle = fixture_source(cfg)?.oracle()?;
    let opts = cfg.gluing.options();
    let curve = build_curve(cfg, &oracle, &opts)?;
    let table = glue_table(&ctx.pool, &*oracle, cfg.lambda_triple(), &curve, &opts)?;
    let path = ctx.out.join("gluing.json");
    io::write_json(&path, &GluingFile::from_table(&table, &ctx.hash))?;
    let summary = json!({
        "samples": table.lambda_samples().len(),
        "fit_residual": table.fit_residual(),
        "curve": table.curve(),
    });
    Ok(RunOutcome {
        written: vec![path],
        summary,
    })
}

fn backlund(ctx: &Context<'_>) -> Result<RunOutcome, AppError> {
    let cfg = ctx.config;
    let spec = cfg.backlund.as_ref().expect("checked during validation");
    let coeff = cfg.backlund_coefficients()?;
    let (oracle, grid): (Arc<dyn SolutionOracle>, Grid3) = match cfg.source()? {
        SourceSpec::Fixture(f) => (f.oracle()?, cfg.grid()?),
        SourceSpec::FieldFile { path } => {
            let path = ctx.input(path);
            let field = io::read_field_csv(&path)?;
            let grid = match &cfg.grid {
                Some(g) => g.grid()?,
                None => *field.grid(),
            };
            let oracle = GridOracle::new(field).map_err(|e| AppError::parse(&path, e.to_string()))?;
            (Arc::new(oracle), grid)
        }
        _ => unreachable!("source kind checked during validation"),
    };
    let w = ScalarField3::new(grid, (0..grid.len()).map(|i| oracle.value(grid.cpoint(i))).collect())
        .map_err(|e| AppError::solver(e.to_string()))?;
    let (v, trace_holes) = match &spec.v_file {
        Some(p) => {
            let p = ctx.input(p);
            let v = io::read_field_csv(&p)?;
            if *v.grid() != grid {
                return Err(AppError::parse(&p, "v field grid differs from the source grid"));
            }
            (v, Vec::new())
        }
        None => {
            let opts = TraceOptions {
                box_radius: spec.box_radius.unwrap_or(f64::INFINITY),
                ..TraceOptions::default()
            };
            let results: Vec<Result<C, BacklundError>> = ctx.pool.install(|| {
                (0..grid.len())
                    .into_par_iter()
                    .map(|i| leaf_trace(&*oracle, &coeff, grid.cpoint(i), &opts))
                    .collect()
            });
            let bf = assemble_backlund_field(grid, results);
            (bf.field, bf.holes)
        }
    };
    let holes: Vec<HoleRecord> = trace_holes
        .iter()
        .map(|(i, e)| HoleRecord {
            index: *i,
            point: grid.point(*i),
            code: backlund_code(e).to_string(),
        })
        .collect();
    let report: Option<SystemReport> = if holes.is_empty() && grid.shape.iter().all(|&n| n >= 3) {
        Some(verify_system(&w, &v, &coeff).map_err(|e| AppError::solver(e.to_string()))?)
    } else {
        None
    };
    let pair = |z: C| [z.re, z.im];
    let stats = json!({
        "alpha": pair(coeff.alpha),
        "beta": pair(coeff.beta),
        "gamma": pair(coeff.gamma),
        "tolerance": spec.tolerance,
        "hole_count": holes.len(),
        "hole_codes": hole_histogram(&holes),
        "system": report.map(|r| json!({
            "residual_xy": r.residual_xy,
            "residual_xz": r.residual_xz,
            "max_minor": r.max_minor,
            "eikonal": r.eikonal,
            "points": r.points,
            "passes": r.passes(spec.tolerance),
        })),
        "target_residual": residual_of(&v, spec.target_lambdas.map(Cx::get)),
    });
    let sidecar = ctx.sidecar("backlund_v.csv", &grid, holes.clone(), stats.clone());
    let written = io::write_field(ctx.out, "backlund_v", &v, &sidecar, true)?;
    require_no_holes("trace", &holes, grid.len())?;
    if let Some(r) = report {
        if !r.passes(spec.tolerance) {
            return Err(AppError::solver(format!(
                "first-order system residual {:e} exceeds tolerance {:e}",
                r.residual_xy.max(r.residual_xz).max(r.max_minor),
                spec.tolerance
            )));
        }
    }
    Ok(RunOutcome { written, summary: stats })
}

fn backlund_code(e: &BacklundError) -> &'static str {
    match e {
        BacklundError::NondegeneracyLost { .. } => "nondegeneracy_lost",
        BacklundError::LeftDomain { .. } => "left_domain",
        BacklundError::Ode(_) => "ode_failure",
        BacklundError::ProportionalTriples | BacklundError::HypothesisViolated => "hypothesis",
    }
}

fn roundtrip(ctx: &Context<'_>) -> Result<RunOutcome, AppError> {
    let cfg = ctx.config;
    let oracle = fixture_source(cfg)?.oracle()?;
    let grid = cfg.grid()?;
    let lambdas = cfg.lambda_triple();
    let base = cfg.gluing.options();
    let curve = build_curve(cfg, &oracle, &base)?;
    let points = preimage_points(&curve, &grid).map_err(|e| AppError::solver(e.to_string()))?;
    let exact: Vec<C> = (0..grid.len()).map(|i| oracle.value(grid.cpoint(i))).collect();
    let scale = exact.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let psi = |t: C| -> Result<C, GlueError> { Ok(oracle.value([t, curve.value(t)?, C::new(0.0, 0.0)])) };
    let mut table = Vec::new();
    let mut last = None;
    for &n in &cfg.roundtrip.half_orders {
        let opts = GlueOptions { half_order: n, ..base };
        let sg = glue_table(&ctx.pool, &*oracle, lambdas, &curve, &opts)?;
        let sopts = SolverOptions {
            half_order: n,
            ..cfg.solver.options()
        };
        check_wave_gluing(&sg, &sopts).map_err(|e| AppError::solver(e.to_string()))?;
        let wf = sweep(&ctx.pool, &sg, lambdas.as_array(), &grid, &|i| points[i], &sopts, cfg.solver.method());
        let rec = apply_psi(wf.field, wf.holes, &psi).map_err(|e| AppError::solver(e.to_string()))?;
        let worst = exact
            .iter()
            .zip(rec.field.values())
            .enumerate()
            .filter(|(i, _)| rec.field.is_valid(*i))
            .map(|(_, (e, r))| (r - e).norm())
            .fold(0.0, f64::max);
        let holes = hole_records(&grid, &rec.holes);
        log::info!("half order {n}: max error {worst:e}, {} holes", holes.len());
        table.push(json!({
            "half_order": n,
            "fit_residual": sg.fit_residual(),
            "max_abs_error": worst,
            "max_rel_error": if scale > 0.0 { worst / scale } else { worst },
            "max_newton_iters": wf.max_newton_iters,
            "hole_count": holes.len(),
        }));
        last = Some((rec.field, holes));
    }
    let (field, holes) = last.expect("schema requires at least one half order");
    let summary = json!({ "convergence": table, "max_abs_w": scale });
    let path = ctx.out.join("roundtrip.json");
    io::write_json(&path, &json!({ "config_hash": ctx.hash, "convergence": summary["convergence"], "max_abs_w": scale }))?;
    let sidecar = ctx.sidecar("roundtrip_field.csv", &grid, holes.clone(), summary.clone());
    let mut written = vec![path];
    written.extend(io::write_field(ctx.out, "roundtrip_field", &field, &sidecar, true)?);
    let total_holes: u64 = table.iter().map(|r| r["hole_count"].as_u64().unwrap_or(0)).sum();
    if total_holes > 0 {
        return Err(AppError::solver(format!("{total_holes} holes across the convergence table")));
    }
    Ok(RunOutcome { written, summary })
}

/// Outcome of one randomized property.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct PropertyResult {
    pub name: &'static str,
    pub passed: usize,
    pub failed: usize,
    /// Largest measured defect over the cases.
    pub worst: f64,
    pub tolerance: f64,
}

fn property(
    name: &'static str,
    tolerance: f64,
    cases: usize,
    rng: &mut ChaCha8Rng,
    mut case: impl FnMut(&mut ChaCha8Rng) -> f64,
) -> PropertyResult {
    let mut r = PropertyResult {
        name,
        passed: 0,
        failed: 0,
        worst: 0.0,
        tolerance,
    };
    for _ in 0..cases {
        let d = case(rng);
        if d <= tolerance {
            r.passed += 1;
        } else {
            r.failed += 1;
        }
        r.worst = if d.is_nan() { f64::NAN } else { r.worst.max(d) };
    }
    r
}

fn random_c(rng: &mut ChaCha8Rng, r: f64) -> C {
    C::new(rng.gen_range(-r..r), rng.gen_range(-r..r))
}

/// `q(0)` for the quadratic with `q(λ1) = x`, `q(λ2) = y`, `q(λ3) = λ3²·z`,
/// the exact wave solution of the gluing `λ⁻²·t`.
fn interpolation_value(l: [C; 3], [x, y, z]: [C; 3]) -> C {
    let values = [x, y, z * l[2] * l[2]];
    (0..3)
        .map(|i| {
            let basis: C = (0..3).filter(|&j| j != i).map(|j| -l[j] / (l[i] - l[j])).product();
            values[i] * basis
        })
        .sum()
}

/// Seeded randomized checks of the kernel laws and of the solver against
/// closed forms. Deterministic for a given seed.
pub fn run_properties(lambdas: [C; 3], seed: u64, cases: usize) -> Vec<PropertyResult> {
    const N: usize = 32;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let zero = C::new(0.0, 0.0);
    let mut out = Vec::new();
    out.push(property("h_split_recombines", 1e-14, cases, &mut rng, |rng| {
        let modes: Vec<(i64, C)> = (-12..=12).map(|k| (k, random_c(rng, 1.0))).collect();
        let phi = CircleFunction::from_modes(N, modes);
        let (p, m) = h_split(&phi);
        (-(N as i64)..N as i64)
            .map(|k| {
                let back = if k >= 1 { p.mode(k - 1) } else { zero } + m.mode(k);
                (back - phi.mode(k)).norm() / (1.0 + phi.mode(k).norm())
            })
            .fold(0.0, f64::max)
    }));
    out.push(property("winding_index_counts_zeros_minus_poles", 0.0, cases, &mut rng, |rng| {
        let mut off = || {
            let r: f64 = rng.gen_range(0.2..0.8);
            let r = if rng.gen_bool(0.5) { r } else { 1.0 / r };
            C::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
        };
        let zeros: Vec<C> = (0..3).map(|_| off()).collect();
        let poles: Vec<C> = (0..2).map(|_| off()).collect();
        let inside = |v: &[C]| v.iter().filter(|a| a.norm() < 1.0).count() as i64;
        let phi = CircleFunction::from_fn(N, |l| {
            zeros.iter().fold(C::new(1.0, 0.0), |acc, a| acc * (l - a))
                / poles.iter().fold(C::new(1.0, 0.0), |acc, a| acc * (l - a))
        });
        match winding_index(&phi) {
            Ok(k) => (k - (inside(&zeros) - inside(&poles))).abs() as f64,
            Err(_) => f64::INFINITY,
        }
    }));
    out.push(property("abc_sums_to_zero", 1e-13, cases, &mut rng, |rng| {
        let l = [0; 3].map(|_| random_c(rng, 5.0));
        match abc_from_lambda_triple(l[0], l[1], l[2]) {
            Ok(t) => (t.a + t.b + t.c).norm() / (t.a.norm() + t.b.norm() + t.c.norm()),
            Err(_) => 0.0,
        }
    }));
    out.push(property("backlund_trichotomy", 0.0, cases, &mut rng, |rng| {
        let triple = |rng: &mut ChaCha8Rng| {
            let l = [0; 3].map(|_| random_c(rng, 5.0));
            abc_from_lambda_triple(l[0], l[1], l[2]).ok()
        };
        let (Some(s), Some(t)) = (triple(rng), triple(rng)) else {
            return 0.0;
        };
        let scaled = twistor_core::pde::ABCTriple::new(s.a * 2.5, s.b * 2.5, s.c * 2.5).unwrap();
        let proportional_rejected = matches!(coefficients(s, scaled), Err(BacklundError::ProportionalTriples));
        let generic_ok = match coefficients(s, t) {
            Ok(c) => c.alpha != c.beta && c.beta != c.gamma && c.alpha != c.gamma,
            Err(_) => true,
        };
        if proportional_rejected && generic_ok {
            0.0
        } else {
            1.0
        }
    }));
    let linear = PolynomialGluing::new(-2, [C::new(1.0, 0.0)], 10.0);
    let opts = SolverOptions::default();
    out.push(property("linear_gluing_matches_interpolation", 1e-10, cases, &mut rng, |rng| {
        let p = [0; 3].map(|_| C::new(rng.gen_range(-0.02..0.02), 0.0));
        let expect = interpolation_value(lambdas, p);
        match wave_point(&linear, lambdas, p, &opts, Method::Newton, None) {
            Ok(sol) => (sol.transform_value() - expect).norm() / (1.0 + expect.norm()),
            Err(_) => f64::INFINITY,
        }
    }));
    out
}

fn verify(ctx: &Context<'_>) -> Result<RunOutcome, AppError> {
    let cfg = ctx.config;
    let results = run_properties(cfg.lambda_array(), cfg.verify.seed, cfg.verify.cases);
    for r in &results {
        log::info!("{}: {} passed, {} failed, worst {:e}", r.name, r.passed, r.failed, r.worst);
    }
    let summary = json!({ "config_hash": ctx.hash, "seed": cfg.verify.seed, "properties": results });
    let path = ctx.out.join("verify.json");
    io::write_json(&path, &summary)?;
    let failed: usize = results.iter().map(|r| r.failed).sum();
    if failed > 0 {
        return Err(AppError::solver(format!("{failed} property cases failed")));
    }
    Ok(RunOutcome {
        written: vec![path],
        summary,
    })
}
