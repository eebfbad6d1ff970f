use std::io::{self, Write};
use std::thread;

use clap::ValueEnum;
use num_complex::Complex64;
use ptbec::acceptance::{Suite, CRITERIA};
use ptbec::ep::{
    classify, matrix_eigenvector_mapping, trace_contour, AppendixEpsProvider, AppendixProvider, BranchTrace,
    ContourParameter, ContourSpec, GpeProvider, MatrixProvider, Orientation, SpectrumProvider,
};
use ptbec::gpe::{
    broken_pair, continue_branch, continued_pair, critical_gamma, ground_and_excited, into_mode, trace_branch,
    BoundState, ContinuationOptions, GpeConfig, Mode, PtClass, SweepParameter,
};
use ptbec::matrix_model::{eigenvalues, scalar_product_e4, scalar_product_series, ModelParams};
use serde_json::{json, Value};

use crate::output::{complex, complex_columns, Cell, Table};
use crate::{
    AcceptanceArgs, EncircleArgs, OutputArgs, ProviderArg, ScalarProductArgs, SpectrumGpeArgs, SpectrumMatrixArgs,
    WavefunctionArgs,
};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Solver(ptbec::Error),
    #[error("writing output: {0}")]
    Io(#[from] io::Error),
    #[error("{0}")]
    Failed(String),
}

impl From<ptbec::Error> for CliError {
    fn from(e: ptbec::Error) -> Self {
        match e {
            ptbec::Error::InvalidConfig(m) => CliError::Config(m),
            other => CliError::Solver(other),
        }
    }
}

impl CliError {
    /// 2 for invalid configuration, 1 for everything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            _ => 1,
        }
    }
}

type CliResult<T = ()> = Result<T, CliError>;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn config_error(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn check_steps(steps: usize) -> CliResult {
    if steps == 0 {
        return Err(config_error("--steps must be at least 1"));
    }
    Ok(())
}

fn emit(table: &Table, out: &OutputArgs) -> CliResult {
    table.emit(out.out.as_deref(), out.format)?;
    Ok(())
}

fn gpe_meta(table: &mut Table, cfg: &GpeConfig) {
    table.meta("g", cfg.g);
    table.meta("a", cfg.a);
    table.meta("mode", cfg.mode.name());
    table.meta("ode_tol", cfg.ode_tol);
    table.meta("newton_tol", cfg.newton_tol);
    table.meta("symmetry_tol", cfg.symmetry_tol);
    table.meta("x_max", "auto");
}

/// Outcome of one branch at one grid point.
type Row = Result<(Complex64, PtClass), String>;

/// Switches on a real asymmetry from `A = 0`.
fn shift_asym(cfg: &GpeConfig, state: BoundState, asym: f64) -> ptbec::Result<BoundState> {
    if asym == 0.0 {
        return Ok(state);
    }
    let n = (asym.abs() / 0.01).ceil().max(1.0) as usize;
    let path: Vec<Complex64> = (0..=n).map(|k| c(asym * k as f64 / n as f64)).collect();
    let states = continue_branch(&cfg.with_asym(c(0.0)), SweepParameter::Asym, &path, &state)?;
    Ok(states.into_iter().last().expect("path is not empty"))
}

/// Follows `seed` over `grid` from one end, recording where it is lost.
fn walk(cfg: &GpeConfig, grid: &[f64], seed: Result<BoundState, String>, family: &Family) -> Vec<Row> {
    let n = grid.len();
    let mut state = match seed {
        Ok(s) => s,
        Err(e) => return vec![Err(e); n],
    };
    let order: Vec<usize> = if family.downward { (0..n).rev().collect() } else { (0..n).collect() };
    let mut out: Vec<Row> = vec![Err(String::new()); n];
    let opts = ContinuationOptions { require_class: Some(family.class), ..Default::default() };
    let mut prev = order[0];
    out[prev] = Ok((state.kappa, state.pt_class));
    for (pos, &k) in order.iter().enumerate().skip(1) {
        let base = cfg.with_gamma(c(grid[prev]));
        let track = trace_branch(&base, SweepParameter::Gamma, &[c(grid[prev]), c(grid[k])], &state, &opts);
        match (track.lost_after, track.points.into_iter().last()) {
            (None, Some(p)) if !family.continued || has_continued_part(&p.state) => {
                state = p.state;
                out[k] = Ok((state.kappa, state.pt_class));
                prev = k;
            }
            _ => {
                let msg = format!("branch lost after gamma = {}", grid[prev]);
                for &j in &order[pos..] {
                    out[j] = Err(msg.clone());
                }
                break;
            }
        }
    }
    out
}

/// Largest `|ψ_ri|` still counted as zero: a state without continued part
/// is the ground state, not one of the continued branches.
const CONTINUED_PART_TOL: f64 = 1e-7;

fn has_continued_part(s: &BoundState) -> bool {
    s.psi.iter().any(|w| w.value.ri.abs() > CONTINUED_PART_TOL)
}

/// How a pair of branches is seeded and followed over the γ grid.
struct Family {
    labels: [&'static str; 2],
    /// Seeded at the top of the range and followed downwards.
    downward: bool,
    class: PtClass,
    /// Steps must keep a nonzero continued part `ψ_ri`.
    continued: bool,
}

/// Seeds a pair of branches and walks both over the grid.
fn pair_family(
    cfg: &GpeConfig,
    grid: &[f64],
    asym: f64,
    family: Family,
    seed: impl FnOnce() -> ptbec::Result<(BoundState, BoundState)>,
) -> Vec<(&'static str, Vec<Row>)> {
    let start = if family.downward { grid[grid.len() - 1] } else { grid[0] };
    let at = cfg.with_gamma(c(start));
    let seeds: [Result<BoundState, String>; 2] = match seed() {
        Ok((a, b)) => [a, b].map(|s| shift_asym(&at, s, asym).map_err(|e| e.to_string())),
        Err(e) => [Err(e.to_string()), Err(e.to_string())],
    };
    let [sa, sb] = seeds;
    let f = &family;
    thread::scope(|s| {
        let ha = s.spawn(move || walk(cfg, grid, sa, f));
        let hb = s.spawn(move || walk(cfg, grid, sb, f));
        vec![(f.labels[0], ha.join().expect("worker panicked")), (f.labels[1], hb.join().expect("worker panicked"))]
    })
}

pub fn spectrum_gpe(args: &SpectrumGpeArgs) -> CliResult {
    let mode: Mode = args.mode.into();
    let cfg = args.gpe.config(mode).with_asym(c(args.asym));
    cfg.validate()?;
    check_steps(args.steps)?;
    let grid = args.gamma_range.grid(args.steps);
    let (lo, hi) = (grid[0], grid[grid.len() - 1]);
    let plain = cfg.with_asym(c(0.0));

    let branches: Vec<(&'static str, Vec<Row>)> = thread::scope(|s| {
        let mut jobs = Vec::new();
        jobs.push(s.spawn(|| {
            let family = Family {
                labels: ["ground", "excited"],
                downward: false,
                class: PtClass::PtSymmetric,
                continued: false,
            };
            pair_family(&cfg, &grid, args.asym, family, || ground_and_excited(&plain.with_gamma(c(lo))))
        }));
        if mode != Mode::PtContinued {
            jobs.push(s.spawn(|| {
                let family = Family {
                    labels: ["broken+", "broken-"],
                    downward: true,
                    class: PtClass::PtBroken,
                    continued: false,
                };
                pair_family(&cfg, &grid, args.asym, family, || {
                    let at = plain.with_gamma(c(hi));
                    let (up, down) = broken_pair(&at)?;
                    Ok((into_mode(&at, &up)?, into_mode(&at, &down)?))
                })
            }));
        }
        if mode == Mode::FullContinuation {
            jobs.push(s.spawn(|| {
                let family = Family {
                    labels: ["continued+", "continued-"],
                    downward: false,
                    class: PtClass::PtSymmetric,
                    continued: true,
                };
                pair_family(&cfg, &grid, args.asym, family, || continued_pair(&plain.with_gamma(c(lo))))
            }));
        }
        jobs.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    });

    let mut columns = vec!["gamma".to_string(), "branch".to_string()];
    columns.extend(complex_columns("kappa"));
    columns.extend(["pt_class".to_string(), "status".to_string()]);
    let mut table = Table::new("spectrum-gpe", columns);
    gpe_meta(&mut table, &cfg);
    table.meta("asym", args.asym);
    table.meta("gamma_range", args.gamma_range.to_string());
    table.meta("steps", args.steps);

    let mut converged = 0;
    for (k, &gamma) in grid.iter().enumerate() {
        for (label, rows) in &branches {
            let mut row = vec![gamma.into(), (*label).into()];
            match &rows[k] {
                Ok((kappa, class)) => {
                    converged += 1;
                    row.extend(complex(Some(*kappa)));
                    row.extend([class.name().into(), "ok".into()]);
                }
                Err(msg) => {
                    row.extend(complex(None));
                    row.extend([Cell::Empty, msg.clone().into()]);
                }
            }
            table.push(row);
        }
    }
    emit(&table, &args.output)?;
    if converged == 0 {
        return Err(CliError::Failed("no branch converged anywhere on the grid".into()));
    }
    Ok(())
}

pub fn spectrum_matrix(args: &SpectrumMatrixArgs) -> CliResult {
    if !(args.g >= 0.0 && args.g.is_finite()) {
        return Err(config_error("--g must be finite and non-negative"));
    }
    check_steps(args.steps)?;
    let mut columns = vec!["gamma".to_string()];
    for name in ["e1", "e2", "e3", "e4"] {
        columns.extend(complex_columns(name));
    }
    columns.push("status".into());
    let mut table = Table::new("spectrum-matrix", columns);
    table.meta("g", args.g);
    table.meta("gamma_range", args.gamma_range.to_string());
    table.meta("steps", args.steps);
    table.meta("gamma_cr", ModelParams::critical_gamma(args.g).ok());
    for gamma in args.gamma_range.grid(args.steps) {
        let mut row: Vec<Cell> = vec![gamma.into()];
        match eigenvalues(&ModelParams::new(args.g, gamma)) {
            Ok(e) => {
                for z in [e.e1, e.e2, e.e3, e.e4] {
                    row.extend(complex(Some(z)));
                }
                row.push("ok".into());
            }
            Err(err) => {
                for _ in 0..4 {
                    row.extend(complex(None));
                }
                row.push(err.to_string().into());
            }
        }
        table.push(row);
    }
    emit(&table, &args.output)
}

/// Distance of the asymmetry seeds' preparation point above the fixed γ.
const ASYM_LIFT: f64 = 0.02;

fn detected_gamma_cr(cfg: &GpeConfig) -> CliResult<f64> {
    Ok(critical_gamma(&cfg.with_mode(Mode::Naive))?.gamma)
}

fn run_contour<P: SpectrumProvider>(provider: &P, spec: &ContourSpec) -> CliResult<BranchTrace> {
    Ok(trace_contour(provider, spec)?)
}

pub fn encircle(args: &EncircleArgs) -> CliResult {
    let cfg = args.gpe.config(Mode::Naive);
    let orientation = if args.clockwise { Orientation::Clockwise } else { Orientation::CounterClockwise };
    let mut meta: Vec<(&str, Value)> = Vec::new();
    let spec_for = |parameter, center: f64, radius: f64, steps: usize| {
        ContourSpec::circle(parameter, c(center), radius, steps).with_turns(args.turns).with_orientation(orientation)
    };
    let radius = |default: f64| args.contour_radius.unwrap_or(default);
    let steps = |default: usize| args.steps.unwrap_or(default);

    let (spec, trace) = match args.provider {
        ProviderArg::Matrix => {
            let center = match args.contour_center {
                Some(x) => x,
                None => ModelParams::critical_gamma(args.gpe.g)?,
            };
            let spec = spec_for(ContourParameter::ModelGamma, center, radius(0.04), steps(64));
            let trace = run_contour(&MatrixProvider { g: args.gpe.g }, &spec)?;
            meta.push(("g", json!(args.gpe.g)));
            let vectors = matrix_eigenvector_mapping(args.gpe.g, &trace).map_err(|e| e.to_string());
            meta.push(("eigenvector_mapping", vectors.map_or_else(Value::from, |m| json!(m))));
            (spec, trace)
        }
        ProviderArg::GpeGamma => {
            cfg.validate()?;
            let center = match args.contour_center {
                Some(x) => x,
                None => detected_gamma_cr(&cfg)?,
            };
            let spec = spec_for(ContourParameter::Gamma, center, radius(0.04), steps(32));
            spec.validate()?;
            let provider = GpeProvider::gamma_circle(&cfg, center, spec.radius)?;
            gpe_contour_meta(&mut meta, &cfg);
            (spec, run_contour(&provider, &spec)?)
        }
        ProviderArg::GpeAsym => {
            cfg.validate()?;
            if args.contour_center.is_some_and(|x| x != 0.0) {
                return Err(config_error("the asymmetry circle is centred at A = 0"));
            }
            let gamma = match args.gamma {
                Some(g) => g,
                None => detected_gamma_cr(&cfg)?,
            };
            let spec = spec_for(ContourParameter::AsymmetryA, 0.0, radius(0.04), steps(32));
            spec.validate()?;
            let provider = GpeProvider::asymmetry_circle(&cfg, gamma, spec.radius, ASYM_LIFT)?;
            gpe_contour_meta(&mut meta, &cfg);
            meta.push(("gamma", json!(gamma)));
            meta.push(("seed_lift", json!(ASYM_LIFT)));
            (spec, run_contour(&provider, &spec)?)
        }
        ProviderArg::AppendixY => {
            let spec =
                spec_for(ContourParameter::AppendixY, args.contour_center.unwrap_or(1.0), radius(0.3), steps(64));
            meta.push(("eps", json!(args.eps)));
            (spec, run_contour(&AppendixProvider { eps: c(args.eps) }, &spec)?)
        }
        ProviderArg::AppendixEps => {
            let spec =
                spec_for(ContourParameter::AppendixEps, args.contour_center.unwrap_or(0.0), radius(1e-3), steps(64));
            meta.push(("y", json!(args.y)));
            (spec, run_contour(&AppendixEpsProvider { y: c(args.y) }, &spec)?)
        }
    };
    let perm = classify(&trace);

    let mut columns = vec!["step".to_string(), "phi".to_string()];
    columns.extend(complex_columns("parameter"));
    for label in &trace.labels {
        columns.extend(complex_columns(label));
    }
    let mut table = Table::new("encircle", columns);
    table.meta("provider", args.provider.to_possible_value().map(|v| v.get_name().to_string()));
    table.meta("parameter", spec.parameter.name());
    table.meta("center", json!([spec.center.re, spec.center.im]));
    table.meta("radius", spec.radius);
    table.meta("steps", spec.n_steps);
    table.meta("turns", spec.turns);
    table.meta("orientation", if args.clockwise { "clockwise" } else { "counter-clockwise" });
    for (k, v) in meta {
        table.meta(k, v);
    }
    table.meta("labels", json!(trace.labels));
    table.meta("matched", trace.matched);
    table.meta("classification", perm.classification.name());
    table.meta("mapping", json!(perm.mapping));
    table.meta("cycle_structure", json!(perm.cycle_structure));
    for (k, values) in trace.values.iter().enumerate() {
        let mut row: Vec<Cell> = vec![k.into(), trace.angles[k].into()];
        row.extend(complex(Some(trace.parameters[k])));
        for z in values {
            row.extend(complex(Some(*z)));
        }
        table.push(row);
    }
    emit(&table, &args.output)?;
    let moves: Vec<String> =
        perm.mapping.iter().enumerate().map(|(i, &j)| format!("{} -> {}", trace.labels[i], trace.labels[j])).collect();
    eprintln!("{}: {}", perm.classification.name(), moves.join(", "));
    Ok(())
}

fn gpe_contour_meta(meta: &mut Vec<(&str, Value)>, cfg: &GpeConfig) {
    meta.push(("g", json!(cfg.g)));
    meta.push(("a", json!(cfg.a)));
    meta.push(("mode", json!(Mode::FullContinuation.name())));
    meta.push(("ode_tol", json!(cfg.ode_tol)));
    meta.push(("newton_tol", json!(cfg.newton_tol)));
}

/// All branches available at one γ in the given mode, each converged
/// independently.
fn branches_at(cfg: &GpeConfig) -> Vec<(&'static str, Result<BoundState, String>)> {
    let pair = |labels: [&'static str; 2], r: ptbec::Result<(BoundState, BoundState)>| match r {
        Ok((a, b)) => vec![(labels[0], Ok(a)), (labels[1], Ok(b))],
        Err(e) => labels.iter().map(|l| (*l, Err(format!("not found: {e}")))).collect(),
    };
    let mut out = pair(["ground", "excited"], ground_and_excited(cfg));
    if cfg.mode == Mode::FullContinuation {
        out.extend(pair(["continued+", "continued-"], continued_pair(cfg)));
    }
    if cfg.mode != Mode::PtContinued {
        let broken = broken_pair(cfg).and_then(|(u, d)| Ok((into_mode(cfg, &u)?, into_mode(cfg, &d)?)));
        out.extend(pair(["broken+", "broken-"], broken));
    }
    out
}

pub fn wavefunctions(args: &WavefunctionArgs) -> CliResult {
    let cfg = args.gpe.config(args.mode.into());
    cfg.validate()?;
    if args.gamma.is_empty() || args.gamma.iter().any(|g| !g.is_finite()) {
        return Err(config_error("--gamma needs finite values"));
    }
    let per_gamma: Vec<_> = thread::scope(|s| {
        let jobs: Vec<_> = args
            .gamma
            .iter()
            .map(|&g| {
                let at = cfg.with_gamma(c(g));
                s.spawn(move || branches_at(&at))
            })
            .collect();
        jobs.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });

    let mut columns: Vec<String> =
        ["gamma", "branch", "x", "psi_rr", "psi_ri", "psi_ir", "psi_ii"].map(String::from).to_vec();
    columns.extend(complex_columns("kappa"));
    columns.extend(["pt_class", "pt_defect", "norm", "status"].map(String::from));
    let mut table = Table::new("wavefunctions", columns);
    gpe_meta(&mut table, &cfg);
    table.meta("gamma", json!(args.gamma));
    let mut found = 0;
    for (&gamma, branches) in args.gamma.iter().zip(&per_gamma) {
        for (label, state) in branches {
            match state {
                Ok(s) => {
                    found += 1;
                    for w in &s.psi {
                        let v = w.value;
                        let mut row: Vec<Cell> = vec![
                            gamma.into(),
                            (*label).into(),
                            w.x.into(),
                            v.rr.into(),
                            v.ri.into(),
                            v.ir.into(),
                            v.ii.into(),
                        ];
                        row.extend(complex(Some(s.kappa)));
                        row.extend([s.pt_class.name().into(), s.pt_defect.into(), s.norm.into(), "ok".into()]);
                        table.push(row);
                    }
                }
                Err(msg) => {
                    let mut row: Vec<Cell> = vec![gamma.into(), (*label).into()];
                    // x, four ψ parts, κ, pt_class, pt_defect, norm
                    row.extend(std::iter::repeat_n(Cell::Empty, 10));
                    row.push(msg.clone().into());
                    table.push(row);
                }
            }
        }
    }
    emit(&table, &args.output)?;
    if found == 0 {
        return Err(CliError::Failed("no state converged".into()));
    }
    Ok(())
}

/// `Im S` below this (relative) counts as real.
const REAL_TOL: f64 = 1e-12;

pub fn scalar_product(args: &ScalarProductArgs) -> CliResult {
    if args.g.is_empty() || args.g.iter().any(|g| !(g.is_finite() && *g >= 0.0)) {
        return Err(config_error("--g needs finite non-negative values"));
    }
    check_steps(args.steps)?;
    let mut columns = vec!["g".to_string(), "gamma".to_string()];
    columns.extend(complex_columns("s"));
    columns.extend(["is_real", "c0", "c_half", "series", "status"].map(String::from));
    let mut table = Table::new("scalar-product", columns);
    table.meta("g", json!(args.g));
    table.meta("gamma_range", args.gamma_range.to_string());
    table.meta("steps", args.steps);
    table.meta("real_tol", REAL_TOL);
    let grid = args.gamma_range.grid(args.steps);
    for &g in &args.g {
        for &gamma in &grid {
            let series = scalar_product_series(gamma).ok();
            let mut row: Vec<Cell> = vec![g.into(), gamma.into()];
            let value = scalar_product_e4(&ModelParams::new(g, gamma));
            let status = match &value {
                Ok(_) => "ok".to_string(),
                Err(e) => e.to_string(),
            };
            let value = value.ok();
            row.extend(complex(value));
            row.push(value.map(|v| v.im.abs() <= REAL_TOL * v.norm().max(1.0)).into());
            row.push(series.map(|s| s.0).into());
            row.push(series.map(|s| s.1).into());
            row.push(series.map(|(c0, ch)| c0 + ch * g.sqrt()).into());
            row.push(status.into());
            table.push(row);
        }
    }
    emit(&table, &args.output)
}

pub fn acceptance(args: &AcceptanceArgs) -> CliResult {
    let ids: Vec<u8> = match &args.only {
        Some(list) => {
            if let Some(bad) = list.iter().find(|id| !CRITERIA.iter().any(|(k, _)| k == *id)) {
                return Err(config_error(format!("no criterion {bad}; valid are 1..={}", CRITERIA.len())));
            }
            list.clone()
        }
        None => CRITERIA.iter().map(|(id, _)| *id).collect(),
    };
    let suite = Suite::new();
    let columns = ["id", "title", "passed", "detail", "elapsed_s"].map(String::from).to_vec();
    let mut table = Table::new("acceptance", columns);
    let mut failed = 0;
    let mut stdout = io::stdout();
    for id in &ids {
        let outcome = suite.run(*id);
        writeln!(stdout, "{}", outcome.line())?;
        stdout.flush()?;
        failed += usize::from(!outcome.passed);
        table.push(vec![
            usize::from(outcome.id).into(),
            outcome.title.into(),
            outcome.passed.into(),
            outcome.detail.into(),
            outcome.elapsed.as_secs_f64().into(),
        ]);
    }
    writeln!(stdout, "{} of {} criteria passed", ids.len() - failed, ids.len())?;
    if args.output.out.is_some() {
        emit(&table, &args.output)?;
    }
    if failed > 0 {
        return Err(CliError::Failed(format!("{failed} criteria failed")));
    }
    Ok(())
}
