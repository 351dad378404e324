//! Subcommand implementations.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use reclab_core::bounds::{self, ExitTimeSource, ExitTimes};
use reclab_core::ensemble::{
    run_dim_sweep, run_ensemble, EnsembleConfig, EnsembleRun, StateFamily, TrialRecord,
};
use reclab_core::geometry::{
    build_phase_net, covering_check, diagonal_diamond_distance, NetFlavor,
};
use reclab_core::io::load_state;
use reclab_core::spectral::SpectralState;
use reclab_core::timing::{
    find_exit, find_recurrences, recommended_horizon, CrossingQuery, SearchStatus,
    TimingCertificate,
};

use crate::cli::{
    BoundsArgs, Command, CoverArgs, DiamondArgs, EnsembleArgs, ExitArgs, ExitSourceArg, FiniteArgs,
    FlavorArg, FormatArg, MomentsArgs, RecurArgs, ScenarioArgs,
};
use crate::config::ConfigFile;
use crate::fmt::{bound_cell, opt_sig9, render_table, sig9};
use crate::scenario::run_scenario;

pub const EXIT_OK: i32 = 0;
pub const EXIT_PRECONDITION: i32 = 2;
pub const EXIT_HORIZON: i32 = 3;

/// CLI-level error: precondition failures map to exit code 2, horizon
/// exhaustion to 3.
#[derive(Debug)]
pub enum CliError {
    Precondition(String),
    Horizon(String),
}

impl CliError {
    pub fn precondition(msg: impl Into<String>) -> Self {
        CliError::Precondition(msg.into())
    }

    pub fn horizon(msg: impl Into<String>) -> Self {
        CliError::Horizon(msg.into())
    }

    pub fn is_horizon(&self) -> bool {
        matches!(self, CliError::Horizon(_))
    }

    pub fn code(&self) -> i32 {
        match self {
            CliError::Precondition(_) => EXIT_PRECONDITION,
            CliError::Horizon(_) => EXIT_HORIZON,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Precondition(msg) | CliError::Horizon(msg) => write!(f, "{msg}"),
        }
    }
}

impl From<reclab_core::Error> for CliError {
    fn from(err: reclab_core::Error) -> Self {
        CliError::Precondition(err.to_string())
    }
}

pub fn dispatch(command: Command, out: &mut dyn Write) -> Result<i32, CliError> {
    match command {
        Command::Moments(args) => moments_cmd(args, out),
        Command::Exit(args) => exit_cmd(args, out),
        Command::Recur(args) => recur_cmd(args, out),
        Command::Bounds(args) => bounds_cmd(args, out),
        Command::Finite(args) => finite_cmd(args, out),
        Command::CoverCheck(args) => cover_cmd(args, out),
        Command::Diamond(args) => diamond_cmd(args, out),
        Command::Ensemble(args) => ensemble_cmd(args, out),
        Command::Scenario(args) => scenario_cmd(args, out),
    }
}

fn moments_cmd(args: MomentsArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let cfg = ConfigFile::load(args.config.as_deref())?;
    let state = load_state_arg(args.state, &cfg)?;
    let moments = state.moments();
    emit_json(&moments, resolve_output(args.output, &cfg).as_deref(), out)?;
    Ok(EXIT_OK)
}

fn exit_cmd(args: ExitArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let cfg = ConfigFile::load(args.config.as_deref())?;
    let state = load_state_arg(args.state.clone(), &cfg)?;
    let epsilon = require_f64(args.epsilon, "epsilon", &cfg)?;
    let query = build_query(&state, epsilon, &args, &cfg, 0)?;
    let cert = find_exit(&state, &query)?;
    print_certificate_headline(&cert, out)?;
    emit_json(&cert, resolve_output(args.output, &cfg).as_deref(), out)?;
    Ok(status_code(cert.status))
}

fn recur_cmd(args: RecurArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let cfg = ConfigFile::load(args.solver.config.as_deref())?;
    let state = load_state_arg(args.solver.state.clone(), &cfg)?;
    let epsilon = require_f64(args.solver.epsilon, "epsilon", &cfg)?;
    let k = args.k.or(cfg.usize("k")).unwrap_or(1).max(1);
    let mut query = build_query(&state, epsilon, &args.solver, &cfg, k)?;

    // Unless the horizon was given explicitly, derive it from the measured
    // exit time and the first-recurrence ceiling.
    let explicit_horizon = args.solver.t_max.or(cfg.f64("t_max")).is_some();
    if !explicit_horizon {
        let exit_cert = find_exit(&state, &query)?;
        match exit_cert.t_exit {
            Some(t_exit) => {
                let m = state.moments();
                query.t_max = recommended_horizon(t_exit, epsilon, state.dim(), k, m.lipschitz);
            }
            None => {
                print_certificate_headline(&exit_cert, out)?;
                emit_json(
                    &exit_cert,
                    resolve_output(args.solver.output, &cfg).as_deref(),
                    out,
                )?;
                return Ok(status_code(exit_cert.status));
            }
        }
    }

    let cert = find_recurrences(&state, &query)?;
    print_certificate_headline(&cert, out)?;
    for (i, t) in cert.recurrences.iter().enumerate() {
        writeln!(out, "t_rec[{}] = {}", i + 1, sig9(*t)).map_err(io_err)?;
    }
    emit_json(
        &cert,
        resolve_output(args.solver.output, &cfg).as_deref(),
        out,
    )?;
    Ok(status_code(cert.status))
}

fn bounds_cmd(args: BoundsArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let cfg = ConfigFile::load(args.config.as_deref())?;
    let state = load_state_arg(args.state, &cfg)?;
    let epsilon = require_f64(args.epsilon, "epsilon", &cfg)?;
    let k = args.k.or(cfg.u64("k").map(|v| v as u32));
    let free_n = args.free_n.or(cfg.usize("free_n"));
    let source = args
        .exit_source
        .or_else(|| match cfg.string("exit_source").as_deref() {
            Some("measured") => Some(ExitSourceArg::Measured),
            Some("thm2") => Some(ExitSourceArg::Thm2),
            _ => None,
        })
        .unwrap_or(ExitSourceArg::Thm2);

    let moments = state.moments();
    let exit_times = match source {
        ExitSourceArg::Thm2 => {
            let at_epsilon = (moments.variance > 0.0)
                .then(|| bounds::qsl_bounds(epsilon, &moments).map(|q| q.thm2_upper))
                .transpose()?
                .flatten();
            let at_two_epsilon = (moments.variance > 0.0 && 2.0 * epsilon < 1.0)
                .then(|| bounds::qsl_bounds(2.0 * epsilon, &moments).map(|q| q.thm2_upper))
                .transpose()?
                .flatten();
            ExitTimes {
                source: ExitTimeSource::Theorem2,
                at_epsilon,
                at_two_epsilon,
            }
        }
        ExitSourceArg::Measured => {
            let at_epsilon = measure_exit(&state, epsilon)?;
            let at_two_epsilon = if 2.0 * epsilon < 1.0 {
                measure_exit(&state, 2.0 * epsilon)?
            } else {
                None
            };
            ExitTimes {
                source: ExitTimeSource::Measured,
                at_epsilon,
                at_two_epsilon,
            }
        }
    };

    let report = bounds::assemble_report(&state, epsilon, k, &exit_times, free_n)?;
    let rows = vec![
        ("epsilon".to_string(), sig9(report.epsilon)),
        ("dim".to_string(), report.dim.to_string()),
        ("eps_star".to_string(), sig9(report.eps_star)),
        ("mt_lower".to_string(), opt_sig9(report.mt_lower)),
        ("thm2_upper".to_string(), opt_sig9(report.thm2_upper)),
        (
            "exit_time_source".to_string(),
            match report.exit_time_source {
                ExitTimeSource::Measured => "measured".to_string(),
                ExitTimeSource::Theorem2 => "thm2".to_string(),
            },
        ),
        ("t_exit_eps".to_string(), opt_sig9(report.t_exit_eps)),
        ("t_exit_2eps".to_string(), opt_sig9(report.t_exit_2eps)),
        (
            "thm1_rec_upper".to_string(),
            bound_cell(report.thm1_rec_upper),
        ),
        (
            "kth_rec_upper".to_string(),
            bound_cell(report.kth_rec_upper),
        ),
        (
            "concrete_rec_upper".to_string(),
            bound_cell(report.concrete_rec_upper),
        ),
        (
            "d_supp_quarter".to_string(),
            report.d_supp_quarter.to_string(),
        ),
        ("d_supp_half".to_string(), report.d_supp_half.to_string()),
        (
            "reduced_rec_upper".to_string(),
            bound_cell(report.reduced_rec_upper),
        ),
        (
            "improved_reduced_rec_upper".to_string(),
            bound_cell(report.improved_reduced_rec_upper),
        ),
        (
            "free_rec_upper".to_string(),
            bound_cell(report.free_rec_upper),
        ),
        (
            "unitary_exit_upper".to_string(),
            opt_sig9(report.unitary_exit_upper),
        ),
        (
            "unitary_rec_upper".to_string(),
            bound_cell(report.unitary_rec_upper),
        ),
        ("finite_exit".to_string(), report.finite_exit.to_string()),
        (
            "finite_threshold".to_string(),
            sig9(report.finite_threshold),
        ),
        (
            "infimum_fidelity".to_string(),
            sig9(report.infimum_fidelity),
        ),
        (
            "rational_independence_caveat".to_string(),
            report.rational_independence_caveat.to_string(),
        ),
    ];
    write!(out, "{}", render_table(&rows)).map_err(io_err)?;
    emit_json(&report, resolve_output(args.output, &cfg).as_deref(), out)?;
    Ok(EXIT_OK)
}

fn finite_cmd(args: FiniteArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let cfg = ConfigFile::load(args.config.as_deref())?;
    let state = load_state_arg(args.state, &cfg)?;
    let epsilon = require_f64(args.epsilon, "epsilon", &cfg)?;
    let verdict = bounds::finiteness(&state, epsilon)?;
    writeln!(
        out,
        "finite = {} (threshold 1 - eps^2 = {}, infimum M = {})",
        verdict.finite,
        sig9(1.0 - epsilon * epsilon),
        sig9(verdict.infimum_fidelity)
    )
    .map_err(io_err)?;
    emit_json(&verdict, resolve_output(args.output, &cfg).as_deref(), out)?;
    Ok(EXIT_OK)
}

fn cover_cmd(args: CoverArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let cfg = ConfigFile::load(args.config.as_deref())?;
    let epsilon = require_f64(args.epsilon, "epsilon", &cfg)?;
    let dim = args
        .dim
        .or(cfg.usize("dim"))
        .ok_or_else(|| CliError::precondition("missing --dim"))?;
    let flavor = args
        .flavor
        .or_else(|| match cfg.string("flavor").as_deref() {
            Some("state") => Some(FlavorArg::State),
            Some("unitary") => Some(FlavorArg::Unitary),
            _ => None,
        })
        .ok_or_else(|| CliError::precondition("missing --flavor (state|unitary)"))?;
    let samples = args.samples.or(cfg.usize("samples")).unwrap_or(100_000);
    let seed = args.seed.or(cfg.u64("seed")).unwrap_or(0);

    let net = match flavor {
        FlavorArg::State => {
            let base_path = args.base.or_else(|| cfg.path("base")).ok_or_else(|| {
                CliError::precondition("a state-torus check needs --base <state file>")
            })?;
            let base = load_state(&base_path)?;
            build_phase_net(epsilon, dim, NetFlavor::StateTorus, Some(&base))?
        }
        FlavorArg::Unitary => build_phase_net(epsilon, dim, NetFlavor::UnitaryFamily, None)?,
    };
    let report = covering_check(&net, samples, seed)?;
    writeln!(
        out,
        "max_distance = {} over {} samples -> {}",
        sig9(report.max_distance),
        report.samples,
        if report.pass { "PASS" } else { "FAIL" }
    )
    .map_err(io_err)?;
    emit_json(&report, resolve_output(args.output, &cfg).as_deref(), out)?;
    Ok(EXIT_OK)
}

fn diamond_cmd(args: DiamondArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let cfg = ConfigFile::load(args.config.as_deref())?;
    let theta = args
        .theta
        .or_else(|| cfg.string("theta"))
        .ok_or_else(|| CliError::precondition("missing --theta"))?;
    let theta_prime = args
        .theta_prime
        .or_else(|| cfg.string("theta_prime"))
        .ok_or_else(|| CliError::precondition("missing --theta-prime"))?;
    let theta = parse_phase_list(&theta)?;
    let theta_prime = parse_phase_list(&theta_prime)?;
    let distance = diagonal_diamond_distance(&theta, &theta_prime)?;
    writeln!(out, "{}", sig9(distance)).map_err(io_err)?;
    #[derive(Serialize)]
    struct DiamondOut {
        distance: f64,
    }
    emit_json(
        &DiamondOut { distance },
        resolve_output(args.output, &cfg).as_deref(),
        out,
    )?;
    Ok(EXIT_OK)
}

fn ensemble_cmd(args: EnsembleArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let cfg = ConfigFile::load(args.config.as_deref())?;
    let epsilon = require_f64(args.epsilon, "epsilon", &cfg)?;
    let trials = args
        .trials
        .or(cfg.u64("trials"))
        .ok_or_else(|| CliError::precondition("missing --trials"))?;
    let seed = args.seed.or(cfg.u64("seed")).unwrap_or(0);
    let family = parse_family(
        &args
            .family
            .or_else(|| cfg.string("family"))
            .unwrap_or_else(|| "uniform".to_string()),
    )?;
    let probe_t = args.probe_t.or(cfg.f64("probe_t"));
    let rec_horizon = args.rec_horizon.or(cfg.f64("rec_horizon"));
    let format = args.format.unwrap_or(FormatArg::Json);
    let dim = args.dim.or(cfg.usize("dim"));
    let sweep = args
        .dim_sweep
        .or_else(|| cfg.string("dim_sweep"))
        .map(|s| parse_dim_sweep(&s))
        .transpose()?;

    let base = EnsembleConfig {
        dim: dim.unwrap_or(0),
        epsilon,
        trials,
        seed,
        family,
        probe_t,
        rec_horizon,
    };
    let output = resolve_output(args.output, &cfg);
    let trials_csv = args.trials_csv.or_else(|| cfg.path("trials_csv"));

    match (dim, sweep) {
        (Some(_), None) => {
            let run = run_ensemble(&base)?;
            writeln!(
                out,
                "dim {} eps {} trials {}: windows {} exit-window {} censored {}",
                run.summary.dim,
                sig9(run.summary.epsilon),
                run.summary.trials,
                sig9(run.summary.window_pass_fraction),
                sig9(run.summary.exit_window_fraction),
                run.summary.rec_censored
            )
            .map_err(io_err)?;
            if let Some(path) = &trials_csv {
                let file = File::create(path).map_err(io_err)?;
                write_trials_csv(&run, &mut BufWriter::new(file))?;
            }
            match format {
                FormatArg::Json => {
                    emit_json(&run.summary, output.as_deref(), out)?;
                }
                FormatArg::Csv => match output {
                    Some(path) => {
                        let file = File::create(path).map_err(io_err)?;
                        write_trials_csv(&run, &mut BufWriter::new(file))?;
                    }
                    None => write_trials_csv(&run, out)?,
                },
            }
            Ok(EXIT_OK)
        }
        (None, Some(dims)) => {
            let sweep = run_dim_sweep(&base, &dims)?;
            writeln!(
                out,
                "dims {:?}: slope {} ci [{}, {}]",
                sweep.dims,
                sig9(sweep.slope),
                sig9(sweep.slope_ci.0),
                sig9(sweep.slope_ci.1)
            )
            .map_err(io_err)?;
            if format == FormatArg::Csv {
                return Err(CliError::precondition(
                    "per-trial CSV is not produced in sweep mode; use --output for the JSON summary",
                ));
            }
            emit_json(&sweep, output.as_deref(), out)?;
            Ok(EXIT_OK)
        }
        (Some(_), Some(_)) => Err(CliError::precondition(
            "--dim and --dim-sweep are mutually exclusive",
        )),
        (None, None) => Err(CliError::precondition("missing --dim or --dim-sweep")),
    }
}

fn scenario_cmd(args: ScenarioArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let cfg = ConfigFile::load(args.config.as_deref())?;
    let epsilon = args.epsilon.or(cfg.f64("epsilon")).unwrap_or(0.1);
    let ratios = match args.ratios.or_else(|| cfg.string("ratios")) {
        Some(spec) => parse_ratio_list(&spec)?,
        None => vec![100.0, 1000.0, 10_000.0],
    };
    let horizon = args.horizon.or(cfg.f64("horizon"));
    let summary = run_scenario(epsilon, &ratios, horizon)?;
    for report in &summary.reports {
        writeln!(
            out,
            "ratio {}: t_exit {} recurrences {} max_gap {} gap/t_exit {}",
            sig9(report.ratio),
            sig9(report.t_exit),
            report.recurrences_found,
            sig9(report.max_gap),
            sig9(report.max_gap_over_t_exit)
        )
        .map_err(io_err)?;
    }
    writeln!(
        out,
        "gap ratio monotone over ratios: {}",
        summary.gap_ratio_monotone
    )
    .map_err(io_err)?;
    emit_json(&summary, resolve_output(args.output, &cfg).as_deref(), out)?;
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------------------
// helpers

fn status_code(status: SearchStatus) -> i32 {
    match status {
        SearchStatus::HorizonExhausted => EXIT_HORIZON,
        _ => EXIT_OK,
    }
}

fn print_certificate_headline(
    cert: &TimingCertificate,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    match (cert.status, cert.t_exit) {
        (SearchStatus::NeverExitsAnalytic, _) => {
            writeln!(out, "never exits (analytic)").map_err(io_err)
        }
        (SearchStatus::HorizonExhausted, None) => {
            writeln!(out, "horizon exhausted before exit").map_err(io_err)
        }
        (_, Some(t)) => writeln!(out, "t_exit = {}", sig9(t)).map_err(io_err),
        (_, None) => Ok(()),
    }
}

fn measure_exit(state: &SpectralState, epsilon: f64) -> Result<Option<f64>, CliError> {
    let moments = state.moments();
    if moments.variance <= 0.0 {
        return Ok(None);
    }
    let query = CrossingQuery::with_defaults(epsilon, &moments)?;
    Ok(find_exit(state, &query)?.t_exit)
}

fn build_query(
    state: &SpectralState,
    epsilon: f64,
    args: &ExitArgs,
    cfg: &ConfigFile,
    k: usize,
) -> Result<CrossingQuery, CliError> {
    let moments = state.moments();
    let mut query = if moments.variance > 0.0 {
        CrossingQuery::with_defaults(epsilon, &moments)?
    } else {
        // Stationary state: any valid query works, the solver answers
        // analytically before marching.
        CrossingQuery::new(epsilon, 1.0, 1.0, 1.0, 0)?
    };
    if let Some(dt_min) = args.dt_min.or(cfg.f64("dt_min")) {
        query.dt_min = dt_min;
    }
    if let Some(refine_tol) = args.refine_tol.or(cfg.f64("refine_tol")) {
        query.refine_tol = refine_tol;
    }
    if let Some(t_max) = args.t_max.or(cfg.f64("t_max")) {
        query.t_max = t_max;
        if moments.variance <= 0.0 {
            // Keep the placeholder step valid however small the horizon is.
            query.dt_min = query.dt_min.min(t_max);
        }
    }
    query.k = k;
    CrossingQuery::new(
        query.epsilon,
        query.dt_min,
        query.refine_tol,
        query.t_max,
        query.k,
    )
    .map_err(CliError::from)
}

fn load_state_arg(flag: Option<PathBuf>, cfg: &ConfigFile) -> Result<SpectralState, CliError> {
    let path = flag
        .or_else(|| cfg.path("state"))
        .ok_or_else(|| CliError::precondition("missing --state <file>"))?;
    load_state(&path)
        .map_err(|e| CliError::precondition(format!("cannot load {}: {e}", path.display())))
}

fn require_f64(flag: Option<f64>, key: &str, cfg: &ConfigFile) -> Result<f64, CliError> {
    flag.or_else(|| cfg.f64(key))
        .ok_or_else(|| CliError::precondition(format!("missing --{key}")))
}

fn resolve_output(flag: Option<PathBuf>, cfg: &ConfigFile) -> Option<PathBuf> {
    flag.or_else(|| cfg.path("output"))
}

fn emit_json<T: Serialize>(
    value: &T,
    path: Option<&Path>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::precondition(format!("serialization failed: {e}")))?;
    match path {
        Some(path) => {
            let mut file = BufWriter::new(File::create(path).map_err(io_err)?);
            writeln!(file, "{text}").map_err(io_err)?;
        }
        None => writeln!(out, "{text}").map_err(io_err)?,
    }
    Ok(())
}

fn io_err(e: std::io::Error) -> CliError {
    CliError::Precondition(format!("io: {e}"))
}

/// Parses a comma-separated phase list; each entry is a float with an
/// optional `pi` factor: `0,pi`, `1.5pi,-pi,0.25`.
pub fn parse_phase_list(text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|token| {
            let token = token.trim();
            let (mantissa, multiplier) = match token.strip_suffix("pi") {
                Some("") => ("1", std::f64::consts::PI),
                Some("-") => ("-1", std::f64::consts::PI),
                Some(prefix) => (prefix, std::f64::consts::PI),
                None => (token, 1.0),
            };
            mantissa
                .trim()
                .parse::<f64>()
                .map(|v| v * multiplier)
                .map_err(|_| CliError::precondition(format!("bad phase entry: {token:?}")))
        })
        .collect()
}

pub fn parse_family(text: &str) -> Result<StateFamily, CliError> {
    match text {
        "uniform" => Ok(StateFamily::Uniform),
        other => match other.strip_prefix("eta:") {
            Some(eta) => eta
                .parse::<f64>()
                .map(StateFamily::Eta)
                .map_err(|_| CliError::precondition(format!("bad η in family spec {text:?}"))),
            None => Err(CliError::precondition(format!(
                "unknown family {text:?}; expected uniform or eta:<η>"
            ))),
        },
    }
}

/// Parses an inclusive sweep `a..b`.
pub fn parse_dim_sweep(text: &str) -> Result<Vec<usize>, CliError> {
    let (a, b) = text
        .split_once("..")
        .ok_or_else(|| CliError::precondition(format!("bad sweep {text:?}; expected a..b")))?;
    let a: usize = a
        .trim()
        .parse()
        .map_err(|_| CliError::precondition(format!("bad sweep start in {text:?}")))?;
    let b: usize = b
        .trim()
        .parse()
        .map_err(|_| CliError::precondition(format!("bad sweep end in {text:?}")))?;
    if a < 1 || b < a {
        return Err(CliError::precondition(format!(
            "sweep bounds must satisfy 1 <= a <= b, got {text:?}"
        )));
    }
    Ok((a..=b).collect())
}

fn parse_ratio_list(text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|token| {
            token
                .trim()
                .parse::<f64>()
                .map_err(|_| CliError::precondition(format!("bad ratio entry {token:?}")))
        })
        .collect()
}

/// One row per trial, stable column order. Floats use shortest round-trip
/// formatting; absent values are empty cells.
pub fn write_trials_csv(run: &EnsembleRun, out: &mut dyn Write) -> Result<(), CliError> {
    let mut writer = csv::Writer::from_writer(out);
    writer
        .write_record([
            "trial",
            "spectrum_seed",
            "dim",
            "epsilon",
            "mean",
            "second_moment",
            "variance",
            "fourth_central",
            "eps_star",
            "lipschitz",
            "window_mean",
            "window_second",
            "window_variance",
            "window_fourth",
            "t_exit",
            "exit_status",
            "exit_in_window",
            "t_rec",
            "rec_censored",
            "monotone_ok",
            "d_eff",
            "d_supp_quarter",
            "probe_distance",
        ])
        .map_err(csv_err)?;
    for record in &run.records {
        writer
            .write_record(trial_row(run, record))
            .map_err(csv_err)?;
    }
    writer.flush().map_err(io_err)?;
    Ok(())
}

fn trial_row(run: &EnsembleRun, r: &TrialRecord) -> Vec<String> {
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    vec![
        r.trial.to_string(),
        r.spectrum_seed.to_string(),
        run.config.dim.to_string(),
        run.config.epsilon.to_string(),
        r.moments.mean.to_string(),
        r.moments.second_moment.to_string(),
        r.moments.variance.to_string(),
        r.moments.fourth_central.to_string(),
        r.moments.eps_star.to_string(),
        r.moments.lipschitz.to_string(),
        r.windows.mean.to_string(),
        r.windows.second_moment.to_string(),
        r.windows.variance.to_string(),
        r.windows.fourth_moment.to_string(),
        opt(r.t_exit),
        format!("{:?}", r.exit_status),
        r.exit_in_window.to_string(),
        opt(r.t_rec),
        r.rec_censored.to_string(),
        r.monotone_ok.map(|b| b.to_string()).unwrap_or_default(),
        r.d_eff.to_string(),
        r.d_supp_quarter.to_string(),
        opt(r.probe_distance),
    ]
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Precondition(format!("csv: {e}"))
}
