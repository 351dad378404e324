//! Monte Carlo experiments over random diagonal Hamiltonians.
//!
//! Eigenvalues are drawn i.i.d. uniform on [−1, 1]; the initial state is
//! either the uniform superposition or the η-weighted family (one level at
//! weight η, the rest equal). Each trial is keyed by a counter-based seed, so
//! trials can run on any number of workers and still reproduce bit-for-bit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, SQRT_2};

use crate::bounds::BoundValue;
use crate::error::{Error, Result};
use crate::spectral::{MomentSummary, SpectralState};
use crate::structure::{effective_dimension, effective_support};
use crate::timing::{find_exit, find_recurrences, CrossingQuery, SearchStatus};

/// Time below which the geometric proximity bound does not apply.
pub const PROXIMITY_MIN_TIME: f64 = SQRT_2 / 9.0;

/// Constant in the proximity bound (8π/ε²)·(Cε)^d.
pub const PROXIMITY_CONSTANT: f64 = 50.0 * (1.0 + 72.0 / SQRT_2);

/// Initial-state family for ensemble trials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum StateFamily {
    /// Equal weight on every eigenstate.
    Uniform,
    /// Weight η on one randomly placed eigenstate, the rest equal. Keeps the
    /// effective dimension ≈ 1/η² while the effective support stays ≈ d.
    Eta(f64),
}

/// One ensemble experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub dim: usize,
    pub epsilon: f64,
    pub trials: u64,
    pub seed: u64,
    pub family: StateFamily,
    /// Optional fixed probe time; when set, each record carries D(t_probe).
    pub probe_t: Option<f64>,
    /// Cap on the per-trial recurrence horizon. The effective horizon is
    /// min(first-recurrence ceiling, this, 1e8/L); `None` keeps only the
    /// default legs.
    pub rec_horizon: Option<f64>,
}

impl EnsembleConfig {
    pub fn new(dim: usize, epsilon: f64, trials: u64, seed: u64) -> Self {
        EnsembleConfig {
            dim,
            epsilon,
            trials,
            seed,
            family: StateFamily::Uniform,
            probe_t: None,
            rec_horizon: None,
        }
    }

    pub fn with_family(mut self, family: StateFamily) -> Self {
        self.family = family;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 1 {
            return Err(Error::invalid("ensemble dimension must be ≥ 1"));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::invalid(format!(
                "threshold ε must lie in (0, 1), got {}",
                self.epsilon
            )));
        }
        if self.trials < 1 {
            return Err(Error::invalid("ensemble needs at least one trial"));
        }
        if let StateFamily::Eta(eta) = self.family {
            if !(eta > 0.0 && eta < 1.0) {
                return Err(Error::invalid(format!("η must lie in (0, 1), got {eta}")));
            }
        }
        Ok(())
    }
}

/// Moment-window flags for one trial. The bands come with margin ~1/10 around
/// the population values ⟨H⟩ → 0, ⟨H²⟩ → 1/3, ⟨H⁴⟩ → 1/5 of the uniform
/// eigenvalue law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowFlags {
    /// |⟨H⟩| < 1/10
    pub mean: bool,
    /// 1/5 < ⟨H²⟩ < 1/2
    pub second_moment: bool,
    /// 1/10 < Δ(H²) < 1/2
    pub variance: bool,
    /// |⟨H⁴⟩ − 1/5| < 1/10
    pub fourth_moment: bool,
}

impl WindowFlags {
    pub fn all(&self) -> bool {
        self.mean && self.second_moment && self.variance && self.fourth_moment
    }
}

/// Everything recorded for one Monte Carlo trial. Fully determined by
/// (config.seed, trial).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    /// Derived per-trial RNG seed; replaying it reproduces the spectrum.
    pub spectrum_seed: u64,
    pub moments: MomentSummary,
    pub windows: WindowFlags,
    pub t_exit: Option<f64>,
    pub exit_status: SearchStatus,
    /// √2·ε < t_exit < 2√5·ε
    pub exit_in_window: bool,
    pub t_rec: Option<f64>,
    /// Recurrence search reached its horizon without a return.
    pub rec_censored: bool,
    /// Distance non-decreasing on a 10³-point grid of [0, t_exit(ε*)];
    /// `None` when t_exit(ε*) could not be measured.
    pub monotone_ok: Option<bool>,
    pub d_eff: f64,
    /// Effective support at tail ε²/4.
    pub d_supp_quarter: usize,
    pub probe_distance: Option<f64>,
}

/// Aggregate view of one ensemble run. Records are sorted by trial id before
/// reduction, so the summary does not depend on scheduling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSummary {
    pub dim: usize,
    pub epsilon: f64,
    pub trials: u64,
    pub window_pass_fraction: f64,
    pub exit_window_fraction: f64,
    /// Fraction satisfying all moment windows and the exit window at once.
    pub window_and_exit_fraction: f64,
    /// Fraction of monotone trials among those where the check ran.
    pub monotone_fraction: f64,
    pub t_exit: Quantiles,
    pub t_rec: Quantiles,
    pub rec_censored: u64,
}

/// Quartiles with censored observations treated as +∞; a quantile that lands
/// on a censored value is reported as absent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quantiles {
    pub q25: Option<f64>,
    pub median: Option<f64>,
    pub q75: Option<f64>,
}

/// Records plus summary for one configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleRun {
    pub config: EnsembleConfig,
    pub records: Vec<TrialRecord>,
    pub summary: EnsembleSummary,
}

/// Result of a dimension sweep: median recurrence scaling against d.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub dims: Vec<usize>,
    /// ln of the median recurrence time per dimension (absent if censored).
    pub median_log_t_rec: Vec<Option<f64>>,
    /// Least-squares slope of median ln t_rec against d.
    pub slope: f64,
    /// 95% bootstrap confidence interval for the slope.
    pub slope_ci: (f64, f64),
    pub per_dim: Vec<EnsembleSummary>,
}

/// Empirical proximity probability P(D(t) < ε) with its analytic ceiling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProximityReport {
    pub dim: usize,
    pub epsilon: f64,
    pub t: f64,
    pub trials: u64,
    pub hits: u64,
    pub empirical: f64,
    /// 95% Wilson score interval.
    pub wilson_low: f64,
    pub wilson_high: f64,
    /// (8π/ε²)·(Cε)^d, C = 50(1 + 72/√2).
    pub bound: BoundValue,
    /// The ceiling exceeds 1 and carries no information at this (d, ε).
    pub bound_vacuous: bool,
}

/// Runs a single trial. Pure in (config, trial): the RNG is keyed by a
/// counter-based seed, never by global state.
pub fn sample_trial(config: &EnsembleConfig, trial: u64) -> TrialRecord {
    let spectrum_seed = mix_seed(config.seed, trial);
    let mut rng = ChaCha8Rng::seed_from_u64(spectrum_seed);
    let state = draw_state(config, &mut rng);
    let moments = state.moments();
    let epsilon = config.epsilon;

    let raw_fourth: f64 = state
        .probabilities()
        .iter()
        .zip(state.eigenvalues())
        .map(|(p, l)| p * l.powi(4))
        .sum();
    let windows = WindowFlags {
        mean: moments.mean.abs() < 0.1,
        second_moment: moments.second_moment > 0.2 && moments.second_moment < 0.5,
        variance: moments.variance > 0.1 && moments.variance < 0.5,
        fourth_moment: (raw_fourth - 0.2).abs() < 0.1,
    };

    let d_eff = effective_dimension(&state);
    let d_supp_quarter = effective_support(&state, epsilon * epsilon / 4.0)
        .expect("ε²/4 < 1")
        .indices
        .len();
    let probe_distance = config.probe_t.map(|t| state.trace_distance_at(t));

    let (t_exit, exit_status, t_rec, rec_censored, monotone_ok) = if moments.variance > 0.0 {
        run_timing(&state, &moments, config)
    } else {
        (None, SearchStatus::NeverExitsAnalytic, None, false, None)
    };

    let exit_in_window = t_exit
        .map(|t| t > SQRT_2 * epsilon && t < 2.0 * 5f64.sqrt() * epsilon)
        .unwrap_or(false);

    TrialRecord {
        trial,
        spectrum_seed,
        moments,
        windows,
        t_exit,
        exit_status,
        exit_in_window,
        t_rec,
        rec_censored,
        monotone_ok,
        d_eff,
        d_supp_quarter,
        probe_distance,
    }
}

fn run_timing(
    state: &SpectralState,
    moments: &MomentSummary,
    config: &EnsembleConfig,
) -> (Option<f64>, SearchStatus, Option<f64>, bool, Option<bool>) {
    let epsilon = config.epsilon;
    let query = CrossingQuery::with_defaults(epsilon, moments).expect("variance > 0");
    let exit_cert = find_exit(state, &query).expect("query validated");
    let t_exit = exit_cert.t_exit;

    let (t_rec, rec_censored) = match t_exit {
        Some(te) => {
            let mut horizon = horizon_cap(te, epsilon, state.dim(), moments.lipschitz);
            if let Some(user) = config.rec_horizon {
                horizon = horizon.min(user);
            }
            if horizon > te {
                let rec_query = query.with_horizon(horizon).with_recurrences(1);
                let cert = find_recurrences(state, &rec_query).expect("query validated");
                let censored = cert.status == SearchStatus::HorizonExhausted;
                (cert.recurrences.first().copied(), censored)
            } else {
                (None, true)
            }
        }
        None => (None, exit_cert.status == SearchStatus::HorizonExhausted),
    };

    // Monotonicity of D on [0, t_exit(ε*)], sampled on a 10³-point grid.
    let monotone_ok = if moments.eps_star > 0.0 {
        CrossingQuery::with_defaults(moments.eps_star, moments)
            .ok()
            .and_then(|q| find_exit(state, &q).ok())
            .and_then(|cert| cert.t_exit)
            .map(|t_star| {
                let mut prev = 0.0;
                let mut ok = true;
                for i in 0..=1000 {
                    let t = t_star * i as f64 / 1000.0;
                    let d = state.trace_distance_at(t);
                    if d < prev - 1e-9 {
                        ok = false;
                        break;
                    }
                    prev = d;
                }
                ok
            })
    } else {
        None
    };

    (t_exit, exit_cert.status, t_rec, rec_censored, monotone_ok)
}

/// Per-trial recurrence horizon: min(first-recurrence ceiling, 1e8/L),
/// evaluated in log space.
fn horizon_cap(t_exit: f64, epsilon: f64, dim: usize, lipschitz: f64) -> f64 {
    let cap = 1e8 / lipschitz;
    if dim < 2 {
        return cap;
    }
    let log10 = t_exit.log10() + (dim - 1) as f64 * (4.0 * PI / epsilon).log10();
    if log10 > 300.0 {
        cap
    } else {
        10f64.powf(log10).min(cap)
    }
}

/// Runs all trials of a configuration on the rayon pool and aggregates them.
pub fn run_ensemble(config: &EnsembleConfig) -> Result<EnsembleRun> {
    config.validate()?;
    let mut records: Vec<TrialRecord> = (0..config.trials)
        .into_par_iter()
        .map(|trial| sample_trial(config, trial))
        .collect();
    records.sort_by_key(|r| r.trial);
    let summary = summarize(config, &records);
    Ok(EnsembleRun {
        config: config.clone(),
        records,
        summary,
    })
}

fn summarize(config: &EnsembleConfig, records: &[TrialRecord]) -> EnsembleSummary {
    let n = records.len() as f64;
    let window_pass = records.iter().filter(|r| r.windows.all()).count() as f64;
    let exit_window = records.iter().filter(|r| r.exit_in_window).count() as f64;
    let both = records
        .iter()
        .filter(|r| r.windows.all() && r.exit_in_window)
        .count() as f64;
    let monotone_checked = records.iter().filter(|r| r.monotone_ok.is_some()).count();
    let monotone_ok = records
        .iter()
        .filter(|r| r.monotone_ok == Some(true))
        .count();

    let t_exit_values: Vec<f64> = records
        .iter()
        .map(|r| r.t_exit.unwrap_or(f64::INFINITY))
        .collect();
    let t_rec_values: Vec<f64> = records
        .iter()
        .map(|r| r.t_rec.unwrap_or(f64::INFINITY))
        .collect();

    EnsembleSummary {
        dim: config.dim,
        epsilon: config.epsilon,
        trials: config.trials,
        window_pass_fraction: window_pass / n,
        exit_window_fraction: exit_window / n,
        window_and_exit_fraction: both / n,
        monotone_fraction: if monotone_checked > 0 {
            monotone_ok as f64 / monotone_checked as f64
        } else {
            0.0
        },
        t_exit: quantiles(&t_exit_values),
        t_rec: quantiles(&t_rec_values),
        rec_censored: records.iter().filter(|r| r.rec_censored).count() as u64,
    }
}

fn quantiles(values: &[f64]) -> Quantiles {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let pick = |q: f64| -> Option<f64> {
        let idx = ((sorted.len() - 1) as f64 * q).round() as usize;
        sorted[idx].is_finite().then_some(sorted[idx])
    };
    Quantiles {
        q25: pick(0.25),
        median: pick(0.5),
        q75: pick(0.75),
    }
}

const BOOTSTRAP_RESAMPLES: usize = 1000;

/// Sweeps the dimension, fitting the slope of median ln t_rec against d,
/// with a seeded bootstrap for the slope's confidence interval.
pub fn run_dim_sweep(base: &EnsembleConfig, dims: &[usize]) -> Result<SweepSummary> {
    if dims.len() < 2 {
        return Err(Error::invalid("a dimension sweep needs at least two dims"));
    }
    let mut runs = Vec::with_capacity(dims.len());
    for &dim in dims {
        let config = EnsembleConfig {
            dim,
            ..base.clone()
        };
        runs.push(run_ensemble(&config)?);
    }

    let t_rec_per_dim: Vec<Vec<f64>> = runs
        .iter()
        .map(|run| {
            run.records
                .iter()
                .map(|r| r.t_rec.unwrap_or(f64::INFINITY))
                .collect()
        })
        .collect();

    let median_log_t_rec: Vec<Option<f64>> = t_rec_per_dim
        .iter()
        .map(|values| quantiles(values).median.map(f64::ln))
        .collect();

    let points: Vec<(f64, f64)> = dims
        .iter()
        .zip(&median_log_t_rec)
        .filter_map(|(&d, m)| m.map(|m| (d as f64, m)))
        .collect();
    if points.len() < 2 {
        return Err(Error::invalid(
            "fewer than two dimensions produced an uncensored median recurrence time",
        ));
    }
    let slope = least_squares_slope(&points);

    // Bootstrap over trials within each dimension.
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(base.seed, 0xb007_57a9));
    let mut slopes = Vec::with_capacity(BOOTSTRAP_RESAMPLES);
    for _ in 0..BOOTSTRAP_RESAMPLES {
        let mut resampled_points = Vec::with_capacity(dims.len());
        for (i, values) in t_rec_per_dim.iter().enumerate() {
            let mut resample: Vec<f64> = (0..values.len())
                .map(|_| values[rng.random_range(0..values.len())])
                .collect();
            resample.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let median = resample[(resample.len() - 1) / 2];
            if median.is_finite() {
                resampled_points.push((dims[i] as f64, median.ln()));
            }
        }
        if resampled_points.len() >= 2 {
            slopes.push(least_squares_slope(&resampled_points));
        }
    }
    slopes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let slope_ci = if slopes.is_empty() {
        (f64::NEG_INFINITY, f64::INFINITY)
    } else {
        let lo = slopes[((slopes.len() - 1) as f64 * 0.025).round() as usize];
        let hi = slopes[((slopes.len() - 1) as f64 * 0.975).round() as usize];
        (lo, hi)
    };

    Ok(SweepSummary {
        dims: dims.to_vec(),
        median_log_t_rec,
        slope,
        slope_ci,
        per_dim: runs.into_iter().map(|r| r.summary).collect(),
    })
}

fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mean_x: f64 = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y: f64 = points.iter().map(|p| p.1).sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var = 0.0;
    for &(x, y) in points {
        cov += (x - mean_x) * (y - mean_y);
        var += (x - mean_x) * (x - mean_x);
    }
    cov / var
}

/// Monte Carlo estimate of P(D(t) < ε) for the uniform state over random
/// spectra, against the analytic ceiling (8π/ε²)·(Cε)^d. Requires t > √2/9,
/// the regime where the ceiling holds.
pub fn proximity_probability(
    dim: usize,
    epsilon: f64,
    t: f64,
    trials: u64,
    seed: u64,
) -> Result<ProximityReport> {
    if dim < 1 {
        return Err(Error::invalid("dimension must be ≥ 1"));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::invalid(format!(
            "threshold ε must lie in (0, 1), got {epsilon}"
        )));
    }
    if trials < 1 {
        return Err(Error::invalid(
            "proximity estimate needs at least one trial",
        ));
    }
    if t <= PROXIMITY_MIN_TIME {
        return Err(Error::invalid(format!(
            "probe time must exceed √2/9 ≈ {PROXIMITY_MIN_TIME:.6}, got {t}"
        )));
    }

    let hits: u64 = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, trial));
            let lambdas: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..=1.0)).collect();
            let state = SpectralState::uniform(lambdas).expect("uniform state");
            u64::from(state.trace_distance_at(t) < epsilon)
        })
        .sum();

    let empirical = hits as f64 / trials as f64;
    let (wilson_low, wilson_high) = wilson_interval(hits, trials);
    let bound = BoundValue::from_log10(
        (8.0 * PI / (epsilon * epsilon)).log10()
            + dim as f64 * (PROXIMITY_CONSTANT * epsilon).log10(),
    );
    Ok(ProximityReport {
        dim,
        epsilon,
        t,
        trials,
        hits,
        empirical,
        wilson_low,
        wilson_high,
        bound,
        bound_vacuous: bound.log10 >= 0.0,
    })
}

/// 95% Wilson score interval for a binomial proportion.
fn wilson_interval(hits: u64, trials: u64) -> (f64, f64) {
    let z = 1.959963984540054;
    let n = trials as f64;
    let p = hits as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

fn draw_state(config: &EnsembleConfig, rng: &mut ChaCha8Rng) -> SpectralState {
    let lambdas: Vec<f64> = (0..config.dim)
        .map(|_| rng.random_range(-1.0..=1.0))
        .collect();
    match config.family {
        StateFamily::Uniform => SpectralState::uniform(lambdas).expect("uniform state"),
        StateFamily::Eta(eta) => {
            let d = config.dim;
            if d == 1 {
                return SpectralState::from_probabilities(lambdas, &[1.0]).expect("eigenstate");
            }
            let heavy = rng.random_range(0..d);
            let rest = (1.0 - eta) / (d - 1) as f64;
            let mut probs = vec![rest; d];
            probs[heavy] = eta;
            SpectralState::from_probabilities(lambdas, &probs).expect("η state")
        }
    }
}

/// SplitMix64 of seed ⊕ golden-ratio-spaced counter; cheap, stateless and
/// collision-resistant enough to key independent trial streams.
fn mix_seed(seed: u64, counter: u64) -> u64 {
    let mut z = seed
        ^ counter
            .wrapping_mul(0x9e37_79b9_7f4a_7c15)
            .wrapping_add(0x1234_5678_9abc_def1);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trials_are_reproducible() {
        let config = EnsembleConfig::new(6, 0.3, 4, 99);
        let a = sample_trial(&config, 2);
        let b = sample_trial(&config, 2);
        assert_eq!(a, b);
        let c = sample_trial(&config, 3);
        assert_ne!(a.spectrum_seed, c.spectrum_seed);
    }

    #[test]
    fn single_level_trial_never_exits() {
        let config = EnsembleConfig::new(1, 0.3, 1, 7);
        let record = sample_trial(&config, 0);
        assert_eq!(record.exit_status, SearchStatus::NeverExitsAnalytic);
        assert!(record.t_exit.is_none());
        assert!(!record.exit_in_window);
    }

    #[test]
    fn small_dim_exit_between_qsl_bounds() {
        let config = EnsembleConfig::new(4, 0.3, 12, 12345);
        for trial in 0..config.trials {
            let record = sample_trial(&config, trial);
            if record.moments.eps_star > config.epsilon {
                let t = record.t_exit.expect("ε < ε* exits");
                let lo = config.epsilon.asin() / record.moments.lipschitz;
                let hi = config.epsilon
                    / record.moments.lipschitz
                    / (1.0 - config.epsilon / record.moments.eps_star).sqrt();
                assert!(t >= lo - 1e-9 && t <= hi + 1e-9, "t={t}, [{lo}, {hi}]");
            }
        }
    }

    #[test]
    fn summary_of_single_trial_echoes_record() {
        let config = EnsembleConfig::new(3, 0.3, 1, 5);
        let run = run_ensemble(&config).unwrap();
        assert_eq!(run.records.len(), 1);
        let r = &run.records[0];
        assert_eq!(run.summary.t_exit.median, r.t_exit);
        assert_eq!(
            run.summary.window_pass_fraction,
            if r.windows.all() { 1.0 } else { 0.0 }
        );
    }

    #[test]
    fn run_is_deterministic_across_invocations() {
        let config = EnsembleConfig::new(5, 0.25, 16, 2024);
        let a = run_ensemble(&config).unwrap();
        let b = run_ensemble(&config).unwrap();
        assert_eq!(a.records, b.records);
        assert_eq!(a.summary, b.summary);
    }

    #[test]
    fn moderate_dim_windows_mostly_hold() {
        let config = EnsembleConfig {
            rec_horizon: Some(0.0),
            ..EnsembleConfig::new(400, 0.05, 20, 31)
        };
        let run = run_ensemble(&config).unwrap();
        assert!(
            run.summary.window_pass_fraction >= 0.9,
            "window fraction {}",
            run.summary.window_pass_fraction
        );
        assert_eq!(run.summary.rec_censored, 20);
    }

    #[test]
    fn eta_family_separates_deff_from_dsupp() {
        let config = EnsembleConfig {
            family: StateFamily::Eta(0.1),
            rec_horizon: Some(0.0),
            ..EnsembleConfig::new(101, 0.3, 3, 8)
        };
        for trial in 0..3 {
            let record = sample_trial(&config, trial);
            let d = config.dim as f64;
            let formula = (d - 1.0) / (d * 0.01 + 1.0 - 0.2);
            assert!((record.d_eff - formula).abs() < 1e-9);
            assert!(record.d_supp_quarter >= 90);
        }
    }

    #[test]
    fn proximity_requires_late_probe_time() {
        assert!(proximity_probability(4, 0.3, 0.1, 10, 1).is_err());
        let report = proximity_probability(4, 0.3, 1.0, 2000, 1).unwrap();
        assert!(report.bound_vacuous);
        assert!(report.wilson_low <= report.empirical);
        assert!(report.empirical <= report.wilson_high);
        let again = proximity_probability(4, 0.3, 1.0, 2000, 1).unwrap();
        assert_eq!(report, again);
    }

    #[test]
    fn proximity_shrinks_with_epsilon() {
        let loose = proximity_probability(3, 0.5, 1.0, 4000, 9).unwrap();
        let tight = proximity_probability(3, 0.05, 1.0, 4000, 9).unwrap();
        assert!(tight.empirical <= loose.empirical);
    }

    #[test]
    fn proximity_respects_non_vacuous_bound() {
        // Dimension high enough and ε small enough that (8π/ε²)(Cε)^d < 1.
        let report = proximity_probability(20, 1e-4, 1.0, 2000, 3).unwrap();
        assert!(!report.bound_vacuous, "bound log10 {}", report.bound.log10);
        assert!(report.empirical <= report.bound.approx());
    }

    #[test]
    fn sweep_slope_is_positive_for_tiny_demo() {
        let base = EnsembleConfig::new(0, 0.3, 40, 77);
        let sweep = run_dim_sweep(&base, &[2, 3, 4]).unwrap();
        assert!(
            sweep.slope > 0.0,
            "slope {} (medians {:?})",
            sweep.slope,
            sweep.median_log_t_rec
        );
        assert!(sweep.slope_ci.0 <= sweep.slope && sweep.slope <= sweep.slope_ci.1);
    }
}
