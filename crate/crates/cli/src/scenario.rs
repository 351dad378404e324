//! Two-timescale qutrit scenario.
//!
//! A qutrit with populations (1/2, 1/2 − δ, δ), δ = ε², and spectrum
//! (0, 1, r) mixes a fast mode at frequency r with a slow drift at unit
//! frequency. While the slow phase stays small the trajectory recurs once per
//! fast period; once it drifts past the admission window no recurrence is
//! possible until the slow phase wraps around, leaving a gap that grows
//! linearly with the ratio r while the exit time shrinks like 1/r.
//! Consecutive recurrences are therefore not uniformly spaced: the worst gap
//! divided by the exit time can be made as large as desired by tuning r.

use serde::{Deserialize, Serialize};

use reclab_core::spectral::SpectralState;
use reclab_core::timing::{find_recurrences, CrossingQuery, SearchStatus};

use crate::commands::CliError;

/// Recurrence-gap statistics for one frequency ratio.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub ratio: f64,
    pub horizon: f64,
    pub t_exit: f64,
    pub recurrences_found: usize,
    /// Largest gap between consecutive recurrence times within the horizon.
    pub max_gap: f64,
    pub max_gap_over_t_exit: f64,
}

/// Scenario outcome across a set of ratios.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSummary {
    pub epsilon: f64,
    pub delta: f64,
    pub reports: Vec<RatioReport>,
    /// Whether max_gap/t_exit grows monotonically with the ratio.
    pub gap_ratio_monotone: bool,
}

/// Default search horizon: a full slow period 2π plus margin.
pub const DEFAULT_HORIZON: f64 = 8.0;

/// Maximum number of recurrences tracked per ratio; the horizon, not this
/// cap, is meant to end the search.
const RECURRENCE_CAP: usize = 100_000;

/// Runs the scenario for a single ratio.
pub fn qutrit_scenario(
    epsilon: f64,
    ratio: f64,
    horizon: Option<f64>,
) -> Result<RatioReport, CliError> {
    if !(epsilon > 0.0 && epsilon <= 0.3) {
        return Err(CliError::precondition(format!(
            "scenario threshold must lie in (0, 0.3], got {epsilon}"
        )));
    }
    if !ratio.is_finite() || ratio < 10.0 {
        return Err(CliError::precondition(format!(
            "timescale ratio must be at least 10, got {ratio}"
        )));
    }
    let delta = epsilon * epsilon;
    let state =
        SpectralState::from_probabilities(vec![0.0, 1.0, ratio], &[0.5, 0.5 - delta, delta])
            .map_err(CliError::from)?;
    let horizon = horizon.unwrap_or(DEFAULT_HORIZON);
    let moments = state.moments();
    let query = CrossingQuery::with_defaults(epsilon, &moments)
        .map_err(CliError::from)?
        .with_horizon(horizon)
        .with_recurrences(RECURRENCE_CAP);
    let cert = find_recurrences(&state, &query).map_err(CliError::from)?;

    if cert.status == SearchStatus::NeverExitsAnalytic {
        return Err(CliError::precondition(
            "scenario state does not exit; δ = ε² must be positive".to_string(),
        ));
    }
    let t_exit = match cert.t_exit {
        Some(t) => t,
        None => {
            return Err(CliError::horizon(format!(
                "no exit found within horizon {horizon}"
            )))
        }
    };
    if cert.recurrences.len() < 2 {
        return Err(CliError::horizon(format!(
            "only {} recurrence(s) within horizon {horizon}; too short to measure gaps",
            cert.recurrences.len()
        )));
    }
    let max_gap = cert
        .recurrences
        .windows(2)
        .map(|pair| pair[1] - pair[0])
        .fold(0.0f64, f64::max);
    Ok(RatioReport {
        ratio,
        horizon,
        t_exit,
        recurrences_found: cert.recurrences.len(),
        max_gap,
        max_gap_over_t_exit: max_gap / t_exit,
    })
}

/// Runs the scenario over several ratios and checks that the normalized worst
/// gap grows with the ratio.
pub fn run_scenario(
    epsilon: f64,
    ratios: &[f64],
    horizon: Option<f64>,
) -> Result<ScenarioSummary, CliError> {
    if ratios.is_empty() {
        return Err(CliError::precondition("scenario needs at least one ratio"));
    }
    let mut reports = Vec::with_capacity(ratios.len());
    for &ratio in ratios {
        reports.push(qutrit_scenario(epsilon, ratio, horizon)?);
    }
    let gap_ratio_monotone = reports
        .windows(2)
        .all(|pair| pair[1].max_gap_over_t_exit > pair[0].max_gap_over_t_exit);
    Ok(ScenarioSummary {
        epsilon,
        delta: epsilon * epsilon,
        reports,
        gap_ratio_monotone,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_parameters() {
        assert!(qutrit_scenario(0.0, 100.0, None).is_err());
        assert!(qutrit_scenario(0.4, 100.0, None).is_err());
        assert!(qutrit_scenario(0.1, 5.0, None).is_err());
    }

    #[test]
    fn short_horizon_is_reported_as_horizon_error() {
        let err = qutrit_scenario(0.1, 100.0, Some(0.05)).unwrap_err();
        assert!(err.is_horizon(), "unexpected error: {err}");
    }

    #[test]
    fn fast_mode_sets_the_exit_time() {
        let report = qutrit_scenario(0.1, 100.0, None).unwrap();
        // Exit happens on the fast timescale ~1/ratio.
        assert!(report.t_exit < 0.05, "t_exit = {}", report.t_exit);
        assert!(report.recurrences_found > 2);
        assert!(report.max_gap > 1.0, "max_gap = {}", report.max_gap);
    }

    #[test]
    fn solver_crossings_match_dense_grid_oracle() {
        // Scan the qutrit dynamics at step 1e−6 and enumerate the first
        // crossings directly; the scenario's solver must reproduce them.
        let epsilon = 0.1;
        let ratio = 1000.0;
        let delta = epsilon * epsilon;
        let state = SpectralState::from_probabilities(
            vec![0.0, 1.0, ratio],
            &[0.5, 0.5 - delta, delta],
        )
        .unwrap();

        let step = 1e-6;
        let bisect = |mut lo: f64, mut hi: f64, upward: bool| {
            while hi - lo > 1e-12 {
                let mid = 0.5 * (lo + hi);
                let crossed = if upward {
                    state.trace_distance_at(mid) >= epsilon
                } else {
                    state.trace_distance_at(mid) <= epsilon
                };
                if crossed {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            0.5 * (lo + hi)
        };
        let mut oracle_exit = None;
        let mut oracle_recs = Vec::new();
        let mut inside = true;
        let mut t = 0.0;
        while t < 0.025 && oracle_recs.len() < 3 {
            let next = t + step;
            let d = state.trace_distance_at(next);
            if inside && d >= epsilon {
                let crossing = bisect(t, next, true);
                if oracle_exit.is_none() {
                    oracle_exit = Some(crossing);
                }
                inside = false;
            } else if !inside && d <= epsilon {
                oracle_recs.push(bisect(t, next, false));
                inside = true;
            }
            t = next;
        }

        let moments = state.moments();
        let query = CrossingQuery::with_defaults(epsilon, &moments)
            .unwrap()
            .with_horizon(0.025)
            .with_recurrences(3);
        let cert = find_recurrences(&state, &query).unwrap();
        assert!((cert.t_exit.unwrap() - oracle_exit.unwrap()).abs() < 1e-7);
        assert_eq!(cert.recurrences.len(), 3);
        for (solver, oracle) in cert.recurrences.iter().zip(&oracle_recs) {
            assert!(
                (solver - oracle).abs() < 1e-7,
                "solver {solver} vs oracle {oracle}"
            );
        }
    }

    #[test]
    fn slow_gap_appears_within_first_fifty_recurrences_at_ratio_1000() {
        // At this ratio the admission window holds ~32 fast recurrences, so
        // the slow gap lands inside the first fifty.
        let epsilon = 0.1;
        let delta = epsilon * epsilon;
        let state = SpectralState::from_probabilities(
            vec![0.0, 1.0, 1000.0],
            &[0.5, 0.5 - delta, delta],
        )
        .unwrap();
        let moments = state.moments();
        let query = CrossingQuery::with_defaults(epsilon, &moments)
            .unwrap()
            .with_horizon(8.0)
            .with_recurrences(50);
        let cert = find_recurrences(&state, &query).unwrap();
        assert_eq!(cert.recurrences.len(), 50);
        let t_exit = cert.t_exit.unwrap();
        let max_gap = cert
            .recurrences
            .windows(2)
            .map(|pair| pair[1] - pair[0])
            .fold(0.0f64, f64::max);
        assert!(
            max_gap > 100.0 * t_exit,
            "max gap {max_gap} vs 100·t_exit {}",
            100.0 * t_exit
        );
    }
}
