//! Closed-form exit-time and recurrence-time bounds.
//!
//! Everything here is a direct formula evaluation; the quantities that grow
//! like (1/ε)^{d−1} are computed in log space so large dimensions do not
//! overflow — a [`BoundValue`] always carries log₁₀ of the bound and, when
//! representable, the plain value.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{MomentSummary, SpectralState};
use crate::structure::effective_support;

/// A non-negative bound stored as log₁₀, with the plain value alongside when
/// it fits in an f64.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundValue {
    pub log10: f64,
    pub value: Option<f64>,
}

impl BoundValue {
    pub fn from_log10(log10: f64) -> Self {
        let value = if log10 < 308.0 {
            Some(10f64.powf(log10))
        } else {
            None
        };
        BoundValue { log10, value }
    }

    pub fn from_value(value: f64) -> Self {
        assert!(value > 0.0 && value.is_finite());
        BoundValue {
            log10: value.log10(),
            value: Some(value),
        }
    }

    /// The bound as an f64, +∞ when it overflows.
    pub fn approx(&self) -> f64 {
        self.value.unwrap_or(f64::INFINITY)
    }
}

impl fmt::Display for BoundValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value {
            Some(v) => write!(f, "{v:.9e}"),
            None => write!(f, "overflow (10^{:.3})", self.log10),
        }
    }
}

/// Mandelstam–Tamm exit-time floor and the inverse-speed-limit ceiling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QslBounds {
    /// arcsin(ε)/√Δ(H²); no exit can occur earlier.
    pub mt_lower: f64,
    /// (ε/√Δ(H²))·(1 − ε/ε*)^{−1/2}, defined only for ε < ε*.
    pub thm2_upper: Option<f64>,
}

/// Exit-time bracket for a threshold ε.
pub fn qsl_bounds(epsilon: f64, m: &MomentSummary) -> Result<QslBounds> {
    check_epsilon(epsilon)?;
    if m.variance <= 0.0 {
        return Err(Error::ZeroVariance(
            "speed-limit bounds need Δ(H²) > 0; a stationary state never exits",
        ));
    }
    let mt_lower = epsilon.asin() / m.lipschitz;
    let thm2_upper =
        (epsilon < m.eps_star).then(|| epsilon / m.lipschitz / (1.0 - epsilon / m.eps_star).sqrt());
    Ok(QslBounds {
        mt_lower,
        thm2_upper,
    })
}

/// Recurrence-time ceilings derived from an exit time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceBounds {
    /// t_exit(ε)·(4π/ε)^{d−1} — first recurrence.
    pub first: BoundValue,
    /// k·t_exit(2ε)·(8π/ε)^{d−1} — k-th recurrence; needs t_exit(2ε).
    pub kth: Option<BoundValue>,
    /// (ε/√(2Δ(H²)))·(4π/ε)^{d−1} — explicit form, valid only for ε < ε*/2.
    pub concrete: Option<BoundValue>,
}

/// Evaluates the recurrence ceilings for one (ε, d) instance.
///
/// `t_exit_eps` must be supplied by the caller (measured or an upper bound);
/// the k-th variant additionally needs `t_exit_2eps` and `k` — it is never
/// substituted from the ε-scale value. The concrete variant is returned only
/// under its ε < ε*/2 validity condition.
pub fn recurrence_bounds(
    epsilon: f64,
    dim: usize,
    t_exit_eps: f64,
    t_exit_2eps: Option<f64>,
    k: Option<u32>,
    moments: Option<&MomentSummary>,
) -> Result<RecurrenceBounds> {
    check_epsilon(epsilon)?;
    if dim < 2 {
        return Err(Error::invalid(format!(
            "recurrence bounds need dimension ≥ 2, got {dim}"
        )));
    }
    if !(t_exit_eps > 0.0 && t_exit_eps.is_finite()) {
        return Err(Error::invalid(format!(
            "exit time must be positive and finite, got {t_exit_eps}"
        )));
    }
    let first = power_bound(t_exit_eps, 4.0 * PI / epsilon, dim - 1);

    let kth = match (k, t_exit_2eps) {
        (Some(k), Some(t2)) => {
            if 2.0 * epsilon >= 1.0 {
                return Err(Error::invalid(format!(
                    "k-th recurrence bound needs 2ε < 1, got ε = {epsilon}"
                )));
            }
            if k == 0 {
                return Err(Error::invalid("k-th recurrence bound needs k ≥ 1"));
            }
            if !(t2 > 0.0 && t2.is_finite()) {
                return Err(Error::invalid(format!(
                    "exit time at 2ε must be positive and finite, got {t2}"
                )));
            }
            Some(power_bound(f64::from(k) * t2, 8.0 * PI / epsilon, dim - 1))
        }
        _ => None,
    };

    let concrete = moments.and_then(|m| {
        (m.variance > 0.0 && epsilon < m.eps_star / 2.0).then(|| {
            power_bound(
                epsilon / (2.0 * m.variance).sqrt(),
                4.0 * PI / epsilon,
                dim - 1,
            )
        })
    });

    Ok(RecurrenceBounds {
        first,
        kth,
        concrete,
    })
}

/// Recurrence ceilings with the dimension replaced by an effective support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducedBounds {
    /// t_exit(ε)·(8π/ε)^{d_supp(ε²/4)−1}.
    pub from_quarter_support: BoundValue,
    /// t_exit(ε)·(8π/ε)^{d_supp(ε/2)−1} — the improved exponent.
    pub from_half_support: BoundValue,
}

pub fn reduced_bound(
    epsilon: f64,
    t_exit_eps: f64,
    d_supp_quarter: usize,
    d_supp_half: usize,
) -> Result<ReducedBounds> {
    check_epsilon(epsilon)?;
    if d_supp_quarter < 1 || d_supp_half < 1 {
        return Err(Error::invalid("effective supports must be ≥ 1"));
    }
    if !(t_exit_eps > 0.0 && t_exit_eps.is_finite()) {
        return Err(Error::invalid(format!(
            "exit time must be positive and finite, got {t_exit_eps}"
        )));
    }
    let base = 8.0 * PI / epsilon;
    Ok(ReducedBounds {
        from_quarter_support: power_bound(t_exit_eps, base, d_supp_quarter - 1),
        from_half_support: power_bound(t_exit_eps, base, d_supp_half - 1),
    })
}

/// Recurrence ceiling for n particles evolving under a non-interacting
/// Hamiltonian with single-particle dimension `d_single`:
/// t_exit(ε)·(4πn/ε)^{d_single−1}.
pub fn free_bound(epsilon: f64, t_exit_eps: f64, d_single: usize, n: usize) -> Result<BoundValue> {
    check_epsilon(epsilon)?;
    if n < 1 {
        return Err(Error::invalid("particle count must be ≥ 1"));
    }
    if d_single < 2 {
        return Err(Error::invalid(format!(
            "single-particle dimension must be ≥ 2, got {d_single}"
        )));
    }
    if !(t_exit_eps > 0.0 && t_exit_eps.is_finite()) {
        return Err(Error::invalid(format!(
            "exit time must be positive and finite, got {t_exit_eps}"
        )));
    }
    Ok(power_bound(
        t_exit_eps,
        4.0 * PI * n as f64 / epsilon,
        d_single - 1,
    ))
}

/// Exit and recurrence ceilings for the induced dynamics on unitary channels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitaryBounds {
    /// πε/(λ_max − λ_min).
    pub exit_upper: f64,
    /// exit_upper·(8π/ε)^{d−1}.
    pub rec_upper: BoundValue,
}

pub fn unitary_bounds(
    epsilon: f64,
    lambda_max: f64,
    lambda_min: f64,
    dim: usize,
) -> Result<UnitaryBounds> {
    check_epsilon(epsilon)?;
    if !lambda_max.is_finite() || !lambda_min.is_finite() || lambda_max <= lambda_min {
        return Err(Error::invalid(format!(
            "flat spectrum: need λ_max > λ_min, got [{lambda_min}, {lambda_max}]"
        )));
    }
    if dim < 1 {
        return Err(Error::invalid("dimension must be ≥ 1"));
    }
    let exit_upper = PI * epsilon / (lambda_max - lambda_min);
    Ok(UnitaryBounds {
        exit_upper,
        rec_upper: power_bound(exit_upper, 8.0 * PI / epsilon, dim.saturating_sub(1)),
    })
}

/// Verdict of the exit-time finiteness criterion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FinitenessVerdict {
    /// Whether 1 − ε² ≥ M, i.e. the trajectory can reach distance ε.
    pub finite: bool,
    /// M = (max{2·max_k p_k − 1, 0})², the squared infimum of the survival
    /// amplitude over the phase torus.
    pub infimum_fidelity: f64,
    /// The "finite" direction of the criterion presumes rationally
    /// independent eigenvalues, which is never verified numerically.
    pub rational_independence_caveat: bool,
}

/// Decides whether the exit time can be finite at threshold ε.
///
/// The infimum is computed for the squared modulus, M = (2p_max − 1)₊²; the
/// "never exits" direction (1 − ε² < M) holds unconditionally, while the
/// converse assumes rational independence of the spectrum — hence the caveat
/// flag, which is always set.
pub fn finiteness(state: &SpectralState, epsilon: f64) -> Result<FinitenessVerdict> {
    check_epsilon(epsilon)?;
    let p_max = state.max_probability();
    let infimum_fidelity = (2.0 * p_max - 1.0).max(0.0).powi(2);
    Ok(FinitenessVerdict {
        finite: 1.0 - epsilon * epsilon >= infimum_fidelity,
        infimum_fidelity,
        rational_independence_caveat: true,
    })
}

/// Where an exit-time input to the recurrence bounds came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExitTimeSource {
    /// Measured by the crossing solver.
    Measured,
    /// The analytic inverse-speed-limit ceiling.
    Theorem2,
}

/// Exit times supplied by the caller, with provenance. Empirical and analytic
/// values are never mixed implicitly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExitTimes {
    pub source: ExitTimeSource,
    pub at_epsilon: Option<f64>,
    pub at_two_epsilon: Option<f64>,
}

/// Every closed-form bound evaluated for one (state, ε) instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub epsilon: f64,
    pub dim: usize,
    pub eps_star: f64,
    pub mt_lower: Option<f64>,
    pub thm2_upper: Option<f64>,
    pub exit_time_source: ExitTimeSource,
    pub t_exit_eps: Option<f64>,
    pub t_exit_2eps: Option<f64>,
    pub thm1_rec_upper: Option<BoundValue>,
    pub kth_rec_upper: Option<BoundValue>,
    pub concrete_rec_upper: Option<BoundValue>,
    pub d_supp_quarter: usize,
    pub d_supp_half: usize,
    pub reduced_rec_upper: Option<BoundValue>,
    pub improved_reduced_rec_upper: Option<BoundValue>,
    pub free_particles: Option<usize>,
    pub free_rec_upper: Option<BoundValue>,
    pub unitary_exit_upper: Option<f64>,
    pub unitary_rec_upper: Option<BoundValue>,
    pub finite_exit: bool,
    /// The criterion compares 1 − ε² against the infimum fidelity.
    pub finite_threshold: f64,
    pub infimum_fidelity: f64,
    pub rational_independence_caveat: bool,
}

/// Assembles the full report for one instance. Optional rows stay absent when
/// their preconditions fail or their inputs were not supplied.
pub fn assemble_report(
    state: &SpectralState,
    epsilon: f64,
    k: Option<u32>,
    exit_times: &ExitTimes,
    free_particles: Option<usize>,
) -> Result<BoundReport> {
    check_epsilon(epsilon)?;
    let m = state.moments();
    let dim = state.dim();
    let qsl = if m.variance > 0.0 {
        Some(qsl_bounds(epsilon, &m)?)
    } else {
        None
    };
    let fin = finiteness(state, epsilon)?;

    let rec = match exit_times.at_epsilon {
        Some(t_exit) if dim >= 2 => Some(recurrence_bounds(
            epsilon,
            dim,
            t_exit,
            exit_times.at_two_epsilon,
            k,
            Some(&m),
        )?),
        _ => None,
    };

    let quarter = effective_support(state, epsilon * epsilon / 4.0)?;
    let half = effective_support(state, epsilon / 2.0)?;
    let reduced = exit_times
        .at_epsilon
        .map(|t_exit| reduced_bound(epsilon, t_exit, quarter.indices.len(), half.indices.len()))
        .transpose()?;

    let free_rec_upper = match (free_particles, exit_times.at_epsilon) {
        (Some(n), Some(t_exit)) if dim >= 2 => Some(free_bound(epsilon, t_exit, dim, n)?),
        _ => None,
    };

    let spectrum_span = state
        .eigenvalues()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &l| {
            (lo.min(l), hi.max(l))
        });
    let unitary = (spectrum_span.1 > spectrum_span.0)
        .then(|| unitary_bounds(epsilon, spectrum_span.1, spectrum_span.0, dim))
        .transpose()?;

    Ok(BoundReport {
        epsilon,
        dim,
        eps_star: m.eps_star,
        mt_lower: qsl.as_ref().map(|q| q.mt_lower),
        thm2_upper: qsl.as_ref().and_then(|q| q.thm2_upper),
        exit_time_source: exit_times.source,
        t_exit_eps: exit_times.at_epsilon,
        t_exit_2eps: exit_times.at_two_epsilon,
        thm1_rec_upper: rec.as_ref().map(|r| r.first),
        kth_rec_upper: rec.as_ref().and_then(|r| r.kth),
        concrete_rec_upper: rec.as_ref().and_then(|r| r.concrete),
        d_supp_quarter: quarter.indices.len(),
        d_supp_half: half.indices.len(),
        reduced_rec_upper: reduced.as_ref().map(|r| r.from_quarter_support),
        improved_reduced_rec_upper: reduced.as_ref().map(|r| r.from_half_support),
        free_particles,
        free_rec_upper,
        unitary_exit_upper: unitary.as_ref().map(|u| u.exit_upper),
        unitary_rec_upper: unitary.as_ref().map(|u| u.rec_upper),
        finite_exit: fin.finite,
        finite_threshold: 1.0 - epsilon * epsilon,
        infimum_fidelity: fin.infimum_fidelity,
        rational_independence_caveat: fin.rational_independence_caveat,
    })
}

fn power_bound(prefactor: f64, base: f64, exponent: usize) -> BoundValue {
    BoundValue::from_log10(prefactor.log10() + exponent as f64 * base.log10())
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::invalid(format!(
            "threshold ε must lie in (0, 1), got {epsilon}"
        )));
    }
    Ok(())
}
