//! Certified search for exit and recurrence times.
//!
//! The trace distance t ↦ D(t) from the initial state is Lipschitz with
//! constant L = √Δ(H²), so from a point with D(t) < ε no up-crossing of ε can
//! occur before t + (ε − D(t))/L. The solver marches with exactly that step
//! (floored at `dt_min`), brackets the first sign change of D − ε and refines
//! it by bisection. The certificate this produces is honest about floating
//! point: any skipped excursion past the threshold is no deeper than
//! `miss_tol` = L·dt_min, which is reported alongside the times.

use serde::{Deserialize, Serialize};

use crate::bounds;
use crate::error::{Error, Result};
use crate::spectral::{MomentSummary, SpectralState};

/// Parameters of a crossing search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossingQuery {
    /// Trace-distance threshold ε ∈ (0, 1).
    pub epsilon: f64,
    /// Smallest march step; sets the miss tolerance L·dt_min.
    pub dt_min: f64,
    /// Bisection stops when the bracket is narrower than this.
    pub refine_tol: f64,
    /// Search horizon.
    pub t_max: f64,
    /// Number of recurrences requested by [`find_recurrences`].
    pub k: usize,
}

impl CrossingQuery {
    pub fn new(epsilon: f64, dt_min: f64, refine_tol: f64, t_max: f64, k: usize) -> Result<Self> {
        let q = CrossingQuery {
            epsilon,
            dt_min,
            refine_tol,
            t_max,
            k,
        };
        q.validate()?;
        Ok(q)
    }

    /// Default solver parameters scaled to the dynamics' natural time unit
    /// 1/L: dt_min = 1e−6/L, refine_tol = 1e−10/L, t_max = 1e9/L.
    ///
    /// Callers searching for recurrences typically tighten `t_max` with
    /// [`recommended_horizon`] once the exit time is known.
    pub fn with_defaults(epsilon: f64, moments: &MomentSummary) -> Result<Self> {
        if moments.variance <= 0.0 {
            return Err(Error::ZeroVariance(
                "default query parameters scale with 1/L and need Δ(H²) > 0",
            ));
        }
        let l = moments.lipschitz;
        Self::new(epsilon, 1e-6 / l, 1e-10 / l, 1e9 / l, 0)
    }

    pub fn with_recurrences(mut self, k: usize) -> Self {
        self.k = k;
        self
    }

    pub fn with_horizon(mut self, t_max: f64) -> Self {
        self.t_max = t_max;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::invalid(format!(
                "threshold ε must lie in (0, 1), got {}",
                self.epsilon
            )));
        }
        if !(self.dt_min > 0.0 && self.dt_min.is_finite()) {
            return Err(Error::invalid(format!(
                "dt_min must be positive and finite, got {}",
                self.dt_min
            )));
        }
        if !(self.t_max >= self.dt_min && self.t_max.is_finite()) {
            return Err(Error::invalid(format!(
                "t_max must be finite and at least dt_min, got {}",
                self.t_max
            )));
        }
        if !(self.refine_tol > 0.0 && self.refine_tol.is_finite()) {
            return Err(Error::invalid(format!(
                "refine_tol must be positive and finite, got {}",
                self.refine_tol
            )));
        }
        Ok(())
    }
}

/// Outcome class of a timing search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SearchStatus {
    /// The requested crossings were found and refined.
    Exited,
    /// No exit exists: the state is stationary, or the distance provably
    /// never reaches ε (squared-infimum criterion).
    NeverExitsAnalytic,
    /// The horizon was reached before the requested crossings were found.
    HorizonExhausted,
}

/// Certified exit/recurrence times for one query.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingCertificate {
    pub t_exit: Option<f64>,
    /// First k recurrence times, strictly increasing, each past `t_exit`.
    pub recurrences: Vec<f64>,
    /// L·dt_min: no skipped crossing went deeper than this past the threshold.
    pub miss_tol: f64,
    pub status: SearchStatus,
    /// Number of survival-fidelity evaluations spent.
    pub evaluations: u64,
}

/// Searches for the exit time: the first t with D(t) ≥ ε.
///
/// The march starts from the speed-limit floor arcsin(ε)/L, before which no
/// exit can occur. Stationary states and states whose survival amplitude is
/// bounded away from the threshold (1 − ε² < M) report
/// [`SearchStatus::NeverExitsAnalytic`] without searching.
pub fn find_exit(state: &SpectralState, query: &CrossingQuery) -> Result<TimingCertificate> {
    query.validate()?;
    let moments = state.moments();
    let mut search = match Search::begin(state, query, &moments)? {
        Begin::Analytic(cert) => return Ok(cert),
        Begin::March(search) => search,
    };
    let cert = match search.exit_phase()? {
        Phase::Crossed(c) => TimingCertificate {
            t_exit: Some(c.refined),
            recurrences: Vec::new(),
            miss_tol: search.miss_tol(),
            status: SearchStatus::Exited,
            evaluations: search.evaluations,
        },
        Phase::Horizon => search.exhausted(None, Vec::new()),
    };
    Ok(cert)
}

/// Searches for the exit time followed by the first `k` recurrence times.
///
/// Between consecutive recurrences the solver re-establishes an exit with the
/// same certified march, so a recurrence is only reported after the
/// trajectory has genuinely left the neighborhood again. If the horizon is
/// reached early, the recurrences found so far are returned with
/// [`SearchStatus::HorizonExhausted`].
pub fn find_recurrences(state: &SpectralState, query: &CrossingQuery) -> Result<TimingCertificate> {
    query.validate()?;
    if query.k < 1 {
        return Err(Error::invalid("recurrence search needs k ≥ 1"));
    }
    let moments = state.moments();
    let mut search = match Search::begin(state, query, &moments)? {
        Begin::Analytic(cert) => return Ok(cert),
        Begin::March(search) => search,
    };

    let exit = match search.exit_phase()? {
        Phase::Crossed(c) => c,
        Phase::Horizon => return Ok(search.exhausted(None, Vec::new())),
    };
    let t_exit = exit.refined;
    let mut cursor = exit.far;
    let mut recurrences = Vec::with_capacity(query.k);

    while recurrences.len() < query.k {
        // Down-crossing: first return to D ≤ ε.
        match search.seek(cursor, Direction::Down) {
            Phase::Crossed(c) => {
                recurrences.push(c.refined);
                cursor = c.far;
            }
            Phase::Horizon => return Ok(search.exhausted(Some(t_exit), recurrences)),
        }
        if recurrences.len() == query.k {
            break;
        }
        // Re-exit before the next recurrence may be counted.
        match search.seek(cursor, Direction::Up) {
            Phase::Crossed(c) => cursor = c.far,
            Phase::Horizon => return Ok(search.exhausted(Some(t_exit), recurrences)),
        }
    }

    Ok(TimingCertificate {
        t_exit: Some(t_exit),
        recurrences,
        miss_tol: search.miss_tol(),
        status: SearchStatus::Exited,
        evaluations: search.evaluations,
    })
}

/// Horizon heuristic for a k-recurrence search: ten times the k-scaled
/// first-recurrence ceiling t_exit·(4π/ε)^{d−1}, capped at 1e9/L. Computed in
/// log space; the ceiling is only a horizon, never proof of recurrence.
pub fn recommended_horizon(t_exit: f64, epsilon: f64, dim: usize, k: usize, lipschitz: f64) -> f64 {
    let cap = 1e9 / lipschitz;
    if t_exit <= 0.0 || dim < 2 {
        return cap;
    }
    let log10 = (10.0 * k.max(1) as f64 * t_exit).log10()
        + (dim - 1) as f64 * (4.0 * std::f64::consts::PI / epsilon).log10();
    if log10 > 300.0 {
        cap
    } else {
        10f64.powf(log10).min(cap)
    }
}

enum Begin<'a> {
    Analytic(TimingCertificate),
    March(Search<'a>),
}

enum Direction {
    Up,
    Down,
}

/// A refined crossing plus the far end of its final bracket, which is the
/// starting point for the next phase of the search.
struct Crossing {
    refined: f64,
    far: Point,
}

enum Phase {
    Crossed(Crossing),
    Horizon,
}

#[derive(Clone, Copy)]
struct Point {
    t: f64,
    distance: f64,
}

struct Search<'a> {
    state: &'a SpectralState,
    epsilon: f64,
    lipschitz: f64,
    dt_min: f64,
    refine_tol: f64,
    t_max: f64,
    evaluations: u64,
}

impl<'a> Search<'a> {
    fn begin(
        state: &'a SpectralState,
        query: &CrossingQuery,
        moments: &MomentSummary,
    ) -> Result<Begin<'a>> {
        if moments.variance <= 0.0 {
            // Stationary dynamics: F ≡ 1 exactly.
            return Ok(Begin::Analytic(TimingCertificate {
                t_exit: None,
                recurrences: Vec::new(),
                miss_tol: 0.0,
                status: SearchStatus::NeverExitsAnalytic,
                evaluations: 0,
            }));
        }
        let verdict = bounds::finiteness(state, query.epsilon)?;
        if !verdict.finite {
            // 1 − ε² < (2 p_max − 1)² holds unconditionally: the survival
            // amplitude can never drop to the threshold.
            return Ok(Begin::Analytic(TimingCertificate {
                t_exit: None,
                recurrences: Vec::new(),
                miss_tol: moments.lipschitz * query.dt_min,
                status: SearchStatus::NeverExitsAnalytic,
                evaluations: 0,
            }));
        }
        Ok(Begin::March(Search {
            state,
            epsilon: query.epsilon,
            lipschitz: moments.lipschitz,
            dt_min: query.dt_min,
            refine_tol: query.refine_tol,
            t_max: query.t_max,
            evaluations: 0,
        }))
    }

    fn miss_tol(&self) -> f64 {
        self.lipschitz * self.dt_min
    }

    fn distance(&mut self, t: f64) -> f64 {
        self.evaluations += 1;
        self.state.trace_distance_at(t)
    }

    fn exhausted(&self, t_exit: Option<f64>, recurrences: Vec<f64>) -> TimingCertificate {
        TimingCertificate {
            t_exit,
            recurrences,
            miss_tol: self.miss_tol(),
            status: SearchStatus::HorizonExhausted,
            evaluations: self.evaluations,
        }
    }

    /// Exit search from t = 0. D < ε strictly before the speed-limit floor
    /// arcsin(ε)/L, so the march starts there; if the floor already sits on
    /// the threshold the floor itself is the exit time.
    fn exit_phase(&mut self) -> Result<Phase> {
        let floor = self.epsilon.asin() / self.lipschitz;
        if floor > self.t_max {
            return Ok(Phase::Horizon);
        }
        let d0 = self.distance(floor);
        if d0 >= self.epsilon {
            return Ok(Phase::Crossed(Crossing {
                refined: floor,
                far: Point {
                    t: floor,
                    distance: d0,
                },
            }));
        }
        Ok(self.seek(
            Point {
                t: floor,
                distance: d0,
            },
            Direction::Up,
        ))
    }

    /// Marches from `from` until D − ε changes sign in the given direction,
    /// then refines the bracket. The Lipschitz step |D − ε|/L cannot skip a
    /// crossing; where it is floored at dt_min, a skipped excursion is at
    /// most L·dt_min deep.
    fn seek(&mut self, from: Point, direction: Direction) -> Phase {
        let mut cur = from;
        loop {
            let gap = match direction {
                Direction::Up => self.epsilon - cur.distance,
                Direction::Down => cur.distance - self.epsilon,
            };
            let t_next = cur.t + (gap / self.lipschitz).max(self.dt_min);
            if t_next > self.t_max {
                return Phase::Horizon;
            }
            let d_next = self.distance(t_next);
            let crossed = match direction {
                Direction::Up => d_next >= self.epsilon,
                Direction::Down => d_next <= self.epsilon,
            };
            let next = Point {
                t: t_next,
                distance: d_next,
            };
            if crossed {
                return Phase::Crossed(self.refine(cur, next, direction));
            }
            cur = next;
        }
    }

    /// Bisects [near, far] down to `refine_tol`. The far side satisfies the
    /// crossing condition throughout; exact hits D = ε count as crossed, so
    /// ties resolve toward the earlier time.
    fn refine(&mut self, mut near: Point, mut far: Point, direction: Direction) -> Crossing {
        while far.t - near.t > self.refine_tol {
            let mid = 0.5 * (near.t + far.t);
            if mid <= near.t || mid >= far.t {
                break; // bracket at floating-point resolution
            }
            let d_mid = self.distance(mid);
            let crossed = match direction {
                Direction::Up => d_mid >= self.epsilon,
                Direction::Down => d_mid <= self.epsilon,
            };
            let point = Point {
                t: mid,
                distance: d_mid,
            };
            if crossed {
                far = point;
            } else {
                near = point;
            }
        }
        Crossing {
            refined: 0.5 * (near.t + far.t),
            far,
        }
    }
}
