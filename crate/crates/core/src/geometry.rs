//! Explicit phase-net coverings and the diamond distance of commuting
//! unitaries.
//!
//! The reachable set of a diagonalized evolution is a phase torus: per-level
//! phases with one overall phase quotiented out. A net pins the first
//! coordinate and places a uniform grid on each remaining circle —
//! ⌈2π/ε⌉ points per circle for state tori, ⌈4π/ε⌉ for families of diagonal
//! unitaries. Nearest-point queries are closed form, so covering claims can
//! be stress-tested by sampling without ever enumerating the net.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::spectral::SpectralState;
use crate::structure::effective_support;

/// Hard cap on explicit net enumeration; queries are unaffected.
pub const DEFAULT_ENUMERATION_CAP: u64 = 10_000_000;

const COVERING_CHUNK: usize = 1024;

/// Which family the net covers, and therefore which metric and grid
/// resolution apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NetFlavor {
    /// Torus of states |a_k| e^{iφ_k}, metric = trace distance; grid
    /// ⌈2π/ε⌉ per free circle covers to radius ε.
    StateTorus,
    /// Diagonal unitary channels, metric = phase-minimized operator distance;
    /// grid ⌈4π/ε⌉ per free circle covers to radius ε/2.
    UnitaryFamily,
}

/// A product grid over the free phases, with the first coordinate pinned.
#[derive(Debug, Clone)]
pub struct PhaseNet {
    epsilon: f64,
    flavor: NetFlavor,
    /// Nominal per-circle resolution from the flavor formula.
    resolution: u32,
    /// Per-coordinate grid sizes; `grid[0] == 1` (pinned reference phase).
    grid: Vec<u32>,
    base: Option<SpectralState>,
}

/// Result of a sampled covering verification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoveringReport {
    pub max_distance: f64,
    /// Max distance within the flavor's covering radius (ε, or ε/2 for
    /// unitary families).
    pub pass: bool,
    pub samples: usize,
}

/// Builds the uniform-grid net for a dimension and flavor. State tori carry
/// their base state so sampled points inherit its populations.
pub fn build_phase_net(
    epsilon: f64,
    dim: usize,
    flavor: NetFlavor,
    base: Option<&SpectralState>,
) -> Result<PhaseNet> {
    check_epsilon(epsilon)?;
    if dim < 1 {
        return Err(Error::invalid("net dimension must be ≥ 1"));
    }
    let base = match flavor {
        NetFlavor::StateTorus => {
            let state = base.ok_or_else(|| {
                Error::invalid("a state-torus net needs a base state for its populations")
            })?;
            if state.dim() != dim {
                return Err(Error::invalid(format!(
                    "base state dimension {} does not match net dimension {dim}",
                    state.dim()
                )));
            }
            Some(state.clone())
        }
        NetFlavor::UnitaryFamily => None,
    };
    let resolution = match flavor {
        NetFlavor::StateTorus => (TAU / epsilon).ceil() as u32,
        NetFlavor::UnitaryFamily => (2.0 * TAU / epsilon).ceil() as u32,
    };
    let mut grid = vec![resolution; dim];
    grid[0] = 1;
    Ok(PhaseNet {
        epsilon,
        flavor,
        resolution,
        grid,
        base,
    })
}

/// Support-aware state-torus net: coordinates outside the ε/2-mass support
/// collapse to a single grid point, the rest get the finer ⌈4π/ε⌉ grid. The
/// effective net dimension is the support size instead of the full dimension.
pub fn support_reduced_net(epsilon: f64, base: &SpectralState) -> Result<PhaseNet> {
    check_epsilon(epsilon)?;
    let support = effective_support(base, epsilon / 2.0)?;
    let resolution = (2.0 * TAU / epsilon).ceil() as u32;
    let mut grid = vec![1u32; base.dim()];
    for &i in &support.indices {
        grid[i] = resolution;
    }
    // Pin the heaviest level as the reference phase.
    let heaviest = support.indices[0];
    grid[heaviest] = 1;
    Ok(PhaseNet {
        epsilon,
        flavor: NetFlavor::StateTorus,
        resolution,
        grid,
        base: Some(base.clone()),
    })
}

impl PhaseNet {
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn flavor(&self) -> NetFlavor {
        self.flavor
    }

    pub fn dim(&self) -> usize {
        self.grid.len()
    }

    /// Per-circle grid resolution n from the flavor formula.
    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    /// Number of net points, when it fits in a u128.
    pub fn size(&self) -> Option<u128> {
        self.grid
            .iter()
            .try_fold(1u128, |acc, &g| acc.checked_mul(u128::from(g)))
    }

    pub fn size_log10(&self) -> f64 {
        self.grid.iter().map(|&g| f64::from(g).log10()).sum()
    }

    /// Maps an arbitrary phase vector to the nearest net point: each free
    /// coordinate of φ_k − φ_ref rounds to its nearest grid phase.
    pub fn nearest_point(&self, phases: &[f64]) -> Vec<f64> {
        assert_eq!(phases.len(), self.dim(), "phase vector has wrong length");
        let reference = phases[self.reference_coordinate()];
        self.grid
            .iter()
            .zip(phases)
            .map(|(&g, &phi)| {
                if g == 1 {
                    0.0
                } else {
                    let rel = wrap_angle(phi - reference);
                    let step = TAU / f64::from(g);
                    let j = (rel / step).round() as u32 % g;
                    f64::from(j) * step
                }
            })
            .collect()
    }

    /// Iterates over all net points. Errors out when the net is larger than
    /// the enumeration cap; nearest-point queries remain available.
    pub fn enumerate(&self) -> Result<NetPoints> {
        match self.size() {
            Some(size) if size <= u128::from(DEFAULT_ENUMERATION_CAP) => Ok(NetPoints {
                grid: self.grid.clone(),
                indices: vec![0; self.grid.len()],
                done: false,
            }),
            _ => Err(Error::EnumerationCapExceeded {
                size_log10: self.size_log10(),
                cap: DEFAULT_ENUMERATION_CAP,
            }),
        }
    }

    fn reference_coordinate(&self) -> usize {
        self.grid.iter().position(|&g| g == 1).unwrap_or(0)
    }

    /// Distance from the point with the given phases to its nearest net
    /// point, in the flavor's metric.
    fn distance_to_net(&self, phases: &[f64]) -> f64 {
        let nearest = self.nearest_point(phases);
        match self.flavor {
            NetFlavor::StateTorus => {
                let base = self.base.as_ref().expect("state-torus net carries a base");
                // ⟨ψ(φ)|ψ(ν)⟩ = Σ p_k e^{i(ν_k − φ_k)}
                let mut re = 0.0;
                let mut im = 0.0;
                for ((p, phi), nu) in base.probabilities().iter().zip(phases).zip(&nearest) {
                    let (s, c) = (nu - phi).sin_cos();
                    re += p * c;
                    im += p * s;
                }
                let fidelity = (re * re + im * im).min(1.0);
                (1.0 - fidelity).max(0.0).sqrt()
            }
            NetFlavor::UnitaryFamily => {
                diagonal_diamond_distance(phases, &nearest).expect("equal lengths by construction")
            }
        }
    }
}

/// Iterator over the points of an enumerable net.
pub struct NetPoints {
    grid: Vec<u32>,
    indices: Vec<u32>,
    done: bool,
}

impl Iterator for NetPoints {
    type Item = Vec<f64>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let point = self
            .indices
            .iter()
            .zip(&self.grid)
            .map(|(&j, &g)| f64::from(j) * TAU / f64::from(g))
            .collect();
        // Mixed-radix increment.
        self.done = true;
        for (j, &g) in self.indices.iter_mut().zip(&self.grid).rev() {
            *j += 1;
            if *j < g {
                self.done = false;
                break;
            }
            *j = 0;
        }
        Some(point)
    }
}

/// Draws uniform random points of the net's family and reports the maximum
/// observed distance to the net.
///
/// Sampling cannot prove a covering — the grid construction does that — but
/// it bounds the covering radius from below and catches construction bugs.
/// Chunks are seeded independently and combined by max, so the result does
/// not depend on scheduling.
pub fn covering_check(net: &PhaseNet, samples: usize, seed: u64) -> Result<CoveringReport> {
    if samples < 1 {
        return Err(Error::invalid("covering check needs at least one sample"));
    }
    let dim = net.dim();
    let chunks = samples.div_ceil(COVERING_CHUNK);
    let max_distance = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk as u64);
            let in_chunk = COVERING_CHUNK.min(samples - chunk * COVERING_CHUNK);
            let mut phases = vec![0.0; dim];
            let mut worst = 0.0f64;
            for _ in 0..in_chunk {
                for phi in &mut phases {
                    *phi = rng.random_range(0.0..TAU);
                }
                worst = worst.max(net.distance_to_net(&phases));
            }
            worst
        })
        .reduce(|| 0.0, f64::max);

    let radius = match net.flavor {
        NetFlavor::StateTorus => net.epsilon,
        NetFlavor::UnitaryFamily => net.epsilon / 2.0,
    };
    Ok(CoveringReport {
        max_distance,
        pass: max_distance <= radius,
        samples,
    })
}

/// Distance between two diagonal unitaries diag(e^{iθ_k}), minimized over a
/// global phase: min_φ max_k |e^{i(θ_k − θ'_k)} − e^{iφ}|.
///
/// Exact via the circular one-center problem: sort the phase differences,
/// find the largest gap g, and take the midpoint of the complementary arc;
/// the minimax chord is 2 sin((2π − g)/4).
pub fn diagonal_diamond_distance(theta: &[f64], theta_prime: &[f64]) -> Result<f64> {
    let deltas = phase_differences(theta, theta_prime)?;
    let mut angles = deltas;
    angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut largest_gap = TAU - (angles[angles.len() - 1] - angles[0]);
    for pair in angles.windows(2) {
        largest_gap = largest_gap.max(pair[1] - pair[0]);
    }
    Ok(2.0 * ((TAU - largest_gap) / 4.0).sin())
}

/// Brute-force reference for [`diagonal_diamond_distance`]: minimizes over a
/// uniform grid of global phases. Accurate to the grid's Lipschitz slack
/// 2π/grid_points.
pub fn diamond_grid_oracle(theta: &[f64], theta_prime: &[f64], grid_points: usize) -> Result<f64> {
    if grid_points < 1 {
        return Err(Error::invalid("grid oracle needs at least one phase point"));
    }
    let deltas = phase_differences(theta, theta_prime)?;
    let mut best = f64::INFINITY;
    for i in 0..grid_points {
        let phi = TAU * i as f64 / grid_points as f64;
        let worst = deltas
            .iter()
            .map(|&d| 2.0 * ((d - phi) / 2.0).sin().abs())
            .fold(0.0f64, f64::max);
        best = best.min(worst);
    }
    Ok(best)
}

fn phase_differences(theta: &[f64], theta_prime: &[f64]) -> Result<Vec<f64>> {
    if theta.len() != theta_prime.len() {
        return Err(Error::invalid(format!(
            "phase vectors must have equal length ({} vs {})",
            theta.len(),
            theta_prime.len()
        )));
    }
    if theta.is_empty() {
        return Err(Error::invalid("phase vectors must be non-empty"));
    }
    Ok(theta
        .iter()
        .zip(theta_prime)
        .map(|(&a, &b)| wrap_angle(a - b))
        .collect())
}

fn wrap_angle(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::invalid(format!(
            "net scale ε must lie in (0, 1), got {epsilon}"
        )));
    }
    Ok(())
}
