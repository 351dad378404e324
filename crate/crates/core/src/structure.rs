//! Effective support and effective dimension of a state, and the reduced
//! dynamics obtained by truncating to a support set.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::SpectralState;

/// A subset of levels carrying at least 1 − δ of the total probability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportSet {
    /// Selected level indices, ascending.
    pub indices: Vec<usize>,
    /// Probability mass carried by the subset.
    pub mass: f64,
    /// The requested tail bound δ.
    pub delta: f64,
}

/// Smallest set of levels with cumulative probability ≥ 1 − δ.
///
/// Probabilities are taken in descending order (ties broken by lower index),
/// which attains the minimum cardinality; a tiny slack absorbs the 1e−12
/// normalization defect so δ = 0 selects exactly the nonzero levels.
pub fn effective_support(state: &SpectralState, delta: f64) -> Result<SupportSet> {
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::invalid(format!(
            "support tail bound must lie in [0, 1), got {delta}"
        )));
    }
    let probs = state.probabilities();
    let mut order: Vec<usize> = (0..probs.len()).collect();
    order.sort_by(|&i, &j| probs[j].partial_cmp(&probs[i]).unwrap().then(i.cmp(&j)));

    let target = 1.0 - delta;
    let mut indices = Vec::new();
    let mut mass = 0.0;
    for &i in &order {
        indices.push(i);
        mass += probs[i];
        if mass + 1e-12 >= target {
            break;
        }
    }
    indices.sort_unstable();
    Ok(SupportSet {
        indices,
        mass,
        delta,
    })
}

/// Inverse participation ratio 1/Σ_k p_k².
pub fn effective_dimension(state: &SpectralState) -> f64 {
    let sum: f64 = state.probabilities().iter().map(|p| p * p).sum();
    sum.recip()
}

/// Restricts a state to the levels in `support` and renormalizes.
pub fn reduce_state(state: &SpectralState, support: &SupportSet) -> Result<SpectralState> {
    if support.indices.is_empty() {
        return Err(Error::ZeroMass);
    }
    let mut eigenvalues = Vec::with_capacity(support.indices.len());
    let mut amplitudes = Vec::with_capacity(support.indices.len());
    let mut mass = 0.0;
    for &i in &support.indices {
        if i >= state.dim() {
            return Err(Error::invalid(format!(
                "support index {i} out of range for dimension {}",
                state.dim()
            )));
        }
        eigenvalues.push(state.eigenvalues()[i]);
        amplitudes.push(state.amplitudes()[i]);
        mass += state.probabilities()[i];
    }
    if mass <= 0.0 {
        return Err(Error::ZeroMass);
    }
    let scale = mass.sqrt().recip();
    for a in &mut amplitudes {
        *a *= scale;
    }
    SpectralState::new(eigenvalues, amplitudes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state(probs: &[f64]) -> SpectralState {
        let lambdas = (0..probs.len()).map(|k| k as f64).collect();
        SpectralState::from_probabilities(lambdas, probs).unwrap()
    }

    #[test]
    fn greedy_prefix_example() {
        let s = effective_support(&state(&[0.5, 0.3, 0.15, 0.05]), 0.1).unwrap();
        assert_eq!(s.indices, vec![0, 1, 2]);
        assert!((s.mass - 0.95).abs() < 1e-12);
    }

    #[test]
    fn delta_zero_selects_nonzero_levels() {
        let s = effective_support(&state(&[0.5, 0.0, 0.5, 0.0]), 0.0).unwrap();
        assert_eq!(s.indices, vec![0, 2]);
    }

    #[test]
    fn uniform_half_mass_takes_half_levels() {
        for d in [2usize, 5, 8, 11] {
            let probs = vec![1.0 / d as f64; d];
            let s = effective_support(&state(&probs), 0.5).unwrap();
            assert_eq!(s.indices.len(), d.div_ceil(2));
        }
    }

    #[test]
    fn ties_break_toward_lower_index() {
        let s = effective_support(&state(&[0.25, 0.25, 0.25, 0.25]), 0.6).unwrap();
        assert_eq!(s.indices, vec![0, 1]);
    }

    #[test]
    fn rejects_delta_outside_range() {
        assert!(effective_support(&state(&[1.0]), 1.0).is_err());
        assert!(effective_support(&state(&[1.0]), -0.1).is_err());
    }

    #[test]
    fn effective_dimension_uniform_and_peaked() {
        for d in [1usize, 4, 32] {
            let probs = vec![1.0 / d as f64; d];
            assert!((effective_dimension(&state(&probs)) - d as f64).abs() < 1e-9);
        }
        assert!((effective_dimension(&state(&[1.0, 0.0, 0.0])) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eta_state_effective_dimension_closed_form() {
        let d = 101usize;
        let eta = 0.1;
        let mut probs = vec![(1.0 - eta) / (d - 1) as f64; d];
        probs[0] = eta;
        let measured = effective_dimension(&state(&probs));
        let formula = (d - 1) as f64 / (d as f64 * eta * eta + 1.0 - 2.0 * eta);
        assert!((measured - formula).abs() < 1e-9);
        assert!((formula - 55.24861878453039).abs() < 1e-9);
    }

    #[test]
    fn reduce_to_single_level() {
        let full = state(&[0.9, 0.05, 0.05]);
        let s = effective_support(&full, 0.1).unwrap();
        assert_eq!(s.indices, vec![0]);
        let reduced = reduce_state(&full, &s).unwrap();
        assert_eq!(reduced.dim(), 1);
        assert!((reduced.probabilities()[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reduce_renormalizes() {
        let full = state(&[0.5, 0.3, 0.2]);
        let s = SupportSet {
            indices: vec![0, 1],
            mass: 0.8,
            delta: 0.2,
        };
        let reduced = reduce_state(&full, &s).unwrap();
        assert!((reduced.probabilities()[0] - 0.625).abs() < 1e-12);
        assert!((reduced.probabilities()[1] - 0.375).abs() < 1e-12);
    }

    #[test]
    fn reduce_with_all_indices_is_identity() {
        let full = state(&[0.5, 0.3, 0.2]);
        let s = effective_support(&full, 0.0).unwrap();
        let reduced = reduce_state(&full, &s).unwrap();
        assert_eq!(reduced, full);
    }

    #[test]
    fn reduce_rejects_empty_support() {
        let full = state(&[0.5, 0.5]);
        let s = SupportSet {
            indices: vec![],
            mass: 0.0,
            delta: 0.0,
        };
        assert!(matches!(reduce_state(&full, &s), Err(Error::ZeroMass)));
    }
}
