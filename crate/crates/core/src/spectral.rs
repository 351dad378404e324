//! States expressed in the Hamiltonian eigenbasis.
//!
//! A pure state evolving under a diagonalized Hamiltonian is fully described
//! by its eigenvalues λ_k and the complex coefficients a_k of the initial
//! vector: |ψ_t⟩ = Σ_k a_k e^{−iλ_k t}|k⟩. Everything downstream — survival
//! fidelity, trace distance, spectral moments, the double commutator — is a
//! function of (λ_k, a_k) alone.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Width of the accepted normalization band around Σ|a_k|² = 1. Inputs inside
/// the band are renormalized; inputs outside are treated as corrupt.
pub const NORM_BAND: f64 = 1e-6;

/// Largest dimension for which the dense double-commutator matrix is built.
pub const DEFAULT_DENSE_LIMIT: usize = 512;

/// A pure state in the eigenbasis of its Hamiltonian: energies λ_k (units of
/// inverse time, ħ = 1) and complex amplitudes a_k with Σ|a_k|² = 1.
///
/// Construction renormalizes small rounding defects and rejects anything
/// outside the [`NORM_BAND`] tolerance band, so a value of this type always
/// carries a unit-norm amplitude vector (within 1e−12). Degenerate
/// eigenvalues are kept as distinct levels.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralState {
    eigenvalues: Vec<f64>,
    amplitudes: Vec<Complex64>,
    probabilities: Vec<f64>,
}

/// Survival fidelity F(t) = |Σ_k |a_k|² e^{−iλ_k t}|² and the pure-state
/// trace distance D(t) = √(1 − F(t)).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Survival {
    pub fidelity: f64,
    pub distance: f64,
}

/// Spectral moments of the Hamiltonian in a given state, plus the two derived
/// quantities every bound in this crate consumes: the threshold
/// ε* = Δ(H²)/(Δ(H²) + √Δ(H⁴)) and the trace-distance Lipschitz constant
/// L = √Δ(H²).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentSummary {
    /// ⟨H⟩
    pub mean: f64,
    /// ⟨H²⟩
    pub second_moment: f64,
    /// Δ(H²) = ⟨(H − ⟨H⟩)²⟩
    pub variance: f64,
    /// Δ(H⁴) = ⟨(H − ⟨H⟩)⁴⟩
    pub fourth_central: f64,
    /// Δ(H²)/(Δ(H²) + √Δ(H⁴)); defined as 0 for zero-variance states.
    pub eps_star: f64,
    /// √Δ(H²)
    pub lipschitz: f64,
}

/// Dense Hermitian operator in the eigenbasis; only used for the double
/// commutator at small dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    entries: DMatrix<Complex64>,
}

/// The double commutator X_H = −[H,[H,ψ₀]] together with its spectral norm
/// and its expectation in the initial state.
#[derive(Debug, Clone)]
pub struct CommutatorOperator {
    pub operator: DenseOperator,
    /// ‖X_H‖∞ from a full Hermitian eigendecomposition.
    pub spectral_norm: f64,
    /// tr(X_H ψ₀); equals −2Δ(H²) up to rounding.
    pub state_expectation: f64,
}

impl SpectralState {
    /// Validates raw eigenvalue/amplitude lists and builds a state.
    ///
    /// Lists must be non-empty, of equal length and finite. A norm defect of
    /// at most [`NORM_BAND`] is repaired by uniform rescaling (relative
    /// phases are preserved); a larger defect is an error.
    pub fn new(eigenvalues: Vec<f64>, amplitudes: Vec<Complex64>) -> Result<Self> {
        if eigenvalues.is_empty() || amplitudes.is_empty() {
            return Err(Error::EmptyState);
        }
        if eigenvalues.len() != amplitudes.len() {
            return Err(Error::LengthMismatch {
                eigenvalues: eigenvalues.len(),
                amplitudes: amplitudes.len(),
            });
        }
        for (index, lambda) in eigenvalues.iter().enumerate() {
            if !lambda.is_finite() {
                return Err(Error::NonFinite {
                    what: "eigenvalue",
                    index,
                });
            }
        }
        for (index, a) in amplitudes.iter().enumerate() {
            if !a.re.is_finite() || !a.im.is_finite() {
                return Err(Error::NonFinite {
                    what: "amplitude",
                    index,
                });
            }
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_BAND {
            return Err(Error::NormOutsideBand {
                norm,
                band: NORM_BAND,
            });
        }
        let scale = norm.sqrt().recip();
        let amplitudes: Vec<Complex64> = amplitudes.into_iter().map(|a| a * scale).collect();
        let probabilities = amplitudes.iter().map(|a| a.norm_sqr()).collect();
        Ok(Self {
            eigenvalues,
            amplitudes,
            probabilities,
        })
    }

    /// Builds a state with real non-negative amplitudes √p_k.
    pub fn from_probabilities(eigenvalues: Vec<f64>, probabilities: &[f64]) -> Result<Self> {
        let amplitudes = probabilities
            .iter()
            .map(|p| Complex64::new(p.max(0.0).sqrt(), 0.0))
            .collect();
        Self::new(eigenvalues, amplitudes)
    }

    /// Uniform superposition of all levels of the given spectrum.
    pub fn uniform(eigenvalues: Vec<f64>) -> Result<Self> {
        let d = eigenvalues.len();
        if d == 0 {
            return Err(Error::EmptyState);
        }
        let amp = Complex64::new((d as f64).sqrt().recip(), 0.0);
        Self::new(eigenvalues, vec![amp; d])
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Level populations p_k = |a_k|².
    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn max_probability(&self) -> f64 {
        self.probabilities.iter().cloned().fold(0.0, f64::max)
    }

    /// Survival fidelity and trace distance at time `t`.
    ///
    /// F(t) = |Σ_k p_k e^{−iλ_k t}|² depends only on the populations; both
    /// values are clamped into [0, 1] against rounding.
    pub fn survival(&self, t: f64) -> Survival {
        assert!(t.is_finite(), "survival time must be finite");
        let mut re = 0.0;
        let mut im = 0.0;
        for (p, lambda) in self.probabilities.iter().zip(&self.eigenvalues) {
            let (s, c) = (lambda * t).sin_cos();
            re += p * c;
            im -= p * s;
        }
        let fidelity = (re * re + im * im).min(1.0);
        Survival {
            fidelity,
            distance: (1.0 - fidelity).max(0.0).sqrt(),
        }
    }

    pub fn fidelity_at(&self, t: f64) -> f64 {
        self.survival(t).fidelity
    }

    pub fn trace_distance_at(&self, t: f64) -> f64 {
        self.survival(t).distance
    }

    /// Whether every populated level shares one eigenvalue, so that F ≡ 1
    /// exactly. This is the zero-variance condition evaluated without
    /// rounding noise.
    pub fn is_stationary(&self) -> bool {
        let mut populated = self
            .probabilities
            .iter()
            .zip(&self.eigenvalues)
            .filter(|(p, _)| **p > 0.0)
            .map(|(_, l)| *l);
        match populated.next() {
            Some(first) => populated.all(|l| l == first),
            None => true,
        }
    }

    /// Spectral moments. Central moments are accumulated on the shifted
    /// spectrum λ_k − ⟨H⟩ rather than by raw-moment algebra, so widely
    /// shifted spectra do not cancel catastrophically; exactly degenerate
    /// dynamics report zero variance instead of cancellation residue.
    pub fn moments(&self) -> MomentSummary {
        let mean: f64 = self
            .probabilities
            .iter()
            .zip(&self.eigenvalues)
            .map(|(p, l)| p * l)
            .sum();
        let second_moment: f64 = self
            .probabilities
            .iter()
            .zip(&self.eigenvalues)
            .map(|(p, l)| p * l * l)
            .sum();
        if self.is_stationary() {
            return MomentSummary {
                mean,
                second_moment,
                variance: 0.0,
                fourth_central: 0.0,
                // 0/0 for a stationary state; no exit-time machinery applies.
                eps_star: 0.0,
                lipschitz: 0.0,
            };
        }
        let mut variance = 0.0;
        let mut fourth_central = 0.0;
        for (p, lambda) in self.probabilities.iter().zip(&self.eigenvalues) {
            let mu = lambda - mean;
            let mu2 = mu * mu;
            variance += p * mu2;
            fourth_central += p * mu2 * mu2;
        }
        MomentSummary {
            mean,
            second_moment,
            variance,
            fourth_central,
            eps_star: variance / (variance + fourth_central.sqrt()),
            lipschitz: variance.sqrt(),
        }
    }

    /// Builds X_H = −[H,[H,ψ₀]] as a dense matrix and returns it with its
    /// spectral norm and tr(X_H ψ₀).
    ///
    /// In the eigenbasis the entries are closed-form,
    /// (X_H)_{jk} = −(λ_j − λ_k)² a_j a̅_k, and the norm comes from a full
    /// Hermitian eigendecomposition.
    pub fn commutator_operator(&self) -> Result<CommutatorOperator> {
        self.commutator_operator_with_limit(DEFAULT_DENSE_LIMIT)
    }

    pub fn commutator_operator_with_limit(&self, limit: usize) -> Result<CommutatorOperator> {
        let d = self.dim();
        if d > limit {
            return Err(Error::DenseLimitExceeded { dim: d, limit });
        }
        let entries = DMatrix::from_fn(d, d, |j, k| {
            let gap = self.eigenvalues[j] - self.eigenvalues[k];
            self.amplitudes[j] * self.amplitudes[k].conj() * Complex64::new(-gap * gap, 0.0)
        });
        let spectral_norm = entries
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .fold(0.0f64, |acc, e| acc.max(e.abs()));
        // tr(X ψ₀) = Σ_{jk} X_{jk} a_k a̅_j, real for Hermitian X.
        let mut state_expectation = 0.0;
        for j in 0..d {
            for k in 0..d {
                state_expectation +=
                    (entries[(j, k)] * self.amplitudes[k] * self.amplitudes[j].conj()).re;
            }
        }
        Ok(CommutatorOperator {
            operator: DenseOperator { entries },
            spectral_norm,
            state_expectation,
        })
    }
}

impl DenseOperator {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    /// Largest deviation |M_{jk} − M̄_{kj}| from Hermiticity.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut defect = 0.0f64;
        for j in 0..self.entries.nrows() {
            for k in 0..self.entries.ncols() {
                defect = defect.max((self.entries[(j, k)] - self.entries[(k, j)].conj()).norm());
            }
        }
        defect
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn two_level() -> SpectralState {
        SpectralState::from_probabilities(vec![-1.0, 1.0], &[0.5, 0.5]).unwrap()
    }

    fn three_level() -> SpectralState {
        SpectralState::from_probabilities(vec![-1.0, 0.0, 1.0], &[1.0 / 3.0; 3]).unwrap()
    }

    #[test]
    fn accepts_exactly_normalized_pair() {
        let state = SpectralState::new(
            vec![-1.0, 1.0],
            vec![
                Complex64::new(FRAC_1_SQRT_2, 0.0),
                Complex64::new(FRAC_1_SQRT_2, 0.0),
            ],
        )
        .unwrap();
        assert_eq!(state.dim(), 2);
        let norm: f64 = state.probabilities().iter().sum();
        assert!((norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn accepts_single_eigenstate() {
        let state = SpectralState::new(vec![0.0], vec![Complex64::new(1.0, 0.0)]).unwrap();
        assert_eq!(state.dim(), 1);
    }

    #[test]
    fn rejects_norm_outside_band() {
        let err = SpectralState::new(
            vec![0.0, 1.0],
            vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)],
        )
        .unwrap_err();
        assert!(matches!(err, Error::NormOutsideBand { .. }));
    }

    #[test]
    fn rejects_length_mismatch_and_empty() {
        assert!(matches!(
            SpectralState::new(vec![0.0], vec![Complex64::new(1.0, 0.0); 2]),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            SpectralState::new(vec![], vec![]),
            Err(Error::EmptyState)
        ));
    }

    #[test]
    fn rejects_non_finite_entries() {
        assert!(matches!(
            SpectralState::new(vec![f64::NAN], vec![Complex64::new(1.0, 0.0)]),
            Err(Error::NonFinite { .. })
        ));
        assert!(matches!(
            SpectralState::new(vec![0.0], vec![Complex64::new(f64::INFINITY, 0.0)]),
            Err(Error::NonFinite { .. })
        ));
    }

    #[test]
    fn renormalization_preserves_relative_phases() {
        let defect: f64 = 1.0 + 5e-7;
        let a = Complex64::from_polar(FRAC_1_SQRT_2 * defect.sqrt(), 0.3);
        let b = Complex64::from_polar(FRAC_1_SQRT_2 * defect.sqrt(), -1.1);
        let state = SpectralState::new(vec![0.0, 1.0], vec![a, b]).unwrap();
        let ratio = state.amplitudes()[1] / state.amplitudes()[0];
        assert!((ratio.arg() - (-1.4)).abs() < 1e-12);
        let norm: f64 = state.probabilities().iter().sum();
        assert!((norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn survival_two_level_closed_form() {
        // F(t) = cos² t, D(t) = |sin t|.
        let state = two_level();
        let s = state.survival(std::f64::consts::FRAC_PI_2);
        assert!(s.fidelity.abs() < 1e-15);
        assert!((s.distance - 1.0).abs() < 1e-15);
        for &t in &[0.1, 0.7, 2.9] {
            assert!((state.fidelity_at(t) - t.cos().powi(2)).abs() < 1e-12);
            assert!((state.trace_distance_at(t) - t.sin().abs()).abs() < 1e-12);
        }
    }

    #[test]
    fn survival_at_zero_is_identity() {
        let s = three_level().survival(0.0);
        assert_eq!(s.fidelity, 1.0);
        assert_eq!(s.distance, 0.0);
    }

    #[test]
    fn survival_three_level_at_pi() {
        let s = three_level().survival(std::f64::consts::PI);
        assert!((s.fidelity - 1.0 / 9.0).abs() < 1e-12);
        assert!((s.distance - (8.0f64 / 9.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn moments_two_level() {
        let m = two_level().moments();
        assert!(m.mean.abs() < 1e-15);
        assert!((m.variance - 1.0).abs() < 1e-15);
        assert!((m.fourth_central - 1.0).abs() < 1e-15);
        assert!((m.eps_star - 0.5).abs() < 1e-15);
        assert!((m.lipschitz - 1.0).abs() < 1e-15);
    }

    #[test]
    fn moments_eigenstate_is_stationary() {
        let state = SpectralState::new(vec![3.7], vec![Complex64::new(1.0, 0.0)]).unwrap();
        let m = state.moments();
        assert_eq!(m.variance, 0.0);
        assert_eq!(m.fourth_central, 0.0);
        assert_eq!(m.eps_star, 0.0);
        assert_eq!(m.lipschitz, 0.0);
    }

    #[test]
    fn moments_three_level() {
        let m = three_level().moments();
        assert!((m.variance - 2.0 / 3.0).abs() < 1e-14);
        assert!((m.fourth_central - 2.0 / 3.0).abs() < 1e-14);
        let expected = 6.0f64.sqrt() - 2.0; // (2/3)/(2/3 + √(2/3))
        assert!((m.eps_star - expected).abs() < 1e-14);
    }

    #[test]
    fn commutator_two_level_matches_hand_computation() {
        let x = two_level().commutator_operator().unwrap();
        let m = x.operator.entries();
        assert!((m[(0, 0)].norm()) < 1e-15);
        assert!((m[(0, 1)] - Complex64::new(-2.0, 0.0)).norm() < 1e-14);
        assert!((m[(1, 0)] - Complex64::new(-2.0, 0.0)).norm() < 1e-14);
        assert!((x.spectral_norm - 2.0).abs() < 1e-12);
        assert!((x.state_expectation - (-2.0)).abs() < 1e-12);
        assert!(x.operator.hermiticity_defect() < 1e-10);
    }

    #[test]
    fn commutator_eigenstate_vanishes() {
        let state = SpectralState::new(vec![1.0], vec![Complex64::new(1.0, 0.0)]).unwrap();
        let x = state.commutator_operator().unwrap();
        assert_eq!(x.spectral_norm, 0.0);
        assert_eq!(x.state_expectation, 0.0);
    }

    #[test]
    fn commutator_respects_dense_limit() {
        let state =
            SpectralState::from_probabilities(vec![0.0, 1.0, 2.0], &[0.2, 0.3, 0.5]).unwrap();
        assert!(matches!(
            state.commutator_operator_with_limit(2),
            Err(Error::DenseLimitExceeded { dim: 3, limit: 2 })
        ));
    }

    #[test]
    fn commutator_expectation_matches_variance() {
        let state =
            SpectralState::from_probabilities(vec![0.3, -1.2, 2.0, 0.9], &[0.1, 0.4, 0.3, 0.2])
                .unwrap();
        let m = state.moments();
        let x = state.commutator_operator().unwrap();
        assert!((x.state_expectation + 2.0 * m.variance).abs() < 1e-9 * (2.0 * m.variance));
    }
}
