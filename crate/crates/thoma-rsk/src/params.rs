//! Thoma parameters `(α, β, γ)`: two weakly decreasing mass sequences plus a
//! continuous remainder, summing to one.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Real;

/// Absolute tolerance for the total-mass normalization check.
pub const MASS_TOLERANCE: Real = 1e-12;

/// A point of the Thoma simplex with finitely many discrete masses.
///
/// Zero masses are stripped at construction, so "index `i` with `α_i ≠ 0`"
/// is simply "stored index". Immutable after construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThomaParams {
    alphas: Vec<Real>,
    betas: Vec<Real>,
    gamma: Real,
}

impl ThomaParams {
    /// Validates raw mass sequences and builds the normalized parameter set.
    ///
    /// Rejects negative masses, sequences that are not weakly decreasing,
    /// and totals that differ from 1 by more than [`MASS_TOLERANCE`].
    pub fn new(alphas: &[Real], betas: &[Real], gamma: Real) -> Result<Self> {
        for (name, seq) in [("alphas", alphas), ("betas", betas)] {
            if seq.iter().any(|&m| m < 0.0 || !m.is_finite()) {
                return Err(Error::InvalidParams(format!(
                    "{name} contains a negative or non-finite mass"
                )));
            }
            if seq.windows(2).any(|w| w[0] < w[1]) {
                return Err(Error::InvalidParams(format!(
                    "{name} is not weakly decreasing"
                )));
            }
        }
        if !(0.0..=1.0 + MASS_TOLERANCE).contains(&gamma) {
            return Err(Error::InvalidParams(format!("gamma {gamma} not in [0, 1]")));
        }
        let total: Real = alphas.iter().chain(betas.iter()).sum::<Real>() + gamma;
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidParams(format!(
                "total mass {total} differs from 1 by more than {MASS_TOLERANCE}"
            )));
        }
        Ok(Self {
            alphas: alphas.iter().copied().filter(|&m| m > 0.0).collect(),
            betas: betas.iter().copied().filter(|&m| m > 0.0).collect(),
            gamma,
        })
    }

    pub fn alphas(&self) -> &[Real] {
        &self.alphas
    }

    pub fn betas(&self) -> &[Real] {
        &self.betas
    }

    pub fn gamma(&self) -> Real {
        self.gamma
    }

    /// Mass of the row letter `x_i` (1-based index).
    pub fn alpha(&self, i: usize) -> Real {
        self.alphas[i - 1]
    }

    /// Mass of the column letter `y_j` (1-based index).
    pub fn beta(&self, j: usize) -> Real {
        self.betas[j - 1]
    }

    /// Whether all stored alphas are pairwise distinct and all stored betas
    /// are pairwise distinct. This is the hypothesis under which the
    /// fluctuation limit is Gaussian.
    pub fn strictly_monotone(&self) -> bool {
        self.alphas.windows(2).all(|w| w[0] > w[1]) && self.betas.windows(2).all(|w| w[0] > w[1])
    }

    /// Parameters with the roles of rows and columns exchanged.
    pub fn transposed(&self) -> Self {
        Self {
            alphas: self.betas.clone(),
            betas: self.alphas.clone(),
            gamma: self.gamma,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("params serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: ThomaParams =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::new(&raw.alphas, &raw.betas, raw.gamma)
    }
}
