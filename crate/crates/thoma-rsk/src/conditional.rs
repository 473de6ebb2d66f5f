//! Covariance of independent centered Gaussians with variances given by the
//! Thoma masses, conditioned on their total sum vanishing. Projected to the
//! first `K + L` coordinates this reproduces, entry by entry, the limit
//! covariance of the row/column fluctuations computed directly in
//! [`crate::stats::theoretical_covariance`] — the two formulas are kept as
//! independent routes.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::params::ThomaParams;
use crate::Real;

/// Covariance of `(X_1..X_K, Y_1..Y_L)` given that the sum of all the
/// coordinate variables (including the remainder) is zero: with variance
/// vector `v` and total variance `s`, the conditional covariance is
/// `diag(v) − v vᵀ / s` restricted to the selected coordinates.
pub fn conditional_covariance(params: &ThomaParams, k: usize, l: usize) -> Result<Vec<Vec<Real>>> {
    if k > params.alphas().len() || l > params.betas().len() {
        return Err(Error::Config(format!(
            "requested K = {k}, L = {l}, parameters have {} alphas and {} betas",
            params.alphas().len(),
            params.betas().len()
        )));
    }
    let total: Real = params.alphas().iter().sum::<Real>()
        + params.betas().iter().sum::<Real>()
        + params.gamma();
    let selected: Vec<Real> = params.alphas()[..k]
        .iter()
        .chain(params.betas()[..l].iter())
        .copied()
        .collect();
    let dim = k + l;
    let mut cov = vec![vec![0.0; dim]; dim];
    for i in 0..dim {
        for j in 0..dim {
            cov[i][j] = -selected[i] * selected[j] / total;
            if i == j {
                cov[i][j] += selected[i];
            }
        }
    }
    Ok(cov)
}

/// Monte Carlo cross-check: samples the full Gaussian vector, projects onto
/// the zero-sum hyperplane, and returns the empirical covariance of the
/// first `K + L` coordinates.
pub fn simulate_conditional_covariance(
    params: &ThomaParams,
    k: usize,
    l: usize,
    trials: usize,
    rng: &mut impl Rng,
) -> Result<Vec<Vec<Real>>> {
    if k > params.alphas().len() || l > params.betas().len() {
        return Err(Error::Config("selection exceeds the parameter lists".into()));
    }
    let variances: Vec<Real> = params
        .alphas()
        .iter()
        .chain(params.betas().iter())
        .copied()
        .chain(std::iter::once(params.gamma()))
        .collect();
    let total: Real = variances.iter().sum();
    let sds: Vec<Real> = variances.iter().map(|v| v.sqrt()).collect();
    // Conditioning a Gaussian vector on its sum: subtract (v_i / s) · sum.
    let select: Vec<usize> = (0..k)
        .chain(params.alphas().len()..params.alphas().len() + l)
        .collect();
    let dim = k + l;
    let mut cov = vec![vec![0.0; dim]; dim];
    let mut draw = vec![0.0 as Real; variances.len()];
    for _ in 0..trials {
        let mut sum = 0.0;
        for (x, &sd) in draw.iter_mut().zip(&sds) {
            let z: Real = StandardNormal.sample(rng);
            *x = sd * z;
            sum += *x;
        }
        for i in 0..dim {
            let xi = draw[select[i]] - variances[select[i]] / total * sum;
            for j in 0..dim {
                let xj = draw[select[j]] - variances[select[j]] / total * sum;
                cov[i][j] += xi * xj;
            }
        }
    }
    for row in &mut cov {
        for entry in row {
            *entry /= trials as Real;
        }
    }
    Ok(cov)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::SeededGenerator;

    #[test]
    fn matches_direct_substitution() {
        let p = ThomaParams::new(&[0.4, 0.25], &[0.2], 0.15).unwrap();
        let c = conditional_covariance(&p, 2, 1).unwrap();
        let expected = [
            [0.24, -0.1, -0.08],
            [-0.1, 0.1875, -0.05],
            [-0.08, -0.05, 0.16],
        ];
        for i in 0..3 {
            for j in 0..3 {
                assert!((c[i][j] - expected[i][j]).abs() < 1e-12, "({i},{j})");
            }
        }
    }

    #[test]
    fn deterministic_single_mass() {
        let p = ThomaParams::new(&[1.0], &[], 0.0).unwrap();
        let c = conditional_covariance(&p, 1, 0).unwrap();
        assert!(c[0][0].abs() < 1e-15);
    }

    #[test]
    fn rejects_oversized_selection() {
        let p = ThomaParams::new(&[0.6], &[0.4], 0.0).unwrap();
        assert!(conditional_covariance(&p, 2, 0).is_err());
    }

    #[test]
    fn simulation_reproduces_the_matrix() {
        let p = ThomaParams::new(&[0.4, 0.25], &[0.2], 0.15).unwrap();
        let trials = 1_000_000;
        let gen = SeededGenerator::new(31);
        let mut rng = gen.stream("conditional", 0);
        let sim = simulate_conditional_covariance(&p, 2, 1, trials, &mut rng).unwrap();
        let exact = conditional_covariance(&p, 2, 1).unwrap();
        // Standard error of a covariance entry is at most ~sqrt(2)·v/sqrt(T).
        for i in 0..3 {
            for j in 0..3 {
                let scale = (exact[i][i] * exact[j][j]).sqrt();
                let se = 1.5 * scale / (trials as Real).sqrt();
                assert!(
                    (sim[i][j] - exact[i][j]).abs() <= 3.0 * se,
                    "({i},{j}): sim {} exact {}",
                    sim[i][j],
                    exact[i][j]
                );
            }
        }
    }
}
