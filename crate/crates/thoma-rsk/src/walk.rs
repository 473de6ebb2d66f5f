//! A random walk on the nonnegative integers, reflecting at zero: right
//! with probability `q1`, left with probability `q3 > q1`, hold otherwise.
//! A left move from zero holds, matching the transition row
//! `(q3 + q2, q1, 0, …)`. Its expectation stays bounded uniformly in the
//! step count; the bound is `2q/(1−q)²` with `q = q1/q3`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::{Real, WALK_EXACT_CAP};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkConfig {
    pub right: Real,
    pub left: Real,
}

impl WalkConfig {
    /// Right and left step probabilities; the hold probability is the
    /// remainder. Requires `right < left`.
    pub fn new(right: Real, left: Real) -> Result<Self> {
        if !(0.0..=1.0).contains(&right) || !(0.0..=1.0).contains(&left) {
            return Err(Error::Config("step probabilities must be in [0, 1]".into()));
        }
        if right + left > 1.0 + 1e-12 {
            return Err(Error::Config(format!(
                "q1 + q3 = {} exceeds 1",
                right + left
            )));
        }
        if right >= left {
            return Err(Error::Config(format!(
                "the walk needs q1 < q3, got q1 = {right}, q3 = {left}"
            )));
        }
        Ok(Self { right, left })
    }

    pub fn hold(&self) -> Real {
        1.0 - self.right - self.left
    }

    /// `2q/(1−q)²` with `q = q1/q3`: twice the mean of the geometric
    /// stationary envelope, an upper bound for the expected position at
    /// every step count.
    pub fn expectation_bound(&self) -> Real {
        if self.right == 0.0 {
            return 0.0;
        }
        let q = self.right / self.left;
        2.0 * q / ((1.0 - q) * (1.0 - q))
    }
}

/// Simulates the particle position after `n` steps, starting from zero.
pub fn simulate_position(cfg: &WalkConfig, n: usize, rng: &mut impl Rng) -> usize {
    let mut pos = 0usize;
    for _ in 0..n {
        let u: Real = rng.random();
        if u < cfg.right {
            pos += 1;
        } else if u < cfg.right + cfg.left && pos > 0 {
            pos -= 1;
        }
    }
    pos
}

/// Exact expected positions after `0..=n` steps, by dense iteration of the
/// state distribution. After `s` steps only states `0..=s` carry mass, so
/// the truncation at `n` is exact.
pub fn expected_positions(cfg: &WalkConfig, n: usize) -> Result<Vec<Real>> {
    if n > WALK_EXACT_CAP {
        return Err(Error::CapExceeded {
            what: "walk expectation steps",
            got: n,
            cap: WALK_EXACT_CAP,
        });
    }
    let mut dist = vec![0.0 as Real; n + 2];
    dist[0] = 1.0;
    let mut expectations = Vec::with_capacity(n + 1);
    expectations.push(0.0);
    let hold = cfg.hold();
    let mut next = vec![0.0 as Real; n + 2];
    for step in 1..=n {
        next[..=step].fill(0.0);
        next[0] = dist[0] * (cfg.left + hold) + dist[1] * cfg.left;
        for s in 1..=step {
            next[s] = dist[s - 1] * cfg.right + dist[s] * hold + dist[s + 1] * cfg.left;
        }
        std::mem::swap(&mut dist, &mut next);
        let mean: Real = dist[1..=step].iter().enumerate().map(|(i, &p)| (i + 1) as Real * p).sum();
        expectations.push(mean);
    }
    Ok(expectations)
}

/// Exact expected position after exactly `n` steps.
pub fn expected_position(cfg: &WalkConfig, n: usize) -> Result<Real> {
    Ok(*expected_positions(cfg, n)?.last().unwrap())
}
