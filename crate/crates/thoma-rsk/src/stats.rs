//! Monte Carlo harnesses for the row/column fluctuation experiments.
//!
//! Every experiment draws one derived random stream per trial, so results
//! are reproducible bit for bit for a fixed `(seed, config)` regardless of
//! the worker count: trials are evaluated in parallel, collected in trial
//! order, and reduced sequentially with compensated accumulation.
//!
//! Row lengths are read from a truncated insertion tracker; column lengths
//! are read from a tracker running the transposed map, whose rows agree
//! with the columns of the standard map for almost every word (the duality
//! is verified separately, exhaustively and at scale, in [`crate::verify`]).

use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

use crate::alphabet::{Letter, LinearOrder};
use crate::error::{Error, Result};
use crate::params::ThomaParams;
use crate::rsk::{KeyView, MapKind, ShapeTracker};
use crate::sampling::{LetterSampler, SeededGenerator};
use crate::series::Accumulator;
use crate::Real;

/// Two-sided acceptance band for moment checks, in standard errors.
pub const SE_BAND: Real = 4.0;

/// Acceptance limit for the marginal lattice KS statistics.
pub const KS_LIMIT: Real = 0.01;

/// Delete-one jackknife blocks for covariance standard errors.
pub const JACKKNIFE_BLOCKS: usize = 100;

/// The limit covariance of the normalized row/column fluctuations:
/// `diag(v_i − v_i²)` with off-diagonal `−v_i v_j`, where
/// `v = (α_1..α_K, β_1..β_L)`.
///
/// Errors unless the requested masses are pairwise distinct and positive
/// within each family — outside that regime the limit is not Gaussian.
pub fn theoretical_covariance(
    params: &ThomaParams,
    k: usize,
    l: usize,
) -> Result<Vec<Vec<Real>>> {
    if k > params.alphas().len() || l > params.betas().len() {
        return Err(Error::Config(format!(
            "requested K = {k}, L = {l}, parameters have {} alphas and {} betas",
            params.alphas().len(),
            params.betas().len()
        )));
    }
    let distinct = |seq: &[Real]| seq.windows(2).all(|w| w[0] > w[1]) && seq.iter().all(|&m| m > 0.0);
    if !distinct(&params.alphas()[..k]) {
        return Err(Error::Monotonicity(format!(
            "the first {k} alphas must be strictly decreasing and positive"
        )));
    }
    if !distinct(&params.betas()[..l]) {
        return Err(Error::Monotonicity(format!(
            "the first {l} betas must be strictly decreasing and positive"
        )));
    }
    let v: Vec<Real> = params.alphas()[..k]
        .iter()
        .chain(params.betas()[..l].iter())
        .copied()
        .collect();
    let dim = k + l;
    let mut cov = vec![vec![0.0; dim]; dim];
    for i in 0..dim {
        for j in 0..dim {
            cov[i][j] = if i == j {
                v[i] - v[i] * v[i]
            } else {
                -v[i] * v[j]
            };
        }
    }
    Ok(cov)
}

/// Experiment configuration shared by all harness runs.
#[derive(Debug, Clone)]
pub struct Harness {
    pub params: ThomaParams,
    pub order: LinearOrder,
    pub k: usize,
    pub l: usize,
    pub map: MapKind,
    pub seed: u64,
    pub workers: Option<usize>,
}

/// Resolved configuration echoed into every report. The worker count is
/// deliberately absent: results do not depend on it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub alphas: Vec<Real>,
    pub betas: Vec<Real>,
    pub gamma: Real,
    pub order: String,
    pub map: MapKind,
    pub k: usize,
    pub l: usize,
    pub seed: u64,
    pub trials: usize,
    pub build: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MomentReport {
    pub labels: Vec<String>,
    pub mean: Vec<Real>,
    pub mean_se: Vec<Real>,
    pub covariance: Vec<Vec<Real>>,
    pub covariance_se: Vec<Vec<Real>>,
    pub theoretical: Vec<Vec<Real>>,
    /// Largest |empirical − theoretical| covariance entry in units of its
    /// jackknife standard error.
    pub max_covariance_deviation_se: Real,
}

/// Marginal goodness-of-fit against the Gaussian law on the value lattice.
/// `raw` centers at the theoretical drift-free location; `centered` centers
/// at the empirical mean, isolating distributional shape from the bounded
/// finite-size location shift (which the drift experiment bounds directly
/// and which vanishes like 1/√n).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KsStat {
    pub raw: Real,
    pub centered: Real,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CltReport {
    pub config: ConfigEcho,
    pub n: usize,
    pub moments: MomentReport,
    pub ks: Vec<KsStat>,
    pub covariance_within_band: bool,
    pub ks_within_limit: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DriftRow {
    pub n: Real,
    pub mean_abs: Vec<Real>,
    pub se: Vec<Real>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DriftReport {
    pub config: ConfigEcho,
    pub labels: Vec<String>,
    pub rows: Vec<DriftRow>,
    /// Per coordinate: estimate at the largest size stays within
    /// `estimate at the smallest size + 5·SE + 0.5`.
    pub bounded: Vec<bool>,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LlnRow {
    pub n: usize,
    pub normalized_mean: Vec<Real>,
    pub se: Vec<Real>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LlnReport {
    pub config: ConfigEcho,
    pub labels: Vec<String>,
    pub targets: Vec<Real>,
    pub rows: Vec<LlnRow>,
    pub final_deviation: Vec<Real>,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PoissonCltReport {
    pub config: ConfigEcho,
    pub nu: Real,
    pub moments: MomentReport,
    pub covariance_within_band: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrderIndependenceReport {
    pub config: ConfigEcho,
    pub alt_order: String,
    pub n: usize,
    pub chi_square: Real,
    pub degrees_of_freedom: usize,
    pub p_value: Real,
    pub pass: bool,
}

/// Per-trial observation: tracked row and column lengths plus the matching
/// letter counts, all read off one word.
struct TrialObs {
    rows: Vec<u32>,
    cols: Vec<u32>,
    row_counts: Vec<u32>,
    col_counts: Vec<u32>,
}

impl Harness {
    fn echo(&self, trials: usize) -> ConfigEcho {
        ConfigEcho {
            alphas: self.params.alphas().to_vec(),
            betas: self.params.betas().to_vec(),
            gamma: self.params.gamma(),
            order: self.order.to_token_string(),
            map: self.map,
            k: self.k,
            l: self.l,
            seed: self.seed,
            trials,
            build: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    /// Effective role split: under the transposed map the rows of the
    /// output diagram follow the betas and the columns follow the alphas.
    fn effective_masses(&self) -> (Vec<Real>, Vec<Real>) {
        match self.map {
            MapKind::Standard => (self.params.alphas().to_vec(), self.params.betas().to_vec()),
            MapKind::Transposed => (self.params.betas().to_vec(), self.params.alphas().to_vec()),
        }
    }

    fn labels(&self) -> Vec<String> {
        (1..=self.k)
            .map(|i| format!("row{i}"))
            .chain((1..=self.l).map(|j| format!("col{j}")))
            .collect()
    }

    fn run_pool<T: Send>(&self, job: impl Fn() -> T + Send) -> T {
        match self.workers {
            Some(w) => rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .expect("thread pool")
                .install(job),
            None => job(),
        }
    }

    /// Evaluates one word of length `n`: stream letters through the two
    /// trackers and the letter counters.
    fn observe(&self, rng: &mut ChaCha12Rng, sampler: &LetterSampler, n: usize) -> TrialObs {
        let row_view = KeyView::new(&self.order, self.map);
        let col_view = KeyView::new(
            &self.order,
            match self.map {
                MapKind::Standard => MapKind::Transposed,
                MapKind::Transposed => MapKind::Standard,
            },
        );
        let mut row_tracker = ShapeTracker::new(self.k);
        let mut col_tracker = ShapeTracker::new(self.l);
        let (row_is_alpha, n_alpha, n_beta) = match self.map {
            MapKind::Standard => (true, self.k, self.l),
            MapKind::Transposed => (false, self.l, self.k),
        };
        let mut alpha_counts = vec![0u32; n_alpha.min(self.params.alphas().len())];
        let mut beta_counts = vec![0u32; n_beta.min(self.params.betas().len())];
        for _ in 0..n {
            let letter = sampler.sample(rng);
            match letter {
                Letter::Row(i) if i <= alpha_counts.len() => alpha_counts[i - 1] += 1,
                Letter::Col(j) if j <= beta_counts.len() => beta_counts[j - 1] += 1,
                _ => {}
            }
            row_tracker.push(row_view.key(letter));
            col_tracker.push(col_view.key(letter));
        }
        assert_eq!(row_tracker.total(), n, "insertion must account for every letter");
        assert_eq!(col_tracker.total(), n, "insertion must account for every letter");
        let pad = |counts: Vec<u32>, want: usize| -> Vec<u32> {
            let mut c = counts;
            c.resize(want, 0);
            c
        };
        let (row_counts, col_counts) = if row_is_alpha {
            (pad(alpha_counts, self.k), pad(beta_counts, self.l))
        } else {
            (pad(beta_counts, self.k), pad(alpha_counts, self.l))
        };
        TrialObs {
            rows: (1..=self.k).map(|i| row_tracker.row(i) as u32).collect(),
            cols: (1..=self.l).map(|j| col_tracker.row(j) as u32).collect(),
            row_counts,
            col_counts,
        }
    }

    fn collect_trials(
        &self,
        label: &str,
        trials: usize,
        length_of: impl Fn(&mut ChaCha12Rng) -> usize + Sync,
    ) -> Vec<TrialObs> {
        let gen = SeededGenerator::new(self.seed);
        let sampler = LetterSampler::new(&self.params);
        self.run_pool(|| {
            (0..trials as u64)
                .into_par_iter()
                .map(|t| {
                    let mut rng = gen.stream(label, t);
                    let n = length_of(&mut rng);
                    self.observe(&mut rng, &sampler, n)
                })
                .collect()
        })
    }

    /// Fluctuation experiment at fixed word length `n`: normalized row and
    /// column deviations against the limit covariance, with marginal
    /// lattice KS statistics.
    pub fn run_clt(&self, n: usize, trials: usize) -> Result<CltReport> {
        if n == 0 || trials < 2 {
            return Err(Error::Config("need n ≥ 1 and at least two trials".into()));
        }
        let (alphas_eff, betas_eff) = self.effective_masses();
        let theory = theoretical_covariance(
            &match self.map {
                MapKind::Standard => self.params.clone(),
                MapKind::Transposed => self.params.transposed(),
            },
            self.k,
            self.l,
        )?;
        let obs = self.collect_trials("clt", trials, |_| n);
        let dim = self.k + self.l;
        let sqrt_n = (n as Real).sqrt();
        let targets: Vec<Real> = alphas_eff[..self.k]
            .iter()
            .chain(betas_eff[..self.l].iter())
            .copied()
            .collect();
        let fluct: Vec<Vec<Real>> = obs
            .iter()
            .map(|o| {
                (0..dim)
                    .map(|c| {
                        let raw = if c < self.k {
                            o.rows[c] as Real
                        } else {
                            o.cols[c - self.k] as Real
                        };
                        (raw - targets[c] * n as Real) / sqrt_n
                    })
                    .collect()
            })
            .collect();
        let moments = moment_report(&fluct, &theory, self.labels());
        let ks: Vec<KsStat> = (0..dim)
            .map(|c| {
                let values: Vec<i64> = obs
                    .iter()
                    .map(|o| {
                        if c < self.k {
                            o.rows[c] as i64
                        } else {
                            o.cols[c - self.k] as i64
                        }
                    })
                    .collect();
                let sd = (theory[c][c] * n as Real).sqrt();
                let mean: Real =
                    values.iter().map(|&v| v as Real).sum::<Real>() / values.len() as Real;
                KsStat {
                    raw: lattice_ks(&values, targets[c] * n as Real, sd),
                    centered: lattice_ks(&values, mean, sd),
                }
            })
            .collect();
        let covariance_within_band = moments.max_covariance_deviation_se <= SE_BAND;
        let ks_within_limit = ks.iter().all(|s| s.centered < KS_LIMIT);
        Ok(CltReport {
            config: self.echo(trials),
            n,
            pass: covariance_within_band && ks_within_limit,
            covariance_within_band,
            ks_within_limit,
            moments,
            ks,
        })
    }

    /// Coupled drift experiment over a grid of word lengths: the mean
    /// absolute difference between each tracked row (column) length and the
    /// count of its letter, from the same word.
    pub fn run_drift(&self, n_grid: &[usize], trials: usize) -> Result<DriftReport> {
        if n_grid.is_empty() || n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("the size grid must be increasing".into()));
        }
        let mut rows = Vec::with_capacity(n_grid.len());
        for &n in n_grid {
            let obs = self.collect_trials(&format!("drift-n{n}"), trials, |_| n);
            rows.push(drift_row(n as Real, &obs, self.k, self.l));
        }
        Ok(self.drift_report(rows, trials))
    }

    /// Drift experiment under Poisson word lengths with mean `nu`.
    pub fn run_drift_poisson(&self, nu_grid: &[Real], trials: usize) -> Result<DriftReport> {
        if nu_grid.is_empty() || nu_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("the mean grid must be increasing".into()));
        }
        let mut rows = Vec::with_capacity(nu_grid.len());
        for &nu in nu_grid {
            if !(nu > 0.0) {
                return Err(Error::Config("poisson means must be positive".into()));
            }
            let obs = self.collect_trials(&format!("drift-poisson-nu{nu}"), trials, |rng| {
                poisson_length(nu, rng)
            });
            rows.push(drift_row(nu, &obs, self.k, self.l));
        }
        Ok(self.drift_report(rows, trials))
    }

    fn drift_report(&self, rows: Vec<DriftRow>, trials: usize) -> DriftReport {
        let dim = self.k + self.l;
        let first = &rows[0];
        let last = &rows[rows.len() - 1];
        let bounded: Vec<bool> = (0..dim)
            .map(|c| {
                let combined_se = (first.se[c].powi(2) + last.se[c].powi(2)).sqrt();
                last.mean_abs[c] <= first.mean_abs[c] + 5.0 * combined_se + 0.5
            })
            .collect();
        DriftReport {
            config: self.echo(trials),
            labels: self.labels(),
            pass: bounded.iter().all(|&b| b),
            bounded,
            rows,
        }
    }

    /// Law-of-large-numbers table: mean normalized row and column lengths
    /// across a size grid, against their mass targets.
    pub fn run_lln(&self, n_grid: &[usize], trials: usize) -> Result<LlnReport> {
        if n_grid.is_empty() || n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("the size grid must be increasing".into()));
        }
        let (alphas_eff, betas_eff) = self.effective_masses();
        let dim = self.k + self.l;
        let target = |c: usize| -> Real {
            if c < self.k {
                alphas_eff.get(c).copied().unwrap_or(0.0)
            } else {
                betas_eff.get(c - self.k).copied().unwrap_or(0.0)
            }
        };
        let targets: Vec<Real> = (0..dim).map(target).collect();
        let mut rows = Vec::with_capacity(n_grid.len());
        for &n in n_grid {
            let obs = self.collect_trials(&format!("lln-n{n}"), trials, |_| n);
            let mut means = Vec::with_capacity(dim);
            let mut ses = Vec::with_capacity(dim);
            for c in 0..dim {
                let values = obs.iter().map(|o| {
                    let raw = if c < self.k {
                        o.rows[c] as Real
                    } else {
                        o.cols[c - self.k] as Real
                    };
                    raw / n as Real
                });
                let (mean, se) = mean_and_se(values, obs.len());
                means.push(mean);
                ses.push(se);
            }
            rows.push(LlnRow {
                n,
                normalized_mean: means,
                se: ses,
            });
        }
        let last = rows.last().unwrap();
        let final_deviation: Vec<Real> = (0..dim)
            .map(|c| (last.normalized_mean[c] - targets[c]).abs())
            .collect();
        // Positive targets converge at the 1/√n scale; zero targets (all
        // masses vanishing) only sublinearly, hence the looser band.
        let pass = (0..dim).all(|c| {
            let band = if targets[c] > 0.0 {
                0.01 + 6.0 * last.se[c]
            } else {
                0.05
            };
            final_deviation[c] <= band
        });
        Ok(LlnReport {
            config: self.echo(trials),
            labels: self.labels(),
            targets,
            rows,
            final_deviation,
            pass,
        })
    }

    /// Poissonized fluctuation experiment: fluctuations normalized by the
    /// mean `nu` against the independent diagonal limit.
    pub fn run_clt_poisson(&self, nu: Real, trials: usize) -> Result<PoissonCltReport> {
        if !(nu > 0.0) || trials < 2 {
            return Err(Error::Config("need nu > 0 and at least two trials".into()));
        }
        let (alphas_eff, betas_eff) = self.effective_masses();
        // Validate monotonicity exactly as in the fixed-length experiment.
        theoretical_covariance(
            &match self.map {
                MapKind::Standard => self.params.clone(),
                MapKind::Transposed => self.params.transposed(),
            },
            self.k,
            self.l,
        )?;
        let dim = self.k + self.l;
        let targets: Vec<Real> = alphas_eff[..self.k]
            .iter()
            .chain(betas_eff[..self.l].iter())
            .copied()
            .collect();
        let theory: Vec<Vec<Real>> = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| if i == j { targets[i] } else { 0.0 })
                    .collect()
            })
            .collect();
        let obs = self.collect_trials("clt-poisson", trials, |rng| poisson_length(nu, rng));
        let sqrt_nu = nu.sqrt();
        let fluct: Vec<Vec<Real>> = obs
            .iter()
            .map(|o| {
                (0..dim)
                    .map(|c| {
                        let raw = if c < self.k {
                            o.rows[c] as Real
                        } else {
                            o.cols[c - self.k] as Real
                        };
                        (raw - targets[c] * nu) / sqrt_nu
                    })
                    .collect()
            })
            .collect();
        let moments = moment_report(&fluct, &theory, self.labels());
        let covariance_within_band = moments.max_covariance_deviation_se <= SE_BAND;
        Ok(PoissonCltReport {
            config: self.echo(trials),
            nu,
            pass: covariance_within_band,
            covariance_within_band,
            moments,
        })
    }

    /// Distribution of the first-row drift under this harness's order
    /// versus an alternative order, compared by a two-sample chi-square
    /// test on the integer drift values. The two runs use independent
    /// streams; the drift law must not depend on the order.
    pub fn drift_order_independence(
        &self,
        alt_order: &LinearOrder,
        n: usize,
        trials: usize,
    ) -> Result<OrderIndependenceReport> {
        alt_order.matches_params(&self.params)?;
        let drift_samples = |order: &LinearOrder, label: &str| -> Vec<i64> {
            let h = Harness {
                order: order.clone(),
                ..self.clone()
            };
            let obs = h.collect_trials(label, trials, |_| n);
            obs.iter()
                .map(|o| o.rows[0] as i64 - o.row_counts[0] as i64)
                .collect()
        };
        let a = drift_samples(&self.order, "drift-order-a");
        let b = drift_samples(alt_order, "drift-order-b");
        let (chi_square, dof) = two_sample_chi_square(&a, &b);
        let p_value = if dof == 0 {
            1.0
        } else {
            1.0 - ChiSquared::new(dof as Real)
                .expect("positive dof")
                .cdf(chi_square)
        };
        Ok(OrderIndependenceReport {
            config: self.echo(trials),
            alt_order: alt_order.to_token_string(),
            n,
            chi_square,
            degrees_of_freedom: dof,
            p_value,
            pass: p_value > 0.001,
        })
    }
}

fn poisson_length(nu: Real, rng: &mut ChaCha12Rng) -> usize {
    use rand_distr::Distribution;
    let len: f64 = rand_distr::Poisson::new(nu)
        .expect("validated mean")
        .sample(rng);
    len as usize
}

fn drift_row(scale: Real, obs: &[TrialObs], k: usize, l: usize) -> DriftRow {
    let dim = k + l;
    let mut mean_abs = Vec::with_capacity(dim);
    let mut ses = Vec::with_capacity(dim);
    for c in 0..dim {
        let values = obs.iter().map(|o| {
            let (len, count) = if c < k {
                (o.rows[c] as i64, o.row_counts[c] as i64)
            } else {
                (o.cols[c - k] as i64, o.col_counts[c - k] as i64)
            };
            (len - count).abs() as Real
        });
        let (mean, se) = mean_and_se(values, obs.len());
        mean_abs.push(mean);
        ses.push(se);
    }
    DriftRow {
        n: scale,
        mean_abs,
        se: ses,
    }
}

fn mean_and_se(values: impl Iterator<Item = Real> + Clone, count: usize) -> (Real, Real) {
    let mut sum = Accumulator::<Real>::new();
    for v in values.clone() {
        sum.add(v);
    }
    let mean = sum.finish() / count as Real;
    let mut sq = Accumulator::<Real>::new();
    for v in values {
        sq.add((v - mean) * (v - mean));
    }
    let var = sq.finish() / (count.max(2) - 1) as Real;
    (mean, (var / count as Real).sqrt())
}

/// Mean vector, covariance matrix, and jackknife standard errors against a
/// theoretical matrix.
fn moment_report(samples: &[Vec<Real>], theory: &[Vec<Real>], labels: Vec<String>) -> MomentReport {
    let t = samples.len();
    let dim = samples[0].len();
    let mut mean = vec![0.0; dim];
    for (c, m) in mean.iter_mut().enumerate() {
        let mut acc = Accumulator::<Real>::new();
        for s in samples {
            acc.add(s[c]);
        }
        *m = acc.finish() / t as Real;
    }
    let mut cov = vec![vec![0.0; dim]; dim];
    for i in 0..dim {
        for j in i..dim {
            let mut acc = Accumulator::<Real>::new();
            for s in samples {
                acc.add((s[i] - mean[i]) * (s[j] - mean[j]));
            }
            let v = acc.finish() / (t - 1) as Real;
            cov[i][j] = v;
            cov[j][i] = v;
        }
    }
    let mean_se: Vec<Real> = (0..dim)
        .map(|c| (cov[c][c] / t as Real).sqrt())
        .collect();

    // Jackknife over contiguous trial blocks, from per-block raw moments.
    let blocks = JACKKNIFE_BLOCKS.min(t / 2).max(2);
    let block_of = |trial: usize| -> usize { (trial * blocks / t).min(blocks - 1) };
    let mut b_count = vec![0usize; blocks];
    let mut b_sum = vec![vec![0.0; dim]; blocks];
    let mut b_sumsq = vec![vec![vec![0.0; dim]; dim]; blocks];
    for (trial, s) in samples.iter().enumerate() {
        let b = block_of(trial);
        b_count[b] += 1;
        for i in 0..dim {
            b_sum[b][i] += s[i];
            for j in i..dim {
                b_sumsq[b][i][j] += s[i] * s[j];
            }
        }
    }
    let mut total_sum = vec![0.0; dim];
    let mut total_sumsq = vec![vec![0.0; dim]; dim];
    for b in 0..blocks {
        for i in 0..dim {
            total_sum[i] += b_sum[b][i];
            for j in i..dim {
                total_sumsq[i][j] += b_sumsq[b][i][j];
            }
        }
    }
    // Leave-one-block-out covariance estimates.
    let mut jk: Vec<Vec<Vec<Real>>> = Vec::with_capacity(blocks);
    for b in 0..blocks {
        let t_out = t - b_count[b];
        let mut c_out = vec![vec![0.0; dim]; dim];
        for i in 0..dim {
            let mi = (total_sum[i] - b_sum[b][i]) / t_out as Real;
            for j in i..dim {
                let mj = (total_sum[j] - b_sum[b][j]) / t_out as Real;
                let s2 = total_sumsq[i][j] - b_sumsq[b][i][j];
                let v = if t_out > 1 {
                    (s2 - t_out as Real * mi * mj) / (t_out - 1) as Real
                } else {
                    0.0
                };
                c_out[i][j] = v;
                c_out[j][i] = v;
            }
        }
        jk.push(c_out);
    }
    let mut cov_se = vec![vec![0.0; dim]; dim];
    for i in 0..dim {
        for j in 0..dim {
            let avg: Real = jk.iter().map(|m| m[i][j]).sum::<Real>() / blocks as Real;
            let ss: Real = jk.iter().map(|m| (m[i][j] - avg).powi(2)).sum();
            cov_se[i][j] = ((blocks - 1) as Real / blocks as Real * ss).sqrt();
        }
    }

    let mut max_dev: Real = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            let se = cov_se[i][j];
            let dev = (cov[i][j] - theory[i][j]).abs();
            let units = if se > 0.0 {
                dev / se
            } else if dev == 0.0 {
                0.0
            } else {
                Real::INFINITY
            };
            max_dev = max_dev.max(units);
        }
    }
    MomentReport {
        labels,
        mean,
        mean_se,
        covariance: cov,
        covariance_se: cov_se,
        theoretical: theory.to_vec(),
        max_covariance_deviation_se: max_dev,
    }
}

/// Two-sided KS distance between integer-valued samples and a Gaussian,
/// evaluated at lattice cell midpoints (the natural comparison for a
/// distribution living on a unit lattice).
pub fn lattice_ks(values: &[i64], center: Real, sd: Real) -> Real {
    let t = values.len() as Real;
    if sd <= 0.0 {
        // Degenerate model: exact when every sample sits at the center.
        let ok = values.iter().all(|&v| (v as Real - center).abs() < 0.5);
        return if ok { 0.0 } else { 1.0 };
    }
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let mut sorted = values.to_vec();
    sorted.sort_unstable();
    let mut worst: Real = 0.0;
    let mut cum = 0usize;
    let mut idx = 0usize;
    while idx < sorted.len() {
        let v = sorted[idx];
        let mut run = 0usize;
        while idx < sorted.len() && sorted[idx] == v {
            run += 1;
            idx += 1;
        }
        let below = cum as Real / t;
        cum += run;
        let at = cum as Real / t;
        let lo = normal.cdf((v as Real - 0.5 - center) / sd);
        let hi = normal.cdf((v as Real + 0.5 - center) / sd);
        worst = worst.max((below - lo).abs()).max((at - hi).abs());
    }
    worst
}

/// Two-sample chi-square homogeneity statistic over integer samples, with
/// adjacent values pooled until each bin holds at least 20 pooled counts.
pub fn two_sample_chi_square(a: &[i64], b: &[i64]) -> (Real, usize) {
    use std::collections::BTreeMap;
    let mut counts: BTreeMap<i64, (usize, usize)> = BTreeMap::new();
    for &v in a {
        counts.entry(v).or_default().0 += 1;
    }
    for &v in b {
        counts.entry(v).or_default().1 += 1;
    }
    let mut bins: Vec<(usize, usize)> = Vec::new();
    let mut acc = (0usize, 0usize);
    for &(ca, cb) in counts.values() {
        acc.0 += ca;
        acc.1 += cb;
        if acc.0 + acc.1 >= 20 {
            bins.push(acc);
            acc = (0, 0);
        }
    }
    if acc.0 + acc.1 > 0 {
        if let Some(last) = bins.last_mut() {
            last.0 += acc.0;
            last.1 += acc.1;
        } else {
            bins.push(acc);
        }
    }
    if bins.len() < 2 {
        return (0.0, 0);
    }
    let (na, nb) = (a.len() as Real, b.len() as Real);
    let total = na + nb;
    let mut chi = 0.0;
    for &(ca, cb) in &bins {
        let pooled = (ca + cb) as Real / total;
        let (ea, eb) = (na * pooled, nb * pooled);
        chi += (ca as Real - ea).powi(2) / ea + (cb as Real - eb).powi(2) / eb;
    }
    (chi, bins.len() - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mixed_params() -> ThomaParams {
        ThomaParams::new(&[0.4, 0.25], &[0.2], 0.15).unwrap()
    }

    fn harness(params: ThomaParams, k: usize, l: usize) -> Harness {
        let order = LinearOrder::for_params(&params);
        Harness {
            params,
            order,
            k,
            l,
            map: MapKind::Standard,
            seed: 12345,
            workers: None,
        }
    }

    #[test]
    fn covariance_matrix_entries() {
        let c = theoretical_covariance(&mixed_params(), 2, 1).unwrap();
        let expected = [
            [0.24, -0.1, -0.08],
            [-0.1, 0.1875, -0.05],
            [-0.08, -0.05, 0.16],
        ];
        for i in 0..3 {
            for j in 0..3 {
                assert!((c[i][j] - expected[i][j]).abs() < 1e-15, "({i},{j})");
            }
        }
    }

    #[test]
    fn covariance_single_mass_and_rejections() {
        let p = ThomaParams::new(&[0.7, 0.3], &[], 0.0).unwrap();
        let c = theoretical_covariance(&p, 1, 0).unwrap();
        assert!((c[0][0] - (0.7 - 0.49)).abs() < 1e-15);
        let tied = ThomaParams::new(&[0.5, 0.5], &[], 0.0).unwrap();
        assert!(theoretical_covariance(&tied, 2, 0).is_err());
        assert!(theoretical_covariance(&p, 3, 0).is_err());
    }

    #[test]
    fn deterministic_single_letter_fluctuations() {
        let p = ThomaParams::new(&[1.0], &[], 0.0).unwrap();
        let h = harness(p, 1, 0);
        let report = h.run_clt(50, 500).unwrap();
        // Every diagram is one full row: fluctuations vanish identically.
        assert!(report.moments.mean[0].abs() < 1e-12);
        assert!(report.moments.covariance[0][0].abs() < 1e-12);
        assert!(report.ks[0].centered == 0.0 && report.ks[0].raw == 0.0);
    }

    #[test]
    fn clt_small_run_is_sane() {
        let h = harness(mixed_params(), 2, 1);
        let report = h.run_clt(200, 3000).unwrap();
        // Symmetric covariance with positive jackknife errors.
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(report.moments.covariance[i][j], report.moments.covariance[j][i]);
                assert!(report.moments.covariance_se[i][j] > 0.0);
            }
        }
        // At this scale the moments are already within a loose band.
        assert!(report.moments.max_covariance_deviation_se < 8.0);
    }

    #[test]
    fn results_do_not_depend_on_worker_count() {
        let base = harness(mixed_params(), 2, 1);
        let one = Harness {
            workers: Some(1),
            ..base.clone()
        };
        let three = Harness {
            workers: Some(3),
            ..base
        };
        let ra = one.run_clt(100, 400).unwrap();
        let rb = three.run_clt(100, 400).unwrap();
        assert_eq!(
            serde_json::to_string(&ra).unwrap(),
            serde_json::to_string(&rb).unwrap()
        );
        let da = one.run_drift(&[50, 100], 300).unwrap();
        let db = three.run_drift(&[50, 100], 300).unwrap();
        assert_eq!(
            serde_json::to_string(&da).unwrap(),
            serde_json::to_string(&db).unwrap()
        );
    }

    #[test]
    fn transposed_run_mirrors_column_samples() {
        let base = harness(mixed_params(), 2, 1);
        let transposed = Harness {
            map: MapKind::Transposed,
            k: 1,
            l: 2,
            ..base.clone()
        };
        let std_report = base.run_clt(150, 500).unwrap();
        let tr_report = transposed.run_clt(150, 500).unwrap();
        // Column marginals of the standard run are the row marginals of the
        // transposed run, trial by trial: same seed, same words, same
        // tracker, mirrored roles. Means, covariances, and the KS values
        // derived from those samples coincide exactly.
        assert!((std_report.moments.mean[2] - tr_report.moments.mean[0]).abs() < 1e-12);
        assert!(
            (std_report.moments.covariance[2][2] - tr_report.moments.covariance[0][0]).abs()
                < 1e-12
        );
        assert_eq!(std_report.ks[2].raw, tr_report.ks[0].raw);
        assert_eq!(std_report.ks[2].centered, tr_report.ks[0].centered);
    }

    #[test]
    fn drift_vanishes_for_single_letter() {
        let p = ThomaParams::new(&[1.0], &[], 0.0).unwrap();
        let h = harness(p, 1, 0);
        let report = h.run_drift(&[50, 100, 200], 200).unwrap();
        for row in &report.rows {
            assert_eq!(row.mean_abs[0], 0.0);
        }
        assert!(report.pass);
    }

    #[test]
    fn lln_exact_for_single_letter() {
        let p = ThomaParams::new(&[1.0], &[], 0.0).unwrap();
        let h = harness(p, 1, 0);
        let report = h.run_lln(&[50, 100], 100).unwrap();
        for row in &report.rows {
            assert_eq!(row.normalized_mean[0], 1.0);
        }
        assert!(report.pass);
    }

    #[test]
    fn poisson_variance_of_single_letter_is_the_mass() {
        // One letter: the row length is the Poisson length itself, so the
        // normalized variance converges to 1 = alpha.
        let p = ThomaParams::new(&[1.0], &[], 0.0).unwrap();
        let h = harness(p, 1, 0);
        let report = h.run_clt_poisson(400.0, 4000).unwrap();
        let v = report.moments.covariance[0][0];
        assert!((v - 1.0).abs() < 0.1, "variance {v}");
        assert!(report.pass);
    }

    #[test]
    fn grids_must_increase() {
        let h = harness(mixed_params(), 1, 0);
        assert!(h.run_drift(&[100, 100], 10).is_err());
        assert!(h.run_lln(&[], 10).is_err());
    }

    #[test]
    fn lattice_ks_behaviour() {
        // A perfect lattice Gaussian sample has a small statistic.
        let normal = Normal::new(0.0, 1.0).unwrap();
        let sd = 8.0;
        let t = 40_000;
        let mut values = Vec::with_capacity(t);
        // Inverse-CDF stratified sample on the lattice.
        for i in 0..t {
            let u = (i as Real + 0.5) / t as Real;
            let z = normal.inverse_cdf(u);
            values.push((z * sd).round() as i64);
        }
        let d = lattice_ks(&values, 0.0, sd);
        assert!(d < 0.005, "stratified lattice sample: {d}");
        // A unit shift is clearly visible.
        let shifted: Vec<i64> = values.iter().map(|v| v + 8).collect();
        let d_shift = lattice_ks(&shifted, 0.0, sd);
        assert!(d_shift > 0.3, "shifted sample: {d_shift}");
    }

    #[test]
    fn chi_square_detects_shifts() {
        let a: Vec<i64> = (0..1000).map(|i| i % 7).collect();
        let b: Vec<i64> = (0..1000).map(|i| (i % 7) + 3).collect();
        let (chi, dof) = two_sample_chi_square(&a, &b);
        assert!(dof >= 1);
        assert!(chi > 100.0);
        let (chi_same, _) = two_sample_chi_square(&a, &a);
        assert!(chi_same < 1e-9);
    }
}
