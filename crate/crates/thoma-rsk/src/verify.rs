//! Self-contained verification suites for the structural identities behind
//! the experiments: order invariance of the joint shape/type law,
//! amalgamation dominance, transpose duality, the reflecting-walk bound,
//! the bump-order contraction, the conditional-Gaussian identity, and the
//! insertion bijection with its Greene invariants.

use rayon::prelude::*;
use serde::Serialize;

use crate::alphabet::{word_from_line, Letter, LetterCounts, LinearOrder, Segment};
use crate::diagram::{partitions_of, YoungDiagram};
use crate::error::Result;
use crate::exact::{
    count_tableaux_of_type, distribution_distance, shape_type_distribution,
};
use crate::greene::{greene_cols, greene_rows};
use crate::params::ThomaParams;
use crate::rsk::{rsk, rsk_inverse, transposed_rsk};
use crate::sampling::{reduce_to_finite, sample_word, SeededGenerator};
use crate::stats::theoretical_covariance;
use crate::tableau::{fillings_of_shape, standard_tableaux_of_shape, InsertionTableau};
use crate::transform::{bump_order_transform, restrict_word, suffix_excess};
use crate::walk::{expected_positions, WalkConfig};
use crate::{conditional, Real};

/// Outcome of one verification check.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, pass: bool, detail: String) -> Self {
        Self {
            name: name.to_string(),
            pass,
            detail,
        }
    }
}

/// The parameter sets used across the verification and acceptance runs.
pub fn test_matrix() -> Vec<ThomaParams> {
    vec![
        ThomaParams::new(&[0.6], &[0.4], 0.0).unwrap(),
        ThomaParams::new(&[0.5, 0.3], &[0.2], 0.0).unwrap(),
        ThomaParams::new(&[0.4, 0.25], &[0.2], 0.15).unwrap(),
    ]
}

/// Three structurally different orders on the alphabet of `params`, each
/// keeping the continuous block contiguous.
pub fn three_orders(params: &ThomaParams) -> Vec<LinearOrder> {
    let standard = LinearOrder::for_params(params);
    let reversed = standard.reversed();
    let rows = params.alphas().len();
    let cols = params.betas().len();
    let mut segments = Vec::new();
    for i in 0..rows.max(cols) {
        if i < rows {
            segments.push(Segment::Row(i + 1));
        }
        if i == 0 && params.gamma() > 0.0 {
            segments.push(Segment::Cont);
        }
        if i < cols {
            segments.push(Segment::Col(cols - i));
        }
    }
    let interleaved = LinearOrder::new(segments).expect("interleaved order is valid");
    vec![standard, reversed, interleaved]
}

/// The joint law of the insertion shape and tableau type, computed by
/// exhaustive enumeration, must be identical under every order; so must the
/// count of fixed-type fillings of a fixed shape.
pub fn order_invariance(n_max: usize, tol: Real) -> Result<Check> {
    let mut worst: Real = 0.0;
    for params in test_matrix() {
        let orders = three_orders(&params);
        for n in 1..=n_max {
            let reference = shape_type_distribution(&params, n, &orders[0])?;
            for order in &orders[1..] {
                let other = shape_type_distribution(&params, n, order)?;
                worst = worst.max(distribution_distance(&reference, &other));
            }
        }
    }
    // Filling counts of the worked-example shape and type across orders.
    let shape = YoungDiagram::new(vec![3, 2, 1, 1]);
    let counts = LetterCounts {
        rows: vec![2, 1],
        cols: vec![3, 1],
        cont: 0,
    };
    let four = ThomaParams::new(&[0.3, 0.2], &[0.3, 0.2], 0.0).unwrap();
    let fills: Vec<usize> = three_orders(&four)
        .iter()
        .map(|order| count_tableaux_of_type(&shape, &counts, order))
        .collect::<Result<_>>()?;
    let counts_agree = fills.windows(2).all(|w| w[0] == w[1]) && fills[0] > 0;
    let pass = worst <= tol && counts_agree;
    Ok(Check::new(
        "order-invariance",
        pass,
        format!(
            "max joint-law deviation {worst:.3e} (tol {tol:.1e}); filling counts {fills:?}"
        ),
    ))
}

/// Partial row sums never decrease when the word is pushed through the
/// finite-alphabet reduction (the new letter joins the upward-tie class, so
/// increasing subsequences survive).
pub fn amalgamation_dominance(n: usize, trials: u64, k_max: usize, seed: u64) -> Result<Check> {
    let params = ThomaParams::new(&[0.4, 0.25], &[0.2], 0.15).unwrap();
    let order = LinearOrder::for_params(&params);
    let reduction = reduce_to_finite(&params, 2)?;
    let gen = SeededGenerator::new(seed);
    let violations: u64 = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = gen.stream("dominance", t);
            let w = sample_word(&params, n, &mut rng);
            let shape = rsk(&w, &order).shape();
            let mapped = reduction.map_word(&w);
            let shape_star = rsk(&mapped, &reduction.order).shape();
            let bad = (1..=k_max)
                .any(|k| shape.row_prefix_sum(k) > shape_star.row_prefix_sum(k));
            bad as u64
        })
        .sum();
    Ok(Check::new(
        "amalgamation-dominance",
        violations == 0,
        format!("{violations} violations over {trials} coupled words of length {n}"),
    ))
}

/// The shape under the transposed map is exactly the transpose of the shape
/// under the standard map, for words with pairwise distinct continuous
/// letters (almost every sampled word).
pub fn transpose_duality(n: usize, trials: u64, seed: u64) -> Result<Check> {
    let params = ThomaParams::new(&[0.4, 0.25], &[0.2], 0.15).unwrap();
    let order = LinearOrder::for_params(&params);
    let gen = SeededGenerator::new(seed);
    let violations: u64 = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = gen.stream("duality", t);
            let w = sample_word(&params, n, &mut rng);
            let direct = rsk(&w, &order).shape();
            let dual = transposed_rsk(&w, &order).shape().transpose();
            (direct != dual) as u64
        })
        .sum();
    Ok(Check::new(
        "transpose-duality",
        violations == 0,
        format!("{violations} mismatches over {trials} words of length {n}"),
    ))
}

/// The exact expected walk position is nondecreasing in the step count and
/// stays below the geometric bound for every tested configuration.
pub fn walk_expectation_bound(n_max: usize) -> Result<Check> {
    let configs = [(0.2, 0.5), (0.3, 0.4), (0.1, 0.8)];
    let mut detail = String::new();
    let mut pass = true;
    for (q1, q3) in configs {
        let cfg = WalkConfig::new(q1, q3)?;
        let bound = cfg.expectation_bound();
        let exps = expected_positions(&cfg, n_max)?;
        let monotone = exps.windows(2).all(|w| w[1] >= w[0] - 1e-13);
        let bounded = exps.iter().all(|&e| e <= bound);
        pass &= monotone && bounded;
        detail.push_str(&format!(
            "(q1={q1}, q3={q3}): final {:.6} ≤ bound {:.6}, monotone {monotone}; ",
            exps.last().unwrap(),
            bound
        ));
    }
    Ok(Check::new("walk-expectation-bound", pass, detail))
}

/// Exhaustive check that running the insertion on a two-letter word leaves
/// exactly its suffix excess many copies of the larger letter in the first
/// row.
pub fn excess_counts_first_row(len_max: usize) -> Result<Check> {
    let order = LinearOrder::standard(2, 0, false);
    let (a, b) = (Letter::Row(1), Letter::Row(2));
    let mut checked = 0u64;
    for len in 0..=len_max {
        for mask in 0u32..(1u32 << len) {
            let w: Vec<Letter> = (0..len)
                .map(|i| if mask >> i & 1 == 1 { b } else { a })
                .collect();
            let out = rsk(&w, &order);
            let first_row_bs = out
                .insertion
                .rows()
                .first()
                .map_or(0, |row| row.iter().filter(|&&l| l == b).count());
            if first_row_bs != suffix_excess(&w, a, b) {
                return Ok(Check::new(
                    "excess-counts-first-row",
                    false,
                    format!("mismatch at {w:?}"),
                ));
            }
            checked += 1;
        }
    }
    Ok(Check::new(
        "excess-counts-first-row",
        true,
        format!("{checked} two-letter words up to length {len_max}"),
    ))
}

/// The bump-order transform never increases the suffix excess: exhaustively
/// over a three-letter alphabet, then on longer random words over five
/// letters.
pub fn restriction_contraction(
    exhaustive_len: usize,
    random_trials: u64,
    seed: u64,
) -> Result<Check> {
    let order3 = LinearOrder::standard(3, 0, false);
    let mut violations = 0u64;
    let mut checked = 0u64;
    for len in 1..=exhaustive_len {
        let total = 3usize.pow(len as u32);
        let bad: u64 = (0..total)
            .into_par_iter()
            .map(|mut code| {
                let w: Vec<Letter> = (0..len)
                    .map(|_| {
                        let r = code % 3;
                        code /= 3;
                        Letter::Row(r + 1)
                    })
                    .collect();
                let mut bad = 0u64;
                for i in 1..3 {
                    let (a, b) = (Letter::Row(i), Letter::Row(i + 1));
                    let restricted = restrict_word(&w, a, b);
                    let d = bump_order_transform(&w, a, b, &order3).expect("adjacent letters");
                    if suffix_excess(&d, a, b) > suffix_excess(&restricted, a, b) {
                        bad += 1;
                    }
                }
                bad
            })
            .sum();
        violations += bad;
        checked += 2 * total as u64;
    }

    let order5 = LinearOrder::standard(5, 0, false);
    let params5 = ThomaParams::new(&[0.3, 0.25, 0.2, 0.15, 0.1], &[], 0.0).unwrap();
    let gen = SeededGenerator::new(seed);
    let random_bad: u64 = (0..random_trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = gen.stream("contraction", t);
            let w = sample_word(&params5, 40, &mut rng);
            let mut bad = 0u64;
            for i in 1..5 {
                let (a, b) = (Letter::Row(i), Letter::Row(i + 1));
                let restricted = restrict_word(&w, a, b);
                let d = bump_order_transform(&w, a, b, &order5).expect("adjacent letters");
                if suffix_excess(&d, a, b) > suffix_excess(&restricted, a, b) {
                    bad += 1;
                }
            }
            bad
        })
        .sum();
    violations += random_bad;
    checked += 4 * random_trials;
    Ok(Check::new(
        "restriction-contraction",
        violations == 0,
        format!("{violations} violations over {checked} word/pair combinations"),
    ))
}

/// The conditional-Gaussian covariance and the direct moment formulas agree
/// entry by entry for every parameter set in the matrix.
pub fn conditional_gaussian_identity(tol: Real) -> Result<Check> {
    let mut worst: Real = 0.0;
    for params in test_matrix() {
        let k = params.alphas().len();
        let l = params.betas().len();
        let a = conditional::conditional_covariance(&params, k, l)?;
        let b = theoretical_covariance(&params, k, l)?;
        for i in 0..k + l {
            for j in 0..k + l {
                worst = worst.max((a[i][j] - b[i][j]).abs());
            }
        }
    }
    Ok(Check::new(
        "conditional-gaussian-identity",
        worst <= tol,
        format!("max entry difference {worst:.3e} (tol {tol:.1e})"),
    ))
}

/// Greene invariants from the brute-force chain search agree with the
/// partial row and column sums of the insertion shape, exhaustively over a
/// four-letter alphabet.
pub fn greene_agreement(len_max: usize) -> Result<Check> {
    let order = LinearOrder::standard(2, 2, false);
    let letters = [
        Letter::Row(1),
        Letter::Row(2),
        Letter::Col(1),
        Letter::Col(2),
    ];
    let mut checked = 0u64;
    for len in 0..=len_max {
        let total = 4usize.pow(len as u32);
        let bad: u64 = (0..total)
            .into_par_iter()
            .map(|mut code| {
                let w: Vec<Letter> = (0..len)
                    .map(|_| {
                        let l = letters[code % 4];
                        code /= 4;
                        l
                    })
                    .collect();
                let shape = rsk(&w, &order).shape();
                let cols = shape.transpose();
                for k in 1..=len.max(1) {
                    if greene_rows(&w, &order, k).expect("within cap") != shape.row_prefix_sum(k) {
                        return 1;
                    }
                    if greene_cols(&w, &order, k).expect("within cap") != cols.row_prefix_sum(k) {
                        return 1;
                    }
                }
                0u64
            })
            .sum();
        if bad > 0 {
            return Ok(Check::new(
                "greene-agreement",
                false,
                format!("{bad} mismatches at length {len}"),
            ));
        }
        checked += total as u64;
    }
    Ok(Check::new(
        "greene-agreement",
        true,
        format!("{checked} words up to length {len_max}, all chain counts"),
    ))
}

/// The insertion algorithm is a bijection: every valid tableau pair of a
/// three-letter alphabet comes from exactly one word, and the pair counts
/// per size add up to the number of words.
pub fn bijection_roundtrip(size_max: usize) -> Result<Check> {
    let order = LinearOrder::standard(2, 1, false);
    let letters = [(Letter::Row(1), 0), (Letter::Row(2), 0), (Letter::Col(1), 0)];
    let mut detail = String::new();
    for n in 0..=size_max {
        let mut pairs = 0u64;
        for shape in partitions_of(n) {
            let supply: Vec<(Letter, usize)> = letters.iter().map(|&(l, _)| (l, n)).collect();
            let fillings = fillings_of_shape(&shape, &supply, &order);
            let recordings = standard_tableaux_of_shape(&shape);
            for filling in &fillings {
                for recording in &recordings {
                    let word = rsk_inverse(filling, recording, &order)?;
                    let out = rsk(&word, &order);
                    if out.insertion != *filling || out.recording != *recording {
                        return Ok(Check::new(
                            "insertion-bijection",
                            false,
                            format!("round trip failed for shape {shape}"),
                        ));
                    }
                    pairs += 1;
                }
            }
        }
        let words = 3u64.pow(n as u32);
        if pairs != words {
            return Ok(Check::new(
                "insertion-bijection",
                false,
                format!("size {n}: {pairs} tableau pairs vs {words} words"),
            ));
        }
        detail = format!("all sizes up to {n}: pair counts match word counts");
    }
    Ok(Check::new("insertion-bijection", true, detail))
}

/// The two worked examples: the insertion pair of the seven-letter word and
/// the restriction/transform of the thirteen-letter word.
pub fn worked_examples() -> Result<Check> {
    let order = LinearOrder::standard(2, 2, false);
    let w = word_from_line("x1 y1 y1 y2 x2 x1 y1")?;
    let out = rsk(&w, &order);
    let expected_r = InsertionTableau::new(
        vec![
            word_from_line("x1 x1 y1")?,
            word_from_line("x2 y2")?,
            word_from_line("y1")?,
            word_from_line("y1")?,
        ],
        &order,
    )?;
    let r_ok = out.insertion == expected_r
        && out.shape() == YoungDiagram::new(vec![3, 2, 1, 1])
        && out.recording.rows() == [vec![1, 2, 4], vec![3, 7], vec![5], vec![6]];
    let inverse_ok = rsk_inverse(&out.insertion, &out.recording, &order)? == w;

    let order3 = LinearOrder::standard(3, 0, false);
    let w2 = word_from_line("x2 x1 x3 x2 x1 x2 x3 x3 x2 x3 x1 x3 x2")?;
    let (a, b) = (Letter::Row(2), Letter::Row(3));
    let restricted = restrict_word(&w2, a, b);
    let restrict_ok = restricted == word_from_line("x2 x3 x2 x2 x3 x3 x2 x3 x3 x2")?;
    let excess_ok = suffix_excess(&restricted, a, b) == 2;
    let transform_ok = bump_order_transform(&w2, a, b, &order3)?
        == word_from_line("x2 x3 x2 x3 x2 x3 x2 x2 x3 x3")?;

    let pass = r_ok && inverse_ok && restrict_ok && excess_ok && transform_ok;
    Ok(Check::new(
        "worked-examples",
        pass,
        format!(
            "insertion pair {r_ok}, inverse {inverse_ok}, restriction {restrict_ok}, \
             excess {excess_ok}, transform {transform_ok}"
        ),
    ))
}

/// Caps for the full verification suite.
#[derive(Debug, Clone, Copy)]
pub struct SuiteConfig {
    pub exhaustive_cap: usize,
    pub trials: u64,
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            exhaustive_cap: 8,
            trials: 10_000,
            seed: 0,
        }
    }
}

/// Runs every verification check with the given caps.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    Ok(vec![
        worked_examples()?,
        order_invariance(4.min(cfg.exhaustive_cap), 1e-10)?,
        greene_agreement(cfg.exhaustive_cap.min(8))?,
        bijection_roundtrip(cfg.exhaustive_cap.min(8))?,
        transpose_duality(50, cfg.trials, cfg.seed)?,
        amalgamation_dominance(50, cfg.trials, 5, cfg.seed)?,
        walk_expectation_bound(1000)?,
        excess_counts_first_row(cfg.exhaustive_cap.min(14).max(10))?,
        restriction_contraction(cfg.exhaustive_cap.min(9), cfg.trials.min(10_000), cfg.seed)?,
        conditional_gaussian_identity(1e-12)?,
    ])
}
