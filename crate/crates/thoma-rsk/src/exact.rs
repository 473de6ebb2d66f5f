//! Exact finite-size measures on Young diagrams via the specialization of
//! symmetric functions, plus the counting and enumeration oracles used to
//! cross-check the samplers.
//!
//! The specialization sends the generating function of the complete
//! homogeneous functions to `e^{γz} ∏ (1+β_j z) / (1−α_i z)`; Schur values
//! come from the Jacobi–Trudi determinant, and the measure of a diagram of
//! size `n` is the Schur value times the diagram dimension.

use std::collections::BTreeMap;

use crate::alphabet::{Letter, LetterCounts, LinearOrder};
use crate::diagram::{partitions_of, YoungDiagram};
use crate::error::{Error, Result};
use crate::params::ThomaParams;
use crate::rsk::rsk;
use crate::series::{neumaier_sum, Accumulator};
use crate::tableau::fillings_of_shape;
use crate::{Real, Series, EXACT_SIZE_CAP, TABLEAU_COUNT_CAP};

/// Word length cap for the exhaustive enumeration oracles.
pub const ENUMERATION_CAP: usize = 8;

/// The specialized generating-function series through degree `deg`.
pub fn h_series(params: &ThomaParams, deg: usize) -> Series {
    let mut h = if params.gamma() > 0.0 {
        Series::exp_linear(params.gamma(), deg)
    } else {
        Series::one(deg)
    };
    for &a in params.alphas() {
        h = h.mul(&Series::geometric(a, deg));
    }
    for &b in params.betas() {
        h = h.mul(&Series::linear(b, deg));
    }
    h
}

/// Specialization of the complete homogeneous function of degree `n`.
pub fn specialize_h(params: &ThomaParams, n: usize) -> Real {
    h_series(params, n).coeff(n)
}

/// Specialization of the Schur function of `shape` via the Jacobi–Trudi
/// determinant; equals the probability that a uniform independent filling
/// of the shape is a valid insertion tableau.
pub fn specialize_schur(params: &ThomaParams, shape: &YoungDiagram) -> Real {
    let rows = shape.rows();
    if rows == 0 {
        return 1.0;
    }
    let deg = shape.row(1) + rows;
    let h = h_series(params, deg);
    let entry = |i: usize, j: usize| -> Real {
        let idx = shape.row(i + 1) as isize - (i as isize) + (j as isize);
        if idx < 0 {
            0.0
        } else {
            h.coeff(idx as usize)
        }
    };
    let mut m: Vec<Vec<Real>> = (0..rows)
        .map(|i| (0..rows).map(|j| entry(i, j)).collect())
        .collect();
    determinant(&mut m)
}

/// Determinant by LU elimination with partial pivoting.
fn determinant(m: &mut [Vec<Real>]) -> Real {
    let n = m.len();
    let mut det = 1.0;
    for k in 0..n {
        let pivot = (k..n)
            .max_by(|&a, &b| m[a][k].abs().total_cmp(&m[b][k].abs()))
            .unwrap();
        if m[pivot][k] == 0.0 {
            return 0.0;
        }
        if pivot != k {
            m.swap(pivot, k);
            det = -det;
        }
        det *= m[k][k];
        for i in k + 1..n {
            let f = m[i][k] / m[k][k];
            for j in k..n {
                let sub = f * m[k][j];
                m[i][j] -= sub;
            }
        }
    }
    det
}

/// Number of standard tableaux of `shape`, by the hook-length formula.
pub fn dim_hook(shape: &YoungDiagram) -> u128 {
    let n = shape.size();
    if n == 0 {
        return 1;
    }
    assert!(n <= 33, "hook-length factorial overflows u128 beyond 33");
    let transpose = shape.transpose();
    let mut hooks: u128 = 1;
    for r in 0..shape.rows() {
        for c in 0..shape.row(r + 1) {
            let arm = shape.row(r + 1) - (c + 1);
            let leg = transpose.row(c + 1) - (r + 1);
            hooks *= (arm + leg + 1) as u128;
        }
    }
    let factorial: u128 = (1..=n as u128).product();
    factorial / hooks
}

/// Number of standard tableaux by the growth recursion — the independent
/// oracle for [`dim_hook`].
pub fn dim_recursive(shape: &YoungDiagram) -> u128 {
    fn rec(shape: &YoungDiagram, memo: &mut BTreeMap<YoungDiagram, u128>) -> u128 {
        if shape.size() <= 1 {
            return 1;
        }
        if let Some(&d) = memo.get(shape) {
            return d;
        }
        let d = shape.shrink().iter().map(|mu| rec(mu, memo)).sum();
        memo.insert(shape.clone(), d);
        d
    }
    rec(shape, &mut BTreeMap::new())
}

/// The exact measure on diagrams of a fixed size: a finite probability
/// table. Tiny negative Schur values from roundoff are clipped to zero.
#[derive(Debug, Clone)]
pub struct ExactMeasure {
    n: usize,
    table: BTreeMap<YoungDiagram, Real>,
}

impl ExactMeasure {
    pub fn size(&self) -> usize {
        self.n
    }

    pub fn probability(&self, shape: &YoungDiagram) -> Real {
        self.table.get(shape).copied().unwrap_or(0.0)
    }

    pub fn total_mass(&self) -> Real {
        neumaier_sum(self.table.values().copied())
    }

    /// Entries in reverse-lexicographic order of the diagram.
    pub fn iter(&self) -> impl Iterator<Item = (&YoungDiagram, Real)> {
        self.table.iter().rev().map(|(d, &p)| (d, p))
    }

    /// CSV rows `partition;probability`, one per diagram carrying mass.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("partition;probability\n");
        for (shape, p) in self.iter() {
            if p > 0.0 {
                out.push_str(&format!("{};{}\n", shape.label(), fmt_sig(p, 12)));
            }
        }
        out
    }
}

/// Formats with at most `sig` significant digits, shortest form.
pub fn fmt_sig(x: Real, sig: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let rounded: Real = format!("{x:.*e}", sig - 1).parse().expect("valid float");
    format!("{rounded}")
}

/// The exact measure over all diagrams with `n` boxes.
pub fn measure(params: &ThomaParams, n: usize) -> Result<ExactMeasure> {
    if n > EXACT_SIZE_CAP {
        return Err(Error::CapExceeded {
            what: "exact measure size",
            got: n,
            cap: EXACT_SIZE_CAP,
        });
    }
    let mut table = BTreeMap::new();
    for shape in partitions_of(n) {
        let p = specialize_schur(params, &shape) * dim_hook(&shape) as Real;
        if p < -1e-12 {
            return Err(Error::InvalidParams(format!(
                "negative probability {p} at {shape}"
            )));
        }
        table.insert(shape, p.max(0.0));
    }
    Ok(ExactMeasure { n, table })
}

/// Largest violation of the coherency relation between sizes `n` and `n+1`:
/// the measure of a diagram must equal the dimension-weighted sum over its
/// one-box extensions.
pub fn coherency_residual(params: &ThomaParams, n: usize) -> Result<Real> {
    let m_n = measure(params, n)?;
    let m_next = measure(params, n + 1)?;
    let mut worst: Real = 0.0;
    for shape in partitions_of(n) {
        let dim_mu = dim_hook(&shape) as Real;
        let mut acc = Accumulator::<Real>::new();
        for lambda in shape.grow() {
            acc.add(m_next.probability(&lambda) * dim_mu / dim_hook(&lambda) as Real);
        }
        worst = worst.max((m_n.probability(&shape) - acc.finish()).abs());
    }
    Ok(worst)
}

/// Weight of one diagram under the Poisson mixture of the exact measures.
pub fn poisson_weight(params: &ThomaParams, nu: Real, shape: &YoungDiagram) -> Result<Real> {
    let n = shape.size();
    if n > EXACT_SIZE_CAP {
        return Err(Error::CapExceeded {
            what: "poissonized diagram size",
            got: n,
            cap: EXACT_SIZE_CAP,
        });
    }
    let factorial: Real = (1..=n).map(|k| k as Real).product();
    let m_n = measure(params, n)?;
    Ok((-nu).exp() * nu.powi(n as i32) / factorial * m_n.probability(shape))
}

/// Mass the Poisson mixture places beyond diagram size `cap`:
/// the tail of the Poisson length distribution.
pub fn poisson_tail_mass(nu: Real, cap: usize) -> Real {
    let mut term = (-nu).exp();
    let mut head = term;
    for k in 1..=cap {
        term *= nu / k as Real;
        head += term;
    }
    (1.0 - head).max(0.0)
}

/// Counts the insertion-tableau fillings of `shape` with prescribed type:
/// `counts.rows[i]` copies of each row letter, `counts.cols[j]` of each
/// column letter, and `counts.cont` pairwise distinct continuous letters in
/// a fixed relative order. The count does not depend on the choice of order.
pub fn count_tableaux_of_type(
    shape: &YoungDiagram,
    counts: &LetterCounts,
    order: &LinearOrder,
) -> Result<usize> {
    if counts.total() > TABLEAU_COUNT_CAP {
        return Err(Error::CapExceeded {
            what: "tableau filling size",
            got: counts.total(),
            cap: TABLEAU_COUNT_CAP,
        });
    }
    if counts.total() != shape.size() {
        return Ok(0);
    }
    let mut supply: Vec<(Letter, usize)> = Vec::new();
    for (i, &c) in counts.rows.iter().enumerate() {
        if c > 0 {
            supply.push((Letter::Row(i + 1), c));
        }
    }
    for (j, &c) in counts.cols.iter().enumerate() {
        if c > 0 {
            supply.push((Letter::Col(j + 1), c));
        }
    }
    for k in 0..counts.cont {
        supply.push((Letter::Cont((k + 1) as Real / (counts.cont + 1) as Real), 1));
    }
    Ok(fillings_of_shape(shape, &supply, order).len())
}

/// Visits every word of length `n` with its probability weight under the
/// product measure. Continuous letters are integrated analytically: only
/// their relative order matters, and each of the `m!` orderings of `m`
/// continuous positions carries weight `γ^m / m!`.
pub fn for_each_weighted_word(
    params: &ThomaParams,
    n: usize,
    mut visit: impl FnMut(&[Letter], Real),
) -> Result<()> {
    if n > ENUMERATION_CAP {
        return Err(Error::CapExceeded {
            what: "enumeration word length",
            got: n,
            cap: ENUMERATION_CAP,
        });
    }
    // A pattern fixes the discrete letters and marks continuous slots.
    let mut pattern: Vec<Option<Letter>> = vec![None; n];
    let mut word: Vec<Letter> = vec![Letter::Row(1); n];

    fn assign_slots(
        pattern: &[Option<Letter>],
        slots: &[usize],
        ranks: &mut Vec<usize>,
        used: &mut [bool],
        word: &mut [Letter],
        weight: Real,
        visit: &mut impl FnMut(&[Letter], Real),
    ) {
        let m = slots.len();
        if ranks.len() == m {
            for (k, &pos) in slots.iter().enumerate() {
                word[pos] = Letter::Cont((ranks[k] + 1) as Real / (m + 1) as Real);
            }
            visit(word, weight);
            return;
        }
        for r in 0..m {
            if !used[r] {
                used[r] = true;
                ranks.push(r);
                assign_slots(pattern, slots, ranks, used, word, weight, visit);
                ranks.pop();
                used[r] = false;
            }
        }
    }

    fn rec(
        params: &ThomaParams,
        pos: usize,
        weight: Real,
        pattern: &mut Vec<Option<Letter>>,
        word: &mut Vec<Letter>,
        visit: &mut impl FnMut(&[Letter], Real),
    ) {
        let n = pattern.len();
        if pos == n {
            let slots: Vec<usize> = (0..n).filter(|&p| pattern[p].is_none()).collect();
            for (p, entry) in pattern.iter().enumerate() {
                if let Some(l) = entry {
                    word[p] = *l;
                }
            }
            let m = slots.len();
            if m == 0 {
                visit(word, weight);
            } else {
                let m_factorial: Real = (1..=m).map(|k| k as Real).product();
                let w = weight * params.gamma().powi(m as i32) / m_factorial;
                let mut ranks = Vec::with_capacity(m);
                let mut used = vec![false; m];
                assign_slots(pattern, &slots, &mut ranks, &mut used, word, w, visit);
            }
            return;
        }
        for i in 1..=params.alphas().len() {
            pattern[pos] = Some(Letter::Row(i));
            rec(params, pos + 1, weight * params.alpha(i), pattern, word, visit);
        }
        for j in 1..=params.betas().len() {
            pattern[pos] = Some(Letter::Col(j));
            rec(params, pos + 1, weight * params.beta(j), pattern, word, visit);
        }
        if params.gamma() > 0.0 {
            pattern[pos] = None;
            rec(params, pos + 1, weight, pattern, word, visit);
        }
    }

    rec(params, 0, 1.0, &mut pattern, &mut word, &mut visit);
    Ok(())
}

/// Pushes the exhaustive word enumeration through the insertion map:
/// the distribution of shapes, the independent oracle for [`measure`].
pub fn measure_by_enumeration(
    params: &ThomaParams,
    n: usize,
    order: &LinearOrder,
) -> Result<BTreeMap<YoungDiagram, Real>> {
    let mut table: BTreeMap<YoungDiagram, Real> = BTreeMap::new();
    for_each_weighted_word(params, n, |word, weight| {
        *table.entry(rsk(word, order).shape()).or_insert(0.0) += weight;
    })?;
    Ok(table)
}

/// Joint distribution of the shape and the insertion-tableau type, by
/// exhaustive enumeration. Used to check that the joint law does not depend
/// on the choice of order.
pub fn shape_type_distribution(
    params: &ThomaParams,
    n: usize,
    order: &LinearOrder,
) -> Result<BTreeMap<(YoungDiagram, LetterCounts), Real>> {
    let mut table: BTreeMap<(YoungDiagram, LetterCounts), Real> = BTreeMap::new();
    for_each_weighted_word(params, n, |word, weight| {
        let out = rsk(word, order);
        let ty = out.insertion.type_counts(params);
        *table.entry((out.shape(), ty)).or_insert(0.0) += weight;
    })?;
    Ok(table)
}

/// Largest pointwise difference between two distributions over arbitrary
/// keys (missing keys count as zero).
pub fn distribution_distance<K: Ord + Clone>(
    a: &BTreeMap<K, Real>,
    b: &BTreeMap<K, Real>,
) -> Real {
    let mut worst: Real = 0.0;
    for key in a.keys().chain(b.keys()) {
        let pa = a.get(key).copied().unwrap_or(0.0);
        let pb = b.get(key).copied().unwrap_or(0.0);
        worst = worst.max((pa - pb).abs());
    }
    worst
}
