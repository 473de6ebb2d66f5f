//! Random words under the product measure, reproducible generator streams,
//! and the amalgamation of alphabet intervals into a single new row letter.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Poisson};

use crate::alphabet::{Letter, LinearOrder, Segment, Word};
use crate::error::{Error, Result};
use crate::params::ThomaParams;
use crate::Real;

/// Derives independent, reproducible random streams from a 64-bit master
/// seed. Identical `(seed, experiment, trial)` triples produce bit-identical
/// streams on every platform and thread layout.
#[derive(Debug, Clone, Copy)]
pub struct SeededGenerator {
    master: u64,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn mix(x: u64) -> u64 {
    let mut s = x;
    splitmix64(&mut s)
}

fn label_id(label: &str) -> u64 {
    // FNV-1a over the label bytes.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in label.as_bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

impl SeededGenerator {
    pub fn new(master: u64) -> Self {
        Self { master }
    }

    pub fn master(&self) -> u64 {
        self.master
    }

    /// The stream for one trial of one experiment.
    pub fn stream(&self, experiment: &str, trial: u64) -> ChaCha12Rng {
        let mut state = mix(self.master ^ mix(label_id(experiment) ^ mix(trial)));
        let mut seed = [0u8; 32];
        for chunk in seed.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        ChaCha12Rng::from_seed(seed)
    }
}

/// Inverse-transform sampler for single letters: one uniform draw decides
/// both the discrete-versus-continuous split and the value inside `G`.
#[derive(Debug, Clone)]
pub struct LetterSampler {
    alphas: Vec<Real>,
    betas: Vec<Real>,
    gamma: Real,
    discrete_mass: Real,
}

impl LetterSampler {
    pub fn new(params: &ThomaParams) -> Self {
        Self {
            alphas: params.alphas().to_vec(),
            betas: params.betas().to_vec(),
            gamma: params.gamma(),
            discrete_mass: 1.0 - params.gamma(),
        }
    }

    #[inline]
    pub fn sample(&self, rng: &mut impl Rng) -> Letter {
        let mut u: Real = rng.random();
        if u >= self.discrete_mass && self.gamma > 0.0 {
            let v = ((u - self.discrete_mass) / self.gamma).clamp(0.0, 1.0 - Real::EPSILON);
            return Letter::Cont(v);
        }
        for (i, &a) in self.alphas.iter().enumerate() {
            if u < a {
                return Letter::Row(i + 1);
            }
            u -= a;
        }
        for (j, &b) in self.betas.iter().enumerate() {
            if u < b {
                return Letter::Col(j + 1);
            }
            u -= b;
        }
        // Rounding pushed u past every threshold; return the largest letter.
        if self.gamma > 0.0 {
            Letter::Cont(1.0 - Real::EPSILON)
        } else if !self.betas.is_empty() {
            Letter::Col(self.betas.len())
        } else {
            Letter::Row(self.alphas.len())
        }
    }
}

/// Samples `n` independent letters from the single-letter distribution.
pub fn sample_word(params: &ThomaParams, n: usize, rng: &mut impl Rng) -> Word {
    let sampler = LetterSampler::new(params);
    (0..n).map(|_| sampler.sample(rng)).collect()
}

/// Samples a word whose length is Poisson with mean `nu`, letters
/// independent given the length.
pub fn sample_word_poisson(params: &ThomaParams, nu: Real, rng: &mut impl Rng) -> Result<Word> {
    if !(nu > 0.0) {
        return Err(Error::Config(format!("poisson mean {nu} must be positive")));
    }
    let len: f64 = Poisson::new(nu)
        .map_err(|e| Error::Config(format!("poisson mean {nu}: {e}")))?
        .sample(rng);
    Ok(sample_word(params, len as usize, rng))
}

/// An interval of the ordered alphabet to be shrunk to one new row letter.
///
/// Either a contiguous span of whole segments, or an end-slice of `G`
/// (a sub-interval that touches 0 or 1, so the remaining continuous block
/// stays a single interval of the new order).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AmalgamationTarget {
    /// Segment positions `start..=end` of the reference order.
    Segments { start: usize, end: usize },
    /// The value range `[lo, hi)` of `G`, with `lo == 0` or `hi == 1`.
    ContRange { lo: Real, hi: Real },
}

/// How each letter of the old alphabet travels to the new one.
#[derive(Debug, Clone)]
pub struct LetterMap {
    row_to: Vec<Letter>,
    col_to: Vec<Letter>,
    cont: ContMap,
}

#[derive(Debug, Clone, Copy)]
enum ContMap {
    Identity,
    All(Letter),
    /// `[0, upto)` goes to the new letter, the rest rescales to `[0, 1)`.
    Prefix(Real, Letter),
    /// `[from, 1)` goes to the new letter, the rest rescales to `[0, 1)`.
    Suffix(Real, Letter),
}

impl LetterMap {
    pub fn apply(&self, letter: Letter) -> Letter {
        match letter {
            Letter::Row(i) => self.row_to[i - 1],
            Letter::Col(j) => self.col_to[j - 1],
            Letter::Cont(u) => match self.cont {
                ContMap::Identity => letter,
                ContMap::All(z) => z,
                ContMap::Prefix(upto, z) => {
                    if u < upto {
                        z
                    } else {
                        Letter::Cont(((u - upto) / (1.0 - upto)).clamp(0.0, 1.0 - Real::EPSILON))
                    }
                }
                ContMap::Suffix(from, z) => {
                    if u >= from {
                        z
                    } else {
                        Letter::Cont((u / from).clamp(0.0, 1.0 - Real::EPSILON))
                    }
                }
            },
        }
    }
}

/// Maps a word letterwise; length is preserved, realizing the coupling of
/// the two insertion maps on one probability space.
pub fn amalgamate_word(word: &[Letter], map: &LetterMap) -> Word {
    word.iter().map(|&l| map.apply(l)).collect()
}

/// Result of one amalgamation: the new parameters, the new order with the
/// interval replaced by the new letter, the letter map, and the new letter
/// itself (always a row letter carrying the interval's mass).
#[derive(Debug, Clone)]
pub struct Amalgamation {
    pub params: ThomaParams,
    pub order: LinearOrder,
    pub map: LetterMap,
    pub new_letter: Letter,
    pub merged_mass: Real,
}

/// Shrinks an interval of the ordered alphabet to a single new row letter
/// carrying the interval's total mass; all other letters keep their masses
/// and relative order.
pub fn amalgamate(
    params: &ThomaParams,
    order: &LinearOrder,
    target: AmalgamationTarget,
) -> Result<Amalgamation> {
    order.matches_params(params)?;
    let segments = order.segments();
    let (merged_rows, merged_cols, cont_part): (Vec<usize>, Vec<usize>, ContPart) = match target {
        AmalgamationTarget::Segments { start, end } => {
            if start > end || end >= segments.len() {
                return Err(Error::NotAnInterval(format!(
                    "segment span {start}..={end} out of bounds"
                )));
            }
            let mut rows = Vec::new();
            let mut cols = Vec::new();
            let mut cont = ContPart::None;
            for seg in &segments[start..=end] {
                match seg {
                    Segment::Row(i) => rows.push(*i),
                    Segment::Col(j) => cols.push(*j),
                    Segment::Cont => cont = ContPart::Whole,
                }
            }
            (rows, cols, cont)
        }
        AmalgamationTarget::ContRange { lo, hi } => {
            if !(0.0..1.0).contains(&lo) || !(lo < hi && hi <= 1.0) {
                return Err(Error::NotAnInterval(format!(
                    "bad value range [{lo}, {hi})"
                )));
            }
            if lo > 0.0 && hi < 1.0 {
                return Err(Error::NotAnInterval(
                    "an interior slice of G would split the remaining continuous block; \
                     slice from an endpoint"
                        .into(),
                ));
            }
            if params.gamma() == 0.0 {
                return Err(Error::NotAnInterval("no continuous mass to slice".into()));
            }
            let part = if lo == 0.0 && hi == 1.0 {
                ContPart::Whole
            } else if lo == 0.0 {
                ContPart::Prefix(hi)
            } else {
                ContPart::Suffix(lo)
            };
            (Vec::new(), Vec::new(), part)
        }
    };

    let cont_mass = match cont_part {
        ContPart::None => 0.0,
        ContPart::Whole => params.gamma(),
        ContPart::Prefix(upto) => params.gamma() * upto,
        ContPart::Suffix(from) => params.gamma() * (1.0 - from),
    };
    let merged_mass = merged_rows.iter().map(|&i| params.alpha(i)).sum::<Real>()
        + merged_cols.iter().map(|&j| params.beta(j)).sum::<Real>()
        + cont_mass;
    if merged_mass <= 0.0 {
        return Err(Error::NotAnInterval("interval carries no mass".into()));
    }

    // New alpha list: surviving row letters plus the new one, mass-sorted
    // descending with a deterministic tie-break (survivors first, then by
    // old index).
    let mut alpha_entries: Vec<(Real, usize)> = params
        .alphas()
        .iter()
        .enumerate()
        .filter(|(i, _)| !merged_rows.contains(&(i + 1)))
        .map(|(i, &a)| (a, i))
        .collect();
    alpha_entries.push((merged_mass, usize::MAX));
    alpha_entries.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)));

    let new_alphas: Vec<Real> = alpha_entries.iter().map(|&(a, _)| a).collect();
    let mut row_to = vec![Letter::Row(0); params.alphas().len()];
    let mut new_letter = Letter::Row(0);
    for (new_idx, &(_, old_idx)) in alpha_entries.iter().enumerate() {
        if old_idx == usize::MAX {
            new_letter = Letter::Row(new_idx + 1);
        } else {
            row_to[old_idx] = Letter::Row(new_idx + 1);
        }
    }
    for &i in &merged_rows {
        row_to[i - 1] = new_letter;
    }

    let surviving_cols: Vec<usize> = (1..=params.betas().len())
        .filter(|j| !merged_cols.contains(j))
        .collect();
    let new_betas: Vec<Real> = surviving_cols.iter().map(|&j| params.beta(j)).collect();
    let mut col_to = vec![Letter::Row(0); params.betas().len()];
    for (new_idx, &old_j) in surviving_cols.iter().enumerate() {
        col_to[old_j - 1] = Letter::Col(new_idx + 1);
    }
    for &j in &merged_cols {
        col_to[j - 1] = new_letter;
    }

    let (new_gamma, cont_map) = match cont_part {
        ContPart::None => (params.gamma(), ContMap::Identity),
        ContPart::Whole => (0.0, ContMap::All(new_letter)),
        ContPart::Prefix(upto) => (params.gamma() * (1.0 - upto), ContMap::Prefix(upto, new_letter)),
        ContPart::Suffix(from) => (params.gamma() * from, ContMap::Suffix(from, new_letter)),
    };

    let new_params = ThomaParams::new(&new_alphas, &new_betas, new_gamma)?;

    // Rebuild the order: the merged span collapses to the new letter at its
    // position; everything else is renamed in place.
    let mut new_segments: Vec<Segment> = Vec::with_capacity(segments.len());
    let mut placed = false;
    let new_z_seg = match new_letter {
        Letter::Row(i) => Segment::Row(i),
        _ => unreachable!("the new letter is a row letter"),
    };
    for (pos, seg) in segments.iter().enumerate() {
        let in_span = match target {
            AmalgamationTarget::Segments { start, end } => pos >= start && pos <= end,
            AmalgamationTarget::ContRange { .. } => false,
        };
        if in_span {
            if !placed {
                new_segments.push(new_z_seg);
                placed = true;
            }
            continue;
        }
        match seg {
            Segment::Row(i) => match row_to[i - 1] {
                Letter::Row(k) => new_segments.push(Segment::Row(k)),
                _ => unreachable!(),
            },
            Segment::Col(j) => match col_to[j - 1] {
                Letter::Col(k) => new_segments.push(Segment::Col(k)),
                // A column letter merged through a value range cannot occur.
                _ => unreachable!(),
            },
            Segment::Cont => match cont_map {
                ContMap::Identity => new_segments.push(Segment::Cont),
                ContMap::All(_) => {
                    if !matches!(target, AmalgamationTarget::Segments { .. }) {
                        new_segments.push(new_z_seg);
                    }
                    // Whole G inside a segment span: z was placed already.
                }
                ContMap::Prefix(..) => {
                    new_segments.push(new_z_seg);
                    new_segments.push(Segment::Cont);
                }
                ContMap::Suffix(..) => {
                    new_segments.push(Segment::Cont);
                    new_segments.push(new_z_seg);
                }
            },
        }
    }
    let new_order = LinearOrder::new(new_segments)?;
    new_order.matches_params(&new_params)?;

    Ok(Amalgamation {
        params: new_params,
        order: new_order,
        map: LetterMap {
            row_to,
            col_to,
            cont: cont_map,
        },
        new_letter,
        merged_mass,
    })
}

#[derive(Debug, Clone, Copy)]
enum ContPart {
    None,
    Whole,
    Prefix(Real),
    Suffix(Real),
}

/// A sequence of amalgamations reducing a parameter set with continuous
/// mass (and possibly many discrete masses) to a finite, all-discrete one
/// whose `K` largest alphas are untouched and whose parameters are pairwise
/// distinct.
#[derive(Debug, Clone)]
pub struct Reduction {
    pub stages: Vec<Amalgamation>,
    pub params: ThomaParams,
    pub order: LinearOrder,
}

impl Reduction {
    /// Applies every stage's letter map in sequence.
    pub fn map_word(&self, word: &[Letter]) -> Word {
        let mut w: Word = word.to_vec();
        for stage in &self.stages {
            w = amalgamate_word(&w, &stage.map);
        }
        w
    }
}

/// Builds the reduction: merge an alpha tail keeping the top `K` masses,
/// then a beta tail, then slice `G` into unequal pieces, always choosing the
/// smallest valid cut points. Requires strictly monotone input parameters.
pub fn reduce_to_finite(params: &ThomaParams, k: usize) -> Result<Reduction> {
    if !params.strictly_monotone() {
        return Err(Error::Monotonicity(
            "the reduction requires pairwise distinct alphas and betas".into(),
        ));
    }
    if k == 0 || k > params.alphas().len() {
        return Err(Error::Config(format!(
            "K = {k} must be within 1..={}",
            params.alphas().len()
        )));
    }
    let mut stages: Vec<Amalgamation> = Vec::new();
    let mut cur_params = params.clone();
    let mut cur_order = LinearOrder::for_params(params);

    let apply = |target: AmalgamationTarget,
                     cur_params: &mut ThomaParams,
                     cur_order: &mut LinearOrder,
                     stages: &mut Vec<Amalgamation>|
     -> Result<()> {
        let stage = amalgamate(cur_params, cur_order, target)?;
        *cur_params = stage.params.clone();
        *cur_order = stage.order.clone();
        stages.push(stage);
        Ok(())
    };

    // Alpha tail: smallest l ≥ K whose tail mass is below the K-th mass and
    // collides with no retained mass. The empty tail (l = length) always
    // qualifies, so the search cannot fail; a tail of fewer than two letters
    // changes nothing and is skipped.
    let alphas = cur_params.alphas().to_vec();
    let alpha_k = alphas[k - 1];
    let mut chosen_l = None;
    for l in k..=alphas.len() {
        let tail: Real = alphas[l..].iter().sum();
        if tail < alpha_k && alphas.iter().all(|&a| a != tail) {
            chosen_l = Some(l);
            break;
        }
    }
    // The empty tail always qualifies (zero mass is below α_K and collides
    // with nothing), so for a finite stored list the search cannot fail and
    // the two-block variant of the recipe is never needed.
    let l = chosen_l
        .ok_or_else(|| Error::Reduction("no valid alpha tail cut point found".into()))?;
    let alpha_len = cur_params.alphas().len();
    if alpha_len - l >= 2 {
        let start = cur_order
            .segments()
            .iter()
            .position(|s| *s == Segment::Row(l + 1))
            .unwrap();
        apply(
            AmalgamationTarget::Segments {
                start,
                end: start + (alpha_len - l) - 1,
            },
            &mut cur_params,
            &mut cur_order,
            &mut stages,
        )?;
    }

    // Beta tail: smallest cut whose tail mass is below every current alpha.
    let alpha_min = cur_params
        .alphas()
        .last()
        .copied()
        .expect("at least K alphas");
    let betas = cur_params.betas().to_vec();
    if !betas.is_empty() {
        let mut chosen = None;
        for l2 in 0..=betas.len() {
            let tail: Real = betas[l2..].iter().sum();
            if tail < alpha_min {
                chosen = Some(l2);
                break;
            }
        }
        let l2 = chosen.ok_or_else(|| {
            Error::Reduction("beta tail mass never drops below the alpha floor".into())
        })?;
        // Even a single-letter beta tail is a real change: the letter moves
        // from the downward-tie class to the upward-tie class.
        if betas.len() - l2 >= 1 {
            let first = Segment::Col(l2 + 1);
            let start = cur_order
                .segments()
                .iter()
                .position(|s| *s == first)
                .unwrap();
            apply(
                AmalgamationTarget::Segments {
                    start,
                    end: start + (betas.len() - l2) - 1,
                },
                &mut cur_params,
                &mut cur_order,
                &mut stages,
            )?;
        }
    }

    // Slice G into m unequal pieces: decreasing offsets summing to zero,
    // every piece positive and below the current smallest alpha.
    if cur_params.gamma() > 0.0 {
        let gamma = cur_params.gamma();
        let bound = cur_params.alphas().last().copied().unwrap();
        let mut chosen_m = None;
        for m in 1..=64 {
            if gamma / (m as Real) < bound {
                chosen_m = Some(m);
                break;
            }
        }
        let m = chosen_m
            .ok_or_else(|| Error::Reduction("cannot slice G below the alpha floor".into()))?;
        let mean = gamma / m as Real;
        let pieces: Vec<Real> = if m == 1 {
            vec![gamma]
        } else {
            let room = (bound - mean).min(mean);
            let eps = room / (m as Real);
            (1..=m)
                .map(|i| mean + ((m as Real + 1.0) / 2.0 - i as Real) * eps)
                .collect()
        };
        let mut remaining = gamma;
        for (idx, &piece) in pieces.iter().enumerate() {
            let hi = if idx + 1 == pieces.len() {
                1.0
            } else {
                piece / remaining
            };
            apply(
                AmalgamationTarget::ContRange { lo: 0.0, hi },
                &mut cur_params,
                &mut cur_order,
                &mut stages,
            )?;
            remaining -= piece;
        }
    }

    if !cur_params.strictly_monotone() {
        return Err(Error::Reduction(
            "reduced parameters are not strictly monotone".into(),
        ));
    }
    for i in 0..k {
        if cur_params.alphas()[i] != params.alphas()[i] {
            return Err(Error::Reduction(format!(
                "reduction moved alpha {} from {} to {}",
                i + 1,
                params.alphas()[i],
                cur_params.alphas()[i]
            )));
        }
    }

    Ok(Reduction {
        stages,
        params: cur_params,
        order: cur_order,
    })
}
