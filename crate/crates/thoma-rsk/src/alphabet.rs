//! Letters, words, and linear orders on the mixed alphabet.
//!
//! Discrete letters come in two classes: row letters `x_i` (tie-breaking
//! upward: `x ↗ x`) and column letters `y_j` (tie-breaking downward:
//! `y ↘ y`). The continuous block `G` is identified with `[0, 1)` carrying
//! uniform mass; its points compare by value and tie-break downward.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ThomaParams;
use crate::Real;

/// A letter of the alphabet `A = L_e ∪ L_o ∪ G`. Indices are 1-based.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Letter {
    /// `x_i ∈ L_e`.
    Row(usize),
    /// `y_j ∈ L_o`.
    Col(usize),
    /// A point of `G`, with value in `[0, 1)`.
    Cont(Real),
}

impl Letter {
    /// Whether equal copies of this letter bump each other during insertion
    /// (true for the `L_o ∪ G` tie class).
    pub fn ties_downward(self) -> bool {
        !matches!(self, Letter::Row(_))
    }

    pub fn is_valid_for(self, params: &ThomaParams) -> bool {
        match self {
            Letter::Row(i) => i >= 1 && i <= params.alphas().len(),
            Letter::Col(j) => j >= 1 && j <= params.betas().len(),
            Letter::Cont(u) => (0.0..1.0).contains(&u) && params.gamma() > 0.0,
        }
    }

    /// Token form: `x3`, `y1`, or `g<value>`. Continuous values print in
    /// the shortest decimal form that parses back to the same bits.
    pub fn token(self) -> String {
        match self {
            Letter::Row(i) => format!("x{i}"),
            Letter::Col(j) => format!("y{j}"),
            Letter::Cont(u) => format!("g{u}"),
        }
    }

    pub fn parse_token(tok: &str) -> Result<Self> {
        let err = || Error::Parse(format!("bad letter token {tok:?}"));
        let (head, rest) = tok.split_at(tok.len().min(1));
        match head {
            "x" => rest.parse().map(Letter::Row).map_err(|_| err()),
            "y" => rest.parse().map(Letter::Col).map_err(|_| err()),
            "g" => {
                let u: Real = rest.parse().map_err(|_| err())?;
                if (0.0..1.0).contains(&u) {
                    Ok(Letter::Cont(u))
                } else {
                    Err(err())
                }
            }
            _ => Err(err()),
        }
    }
}

impl std::fmt::Display for Letter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Letter::Row(i) => write!(f, "x{i}"),
            Letter::Col(j) => write!(f, "y{j}"),
            Letter::Cont(u) => write!(f, "g{u:.3}"),
        }
    }
}

/// A finite sequence of letters.
pub type Word = Vec<Letter>;

/// Renders a word in the space-separated token line format.
pub fn word_to_line(word: &[Letter]) -> String {
    word.iter()
        .map(|l| l.token())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Parses the space-separated token line format.
pub fn word_from_line(line: &str) -> Result<Word> {
    line.split_whitespace().map(Letter::parse_token).collect()
}

/// Outcome of comparing two letters: exactly one of the two relations holds
/// for every pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    /// `a ↗ b`: `a < b`, or `a = b ∈ L_e`.
    Rises,
    /// `a ↘ b`: `a > b`, or `a = b ∈ L_o ∪ G`.
    Falls,
}

/// One segment of an ordered alphabet: a single discrete letter or the whole
/// continuous block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Segment {
    Row(usize),
    Col(usize),
    Cont,
}

/// Comparison key of a letter under a fixed order: segment rank, then the
/// value inside `G`. `tie_falls` records the letter's tie class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderKey {
    pub seg: u32,
    pub val: Real,
    pub tie_falls: bool,
}

impl OrderKey {
    #[inline]
    fn pos(self) -> (u32, Real) {
        (self.seg, self.val)
    }

    /// Whether an entry with this key is displaced by an arriving letter
    /// with key `x` (the arriving letter takes its place).
    #[inline]
    pub fn bumped_by(self, x: OrderKey) -> bool {
        self.pos() > x.pos() || (self.pos() == x.pos() && x.tie_falls)
    }

    /// `self ↘ u`: strictly above `u`, or tied with downward ties. Keys at
    /// the same position always share the tie class.
    #[inline]
    pub fn falls_to(self, u: OrderKey) -> bool {
        self.pos() > u.pos() || (self.pos() == u.pos() && self.tie_falls)
    }
}

/// A total order on the alphabet in which `G`, when present, forms a single
/// contiguous segment.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearOrder {
    segments: Vec<Segment>,
    row_rank: Vec<u32>,
    col_rank: Vec<u32>,
    cont_rank: Option<u32>,
}

impl LinearOrder {
    /// Builds an order from an explicit segment list. Each discrete letter
    /// must appear exactly once and `G` at most once.
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        let rows = segments
            .iter()
            .filter_map(|s| match s {
                Segment::Row(i) => Some(*i),
                _ => None,
            })
            .collect::<Vec<_>>();
        let cols = segments
            .iter()
            .filter_map(|s| match s {
                Segment::Col(j) => Some(*j),
                _ => None,
            })
            .collect::<Vec<_>>();
        let conts = segments.iter().filter(|s| matches!(s, Segment::Cont)).count();
        let mut sorted_rows = rows.clone();
        sorted_rows.sort_unstable();
        if sorted_rows != (1..=rows.len()).collect::<Vec<_>>() {
            return Err(Error::InvalidOrder(
                "row letters must be exactly x1..xK, each once".into(),
            ));
        }
        let mut sorted_cols = cols.clone();
        sorted_cols.sort_unstable();
        if sorted_cols != (1..=cols.len()).collect::<Vec<_>>() {
            return Err(Error::InvalidOrder(
                "column letters must be exactly y1..yL, each once".into(),
            ));
        }
        if conts > 1 {
            return Err(Error::InvalidOrder("G may appear at most once".into()));
        }
        let mut row_rank = vec![0u32; rows.len()];
        let mut col_rank = vec![0u32; cols.len()];
        let mut cont_rank = None;
        for (r, seg) in segments.iter().enumerate() {
            match seg {
                Segment::Row(i) => row_rank[i - 1] = r as u32,
                Segment::Col(j) => col_rank[j - 1] = r as u32,
                Segment::Cont => cont_rank = Some(r as u32),
            }
        }
        Ok(Self {
            segments,
            row_rank,
            col_rank,
            cont_rank,
        })
    }

    /// The default order: `x1 < x2 < … < y1 < y2 < … < G`.
    pub fn standard(num_rows: usize, num_cols: usize, with_cont: bool) -> Self {
        let mut segments = Vec::with_capacity(num_rows + num_cols + 1);
        segments.extend((1..=num_rows).map(Segment::Row));
        segments.extend((1..=num_cols).map(Segment::Col));
        if with_cont {
            segments.push(Segment::Cont);
        }
        Self::new(segments).expect("standard order is valid")
    }

    /// The default order for a parameter set.
    pub fn for_params(params: &ThomaParams) -> Self {
        Self::standard(
            params.alphas().len(),
            params.betas().len(),
            params.gamma() > 0.0,
        )
    }

    /// The same alphabet ordered in reverse.
    pub fn reversed(&self) -> Self {
        let mut segments = self.segments.clone();
        segments.reverse();
        Self::new(segments).expect("reversal preserves validity")
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Checks that this order covers exactly the alphabet of `params`.
    pub fn matches_params(&self, params: &ThomaParams) -> Result<()> {
        if self.row_rank.len() != params.alphas().len()
            || self.col_rank.len() != params.betas().len()
        {
            return Err(Error::InvalidOrder(format!(
                "order covers {} row and {} column letters, parameters have {} and {}",
                self.row_rank.len(),
                self.col_rank.len(),
                params.alphas().len(),
                params.betas().len()
            )));
        }
        if params.gamma() > 0.0 && self.cont_rank.is_none() {
            return Err(Error::InvalidOrder(
                "parameters carry continuous mass but the order has no G segment".into(),
            ));
        }
        Ok(())
    }

    /// Comparison key of a letter. Panics if the letter is outside the
    /// order's alphabet.
    #[inline]
    pub fn key(&self, letter: Letter) -> OrderKey {
        match letter {
            Letter::Row(i) => OrderKey {
                seg: self.row_rank[i - 1],
                val: 0.0,
                tie_falls: false,
            },
            Letter::Col(j) => OrderKey {
                seg: self.col_rank[j - 1],
                val: 0.0,
                tie_falls: true,
            },
            Letter::Cont(u) => OrderKey {
                seg: self.cont_rank.expect("order has a G segment"),
                val: u,
                tie_falls: true,
            },
        }
    }

    /// The relation holding between `a` and `b`; exhaustive and exclusive.
    pub fn relation(&self, a: Letter, b: Letter) -> Relation {
        let (ka, kb) = (self.key(a), self.key(b));
        if ka.pos() < kb.pos() {
            Relation::Rises
        } else if ka.pos() > kb.pos() {
            Relation::Falls
        } else if ka.tie_falls {
            Relation::Falls
        } else {
            Relation::Rises
        }
    }

    pub fn rises(&self, a: Letter, b: Letter) -> bool {
        self.relation(a, b) == Relation::Rises
    }

    /// Token form, e.g. `x1<x2<y1<G`.
    pub fn to_token_string(&self) -> String {
        self.segments
            .iter()
            .map(|s| match s {
                Segment::Row(i) => format!("x{i}"),
                Segment::Col(j) => format!("y{j}"),
                Segment::Cont => "G".to_string(),
            })
            .collect::<Vec<_>>()
            .join("<")
    }

    /// Parses the `<`-separated token form.
    pub fn parse(text: &str) -> Result<Self> {
        let mut segments = Vec::new();
        for tok in text.split('<').map(str::trim).filter(|t| !t.is_empty()) {
            if tok == "G" {
                segments.push(Segment::Cont);
            } else {
                match Letter::parse_token(tok)? {
                    Letter::Row(i) => segments.push(Segment::Row(i)),
                    Letter::Col(j) => segments.push(Segment::Col(j)),
                    Letter::Cont(_) => {
                        return Err(Error::Parse(format!(
                            "continuous letters cannot appear in an order: {tok:?}"
                        )))
                    }
                }
            }
        }
        Self::new(segments)
    }
}

/// Letter counts of a word or tableau: `N_{x_i}` per row letter, `N_{y_j}`
/// per column letter, and the number `m` of continuous letters.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LetterCounts {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub cont: usize,
}

impl LetterCounts {
    pub fn total(&self) -> usize {
        self.rows.iter().sum::<usize>() + self.cols.iter().sum::<usize>() + self.cont
    }
}

/// Counts each letter of `word` under the alphabet of `params`.
pub fn letter_counts(word: &[Letter], params: &ThomaParams) -> LetterCounts {
    let mut counts = LetterCounts {
        rows: vec![0; params.alphas().len()],
        cols: vec![0; params.betas().len()],
        cont: 0,
    };
    for &letter in word {
        match letter {
            Letter::Row(i) => counts.rows[i - 1] += 1,
            Letter::Col(j) => counts.cols[j - 1] += 1,
            Letter::Cont(_) => counts.cont += 1,
        }
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;

    fn paper_order() -> LinearOrder {
        // x1 < x2 < y1 < y2
        LinearOrder::standard(2, 2, false)
    }

    #[test]
    fn strict_inequality_rises() {
        let p = paper_order();
        assert_eq!(p.relation(Letter::Row(1), Letter::Row(2)), Relation::Rises);
        assert_eq!(p.relation(Letter::Row(2), Letter::Row(1)), Relation::Falls);
    }

    #[test]
    fn equal_row_letter_rises() {
        let p = paper_order();
        assert_eq!(p.relation(Letter::Row(1), Letter::Row(1)), Relation::Rises);
    }

    #[test]
    fn equal_col_letter_falls() {
        let p = paper_order();
        assert_eq!(p.relation(Letter::Col(1), Letter::Col(1)), Relation::Falls);
    }

    #[test]
    fn equal_cont_letter_falls() {
        let p = LinearOrder::standard(1, 0, true);
        let g = Letter::Cont(0.5);
        assert_eq!(p.relation(g, g), Relation::Falls);
    }

    #[test]
    fn cont_letters_compare_by_value() {
        let p = LinearOrder::standard(0, 0, true);
        assert_eq!(
            p.relation(Letter::Cont(0.2), Letter::Cont(0.7)),
            Relation::Rises
        );
        assert_eq!(
            p.relation(Letter::Cont(0.7), Letter::Cont(0.2)),
            Relation::Falls
        );
    }

    #[test]
    fn relation_is_an_exhaustive_dichotomy() {
        let p = LinearOrder::standard(2, 2, true);
        let mut letters = vec![
            Letter::Row(1),
            Letter::Row(2),
            Letter::Col(1),
            Letter::Col(2),
        ];
        letters.extend([0.0, 0.25, 0.5, 0.999].map(Letter::Cont));
        for &a in &letters {
            for &b in &letters {
                let ab = p.relation(a, b);
                let ba = p.relation(b, a);
                // Distinct letters: opposite relations. Equal letters: the
                // relation is the same in both directions, fixed by class.
                if ab == ba {
                    assert_eq!(p.key(a).pos(), p.key(b).pos());
                } else {
                    assert_ne!(ab, ba);
                }
            }
        }
    }

    #[test]
    fn counts_of_the_worked_example_word() {
        let params = ThomaParams::new(&[0.3, 0.2], &[0.3, 0.2], 0.0).unwrap();
        let w = vec![
            Letter::Row(1),
            Letter::Col(1),
            Letter::Col(1),
            Letter::Col(2),
            Letter::Row(2),
            Letter::Row(1),
            Letter::Col(1),
        ];
        let c = letter_counts(&w, &params);
        assert_eq!(c.rows, vec![2, 1]);
        assert_eq!(c.cols, vec![3, 1]);
        assert_eq!(c.cont, 0);
        assert_eq!(c.total(), 7);
    }

    #[test]
    fn counts_empty_and_continuous() {
        let params = ThomaParams::new(&[], &[], 1.0).unwrap();
        assert_eq!(letter_counts(&[], &params).total(), 0);
        let w = vec![Letter::Cont(0.1), Letter::Cont(0.2), Letter::Cont(0.3)];
        let c = letter_counts(&w, &params);
        assert_eq!(c.cont, 3);
        assert_eq!(c.total(), 3);
    }

    #[test]
    fn counts_are_permutation_invariant() {
        let params = ThomaParams::new(&[0.5], &[0.3], 0.2).unwrap();
        let w = vec![
            Letter::Row(1),
            Letter::Cont(0.4),
            Letter::Col(1),
            Letter::Row(1),
        ];
        let mut shuffled = w.clone();
        shuffled.reverse();
        assert_eq!(letter_counts(&w, &params), letter_counts(&shuffled, &params));
    }

    #[test]
    fn word_line_round_trip() {
        let w = vec![
            Letter::Row(3),
            Letter::Col(1),
            Letter::Cont(0.731252344881592),
            Letter::Cont(1.0 / 3.0),
        ];
        let line = word_to_line(&w);
        let back = word_from_line(&line).unwrap();
        assert_eq!(w, back);
    }

    #[test]
    fn order_parse_round_trip() {
        let p = LinearOrder::parse("x1<y1<x2<G").unwrap();
        assert_eq!(p.to_token_string(), "x1<y1<x2<G");
        assert!(LinearOrder::parse("x1<x1").is_err());
        assert!(LinearOrder::parse("x2").is_err());
    }

    #[test]
    fn order_must_cover_alphabet() {
        let params = ThomaParams::new(&[0.5], &[0.3], 0.2).unwrap();
        let p = LinearOrder::parse("x1<y1<G").unwrap();
        assert!(p.matches_params(&params).is_ok());
        let q = LinearOrder::parse("x1<y1").unwrap();
        assert!(q.matches_params(&params).is_err());
    }
}
