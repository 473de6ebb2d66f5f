//! The generalized RSK insertion algorithm.
//!
//! Row letters bump the left-most entry strictly greater; column letters and
//! continuous letters also bump equal entries. Both rules collapse into one
//! predicate on comparison keys ([`OrderKey::bumped_by`]): an entry `e` is
//! displaced by an arrival `x` exactly when `e ↘ x`. Rows stay `↗`-sorted,
//! so the bump position is found by binary search.

use crate::alphabet::{Letter, LinearOrder, OrderKey};
use crate::diagram::YoungDiagram;
use crate::error::{Error, Result};
use crate::tableau::{InsertionTableau, StandardTableau};

/// Which insertion map to apply: the order as given, or the inverse order
/// with the roles of the two discrete tie classes exchanged (points of `G`
/// keep their downward ties, which is why the two maps are not formally
/// symmetric).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
pub enum MapKind {
    #[default]
    Standard,
    Transposed,
}

/// A key view of an order under either map.
#[derive(Clone, Copy)]
pub struct KeyView<'a> {
    order: &'a LinearOrder,
    kind: MapKind,
    nsegs: u32,
}

impl<'a> KeyView<'a> {
    pub fn new(order: &'a LinearOrder, kind: MapKind) -> Self {
        Self {
            order,
            kind,
            nsegs: order.segments().len() as u32,
        }
    }

    #[inline]
    pub fn key(&self, letter: Letter) -> OrderKey {
        let k = self.order.key(letter);
        match self.kind {
            MapKind::Standard => k,
            MapKind::Transposed => OrderKey {
                seg: self.nsegs - 1 - k.seg,
                val: -k.val,
                tie_falls: match letter {
                    Letter::Row(_) => true,
                    Letter::Col(_) => false,
                    Letter::Cont(_) => true,
                },
            },
        }
    }
}

/// Left-most position of `row` whose entry is displaced by `x`, or `None`
/// when `x` is appended. The displacement predicate is monotone along a
/// `↗`-sorted row, so a binary search applies.
#[inline]
fn bump_position(row: &[OrderKey], x: OrderKey) -> Option<usize> {
    let p = row.partition_point(|&e| !e.bumped_by(x));
    (p < row.len()).then_some(p)
}

/// Output of the insertion algorithm: the letter tableau, the recording
/// tableau, and their common shape.
#[derive(Debug, Clone, PartialEq)]
pub struct RskOutput {
    pub insertion: InsertionTableau,
    pub recording: StandardTableau,
}

impl RskOutput {
    pub fn shape(&self) -> YoungDiagram {
        self.insertion.shape()
    }
}

/// Incremental insertion state holding letters and their keys in lockstep.
struct InsertState<'a> {
    view: KeyView<'a>,
    rows: Vec<Vec<Letter>>,
    keys: Vec<Vec<OrderKey>>,
}

impl<'a> InsertState<'a> {
    fn new(view: KeyView<'a>) -> Self {
        Self {
            view,
            rows: Vec::new(),
            keys: Vec::new(),
        }
    }

    /// Inserts one letter; returns the row where the new box appeared and
    /// the letter bumped out of the first row, if any.
    fn push(&mut self, letter: Letter) -> (usize, Option<Letter>) {
        let mut carried = letter;
        let mut carried_key = self.view.key(letter);
        let mut first_row_bump = None;
        for r in 0.. {
            if r == self.rows.len() {
                self.rows.push(vec![carried]);
                self.keys.push(vec![carried_key]);
                return (r, first_row_bump);
            }
            match bump_position(&self.keys[r], carried_key) {
                None => {
                    self.rows[r].push(carried);
                    self.keys[r].push(carried_key);
                    return (r, first_row_bump);
                }
                Some(p) => {
                    std::mem::swap(&mut self.rows[r][p], &mut carried);
                    std::mem::swap(&mut self.keys[r][p], &mut carried_key);
                    if r == 0 {
                        first_row_bump = Some(carried);
                    }
                }
            }
        }
        unreachable!()
    }
}

fn run_insertion(word: &[Letter], view: KeyView<'_>) -> (RskOutput, Vec<Letter>) {
    let mut state = InsertState::new(view);
    let mut recording: Vec<Vec<usize>> = Vec::new();
    let mut first_row_bumps = Vec::new();
    for (step, &letter) in word.iter().enumerate() {
        let (row, bump) = state.push(letter);
        if row == recording.len() {
            recording.push(Vec::new());
        }
        recording[row].push(step + 1);
        first_row_bumps.extend(bump);
    }
    (
        RskOutput {
            insertion: InsertionTableau::from_rows_unchecked(state.rows),
            recording: StandardTableau::from_rows_unchecked(recording),
        },
        first_row_bumps,
    )
}

/// Inserts a single letter into a tableau by row bumping.
pub fn row_insert(tableau: &InsertionTableau, x: Letter, order: &LinearOrder) -> InsertionTableau {
    let view = KeyView::new(order, MapKind::Standard);
    let mut state = InsertState::new(view);
    state.rows = tableau.rows().to_vec();
    state.keys = state
        .rows
        .iter()
        .map(|row| row.iter().map(|&l| view.key(l)).collect())
        .collect();
    state.push(x);
    InsertionTableau::from_rows_unchecked(state.rows)
}

/// Applies the insertion algorithm to a whole word, left to right.
pub fn rsk(word: &[Letter], order: &LinearOrder) -> RskOutput {
    run_insertion(word, KeyView::new(order, MapKind::Standard)).0
}

/// The transposed map: insertion under the inverse order with the discrete
/// tie classes exchanged. For words whose continuous letters are pairwise
/// distinct its shape is the transpose of the [`rsk`] shape.
pub fn transposed_rsk(word: &[Letter], order: &LinearOrder) -> RskOutput {
    run_insertion(word, KeyView::new(order, MapKind::Transposed)).0
}

/// Like [`rsk`], additionally returning the letters bumped out of the first
/// row, in bump order.
pub fn rsk_with_first_row_bumps(word: &[Letter], order: &LinearOrder) -> (RskOutput, Vec<Letter>) {
    run_insertion(word, KeyView::new(order, MapKind::Standard))
}

/// Inverts the insertion bijection: recovers the unique word that produces
/// the pair `(insertion, recording)`.
pub fn rsk_inverse(
    insertion: &InsertionTableau,
    recording: &StandardTableau,
    order: &LinearOrder,
) -> Result<Vec<Letter>> {
    insertion.check(order)?;
    recording.check()?;
    if insertion.shape() != recording.shape() {
        return Err(Error::InvalidTableau(format!(
            "shapes differ: {} vs {}",
            insertion.shape(),
            recording.shape()
        )));
    }
    let view = KeyView::new(order, MapKind::Standard);
    let mut rows: Vec<Vec<Letter>> = insertion.rows().to_vec();
    let mut keys: Vec<Vec<OrderKey>> = rows
        .iter()
        .map(|row| row.iter().map(|&l| view.key(l)).collect())
        .collect();
    let cells = recording.cells_by_entry();
    let n = cells.len();
    let mut word = vec![Letter::Row(1); n];
    for entry in (1..=n).rev() {
        let (r, c) = cells[entry - 1];
        if r >= rows.len() || c + 1 != rows[r].len() {
            return Err(Error::InvalidTableau(
                "recording tableau does not describe a growth sequence".into(),
            ));
        }
        let mut carried = rows[r].pop().expect("non-empty row");
        let mut carried_key = keys[r].pop().expect("non-empty row");
        if rows[r].is_empty() {
            rows.pop();
            keys.pop();
        }
        for i in (0..r).rev() {
            // Right-most entry the carried letter falls to: the entry that
            // originally bumped it from this row.
            let p = keys[i].partition_point(|&u| carried_key.falls_to(u));
            if p == 0 {
                return Err(Error::InvalidTableau(
                    "reverse bump found no source entry".into(),
                ));
            }
            std::mem::swap(&mut rows[i][p - 1], &mut carried);
            std::mem::swap(&mut keys[i][p - 1], &mut carried_key);
        }
        word[entry - 1] = carried;
    }
    Ok(word)
}

/// Tracks the first `cap` rows of the insertion shape without storing the
/// rest of the tableau; letters bumped past the tracked rows are only
/// counted. Exact for the tracked row lengths.
pub struct ShapeTracker {
    keys: Vec<Vec<OrderKey>>,
    cap: usize,
    overflow: usize,
}

impl ShapeTracker {
    pub fn new(cap: usize) -> Self {
        Self {
            keys: Vec::new(),
            cap,
            overflow: 0,
        }
    }

    #[inline]
    pub fn push(&mut self, mut key: OrderKey) {
        for r in 0..self.cap {
            if r == self.keys.len() {
                self.keys.push(vec![key]);
                return;
            }
            match bump_position(&self.keys[r], key) {
                None => {
                    self.keys[r].push(key);
                    return;
                }
                Some(p) => std::mem::swap(&mut self.keys[r][p], &mut key),
            }
        }
        self.overflow += 1;
    }

    /// Length of the `i`-th tracked row (1-based).
    pub fn row(&self, i: usize) -> usize {
        self.keys.get(i - 1).map_or(0, Vec::len)
    }

    /// Tracked boxes plus overflowed letters; equals the number of pushes.
    pub fn total(&self) -> usize {
        self.keys.iter().map(Vec::len).sum::<usize>() + self.overflow
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::word_from_line;

    fn paper_order() -> LinearOrder {
        LinearOrder::standard(2, 2, false)
    }

    fn paper_word() -> Vec<Letter> {
        word_from_line("x1 y1 y1 y2 x2 x1 y1").unwrap()
    }

    #[test]
    fn worked_example_pair() {
        let out = rsk(&paper_word(), &paper_order());
        assert_eq!(out.shape(), YoungDiagram::new(vec![3, 2, 1, 1]));
        let r: Vec<Vec<Letter>> = vec![
            word_from_line("x1 x1 y1").unwrap(),
            word_from_line("x2 y2").unwrap(),
            word_from_line("y1").unwrap(),
            word_from_line("y1").unwrap(),
        ];
        assert_eq!(out.insertion.rows(), &r[..]);
        let s = vec![vec![1, 2, 4], vec![3, 7], vec![5], vec![6]];
        assert_eq!(out.recording.rows(), &s[..]);
        out.insertion.check(&paper_order()).unwrap();
        out.recording.check().unwrap();
    }

    #[test]
    fn repeated_letters() {
        let order = LinearOrder::standard(1, 1, false);
        let xxx = vec![Letter::Row(1); 3];
        assert_eq!(rsk(&xxx, &order).shape(), YoungDiagram::new(vec![3]));
        let yyy = vec![Letter::Col(1); 3];
        assert_eq!(rsk(&yyy, &order).shape(), YoungDiagram::new(vec![1, 1, 1]));
    }

    #[test]
    fn row_insert_cases() {
        let order = LinearOrder::standard(1, 1, false);
        // Appending to the row end.
        let t = InsertionTableau::new(vec![vec![Letter::Row(1)]], &order).unwrap();
        let t2 = row_insert(&t, Letter::Col(1), &order);
        assert_eq!(t2.rows(), &[vec![Letter::Row(1), Letter::Col(1)]]);
        // Strict bump of the only entry.
        let t = InsertionTableau::new(vec![vec![Letter::Col(1)]], &order).unwrap();
        let t2 = row_insert(&t, Letter::Row(1), &order);
        assert_eq!(t2.rows(), &[vec![Letter::Row(1)], vec![Letter::Col(1)]]);
        // Equal column letters bump each other.
        let t = InsertionTableau::new(vec![vec![Letter::Col(1)]], &order).unwrap();
        let t2 = row_insert(&t, Letter::Col(1), &order);
        assert_eq!(t2.rows(), &[vec![Letter::Col(1)], vec![Letter::Col(1)]]);
        // Size grows by one and validity is preserved.
        assert_eq!(t2.size(), 2);
        t2.check(&order).unwrap();
    }

    #[test]
    fn inverse_of_worked_example() {
        let order = paper_order();
        let out = rsk(&paper_word(), &order);
        let word = rsk_inverse(&out.insertion, &out.recording, &order).unwrap();
        assert_eq!(word, paper_word());
    }

    #[test]
    fn inverse_single_box() {
        let order = LinearOrder::standard(1, 0, false);
        let r = InsertionTableau::new(vec![vec![Letter::Row(1)]], &order).unwrap();
        let s = StandardTableau::new(vec![vec![1]]).unwrap();
        assert_eq!(rsk_inverse(&r, &s, &order).unwrap(), vec![Letter::Row(1)]);
    }

    #[test]
    fn inverse_rejects_mismatched_shapes() {
        let order = LinearOrder::standard(1, 0, false);
        let r = InsertionTableau::new(vec![vec![Letter::Row(1), Letter::Row(1)]], &order).unwrap();
        let s = StandardTableau::new(vec![vec![1], vec![2]]).unwrap();
        assert!(rsk_inverse(&r, &s, &order).is_err());
    }

    #[test]
    fn transposed_map_on_two_letter_word() {
        let order = LinearOrder::standard(0, 1, false);
        let w = vec![Letter::Col(1), Letter::Col(1)];
        assert_eq!(rsk(&w, &order).shape(), YoungDiagram::new(vec![1, 1]));
        assert_eq!(transposed_rsk(&w, &order).shape(), YoungDiagram::new(vec![2]));
    }

    #[test]
    fn transposed_map_on_worked_example() {
        let order = paper_order();
        let w = paper_word();
        assert_eq!(
            transposed_rsk(&w, &order).shape(),
            YoungDiagram::new(vec![4, 2, 1])
        );
        assert_eq!(
            transposed_rsk(&w, &order).shape(),
            rsk(&w, &order).shape().transpose()
        );
    }

    #[test]
    fn intermediate_tableaux_stay_valid() {
        let order = LinearOrder::standard(2, 2, true);
        let mut t = InsertionTableau::empty();
        let word = word_from_line("x2 y1 g5.0e-1 x1 y2 g2.5e-1 x2 y1 x1 g7.5e-1").unwrap();
        for (i, &letter) in word.iter().enumerate() {
            t = row_insert(&t, letter, &order);
            assert_eq!(t.size(), i + 1);
            t.check(&order).unwrap();
        }
    }

    #[test]
    fn tracker_matches_full_shape() {
        let order = LinearOrder::standard(2, 2, false);
        let view = KeyView::new(&order, MapKind::Standard);
        let word = word_from_line("x1 y1 x2 y2 y1 x1 x2 y2 y1 x1 y1 x2 x1 y2").unwrap();
        let shape = rsk(&word, &order).shape();
        for cap in 1..=6 {
            let mut tracker = ShapeTracker::new(cap);
            for &l in &word {
                tracker.push(view.key(l));
            }
            for i in 1..=cap {
                assert_eq!(tracker.row(i), shape.row(i), "cap {cap} row {i}");
            }
            assert_eq!(tracker.total(), word.len());
        }
    }
}
