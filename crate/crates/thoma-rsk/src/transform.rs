//! Two-letter restriction of a word, its suffix statistic, and the
//! bump-order transform read off the first insertion row.

use crate::alphabet::{Letter, LinearOrder, Word};
use crate::error::{Error, Result};
use crate::rsk::rsk_with_first_row_bumps;

/// Crosses out every letter except `a` and `b`.
pub fn restrict_word(word: &[Letter], a: Letter, b: Letter) -> Word {
    word.iter()
        .copied()
        .filter(|&l| l == a || l == b)
        .collect()
}

/// The largest excess of `b` over `a` among the suffixes of a word over
/// `{a, b}` (the empty suffix counts, so the value is nonnegative).
pub fn suffix_excess(word: &[Letter], a: Letter, b: Letter) -> usize {
    let mut diff: i64 = 0;
    let mut best: i64 = 0;
    for &l in word.iter().rev() {
        if l == b {
            diff += 1;
        } else if l == a {
            diff -= 1;
        } else {
            panic!("word contains a letter other than {a:?} and {b:?}");
        }
        best = best.max(diff);
    }
    best as usize
}

/// The bump-order transform of the restriction `w_{a,b}`: run the insertion
/// algorithm on the whole word, emit `a`/`b` letters in the order they are
/// bumped out of the first row, then append the `a`/`b` letters remaining in
/// the first row. Both `a` and `b` must be adjacent row letters with
/// `a < b`. The output is a rearrangement of `restrict_word(w, a, b)` whose
/// suffix excess never exceeds the original.
///
/// Remaining first-row letters are appended in left-to-right row order; for
/// row letters the row is weakly increasing, so remaining `a`s precede
/// remaining `b`s.
pub fn bump_order_transform(
    word: &[Letter],
    a: Letter,
    b: Letter,
    order: &LinearOrder,
) -> Result<Word> {
    match (a, b) {
        (Letter::Row(_), Letter::Row(_)) => {}
        _ => {
            return Err(Error::Config(
                "the transform is defined for two row letters".into(),
            ))
        }
    }
    let (ka, kb) = (order.key(a), order.key(b));
    if !(ka.seg < kb.seg && kb.seg - ka.seg == 1) {
        return Err(Error::Config(format!(
            "{a:?} and {b:?} must be adjacent in the order with {a:?} below {b:?}"
        )));
    }
    let (out, bumps) = rsk_with_first_row_bumps(word, order);
    let mut result: Word = bumps.into_iter().filter(|&l| l == a || l == b).collect();
    result.extend(
        out.insertion
            .rows()
            .first()
            .into_iter()
            .flatten()
            .copied()
            .filter(|&l| l == a || l == b),
    );
    Ok(result)
}
