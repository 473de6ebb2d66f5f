//! Brute-force Greene invariants: the maximal total length of a union of
//! `k` disjoint monotone subsequences of a word.
//!
//! This is an independent oracle for the insertion algorithm — it never
//! touches tableaux. Words are scanned left to right with a memoized search
//! over the multiset of current chain tails, so it stays fast up to the
//! length cap but is not a production path.

use std::collections::HashMap;

use crate::alphabet::{Letter, LinearOrder, Relation};
use crate::error::{Error, Result};
use crate::GREENE_CAP;

/// Maximal total length of a union of `k` disjoint `↗`-increasing
/// subsequences; equals `λ_1 + … + λ_k` of the insertion shape.
pub fn greene_rows(word: &[Letter], order: &LinearOrder, k: usize) -> Result<usize> {
    max_chain_union(word, order, k, Relation::Rises)
}

/// Maximal total length of a union of `k` disjoint `↘`-decreasing
/// subsequences; equals `λ'_1 + … + λ'_k` of the insertion shape.
pub fn greene_cols(word: &[Letter], order: &LinearOrder, k: usize) -> Result<usize> {
    max_chain_union(word, order, k, Relation::Falls)
}

fn max_chain_union(
    word: &[Letter],
    order: &LinearOrder,
    k: usize,
    direction: Relation,
) -> Result<usize> {
    if k == 0 {
        return Err(Error::Config("chain count must be at least 1".into()));
    }
    if word.len() > GREENE_CAP {
        return Err(Error::CapExceeded {
            what: "brute-force Greene word",
            got: word.len(),
            cap: GREENE_CAP,
        });
    }
    if word.is_empty() {
        return Ok(0);
    }

    // Dense letter ids; id NONE marks an empty chain. Chains are
    // interchangeable, so tails are kept sorted and memoized as a packed key.
    let mut letters: Vec<Letter> = Vec::new();
    let ids: Vec<u8> = word
        .iter()
        .map(|&l| {
            if let Some(i) = letters.iter().position(|&m| m == l) {
                i as u8
            } else {
                letters.push(l);
                (letters.len() - 1) as u8
            }
        })
        .collect();
    const NONE: u8 = 0xF;
    assert!(letters.len() < NONE as usize);

    let extends = |tail: u8, next: u8| -> bool {
        tail == NONE || order.relation(letters[tail as usize], letters[next as usize]) == direction
    };

    fn pack(pos: usize, tails: &[u8]) -> u64 {
        let mut key = pos as u64;
        for &t in tails {
            key = (key << 4) | t as u64;
        }
        key
    }

    fn search(
        pos: usize,
        tails: &mut Vec<u8>,
        ids: &[u8],
        extends: &dyn Fn(u8, u8) -> bool,
        memo: &mut HashMap<u64, usize>,
    ) -> usize {
        if pos == ids.len() {
            return 0;
        }
        let key = pack(pos, tails);
        if let Some(&v) = memo.get(&key) {
            return v;
        }
        // Skip the letter.
        let mut best = search(pos + 1, tails, ids, extends, memo);
        // Or append it to a chain with a distinct eligible tail.
        let mut tried = [false; 16];
        for slot in 0..tails.len() {
            let tail = tails[slot];
            if tried[tail as usize] || !extends(tail, ids[pos]) {
                continue;
            }
            tried[tail as usize] = true;
            let saved = tails[slot];
            tails[slot] = ids[pos];
            tails.sort_unstable();
            let v = 1 + search(pos + 1, tails, ids, extends, memo);
            best = best.max(v);
            // Restore: remove the inserted id, put the saved tail back.
            let at = tails.iter().position(|&t| t == ids[pos]).unwrap();
            tails.remove(at);
            tails.push(saved);
            tails.sort_unstable();
        }
        memo.insert(key, best);
        best
    }

    let mut tails = vec![NONE; k.min(word.len())];
    let mut memo = HashMap::new();
    Ok(search(0, &mut tails, &ids, &extends, &mut memo))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::word_from_line;
    use crate::rsk::rsk;

    #[test]
    fn worked_example_invariants() {
        let order = LinearOrder::standard(2, 2, false);
        let w = word_from_line("x1 y1 y1 y2 x2 x1 y1").unwrap();
        // Shape is (3,2,1,1): first row 3, first column 4.
        assert_eq!(greene_rows(&w, &order, 1).unwrap(), 3);
        assert_eq!(greene_cols(&w, &order, 1).unwrap(), 4);
        assert_eq!(greene_rows(&w, &order, 2).unwrap(), 5);
        assert_eq!(greene_cols(&w, &order, 2).unwrap(), 6);
    }

    #[test]
    fn repeated_letters() {
        let order = LinearOrder::standard(1, 1, false);
        let xxx = vec![Letter::Row(1); 3];
        assert_eq!(greene_rows(&xxx, &order, 1).unwrap(), 3);
        assert_eq!(greene_cols(&xxx, &order, 1).unwrap(), 1);
        let yyy = vec![Letter::Col(1); 3];
        assert_eq!(greene_rows(&yyy, &order, 1).unwrap(), 1);
        assert_eq!(greene_rows(&yyy, &order, 3).unwrap(), 3);
        assert_eq!(greene_cols(&yyy, &order, 1).unwrap(), 3);
    }

    #[test]
    fn rejects_beyond_cap() {
        let order = LinearOrder::standard(1, 0, false);
        let w = vec![Letter::Row(1); GREENE_CAP + 1];
        assert!(greene_rows(&w, &order, 1).is_err());
    }

    #[test]
    fn agrees_with_insertion_shape_on_random_words() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let order = LinearOrder::standard(2, 2, false);
        let letters = [
            Letter::Row(1),
            Letter::Row(2),
            Letter::Col(1),
            Letter::Col(2),
        ];
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..200 {
            let n = rng.random_range(0..=8);
            let w: Vec<Letter> = (0..n).map(|_| letters[rng.random_range(0..4)]).collect();
            let shape = rsk(&w, &order).shape();
            for k in 1..=4 {
                assert_eq!(
                    greene_rows(&w, &order, k).unwrap(),
                    shape.row_prefix_sum(k),
                    "rows word {w:?} k {k}"
                );
                assert_eq!(
                    greene_cols(&w, &order, k).unwrap(),
                    shape.transpose().row_prefix_sum(k),
                    "cols word {w:?} k {k}"
                );
            }
        }
    }
}
