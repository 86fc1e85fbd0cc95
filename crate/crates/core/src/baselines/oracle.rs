//! Sort-based reference selection. Everything else is checked against this.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::row::{ScoreRow, Scored};

/// Descending value, ascending index on ties. `-0.0` and `+0.0` compare equal.
#[inline]
pub fn rank_cmp(a: &Scored, b: &Scored) -> Ordering {
    b.value
        .partial_cmp(&a.value)
        .expect("scores are finite")
        .then(a.index.cmp(&b.index))
}

/// The first `k` pairs of the row sorted by [`rank_cmp`].
///
/// The comparator is a strict total order on pairs, so partitioning first and
/// sorting only the head yields the same prefix as a full sort.
pub fn oracle_topk(row: &ScoreRow, k: usize) -> Result<Vec<Scored>> {
    let n = row.len();
    if k == 0 {
        return Err(Error::EmptyInput("k"));
    }
    if n < k {
        return Err(Error::RowTooShort { n, k });
    }
    let mut pairs: Vec<Scored> = row
        .scores()
        .iter()
        .enumerate()
        .map(|(i, &v)| Scored::new(v, i as u32))
        .collect();
    if k < n {
        pairs.select_nth_unstable_by(k - 1, rank_cmp);
        pairs.truncate(k);
    }
    pairs.sort_unstable_by(rank_cmp);
    Ok(pairs)
}

/// Value multisets are equal, treating the two zeros as one value.
pub fn value_multiset_eq(a: &[f32], b: &[f32]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let canon = |v: &[f32]| {
        let mut v: Vec<f32> = v.iter().map(|&x| if x == 0.0 { 0.0 } else { x }).collect();
        v.sort_unstable_by(f32::total_cmp);
        v
    };
    canon(a)
        .iter()
        .zip(canon(b).iter())
        .all(|(x, y)| x.to_bits() == y.to_bits())
}
