//! Exact selection when massive ties leave no threshold with a count in
//! `[k, C]`.

use super::secant::ThresholdBracket;
use crate::error::{Error, Result};
use crate::metrics::ledger::{PassKind, Phase, ScanLedger};
use crate::row::{ScoreRow, Scored};

/// Takes every element `>= val_hi`, then fills with the lowest-index
/// elements in `[val_lo, val_hi)`. With adjacent anchors that interval holds
/// a single value, so the second pass collects exactly the tied elements.
pub fn tie_fill_select(
    row: &ScoreRow,
    bracket: &ThresholdBracket,
    k: usize,
    ledger: &mut ScanLedger,
) -> Result<Vec<Scored>> {
    let scores = row.scores();
    let n = scores.len();
    let mut out = Vec::with_capacity(k);
    for (i, &x) in scores.iter().enumerate() {
        if x >= bracket.val_hi {
            out.push(Scored::new(x, i as u32));
        }
    }
    ledger.record(PassKind::FullRow, n, Phase::TieFill);
    if out.len() >= k {
        return Err(Error::Invariant(format!(
            "{} elements at or above val_hi, expected fewer than {k}",
            out.len()
        )));
    }

    for (i, &x) in scores.iter().enumerate() {
        if out.len() == k {
            break;
        }
        if x >= bracket.val_lo && x < bracket.val_hi {
            out.push(Scored::new(x, i as u32));
        }
    }
    ledger.record(PassKind::FullRow, n, Phase::TieFill);
    if out.len() < k {
        return Err(Error::Invariant(format!(
            "only {} elements at or above val_lo, need {k}",
            out.len()
        )));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gvr::secant::next_up;

    fn bracket(lo: f32, cnt_lo: usize, cnt_hi: usize) -> ThresholdBracket {
        ThresholdBracket {
            val_lo: lo,
            cnt_lo,
            val_hi: next_up(lo),
            cnt_hi,
            evaluated: vec![lo],
        }
    }

    #[test]
    fn all_copies() {
        let row = ScoreRow::new(vec![1.0; 10_000]).unwrap();
        let mut l = ScanLedger::new();
        let out = tie_fill_select(&row, &bracket(1.0, 10_000, 0), 2048, &mut l).unwrap();
        let idx: Vec<u32> = out.iter().map(|s| s.index).collect();
        assert_eq!(idx, (0..2048).collect::<Vec<_>>());
        assert_eq!(l.count_phase(Phase::TieFill), 2);
    }

    #[test]
    fn one_above_a_tie() {
        let mut v = vec![0.25f32; 10_000];
        v[5000] = 3.0;
        let row = ScoreRow::new(v).unwrap();
        let out =
            tie_fill_select(&row, &bracket(0.25, 10_000, 1), 2048, &mut ScanLedger::new()).unwrap();
        assert_eq!(out[0], Scored::new(3.0, 5000));
        let tied: Vec<u32> = out[1..].iter().map(|s| s.index).collect();
        assert_eq!(tied, (0..2047).collect::<Vec<_>>());
    }

    #[test]
    fn rejects_bad_bracket() {
        let row = ScoreRow::new(vec![1.0; 100]).unwrap();
        assert!(tie_fill_select(&row, &bracket(1.0, 100, 0), 101, &mut ScanLedger::new()).is_err());
        assert!(tie_fill_select(&row, &bracket(0.5, 100, 100), 10, &mut ScanLedger::new()).is_err());
    }
}
