//! Score rows, prediction sets and selected pairs.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One decode step's indexer scores.
///
/// Every value is finite; NaN and infinities are rejected when the row is
/// built, so the selectors never have to order them.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreRow {
    scores: Vec<f32>,
    step_id: Option<u32>,
    layer_id: Option<u32>,
}

impl ScoreRow {
    pub fn new(scores: Vec<f32>) -> Result<Self> {
        if let Some(index) = scores.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFiniteScore { index });
        }
        Ok(Self {
            scores,
            step_id: None,
            layer_id: None,
        })
    }

    pub fn with_step(mut self, step: u32) -> Self {
        self.step_id = Some(step);
        self
    }

    pub fn with_layer(mut self, layer: u32) -> Self {
        self.layer_id = Some(layer);
        self
    }

    pub fn scores(&self) -> &[f32] {
        &self.scores
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn step_id(&self) -> Option<u32> {
        self.step_id
    }

    pub fn layer_id(&self) -> Option<u32> {
        self.layer_id
    }

    pub fn into_scores(self) -> Vec<f32> {
        self.scores
    }
}

/// Where a prediction set came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// No prediction: the radix baseline, or GVR's strided self-sample.
    None,
    Random,
    PreviousStep,
    StaticPrior,
}

impl Provenance {
    /// Ablation row order.
    pub const ALL: [Provenance; 4] = [
        Provenance::None,
        Provenance::Random,
        Provenance::PreviousStep,
        Provenance::StaticPrior,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::None => "none",
            Provenance::Random => "random",
            Provenance::PreviousStep => "previous-step",
            Provenance::StaticPrior => "static-prior",
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Provenance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Provenance::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| Error::UnknownName {
                kind: "provenance",
                name: s.to_string(),
            })
    }
}

/// Predicted index set used to warm-start selection.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredictionSet {
    indices: Vec<u32>,
    provenance: Provenance,
}

impl PredictionSet {
    pub fn new(indices: Vec<u32>, provenance: Provenance) -> Self {
        Self {
            indices,
            provenance,
        }
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Checks that every index is in range for a row of length `n` and that
    /// no index repeats.
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.indices.is_empty() {
            return Err(Error::EmptyInput("prediction set"));
        }
        let mut seen = vec![false; n];
        for &i in &self.indices {
            let slot = seen.get_mut(i as usize).ok_or(Error::IndexOutOfRange {
                index: i as usize,
                n,
            })?;
            if *slot {
                return Err(Error::DuplicateIndex(i));
            }
            *slot = true;
        }
        Ok(())
    }
}

/// A (value, index) pair as held in candidate buffers and selection output.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scored {
    pub value: f32,
    pub index: u32,
}

impl Scored {
    pub fn new(value: f32, index: u32) -> Self {
        Self { value, index }
    }
}

/// Number of indices present in both sets. Inputs are assumed duplicate-free.
pub(crate) fn overlap_count(a: &[u32], b: &[u32]) -> usize {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_unstable();
    b.sort_unstable();
    let (mut i, mut j, mut hits) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                hits += 1;
                i += 1;
                j += 1;
            }
        }
    }
    hits
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite_scores() {
        assert!(matches!(
            ScoreRow::new(vec![1.0, f32::NAN]),
            Err(Error::NonFiniteScore { index: 1 })
        ));
        assert!(matches!(
            ScoreRow::new(vec![f32::NEG_INFINITY]),
            Err(Error::NonFiniteScore { index: 0 })
        ));
        assert_eq!(ScoreRow::new(vec![0.5; 3]).unwrap().len(), 3);
    }

    #[test]
    fn prediction_validation() {
        let p = PredictionSet::new(vec![0, 3, 2], Provenance::Random);
        assert!(p.validate(4).is_ok());
        assert!(matches!(
            p.validate(3),
            Err(Error::IndexOutOfRange { index: 3, n: 3 })
        ));
        let dup = PredictionSet::new(vec![1, 1], Provenance::Random);
        assert!(matches!(dup.validate(4), Err(Error::DuplicateIndex(1))));
    }

    #[test]
    fn provenance_names_round_trip() {
        for p in Provenance::ALL {
            assert_eq!(p.as_str().parse::<Provenance>().unwrap(), p);
        }
        assert!("prev".parse::<Provenance>().is_err());
    }

    #[test]
    fn overlap_counts_shared_elements() {
        assert_eq!(overlap_count(&[1, 2, 3, 4], &[4, 3, 5, 6]), 2);
        assert_eq!(overlap_count(&[], &[1]), 0);
    }
}
