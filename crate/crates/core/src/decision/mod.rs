//! Decision step: which candidate pairs are declared duplicates.

mod greedy;

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use crate::pedigree::RelativeType;
use crate::search::{CandidatePairSet, FamPair};
use crate::{Error, Result};

pub use greedy::{greedy_match_score, greedy_scores, member_score, GreedyVars};

pub type IntersectionScores = BTreeMap<FamPair, u8>;
pub type GreedyScores = BTreeMap<FamPair, f64>;

/// Number of relative types in which each pair is a candidate.
pub fn intersection_scores(cands: &CandidatePairSet) -> IntersectionScores {
    let mut scores = IntersectionScores::new();
    for (_, pairs) in cands.iter() {
        for p in pairs {
            *scores.entry(p.clone()).or_insert(0) += 1;
        }
    }
    scores
}

pub fn threshold_pairs(scores: &IntersectionScores, threshold: u8) -> Result<BTreeSet<FamPair>> {
    let max = RelativeType::CORE.len() as u8;
    if !(1..=max).contains(&threshold) {
        return Err(Error::Config(format!(
            "threshold must be between 1 and {max}, got {threshold}"
        )));
    }
    Ok(scores
        .iter()
        .filter(|(_, &s)| s >= threshold)
        .map(|(p, _)| p.clone())
        .collect())
}

/// Keeps the pairs scoring at least the `percentile` empirical quantile of all
/// scores. The cut is the value at sorted position `floor(percentile * n)`.
pub fn percentile_filter(scored: &GreedyScores, percentile: f64) -> Result<BTreeSet<FamPair>> {
    if scored.is_empty() {
        return Err(Error::EmptyInput("no scored pairs to filter".into()));
    }
    if !(0.0..1.0).contains(&percentile) {
        return Err(Error::Config(format!(
            "percentile must be in [0, 1), got {percentile}"
        )));
    }
    let mut values: Vec<f64> = scored.values().copied().collect();
    values.sort_by(f64::total_cmp);
    let idx = ((percentile * values.len() as f64).floor() as usize).min(values.len() - 1);
    let cut = values[idx];
    Ok(scored
        .iter()
        .filter(|(_, &s)| s >= cut)
        .map(|(p, _)| p.clone())
        .collect())
}

/// Rows of `famID1,famID2,score`.
pub fn write_scores_csv<W: Write, S: ToString>(
    scores: &BTreeMap<FamPair, S>,
    writer: W,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["famID1", "famID2", "score"])?;
    for (p, s) in scores {
        w.write_record([p.first(), p.second(), &s.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
