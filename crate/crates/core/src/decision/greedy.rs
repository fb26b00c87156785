//! Greedy whole-pedigree match score.
//!
//! Members of both families are grouped by their relationship to the proband.
//! Inside each group the best-scoring (reference, comparison) member pair is
//! matched and removed until one side runs out. Reference members left over
//! are moved to the `Other` group together with unmatched comparison members
//! and matched there. The family score is the sum of the matched member
//! scores. The family with the smaller famID is the reference.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use super::GreedyScores;
use crate::pedigree::{
    classify_extended_relatives, extract_core_relatives, Individual, Pedigree, PedigreeSet,
    RelativeType, VarRef,
};
use crate::search::FamPair;
use crate::value::{sample_sd, Value};
use crate::{Error, Result};

/// Variables compared between members, with their weights.
#[derive(Debug, Clone)]
pub struct GreedyVars {
    vars: Vec<VarRef>,
    weights: Vec<f64>,
}

impl GreedyVars {
    pub fn new(peds: &PedigreeSet, names: &[String], weights: &[f64]) -> Result<GreedyVars> {
        if names.is_empty() {
            return Err(Error::Config(
                "greedy score needs at least one variable".into(),
            ));
        }
        if names.len() != weights.len() {
            return Err(Error::Config(
                "one weight per greedy variable required".into(),
            ));
        }
        let vars = names
            .iter()
            .map(|n| peds.resolve(n))
            .collect::<Result<_>>()?;
        Ok(GreedyVars {
            vars,
            weights: weights.to_vec(),
        })
    }

    pub fn unit(peds: &PedigreeSet, names: &[String]) -> Result<GreedyVars> {
        GreedyVars::new(peds, names, &vec![1.0; names.len()])
    }

    /// Weights are the in-sample standard deviations over every individual.
    pub fn with_sd_weights(peds: &PedigreeSet, names: &[String]) -> Result<GreedyVars> {
        let mut g = GreedyVars::unit(peds, names)?;
        g.weights = g
            .vars
            .iter()
            .map(|v| {
                sample_sd(
                    peds.families()
                        .flat_map(|p| p.members.iter().map(move |m| p.lookup(m, v))),
                )
            })
            .collect();
        Ok(g)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

fn variable_match(a: &Value, b: &Value) -> f64 {
    match (a, b) {
        (Value::Missing, Value::Missing) => 1.0,
        (Value::Missing, _) | (_, Value::Missing) => 0.0,
        (Value::Binary(x), Value::Binary(y)) => f64::from(u8::from(x == y)),
        (Value::Text(x), Value::Text(y)) => f64::from(u8::from(x == y)),
        _ => match (a.as_f64(), b.as_f64()) {
            (Some(x), Some(y)) if x == y => 1.0,
            (Some(x), Some(y)) => (1.0 / (x - y).abs()).min(1.0),
            _ => 0.0,
        },
    }
}

/// Weighted agreement of two members, divided by the number of variables.
pub fn member_score(
    ped_a: &Pedigree,
    a: &Individual,
    ped_b: &Pedigree,
    b: &Individual,
    vars: &GreedyVars,
) -> f64 {
    let total: f64 = vars
        .vars
        .iter()
        .zip(&vars.weights)
        .map(|(v, w)| w * variable_match(ped_a.lookup(a, v), ped_b.lookup(b, v)))
        .sum();
    total / vars.vars.len() as f64
}

fn categories(ped: &Pedigree) -> BTreeMap<RelativeType, Vec<usize>> {
    let mut out: BTreeMap<RelativeType, Vec<usize>> = BTreeMap::new();
    let mut seen = BTreeSet::new();
    for (rel, i) in extract_core_relatives(ped).iter() {
        if seen.insert(i) {
            out.entry(rel).or_default().push(i);
        }
    }
    for (i, rel) in classify_extended_relatives(ped) {
        out.entry(rel).or_default().push(i);
    }
    out
}

/// Greedy maximal matching; returns the matched score sum and the unmatched
/// members of both sides.
fn greedy_match(
    ref_ped: &Pedigree,
    refs: &[usize],
    cmp_ped: &Pedigree,
    cmps: &[usize],
    vars: &GreedyVars,
) -> (f64, Vec<usize>, Vec<usize>) {
    let mut cells: Vec<(f64, usize, usize)> = Vec::with_capacity(refs.len() * cmps.len());
    for &r in refs {
        for &c in cmps {
            let s = member_score(
                ref_ped,
                &ref_ped.members[r],
                cmp_ped,
                &cmp_ped.members[c],
                vars,
            );
            cells.push((s, r, c));
        }
    }
    cells.sort_by(|x, y| {
        y.0.total_cmp(&x.0)
            .then_with(|| {
                ref_ped.members[x.1]
                    .indiv_id
                    .cmp(&ref_ped.members[y.1].indiv_id)
            })
            .then_with(|| {
                cmp_ped.members[x.2]
                    .indiv_id
                    .cmp(&cmp_ped.members[y.2].indiv_id)
            })
            .then(Ordering::Equal)
    });
    let mut used_r = BTreeSet::new();
    let mut used_c = BTreeSet::new();
    let mut total = 0.0;
    for (s, r, c) in cells {
        if used_r.contains(&r) || used_c.contains(&c) {
            continue;
        }
        used_r.insert(r);
        used_c.insert(c);
        total += s;
    }
    let left_r = refs
        .iter()
        .copied()
        .filter(|r| !used_r.contains(r))
        .collect();
    let left_c = cmps
        .iter()
        .copied()
        .filter(|c| !used_c.contains(c))
        .collect();
    (total, left_r, left_c)
}

pub fn greedy_match_score(ped_a: &Pedigree, ped_b: &Pedigree, vars: &GreedyVars) -> f64 {
    let (reference, comparison) = if ped_a.fam_id <= ped_b.fam_id {
        (ped_a, ped_b)
    } else {
        (ped_b, ped_a)
    };
    let ref_cats = categories(reference);
    let cmp_cats = categories(comparison);
    let empty = Vec::new();
    let mut total = 0.0;
    let mut other_ref = ref_cats
        .get(&RelativeType::Other)
        .cloned()
        .unwrap_or_default();
    let mut other_cmp = cmp_cats
        .get(&RelativeType::Other)
        .cloned()
        .unwrap_or_default();
    for rel in RelativeType::CORE
        .iter()
        .chain(RelativeType::EXTENDED.iter())
        .filter(|&&r| r != RelativeType::Other)
    {
        let refs = ref_cats.get(rel).unwrap_or(&empty);
        let cmps = cmp_cats.get(rel).unwrap_or(&empty);
        let (s, left_r, left_c) = greedy_match(reference, refs, comparison, cmps, vars);
        total += s;
        other_ref.extend(left_r);
        other_cmp.extend(left_c);
    }
    let (s, _, _) = greedy_match(reference, &other_ref, comparison, &other_cmp, vars);
    total + s
}

/// Scores every pair; pairs must reference families of `peds`.
pub fn greedy_scores(
    peds: &PedigreeSet,
    pairs: &BTreeSet<FamPair>,
    vars: &GreedyVars,
) -> Result<GreedyScores> {
    let list: Vec<&FamPair> = pairs.iter().collect();
    list.par_iter()
        .map(|p| {
            let a = peds
                .get(p.first())
                .ok_or_else(|| Error::UnknownFamily(p.first().to_string()))?;
            let b = peds
                .get(p.second())
                .ok_or_else(|| Error::UnknownFamily(p.second().to_string()))?;
            Ok(((*p).clone(), greedy_match_score(a, b, vars)))
        })
        .collect()
}
