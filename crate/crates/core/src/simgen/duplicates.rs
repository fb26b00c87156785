//! Duplicate injection with random attribute errors.

use std::collections::BTreeSet;

use rand::seq::index::sample;
use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::clustering::Partition;
use crate::pedigree::{Pedigree, PedigreeSet};
use crate::value::Value;
use crate::{Error, Result};

/// `copies` lists (k, m): m distinct families receive k copies each.
#[derive(Debug, Clone, PartialEq)]
pub struct DuplicationSpec {
    pub copies: Vec<(u32, usize)>,
    /// Mean number of errors per copy.
    pub error_rate: f64,
}

impl DuplicationSpec {
    pub fn none() -> Self {
        DuplicationSpec {
            copies: Vec::new(),
            error_rate: 0.0,
        }
    }

    pub fn families_needed(&self) -> usize {
        self.copies.iter().map(|&(_, m)| m).sum()
    }

    pub fn total_copies(&self) -> usize {
        self.copies.iter().map(|&(k, m)| k as usize * m).sum()
    }
}

#[derive(Debug, Clone)]
pub struct Duplicated {
    pub set: PedigreeSet,
    pub truth: Partition,
    /// (copy famID, origin famID), in creation order.
    pub origins: Vec<(String, String)>,
    /// Number of errors drawn for each copy, aligned with `origins`.
    pub error_counts: Vec<usize>,
}

/// Fresh famIDs: continue the integer sequence when every ID is an integer,
/// otherwise suffix the origin ID.
fn fresh_id(set: &PedigreeSet, next: &mut Option<u64>, origin: &str, copy: u32) -> String {
    if let Some(n) = next {
        *n += 1;
        return n.to_string();
    }
    let mut j = 0;
    loop {
        let id = if j == 0 {
            format!("{origin}_dup{copy}")
        } else {
            format!("{origin}_dup{copy}_{j}")
        };
        if !set.contains(&id) {
            return id;
        }
        j += 1;
    }
}

/// Applies one error to a random (member, attribute) cell: binary values are
/// flipped, numeric values get an integer from 0 to 9 added. Missing and text
/// cells are left as they are.
fn apply_error<R: Rng + ?Sized>(ped: &mut Pedigree, eligible: &[usize], rng: &mut R) {
    if ped.members.is_empty() || eligible.is_empty() {
        return;
    }
    let m = rng.random_range(0..ped.members.len());
    let a = eligible[rng.random_range(0..eligible.len())];
    let member = &mut ped.members[m];
    let new = match member.attribute(a) {
        Value::Binary(b) => Value::Binary(!b),
        Value::Numeric(x) => Value::Numeric(x + f64::from(rng.random_range(0u32..=9))),
        _ => return,
    };
    member.set_attribute(a, new);
}

pub fn inject_duplicates<R: Rng + ?Sized>(
    peds: &PedigreeSet,
    spec: &DuplicationSpec,
    rng: &mut R,
) -> Result<Duplicated> {
    let needed = spec.families_needed();
    if needed > peds.len() {
        return Err(Error::Config(format!(
            "duplication needs {needed} distinct families but only {} exist",
            peds.len()
        )));
    }
    if !spec.error_rate.is_finite() || spec.error_rate < 0.0 {
        return Err(Error::Config("error rate must be nonnegative".into()));
    }
    let poisson = if spec.error_rate > 0.0 {
        Some(Poisson::new(spec.error_rate).map_err(|e| Error::Config(e.to_string()))?)
    } else {
        None
    };

    let schema = peds.schema();
    let eligible: Vec<usize> = (0..schema.attributes().len())
        .filter(|&a| !schema.is_structural(a))
        .collect();
    let ids: Vec<&String> = peds.fam_ids().collect();
    let mut next = ids
        .iter()
        .map(|id| id.parse::<u64>().ok())
        .collect::<Option<Vec<u64>>>()
        .map(|v| v.into_iter().max().unwrap_or(0));

    let chosen = sample(rng, ids.len(), needed).into_vec();
    let mut set = peds.clone();
    let mut origins = Vec::with_capacity(spec.total_copies());
    let mut error_counts = Vec::with_capacity(spec.total_copies());
    let mut cursor = chosen.into_iter();
    for &(k, m) in &spec.copies {
        for _ in 0..m {
            let origin = ids[cursor.next().expect("sampled enough families")];
            let source = peds.get(origin).expect("origin exists");
            for copy in 1..=k {
                let id = fresh_id(&set, &mut next, origin, copy);
                let mut dup = source.clone().with_fam_id(&id);
                let errors = poisson.as_ref().map_or(0, |p| p.sample(rng) as usize);
                for _ in 0..errors {
                    apply_error(&mut dup, &eligible, rng);
                }
                set.insert(dup)?;
                origins.push((id, origin.clone()));
                error_counts.push(errors);
            }
        }
    }

    let copied: BTreeSet<&str> = origins.iter().map(|(c, _)| c.as_str()).collect();
    let labels = set
        .fam_ids()
        .filter(|id| !copied.contains(id.as_str()))
        .map(|id| (id.clone(), id.clone()))
        .chain(origins.iter().cloned());
    let truth = Partition::from_labels(labels)?;
    Ok(Duplicated {
        set,
        truth,
        origins,
        error_counts,
    })
}
