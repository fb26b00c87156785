//! Relationship derivation from mother/father references.

use std::collections::{BTreeMap, HashSet};

use super::{Individual, Pedigree, RelativeType};

/// Member indices of the seven core relatives; absent entries are missing
/// references.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CoreRelatives {
    slots: [Option<usize>; 7],
}

impl CoreRelatives {
    pub fn get(&self, rel: RelativeType) -> Option<usize> {
        rel.core_index().and_then(|i| self.slots[i])
    }

    pub fn member<'a>(&self, ped: &'a Pedigree, rel: RelativeType) -> Option<&'a Individual> {
        self.get(rel).map(|i| &ped.members[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (RelativeType, usize)> + '_ {
        RelativeType::CORE
            .iter()
            .zip(self.slots.iter())
            .filter_map(|(&t, s)| s.map(|i| (t, i)))
    }

    pub fn len(&self) -> usize {
        self.slots.iter().flatten().count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_map(self) -> BTreeMap<RelativeType, usize> {
        self.iter().collect()
    }
}

pub fn extract_core_relatives(ped: &Pedigree) -> CoreRelatives {
    use RelativeType::*;
    let mut out = CoreRelatives::default();
    let Some(proband) = ped.members.iter().position(|m| m.is_proband) else {
        return out;
    };
    let resolve = |id: &Option<String>| id.as_deref().and_then(|id| ped.member_index(id));
    let mut set = |t: RelativeType, v: Option<usize>| out.slots[t.core_index().unwrap()] = v;

    set(Proband, Some(proband));
    let p = &ped.members[proband];
    let mother = resolve(&p.mother_id);
    let father = resolve(&p.father_id);
    set(Mother, mother);
    set(Father, father);
    if let Some(m) = mother {
        set(MaternalGrandmother, resolve(&ped.members[m].mother_id));
        set(MaternalGrandfather, resolve(&ped.members[m].father_id));
    }
    if let Some(f) = father {
        set(PaternalGrandmother, resolve(&ped.members[f].mother_id));
        set(PaternalGrandfather, resolve(&ped.members[f].father_id));
    }
    out
}

/// Assigns every non-core member to one extended category.
///
/// Children have the proband as a parent; aunts and uncles are the other
/// children of a grandparent couple on either side; cousins are children of
/// aunts and uncles. Everyone else, siblings included, is `Other`.
pub fn classify_extended_relatives(ped: &Pedigree) -> BTreeMap<usize, RelativeType> {
    let core = extract_core_relatives(ped);
    let core_members: HashSet<usize> = core.iter().map(|(_, i)| i).collect();
    let id_of = |slot: Option<usize>| slot.map(|i| ped.members[i].indiv_id.as_str());

    let proband = id_of(core.get(RelativeType::Proband));
    let maternal: Vec<&str> = [
        core.get(RelativeType::MaternalGrandmother),
        core.get(RelativeType::MaternalGrandfather),
    ]
    .into_iter()
    .filter_map(id_of)
    .collect();
    let paternal: Vec<&str> = [
        core.get(RelativeType::PaternalGrandmother),
        core.get(RelativeType::PaternalGrandfather),
    ]
    .into_iter()
    .filter_map(id_of)
    .collect();

    let has_parent_in = |m: &Individual, ids: &[&str]| {
        [&m.mother_id, &m.father_id]
            .into_iter()
            .flatten()
            .any(|p| ids.contains(&p.as_str()))
    };

    let mut out = BTreeMap::new();
    let mut aunts_uncles: Vec<&str> = Vec::new();
    for (i, m) in ped.members.iter().enumerate() {
        if core_members.contains(&i) {
            continue;
        }
        let rel = if proband.is_some_and(|p| has_parent_in(m, &[p])) {
            RelativeType::Children
        } else if has_parent_in(m, &maternal) {
            RelativeType::MaternalAuntsUncles
        } else if has_parent_in(m, &paternal) {
            RelativeType::PaternalAuntsUncles
        } else {
            RelativeType::Other
        };
        if matches!(
            rel,
            RelativeType::MaternalAuntsUncles | RelativeType::PaternalAuntsUncles
        ) {
            aunts_uncles.push(m.indiv_id.as_str());
        }
        out.insert(i, rel);
    }
    for (i, rel) in out.iter_mut() {
        if *rel == RelativeType::Other && has_parent_in(&ped.members[*i], &aunts_uncles) {
            *rel = RelativeType::Cousins;
        }
    }
    out
}
