use std::collections::{HashMap, HashSet};
use std::fmt;

use super::{Pedigree, Sex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IssueKind {
    NoProband,
    MultipleProbands,
    DuplicateId,
    SingleParent,
    UnresolvedParent(String),
    MotherIsMale(String),
    FatherIsFemale(String),
    Cycle,
}

impl fmt::Display for IssueKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IssueKind::NoProband => f.write_str("no proband"),
            IssueKind::MultipleProbands => f.write_str("multiple probands"),
            IssueKind::DuplicateId => f.write_str("duplicate individual ID"),
            IssueKind::SingleParent => f.write_str("only one parent recorded"),
            IssueKind::UnresolvedParent(p) => write!(f, "parent `{p}` not in family"),
            IssueKind::MotherIsMale(p) => write!(f, "mother `{p}` is male"),
            IssueKind::FatherIsFemale(p) => write!(f, "father `{p}` is female"),
            IssueKind::Cycle => f.write_str("cycle"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Issue {
    pub severity: Severity,
    pub fam_id: String,
    pub indiv_id: Option<String>,
    pub kind: IssueKind,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let level = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        match &self.indiv_id {
            Some(id) => write!(
                f,
                "{level}: family {} individual {id}: {}",
                self.fam_id, self.kind
            ),
            None => write!(f, "{level}: family {}: {}", self.fam_id, self.kind),
        }
    }
}

/// Lists every invariant violation of `ped`. Single-parent records and
/// dangling parent references are warnings unless `strict`.
pub fn validate_pedigree(ped: &Pedigree, strict: bool) -> Vec<Issue> {
    let mut issues = Vec::new();
    let soft = if strict {
        Severity::Error
    } else {
        Severity::Warning
    };
    let mut push = |severity, indiv: Option<&str>, kind| {
        issues.push(Issue {
            severity,
            fam_id: ped.fam_id.clone(),
            indiv_id: indiv.map(str::to_string),
            kind,
        })
    };

    let mut by_id: HashMap<&str, usize> = HashMap::new();
    for (i, m) in ped.members.iter().enumerate() {
        if by_id.insert(m.indiv_id.as_str(), i).is_some() {
            push(Severity::Error, Some(&m.indiv_id), IssueKind::DuplicateId);
        }
    }

    match ped.members.iter().filter(|m| m.is_proband).count() {
        0 => push(Severity::Error, None, IssueKind::NoProband),
        1 => {}
        _ => push(Severity::Error, None, IssueKind::MultipleProbands),
    }

    for m in &ped.members {
        if m.mother_id.is_some() != m.father_id.is_some() {
            push(soft, Some(&m.indiv_id), IssueKind::SingleParent);
        }
        if let Some(mid) = &m.mother_id {
            match by_id.get(mid.as_str()) {
                None => push(
                    soft,
                    Some(&m.indiv_id),
                    IssueKind::UnresolvedParent(mid.clone()),
                ),
                Some(&j) if ped.members[j].sex == Sex::Male => push(
                    Severity::Error,
                    Some(&m.indiv_id),
                    IssueKind::MotherIsMale(mid.clone()),
                ),
                _ => {}
            }
        }
        if let Some(fid) = &m.father_id {
            match by_id.get(fid.as_str()) {
                None => push(
                    soft,
                    Some(&m.indiv_id),
                    IssueKind::UnresolvedParent(fid.clone()),
                ),
                Some(&j) if ped.members[j].sex == Sex::Female => push(
                    Severity::Error,
                    Some(&m.indiv_id),
                    IssueKind::FatherIsFemale(fid.clone()),
                ),
                _ => {}
            }
        }
    }

    for m in &ped.members {
        if is_own_ancestor(ped, &by_id, m.indiv_id.as_str()) {
            push(Severity::Error, Some(&m.indiv_id), IssueKind::Cycle);
        }
    }
    issues
}

fn is_own_ancestor(ped: &Pedigree, by_id: &HashMap<&str, usize>, start: &str) -> bool {
    let parents = |id: &str| -> Vec<&str> {
        by_id
            .get(id)
            .map(|&i| {
                let m = &ped.members[i];
                [&m.mother_id, &m.father_id]
                    .into_iter()
                    .flatten()
                    .map(String::as_str)
                    .collect()
            })
            .unwrap_or_default()
    };
    let mut stack = parents(start);
    let mut visited: HashSet<&str> = HashSet::new();
    while let Some(id) = stack.pop() {
        if id == start {
            return true;
        }
        if visited.insert(id) {
            stack.extend(parents(id));
        }
    }
    false
}
