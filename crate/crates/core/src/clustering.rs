//! Clustering step: transitive closure of duplicate pairs, representative
//! selection and the deduplicated output.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::{Read, Write};

use crate::pedigree::{Pedigree, PedigreeSet, VarRef};
use crate::search::FamPair;
use crate::value::Value;
use crate::{Error, Result};

/// Disjoint union-find over `0..n` with path compression and union by rank.
#[derive(Debug, Clone)]
pub struct DisjointSet {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl DisjointSet {
    pub fn new(n: usize) -> Self {
        DisjointSet {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[x] != root {
            let next = self.parent[x];
            self.parent[x] = root;
            x = next;
        }
        root
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.rank[a] < self.rank[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        if self.rank[a] == self.rank[b] {
            self.rank[a] += 1;
        }
        true
    }
}

/// Disjoint clusters covering a family-ID universe.
///
/// Stored canonically: IDs sorted within each cluster, clusters ordered by
/// their smallest ID.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    clusters: Vec<Vec<String>>,
    index: HashMap<String, usize>,
}

impl Partition {
    pub fn from_clusters(clusters: Vec<Vec<String>>) -> Result<Partition> {
        let mut clusters: Vec<Vec<String>> = clusters
            .into_iter()
            .map(|mut c| {
                c.sort();
                c
            })
            .collect();
        if clusters.iter().any(Vec::is_empty) {
            return Err(Error::InvalidPartition("empty cluster".into()));
        }
        clusters.sort();
        let mut index = HashMap::new();
        for (i, c) in clusters.iter().enumerate() {
            for id in c {
                if index.insert(id.clone(), i).is_some() {
                    return Err(Error::InvalidPartition(format!(
                        "family `{id}` appears in more than one cluster"
                    )));
                }
            }
        }
        Ok(Partition { clusters, index })
    }

    pub fn singletons<'a>(ids: impl IntoIterator<Item = &'a str>) -> Result<Partition> {
        Partition::from_clusters(ids.into_iter().map(|s| vec![s.to_string()]).collect())
    }

    /// Groups IDs by a label, e.g. a cluster ID or an origin family.
    pub fn from_labels<I, A, B>(labels: I) -> Result<Partition>
    where
        I: IntoIterator<Item = (A, B)>,
        A: Into<String>,
        B: Into<String>,
    {
        let mut groups: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for (id, label) in labels {
            groups.entry(label.into()).or_default().push(id.into());
        }
        Partition::from_clusters(groups.into_values().collect())
    }

    pub fn clusters(&self) -> &[Vec<String>] {
        &self.clusters
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    pub fn universe_size(&self) -> usize {
        self.index.len()
    }

    pub fn cluster_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    /// Cluster size → number of clusters of that size.
    pub fn size_histogram(&self) -> BTreeMap<usize, usize> {
        let mut h = BTreeMap::new();
        for c in &self.clusters {
            *h.entry(c.len()).or_insert(0) += 1;
        }
        h
    }

    pub fn same_universe(&self, other: &Partition) -> Result<()> {
        if self.index.len() != other.index.len() {
            return Err(Error::UniverseMismatch(format!(
                "{} vs {} families",
                self.index.len(),
                other.index.len()
            )));
        }
        if let Some(id) = self.index.keys().find(|id| !other.index.contains_key(*id)) {
            return Err(Error::UniverseMismatch(format!(
                "family `{id}` missing from one partition"
            )));
        }
        Ok(())
    }
}

/// Connected components of the graph with vertices `all` and edges `pairs`.
pub fn connected_components<'a, I>(all: I, pairs: &BTreeSet<FamPair>) -> Result<Partition>
where
    I: IntoIterator<Item = &'a String>,
{
    let ids: Vec<&String> = all.into_iter().collect();
    let pos: HashMap<&str, usize> = ids
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();
    let mut dsu = DisjointSet::new(ids.len());
    for p in pairs {
        let a = *pos
            .get(p.first())
            .ok_or_else(|| Error::UnknownFamily(p.first().to_string()))?;
        let b = *pos
            .get(p.second())
            .ok_or_else(|| Error::UnknownFamily(p.second().to_string()))?;
        dsu.union(a, b);
    }
    let mut groups: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for (i, id) in ids.iter().enumerate() {
        groups.entry(dsu.find(i)).or_default().push((*id).clone());
    }
    Partition::from_clusters(groups.into_values().collect())
}

/// Priority value of a family: family metadata first, then the proband's
/// attribute of that name.
fn priority_value<'a>(ped: &'a Pedigree, var: &VarRef, name: &str) -> &'a Value {
    if let Some(v) = ped.metadata.get(name) {
        return v;
    }
    match (var, ped.proband()) {
        (VarRef::Attribute(_), Some(p)) => ped.lookup(p, var),
        _ => &Value::Missing,
    }
}

/// One representative per cluster (indexed like [`Partition::clusters`]):
/// the family with the smallest (or largest) priority value. Missing values
/// never win over present ones; ties go to the smallest famID.
pub fn select_representatives(
    part: &Partition,
    peds: &PedigreeSet,
    priority_var: &str,
    priority_var_min: bool,
) -> Result<Vec<String>> {
    let var = peds.resolve(priority_var)?;
    part.clusters()
        .iter()
        .map(|cluster| {
            let mut best: Option<(&String, &Value)> = None;
            for id in cluster {
                let ped = peds
                    .get(id)
                    .ok_or_else(|| Error::UnknownFamily(id.clone()))?;
                let v = priority_value(ped, &var, priority_var);
                let better = match best {
                    None => true,
                    Some((bid, bv)) => {
                        let ord = match (v.is_missing(), bv.is_missing()) {
                            (true, true) => Ordering::Equal,
                            (true, false) => Ordering::Greater,
                            (false, true) => Ordering::Less,
                            _ if priority_var_min => v.total_cmp(bv),
                            _ => bv.total_cmp(v),
                        };
                        ord == Ordering::Less || (ord == Ordering::Equal && id < bid)
                    }
                };
                if better {
                    best = Some((id, v));
                }
            }
            Ok(best
                .map(|(id, _)| id.clone())
                .expect("clusters are nonempty"))
        })
        .collect()
}

/// Families whose IDs are representatives, rows unchanged and in input order.
pub fn deduplicate(peds: &PedigreeSet, reps: &[String]) -> PedigreeSet {
    let keep: BTreeSet<&str> = reps.iter().map(String::as_str).collect();
    peds.retain_families(|id| keep.contains(id))
}

/// Rows of `famID,clusterID,isRepresentative`, clusters numbered from 1.
pub fn write_clusters_csv<W: Write>(part: &Partition, reps: &[String], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["famID", "clusterID", "isRepresentative"])?;
    for (i, cluster) in part.clusters().iter().enumerate() {
        let cid = (i + 1).to_string();
        for id in cluster {
            let rep = if reps.get(i) == Some(id) { "1" } else { "0" };
            w.write_record([id.as_str(), cid.as_str(), rep])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads any two-or-more column CSV whose first column is a famID and whose
/// second column labels its cluster (clusters CSV or truth CSV).
pub fn read_partition_csv<R: Read>(reader: R) -> Result<Partition> {
    let mut rdr = csv::Reader::from_reader(reader);
    let mut labels = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        if rec.len() < 2 {
            return Err(Error::InvalidPartition(
                "expected at least two columns (famID, label)".into(),
            ));
        }
        labels.push((rec[0].to_string(), rec[1].to_string()));
    }
    Partition::from_labels(labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pedigree::{read_csv, ParseOptions};
    use proptest::prelude::*;

    fn ids(n: usize) -> Vec<String> {
        (0..n).map(|i| i.to_string()).collect()
    }

    fn pair(a: &str, b: &str) -> FamPair {
        FamPair::new(a, b).unwrap()
    }

    #[test]
    fn chain_merges() {
        let all = ids(5);
        let pairs = [pair("1", "2"), pair("2", "3")].into();
        let part = connected_components(&all, &pairs).unwrap();
        assert_eq!(part.len(), 3);
        assert_eq!(part.cluster_of("1"), part.cluster_of("3"));
        assert_ne!(part.cluster_of("0"), part.cluster_of("1"));
    }

    #[test]
    fn no_pairs_all_singletons() {
        let all = ids(4);
        let part = connected_components(&all, &BTreeSet::new()).unwrap();
        assert_eq!(part.len(), 4);
    }

    #[test]
    fn unknown_family_in_pair() {
        let all = ids(2);
        let pairs = [pair("0", "9")].into();
        assert!(matches!(
            connected_components(&all, &pairs),
            Err(Error::UnknownFamily(_))
        ));
    }

    #[test]
    fn partition_rejects_overlap_and_empty() {
        assert!(Partition::from_clusters(vec![vec!["a".into()], vec!["a".into()]]).is_err());
        assert!(Partition::from_clusters(vec![vec![]]).is_err());
    }

    fn reachability_oracle(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<bool>> {
        let mut r = vec![vec![false; n]; n];
        for (i, row) in r.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(a, b) in edges {
            r[a][b] = true;
            r[b][a] = true;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if r[i][k] && r[k][j] {
                        r[i][j] = true;
                    }
                }
            }
        }
        r
    }

    proptest! {
        #[test]
        fn components_match_transitive_closure(
            n in 1usize..=20,
            raw in proptest::collection::vec((0usize..20, 0usize..20), 0..30),
        ) {
            let edges: Vec<(usize, usize)> =
                raw.into_iter().filter(|&(a, b)| a < n && b < n && a != b).collect();
            let all = ids(n);
            let pairs = edges.iter().map(|&(a, b)| pair(&all[a], &all[b])).collect();
            let part = connected_components(&all, &pairs).unwrap();
            let reach = reachability_oracle(n, &edges);
            for i in 0..n {
                for j in 0..n {
                    prop_assert_eq!(
                        part.cluster_of(&all[i]) == part.cluster_of(&all[j]),
                        reach[i][j]
                    );
                }
            }
            prop_assert_eq!(part.universe_size(), n);
        }
    }

    fn families() -> PedigreeSet {
        let csv = "FamID,ID,MotherID,FatherID,isProband,entry\n\
                   A,1,NA,NA,1,2019\nB,1,NA,NA,1,2017\nC,1,NA,NA,1,NA\nD,1,NA,NA,1,2017\n";
        read_csv(csv.as_bytes(), &ParseOptions::default()).unwrap()
    }

    #[test]
    fn oldest_entry_wins() {
        let set = families();
        let part =
            Partition::from_clusters(vec![vec!["A".into(), "B".into(), "C".into()]]).unwrap();
        assert_eq!(
            select_representatives(&part, &set, "entry", true).unwrap(),
            vec!["B"]
        );
        assert_eq!(
            select_representatives(&part, &set, "entry", false).unwrap(),
            vec!["A"]
        );
    }

    #[test]
    fn ties_go_to_smaller_fam_id() {
        let set = families();
        let part = Partition::from_clusters(vec![vec!["D".into(), "B".into()]]).unwrap();
        assert_eq!(
            select_representatives(&part, &set, "entry", true).unwrap(),
            vec!["B"]
        );
    }

    #[test]
    fn missing_priority_loses() {
        let set = families();
        let part = Partition::from_clusters(vec![vec!["A".into(), "C".into()]]).unwrap();
        assert_eq!(
            select_representatives(&part, &set, "entry", false).unwrap(),
            vec!["A"]
        );
        assert_eq!(
            select_representatives(&part, &set, "entry", true).unwrap(),
            vec!["A"]
        );
        let only_missing = Partition::from_clusters(vec![vec!["C".into()]]).unwrap();
        assert_eq!(
            select_representatives(&only_missing, &set, "entry", true).unwrap(),
            vec!["C"]
        );
    }

    #[test]
    fn unknown_priority_var() {
        let set = families();
        let part = Partition::singletons(["A"]).unwrap();
        assert!(matches!(
            select_representatives(&part, &set, "nope", true),
            Err(Error::UnknownVariable(_))
        ));
    }

    #[test]
    fn dedup_keeps_representatives_in_order() {
        let set = families();
        let all: Vec<String> = set.fam_ids().cloned().collect();
        let pairs = [pair("A", "B"), pair("C", "D")].into();
        let part = connected_components(&all, &pairs).unwrap();
        let reps = select_representatives(&part, &set, "entry", true).unwrap();
        let out = deduplicate(&set, &reps);
        assert_eq!(out.len(), 2);
        assert_eq!(out.fam_ids().cloned().collect::<Vec<_>>(), vec!["B", "D"]);
    }

    #[test]
    fn clusters_csv_round_trip() {
        let part =
            Partition::from_clusters(vec![vec!["a".into(), "b".into()], vec!["c".into()]]).unwrap();
        let mut buf = Vec::new();
        write_clusters_csv(&part, &["b".into(), "c".into()], &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(
            text,
            "famID,clusterID,isRepresentative\na,1,0\nb,1,1\nc,2,1\n"
        );
        assert_eq!(read_partition_csv(buf.as_slice()).unwrap(), part);
    }
}
