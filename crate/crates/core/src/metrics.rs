//! Partition comparison: pairwise F1, cluster F1 and unit-cost generalized
//! merge distance.

use std::collections::{BTreeSet, HashMap};
use std::fmt::{self, Write as _};

use crate::clustering::Partition;
use crate::Result;

/// Precision, recall and F1; `None` marks an undefined value (zero
/// denominator).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prf {
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

fn harmonic(p: Option<f64>, r: Option<f64>) -> Option<f64> {
    match (p, r) {
        (Some(p), Some(r)) if p + r > 0.0 => Some(2.0 * p * r / (p + r)),
        (Some(_), Some(_)) => Some(0.0),
        _ => None,
    }
}

fn pairs_in(size: u64) -> u64 {
    size * size.saturating_sub(1) / 2
}

/// Sizes of the nonempty cells of the alg × truth contingency table, grouped
/// by algorithm cluster.
fn contingency(alg: &Partition, truth: &Partition) -> Vec<HashMap<usize, u64>> {
    alg.clusters()
        .iter()
        .map(|c| {
            let mut cells = HashMap::new();
            for id in c {
                let t = truth.cluster_of(id).expect("checked universe");
                *cells.entry(t).or_insert(0) += 1;
            }
            cells
        })
        .collect()
}

pub fn pairwise_f1(alg: &Partition, truth: &Partition) -> Result<Prf> {
    alg.same_universe(truth)?;
    let alg_pairs: u64 = alg
        .clusters()
        .iter()
        .map(|c| pairs_in(c.len() as u64))
        .sum();
    let truth_pairs: u64 = truth
        .clusters()
        .iter()
        .map(|c| pairs_in(c.len() as u64))
        .sum();
    let common: u64 = contingency(alg, truth)
        .iter()
        .flat_map(|cells| cells.values())
        .map(|&n| pairs_in(n))
        .sum();
    let precision = ratio(common, alg_pairs);
    let recall = ratio(common, truth_pairs);
    Ok(Prf {
        precision,
        recall,
        f1: harmonic(precision, recall),
    })
}

/// Cluster F1 is always defined for nonempty partitions; `degenerate` flags
/// the P + R = 0 case reported as F1 = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterPrf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub degenerate: bool,
}

pub fn cluster_f1(alg: &Partition, truth: &Partition) -> Result<ClusterPrf> {
    alg.same_universe(truth)?;
    let truth_set: BTreeSet<&Vec<String>> = truth.clusters().iter().collect();
    let matches = alg
        .clusters()
        .iter()
        .filter(|c| truth_set.contains(c))
        .count() as u64;
    let precision = ratio(matches, alg.len() as u64).unwrap_or(0.0);
    let recall = ratio(matches, truth.len() as u64).unwrap_or(0.0);
    let degenerate = precision + recall == 0.0;
    let f1 = if degenerate {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    Ok(ClusterPrf {
        precision,
        recall,
        f1,
        degenerate,
    })
}

/// Minimum number of binary splits plus binary merges that turn `source` into
/// `target`.
///
/// Link each source cluster to every target cluster it overlaps. A connected
/// group of `s` source and `t` target clusters needs at least `s - 1` merges
/// to join its elements and `t - 1` splits to separate them again, and
/// merging the whole group then splitting it off reaches that bound. Summed
/// over `c` groups this is `S + T - 2c`.
pub fn gmd(source: &Partition, target: &Partition) -> Result<u64> {
    source.same_universe(target)?;
    let (s, t) = (source.len(), target.len());
    let mut parent: Vec<usize> = (0..s + t).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut groups = s + t;
    for (i, cells) in contingency(source, target).iter().enumerate() {
        for &j in cells.keys() {
            let (a, b) = (find(&mut parent, i), find(&mut parent, s + j));
            if a != b {
                parent[a] = b;
                groups -= 1;
            }
        }
    }
    Ok((s + t - 2 * groups) as u64)
}

/// Cost of the direct route: split every source cluster into its overlaps
/// with target clusters, then merge the pieces of each target cluster. Never
/// below [`gmd`], and above it when clusters are shuffled across each other.
pub fn gmd_by_slices(source: &Partition, target: &Partition) -> Result<u64> {
    source.same_universe(target)?;
    let cells = contingency(source, target);
    let splits: u64 = cells.iter().map(|c| c.len() as u64 - 1).sum();
    let mut parts_per_target = vec![0u64; target.len()];
    for c in &cells {
        for &t in c.keys() {
            parts_per_target[t] += 1;
        }
    }
    let merges: u64 = parts_per_target.iter().map(|&n| n.saturating_sub(1)).sum();
    Ok(splits + merges)
}

/// Whether a configuration qualifies for metric computation: the algorithm
/// partition must have at least half as many clusters as the truth.
pub fn passes_cluster_count_guard(alg: &Partition, truth: &Partition) -> bool {
    2 * alg.len() >= truth.len()
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub pairwise: Prf,
    pub cluster: ClusterPrf,
    pub gmd: u64,
}

impl MetricReport {
    pub fn compute(alg: &Partition, truth: &Partition) -> Result<MetricReport> {
        Ok(MetricReport {
            pairwise: pairwise_f1(alg, truth)?,
            cluster: cluster_f1(alg, truth)?,
            gmd: gmd(alg, truth)?,
        })
    }

    fn fields(&self) -> Vec<(&'static str, String)> {
        let opt = |x: Option<f64>| x.map_or_else(|| "undefined".to_string(), |v| format!("{v:.6}"));
        vec![
            ("pairwisePrecision", opt(self.pairwise.precision)),
            ("pairwiseRecall", opt(self.pairwise.recall)),
            ("pairwiseF1", opt(self.pairwise.f1)),
            ("clusterPrecision", format!("{:.6}", self.cluster.precision)),
            ("clusterRecall", format!("{:.6}", self.cluster.recall)),
            ("clusterF1", format!("{:.6}", self.cluster.f1)),
            (
                "clusterF1Degenerate",
                u8::from(self.cluster.degenerate).to_string(),
            ),
            ("gmd", self.gmd.to_string()),
        ]
    }

    pub fn csv_header() -> String {
        MetricReport {
            pairwise: Prf {
                precision: None,
                recall: None,
                f1: None,
            },
            cluster: ClusterPrf {
                precision: 0.0,
                recall: 0.0,
                f1: 0.0,
                degenerate: false,
            },
            gmd: 0,
        }
        .fields()
        .iter()
        .map(|(k, _)| *k)
        .collect::<Vec<_>>()
        .join(",")
    }

    pub fn csv_row(&self) -> String {
        self.fields()
            .into_iter()
            .map(|(_, v)| v)
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// Flat `key = value` record.
impl fmt::Display for MetricReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        for (k, v) in self.fields() {
            writeln!(s, "{k} = {v}")?;
        }
        f.write_str(&s)
    }
}
