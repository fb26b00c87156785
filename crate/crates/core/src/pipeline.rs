//! End-to-end deduplication: search, decision, clustering, representatives.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use crate::clustering::{connected_components, deduplicate, select_representatives, Partition};
use crate::config::snip_config_text;
use crate::decision::{
    greedy_scores, intersection_scores, percentile_filter, threshold_pairs, GreedyScores,
    GreedyVars, IntersectionScores,
};
use crate::pedigree::{validate_pedigree, Issue, PedigreeSet, Severity};
use crate::search::{search_candidates, CandidatePairSet, FamPair, Scorer, SnipConfig};
use crate::{Error, Result};

/// Runs structural validation over every family. Errors abort; warnings are
/// returned.
pub fn check_pedigrees(peds: &PedigreeSet, strict: bool) -> Result<Vec<Issue>> {
    let mut warnings = Vec::new();
    for ped in peds.families() {
        for issue in validate_pedigree(ped, strict) {
            if issue.severity == Severity::Error {
                return Err(Error::InvalidPedigree {
                    fam_id: issue.fam_id.clone(),
                    message: issue.to_string(),
                });
            }
            warnings.push(issue);
        }
    }
    Ok(warnings)
}

#[derive(Debug, Clone)]
pub enum Scores {
    Intersection(IntersectionScores),
    Greedy(GreedyScores),
}

impl Scores {
    /// Pair scores as CSV rows.
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        match self {
            Scores::Intersection(s) => crate::decision::write_scores_csv(s, w),
            Scores::Greedy(s) => crate::decision::write_scores_csv(s, w),
        }
    }
}

#[derive(Debug, Clone)]
pub struct DedupOutcome {
    pub candidates: CandidatePairSet,
    pub scores: Scores,
    pub duplicate_pairs: BTreeSet<FamPair>,
    pub partition: Partition,
    /// Representative famID per cluster, aligned with the partition.
    pub representatives: Vec<String>,
    pub deduplicated: PedigreeSet,
}

/// Decision step for the configured scorer.
pub fn decide(
    peds: &PedigreeSet,
    cands: &CandidatePairSet,
    cfg: &SnipConfig,
) -> Result<(Scores, BTreeSet<FamPair>)> {
    match cfg.scorer {
        Scorer::Intersection => {
            let s = intersection_scores(cands);
            let pairs = threshold_pairs(&s, cfg.threshold)?;
            Ok((Scores::Intersection(s), pairs))
        }
        Scorer::Greedy { percentile } => {
            let vars = match &cfg.key_weights {
                Some(w) => {
                    let ws: Vec<f64> = cfg.key_vars.iter().map(|v| w[v]).collect();
                    GreedyVars::new(peds, &cfg.key_vars, &ws)?
                }
                None => GreedyVars::with_sd_weights(peds, &cfg.key_vars)?,
            };
            let s = greedy_scores(peds, &cands.union(), &vars)?;
            let pairs = if s.is_empty() {
                BTreeSet::new()
            } else {
                percentile_filter(&s, percentile)?
            };
            Ok((Scores::Greedy(s), pairs))
        }
    }
}

pub fn run_snip(peds: &PedigreeSet, cfg: &SnipConfig) -> Result<DedupOutcome> {
    cfg.validate()?;
    // Fails early on an unknown priority variable.
    peds.resolve(&cfg.priority_var)?;
    let candidates = search_candidates(peds, cfg)?;
    let (scores, duplicate_pairs) = decide(peds, &candidates, cfg)?;
    let partition = connected_components(peds.fam_ids(), &duplicate_pairs)?;
    let representatives =
        select_representatives(&partition, peds, &cfg.priority_var, cfg.priority_var_min)?;
    let deduplicated = deduplicate(peds, &representatives);
    Ok(DedupOutcome {
        candidates,
        scores,
        duplicate_pairs,
        partition,
        representatives,
        deduplicated,
    })
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Record of one deduplication run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub config: SnipConfig,
    pub input_path: String,
    pub input_sha256: String,
    /// Output file names, relative to the manifest.
    pub outputs: Vec<String>,
    pub runtime_seconds: f64,
    pub input_families: usize,
    pub clusters: usize,
    pub cluster_sizes: BTreeMap<usize, usize>,
}

pub const RUNTIME_KEY: &str = "runtimeSeconds";

impl RunManifest {
    pub fn removed_families(&self) -> usize {
        self.input_families - self.clusters
    }

    /// Key-value sections followed by the cluster-size table as CSV.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "[run]");
        let _ = writeln!(s, "input = {}", self.input_path);
        let _ = writeln!(s, "inputSha256 = {}", self.input_sha256);
        let _ = writeln!(s, "outputs = {}", self.outputs.join(","));
        let _ = writeln!(s, "{RUNTIME_KEY} = {:.3}", self.runtime_seconds);
        let _ = writeln!(s, "inputFamilies = {}", self.input_families);
        let _ = writeln!(s, "clusters = {}", self.clusters);
        let _ = writeln!(s, "removedFamilies = {}", self.removed_families());
        let _ = writeln!(s);
        let _ = writeln!(s, "[config]");
        s.push_str(&snip_config_text(&self.config));
        let _ = writeln!(s);
        let _ = writeln!(s, "[cluster_sizes]");
        let _ = writeln!(s, "clusterSize,count");
        for (size, count) in &self.cluster_sizes {
            let _ = writeln!(s, "{size},{count}");
        }
        s
    }

    /// Splits manifest text into its `[config]` body and cluster-size table.
    pub fn parse_sections(text: &str) -> BTreeMap<String, String> {
        let mut out: BTreeMap<String, String> = BTreeMap::new();
        let mut current = String::new();
        for line in text.lines() {
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                current = name.to_string();
                out.entry(current.clone()).or_default();
            } else if !line.trim().is_empty() {
                let body = out.entry(current.clone()).or_default();
                body.push_str(line);
                body.push('\n');
            }
        }
        out
    }
}
