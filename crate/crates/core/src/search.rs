//! Candidate search: blocking, weighted random sort keys and a sliding window,
//! run separately for each core relative type.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::io::Write;

use rand::Rng;
use rayon::prelude::*;

use crate::pedigree::{extract_core_relatives, PedigreeSet, RelativeType, Sex, VarRef};
use crate::rng::{domain, substream};
use crate::value::{sample_sd, Value, ValueKey};
use crate::{Error, Result};

/// How candidate pairs are turned into duplicate pairs.
#[derive(Debug, Clone, PartialEq)]
pub enum Scorer {
    /// Count of relative types in which a pair is a candidate, compared
    /// against `threshold`.
    Intersection,
    /// Whole-pedigree greedy match score; pairs below the given empirical
    /// percentile of all candidate scores are dropped.
    Greedy { percentile: f64 },
}

/// Parameters of a deduplication run.
#[derive(Debug, Clone, PartialEq)]
pub struct SnipConfig {
    pub key_vars: Vec<String>,
    /// Sampling weights overriding the in-sample standard deviations.
    pub key_weights: Option<BTreeMap<String, f64>>,
    /// Variable read in place of a key variable when the latter is missing,
    /// e.g. current age standing in for the onset age of an unaffected member.
    pub key_fallbacks: BTreeMap<String, String>,
    pub female_only_vars: Vec<String>,
    pub male_only_vars: Vec<String>,
    pub block_vars: Vec<String>,
    pub num_iter: u32,
    pub window: usize,
    pub key_length: usize,
    pub threshold: u8,
    pub priority_var: String,
    pub priority_var_min: bool,
    pub seed: u64,
    pub scorer: Scorer,
}

impl Default for SnipConfig {
    fn default() -> Self {
        SnipConfig {
            key_vars: Vec::new(),
            key_weights: None,
            key_fallbacks: BTreeMap::new(),
            female_only_vars: Vec::new(),
            male_only_vars: Vec::new(),
            block_vars: Vec::new(),
            num_iter: 1,
            window: 20,
            key_length: 1,
            threshold: 6,
            priority_var: crate::pedigree::FAMILY_SIZE.to_string(),
            priority_var_min: true,
            seed: 1,
            scorer: Scorer::Intersection,
        }
    }
}

impl SnipConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.key_vars.is_empty() {
            return fail("keyVars must not be empty".into());
        }
        let keys: HashSet<&str> = self.key_vars.iter().map(String::as_str).collect();
        if keys.len() != self.key_vars.len() {
            return fail("keyVars contains a repeated variable".into());
        }
        if self.num_iter < 1 {
            return fail("numIter must be at least 1".into());
        }
        if self.window < 2 {
            return fail(format!("window must be at least 2, got {}", self.window));
        }
        if self.key_length < 1 || self.key_length > self.key_vars.len() {
            return fail(format!(
                "keyLength must be between 1 and {} (the number of keyVars), got {}",
                self.key_vars.len(),
                self.key_length
            ));
        }
        if !(1..=RelativeType::CORE.len() as u8).contains(&self.threshold) {
            return fail(format!(
                "threshold must be between 1 and {}, got {}",
                RelativeType::CORE.len(),
                self.threshold
            ));
        }
        for v in self.female_only_vars.iter().chain(&self.male_only_vars) {
            if !keys.contains(v.as_str()) {
                return fail(format!("sex-specific variable `{v}` is not in keyVars"));
            }
        }
        if let Some(v) = self
            .female_only_vars
            .iter()
            .find(|v| self.male_only_vars.contains(v))
        {
            return fail(format!("`{v}` is listed as both female-only and male-only"));
        }
        if let Some(v) = self
            .key_fallbacks
            .keys()
            .find(|v| !keys.contains(v.as_str()))
        {
            return fail(format!("keyFallbacks names `{v}`, which is not in keyVars"));
        }
        if let Some(w) = &self.key_weights {
            for v in &self.key_vars {
                match w.get(v) {
                    None => return fail(format!("keyWeights has no entry for `{v}`")),
                    Some(x) if !x.is_finite() || *x < 0.0 => {
                        return fail(format!("keyWeights entry for `{v}` must be nonnegative"))
                    }
                    _ => {}
                }
            }
        }
        if self.priority_var.is_empty() {
            return fail("priorityVar must be set".into());
        }
        if let Scorer::Greedy { percentile } = self.scorer {
            if !(0.0..1.0).contains(&percentile) {
                return fail(format!("percentile must be in [0, 1), got {percentile}"));
            }
        }
        Ok(())
    }

    /// Key variables usable for a relative type once sex-specific variables of
    /// the opposite sex are dropped.
    pub fn key_vars_for(&self, rel: RelativeType) -> Vec<&str> {
        let excluded: &[String] = match rel.implied_sex() {
            Some(Sex::Female) => &self.male_only_vars,
            Some(Sex::Male) => &self.female_only_vars,
            _ => &[],
        };
        self.key_vars
            .iter()
            .filter(|v| !excluded.contains(v))
            .map(String::as_str)
            .collect()
    }
}

/// Unordered family pair; the lexicographically smaller ID comes first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FamPair(String, String);

impl FamPair {
    /// `None` for a self-pair.
    pub fn new(a: impl Into<String>, b: impl Into<String>) -> Option<FamPair> {
        let (a, b) = (a.into(), b.into());
        match a.cmp(&b) {
            Ordering::Less => Some(FamPair(a, b)),
            Ordering::Greater => Some(FamPair(b, a)),
            Ordering::Equal => None,
        }
    }

    pub fn first(&self) -> &str {
        &self.0
    }

    pub fn second(&self) -> &str {
        &self.1
    }
}

impl fmt::Display for FamPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.0, self.1)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CandidatePairSet {
    by_type: BTreeMap<RelativeType, BTreeSet<FamPair>>,
}

impl CandidatePairSet {
    pub fn new() -> Self {
        CandidatePairSet {
            by_type: RelativeType::CORE
                .iter()
                .map(|&t| (t, BTreeSet::new()))
                .collect(),
        }
    }

    pub fn insert(&mut self, rel: RelativeType, pair: FamPair) -> bool {
        self.by_type.entry(rel).or_default().insert(pair)
    }

    pub fn get(&self, rel: RelativeType) -> &BTreeSet<FamPair> {
        static EMPTY: BTreeSet<FamPair> = BTreeSet::new();
        self.by_type.get(&rel).unwrap_or(&EMPTY)
    }

    pub fn iter(&self) -> impl Iterator<Item = (RelativeType, &BTreeSet<FamPair>)> {
        self.by_type.iter().map(|(&t, s)| (t, s))
    }

    /// Every pair that is a candidate in at least one relative type.
    pub fn union(&self) -> BTreeSet<FamPair> {
        self.by_type.values().flatten().cloned().collect()
    }

    pub fn total(&self) -> usize {
        self.by_type.values().map(BTreeSet::len).sum()
    }

    pub fn is_subset(&self, other: &CandidatePairSet) -> bool {
        self.by_type.iter().all(|(t, s)| s.is_subset(other.get(*t)))
    }

    /// Rows of `famID1,famID2,relativeType`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["famID1", "famID2", "relativeType"])?;
        for (rel, pairs) in self.iter() {
            for p in pairs {
                w.write_record([p.first(), p.second(), rel.name()])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Ordered list of variables a block is sorted by.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SortKey(pub Vec<String>);

impl SortKey {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// One row per family that has the given relative; columns are the requested
/// variables looked up on that relative (or on the family).
#[derive(Debug, Clone)]
pub struct RelativeTable {
    pub relative: RelativeType,
    pub fam_ids: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl RelativeTable {
    pub fn build(peds: &PedigreeSet, relative: RelativeType, vars: &[&str]) -> Result<Self> {
        Self::build_with_fallbacks(peds, relative, vars, &BTreeMap::new())
    }

    /// Like [`RelativeTable::build`], but a missing value of a variable listed
    /// in `fallbacks` is replaced by the member's value of its fallback.
    pub fn build_with_fallbacks(
        peds: &PedigreeSet,
        relative: RelativeType,
        vars: &[&str],
        fallbacks: &BTreeMap<String, String>,
    ) -> Result<Self> {
        let refs: Vec<(VarRef, Option<VarRef>)> = vars
            .iter()
            .map(|v| {
                let fb = fallbacks.get(*v).map(|f| peds.resolve(f)).transpose()?;
                Ok((peds.resolve(v)?, fb))
            })
            .collect::<Result<_>>()?;
        let mut fam_ids = Vec::new();
        let mut rows = Vec::new();
        for ped in peds.families() {
            let core = extract_core_relatives(ped);
            let Some(member) = core.member(ped, relative) else {
                continue;
            };
            fam_ids.push(ped.fam_id.clone());
            rows.push(
                refs.iter()
                    .map(|(r, fb)| match (ped.lookup(member, r), fb) {
                        (Value::Missing, Some(f)) => ped.lookup(member, f).clone(),
                        (v, _) => v.clone(),
                    })
                    .collect(),
            );
        }
        Ok(RelativeTable {
            relative,
            fam_ids,
            columns: vars.iter().map(|s| s.to_string()).collect(),
            rows,
        })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column(&self, name: &str) -> Result<usize> {
        self.columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    /// In-sample standard deviation of a column, missing values excluded.
    pub fn column_sd(&self, col: usize) -> f64 {
        sample_sd(self.rows.iter().map(|r| &r[col]))
    }
}

/// Groups rows of `table` by exact equality of their block variables.
///
/// Blocks are returned in the order of their block-value tuples; missing
/// values form their own classes.
pub fn block_partition(table: &RelativeTable, block_vars: &[String]) -> Result<Vec<Vec<usize>>> {
    let cols: Vec<usize> = block_vars
        .iter()
        .map(|v| table.column(v))
        .collect::<Result<_>>()?;
    let mut blocks: BTreeMap<Vec<ValueKey>, Vec<usize>> = BTreeMap::new();
    for (i, row) in table.rows.iter().enumerate() {
        let key = cols.iter().map(|&c| row[c].equality_key()).collect();
        blocks.entry(key).or_default().push(i);
    }
    Ok(blocks.into_values().collect())
}

/// Draws up to `key_length` distinct variable indices one at a time, each
/// with probability proportional to its weight among those not yet drawn.
pub(crate) fn draw_key<R: Rng + ?Sized>(
    weights: &[f64],
    key_length: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    let mut remaining: Vec<usize> = (0..weights.len()).filter(|&i| weights[i] > 0.0).collect();
    if remaining.is_empty() {
        return Err(Error::NoWeightedVariable);
    }
    let len = key_length.min(remaining.len());
    let mut key = Vec::with_capacity(len);
    while key.len() < len {
        let total: f64 = remaining.iter().map(|&i| weights[i]).sum();
        let mut u = rng.random::<f64>() * total;
        let mut pick = remaining.len() - 1;
        for (pos, &i) in remaining.iter().enumerate() {
            if u < weights[i] {
                pick = pos;
                break;
            }
            u -= weights[i];
        }
        key.push(remaining.remove(pick));
    }
    Ok(key)
}

/// Random sort key over `candidates` (name, weight); zero-weight variables
/// are never drawn and the key is truncated to the positive-weight count.
pub fn generate_sort_key<R: Rng + ?Sized>(
    candidates: &[(String, f64)],
    key_length: usize,
    rng: &mut R,
) -> Result<SortKey> {
    let weights: Vec<f64> = candidates.iter().map(|(_, w)| *w).collect();
    let idx = draw_key(&weights, key_length, rng)?;
    Ok(SortKey(
        idx.into_iter().map(|i| candidates[i].0.clone()).collect(),
    ))
}

fn compare_keyed(a: &[&Value], b: &[&Value]) -> Ordering {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// Pairs each position of `sorted` with the next `window - 1` positions.
fn window_pairs<T: Copy>(sorted: &[T], window: usize, mut emit: impl FnMut(T, T)) {
    for (i, &a) in sorted.iter().enumerate() {
        for &b in sorted.iter().skip(i + 1).take(window.saturating_sub(1)) {
            emit(a, b);
        }
    }
}

/// Family of a block with its values for the sort key variables, in key order.
#[derive(Debug, Clone, PartialEq)]
pub struct KeyedFamily {
    pub fam_id: String,
    pub key: Vec<Value>,
}

/// Sorts the block by its key values (ties by famID) and pairs every family
/// with the `window - 1` families after it.
pub fn sorted_neighborhood_pairs(block: &[KeyedFamily], window: usize) -> BTreeSet<FamPair> {
    let mut order: Vec<&KeyedFamily> = block.iter().collect();
    order.sort_by(|a, b| {
        let ka: Vec<&Value> = a.key.iter().collect();
        let kb: Vec<&Value> = b.key.iter().collect();
        compare_keyed(&ka, &kb).then_with(|| a.fam_id.cmp(&b.fam_id))
    });
    let mut out = BTreeSet::new();
    window_pairs(&order, window, |a, b| {
        if let Some(p) = FamPair::new(a.fam_id.as_str(), b.fam_id.as_str()) {
            out.insert(p);
        }
    });
    out
}

/// Candidate pairs for one relative type, as row-index pairs of its table.
fn search_relative(
    table: &RelativeTable,
    key_cols: &[usize],
    weights: &[f64],
    blocks: &[Vec<usize>],
    cfg: &SnipConfig,
) -> Result<HashSet<(usize, usize)>> {
    let rel_label = table.relative.core_index().unwrap_or(0) as u64;
    let per_block: Vec<Result<Vec<(usize, usize)>>> = blocks
        .par_iter()
        .enumerate()
        .map(|(b, rows)| {
            let mut pairs = Vec::new();
            if rows.len() < 2 {
                return Ok(pairs);
            }
            for iter in 0..cfg.num_iter {
                let mut rng = substream(
                    cfg.seed,
                    &[domain::SEARCH, rel_label, b as u64, u64::from(iter)],
                );
                let key = draw_key(weights, cfg.key_length, &mut rng)?;
                let cols: Vec<usize> = key.iter().map(|&k| key_cols[k]).collect();
                let mut sorted = rows.clone();
                sorted.sort_by(|&x, &y| {
                    let rx = &table.rows[x];
                    let ry = &table.rows[y];
                    cols.iter()
                        .map(|&c| rx[c].total_cmp(&ry[c]))
                        .find(|o| o.is_ne())
                        .unwrap_or(Ordering::Equal)
                        .then_with(|| table.fam_ids[x].cmp(&table.fam_ids[y]))
                });
                window_pairs(&sorted, cfg.window, |x, y| {
                    pairs.push(if x < y { (x, y) } else { (y, x) })
                });
            }
            Ok(pairs)
        })
        .collect();
    let mut out = HashSet::new();
    for r in per_block {
        out.extend(r?);
    }
    Ok(out)
}

/// Sampling weights of the key variables of a relative-type table: the user
/// weights when configured, otherwise the column standard deviations.
pub fn key_weights(table: &RelativeTable, key_cols: &[usize], cfg: &SnipConfig) -> Vec<f64> {
    key_cols
        .iter()
        .map(|&c| match &cfg.key_weights {
            Some(w) => w[&table.columns[c]],
            None => table.column_sd(c),
        })
        .collect()
}

/// Runs the search step over all seven core relative types.
pub fn search_candidates(peds: &PedigreeSet, cfg: &SnipConfig) -> Result<CandidatePairSet> {
    cfg.validate()?;
    for v in cfg
        .key_vars
        .iter()
        .chain(&cfg.block_vars)
        .chain(cfg.key_fallbacks.values())
    {
        peds.resolve(v)?;
    }
    let per_type: Vec<Result<(RelativeType, BTreeSet<FamPair>)>> = RelativeType::CORE
        .par_iter()
        .map(|&rel| {
            let key_vars = cfg.key_vars_for(rel);
            let mut vars: Vec<&str> = key_vars.clone();
            vars.extend(cfg.block_vars.iter().map(String::as_str));
            let table = RelativeTable::build_with_fallbacks(peds, rel, &vars, &cfg.key_fallbacks)?;
            let mut pairs = BTreeSet::new();
            if table.len() < 2 {
                return Ok((rel, pairs));
            }
            let key_cols: Vec<usize> = (0..key_vars.len()).collect();
            let weights = key_weights(&table, &key_cols, cfg);
            if !weights.iter().any(|&w| w > 0.0) {
                return Err(Error::NoWeightedVariable);
            }
            let block_names: Vec<String> = cfg.block_vars.clone();
            let block_table = RelativeTable {
                relative: rel,
                fam_ids: Vec::new(),
                columns: table.columns[key_vars.len()..].to_vec(),
                rows: table
                    .rows
                    .iter()
                    .map(|r| r[key_vars.len()..].to_vec())
                    .collect(),
            };
            let blocks = block_partition(&block_table, &block_names)?;
            for (x, y) in search_relative(&table, &key_cols, &weights, &blocks, cfg)? {
                if let Some(p) = FamPair::new(table.fam_ids[x].as_str(), table.fam_ids[y].as_str())
                {
                    pairs.insert(p);
                }
            }
            Ok((rel, pairs))
        })
        .collect();
    let mut out = CandidatePairSet::new();
    for r in per_type {
        let (rel, pairs) = r?;
        out.by_type.insert(rel, pairs);
    }
    Ok(out)
}
