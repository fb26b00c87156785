//! Flat `key = value` configuration files.
//!
//! Lines starting with `#` and blank lines are ignored. Lists are comma
//! separated; maps are comma-separated `name:value` entries.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use indexmap::IndexMap;

use crate::search::{Scorer, SnipConfig};
use crate::simgen::{Cancer, CancerSex, Gene, PenetranceTable, SimulationConfig};
use crate::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct KeyValues {
    entries: IndexMap<String, String>,
}

impl KeyValues {
    pub fn parse(text: &str) -> Result<KeyValues> {
        let mut entries = IndexMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", n + 1)))?;
            let k = k.trim().to_string();
            if k.is_empty() {
                return Err(Error::Config(format!("line {}: empty key", n + 1)));
            }
            if entries.insert(k.clone(), v.trim().to_string()).is_some() {
                return Err(Error::Config(format!("key `{k}` given twice")));
            }
        }
        Ok(KeyValues { entries })
    }

    pub fn read(path: &Path) -> Result<KeyValues> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        KeyValues::parse(&text)
    }

    /// Sets or replaces a value, as command-line overrides do.
    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.entries.insert(key.to_string(), value.into());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    fn reject_unknown(&self, known: &[&str]) -> Result<()> {
        match self.keys().find(|k| !known.contains(k)) {
            Some(k) => Err(Error::Config(format!("unknown configuration key `{k}`"))),
            None => Ok(()),
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, raw: &str) -> Result<T> {
    raw.trim()
        .parse()
        .map_err(|_| Error::Config(format!("`{key}`: cannot parse `{raw}`")))
}

fn parse_bool(key: &str, raw: &str) -> Result<bool> {
    match raw.trim().to_ascii_lowercase().as_str() {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(Error::Config(format!(
            "`{key}`: expected true or false, got `{raw}`"
        ))),
    }
}

fn parse_list(raw: &str) -> Vec<String> {
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(String::from)
        .collect()
}

fn parse_pairs(key: &str, raw: &str) -> Result<Vec<(String, String)>> {
    parse_list(raw)
        .into_iter()
        .map(|e| {
            e.split_once(':')
                .map(|(a, b)| (a.trim().to_string(), b.trim().to_string()))
                .ok_or_else(|| Error::Config(format!("`{key}`: expected name:value, got `{e}`")))
        })
        .collect()
}

const DEDUP_KEYS: &[&str] = &[
    "keyVars",
    "keyWeights",
    "keyFallbacks",
    "femaleOnlyVars",
    "maleOnlyVars",
    "blockVars",
    "numIter",
    "window",
    "keyLength",
    "threshold",
    "priorityVar",
    "priorityVarMin",
    "seed",
    "scorer",
    "percentile",
];

/// Builds a deduplication config. `keyLength = all` uses every key variable.
pub fn snip_config(kv: &KeyValues) -> Result<SnipConfig> {
    kv.reject_unknown(DEDUP_KEYS)?;
    let mut cfg = SnipConfig::default();
    if let Some(v) = kv.get("keyVars") {
        cfg.key_vars = parse_list(v);
    }
    if let Some(v) = kv.get("keyWeights") {
        let mut w = BTreeMap::new();
        for (name, x) in parse_pairs("keyWeights", v)? {
            w.insert(name, parse_num::<f64>("keyWeights", &x)?);
        }
        cfg.key_weights = Some(w);
    }
    if let Some(v) = kv.get("keyFallbacks") {
        cfg.key_fallbacks = parse_pairs("keyFallbacks", v)?.into_iter().collect();
    }
    if let Some(v) = kv.get("femaleOnlyVars") {
        cfg.female_only_vars = parse_list(v);
    }
    if let Some(v) = kv.get("maleOnlyVars") {
        cfg.male_only_vars = parse_list(v);
    }
    if let Some(v) = kv.get("blockVars") {
        cfg.block_vars = parse_list(v);
    }
    if let Some(v) = kv.get("numIter") {
        cfg.num_iter = parse_num("numIter", v)?;
    }
    if let Some(v) = kv.get("window") {
        cfg.window = parse_num("window", v)?;
    }
    if let Some(v) = kv.get("keyLength") {
        cfg.key_length = if v.eq_ignore_ascii_case("all") {
            cfg.key_vars.len()
        } else {
            parse_num("keyLength", v)?
        };
    }
    if let Some(v) = kv.get("threshold") {
        cfg.threshold = parse_num("threshold", v)?;
    }
    if let Some(v) = kv.get("priorityVar") {
        cfg.priority_var = v.to_string();
    }
    if let Some(v) = kv.get("priorityVarMin") {
        cfg.priority_var_min = parse_bool("priorityVarMin", v)?;
    }
    if let Some(v) = kv.get("seed") {
        cfg.seed = parse_num("seed", v)?;
    }
    let percentile = kv
        .get("percentile")
        .map(|v| parse_num::<f64>("percentile", v))
        .transpose()?;
    cfg.scorer = match kv.get("scorer").unwrap_or("intersection") {
        "intersection" => {
            if percentile.is_some() {
                return Err(Error::Config(
                    "`percentile` only applies to the greedy scorer".into(),
                ));
            }
            Scorer::Intersection
        }
        "greedy" => Scorer::Greedy {
            percentile: percentile
                .ok_or_else(|| Error::Config("greedy scorer needs `percentile`".into()))?,
        },
        other => {
            return Err(Error::Config(format!(
                "scorer must be `intersection` or `greedy`, got `{other}`"
            )))
        }
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Config text that parses back to `cfg`.
pub fn snip_config_text(cfg: &SnipConfig) -> String {
    let mut s = String::new();
    let list = |v: &[String]| v.join(",");
    let _ = writeln!(s, "keyVars = {}", list(&cfg.key_vars));
    if let Some(w) = &cfg.key_weights {
        let entries: Vec<String> = w.iter().map(|(k, v)| format!("{k}:{v}")).collect();
        let _ = writeln!(s, "keyWeights = {}", entries.join(","));
    }
    if !cfg.key_fallbacks.is_empty() {
        let entries: Vec<String> = cfg
            .key_fallbacks
            .iter()
            .map(|(k, v)| format!("{k}:{v}"))
            .collect();
        let _ = writeln!(s, "keyFallbacks = {}", entries.join(","));
    }
    let _ = writeln!(s, "femaleOnlyVars = {}", list(&cfg.female_only_vars));
    let _ = writeln!(s, "maleOnlyVars = {}", list(&cfg.male_only_vars));
    let _ = writeln!(s, "blockVars = {}", list(&cfg.block_vars));
    let _ = writeln!(s, "numIter = {}", cfg.num_iter);
    let _ = writeln!(s, "window = {}", cfg.window);
    let _ = writeln!(s, "keyLength = {}", cfg.key_length);
    let _ = writeln!(s, "threshold = {}", cfg.threshold);
    let _ = writeln!(s, "priorityVar = {}", cfg.priority_var);
    let _ = writeln!(s, "priorityVarMin = {}", cfg.priority_var_min);
    let _ = writeln!(s, "seed = {}", cfg.seed);
    match cfg.scorer {
        Scorer::Intersection => {
            let _ = writeln!(s, "scorer = intersection");
        }
        Scorer::Greedy { percentile } => {
            let _ = writeln!(s, "scorer = greedy");
            let _ = writeln!(s, "percentile = {percentile}");
        }
    }
    s
}

const SIM_KEYS: &[&str] = &[
    "numFamilies",
    "seed",
    "relativeCounts",
    "genes",
    "cancers",
    "penetranceFile",
    "duplicates",
    "errorRate",
    "founderAgeMin",
    "founderAgeMax",
    "generationGap",
    "generationGapSpread",
    "spouseAgeSpread",
    "maxAge",
];

/// `cancers` entries are `name` or `name:female` / `name:male`.
fn parse_cancers(raw: &str) -> Result<Vec<Cancer>> {
    parse_list(raw)
        .into_iter()
        .map(|e| {
            let (name, sex) = match e.split_once(':') {
                Some((n, s)) => (n.trim().to_string(), s.trim().to_ascii_lowercase()),
                None => (e.clone(), "any".to_string()),
            };
            let sex = match sex.as_str() {
                "any" => CancerSex::Any,
                "female" => CancerSex::FemaleOnly,
                "male" => CancerSex::MaleOnly,
                _ => {
                    return Err(Error::Config(format!(
                        "cancer `{name}`: unknown sex `{sex}`"
                    )))
                }
            };
            Ok(Cancer::new(name, sex))
        })
        .collect()
}

/// Builds a simulation config. Relative paths (the penetrance file) are
/// resolved against `base_dir`.
pub fn simulation_config(kv: &KeyValues, base_dir: &Path) -> Result<SimulationConfig> {
    kv.reject_unknown(SIM_KEYS)?;
    let mut cfg = SimulationConfig::default();
    let g = &mut cfg.generator;
    if let Some(v) = kv.get("numFamilies") {
        g.num_families = parse_num("numFamilies", v)?;
    }
    if let Some(v) = kv.get("seed") {
        g.seed = parse_num("seed", v)?;
    }
    if let Some(v) = kv.get("relativeCounts") {
        g.relative_counts = parse_list(v)
            .iter()
            .map(|x| parse_num("relativeCounts", x))
            .collect::<Result<_>>()?;
    }
    if let Some(v) = kv.get("genes") {
        g.genes = parse_pairs("genes", v)?
            .into_iter()
            .map(|(n, q)| Ok(Gene::new(n, parse_num("genes", &q)?)))
            .collect::<Result<_>>()?;
    }
    if let Some(v) = kv.get("cancers") {
        g.cancers = parse_cancers(v)?;
    }
    let a = &mut g.ages;
    for (key, field) in [
        ("founderAgeMin", &mut a.founder_min),
        ("founderAgeMax", &mut a.founder_max),
        ("generationGap", &mut a.gap_mean),
        ("generationGapSpread", &mut a.gap_spread),
        ("spouseAgeSpread", &mut a.spouse_spread),
        ("maxAge", &mut a.max_age),
    ] {
        if let Some(v) = kv.get(key) {
            *field = parse_num(key, v)?;
        }
    }
    if let Some(v) = kv.get("penetranceFile") {
        let path = base_dir.join(v);
        let file = std::fs::File::open(&path)
            .map_err(|e| Error::Config(format!("cannot open {}: {e}", path.display())))?;
        g.penetrance = Some(PenetranceTable::read_csv(
            file,
            &g.genes,
            &g.cancers,
            g.ages.max_age,
        )?);
    }
    if let Some(v) = kv.get("duplicates") {
        cfg.duplication.copies = parse_pairs("duplicates", v)?
            .into_iter()
            .map(|(k, m)| {
                let k: u32 = parse_num("duplicates", &k)?;
                if k == 0 {
                    return Err(Error::Config("copies per family must be positive".into()));
                }
                Ok((k, parse_num("duplicates", &m)?))
            })
            .collect::<Result<_>>()?;
    }
    if let Some(v) = kv.get("errorRate") {
        cfg.duplication.error_rate = parse_num("errorRate", v)?;
    }
    if cfg.duplication.error_rate < 0.0 || !cfg.duplication.error_rate.is_finite() {
        return Err(Error::Config("errorRate must be nonnegative".into()));
    }
    cfg.generator.validate()?;
    Ok(cfg)
}

/// Generator config text; the penetrance table is referenced, not inlined.
pub fn simulation_config_text(cfg: &SimulationConfig, penetrance_file: Option<&str>) -> String {
    let g = &cfg.generator;
    let mut s = String::new();
    let _ = writeln!(s, "numFamilies = {}", g.num_families);
    let _ = writeln!(s, "seed = {}", g.seed);
    let counts: Vec<String> = g.relative_counts.iter().map(u32::to_string).collect();
    let _ = writeln!(s, "relativeCounts = {}", counts.join(","));
    let genes: Vec<String> = g
        .genes
        .iter()
        .map(|x| format!("{}:{}", x.name, x.allele_freq))
        .collect();
    let _ = writeln!(s, "genes = {}", genes.join(","));
    let cancers: Vec<String> = g
        .cancers
        .iter()
        .map(|c| match c.sex {
            CancerSex::Any => c.name.clone(),
            CancerSex::FemaleOnly => format!("{}:female", c.name),
            CancerSex::MaleOnly => format!("{}:male", c.name),
        })
        .collect();
    let _ = writeln!(s, "cancers = {}", cancers.join(","));
    if let Some(p) = penetrance_file {
        let _ = writeln!(s, "penetranceFile = {p}");
    }
    let a = &g.ages;
    let _ = writeln!(s, "founderAgeMin = {}", a.founder_min);
    let _ = writeln!(s, "founderAgeMax = {}", a.founder_max);
    let _ = writeln!(s, "generationGap = {}", a.gap_mean);
    let _ = writeln!(s, "generationGapSpread = {}", a.gap_spread);
    let _ = writeln!(s, "spouseAgeSpread = {}", a.spouse_spread);
    let _ = writeln!(s, "maxAge = {}", a.max_age);
    let dups: Vec<String> = cfg
        .duplication
        .copies
        .iter()
        .map(|(k, m)| format!("{k}:{m}"))
        .collect();
    let _ = writeln!(s, "duplicates = {}", dups.join(","));
    let _ = writeln!(s, "errorRate = {}", cfg.duplication.error_rate);
    s
}
