//! Synthetic pedigree corpora with known duplicates.
//!
//! Each family is generated from its own random substream: a skeleton of
//! relatives, Mendelian carrier statuses for every gene, then cancer histories
//! drawn from age-specific penetrance curves. [`inject_duplicates`] copies a
//! sample of families, perturbs the copies and returns the true partition.

mod duplicates;
pub mod genotype;
pub mod penetrance;
pub mod phenotype;
pub mod structure;

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;

pub use duplicates::{inject_duplicates, Duplicated, DuplicationSpec};
pub use penetrance::PenetranceTable;
pub use phenotype::AgeModel;

use crate::pedigree::{Pedigree, PedigreeSet, Schema, Sex, IS_PROBAND, SEX};
use crate::rng::{domain, substream};
use crate::value::{ColumnKind, Value};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Gene {
    pub name: String,
    pub allele_freq: f64,
}

impl Gene {
    pub fn new(name: impl Into<String>, allele_freq: f64) -> Self {
        Gene {
            name: name.into(),
            allele_freq,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CancerSex {
    Any,
    FemaleOnly,
    MaleOnly,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cancer {
    pub name: String,
    pub sex: CancerSex,
}

impl Cancer {
    pub fn new(name: impl Into<String>, sex: CancerSex) -> Self {
        Cancer {
            name: name.into(),
            sex,
        }
    }

    pub fn affected_column(&self) -> String {
        format!("isAff{}", self.name)
    }

    pub fn age_column(&self) -> String {
        format!("Age{}", self.name)
    }
}

pub const CURRENT_AGE: &str = "CurAge";
pub const IS_DEAD: &str = "isDead";

pub fn default_genes() -> Vec<Gene> {
    vec![
        Gene::new("BRCA1", 0.01),
        Gene::new("BRCA2", 0.01),
        Gene::new("MLH1", 0.005),
        Gene::new("MSH2", 0.005),
        Gene::new("MSH6", 0.005),
        Gene::new("CDKN2A", 0.005),
    ]
}

pub fn default_cancers() -> Vec<Cancer> {
    vec![
        Cancer::new("BC", CancerSex::Any),
        Cancer::new("OC", CancerSex::FemaleOnly),
        Cancer::new("COL", CancerSex::Any),
        Cancer::new("ENDO", CancerSex::FemaleOnly),
        Cancer::new("PANC", CancerSex::Any),
        Cancer::new("MELA", CancerSex::Any),
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    pub num_families: usize,
    pub genes: Vec<Gene>,
    pub cancers: Vec<Cancer>,
    /// `None` selects the built-in synthetic curves.
    pub penetrance: Option<PenetranceTable>,
    pub relative_counts: Vec<u32>,
    pub ages: AgeModel,
    pub seed: u64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            num_families: 5000,
            genes: default_genes(),
            cancers: default_cancers(),
            penetrance: None,
            relative_counts: vec![0, 1, 2, 3],
            ages: AgeModel::default(),
            seed: 1,
        }
    }
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<()> {
        if self
            .genes
            .iter()
            .any(|g| !(g.allele_freq > 0.0 && g.allele_freq < 1.0))
        {
            return Err(Error::Config(
                "allele frequencies must lie in (0, 1)".into(),
            ));
        }
        if self.relative_counts.is_empty() {
            return Err(Error::Config("relative count range is empty".into()));
        }
        let a = &self.ages;
        if a.founder_min > a.founder_max || a.founder_max > a.max_age || a.max_age == 0 {
            return Err(Error::Config(
                "founder ages must satisfy min <= max <= max age".into(),
            ));
        }
        if let Some(p) = &self.penetrance {
            if p.max_age() != a.max_age {
                return Err(Error::Config(
                    "penetrance curves must cover ages 1 to the model's max age".into(),
                ));
            }
        }
        let mut names: Vec<&str> = self.genes.iter().map(|g| g.name.as_str()).collect();
        names.extend(self.cancers.iter().map(|c| c.name.as_str()));
        let mut sorted = names.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != names.len() {
            return Err(Error::Config(
                "gene and cancer names must be distinct".into(),
            ));
        }
        Ok(())
    }

    /// Output columns after the four structural ones.
    pub fn schema(&self) -> Schema {
        let mut cols = vec![
            (IS_PROBAND.to_string(), ColumnKind::Binary),
            (SEX.to_string(), ColumnKind::Binary),
            (CURRENT_AGE.to_string(), ColumnKind::Numeric),
            (IS_DEAD.to_string(), ColumnKind::Binary),
        ];
        cols.extend(
            self.genes
                .iter()
                .map(|g| (g.name.clone(), ColumnKind::Binary)),
        );
        cols.extend(
            self.cancers
                .iter()
                .map(|c| (c.affected_column(), ColumnKind::Binary)),
        );
        cols.extend(
            self.cancers
                .iter()
                .map(|c| (c.age_column(), ColumnKind::Numeric)),
        );
        Schema::new(cols, IS_PROBAND)
    }

    /// Key variables suited to the generated schema: affection statuses,
    /// onset ages, current age and family size. The second list holds the
    /// female-only subset.
    pub fn key_variables(&self) -> (Vec<String>, Vec<String>) {
        let mut keys = Vec::new();
        let mut female = Vec::new();
        for c in &self.cancers {
            keys.push(c.affected_column());
            if c.sex == CancerSex::FemaleOnly {
                female.push(c.affected_column());
            }
        }
        for c in &self.cancers {
            keys.push(c.age_column());
            if c.sex == CancerSex::FemaleOnly {
                female.push(c.age_column());
            }
        }
        keys.push(CURRENT_AGE.to_string());
        keys.push(crate::pedigree::FAMILY_SIZE.to_string());
        (keys, female)
    }

    /// Onset-age key variables mapped to current age, so unaffected members
    /// are sorted by how long they have been at risk.
    pub fn key_fallbacks(&self) -> BTreeMap<String, String> {
        self.cancers
            .iter()
            .map(|c| (c.age_column(), CURRENT_AGE.to_string()))
            .collect()
    }

    /// Male-only cancer variables.
    pub fn male_only_variables(&self) -> Vec<String> {
        self.cancers
            .iter()
            .filter(|c| c.sex == CancerSex::MaleOnly)
            .flat_map(|c| [c.affected_column(), c.age_column()])
            .collect()
    }
}

fn family(
    cfg: &GeneratorConfig,
    penetrance: &PenetranceTable,
    schema: &Arc<Schema>,
    index: u64,
) -> Result<Pedigree> {
    let fam_id = (index + 1).to_string();
    let skeleton = structure::generate_structure(
        &cfg.relative_counts,
        &mut substream(cfg.seed, &[domain::STRUCTURE, index]),
    );
    let genotypes = genotype::generate_genotypes(
        &skeleton,
        &cfg.genes,
        &mut substream(cfg.seed, &[domain::GENOTYPE, index]),
    );
    let profiles = genotype::carrier_profiles(&genotypes);
    let phenotypes = phenotype::generate_phenotypes(
        &skeleton,
        &profiles,
        &cfg.genes,
        &cfg.cancers,
        penetrance,
        &cfg.ages,
        &mut substream(cfg.seed, &[domain::PHENOTYPE, index]),
    )?;

    let members = skeleton
        .members
        .iter()
        .zip(&genotypes)
        .zip(&phenotypes)
        .map(|((m, gts), ph)| {
            let mut attrs = vec![
                Value::Binary(m.id == 1),
                Value::Binary(m.sex == Sex::Male),
                Value::Numeric(f64::from(ph.cur_age)),
                Value::Binary(ph.is_dead),
            ];
            attrs.extend(gts.iter().map(|g| Value::Binary(g.is_carrier())));
            attrs.extend(ph.onset.iter().zip(&cfg.cancers).map(|(o, c)| {
                if c.sex.allows(m.sex) {
                    Value::Binary(o.is_some())
                } else {
                    Value::Missing
                }
            }));
            attrs.extend(ph.onset.iter().map(|o| match o {
                Some(a) => Value::Numeric(f64::from(*a)),
                None => Value::Missing,
            }));
            crate::pedigree::Individual::new(
                schema,
                fam_id.clone(),
                m.id.to_string(),
                m.mother.map(|x| x.to_string()),
                m.father.map(|x| x.to_string()),
                attrs,
            )
        })
        .collect();
    Ok(Pedigree::new(fam_id, members, Arc::clone(schema)))
}

/// Generates `num_families` families with famIDs 1..=N.
pub fn generate_corpus(cfg: &GeneratorConfig) -> Result<PedigreeSet> {
    cfg.validate()?;
    let synthetic;
    let penetrance = match &cfg.penetrance {
        Some(p) => p,
        None => {
            synthetic = PenetranceTable::synthetic(&cfg.genes, &cfg.cancers, cfg.ages.max_age)?;
            &synthetic
        }
    };
    let schema = Arc::new(cfg.schema());
    let families: Vec<Pedigree> = (0..cfg.num_families as u64)
        .into_par_iter()
        .map(|i| family(cfg, penetrance, &schema, i))
        .collect::<Result<_>>()?;
    let mut set = PedigreeSet::new(schema);
    for f in families {
        set.insert(f)?;
    }
    Ok(set)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub generator: GeneratorConfig,
    pub duplication: DuplicationSpec,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig {
            generator: GeneratorConfig::default(),
            duplication: DuplicationSpec {
                copies: (1..=5).map(|k| (k, 100)).collect(),
                error_rate: 1.5,
            },
        }
    }
}

/// Generates a corpus and injects duplicates into it.
pub fn simulate(cfg: &SimulationConfig) -> Result<Duplicated> {
    let base = generate_corpus(&cfg.generator)?;
    let mut rng = substream(cfg.generator.seed, &[domain::DUPLICATES]);
    inject_duplicates(&base, &cfg.duplication, &mut rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pedigree::{
        extract_core_relatives, read_csv, validate_pedigree, write_csv, ParseOptions, Severity,
    };

    fn small(n: usize, seed: u64) -> GeneratorConfig {
        GeneratorConfig {
            num_families: n,
            seed,
            ..GeneratorConfig::default()
        }
    }

    #[test]
    fn families_are_valid_and_complete() {
        let set = generate_corpus(&small(50, 3)).unwrap();
        assert_eq!(set.len(), 50);
        for ped in set.families() {
            let issues = validate_pedigree(ped, true);
            assert!(
                issues.iter().all(|i| i.severity != Severity::Error),
                "{issues:?}"
            );
            assert_eq!(extract_core_relatives(ped).len(), 7);
        }
    }

    #[test]
    fn written_corpus_reparses() {
        let set = generate_corpus(&small(20, 4)).unwrap();
        let mut buf = Vec::new();
        write_csv(&set, &mut buf).unwrap();
        let back = read_csv(buf.as_slice(), &ParseOptions::default()).unwrap();
        let mut again = Vec::new();
        write_csv(&back, &mut again).unwrap();
        assert_eq!(buf, again);
        assert_eq!(back.len(), 20);
    }

    #[test]
    fn same_seed_same_corpus() {
        let a = generate_corpus(&small(30, 9)).unwrap();
        let b = generate_corpus(&small(30, 9)).unwrap();
        let c = generate_corpus(&small(30, 10)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn male_members_skip_female_cancers() {
        let cfg = small(20, 5);
        let set = generate_corpus(&cfg).unwrap();
        let oc = set.schema().attribute_index("isAffOC").unwrap();
        for m in set.families().flat_map(|p| &p.members) {
            if m.sex == Sex::Male {
                assert_eq!(m.attribute(oc), &Value::Missing);
            }
        }
    }

    #[test]
    fn default_duplication_counts() {
        let cfg = SimulationConfig {
            generator: small(5000, 1),
            ..SimulationConfig::default()
        };
        let d = simulate(&cfg).unwrap();
        assert_eq!(d.origins.len(), 1500);
        assert_eq!(d.set.len(), 6500);
        let hist = d.truth.size_histogram();
        for k in 1..=5 {
            assert_eq!(hist[&(k + 1)], 100);
        }
        assert_eq!(hist[&1], 4500);
    }

    #[test]
    fn rejects_bad_allele_frequency() {
        let mut cfg = small(1, 1);
        cfg.genes[0].allele_freq = 0.0;
        assert!(generate_corpus(&cfg).is_err());
    }

    #[test]
    fn empty_corpus() {
        assert!(generate_corpus(&small(0, 1)).unwrap().is_empty());
    }
}
