//! Pedigree data model: individuals, families, and the column schema they share.

mod relatives;
mod table;
mod validate;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use indexmap::IndexMap;

use crate::value::{ColumnKind, Value};
use crate::{Error, Result};

pub use relatives::{classify_extended_relatives, extract_core_relatives, CoreRelatives};
pub use table::{parse_pedigree_table, read_csv, write_csv, ParseOptions};
pub use validate::{validate_pedigree, Issue, IssueKind, Severity};

pub const FAM_ID: &str = "FamID";
pub const INDIV_ID: &str = "ID";
pub const MOTHER_ID: &str = "MotherID";
pub const FATHER_ID: &str = "FatherID";
pub const IS_PROBAND: &str = "isProband";
pub const SEX: &str = "Sex";

/// Family-level variable holding the number of members; available to every
/// relative-type row.
pub const FAMILY_SIZE: &str = "famSize";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sex {
    Female,
    Male,
    Unknown,
}

impl Sex {
    /// Table encoding: 0 female, 1 male. Letters are accepted too.
    pub fn parse(raw: &str) -> Sex {
        match raw.trim().to_ascii_lowercase().as_str() {
            "0" | "f" | "female" => Sex::Female,
            "1" | "m" | "male" => Sex::Male,
            _ => Sex::Unknown,
        }
    }

    pub fn code(self) -> &'static str {
        match self {
            Sex::Female => "0",
            Sex::Male => "1",
            Sex::Unknown => "NA",
        }
    }
}

impl fmt::Display for Sex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sex::Female => "female",
            Sex::Male => "male",
            Sex::Unknown => "unknown",
        })
    }
}

/// Relationship of a member to the proband.
///
/// The first seven variants are the core types every family is expected to
/// carry; the rest are only used by the greedy whole-pedigree score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RelativeType {
    Proband,
    Mother,
    Father,
    MaternalGrandmother,
    MaternalGrandfather,
    PaternalGrandmother,
    PaternalGrandfather,
    Children,
    MaternalAuntsUncles,
    PaternalAuntsUncles,
    Cousins,
    Other,
}

impl RelativeType {
    pub const CORE: [RelativeType; 7] = [
        RelativeType::Proband,
        RelativeType::Mother,
        RelativeType::Father,
        RelativeType::MaternalGrandmother,
        RelativeType::MaternalGrandfather,
        RelativeType::PaternalGrandmother,
        RelativeType::PaternalGrandfather,
    ];

    pub const EXTENDED: [RelativeType; 5] = [
        RelativeType::Children,
        RelativeType::MaternalAuntsUncles,
        RelativeType::PaternalAuntsUncles,
        RelativeType::Cousins,
        RelativeType::Other,
    ];

    pub fn is_core(self) -> bool {
        self.core_index().is_some()
    }

    pub fn core_index(self) -> Option<usize> {
        Self::CORE.iter().position(|&t| t == self)
    }

    /// Sex implied by the relationship, if any. The proband has none.
    pub fn implied_sex(self) -> Option<Sex> {
        use RelativeType::*;
        match self {
            Mother | MaternalGrandmother | PaternalGrandmother => Some(Sex::Female),
            Father | MaternalGrandfather | PaternalGrandfather => Some(Sex::Male),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        use RelativeType::*;
        match self {
            Proband => "proband",
            Mother => "mother",
            Father => "father",
            MaternalGrandmother => "maternalGrandmother",
            MaternalGrandfather => "maternalGrandfather",
            PaternalGrandmother => "paternalGrandmother",
            PaternalGrandfather => "paternalGrandfather",
            Children => "children",
            MaternalAuntsUncles => "maternalAuntsUncles",
            PaternalAuntsUncles => "paternalAuntsUncles",
            Cousins => "cousins",
            Other => "other",
        }
    }

    pub fn from_name(name: &str) -> Option<RelativeType> {
        Self::CORE
            .iter()
            .chain(Self::EXTENDED.iter())
            .copied()
            .find(|t| t.name().eq_ignore_ascii_case(name))
    }
}

impl fmt::Display for RelativeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum ColumnRole {
    FamId,
    IndivId,
    MotherId,
    FatherId,
    Attribute(usize),
}

/// Column layout shared by every family of a set.
#[derive(Debug, Clone, PartialEq)]
pub struct Schema {
    header: Vec<String>,
    roles: Vec<ColumnRole>,
    attributes: Vec<String>,
    kinds: Vec<ColumnKind>,
    index: HashMap<String, usize>,
    proband_attr: Option<usize>,
    sex_attr: Option<usize>,
}

impl Schema {
    /// Builds a schema with the four structural columns first, followed by
    /// the given attribute columns.
    pub fn new(attributes: Vec<(String, ColumnKind)>, proband_column: &str) -> Schema {
        let mut header: Vec<String> = [FAM_ID, INDIV_ID, MOTHER_ID, FATHER_ID]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let mut roles = vec![
            ColumnRole::FamId,
            ColumnRole::IndivId,
            ColumnRole::MotherId,
            ColumnRole::FatherId,
        ];
        for (i, (name, _)) in attributes.iter().enumerate() {
            header.push(name.clone());
            roles.push(ColumnRole::Attribute(i));
        }
        let (names, kinds) = attributes.into_iter().unzip();
        Schema::assemble(header, roles, names, kinds, proband_column)
    }

    pub(crate) fn assemble(
        header: Vec<String>,
        roles: Vec<ColumnRole>,
        attributes: Vec<String>,
        kinds: Vec<ColumnKind>,
        proband_column: &str,
    ) -> Schema {
        let index: HashMap<String, usize> = attributes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), i))
            .collect();
        let find_ci = |target: &str| {
            attributes.iter().position(|n| n == target).or_else(|| {
                attributes
                    .iter()
                    .position(|n| n.eq_ignore_ascii_case(target))
            })
        };
        let proband_attr = find_ci(proband_column);
        let sex_attr = find_ci(SEX);
        Schema {
            header,
            roles,
            attributes,
            kinds,
            index,
            proband_attr,
            sex_attr,
        }
    }

    pub fn header(&self) -> &[String] {
        &self.header
    }

    pub(crate) fn roles(&self) -> &[ColumnRole] {
        &self.roles
    }

    pub fn attributes(&self) -> &[String] {
        &self.attributes
    }

    pub fn attribute_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn kind(&self, attr: usize) -> ColumnKind {
        self.kinds[attr]
    }

    pub fn proband_attribute(&self) -> Option<usize> {
        self.proband_attr
    }

    pub fn sex_attribute(&self) -> Option<usize> {
        self.sex_attr
    }

    /// Attributes that describe family history rather than structure.
    pub fn is_structural(&self, attr: usize) -> bool {
        Some(attr) == self.proband_attr || Some(attr) == self.sex_attr
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub fam_id: String,
    pub indiv_id: String,
    pub mother_id: Option<String>,
    pub father_id: Option<String>,
    pub is_proband: bool,
    pub sex: Sex,
    attributes: Vec<Value>,
    raw: Vec<String>,
}

impl Individual {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn from_parts(
        fam_id: String,
        indiv_id: String,
        mother_id: Option<String>,
        father_id: Option<String>,
        is_proband: bool,
        sex: Sex,
        attributes: Vec<Value>,
        raw: Vec<String>,
    ) -> Individual {
        Individual {
            fam_id,
            indiv_id,
            mother_id,
            father_id,
            is_proband,
            sex,
            attributes,
            raw,
        }
    }

    /// Builds an individual from typed attribute values laid out as in
    /// `schema`. Proband flag and sex are read from their attribute columns
    /// when the schema has them.
    pub fn new(
        schema: &Schema,
        fam_id: impl Into<String>,
        indiv_id: impl Into<String>,
        mother_id: Option<String>,
        father_id: Option<String>,
        attributes: Vec<Value>,
    ) -> Individual {
        assert_eq!(attributes.len(), schema.attributes().len());
        let raw = attributes.iter().map(Value::to_string).collect();
        let is_proband = schema
            .proband_attribute()
            .and_then(|i| attributes[i].as_f64())
            .is_some_and(|x| x != 0.0);
        let sex = schema
            .sex_attribute()
            .map(|i| Sex::parse(&attributes[i].to_string()))
            .unwrap_or(Sex::Unknown);
        Individual {
            fam_id: fam_id.into(),
            indiv_id: indiv_id.into(),
            mother_id,
            father_id,
            is_proband,
            sex,
            attributes,
            raw,
        }
    }

    pub fn is_founder(&self) -> bool {
        self.mother_id.is_none() && self.father_id.is_none()
    }

    pub fn attribute(&self, attr: usize) -> &Value {
        &self.attributes[attr]
    }

    pub fn attributes(&self) -> &[Value] {
        &self.attributes
    }

    pub(crate) fn raw(&self, attr: usize) -> &str {
        &self.raw[attr]
    }

    /// Replaces one attribute value; the serialized text follows the value.
    pub fn set_attribute(&mut self, attr: usize, value: Value) {
        self.raw[attr] = value.to_string();
        self.attributes[attr] = value;
    }

    pub(crate) fn set_fam_id(&mut self, fam_id: &str) {
        self.fam_id = fam_id.to_string();
    }
}

/// How a variable name is looked up for a member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VarRef {
    Attribute(usize),
    Family(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pedigree {
    pub fam_id: String,
    pub members: Vec<Individual>,
    pub metadata: BTreeMap<String, Value>,
    schema: Arc<Schema>,
}

impl Pedigree {
    /// Creates a family; `famSize` metadata is filled in from the member count.
    pub fn new(fam_id: impl Into<String>, members: Vec<Individual>, schema: Arc<Schema>) -> Self {
        let mut metadata = BTreeMap::new();
        metadata.insert(
            FAMILY_SIZE.to_string(),
            Value::Numeric(members.len() as f64),
        );
        Pedigree {
            fam_id: fam_id.into(),
            members,
            metadata,
            schema,
        }
    }

    pub fn schema(&self) -> &Arc<Schema> {
        &self.schema
    }

    pub fn member(&self, indiv_id: &str) -> Option<&Individual> {
        self.members.iter().find(|m| m.indiv_id == indiv_id)
    }

    pub(crate) fn member_index(&self, indiv_id: &str) -> Option<usize> {
        self.members.iter().position(|m| m.indiv_id == indiv_id)
    }

    pub fn proband(&self) -> Option<&Individual> {
        self.members.iter().find(|m| m.is_proband)
    }

    /// Value of `var` for `member`: an attribute of the member, or a
    /// family-level variable.
    pub fn lookup<'a>(&'a self, member: &'a Individual, var: &VarRef) -> &'a Value {
        match var {
            VarRef::Attribute(i) => member.attribute(*i),
            VarRef::Family(name) => self.metadata.get(name).unwrap_or(&Value::Missing),
        }
    }

    /// Relabels the family and its members.
    pub fn with_fam_id(mut self, fam_id: &str) -> Pedigree {
        self.fam_id = fam_id.to_string();
        for m in &mut self.members {
            m.set_fam_id(fam_id);
        }
        self
    }
}

/// A collection of families keyed by family ID, in input order.
#[derive(Debug, Clone, PartialEq)]
pub struct PedigreeSet {
    schema: Arc<Schema>,
    families: IndexMap<String, Pedigree>,
}

impl PedigreeSet {
    pub fn new(schema: Arc<Schema>) -> PedigreeSet {
        PedigreeSet {
            schema,
            families: IndexMap::new(),
        }
    }

    pub fn schema(&self) -> &Arc<Schema> {
        &self.schema
    }

    pub fn len(&self) -> usize {
        self.families.len()
    }

    pub fn is_empty(&self) -> bool {
        self.families.is_empty()
    }

    pub fn insert(&mut self, ped: Pedigree) -> Result<()> {
        if ped.fam_id.is_empty() {
            return Err(Error::InvalidPedigree {
                fam_id: String::new(),
                message: "empty family ID".into(),
            });
        }
        if self.families.contains_key(&ped.fam_id) {
            return Err(Error::InvalidPedigree {
                fam_id: ped.fam_id,
                message: "family ID already present".into(),
            });
        }
        self.families.insert(ped.fam_id.clone(), ped);
        Ok(())
    }

    pub fn get(&self, fam_id: &str) -> Option<&Pedigree> {
        self.families.get(fam_id)
    }

    pub fn families(&self) -> impl ExactSizeIterator<Item = &Pedigree> {
        self.families.values()
    }

    pub fn fam_ids(&self) -> impl ExactSizeIterator<Item = &String> {
        self.families.keys()
    }

    pub fn contains(&self, fam_id: &str) -> bool {
        self.families.contains_key(fam_id)
    }

    /// Subset of families whose IDs satisfy `keep`, in the original order.
    pub fn retain_families(&self, mut keep: impl FnMut(&str) -> bool) -> PedigreeSet {
        PedigreeSet {
            schema: Arc::clone(&self.schema),
            families: self
                .families
                .iter()
                .filter(|(k, _)| keep(k))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }

    /// Resolves a variable name against the attribute columns first, then the
    /// family-level metadata.
    pub fn resolve(&self, name: &str) -> Result<VarRef> {
        if let Some(i) = self.schema.attribute_index(name) {
            return Ok(VarRef::Attribute(i));
        }
        if name == FAMILY_SIZE || self.families().any(|p| p.metadata.contains_key(name)) {
            return Ok(VarRef::Family(name.to_string()));
        }
        Err(Error::UnknownVariable(name.to_string()))
    }
}
