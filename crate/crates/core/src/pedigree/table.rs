//! CSV reading and writing of pedigree tables.

use std::collections::HashSet;
use std::io::{Read, Write};
use std::sync::Arc;

use indexmap::IndexMap;

use super::{ColumnRole, Individual, Pedigree, PedigreeSet, Schema, Sex};
use super::{FAM_ID, FATHER_ID, INDIV_ID, IS_PROBAND, MOTHER_ID};
use crate::value::{detect_kind, is_missing_token, Value, MISSING_TOKEN};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct ParseOptions {
    /// Name of the 0/1 column flagging the proband.
    pub proband_column: String,
    /// Unresolvable parent references become errors instead of warnings.
    pub strict: bool,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions {
            proband_column: IS_PROBAND.to_string(),
            strict: false,
        }
    }
}

pub fn read_csv<R: Read>(reader: R, opts: &ParseOptions) -> Result<PedigreeSet> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        rows.push(rec.iter().map(str::to_string).collect());
    }
    parse_pedigree_table(header, rows, opts)
}

fn find_column(header: &[String], name: &str) -> Option<usize> {
    header
        .iter()
        .position(|h| h == name)
        .or_else(|| header.iter().position(|h| h.eq_ignore_ascii_case(name)))
}

fn optional_id(raw: &str) -> Option<String> {
    if is_missing_token(raw) {
        None
    } else {
        Some(raw.trim().to_string())
    }
}

/// Builds a [`PedigreeSet`] from a header and string rows.
///
/// One family per distinct FamID, in order of first appearance. Every column
/// other than FamID, ID, MotherID and FatherID becomes an attribute.
pub fn parse_pedigree_table(
    header: Vec<String>,
    rows: Vec<Vec<String>>,
    opts: &ParseOptions,
) -> Result<PedigreeSet> {
    let mut roles = Vec::with_capacity(header.len());
    let required = [FAM_ID, INDIV_ID, MOTHER_ID, FATHER_ID];
    let mut positions = [0usize; 4];
    for (slot, name) in required.iter().enumerate() {
        positions[slot] =
            find_column(&header, name).ok_or_else(|| Error::MissingColumn(name.to_string()))?;
    }
    let mut attributes = Vec::new();
    let mut attr_columns = Vec::new();
    for (i, h) in header.iter().enumerate() {
        let role = match positions.iter().position(|&p| p == i) {
            Some(0) => ColumnRole::FamId,
            Some(1) => ColumnRole::IndivId,
            Some(2) => ColumnRole::MotherId,
            Some(3) => ColumnRole::FatherId,
            _ => {
                attributes.push(h.clone());
                attr_columns.push(i);
                ColumnRole::Attribute(attributes.len() - 1)
            }
        };
        roles.push(role);
    }
    if find_column(&attributes, &opts.proband_column).is_none() {
        return Err(Error::MissingColumn(opts.proband_column.clone()));
    }

    for (r, row) in rows.iter().enumerate() {
        if row.len() != header.len() {
            return Err(Error::InvalidRow {
                row: r + 1,
                message: format!("expected {} fields, found {}", header.len(), row.len()),
            });
        }
    }

    let kinds = attr_columns
        .iter()
        .map(|&c| detect_kind(rows.iter().map(|row| row[c].as_str())))
        .collect();
    let schema = Arc::new(Schema::assemble(
        header,
        roles,
        attributes,
        kinds,
        &opts.proband_column,
    ));

    let mut grouped: IndexMap<String, Vec<Individual>> = IndexMap::new();
    let mut seen: HashSet<(String, String)> = HashSet::new();
    for (r, row) in rows.into_iter().enumerate() {
        let fam_id = row[positions[0]].trim().to_string();
        let indiv_id = row[positions[1]].trim().to_string();
        if fam_id.is_empty() || is_missing_token(&fam_id) {
            return Err(Error::InvalidRow {
                row: r + 1,
                message: "missing family ID".into(),
            });
        }
        if indiv_id.is_empty() || is_missing_token(&indiv_id) {
            return Err(Error::InvalidRow {
                row: r + 1,
                message: "missing individual ID".into(),
            });
        }
        if !seen.insert((fam_id.clone(), indiv_id.clone())) {
            return Err(Error::DuplicateIndividual { fam_id, indiv_id });
        }
        let mother_id = optional_id(&row[positions[2]]);
        let father_id = optional_id(&row[positions[3]]);
        let mut values = Vec::with_capacity(attr_columns.len());
        let mut raw = Vec::with_capacity(attr_columns.len());
        for (a, &c) in attr_columns.iter().enumerate() {
            let field = &row[c];
            let value = Value::parse(field, schema.kind(a));
            raw.push(if value.is_missing() {
                MISSING_TOKEN.to_string()
            } else {
                field.clone()
            });
            values.push(value);
        }
        let is_proband = schema
            .proband_attribute()
            .and_then(|i| values[i].as_f64())
            .is_some_and(|x| x != 0.0);
        let sex = schema
            .sex_attribute()
            .map(|i| Sex::parse(&row[attr_columns[i]]))
            .unwrap_or(Sex::Unknown);
        let person = Individual::from_parts(
            fam_id.clone(),
            indiv_id,
            mother_id,
            father_id,
            is_proband,
            sex,
            values,
            raw,
        );
        grouped.entry(fam_id).or_default().push(person);
    }

    let mut set = PedigreeSet::new(Arc::clone(&schema));
    for (fam_id, members) in grouped {
        if opts.strict {
            let ids: HashSet<&str> = members.iter().map(|m| m.indiv_id.as_str()).collect();
            for m in &members {
                for parent in [&m.mother_id, &m.father_id].into_iter().flatten() {
                    if !ids.contains(parent.as_str()) {
                        return Err(Error::InvalidPedigree {
                            fam_id: fam_id.clone(),
                            message: format!(
                                "individual `{}` references unknown parent `{parent}`",
                                m.indiv_id
                            ),
                        });
                    }
                }
            }
        }
        set.insert(Pedigree::new(fam_id, members, Arc::clone(&schema)))?;
    }
    Ok(set)
}

/// Writes the set with the schema's column order; missing values as `NA`.
pub fn write_csv<W: Write>(set: &PedigreeSet, writer: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().from_writer(writer);
    let schema = set.schema();
    w.write_record(schema.header())?;
    let mut record: Vec<&str> = Vec::with_capacity(schema.header().len());
    for ped in set.families() {
        for m in &ped.members {
            record.clear();
            for role in schema.roles() {
                record.push(match role {
                    ColumnRole::FamId => &m.fam_id,
                    ColumnRole::IndivId => &m.indiv_id,
                    ColumnRole::MotherId => m.mother_id.as_deref().unwrap_or(MISSING_TOKEN),
                    ColumnRole::FatherId => m.father_id.as_deref().unwrap_or(MISSING_TOKEN),
                    ColumnRole::Attribute(a) => m.raw(*a),
                });
            }
            w.write_record(&record)?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pedigree::fixtures::{table1, TABLE1};
    use crate::value::ColumnKind;

    #[test]
    fn table1_has_two_families() {
        let set = table1();
        assert_eq!(set.len(), 2);
        assert_eq!(set.get("1").unwrap().members.len(), 8);
        assert_eq!(set.get("2").unwrap().members.len(), 11);
        let schema = set.schema();
        let k = |n: &str| schema.kind(schema.attribute_index(n).unwrap());
        assert_eq!(k("isAffBC"), ColumnKind::Binary);
        assert_eq!(k("CurAge"), ColumnKind::Numeric);
        assert_eq!(k("AgeOC"), ColumnKind::Binary);
        let p = set.get("1").unwrap().proband().unwrap();
        assert_eq!(p.indiv_id, "3");
        assert_eq!(p.sex, Sex::Female);
    }

    #[test]
    fn empty_input_gives_empty_set() {
        let set = read_csv(
            "FamID,ID,MotherID,FatherID,isProband\n".as_bytes(),
            &ParseOptions::default(),
        )
        .unwrap();
        assert!(set.is_empty());
    }

    #[test]
    fn duplicate_id_is_rejected() {
        let csv = "FamID,ID,MotherID,FatherID,isProband\n1,3,NA,NA,1\n1,3,NA,NA,0\n";
        let err = read_csv(csv.as_bytes(), &ParseOptions::default()).unwrap_err();
        assert!(matches!(err, Error::DuplicateIndividual { .. }), "{err}");
    }

    #[test]
    fn missing_required_column() {
        let csv = "FamID,ID,MotherID,isProband\n1,3,NA,1\n";
        let err = read_csv(csv.as_bytes(), &ParseOptions::default()).unwrap_err();
        assert!(matches!(err, Error::MissingColumn(ref c) if c == "FatherID"));
    }

    #[test]
    fn proband_column_can_be_renamed() {
        let csv = "FamID,ID,MotherID,FatherID,proband\n1,3,NA,NA,1\n";
        assert!(matches!(
            read_csv(csv.as_bytes(), &ParseOptions::default()),
            Err(Error::MissingColumn(_))
        ));
        let opts = ParseOptions {
            proband_column: "proband".into(),
            ..Default::default()
        };
        let set = read_csv(csv.as_bytes(), &opts).unwrap();
        assert!(set.get("1").unwrap().proband().is_some());
    }

    #[test]
    fn strict_mode_rejects_unknown_parent() {
        let csv = "FamID,ID,MotherID,FatherID,isProband\n1,3,1,2,1\n1,1,NA,NA,0\n";
        assert!(read_csv(csv.as_bytes(), &ParseOptions::default()).is_ok());
        let strict = ParseOptions {
            strict: true,
            ..Default::default()
        };
        assert!(matches!(
            read_csv(csv.as_bytes(), &strict),
            Err(Error::InvalidPedigree { .. })
        ));
    }

    #[test]
    fn missing_tokens_are_normalized_on_output() {
        let csv = "FamID,ID,MotherID,FatherID,isProband,Age\n1,1,,na,1,\n";
        let set = read_csv(csv.as_bytes(), &ParseOptions::default()).unwrap();
        let mut out = Vec::new();
        write_csv(&set, &mut out).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "FamID,ID,MotherID,FatherID,isProband,Age\n1,1,NA,NA,1,NA\n"
        );
    }

    #[test]
    fn table1_round_trips_byte_exact() {
        let set = table1();
        let mut out = Vec::new();
        write_csv(&set, &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), TABLE1);
    }

    #[test]
    fn column_order_is_preserved() {
        let csv = "isProband,ID,FamID,x,FatherID,MotherID\n1,1,7,2.5,NA,NA\n";
        let set = read_csv(csv.as_bytes(), &ParseOptions::default()).unwrap();
        let mut out = Vec::new();
        write_csv(&set, &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), csv);
    }
}
