//! Age-specific cumulative cancer risk curves by carrier profile and sex.

use std::collections::HashMap;
use std::io::Read;

use super::{Cancer, CancerSex, Gene};
use crate::pedigree::Sex;
use crate::{Error, Result};

/// Set of carried genes as a bitmask over the configured gene list.
pub type CarrierProfile = u64;

#[derive(Debug, Clone, PartialEq)]
pub struct PenetranceTable {
    max_age: u32,
    curves: HashMap<(CarrierProfile, usize, Sex), Vec<f64>>,
}

pub fn profile_name(profile: CarrierProfile, genes: &[Gene]) -> String {
    let carried: Vec<&str> = genes
        .iter()
        .enumerate()
        .filter(|(i, _)| profile & (1 << i) != 0)
        .map(|(_, g)| g.name.as_str())
        .collect();
    if carried.is_empty() {
        "none".to_string()
    } else {
        carried.join("+")
    }
}

fn parse_profile(name: &str, genes: &[Gene]) -> Result<CarrierProfile> {
    if name.eq_ignore_ascii_case("none") {
        return Ok(0);
    }
    name.split('+').try_fold(0u64, |acc, g| {
        let i = genes
            .iter()
            .position(|x| x.name == g.trim())
            .ok_or_else(|| Error::Config(format!("penetrance profile names unknown gene `{g}`")))?;
        Ok(acc | (1 << i))
    })
}

fn logistic_curve(lifetime: f64, midpoint: f64, scale: f64, max_age: u32) -> Vec<f64> {
    let g = |a: f64| 1.0 / (1.0 + (-(a - midpoint) / scale).exp());
    let g0 = g(0.0);
    let g_max = g(f64::from(max_age));
    (1..=max_age)
        .map(|a| lifetime * (g(f64::from(a)) - g0) / (g_max - g0))
        .collect()
}

/// Lifetime risk from non-carrier background and one gene, per cancer and
/// sex, for the built-in synthetic table.
fn synthetic_lifetime(gene: Option<&str>, cancer: &str, sex: Sex) -> f64 {
    let base = match cancer {
        "BC" => 0.12,
        "OC" => 0.015,
        "COL" => 0.04,
        "ENDO" => 0.03,
        "PANC" => 0.015,
        "MELA" => 0.02,
        _ => 0.02,
    };
    let carrier = match (gene, cancer) {
        (Some("BRCA1"), "BC") => 0.65,
        (Some("BRCA1"), "OC") => 0.40,
        (Some("BRCA2"), "BC") => 0.45,
        (Some("BRCA2"), "OC") => 0.15,
        (Some("BRCA2"), "PANC") => 0.05,
        (Some("MLH1"), "COL") => 0.50,
        (Some("MLH1"), "ENDO") => 0.40,
        (Some("MSH2"), "COL") => 0.45,
        (Some("MSH2"), "ENDO") => 0.40,
        (Some("MSH6"), "COL") => 0.20,
        (Some("MSH6"), "ENDO") => 0.30,
        (Some("CDKN2A"), "MELA") => 0.50,
        (Some("CDKN2A"), "PANC") => 0.15,
        (Some(_), _) => 0.0,
        (None, _) => base,
    };
    if cancer == "BC" && sex == Sex::Male {
        carrier * 0.1
    } else {
        carrier
    }
}

impl PenetranceTable {
    pub fn new(max_age: u32) -> Self {
        PenetranceTable {
            max_age,
            curves: HashMap::new(),
        }
    }

    pub fn max_age(&self) -> u32 {
        self.max_age
    }

    /// Registers a curve; index `a - 1` holds the cumulative risk by age `a`.
    pub fn insert(
        &mut self,
        profile: CarrierProfile,
        cancer: usize,
        sex: Sex,
        curve: Vec<f64>,
    ) -> Result<()> {
        if curve.len() != self.max_age as usize {
            return Err(Error::Config(format!(
                "penetrance curve has {} ages, expected {}",
                curve.len(),
                self.max_age
            )));
        }
        if curve.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::Config("penetrance values must lie in [0, 1]".into()));
        }
        if curve.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Config(
                "penetrance curve must be nondecreasing".into(),
            ));
        }
        self.curves.insert((profile, cancer, sex), curve);
        Ok(())
    }

    pub fn curve(&self, profile: CarrierProfile, cancer: usize, sex: Sex) -> Option<&[f64]> {
        self.curves.get(&(profile, cancer, sex)).map(Vec::as_slice)
    }

    /// Synthetic logistic curves for every carrier profile. Risks of several
    /// carried genes combine as independent causes.
    pub fn synthetic(genes: &[Gene], cancers: &[Cancer], max_age: u32) -> Result<Self> {
        if genes.len() > 16 {
            return Err(Error::Config("at most 16 genes are supported".into()));
        }
        let mut table = PenetranceTable::new(max_age);
        for profile in 0..(1u64 << genes.len()) {
            for (c, cancer) in cancers.iter().enumerate() {
                for sex in [Sex::Female, Sex::Male] {
                    if !cancer.sex.allows(sex) {
                        continue;
                    }
                    let mut survive = vec![1.0; max_age as usize];
                    let mut factors = vec![synthetic_lifetime(None, &cancer.name, sex)];
                    for (g, gene) in genes.iter().enumerate() {
                        if profile & (1 << g) != 0 {
                            factors.push(synthetic_lifetime(Some(&gene.name), &cancer.name, sex));
                        }
                    }
                    for (k, lifetime) in factors.into_iter().enumerate() {
                        let mid = if k == 0 { 65.0 } else { 50.0 };
                        let curve = logistic_curve(lifetime, mid, 9.0, max_age);
                        for (s, p) in survive.iter_mut().zip(curve) {
                            *s *= 1.0 - p;
                        }
                    }
                    let curve: Vec<f64> = survive.into_iter().map(|s| 1.0 - s).collect();
                    table.insert(profile, c, sex, curve)?;
                }
            }
        }
        Ok(table)
    }

    /// Long-format CSV with columns `profile,cancer,sex,age,risk`, where
    /// `profile` is `none` or gene names joined by `+` and sex is `female`
    /// or `male`. Ages absent for a curve carry the previous value forward.
    pub fn read_csv<R: Read>(
        reader: R,
        genes: &[Gene],
        cancers: &[Cancer],
        max_age: u32,
    ) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(reader);
        let mut points: HashMap<(CarrierProfile, usize, Sex), Vec<Option<f64>>> = HashMap::new();
        for rec in rdr.records() {
            let rec = rec?;
            if rec.len() != 5 {
                return Err(Error::Config("penetrance rows need 5 columns".into()));
            }
            let profile = parse_profile(&rec[0], genes)?;
            let cancer = cancers
                .iter()
                .position(|c| c.name == rec[1].trim())
                .ok_or_else(|| Error::Config(format!("unknown cancer `{}`", &rec[1])))?;
            let sex = match Sex::parse(&rec[2]) {
                Sex::Unknown => {
                    return Err(Error::Config(format!("unknown sex `{}`", &rec[2])));
                }
                s => s,
            };
            let age: u32 = rec[3]
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("bad age `{}`", &rec[3])))?;
            let risk: f64 = rec[4]
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("bad risk `{}`", &rec[4])))?;
            if age == 0 || age > max_age {
                return Err(Error::Config(format!("age {age} outside 1..={max_age}")));
            }
            points
                .entry((profile, cancer, sex))
                .or_insert_with(|| vec![None; max_age as usize])[age as usize - 1] = Some(risk);
        }
        let mut table = PenetranceTable::new(max_age);
        for ((profile, cancer, sex), pts) in points {
            let mut last = 0.0;
            let curve = pts
                .into_iter()
                .map(|p| {
                    if let Some(v) = p {
                        last = v;
                    }
                    last
                })
                .collect();
            table.insert(profile, cancer, sex, curve)?;
        }
        Ok(table)
    }
}

impl CancerSex {
    pub fn allows(self, sex: Sex) -> bool {
        match self {
            CancerSex::Any => true,
            CancerSex::FemaleOnly => sex != Sex::Male,
            CancerSex::MaleOnly => sex != Sex::Female,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn genes() -> Vec<Gene> {
        vec![Gene::new("BRCA1", 0.01), Gene::new("BRCA2", 0.01)]
    }

    fn cancers() -> Vec<Cancer> {
        vec![
            Cancer::new("BC", CancerSex::Any),
            Cancer::new("OC", CancerSex::FemaleOnly),
        ]
    }

    #[test]
    fn synthetic_curves_are_valid() {
        let t = PenetranceTable::synthetic(&genes(), &cancers(), 100).unwrap();
        for profile in 0..4 {
            let bc = t.curve(profile, 0, Sex::Female).unwrap();
            assert!(bc[0] >= 0.0);
            assert!(bc.windows(2).all(|w| w[1] >= w[0]));
            assert!(*bc.last().unwrap() <= 1.0);
        }
        assert!(t.curve(0, 1, Sex::Male).is_none());
        let none = t.curve(0, 0, Sex::Female).unwrap()[99];
        let b1 = t.curve(1, 0, Sex::Female).unwrap()[99];
        assert!(b1 > none);
    }

    #[test]
    fn rejects_decreasing_curve() {
        let mut t = PenetranceTable::new(3);
        assert!(t.insert(0, 0, Sex::Female, vec![0.1, 0.05, 0.2]).is_err());
        assert!(t.insert(0, 0, Sex::Female, vec![0.1, 0.2]).is_err());
        assert!(t.insert(0, 0, Sex::Female, vec![0.1, 0.2, 1.2]).is_err());
        assert!(t.insert(0, 0, Sex::Female, vec![0.0, 0.0, 0.0]).is_ok());
    }

    #[test]
    fn reads_long_csv() {
        let csv = "profile,cancer,sex,age,risk\nnone,BC,female,2,0.1\nnone,BC,female,4,0.3\nBRCA1+BRCA2,OC,female,1,0.5\n";
        let t = PenetranceTable::read_csv(csv.as_bytes(), &genes(), &cancers(), 4).unwrap();
        assert_eq!(t.curve(0, 0, Sex::Female).unwrap(), &[0.0, 0.1, 0.1, 0.3]);
        assert_eq!(t.curve(3, 1, Sex::Female).unwrap(), &[0.5; 4]);
        assert_eq!(profile_name(3, &genes()), "BRCA1+BRCA2");
        assert_eq!(profile_name(0, &genes()), "none");
    }
}
