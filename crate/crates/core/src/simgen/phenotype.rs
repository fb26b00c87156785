//! Current ages, death status and cancer histories.

use rand::Rng;

use super::penetrance::{profile_name, CarrierProfile, PenetranceTable};
use super::structure::Skeleton;
use super::{Cancer, Gene};
use crate::pedigree::Sex;
use crate::{Error, Result};

/// Generational age model. Grandparents draw their age uniformly from
/// `founder_min..=founder_max`; each child is younger than its younger parent
/// by a gap drawn from `gap_mean ± gap_spread`; married-in founders are within
/// `spouse_spread` years of their partner.
#[derive(Debug, Clone, PartialEq)]
pub struct AgeModel {
    pub founder_min: u32,
    pub founder_max: u32,
    pub gap_mean: u32,
    pub gap_spread: u32,
    pub spouse_spread: u32,
    pub max_age: u32,
}

impl Default for AgeModel {
    fn default() -> Self {
        AgeModel {
            founder_min: 70,
            founder_max: 100,
            gap_mean: 25,
            gap_spread: 5,
            spouse_spread: 5,
            max_age: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Phenotype {
    pub cur_age: u32,
    pub is_dead: bool,
    /// Onset age per cancer; `None` when unaffected.
    pub onset: Vec<Option<u32>>,
}

pub fn generate_ages<R: Rng + ?Sized>(
    skeleton: &Skeleton,
    model: &AgeModel,
    rng: &mut R,
) -> Vec<u32> {
    let clamp = |a: i64| a.clamp(1, i64::from(model.max_age)) as u32;
    let mut ages = vec![0u32; skeleton.members.len()];
    for i in skeleton.generation_order() {
        let m = &skeleton.members[i];
        let age = match (m.mother, m.father) {
            (Some(mo), Some(fa)) => {
                let younger = ages[mo as usize - 1].min(ages[fa as usize - 1]);
                let lo = model.gap_mean.saturating_sub(model.gap_spread);
                let gap = rng.random_range(lo..=model.gap_mean + model.gap_spread);
                clamp(i64::from(younger) - i64::from(gap))
            }
            _ if m.generation == 0 => rng.random_range(model.founder_min..=model.founder_max),
            _ => {
                let partner = skeleton
                    .members
                    .iter()
                    .find_map(|c| match (c.mother, c.father) {
                        (Some(mo), Some(fa)) if mo == m.id => Some(fa),
                        (Some(mo), Some(fa)) if fa == m.id => Some(mo),
                        _ => None,
                    });
                let base = partner.map_or(model.founder_min, |p| ages[p as usize - 1]);
                let s = i64::from(model.spouse_spread);
                clamp(i64::from(base) + rng.random_range(-s..=s))
            }
        };
        ages[i] = age;
    }
    ages
}

/// Onset age of one cancer for a member of `age`, or `None` if unaffected.
///
/// The member is affected with probability `curve[age - 1]`; the onset age
/// then follows the risk increments up to `age`, normalized.
pub fn sample_cancer<R: Rng + ?Sized>(curve: &[f64], age: u32, rng: &mut R) -> Option<u32> {
    let age = (age as usize).min(curve.len());
    if age == 0 {
        return None;
    }
    let u: f64 = rng.random();
    if u >= curve[age - 1] {
        return None;
    }
    // Conditional on u < F(age), u is uniform on [0, F(age)).
    let onset = curve[..age].iter().position(|&f| f > u).unwrap_or(age - 1);
    Some(onset as u32 + 1)
}

/// Death probability rises with the cube of age relative to `max_age`.
fn death_probability(age: u32, max_age: u32) -> f64 {
    (f64::from(age) / f64::from(max_age)).powi(3).min(1.0)
}

pub fn generate_phenotypes<R: Rng + ?Sized>(
    skeleton: &Skeleton,
    profiles: &[CarrierProfile],
    genes: &[Gene],
    cancers: &[Cancer],
    penetrance: &PenetranceTable,
    ages: &AgeModel,
    rng: &mut R,
) -> Result<Vec<Phenotype>> {
    let cur_ages = generate_ages(skeleton, ages, rng);
    skeleton
        .members
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let age = cur_ages[i];
            let mut onset = Vec::with_capacity(cancers.len());
            for (c, cancer) in cancers.iter().enumerate() {
                if !cancer.sex.allows(m.sex) {
                    onset.push(None);
                    continue;
                }
                let sex = if m.sex == Sex::Unknown {
                    Sex::Female
                } else {
                    m.sex
                };
                let curve = penetrance.curve(profiles[i], c, sex).ok_or_else(|| {
                    Error::MissingPenetrance {
                        profile: profile_name(profiles[i], genes),
                        cancer: cancer.name.clone(),
                        sex: sex.to_string(),
                    }
                })?;
                onset.push(sample_cancer(curve, age, rng));
            }
            let is_dead = rng.random_bool(death_probability(age, ages.max_age));
            Ok(Phenotype {
                cur_age: age,
                is_dead,
                onset,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SnipRng;
    use crate::simgen::structure::generate_structure;
    use crate::simgen::CancerSex;
    use rand::SeedableRng;

    #[test]
    fn zero_curve_never_affects() {
        let mut rng = SnipRng::seed_from_u64(1);
        let curve = vec![0.0; 100];
        assert!((0..1000).all(|_| sample_cancer(&curve, 80, &mut rng).is_none()));
    }

    #[test]
    fn certain_by_forty() {
        let mut rng = SnipRng::seed_from_u64(2);
        let curve: Vec<f64> = (1..=100).map(|a| (f64::from(a) / 40.0).min(1.0)).collect();
        for _ in 0..1000 {
            let onset = sample_cancer(&curve, 80, &mut rng).expect("affected");
            assert!((1..=40).contains(&onset));
        }
    }

    #[test]
    fn step_curve_incidence() {
        let step = |a: u32| match a {
            0..=29 => 0.0,
            30..=59 => 0.2,
            _ => 0.5,
        };
        let curve: Vec<f64> = (1..=100).map(step).collect();
        let mut rng = SnipRng::seed_from_u64(4);
        let n = 10_000;
        for current in [45u32, 80] {
            let onsets: Vec<Option<u32>> = (0..n)
                .map(|_| sample_cancer(&curve, current, &mut rng))
                .collect();
            for a in [29, 30, 45, 59, 60, 80]
                .into_iter()
                .filter(|&a| a <= current)
            {
                let p = step(a);
                let hits = onsets.iter().filter(|o| o.is_some_and(|x| x <= a)).count();
                let se = (p * (1.0 - p) / n as f64).sqrt();
                let got = hits as f64 / n as f64;
                assert!((got - p).abs() <= 3.0 * se, "age {a}: {got} vs {p}");
            }
        }
    }

    #[test]
    fn onset_never_after_current_age() {
        let mut rng = SnipRng::seed_from_u64(3);
        let curve: Vec<f64> = (1..=100).map(|a| f64::from(a) / 100.0).collect();
        for age in [1, 10, 50, 99] {
            for _ in 0..200 {
                if let Some(o) = sample_cancer(&curve, age, &mut rng) {
                    assert!(o <= age);
                }
            }
        }
    }

    #[test]
    fn ages_follow_generations() {
        let mut rng = SnipRng::seed_from_u64(4);
        let model = AgeModel::default();
        for _ in 0..100 {
            let s = generate_structure(&[0, 1, 2, 3], &mut rng);
            let ages = generate_ages(&s, &model, &mut rng);
            for (i, m) in s.members.iter().enumerate() {
                assert!(ages[i] >= 1 && ages[i] <= model.max_age);
                if let Some(mo) = m.mother {
                    assert!(ages[i] <= ages[mo as usize - 1]);
                }
            }
        }
    }

    #[test]
    fn missing_entry_is_an_error() {
        let mut rng = SnipRng::seed_from_u64(5);
        let s = generate_structure(&[0], &mut rng);
        let genes = [Gene::new("G", 0.5)];
        let cancers = [Cancer::new("BC", CancerSex::Any)];
        let empty = PenetranceTable::new(100);
        let err = generate_phenotypes(
            &s,
            &vec![0; s.members.len()],
            &genes,
            &cancers,
            &empty,
            &AgeModel::default(),
            &mut rng,
        )
        .unwrap_err();
        assert!(matches!(err, Error::MissingPenetrance { .. }));
    }
}
