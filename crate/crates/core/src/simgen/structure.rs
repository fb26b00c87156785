//! Family skeletons: who is related to whom, with sexes and generations.

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::pedigree::Sex;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Proband,
    Mother,
    Father,
    MaternalGrandmother,
    MaternalGrandfather,
    PaternalGrandmother,
    PaternalGrandfather,
    Brother,
    Sister,
    MaternalAuntUncle,
    PaternalAuntUncle,
    Spouse,
    Child,
    NieceNephew,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkeletonMember {
    /// 1-based individual ID.
    pub id: u32,
    pub mother: Option<u32>,
    pub father: Option<u32>,
    pub sex: Sex,
    pub role: Role,
    /// 0 for grandparents, 1 for parents and their siblings, 2 for the
    /// proband's generation, 3 for the generation below.
    pub generation: u8,
}

impl SkeletonMember {
    pub fn is_founder(&self) -> bool {
        self.mother.is_none() && self.father.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Skeleton {
    pub members: Vec<SkeletonMember>,
}

impl Skeleton {
    pub fn member(&self, id: u32) -> &SkeletonMember {
        &self.members[id as usize - 1]
    }

    /// Member indices ordered so that parents precede their children.
    pub fn generation_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.members.len()).collect();
        order.sort_by_key(|&i| (self.members[i].generation, i));
        order
    }
}

struct Builder {
    members: Vec<SkeletonMember>,
}

impl Builder {
    fn add(&mut self, role: Role, sex: Sex, generation: u8, parents: Option<(u32, u32)>) -> u32 {
        let id = self.members.len() as u32 + 1;
        self.members.push(SkeletonMember {
            id,
            mother: parents.map(|p| p.0),
            father: parents.map(|p| p.1),
            sex,
            role,
            generation,
        });
        id
    }
}

fn any_sex<R: Rng + ?Sized>(rng: &mut R) -> Sex {
    if rng.random_bool(0.5) {
        Sex::Female
    } else {
        Sex::Male
    }
}

fn opposite(sex: Sex) -> Sex {
    match sex {
        Sex::Female => Sex::Male,
        _ => Sex::Female,
    }
}

/// Builds a family with the proband, parents and four grandparents, plus
/// brothers, sisters, aunts and uncles on both sides, children and nieces or
/// nephews in counts drawn from `counts`. Founder spouses are added for
/// members who have children.
pub fn generate_structure<R: Rng + ?Sized>(counts: &[u32], rng: &mut R) -> Skeleton {
    let draw = |rng: &mut R| counts.choose(rng).copied().unwrap_or(0);
    let mut b = Builder {
        members: Vec::new(),
    };
    let proband = b.add(Role::Proband, Sex::Female, 2, Some((2, 3)));
    let mother = b.add(Role::Mother, Sex::Female, 1, Some((4, 5)));
    let father = b.add(Role::Father, Sex::Male, 1, Some((6, 7)));
    let mgm = b.add(Role::MaternalGrandmother, Sex::Female, 0, None);
    let mgf = b.add(Role::MaternalGrandfather, Sex::Male, 0, None);
    let pgm = b.add(Role::PaternalGrandmother, Sex::Female, 0, None);
    let pgf = b.add(Role::PaternalGrandfather, Sex::Male, 0, None);
    debug_assert_eq!((proband, mother, father), (1, 2, 3));

    let brothers = draw(rng);
    let sisters = draw(rng);
    let maternal_au = draw(rng);
    let paternal_au = draw(rng);
    let children = draw(rng);

    let mut siblings = Vec::new();
    for _ in 0..brothers {
        siblings.push(b.add(Role::Brother, Sex::Male, 2, Some((mother, father))));
    }
    for _ in 0..sisters {
        siblings.push(b.add(Role::Sister, Sex::Female, 2, Some((mother, father))));
    }
    for _ in 0..maternal_au {
        let s = any_sex(rng);
        b.add(Role::MaternalAuntUncle, s, 1, Some((mgm, mgf)));
    }
    for _ in 0..paternal_au {
        let s = any_sex(rng);
        b.add(Role::PaternalAuntUncle, s, 1, Some((pgm, pgf)));
    }
    if children > 0 {
        let spouse = b.add(Role::Spouse, Sex::Male, 2, None);
        for _ in 0..children {
            let s = any_sex(rng);
            b.add(Role::Child, s, 3, Some((proband, spouse)));
        }
    }
    for sib in siblings {
        let kids = draw(rng);
        if kids == 0 {
            continue;
        }
        let sib_sex = b.members[sib as usize - 1].sex;
        let spouse = b.add(Role::Spouse, opposite(sib_sex), 2, None);
        let parents = if sib_sex == Sex::Female {
            (sib, spouse)
        } else {
            (spouse, sib)
        };
        for _ in 0..kids {
            let s = any_sex(rng);
            b.add(Role::NieceNephew, s, 3, Some(parents));
        }
    }
    Skeleton { members: b.members }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SnipRng;
    use rand::SeedableRng;

    #[test]
    fn minimal_family() {
        let mut rng = SnipRng::seed_from_u64(1);
        let s = generate_structure(&[0], &mut rng);
        assert_eq!(s.members.len(), 7);
        assert_eq!(s.member(1).role, Role::Proband);
        assert_eq!(s.member(2).father, Some(5));
    }

    #[test]
    fn parents_are_consistent() {
        let mut rng = SnipRng::seed_from_u64(9);
        for _ in 0..200 {
            let s = generate_structure(&[0, 1, 2, 3], &mut rng);
            for m in &s.members {
                if let (Some(mo), Some(fa)) = (m.mother, m.father) {
                    assert_eq!(s.member(mo).sex, Sex::Female);
                    assert_eq!(s.member(fa).sex, Sex::Male);
                    assert!(s.member(mo).generation < m.generation);
                    assert!(s.member(fa).generation < m.generation);
                } else {
                    assert!(m.is_founder());
                }
            }
            // 7 core + up to 3 of each of brothers, sisters, two aunt groups,
            // children (+ spouse) and per-sibling kids (+ spouse).
            assert!(s.members.len() <= 7 + 3 * 4 + 4 + 6 * 4);
        }
    }
}
