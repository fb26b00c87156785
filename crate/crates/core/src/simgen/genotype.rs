//! Mendelian transmission of mutated alleles.

use rand::Rng;

use super::structure::Skeleton;
use super::Gene;

/// Two alleles of one gene; `true` marks a mutated allele.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Genotype(pub bool, pub bool);

impl Genotype {
    pub fn is_carrier(self) -> bool {
        self.0 || self.1
    }
}

/// Each allele is mutated independently with probability `q`.
pub fn founder_genotype<R: Rng + ?Sized>(q: f64, rng: &mut R) -> Genotype {
    Genotype(rng.random_bool(q), rng.random_bool(q))
}

/// One uniformly chosen allele from each parent.
pub fn transmit<R: Rng + ?Sized>(mother: Genotype, father: Genotype, rng: &mut R) -> Genotype {
    let from = |g: Genotype, rng: &mut R| if rng.random_bool(0.5) { g.0 } else { g.1 };
    let m = from(mother, rng);
    let f = from(father, rng);
    Genotype(m, f)
}

/// Genotypes indexed `[member][gene]`.
pub fn generate_genotypes<R: Rng + ?Sized>(
    skeleton: &Skeleton,
    genes: &[Gene],
    rng: &mut R,
) -> Vec<Vec<Genotype>> {
    let mut out = vec![vec![Genotype::default(); genes.len()]; skeleton.members.len()];
    for i in skeleton.generation_order() {
        let m = &skeleton.members[i];
        for (g, gene) in genes.iter().enumerate() {
            out[i][g] = match (m.mother, m.father) {
                (Some(mo), Some(fa)) => {
                    transmit(out[mo as usize - 1][g], out[fa as usize - 1][g], rng)
                }
                _ => founder_genotype(gene.allele_freq, rng),
            };
        }
    }
    out
}

/// Carrier bitmask per member over the gene list.
pub fn carrier_profiles(genotypes: &[Vec<Genotype>]) -> Vec<u64> {
    genotypes
        .iter()
        .map(|gs| {
            gs.iter()
                .enumerate()
                .filter(|(_, g)| g.is_carrier())
                .fold(0u64, |acc, (i, _)| acc | (1 << i))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SnipRng;
    use crate::simgen::structure::generate_structure;
    use rand::SeedableRng;

    #[test]
    fn non_carrier_parents_have_non_carrier_children() {
        let mut rng = SnipRng::seed_from_u64(5);
        for _ in 0..1000 {
            let child = transmit(Genotype(false, false), Genotype(false, false), &mut rng);
            assert!(!child.is_carrier());
        }
    }

    #[test]
    fn homozygous_parent_always_transmits() {
        let mut rng = SnipRng::seed_from_u64(6);
        for _ in 0..1000 {
            assert!(transmit(Genotype(true, true), Genotype(false, false), &mut rng).is_carrier());
        }
    }

    #[test]
    fn founders_and_children_filled() {
        let mut rng = SnipRng::seed_from_u64(7);
        let s = generate_structure(&[2], &mut rng);
        let genes = [Gene::new("G", 1.0)];
        let gts = generate_genotypes(&s, &genes, &mut rng);
        assert!(gts.iter().all(|g| g[0] == Genotype(true, true)));
    }
}
