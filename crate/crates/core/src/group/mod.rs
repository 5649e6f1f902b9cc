//! Finitely generated permutation groups.

mod blocks;
mod chain;
mod search;

pub use blocks::{all_block_systems, minimal_blocks, BlockSystem};
pub use chain::StabChain;
pub use search::{
    center, centralizer, conjugacy_search, sylow, sylow_containing, Conjugacy, DEFAULT_ENUM_CAP, DEFAULT_NODE_BUDGET,
};

use alloc::vec::Vec;
use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::Rng;

use crate::error::{Error, Result};
use crate::perm::Perm;

/// A permutation group given by generators, with its stabilizer chain.
///
/// Immutable after construction.
#[derive(Clone, Debug)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Perm>,
    chain: StabChain,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RegularityReport {
    pub transitive: bool,
    pub regular: bool,
    pub abelian: bool,
}

impl PermGroup {
    pub fn new(degree: usize, generators: Vec<Perm>) -> Result<Self> {
        check_degrees(degree, &generators)?;
        let chain = StabChain::new(degree, &generators);
        Ok(PermGroup {
            degree,
            generators,
            chain,
        })
    }

    /// Builds the chain by randomised Schreier–Sims, for groups whose order
    /// is known in advance (automorphism groups report it).
    pub fn with_order(degree: usize, generators: Vec<Perm>, order: &BigUint) -> Result<Self> {
        check_degrees(degree, &generators)?;
        let chain = StabChain::with_order(degree, &generators, order, 0x5eed_c4a1);
        Ok(PermGroup {
            degree,
            generators,
            chain,
        })
    }

    pub fn trivial(degree: usize) -> Self {
        PermGroup::new(degree, Vec::new()).unwrap()
    }

    pub fn symmetric(degree: usize) -> Self {
        let mut gens = Vec::new();
        if degree >= 2 {
            gens.push(Perm::from_cycles(degree, &[[0, 1]]).unwrap());
        }
        if degree >= 3 {
            let cycle: Vec<usize> = (0..degree).collect();
            gens.push(Perm::from_cycles(degree, &[cycle]).unwrap());
        }
        let order = (1..=degree).fold(BigUint::from(1u32), |acc, k| acc * BigUint::from(k));
        PermGroup::with_order(degree, gens, &order).unwrap()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    pub fn chain(&self) -> &StabChain {
        &self.chain
    }

    pub fn order(&self) -> BigUint {
        self.chain.order()
    }

    /// Order as `u64`, `None` when it does not fit.
    pub fn order_u64(&self) -> Option<u64> {
        self.order().to_u64()
    }

    pub fn contains(&self, g: &Perm) -> bool {
        self.chain.contains(g)
    }

    pub fn is_subgroup_of(&self, other: &PermGroup) -> bool {
        self.generators.iter().all(|g| other.contains(g))
    }

    /// Same degree and same elements.
    pub fn same_group(&self, other: &PermGroup) -> bool {
        self.degree == other.degree && self.order() == other.order() && self.is_subgroup_of(other)
    }

    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> Perm {
        self.chain.random_element(rng)
    }

    /// All elements, or [`Error::OverCap`] when the order exceeds `cap`.
    pub fn enumerate(&self, cap: usize) -> Result<Vec<Perm>> {
        self.check_cap(cap)?;
        let mut out = Vec::new();
        self.chain.for_each_element(|g| {
            out.push(g.clone());
            true
        });
        out.sort();
        Ok(out)
    }

    pub(crate) fn check_cap(&self, cap: usize) -> Result<usize> {
        match self.order().to_usize() {
            Some(n) if n <= cap => Ok(n),
            _ => Err(Error::OverCap { cap }),
        }
    }

    /// Orbit of `pt`, sorted.
    pub fn orbit(&self, pt: usize) -> Result<Vec<usize>> {
        if pt >= self.degree {
            return Err(Error::PointOutOfRange {
                point: pt,
                degree: self.degree,
            });
        }
        Ok(orbit_of(self.degree, &self.generators, pt))
    }

    /// All orbits, each sorted, ordered by smallest point.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        orbits_of(self.degree, &self.generators)
    }

    pub fn is_transitive(&self) -> bool {
        self.degree <= 1 || orbit_of(self.degree, &self.generators, 0).len() == self.degree
    }

    pub fn is_abelian(&self) -> bool {
        self.generators
            .iter()
            .enumerate()
            .all(|(i, a)| self.generators[i + 1..].iter().all(|b| a.commutes_with(b)))
    }

    pub fn regularity_report(&self) -> RegularityReport {
        let transitive = self.is_transitive();
        RegularityReport {
            transitive,
            regular: transitive && self.order() == BigUint::from(self.degree),
            abelian: self.is_abelian(),
        }
    }

    /// `H^a` for every generator.
    pub fn conjugate_by(&self, a: &Perm) -> PermGroup {
        let gens = self.generators.iter().map(|g| g.conjugate_by(a)).collect();
        PermGroup::with_order(self.degree, gens, &self.order()).unwrap()
    }

    /// `⟨self, other⟩`.
    pub fn join(&self, other: &PermGroup) -> Result<PermGroup> {
        let mut gens = self.generators.clone();
        gens.extend(other.generators.iter().cloned());
        PermGroup::new(self.degree, gens)
    }

    /// Action on the cells of an invariant partition (`cell_of[x]` is the cell of `x`).
    pub fn induced_on_cells(&self, cell_of: &[usize], cells: usize) -> Result<PermGroup> {
        let gens = self
            .generators
            .iter()
            .map(|g| induced_perm(g, cell_of, cells))
            .collect::<Result<Vec<_>>>()?;
        PermGroup::new(cells, gens)
    }

    /// Subgroup generated by the listed elements; generators are pruned
    /// greedily so each one enlarges the group.
    pub fn generated_by(degree: usize, elements: &[Perm]) -> Result<PermGroup> {
        let mut group = PermGroup::trivial(degree);
        for e in elements {
            if !group.contains(e) {
                let mut gens = group.generators.clone();
                gens.push(e.clone());
                group = PermGroup::new(degree, gens)?;
            }
        }
        Ok(group)
    }
}

fn check_degrees(degree: usize, generators: &[Perm]) -> Result<()> {
    for g in generators {
        if g.degree() != degree {
            return Err(Error::DegreeMismatch {
                left: degree,
                right: g.degree(),
            });
        }
    }
    Ok(())
}

pub(crate) fn orbit_of(degree: usize, gens: &[Perm], pt: usize) -> Vec<usize> {
    let mut seen = alloc::vec![false; degree];
    seen[pt] = true;
    let mut orbit = alloc::vec![pt];
    let mut head = 0;
    while head < orbit.len() {
        let x = orbit[head];
        head += 1;
        for g in gens {
            let y = g.apply(x);
            if !seen[y] {
                seen[y] = true;
                orbit.push(y);
            }
        }
    }
    orbit.sort_unstable();
    orbit
}

pub(crate) fn orbits_of(degree: usize, gens: &[Perm]) -> Vec<Vec<usize>> {
    let mut done = alloc::vec![false; degree];
    let mut out = Vec::new();
    for x in 0..degree {
        if !done[x] {
            let orb = orbit_of(degree, gens, x);
            for &y in &orb {
                done[y] = true;
            }
            out.push(orb);
        }
    }
    out
}

/// Permutation induced on cells; fails if `g` does not preserve the partition.
pub fn induced_perm(g: &Perm, cell_of: &[usize], cells: usize) -> Result<Perm> {
    let mut images = alloc::vec![usize::MAX; cells];
    for x in 0..g.degree() {
        let (c, d) = (cell_of[x], cell_of[g.apply(x)]);
        if images[c] == usize::MAX {
            images[c] = d;
        } else if images[c] != d {
            return Err(Error::Invalid(alloc::format!(
                "permutation {g} does not preserve the partition"
            )));
        }
    }
    Perm::from_images(images)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cyc(n: usize, cycles: &[&[usize]]) -> Perm {
        Perm::from_cycles(n, cycles).unwrap()
    }

    fn group(n: usize, gens: &[&[&[usize]]]) -> PermGroup {
        PermGroup::new(n, gens.iter().map(|c| cyc(n, c)).collect()).unwrap()
    }

    /// Closure of the generators by breadth-first multiplication.
    fn brute_closure(n: usize, gens: &[Perm]) -> alloc::collections::BTreeSet<Perm> {
        let mut seen = alloc::collections::BTreeSet::new();
        let id = Perm::identity(n);
        seen.insert(id.clone());
        let mut queue = alloc::vec![id];
        while let Some(x) = queue.pop() {
            for g in gens {
                let y = x.then(g);
                if seen.insert(y.clone()) {
                    queue.push(y);
                }
            }
        }
        seen
    }

    #[test]
    fn orbits_of_small_groups() {
        assert_eq!(group(4, &[&[&[0, 1], &[2, 3]]]).orbit(0).unwrap(), [0, 1]);
        assert_eq!(group(4, &[&[&[0, 1, 2, 3]]]).orbit(2).unwrap(), [0, 1, 2, 3]);
        assert_eq!(group(4, &[&[&[0, 1]], &[&[2, 3]]]).orbit(3).unwrap(), [2, 3]);
        assert!(group(3, &[]).orbit(3).is_err());
    }

    #[test]
    fn sym4_from_two_generators() {
        let g = group(4, &[&[&[0, 1, 2, 3]], &[&[0, 1]]]);
        let brute = brute_closure(4, g.generators());
        assert_eq!(brute.len(), 24);
        assert_eq!(g.order_u64(), Some(24));
    }

    #[test]
    fn cyclic_membership() {
        let g = group(3, &[&[&[0, 1, 2]]]);
        assert!(g.contains(&cyc(3, &[&[0, 2, 1]])));
        assert!(!g.contains(&cyc(3, &[&[0, 1]])));
    }

    #[test]
    fn enumeration_cap_is_a_signal() {
        let t = group(2, &[&[&[0, 1]]]);
        assert_eq!(t.enumerate(10).unwrap(), [Perm::identity(2), cyc(2, &[&[0, 1]])]);
        let s4 = PermGroup::symmetric(4);
        assert_eq!(s4.enumerate(10).unwrap_err(), Error::OverCap { cap: 10 });
        assert_eq!(group(5, &[&[&[0, 1, 2, 3, 4]]]).enumerate(10).unwrap().len(), 5);
    }

    #[test]
    fn regularity_reports() {
        let z6 = group(6, &[&[&[0, 1, 2, 3, 4, 5]]]);
        assert_eq!(
            z6.regularity_report(),
            RegularityReport {
                transitive: true,
                regular: true,
                abelian: true
            }
        );
        let s3 = PermGroup::symmetric(3);
        let r = s3.regularity_report();
        assert!(r.transitive && !r.regular);
        assert!(!group(3, &[&[&[0, 1]]]).regularity_report().transitive);
    }

    #[test]
    fn symmetric_group_of_larger_degree() {
        let s = PermGroup::symmetric(30);
        let expected = (1..=30u32).fold(BigUint::from(1u32), |a, k| a * BigUint::from(k));
        assert_eq!(s.order(), expected);
        assert!(s.contains(&cyc(30, &[&[3, 17, 29]])));
        let det = PermGroup::new(9, s9_gens()).unwrap();
        assert_eq!(det.order_u64(), Some(362_880));
    }

    fn s9_gens() -> Vec<Perm> {
        alloc::vec![cyc(9, &[&[0, 1]]), cyc(9, &[&[0, 1, 2, 3, 4, 5, 6, 7, 8]])]
    }

    #[test]
    fn element_walk_visits_each_element_once() {
        let g = group(6, &[&[&[0, 1, 2]], &[&[3, 4]], &[&[0, 3], &[1, 4], &[2, 5]]]);
        let all = g.enumerate(usize::MAX).unwrap();
        let brute = brute_closure(6, g.generators());
        assert_eq!(all.len(), brute.len());
        assert!(all.iter().all(|p| brute.contains(p)));
    }

    fn arb_group() -> impl Strategy<Value = (usize, Vec<Perm>)> {
        (1usize..=8).prop_flat_map(|n| {
            let perm = Just((0..n).collect::<Vec<usize>>())
                .prop_shuffle()
                .prop_map(|v| Perm::from_images(v).unwrap());
            (Just(n), proptest::collection::vec(perm, 0..=3))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn chain_order_matches_closure((n, gens) in arb_group()) {
            let g = PermGroup::new(n, gens.clone()).unwrap();
            let brute = brute_closure(n, &gens);
            prop_assert_eq!(g.order(), BigUint::from(brute.len()));
            for p in brute.iter().take(50) {
                prop_assert!(g.contains(p));
            }
            let random = PermGroup::with_order(n, gens, &g.order()).unwrap();
            prop_assert_eq!(random.order(), g.order());
        }

        #[test]
        fn membership_rejects_outsiders((n, gens) in arb_group(), seed in any::<u64>()) {
            use rand::SeedableRng;
            let g = PermGroup::new(n, gens.clone()).unwrap();
            let brute = brute_closure(n, &gens);
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let sym = PermGroup::symmetric(n);
            for _ in 0..20 {
                let p = sym.random_element(&mut rng);
                prop_assert_eq!(g.contains(&p), brute.contains(&p));
            }
        }
    }
}
