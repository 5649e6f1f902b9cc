use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use super::PermGroup;
use crate::error::{Error, Result};
use crate::perm::Perm;

/// A partition of the points into cells of equal size.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct BlockSystem {
    degree: usize,
    /// Cells sorted internally and ordered by smallest point.
    blocks: Vec<Vec<usize>>,
    block_of: Vec<usize>,
}

impl BlockSystem {
    /// From a cell labelling; labels are renumbered by first occurrence.
    pub fn from_labels(labels: &[usize]) -> Result<Self> {
        let degree = labels.len();
        let mut renumber = alloc::collections::BTreeMap::new();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut block_of = alloc::vec![0; degree];
        for (x, &l) in labels.iter().enumerate() {
            let next = renumber.len();
            let id = *renumber.entry(l).or_insert(next);
            if id == blocks.len() {
                blocks.push(Vec::new());
            }
            blocks[id].push(x);
            block_of[x] = id;
        }
        if let Some(first) = blocks.first() {
            if blocks.iter().any(|b| b.len() != first.len()) {
                return Err(Error::Invalid("cells have unequal sizes".into()));
            }
        }
        Ok(BlockSystem {
            degree,
            blocks,
            block_of,
        })
    }

    pub fn from_blocks(degree: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        let mut labels = alloc::vec![usize::MAX; degree];
        for (i, b) in blocks.iter().enumerate() {
            for &x in b {
                if x >= degree || labels[x] != usize::MAX {
                    return Err(Error::Invalid("cells must partition the points".into()));
                }
                labels[x] = i;
            }
        }
        if labels.contains(&usize::MAX) {
            return Err(Error::Invalid("cells must cover every point".into()));
        }
        BlockSystem::from_labels(&labels)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_of(&self, x: usize) -> usize {
        self.block_of[x]
    }

    pub fn labels(&self) -> &[usize] {
        &self.block_of
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_size(&self) -> usize {
        self.blocks.first().map_or(0, Vec::len)
    }

    pub fn is_trivial(&self) -> bool {
        self.blocks.len() <= 1 || self.block_size() == 1
    }

    /// Whether `g` maps every cell onto a cell.
    pub fn is_invariant_under(&self, g: &Perm) -> bool {
        self.blocks.iter().all(|b| {
            let target = self.block_of[g.apply(b[0])];
            b.iter().all(|&x| self.block_of[g.apply(x)] == target)
        })
    }
}

/// Finest `G`-invariant partition with `a` and `b` in one cell.
pub fn minimal_blocks(group: &PermGroup, a: usize, b: usize) -> Result<BlockSystem> {
    let n = group.degree();
    for p in [a, b] {
        if p >= n {
            return Err(Error::PointOutOfRange { point: p, degree: n });
        }
    }
    if !group.is_transitive() {
        return Err(Error::NotTransitive);
    }
    invariant_closure(group, &[(a, b)])
}

/// Smallest invariant equivalence containing the seed pairs.
fn invariant_closure(group: &PermGroup, seeds: &[(usize, usize)]) -> Result<BlockSystem> {
    let n = group.degree();
    let mut parent: Vec<usize> = (0..n).collect();
    let mut pending = Vec::new();
    for &(a, b) in seeds {
        if union(&mut parent, a, b) {
            pending.push((a, b));
        }
    }
    while let Some((x, y)) = pending.pop() {
        for g in group.generators() {
            let (gx, gy) = (g.apply(x), g.apply(y));
            if union(&mut parent, gx, gy) {
                pending.push((gx, gy));
            }
        }
    }
    let labels: Vec<usize> = (0..n).map(|x| find(&mut parent, x)).collect();
    BlockSystem::from_labels(&labels)
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

fn union(parent: &mut [usize], a: usize, b: usize) -> bool {
    let (ra, rb) = (find(parent, a), find(parent, b));
    if ra == rb {
        return false;
    }
    let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
    parent[hi] = lo;
    true
}

/// Every block system of a transitive group, trivial ones included, sorted.
pub fn all_block_systems(group: &PermGroup) -> Result<Vec<BlockSystem>> {
    if !group.is_transitive() {
        return Err(Error::NotTransitive);
    }
    let n = group.degree();
    let mut found: BTreeSet<BlockSystem> = BTreeSet::new();
    found.insert(BlockSystem::from_labels(&(0..n).collect::<Vec<_>>())?);
    let mut frontier: Vec<BlockSystem> = Vec::new();
    for b in 1..n {
        let sys = minimal_blocks(group, 0, b)?;
        if found.insert(sys.clone()) {
            frontier.push(sys);
        }
    }
    // joins of block systems are block systems; close under pairwise joins
    while let Some(sys) = frontier.pop() {
        let current: Vec<BlockSystem> = found.iter().cloned().collect();
        for other in current {
            let mut seeds = Vec::new();
            for cell in sys.blocks().iter().chain(other.blocks()) {
                for w in cell.windows(2) {
                    seeds.push((w[0], w[1]));
                }
            }
            let joined = invariant_closure(group, &seeds)?;
            if found.insert(joined.clone()) {
                frontier.push(joined);
            }
        }
    }
    Ok(found.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn group(n: usize, gens: &[&[&[usize]]]) -> PermGroup {
        PermGroup::new(n, gens.iter().map(|c| Perm::from_cycles(n, c).unwrap()).collect()).unwrap()
    }

    /// All set partitions of `0..n` as label vectors (restricted growth strings).
    fn set_partitions(n: usize) -> Vec<Vec<usize>> {
        fn rec(i: usize, n: usize, cur: &mut Vec<usize>, max: usize, out: &mut Vec<Vec<usize>>) {
            if i == n {
                out.push(cur.clone());
                return;
            }
            for l in 0..=max + 1 {
                cur.push(l);
                rec(i + 1, n, cur, if l > max { l } else { max }, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        if n > 0 {
            let mut cur = alloc::vec![0];
            rec(1, n, &mut cur, 0, &mut out);
        }
        out
    }

    fn invariant(labels: &[usize], g: &PermGroup) -> bool {
        g.generators().iter().all(|p| {
            (0..labels.len()).all(|x| {
                (0..labels.len()).all(|y| (labels[x] == labels[y]) == (labels[p.apply(x)] == labels[p.apply(y)]))
            })
        })
    }

    #[test]
    fn cyclic_four_pairs_opposite_points() {
        let z4 = group(4, &[&[&[0, 1, 2, 3]]]);
        let sys = minimal_blocks(&z4, 0, 2).unwrap();
        assert_eq!(sys.blocks(), &[alloc::vec![0, 2], alloc::vec![1, 3]]);
    }

    #[test]
    fn primitive_groups_collapse() {
        let z5 = group(5, &[&[&[0, 1, 2, 3, 4]]]);
        assert_eq!(minimal_blocks(&z5, 0, 1).unwrap().num_blocks(), 1);
        let s4 = PermGroup::symmetric(4);
        assert_eq!(minimal_blocks(&s4, 0, 1).unwrap().num_blocks(), 1);
    }

    #[test]
    fn intransitive_group_is_rejected() {
        let g = group(3, &[&[&[0, 1]]]);
        assert_eq!(minimal_blocks(&g, 0, 1).unwrap_err(), Error::NotTransitive);
    }

    #[test]
    fn minimal_blocks_are_minimal_exhaustively() {
        let groups = [
            group(6, &[&[&[0, 1, 2, 3, 4, 5]]]),
            group(8, &[&[&[0, 1, 2, 3, 4, 5, 6, 7]]]),
            group(
                8,
                &[&[&[0, 1, 2, 3], &[4, 5, 6, 7]], &[&[0, 4], &[1, 5], &[2, 6], &[3, 7]]],
            ),
            group(
                6,
                &[
                    &[&[0, 1, 2], &[3, 4, 5]],
                    &[&[0, 3], &[1, 4], &[2, 5]],
                    &[&[1, 2], &[4, 5]],
                ],
            ),
        ];
        for g in &groups {
            let n = g.degree();
            let parts = set_partitions(n);
            for b in 1..n {
                let sys = minimal_blocks(g, 0, b).unwrap();
                assert!(g.generators().iter().all(|p| sys.is_invariant_under(p)));
                // every invariant partition joining 0 and b is coarser than sys
                for labels in parts.iter().filter(|l| l[0] == l[b] && invariant(l, g)) {
                    for x in 0..n {
                        for y in 0..n {
                            if sys.block_of(x) == sys.block_of(y) {
                                assert_eq!(labels[x], labels[y]);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn all_systems_match_brute_force() {
        let g = group(8, &[&[&[0, 1, 2, 3, 4, 5, 6, 7]]]);
        let systems = all_block_systems(&g).unwrap();
        let brute: Vec<_> = set_partitions(8)
            .into_iter()
            .filter(|l| invariant(l, &g))
            .filter_map(|l| BlockSystem::from_labels(&l).ok())
            .collect();
        // Z_8 has systems of block size 1, 2, 4, 8
        assert_eq!(systems.len(), 4);
        assert_eq!(brute.len(), 4);
        for s in &brute {
            assert!(systems.contains(s));
        }
    }
}
