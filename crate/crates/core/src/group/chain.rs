//! Base and strong generating set.

use alloc::vec::Vec;
use num_bigint::BigUint;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::perm::Perm;

#[derive(Clone, Debug)]
pub(crate) struct Level {
    /// Strong generators fixing every earlier base point.
    pub(crate) gens: Vec<Perm>,
    /// Orbit of the base point, in discovery order.
    pub(crate) orbit: Vec<usize>,
    /// `transversal[x]` maps the base point to `x`.
    pub(crate) transversal: Vec<Option<Perm>>,
}

impl Level {
    fn new(degree: usize, point: usize, gens: Vec<Perm>) -> Self {
        let mut level = Level {
            gens,
            orbit: Vec::new(),
            transversal: alloc::vec![None; degree],
        };
        level.rebuild(point);
        level
    }

    fn rebuild(&mut self, point: usize) {
        let degree = self.transversal.len();
        for t in self.transversal.iter_mut() {
            *t = None;
        }
        self.orbit.clear();
        self.transversal[point] = Some(Perm::identity(degree));
        self.orbit.push(point);
        let mut head = 0;
        while head < self.orbit.len() {
            let x = self.orbit[head];
            head += 1;
            for s in &self.gens {
                let y = s.apply(x);
                if self.transversal[y].is_none() {
                    let u = self.transversal[x].as_ref().unwrap().then(s);
                    self.transversal[y] = Some(u);
                    self.orbit.push(y);
                }
            }
        }
    }
}

/// Stabilizer chain of a permutation group.
///
/// Elements factor uniquely as `u_{k-1} ... u_1 u_0` (left to right), one
/// transversal element per level, deepest level first.
#[derive(Clone, Debug)]
pub struct StabChain {
    degree: usize,
    base: Vec<usize>,
    pub(crate) levels: Vec<Level>,
}

impl StabChain {
    /// Deterministic Schreier–Sims.
    pub fn new(degree: usize, generators: &[Perm]) -> Self {
        let mut chain = StabChain {
            degree,
            base: Vec::new(),
            levels: Vec::new(),
        };
        let gens: Vec<Perm> = generators.iter().filter(|g| !g.is_identity()).cloned().collect();
        for g in &gens {
            chain.ensure_moved(g);
        }
        for i in 0..chain.base.len() {
            let level_gens: Vec<Perm> = gens
                .iter()
                .filter(|g| chain.base[..i].iter().all(|&b| g.apply(b) == b))
                .cloned()
                .collect();
            chain.levels.push(Level::new(degree, chain.base[i], level_gens));
        }
        chain.complete();
        chain
    }

    /// Randomised Schreier–Sims that stops once the chain reaches `order`.
    ///
    /// The result is exact because the chain always describes a subgroup; if
    /// random sifting stalls the deterministic completion takes over.
    pub fn with_order(degree: usize, generators: &[Perm], order: &BigUint, seed: u64) -> Self {
        let mut chain = StabChain {
            degree,
            base: Vec::new(),
            levels: Vec::new(),
        };
        let gens: Vec<Perm> = generators.iter().filter(|g| !g.is_identity()).cloned().collect();
        for g in &gens {
            chain.add_residue(g.clone(), 0);
        }
        if gens.is_empty() {
            return chain;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pool = ProductReplacement::new(&gens, &mut rng);
        let mut misses = 0usize;
        while &chain.order() < order {
            let g = pool.next(&mut rng);
            let (residue, drop) = chain.strip(&g, 0);
            if residue.is_identity() && drop == chain.levels.len() {
                misses += 1;
                if misses > 4000 {
                    chain.complete();
                    break;
                }
                continue;
            }
            misses = 0;
            chain.add_residue(residue, drop);
        }
        chain
    }

    fn ensure_moved(&mut self, g: &Perm) {
        if self.base.iter().all(|&b| g.apply(b) == b) {
            let moved = (0..self.degree).find(|&x| g.apply(x) != x).unwrap();
            self.base.push(moved);
        }
    }

    /// Adds a sifted residue that fixes base points before `drop` at levels `..=drop`.
    fn add_residue(&mut self, h: Perm, drop: usize) {
        if drop == self.levels.len() {
            self.ensure_moved(&h);
            let point = self.base[self.levels.len()];
            self.levels.push(Level::new(self.degree, point, Vec::new()));
        }
        let top = drop.min(self.levels.len() - 1);
        for l in 0..=top {
            self.levels[l].gens.push(h.clone());
            let point = self.base[l];
            self.levels[l].rebuild(point);
        }
    }

    fn complete(&mut self) {
        let mut i = self.levels.len();
        while i > 0 {
            let lvl = i - 1;
            let mut restart = None;
            'scan: for oi in 0..self.levels[lvl].orbit.len() {
                let beta = self.levels[lvl].orbit[oi];
                for si in 0..self.levels[lvl].gens.len() {
                    let level = &self.levels[lvl];
                    let s = &level.gens[si];
                    let u = level.transversal[beta].as_ref().unwrap();
                    let image = s.apply(beta);
                    let back = level.transversal[image].as_ref().unwrap().inverse();
                    let schreier = u.then(s).then(&back);
                    if schreier.is_identity() {
                        continue;
                    }
                    let (residue, drop) = self.strip(&schreier, lvl + 1);
                    if !residue.is_identity() || drop < self.levels.len() {
                        self.add_residue_from(residue, lvl + 1, drop);
                        restart = Some(drop.min(self.levels.len() - 1) + 1);
                        break 'scan;
                    }
                }
            }
            match restart {
                Some(next) => i = next,
                None => i -= 1,
            }
        }
    }

    fn add_residue_from(&mut self, h: Perm, from: usize, drop: usize) {
        if drop == self.levels.len() {
            self.ensure_moved(&h);
            let point = self.base[self.levels.len()];
            self.levels.push(Level::new(self.degree, point, Vec::new()));
        }
        let top = drop.min(self.levels.len() - 1);
        for l in from..=top {
            self.levels[l].gens.push(h.clone());
            let point = self.base[l];
            self.levels[l].rebuild(point);
        }
    }

    /// Sifts `g` starting at level `from`; returns the residue and the level
    /// where sifting stopped (`levels.len()` when it passed every level).
    pub(crate) fn strip(&self, g: &Perm, from: usize) -> (Perm, usize) {
        let mut h = g.clone();
        for (i, level) in self.levels.iter().enumerate().skip(from) {
            let beta = h.apply(self.base[i]);
            match &level.transversal[beta] {
                Some(u) => h = h.then(&u.inverse()),
                None => return (h, i),
            }
        }
        (h, self.levels.len())
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn base(&self) -> &[usize] {
        &self.base[..self.levels.len()]
    }

    pub fn strong_generators(&self) -> Vec<Perm> {
        self.levels.first().map(|l| l.gens.clone()).unwrap_or_default()
    }

    pub fn transversal_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.orbit.len()).collect()
    }

    pub fn order(&self) -> BigUint {
        self.levels
            .iter()
            .fold(BigUint::one(), |acc, l| acc * BigUint::from(l.orbit.len()))
    }

    pub fn contains(&self, g: &Perm) -> bool {
        if g.degree() != self.degree {
            return false;
        }
        let (residue, _) = self.strip(g, 0);
        residue.is_identity()
    }

    /// Element with transversal choice `choices[i] < orbit length` at level `i`.
    pub fn element_from_choices(&self, choices: &[usize]) -> Perm {
        let mut g = Perm::identity(self.degree);
        for (level, &c) in self.levels.iter().zip(choices).rev() {
            g = g.then(level.transversal[level.orbit[c]].as_ref().unwrap());
        }
        g
    }

    /// Uniformly random element.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> Perm {
        let choices: Vec<usize> = self.levels.iter().map(|l| rng.gen_range(0..l.orbit.len())).collect();
        self.element_from_choices(&choices)
    }

    /// Visits every element (depth first over the transversals). Stops early
    /// when `f` returns `false`; returns whether the walk completed.
    pub fn for_each_element<F: FnMut(&Perm) -> bool>(&self, mut f: F) -> bool {
        let id = Perm::identity(self.degree);
        if self.levels.is_empty() {
            return f(&id);
        }
        self.walk(self.levels.len(), &id, &mut f)
    }

    fn walk<F: FnMut(&Perm) -> bool>(&self, depth: usize, prefix: &Perm, f: &mut F) -> bool {
        if depth == 0 {
            return f(prefix);
        }
        let level = &self.levels[depth - 1];
        for &x in &level.orbit {
            let next = prefix.then(level.transversal[x].as_ref().unwrap());
            if !self.walk(depth - 1, &next, f) {
                return false;
            }
        }
        true
    }
}

/// Product-replacement generator for pseudo-random group elements.
struct ProductReplacement {
    slots: Vec<Perm>,
    accum: Perm,
}

impl ProductReplacement {
    fn new<R: Rng>(gens: &[Perm], rng: &mut R) -> Self {
        let mut slots: Vec<Perm> = gens.to_vec();
        while slots.len() < 10 {
            let g = gens[slots.len() % gens.len()].clone();
            slots.push(g);
        }
        let accum = Perm::identity(gens[0].degree());
        let mut pr = ProductReplacement { slots, accum };
        for _ in 0..50 {
            pr.next(rng);
        }
        pr
    }

    fn next<R: Rng>(&mut self, rng: &mut R) -> Perm {
        let n = self.slots.len();
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let prod = if rng.gen::<bool>() {
            self.slots[i].then(&self.slots[j])
        } else {
            self.slots[i].then(&self.slots[j].inverse())
        };
        self.slots[i] = prod;
        self.accum = self.accum.then(&self.slots[i]);
        self.accum.clone()
    }
}
