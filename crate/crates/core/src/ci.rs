//! Cayley-isomorphism tests: pairwise by definition, exhaustive scans by
//! canonical-form bucketing, and the regular-subgroup criterion.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::abgroups::{abelian_types, aut_group, GroupAut, GroupSpec, RegularTable};
use crate::error::{Error, Result};
use crate::graphs::{Canonical, CayleyGraph, ColoredDigraph, RegularConjugator};
use crate::group::{center, Conjugacy, PermGroup};
use crate::perm::Perm;

/// Largest group order scanned exhaustively without an override.
pub const EXHAUSTIVE_ORDER_LIMIT: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CiVerdict {
    NotIsomorphic,
    /// `S^mu = T`.
    CiEquivalent(GroupAut),
    /// An isomorphism `Cay(G,S) -> Cay(G,T)` that no group automorphism realises.
    NonCiWitness(Perm),
}

fn normalize(set: &[usize]) -> Vec<usize> {
    let mut s = set.to_vec();
    s.sort_unstable();
    s.dedup();
    s
}

/// Decides whether `Cay(G,S)` and `Cay(G,T)` are isomorphic and, if so,
/// whether a group automorphism maps `S` to `T`.
pub fn ci_pair(spec: &GroupSpec, s: &[usize], t: &[usize], budget: u64) -> Result<CiVerdict> {
    let (s, t) = (normalize(s), normalize(t));
    let gs = CayleyGraph::new(spec, &s)?;
    let gt = CayleyGraph::new(spec, &t)?;
    if s.len() != t.len() {
        return Ok(CiVerdict::NotIsomorphic);
    }
    let Some(sigma) = gs.graph().isomorphism_to(gt.graph(), budget)? else {
        return Ok(CiVerdict::NotIsomorphic);
    };
    if !gs.graph().is_isomorphism(gt.graph(), &sigma) {
        return Err(Error::Invalid("canonical isomorphism failed verification".into()));
    }
    let auts = aut_group(spec, crate::group::DEFAULT_ENUM_CAP)?;
    match auts.into_iter().find(|mu| mu.image_of_set(&s) == t) {
        Some(mu) => Ok(CiVerdict::CiEquivalent(mu)),
        None => Ok(CiVerdict::NonCiWitness(sigma)),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScanMode {
    Exhaustive,
    Sample { count: usize, seed: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SetClass {
    Ci,
    NonCi,
    /// Undecided within budget.
    Skipped,
}

/// `T` with `Cay(G,S) ~ Cay(G,T)` via `sigma` but `S`, `T` in different `Aut(G)`-orbits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub t: Vec<usize>,
    pub sigma: Perm,
}

#[derive(Clone, Debug)]
pub struct ScanEntry {
    pub set: Vec<usize>,
    pub class: SetClass,
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug)]
pub struct DciReport {
    pub spec: GroupSpec,
    pub mode: ScanMode,
    pub entries: Vec<ScanEntry>,
    /// Distinct canonical forms (exhaustive mode only).
    pub buckets: usize,
    pub largest_bucket: usize,
    /// `Aut(G)`-orbits on connection sets (exhaustive mode only).
    pub orbits: usize,
}

impl DciReport {
    pub fn count(&self, class: SetClass) -> usize {
        self.entries.iter().filter(|e| e.class == class).count()
    }

    pub fn witnesses(&self) -> impl Iterator<Item = (&ScanEntry, &Witness)> {
        self.entries.iter().filter_map(|e| e.witness.as_ref().map(|w| (e, w)))
    }
}

/// Connection set of a mask: bit `i` stands for element `i + 1`.
pub fn set_of_mask(mask: u64) -> Vec<usize> {
    (0..64).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).collect()
}

pub fn mask_of_set(set: &[usize]) -> u64 {
    set.iter().fold(0, |m, &x| m | 1 << (x - 1))
}

/// Number of connection sets of an exhaustive scan, `2^(n-1)`; enforces the size guard.
pub fn exhaustive_size(spec: &GroupSpec, allow_large: bool) -> Result<u64> {
    let n = spec.order();
    if n > 64 || (!allow_large && n > EXHAUSTIVE_ORDER_LIMIT) {
        return Err(Error::OverCap {
            cap: EXHAUSTIVE_ORDER_LIMIT,
        });
    }
    Ok(1u64 << (n - 1))
}

pub fn canonical_of_mask(spec: &GroupSpec, mask: u64, budget: u64) -> Result<Canonical> {
    CayleyGraph::new(spec, &set_of_mask(mask))?.graph().canonical(budget)
}

/// Collects canonical forms of every mask, in increasing mask order, and
/// classifies once all are in.
pub struct ScanAccumulator {
    spec: GroupSpec,
    forms: BTreeMap<ColoredDigraph, u32>,
    bucket: Vec<u32>,
    labelling: Vec<Perm>,
}

impl ScanAccumulator {
    pub fn new(spec: &GroupSpec) -> Self {
        ScanAccumulator {
            spec: spec.clone(),
            forms: BTreeMap::new(),
            bucket: Vec::new(),
            labelling: Vec::new(),
        }
    }

    /// The next mask in order is `self.len()`.
    pub fn len(&self) -> usize {
        self.bucket.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bucket.is_empty()
    }

    pub fn push(&mut self, canon: Canonical) {
        let next = self.forms.len() as u32;
        let id = *self.forms.entry(canon.form).or_insert(next);
        self.bucket.push(id);
        self.labelling.push(canon.labelling);
    }

    pub fn finish(self) -> Result<DciReport> {
        let spec = &self.spec;
        let total = self.bucket.len();
        if total as u64 != exhaustive_size(spec, true)? {
            return Err(Error::Invalid("scan is missing connection sets".into()));
        }
        let auts = aut_group(spec, crate::group::DEFAULT_ENUM_CAP)?;
        let n = spec.order();
        let bit_maps: Vec<Vec<u32>> = auts
            .iter()
            .map(|mu| (1..n).map(|x| (mu.apply(x) - 1) as u32).collect())
            .collect();
        let image = |map: &[u32], mask: usize| {
            let mut out = 0usize;
            let mut m = mask;
            while m != 0 {
                let i = m.trailing_zeros() as usize;
                out |= 1 << map[i];
                m &= m - 1;
            }
            out
        };
        let mut orbit = alloc::vec![u32::MAX; total];
        let mut orbits = 0u32;
        for mask in 0..total {
            if orbit[mask] != u32::MAX {
                continue;
            }
            for map in &bit_maps {
                orbit[image(map, mask)] = orbits;
            }
            orbits += 1;
        }
        let mut members: Vec<Vec<u32>> = alloc::vec![Vec::new(); self.forms.len()];
        for (mask, &b) in self.bucket.iter().enumerate() {
            members[b as usize].push(mask as u32);
        }
        let mut entries = Vec::with_capacity(total);
        for mask in 0..total {
            let bucket = &members[self.bucket[mask] as usize];
            let other = bucket.iter().copied().find(|&m| orbit[m as usize] != orbit[mask]);
            let (class, witness) = match other {
                None => (SetClass::Ci, None),
                Some(t) => {
                    let t = t as usize;
                    let sigma = self.labelling[mask].then(&self.labelling[t].inverse());
                    let gs = CayleyGraph::new(spec, &set_of_mask(mask as u64))?;
                    let gt = CayleyGraph::new(spec, &set_of_mask(t as u64))?;
                    if !gs.graph().is_isomorphism(gt.graph(), &sigma) {
                        return Err(Error::Invalid("witness failed verification".into()));
                    }
                    (
                        SetClass::NonCi,
                        Some(Witness {
                            t: set_of_mask(t as u64),
                            sigma,
                        }),
                    )
                }
            };
            entries.push(ScanEntry {
                set: set_of_mask(mask as u64),
                class,
                witness,
            });
        }
        Ok(DciReport {
            spec: spec.clone(),
            mode: ScanMode::Exhaustive,
            entries,
            buckets: self.forms.len(),
            largest_bucket: members.iter().map(Vec::len).max().unwrap_or(0),
            orbits: orbits as usize,
        })
    }
}

/// Budgets shared by scans and the regular-subgroup criterion.
#[derive(Clone, Copy, Debug)]
pub struct Budgets {
    /// Canonical-form search nodes per graph.
    pub nodes: u64,
    /// Cap on enumerated elements of `Aut(Cay(G,S))`.
    pub enum_cap: usize,
    /// Backtracking nodes of the regular-subgroup search.
    pub subgroup_nodes: u64,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            nodes: crate::group::DEFAULT_NODE_BUDGET,
            enum_cap: crate::group::DEFAULT_ENUM_CAP,
            subgroup_nodes: crate::group::DEFAULT_NODE_BUDGET,
        }
    }
}

/// Classifies every connection set (exhaustive) or `count` random ones
/// (sample, decided by [`babai_ci`]).
pub fn dci_scan(spec: &GroupSpec, mode: ScanMode, allow_large: bool, budgets: &Budgets) -> Result<DciReport> {
    match mode {
        ScanMode::Exhaustive => {
            let total = exhaustive_size(spec, allow_large)?;
            let mut acc = ScanAccumulator::new(spec);
            for mask in 0..total {
                acc.push(canonical_of_mask(spec, mask, budgets.nodes)?);
            }
            acc.finish()
        }
        ScanMode::Sample { count, seed } => {
            let entries = sample_sets(spec, count, seed)
                .into_iter()
                .map(|set| babai_entry(spec, set, budgets))
                .collect::<Result<_>>()?;
            Ok(DciReport {
                spec: spec.clone(),
                mode,
                entries,
                buckets: 0,
                largest_bucket: 0,
                orbits: 0,
            })
        }
    }
}

/// The `count` connection sets of a seeded sample scan, each element of
/// `G \ {0}` included with probability 1/2.
pub fn sample_sets(spec: &GroupSpec, count: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (1..spec.order()).filter(|_| rng.gen_bool(0.5)).collect())
        .collect()
}

/// Scan entry of one set classified by [`babai_ci`].
pub fn babai_entry(spec: &GroupSpec, set: Vec<usize>, budgets: &Budgets) -> Result<ScanEntry> {
    let report = babai_ci(spec, &set, budgets)?;
    let class = match report.verdict {
        BabaiVerdict::Ci => SetClass::Ci,
        BabaiVerdict::NotCi => SetClass::NonCi,
        BabaiVerdict::Indeterminate => SetClass::Skipped,
    };
    Ok(ScanEntry {
        set,
        class,
        witness: report.witness,
    })
}

/// Regular subgroups found by [`regular_subgroups`].
#[derive(Clone, Debug)]
pub struct RegularSubgroups {
    pub groups: Vec<PermGroup>,
    /// False when the node budget stopped the search early.
    pub complete: bool,
    pub nodes: u64,
}

fn is_semiregular(p: &Perm) -> bool {
    let cycles = p.cycle_type();
    cycles.windows(2).all(|w| w[0] == w[1])
}

/// All regular subgroups of `a` isomorphic to `spec`, by backtracking over
/// commuting tuples of semiregular elements whose orders divide the factor
/// orders, pruned by requiring distinct images of point 0 across the span.
pub fn regular_subgroups(a: &PermGroup, spec: &GroupSpec, cap: usize, budget: u64) -> Result<RegularSubgroups> {
    let n = a.degree();
    if spec.order() != n {
        return Err(Error::DegreeMismatch {
            left: spec.order(),
            right: n,
        });
    }
    let elements = a.enumerate(cap)?;
    let candidates: Vec<Vec<&Perm>> = spec
        .factors()
        .iter()
        .map(|&f| {
            elements
                .iter()
                .filter(|x| !x.is_identity() && (f as u64).is_multiple_of(x.order()) && is_semiregular(x))
                .collect()
        })
        .collect();
    let mut search = SubgroupSearch {
        n,
        factors: spec.factors(),
        candidates: &candidates,
        chosen: Vec::new(),
        seen: BTreeSet::new(),
        groups: Vec::new(),
        nodes: 0,
        budget,
    };
    let identity = Perm::identity(n);
    let complete = search.rec(alloc::vec![identity]);
    Ok(RegularSubgroups {
        groups: search.groups,
        complete,
        nodes: search.nodes,
    })
}

struct SubgroupSearch<'a> {
    n: usize,
    factors: &'a [usize],
    candidates: &'a [Vec<&'a Perm>],
    chosen: Vec<Perm>,
    seen: BTreeSet<Vec<u32>>,
    groups: Vec<PermGroup>,
    nodes: u64,
    budget: u64,
}

impl SubgroupSearch<'_> {
    fn rec(&mut self, span: Vec<Perm>) -> bool {
        let k = self.chosen.len();
        if k == self.factors.len() {
            if span.len() == self.n {
                let mut table: Vec<&Perm> = span.iter().collect();
                table.sort_by_key(|p| p.apply(0));
                let key: Vec<u32> = table.iter().flat_map(|p| p.images().iter().copied()).collect();
                if self.seen.insert(key) {
                    let g = PermGroup::with_order(self.n, self.chosen.clone(), &BigUint::from(self.n))
                        .expect("span of commuting semiregular elements");
                    self.groups.push(g);
                }
            }
            return true;
        }
        let f = self.factors[k];
        for &x in &self.candidates[k] {
            self.nodes += 1;
            if self.nodes > self.budget {
                return false;
            }
            if !self.chosen.iter().all(|c| c.commutes_with(x)) {
                continue;
            }
            let mut hit = alloc::vec![false; self.n];
            for s in &span {
                hit[s.apply(0)] = true;
            }
            let mut next = span.clone();
            let mut layer = span.clone();
            let mut ok = true;
            'grow: for _ in 1..f {
                for s in layer.iter_mut() {
                    *s = s.then(x);
                    let p = s.apply(0);
                    if hit[p] {
                        ok = false;
                        break 'grow;
                    }
                    hit[p] = true;
                    next.push(s.clone());
                }
            }
            if !ok {
                continue;
            }
            self.chosen.push(x.clone());
            let go_on = self.rec(next);
            self.chosen.pop();
            if !go_on {
                return false;
            }
        }
        true
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BabaiVerdict {
    Ci,
    NotCi,
    Indeterminate,
}

#[derive(Clone, Debug)]
pub struct BabaiReport {
    pub verdict: BabaiVerdict,
    pub aut_order: Option<BigUint>,
    /// Regular subgroups of `Aut(Cay(G,S))` isomorphic to `G`.
    pub regular_subgroups: usize,
    /// How many of them are conjugate to the regular representation.
    pub conjugate: usize,
    /// A witness pair built from a non-conjugate regular subgroup.
    pub witness: Option<Witness>,
    pub reason: Option<String>,
}

impl BabaiReport {
    fn indeterminate(aut_order: Option<BigUint>, reason: &str) -> Self {
        BabaiReport {
            verdict: BabaiVerdict::Indeterminate,
            aut_order,
            regular_subgroups: 0,
            conjugate: 0,
            witness: None,
            reason: Some(reason.into()),
        }
    }
}

/// `S` is CI exactly when every regular subgroup of `Aut(Cay(G,S))`
/// isomorphic to `G` is conjugate there to the regular representation.
pub fn babai_ci(spec: &GroupSpec, s: &[usize], budgets: &Budgets) -> Result<BabaiReport> {
    let s = normalize(s);
    let cay = CayleyGraph::new(spec, &s)?;
    let a = match cay.automorphisms(budgets.nodes) {
        Ok(a) => a,
        Err(Error::BudgetExceeded { .. }) => return Ok(BabaiReport::indeterminate(None, "automorphism search budget")),
        Err(e) => return Err(e),
    };
    let order = a.order();
    let found = match regular_subgroups(&a, spec, budgets.enum_cap, budgets.subgroup_nodes) {
        Ok(f) => f,
        Err(Error::OverCap { .. }) => {
            return Ok(BabaiReport::indeterminate(Some(order), "automorphism group over cap"))
        }
        Err(e) => return Err(e),
    };
    if !found.complete {
        return Ok(BabaiReport::indeterminate(
            Some(order),
            "regular subgroup search budget",
        ));
    }
    let hat = spec.regular_rep();
    let oracle = match RegularConjugator::new(cay.graph(), &hat, budgets.nodes) {
        Ok(o) => o,
        Err(Error::BudgetExceeded { .. }) => {
            return Ok(BabaiReport::indeterminate(Some(order), "canonical form budget"))
        }
        Err(e) => return Err(e),
    };
    let mut conjugate = 0;
    let mut witness = None;
    for h in &found.groups {
        match oracle.conjugator(h)? {
            Conjugacy::Found(_) => conjugate += 1,
            Conjugacy::NotConjugate => {
                if witness.is_none() {
                    witness = Some(witness_from_subgroup(&cay, spec, h)?);
                }
            }
            Conjugacy::BudgetExceeded => {
                return Ok(BabaiReport::indeterminate(Some(order), "canonical form budget"));
            }
        }
    }
    // the conjugates of the regular representation number |A| / (n |Aut(G,S)|)
    let stabilizer = aut_group(spec, budgets.enum_cap)?
        .iter()
        .filter(|mu| mu.image_of_set(&s) == s)
        .count();
    if BigUint::from(conjugate) * BigUint::from(spec.order() * stabilizer) != order {
        return Err(Error::Invalid(
            "conjugate count disagrees with the normalizer index".into(),
        ));
    }
    Ok(BabaiReport {
        verdict: if witness.is_none() {
            BabaiVerdict::Ci
        } else {
            BabaiVerdict::NotCi
        },
        aut_order: Some(order),
        regular_subgroups: found.groups.len(),
        conjugate,
        witness,
        reason: None,
    })
}

/// Relabels `Cay(G,S)` so that `h` becomes the regular representation; the
/// result is `Cay(G,T)` and the relabelling is the isomorphism.
fn witness_from_subgroup(cay: &CayleyGraph, spec: &GroupSpec, h: &PermGroup) -> Result<Witness> {
    let table = RegularTable::new(h)?;
    let basis = table.basis_for(spec).ok_or(Error::NotRegularAbelian)?;
    let sigma = table.labelling(spec, &basis).inverse();
    let image = cay.graph().relabel(&sigma);
    let t: Vec<usize> = (1..spec.order()).filter(|&g| image.is_arc(g, 0)).collect();
    let gt = CayleyGraph::new(spec, &t)?;
    if gt.graph() != &image {
        return Err(Error::Invalid("relabelled graph is not a Cayley graph".into()));
    }
    Ok(Witness { t, sigma })
}

#[derive(Clone, Debug)]
pub struct CentrumReport {
    /// Regular abelian subgroups examined.
    pub checked: usize,
    /// Those not containing the centre.
    pub failures: Vec<PermGroup>,
}

/// Checks that every regular abelian subgroup of the transitive group `p`
/// contains its centre.
pub fn centrum_check(p: &PermGroup, cap: usize, budget: u64) -> Result<CentrumReport> {
    let z = center(p, cap)?;
    let mut report = CentrumReport {
        checked: 0,
        failures: Vec::new(),
    };
    for spec in abelian_types(p.degree()) {
        let found = regular_subgroups(p, &spec, cap, budget)?;
        if !found.complete {
            return Err(Error::BudgetExceeded { budget });
        }
        for h in found.groups {
            report.checked += 1;
            if !z.is_subgroup_of(&h) {
                report.failures.push(h);
            }
        }
    }
    Ok(report)
}
