//! Element-level searches: centralizers, centers, Sylow subgroups and
//! conjugating elements. Sized for desk-scale groups; every path that would
//! exceed the enumeration cap or node budget reports it instead.

use alloc::vec::Vec;
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use super::PermGroup;
use crate::error::{Error, Result};
use crate::perm::Perm;

/// Default cap on enumerated group elements.
pub const DEFAULT_ENUM_CAP: usize = 1_000_000;
/// Default backtracking node budget.
pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;

/// Outcome of a conjugacy search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Conjugacy {
    /// `H^alpha = K`.
    Found(Perm),
    /// The whole group was searched.
    NotConjugate,
    BudgetExceeded,
}

/// `C_A(g)`.
pub fn centralizer(group: &PermGroup, g: &Perm, cap: usize) -> Result<PermGroup> {
    group.check_cap(cap)?;
    filtered_subgroup(group, |a| a.commutes_with(g))
}

/// `Z(G)`.
pub fn center(group: &PermGroup, cap: usize) -> Result<PermGroup> {
    group.check_cap(cap)?;
    let gens = group.generators().to_vec();
    filtered_subgroup(group, |a| gens.iter().all(|g| a.commutes_with(g)))
}

/// Subgroup of the elements satisfying `keep`; the predicate must define a subgroup.
fn filtered_subgroup<F: Fn(&Perm) -> bool>(group: &PermGroup, keep: F) -> Result<PermGroup> {
    let mut sub = PermGroup::trivial(group.degree());
    let mut failure = None;
    group.chain().for_each_element(|a| {
        if keep(a) && !sub.contains(a) {
            let mut gens = sub.generators().to_vec();
            gens.push(a.clone());
            match PermGroup::new(group.degree(), gens) {
                Ok(s) => sub = s,
                Err(e) => {
                    failure = Some(e);
                    return false;
                }
            }
        }
        true
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(sub),
    }
}

fn p_part(order: &BigUint, p: u64) -> BigUint {
    let mut part = BigUint::one();
    let mut rest = order.clone();
    let pb = BigUint::from(p);
    while (&rest % &pb).to_u64() == Some(0) {
        rest /= &pb;
        part *= &pb;
    }
    part
}

/// A Sylow `p`-subgroup, grown greedily from the trivial group.
pub fn sylow(group: &PermGroup, p: u64, cap: usize) -> Result<PermGroup> {
    sylow_containing(group, p, &PermGroup::trivial(group.degree()), cap)
}

/// A Sylow `p`-subgroup containing the `p`-subgroup `start`.
///
/// Each round adds the first element (in chain walk order) that normalizes
/// the current subgroup and has `p`-th power inside it; Sylow theory
/// guarantees one exists until the full `p`-part is reached.
pub fn sylow_containing(group: &PermGroup, p: u64, start: &PermGroup, cap: usize) -> Result<PermGroup> {
    group.check_cap(cap)?;
    let target = p_part(&group.order(), p);
    if p_part(&start.order(), p) != start.order() || !start.is_subgroup_of(group) {
        return Err(Error::Invalid("start must be a p-subgroup of the group".into()));
    }
    let mut current = start.clone();
    while current.order() < target {
        let mut next = None;
        let cur = &current;
        group.chain().for_each_element(|x| {
            if cur.contains(x) {
                return true;
            }
            let normalizes = cur.generators().iter().all(|h| cur.contains(&h.conjugate_by(x)));
            if normalizes && cur.contains(&x.pow(p as i64)) {
                next = Some(x.clone());
                return false;
            }
            true
        });
        let x = next.ok_or_else(|| Error::Invalid("no p-element normalizes the subgroup".into()))?;
        let mut gens = current.generators().to_vec();
        gens.push(x);
        current = PermGroup::new(group.degree(), gens)?;
    }
    Ok(current)
}

/// Searches `A` for `alpha` with `H^alpha = K`.
///
/// Enumerates `A` when its order is within `cap`; otherwise backtracks
/// through the stabilizer chain of `A`, which needs `K` regular for pruning.
pub fn conjugacy_search(a: &PermGroup, h: &PermGroup, k: &PermGroup, cap: usize, budget: u64) -> Result<Conjugacy> {
    if !h.is_subgroup_of(a) || !k.is_subgroup_of(a) {
        return Err(Error::Invalid("both subgroups must lie in the ambient group".into()));
    }
    if h.order() != k.order() {
        return Ok(Conjugacy::NotConjugate);
    }
    if h.is_subgroup_of(k) {
        return Ok(Conjugacy::Found(Perm::identity(a.degree())));
    }
    let maps_into = |x: &Perm| h.generators().iter().all(|g| k.contains(&g.conjugate_by(x)));
    if a.check_cap(cap).is_ok() {
        let mut found = None;
        a.chain().for_each_element(|x| {
            if maps_into(x) {
                found = Some(x.clone());
                return false;
            }
            true
        });
        return Ok(found.map_or(Conjugacy::NotConjugate, Conjugacy::Found));
    }
    let k_report = k.regularity_report();
    if !k_report.regular {
        return Err(Error::OverCap { cap });
    }
    let k_elems = k.enumerate(usize::MAX)?;
    let mut search = Backtrack {
        a,
        h_gens: h.generators(),
        k,
        k_elems,
        nodes: 0,
        budget,
    };
    let base: Vec<usize> = a.chain().base().to_vec();
    let start = Perm::identity(a.degree());
    match search.descend(0, &start, &base) {
        Step::Found(x) => Ok(Conjugacy::Found(x)),
        Step::Exhausted => Ok(Conjugacy::NotConjugate),
        Step::Budget => Ok(Conjugacy::BudgetExceeded),
    }
}

enum Step {
    Found(Perm),
    Exhausted,
    Budget,
}

struct Backtrack<'a> {
    a: &'a PermGroup,
    h_gens: &'a [Perm],
    k: &'a PermGroup,
    k_elems: Vec<Perm>,
    nodes: u64,
    budget: u64,
}

impl Backtrack<'_> {
    /// `partial` = `u_j ... u_0`: it agrees with every completion on base[..=j].
    fn descend(&mut self, level: usize, partial: &Perm, base: &[usize]) -> Step {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Step::Budget;
        }
        if level == base.len() {
            let ok = self.h_gens.iter().all(|g| self.k.contains(&g.conjugate_by(partial)));
            return if ok {
                Step::Found(partial.clone())
            } else {
                Step::Exhausted
            };
        }
        let lvl = &self.a.chain().levels[level];
        for &x in &lvl.orbit {
            let u = lvl.transversal[x].as_ref().unwrap();
            let next = u.then(partial);
            if !self.consistent(&next, &base[..=level]) {
                continue;
            }
            match self.descend(level + 1, &next, base) {
                Step::Exhausted => {}
                other => return other,
            }
        }
        Step::Exhausted
    }

    /// For a regular `K`, `H^alpha` must contain, for each `h`, the unique
    /// element of `K` sending `alpha(b)` to `alpha(h(b))`.
    fn consistent(&self, alpha: &Perm, known: &[usize]) -> bool {
        for h in self.h_gens {
            let mut chosen: Option<&Perm> = None;
            for &b in known {
                let hb = h.apply(b);
                if !known.contains(&hb) {
                    continue;
                }
                let (x, y) = (alpha.apply(b), alpha.apply(hb));
                match chosen {
                    None => match self.k_elems.iter().find(|e| e.apply(x) == y) {
                        Some(e) => chosen = Some(e),
                        None => return false,
                    },
                    Some(e) => {
                        if e.apply(x) != y {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }
}
