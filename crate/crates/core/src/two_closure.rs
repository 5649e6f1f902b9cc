//! Orbital colorings, 2-closures, and conjugation of regular abelian groups
//! inside the 2-closure of their join.

use alloc::vec::Vec;
use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::graphs::{ColoredDigraph, RegularConjugator};
use crate::group::{conjugacy_search, Conjugacy, PermGroup};
use crate::perm::Perm;

/// The coloring of ordered pairs by the orbitals of a group.
#[derive(Clone, Debug)]
pub struct OrbitalColoring {
    pub graph: ColoredDigraph,
    pub num_colors: usize,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Orbitals of `g` on ordered pairs, numbered by first occurrence in
/// row-major order.
pub fn orbitals(g: &PermGroup) -> OrbitalColoring {
    let n = g.degree();
    let mut parent: Vec<usize> = (0..n * n).collect();
    for gen in g.generators() {
        for u in 0..n {
            let gu = gen.apply(u);
            for v in 0..n {
                let a = find(&mut parent, u * n + v);
                let b = find(&mut parent, gu * n + gen.apply(v));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut label = alloc::vec![u32::MAX; n * n];
    let mut num_colors = 0usize;
    let mut colors = Vec::with_capacity(n * n);
    for x in 0..n * n {
        let r = find(&mut parent, x);
        if label[r] == u32::MAX {
            label[r] = num_colors as u32;
            num_colors += 1;
        }
        colors.push(label[r]);
    }
    OrbitalColoring {
        graph: ColoredDigraph::new(n, colors).expect("square color matrix"),
        num_colors,
    }
}

/// The 2-closure: all permutations preserving every orbital of `g`.
pub fn closure2(g: &PermGroup, budget: u64) -> Result<PermGroup> {
    orbitals(g).graph.automorphisms(budget)
}

/// How [`ci2_conjugator`] decided.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ci2Route {
    /// Both groups coincide.
    Equal,
    /// Elements of the closure were searched directly.
    Enumeration,
    /// Canonical forms of the orbital coloring marked by bases.
    Overlay,
}

#[derive(Clone, Debug)]
pub struct Ci2Outcome {
    pub result: Conjugacy,
    pub closure_order: BigUint,
    pub route: Ci2Route,
}

/// Searches `K = closure2(<from, to>)` for `mu` with `from^mu = to`.
///
/// Both groups must be regular abelian of one degree. With `|K| <= cap` the
/// elements of `K` are searched; otherwise every basis of `to` is compared
/// with one basis of `from` by canonical forms, which is exhaustive as well.
pub fn ci2_conjugator(from: &PermGroup, to: &PermGroup, cap: usize, budget: u64) -> Result<Ci2Outcome> {
    if from.degree() != to.degree() {
        return Err(Error::DegreeMismatch {
            left: from.degree(),
            right: to.degree(),
        });
    }
    for h in [from, to] {
        let r = h.regularity_report();
        if !r.regular || !r.abelian {
            return Err(Error::NotRegularAbelian);
        }
    }
    let join = from.join(to)?;
    let coloring = orbitals(&join);
    let k = match coloring.graph.automorphisms(budget) {
        Ok(k) => k,
        Err(Error::BudgetExceeded { .. }) => {
            return Ok(Ci2Outcome {
                result: Conjugacy::BudgetExceeded,
                closure_order: BigUint::from(0u32),
                route: Ci2Route::Overlay,
            })
        }
        Err(e) => return Err(e),
    };
    let closure_order = k.order();
    if from.same_group(to) {
        return Ok(Ci2Outcome {
            result: Conjugacy::Found(Perm::identity(from.degree())),
            closure_order,
            route: Ci2Route::Equal,
        });
    }
    let small = closure_order.to_usize().is_some_and(|o| o <= cap);
    let (result, route) = if small {
        (conjugacy_search(&k, from, to, cap, budget)?, Ci2Route::Enumeration)
    } else {
        let oracle = match RegularConjugator::new(&coloring.graph, to, budget) {
            Ok(o) => o,
            Err(Error::BudgetExceeded { .. }) => {
                return Ok(Ci2Outcome {
                    result: Conjugacy::BudgetExceeded,
                    closure_order,
                    route: Ci2Route::Overlay,
                })
            }
            Err(e) => return Err(e),
        };
        (oracle.conjugator(from)?, Ci2Route::Overlay)
    };
    if let Conjugacy::Found(mu) = &result {
        if !k.contains(mu) || !from.conjugate_by(mu).same_group(to) {
            return Err(Error::Invalid("closure conjugator failed verification".into()));
        }
    }
    Ok(Ci2Outcome {
        result,
        closure_order,
        route,
    })
}
