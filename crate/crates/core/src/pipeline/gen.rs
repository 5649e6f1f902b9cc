//! Random instances: connection sets whose `Gamma_0` has a prescribed
//! component structure, and ring groups conjugate to the hat group.

use alloc::vec::Vec;
use rand::seq::SliceRandom;
use rand::Rng;

use super::Layout;
use crate::abgroups::GroupSpec;
use crate::error::Result;
use crate::graphs::CayleyGraph;
use crate::group::PermGroup;
use crate::perm::Perm;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BetaKind {
    /// A random element of `Aut(Gamma)`.
    Automorphism,
    /// Per-component multipliers on the `Z_q` coordinate, then a translation.
    Multiplier,
}

#[derive(Clone, Debug)]
pub struct Instance {
    pub spec: GroupSpec,
    pub set: Vec<usize>,
    /// The blocks spanned by the non-uniform parts of the set.
    pub span: Vec<usize>,
    /// Units of `Z_q` every non-uniform part is closed under.
    pub units: Vec<usize>,
    pub kind: BetaKind,
    pub beta: Perm,
    pub ring: PermGroup,
}

fn span_of(bs: &GroupSpec, gens: &[usize]) -> Vec<usize> {
    let mut span = alloc::vec![0usize];
    for &g in gens {
        if span.contains(&g) {
            continue;
        }
        let mut next = span.clone();
        let mut layer = span.clone();
        loop {
            layer = layer.iter().map(|&x| bs.add(x, g)).collect();
            if layer.contains(&0) {
                break;
            }
            next.extend_from_slice(&layer);
        }
        span = next;
    }
    span.sort_unstable();
    span
}

/// `(S, W, M)`: a subspace `W` of `Z_p^3` of random dimension, a unit group
/// `M` (`{1,-1}` or the squares); `S_a` is empty or everything for `a`
/// outside `W` and a union of `M`-cosets (with or without 0) inside.
pub fn structured_set<R: Rng + ?Sized>(layout: &Layout, rng: &mut R) -> (Vec<usize>, Vec<usize>, Vec<usize>) {
    let (p, q) = (layout.p, layout.q);
    let bs = &layout.block_spec;
    let m = layout.num_blocks();
    let dim = rng.gen_range(0..=3);
    let mut gens = Vec::new();
    while span_of(bs, &gens).len() < p.pow(dim as u32) {
        gens.push(rng.gen_range(1..m));
    }
    let w = span_of(bs, &gens);
    let units: Vec<usize> = if rng.gen_bool(0.5) {
        let mut u = alloc::vec![1, q - 1];
        u.dedup();
        u
    } else {
        let mut u: Vec<usize> = (1..q).map(|x| x * x % q).collect();
        u.sort_unstable();
        u.dedup();
        u
    };
    let mut cosets: Vec<Vec<usize>> = Vec::new();
    for x in 1..q {
        if cosets.iter().any(|c| c.contains(&x)) {
            continue;
        }
        let mut c: Vec<usize> = units.iter().map(|&u| u * x % q).collect();
        c.sort_unstable();
        c.dedup();
        cosets.push(c);
    }
    let mut set = Vec::new();
    for a in 0..m {
        if w.contains(&a) {
            if a != 0 && rng.gen_bool(0.5) {
                set.push(layout.point(a, 0));
            }
            for c in &cosets {
                if rng.gen_bool(0.5) {
                    set.extend(c.iter().map(|&x| layout.point(a, x)));
                }
            }
        } else if rng.gen_bool(0.5) {
            set.extend((0..q).map(|x| layout.point(a, x)));
        }
    }
    set.sort_unstable();
    (set, w, units)
}

/// A random instance with ring group `G_hat^beta`.
pub fn random_instance<R: Rng + ?Sized>(
    spec: &GroupSpec,
    kind: BetaKind,
    rng: &mut R,
    budget: u64,
) -> Result<Instance> {
    let layout = Layout::new(spec).map_err(|e| crate::error::Error::UnsupportedShape(alloc::format!("{e}")))?;
    let (set, span, units) = structured_set(&layout, rng);
    let gamma = CayleyGraph::new(spec, &set)?;
    let beta = match kind {
        BetaKind::Automorphism => gamma.automorphisms(budget)?.random_element(rng),
        BetaKind::Multiplier => {
            let bs = &layout.block_spec;
            let m = layout.num_blocks();
            let mut coset_d = alloc::vec![None; m];
            let d: Vec<usize> = (0..m)
                .map(|b| {
                    let rep = span.iter().map(|&w| bs.add(b, w)).min().unwrap();
                    *coset_d[rep].get_or_insert_with(|| *units.choose(rng).unwrap())
                })
                .collect();
            let mult = Perm::from_images(
                (0..layout.n())
                    .map(|v| layout.point(layout.block(v), layout.offset(v) * d[layout.block(v)]))
                    .collect(),
            )?;
            mult.then(&spec.translation(rng.gen_range(0..layout.n())))
        }
    };
    let ring = spec.regular_rep().conjugate_by(&beta);
    Ok(Instance {
        spec: spec.clone(),
        set,
        span,
        units,
        kind,
        beta,
        ring,
    })
}

/// Where a random `beta` came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BetaSource {
    /// Uniform in `Aut(Gamma)`.
    AutGamma,
    /// `Aut(Gamma)` was over budget: a translation after an element of `Aut(G,S)`.
    Affine,
}

/// A random automorphism of `gamma` for a fixed connection set.
pub fn random_beta<R: Rng + ?Sized>(gamma: &CayleyGraph, rng: &mut R, budget: u64) -> Result<(Perm, BetaSource)> {
    match gamma.automorphisms(budget) {
        Ok(a) => Ok((a.random_element(rng), BetaSource::AutGamma)),
        Err(crate::error::Error::BudgetExceeded { .. }) => {
            let spec = gamma.spec();
            let fixing: Vec<_> = crate::abgroups::aut_group(spec, crate::group::DEFAULT_ENUM_CAP)?
                .into_iter()
                .filter(|mu| mu.image_of_set(gamma.set()) == gamma.set())
                .collect();
            let mu = fixing.choose(rng).expect("the identity fixes S");
            let beta = mu.perm().then(&spec.translation(rng.gen_range(0..spec.order())));
            Ok((beta, BetaSource::Affine))
        }
        Err(e) => Err(e),
    }
}
