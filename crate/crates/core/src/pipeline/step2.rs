//! Moving the ring order-`q` generator onto the hat one, by gluing
//! automorphisms of the graph along the components of `Gamma_0`.

use alloc::string::String;
use alloc::vec::Vec;

use super::{hypothesis, CaseTag, Layout, PipelineError, PipelineResult, PipelineState};
use crate::graphs::{ColoredDigraph, Gamma0};
use crate::group::{induced_perm, BlockSystem};
use crate::perm::Perm;

/// Inputs of the two-block construction.
#[derive(Clone, Debug)]
pub enum Szorzas {
    /// `w_hat`, `w_ring` both map `A` onto `B` and commute with `g_hat`, `g_ring`.
    A { w_hat: Perm, w_ring: Perm },
    /// `v_ring` maps `A` onto `C` (disjoint from `A`) and commutes with `g_ring`;
    /// `w_hat` maps `A` onto `B` and commutes with `g_hat`.
    B { w_hat: Perm, v_ring: Perm, c: Vec<usize> },
}

fn violation(what: &str, point: usize) -> PipelineError {
    hypothesis("szorzas", alloc::format!("{what} at point {point}"))
}

fn maps_onto(g: &Perm, from: &[usize], to: &[usize]) -> Option<usize> {
    from.iter().copied().find(|&x| !to.contains(&g.apply(x)))
}

fn commute_point(a: &Perm, b: &Perm) -> Option<usize> {
    (0..a.degree()).find(|&x| a.apply(b.apply(x)) != b.apply(a.apply(x)))
}

/// The two-block construction: `sigma = w_hat w_ring^-1` (variant A) or
/// `w_hat v_ring^-1` (variant B), read as maps, so that
/// `sigma g_ring sigma^-1` agrees with `g_hat` on `B`.
///
/// Requires `g_ring = g_hat` on `A`. The restriction identity is checked
/// pointwise before returning.
pub fn szorzas_build(variant: &Szorzas, a: &[usize], b: &[usize], g_hat: &Perm, g_ring: &Perm) -> PipelineResult<Perm> {
    if a.iter().any(|x| b.contains(x)) {
        return Err(hypothesis("szorzas", "A and B intersect".into()));
    }
    if let Some(x) = a.iter().copied().find(|&x| g_hat.apply(x) != g_ring.apply(x)) {
        return Err(violation("g_ring differs from g_hat on A", x));
    }
    if let Some(x) = commute_point(
        match variant {
            Szorzas::A { w_hat, .. } | Szorzas::B { w_hat, .. } => w_hat,
        },
        g_hat,
    ) {
        return Err(violation("w_hat does not commute with g_hat", x));
    }
    let (w_hat, inner) = match variant {
        Szorzas::A { w_hat, w_ring } => {
            if let Some(x) = maps_onto(w_ring, a, b) {
                return Err(violation("w_ring does not map A onto B", x));
            }
            if let Some(x) = commute_point(w_ring, g_ring) {
                return Err(violation("w_ring does not commute with g_ring", x));
            }
            (w_hat, w_ring)
        }
        Szorzas::B { w_hat, v_ring, c } => {
            if a.iter().any(|x| c.contains(x)) {
                return Err(hypothesis("szorzas", "A and C intersect".into()));
            }
            if let Some(x) = maps_onto(v_ring, a, c) {
                return Err(violation("v_ring does not map A onto C", x));
            }
            if let Some(x) = commute_point(v_ring, g_ring) {
                return Err(violation("v_ring does not commute with g_ring", x));
            }
            (w_hat, v_ring)
        }
    };
    if let Some(x) = maps_onto(w_hat, a, b) {
        return Err(violation("w_hat does not map A onto B", x));
    }
    let sigma = inner.inverse().then(w_hat);
    let sigma_inv = sigma.inverse();
    if let Some(&x) = b
        .iter()
        .find(|&&x| sigma.apply(g_ring.apply(sigma_inv.apply(x))) != g_hat.apply(x))
    {
        return Err(violation("restriction identity fails", x));
    }
    Ok(sigma)
}

/// Glues `parts[i]` on `classes[i]` (vertex sets, each a union of blocks of
/// whole `Gamma_0` components) and checks that the block map is an
/// automorphism of `Gamma_0` and the result one of `graph`.
pub fn patch_automorphism(
    graph: &ColoredDigraph,
    blocks: &BlockSystem,
    gamma0: &Gamma0,
    classes: &[Vec<usize>],
    parts: &[Perm],
) -> PipelineResult<Perm> {
    let n = graph.n();
    if classes.len() != parts.len() {
        return Err(hypothesis("aut", "one part per class expected".into()));
    }
    let mut images = alloc::vec![usize::MAX; n];
    for (k, (class, part)) in classes.iter().zip(parts).enumerate() {
        if !graph.is_automorphism(part) {
            return Err(hypothesis("aut", alloc::format!("part {k} is not an automorphism")));
        }
        let mut comps: Vec<usize> = class.iter().map(|&v| gamma0.component_of(blocks.block_of(v))).collect();
        comps.sort_unstable();
        comps.dedup();
        let size: usize = comps
            .iter()
            .map(|&c| gamma0.components()[c].len() * blocks.block_size())
            .sum();
        if size != class.len() {
            return Err(hypothesis(
                "aut",
                alloc::format!("class {k} is not a union of components"),
            ));
        }
        for &v in class {
            if images[v] != usize::MAX {
                return Err(hypothesis("aut", alloc::format!("classes overlap at point {v}")));
            }
            images[v] = part.apply(v);
        }
    }
    if let Some(v) = images.iter().position(|&x| x == usize::MAX) {
        return Err(hypothesis("aut", alloc::format!("point {v} is in no class")));
    }
    let alpha = Perm::from_images(images).map_err(|_| hypothesis("aut", "glued map is not a bijection".into()))?;
    let block_map = induced_perm(&alpha, blocks.labels(), blocks.num_blocks())
        .map_err(|_| hypothesis("aut", "glued map does not permute the blocks".into()))?;
    if !gamma0.is_automorphism(&block_map) {
        return Err(hypothesis("aut", "block map is not an automorphism of Gamma_0".into()));
    }
    for u in 0..n {
        for v in 0..n {
            if graph.color(u, v) != graph.color(alpha.apply(u), alpha.apply(v)) {
                return Err(hypothesis(
                    "aut",
                    alloc::format!(
                        "blocks {} and {} lose their arc pattern",
                        blocks.block_of(u),
                        blocks.block_of(v)
                    ),
                ));
            }
        }
    }
    Ok(alpha)
}

/// Per-block offsets `d_b` with `g_ring(b;x) = (b; x + d_b)`.
fn multipliers(layout: &Layout, g_ring: &Perm) -> PipelineResult<Vec<usize>> {
    (0..layout.num_blocks())
        .map(|b| {
            let d = layout.offset(g_ring.apply(layout.point(b, 0)));
            let ok = (0..layout.q).all(|x| g_ring.apply(layout.point(b, x)) == layout.point(b, x + d));
            if ok {
                Ok(d)
            } else {
                Err(hypothesis(
                    "commuting-q",
                    alloc::format!("g_ring is not a shift on block {b}"),
                ))
            }
        })
        .collect()
}

/// For each listed component, `(component, s, t)` with `s` a block of the
/// component of block 0 and `t` a block of the component: the part there is
/// `u_hat u_ring^-1` with `u_hat`, `u_ring` the hat and ring `p`-elements
/// taking block `s` to block `t`. The component of block 0 stays fixed.
fn glue(state: &PipelineState, targets: &[(usize, usize, usize)]) -> PipelineResult<Perm> {
    let layout = &state.layout;
    let ring_p = state.ring_p_part()?;
    let comps = state.gamma0.components();
    let vertices = |c: usize| -> Vec<usize> {
        comps[c]
            .iter()
            .flat_map(|&b| (0..layout.q).map(move |x| layout.point(b, x)))
            .collect()
    };
    let mut classes = alloc::vec![vertices(0)];
    let mut parts = alloc::vec![Perm::identity(layout.n())];
    for &(c, s, t) in targets {
        let u_hat = layout.hat_block_translation(layout.block_spec.sub(t, s));
        let u_ring = state.ring_element_between(&ring_p, s, t)?;
        let a: Vec<usize> = (0..layout.q).map(|x| layout.point(s, x)).collect();
        let b: Vec<usize> = (0..layout.q).map(|x| layout.point(t, x)).collect();
        let part = szorzas_build(
            &Szorzas::A {
                w_hat: u_hat,
                w_ring: u_ring,
            },
            &a,
            &b,
            &state.g_hat,
            &state.g_ring,
        )?;
        classes.push(vertices(c));
        parts.push(part);
    }
    patch_automorphism(state.gamma.graph(), &state.blocks, &state.gamma0, &classes, &parts)
}

/// A conjugator in `Aut(Gamma)` taking `g_ring` to `g_hat`, by the case of `Gamma_0`.
pub fn q_align(state: &PipelineState) -> PipelineResult<Perm> {
    let layout = &state.layout;
    let n = layout.n();
    let d = multipliers(layout, &state.g_ring)?;
    if d.iter().all(|&x| x == 1) {
        return Ok(Perm::identity(n));
    }
    let g0 = &state.gamma0;
    for i in 0..layout.num_blocks() {
        for j in 0..layout.num_blocks() {
            if g0.adjacent(i, j) && d[i] != d[j] {
                return Err(hypothesis(
                    "koszoru",
                    alloc::format!("blocks {i} and {j} are joined but the shifts differ"),
                ));
            }
        }
    }
    let comps = g0.components();
    let min_block = |c: usize| comps[c][0];
    let targets: Vec<(usize, usize, usize)> = match state.case {
        CaseTag::Connected => {
            let b = d.iter().position(|&x| x != 1).unwrap();
            return Err(hypothesis(
                "connected",
                alloc::format!("g_ring differs from g_hat on block {b} of a connected Gamma_0"),
            ));
        }
        CaseTag::Empty | CaseTag::CompSizeP => (1..comps.len()).map(|c| (c, 0, min_block(c))).collect(),
        CaseTag::CompSizeP2 => comp_p2_targets(state)?,
    };
    let sigma = glue(state, &targets)?;
    if state.g_ring.conjugate_by(&sigma) != state.g_hat {
        return Err(hypothesis(
            "szorzas",
            String::from("glued map does not carry g_ring to g_hat"),
        ));
    }
    Ok(sigma)
}

/// Source and target blocks for components of size `p^2`.
fn comp_p2_targets(state: &PipelineState) -> PipelineResult<Vec<(usize, usize, usize)>> {
    let layout = &state.layout;
    let bs = &layout.block_spec;
    let p = layout.p;
    let m = layout.num_blocks();
    let g0 = &state.gamma0;
    let ring_p = state.ring_p_part()?;
    let quotient: Vec<Perm> = ring_p
        .iter()
        .map(|r| layout.block_perm(r).expect("ring elements permute the blocks"))
        .collect();
    let is_translation = |perm: &Perm| (0..m).all(|b| perm.apply(b) == bs.add(b, perm.apply(0)));
    // an element of order p common to both quotient actions
    let Some(z0) = (1..m).find(|&c| is_translation(&quotient[c])) else {
        return Err(hypothesis("centrum", "the quotient actions meet trivially".into()));
    };
    let comp = |b: usize| g0.component_of(b);
    if comp(z0) != 0 {
        return Ok((1..p)
            .map(|i| {
                let t = bs.scale(z0, i);
                (comp(t), 0, t)
            })
            .collect());
    }

    // coordinates a*e_a + b*e_b + c*z0 with Z = <z0> and D_0 = <e_b, z0>
    let span_z: Vec<usize> = (0..p).map(|i| bs.scale(z0, i)).collect();
    let e_b = *g0.components()[0].iter().find(|b| !span_z.contains(b)).unwrap();
    let e_a = (0..m).find(|&b| comp(b) != 0).unwrap();
    let coord = |a: usize, b: usize, c: usize| bs.add(bs.add(bs.scale(e_a, a), bs.scale(e_b, b)), bs.scale(z0, c));
    let mut triple = alloc::vec![(0, 0, 0); m];
    for a in 0..p {
        for b in 0..p {
            for c in 0..p {
                triple[coord(a, b, c)] = (a, b, c);
            }
        }
    }
    let h2 = &quotient[e_b];
    let mut t = alloc::vec![alloc::vec![0usize; p]; p];
    for a in 0..p {
        for b in 0..p {
            let mut seen = None;
            for c in 0..p {
                let (a2, b2, c2) = triple[h2.apply(coord(a, b, c))];
                if a2 != a {
                    return Err(hypothesis("s_a", alloc::format!("h2 moves component {a}")));
                }
                if (b2 + p - b) % p != 1 {
                    return Err(hypothesis("s_a", alloc::format!("s_{a} differs from 1")));
                }
                let shift = (c2 + p - c) % p;
                if *seen.get_or_insert(shift) != shift {
                    return Err(hypothesis(
                        "s_a",
                        alloc::format!("h2 does not commute with z on E_{a},{b}"),
                    ));
                }
            }
            t[a][b] = seen.unwrap();
        }
    }
    // base points: each new class of the shift relation starts at b = 0
    let mut reps: Vec<usize> = Vec::new();
    let mut base = alloc::vec![0usize; p];
    for a in 0..p {
        let hit = reps.iter().find_map(|&r| {
            (0..p)
                .find(|&delta| (0..p).all(|k| t[a][(delta + k) % p] == t[r][(base[r] + k) % p]))
                .map(|delta| (r, delta))
        });
        match hit {
            Some((_, delta)) => base[a] = delta,
            None => {
                reps.push(a);
                base[a] = 0;
            }
        }
    }
    let s = coord(0, base[0], 0);
    Ok((1..p)
        .map(|a| {
            let target = coord(a, base[a], 0);
            (comp(target), s, target)
        })
        .collect())
}
