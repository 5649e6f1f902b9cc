use super::*;
use crate::group::DEFAULT_NODE_BUDGET as BUDGET;
use alloc::collections::BTreeSet;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn spec(f: &[usize]) -> GroupSpec {
    GroupSpec::new(f.to_vec()).unwrap()
}

/// Every permutation of `0..n` in lexicographic order.
fn all_perms(n: usize) -> Vec<Perm> {
    fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Perm>) {
        let n = used.len();
        if cur.len() == n {
            out.push(Perm::from_images(cur.clone()).unwrap());
            return;
        }
        for x in 0..n {
            if !used[x] {
                used[x] = true;
                cur.push(x);
                rec(cur, used, out);
                cur.pop();
                used[x] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut alloc::vec![false; n], &mut out);
    out
}

fn brute_aut_count(g: &ColoredDigraph) -> usize {
    all_perms(g.n()).iter().filter(|p| g.is_automorphism(p)).count()
}

fn brute_isomorphic(a: &ColoredDigraph, b: &ColoredDigraph) -> bool {
    a.n() == b.n() && all_perms(a.n()).iter().any(|p| a.is_isomorphism(b, p))
}

fn random_digraph(rng: &mut ChaCha8Rng, n: usize, colors: u32, vertex_colors: u32) -> ColoredDigraph {
    let mut g = ColoredDigraph::from_fn(n, |u, v| if u == v { 0 } else { rng.gen_range(1..=colors) });
    for v in 0..n {
        g.colors[v * n + v] = rng.gen_range(0..vertex_colors);
    }
    g
}

fn random_perm(rng: &mut ChaCha8Rng, n: usize) -> Perm {
    let mut v: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        v.swap(i, rng.gen_range(0..=i));
    }
    Perm::from_images(v).unwrap()
}

#[test]
fn cayley_arcs_follow_differences() {
    let g = CayleyGraph::new(&spec(&[3]), &[1]).unwrap();
    let arcs: Vec<(usize, usize)> = (0..3)
        .flat_map(|u| (0..3).map(move |v| (u, v)))
        .filter(|&(u, v)| g.has_arc(u, v))
        .collect();
    assert_eq!(arcs, [(0, 2), (1, 0), (2, 1)]);
    let c4 = CayleyGraph::new(&spec(&[4]), &[1, 3]).unwrap();
    assert!(c4.is_undirected());
    assert!((0..4).all(|u| c4.has_arc(u, (u + 1) % 4) && c4.has_arc((u + 1) % 4, u)));
    let e = CayleyGraph::new(&spec(&[5]), &[]).unwrap();
    assert!((0..5).all(|u| (0..5).all(|v| !e.has_arc(u, v))));
    assert!(CayleyGraph::new(&spec(&[5]), &[0, 1]).is_err());
    assert!(CayleyGraph::new(&spec(&[5]), &[5]).is_err());
}

#[test]
fn automorphism_groups_match_brute_force() {
    let c5 = CayleyGraph::new(&spec(&[5]), &[1]).unwrap();
    assert_eq!(brute_aut_count(c5.graph()), 5);
    assert_eq!(c5.automorphisms(BUDGET).unwrap().order_u64(), Some(5));

    let k4 = ColoredDigraph::from_arcs(4, |u, v| u != v);
    assert_eq!(k4.automorphisms(BUDGET).unwrap().order_u64(), Some(24));

    let sq = CayleyGraph::new(&spec(&[2, 2]), &[1, 2]).unwrap();
    assert_eq!(brute_aut_count(sq.graph()), 8);
    assert_eq!(sq.automorphisms(BUDGET).unwrap().order_u64(), Some(8));
}

#[test]
fn aut_order_matches_brute_force_on_random_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for trial in 0..300 {
        let n = 1 + trial % 7;
        let g = random_digraph(&mut rng, n, 1 + (trial % 3) as u32, 1 + (trial % 2) as u32);
        let aut = g.automorphisms(BUDGET).unwrap();
        assert!(aut.generators().iter().all(|p| g.is_automorphism(p)));
        assert_eq!(aut.order_u64(), Some(brute_aut_count(&g) as u64), "{g:?}");
    }
}

#[test]
fn large_symmetric_groups_are_handled() {
    let empty = CayleyGraph::new(&spec(&[2, 2, 2, 11]), &[]).unwrap();
    let aut = empty.automorphisms(BUDGET).unwrap();
    let fact = (1..=88u32).fold(num_bigint::BigUint::from(1u32), |a, k| a * k);
    assert_eq!(aut.order(), fact);
    // one whole block: four disjoint copies of K_{11,11}
    let g = spec(&[2, 2, 2, 11]);
    let s: Vec<usize> = (44..55).collect();
    let aut = CayleyGraph::new(&g, &s).unwrap().automorphisms(BUDGET).unwrap();
    let f11 = (1..=11u32).fold(num_bigint::BigUint::from(1u32), |a, k| a * k);
    let expected = (f11.pow(2) * 2u32).pow(4) * 24u32;
    assert_eq!(aut.order(), expected);
}

#[test]
fn cycle_and_reversal_canonical_forms_follow_isomorphism() {
    let c = ColoredDigraph::from_arcs(3, |u, v| v == (u + 1) % 3);
    let r = ColoredDigraph::from_arcs(3, |u, v| u == (v + 1) % 3);
    let iso = brute_isomorphic(&c, &r);
    assert!(iso);
    assert_eq!(
        c.canonical(BUDGET).unwrap().form == r.canonical(BUDGET).unwrap().form,
        iso
    );
}

#[test]
fn equal_degree_sequences_do_not_fool_canonical_forms() {
    // every vertex has in- and out-degree 1 in both
    let cycle = ColoredDigraph::from_arcs(4, |u, v| v == (u + 1) % 4);
    let pairs = ColoredDigraph::from_arcs(4, |u, v| v == [1, 0, 3, 2][u]);
    assert!(!brute_isomorphic(&cycle, &pairs));
    assert_ne!(
        cycle.canonical(BUDGET).unwrap().form,
        pairs.canonical(BUDGET).unwrap().form
    );
}

#[test]
fn canonical_labelling_maps_onto_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let g = random_digraph(&mut rng, 9, 2, 2);
        let c = g.canonical(BUDGET).unwrap();
        assert_eq!(g.relabel(&c.labelling), c.form);
        let pi = random_perm(&mut rng, 9);
        let h = g.relabel(&pi);
        assert_eq!(h.canonical(BUDGET).unwrap().form, c.form);
        let iso = g.isomorphism_to(&h, BUDGET).unwrap().unwrap();
        assert!(g.is_isomorphism(&h, &iso));
    }
}

#[test]
fn canonical_equality_matches_brute_isomorphism_small() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for trial in 0..150 {
        let n = 2 + trial % 5;
        let a = random_digraph(&mut rng, n, 2, 1);
        // half the time an isomorphic copy with one color flipped
        let mut b = a.relabel(&random_perm(&mut rng, n));
        if trial % 2 == 0 {
            let (u, v) = (0, 1);
            b.colors[u * n + v] = 3 - b.colors[u * n + v];
        }
        let same = a.canonical(BUDGET).unwrap().form == b.canonical(BUDGET).unwrap().form;
        assert_eq!(same, brute_isomorphic(&a, &b));
    }
}

#[test]
fn budget_is_a_signal() {
    let empty = ColoredDigraph::from_arcs(30, |_, _| false);
    assert_eq!(empty.canonical(5).unwrap_err(), Error::BudgetExceeded { budget: 5 });
}

#[test]
fn block_relation_cases() {
    let a = [0usize, 1];
    let b = [2usize, 3];
    let none = ColoredDigraph::from_arcs(4, |_, _| false);
    assert_eq!(block_relation(&none, &a, &b), BlockRelation::NoEdges);
    let fwd = ColoredDigraph::from_arcs(4, |u, v| u < 2 && v >= 2);
    assert_eq!(block_relation(&fwd, &a, &b), BlockRelation::AllForward);
    assert_eq!(block_relation(&fwd, &b, &a), BlockRelation::AllBackward);
    let und = ColoredDigraph::from_arcs(4, |u, v| (u < 2) != (v < 2));
    assert_eq!(block_relation(&und, &a, &b), BlockRelation::AllUndirected);
    let one = ColoredDigraph::from_arcs(4, |u, v| (u, v) == (0, 2));
    assert_eq!(block_relation(&one, &a, &b), BlockRelation::NSim);
}

/// Blocks of `Z_p^3 x Z_q`: the cosets of the `Z_q` factor.
fn q_blocks(g: &GroupSpec) -> BlockSystem {
    let q = *g.factors().last().unwrap();
    BlockSystem::from_labels(&(0..g.order()).map(|v| v / q).collect::<Vec<_>>()).unwrap()
}

#[test]
fn gamma0_of_block_unions_is_empty() {
    let g = spec(&[2, 2, 2, 3]);
    let blocks = q_blocks(&g);
    for mask in 0u32..256 {
        if mask & 1 == 1 {
            continue;
        }
        let s: Vec<usize> = (3..24).filter(|&x| mask >> (x / 3) & 1 == 1).collect();
        let cay = CayleyGraph::new(&g, &s).unwrap();
        let g0 = gamma0(cay.graph(), &blocks);
        assert!(g0.is_empty());
        assert_eq!(g0.components().len(), 8);
    }
    let empty = CayleyGraph::new(&g, &[]).unwrap();
    assert!(gamma0(empty.graph(), &blocks).is_empty());
}

#[test]
fn gamma0_component_sizes_divide_p_cubed() {
    let g = spec(&[2, 2, 2, 3]);
    let blocks = q_blocks(&g);
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut sizes = BTreeSet::new();
    for _ in 0..200 {
        let density = rng.gen_range(0.0..0.3);
        let s: Vec<usize> = (1..24).filter(|_| rng.gen_bool(density)).collect();
        let cay = CayleyGraph::new(&g, &s).unwrap();
        let g0 = gamma0(cay.graph(), &blocks);
        for c in g0.components() {
            assert_eq!(8 % c.len(), 0);
            sizes.insert(c.len());
        }
        // both regular copies act on the quotient
        for h in g.regular_rep().generators() {
            let hb = crate::group::induced_perm(h, blocks.labels(), 8).unwrap();
            assert!(g0.is_automorphism(&hb));
        }
    }
    assert!(sizes.len() >= 2);
}

#[test]
fn gamma1_refines_gamma0_and_carries_the_regular_action() {
    let g = spec(&[2, 2, 2, 3]);
    let blocks = q_blocks(&g);
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    for _ in 0..40 {
        let s: Vec<usize> = (1..24).filter(|_| rng.gen_bool(0.3)).collect();
        let cay = CayleyGraph::new(&g, &s).unwrap();
        let g0 = gamma0(cay.graph(), &blocks);
        let g1 = gamma1(cay.graph(), &blocks, BUDGET).unwrap();
        for i in 0..8 {
            for j in 0..8 {
                for k in 0..8 {
                    for l in 0..8 {
                        if i != j && k != l && g1.graph.color(i, j) == g1.graph.color(k, l) {
                            assert_eq!(g0.adjacent(i, j), g0.adjacent(k, l));
                        }
                    }
                }
            }
        }
        let aut1 = g1.graph.automorphisms(BUDGET).unwrap();
        let h1 = g.regular_rep().induced_on_cells(blocks.labels(), 8).unwrap();
        assert!(h1.is_subgroup_of(&aut1));
        assert!(h1.regularity_report().regular);
    }
}

#[test]
fn koszoru_uniform_pairs_glue_block_automorphisms() {
    // A = {0,1,2}, B = {3,4,5}; all digraphs inside A and B, all four uniform patterns between
    let perms = all_perms(3);
    for inner_a in 0u32..64 {
        for inner_b in 0u32..64 {
            for rel in 0..4 {
                let arc = |u: usize, v: usize| -> bool {
                    if u == v {
                        return false;
                    }
                    let (ua, va) = (u < 3, v < 3);
                    let bit = |mask: u32, x: usize, y: usize| {
                        let idx = x * 2 + if y > x { y - 1 } else { y };
                        mask >> idx & 1 == 1
                    };
                    match (ua, va) {
                        (true, true) => bit(inner_a, u, v),
                        (false, false) => bit(inner_b, u - 3, v - 3),
                        (true, false) => rel == 0 || rel == 2,
                        (false, true) => rel == 1 || rel == 2,
                    }
                };
                let g = ColoredDigraph::from_arcs(6, arc);
                let ga = g.induced(&[0, 1, 2], &[0; 3], 1);
                let gb = g.induced(&[3, 4, 5], &[0; 3], 1);
                assert!(block_relation(&g, &[0, 1, 2], &[3, 4, 5]).is_sim());
                let auts_a: Vec<&Perm> = perms.iter().filter(|p| ga.is_automorphism(p)).collect();
                let auts_b: Vec<&Perm> = perms.iter().filter(|p| gb.is_automorphism(p)).collect();
                for pa in &auts_a {
                    for pb in &auts_b {
                        let mut img = pa.image_vec();
                        img.extend(pb.image_vec().iter().map(|&x| x + 3));
                        assert!(g.is_automorphism(&Perm::from_images(img).unwrap()));
                    }
                }
            }
        }
    }
}

#[test]
fn koszoru_nonuniform_pairs_force_equal_offsets() {
    for q in [3usize, 5] {
        for fwd in 0u32..(1 << q) {
            for bwd in 0u32..(1 << q) {
                // arcs (0,x) -> (1,y) iff bit (y - x) of fwd; reverse via bwd
                let arc = |u: usize, v: usize| -> bool {
                    let (bu, xu, bv, xv) = (u / q, u % q, v / q, v % q);
                    match (bu, bv) {
                        (0, 1) => fwd >> ((xv + q - xu) % q) & 1 == 1,
                        (1, 0) => bwd >> ((xv + q - xu) % q) & 1 == 1,
                        _ => false,
                    }
                };
                let g = ColoredDigraph::from_arcs(2 * q, arc);
                let a: Vec<usize> = (0..q).collect();
                let b: Vec<usize> = (q..2 * q).collect();
                if block_relation(&g, &a, &b).is_sim() {
                    continue;
                }
                for sb in 1..q {
                    for sc in 1..q {
                        let img: Vec<usize> = (0..2 * q)
                            .map(|v| if v < q { (v + sb) % q } else { q + (v - q + sc) % q })
                            .collect();
                        if g.is_automorphism(&Perm::from_images(img).unwrap()) {
                            assert_eq!(sb, sc);
                        }
                    }
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]
    #[test]
    fn regular_rep_lies_in_cayley_automorphisms(pick in 0usize..6, mask in any::<u32>()) {
        let shapes: [&[usize]; 6] = [&[8], &[2, 2, 2], &[2, 2, 3], &[12], &[3, 5], &[2, 2, 2, 3]];
        let g = spec(shapes[pick]);
        let s: Vec<usize> = (1..g.order()).filter(|&x| mask >> x & 1 == 1).collect();
        let cay = CayleyGraph::new(&g, &s).unwrap();
        let aut = cay.automorphisms(BUDGET).unwrap();
        prop_assert!(g.regular_rep().is_subgroup_of(&aut));
        prop_assert_eq!(cay.is_undirected(), (0..g.order()).all(|u| (0..g.order()).all(|v| cay.has_arc(u, v) == cay.has_arc(v, u))));
    }

    #[test]
    fn canonical_form_is_relabelling_invariant(seed in any::<u64>(), n in 1usize..=12, colors in 1u32..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_digraph(&mut rng, n, colors, 2);
        let h = g.relabel(&random_perm(&mut rng, n));
        prop_assert_eq!(g.canonical(BUDGET).unwrap().form, h.canonical(BUDGET).unwrap().form);
    }
}
