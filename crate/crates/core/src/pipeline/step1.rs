//! Validation, alignment of the order-`q` parts, the block system and the
//! quotient actions.

use alloc::string::String;
use alloc::vec::Vec;
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use super::{
    budget_at, hypothesis, ring_quotient, CaseTag, Layout, PipelineBudgets, PipelineError, PipelineResult,
    PipelineState,
};
use crate::abgroups::{abelian_iso_type, RegularTable};
use crate::graphs::{gamma0, gamma1, marked_conjugator, CayleyGraph};
use crate::group::PermGroup;
use crate::perm::Perm;

fn precondition(msg: &str) -> PipelineError {
    PipelineError::Precondition(msg.into())
}

/// Commutes with `g_hat` and fixes every block.
fn block_aligned(layout: &Layout, g_hat: &Perm, g: &Perm) -> bool {
    g.commutes_with(g_hat) && (0..layout.n()).all(|v| layout.block(g.apply(v)) == layout.block(v))
}

fn is_power_of(order: &BigUint, p: usize) -> bool {
    let mut o = order.clone();
    let pb = BigUint::from(p);
    while !o.is_one() {
        if !(&o % &pb).is_zero() {
            return false;
        }
        o /= &pb;
    }
    true
}

/// Checks the input, moves the ring order-`q` generator next to the hat one
/// and builds the block system, the quotient actions and `Gamma_0`, `Gamma_1`.
pub fn step1_align(gamma: &CayleyGraph, ring: &PermGroup, budgets: PipelineBudgets) -> PipelineResult<PipelineState> {
    let layout = Layout::new(gamma.spec())?;
    let n = layout.n();
    if ring.degree() != n {
        return Err(precondition("ring group has the wrong degree"));
    }
    if !ring.generators().iter().all(|g| gamma.graph().is_automorphism(g)) {
        return Err(precondition("ring group is not inside Aut of the graph"));
    }
    let report = ring.regularity_report();
    if !report.regular || !report.abelian {
        return Err(precondition("ring group is not regular abelian"));
    }
    if abelian_iso_type(ring)? != layout.spec.invariant_factors() {
        return Err(precondition("ring group is not isomorphic to the group of the graph"));
    }
    let hat = layout.spec.regular_rep();
    let g_hat = layout.spec.translation(layout.point(0, 1));
    let table = RegularTable::new(ring)?;
    let g_ring = (0..n)
        .find(|&x| table.element_order(x) == layout.q)
        .map(|x| table.element(x).clone())
        .expect("a q-element exists");

    let blocks = layout.block_system();
    let h1 = ring_quotient(&layout, &hat)?;
    let graph = gamma.graph();
    let mut state = PipelineState {
        gamma: gamma.clone(),
        g_hat: g_hat.clone(),
        g_ring,
        ring: ring.clone(),
        h2: h1.clone(),
        h1,
        gamma0: gamma0(graph, &blocks),
        gamma1: gamma1(graph, &blocks, budgets.nodes).map_err(budget_at("gamma1"))?,
        blocks,
        case: CaseTag::Connected,
        alpha: Perm::identity(n),
        trace: Vec::new(),
        budgets,
        layout,
    };

    if !block_aligned(&state.layout, &g_hat, &state.g_ring) {
        let mut found = None;
        for k in 1..state.layout.q {
            let target = g_hat.pow(k as i64);
            let sigma = marked_conjugator(graph, &[state.g_ring.clone()], &[target], budgets.nodes)
                .map_err(budget_at("q-sylow"))?;
            if let Some(s) = sigma {
                found = Some((k, s));
                break;
            }
        }
        let Some((k, sigma)) = found else {
            return Err(PipelineError::Inapplicable(super::InapplicableReason::SearchFailed {
                stage: "q-sylow",
                detail: "the q-element is not conjugate in Aut to a power of the hat generator".into(),
            }));
        };
        state.apply(
            &sigma,
            "step1.q-sylow",
            alloc::format!("q-element conjugated to g_hat^{k}"),
        )?;
    } else {
        state.h2 = ring_quotient(&state.layout, &state.ring)?;
    }

    // make the ring generator agree with g_hat on block 0
    let d0 = state.layout.offset(state.g_ring.apply(0));
    if d0 != 1 {
        let k = state.layout.inv_mod_q(d0);
        state.g_ring = state.g_ring.pow(k as i64);
        state.note("step1.normalize", alloc::format!("g_ring replaced by its power {k}"));
    }

    for g in state.ring.generators().iter().chain(hat.generators()) {
        if !state.blocks.is_invariant_under(g) {
            return Err(hypothesis("blocks", "block system not invariant".into()));
        }
    }
    let m = state.layout.num_blocks();
    for (name, h) in [("h1", &state.h1), ("h2", &state.h2)] {
        let r = h.regularity_report();
        if !r.regular || h.order() != BigUint::from(m) {
            return Err(hypothesis(
                "regular-quotient",
                alloc::format!("{name} is not regular on the blocks"),
            ));
        }
    }

    let sizes: Vec<usize> = state.gamma0.components().iter().map(Vec::len).collect();
    let p = state.layout.p;
    state.case = match sizes[0] {
        s if sizes.iter().any(|&t| t != s) => {
            return Err(hypothesis("component-size", "components of unequal size".into()));
        }
        1 => CaseTag::Empty,
        s if s == p => CaseTag::CompSizeP,
        s if s == p * p => CaseTag::CompSizeP2,
        s if s == m => CaseTag::Connected,
        s => return Err(hypothesis("component-size", alloc::format!("component size {s}"))),
    };

    let join = state.h1.join(&state.h2)?;
    if !is_power_of(&join.order(), p) {
        p_sylow_align(&mut state)?;
    }
    Ok(state)
}

/// Conjugates the ring side by a block-lifted automorphism fixing `g_ring`
/// so that the two quotient actions generate a `p`-group, if one exists.
fn p_sylow_align(state: &mut PipelineState) -> PipelineResult<()> {
    let layout = &state.layout;
    let m = layout.num_blocks();
    let d: Vec<usize> = (0..m)
        .map(|b| layout.offset(state.g_ring.apply(layout.point(b, 0))))
        .collect();
    let pattern = layout.block_pattern(&state.gamma, &d);
    let aut = pattern
        .automorphisms(state.budgets.nodes)
        .map_err(budget_at("p-sylow"))?;
    if aut.order().to_usize().is_none_or(|o| o > state.budgets.enum_cap) {
        return Err(PipelineError::Inapplicable(super::InapplicableReason::Budget {
            stage: "p-sylow",
        }));
    }
    let mut found = None;
    aut.chain().for_each_element(|mu| {
        let h2 = state.h2.conjugate_by(mu);
        match state.h1.join(&h2) {
            Ok(j) if is_power_of(&j.order(), layout.p) => {
                found = Some(mu.clone());
                false
            }
            _ => true,
        }
    });
    let Some(mu) = found else {
        state.note(
            "step1.p-sylow",
            String::from("no block-lifted conjugator makes the quotients a p-group"),
        );
        return Ok(());
    };
    let eta = layout.lift(&mu);
    if !state.gamma.graph().is_automorphism(&eta) || !eta.commutes_with(&state.g_ring) {
        return Err(hypothesis("p-sylow", "lifted block map is not an automorphism".into()));
    }
    state.apply(&eta, "step1.p-sylow", String::from("quotients moved into one p-group"))
}
