//! With the order-`q` generators equal, conjugating the `p`-parts: first
//! clearing the base-group offsets, then lifting a conjugator of the
//! quotient actions.

use alloc::collections::VecDeque;
use alloc::string::String;
use alloc::vec::Vec;

use super::{budget_at, hypothesis, InapplicableReason, PipelineError, PipelineResult, PipelineState};
use crate::graphs::RegularConjugator;
use crate::group::Conjugacy;
use crate::perm::Perm;
use crate::two_closure::ci2_conjugator;

/// Offsets `t_b` with `u(b;x) = (u(b); x + t_b)`.
fn offsets(state: &PipelineState, u: &Perm) -> PipelineResult<Vec<usize>> {
    let l = &state.layout;
    (0..l.num_blocks())
        .map(|b| {
            let img = u.apply(l.point(b, 0));
            let t = l.offset(img);
            let ok = (0..l.q).all(|x| u.apply(l.point(b, x)) == l.point(l.block(img), x + t));
            if ok {
                Ok(t)
            } else {
                Err(hypothesis(
                    "osszefuggo",
                    alloc::format!("p-element is not a shifted block map on block {b}"),
                ))
            }
        })
        .collect()
}

/// Base-group element `(b;x) -> (b; x + kappa_C)`, constant on each
/// `Gamma_0` component, clearing every offset of the ring `p`-part.
fn clear_offsets(state: &PipelineState, ring_p: &[Perm]) -> PipelineResult<Option<Perm>> {
    let l = &state.layout;
    let g0 = &state.gamma0;
    let q = l.q;
    let table: Vec<(Vec<usize>, Perm)> = ring_p
        .iter()
        .map(|u| {
            Ok((
                offsets(state, u)?,
                l.block_perm(u).expect("p-elements permute the blocks"),
            ))
        })
        .collect::<PipelineResult<_>>()?;
    if table.iter().all(|(t, _)| t.iter().all(|&x| x == 0)) {
        return Ok(None);
    }
    let comps = g0.components().len();
    let mut kappa: Vec<Option<usize>> = alloc::vec![None; comps];
    kappa[0] = Some(0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(c) = queue.pop_front() {
        let kc = kappa[c].unwrap();
        for &b in &g0.components()[c] {
            for (t, u) in &table {
                // kappa at u(b) must be kappa at b minus t_b
                let c2 = g0.component_of(u.apply(b));
                let want = (kc + q - t[b]) % q;
                match kappa[c2] {
                    None => {
                        kappa[c2] = Some(want);
                        queue.push_back(c2);
                    }
                    Some(k) if k != want => {
                        return Err(hypothesis(
                            "osszefuggo",
                            alloc::format!("offsets cannot be cleared between components {c} and {c2}"),
                        ));
                    }
                    _ => {}
                }
            }
        }
    }
    let kappa: Vec<usize> = kappa
        .into_iter()
        .map(|k| k.ok_or_else(|| hypothesis("regular-quotient", "component not reached".into())))
        .collect::<PipelineResult<_>>()?;
    let images = (0..l.n())
        .map(|v| l.point(l.block(v), l.offset(v) + kappa[g0.component_of(l.block(v))]))
        .collect();
    Ok(Some(Perm::from_images(images).expect("shift within blocks")))
}

/// A conjugator `kappa eta` in `Aut(Gamma)` with the ring group carried onto
/// the hat group, given `g_ring = g_hat`.
pub fn p_align(state: &PipelineState) -> PipelineResult<Perm> {
    let l = &state.layout;
    let graph = state.gamma.graph();
    if state.g_ring != state.g_hat {
        return Err(hypothesis("q-aligned", "g_ring differs from g_hat".into()));
    }
    let hat = l.spec.regular_rep();
    if state.ring.same_group(&hat) {
        return Ok(Perm::identity(l.n()));
    }
    let mut ring = state.ring.clone();
    let mut ring_p = state.ring_p_part()?;
    let mut alpha = Perm::identity(l.n());
    if let Some(kappa) = clear_offsets(state, &ring_p)? {
        if !graph.is_automorphism(&kappa) {
            return Err(hypothesis(
                "osszefuggo",
                "offset correction is not an automorphism".into(),
            ));
        }
        ring = ring.conjugate_by(&kappa);
        ring_p = ring_p.iter().map(|u| u.conjugate_by(&kappa)).collect();
        alpha = kappa;
    }
    for u in &ring_p {
        if offsets(state, u)?.iter().any(|&t| t != 0) {
            return Err(hypothesis("osszefuggo", "a p-element keeps a base-group part".into()));
        }
    }
    let h2 = super::ring_quotient(l, &ring)?;
    let budgets = state.budgets;
    let outcome = ci2_conjugator(&h2, &state.h1, budgets.enum_cap, budgets.nodes).map_err(budget_at("ci2"))?;
    let mu = match outcome.result {
        Conjugacy::Found(mu) => mu,
        other => {
            // any block map preserving the arc patterns lifts to an automorphism
            let pattern = l.block_pattern(&state.gamma, &[]);
            let oracle = RegularConjugator::new(&pattern, &state.h1, budgets.nodes).map_err(budget_at("lift"))?;
            match oracle.conjugator(&h2).map_err(budget_at("lift"))? {
                Conjugacy::Found(mu) => mu,
                Conjugacy::BudgetExceeded => {
                    return Err(PipelineError::Inapplicable(InapplicableReason::Budget {
                        stage: "lift",
                    }))
                }
                Conjugacy::NotConjugate => {
                    return Err(PipelineError::Inapplicable(InapplicableReason::SearchFailed {
                        stage: "ci2",
                        detail: alloc::format!(
                            "quotients not conjugate by a pattern-preserving block map ({})",
                            if other == Conjugacy::BudgetExceeded {
                                "closure budget"
                            } else {
                                "closure search empty"
                            }
                        ),
                    }))
                }
            }
        }
    };
    let eta = l.lift(&mu);
    if !graph.is_automorphism(&eta) {
        return Err(hypothesis(
            "lift",
            String::from("lifted quotient conjugator is not an automorphism"),
        ));
    }
    if !eta.commutes_with(&state.g_hat) || !ring.conjugate_by(&eta).same_group(&hat) {
        return Err(hypothesis(
            "lift",
            String::from("lifted conjugator does not reach the hat group"),
        ));
    }
    Ok(alpha.then(&eta))
}
