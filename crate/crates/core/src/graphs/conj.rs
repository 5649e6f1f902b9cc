//! Conjugacy inside `Aut(graph)` decided by canonical forms of overlays.
//!
//! `sigma` is an automorphism of `graph` with `x_k^sigma = y_k` for every `k`
//! exactly when it is an isomorphism from `graph` marked with the functional
//! graphs of the `x_k` to `graph` marked with those of the `y_k`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::ColoredDigraph;
use crate::abgroups::{GroupSpec, RegularTable};
use crate::error::{Error, Result};
use crate::group::{Conjugacy, PermGroup};
use crate::perm::Perm;

/// `sigma` in `Aut(graph)` with `from[k]^sigma = to[k]` for all `k`, if any.
pub fn marked_conjugator(graph: &ColoredDigraph, from: &[Perm], to: &[Perm], budget: u64) -> Result<Option<Perm>> {
    if from.len() != to.len() {
        return Err(Error::Invalid("mark lists differ in length".into()));
    }
    let a = graph.overlay(from)?.canonical(budget)?;
    let b = graph.overlay(to)?.canonical(budget)?;
    if a.form != b.form {
        return Ok(None);
    }
    let sigma = a.labelling.then(&b.labelling.inverse());
    debug_assert!(graph.is_automorphism(&sigma));
    Ok(Some(sigma))
}

/// Decides, for many regular abelian `H`, whether `H^sigma = K` for some
/// `sigma` in `Aut(graph)`, with `K` fixed.
///
/// Canonical forms of `graph` marked by every basis of `K` are computed once.
pub struct RegularConjugator {
    graph: ColoredDigraph,
    spec: GroupSpec,
    target: PermGroup,
    forms: BTreeMap<ColoredDigraph, Perm>,
    budget: u64,
}

impl RegularConjugator {
    pub fn new(graph: &ColoredDigraph, target: &PermGroup, budget: u64) -> Result<Self> {
        let table = RegularTable::new(target)?;
        let spec = GroupSpec::new(table.iso_type()).map_err(|_| Error::NotRegularAbelian)?;
        let mut forms = BTreeMap::new();
        let mut failure = None;
        table.for_each_basis(&spec, |basis| {
            let marks: Vec<Perm> = basis.iter().map(|&x| table.element(x).clone()).collect();
            match graph.overlay(&marks).and_then(|g| g.canonical(budget)) {
                Ok(c) => {
                    forms.entry(c.form).or_insert(c.labelling);
                    true
                }
                Err(e) => {
                    failure = Some(e);
                    false
                }
            }
        });
        if let Some(e) = failure {
            return Err(e);
        }
        Ok(RegularConjugator {
            graph: graph.clone(),
            spec,
            target: target.clone(),
            forms,
            budget,
        })
    }

    /// Number of distinct marked forms of the target (one per `Aut(graph)`-class of bases).
    pub fn target_forms(&self) -> usize {
        self.forms.len()
    }

    /// A verified `sigma` with `h^sigma = target`.
    pub fn conjugator(&self, h: &PermGroup) -> Result<Conjugacy> {
        let table = match RegularTable::new(h) {
            Ok(t) => t,
            Err(_) => return Ok(Conjugacy::NotConjugate),
        };
        let Some(basis) = table.basis_for(&self.spec) else {
            return Ok(Conjugacy::NotConjugate);
        };
        let marks: Vec<Perm> = basis.iter().map(|&x| table.element(x).clone()).collect();
        let c = match self.graph.overlay(&marks)?.canonical(self.budget) {
            Ok(c) => c,
            Err(Error::BudgetExceeded { .. }) => return Ok(Conjugacy::BudgetExceeded),
            Err(e) => return Err(e),
        };
        let Some(lab) = self.forms.get(&c.form) else {
            return Ok(Conjugacy::NotConjugate);
        };
        let sigma = c.labelling.then(&lab.inverse());
        if !self.graph.is_automorphism(&sigma) || !h.conjugate_by(&sigma).same_group(&self.target) {
            return Err(Error::Invalid("overlay conjugator failed verification".into()));
        }
        Ok(Conjugacy::Found(sigma))
    }
}
