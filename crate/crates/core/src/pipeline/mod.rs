//! Constructive conjugation of a regular copy of `Z_p^3 x Z_q` inside
//! `Aut(Cay(Z_p^3 x Z_q, S))` onto the regular representation.
//!
//! Vertices are `(b;x)` with `b` in `Z_p^3` (the block) and `x` in `Z_q`,
//! indexed as `b*q + x`. The blocks are the orbits of the translation by
//! `(0;1)`.
//!
//! Every conjugator here is a library permutation and acts by
//! [`Perm::conjugate_by`], so `H.conjugate_by(a)` is `{a h a^-1}` read as
//! maps. A conjugator `alpha` written with right-to-left composition, as
//! `alpha^-1 g alpha`, corresponds to the library permutation `alpha^-1`.

mod gen;
mod step1;
mod step2;
mod step3;

pub use gen::{random_beta, random_instance, structured_set, BetaKind, BetaSource, Instance};
pub use step1::step1_align;
pub use step2::{patch_automorphism, q_align, szorzas_build, Szorzas};
pub use step3::p_align;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::abgroups::{GroupSpec, RegularTable};
use crate::error::Error;
use crate::graphs::{CayleyGraph, ColoredDigraph, Gamma0, Gamma1};
use crate::group::{induced_perm, BlockSystem, PermGroup, DEFAULT_ENUM_CAP, DEFAULT_NODE_BUDGET};
use crate::perm::Perm;

/// Why a run stopped without a certificate.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum InapplicableReason {
    Budget {
        stage: &'static str,
    },
    /// A hypothesis of one of the construction steps failed on this instance.
    Hypothesis {
        name: &'static str,
        detail: String,
    },
    SearchFailed {
        stage: &'static str,
        detail: String,
    },
}

impl InapplicableReason {
    /// Short label for histograms.
    pub fn label(&self) -> String {
        match self {
            InapplicableReason::Budget { stage } => alloc::format!("budget:{stage}"),
            InapplicableReason::Hypothesis { name, .. } => alloc::format!("hypothesis:{name}"),
            InapplicableReason::SearchFailed { stage, .. } => alloc::format!("search:{stage}"),
        }
    }
}

impl fmt::Display for InapplicableReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InapplicableReason::Budget { stage } => write!(f, "budget exceeded in {stage}"),
            InapplicableReason::Hypothesis { name, detail } => write!(f, "hypothesis {name} fails: {detail}"),
            InapplicableReason::SearchFailed { stage, detail } => write!(f, "search in {stage} failed: {detail}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum PipelineError {
    /// The input does not meet the preconditions.
    #[error("precondition: {0}")]
    Precondition(String),
    #[error("inapplicable: {0}")]
    Inapplicable(InapplicableReason),
    #[error(transparent)]
    Internal(Error),
}

impl From<Error> for PipelineError {
    fn from(e: Error) -> Self {
        match e {
            Error::BudgetExceeded { .. } | Error::OverCap { .. } => {
                PipelineError::Inapplicable(InapplicableReason::Budget { stage: "search" })
            }
            e => PipelineError::Internal(e),
        }
    }
}

pub(crate) fn hypothesis(name: &'static str, detail: String) -> PipelineError {
    PipelineError::Inapplicable(InapplicableReason::Hypothesis { name, detail })
}

pub(crate) fn budget_at(stage: &'static str) -> impl Fn(Error) -> PipelineError {
    move |e| match e {
        Error::BudgetExceeded { .. } | Error::OverCap { .. } => {
            PipelineError::Inapplicable(InapplicableReason::Budget { stage })
        }
        e => PipelineError::Internal(e),
    }
}

pub type PipelineResult<T> = core::result::Result<T, PipelineError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PipelineBudgets {
    /// Canonical-form search nodes per call.
    pub nodes: u64,
    /// Cap on enumerated group elements.
    pub enum_cap: usize,
}

impl Default for PipelineBudgets {
    fn default() -> Self {
        PipelineBudgets {
            nodes: DEFAULT_NODE_BUDGET,
            enum_cap: DEFAULT_ENUM_CAP,
        }
    }
}

/// Shape of `Gamma_0` by component size.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CaseTag {
    Connected,
    Empty,
    CompSizeP,
    CompSizeP2,
}

impl CaseTag {
    pub fn name(self) -> &'static str {
        match self {
            CaseTag::Connected => "connected",
            CaseTag::Empty => "empty",
            CaseTag::CompSizeP => "components-p",
            CaseTag::CompSizeP2 => "components-p2",
        }
    }
}

/// One conjugation applied during a run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepRecord {
    pub name: &'static str,
    pub detail: String,
    /// Points moved by the conjugator of this step.
    pub moved: usize,
}

/// Coordinates on `Z_p^3 x Z_q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layout {
    pub p: usize,
    pub q: usize,
    pub spec: GroupSpec,
    /// `Z_p^3`, indexing the blocks.
    pub block_spec: GroupSpec,
}

fn is_prime(n: usize) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

impl Layout {
    /// Accepts specs with factors `[p, p, p, q]`, `p != q` primes.
    pub fn new(spec: &GroupSpec) -> PipelineResult<Self> {
        let f = spec.factors();
        if f.len() != 4 || f[0] != f[1] || f[1] != f[2] || !is_prime(f[0]) || !is_prime(f[3]) || f[0] == f[3] {
            return Err(PipelineError::Precondition(alloc::format!(
                "group {spec} is not of the form Zp^3xZq with distinct primes"
            )));
        }
        Ok(Layout {
            p: f[0],
            q: f[3],
            spec: spec.clone(),
            block_spec: GroupSpec::new(alloc::vec![f[0]; 3]).expect("prime factors"),
        })
    }

    pub fn n(&self) -> usize {
        self.spec.order()
    }

    pub fn num_blocks(&self) -> usize {
        self.p * self.p * self.p
    }

    pub fn point(&self, block: usize, x: usize) -> usize {
        block * self.q + x % self.q
    }

    pub fn block(&self, v: usize) -> usize {
        v / self.q
    }

    pub fn offset(&self, v: usize) -> usize {
        v % self.q
    }

    pub fn block_system(&self) -> BlockSystem {
        let labels: Vec<usize> = (0..self.n()).map(|v| self.block(v)).collect();
        BlockSystem::from_labels(&labels).expect("equal blocks")
    }

    /// The action of `g` on the blocks, if it permutes them.
    pub fn block_perm(&self, g: &Perm) -> Option<Perm> {
        let labels: Vec<usize> = (0..self.n()).map(|v| self.block(v)).collect();
        induced_perm(g, &labels, self.num_blocks()).ok()
    }

    /// `(b;x) -> (mu(b); x)`.
    pub fn lift(&self, mu: &Perm) -> Perm {
        Perm::from_images(
            (0..self.n())
                .map(|v| self.point(mu.apply(self.block(v)), self.offset(v)))
                .collect(),
        )
        .expect("lift of a block permutation")
    }

    /// The translation of the hat group by block `b`.
    pub fn hat_block_translation(&self, b: usize) -> Perm {
        self.spec.translation(self.point(b, 0))
    }

    /// Inverse of `a` modulo `q`.
    pub fn inv_mod_q(&self, a: usize) -> usize {
        (1..self.q).find(|&k| k * a % self.q == 1).expect("unit modulo a prime")
    }

    /// Colored digraph on the blocks recording the arc pattern between each
    /// pair, with optional vertex colors; lifts of its automorphisms are
    /// automorphisms of the Cayley graph.
    pub fn block_pattern(&self, gamma: &CayleyGraph, vertex_color: &[usize]) -> ColoredDigraph {
        let m = self.num_blocks();
        let mut names: alloc::collections::BTreeMap<(Vec<bool>, usize), u32> = Default::default();
        let mut keys = Vec::with_capacity(m * m);
        for b in 0..m {
            for c in 0..m {
                let mask: Vec<bool> = (0..self.q)
                    .map(|x| gamma.has_arc(self.point(b, 0), self.point(c, x)))
                    .collect();
                let vc = if b == c {
                    1 + vertex_color.get(b).copied().unwrap_or(0)
                } else {
                    0
                };
                keys.push((mask, vc));
            }
        }
        for k in &keys {
            let next = names.len() as u32;
            names.entry(k.clone()).or_insert(next);
        }
        ColoredDigraph::from_fn(m, |b, c| names[&keys[b * m + c]])
    }
}

/// Everything the three steps share.
#[derive(Clone, Debug)]
pub struct PipelineState {
    pub layout: Layout,
    pub gamma: CayleyGraph,
    pub g_hat: Perm,
    /// Current generator of the order-`q` part of the ring group.
    pub g_ring: Perm,
    /// The ring group after the conjugations applied so far.
    pub ring: PermGroup,
    pub blocks: BlockSystem,
    /// Action of the hat `p`-part on the blocks.
    pub h1: PermGroup,
    /// Action of the ring `p`-part on the blocks.
    pub h2: PermGroup,
    pub gamma0: Gamma0,
    pub gamma1: Gamma1,
    pub case: CaseTag,
    /// Product of all conjugators applied to the input ring group.
    pub alpha: Perm,
    pub trace: Vec<StepRecord>,
    pub budgets: PipelineBudgets,
}

impl PipelineState {
    /// Conjugates the ring side by `sigma` and records it.
    pub fn apply(&mut self, sigma: &Perm, name: &'static str, detail: String) -> PipelineResult<()> {
        self.ring = self.ring.conjugate_by(sigma);
        self.g_ring = self.g_ring.conjugate_by(sigma);
        self.alpha = self.alpha.then(sigma);
        self.h2 = ring_quotient(&self.layout, &self.ring)?;
        let moved = (0..sigma.degree()).filter(|&v| sigma.apply(v) != v).count();
        self.trace.push(StepRecord { name, detail, moved });
        Ok(())
    }

    pub fn note(&mut self, name: &'static str, detail: String) {
        self.trace.push(StepRecord { name, detail, moved: 0 });
    }

    /// The `p`-elements of the ring group, indexed by the block they move block 0 to.
    pub fn ring_p_part(&self) -> PipelineResult<Vec<Perm>> {
        ring_p_part(&self.layout, &self.ring)
    }

    /// The ring `p`-element moving block `s` to block `t`.
    pub fn ring_element_between(&self, ring_p: &[Perm], s: usize, t: usize) -> PipelineResult<Perm> {
        let from = self.layout.point(s, 0);
        ring_p
            .iter()
            .find(|r| self.layout.block(r.apply(from)) == t)
            .cloned()
            .ok_or_else(|| {
                hypothesis(
                    "regular-quotient",
                    alloc::format!("no ring element maps block {s} to {t}"),
                )
            })
    }
}

pub(crate) fn ring_p_part(layout: &Layout, ring: &PermGroup) -> PipelineResult<Vec<Perm>> {
    let table = RegularTable::new(ring)?;
    let m = layout.num_blocks();
    let mut out: Vec<Option<Perm>> = alloc::vec![None; m];
    for x in 0..layout.n() {
        if layout.p.is_multiple_of(table.element_order(x)) {
            let b = layout.block(x);
            if out[b].is_some() {
                return Err(hypothesis(
                    "regular-quotient",
                    alloc::format!("two p-elements reach block {b}"),
                ));
            }
            out[b] = Some(table.element(x).clone());
        }
    }
    out.into_iter()
        .enumerate()
        .map(|(b, e)| e.ok_or_else(|| hypothesis("regular-quotient", alloc::format!("no p-element reaches block {b}"))))
        .collect()
}

pub(crate) fn ring_quotient(layout: &Layout, ring: &PermGroup) -> PipelineResult<PermGroup> {
    let gens = ring
        .generators()
        .iter()
        .map(|g| {
            layout
                .block_perm(g)
                .ok_or_else(|| hypothesis("blocks", "ring generator does not permute the blocks".into()))
        })
        .collect::<PipelineResult<Vec<Perm>>>()?;
    Ok(PermGroup::new(layout.num_blocks(), gens)?)
}

/// A verified conjugator taking the input ring group onto the hat group.
#[derive(Clone, Debug)]
pub struct ConjugationCertificate {
    pub alpha: Perm,
    pub alpha_in_aut: bool,
    pub conjugates: bool,
    pub case: CaseTag,
    pub trace: Vec<StepRecord>,
}

impl ConjugationCertificate {
    /// Re-checks `alpha in Aut(gamma)` and that every conjugated generator is a translation.
    pub fn verify(&self, gamma: &CayleyGraph, ring: &PermGroup) -> bool {
        verify_alpha(gamma, ring, &self.alpha) == (true, true)
    }
}

fn verify_alpha(gamma: &CayleyGraph, ring: &PermGroup, alpha: &Perm) -> (bool, bool) {
    let spec = gamma.spec();
    let in_aut = alpha.degree() == gamma.n() && gamma.graph().is_automorphism(alpha);
    let conj = in_aut
        && ring.order() == num_bigint::BigUint::from(spec.order())
        && ring.generators().iter().all(|g| {
            let h = g.conjugate_by(alpha);
            h == spec.translation(h.apply(0))
        });
    (in_aut, conj)
}

/// Runs all three steps; a certificate comes back only after both checks pass.
pub fn conjugate_p3q(
    gamma: &CayleyGraph,
    ring: &PermGroup,
    budgets: PipelineBudgets,
) -> PipelineResult<ConjugationCertificate> {
    let mut state = step1_align(gamma, ring, budgets)?;
    let sigma = q_align(&state)?;
    state.apply(&sigma, "step2", alloc::format!("case {}", state.case.name()))?;
    let eta = p_align(&state)?;
    state.apply(&eta, "step3", String::from("lift of the quotient conjugator"))?;
    let (alpha_in_aut, conjugates) = verify_alpha(gamma, ring, &state.alpha);
    if !(alpha_in_aut && conjugates) {
        return Err(hypothesis(
            "certificate",
            alloc::format!("alpha in Aut: {alpha_in_aut}, conjugates: {conjugates}"),
        ));
    }
    Ok(ConjugationCertificate {
        alpha: state.alpha,
        alpha_in_aut,
        conjugates,
        case: state.case,
        trace: state.trace,
    })
}
