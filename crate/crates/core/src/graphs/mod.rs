//! Complete edge-colored digraphs, Cayley graphs, block relations and the
//! quotient graphs on a block system.

mod canon;
mod conj;

pub use canon::{search, SearchOutcome};
pub use conj::{marked_conjugator, RegularConjugator};

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::abgroups::GroupSpec;
use crate::error::{Error, Result};
use crate::group::{BlockSystem, PermGroup};
use crate::perm::Perm;

/// Diagonal color of plain digraphs.
pub const DIAGONAL: u32 = 0;
pub const NON_EDGE: u32 = 1;
/// `u -> v` without `v -> u`.
pub const ARC: u32 = 2;
/// `u -> v` and `v -> u`.
pub const BOTH: u32 = 3;

/// A complete digraph with a color on every ordered pair.
///
/// The diagonal carries vertex colors; plain digraphs use [`DIAGONAL`]
/// everywhere on it.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ColoredDigraph {
    n: usize,
    colors: Vec<u32>,
}

/// Canonical labelling together with the canonical form.
#[derive(Clone, Debug)]
pub struct Canonical {
    pub labelling: Perm,
    pub form: ColoredDigraph,
}

impl ColoredDigraph {
    /// Row-major `n x n` color matrix.
    pub fn new(n: usize, colors: Vec<u32>) -> Result<Self> {
        if colors.len() != n * n {
            return Err(Error::Invalid(alloc::format!(
                "expected {} colors, got {}",
                n * n,
                colors.len()
            )));
        }
        Ok(ColoredDigraph { n, colors })
    }

    pub fn from_fn<F: FnMut(usize, usize) -> u32>(n: usize, mut f: F) -> Self {
        let mut colors = Vec::with_capacity(n * n);
        for u in 0..n {
            for v in 0..n {
                colors.push(f(u, v));
            }
        }
        ColoredDigraph { n, colors }
    }

    /// Plain digraph in the [`NON_EDGE`] / [`ARC`] / [`BOTH`] encoding.
    pub fn from_arcs<F: Fn(usize, usize) -> bool>(n: usize, arc: F) -> Self {
        ColoredDigraph::from_fn(n, |u, v| {
            if u == v {
                DIAGONAL
            } else {
                match (arc(u, v), arc(v, u)) {
                    (true, true) => BOTH,
                    (true, false) => ARC,
                    _ => NON_EDGE,
                }
            }
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn color(&self, u: usize, v: usize) -> u32 {
        self.colors[u * self.n + v]
    }

    #[inline]
    pub fn row(&self, u: usize) -> &[u32] {
        &self.colors[u * self.n..(u + 1) * self.n]
    }

    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    /// Whether `u -> v` is an arc under the plain-digraph encoding.
    pub fn is_arc(&self, u: usize, v: usize) -> bool {
        u != v && matches!(self.color(u, v), ARC | BOTH)
    }

    pub fn max_color(&self) -> u32 {
        self.colors.iter().copied().max().unwrap_or(0)
    }

    /// The graph with vertex `u` renamed `pi(u)`.
    pub fn relabel(&self, pi: &Perm) -> ColoredDigraph {
        let mut colors = alloc::vec![0; self.n * self.n];
        for u in 0..self.n {
            for v in 0..self.n {
                colors[pi.apply(u) * self.n + pi.apply(v)] = self.color(u, v);
            }
        }
        ColoredDigraph { n: self.n, colors }
    }

    pub fn is_isomorphism(&self, other: &ColoredDigraph, pi: &Perm) -> bool {
        self.n == other.n
            && pi.degree() == self.n
            && (0..self.n).all(|u| (0..self.n).all(|v| self.color(u, v) == other.color(pi.apply(u), pi.apply(v))))
    }

    pub fn is_automorphism(&self, pi: &Perm) -> bool {
        self.is_isomorphism(self, pi)
    }

    /// Marks the functional graph of each `marks[k]` on top of the colors:
    /// the new color of `(u, v)` is `color * 2^m + sum of 2^k over k with marks[k](u) = v`.
    pub fn overlay(&self, marks: &[Perm]) -> Result<ColoredDigraph> {
        let m = marks.len() as u32;
        if marks.iter().any(|p| p.degree() != self.n) {
            return Err(Error::DegreeMismatch {
                left: self.n,
                right: marks.iter().map(Perm::degree).find(|&d| d != self.n).unwrap(),
            });
        }
        if m >= 16 || self.max_color() >= (u32::MAX >> m) {
            return Err(Error::Invalid("too many marks for the color range".into()));
        }
        let mut out = ColoredDigraph::from_fn(self.n, |u, v| self.color(u, v) << m);
        for (k, p) in marks.iter().enumerate() {
            for u in 0..self.n {
                out.colors[u * self.n + p.apply(u)] |= 1 << k;
            }
        }
        Ok(out)
    }

    /// Induced subgraph on `vertices` (in that order); vertex `i` gets
    /// diagonal color `color * tags + tag[i]`.
    pub fn induced(&self, vertices: &[usize], tag: &[u32], tags: u32) -> ColoredDigraph {
        ColoredDigraph::from_fn(vertices.len(), |i, j| {
            let c = self.color(vertices[i], vertices[j]);
            if i == j {
                c * tags + tag[i]
            } else {
                c
            }
        })
    }

    pub fn analyse(&self, budget: u64) -> Result<SearchOutcome> {
        search(self, budget)
    }

    /// Full color-preserving automorphism group.
    pub fn automorphisms(&self, budget: u64) -> Result<PermGroup> {
        let out = search(self, budget)?;
        PermGroup::with_order(self.n, out.generators, &out.order)
    }

    pub fn canonical(&self, budget: u64) -> Result<Canonical> {
        let out = search(self, budget)?;
        Ok(Canonical {
            labelling: out.labelling,
            form: ColoredDigraph {
                n: self.n,
                colors: out.form,
            },
        })
    }

    /// Isomorphism `self -> other` via canonical forms, if one exists.
    pub fn isomorphism_to(&self, other: &ColoredDigraph, budget: u64) -> Result<Option<Perm>> {
        if self.n != other.n {
            return Ok(None);
        }
        let a = self.canonical(budget)?;
        let b = other.canonical(budget)?;
        if a.form != b.form {
            return Ok(None);
        }
        Ok(Some(a.labelling.then(&b.labelling.inverse())))
    }
}

/// `Cay(G, S)`: an arc `g -> h` whenever `g - h` lies in `S`.
#[derive(Clone, Debug)]
pub struct CayleyGraph {
    spec: GroupSpec,
    set: Vec<usize>,
    graph: ColoredDigraph,
}

impl CayleyGraph {
    pub fn new(spec: &GroupSpec, set: &[usize]) -> Result<Self> {
        let n = spec.order();
        let mut s = set.to_vec();
        s.sort_unstable();
        s.dedup();
        if let Some(&x) = s.iter().find(|&&x| x >= n) {
            return Err(Error::InvalidConnectionSet(alloc::format!("element {x} out of range")));
        }
        if s.first() == Some(&0) {
            return Err(Error::InvalidConnectionSet("0 in S would give loops".into()));
        }
        let mut member = alloc::vec![false; n];
        for &x in &s {
            member[x] = true;
        }
        let graph = ColoredDigraph::from_arcs(n, |u, v| member[spec.sub(u, v)]);
        Ok(CayleyGraph {
            spec: spec.clone(),
            set: s,
            graph,
        })
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn set(&self) -> &[usize] {
        &self.set
    }

    pub fn graph(&self) -> &ColoredDigraph {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.graph.n
    }

    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        self.graph.is_arc(u, v)
    }

    /// `S = -S`.
    pub fn is_undirected(&self) -> bool {
        self.set
            .iter()
            .all(|&x| self.set.binary_search(&self.spec.neg(x)).is_ok())
    }

    pub fn automorphisms(&self, budget: u64) -> Result<PermGroup> {
        self.graph.automorphisms(budget)
    }
}

/// How the arcs between two disjoint blocks look.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BlockRelation {
    /// Every `a -> b`, no `b -> a`.
    AllForward,
    AllBackward,
    AllUndirected,
    NoEdges,
    /// None of the four uniform patterns.
    NSim,
}

impl BlockRelation {
    pub fn is_sim(self) -> bool {
        self != BlockRelation::NSim
    }
}

pub fn block_relation(g: &ColoredDigraph, a: &[usize], b: &[usize]) -> BlockRelation {
    let pattern = |x: usize, y: usize| (g.is_arc(x, y), g.is_arc(y, x));
    let Some((&a0, &b0)) = a.first().zip(b.first()) else {
        return BlockRelation::NoEdges;
    };
    let p = pattern(a0, b0);
    if !a.iter().all(|&x| b.iter().all(|&y| pattern(x, y) == p)) {
        return BlockRelation::NSim;
    }
    match p {
        (true, false) => BlockRelation::AllForward,
        (false, true) => BlockRelation::AllBackward,
        (true, true) => BlockRelation::AllUndirected,
        (false, false) => BlockRelation::NoEdges,
    }
}

/// Undirected graph on the blocks with an edge at every non-uniform pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gamma0 {
    m: usize,
    adj: Vec<bool>,
    components: Vec<Vec<usize>>,
    component_of: Vec<usize>,
}

impl Gamma0 {
    pub fn num_blocks(&self) -> usize {
        self.m
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.adj[i * self.m + j]
    }

    /// Connected components, each sorted, ordered by smallest block.
    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    pub fn component_of(&self, block: usize) -> usize {
        self.component_of[block]
    }

    pub fn is_empty(&self) -> bool {
        !self.adj.iter().any(|&e| e)
    }

    pub fn is_connected(&self) -> bool {
        self.components.len() == 1
    }

    /// Whether a block permutation preserves adjacency.
    pub fn is_automorphism(&self, pi: &Perm) -> bool {
        pi.degree() == self.m
            && (0..self.m).all(|i| (0..self.m).all(|j| self.adjacent(i, j) == self.adjacent(pi.apply(i), pi.apply(j))))
    }
}

pub fn gamma0(g: &ColoredDigraph, blocks: &BlockSystem) -> Gamma0 {
    let m = blocks.num_blocks();
    let mut adj = alloc::vec![false; m * m];
    for i in 0..m {
        for j in i + 1..m {
            let e = !block_relation(g, &blocks.blocks()[i], &blocks.blocks()[j]).is_sim();
            adj[i * m + j] = e;
            adj[j * m + i] = e;
        }
    }
    let mut component_of = alloc::vec![usize::MAX; m];
    let mut components = Vec::new();
    for s in 0..m {
        if component_of[s] != usize::MAX {
            continue;
        }
        let id = components.len();
        let mut comp = alloc::vec![s];
        component_of[s] = id;
        let mut head = 0;
        while head < comp.len() {
            let x = comp[head];
            head += 1;
            for y in 0..m {
                if adj[x * m + y] && component_of[y] == usize::MAX {
                    component_of[y] = id;
                    comp.push(y);
                }
            }
        }
        comp.sort_unstable();
        components.push(comp);
    }
    Gamma0 {
        m,
        adj,
        components,
        component_of,
    }
}

/// Colored digraph on the blocks: a pair of blocks gets the isomorphism
/// type of the subgraph it induces with the two blocks told apart.
#[derive(Clone, Debug)]
pub struct Gamma1 {
    pub graph: ColoredDigraph,
    /// Canonical form named by each color, indexed by color.
    pub names: Vec<ColoredDigraph>,
}

pub fn gamma1(g: &ColoredDigraph, blocks: &BlockSystem, budget: u64) -> Result<Gamma1> {
    let m = blocks.num_blocks();
    let size = blocks.block_size();
    let mut forms: Vec<ColoredDigraph> = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            let form = if i == j {
                let vs = &blocks.blocks()[i];
                g.induced(vs, &alloc::vec![0; size], 1).canonical(budget)?.form
            } else {
                let mut vs = blocks.blocks()[i].clone();
                vs.extend_from_slice(&blocks.blocks()[j]);
                let mut tag = alloc::vec![0u32; size];
                tag.extend(core::iter::repeat_n(1, size));
                g.induced(&vs, &tag, 2).canonical(budget)?.form
            };
            forms.push(form);
        }
    }
    // diagonal names first so the two name spaces stay disjoint
    let mut diag: BTreeMap<&ColoredDigraph, u32> = BTreeMap::new();
    let mut off: BTreeMap<&ColoredDigraph, u32> = BTreeMap::new();
    for i in 0..m {
        for j in 0..m {
            let map = if i == j { &mut diag } else { &mut off };
            map.insert(&forms[i * m + j], 0);
        }
    }
    let mut names = Vec::new();
    for (k, v) in diag.iter_mut().chain(off.iter_mut()).enumerate() {
        *v.1 = k as u32;
        names.push((*v.0).clone());
    }
    let graph = ColoredDigraph::from_fn(m, |i, j| {
        let f = &forms[i * m + j];
        if i == j {
            diag[f]
        } else {
            off[f]
        }
    });
    Ok(Gamma1 { graph, names })
}

#[cfg(test)]
mod tests;
