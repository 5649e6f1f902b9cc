//! Individualization-refinement search for automorphism groups and
//! canonical forms of complete edge-colored digraphs.
//!
//! Leaves are ordered by `(trace, relabelled matrix)`; the canonical form is
//! the least leaf. Hash values only steer the search: leaves are always
//! compared exactly, so a collision can cost time but not correctness.

use alloc::collections::VecDeque;
use alloc::vec::Vec;
use core::cmp::Ordering;
use num_bigint::BigUint;
use num_traits::One;

use super::ColoredDigraph;
use crate::error::{Error, Result};
use crate::perm::Perm;

#[inline]
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[inline]
fn fold(acc: u64, x: u64) -> u64 {
    mix(acc ^ x.wrapping_mul(0x100_0000_01b3))
}

/// Ordered partition of the vertices, cells addressed by start position.
#[derive(Clone)]
struct Partition {
    lab: Vec<u32>,
    cell: Vec<u32>,
    len: Vec<u32>,
    cells: usize,
}

impl Partition {
    fn initial(g: &ColoredDigraph) -> (Self, Vec<u32>) {
        let n = g.n();
        let mut lab: Vec<u32> = (0..n as u32).collect();
        lab.sort_by_key(|&v| (g.color(v as usize, v as usize), v));
        let mut part = Partition {
            lab,
            cell: alloc::vec![0; n],
            len: alloc::vec![0; n],
            cells: 0,
        };
        let mut starts = Vec::new();
        let mut i = 0;
        while i < n {
            let c = g.color(part.lab[i] as usize, part.lab[i] as usize);
            let mut j = i;
            while j < n && g.color(part.lab[j] as usize, part.lab[j] as usize) == c {
                part.cell[part.lab[j] as usize] = i as u32;
                j += 1;
            }
            part.len[i] = (j - i) as u32;
            part.cells += 1;
            starts.push(i as u32);
            i = j;
        }
        (part, starts)
    }

    fn is_discrete(&self) -> bool {
        self.cells == self.lab.len()
    }

    fn first_nonsingleton(&self) -> Option<usize> {
        let mut s = 0;
        while s < self.lab.len() {
            let l = self.len[s] as usize;
            if l > 1 {
                return Some(s);
            }
            s += l;
        }
        None
    }

    /// Splits `v` off the front of its cell and refines; returns the trace.
    fn individualize(&mut self, g: &ColoredDigraph, v: u32) -> u64 {
        let s = self.cell[v as usize] as usize;
        let l = self.len[s] as usize;
        let at = s + self.lab[s..s + l].iter().position(|&x| x == v).unwrap();
        self.lab.swap(s, at);
        self.len[s] = 1;
        self.len[s + 1] = (l - 1) as u32;
        for &x in &self.lab[s + 1..s + l] {
            self.cell[x as usize] = (s + 1) as u32;
        }
        self.cells += 1;
        self.refine(g, &[s as u32], fold(0x1d, s as u64))
    }

    /// Refines to a partition stable under every splitter in the queue.
    fn refine(&mut self, g: &ColoredDigraph, seeds: &[u32], mut trace: u64) -> u64 {
        let n = self.lab.len();
        let mut queue: VecDeque<u32> = seeds.iter().copied().collect();
        let mut queued = alloc::vec![false; n];
        for &s in seeds {
            queued[s as usize] = true;
        }
        let mut sig = alloc::vec![0u64; n];
        let mut splitter: Vec<u32> = Vec::new();
        let mut keyed: Vec<(u64, u32)> = Vec::new();
        while let Some(w) = queue.pop_front() {
            if self.is_discrete() {
                break;
            }
            queued[w as usize] = false;
            let ws = w as usize;
            splitter.clear();
            splitter.extend_from_slice(&self.lab[ws..ws + self.len[ws] as usize]);
            trace = fold(trace, (ws as u64) << 32 | splitter.len() as u64);
            let mut s = 0;
            while s < n {
                let l = self.len[s] as usize;
                if l == 1 {
                    s += 1;
                    continue;
                }
                for &v in &self.lab[s..s + l] {
                    let row = g.row(v as usize);
                    let mut acc = 0u64;
                    for &x in &splitter {
                        let pair = (row[x as usize] as u64) << 32 | g.color(x as usize, v as usize) as u64;
                        acc = acc.wrapping_add(mix(pair));
                    }
                    sig[v as usize] = acc;
                }
                let first = sig[self.lab[s] as usize];
                if self.lab[s..s + l].iter().all(|&v| sig[v as usize] == first) {
                    s += l;
                    continue;
                }
                keyed.clear();
                keyed.extend(self.lab[s..s + l].iter().map(|&v| (sig[v as usize], v)));
                keyed.sort_unstable();
                for (i, &(_, v)) in keyed.iter().enumerate() {
                    self.lab[s + i] = v;
                }
                // fragment boundaries
                let mut frags: Vec<(usize, usize)> = Vec::new();
                let mut i = 0;
                while i < l {
                    let mut j = i;
                    while j < l && keyed[j].0 == keyed[i].0 {
                        j += 1;
                    }
                    frags.push((s + i, j - i));
                    trace = fold(trace, keyed[i].0 ^ ((j - i) as u64) << 48 ^ (s + i) as u64);
                    i = j;
                }
                let largest = frags
                    .iter()
                    .enumerate()
                    .max_by(|a, b| a.1 .1.cmp(&b.1 .1).then(b.0.cmp(&a.0)))
                    .map(|(i, _)| i)
                    .unwrap();
                let was_queued = queued[s];
                for (fi, &(fs, fl)) in frags.iter().enumerate() {
                    self.len[fs] = fl as u32;
                    for &v in &self.lab[fs..fs + fl] {
                        self.cell[v as usize] = fs as u32;
                    }
                    let push = if was_queued { fs != s } else { fi != largest };
                    if push && !queued[fs] {
                        queued[fs] = true;
                        queue.push_back(fs as u32);
                    }
                }
                self.cells += frags.len() - 1;
                s += l;
            }
        }
        fold(trace, self.cells as u64)
    }
}

struct Leaf {
    path: Vec<u32>,
    trace: Vec<u64>,
    lab: Vec<u32>,
    matrix: Vec<u32>,
}

/// Result of one search: a canonical labelling and the automorphism group.
#[derive(Clone, Debug)]
pub struct SearchOutcome {
    /// Sends each vertex to its canonical position.
    pub labelling: Perm,
    /// `form[labelling(u), labelling(v)] = color(u, v)`.
    pub form: Vec<u32>,
    pub generators: Vec<Perm>,
    pub order: BigUint,
    pub nodes: u64,
}

struct Search<'a> {
    g: &'a ColoredDigraph,
    budget: u64,
    nodes: u64,
    first: Option<Leaf>,
    best: Option<Leaf>,
    gens: Vec<Perm>,
    orbit_sizes: Vec<usize>,
}

fn lex_prefix_cmp(a: &[u64], b: &[u64]) -> Ordering {
    let k = a.len().min(b.len());
    a[..k].cmp(&b[..k])
}

fn common_prefix(a: &[u32], b: &[u32]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

impl Search<'_> {
    fn orbits_fixing(&self, path: &[u32]) -> Vec<u32> {
        let n = self.g.n();
        let mut parent: Vec<u32> = (0..n as u32).collect();
        fn find(p: &mut [u32], mut x: u32) -> u32 {
            while p[x as usize] != x {
                p[x as usize] = p[p[x as usize] as usize];
                x = p[x as usize];
            }
            x
        }
        for gen in &self.gens {
            if path.iter().all(|&v| gen.apply(v as usize) == v as usize) {
                for x in 0..n {
                    let (a, b) = (find(&mut parent, x as u32), find(&mut parent, gen.apply(x) as u32));
                    if a != b {
                        parent[a.max(b) as usize] = a.min(b);
                    }
                }
            }
        }
        (0..n as u32).map(|x| find(&mut parent, x)).collect()
    }

    fn leaf_matrix(&self, lab: &[u32]) -> Vec<u32> {
        let n = self.g.n();
        let mut m = Vec::with_capacity(n * n);
        for &u in lab {
            let row = self.g.row(u as usize);
            m.extend(lab.iter().map(|&v| row[v as usize]));
        }
        m
    }

    fn automorphism(&mut self, from: &[u32], to: &[u32]) {
        let n = self.g.n();
        let mut images = alloc::vec![0u32; n];
        for (i, &v) in from.iter().enumerate() {
            images[v as usize] = to[i];
        }
        let gamma = Perm::from_raw(images);
        if !gamma.is_identity() && !self.gens.contains(&gamma) {
            self.gens.push(gamma);
        }
    }

    /// `Some(d)` asks the caller to unwind to the node at depth `d`.
    fn dfs(&mut self, part: &Partition, path: &mut Vec<u32>, trace: &mut Vec<u64>) -> Result<Option<usize>> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::BudgetExceeded { budget: self.budget });
        }
        let depth = path.len();
        if let (Some(first), Some(best)) = (&self.first, &self.best) {
            let on_first = first.trace.len() >= trace.len() && first.trace[..trace.len()] == trace[..];
            if !on_first && lex_prefix_cmp(trace, &best.trace) == Ordering::Greater {
                return Ok(None);
            }
        }
        if part.is_discrete() {
            return Ok(self.leaf(part, path, trace));
        }
        let s = part.first_nonsingleton().unwrap();
        let mut members: Vec<u32> = part.lab[s..s + part.len[s] as usize].to_vec();
        members.sort_unstable();
        let mut explored: Vec<u32> = Vec::new();
        let mut orbits: Option<(usize, Vec<u32>)> = None;
        for &w in &members {
            if !explored.is_empty() {
                if orbits.as_ref().is_none_or(|(k, _)| *k != self.gens.len()) {
                    orbits = Some((self.gens.len(), self.orbits_fixing(path)));
                }
                let orb = &orbits.as_ref().unwrap().1;
                if explored.iter().any(|&e| orb[e as usize] == orb[w as usize]) {
                    continue;
                }
            }
            let mut child = part.clone();
            let t = child.individualize(self.g, w);
            path.push(w);
            trace.push(t);
            let r = self.dfs(&child, path, trace);
            path.pop();
            trace.pop();
            explored.push(w);
            if let Some(d) = r? {
                if d < depth {
                    return Ok(Some(d));
                }
            }
        }
        let first_path = &self.first.as_ref().unwrap().path;
        if first_path.len() > depth && first_path[..depth] == path[..] {
            let v = first_path[depth];
            let orb = self.orbits_fixing(path);
            let size = orb.iter().filter(|&&o| o == orb[v as usize]).count();
            self.orbit_sizes[depth] = size;
        }
        Ok(None)
    }

    fn leaf(&mut self, part: &Partition, path: &[u32], trace: &[u64]) -> Option<usize> {
        let matrix = self.leaf_matrix(&part.lab);
        let leaf = Leaf {
            path: path.to_vec(),
            trace: trace.to_vec(),
            lab: part.lab.clone(),
            matrix,
        };
        let Some(first) = &self.first else {
            self.orbit_sizes = alloc::vec![1; path.len()];
            self.best = Some(Leaf {
                path: leaf.path.clone(),
                trace: leaf.trace.clone(),
                lab: leaf.lab.clone(),
                matrix: leaf.matrix.clone(),
            });
            self.first = Some(leaf);
            return None;
        };
        if first.trace == leaf.trace && first.matrix == leaf.matrix {
            let d = common_prefix(path, &first.path);
            let from = first.lab.clone();
            self.automorphism(&from, &leaf.lab);
            return Some(d);
        }
        let best = self.best.as_ref().unwrap();
        let ord = leaf.trace.cmp(&best.trace).then_with(|| leaf.matrix.cmp(&best.matrix));
        match ord {
            Ordering::Equal => {
                let d = common_prefix(path, &best.path);
                let from = best.lab.clone();
                self.automorphism(&from, &leaf.lab);
                Some(d)
            }
            Ordering::Less => {
                self.best = Some(leaf);
                None
            }
            Ordering::Greater => None,
        }
    }
}

/// Runs the search within `budget` tree nodes.
pub fn search(g: &ColoredDigraph, budget: u64) -> Result<SearchOutcome> {
    let n = g.n();
    let (mut part, starts) = Partition::initial(g);
    let t0 = part.refine(g, &starts, fold(0x5a, n as u64));
    let mut s = Search {
        g,
        budget,
        nodes: 0,
        first: None,
        best: None,
        gens: Vec::new(),
        orbit_sizes: Vec::new(),
    };
    let mut path = Vec::new();
    let mut trace = alloc::vec![t0];
    s.dfs(&part, &mut path, &mut trace)?;
    let best = s.best.take().unwrap();
    let mut pos = alloc::vec![0u32; n];
    for (i, &v) in best.lab.iter().enumerate() {
        pos[v as usize] = i as u32;
    }
    let order = s
        .orbit_sizes
        .iter()
        .fold(BigUint::one(), |acc, &k| acc * BigUint::from(k));
    Ok(SearchOutcome {
        labelling: Perm::from_raw(pos),
        form: best.matrix,
        generators: s.gens,
        order,
        nodes: s.nodes,
    })
}
