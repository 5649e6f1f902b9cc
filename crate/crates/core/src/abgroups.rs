//! Finite abelian groups given as products of cyclic factors.
//!
//! Elements are indexed in mixed radix with factor 0 most significant, so in
//! `Z_2 x Z_2 x Z_2 x Z_q` the element `(a, b, c; x)` has index
//! `((a * 2 + b) * 2 + c) * q + x`.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::group::PermGroup;
use crate::perm::{gcd, lcm, Perm};

/// `Z_{f_0} x ... x Z_{f_{k-1}}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupSpec {
    factors: Vec<usize>,
}

impl GroupSpec {
    pub fn new(factors: Vec<usize>) -> Result<Self> {
        if factors.is_empty() || factors.iter().any(|&f| f < 2) {
            return Err(Error::UnsupportedShape(alloc::format!("factor orders {factors:?}")));
        }
        if factors.iter().try_fold(1usize, |acc, &f| acc.checked_mul(f)).is_none() {
            return Err(Error::UnsupportedShape("order overflows".into()));
        }
        Ok(GroupSpec { factors })
    }

    pub fn cyclic(n: usize) -> Result<Self> {
        GroupSpec::new(alloc::vec![n])
    }

    /// `Z_p^3 x Z_q`.
    pub fn p3q(p: usize, q: usize) -> Result<Self> {
        GroupSpec::new(alloc::vec![p, p, p, q])
    }

    pub fn factors(&self) -> &[usize] {
        &self.factors
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn order(&self) -> usize {
        self.factors.iter().product()
    }

    pub fn to_vector(&self, mut index: usize) -> Vec<usize> {
        let mut v = alloc::vec![0; self.factors.len()];
        for (slot, &f) in v.iter_mut().zip(&self.factors).rev() {
            *slot = index % f;
            index /= f;
        }
        v
    }

    pub fn from_vector(&self, v: &[usize]) -> usize {
        v.iter().zip(&self.factors).fold(0, |acc, (&x, &f)| acc * f + x % f)
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        let (va, vb) = (self.to_vector(a), self.to_vector(b));
        let sum: Vec<usize> = va.iter().zip(&vb).map(|(x, y)| x + y).collect();
        self.from_vector(&sum)
    }

    pub fn neg(&self, a: usize) -> usize {
        let v: Vec<usize> = self
            .to_vector(a)
            .iter()
            .zip(&self.factors)
            .map(|(&x, &f)| (f - x) % f)
            .collect();
        self.from_vector(&v)
    }

    pub fn sub(&self, a: usize, b: usize) -> usize {
        self.add(a, self.neg(b))
    }

    /// `k * a`.
    pub fn scale(&self, a: usize, k: usize) -> usize {
        let v: Vec<usize> = self
            .to_vector(a)
            .iter()
            .zip(&self.factors)
            .map(|(&x, &f)| (x * (k % f)) % f)
            .collect();
        self.from_vector(&v)
    }

    pub fn element_order(&self, a: usize) -> usize {
        self.to_vector(a).iter().zip(&self.factors).fold(1, |acc, (&x, &f)| {
            lcm(acc as u64, (f / gcd(f as u64, x as u64) as usize) as u64) as usize
        })
    }

    /// Index of the `k`-th standard generator.
    pub fn basis_element(&self, k: usize) -> usize {
        let mut v = alloc::vec![0; self.factors.len()];
        v[k] = 1;
        self.from_vector(&v)
    }

    /// Invariant factors `d_1 | d_2 | ... | d_r`.
    pub fn invariant_factors(&self) -> Vec<usize> {
        invariant_factors_of(&self.factors)
    }

    /// Translation `x -> x + g`.
    pub fn translation(&self, g: usize) -> Perm {
        let images = (0..self.order()).map(|x| self.add(x, g)).collect();
        Perm::from_images(images).unwrap()
    }

    /// The regular representation: one translation per cyclic factor.
    pub fn regular_rep(&self) -> PermGroup {
        let gens = (0..self.rank())
            .map(|k| self.translation(self.basis_element(k)))
            .collect();
        PermGroup::with_order(self.order(), gens, &num_bigint::BigUint::from(self.order())).unwrap()
    }
}

impl fmt::Display for GroupSpec {
    /// Compact form such as `Z2^3xZ11`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut i = 0;
        let mut first = true;
        while i < self.factors.len() {
            let mut j = i;
            while j < self.factors.len() && self.factors[j] == self.factors[i] {
                j += 1;
            }
            if !first {
                f.write_str("x")?;
            }
            first = false;
            write!(f, "Z{}", self.factors[i])?;
            if j - i > 1 {
                write!(f, "^{}", j - i)?;
            }
            i = j;
        }
        Ok(())
    }
}

fn prime_powers(mut n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut pk = 1;
            while n.is_multiple_of(p) {
                n /= p;
                pk *= p;
            }
            out.push((p, pk));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, n));
    }
    out
}

/// Invariant factors of a product of cyclic groups of the given orders.
pub fn invariant_factors_of(orders: &[usize]) -> Vec<usize> {
    let mut by_prime: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &n in orders {
        for (p, pk) in prime_powers(n) {
            by_prime.entry(p).or_default().push(pk);
        }
    }
    let len = by_prime.values().map(Vec::len).max().unwrap_or(0);
    let mut out = alloc::vec![1usize; len];
    for powers in by_prime.values_mut() {
        powers.sort_unstable();
        let offset = len - powers.len();
        for (i, &pk) in powers.iter().enumerate() {
            out[offset + i] *= pk;
        }
    }
    out
}

fn partitions(k: usize, max: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if k == 0 {
        out.push(prefix.clone());
        return;
    }
    for part in (1..=k.min(max)).rev() {
        prefix.push(part);
        partitions(k - part, part, prefix, out);
        prefix.pop();
    }
}

/// Every abelian group of order `n`, as invariant factors.
pub fn abelian_types(n: usize) -> Vec<GroupSpec> {
    let mut combos: Vec<Vec<usize>> = alloc::vec![Vec::new()];
    for (p, pk) in prime_powers(n) {
        let k = (1..).find(|&e| p.pow(e) == pk).unwrap() as usize;
        let mut parts = Vec::new();
        partitions(k, k, &mut Vec::new(), &mut parts);
        combos = combos
            .iter()
            .flat_map(|c| {
                parts.iter().map(move |part| {
                    let mut c = c.clone();
                    c.extend(part.iter().map(|&e| p.pow(e as u32)));
                    c
                })
            })
            .collect();
    }
    let mut out: Vec<GroupSpec> = combos
        .iter()
        .map(|c| GroupSpec::new(invariant_factors_of(c)).expect("valid factors"))
        .collect();
    out.sort_by(|a, b| a.factors().cmp(b.factors()));
    out
}

/// An automorphism of a [`GroupSpec`], stored as a permutation of element indices.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupAut {
    perm: Perm,
}

impl GroupAut {
    /// Checks that `perm` fixes 0 and preserves addition.
    pub fn new(spec: &GroupSpec, perm: Perm) -> Result<Self> {
        let n = spec.order();
        if perm.degree() != n || perm.apply(0) != 0 {
            return Err(Error::Invalid("not an automorphism".into()));
        }
        for x in 0..n {
            for y in 0..n {
                if perm.apply(spec.add(x, y)) != spec.add(perm.apply(x), perm.apply(y)) {
                    return Err(Error::Invalid("not an automorphism".into()));
                }
            }
        }
        Ok(GroupAut { perm })
    }

    /// Determined by the images of the standard generators; fails unless bijective.
    pub fn from_basis_images(spec: &GroupSpec, images: &[usize]) -> Result<Self> {
        let n = spec.order();
        if images.len() != spec.rank() {
            return Err(Error::Invalid("one image per factor expected".into()));
        }
        for (k, &img) in images.iter().enumerate() {
            if img >= n || !spec.factors()[k].is_multiple_of(spec.element_order(img)) {
                return Err(Error::Invalid("image order must divide the factor order".into()));
            }
        }
        let map: Vec<usize> = (0..n)
            .map(|x| {
                spec.to_vector(x)
                    .iter()
                    .zip(images)
                    .fold(0, |acc, (&c, &img)| spec.add(acc, spec.scale(img, c)))
            })
            .collect();
        let perm = Perm::from_images(map).map_err(|_| Error::Invalid("basis images are dependent".into()))?;
        Ok(GroupAut { perm })
    }

    pub fn apply(&self, x: usize) -> usize {
        self.perm.apply(x)
    }

    pub fn perm(&self) -> &Perm {
        &self.perm
    }

    /// Image of a set of elements, sorted.
    pub fn image_of_set(&self, set: &[usize]) -> Vec<usize> {
        self.perm.image_of_set(set)
    }
}

/// Upper bound on candidate basis-image tuples examined by [`aut_group`].
pub const AUT_SEARCH_LIMIT: u64 = 50_000_000;

/// `Aut(G)`, sorted, identity first. Fails with an over-cap signal beyond `cap`
/// automorphisms and an unsupported-shape signal when the candidate space is
/// too large to search.
pub fn aut_group(spec: &GroupSpec, cap: usize) -> Result<Vec<GroupAut>> {
    let n = spec.order();
    let candidates: Vec<Vec<usize>> = spec
        .factors()
        .iter()
        .map(|&f| (0..n).filter(|&x| f % spec.element_order(x) == 0).collect())
        .collect();
    let space = candidates
        .iter()
        .try_fold(1u64, |acc, c| acc.checked_mul(c.len() as u64))
        .unwrap_or(u64::MAX);
    if space > AUT_SEARCH_LIMIT {
        return Err(Error::UnsupportedShape(alloc::format!(
            "{spec} has too many candidate bases"
        )));
    }
    let mut out = Vec::new();
    let mut chosen = Vec::with_capacity(spec.rank());
    let mut span = alloc::vec![0usize];
    collect_bases(spec, &candidates, &mut chosen, &mut span, &mut |imgs| {
        out.push(GroupAut::from_basis_images(spec, imgs).unwrap());
        if out.len() > cap {
            return false;
        }
        true
    });
    if out.len() > cap {
        return Err(Error::OverCap { cap });
    }
    out.sort();
    Ok(out)
}

/// Depth-first search over independent basis images; `span` holds the
/// subgroup generated so far, which must grow by the full factor order.
fn collect_bases<F: FnMut(&[usize]) -> bool>(
    spec: &GroupSpec,
    candidates: &[Vec<usize>],
    chosen: &mut Vec<usize>,
    span: &mut Vec<usize>,
    visit: &mut F,
) -> bool {
    let k = chosen.len();
    if k == candidates.len() {
        return visit(chosen);
    }
    let f = spec.factors()[k];
    let n = spec.order();
    for &c in &candidates[k] {
        let mut seen = alloc::vec![false; n];
        for &s in span.iter() {
            seen[s] = true;
        }
        let mut next = span.clone();
        let mut ok = true;
        'grow: for j in 1..f {
            let shift = spec.scale(c, j);
            for &s in span.iter() {
                let y = spec.add(s, shift);
                if seen[y] {
                    ok = false;
                    break 'grow;
                }
                seen[y] = true;
                next.push(y);
            }
        }
        if !ok {
            continue;
        }
        chosen.push(c);
        let old = core::mem::replace(span, next);
        let go_on = collect_bases(spec, candidates, chosen, span, visit);
        *span = old;
        chosen.pop();
        if !go_on {
            return false;
        }
    }
    true
}

/// A regular abelian permutation group with its elements indexed by the
/// point they send 0 to.
#[derive(Clone, Debug)]
pub struct RegularTable {
    elements: Vec<Perm>,
}

impl RegularTable {
    pub fn new(h: &PermGroup) -> Result<Self> {
        let report = h.regularity_report();
        if !report.regular || !report.abelian {
            return Err(Error::NotRegularAbelian);
        }
        let n = h.degree();
        let mut elements: Vec<Option<Perm>> = alloc::vec![None; n];
        h.chain().for_each_element(|g| {
            elements[g.apply(0)] = Some(g.clone());
            true
        });
        Ok(RegularTable {
            elements: elements.into_iter().map(Option::unwrap).collect(),
        })
    }

    pub fn degree(&self) -> usize {
        self.elements.len()
    }

    /// The element sending 0 to `x`.
    pub fn element(&self, x: usize) -> &Perm {
        &self.elements[x]
    }

    /// Point label of the product of the elements labelled `x` and `y`.
    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.elements[y].apply(x)
    }

    pub fn element_order(&self, x: usize) -> usize {
        self.elements[x].order() as usize
    }

    /// Invariant factors, read off from element-order counts.
    pub fn iso_type(&self) -> Vec<usize> {
        let n = self.degree();
        let mut exps: Vec<usize> = Vec::new();
        for (p, pk) in prime_powers(n) {
            // p^{sum_i min(e_i, j)} elements have order dividing p^j
            let mut counts = Vec::new();
            let mut pj = 1;
            while pj < pk {
                pj *= p;
                let c = (0..n).filter(|&x| pj % self.element_order(x) == 0).count();
                counts.push(log_p(c, p));
            }
            let mut prev = 0;
            let mut at_least = Vec::new();
            for &c in &counts {
                at_least.push(c - prev);
                prev = c;
            }
            // at_least[j] = number of cyclic p-factors of exponent > j
            for j in 0..at_least.len() {
                let next = at_least.get(j + 1).copied().unwrap_or(0);
                for _ in 0..at_least[j] - next {
                    exps.push(p.pow(j as u32 + 1));
                }
            }
        }
        invariant_factors_of(&exps)
    }

    /// Images of the standard generators of `spec` under an isomorphism
    /// `spec -> H`, first in point order; `None` when `H` is not of that type.
    pub fn basis_for(&self, spec: &GroupSpec) -> Option<Vec<usize>> {
        let mut found = None;
        self.for_each_basis(spec, |b| {
            found = Some(b.to_vec());
            false
        });
        found
    }

    /// Visits every tuple of points whose elements form a basis of type `spec`.
    pub fn for_each_basis<F: FnMut(&[usize]) -> bool>(&self, spec: &GroupSpec, mut visit: F) {
        if spec.order() != self.degree() {
            return;
        }
        let candidates: Vec<Vec<usize>> = spec
            .factors()
            .iter()
            .map(|&f| (0..self.degree()).filter(|&x| f % self.element_order(x) == 0).collect())
            .collect();
        let mut chosen = Vec::new();
        let mut span = alloc::vec![0usize];
        self.bases_rec(spec, &candidates, &mut chosen, &mut span, &mut visit);
    }

    fn bases_rec<F: FnMut(&[usize]) -> bool>(
        &self,
        spec: &GroupSpec,
        candidates: &[Vec<usize>],
        chosen: &mut Vec<usize>,
        span: &mut Vec<usize>,
        visit: &mut F,
    ) -> bool {
        let k = chosen.len();
        if k == candidates.len() {
            return visit(chosen);
        }
        let f = spec.factors()[k];
        for &c in &candidates[k] {
            let mut seen = alloc::vec![false; self.degree()];
            for &s in span.iter() {
                seen[s] = true;
            }
            let mut next = span.clone();
            let mut layer = span.clone();
            let mut ok = true;
            'grow: for _ in 1..f {
                for s in layer.iter_mut() {
                    *s = self.mul(*s, c);
                    if seen[*s] {
                        ok = false;
                        break 'grow;
                    }
                    seen[*s] = true;
                    next.push(*s);
                }
            }
            if !ok {
                continue;
            }
            chosen.push(c);
            let old = core::mem::replace(span, next);
            let go_on = self.bases_rec(spec, candidates, chosen, span, visit);
            *span = old;
            chosen.pop();
            if !go_on {
                return false;
            }
        }
        true
    }

    /// The point map `v -> prod_k basis_k^{v_k}(0)`; conjugating the regular
    /// representation of `spec` by it gives `H`.
    pub fn labelling(&self, spec: &GroupSpec, basis: &[usize]) -> Perm {
        let images = (0..spec.order())
            .map(|v| {
                spec.to_vector(v)
                    .iter()
                    .zip(basis)
                    .fold(0, |acc, (&c, &b)| (0..c).fold(acc, |a, _| self.mul(a, b)))
            })
            .collect();
        Perm::from_images(images).unwrap()
    }
}

fn log_p(mut c: usize, p: usize) -> usize {
    let mut e = 0;
    while c > 1 {
        c /= p;
        e += 1;
    }
    e
}

/// Invariant factors of a regular abelian group.
pub fn abelian_iso_type(h: &PermGroup) -> Result<Vec<usize>> {
    Ok(RegularTable::new(h)?.iso_type())
}

/// A connection set rendered as `{a,b,...}` in index form.
pub fn format_set(set: &[usize]) -> String {
    let mut s = String::from("{");
    for (i, x) in set.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        s.push_str(&alloc::format!("{x}"));
    }
    s.push('}');
    s
}
