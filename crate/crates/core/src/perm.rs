//! Permutations of `{0, .., n-1}`.
//!
//! Products are applied **left to right**: `p.compose(&q)` is the map
//! `x -> q(p(x))`, i.e. first `p`, then `q`. Every group-theoretic routine in
//! this crate uses that order. Conjugation follows the same convention:
//! `h.conjugate_by(&a)` is `a^-1 h a`, the permutation that does to `a(x)`
//! what `h` does to `x`.

use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Perm {
    images: Vec<u32>,
}

impl Perm {
    pub fn identity(degree: usize) -> Self {
        Perm {
            images: (0..degree as u32).collect(),
        }
    }

    /// Builds a permutation from its image list, checking bijectivity.
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = alloc::vec![false; n];
        for &x in &images {
            if x >= n || seen[x] {
                return Err(Error::NotAPermutation { degree: n });
            }
            seen[x] = true;
        }
        Ok(Perm {
            images: images.into_iter().map(|x| x as u32).collect(),
        })
    }

    /// Unchecked constructor for internal hot paths. Caller guarantees a bijection.
    pub(crate) fn from_raw(images: Vec<u32>) -> Self {
        debug_assert!(Perm::from_images(images.iter().map(|&x| x as usize).collect()).is_ok());
        Perm { images }
    }

    /// Builds a permutation from disjoint cycles, e.g. `[[0, 1, 2], [3, 4]]`.
    pub fn from_cycles<C: AsRef<[usize]>>(degree: usize, cycles: &[C]) -> Result<Self> {
        let mut images: Vec<usize> = (0..degree).collect();
        let mut touched = alloc::vec![false; degree];
        for cycle in cycles {
            let c = cycle.as_ref();
            for (i, &x) in c.iter().enumerate() {
                if x >= degree {
                    return Err(Error::PointOutOfRange { point: x, degree });
                }
                if touched[x] {
                    return Err(Error::NotAPermutation { degree });
                }
                touched[x] = true;
                images[x] = c[(i + 1) % c.len()];
            }
        }
        Perm::from_images(images)
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.images[x] as usize
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    pub fn image_vec(&self) -> Vec<usize> {
        self.images.iter().map(|&x| x as usize).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    /// `x -> other(self(x))`; fails on degree mismatch.
    pub fn compose(&self, other: &Perm) -> Result<Perm> {
        if self.degree() != other.degree() {
            return Err(Error::DegreeMismatch {
                left: self.degree(),
                right: other.degree(),
            });
        }
        Ok(self.then(other))
    }

    /// Infallible form of [`Perm::compose`]; panics on degree mismatch.
    pub fn then(&self, other: &Perm) -> Perm {
        assert_eq!(self.degree(), other.degree(), "degree mismatch in product");
        Perm {
            images: self.images.iter().map(|&x| other.images[x as usize]).collect(),
        }
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = alloc::vec![0u32; self.degree()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x as usize] = i as u32;
        }
        Perm { images: inv }
    }

    /// `a^-1 self a`.
    pub fn conjugate_by(&self, a: &Perm) -> Perm {
        assert_eq!(self.degree(), a.degree(), "degree mismatch in conjugation");
        let mut out = alloc::vec![0u32; self.degree()];
        for x in 0..self.degree() {
            out[a.apply(x)] = a.images[self.apply(x)];
        }
        Perm { images: out }
    }

    pub fn pow(&self, e: i64) -> Perm {
        let n = self.degree();
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Perm::identity(n);
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.then(&sq);
            }
            sq = sq.then(&sq);
            e >>= 1;
        }
        acc
    }

    pub fn commutes_with(&self, other: &Perm) -> bool {
        self.degree() == other.degree()
            && (0..self.degree()).all(|x| other.apply(self.apply(x)) == self.apply(other.apply(x)))
    }

    /// Non-trivial cycles, each starting at its smallest point, sorted by that point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.degree();
        let mut seen = alloc::vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cycle.push(x);
                x = self.apply(x);
            }
            if cycle.len() > 1 {
                out.push(cycle);
            }
        }
        out
    }

    /// Cycle lengths of all points, fixed points included, sorted.
    pub fn cycle_type(&self) -> Vec<usize> {
        let n = self.degree();
        let mut seen = alloc::vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            let mut len = 0;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                len += 1;
                x = self.apply(x);
            }
            if len > 0 {
                out.push(len);
            }
        }
        out.sort_unstable();
        out
    }

    pub fn order(&self) -> u64 {
        self.cycle_type()
            .into_iter()
            .fold(1u64, |acc, len| lcm(acc, len as u64))
    }

    /// Image of a point set, sorted.
    pub fn image_of_set(&self, set: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = set.iter().map(|&x| self.apply(x)).collect();
        out.sort_unstable();
        out
    }
}

pub(crate) fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub(crate) fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

impl fmt::Display for Perm {
    /// Cycle notation; the identity prints as `()`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return f.write_str("()");
        }
        for c in cycles {
            f.write_str("(")?;
            for (i, x) in c.iter().enumerate() {
                if i > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{x}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm[{}]{}", self.degree(), self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cyc(n: usize, cycles: &[&[usize]]) -> Perm {
        Perm::from_cycles(n, cycles).unwrap()
    }

    #[test]
    fn involution_squares_to_identity() {
        let t = cyc(2, &[&[0, 1]]);
        assert_eq!(t.compose(&t).unwrap(), Perm::identity(2));
    }

    #[test]
    fn three_cycle_inverse() {
        assert_eq!(cyc(3, &[&[0, 1, 2]]).inverse(), cyc(3, &[&[0, 2, 1]]));
    }

    #[test]
    fn product_is_left_to_right() {
        // (0 1 2) first sends 0 to 1, then (0 1) sends 1 back to 0.
        let p = cyc(3, &[&[0, 1, 2]]).compose(&cyc(3, &[&[0, 1]])).unwrap();
        assert_eq!(p.apply(0), 0);
        assert_eq!(p.apply(1), 2);
    }

    #[test]
    fn mismatched_degrees_are_rejected() {
        let err = Perm::identity(2).compose(&Perm::identity(3)).unwrap_err();
        assert_eq!(err, Error::DegreeMismatch { left: 2, right: 3 });
    }

    #[test]
    fn bad_images_are_rejected() {
        assert!(Perm::from_images(alloc::vec![0, 0]).is_err());
        assert!(Perm::from_images(alloc::vec![0, 2]).is_err());
        assert!(Perm::from_cycles(3, &[&[0, 1], &[1, 2]]).is_err());
    }

    #[test]
    fn conjugation_relabels_points() {
        let h = cyc(4, &[&[0, 1]]);
        let a = cyc(4, &[&[1, 2]]);
        assert_eq!(h.conjugate_by(&a), cyc(4, &[&[0, 2]]));
        // a^-1 h a with the left-to-right product
        assert_eq!(a.inverse().then(&h).then(&a), h.conjugate_by(&a));
    }

    #[test]
    fn display_and_order() {
        let p = cyc(6, &[&[3, 4], &[0, 1, 2]]);
        assert_eq!(alloc::format!("{p}"), "(0 1 2)(3 4)");
        assert_eq!(p.order(), 6);
        assert_eq!(alloc::format!("{}", Perm::identity(3)), "()");
        assert_eq!(p.pow(6), Perm::identity(6));
        assert_eq!(p.pow(-1), p.inverse());
    }

    fn arb_perm(n: usize) -> impl Strategy<Value = Perm> {
        Just((0..n).collect::<Vec<usize>>())
            .prop_shuffle()
            .prop_map(|v| Perm::from_images(v).unwrap())
    }

    fn arb_pair() -> impl Strategy<Value = (Perm, Perm)> {
        (1usize..12).prop_flat_map(|n| (arb_perm(n), arb_perm(n)))
    }

    proptest! {
        #[test]
        fn inverse_laws((p, q) in arb_pair()) {
            let n = p.degree();
            prop_assert_eq!(p.then(&p.inverse()), Perm::identity(n));
            prop_assert_eq!(p.then(&q).inverse(), q.inverse().then(&p.inverse()));
        }

        #[test]
        fn conjugation_is_a_homomorphism((p, q) in arb_pair(), k in 0i64..5) {
            prop_assert_eq!(p.pow(k).conjugate_by(&q), p.conjugate_by(&q).pow(k));
        }
    }
}
