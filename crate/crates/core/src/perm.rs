//! Permutations, cycle sequences, and cycle classes.
//!
//! Conventions used across the crate:
//!
//! - Permutations act on `{1, ..., n}` and all public indexing is 1-based.
//! - Composition is right-to-left: `p.compose(&q)` maps `i` to `p(q(i))`.
//! - Canonical cycle form rotates each cycle to start at its largest element
//!   and (when formatting) orders cycles by largest element descending, so
//!   the split maximizer on six points prints as `(6 5 4)(3 2 1)`.
//! - Degree 0 (the empty permutation) is allowed everywhere.

use std::collections::BTreeSet;
use std::fmt;

use crate::{Error, Result};

/// A permutation of `{1, ..., n}`, stored as its image table.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    /// `image[i]` is the image of `i + 1`; values are 1-based.
    image: Vec<u32>,
}

impl Permutation {
    /// The identity on `{1, ..., n}`.
    pub fn identity(n: usize) -> Self {
        Permutation {
            image: (1..=n as u32).collect(),
        }
    }

    /// The permutation of degree 0.
    pub fn empty() -> Self {
        Permutation { image: Vec::new() }
    }

    /// Builds a permutation from its 1-based image table, validating that it
    /// is a bijection of `{1, ..., n}`.
    pub fn from_images(image: Vec<u32>) -> Result<Self> {
        let n = image.len();
        let mut seen = vec![false; n];
        for &v in &image {
            if v == 0 || v as usize > n {
                return Err(Error::OutOfRange {
                    element: v,
                    degree: n,
                });
            }
            if seen[v as usize - 1] {
                return Err(Error::DuplicateElement(v));
            }
            seen[v as usize - 1] = true;
        }
        Ok(Permutation { image })
    }

    /// Builds a permutation of degree `n` from disjoint cycles.
    pub fn from_cycles(cycles: &[Vec<u32>], n: usize) -> Result<Self> {
        let mut image: Vec<u32> = (1..=n as u32).collect();
        let mut used = vec![false; n];
        for cycle in cycles {
            for &v in cycle {
                if v == 0 || v as usize > n {
                    return Err(Error::OutOfRange {
                        element: v,
                        degree: n,
                    });
                }
                if used[v as usize - 1] {
                    return Err(Error::DuplicateElement(v));
                }
                used[v as usize - 1] = true;
            }
            for (i, &v) in cycle.iter().enumerate() {
                let next = cycle[(i + 1) % cycle.len()];
                image[v as usize - 1] = next;
            }
        }
        Ok(Permutation { image })
    }

    /// Parses cycle notation such as `"(6 4 5)(3 2 1)"`.
    ///
    /// Whitespace between tokens is free, `"()"` and the empty string denote
    /// the identity, and cycles must be disjoint. When `n` is given it fixes
    /// the degree (elements beyond it are rejected); otherwise the degree is
    /// the largest element mentioned.
    pub fn parse_cycles(text: &str, n: Option<usize>) -> Result<Self> {
        let mut cycles: Vec<Vec<u32>> = Vec::new();
        let mut chars = text.chars().peekable();
        loop {
            while matches!(chars.peek(), Some(c) if c.is_whitespace()) {
                chars.next();
            }
            match chars.next() {
                None => break,
                Some('(') => {
                    let mut cycle = Vec::new();
                    let mut digits = String::new();
                    loop {
                        match chars.next() {
                            Some(c) if c.is_ascii_digit() => digits.push(c),
                            Some(c) if c.is_whitespace() => {
                                if !digits.is_empty() {
                                    cycle.push(parse_element(&digits)?);
                                    digits.clear();
                                }
                            }
                            Some(')') => {
                                if !digits.is_empty() {
                                    cycle.push(parse_element(&digits)?);
                                }
                                break;
                            }
                            Some(c) => {
                                return Err(Error::Parse(format!(
                                    "unexpected character {c:?} inside cycle"
                                )))
                            }
                            None => return Err(Error::Parse("unclosed cycle".into())),
                        }
                    }
                    if !cycle.is_empty() {
                        cycles.push(cycle);
                    }
                }
                Some(c) => {
                    return Err(Error::Parse(format!(
                        "expected '(' to open a cycle, found {c:?}"
                    )))
                }
            }
        }
        let max = cycles
            .iter()
            .flat_map(|c| c.iter().copied())
            .max()
            .unwrap_or(0) as usize;
        let degree = match n {
            Some(n) => n,
            None => max,
        };
        if max > degree {
            return Err(Error::OutOfRange {
                element: max as u32,
                degree,
            });
        }
        Permutation::from_cycles(&cycles, degree)
    }

    /// Degree `n` of the ground set.
    pub fn degree(&self) -> usize {
        self.image.len()
    }

    /// Image of `i` (1-based).
    pub fn apply(&self, i: u32) -> u32 {
        self.image[i as usize - 1]
    }

    /// The 1-based image table.
    pub fn images(&self) -> &[u32] {
        &self.image
    }

    /// Inverse permutation.
    pub fn inverse(&self) -> Self {
        let mut image = vec![0u32; self.image.len()];
        for (i, &v) in self.image.iter().enumerate() {
            image[v as usize - 1] = i as u32 + 1;
        }
        Permutation { image }
    }

    /// Composition `self ∘ other`: first `other`, then `self`.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.degree(), other.degree(), "degree mismatch");
        let image = other.image.iter().map(|&v| self.apply(v)).collect();
        Permutation { image }
    }

    /// Number of fixed points.
    pub fn fixed_points(&self) -> usize {
        self.image
            .iter()
            .enumerate()
            .filter(|&(i, &v)| v as usize == i + 1)
            .count()
    }

    /// Whether this is the identity of its degree.
    pub fn is_identity(&self) -> bool {
        self.image
            .iter()
            .enumerate()
            .all(|(i, &v)| v as usize == i + 1)
    }

    /// Disjoint cycles, each rotated to start at its largest element, listed
    /// by smallest contained element ascending. Fixed points appear as
    /// 1-cycles.
    pub fn cycle_decomposition(&self) -> Vec<CycleSeq> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut cycles = Vec::new();
        for start in 1..=n as u32 {
            if seen[start as usize - 1] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut v = start;
            while !seen[v as usize - 1] {
                seen[v as usize - 1] = true;
                cycle.push(v);
                v = self.apply(v);
            }
            cycles.push(CycleSeq::new(cycle).expect("orbit elements are distinct"));
        }
        cycles.iter_mut().for_each(|c| c.rotate_to_max());
        cycles
    }

    /// The multiset of cycle lengths.
    pub fn cycle_class(&self) -> PartitionClass {
        PartitionClass::new(
            self.cycle_decomposition()
                .iter()
                .map(|c| c.len())
                .collect(),
        )
    }

    /// Places `other` on the letters above `self`: blocks act independently,
    /// `self` on `{1, ..., n}` and `other` shifted onto `{n+1, ..., n+m}`.
    pub fn concat(&self, other: &Self) -> Self {
        let n = self.degree() as u32;
        let mut image = self.image.clone();
        image.extend(other.image.iter().map(|&v| v + n));
        Permutation { image }
    }

    /// The order-reversing involution `i ↦ n + 1 - i`.
    pub fn order_reversal(n: usize) -> Self {
        Permutation {
            image: (1..=n as u32).rev().collect(),
        }
    }

    /// Conjugate of the inverse by the order reversal. This preserves the
    /// multiplicity of a permutation under the exchange shuffle.
    pub fn flip(&self) -> Self {
        let n = self.degree();
        let sigma = Self::order_reversal(n);
        sigma.compose(&self.inverse()).compose(&sigma)
    }
}

impl fmt::Display for Permutation {
    /// Canonical cycle notation: nontrivial cycles only, each starting at its
    /// largest element, ordered by largest element descending; the identity
    /// prints as `()`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut cycles: Vec<CycleSeq> = self
            .cycle_decomposition()
            .into_iter()
            .filter(|c| c.len() > 1)
            .collect();
        cycles.sort_by_key(|c| std::cmp::Reverse(c.max()));
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for cycle in cycles {
            write!(f, "{cycle}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} deg {}", self.degree())
    }
}

fn parse_element(digits: &str) -> Result<u32> {
    let v: u32 = digits
        .parse()
        .map_err(|_| Error::Parse(format!("invalid integer {digits:?}")))?;
    if v == 0 {
        return Err(Error::Parse("cycle elements must be positive".into()));
    }
    Ok(v)
}

/// A cycle written as a linear sequence of distinct positive integers.
///
/// The sequence `(5 2 7)` denotes the cyclic map 5 → 2 → 7 → 5. Linear
/// structure matters for split sums, so equality is positional; use
/// [`CycleSeq::cycle_eq`] for rotation-insensitive comparison.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CycleSeq {
    elements: Vec<u32>,
}

impl CycleSeq {
    /// Validates non-emptiness, positivity, and distinctness.
    pub fn new(elements: Vec<u32>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::Parse("empty cycle sequence".into()));
        }
        let mut seen = BTreeSet::new();
        for &v in &elements {
            if v == 0 {
                return Err(Error::Parse("cycle elements must be positive".into()));
            }
            if !seen.insert(v) {
                return Err(Error::DuplicateElement(v));
            }
        }
        Ok(CycleSeq { elements })
    }

    pub fn elements(&self) -> &[u32] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// First element of the written sequence.
    pub fn first(&self) -> u32 {
        self.elements[0]
    }

    /// Last element of the written sequence.
    pub fn last(&self) -> u32 {
        *self.elements.last().unwrap()
    }

    /// Smallest element.
    pub fn min(&self) -> u32 {
        *self.elements.iter().min().unwrap()
    }

    /// Largest element.
    pub fn max(&self) -> u32 {
        *self.elements.iter().max().unwrap()
    }

    /// Elements in ascending order.
    pub fn support(&self) -> Vec<u32> {
        let mut s = self.elements.clone();
        s.sort_unstable();
        s
    }

    /// The inverse cycle, written by reversing the sequence.
    pub fn reversed(&self) -> Self {
        CycleSeq {
            elements: self.elements.iter().rev().copied().collect(),
        }
    }

    /// Applies the order reversal `v ↦ n + 1 - v` elementwise.
    pub fn order_reversed(&self, n: usize) -> Result<Self> {
        if self.max() as usize > n {
            return Err(Error::OutOfRange {
                element: self.max(),
                degree: n,
            });
        }
        Ok(CycleSeq {
            elements: self.elements.iter().map(|&v| n as u32 + 1 - v).collect(),
        })
    }

    /// Rotates in place so the largest element is written first.
    pub fn rotate_to_max(&mut self) {
        let top = *self.elements.iter().max().unwrap();
        let pos = self.elements.iter().position(|&v| v == top).unwrap();
        self.elements.rotate_left(pos);
    }

    /// Rotates in place so the smallest element is written last.
    pub fn rotate_min_to_end(&mut self) {
        let low = *self.elements.iter().min().unwrap();
        let pos = self.elements.iter().position(|&v| v == low).unwrap();
        let shift = (pos + 1) % self.elements.len();
        self.elements.rotate_left(shift);
    }

    /// The same cycle rotated to start at its largest element.
    pub fn canonical(&self) -> Self {
        let mut c = self.clone();
        c.rotate_to_max();
        c
    }

    /// Whether `self` and `other` denote the same cyclic map.
    pub fn cycle_eq(&self, other: &Self) -> bool {
        self.len() == other.len() && self.canonical() == other.canonical()
    }

    /// Embeds the cycle into a permutation of degree `n` (other points fixed).
    pub fn to_permutation(&self, n: usize) -> Result<Permutation> {
        Permutation::from_cycles(std::slice::from_ref(&self.elements), n)
    }
}

impl fmt::Display for CycleSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.elements.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for CycleSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A cycle class: the multiset of cycle lengths, kept sorted descending.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartitionClass {
    lengths: Vec<usize>,
}

impl PartitionClass {
    /// Sorts the lengths descending; zero lengths are rejected by debug
    /// assertion since no cycle is empty.
    pub fn new(mut lengths: Vec<usize>) -> Self {
        debug_assert!(lengths.iter().all(|&l| l > 0));
        lengths.sort_unstable_by(|a, b| b.cmp(a));
        PartitionClass { lengths }
    }

    /// Lengths in descending order.
    pub fn lengths(&self) -> &[usize] {
        &self.lengths
    }

    /// Total weight (the degree of any permutation in the class).
    pub fn n(&self) -> usize {
        self.lengths.iter().sum()
    }

    /// Number of cycles.
    pub fn parts(&self) -> usize {
        self.lengths.len()
    }

    /// Distinct lengths (descending) with their multiplicities.
    pub fn grouped(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = Vec::new();
        for &l in &self.lengths {
            match out.last_mut() {
                Some((len, mult)) if *len == l => *mult += 1,
                _ => out.push((l, 1)),
            }
        }
        out
    }
}

impl fmt::Display for PartitionClass {
    /// Lengths joined by `+`, e.g. `9+8` or `2+1+1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.lengths.iter().enumerate() {
            if i > 0 {
                write!(f, "+")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for PartitionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// All partitions of `n`, each with parts descending, enumerated in
/// lexicographically descending order: `(n)` first, `(1, ..., 1)` last.
pub fn partitions(n: usize) -> Vec<PartitionClass> {
    let mut out = Vec::new();
    let mut prefix = Vec::new();
    fn helper(rest: usize, max: usize, prefix: &mut Vec<usize>, out: &mut Vec<PartitionClass>) {
        if rest == 0 {
            out.push(PartitionClass {
                lengths: prefix.clone(),
            });
            return;
        }
        for part in (1..=rest.min(max)).rev() {
            prefix.push(part);
            helper(rest - part, part, prefix, out);
            prefix.pop();
        }
    }
    helper(n, n, &mut prefix, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parse_and_apply() {
        let p = Permutation::parse_cycles("(2 1)", Some(3)).unwrap();
        assert_eq!(p.images(), &[2, 1, 3]);
        let q = Permutation::parse_cycles("(1 3)(2)", None).unwrap();
        assert_eq!(q.images(), &[3, 2, 1]);
        assert!(Permutation::parse_cycles("(1 1)", None).is_err());
        assert!(Permutation::parse_cycles("(1 2)(2 3)", None).is_err());
        assert!(Permutation::parse_cycles("(0 1)", None).is_err());
        assert!(Permutation::parse_cycles("(4)", Some(3)).is_err());
        assert!(Permutation::parse_cycles("(1 2", None).is_err());
        assert!(Permutation::parse_cycles("1 2", None).is_err());
        assert_eq!(
            Permutation::parse_cycles("", Some(4)).unwrap(),
            Permutation::identity(4)
        );
        assert_eq!(
            Permutation::parse_cycles("()", Some(2)).unwrap(),
            Permutation::identity(2)
        );
    }

    #[test]
    fn decomposition_examples() {
        let p = Permutation::from_images(vec![3, 1, 2, 5, 6, 4]).unwrap();
        let cycles = p.cycle_decomposition();
        assert_eq!(cycles.len(), 2);
        assert_eq!(cycles[0].elements(), &[3, 2, 1]);
        assert_eq!(cycles[1].elements(), &[6, 4, 5]);
        assert_eq!(p.cycle_class(), PartitionClass::new(vec![3, 3]));

        let q = Permutation::from_images(vec![2, 1, 3]).unwrap();
        let cycles = q.cycle_decomposition();
        assert_eq!(cycles[0].elements(), &[2, 1]);
        assert_eq!(cycles[1].elements(), &[3]);

        let id = Permutation::identity(3);
        assert_eq!(id.cycle_decomposition().len(), 3);
        assert_eq!(id.cycle_class(), PartitionClass::new(vec![1, 1, 1]));
    }

    #[test]
    fn display_canonical_form() {
        let p = Permutation::parse_cycles("(4 3)(2 1)", None).unwrap();
        assert_eq!(p.to_string(), "(4 3)(2 1)");
        let q = Permutation::from_images(vec![3, 1, 2, 5, 6, 4]).unwrap();
        assert_eq!(q.to_string(), "(6 4 5)(3 2 1)");
        assert_eq!(Permutation::identity(5).to_string(), "()");
        // Round trip through the canonical form.
        let r = Permutation::parse_cycles(&q.to_string(), Some(6)).unwrap();
        assert_eq!(r, q);
    }

    #[test]
    fn concat_acts_blockwise() {
        let p = Permutation::parse_cycles("(2 1)", Some(2)).unwrap();
        let q = Permutation::parse_cycles("(3 1 2)", Some(3)).unwrap();
        let pq = p.concat(&q);
        assert_eq!(pq.images(), &[2, 1, 4, 5, 3]);
        assert_eq!(Permutation::empty().concat(&p), p);
        assert_eq!(p.concat(&Permutation::empty()), p);
    }

    #[test]
    fn flip_of_left_cycle_is_itself() {
        // flip of (3 2 1) on three points is (3 2 1) again.
        let p = Permutation::parse_cycles("(3 2 1)", Some(3)).unwrap();
        assert_eq!(p.flip(), p);
        // flip exchanges (2 1)(3) and (3 2)(1) on three points: conjugation by
        // the order reversal sends the transposition {1,2} to {2,3}.
        let q = Permutation::parse_cycles("(2 1)", Some(3)).unwrap();
        assert_eq!(q.flip().to_string(), "(3 2)");
    }

    #[test]
    fn cycle_seq_basics() {
        let c = CycleSeq::new(vec![5, 2, 7]).unwrap();
        assert_eq!(c.first(), 5);
        assert_eq!(c.last(), 7);
        assert_eq!(c.canonical().elements(), &[7, 5, 2]);
        assert!(c.cycle_eq(&CycleSeq::new(vec![2, 7, 5]).unwrap()));
        assert!(!c.cycle_eq(&CycleSeq::new(vec![2, 5, 7]).unwrap()));
        assert_eq!(c.reversed().elements(), &[7, 2, 5]);
        assert_eq!(c.to_string(), "(5 2 7)");
        let mut d = c.clone();
        d.rotate_min_to_end();
        assert_eq!(d.elements(), &[7, 5, 2]);
        assert!(CycleSeq::new(vec![]).is_err());
        assert!(CycleSeq::new(vec![1, 1]).is_err());
    }

    #[test]
    fn partition_enumeration() {
        let parts = partitions(4);
        let shown: Vec<String> = parts.iter().map(|p| p.to_string()).collect();
        assert_eq!(shown, ["4", "3+1", "2+2", "2+1+1", "1+1+1+1"]);
        assert_eq!(partitions(0).len(), 1);

        // Independent count of partitions by the classic two-variable
        // recurrence: ways(n, k) = partitions of n into parts of size <= k.
        fn ways(n: usize) -> u64 {
            let mut table = vec![vec![0u64; n + 1]; n + 1];
            table[0].fill(1);
            for m in 1..=n {
                for k in 1..=n {
                    table[m][k] = table[m][k - 1] + if m >= k { table[m - k][k] } else { 0 };
                }
            }
            table[n][n]
        }
        for n in 0..=12 {
            assert_eq!(partitions(n).len() as u64, ways(n));
        }
        assert_eq!(partitions(28).len() as u64, ways(28));
        assert_eq!(partitions(28).len(), 3718);
    }

    #[test]
    fn grouped_lengths() {
        let class = PartitionClass::new(vec![2, 1, 2, 1, 1]);
        assert_eq!(class.grouped(), vec![(2, 2), (1, 3)]);
        assert_eq!(class.n(), 7);
        assert_eq!(class.parts(), 5);
    }

    fn arb_perm(max_n: usize) -> impl Strategy<Value = Permutation> {
        (0..=max_n).prop_flat_map(|n| {
            Just(n).prop_perturb(move |n, mut rng| {
                let mut image: Vec<u32> = (1..=n as u32).collect();
                for i in (1..image.len()).rev() {
                    let j = rng.random_range(0..=i);
                    image.swap(i, j);
                }
                Permutation::from_images(image).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn compose_with_inverse_is_identity(p in arb_perm(10)) {
            prop_assert!(p.compose(&p.inverse()).is_identity());
            prop_assert!(p.inverse().compose(&p).is_identity());
        }

        #[test]
        fn flip_is_an_involution(p in arb_perm(10)) {
            prop_assert_eq!(p.flip().flip(), p);
        }

        #[test]
        fn flip_preserves_cycle_class(p in arb_perm(10)) {
            prop_assert_eq!(p.flip().cycle_class(), p.cycle_class());
        }

        #[test]
        fn display_parse_round_trip(p in arb_perm(10)) {
            let text = p.to_string();
            let back = Permutation::parse_cycles(&text, Some(p.degree())).unwrap();
            prop_assert_eq!(back, p);
        }

        #[test]
        fn decomposition_recomposes(p in arb_perm(10)) {
            let cycles: Vec<Vec<u32>> = p
                .cycle_decomposition()
                .into_iter()
                .map(|c| c.elements().to_vec())
                .collect();
            prop_assert_eq!(Permutation::from_cycles(&cycles, p.degree()).unwrap(), p);
        }
    }
}
