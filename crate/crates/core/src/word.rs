//! Shuffle words and the digraph they induce.
//!
//! A word `a = (a_1, ..., a_n)` over `{1, ..., n}` drives one run of the
//! exchange shuffle: step `j` swaps the cards at positions `j` and `a_j`. The
//! induced permutation is the product `(n a_n) ... (2 a_2) (1 a_1)`.
//!
//! The digraph of a word has an edge `j → a_j` for every position. Each weakly
//! connected component contains exactly one directed cycle (its *ring*); the
//! rest of the component hangs off the ring as trees directed toward it. A
//! ring of length 1 makes the component contribute a single cycle to the
//! induced permutation; a longer ring contributes exactly two disjoint
//! cycles, one through the ring vertices whose ring predecessor is smaller
//! (*upper*) and one through the rest (*lower*).

use std::collections::BTreeMap;
use std::fmt;

use crate::perm::{CycleSeq, Permutation};
use crate::{Error, Result};

/// A shuffle word: one swap target per position, each in `{1, ..., n}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ShuffleWord {
    a: Vec<u32>,
}

impl ShuffleWord {
    /// Validates that every entry lies in `{1, ..., n}`.
    pub fn new(a: Vec<u32>) -> Result<Self> {
        let n = a.len();
        for &v in &a {
            if v == 0 || v as usize > n {
                return Err(Error::OutOfRange {
                    element: v,
                    degree: n,
                });
            }
        }
        Ok(ShuffleWord { a })
    }

    /// Parses a comma-separated literal such as `"5,1,4,6,3,2"`.
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim().is_empty() {
            return ShuffleWord::new(Vec::new());
        }
        let entries = text
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::Parse(format!("invalid word entry {:?}", tok.trim())))
            })
            .collect::<Result<Vec<u32>>>()?;
        ShuffleWord::new(entries)
    }

    pub fn degree(&self) -> usize {
        self.a.len()
    }

    /// The entries `a_1, ..., a_n` (1-based values).
    pub fn entries(&self) -> &[u32] {
        &self.a
    }

    /// Swap target of position `j` (1-based).
    pub fn target(&self, j: u32) -> u32 {
        self.a[j as usize - 1]
    }

    /// Whether the word is itself a permutation of `{1, ..., n}`.
    pub fn is_permutation_word(&self) -> bool {
        let n = self.degree();
        let mut seen = vec![false; n];
        for &v in &self.a {
            if seen[v as usize - 1] {
                return false;
            }
            seen[v as usize - 1] = true;
        }
        true
    }

    /// The permutation produced by running the shuffle with this word.
    ///
    /// Each step left-multiplies by a transposition, which swaps two *values*
    /// of the image table; tracking the inverse table keeps every step O(1).
    pub fn apply(&self) -> Permutation {
        let n = self.degree();
        let mut image: Vec<u32> = (1..=n as u32).collect();
        let mut pos: Vec<u32> = (1..=n as u32).collect();
        for j in 1..=n as u32 {
            let t = self.target(j);
            if t != j {
                let pj = pos[j as usize - 1];
                let pt = pos[t as usize - 1];
                image.swap(pj as usize - 1, pt as usize - 1);
                pos.swap(j as usize - 1, t as usize - 1);
            }
        }
        Permutation::from_images(image).expect("transposition products are bijections")
    }

    /// The word whose shuffle realizes the flip of this word's permutation:
    /// reverse the positions and reflect the targets through `n + 1 - v`.
    pub fn flipped(&self) -> Self {
        let n = self.degree() as u32;
        let a = (0..n).map(|j| n + 1 - self.a[(n - 1 - j) as usize]).collect();
        ShuffleWord { a }
    }

    /// Transports a word for the block product `p ∥ q` (first block degree
    /// `first`, second degree `second`) to a word for `q ∥ p`.
    ///
    /// The map is a bijection between the two representation sets; calling it
    /// again with the block degrees swapped returns the original word. Errors
    /// if the word's permutation does not respect the declared blocks.
    pub fn swap_concat_blocks(&self, first: usize, second: usize) -> Result<Self> {
        let (n, m) = (first, second);
        if n + m != self.degree() {
            return Err(Error::NotConcatenation(format!(
                "block degrees {n}+{m} do not sum to word degree {}",
                self.degree()
            )));
        }
        let full = self.apply();
        if (1..=n as u32).any(|i| full.apply(i) > n as u32) {
            return Err(Error::NotConcatenation(format!(
                "first block does not map {{1..{n}}} to itself"
            )));
        }
        let p = Permutation::from_images(full.images()[..n].to_vec())
            .expect("block restriction of a block permutation is a bijection");
        let q = Permutation::from_images(full.images()[n..].iter().map(|&v| v - n as u32).collect())
            .expect("block restriction of a block permutation is a bijection");
        let p_inv = p.inverse();
        let (n32, m32) = (n as u32, m as u32);
        let mut b = Vec::with_capacity(n + m);
        for x in 1..=m32 {
            let y = self.target(x + n32);
            b.push(if y <= n32 { m32 + p_inv.apply(y) } else { y - n32 });
        }
        for x in 1..=n32 {
            let y = self.target(x);
            b.push(if y <= n32 { m32 + y } else { q.apply(y - n32) });
        }
        Ok(ShuffleWord { a: b })
    }

    /// Decomposes the word's digraph into ring components.
    ///
    /// Components are returned ordered by their smallest vertex. Every vertex
    /// appears in exactly one component, and each component has exactly one
    /// ring by construction.
    pub fn components(&self) -> Vec<RingComponent> {
        let n = self.degree();
        let unassigned = usize::MAX;
        let mut comp = vec![unassigned; n];
        let mut on_ring = vec![false; n];
        let mut members: Vec<Vec<usize>> = Vec::new();
        let mut rings: Vec<Vec<usize>> = Vec::new();
        let mut stamp = vec![unassigned; n];
        for start in 0..n {
            if comp[start] != unassigned {
                continue;
            }
            let mut path = Vec::new();
            let mut v = start;
            while comp[v] == unassigned && stamp[v] != start {
                stamp[v] = start;
                path.push(v);
                v = self.a[v] as usize - 1;
            }
            let cid = if comp[v] != unassigned {
                comp[v]
            } else {
                // Closed a new ring: the tail of the path from the first
                // occurrence of v onward, in successor order.
                let pos = path.iter().position(|&x| x == v).unwrap();
                let ring: Vec<usize> = path[pos..].to_vec();
                for &r in &ring {
                    on_ring[r] = true;
                }
                members.push(Vec::new());
                rings.push(ring);
                rings.len() - 1
            };
            for &x in &path {
                comp[x] = cid;
                members[cid].push(x);
            }
        }

        let mut out = Vec::with_capacity(rings.len());
        for (cid, ring0) in rings.iter().enumerate() {
            let mut vertices: Vec<u32> = members[cid].iter().map(|&v| v as u32 + 1).collect();
            vertices.sort_unstable();
            // Rotate the ring to start at its smallest vertex.
            let minpos = ring0
                .iter()
                .position(|&v| Some(&v) == ring0.iter().min())
                .unwrap();
            let ring: Vec<u32> = (0..ring0.len())
                .map(|i| ring0[(minpos + i) % ring0.len()] as u32 + 1)
                .collect();
            let mut succ = BTreeMap::new();
            let mut hanging: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
            for &v in &vertices {
                let t = self.target(v);
                succ.insert(v, t);
                if !on_ring[v as usize - 1] {
                    hanging.entry(t).or_default().push(v);
                }
            }
            let kind = if ring.len() == 1 {
                ComponentKind::Tree
            } else {
                ComponentKind::Unicycle
            };
            let mut upper = Vec::new();
            let mut lower = Vec::new();
            if ring.len() > 1 {
                for (i, &v) in ring.iter().enumerate() {
                    let pred = ring[(i + ring.len() - 1) % ring.len()];
                    if pred < v {
                        upper.push(v);
                    } else {
                        lower.push(v);
                    }
                }
                upper.sort_unstable();
                lower.sort_unstable();
            }
            out.push(RingComponent {
                vertices,
                succ,
                ring,
                kind,
                hanging,
                upper,
                lower,
            });
        }
        out.sort_by_key(|c| c.vertices[0]);
        out
    }
}

impl fmt::Display for ShuffleWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.a.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for ShuffleWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

/// How a component meets the induced permutation.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ComponentKind {
    /// Ring of length 1: the component induces a single cycle.
    Tree,
    /// Ring of length at least 2: the component induces two disjoint cycles.
    Unicycle,
}

/// One weakly connected component of a word's digraph.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RingComponent {
    /// Component vertices, ascending.
    pub vertices: Vec<u32>,
    /// Out-edge `v → a_v` for each component vertex.
    pub succ: BTreeMap<u32, u32>,
    /// The unique directed cycle, in successor order starting at its
    /// smallest vertex. Length 1 means the component is a rooted tree.
    pub ring: Vec<u32>,
    pub kind: ComponentKind,
    /// Children of each vertex through the hanging trees: the non-ring
    /// in-neighbors, ascending.
    pub hanging: BTreeMap<u32, Vec<u32>>,
    /// Ring vertices whose ring predecessor is smaller, ascending. Empty for
    /// rings of length 1.
    pub upper: Vec<u32>,
    /// The remaining ring vertices, ascending. Empty for rings of length 1.
    pub lower: Vec<u32>,
}

/// The cycles a single component contributes to the induced permutation.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum InducedCycles {
    /// A tree component induces one cycle through all its vertices.
    Tree(CycleSeq),
    /// A unicycle component induces two disjoint cycles that together cover
    /// the component: one through the upper ring vertices, one through the
    /// lower.
    Unicycle { upper: CycleSeq, lower: CycleSeq },
}

impl RingComponent {
    /// Runs the shuffle restricted to this component and splits the result
    /// into its cycles. Cycles are rotated to start at their largest element.
    pub fn induced_cycles(&self) -> InducedCycles {
        // Compose the component's transpositions in ascending vertex order,
        // working in local ranks.
        let r = self.vertices.len();
        let rank = |v: u32| self.vertices.binary_search(&v).unwrap();
        let mut image: Vec<usize> = (0..r).collect();
        let mut pos: Vec<usize> = (0..r).collect();
        for (j, &v) in self.vertices.iter().enumerate() {
            let t = rank(self.succ[&v]);
            if t != j {
                let (pj, pt) = (pos[j], pos[t]);
                image.swap(pj, pt);
                pos.swap(j, t);
            }
        }
        let mut seen = vec![false; r];
        let mut cycles: Vec<CycleSeq> = Vec::new();
        for start in 0..r {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut v = start;
            while !seen[v] {
                seen[v] = true;
                cycle.push(self.vertices[v]);
                v = image[v];
            }
            let mut seq = CycleSeq::new(cycle).expect("orbit elements are distinct");
            seq.rotate_to_max();
            cycles.push(seq);
        }
        match self.kind {
            ComponentKind::Tree => {
                debug_assert_eq!(cycles.len(), 1, "tree component must induce one cycle");
                InducedCycles::Tree(cycles.pop().unwrap())
            }
            ComponentKind::Unicycle => {
                debug_assert_eq!(cycles.len(), 2, "unicycle component must induce two cycles");
                let second = cycles.pop().unwrap();
                let first = cycles.pop().unwrap();
                let first_is_upper = first.elements().contains(&self.upper[0]);
                let (upper, lower) = if first_is_upper {
                    (first, second)
                } else {
                    (second, first)
                };
                debug_assert!(self.upper.iter().all(|v| upper.elements().contains(v)));
                debug_assert!(self.lower.iter().all(|v| lower.elements().contains(v)));
                InducedCycles::Unicycle { upper, lower }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn word(entries: &[u32]) -> ShuffleWord {
        ShuffleWord::new(entries.to_vec()).unwrap()
    }

    #[test]
    fn parse_and_validate() {
        assert_eq!(ShuffleWord::parse("5,1,4,6,3,2").unwrap().degree(), 6);
        assert_eq!(ShuffleWord::parse(" 2 , 1 ").unwrap().entries(), &[2, 1]);
        assert_eq!(ShuffleWord::parse("").unwrap().degree(), 0);
        assert!(ShuffleWord::parse("0,1").is_err());
        assert!(ShuffleWord::parse("3,1").is_err());
        assert!(ShuffleWord::parse("1,x").is_err());
    }

    #[test]
    fn apply_reference_word() {
        let w = ShuffleWord::parse("5,1,4,6,3,2").unwrap();
        let p = w.apply();
        assert_eq!(p.images(), &[3, 1, 2, 5, 6, 4]);
        assert_eq!(p.to_string(), "(6 4 5)(3 2 1)");
        assert!(w.is_permutation_word());
        assert!(!word(&[1, 1]).is_permutation_word());
    }

    #[test]
    fn reference_word_digraph() {
        let w = ShuffleWord::parse("5,1,4,6,3,2").unwrap();
        let comps = w.components();
        assert_eq!(comps.len(), 1);
        let c = &comps[0];
        assert_eq!(c.kind, ComponentKind::Unicycle);
        assert_eq!(c.ring, vec![1, 5, 3, 4, 6, 2]);
        assert_eq!(c.upper, vec![4, 5, 6]);
        assert_eq!(c.lower, vec![1, 2, 3]);
        assert!(c.hanging.is_empty());
        match c.induced_cycles() {
            InducedCycles::Unicycle { upper, lower } => {
                assert!(upper.cycle_eq(&CycleSeq::new(vec![4, 5, 6]).unwrap()));
                assert!(lower.cycle_eq(&CycleSeq::new(vec![1, 3, 2]).unwrap()));
                assert_eq!(upper.elements(), &[6, 4, 5]);
                assert_eq!(lower.elements(), &[3, 2, 1]);
            }
            other => panic!("expected unicycle, got {other:?}"),
        }
    }

    #[test]
    fn loops_make_singleton_trees() {
        let w = word(&[1, 2, 3]);
        let comps = w.components();
        assert_eq!(comps.len(), 3);
        for (i, c) in comps.iter().enumerate() {
            assert_eq!(c.kind, ComponentKind::Tree);
            assert_eq!(c.ring, vec![i as u32 + 1]);
            match c.induced_cycles() {
                InducedCycles::Tree(seq) => assert_eq!(seq.elements(), &[i as u32 + 1]),
                other => panic!("expected tree, got {other:?}"),
            }
        }
    }

    #[test]
    fn hanging_tree_vertices() {
        // 2 and 3 point at 1, which loops: one tree component rooted at 1.
        let w = word(&[1, 1, 1]);
        let comps = w.components();
        assert_eq!(comps.len(), 1);
        let c = &comps[0];
        assert_eq!(c.kind, ComponentKind::Tree);
        assert_eq!(c.ring, vec![1]);
        assert_eq!(c.hanging[&1], vec![2, 3]);
        match c.induced_cycles() {
            InducedCycles::Tree(seq) => {
                // (3 1)(2 1)(1 1) maps 1 -> 2 -> 3 -> 1.
                assert!(seq.cycle_eq(&CycleSeq::new(vec![1, 2, 3]).unwrap()));
            }
            other => panic!("expected tree, got {other:?}"),
        }
    }

    #[test]
    fn two_cycle_ring_splits_into_upper_and_lower() {
        let w = word(&[2, 1]);
        let comps = w.components();
        assert_eq!(comps.len(), 1);
        let c = &comps[0];
        assert_eq!(c.kind, ComponentKind::Unicycle);
        assert_eq!(c.ring, vec![1, 2]);
        assert_eq!(c.upper, vec![2]);
        assert_eq!(c.lower, vec![1]);
        match c.induced_cycles() {
            InducedCycles::Unicycle { upper, lower } => {
                assert_eq!(upper.elements(), &[2]);
                assert_eq!(lower.elements(), &[1]);
            }
            other => panic!("expected unicycle, got {other:?}"),
        }
    }

    #[test]
    fn flipped_word_realizes_flip() {
        let w = ShuffleWord::parse("5,1,4,6,3,2").unwrap();
        assert_eq!(w.flipped().apply(), w.apply().flip());
        // All-loop words are fixed by the flip map.
        let id = word(&[1, 2, 3, 4]);
        assert_eq!(id.flipped(), id);
    }

    #[test]
    fn swap_concat_blocks_smallest_case() {
        let w = word(&[1, 2]);
        assert_eq!(w.swap_concat_blocks(1, 1).unwrap(), word(&[1, 2]));
        let v = word(&[2, 1]);
        assert_eq!(v.swap_concat_blocks(1, 1).unwrap(), word(&[2, 1]));
    }

    #[test]
    fn swap_concat_blocks_rejects_mixing_words() {
        // (2 1) mixes the blocks {1} and {2}.
        let w = word(&[2, 2]);
        assert!(matches!(
            w.swap_concat_blocks(1, 1),
            Err(Error::NotConcatenation(_))
        ));
        assert!(word(&[1, 2]).swap_concat_blocks(2, 1).is_err());
    }

    #[test]
    fn swap_concat_blocks_exhaustive_small() {
        // For every word of {1..4}^4 whose permutation respects the blocks
        // {1,2} | {3,4}, the map must land on a word representing the swapped
        // product, injectively, and return via the swapped-degree call.
        use std::collections::{BTreeMap, BTreeSet};
        let (n, m) = (2usize, 2usize);
        let deg = n + m;
        type BlockPair = (Vec<u32>, Vec<u32>);
        let mut images: BTreeMap<BlockPair, BTreeSet<Vec<u32>>> = BTreeMap::new();
        let mut targets: BTreeMap<BlockPair, usize> = BTreeMap::new();
        let mut counter = vec![1u32; deg];
        loop {
            let w = ShuffleWord::new(counter.clone()).unwrap();
            let full = w.apply();
            let block_respecting = (1..=n as u32).all(|i| full.apply(i) <= n as u32);
            if block_respecting {
                let p: Vec<u32> = full.images()[..n].to_vec();
                let q: Vec<u32> = full.images()[n..].iter().map(|&v| v - n as u32).collect();
                let out = w.swap_concat_blocks(n, m).unwrap();
                // Swapped product: q on the bottom block, p shifted up.
                let swapped = out.apply();
                let q_low: Vec<u32> = swapped.images()[..m].to_vec();
                let p_high: Vec<u32> =
                    swapped.images()[m..].iter().map(|&v| v - m as u32).collect();
                assert_eq!((q_low, p_high), (q.clone(), p.clone()));
                assert_eq!(out.swap_concat_blocks(m, n).unwrap(), w);
                images
                    .entry((p.clone(), q.clone()))
                    .or_default()
                    .insert(out.entries().to_vec());
                *targets.entry((p, q)).or_default() += 1;
            } else {
                assert!(w.swap_concat_blocks(n, m).is_err());
            }
            // Advance the odometer.
            let mut i = 0;
            while i < deg {
                if counter[i] < deg as u32 {
                    counter[i] += 1;
                    break;
                }
                counter[i] = 1;
                i += 1;
            }
            if i == deg {
                break;
            }
        }
        // Injectivity: image sets are as large as the source sets.
        for (key, srcs) in &targets {
            assert_eq!(images[key].len(), *srcs);
        }
    }

    proptest! {
        #[test]
        fn flip_word_is_an_involution(entries in prop::collection::vec(1u32..=9, 0..9)) {
            let n = entries.len() as u32;
            let clipped: Vec<u32> = entries.iter().map(|&v| v.min(n.max(1))).collect();
            let w = ShuffleWord::new(clipped).unwrap();
            prop_assert_eq!(w.flipped().flipped(), w);
        }

        #[test]
        fn flip_word_commutes_with_apply(entries in prop::collection::vec(1u32..=9, 1..9)) {
            let n = entries.len() as u32;
            let clipped: Vec<u32> = entries.iter().map(|&v| v.min(n)).collect();
            let w = ShuffleWord::new(clipped).unwrap();
            prop_assert_eq!(w.flipped().apply(), w.apply().flip());
        }

        #[test]
        fn components_partition_the_vertices(entries in prop::collection::vec(1u32..=9, 1..9)) {
            let n = entries.len() as u32;
            let clipped: Vec<u32> = entries.iter().map(|&v| v.min(n)).collect();
            let w = ShuffleWord::new(clipped).unwrap();
            let comps = w.components();
            let mut all: Vec<u32> = comps.iter().flat_map(|c| c.vertices.clone()).collect();
            all.sort_unstable();
            prop_assert_eq!(all, (1..=n).collect::<Vec<u32>>());
            for c in &comps {
                // The ring closes within the component and upper/lower split it.
                for (i, &v) in c.ring.iter().enumerate() {
                    prop_assert_eq!(c.succ[&v], c.ring[(i + 1) % c.ring.len()]);
                }
                if c.ring.len() > 1 {
                    prop_assert_eq!(c.upper.len() + c.lower.len(), c.ring.len());
                    prop_assert!(!c.upper.is_empty() && !c.lower.is_empty());
                }
            }
        }
    }
}
