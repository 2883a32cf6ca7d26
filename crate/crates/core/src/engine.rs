//! Structured counting engine for shuffle-word multiplicities.
//!
//! Where [`crate::oracle`] counts by enumerating words, this module counts by
//! structure.  A permutation's multiplicity factors over its cycles: every
//! word realizing it partitions the cycles into singletons (each produced by
//! one tree component) and unordered pairs (each produced by one unicyclic
//! component).  The engine therefore needs three ingredients:
//!
//! * `tree_count` — words forming a single tree component that induce a given
//!   cycle, computed by enumerating rooted trees on the cycle's support;
//! * `uni_count` — words forming a single unicyclic component that induce a
//!   given pair of disjoint cycles, computed from rooted-tree tables glued
//!   around a ring (`uni_upper_count` handles one orientation of the ring);
//! * `multiplicity` — the sum over all pairings of cycles, assembled with a
//!   bitmask dynamic program.
//!
//! All tree-level counts depend only on the relative order of the support
//! elements, so results are memoized on rank patterns.  Closed forms are also
//! provided: `involutions` (the multiplicity of the identity), `catalan` (the
//! maximal tree count for a cycle length), and `pair_max` (the maximal
//! unicyclic count for a pair of cycle lengths).
//!
//! Invariants relied on throughout:
//!
//! * a tree component on `m` vertices induces a single `m`-cycle, and a
//!   unicyclic component induces exactly two disjoint cycles;
//! * counts are invariant under order-preserving relabeling of the support;
//! * in the ring gluing, the blocks of the lower cycle alternate with blocks
//!   of the upper cycle, and each block contributes a rooted-tree count
//!   filtered by how its extreme root children compare with the neighboring
//!   block's boundary elements.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use dashmap::DashMap;
use itertools::Itertools;
use num_integer::binomial;
use num_traits::{One, Zero};

use crate::oracle::{induced, MAX_SUPPORT};
use crate::perm::{CycleSeq, Permutation};
use crate::{BigCount, Error, Result};

/// Resource limits for the structured engine.
#[derive(Clone, Copy, Debug)]
pub struct EngineCaps {
    /// Largest cycle length accepted by `tree_count` and largest block
    /// length used in unicyclic split sums (tree enumeration is exponential
    /// in this length).
    pub tree_len: usize,
    /// Largest number of cycles accepted by `multiplicity` (the pairing sum
    /// is exponential in the cycle count).
    pub recombination_parts: usize,
}

impl Default for EngineCaps {
    fn default() -> Self {
        EngineCaps {
            tree_len: 8,
            recombination_parts: 20,
        }
    }
}

/// Counts of rooted trees over a block's support plus a dummy root, inducing
/// the block's cycle extended through the root, bucketed by the ranks of the
/// largest and smallest root children.
///
/// Ranks are 1-based within the block (`1` = smallest element); the dummy
/// root has rank 0.  Bucket `(bp, bm)` counts trees whose largest root child
/// has rank `bp` and smallest root child has rank `bm`.
pub struct RootedTreeTable {
    len: usize,
    buckets: Vec<BigCount>,
    max_child_at_least: Vec<BigCount>,
    min_child_below: Vec<BigCount>,
    min_edge_total: BigCount,
    total: BigCount,
}

impl RootedTreeTable {
    /// Block length (number of non-root vertices).
    pub fn len(&self) -> usize {
        self.len
    }

    /// True only for the impossible empty table; kept for API completeness.
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Total number of rooted trees inducing the block's cycle.
    pub fn total(&self) -> &BigCount {
        &self.total
    }

    /// Trees in the bucket for the given root-child ranks.
    pub fn bucket(&self, max_child: usize, min_child: usize) -> &BigCount {
        static ZERO: std::sync::OnceLock<BigCount> = std::sync::OnceLock::new();
        let r = self.len + 1;
        if max_child == 0 || max_child > self.len || min_child == 0 || min_child > self.len {
            return ZERO.get_or_init(BigCount::zero);
        }
        &self.buckets[max_child * r + min_child]
    }

    /// Trees whose largest root child has rank at least `t`.
    pub fn max_child_at_least(&self, t: usize) -> &BigCount {
        &self.max_child_at_least[t.min(self.len + 1)]
    }

    /// Trees whose smallest root child has rank below `t`.
    pub fn min_child_below(&self, t: usize) -> &BigCount {
        &self.min_child_below[t.min(self.len + 1)]
    }

    /// Trees containing the edge from the smallest element to the root.
    pub fn min_edge_total(&self) -> &BigCount {
        &self.min_edge_total
    }
}

/// Enumerates parent arrays of trees on vertices `0..r` rooted at `root`
/// (i.e. `word[root] == root` and every other vertex's parent chain reaches
/// the root).  Vertices are assigned in increasing order starting at `v`;
/// a candidate parent is rejected when its already-assigned parent chain
/// leads back to the vertex being assigned, so only trees are visited.
fn rooted_trees_from(
    word: &mut [usize; MAX_SUPPORT],
    r: usize,
    root: usize,
    v: usize,
    f: &mut dyn FnMut(&[usize]),
) {
    let mut v = v;
    if v == root {
        v += 1;
    }
    if v >= r {
        f(&word[..r]);
        return;
    }
    for u in 0..r {
        if u == v {
            continue;
        }
        let mut x = u;
        let ok = loop {
            if x == v {
                break false;
            }
            if x == root || x > v {
                break true;
            }
            x = word[x];
        };
        if ok {
            word[v] = u;
            rooted_trees_from(word, r, root, v + 1, f);
        }
    }
}

/// Builds the rooted-tree table for a block given as a 1-based rank pattern
/// (the cycle order of the block's elements by rank).
fn build_rooted_table(pattern: &[usize]) -> RootedTreeTable {
    let len = pattern.len();
    debug_assert!((1..MAX_SUPPORT).contains(&len));
    let r = len + 1;
    let mut target = [0usize; MAX_SUPPORT];
    for (idx, &v) in pattern.iter().enumerate() {
        target[v] = if idx + 1 == len { 0 } else { pattern[idx + 1] };
    }
    target[0] = pattern[0];

    let mut word = [0usize; MAX_SUPPORT];
    let mut image = [0usize; MAX_SUPPORT];
    let mut raw = vec![0u64; r * r];
    let mut raw_min_edge = 0u64;
    word[0] = 0;
    rooted_trees_from(&mut word, r, 0, 1, &mut |w| {
        induced(w, &mut image);
        if image[..r] != target[..r] {
            return;
        }
        let mut bp = 0usize;
        let mut bm = usize::MAX;
        for (v, &wv) in w.iter().enumerate().take(r).skip(1) {
            if wv == 0 {
                bp = bp.max(v);
                bm = bm.min(v);
            }
        }
        debug_assert!(bp >= 1, "a rooted tree on two or more vertices has a root child");
        raw[bp * r + bm] += 1;
        if w[1] == 0 {
            raw_min_edge += 1;
        }
    });

    let buckets: Vec<BigCount> = raw.iter().map(|&c| BigCount::from(c)).collect();
    let mut row_totals = vec![0u64; r];
    let mut col_totals = vec![0u64; r];
    for bp in 0..r {
        for bm in 0..r {
            row_totals[bp] += raw[bp * r + bm];
            col_totals[bm] += raw[bp * r + bm];
        }
    }
    let mut max_child_at_least = vec![BigCount::zero(); r + 1];
    let mut acc = 0u64;
    for t in (0..r).rev() {
        acc += row_totals[t];
        max_child_at_least[t] = BigCount::from(acc);
    }
    let mut min_child_below = vec![BigCount::zero(); r + 1];
    let mut acc = 0u64;
    for t in 1..=r {
        acc += col_totals[t - 1];
        min_child_below[t] = BigCount::from(acc);
    }
    let total: u64 = row_totals.iter().sum();
    RootedTreeTable {
        len,
        buckets,
        max_child_at_least,
        min_child_below,
        min_edge_total: BigCount::from(raw_min_edge),
        total: BigCount::from(total),
    }
}

/// 1-based ranks of `elems` within their own sorted order, in cycle order.
fn rank_pattern(elems: &[u32]) -> Vec<usize> {
    let mut sorted: Vec<u32> = elems.to_vec();
    sorted.sort_unstable();
    elems
        .iter()
        .map(|e| sorted.binary_search(e).expect("element present") + 1)
        .collect()
}

/// The cyclic sub-block of `elems` starting at `start` with length `len`.
fn cyclic_block(elems: &[u32], start: usize, len: usize) -> Vec<u32> {
    let m = elems.len();
    (0..len).map(|i| elems[(start + i) % m]).collect()
}

/// Structured counting engine with memoized tables.
pub struct Engine {
    caps: EngineCaps,
    involution_table: Mutex<Vec<BigCount>>,
    catalan_table: Mutex<Vec<BigCount>>,
    pair_max_cache: DashMap<(usize, usize), BigCount>,
    tree_cache: DashMap<Vec<usize>, BigCount>,
    table_cache: DashMap<Vec<usize>, Arc<RootedTreeTable>>,
    uni_cache: DashMap<(Vec<usize>, Vec<usize>), BigCount>,
}

impl Default for Engine {
    fn default() -> Self {
        Engine::new(EngineCaps::default())
    }
}

impl Engine {
    /// Creates an engine with the given resource limits.
    pub fn new(caps: EngineCaps) -> Self {
        Engine {
            caps,
            involution_table: Mutex::new(Vec::new()),
            catalan_table: Mutex::new(Vec::new()),
            pair_max_cache: DashMap::new(),
            tree_cache: DashMap::new(),
            table_cache: DashMap::new(),
            uni_cache: DashMap::new(),
        }
    }

    /// The engine's resource limits.
    pub fn caps(&self) -> EngineCaps {
        self.caps
    }

    /// Number of involutions of `n` elements; equals the multiplicity of the
    /// identity permutation of degree `n`.
    pub fn involutions(&self, n: usize) -> BigCount {
        let mut table = self.involution_table.lock().expect("involution table lock");
        if table.is_empty() {
            table.push(BigCount::one());
            table.push(BigCount::one());
        }
        while table.len() <= n {
            let k = table.len();
            let next = &table[k - 1] + &table[k - 2] * BigCount::from(k - 1);
            table.push(next);
        }
        table[n].clone()
    }

    /// The `n`-th Catalan number; equals the maximal tree count over cycles
    /// of length `n`.
    pub fn catalan(&self, n: usize) -> BigCount {
        let mut table = self.catalan_table.lock().expect("catalan table lock");
        while table.len() <= n {
            let k = table.len();
            let b = binomial(BigCount::from(2 * k), BigCount::from(k));
            let d = BigCount::from(k + 1);
            debug_assert!((&b % &d).is_zero());
            table.push(&b / &d);
        }
        table[n].clone()
    }

    /// Maximal unicyclic count over pairs of disjoint cycles with lengths
    /// `m` and `p`; attained by two descending interval cycles stacked on
    /// top of each other.
    pub fn pair_max(&self, m: usize, p: usize) -> Result<BigCount> {
        if m == 0 || p == 0 {
            return Err(Error::InvalidOperand(
                "pair_max requires positive cycle lengths".into(),
            ));
        }
        let key = (m.min(p), m.max(p));
        if let Some(v) = self.pair_max_cache.get(&key) {
            return Ok(v.clone());
        }
        let s = m + p;
        let bm = binomial(BigCount::from(2 * m), BigCount::from(m));
        let bp = binomial(BigCount::from(2 * p), BigCount::from(p));
        let t1 = &bm * &bp * BigCount::from(s + 4 * m * p);
        let t2 = BigCount::from(s) * binomial(BigCount::from(2 * s), BigCount::from(s));
        if t1 < t2 {
            return Err(Error::InexactDivision(format!(
                "pair maximum closed form went negative for lengths ({m}, {p})"
            )));
        }
        let num = t1 - t2;
        let den = BigCount::from(2 * s * (s + 1));
        if !(&num % &den).is_zero() {
            return Err(Error::InexactDivision(format!(
                "pair maximum closed form is not integral for lengths ({m}, {p})"
            )));
        }
        let v = num / den;
        self.pair_max_cache.insert(key, v.clone());
        Ok(v)
    }

    /// The rooted-tree table for the block `d` (with a dummy root adjoined).
    pub fn rooted_table(&self, d: &CycleSeq) -> Result<Arc<RootedTreeTable>> {
        self.rooted_table_slice(d.elements())
    }

    fn rooted_table_slice(&self, elems: &[u32]) -> Result<Arc<RootedTreeTable>> {
        let len = elems.len();
        if len > self.caps.tree_len {
            return Err(Error::CapExceeded {
                what: "rooted tree block length",
                requested: len,
                cap: self.caps.tree_len,
            });
        }
        let pattern = rank_pattern(elems);
        if let Some(t) = self.table_cache.get(&pattern) {
            return Ok(t.clone());
        }
        let table = Arc::new(build_rooted_table(&pattern));
        self.table_cache.insert(pattern, table.clone());
        Ok(table)
    }

    /// Number of words forming a single tree component on the support of
    /// `mu` that induce exactly the cycle `mu`.
    pub fn tree_count(&self, mu: &CycleSeq) -> Result<BigCount> {
        let m = mu.len();
        if m > self.caps.tree_len {
            return Err(Error::CapExceeded {
                what: "tree cycle length",
                requested: m,
                cap: self.caps.tree_len,
            });
        }
        // 0-based ranks, rotated so the largest rank comes first.
        let mut pattern: Vec<usize> = rank_pattern(mu.elements()).iter().map(|r| r - 1).collect();
        let top = pattern
            .iter()
            .position(|&r| r == m - 1)
            .expect("maximal rank present");
        pattern.rotate_left(top);
        if let Some(v) = self.tree_cache.get(&pattern) {
            return Ok(v.clone());
        }

        let mut target = [0usize; MAX_SUPPORT];
        for (idx, &v) in pattern.iter().enumerate() {
            target[v] = pattern[(idx + 1) % m];
        }
        let mut count = 0u64;
        let mut word = [0usize; MAX_SUPPORT];
        let mut image = [0usize; MAX_SUPPORT];
        for root in 0..m {
            word[root] = root;
            rooted_trees_from(&mut word, m, root, 0, &mut |w| {
                induced(w, &mut image);
                if image[..m] == target[..m] {
                    count += 1;
                }
            });
        }
        let v = BigCount::from(count);
        self.tree_cache.insert(pattern, v.clone());
        Ok(v)
    }

    /// Number of words forming a single unicyclic component on the union
    /// support that induce the pair `(a, b)` with `a` as the upper cycle
    /// (the cycle through the ring vertices whose ring predecessor is
    /// smaller).
    pub fn uni_upper_count(&self, a: &CycleSeq, b: &CycleSeq) -> Result<BigCount> {
        let (key_a, key_b) = union_rank_key(a, b)?;
        if a.len() > self.caps.tree_len || b.len() > self.caps.tree_len {
            return Err(Error::CapExceeded {
                what: "rooted tree block length",
                requested: a.len().max(b.len()),
                cap: self.caps.tree_len,
            });
        }
        let key = (key_a, key_b);
        if let Some(v) = self.uni_cache.get(&key) {
            return Ok(v.clone());
        }
        let v = if a.max() < b.min() {
            // Every upper ring vertex exceeds its ring predecessor, so the
            // upper cycle cannot sit entirely below the lower one.
            BigCount::zero()
        } else if b.max() < a.min() {
            self.uni_upper_separated(a.elements(), b.elements())?
        } else {
            self.uni_upper_general(a.elements(), b.elements())?
        };
        self.uni_cache.insert(key, v.clone());
        Ok(v)
    }

    /// Number of words forming a single unicyclic component that induce the
    /// disjoint pair `{a, b}` (either cycle may be the upper one).
    pub fn uni_count(&self, a: &CycleSeq, b: &CycleSeq) -> Result<BigCount> {
        Ok(self.uni_upper_count(a, b)? + self.uni_upper_count(b, a)?)
    }

    /// Sum over ways to cut `elems` cyclically into `k` blocks of the
    /// product of the blocks' rooted-tree totals.
    fn block_split_sum(&self, elems: &[u32], k: usize) -> Result<BigCount> {
        let m = elems.len();
        debug_assert!(k >= 1 && k <= m);
        let mut sum = BigCount::zero();
        for cuts in (0..m).combinations(k) {
            let mut prod = BigCount::one();
            for i in 0..k {
                let start = cuts[i];
                let mut len = (cuts[(i + 1) % k] + m - start) % m;
                if len == 0 {
                    len = m;
                }
                let block = cyclic_block(elems, start, len);
                let table = self.rooted_table_slice(&block)?;
                if table.total().is_zero() {
                    prod = BigCount::zero();
                    break;
                }
                prod *= table.total();
            }
            sum += prod;
        }
        Ok(sum)
    }

    /// Upper count when every element of `a` exceeds every element of `b`:
    /// the boundary comparisons are vacuous and the split sums of the two
    /// cycles combine independently per block count.
    fn uni_upper_separated(&self, a_elems: &[u32], b_elems: &[u32]) -> Result<BigCount> {
        let kmax = a_elems.len().min(b_elems.len());
        let mut total = BigCount::zero();
        for k in 1..=kmax {
            let sa = self.block_split_sum(a_elems, k)?;
            if sa.is_zero() {
                continue;
            }
            let sb = self.block_split_sum(b_elems, k)?;
            total += sa * sb * BigCount::from(k);
        }
        Ok(total)
    }

    /// Upper count in general: both cycles are cut into `k` blocks arranged
    /// alternately around the ring.  Block labels on the upper cycle descend
    /// in forward cyclic order starting from the block holding the cycle's
    /// stored anchor (which fixes the rotational freedom exactly), labels on
    /// the lower cycle ascend with a free starting block.  Each upper block
    /// must have its largest root child above the first element of the
    /// like-labeled lower block, and each lower block must have its smallest
    /// root child below the last element of the next-labeled upper block.
    fn uni_upper_general(&self, a_elems: &[u32], b_elems: &[u32]) -> Result<BigCount> {
        let m = a_elems.len();
        let p = b_elems.len();
        let mut total = BigCount::zero();
        for k in 1..=m.min(p) {
            let mut a_assignments: Vec<Vec<(Vec<u32>, Arc<RootedTreeTable>)>> = Vec::new();
            for cuts in (0..m).combinations(k) {
                let mut forward: Vec<(Vec<u32>, Arc<RootedTreeTable>)> = Vec::with_capacity(k);
                for i in 0..k {
                    let start = cuts[i];
                    let mut len = (cuts[(i + 1) % k] + m - start) % m;
                    if len == 0 {
                        len = m;
                    }
                    let block = cyclic_block(a_elems, start, len);
                    let table = self.rooted_table_slice(&block)?;
                    forward.push((block, table));
                }
                // Index of the block containing stored position 0.
                let anchor = if cuts[0] == 0 { 0 } else { k - 1 };
                let mut by_label = vec![forward[anchor].clone(); k];
                for j_rel in 1..k {
                    by_label[k - j_rel] = forward[(anchor + j_rel) % k].clone();
                }
                a_assignments.push(by_label);
            }

            for cuts in (0..p).combinations(k) {
                let mut forward: Vec<(Vec<u32>, Arc<RootedTreeTable>)> = Vec::with_capacity(k);
                for i in 0..k {
                    let start = cuts[i];
                    let mut len = (cuts[(i + 1) % k] + p - start) % p;
                    if len == 0 {
                        len = p;
                    }
                    let block = cyclic_block(b_elems, start, len);
                    let table = self.rooted_table_slice(&block)?;
                    forward.push((block, table));
                }
                for s in 0..k {
                    for a_blocks in &a_assignments {
                        let mut prod = BigCount::one();
                        for i in 0..k {
                            let b_block = &forward[(s + i) % k];
                            let gamma_low = b_block.0[0];
                            let thr =
                                1 + a_blocks[i].0.iter().filter(|&&e| e <= gamma_low).count();
                            let f = a_blocks[i].1.max_child_at_least(thr);
                            if f.is_zero() {
                                prod = BigCount::zero();
                                break;
                            }
                            prod *= f;
                        }
                        if prod.is_zero() {
                            continue;
                        }
                        for j in 0..k {
                            let b_block = &forward[(s + j) % k];
                            let gamma_high = *a_blocks[(j + 1) % k].0.last().expect("nonempty");
                            let thr =
                                1 + b_block.0.iter().filter(|&&e| e < gamma_high).count();
                            let f = b_block.1.min_child_below(thr);
                            if f.is_zero() {
                                prod = BigCount::zero();
                                break;
                            }
                            prod *= f;
                        }
                        total += prod;
                    }
                }
            }
        }
        Ok(total)
    }

    /// The multiplicity of `p`: the number of shuffle words of degree
    /// `p.degree()` whose induced permutation equals `p`.
    pub fn multiplicity(&self, p: &Permutation) -> Result<BigCount> {
        let cycles = p.cycle_decomposition();
        let q = cycles.len();
        if q > self.caps.recombination_parts {
            return Err(Error::CapExceeded {
                what: "cycle recombination parts",
                requested: q,
                cap: self.caps.recombination_parts,
            });
        }
        let trees: Vec<BigCount> = cycles
            .iter()
            .map(|c| self.tree_count(c))
            .collect::<Result<_>>()?;
        let mut unis = vec![vec![BigCount::zero(); q]; q];
        for i in 0..q {
            for j in (i + 1)..q {
                let v = self.uni_count(&cycles[i], &cycles[j])?;
                unis[i][j] = v.clone();
                unis[j][i] = v;
            }
        }
        let full: u64 = if q == 0 { 0 } else { (1u64 << q) - 1 };
        let mut memo = HashMap::new();
        Ok(assemble(&trees, &unis, full, &mut memo))
    }
}

/// Memo key for a disjoint cycle pair: both cycles re-ranked within the
/// union support (0-based) and rotated to start at their largest rank.
fn union_rank_key(a: &CycleSeq, b: &CycleSeq) -> Result<(Vec<usize>, Vec<usize>)> {
    let mut union: Vec<u32> = a.elements().iter().chain(b.elements()).copied().collect();
    union.sort_unstable();
    if union.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidOperand(
            "unicyclic pair requires disjoint cycles".into(),
        ));
    }
    let rank = |elems: &[u32]| -> Vec<usize> {
        let mut pat: Vec<usize> = elems
            .iter()
            .map(|e| union.binary_search(e).expect("element present"))
            .collect();
        let top = pat
            .iter()
            .enumerate()
            .max_by_key(|(_, r)| **r)
            .map(|(i, _)| i)
            .expect("nonempty cycle");
        pat.rotate_left(top);
        pat
    };
    Ok((rank(a.elements()), rank(b.elements())))
}

/// Sum over involutions of the cycle set `mask`: fixed cycles contribute
/// their tree count, paired cycles their unicyclic count.
fn assemble(
    trees: &[BigCount],
    unis: &[Vec<BigCount>],
    mask: u64,
    memo: &mut HashMap<u64, BigCount>,
) -> BigCount {
    if mask == 0 {
        return BigCount::one();
    }
    if let Some(v) = memo.get(&mask) {
        return v.clone();
    }
    let i = mask.trailing_zeros() as usize;
    let rest = mask & !(1u64 << i);
    let mut acc = &trees[i] * assemble(trees, unis, rest, memo);
    let mut jmask = rest;
    while jmask != 0 {
        let j = jmask.trailing_zeros() as usize;
        jmask &= jmask - 1;
        if !unis[i][j].is_zero() {
            acc += &unis[i][j] * assemble(trees, unis, rest & !(1u64 << j), memo);
        }
    }
    memo.insert(mask, acc.clone());
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{CountKind, CountQuery, Oracle, OracleCaps, QueryTarget};
    use crate::Mode;

    fn cyc(elems: &[u32]) -> CycleSeq {
        CycleSeq::new(elems.to_vec()).unwrap()
    }

    fn big(n: u64) -> BigCount {
        BigCount::from(n)
    }

    #[test]
    fn involution_values() {
        let engine = Engine::default();
        let expected = [1u64, 1, 2, 4, 10, 26, 76, 232, 764, 2620, 9496];
        for (n, &e) in expected.iter().enumerate() {
            assert_eq!(engine.involutions(n), big(e), "involutions({n})");
        }
    }

    #[test]
    fn catalan_values() {
        let engine = Engine::default();
        let expected = [1u64, 1, 2, 5, 14, 42, 132, 429, 1430];
        for (n, &e) in expected.iter().enumerate() {
            assert_eq!(engine.catalan(n), big(e), "catalan({n})");
        }
    }

    #[test]
    fn pair_max_values() {
        let engine = Engine::default();
        let expected = [
            (1, 1, 1u64),
            (2, 1, 3),
            (1, 2, 3),
            (2, 2, 11),
            (1, 3, 9),
            (3, 1, 9),
            (3, 2, 37),
            (2, 3, 37),
            (4, 1, 28),
            (4, 4, 1735),
            (5, 4, 6291),
        ];
        for &(m, p, e) in &expected {
            assert_eq!(engine.pair_max(m, p).unwrap(), big(e), "pair_max({m},{p})");
        }
        assert!(engine.pair_max(0, 1).is_err());
    }

    #[test]
    fn rooted_table_hand_counts() {
        let engine = Engine::default();
        // Block (3 2): two trees, one per root child.
        let t = engine.rooted_table(&cyc(&[3, 2])).unwrap();
        assert_eq!(*t.total(), big(2));
        assert_eq!(*t.bucket(1, 1), big(1));
        assert_eq!(*t.bucket(2, 2), big(1));
        assert_eq!(*t.bucket(2, 1), big(0));
        assert_eq!(*t.min_edge_total(), big(1));
        assert_eq!(*t.max_child_at_least(2), big(1));
        assert_eq!(*t.max_child_at_least(1), big(2));
        assert_eq!(*t.min_child_below(2), big(1));
        assert_eq!(*t.min_child_below(3), big(2));
        // Block (2 3): a single tree with both vertices as root children.
        let t = engine.rooted_table(&cyc(&[2, 3])).unwrap();
        assert_eq!(*t.total(), big(1));
        assert_eq!(*t.bucket(2, 1), big(1));
        assert_eq!(*t.min_edge_total(), big(1));
        // Singleton block.
        let t = engine.rooted_table(&cyc(&[5])).unwrap();
        assert_eq!(*t.total(), big(1));
        assert_eq!(*t.min_edge_total(), big(1));
    }

    #[test]
    fn rooted_table_matches_oracle() {
        let engine = Engine::default();
        let oracle = Oracle::new(OracleCaps::default());
        for len in 1usize..=4 {
            let rest: Vec<u32> = (1..len as u32).collect();
            for tail in rest.iter().copied().permutations(rest.len()) {
                let mut elems = vec![len as u32];
                elems.extend(tail);
                let d = cyc(&elems);
                let table = engine.rooted_table(&d).unwrap();
                let total = oracle
                    .eval(&CountQuery {
                        kind: CountKind::DummyRooted,
                        target: QueryTarget::Cycle(d.clone()),
                    })
                    .unwrap();
                assert_eq!(*table.total(), total, "total for {d}");
                let min_edge = oracle
                    .eval(&CountQuery {
                        kind: CountKind::DummyRootedMinEdge,
                        target: QueryTarget::Cycle(d.clone()),
                    })
                    .unwrap();
                assert_eq!(*table.min_edge_total(), min_edge, "min edge for {d}");
                for x in 0..=(len as u32 + 1) {
                    let above = oracle
                        .eval(&CountQuery {
                            kind: CountKind::DummyRootedMaxChildGt(x),
                            target: QueryTarget::Cycle(d.clone()),
                        })
                        .unwrap();
                    let thr = 1 + elems.iter().filter(|&&e| e <= x).count();
                    assert_eq!(*table.max_child_at_least(thr), above, "max child for {d}, {x}");
                    let below = oracle
                        .eval(&CountQuery {
                            kind: CountKind::DummyRootedMinChildLt(x),
                            target: QueryTarget::Cycle(d.clone()),
                        })
                        .unwrap();
                    let thr = elems.iter().filter(|&&e| e < x).count()
                        + usize::from(x >= 1);
                    assert_eq!(*table.min_child_below(thr), below, "min child for {d}, {x}");
                }
            }
        }
    }

    #[test]
    fn tree_count_matches_catalan_on_descending_cycles() {
        let engine = Engine::default();
        for m in 1..=6u32 {
            let elems: Vec<u32> = (1..=m).rev().collect();
            let count = engine.tree_count(&cyc(&elems)).unwrap();
            assert_eq!(count, engine.catalan(m as usize), "descending {m}-cycle");
        }
    }

    #[test]
    fn tree_count_matches_oracle() {
        let engine = Engine::default();
        let oracle = Oracle::new(OracleCaps::default());
        for m in 1usize..=4 {
            let rest: Vec<u32> = (1..m as u32).collect();
            for tail in rest.iter().copied().permutations(rest.len()) {
                let mut elems = vec![m as u32];
                elems.extend(tail);
                let c = cyc(&elems);
                let structured = engine.tree_count(&c).unwrap();
                let brute = oracle
                    .eval(&CountQuery {
                        kind: CountKind::Tree,
                        target: QueryTarget::Cycle(c.clone()),
                    })
                    .unwrap();
                assert_eq!(structured, brute, "tree count for {c}");
            }
        }
        // Pattern invariance: ranks decide the count, not the labels.
        let spread = engine.tree_count(&cyc(&[9, 5, 2])).unwrap();
        let dense = engine.tree_count(&cyc(&[3, 2, 1])).unwrap();
        assert_eq!(spread, dense);
        assert_eq!(dense, big(5));
    }

    #[test]
    fn uni_matches_oracle_on_small_pairs() {
        let engine = Engine::default();
        let oracle = Oracle::new(OracleCaps::default());
        // All ordered pairs of disjoint cycles with union inside {1..5}.
        for n in 2u32..=5 {
            let all: Vec<u32> = (1..=n).collect();
            for a_mask in 1u32..(1 << n) {
                let b_mask_all = ((1u32 << n) - 1) & !a_mask;
                if b_mask_all == 0 {
                    continue;
                }
                let a_support: Vec<u32> =
                    all.iter().copied().filter(|v| a_mask >> (v - 1) & 1 == 1).collect();
                let b_support: Vec<u32> =
                    all.iter().copied().filter(|v| b_mask_all >> (v - 1) & 1 == 1).collect();
                for a_tail in a_support[..a_support.len() - 1]
                    .iter()
                    .copied()
                    .permutations(a_support.len() - 1)
                {
                    let mut a_elems = vec![*a_support.last().unwrap()];
                    a_elems.extend(a_tail);
                    let a = cyc(&a_elems);
                    for b_tail in b_support[..b_support.len() - 1]
                        .iter()
                        .copied()
                        .permutations(b_support.len() - 1)
                    {
                        let mut b_elems = vec![*b_support.last().unwrap()];
                        b_elems.extend(b_tail);
                        let b = cyc(&b_elems);
                        let upper = engine.uni_upper_count(&a, &b).unwrap();
                        let upper_brute = oracle
                            .eval(&CountQuery {
                                kind: CountKind::UniUpper,
                                target: QueryTarget::Pair(a.clone(), b.clone()),
                            })
                            .unwrap();
                        assert_eq!(upper, upper_brute, "upper count for {a}, {b}");
                        let both = engine.uni_count(&a, &b).unwrap();
                        let both_brute = oracle
                            .eval(&CountQuery {
                                kind: CountKind::Uni,
                                target: QueryTarget::Pair(a.clone(), b.clone()),
                            })
                            .unwrap();
                        assert_eq!(both, both_brute, "pair count for {a}, {b}");
                    }
                }
            }
        }
    }

    #[test]
    fn uni_upper_hand_value() {
        let engine = Engine::default();
        let v = engine.uni_upper_count(&cyc(&[4, 3]), &cyc(&[2, 1])).unwrap();
        assert_eq!(v, big(11));
        assert_eq!(v, engine.pair_max(2, 2).unwrap());
        // The reversed orientation is impossible: the upper cycle cannot sit
        // entirely below the lower one.
        let zero = engine.uni_upper_count(&cyc(&[2, 1]), &cyc(&[4, 3])).unwrap();
        assert!(zero.is_zero());
    }

    #[test]
    fn separated_fast_path_matches_general() {
        let engine = Engine::default();
        let pairs: [(&[u32], &[u32]); 3] = [
            (&[6, 5, 4], &[3, 2, 1]),
            (&[6, 4, 5], &[2, 1, 3]),
            (&[7, 5], &[3, 1, 2]),
        ];
        for (a, b) in pairs {
            let fast = engine.uni_upper_separated(a, b).unwrap();
            let general = engine.uni_upper_general(a, b).unwrap();
            assert_eq!(fast, general, "paths disagree for {a:?}, {b:?}");
        }
    }

    /// Reference version of the general path that enumerates every labeled
    /// block assignment on the upper cycle (all rotations, not just the
    /// anchored one) and divides by the number of blocks.
    fn uni_upper_labeled(engine: &Engine, a_elems: &[u32], b_elems: &[u32]) -> BigCount {
        let m = a_elems.len();
        let p = b_elems.len();
        let mut total = BigCount::zero();
        for k in 1..=m.min(p) {
            let mut k_total = BigCount::zero();
            for a_cuts in (0..m).combinations(k) {
                let mut a_forward: Vec<(Vec<u32>, Arc<RootedTreeTable>)> = Vec::new();
                for i in 0..k {
                    let start = a_cuts[i];
                    let mut len = (a_cuts[(i + 1) % k] + m - start) % m;
                    if len == 0 {
                        len = m;
                    }
                    let block = cyclic_block(a_elems, start, len);
                    let table = engine.rooted_table_slice(&block).unwrap();
                    a_forward.push((block, table));
                }
                // Every rotation of descending labels, not just the anchored one.
                for r in 0..k {
                    let mut a_blocks = vec![a_forward[0].clone(); k];
                    for j_rel in 0..k {
                        let label0 = if j_rel == 0 { 0 } else { k - j_rel };
                        a_blocks[label0] = a_forward[(r + j_rel) % k].clone();
                    }
                    for b_cuts in (0..p).combinations(k) {
                        let mut b_forward: Vec<(Vec<u32>, Arc<RootedTreeTable>)> = Vec::new();
                        for i in 0..k {
                            let start = b_cuts[i];
                            let mut len = (b_cuts[(i + 1) % k] + p - start) % p;
                            if len == 0 {
                                len = p;
                            }
                            let block = cyclic_block(b_elems, start, len);
                            let table = engine.rooted_table_slice(&block).unwrap();
                            b_forward.push((block, table));
                        }
                        for s in 0..k {
                            let mut prod = BigCount::one();
                            for i in 0..k {
                                let b_block = &b_forward[(s + i) % k];
                                let gamma_low = b_block.0[0];
                                let thr = 1
                                    + a_blocks[i].0.iter().filter(|&&e| e <= gamma_low).count();
                                prod *= a_blocks[i].1.max_child_at_least(thr);
                            }
                            for j in 0..k {
                                let b_block = &b_forward[(s + j) % k];
                                let gamma_high =
                                    *a_blocks[(j + 1) % k].0.last().unwrap();
                                let thr = 1
                                    + b_block.0.iter().filter(|&&e| e < gamma_high).count();
                                prod *= b_block.1.min_child_below(thr);
                            }
                            k_total += prod;
                        }
                    }
                }
            }
            // The labeled sum counts every ring k times.
            let k_big = big(k as u64);
            assert!((&k_total % &k_big).is_zero(), "labeled sum not divisible by {k}");
            total += k_total / k_big;
        }
        total
    }

    #[test]
    fn anchored_sum_matches_labeled_sum() {
        let engine = Engine::default();
        let pairs: [(&[u32], &[u32]); 4] = [
            (&[4, 3], &[2, 1]),
            (&[5, 2], &[4, 1, 3]),
            (&[5, 3, 1], &[4, 2]),
            (&[6, 2, 4], &[5, 1, 3]),
        ];
        for (a, b) in pairs {
            let anchored = engine.uni_upper_general(a, b).unwrap();
            let labeled = uni_upper_labeled(&engine, a, b);
            assert_eq!(anchored, labeled, "anchoring broke for {a:?}, {b:?}");
        }
    }

    #[test]
    fn multiplicity_identity_is_involution_count() {
        let engine = Engine::default();
        for n in 0..=10usize {
            let id = Permutation::identity(n);
            assert_eq!(engine.multiplicity(&id).unwrap(), engine.involutions(n));
        }
    }

    #[test]
    fn multiplicity_hand_values() {
        let engine = Engine::default();
        let two_blocks = Permutation::parse_cycles("(4 3)(2 1)", Some(4)).unwrap();
        assert_eq!(engine.multiplicity(&two_blocks).unwrap(), big(15));
        let three = Permutation::parse_cycles("(3 2 1)", Some(3)).unwrap();
        assert_eq!(engine.multiplicity(&three).unwrap(), big(5));
        let figure = Permutation::from_images(vec![3, 1, 2, 5, 6, 4]).unwrap();
        let flipped = figure.flip();
        assert_eq!(
            engine.multiplicity(&figure).unwrap(),
            engine.multiplicity(&flipped).unwrap()
        );
    }

    #[test]
    fn multiplicity_matches_oracle_exhaustively() {
        let engine = Engine::default();
        let oracle = Oracle::new(OracleCaps::default());
        for n in 0..=5usize {
            let tally = oracle.count_all(n, Mode::Uniform).unwrap();
            let mut mass = BigCount::zero();
            for (perm, count) in tally.iter() {
                let structured = engine.multiplicity(perm).unwrap();
                assert_eq!(structured, *count, "multiplicity of {perm} at degree {n}");
                mass += structured;
            }
            assert_eq!(mass, crate::oracle::total_words(n, Mode::Uniform));
        }
    }

    #[test]
    fn caps_are_enforced() {
        let engine = Engine::new(EngineCaps {
            tree_len: 3,
            recombination_parts: 2,
        });
        let long = cyc(&[4, 3, 2, 1]);
        assert!(matches!(
            engine.tree_count(&long),
            Err(Error::CapExceeded { .. })
        ));
        let id3 = Permutation::identity(3);
        assert!(matches!(
            engine.multiplicity(&id3),
            Err(Error::CapExceeded { .. })
        ));
        let id2 = Permutation::identity(2);
        assert!(engine.multiplicity(&id2).is_ok());
    }
}
