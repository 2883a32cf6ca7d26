//! Brute-force enumeration oracle.
//!
//! Every count in this module is obtained by enumerating words (or rooted
//! words) and filtering — no formulas. It is deliberately independent of the
//! structured engine so the two can check each other. Costs are exponential,
//! so every entry point enforces a cap:
//!
//! - word-level kinds enumerate `n^n` words (cap [`OracleCaps::word_support`]),
//! - permutation-mode tallies enumerate `n!` words (cap
//!   [`OracleCaps::perm_word_support`]),
//! - rooted-tree kinds enumerate `r^(r-1)` rooted words over the support
//!   including the dummy root (cap [`OracleCaps::tree_support`]).
//!
//! Results are memoized keyed by the order-isomorphism class of the query:
//! counts are invariant under order-preserving relabeling of the support, so
//! targets are normalized to rank space before caching.
//!
//! All counts are returned as [`BigCount`] even where machine words suffice,
//! so call sites compose without overflow concerns.

use std::collections::BTreeMap;
use std::sync::Arc;

use dashmap::DashMap;
use itertools::Itertools;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::perm::{CycleSeq, Permutation};
use crate::{BigCount, Error, Mode, Result};

/// Enumeration caps for the oracle.
#[derive(Clone, Copy, Debug)]
pub struct OracleCaps {
    /// Max support size for word-level kinds (`n^n` enumeration).
    pub word_support: usize,
    /// Max support size for permutation-mode tallies (`n!` enumeration).
    pub perm_word_support: usize,
    /// Max support size, dummy root included, for rooted-tree kinds.
    pub tree_support: usize,
}

impl Default for OracleCaps {
    fn default() -> Self {
        OracleCaps {
            word_support: 7,
            perm_word_support: 8,
            tree_support: 9,
        }
    }
}

/// What to count for a given target.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum CountKind {
    /// Words producing the target.
    Multiplicity,
    /// Words producing the target whose digraph is a single tree component.
    Tree,
    /// Words producing the target whose digraph is a single unicycle.
    Uni,
    /// Unicycle words where the first cycle of the pair is the upper cycle.
    UniUpper,
    /// Rooted words: the given element is the ring, no dummy root.
    RootedAt(u32),
    /// Rooted words over the support plus a dummy root 0, producing the
    /// target cycle extended through the root.
    DummyRooted,
    /// [`CountKind::DummyRooted`] restricted to trees whose largest root
    /// child exceeds the parameter.
    DummyRootedMaxChildGt(u32),
    /// [`CountKind::DummyRooted`] restricted to trees whose smallest root
    /// child is below the parameter.
    DummyRootedMinChildLt(u32),
    /// [`CountKind::DummyRooted`] restricted to trees containing the edge
    /// from the smallest support element to the root.
    DummyRootedMinEdge,
    /// Sum over cyclic splits of the target into `k` blocks of products of
    /// [`CountKind::DummyRooted`] counts of the blocks.
    CyclicSplit(usize),
    /// [`CountKind::CyclicSplit`] restricted to block tuples whose tree set
    /// contains the edge from the smallest element to the root.
    CyclicSplitMinEdge(usize),
}

/// What object the count is about.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum QueryTarget {
    /// A permutation of `{1, ..., n}`; the ground set is all of `{1, ..., n}`.
    Perm(Permutation),
    /// A single cycle; the ground set is its support.
    Cycle(CycleSeq),
    /// A pair of disjoint cycles; the ground set is the union of supports.
    Pair(CycleSeq, CycleSeq),
}

/// A counting question for the oracle.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CountQuery {
    pub kind: CountKind,
    pub target: QueryTarget,
}

/// Normalized query in rank space; the memo key.
#[derive(Clone, PartialEq, Eq, Hash)]
enum NormQuery {
    Word {
        /// 0 = multiplicity, 1 = tree, 2 = uni.
        filter: u8,
        mapping: Vec<usize>,
    },
    WordUniUpper {
        mapping: Vec<usize>,
        upper: Vec<usize>,
    },
    Rooted {
        root: usize,
        mapping: Vec<usize>,
        /// (min rank allowed for the largest root in-neighbor,
        ///  strict upper rank bound for the smallest root in-neighbor,
        ///  require edge min -> root)
        beta_plus_at_least: usize,
        beta_minus_below: usize,
        min_edge: bool,
    },
    Split {
        k: usize,
        min_edge_only: bool,
        pattern: Vec<usize>,
    },
}

/// The brute-force counting oracle with its memo cache.
pub struct Oracle {
    caps: OracleCaps,
    cache: DashMap<NormQuery, BigCount>,
    tallies: DashMap<(usize, Mode), Arc<BTreeMap<Permutation, BigCount>>>,
}

impl Default for Oracle {
    fn default() -> Self {
        Oracle::new(OracleCaps::default())
    }
}

impl Oracle {
    pub fn new(caps: OracleCaps) -> Self {
        Oracle {
            caps,
            cache: DashMap::new(),
            tallies: DashMap::new(),
        }
    }

    pub fn caps(&self) -> OracleCaps {
        self.caps
    }

    /// Multiplicity of a permutation: the number of words producing it.
    pub fn multiplicity(&self, p: &Permutation) -> Result<BigCount> {
        self.eval(&CountQuery {
            kind: CountKind::Multiplicity,
            target: QueryTarget::Perm(p.clone()),
        })
    }

    /// Evaluates a counting query by enumeration.
    pub fn eval(&self, query: &CountQuery) -> Result<BigCount> {
        let norm = self.normalize(query)?;
        if let Some(hit) = self.cache.get(&norm) {
            return Ok(hit.clone());
        }
        let value = match &norm {
            NormQuery::Word { filter, mapping } => {
                self.check_cap("word enumeration", mapping.len(), self.caps.word_support)?;
                BigCount::from(count_word_filtered(mapping, *filter, &[], &[]))
            }
            NormQuery::WordUniUpper { mapping, upper } => {
                self.check_cap("word enumeration", mapping.len(), self.caps.word_support)?;
                let lower: Vec<usize> =
                    (0..mapping.len()).filter(|v| !upper.contains(v)).collect();
                BigCount::from(count_word_filtered(mapping, 2, upper, &lower))
            }
            NormQuery::Rooted {
                root,
                mapping,
                beta_plus_at_least,
                beta_minus_below,
                min_edge,
            } => {
                self.check_cap("rooted enumeration", mapping.len(), self.caps.tree_support)?;
                BigCount::from(count_rooted(
                    mapping,
                    *root,
                    *beta_plus_at_least,
                    *beta_minus_below,
                    *min_edge,
                ))
            }
            NormQuery::Split {
                k,
                min_edge_only,
                pattern,
            } => self.eval_bar(pattern, *k, *min_edge_only)?,
        };
        self.cache.entry(norm).or_insert(value.clone());
        Ok(value)
    }

    /// Tallies every word of `{1, ..., n}` by the permutation it produces.
    ///
    /// Enumeration is partitioned by the first entry and merged by addition,
    /// so the result is identical for any thread count.
    pub fn count_all(&self, n: usize, mode: Mode) -> Result<Arc<BTreeMap<Permutation, BigCount>>> {
        let cap = match mode {
            Mode::Uniform => self.caps.word_support,
            Mode::Permutation => self.caps.perm_word_support,
        };
        self.check_cap("full tally", n, cap)?;
        if let Some(hit) = self.tallies.get(&(n, mode)) {
            return Ok(hit.clone());
        }
        let merged: BTreeMap<Vec<usize>, u64> = (0..n.max(1))
            .into_par_iter()
            .map(|first| {
                let mut local: BTreeMap<Vec<usize>, u64> = BTreeMap::new();
                if n == 0 {
                    local.insert(Vec::new(), 1);
                    return local;
                }
                let mut tally = |word: &[usize]| {
                    let mut image = [0usize; MAX_SUPPORT];
                    induced(word, &mut image);
                    *local.entry(image[..n].to_vec()).or_default() += 1;
                };
                match mode {
                    Mode::Uniform => for_each_word_with_first(n, first, &mut tally),
                    Mode::Permutation => {
                        let rest: Vec<usize> = (0..n).filter(|&v| v != first).collect();
                        let len = rest.len();
                        let mut word = vec![first; n];
                        for tail in rest.into_iter().permutations(len) {
                            word[1..].copy_from_slice(&tail);
                            tally(&word);
                        }
                    }
                }
                local
            })
            .reduce(BTreeMap::new, |mut a, b| {
                for (key, v) in b {
                    *a.entry(key).or_default() += v;
                }
                a
            });
        let map: BTreeMap<Permutation, BigCount> = merged
            .into_iter()
            .map(|(image, count)| {
                let perm =
                    Permutation::from_images(image.iter().map(|&v| v as u32 + 1).collect())
                        .expect("induced images are bijections");
                (perm, BigCount::from(count))
            })
            .collect();
        let arc = Arc::new(map);
        self.tallies.insert((n, mode), arc.clone());
        Ok(arc)
    }

    /// Exact distribution of fixed-point counts over all words.
    pub fn fixed_point_dist(&self, n: usize, mode: Mode) -> Result<Vec<BigRational>> {
        let tally = self.count_all(n, mode)?;
        let mut buckets = vec![BigCount::zero(); n + 1];
        for (perm, count) in tally.iter() {
            buckets[perm.fixed_points()] += count;
        }
        let total: BigCount = buckets.iter().sum();
        debug_assert_eq!(total, total_words(n, mode));
        let total = num_bigint::BigInt::from(total);
        Ok(buckets
            .into_iter()
            .map(|b| BigRational::new(num_bigint::BigInt::from(b), total.clone()))
            .collect())
    }

    /// Words whose digraph is a single component, tallied by the number of
    /// fixed points of the produced permutation. Index `k` of the result is
    /// the count with `k` fixed points.
    pub fn connected_counts(&self, n: usize, mode: Mode) -> Result<Vec<BigCount>> {
        let cap = match mode {
            Mode::Uniform => self.caps.word_support,
            Mode::Permutation => self.caps.perm_word_support,
        };
        self.check_cap("connected tally", n, cap)?;
        if n == 0 {
            return Ok(vec![BigCount::one()]);
        }
        let buckets: Vec<u64> = (0..n)
            .into_par_iter()
            .map(|first| {
                let mut local = vec![0u64; n + 1];
                let mut tally = |word: &[usize]| {
                    let scan = scan_components(word);
                    if scan.components == 1 {
                        let mut image = [0usize; MAX_SUPPORT];
                        induced(word, &mut image);
                        let fixed = (0..n).filter(|&i| image[i] == i).count();
                        local[fixed] += 1;
                    }
                };
                match mode {
                    Mode::Uniform => for_each_word_with_first(n, first, &mut tally),
                    Mode::Permutation => {
                        let rest: Vec<usize> = (0..n).filter(|&v| v != first).collect();
                        let len = rest.len();
                        let mut word = vec![first; n];
                        for tail in rest.into_iter().permutations(len) {
                            word[1..].copy_from_slice(&tail);
                            tally(&word);
                        }
                    }
                }
                local
            })
            .reduce(
                || vec![0u64; n + 1],
                |mut a, b| {
                    for (x, y) in a.iter_mut().zip(b) {
                        *x += y;
                    }
                    a
                },
            );
        Ok(buckets.into_iter().map(BigCount::from).collect())
    }

    /// One pass over all `n^n` words, tallying the single-component words by
    /// produced permutation, split by component shape.
    pub fn single_component_tallies(&self, n: usize) -> Result<SingleComponentTallies> {
        self.check_cap("single-component tally", n, self.caps.word_support)?;
        #[derive(Default)]
        struct Local {
            tree: BTreeMap<Vec<usize>, u64>,
            tree_rooted_min: BTreeMap<Vec<usize>, u64>,
            uni: BTreeMap<Vec<usize>, u64>,
        }
        let locals: Vec<Local> = (0..n.max(1))
            .into_par_iter()
            .map(|first| {
                let mut local = Local::default();
                if n == 0 {
                    return local;
                }
                for_each_word_with_first(n, first, &mut |word| {
                    let scan = scan_components(word);
                    if scan.components != 1 {
                        return;
                    }
                    let mut image = [0usize; MAX_SUPPORT];
                    induced(word, &mut image);
                    let key = image[..n].to_vec();
                    if scan.ring_len == 1 {
                        *local.tree.entry(key.clone()).or_default() += 1;
                        if scan.ring_mask & 1 != 0 {
                            *local.tree_rooted_min.entry(key).or_default() += 1;
                        }
                    } else {
                        *local.uni.entry(key).or_default() += 1;
                    }
                });
                local
            })
            .collect();
        let mut tree: BTreeMap<Vec<usize>, u64> = BTreeMap::new();
        let mut tree_rooted_min: BTreeMap<Vec<usize>, u64> = BTreeMap::new();
        let mut uni: BTreeMap<Vec<usize>, u64> = BTreeMap::new();
        for local in locals {
            for (k, v) in local.tree {
                *tree.entry(k).or_default() += v;
            }
            for (k, v) in local.tree_rooted_min {
                *tree_rooted_min.entry(k).or_default() += v;
            }
            for (k, v) in local.uni {
                *uni.entry(k).or_default() += v;
            }
        }
        let lift = |m: BTreeMap<Vec<usize>, u64>| {
            m.into_iter()
                .map(|(image, count)| {
                    let perm =
                        Permutation::from_images(image.iter().map(|&v| v as u32 + 1).collect())
                            .expect("induced images are bijections");
                    (perm, BigCount::from(count))
                })
                .collect()
        };
        Ok(SingleComponentTallies {
            tree: lift(tree),
            tree_rooted_min: lift(tree_rooted_min),
            uni: lift(uni),
        })
    }

    fn check_cap(&self, what: &'static str, requested: usize, cap: usize) -> Result<()> {
        if requested > cap {
            return Err(Error::CapExceeded {
                what,
                requested,
                cap,
            });
        }
        Ok(())
    }

    /// Rewrites a query into rank space over its ground set.
    fn normalize(&self, query: &CountQuery) -> Result<NormQuery> {
        use CountKind::*;
        match &query.kind {
            Multiplicity | Tree | Uni => {
                let (support, mapping) = target_mapping(&query.target)?;
                drop(support);
                let filter = match query.kind {
                    Multiplicity => 0,
                    Tree => 1,
                    _ => 2,
                };
                Ok(NormQuery::Word { filter, mapping })
            }
            UniUpper => {
                let QueryTarget::Pair(a, b) = &query.target else {
                    return Err(Error::InvalidOperand(
                        "upper-cycle count needs a pair of cycles".into(),
                    ));
                };
                let (support, mapping) = target_mapping(&query.target)?;
                let upper: Vec<usize> = a
                    .elements()
                    .iter()
                    .map(|v| support.binary_search(v).unwrap())
                    .sorted()
                    .collect();
                debug_assert_eq!(upper.len(), a.len());
                let _ = b;
                Ok(NormQuery::WordUniUpper { mapping, upper })
            }
            RootedAt(x) => {
                let QueryTarget::Cycle(d) = &query.target else {
                    return Err(Error::InvalidOperand(
                        "rooted count needs a single cycle".into(),
                    ));
                };
                let support = d.support();
                let root = support
                    .binary_search(x)
                    .map_err(|_| Error::InvalidOperand(format!("root {x} not in the cycle")))?;
                let mapping = cycles_to_mapping(&support, &[d.elements()]);
                Ok(NormQuery::Rooted {
                    root,
                    mapping,
                    beta_plus_at_least: 0,
                    beta_minus_below: support.len(),
                    min_edge: false,
                })
            }
            DummyRooted
            | DummyRootedMaxChildGt(_)
            | DummyRootedMinChildLt(_)
            | DummyRootedMinEdge => {
                let QueryTarget::Cycle(d) = &query.target else {
                    return Err(Error::InvalidOperand(
                        "rooted count needs a single cycle".into(),
                    ));
                };
                // Support is the cycle plus the dummy root 0; the target is
                // the cycle extended through the root.
                let mut support = d.support();
                support.insert(0, 0);
                let mut extended: Vec<u32> = d.elements().to_vec();
                extended.push(0);
                let mapping = cycles_to_mapping(&support, &[&extended]);
                let r = support.len();
                let (mut beta_plus_at_least, mut beta_minus_below, mut min_edge) = (0, r, false);
                match query.kind {
                    DummyRootedMaxChildGt(x) => {
                        beta_plus_at_least = support.iter().filter(|&&s| s <= x).count();
                    }
                    DummyRootedMinChildLt(x) => {
                        beta_minus_below = support.iter().filter(|&&s| s < x).count();
                    }
                    DummyRootedMinEdge => min_edge = true,
                    _ => {}
                }
                Ok(NormQuery::Rooted {
                    root: 0,
                    mapping,
                    beta_plus_at_least,
                    beta_minus_below,
                    min_edge,
                })
            }
            CyclicSplit(k) | CyclicSplitMinEdge(k) => {
                let QueryTarget::Cycle(d) = &query.target else {
                    return Err(Error::InvalidOperand(
                        "split-sum count needs a single cycle".into(),
                    ));
                };
                if *k == 0 || *k > d.len() {
                    return Err(Error::InvalidOperand(format!(
                        "cannot split a cycle of length {} into {k} blocks",
                        d.len()
                    )));
                }
                let support = d.support();
                let pattern: Vec<usize> = d
                    .elements()
                    .iter()
                    .map(|v| support.binary_search(v).unwrap())
                    .collect();
                Ok(NormQuery::Split {
                    k: *k,
                    min_edge_only: matches!(query.kind, CyclicSplitMinEdge(_)),
                    pattern,
                })
            }
        }
    }

    /// Sum over cyclic splits into `k` blocks of products of rooted counts.
    fn eval_bar(&self, pattern: &[usize], k: usize, min_edge_only: bool) -> Result<BigCount> {
        let len = pattern.len();
        // Rank space is already order-isomorphic; shift ranks up by one so 0
        // is free for the dummy root.
        let elements: Vec<u32> = pattern.iter().map(|&r| r as u32 + 1).collect();
        let mut total = BigCount::zero();
        // A labeled split is a rotation (start of the first block) plus a
        // composition of the length into k positive parts.
        for start in 0..len {
            let rotated: Vec<u32> = (0..len)
                .map(|i| elements[(start + i) % len])
                .collect();
            for cuts in compositions(len, k) {
                let mut offset = 0;
                let mut product = BigCount::one();
                for &size in &cuts {
                    let block = &rotated[offset..offset + size];
                    offset += size;
                    let seq = CycleSeq::new(block.to_vec()).expect("split blocks are distinct");
                    let kind = if min_edge_only && block.contains(&1) {
                        // Rank 1 is the smallest element; its block's tree
                        // must contain the edge to the root.
                        CountKind::DummyRootedMinEdge
                    } else {
                        CountKind::DummyRooted
                    };
                    product *= self.eval(&CountQuery {
                        kind,
                        target: QueryTarget::Cycle(seq),
                    })?;
                    if product.is_zero() {
                        break;
                    }
                }
                total += product;
            }
        }
        Ok(total)
    }
}

/// Single-component tallies produced by one enumeration pass.
pub struct SingleComponentTallies {
    /// Words whose digraph is one tree component, by produced permutation.
    pub tree: BTreeMap<Permutation, BigCount>,
    /// The subset of tree words whose ring sits at the smallest vertex.
    pub tree_rooted_min: BTreeMap<Permutation, BigCount>,
    /// Words whose digraph is one unicycle, by produced permutation.
    pub uni: BTreeMap<Permutation, BigCount>,
}

/// Total number of words in the given mode.
pub fn total_words(n: usize, mode: Mode) -> BigCount {
    match mode {
        Mode::Uniform => BigCount::from(n).pow(n as u32),
        Mode::Permutation => (1..=n).map(BigCount::from).product(),
    }
}

pub(crate) const MAX_SUPPORT: usize = 32;

/// Builds the rank mapping of disjoint cycles over a sorted support.
fn cycles_to_mapping(support: &[u32], cycles: &[&[u32]]) -> Vec<usize> {
    let mut mapping: Vec<usize> = (0..support.len()).collect();
    for cycle in cycles {
        for (i, &v) in cycle.iter().enumerate() {
            let next = cycle[(i + 1) % cycle.len()];
            mapping[support.binary_search(&v).unwrap()] = support.binary_search(&next).unwrap();
        }
    }
    mapping
}

/// Ground set and rank mapping of a query target.
fn target_mapping(target: &QueryTarget) -> Result<(Vec<u32>, Vec<usize>)> {
    match target {
        QueryTarget::Perm(p) => {
            let support: Vec<u32> = (1..=p.degree() as u32).collect();
            let mapping = p.images().iter().map(|&v| v as usize - 1).collect();
            Ok((support, mapping))
        }
        QueryTarget::Cycle(c) => {
            let support = c.support();
            let mapping = cycles_to_mapping(&support, &[c.elements()]);
            Ok((support, mapping))
        }
        QueryTarget::Pair(a, b) => {
            let mut support = a.support();
            support.extend(b.support());
            support.sort_unstable();
            if support.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidOperand(
                    "cycle pair must have disjoint supports".into(),
                ));
            }
            let mapping = cycles_to_mapping(&support, &[a.elements(), b.elements()]);
            Ok((support, mapping))
        }
    }
}

/// The produced permutation of a word, in rank space.
pub(crate) fn induced(word: &[usize], image: &mut [usize; MAX_SUPPORT]) {
    let r = word.len();
    let mut pos = [0usize; MAX_SUPPORT];
    for i in 0..r {
        image[i] = i;
        pos[i] = i;
    }
    for (j, &t) in word.iter().enumerate() {
        if t != j {
            let (pj, pt) = (pos[j], pos[t]);
            image.swap(pj, pt);
            pos.swap(j, t);
        }
    }
}

pub(crate) struct ComponentScan {
    pub components: usize,
    /// Ring data of the most recently found ring; meaningful when
    /// `components == 1`.
    pub ring_len: usize,
    pub ring_mask: u64,
    pub upper_mask: u64,
}

/// Walks the digraph of a word, counting components and extracting the ring
/// of the last component found.
pub(crate) fn scan_components(word: &[usize]) -> ComponentScan {
    let r = word.len();
    let unassigned = usize::MAX;
    let mut comp = [unassigned; MAX_SUPPORT];
    let mut stamp = [unassigned; MAX_SUPPORT];
    let mut path = [0usize; MAX_SUPPORT];
    let mut components = 0;
    let mut ring_len = 0;
    let mut ring_mask = 0u64;
    let mut upper_mask = 0u64;
    for start in 0..r {
        if comp[start] != unassigned {
            continue;
        }
        let mut len = 0;
        let mut v = start;
        while comp[v] == unassigned && stamp[v] != start {
            stamp[v] = start;
            path[len] = v;
            len += 1;
            v = word[v];
        }
        let cid = if comp[v] != unassigned {
            comp[v]
        } else {
            let pos = path[..len].iter().position(|&x| x == v).unwrap();
            ring_len = len - pos;
            ring_mask = 0;
            upper_mask = 0;
            for i in pos..len {
                ring_mask |= 1 << path[i];
                if ring_len > 1 {
                    let pred = if i == pos { path[len - 1] } else { path[i - 1] };
                    if pred < path[i] {
                        upper_mask |= 1 << path[i];
                    }
                }
            }
            components += 1;
            components - 1
        };
        for &x in &path[..len] {
            comp[x] = cid;
        }
    }
    ComponentScan {
        components,
        ring_len,
        ring_mask,
        upper_mask,
    }
}

/// Enumerates words over ranks `0..r` with a fixed first entry.
fn for_each_word_with_first(r: usize, first: usize, f: &mut impl FnMut(&[usize])) {
    let mut word = vec![0usize; r];
    word[0] = first;
    if r == 1 {
        f(&word);
        return;
    }
    loop {
        f(&word);
        let mut i = 1;
        while i < r {
            if word[i] + 1 < r {
                word[i] += 1;
                break;
            }
            word[i] = 0;
            i += 1;
        }
        if i == r {
            return;
        }
    }
}

/// Counts words producing `mapping` under a digraph filter:
/// 0 = any digraph, 1 = single tree component, 2 = single unicycle. For
/// filter 2 a nonempty `upper`/`lower` pair additionally pins which target
/// elements must sit on the upper and lower side of the ring.
fn count_word_filtered(mapping: &[usize], filter: u8, upper: &[usize], lower: &[usize]) -> u64 {
    let r = mapping.len();
    if r == 0 {
        return if filter == 0 { 1 } else { 0 };
    }
    let upper_required: u64 = upper.iter().map(|&v| 1u64 << v).sum();
    let lower_required: u64 = lower.iter().map(|&v| 1u64 << v).sum();
    (0..r)
        .into_par_iter()
        .map(|first| {
            let mut count = 0u64;
            for_each_word_with_first(r, first, &mut |word| {
                let mut image = [0usize; MAX_SUPPORT];
                induced(word, &mut image);
                if image[..r] != *mapping {
                    return;
                }
                if filter == 0 {
                    count += 1;
                    return;
                }
                let scan = scan_components(word);
                if scan.components != 1 {
                    return;
                }
                match filter {
                    1 if scan.ring_len == 1 => count += 1,
                    2 if scan.ring_len > 1 => {
                        let ok = (upper_required == 0 && lower_required == 0)
                            || (scan.upper_mask & lower_required == 0
                                && (scan.ring_mask & !scan.upper_mask) & upper_required == 0);
                        if ok {
                            count += 1;
                        }
                    }
                    _ => {}
                }
            });
            count
        })
        .sum()
}

/// Whether every vertex of the word's digraph reaches `root`, where the root
/// carries a self-loop. Equivalent to the digraph being one tree component.
fn reaches_root_everywhere(word: &[usize], root: usize) -> bool {
    let r = word.len();
    // 0 = unknown, 1 = reaches root, 2 = in progress.
    let mut state = [0u8; MAX_SUPPORT];
    state[root] = 1;
    let mut path = [0usize; MAX_SUPPORT];
    for start in 0..r {
        if state[start] != 0 {
            continue;
        }
        let mut len = 0;
        let mut v = start;
        while state[v] == 0 {
            state[v] = 2;
            path[len] = v;
            len += 1;
            v = word[v];
        }
        if state[v] == 2 {
            return false; // closed a cycle away from the root
        }
        for &x in &path[..len] {
            state[x] = 1;
        }
    }
    true
}

/// Counts rooted words (fixed `word[root] = root`, all other entries free)
/// whose digraph is a single tree component producing `mapping`, filtered by
/// the in-neighbors of the root.
fn count_rooted(
    mapping: &[usize],
    root: usize,
    beta_plus_at_least: usize,
    beta_minus_below: usize,
    min_edge: bool,
) -> u64 {
    let r = mapping.len();
    let free: Vec<usize> = (0..r).filter(|&v| v != root).collect();
    if free.is_empty() {
        // The lone vertex is the root; the empty tree produces the 1-cycle.
        return if mapping[root] == root && beta_plus_at_least == 0 { 1 } else { 0 };
    }
    // The smallest non-root vertex: rank 0 is the dummy root when present.
    let min_vertex = free[0];
    (0..r)
        .into_par_iter()
        .map(|first_choice| {
            let mut count = 0u64;
            let mut word = vec![0usize; r];
            word[root] = root;
            word[free[0]] = first_choice;
            // Odometer over the remaining free positions.
            let rest = &free[1..];
            loop {
                let ok = (!min_edge || word[min_vertex] == root)
                    && reaches_root_everywhere(&word, root)
                    && {
                        let mut image = [0usize; MAX_SUPPORT];
                        induced(&word, &mut image);
                        image[..r] == *mapping
                    }
                    && {
                        let beta_plus =
                            (0..r).rev().find(|&v| v != root && word[v] == root);
                        let beta_minus = (0..r).find(|&v| v != root && word[v] == root);
                        match (beta_plus, beta_minus) {
                            (Some(bp), Some(bm)) => {
                                bp >= beta_plus_at_least && bm < beta_minus_below
                            }
                            _ => false,
                        }
                    };
                if ok {
                    count += 1;
                }
                let mut i = 0;
                while i < rest.len() {
                    if word[rest[i]] + 1 < r {
                        word[rest[i]] += 1;
                        break;
                    }
                    word[rest[i]] = 0;
                    i += 1;
                }
                if i == rest.len() {
                    break;
                }
            }
            count
        })
        .sum()
}

/// All compositions of `n` into `k` positive parts.
fn compositions(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn helper(rest: usize, parts: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 1 {
            cur.push(rest);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for first in 1..=rest - (parts - 1) {
            cur.push(first);
            helper(rest - first, parts - 1, cur, out);
            cur.pop();
        }
    }
    if k >= 1 && n >= k {
        helper(n, k, &mut cur, &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyc(elements: &[u32]) -> CycleSeq {
        CycleSeq::new(elements.to_vec()).unwrap()
    }

    fn count(oracle: &Oracle, kind: CountKind, target: QueryTarget) -> u64 {
        use num_traits::ToPrimitive;
        oracle
            .eval(&CountQuery { kind, target })
            .unwrap()
            .to_u64()
            .unwrap()
    }

    #[test]
    fn tiny_full_tallies() {
        let oracle = Oracle::default();
        let t1 = oracle.count_all(1, Mode::Uniform).unwrap();
        assert_eq!(t1.len(), 1);
        assert_eq!(t1[&Permutation::identity(1)], BigCount::from(1u32));

        let t2 = oracle.count_all(2, Mode::Uniform).unwrap();
        assert_eq!(t2[&Permutation::identity(2)], BigCount::from(2u32));
        let swap = Permutation::parse_cycles("(2 1)", Some(2)).unwrap();
        assert_eq!(t2[&swap], BigCount::from(2u32));
        let total: BigCount = t2.values().sum();
        assert_eq!(total, total_words(2, Mode::Uniform));

        let p2 = oracle.count_all(2, Mode::Permutation).unwrap();
        assert_eq!(p2.len(), 1);
        assert_eq!(p2[&Permutation::identity(2)], BigCount::from(2u32));

        let t0 = oracle.count_all(0, Mode::Uniform).unwrap();
        assert_eq!(t0[&Permutation::empty()], BigCount::from(1u32));
    }

    #[test]
    fn word_kind_counts() {
        let oracle = Oracle::default();
        // The identity on two points has one unicycle representation and one
        // two-tree representation.
        let id2 = QueryTarget::Pair(cyc(&[1]), cyc(&[2]));
        assert_eq!(count(&oracle, CountKind::Uni, id2.clone()), 1);
        assert_eq!(count(&oracle, CountKind::Multiplicity, id2), 2);
        // Tree representations of the falling 3-cycle.
        assert_eq!(
            count(&oracle, CountKind::Tree, QueryTarget::Cycle(cyc(&[3, 2, 1]))),
            5
        );
        // Counts only depend on the order pattern of the support.
        assert_eq!(
            count(&oracle, CountKind::Tree, QueryTarget::Cycle(cyc(&[9, 5, 2]))),
            5
        );
    }

    #[test]
    fn rooted_counts_frozen_values() {
        let oracle = Oracle::default();
        assert_eq!(count(&oracle, CountKind::DummyRooted, QueryTarget::Cycle(cyc(&[1]))), 1);
        assert_eq!(
            count(&oracle, CountKind::DummyRooted, QueryTarget::Cycle(cyc(&[3, 2]))),
            2
        );
        assert_eq!(
            count(&oracle, CountKind::DummyRooted, QueryTarget::Cycle(cyc(&[2, 3]))),
            1
        );
        // Rooted at an element of the cycle itself (no dummy): the falling
        // cycle rooted at its minimum.
        assert_eq!(
            count(
                &oracle,
                CountKind::RootedAt(1),
                QueryTarget::Cycle(cyc(&[3, 2, 1]))
            ),
            2
        );
        assert!(oracle
            .eval(&CountQuery {
                kind: CountKind::RootedAt(7),
                target: QueryTarget::Cycle(cyc(&[3, 2, 1])),
            })
            .is_err());
    }

    #[test]
    fn root_child_filters_bounded_by_total() {
        let oracle = Oracle::default();
        let d = cyc(&[4, 2, 5]);
        let all = count(&oracle, CountKind::DummyRooted, QueryTarget::Cycle(d.clone()));
        // beta_plus > x plus beta_plus <= x partitions the tree set; the
        // complement of "beta_plus > x" is counted via the total.
        for x in [1, 2, 3, 4, 5, 6] {
            let gt = count(
                &oracle,
                CountKind::DummyRootedMaxChildGt(x),
                QueryTarget::Cycle(d.clone()),
            );
            assert!(gt <= all);
            let lt = count(
                &oracle,
                CountKind::DummyRootedMinChildLt(x),
                QueryTarget::Cycle(d.clone()),
            );
            assert!(lt <= all);
        }
        // Every tree has some in-neighbor of the root, so beta_plus exceeds 0
        // vacuously and beta_minus sits below anything huge.
        assert_eq!(
            count(&oracle, CountKind::DummyRootedMaxChildGt(0), QueryTarget::Cycle(d.clone())),
            all
        );
        assert_eq!(
            count(&oracle, CountKind::DummyRootedMinChildLt(9), QueryTarget::Cycle(d)),
            all
        );
    }

    #[test]
    fn bar_split_sums() {
        let oracle = Oracle::default();
        // Splits of (3 2) into one block: the two rotations.
        assert_eq!(count(&oracle, CountKind::CyclicSplit(1), QueryTarget::Cycle(cyc(&[3, 2]))), 3);
        // Two singleton blocks, two rotations.
        assert_eq!(count(&oracle, CountKind::CyclicSplit(2), QueryTarget::Cycle(cyc(&[3, 2]))), 2);
        // The min-edge variant keeps only tuples whose minimum block uses
        // the root edge.
        let bar = count(&oracle, CountKind::CyclicSplit(1), QueryTarget::Cycle(cyc(&[3, 2, 1])));
        let bar_prime = count(
            &oracle,
            CountKind::CyclicSplitMinEdge(1),
            QueryTarget::Cycle(cyc(&[3, 2, 1])),
        );
        assert!(bar_prime <= bar);
        assert!(oracle
            .eval(&CountQuery {
                kind: CountKind::CyclicSplit(4),
                target: QueryTarget::Cycle(cyc(&[3, 2, 1])),
            })
            .is_err());
    }

    #[test]
    fn distributions_and_connected_counts() {
        let oracle = Oracle::default();
        let d = oracle.fixed_point_dist(2, Mode::Uniform).unwrap();
        let half = BigRational::new(1.into(), 2.into());
        assert_eq!(d, vec![half.clone(), BigRational::zero(), half]);
        let dbar = oracle.fixed_point_dist(2, Mode::Permutation).unwrap();
        assert_eq!(
            dbar,
            vec![BigRational::zero(), BigRational::zero(), BigRational::one()]
        );

        let t = oracle.connected_counts(2, Mode::Uniform).unwrap();
        assert_eq!(t, vec![BigCount::from(2u32), BigCount::zero(), BigCount::one()]);
    }

    #[test]
    fn caps_are_enforced() {
        let oracle = Oracle::new(OracleCaps {
            word_support: 3,
            perm_word_support: 3,
            tree_support: 4,
        });
        assert!(matches!(
            oracle.count_all(4, Mode::Uniform),
            Err(Error::CapExceeded { .. })
        ));
        assert!(oracle
            .eval(&CountQuery {
                kind: CountKind::Multiplicity,
                target: QueryTarget::Perm(Permutation::identity(4)),
            })
            .is_err());
        // Tree kinds get the larger cap: support 3 plus dummy root = 4 is ok.
        assert!(oracle
            .eval(&CountQuery {
                kind: CountKind::DummyRooted,
                target: QueryTarget::Cycle(cyc(&[3, 2, 1])),
            })
            .is_ok());
    }

    #[test]
    fn single_component_tallies_agree_with_kind_counts() {
        let oracle = Oracle::default();
        let tallies = oracle.single_component_tallies(4).unwrap();
        let falling = cyc(&[4, 3, 2, 1]);
        let tree = count(&oracle, CountKind::Tree, QueryTarget::Cycle(falling.clone()));
        let perm = falling.to_permutation(4).unwrap();
        assert_eq!(tallies.tree[&perm], BigCount::from(tree));
        let pair = QueryTarget::Pair(cyc(&[4, 3]), cyc(&[2, 1]));
        let uni = count(&oracle, CountKind::Uni, pair);
        let split = Permutation::parse_cycles("(4 3)(2 1)", Some(4)).unwrap();
        assert_eq!(tallies.uni[&split], BigCount::from(uni));
        // Rooted-at-minimum tree words are a subset of tree words.
        for (perm, c) in &tallies.tree_rooted_min {
            assert!(c <= &tallies.tree[perm]);
        }
    }
}
