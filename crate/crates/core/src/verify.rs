//! Named verification batteries that cross-check the structured counting
//! engine, the enumeration oracle, the series machinery, and the extremal
//! search against one another and against frozen closed forms.
//!
//! Each check produces a [`CheckOutcome`] with a coverage summary or, on
//! failure, the first counterexample found. Exhaustive sweeps are bounded
//! by [`VerifyConfig::n_max`] (individual checks clamp it further to stay
//! tractable); randomized checks draw from the fixed [`VerifyConfig::seed`]
//! so every run is reproducible.

use std::time::Instant;

use itertools::Itertools;
use num_traits::{CheckedSub, One, Signed, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::engine::Engine;
use crate::extremal::{self, ClassMaxReport};
use crate::oracle::{CountKind, CountQuery, Oracle, QueryTarget};
use crate::perm::{partitions, CycleSeq, PartitionClass, Permutation};
use crate::series::{self, Rat, UPoly, Z_MAX};
use crate::word::{ComponentKind, InducedCycles, ShuffleWord};
use crate::{BigCount, Mode};

/// Identifies one of the verification batteries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    /// Word-level bijections behind the counting symmetries.
    Symmetry,
    /// Digraph anatomy, recombination, and the cyclic split identities.
    Structure,
    /// Generating-function identities and fixed-point laws.
    Series,
    /// Maxima by class, winner tables, and growth bounds.
    Extremal,
    /// Every battery in order.
    All,
}

impl Suite {
    /// The concrete batteries, in reporting order.
    pub const CONCRETE: [Suite; 4] = [
        Suite::Symmetry,
        Suite::Structure,
        Suite::Series,
        Suite::Extremal,
    ];

    /// Lowercase name used by reports and the command line.
    pub fn as_str(&self) -> &'static str {
        match self {
            Suite::Symmetry => "symmetry",
            Suite::Structure => "structure",
            Suite::Series => "series",
            Suite::Extremal => "extremal",
            Suite::All => "all",
        }
    }
}

/// Tuning knobs for a verification run.
#[derive(Clone, Copy, Debug)]
pub struct VerifyConfig {
    /// Budget for exhaustive enumeration; oracle sweeps never exceed this
    /// degree. Checks with tighter intrinsic limits clamp it further.
    pub n_max: usize,
    /// Seed for the randomized spot checks.
    pub seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            n_max: 7,
            seed: 0x00c0_ffee,
        }
    }
}

/// Result of one named check.
#[derive(Clone, Debug)]
pub struct CheckOutcome {
    /// Stable name of the check.
    pub name: &'static str,
    /// Whether the claim held everywhere the check looked.
    pub passed: bool,
    /// Coverage summary, or the first counterexample.
    pub detail: String,
    /// Wall-clock duration of the check.
    pub millis: u128,
}

/// `Ok` carries a coverage summary, `Err` the first counterexample.
type CheckResult = std::result::Result<String, String>;

/// Runs one battery (or all of them) and reports each named check.
pub fn run_suite(
    oracle: &Oracle,
    engine: &Engine,
    suite: Suite,
    cfg: &VerifyConfig,
) -> Vec<CheckOutcome> {
    let mut out = Vec::new();
    match suite {
        Suite::Symmetry => symmetry_suite(oracle, engine, cfg, &mut out),
        Suite::Structure => structure_suite(oracle, engine, cfg, &mut out),
        Suite::Series => series_suite(oracle, cfg, &mut out),
        Suite::Extremal => extremal_suite(oracle, engine, cfg, &mut out),
        Suite::All => {
            for concrete in Suite::CONCRETE {
                out.extend(run_suite(oracle, engine, concrete, cfg));
            }
        }
    }
    out
}

fn run_check(
    name: &'static str,
    out: &mut Vec<CheckOutcome>,
    f: impl FnOnce() -> crate::Result<CheckResult>,
) {
    let start = Instant::now();
    let (passed, detail) = match f() {
        Ok(Ok(detail)) => (true, detail),
        Ok(Err(counterexample)) => (false, counterexample),
        Err(e) => (false, format!("internal error: {e}")),
    };
    out.push(CheckOutcome {
        name,
        passed,
        detail,
        millis: start.elapsed().as_millis(),
    });
}

// ---------------------------------------------------------------------------
// Shared enumeration helpers
// ---------------------------------------------------------------------------

/// Calls `f` on every word of the given degree; stops at the first failure.
fn for_each_word(
    n: usize,
    mut f: impl FnMut(&ShuffleWord) -> std::result::Result<(), String>,
) -> std::result::Result<u64, String> {
    let mut entries = vec![1u32; n];
    let mut seen = 0u64;
    loop {
        let word = ShuffleWord::new(entries.clone()).expect("entries are in range");
        f(&word)?;
        seen += 1;
        let mut j = n;
        loop {
            if j == 0 {
                return Ok(seen);
            }
            if entries[j - 1] < n as u32 {
                entries[j - 1] += 1;
                break;
            }
            entries[j - 1] = 1;
            j -= 1;
        }
    }
}

/// All permutations of degree `k`, identity first for `k <= 1`.
fn permutations_of_degree(k: usize) -> Vec<Permutation> {
    if k == 0 {
        return vec![Permutation::empty()];
    }
    (1..=k as u32)
        .permutations(k)
        .map(|images| Permutation::from_images(images).expect("images form a permutation"))
        .collect()
}

/// All cycles on `{1..m}`, one representative each, written ending at 1.
fn cycles_ending_at_one(m: usize) -> Vec<CycleSeq> {
    if m == 1 {
        return vec![CycleSeq::new(vec![1]).expect("singleton cycle")];
    }
    (2..=m as u32)
        .permutations(m - 1)
        .map(|mut prefix| {
            prefix.push(1);
            CycleSeq::new(prefix).expect("distinct elements")
        })
        .collect()
}

/// Compositions of `total` into `k` positive parts.
fn compositions(total: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    if total < k {
        return vec![];
    }
    if k == 1 {
        return vec![vec![total]];
    }
    let mut acc = Vec::new();
    for head in 1..=total - (k - 1) {
        for mut tail in compositions(total - head, k - 1) {
            tail.insert(0, head);
            acc.push(tail);
        }
    }
    acc
}

/// A uniformly random permutation of degree `n`.
fn random_permutation(rng: &mut StdRng, n: usize) -> Permutation {
    let mut images: Vec<u32> = (1..=n as u32).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        images.swap(i, j);
    }
    Permutation::from_images(images).expect("shuffled images form a permutation")
}

fn big_pow(base: u64, exp: usize) -> BigCount {
    BigCount::from(base).pow(exp as u32)
}

fn factorial(n: usize) -> BigCount {
    (1..=n as u64).fold(BigCount::one(), |acc, k| acc * BigCount::from(k))
}

/// Shorthand for an oracle evaluation on a cycle target.
fn eval_cycle(oracle: &Oracle, kind: CountKind, cycle: &CycleSeq) -> crate::Result<BigCount> {
    oracle.eval(&CountQuery {
        kind,
        target: QueryTarget::Cycle(cycle.clone()),
    })
}

/// Sum over pairings of `{0..count}`: unpaired indices contribute `tree(i)`,
/// paired indices contribute `pair(i, j)`.
fn pairing_sum(
    count: usize,
    tree: &mut dyn FnMut(usize) -> crate::Result<BigCount>,
    pair: &mut dyn FnMut(usize, usize) -> crate::Result<BigCount>,
) -> crate::Result<BigCount> {
    fn rec(
        used: &mut [bool],
        tree: &mut dyn FnMut(usize) -> crate::Result<BigCount>,
        pair: &mut dyn FnMut(usize, usize) -> crate::Result<BigCount>,
    ) -> crate::Result<BigCount> {
        let Some(i) = used.iter().position(|&u| !u) else {
            return Ok(BigCount::one());
        };
        used[i] = true;
        let mut total = tree(i)? * rec(used, tree, pair)?;
        for j in (i + 1)..used.len() {
            if used[j] {
                continue;
            }
            used[j] = true;
            total += pair(i, j)? * rec(used, tree, pair)?;
            used[j] = false;
        }
        used[i] = false;
        Ok(total)
    }
    let mut used = vec![false; count];
    rec(&mut used, tree, pair)
}

// ---------------------------------------------------------------------------
// Symmetry suite
// ---------------------------------------------------------------------------

fn symmetry_suite(oracle: &Oracle, engine: &Engine, cfg: &VerifyConfig, out: &mut Vec<CheckOutcome>) {
    run_check("flip word bijection", out, || Ok(check_flip_words(cfg)));
    run_check("flip tally symmetry", out, || {
        check_flip_tally(oracle, cfg)
    });
    run_check("block swap bijection", out, || Ok(check_block_swap(cfg)));
    run_check("middle block swap counts", out, || {
        check_middle_block_swap(oracle, cfg)
    });
    run_check("first block flip counts", out, || {
        check_first_block_flip(oracle, cfg)
    });
    run_check("randomized concatenation symmetries", out, || {
        check_random_symmetries(engine, cfg)
    });
}

/// Reversing positions while reflecting targets is an involution on words
/// whose induced permutation is the flip of the original.
fn check_flip_words(cfg: &VerifyConfig) -> CheckResult {
    let hi = cfg.n_max.min(6);
    let mut total = 0u64;
    for n in 1..=hi {
        total += for_each_word(n, |w| {
            let flipped = w.flipped();
            if flipped.flipped() != *w {
                return Err(format!("flip is not involutive on word {:?}", w.entries()));
            }
            if flipped.apply() != w.apply().flip() {
                return Err(format!(
                    "flip of word {:?} does not produce the flipped permutation",
                    w.entries()
                ));
            }
            Ok(())
        })?;
    }
    Ok(format!("{total} words through degree {hi}"))
}

/// Whole-tally consequence of the flip bijection: every permutation has the
/// same count as its flip, in both word models.
fn check_flip_tally(oracle: &Oracle, cfg: &VerifyConfig) -> crate::Result<CheckResult> {
    let hi = cfg.n_max.min(6);
    let mut compared = 0u64;
    for n in 1..=hi {
        for mode in [Mode::Uniform, Mode::Permutation] {
            let tally = oracle.count_all(n, mode)?;
            for (perm, count) in tally.iter() {
                let mirrored = perm.flip();
                let other = tally.get(&mirrored).cloned().unwrap_or_default();
                if other != *count {
                    return Ok(Err(format!(
                        "degree {n} {} tally differs between {perm} and its flip {mirrored}",
                        mode.as_str()
                    )));
                }
                compared += 1;
            }
        }
    }
    Ok(Ok(format!(
        "{compared} tally entries through degree {hi}, both modes"
    )))
}

/// The block-swap map is a bijection between representations of `p || q`
/// and representations of `q || p`, and rejects words that do not respect
/// the blocks.
fn check_block_swap(cfg: &VerifyConfig) -> CheckResult {
    let hi = cfg.n_max.min(6);
    let mut swapped_words = 0u64;
    let mut rejected_words = 0u64;
    for degree in 2..=hi {
        for first in 1..degree {
            let second = degree - first;
            for_each_word(degree, |w| {
                let perm = w.apply();
                let respects = (1..=first as u32).all(|i| perm.apply(i) <= first as u32);
                match w.swap_concat_blocks(first, second) {
                    Ok(swapped) => {
                        if !respects {
                            return Err(format!(
                                "word {:?} does not respect blocks {first}+{second} but was swapped",
                                w.entries()
                            ));
                        }
                        let bottom = Permutation::from_images(
                            perm.images()[..first].to_vec(),
                        )
                        .map_err(|e| e.to_string())?;
                        let top = Permutation::from_images(
                            perm.images()[first..]
                                .iter()
                                .map(|&v| v - first as u32)
                                .collect(),
                        )
                        .map_err(|e| e.to_string())?;
                        if swapped.apply() != top.concat(&bottom) {
                            return Err(format!(
                                "swap of word {:?} at {first}+{second} produces the wrong permutation",
                                w.entries()
                            ));
                        }
                        let back = swapped
                            .swap_concat_blocks(second, first)
                            .map_err(|e| e.to_string())?;
                        if back != *w {
                            return Err(format!(
                                "swap of word {:?} at {first}+{second} does not round-trip",
                                w.entries()
                            ));
                        }
                        swapped_words += 1;
                    }
                    Err(_) => {
                        if respects {
                            return Err(format!(
                                "word {:?} respects blocks {first}+{second} but was rejected",
                                w.entries()
                            ));
                        }
                        rejected_words += 1;
                    }
                }
                Ok(())
            })?;
        }
    }
    Ok(format!(
        "{swapped_words} words swapped and round-tripped, {rejected_words} correctly rejected, through degree {hi}"
    ))
}

/// Swapping the two middle blocks of a four-block concatenation preserves
/// the count, checked against the full enumeration.
fn check_middle_block_swap(oracle: &Oracle, cfg: &VerifyConfig) -> crate::Result<CheckResult> {
    let hi = cfg.n_max.min(6);
    let by_degree: Vec<Vec<Permutation>> = (0..=hi).map(permutations_of_degree).collect();
    let mut compared = 0u64;
    for n in 1..=hi {
        let tally = oracle.count_all(n, Mode::Uniform)?;
        for a in 0..=n {
            for b in 0..=n - a {
                for c in 0..=n - a - b {
                    let d = n - a - b - c;
                    for r1 in &by_degree[a] {
                        for r2 in &by_degree[b] {
                            for r3 in &by_degree[c] {
                                for r4 in &by_degree[d] {
                                    let plain = r1.concat(r2).concat(r3).concat(r4);
                                    let swapped = r1.concat(r3).concat(r2).concat(r4);
                                    let x = tally.get(&plain).cloned().unwrap_or_default();
                                    let y = tally.get(&swapped).cloned().unwrap_or_default();
                                    if x != y {
                                        return Ok(Err(format!(
                                            "count differs after middle swap: {plain} vs {swapped}"
                                        )));
                                    }
                                    compared += 1;
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(Ok(format!(
        "{compared} four-block concatenations through degree {hi}"
    )))
}

/// Flipping the first block of a concatenation preserves the count, checked
/// against the full enumeration.
fn check_first_block_flip(oracle: &Oracle, cfg: &VerifyConfig) -> crate::Result<CheckResult> {
    let hi = cfg.n_max.min(6);
    let by_degree: Vec<Vec<Permutation>> = (0..=hi).map(permutations_of_degree).collect();
    let mut compared = 0u64;
    for n in 1..=hi {
        let tally = oracle.count_all(n, Mode::Uniform)?;
        for a in 0..=n {
            let b = n - a;
            for r1 in &by_degree[a] {
                for r2 in &by_degree[b] {
                    let plain = r1.concat(r2);
                    let flipped = r1.flip().concat(r2);
                    let x = tally.get(&plain).cloned().unwrap_or_default();
                    let y = tally.get(&flipped).cloned().unwrap_or_default();
                    if x != y {
                        return Ok(Err(format!(
                            "count differs after first-block flip: {plain} vs {flipped}"
                        )));
                    }
                    compared += 1;
                }
            }
        }
    }
    Ok(Ok(format!(
        "{compared} two-block concatenations through degree {hi}"
    )))
}

/// Randomized structured-count spot checks of the three symmetries at
/// degrees beyond the exhaustive range.
fn check_random_symmetries(engine: &Engine, cfg: &VerifyConfig) -> crate::Result<CheckResult> {
    let mut rng = StdRng::seed_from_u64(cfg.seed);
    let hi = 8usize;
    let mut checked = 0u64;

    for _ in 0..60 {
        let n = rng.random_range(1..=hi);
        let perm = random_permutation(&mut rng, n);
        if engine.multiplicity(&perm)? != engine.multiplicity(&perm.flip())? {
            return Ok(Err(format!("count differs between {perm} and its flip")));
        }
        checked += 1;
    }

    for _ in 0..60 {
        let n = rng.random_range(4..=hi);
        let a = rng.random_range(0..=n);
        let b = rng.random_range(0..=n - a);
        let c = rng.random_range(0..=n - a - b);
        let d = n - a - b - c;
        let r1 = random_permutation(&mut rng, a);
        let r2 = random_permutation(&mut rng, b);
        let r3 = random_permutation(&mut rng, c);
        let r4 = random_permutation(&mut rng, d);
        let plain = r1.concat(&r2).concat(&r3).concat(&r4);
        let swapped = r1.concat(&r3).concat(&r2).concat(&r4);
        if engine.multiplicity(&plain)? != engine.multiplicity(&swapped)? {
            return Ok(Err(format!(
                "count differs after middle swap: {plain} vs {swapped}"
            )));
        }
        checked += 1;
    }

    for _ in 0..40 {
        let n = rng.random_range(2..=hi);
        let a = rng.random_range(0..=n);
        let r1 = random_permutation(&mut rng, a);
        let r2 = random_permutation(&mut rng, n - a);
        let plain = r1.concat(&r2);
        let flipped = r1.flip().concat(&r2);
        if engine.multiplicity(&plain)? != engine.multiplicity(&flipped)? {
            return Ok(Err(format!(
                "count differs after first-block flip: {plain} vs {flipped}"
            )));
        }
        checked += 1;
    }

    Ok(Ok(format!(
        "{checked} randomized comparisons through degree {hi} (seed {})",
        cfg.seed
    )))
}

// ---------------------------------------------------------------------------
// Structure suite
// ---------------------------------------------------------------------------

fn structure_suite(oracle: &Oracle, engine: &Engine, cfg: &VerifyConfig, out: &mut Vec<CheckOutcome>) {
    run_check("digraph anatomy", out, || Ok(check_digraph_anatomy(cfg)));
    run_check("structured counts match enumeration", out, || {
        check_structured_counts(oracle, engine, cfg)
    });
    run_check("cycle recombination from enumerated parts", out, || {
        check_recombination(oracle, cfg)
    });
    run_check("cyclic split identities", out, || {
        check_split_identities(oracle, cfg)
    });
    run_check("cyclic split maximizers", out, || {
        check_split_maximizers(oracle, cfg)
    });
    run_check("rooted tree total sweep", out, || {
        check_rooted_total_sweep(oracle, engine, cfg)
    });
}

/// Every word's digraph decomposes into components with exactly one ring;
/// the induced cycles of the components multiply to the word's permutation.
fn check_digraph_anatomy(cfg: &VerifyConfig) -> CheckResult {
    let hi = cfg.n_max.min(6);
    let mut total = 0u64;
    for n in 1..=hi {
        total += for_each_word(n, |w| {
            let label = || format!("word {:?}", w.entries());
            let comps = w.components();
            let mut all: Vec<u32> = comps
                .iter()
                .flat_map(|c| c.vertices.iter().copied())
                .collect();
            all.sort_unstable();
            if all != (1..=n as u32).collect::<Vec<_>>() {
                return Err(format!("{} components do not partition the vertices", label()));
            }
            let mut cycles: Vec<Vec<u32>> = Vec::new();
            for comp in &comps {
                if comp.succ.len() != comp.vertices.len()
                    || comp
                        .succ
                        .iter()
                        .any(|(&v, &t)| w.target(v) != t || !comp.vertices.contains(&v))
                {
                    return Err(format!("{} successor map is wrong", label()));
                }
                let ring = &comp.ring;
                for (idx, &v) in ring.iter().enumerate() {
                    if w.target(v) != ring[(idx + 1) % ring.len()] {
                        return Err(format!("{} ring does not close", label()));
                    }
                }
                for &v in &comp.vertices {
                    let mut x = v;
                    for _ in 0..comp.vertices.len() {
                        x = w.target(x);
                    }
                    if !ring.contains(&x) {
                        return Err(format!("{} walk from {v} misses the ring", label()));
                    }
                }
                let expected_kind = if ring.len() == 1 {
                    ComponentKind::Tree
                } else {
                    ComponentKind::Unicycle
                };
                if comp.kind != expected_kind {
                    return Err(format!("{} component kind is wrong", label()));
                }
                let mut upper = Vec::new();
                let mut lower = Vec::new();
                if ring.len() >= 2 {
                    for idx in 0..ring.len() {
                        let prev = ring[(idx + ring.len() - 1) % ring.len()];
                        if prev < ring[idx] {
                            upper.push(ring[idx]);
                        } else {
                            lower.push(ring[idx]);
                        }
                    }
                    upper.sort_unstable();
                    lower.sort_unstable();
                    if upper.is_empty() || lower.is_empty() {
                        return Err(format!("{} ring split is degenerate", label()));
                    }
                }
                if comp.upper != upper || comp.lower != lower {
                    return Err(format!("{} upper/lower ring split is wrong", label()));
                }
                let hanging_total: usize = comp.hanging.values().map(Vec::len).sum();
                if hanging_total + ring.len() != comp.vertices.len()
                    || comp.hanging.iter().any(|(&parent, children)| {
                        children
                            .iter()
                            .any(|&child| w.target(child) != parent || ring.contains(&child))
                    })
                {
                    return Err(format!("{} hanging trees are wrong", label()));
                }
                match comp.induced_cycles() {
                    InducedCycles::Tree(cycle) => {
                        if comp.kind != ComponentKind::Tree || cycle.support() != comp.vertices {
                            return Err(format!("{} tree cycle is wrong", label()));
                        }
                        cycles.push(cycle.elements().to_vec());
                    }
                    InducedCycles::Unicycle { upper: uc, lower: lc } => {
                        if comp.kind != ComponentKind::Unicycle {
                            return Err(format!("{} unicycle on a tree component", label()));
                        }
                        let mut union = uc.support();
                        union.extend(lc.support());
                        union.sort_unstable();
                        union.dedup();
                        if union != comp.vertices
                            || uc.len() + lc.len() != comp.vertices.len()
                            || comp.upper.iter().any(|v| !uc.support().contains(v))
                            || comp.lower.iter().any(|v| !lc.support().contains(v))
                        {
                            return Err(format!("{} unicycle pair is wrong", label()));
                        }
                        cycles.push(uc.elements().to_vec());
                        cycles.push(lc.elements().to_vec());
                    }
                }
            }
            let product = Permutation::from_cycles(&cycles, n).map_err(|e| e.to_string())?;
            if product != w.apply() {
                return Err(format!(
                    "{} induced cycles do not multiply to the permutation",
                    label()
                ));
            }
            Ok(())
        })?;
    }
    Ok(format!("{total} words through degree {hi}"))
}

/// The structured count agrees with the full enumeration: exhaustively on
/// small degrees, and on a random sample one degree beyond.
fn check_structured_counts(
    oracle: &Oracle,
    engine: &Engine,
    cfg: &VerifyConfig,
) -> crate::Result<CheckResult> {
    let hi = cfg.n_max.min(6);
    let mut compared = 0u64;
    for n in 1..=hi {
        let tally = oracle.count_all(n, Mode::Uniform)?;
        for (perm, count) in tally.iter() {
            if engine.multiplicity(perm)? != *count {
                return Ok(Err(format!("structured count differs at {perm}")));
            }
            compared += 1;
        }
    }
    let mut sampled = 0u64;
    if cfg.n_max >= 7 {
        let tally = oracle.count_all(7, Mode::Uniform)?;
        let mut rng = StdRng::seed_from_u64(cfg.seed ^ 0x7);
        for _ in 0..500 {
            let perm = random_permutation(&mut rng, 7);
            let expected = tally.get(&perm).cloned().unwrap_or_default();
            if engine.multiplicity(&perm)? != expected {
                return Ok(Err(format!("structured count differs at {perm}")));
            }
            sampled += 1;
        }
    }
    Ok(Ok(format!(
        "{compared} permutations through degree {hi} exhaustively, {sampled} sampled at degree 7"
    )))
}

/// The count of a permutation equals the pairing sum over its cycles of
/// enumerated tree and unicycle counts.
fn check_recombination(oracle: &Oracle, cfg: &VerifyConfig) -> crate::Result<CheckResult> {
    let hi = cfg.n_max.min(5);
    let mut compared = 0u64;
    for n in 1..=hi {
        let tally = oracle.count_all(n, Mode::Uniform)?;
        for (perm, count) in tally.iter() {
            let cycles = perm.cycle_decomposition();
            let sum = pairing_sum(
                cycles.len(),
                &mut |i| eval_cycle(oracle, CountKind::Tree, &cycles[i]),
                &mut |i, j| {
                    oracle.eval(&CountQuery {
                        kind: CountKind::Uni,
                        target: QueryTarget::Pair(cycles[i].clone(), cycles[j].clone()),
                    })
                },
            )?;
            if sum != *count {
                return Ok(Err(format!("recombination sum differs at {perm}")));
            }
            compared += 1;
        }
    }
    Ok(Ok(format!("{compared} permutations through degree {hi}")))
}

/// The two linear-split identities tying the cyclic split counts of a cycle
/// to rooted tree counts of its linear pieces. The cycle is written ending
/// at its smallest element.
fn check_split_identities(oracle: &Oracle, cfg: &VerifyConfig) -> crate::Result<CheckResult> {
    let hi = cfg.n_max.min(5);
    let mut identities = 0u64;
    for m in 1..=hi {
        for rep in cycles_ending_at_one(m) {
            let seq = rep.elements().to_vec();
            for k in 1..=m {
                let nbar = eval_cycle(oracle, CountKind::CyclicSplit(k), &rep)?;
                let nbar_min = eval_cycle(oracle, CountKind::CyclicSplitMinEdge(k), &rep)?;

                // Chopping a linear prefix off the cycle: the split count in
                // excess of the minimum-edge split count is a sum of
                // prefix-split times suffix-rooted products.
                let mut excess = BigCount::zero();
                for s in 1..m {
                    if s < k {
                        continue;
                    }
                    let prefix = CycleSeq::new(seq[..s].to_vec()).expect("distinct elements");
                    let suffix = CycleSeq::new(seq[s..].to_vec()).expect("distinct elements");
                    excess += eval_cycle(oracle, CountKind::CyclicSplit(k), &prefix)?
                        * eval_cycle(oracle, CountKind::RootedAt(1), &suffix)?;
                }
                if nbar != &nbar_min + &excess {
                    return Ok(Err(format!(
                        "prefix identity fails for cycle {seq:?} at k = {k}"
                    )));
                }

                // Linearizing the minimum-edge split: k times the sum over
                // linear splits J D_1 .. D_k of rooted-count products equals
                // the minimum-edge split count.
                let mut linear = BigCount::zero();
                for j_len in 0..=m - k {
                    let j_count = if j_len == 0 {
                        BigCount::one()
                    } else {
                        let j_block =
                            CycleSeq::new(seq[..j_len].to_vec()).expect("distinct elements");
                        eval_cycle(oracle, CountKind::DummyRooted, &j_block)?
                    };
                    for comp in compositions(m - j_len, k) {
                        let mut term = j_count.clone();
                        let mut pos = j_len;
                        for (idx, &part) in comp.iter().enumerate() {
                            let block = CycleSeq::new(seq[pos..pos + part].to_vec())
                                .expect("distinct elements");
                            let factor = if idx + 1 == k {
                                eval_cycle(oracle, CountKind::RootedAt(1), &block)?
                            } else {
                                eval_cycle(oracle, CountKind::DummyRooted, &block)?
                            };
                            term *= factor;
                            pos += part;
                        }
                        linear += term;
                    }
                }
                if BigCount::from(k as u64) * linear != nbar_min {
                    return Ok(Err(format!(
                        "linear split identity fails for cycle {seq:?} at k = {k}"
                    )));
                }
                identities += 2;
            }
        }
    }
    Ok(Ok(format!(
        "{identities} identities over cycles through length {hi}"
    )))
}

/// Cyclic split counts over all cycles on `{1..m}` are maximized by the
/// decreasing cycle, uniquely so for one-block splits.
fn check_split_maximizers(oracle: &Oracle, cfg: &VerifyConfig) -> crate::Result<CheckResult> {
    let hi = cfg.n_max.min(5);
    let mut sweeps = 0u64;
    for m in 2..=hi {
        let reps = cycles_ending_at_one(m);
        let decreasing: Vec<u32> = (1..=m as u32).rev().collect();
        for k in 1..=m {
            let mut plain: Vec<BigCount> = Vec::with_capacity(reps.len());
            let mut min_edge: Vec<BigCount> = Vec::with_capacity(reps.len());
            for rep in &reps {
                plain.push(eval_cycle(oracle, CountKind::CyclicSplit(k), rep)?);
                min_edge.push(eval_cycle(oracle, CountKind::CyclicSplitMinEdge(k), rep)?);
            }
            let mut diffs: Vec<BigCount> = Vec::with_capacity(reps.len());
            for (idx, (a, b)) in plain.iter().zip(&min_edge).enumerate() {
                let Some(diff) = a.checked_sub(b) else {
                    return Ok(Err(format!(
                        "minimum-edge split count exceeds the split count for cycle {:?} at k = {k}",
                        reps[idx].elements()
                    )));
                };
                diffs.push(diff);
            }
            for (label, values, unique_at_one) in [
                ("split count", &plain, true),
                ("minimum-edge split count", &min_edge, true),
                ("split count excess", &diffs, false),
            ] {
                let max = values.iter().max().expect("nonempty sweep");
                let argmax: Vec<&CycleSeq> = reps
                    .iter()
                    .zip(values)
                    .filter(|(_, v)| *v == max)
                    .map(|(r, _)| r)
                    .collect();
                if !argmax
                    .iter()
                    .any(|r| r.elements() == decreasing.as_slice())
                {
                    return Ok(Err(format!(
                        "{label} at length {m}, k = {k} is not maximized by the decreasing cycle"
                    )));
                }
                if k == 1 && unique_at_one && argmax.len() != 1 {
                    return Ok(Err(format!(
                        "{label} at length {m}, k = 1 has {} maximizers",
                        argmax.len()
                    )));
                }
            }
            sweeps += 1;
        }
    }
    Ok(Ok(format!("{sweeps} sweeps over cycles through length {hi}")))
}

/// Rooted tree totals over all linear orders of `{1..m}`: the engine table
/// matches the enumeration, the maximum is the Catalan number, and only the
/// decreasing order attains it.
fn check_rooted_total_sweep(
    oracle: &Oracle,
    engine: &Engine,
    cfg: &VerifyConfig,
) -> crate::Result<CheckResult> {
    let hi = cfg.n_max.min(5);
    let mut patterns = 0u64;
    for m in 1..=hi {
        let decreasing: Vec<u32> = (1..=m as u32).rev().collect();
        let mut max = BigCount::zero();
        let mut argmax: Vec<Vec<u32>> = Vec::new();
        for order in (1..=m as u32).permutations(m) {
            let block = CycleSeq::new(order.clone()).expect("distinct elements");
            let enumerated = eval_cycle(oracle, CountKind::DummyRooted, &block)?;
            let table = engine.rooted_table(&block)?;
            if *table.total() != enumerated {
                return Ok(Err(format!("rooted table total differs for {order:?}")));
            }
            match enumerated.cmp(&max) {
                std::cmp::Ordering::Greater => {
                    max = enumerated;
                    argmax = vec![order];
                }
                std::cmp::Ordering::Equal => argmax.push(order),
                std::cmp::Ordering::Less => {}
            }
            patterns += 1;
        }
        if max != engine.catalan(m) {
            return Ok(Err(format!(
                "maximum rooted total at length {m} is not the Catalan number"
            )));
        }
        if argmax.len() != 1 || argmax[0] != decreasing {
            return Ok(Err(format!(
                "rooted total at length {m} is not uniquely maximized by the decreasing order"
            )));
        }
    }
    Ok(Ok(format!("{patterns} orders through length {hi}")))
}

// ---------------------------------------------------------------------------
// Series suite
// ---------------------------------------------------------------------------

fn series_suite(oracle: &Oracle, cfg: &VerifyConfig, out: &mut Vec<CheckOutcome>) {
    run_check("series identities", out, check_series_identities);
    run_check("spot coefficients", out, check_spot_coefficients);

    let mut tables: Option<(Vec<UPoly>, Vec<UPoly>)> = None;
    run_check("finite law tables", out, || {
        let uniform = series::fixed_point_table(Mode::Uniform, Z_MAX)?;
        let permutation = series::fixed_point_table(Mode::Permutation, Z_MAX)?;
        let detail = format!("laws for degrees 0..={Z_MAX}, both modes");
        tables = Some((uniform, permutation));
        Ok(Ok(detail))
    });
    if let Some((uniform, permutation)) = &tables {
        run_check("finite laws match enumeration", out, || {
            check_laws_vs_enumeration(oracle, uniform, permutation, cfg)
        });
        run_check("laws are probability distributions", out, || {
            Ok(check_laws_are_distributions(uniform, permutation))
        });
        run_check("convergence toward the limit", out, || {
            Ok(check_convergence(uniform, permutation))
        });
    }

    run_check("connected linear counts", out, || {
        check_connected_linear(oracle, cfg)
    });
    run_check("limit law values", out, || Ok(check_limit_values()));
}

fn series_equal(a: &series::BivariateSeries, b: &series::BivariateSeries) -> crate::Result<bool> {
    let diff = a.sub(b)?;
    Ok((0..=diff.order()).all(|i| diff.coeff(i).is_zero()))
}

/// Functional identities pinning the base series, exact to order 60.
fn check_series_identities() -> crate::Result<CheckResult> {
    let order = Z_MAX;
    let t = series::tree_series(order)?;
    let one = series::BivariateSeries::from_univariate(order, &[Rat::one()])?;
    let z = series::BivariateSeries::from_univariate(order, &[Rat::zero(), Rat::one()])?;

    let et = t.exp()?;
    if !series_equal(&t, &z.mul(&et)?)? {
        return Ok(Err("tree series does not satisfy t = z·exp(t)".into()));
    }

    let zt = series::z_over_tree(order)?;
    if !series_equal(&zt.mul(&t)?, &z)? {
        return Ok(Err("z/t series times t does not give z".into()));
    }

    let words = series::word_series(Mode::Uniform, order)?;
    if !series_equal(&words.mul(&one.sub(&t)?)?, &one)? {
        return Ok(Err("word series times (1 - t) does not give 1".into()));
    }

    let perm_words = series::word_series(Mode::Permutation, order)?;
    if !series_equal(&perm_words.mul(&one.sub(&z)?)?, &one)? {
        return Ok(Err("bijective word series times (1 - z) does not give 1".into()));
    }

    let ez = series::exp_z(order)?;
    for n in 0..=order {
        let expected = Rat::one() / Rat::from_integer(factorial(n).into());
        if ez.coeff(n).coeff(0) != expected || ez.coeff(n).degree() != 0 {
            return Ok(Err(format!("exp(z) coefficient at order {n} is wrong")));
        }
    }

    Ok(Ok(format!("four functional identities exact to order {order}")))
}

/// Frozen coefficients of the base series.
fn check_spot_coefficients() -> crate::Result<CheckResult> {
    let t = series::tree_series(4)?;
    let expected_t3 = Rat::new(3.into(), 2.into());
    if t.coeff(3).coeff(0) != expected_t3 {
        return Ok(Err("z^3 coefficient of the tree series is not 3/2".into()));
    }
    let words = series::word_series(Mode::Uniform, 4)?;
    let expected_u4 = Rat::new(32.into(), 3.into());
    if words.coeff(4).coeff(0) != expected_u4 {
        return Ok(Err("z^4 coefficient of the word series is not 32/3".into()));
    }
    for n in 1..=4usize {
        let expected = Rat::new(
            num_bigint::BigInt::from(big_pow(n as u64, n.saturating_sub(1))),
            factorial(n).into(),
        );
        if t.coeff(n).coeff(0) != expected {
            return Ok(Err(format!(
                "z^{n} coefficient of the tree series is not n^(n-1)/n!"
            )));
        }
    }
    Ok(Ok("tree and word series spot values".into()))
}

/// Exact agreement of the series-derived fixed-point laws with the
/// enumerated distributions.
fn check_laws_vs_enumeration(
    oracle: &Oracle,
    uniform: &[UPoly],
    permutation: &[UPoly],
    cfg: &VerifyConfig,
) -> crate::Result<CheckResult> {
    let hi = cfg.n_max.min(7);
    let mut compared = 0u64;
    for (mode, table) in [(Mode::Uniform, uniform), (Mode::Permutation, permutation)] {
        for (n, poly) in table.iter().enumerate().take(hi + 1).skip(1) {
            let dist = oracle.fixed_point_dist(n, mode)?;
            for k in 0..=n {
                let enumerated = dist.get(k).cloned().unwrap_or_else(Rat::zero);
                if poly.coeff(k) != enumerated {
                    return Ok(Err(format!(
                        "{} law at degree {n} differs from enumeration at k = {k}",
                        mode.as_str()
                    )));
                }
            }
            if poly.degree() > n {
                return Ok(Err(format!(
                    "{} law at degree {n} has degree {}",
                    mode.as_str(),
                    poly.degree()
                )));
            }
            compared += 1;
        }
    }
    Ok(Ok(format!(
        "{compared} laws through degree {hi}, both modes, exact"
    )))
}

/// Every finite law is a genuine probability distribution with the right
/// degree bound, for all tabulated degrees.
fn check_laws_are_distributions(uniform: &[UPoly], permutation: &[UPoly]) -> CheckResult {
    for (mode, table) in [
        (Mode::Uniform, uniform),
        (Mode::Permutation, permutation),
    ] {
        for (n, poly) in table.iter().enumerate() {
            if poly.coeffs().iter().any(Signed::is_negative) {
                return Err(format!(
                    "{} law at degree {n} has a negative coefficient",
                    mode.as_str()
                ));
            }
            let sum: Rat = poly.coeffs().iter().sum();
            if !sum.is_one() {
                return Err(format!(
                    "{} law at degree {n} sums to {sum}",
                    mode.as_str()
                ));
            }
            if poly.degree() > n {
                return Err(format!(
                    "{} law at degree {n} has degree {}",
                    mode.as_str(),
                    poly.degree()
                ));
            }
        }
    }
    let half = Rat::new(1.into(), 2.into());
    let q2 = &uniform[2];
    if q2.coeff(0) != half || !q2.coeff(1).is_zero() || q2.coeff(2) != half {
        return Err("uniform law at degree 2 is not (1 + u^2)/2".into());
    }
    let q2p = &permutation[2];
    if !q2p.coeff(0).is_zero() || !q2p.coeff(1).is_zero() || !q2p.coeff(2).is_one() {
        return Err("bijective law at degree 2 is not u^2".into());
    }
    Ok(format!(
        "degrees 0..={}, both modes: nonnegative, sum one, degree bounded",
        uniform.len() - 1
    ))
}

/// Linear fixed-point coefficients of the connected series: closed forms for
/// both modes, and agreement with the enumerated connected tallies.
fn check_connected_linear(oracle: &Oracle, cfg: &VerifyConfig) -> crate::Result<CheckResult> {
    let order = 20usize;
    let conn_u = series::connected_series(Mode::Uniform, order)?;
    let conn_p = series::connected_series(Mode::Permutation, order)?;
    for n in 3..=order {
        let expected = Rat::new(
            num_bigint::BigInt::from(2u64) * num_bigint::BigInt::from(big_pow((n - 1) as u64, n - 1)),
            factorial(n).into(),
        );
        if conn_u.coeff(n).coeff(1) != expected {
            return Ok(Err(format!(
                "uniform connected linear coefficient at degree {n} is not 2(n-1)^(n-1)/n!"
            )));
        }
        let expected_p = Rat::new(2.into(), factorial(n).into());
        if conn_p.coeff(n).coeff(1) != expected_p {
            return Ok(Err(format!(
                "bijective connected linear coefficient at degree {n} is not 2/n!"
            )));
        }
    }

    let hi = cfg.n_max.min(7);
    let mut tallies = 0u64;
    for (mode, conn) in [(Mode::Uniform, &conn_u), (Mode::Permutation, &conn_p)] {
        for n in 3..=hi {
            let counts = oracle.connected_counts(n, mode)?;
            let fact = Rat::from_integer(factorial(n).into());
            for k in 1..=n {
                let series_count = conn.coeff(n).coeff(k) * fact.clone();
                let enumerated = Rat::from_integer(
                    counts
                        .get(k)
                        .cloned()
                        .unwrap_or_default()
                        .into(),
                );
                if series_count != enumerated {
                    return Ok(Err(format!(
                        "{} connected tally at degree {n}, k = {k} differs from the series",
                        mode.as_str()
                    )));
                }
            }
            tallies += 1;
        }
    }
    Ok(Ok(format!(
        "closed forms to degree {order}, {tallies} enumerated tallies to degree {hi}"
    )))
}

/// The limit laws: frozen exponent coefficients, frozen p0, unit mass, and
/// the exact mean.
fn check_limit_values() -> CheckResult {
    let e = std::f64::consts::E;
    let k_max = 40usize;
    for mode in [Mode::Uniform, Mode::Permutation] {
        let lim = series::limit_distribution(mode, k_max);
        let (a, b, c) = lim.quad;
        let (exp_a, exp_b) = match mode {
            Mode::Uniform => (0.5 * (-2.0f64).exp(), 2.0 - 3.0 / e - (-2.0f64).exp()),
            Mode::Permutation => (0.5, 2.0 * e - 4.0),
        };
        if (a - exp_a).abs() > 1e-12 || (b - exp_b).abs() > 1e-12 || (a + b + c).abs() > 1e-12 {
            return Err(format!("{} exponent coefficients are wrong", mode.as_str()));
        }
        let p0_direct = match mode {
            Mode::Uniform => (0.5 * (0.0 - 1.0) * (0.0 - 6.0 / e + 4.0 - (-2.0f64).exp())).exp(),
            Mode::Permutation => (0.5 * (0.0 - 1.0) * (0.0 + 4.0 * e - 7.0)).exp(),
        };
        if (lim.pk[0] - p0_direct).abs() > 1e-6 {
            return Err(format!(
                "{} limit p0 = {} differs from the closed form {p0_direct}",
                mode.as_str(),
                lim.pk[0]
            ));
        }
        if ((a + b + c).exp() - 1.0).abs() > 1e-12 {
            return Err(format!("{} limit law does not evaluate to 1 at u = 1", mode.as_str()));
        }
        if lim.tail_deficit().abs() > 1e-9 {
            return Err(format!(
                "{} limit law mass at k_max = {k_max} leaves {}",
                mode.as_str(),
                lim.tail_deficit()
            ));
        }
        let sum_mean: f64 = lim.pk.iter().enumerate().map(|(k, p)| k as f64 * p).sum();
        let exact_mean = match mode {
            Mode::Uniform => 2.0 - 3.0 / e,
            Mode::Permutation => 2.0 * e - 3.0,
        };
        if (sum_mean - exact_mean).abs() > 1e-6 || (lim.mean() - exact_mean).abs() > 1e-9 {
            return Err(format!("{} limit mean differs from the closed form", mode.as_str()));
        }
    }
    let p0_uniform = series::limit_distribution(Mode::Uniform, 0).pk[0];
    let p0_perm = series::limit_distribution(Mode::Permutation, 0).pk[0];
    Ok(format!(
        "p0 = {p0_uniform:.5} (uniform), {p0_perm:.5} (bijective); mass and means match"
    ))
}

/// Evaluating the finite laws at a few points approaches the limit law:
/// the error at degree 48 is below the error at degree 12 and below 0.05.
fn check_convergence(uniform: &[UPoly], permutation: &[UPoly]) -> CheckResult {
    let points = [
        Rat::zero(),
        Rat::new(1.into(), 2.into()),
        Rat::one(),
    ];
    for (mode, table) in [
        (Mode::Uniform, uniform),
        (Mode::Permutation, permutation),
    ] {
        let lim = series::limit_distribution(mode, 0);
        let (a, b, c) = lim.quad;
        let err_at = |n: usize| -> f64 {
            points
                .iter()
                .map(|u| {
                    let exact = series::rat_to_f64(&table[n].eval(u));
                    let uf = series::rat_to_f64(u);
                    let limit = (a * uf * uf + b * uf + c).exp();
                    (exact - limit).abs()
                })
                .fold(0.0f64, f64::max)
        };
        let e12 = err_at(12);
        let e48 = err_at(48);
        let shrank = e48 < e12;
        if !shrank {
            return Err(format!(
                "{} law error does not shrink: E(48) = {e48:.6} vs E(12) = {e12:.6}",
                mode.as_str()
            ));
        }
        let small_at_48 = e48 < 0.05;
        if !small_at_48 {
            return Err(format!(
                "{} law error at degree 48 is {e48:.6}",
                mode.as_str()
            ));
        }
    }
    Ok("E(48) < E(12) and E(48) < 0.05 at u in {0, 1/2, 1}, both modes".into())
}

// ---------------------------------------------------------------------------
// Extremal suite
// ---------------------------------------------------------------------------

fn extremal_suite(oracle: &Oracle, engine: &Engine, cfg: &VerifyConfig, out: &mut Vec<CheckOutcome>) {
    run_check("class maxima match enumeration", out, || {
        check_class_maxima(oracle, engine, cfg)
    });
    run_check("grouped pairing sum matches direct sum", out, || {
        check_grouped_vs_direct(engine)
    });
    run_check("most likely classes through degree 28", out, || {
        check_winner_table(engine)
    });
    run_check("single component maxima", out, || {
        check_single_component_maxima(oracle, engine, cfg)
    });
    run_check("pair maximum matches split evaluation", out, || {
        check_pair_vs_split(engine)
    });
    run_check("unicyclic maximum bound", out, || {
        check_unicyclic_bound(engine)
    });
    run_check("multiplicity bounded by class profile", out, || {
        check_multiplicity_bound(oracle, engine, cfg)
    });
    run_check("involution ratio bounds", out, || {
        Ok(check_involution_ratios(engine))
    });
    run_check("involution growth against powers of four", out, || {
        Ok(check_involution_growth(engine))
    });
}

/// Class maxima, attainer counts, and attainer sets agree with the full
/// enumeration.
fn check_class_maxima(
    oracle: &Oracle,
    engine: &Engine,
    cfg: &VerifyConfig,
) -> crate::Result<CheckResult> {
    let hi = cfg.n_max.min(6);
    let mut classes = 0u64;
    for n in 1..=hi {
        let tally = oracle.count_all(n, Mode::Uniform)?;
        let spectrum = extremal::class_spectrum(&tally);
        for class in partitions(n) {
            let report = extremal::class_max(engine, &class)?;
            let Some((max, attainers)) = spectrum.get(&class) else {
                return Ok(Err(format!("class {class} missing from the enumeration")));
            };
            if report.max_value != *max {
                return Ok(Err(format!("class {class} maximum differs")));
            }
            if report.maximizer_count != BigCount::from(attainers.len() as u64) {
                return Ok(Err(format!("class {class} attainer count differs")));
            }
            let mut expected = extremal::block_maximizers(&class);
            expected.sort();
            let mut enumerated = attainers.clone();
            enumerated.sort();
            if expected != enumerated {
                return Ok(Err(format!("class {class} attainer set differs")));
            }
            if !enumerated.contains(&report.canonical_maximizer) {
                return Ok(Err(format!(
                    "class {class} canonical maximizer does not attain the maximum"
                )));
            }
            classes += 1;
        }
    }
    Ok(Ok(format!("{classes} classes through degree {hi}")))
}

/// The grouped profile sum used for large classes agrees with the direct
/// pairing enumeration on every class with at most eight parts.
fn check_grouped_vs_direct(engine: &Engine) -> crate::Result<CheckResult> {
    let mut classes = 0u64;
    for n in 1..=12usize {
        for class in partitions(n) {
            if class.parts() > 8 {
                continue;
            }
            let lengths = class.lengths().to_vec();
            let direct = pairing_sum(
                lengths.len(),
                &mut |i| Ok(engine.catalan(lengths[i])),
                &mut |i, j| engine.pair_max(lengths[i], lengths[j]),
            )?;
            let grouped = extremal::class_max(engine, &class)?.max_value;
            if direct != grouped {
                return Ok(Err(format!("class {class} profile sums differ")));
            }
            classes += 1;
        }
    }
    Ok(Ok(format!(
        "{classes} classes with at most 8 parts through degree 12"
    )))
}

/// The winning classes for each degree up to 28: split cycles up to degree
/// 17 (with the documented small-degree ties), the identity class beyond.
fn check_winner_table(engine: &Engine) -> crate::Result<CheckResult> {
    for n in 1..=28usize {
        let reports = extremal::most_likely(engine, n)?;
        let winners: Vec<&ClassMaxReport> = extremal::winners(&reports);
        let winner_classes: Vec<&PartitionClass> = winners.iter().map(|r| &r.class).collect();

        let split_class = if n >= 2 {
            PartitionClass::new(vec![n.div_ceil(2), n / 2])
        } else {
            PartitionClass::new(vec![1])
        };
        let identity_class = PartitionClass::new(vec![1; n]);
        let full_class = PartitionClass::new(vec![n]);

        let expected: Vec<PartitionClass> = match n {
            1 => vec![identity_class.clone()],
            2 => vec![full_class.clone(), identity_class.clone()],
            3 => vec![full_class.clone(), split_class.clone()],
            4..=17 => vec![split_class.clone()],
            _ => vec![identity_class.clone()],
        };
        let mut got: Vec<PartitionClass> = winner_classes.iter().map(|&c| c.clone()).collect();
        got.sort_by(|a, b| a.lengths().cmp(b.lengths()));
        let mut want = expected.clone();
        want.sort_by(|a, b| a.lengths().cmp(b.lengths()));
        if got != want {
            return Ok(Err(format!(
                "degree {n} winners are {got:?}, expected {want:?}"
            )));
        }

        let split_value = || -> crate::Result<BigCount> {
            let a = n.div_ceil(2);
            let b = n / 2;
            Ok(engine.catalan(a) * engine.catalan(b) + engine.pair_max(a, b)?)
        };
        let expected_value = match n {
            1 => BigCount::one(),
            2 => BigCount::from(2u64),
            3 => BigCount::from(5u64),
            4..=17 => split_value()?,
            _ => engine.involutions(n),
        };
        if winners[0].max_value != expected_value {
            return Ok(Err(format!(
                "degree {n} winning value is {}, expected {expected_value}",
                winners[0].max_value
            )));
        }

        for report in &winners {
            let expected_count = BigCount::from(
                extremal::block_maximizers(&report.class).len() as u64
            );
            if report.maximizer_count != expected_count {
                return Ok(Err(format!(
                    "degree {n} class {} attainer count is {}, expected {expected_count}",
                    report.class, report.maximizer_count
                )));
            }
            if report.canonical_maximizer
                != extremal::descending_interval_cycles(&report.class)
            {
                return Ok(Err(format!(
                    "degree {n} class {} canonical maximizer is not the descending interval form",
                    report.class
                )));
            }
        }
        if n >= 18 && winners[0].canonical_maximizer != Permutation::identity(n) {
            return Ok(Err(format!("degree {n} winner is not the identity")));
        }
    }
    Ok(Ok("winning classes, values, and attainers for degrees 1..=28".into()))
}

/// Maxima over single-component words: tree counts peak at the Catalan
/// number, rooted tree counts one step lower, and two-cycle products peak
/// exactly at the interval block forms.
fn check_single_component_maxima(
    oracle: &Oracle,
    engine: &Engine,
    cfg: &VerifyConfig,
) -> crate::Result<CheckResult> {
    let hi = cfg.n_max.min(7);
    let mut degrees = 0u64;
    for n in 1..=hi {
        let tallies = oracle.single_component_tallies(n)?;
        let descending = extremal::descending_cycle(n);

        let (tree_max, tree_argmax) = tally_max(&tallies.tree);
        if tree_max != engine.catalan(n) {
            return Ok(Err(format!("degree {n} tree maximum is not the Catalan number")));
        }
        if tree_argmax != vec![descending.clone()] {
            return Ok(Err(format!(
                "degree {n} tree maximum is not attained uniquely by the descending cycle"
            )));
        }
        if tree_max > big_pow(4, n.saturating_sub(1)) {
            return Ok(Err(format!("degree {n} tree maximum exceeds 4^(n-1)")));
        }
        if tallies.tree.keys().any(|p| p.cycle_class() != PartitionClass::new(vec![n])) {
            return Ok(Err(format!("degree {n} tree tally contains a non-cycle")));
        }

        let (rooted_max, rooted_argmax) = tally_max(&tallies.tree_rooted_min);
        if rooted_max != engine.catalan(n - 1) {
            return Ok(Err(format!(
                "degree {n} rooted tree maximum is not the previous Catalan number"
            )));
        }
        if rooted_argmax != vec![descending.clone()] {
            return Ok(Err(format!(
                "degree {n} rooted tree maximum is not attained uniquely by the descending cycle"
            )));
        }

        if n >= 2 {
            let (uni_max, _) = tally_max(&tallies.uni);
            if uni_max != extremal::w_max_unicyclic(engine, n)? {
                return Ok(Err(format!(
                    "degree {n} unicycle maximum differs from the pair formula maximum"
                )));
            }
            for p in 1..=n / 2 {
                let m = n - p;
                let class = PartitionClass::new(vec![m, p]);
                let mut best = BigCount::zero();
                let mut attainers: Vec<Permutation> = Vec::new();
                for (perm, count) in &tallies.uni {
                    if perm.cycle_class() != class {
                        continue;
                    }
                    match count.cmp(&best) {
                        std::cmp::Ordering::Greater => {
                            best = count.clone();
                            attainers = vec![perm.clone()];
                        }
                        std::cmp::Ordering::Equal => attainers.push(perm.clone()),
                        std::cmp::Ordering::Less => {}
                    }
                }
                if best != engine.pair_max(m, p)? {
                    return Ok(Err(format!(
                        "two-cycle class {class} maximum differs from the pair formula"
                    )));
                }
                let mut expected = extremal::block_maximizers(&class);
                expected.sort();
                attainers.sort();
                if expected != attainers {
                    return Ok(Err(format!(
                        "two-cycle class {class} maximum is not attained exactly at the interval forms"
                    )));
                }
            }
        }
        degrees += 1;
    }
    Ok(Ok(format!("{degrees} single-component sweeps through degree {hi}")))
}

fn tally_max(
    tally: &std::collections::BTreeMap<Permutation, BigCount>,
) -> (BigCount, Vec<Permutation>) {
    let mut max = BigCount::zero();
    let mut argmax = Vec::new();
    for (perm, count) in tally {
        match count.cmp(&max) {
            std::cmp::Ordering::Greater => {
                max = count.clone();
                argmax = vec![perm.clone()];
            }
            std::cmp::Ordering::Equal => argmax.push(perm.clone()),
            std::cmp::Ordering::Less => {}
        }
    }
    (max, argmax)
}

/// The closed-form pair maximum equals the split evaluation of the two
/// descending interval cycles.
fn check_pair_vs_split(engine: &Engine) -> crate::Result<CheckResult> {
    let mut pairs = 0u64;
    for total in 2..=9usize {
        for p in 1..=total / 2 {
            let m = total - p;
            let top: Vec<u32> = ((p + 1) as u32..=total as u32).rev().collect();
            let bottom: Vec<u32> = (1..=p as u32).rev().collect();
            let top = CycleSeq::new(top).expect("distinct elements");
            let bottom = CycleSeq::new(bottom).expect("distinct elements");
            let split = engine.uni_count(&top, &bottom)?;
            let closed = engine.pair_max(m, p)?;
            if split != closed {
                return Ok(Err(format!(
                    "pair ({m}, {p}) split evaluation differs from the closed form"
                )));
            }
            pairs += 1;
        }
    }
    Ok(Ok(format!("{pairs} pairs with total length through 9")))
}

/// The unicyclic maximum stays below 4^(n-2).
fn check_unicyclic_bound(engine: &Engine) -> crate::Result<CheckResult> {
    for n in 2..=9usize {
        let w = extremal::w_max_unicyclic(engine, n)?;
        if w > big_pow(4, n - 2) {
            return Ok(Err(format!("degree {n} unicyclic maximum exceeds 4^(n-2)")));
        }
    }
    Ok(Ok("degrees 2..=9 against 4^(n-2)".into()))
}

/// Every enumerated count obeys the class profile bound: involutions of the
/// cycle count times a power of four.
fn check_multiplicity_bound(
    oracle: &Oracle,
    engine: &Engine,
    cfg: &VerifyConfig,
) -> crate::Result<CheckResult> {
    let hi = cfg.n_max.min(6);
    let mut perms = 0u64;
    for n in 1..=hi {
        let tally = oracle.count_all(n, Mode::Uniform)?;
        for (perm, count) in tally.iter() {
            let q = perm.cycle_class().parts();
            let bound = engine.involutions(q) * big_pow(4, n - q);
            if *count > bound {
                return Ok(Err(format!("count of {perm} exceeds the profile bound")));
            }
            perms += 1;
        }
    }
    Ok(Ok(format!("{perms} permutations through degree {hi}")))
}

/// The involution ratio lies strictly between sqrt(n) and sqrt(n) + 1,
/// compared exactly by squaring.
fn check_involution_ratios(engine: &Engine) -> CheckResult {
    let mut prev = engine.involutions(1);
    for n in 2..=200usize {
        let cur = engine.involutions(n);
        let n_big = BigCount::from(n as u64);
        if &cur * &cur <= &n_big * &prev * &prev {
            return Err(format!("involution ratio at {n} is not above sqrt(n)"));
        }
        let diff = &cur - &prev;
        if &diff * &diff >= n_big * &prev * &prev {
            return Err(format!("involution ratio at {n} is not below sqrt(n) + 1"));
        }
        prev = cur;
    }
    Ok("ratios strictly inside (sqrt(n), sqrt(n) + 1) for degrees 2..=200".into())
}

/// The involution count against powers of four: dominated through degree
/// 14, strictly climbing from degree 15 on, and past the quarter mark at
/// degree 29.
fn check_involution_growth(engine: &Engine) -> CheckResult {
    for n in 1..15usize {
        if BigCount::from(4u64) * engine.involutions(n) > big_pow(4, n) {
            return Err(format!("involution count at {n} exceeds a quarter of 4^n"));
        }
    }
    for n in 16..=60usize {
        if engine.involutions(n) <= BigCount::from(4u64) * engine.involutions(n - 1) {
            return Err(format!(
                "scaled involution count does not climb from {} to {n}",
                n - 1
            ));
        }
    }
    if BigCount::from(4u64) * engine.involutions(29) <= big_pow(4, 29) {
        return Err("involution count at 29 does not pass a quarter of 4^n".into());
    }
    Ok("quarter bound below 15, strict climb through 60, crossover by 29".into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::EngineCaps;
    use crate::oracle::OracleCaps;

    #[test]
    fn compositions_enumerate_positive_parts() {
        assert_eq!(compositions(4, 2), vec![vec![1, 3], vec![2, 2], vec![3, 1]]);
        assert_eq!(compositions(3, 3), vec![vec![1, 1, 1]]);
        assert!(compositions(2, 3).is_empty());
        assert_eq!(compositions(5, 1), vec![vec![5]]);
    }

    #[test]
    fn cycle_representatives_cover_all_cycles() {
        assert_eq!(cycles_ending_at_one(1).len(), 1);
        assert_eq!(cycles_ending_at_one(4).len(), 6);
        for rep in cycles_ending_at_one(4) {
            assert_eq!(rep.last(), 1);
        }
    }

    #[test]
    fn pairing_sum_matches_involution_count() {
        // With all weights one, the pairing sum counts involutions.
        let engine = Engine::new(EngineCaps::default());
        for q in 0..=6usize {
            let sum = pairing_sum(
                q,
                &mut |_| Ok(BigCount::one()),
                &mut |_, _| Ok(BigCount::one()),
            )
            .unwrap();
            assert_eq!(sum, engine.involutions(q));
        }
    }

    #[test]
    fn quick_battery_passes_at_low_degree() {
        let oracle = Oracle::new(OracleCaps::default());
        let engine = Engine::new(EngineCaps::default());
        let cfg = VerifyConfig {
            n_max: 4,
            seed: 11,
        };
        for suite in [Suite::Symmetry, Suite::Structure] {
            let outcomes = run_suite(&oracle, &engine, suite, &cfg);
            assert!(!outcomes.is_empty());
            for outcome in &outcomes {
                assert!(
                    outcome.passed,
                    "{} failed: {}",
                    outcome.name, outcome.detail
                );
            }
        }
    }
}
