//! Per-class maxima of the multiplicity map and the most likely permutations.
//!
//! Within a conjugacy class (a multiset of cycle lengths), the maximal
//! multiplicity is attained exactly by the permutations whose cycles are
//! descending interval cycles tiling `1..=n`.  For such a permutation the
//! pairing sum collapses: a fixed cycle of length `s` contributes the `s`-th
//! Catalan number, and a paired couple of lengths `(s, t)` contributes the
//! closed-form pair maximum.  `class_max` therefore sums over pairing
//! profiles — how many cycles of each length stay fixed and how many pair up
//! within or across length groups — with multinomial weights, instead of
//! enumerating class members.
//!
//! `most_likely` ranks all classes of a given degree by this maximum, which
//! identifies the globally most likely permutations of the shuffle.

use std::collections::HashMap;

use num_traits::{One, Pow, Zero};
use rayon::prelude::*;

use crate::engine::Engine;
use crate::perm::{partitions, PartitionClass, Permutation};
use crate::{BigCount, Error, Result};

/// Largest degree accepted by `class_max` and `most_likely`.
pub const CLASS_DEGREE_CAP: usize = 40;

/// The maximal multiplicity within one conjugacy class, together with the
/// canonical permutation attaining it and the number of attaining
/// permutations.
#[derive(Clone, Debug)]
pub struct ClassMaxReport {
    /// The cycle-length class.
    pub class: PartitionClass,
    /// Largest multiplicity among permutations of this class.
    pub max_value: BigCount,
    /// The attaining permutation whose longest cycles occupy the highest
    /// intervals.
    pub canonical_maximizer: Permutation,
    /// Number of permutations of the class attaining the maximum (one per
    /// distinct interval ordering).
    pub maximizer_count: BigCount,
}

/// Product of `1..=n`.
fn fact(n: usize) -> BigCount {
    (1..=n as u64).fold(BigCount::one(), |acc, k| acc * BigCount::from(k))
}

/// Recursively chooses how many cycle pairs each group pair contributes,
/// accumulating weighted values at the leaves.
#[allow(clippy::too_many_arguments)]
fn profile_sum(
    engine: &Engine,
    groups: &[(usize, usize)],
    cells: &[(usize, usize)],
    idx: usize,
    rem: &mut [usize],
    diag: &mut [usize],
    off: &mut [Vec<usize>],
    total: &mut BigCount,
) -> Result<()> {
    if idx == cells.len() {
        let mut num = BigCount::one();
        let mut den = BigCount::one();
        let mut value = BigCount::one();
        for (g, &(size, mult)) in groups.iter().enumerate() {
            num *= fact(mult);
            let fixed = rem[g];
            den *= fact(fixed);
            if fixed > 0 {
                value *= Pow::pow(&engine.catalan(size), fixed as u32);
            }
            if diag[g] > 0 {
                den *= BigCount::from(2u64).pow(diag[g] as u32) * fact(diag[g]);
                value *= Pow::pow(&engine.pair_max(size, size)?, diag[g] as u32);
            }
        }
        for i in 0..groups.len() {
            for j in (i + 1)..groups.len() {
                let k = off[i][j];
                if k > 0 {
                    den *= fact(k);
                    value *= Pow::pow(&engine.pair_max(groups[i].0, groups[j].0)?, k as u32);
                }
            }
        }
        assert!(
            (&num % &den).is_zero(),
            "pairing profile weight must be an integer"
        );
        *total += (num / den) * value;
        return Ok(());
    }
    let (i, j) = cells[idx];
    if i == j {
        for k in 0..=(rem[i] / 2) {
            diag[i] = k;
            rem[i] -= 2 * k;
            profile_sum(engine, groups, cells, idx + 1, rem, diag, off, total)?;
            rem[i] += 2 * k;
        }
        diag[i] = 0;
    } else {
        for k in 0..=rem[i].min(rem[j]) {
            off[i][j] = k;
            rem[i] -= k;
            rem[j] -= k;
            profile_sum(engine, groups, cells, idx + 1, rem, diag, off, total)?;
            rem[i] += k;
            rem[j] += k;
        }
        off[i][j] = 0;
    }
    Ok(())
}

/// Maximal multiplicity within the class, with the canonical maximizer and
/// the count of maximizers.
pub fn class_max(engine: &Engine, class: &PartitionClass) -> Result<ClassMaxReport> {
    let n = class.n();
    if n > CLASS_DEGREE_CAP {
        return Err(Error::CapExceeded {
            what: "class evaluation degree",
            requested: n,
            cap: CLASS_DEGREE_CAP,
        });
    }
    let groups = class.grouped();
    let r = groups.len();
    let mut cells: Vec<(usize, usize)> = Vec::new();
    for i in 0..r {
        cells.push((i, i));
        for j in (i + 1)..r {
            cells.push((i, j));
        }
    }
    let mut rem: Vec<usize> = groups.iter().map(|g| g.1).collect();
    let mut diag = vec![0usize; r];
    let mut off = vec![vec![0usize; r]; r];
    let mut total = BigCount::zero();
    profile_sum(
        engine, &groups, &cells, 0, &mut rem, &mut diag, &mut off, &mut total,
    )?;

    let parts = class.parts();
    let mut count = fact(parts);
    for &(_, mult) in &groups {
        let d = fact(mult);
        debug_assert!((&count % &d).is_zero());
        count /= d;
    }
    Ok(ClassMaxReport {
        class: class.clone(),
        max_value: total,
        canonical_maximizer: descending_interval_cycles(class),
        maximizer_count: count,
    })
}

/// Reports for every class of degree `n`, sorted by decreasing maximum;
/// classes of equal maximum keep their enumeration order.
pub fn most_likely(engine: &Engine, n: usize) -> Result<Vec<ClassMaxReport>> {
    let classes = partitions(n);
    let mut reports: Vec<ClassMaxReport> = classes
        .par_iter()
        .map(|class| class_max(engine, class))
        .collect::<Result<_>>()?;
    reports.sort_by(|a, b| b.max_value.cmp(&a.max_value));
    Ok(reports)
}

/// The leading reports sharing the globally maximal value.
pub fn winners(reports: &[ClassMaxReport]) -> Vec<&ClassMaxReport> {
    match reports.first() {
        None => Vec::new(),
        Some(top) => reports
            .iter()
            .take_while(|r| r.max_value == top.max_value)
            .collect(),
    }
}

/// The single descending cycle `(n, n-1, ..., 1)`.
pub fn descending_cycle(n: usize) -> Permutation {
    let cycle: Vec<u32> = (1..=n as u32).rev().collect();
    Permutation::from_cycles(&[cycle], n).expect("descending cycle is valid")
}

/// The canonical class maximizer: lengths in decreasing order, each assigned
/// the highest remaining interval as a descending cycle.
pub fn descending_interval_cycles(class: &PartitionClass) -> Permutation {
    let n = class.n();
    let mut cycles: Vec<Vec<u32>> = Vec::with_capacity(class.parts());
    let mut top = n as u32;
    for &len in class.lengths() {
        cycles.push((0..len as u32).map(|i| top - i).collect());
        top -= len as u32;
    }
    Permutation::from_cycles(&cycles, n).expect("intervals tile the degree")
}

/// All maximizers of the class: one permutation per distinct ordering of the
/// cycle lengths, each ordering tiling `1..=n` bottom-up with descending
/// interval cycles.
pub fn block_maximizers(class: &PartitionClass) -> Vec<Permutation> {
    let n = class.n();
    let mut counts: Vec<(usize, usize)> = class.grouped();
    let mut prefix: Vec<usize> = Vec::with_capacity(class.parts());
    let mut orderings: Vec<Vec<usize>> = Vec::new();
    distinct_orderings(&mut counts, &mut prefix, class.parts(), &mut orderings);
    orderings
        .iter()
        .map(|ordering| {
            let mut cycles: Vec<Vec<u32>> = Vec::with_capacity(ordering.len());
            let mut base = 0u32;
            for &len in ordering {
                cycles.push(((base + 1)..=(base + len as u32)).rev().collect());
                base += len as u32;
            }
            Permutation::from_cycles(&cycles, n).expect("intervals tile the degree")
        })
        .collect()
}

/// Emits every distinct ordering of the multiset given by `counts`.
fn distinct_orderings(
    counts: &mut Vec<(usize, usize)>,
    prefix: &mut Vec<usize>,
    remaining: usize,
    out: &mut Vec<Vec<usize>>,
) {
    if remaining == 0 {
        out.push(prefix.clone());
        return;
    }
    for idx in 0..counts.len() {
        if counts[idx].1 == 0 {
            continue;
        }
        counts[idx].1 -= 1;
        prefix.push(counts[idx].0);
        distinct_orderings(counts, prefix, remaining - 1, out);
        prefix.pop();
        counts[idx].1 += 1;
    }
}

/// Maximal multiplicity over all disjoint cycle pairs with supports
/// partitioning `1..=n` (the best a single unicyclic component can do).
/// Tabulated for `2 <= n <= 9`, where it is known to stay below `4^(n-2)`.
pub fn w_max_unicyclic(engine: &Engine, n: usize) -> Result<BigCount> {
    if !(2..=9).contains(&n) {
        return Err(Error::InvalidOperand(format!(
            "single-component pair maximum is tabulated for degrees 2..=9, got {n}"
        )));
    }
    let mut best = BigCount::zero();
    for m in 1..n {
        best = best.max(engine.pair_max(m, n - m)?);
    }
    let bound = Pow::pow(&BigCount::from(4u32), (n - 2) as u32);
    assert!(
        best <= bound,
        "single-component maximum exceeded 4^(n-2) at degree {n}"
    );
    Ok(best)
}

/// Multiplicities by class for an oracle tally, used by tests and the
/// verification battery to cross-check `class_max`.
pub fn class_spectrum(
    tally: &std::collections::BTreeMap<Permutation, BigCount>,
) -> HashMap<PartitionClass, (BigCount, Vec<Permutation>)> {
    let mut spectrum: HashMap<PartitionClass, (BigCount, Vec<Permutation>)> = HashMap::new();
    for (perm, count) in tally {
        let class = perm.cycle_class();
        let entry = spectrum
            .entry(class)
            .or_insert_with(|| (BigCount::zero(), Vec::new()));
        match count.cmp(&entry.0) {
            std::cmp::Ordering::Greater => {
                entry.0 = count.clone();
                entry.1 = vec![perm.clone()];
            }
            std::cmp::Ordering::Equal => entry.1.push(perm.clone()),
            std::cmp::Ordering::Less => {}
        }
    }
    spectrum
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{Oracle, OracleCaps};
    use crate::Mode;

    fn class(lengths: &[usize]) -> PartitionClass {
        PartitionClass::new(lengths.to_vec())
    }

    fn big(n: u64) -> BigCount {
        BigCount::from(n)
    }

    #[test]
    fn hand_class_values() {
        let engine = Engine::default();
        let cases: [(&[usize], u64); 8] = [
            (&[2, 2], 15),
            (&[3, 2], 47),
            (&[2, 1], 5),
            (&[1, 1, 1, 1], 10),
            (&[4], 14),
            (&[3, 1], 14),
            (&[2, 1, 1], 10),
            (&[1, 1], 2),
        ];
        for (lengths, expected) in cases {
            let report = class_max(&engine, &class(lengths)).unwrap();
            assert_eq!(report.max_value, big(expected), "class {:?}", lengths);
        }
    }

    #[test]
    fn identity_class_matches_involution_recurrence() {
        let engine = Engine::default();
        for n in 1..=12usize {
            let report = class_max(&engine, &class(&vec![1; n])).unwrap();
            assert_eq!(report.max_value, engine.involutions(n), "degree {n}");
            assert_eq!(report.maximizer_count, big(1));
            assert!(report.canonical_maximizer.is_identity());
        }
    }

    #[test]
    fn canonical_maximizer_layout() {
        assert_eq!(
            descending_interval_cycles(&class(&[2, 2])).to_string(),
            "(4 3)(2 1)"
        );
        assert_eq!(
            descending_interval_cycles(&class(&[3, 2])).to_string(),
            "(5 4 3)(2 1)"
        );
        assert_eq!(descending_cycle(3).to_string(), "(3 2 1)");
        let blocks = block_maximizers(&class(&[2, 1, 1]));
        assert_eq!(blocks.len(), 3);
    }

    #[test]
    fn class_max_matches_oracle_argmax() {
        let engine = Engine::default();
        let oracle = Oracle::new(OracleCaps::default());
        for n in 1..=5usize {
            let tally = oracle.count_all(n, Mode::Uniform).unwrap();
            let spectrum = class_spectrum(&tally);
            for report in most_likely(&engine, n).unwrap() {
                let (best, attainers) = &spectrum[&report.class];
                assert_eq!(report.max_value, *best, "max for class {}", report.class);
                assert_eq!(
                    report.maximizer_count,
                    big(attainers.len() as u64),
                    "maximizer count for class {}",
                    report.class
                );
                assert!(
                    attainers.contains(&report.canonical_maximizer),
                    "canonical maximizer attains the max for class {}",
                    report.class
                );
                let mut blocks = block_maximizers(&report.class);
                blocks.sort_by_key(|p| p.images().to_vec());
                let mut expected = attainers.clone();
                expected.sort_by_key(|p| p.images().to_vec());
                assert_eq!(blocks, expected, "maximizer set for class {}", report.class);
            }
        }
    }

    #[test]
    fn winner_tables_small_degrees() {
        let engine = Engine::default();
        let reports = most_likely(&engine, 4).unwrap();
        let top = winners(&reports);
        assert_eq!(top.len(), 1);
        assert_eq!(top[0].class, class(&[2, 2]));
        assert_eq!(top[0].max_value, big(15));

        let reports = most_likely(&engine, 5).unwrap();
        let top = winners(&reports);
        assert_eq!(top.len(), 1);
        assert_eq!(top[0].class, class(&[3, 2]));
        assert_eq!(top[0].max_value, big(47));

        // Degrees 2 and 3 are ties between the split class and its rival.
        let reports = most_likely(&engine, 2).unwrap();
        let top = winners(&reports);
        let mut tie: Vec<String> = top.iter().map(|r| r.class.to_string()).collect();
        tie.sort();
        assert_eq!(tie, vec!["1+1", "2"]);

        let reports = most_likely(&engine, 3).unwrap();
        let top = winners(&reports);
        let mut tie: Vec<String> = top.iter().map(|r| r.class.to_string()).collect();
        tie.sort();
        assert_eq!(tie, vec!["2+1", "3"]);
        assert!(top.iter().all(|r| r.max_value == big(5)));
    }

    #[test]
    fn single_component_pair_maximum() {
        let engine = Engine::default();
        assert_eq!(w_max_unicyclic(&engine, 2).unwrap(), big(1));
        assert_eq!(w_max_unicyclic(&engine, 4).unwrap(), big(11));
        assert_eq!(w_max_unicyclic(&engine, 5).unwrap(), big(37));
        assert!(w_max_unicyclic(&engine, 1).is_err());
        assert!(w_max_unicyclic(&engine, 10).is_err());
    }

    #[test]
    fn degree_cap_enforced() {
        let engine = Engine::default();
        let too_big = class(&vec![1; CLASS_DEGREE_CAP + 1]);
        assert!(matches!(
            class_max(&engine, &too_big),
            Err(Error::CapExceeded { .. })
        ));
        let at_cap = class(&[CLASS_DEGREE_CAP]);
        assert!(class_max(&engine, &at_cap).is_ok());
    }
}
