//! Reductions from decidable trees over paired sequences to monotone families
//! of finite linear orders and finite dilators, plus the truncated functorial
//! Shoenfield tree that cross-validates the dilator family.

use std::cmp::Ordering;
use crate::dilator::{Predilator, TermId};

use crate::order::{kb_compare_nat, seq_at};

/// A total membership predicate over equal-length sequence pairs, declared
/// prefix-closed (spot-checked, not provable).
pub struct DecidableTree {
    pred: Box<dyn Fn(&[u64], &[u64]) -> bool + Sync + Send>,
}

impl DecidableTree {
    pub fn new(pred: impl Fn(&[u64], &[u64]) -> bool + Sync + Send + 'static) -> Self {
        DecidableTree { pred: Box::new(pred) }
    }

    pub fn contains(&self, xs: &[u64], ys: &[u64]) -> bool {
        debug_assert_eq!(xs.len(), ys.len(), "tree pairs have equal lengths");
        (self.pred)(xs, ys)
    }

    /// Everything is in the tree.
    pub fn full() -> Self {
        DecidableTree::new(|_, _| true)
    }

    /// Nothing is in the tree.
    pub fn empty() -> Self {
        DecidableTree::new(|_, _| false)
    }

    /// Finitely branching: all second-component entries below the bound.
    pub fn bounded(b: u64) -> Self {
        DecidableTree::new(move |_, ys| ys.iter().all(|&y| y < b))
    }

    /// Second components must run strictly downward: every branch is finite
    /// but branching is unbounded.
    pub fn descending_run() -> Self {
        DecidableTree::new(|_, ys| ys.windows(2).all(|w| w[0] > w[1]))
    }

    /// Pseudorandom prefix-closed tree: a pair is in when every prefix pair
    /// hashes in.
    pub fn seeded(key: u64) -> Self {
        fn mix(mut h: u64, v: u64) -> u64 {
            h ^= v.wrapping_add(0x9e3779b97f4a7c15).wrapping_add(h << 6).wrapping_add(h >> 2);
            h = h.wrapping_mul(0xff51afd7ed558ccd);
            h ^ (h >> 33)
        }
        DecidableTree::new(move |xs, ys| {
            let mut h = key;
            for k in 0..xs.len() {
                h = mix(h, xs[k]);
                h = mix(h, ys[k]);
                if h % 4 == 0 {
                    return false;
                }
            }
            true
        })
    }

    /// Finite explicit tree given by its member pairs (closed under prefixes
    /// by listing).
    pub fn table(members: Vec<(Vec<u64>, Vec<u64>)>) -> Self {
        DecidableTree::new(move |xs, ys| {
            members.iter().any(|(a, b)| a as &[u64] == xs && b as &[u64] == ys)
        })
    }
}

/// Index i is in-tree for the prefix s when the paired code test accepts it.
fn in_tree(tree: &DecidableTree, s: &[u64], i: usize) -> bool {
    let code = seq_at(i as u64);
    tree.contains(&s[..code.len()], &code)
}

/// A linear order on 0..n presented by its ranking.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CarrierOrder {
    rank: Vec<usize>,
}

impl CarrierOrder {
    pub fn from_sorted(sorted: Vec<usize>) -> Self {
        let mut rank = vec![0; sorted.len()];
        for (r, &i) in sorted.iter().enumerate() {
            rank[i] = r;
        }
        CarrierOrder { rank }
    }

    pub fn len(&self) -> usize {
        self.rank.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rank.is_empty()
    }

    pub fn rank(&self, i: usize) -> usize {
        self.rank[i]
    }

    pub fn less(&self, i: usize, j: usize) -> bool {
        self.rank[i] < self.rank[j]
    }

    pub fn cmp(&self, i: usize, j: usize) -> Ordering {
        self.rank[i].cmp(&self.rank[j])
    }

    /// Elements listed in increasing order.
    pub fn sorted(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.rank.len()).collect();
        idx.sort_by_key(|&i| self.rank[i]);
        idx
    }

    /// The restriction to 0..k agrees with the other order.
    pub fn restricts(&self, smaller: &CarrierOrder) -> bool {
        let k = smaller.len();
        (0..k).all(|i| (0..k).all(|j| self.less(i, j) == smaller.less(i, j)))
    }
}

/// The order family step: in-tree codes under KB above the out-of-tree
/// indices, which sit below in index order.
pub fn order_family_step(tree: &DecidableTree, s: &[u64]) -> CarrierOrder {
    let n = s.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| {
        let (ti, tj) = (in_tree(tree, s, i), in_tree(tree, s, j));
        match (ti, tj) {
            (true, true) => kb_compare_nat(&seq_at(i as u64), &seq_at(j as u64)),
            (false, true) => Ordering::Less,
            (true, false) => Ordering::Greater,
            (false, false) => i.cmp(&j),
        }
    });
    CarrierOrder::from_sorted(idx)
}

fn pair_code(a: u64, b: u64) -> u64 {
    // Cantor pairing keeps the paired inputs within u64 at desk scale
    (a + b) * (a + b + 1) / 2 + b
}

/// The two-parameter family: the order-family construction run on the
/// interleaved pair of equal-length inputs.
pub fn pair_order(tree: &DecidableTree, s: &[u64], t: &[u64]) -> CarrierOrder {
    debug_assert_eq!(s.len(), t.len());
    let paired: Vec<u64> = s.iter().zip(t).map(|(&a, &b)| pair_code(a, b)).collect();
    order_family_step(tree, &paired)
}

/// The dilator family step: term i denotes the code at index i + 1; its
/// priority permutation ranks the argument slots by the relativized order,
/// distances are first differences of the codes, and the term order is KB on
/// the codes.
pub fn dilator_family_step(tree: &DecidableTree, s: &[u64]) -> Predilator {
    let n = s.len();
    let codes: Vec<Vec<u64>> = (0..n).map(|i| seq_at(i as u64 + 1)).collect();
    let names: Vec<String> = (0..n).map(|i| format!("t{i}")).collect();
    let arities: Vec<usize> = codes.iter().map(|c| c.len()).collect();
    let sigmas: Vec<Vec<usize>> = codes
        .iter()
        .map(|code| {
            let m = code.len();
            let ord = pair_order(tree, &s[..m], code);
            (0..m).map(|j| ord.rank(j)).collect()
        })
        .collect();
    let mut dists = vec![vec![0; n]; n];
    for i in 0..n {
        for j in 0..n {
            dists[i][j] = if i == j {
                arities[i]
            } else {
                first_code_difference(&codes[i], &codes[j])
            };
        }
    }
    let mut order: Vec<TermId> = (0..n).collect();
    order.sort_by(|&i, &j| kb_compare_nat(&codes[i], &codes[j]));
    Predilator::from_parts(names, arities, sigmas, dists, order).unwrap()
}

fn first_code_difference(a: &[u64], b: &[u64]) -> usize {
    let cap = a.len().min(b.len());
    for m in 0..cap {
        if a[m] != b[m] {
            return m;
        }
    }
    cap
}

/// One entry of the truncated functorial Shoenfield tree: the interleaved
/// code / value sequence.
pub type ShoenfieldEntry = Vec<u64>;

/// The finite stage of the Shoenfield tree: for every term index, all value
/// assignments below n whose slot map embeds the relativized order into n,
/// interleaved with the code and KB-sorted.
pub fn shoenfield_truncation(tree: &DecidableTree, s: &[u64], n: usize) -> Vec<ShoenfieldEntry> {
    let mut entries = Vec::new();
    for i in 0..s.len() {
        let code = seq_at(i as u64 + 1);
        let m = code.len();
        let ord = pair_order(tree, &s[..m], &code);
        for combo in increasing_tuples(n, m) {
            // slot k gets the combo value at the slot's order rank
            let vals: Vec<u64> = (0..m).map(|k| combo[ord.rank(k)] as u64).collect();
            let mut seq = Vec::with_capacity(2 * m);
            for k in 0..m {
                seq.push(code[k]);
                seq.push(vals[k]);
            }
            entries.push(seq);
        }
    }
    entries.sort_by(|a, b| kb_compare_nat(a, b));
    entries
}

fn increasing_tuples(n: usize, k: usize) -> Vec<Vec<u32>> {
    fn go(start: u32, left: usize, n: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for v in start..=(n - left) as u32 {
            cur.push(v);
            go(v + 1, left - 1, n, cur, out);
            cur.pop();
        }
    }
    if k > n {
        return Vec::new();
    }
    let mut out = Vec::new();
    go(0, k, n, &mut Vec::new(), &mut out);
    out
}

/// The Shoenfield stage as a coded functor, for the normalize cross-check.
pub fn shoenfield_functor<'a>(
    tree: &'a DecidableTree,
    s: &[u64],
) -> crate::coded::CodedFunctor<'a, ShoenfieldEntry> {
    let s0 = s.to_vec();
    crate::coded::CodedFunctor {
        order_at: Box::new(move |n| shoenfield_truncation(tree, &s0, n)),
        map_at: Box::new(|f, e| {
            let mut out = e.clone();
            for k in (1..out.len()).step_by(2) {
                out[k] = f.apply(out[k] as usize) as u64;
            }
            out
        }),
        supp_at: Box::new(|_, e| {
            let mut vals: Vec<u32> =
                e.iter().skip(1).step_by(2).map(|&v| v as u32).collect();
            vals.sort_unstable();
            vals.dedup();
            vals
        }),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilyViolation {
    CarrierSize { prefix: Vec<u64>, got: usize },
    NotMonotone { prefix: Vec<u64>, longer: Vec<u64> },
    NotLinear { prefix: Vec<u64> },
    InvalidPredilator { prefix: Vec<u64> },
    NotPrefixClosed { xs: Vec<u64>, ys: Vec<u64> },
}

#[derive(Debug, Clone, Default)]
pub struct FamilyReport {
    pub violations: Vec<FamilyViolation>,
}

impl FamilyReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Sweeps the family clauses over all prefixes of the given plays up to the
/// depth: carrier sizes, linearity, monotone restriction, predilator validity
/// of the dilator steps, and a prefix-closure spot check of the tree itself.
pub fn family_check(tree: &DecidableTree, plays: &[Vec<u64>], depth: usize) -> FamilyReport {
    let mut violations = Vec::new();
    for play in plays {
        let play = &play[..play.len().min(depth)];
        let mut prev_ord: Option<CarrierOrder> = None;
        let mut prev_dil: Option<Predilator> = None;
        for k in 0..=play.len() {
            let s = &play[..k];
            let ord = order_family_step(tree, s);
            if ord.len() != k {
                violations.push(FamilyViolation::CarrierSize { prefix: s.to_vec(), got: ord.len() });
            }
            let mut ranks: Vec<usize> = (0..ord.len()).map(|i| ord.rank(i)).collect();
            ranks.sort_unstable();
            if ranks != (0..ord.len()).collect::<Vec<_>>() {
                violations.push(FamilyViolation::NotLinear { prefix: s.to_vec() });
            }
            if let Some(prev) = &prev_ord {
                if !ord.restricts(prev) {
                    violations.push(FamilyViolation::NotMonotone {
                        prefix: play[..k - 1].to_vec(),
                        longer: s.to_vec(),
                    });
                }
            }
            let dil = dilator_family_step(tree, s);
            if !crate::dilator::validate_predilator(&dil).is_valid() {
                violations.push(FamilyViolation::InvalidPredilator { prefix: s.to_vec() });
            }
            if let Some(prev) = &prev_dil {
                if prev != &dil.prefix(prev.term_count()) {
                    violations.push(FamilyViolation::NotMonotone {
                        prefix: play[..k - 1].to_vec(),
                        longer: s.to_vec(),
                    });
                }
            }
            prev_ord = Some(ord);
            prev_dil = Some(dil);
        }
        // sample-based closure spot check along the play
        for i in 0..64u64 {
            let code = seq_at(i);
            if code.len() > play.len() {
                continue;
            }
            let xs = &play[..code.len()];
            if tree.contains(xs, &code) {
                for k in 0..code.len() {
                    if !tree.contains(&xs[..k], &code[..k]) {
                        violations.push(FamilyViolation::NotPrefixClosed {
                            xs: xs.to_vec(),
                            ys: code.clone(),
                        });
                    }
                }
            }
        }
    }
    violations.dedup();
    FamilyReport { violations }
}

/// The in-tree part of the order step is order-isomorphic to the KB order on
/// the accepted codes; descending chains correspond exactly.
pub fn in_tree_matches_kb(tree: &DecidableTree, s: &[u64]) -> bool {
    let ord = order_family_step(tree, s);
    let in_idx: Vec<usize> = (0..s.len()).filter(|&i| in_tree(tree, s, i)).collect();
    let out_count = s.len() - in_idx.len();
    // out-of-tree indices occupy the bottom ranks in index order
    let mut out_sorted: Vec<usize> =
        (0..s.len()).filter(|&i| !in_tree(tree, s, i)).collect();
    out_sorted.sort_unstable();
    for (r, &i) in out_sorted.iter().enumerate() {
        if ord.rank(i) != r {
            return false;
        }
    }
    // the in-tree part occupies the top ranks, carrying the KB order of codes
    let mut by_rank = in_idx.clone();
    by_rank.sort_by_key(|&i| ord.rank(i));
    for (offset, &i) in by_rank.iter().enumerate() {
        if ord.rank(i) != out_count + offset {
            return false;
        }
    }
    by_rank.windows(2).all(|w| {
        kb_compare_nat(&seq_at(w[0] as u64), &seq_at(w[1] as u64)) == Ordering::Less
    })
}

/// Longest strictly descending run length among the in-tree elements equals
/// the number of accepted codes (they form one linear block).
pub fn in_tree_block(tree: &DecidableTree, s: &[u64]) -> Vec<usize> {
    let ord = order_family_step(tree, s);
    let mut in_idx: Vec<usize> = (0..s.len()).filter(|&i| in_tree(tree, s, i)).collect();
    in_idx.sort_by_key(|&i| ord.rank(i));
    in_idx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coded::normalize_coded;
    use crate::dilator::{search_isomorphism, validate_predilator};
    use crate::order::DEFAULT_DIAGRAM_BOUND as BOUND;

    #[test]
    fn empty_prefix_gives_empty_order() {
        let ord = order_family_step(&DecidableTree::full(), &[]);
        assert!(ord.is_empty());
    }

    #[test]
    fn full_tree_is_kb_on_codes() {
        let tree = DecidableTree::full();
        let s = vec![0, 0, 0, 0, 0];
        let ord = order_family_step(&tree, &s);
        let sorted = ord.sorted();
        for w in sorted.windows(2) {
            assert_eq!(
                kb_compare_nat(&seq_at(w[0] as u64), &seq_at(w[1] as u64)),
                Ordering::Less
            );
        }
    }

    #[test]
    fn empty_tree_is_index_order() {
        let tree = DecidableTree::empty();
        let ord = order_family_step(&tree, &[3, 1, 4, 1]);
        assert_eq!(ord.sorted(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn order_step_is_monotone() {
        for tree in [DecidableTree::full(), DecidableTree::seeded(7), DecidableTree::bounded(2)] {
            let play = vec![1, 0, 2, 1, 0, 1];
            for k in 1..=play.len() {
                let big = order_family_step(&tree, &play[..k]);
                let small = order_family_step(&tree, &play[..k - 1]);
                assert!(big.restricts(&small), "restriction failed at {k}");
            }
        }
    }

    #[test]
    fn empty_prefix_gives_empty_predilator() {
        let d = dilator_family_step(&DecidableTree::full(), &[]);
        assert_eq!(d.term_count(), 0);
    }

    #[test]
    fn singleton_prefix_gives_one_unary_term() {
        let d = dilator_family_step(&DecidableTree::full(), &[0]);
        assert_eq!(d.term_count(), 1);
        assert_eq!(d.arity(0), 1);
        assert_eq!(d.sigma(0), &[0]);
        assert!(validate_predilator(&d).is_valid());
    }

    #[test]
    fn dilator_steps_are_valid_and_monotone() {
        for tree in [DecidableTree::full(), DecidableTree::seeded(3), DecidableTree::bounded(2)] {
            let play = vec![0, 1, 0, 1, 0];
            for k in 0..=play.len() {
                let d = dilator_family_step(&tree, &play[..k]);
                assert!(validate_predilator(&d).is_valid(), "invalid step at {k}");
                if k > 0 {
                    let prev = dilator_family_step(&tree, &play[..k - 1]);
                    assert_eq!(prev, d.prefix(k - 1), "prefix restriction at {k}");
                }
            }
        }
    }

    #[test]
    fn shoenfield_empty_carrier() {
        // with no values every positive-arity term vanishes
        let entries = shoenfield_truncation(&DecidableTree::full(), &[0, 0], 0);
        assert!(entries.is_empty());
    }

    #[test]
    fn shoenfield_full_tree_small_hand_count() {
        // |s| = 2, n = 2: codes <0> and <1>, unary each: two values per code
        let entries = shoenfield_truncation(&DecidableTree::full(), &[0, 0], 2);
        assert_eq!(entries.len(), 4);
        assert_eq!(entries, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
    }

    #[test]
    fn shoenfield_monotone_union() {
        for tree in [DecidableTree::full(), DecidableTree::seeded(11)] {
            let play = vec![0, 1, 2, 0];
            for k in 1..=play.len() {
                for n in 0..=3 {
                    let small = shoenfield_truncation(&tree, &play[..k - 1], n);
                    let big = shoenfield_truncation(&tree, &play[..k], n);
                    for e in &small {
                        assert!(big.contains(e), "union not monotone at {k}, {n}");
                    }
                    // and the KB order restricts
                    let pos: Vec<usize> =
                        small.iter().map(|e| big.iter().position(|f| f == e).unwrap()).collect();
                    assert!(pos.windows(2).all(|w| w[0] < w[1]));
                }
            }
        }
    }

    #[test]
    fn normalize_matches_family_step() {
        for tree in [DecidableTree::full(), DecidableTree::seeded(5)] {
            let s = vec![0, 1, 0];
            let functor = shoenfield_functor(&tree, &s);
            let direct = dilator_family_step(&tree, &s);
            let bound = direct.max_arity().max(1);
            let fitted = normalize_coded(&functor, bound).expect("fit succeeds");
            assert!(
                search_isomorphism(&fitted.predilator, &direct, BOUND).unwrap().is_some(),
                "normalized functor must agree with the family step"
            );
        }
    }

    #[test]
    fn family_check_passes_on_builtins() {
        let plays = vec![vec![0, 1, 0, 1], vec![2, 2, 2, 2]];
        for tree in [
            DecidableTree::full(),
            DecidableTree::empty(),
            DecidableTree::bounded(3),
            DecidableTree::descending_run(),
            DecidableTree::seeded(42),
        ] {
            let report = family_check(&tree, &plays, 4);
            assert!(report.is_valid(), "unexpected violations: {:?}", report.violations);
        }
    }

    #[test]
    fn family_check_flags_non_closed_tree() {
        // accepts only pairs of length exactly 2: not prefix closed
        let tree = DecidableTree::new(|xs, _| xs.len() == 2);
        let report = family_check(&tree, &[vec![0, 0, 0]], 3);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, FamilyViolation::NotPrefixClosed { .. })));
    }

    #[test]
    fn in_tree_part_is_kb_block() {
        for tree in [DecidableTree::full(), DecidableTree::seeded(9), DecidableTree::bounded(2)] {
            for len in 0..=6 {
                let s: Vec<u64> = (0..len).map(|i| (i % 3) as u64).collect();
                assert!(in_tree_matches_kb(&tree, &s));
            }
        }
    }
}
