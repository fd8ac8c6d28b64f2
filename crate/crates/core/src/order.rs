//! Finite linear orders, strictly increasing maps, arity diagrams, and the
//! Kleene-Brouwer comparison, plus the block/length/lex enumeration of finite
//! sequences used by the tree-to-dilator reductions.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::collections::HashMap;
use std::hash::Hash;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OrderError {
    #[error("labels are not distinct")]
    DuplicateLabel,
    #[error("label not in carrier")]
    LabelNotInCarrier,
    #[error("map values are not strictly increasing")]
    NotIncreasing,
    #[error("map value {value} out of target range {target}")]
    ValueOutOfRange { value: u32, target: usize },
    #[error("map length {len} does not match source size {expected}")]
    LengthMismatch { len: usize, expected: usize },
    #[error("ranges of the two legs do not cover the join")]
    CoverViolation,
    #[error("arity {0} exceeds enumeration bound {1}")]
    BoundExceeded(usize, usize),
    #[error("slot tags disagree at position {0}")]
    SlotMismatch(usize),
}

/// A finite linear order over opaque labels. The listing order is the order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteOrder<L: Eq + Hash> {
    labels: Vec<L>,
    rank: HashMap<L, usize>,
}

impl<L: Clone + Eq + Hash> FiniteOrder<L> {
    pub fn new(labels: Vec<L>) -> Result<Self, OrderError> {
        let mut rank = HashMap::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            if rank.insert(l.clone(), i).is_some() {
                return Err(OrderError::DuplicateLabel);
            }
        }
        Ok(FiniteOrder { labels, rank })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, i: usize) -> &L {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[L] {
        &self.labels
    }

    pub fn rank(&self, l: &L) -> Option<usize> {
        self.rank.get(l).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = &L> {
        self.labels.iter()
    }
}

impl FiniteOrder<u32> {
    /// The order 0 < 1 < ... < n-1.
    pub fn initial_segment(n: usize) -> Self {
        FiniteOrder::new((0..n as u32).collect()).unwrap()
    }
}

/// A strictly increasing map between initial segments of the naturals.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IncreasingMap {
    source: usize,
    target: usize,
    values: Vec<u32>,
}

impl IncreasingMap {
    pub fn new(target: usize, values: Vec<u32>) -> Result<Self, OrderError> {
        for w in values.windows(2) {
            if w[0] >= w[1] {
                return Err(OrderError::NotIncreasing);
            }
        }
        if let Some(&v) = values.last() {
            if v as usize >= target {
                return Err(OrderError::ValueOutOfRange { value: v, target });
            }
        }
        Ok(IncreasingMap { source: values.len(), target, values })
    }

    pub fn identity(n: usize) -> Self {
        IncreasingMap { source: n, target: n, values: (0..n as u32).collect() }
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn apply(&self, i: usize) -> u32 {
        self.values[i]
    }

    pub fn is_identity(&self) -> bool {
        self.source == self.target && self.values.iter().enumerate().all(|(i, &v)| i as u32 == v)
    }

    /// self following `first`: (self ∘ first)(i) = self(first(i)).
    pub fn compose(&self, first: &IncreasingMap) -> IncreasingMap {
        assert_eq!(first.target, self.source, "composition source/target mismatch");
        let values = first.values.iter().map(|&v| self.values[v as usize]).collect();
        IncreasingMap { source: first.source, target: self.target, values }
    }

    /// Maps a strictly increasing argument tuple through the map.
    pub fn map_args(&self, args: &[u32]) -> Vec<u32> {
        args.iter().map(|&a| self.values[a as usize]).collect()
    }
}

/// A pullback-and-cover square of increasing maps recording how two finite
/// parameter sets overlap inside a common carrier.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ArityDiagram {
    e0: IncreasingMap,
    e1: IncreasingMap,
    leg0: IncreasingMap,
    leg1: IncreasingMap,
}

impl ArityDiagram {
    /// Builds the diagram from its two legs into the join, checking the cover
    /// condition and computing the pullback.
    pub fn new(e0: IncreasingMap, e1: IncreasingMap) -> Result<Self, OrderError> {
        assert_eq!(e0.target, e1.target, "legs must share the join");
        let join = e0.target;
        let r0: BTreeSet<u32> = e0.values.iter().copied().collect();
        let r1: BTreeSet<u32> = e1.values.iter().copied().collect();
        if r0.union(&r1).count() != join {
            return Err(OrderError::CoverViolation);
        }
        let meet: Vec<u32> = r0.intersection(&r1).copied().collect();
        let pos = |m: &IncreasingMap, v: u32| m.values.iter().position(|&x| x == v).unwrap() as u32;
        let leg0 = IncreasingMap::new(e0.source, meet.iter().map(|&v| pos(&e0, v)).collect())?;
        let leg1 = IncreasingMap::new(e1.source, meet.iter().map(|&v| pos(&e1, v)).collect())?;
        Ok(ArityDiagram { e0, e1, leg0, leg1 })
    }

    /// The diagram of two sorted subsets of a common carrier, relabelled onto
    /// the canonical join 0..|a ∪ b|.
    pub fn from_subsets(a: &BTreeSet<u32>, b: &BTreeSet<u32>) -> Self {
        let union: Vec<u32> = a.union(b).copied().collect();
        let pos: HashMap<u32, u32> =
            union.iter().enumerate().map(|(i, &v)| (v, i as u32)).collect();
        let e0 = IncreasingMap::new(union.len(), a.iter().map(|v| pos[v]).collect()).unwrap();
        let e1 = IncreasingMap::new(union.len(), b.iter().map(|v| pos[v]).collect()).unwrap();
        ArityDiagram::new(e0, e1).unwrap()
    }

    pub fn n_meet(&self) -> usize {
        self.leg0.source
    }

    pub fn n0(&self) -> usize {
        self.e0.source
    }

    pub fn n1(&self) -> usize {
        self.e1.source
    }

    pub fn n_join(&self) -> usize {
        self.e0.target
    }

    pub fn e0(&self) -> &IncreasingMap {
        &self.e0
    }

    pub fn e1(&self) -> &IncreasingMap {
        &self.e1
    }

    pub fn leg0(&self) -> &IncreasingMap {
        &self.leg0
    }

    pub fn leg1(&self) -> &IncreasingMap {
        &self.leg1
    }

    pub fn is_trivial(&self) -> bool {
        self.e0.is_identity() && self.e1.is_identity()
    }

    /// The same overlap with the roles of the two legs switched.
    pub fn swap(&self) -> ArityDiagram {
        ArityDiagram {
            e0: self.e1.clone(),
            e1: self.e0.clone(),
            leg0: self.leg1.clone(),
            leg1: self.leg0.clone(),
        }
    }
}

/// Pairwise inclusion diagrams of a family of subsets of a carrier order.
///
/// Entry `(i, j)` of the result is the diagram of `(subsets[i], subsets[j])`
/// after extracting ranks in `x`.
pub fn diag<L: Clone + Eq + Hash>(
    x: &FiniteOrder<L>,
    subsets: &[Vec<L>],
) -> Result<Vec<Vec<ArityDiagram>>, OrderError> {
    let mut rank_sets = Vec::with_capacity(subsets.len());
    for s in subsets {
        let mut rs = BTreeSet::new();
        for l in s {
            let r = x.rank(l).ok_or(OrderError::LabelNotInCarrier)?;
            rs.insert(r as u32);
        }
        rank_sets.push(rs);
    }
    Ok(rank_sets
        .iter()
        .map(|a| rank_sets.iter().map(|b| ArityDiagram::from_subsets(a, b)).collect())
        .collect())
}

/// The diagram of a single subset pair over a numeric carrier.
pub fn diag_pair(a: &BTreeSet<u32>, b: &BTreeSet<u32>) -> ArityDiagram {
    ArityDiagram::from_subsets(a, b)
}

fn increasing_maps(source: usize, target: usize) -> Vec<IncreasingMap> {
    fn go(start: u32, left: usize, target: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for v in start..=(target - left) as u32 {
            cur.push(v);
            go(v + 1, left - 1, target, cur, out);
            cur.pop();
        }
    }
    if source > target {
        return Vec::new();
    }
    let mut out = Vec::new();
    go(0, source, target, &mut Vec::new(), &mut out);
    out.into_iter().map(|values| IncreasingMap::new(target, values).unwrap()).collect()
}

/// All arity diagrams with leg sources `n0`, `n1`, up to equality: every join
/// size in `max(n0, n1)..=n0 + n1` and every covering pair of legs.
pub fn enum_arity_diagrams(
    n0: usize,
    n1: usize,
    bound: usize,
) -> Result<Vec<ArityDiagram>, OrderError> {
    if n0 > bound {
        return Err(OrderError::BoundExceeded(n0, bound));
    }
    if n1 > bound {
        return Err(OrderError::BoundExceeded(n1, bound));
    }
    let mut out = Vec::new();
    for join in n0.max(n1)..=n0 + n1 {
        for e0 in increasing_maps(n0, join) {
            for e1 in increasing_maps(n1, join) {
                if let Ok(d) = ArityDiagram::new(e0.clone(), e1) {
                    out.push(d);
                }
            }
        }
    }
    Ok(out)
}

pub const DEFAULT_DIAGRAM_BOUND: usize = 6;

/// Kleene-Brouwer comparison of two sequences: a proper extension is smaller,
/// otherwise the first differing position decides. `cmp_at` supplies the
/// per-position comparator and may reject mismatched slot tags.
pub fn kb_compare<T, E>(
    a: &[T],
    b: &[T],
    mut cmp_at: impl FnMut(usize, &T, &T) -> Result<Ordering, E>,
) -> Result<Ordering, E> {
    for (i, (x, y)) in a.iter().zip(b.iter()).enumerate() {
        match cmp_at(i, x, y)? {
            Ordering::Equal => continue,
            v => return Ok(v),
        }
    }
    Ok(b.len().cmp(&a.len()))
}

/// KB on plain numeric sequences.
pub fn kb_compare_nat(a: &[u64], b: &[u64]) -> Ordering {
    kb_compare(a, b, |_, x: &u64, y: &u64| Ok::<_, ()>(x.cmp(y))).unwrap()
}

/// The fixed enumeration of finite sequences of naturals used by the
/// tree-to-dilator reductions: blocks n = 0, 1, 2, ... of sequences with
/// length <= n and entries < n not listed earlier, each block ordered by
/// length then lexicographically. A proper extension always gets a strictly
/// larger index, and the sequence at index i has length at most i.
pub struct SeqEnumerator;

fn block_of(s: &[u64]) -> u64 {
    let max_entry = s.iter().copied().max().map(|m| m + 1).unwrap_or(0);
    (s.len() as u64).max(max_entry)
}

fn pow(base: u64, e: usize) -> u64 {
    let mut r = 1u64;
    for _ in 0..e {
        r = r.saturating_mul(base);
    }
    r
}

/// Number of sequences listed by the end of block n: sum of n^l for l <= n.
fn listed_through(n: u64) -> u64 {
    (0..=n as usize).map(|l| pow(n, l)).sum()
}

/// Sequences of the given length that first appear in block n: entries < n,
/// minus those already listed (entries < n-1, unless the length forces n).
fn count_new(len: usize, n: u64) -> u64 {
    if len as u64 == n {
        pow(n, len)
    } else {
        pow(n, len) - pow(n - 1, len)
    }
}

/// Lexicographic rank of s among the new length-|s| sequences of block n.
fn rank_in_block(s: &[u64], n: u64) -> u64 {
    let len = s.len();
    let all: u64 = s.iter().enumerate().map(|(i, &d)| d * pow(n, len - 1 - i)).sum();
    if len as u64 == n {
        return all;
    }
    // subtract sequences lex-below s whose entries all stay < n-1
    let mut old = 0u64;
    for (i, &d) in s.iter().enumerate() {
        old += d.min(n - 1) * pow(n - 1, len - 1 - i);
        if d >= n - 1 {
            return all - old;
        }
    }
    all - old
}

/// Inverse of `rank_in_block`.
fn unrank_in_block(mut r: u64, len: usize, n: u64) -> Vec<u64> {
    let mut out = Vec::with_capacity(len);
    let mut forced = len as u64 == n; // whole length-class is new
    for i in 0..len {
        let rest = len - 1 - i;
        for d in 0..n {
            let touches = forced || d == n - 1;
            let count =
                if touches { pow(n, rest) } else { pow(n, rest) - pow(n - 1, rest) };
            if r < count {
                out.push(d);
                forced = touches;
                break;
            }
            r -= count;
        }
    }
    debug_assert_eq!(r, 0);
    out
}

impl SeqEnumerator {
    pub fn seq_at(i: u64) -> Vec<u64> {
        let mut n = 0u64;
        while listed_through(n) <= i {
            n += 1;
        }
        let mut offset = i - if n == 0 { 0 } else { listed_through(n - 1) };
        for len in 0..=n as usize {
            let c = count_new(len, n);
            if offset < c {
                return unrank_in_block(offset, len, n);
            }
            offset -= c;
        }
        unreachable!("offset exhausted within its block")
    }

    pub fn seq_index(s: &[u64]) -> u64 {
        let n = block_of(s);
        let before: u64 = if n == 0 { 0 } else { listed_through(n - 1) };
        let shorter: u64 = (0..s.len()).map(|l| count_new(l, n)).sum();
        before + shorter + rank_in_block(s, n)
    }
}

/// seq_at as a free function.
pub fn seq_at(i: u64) -> Vec<u64> {
    SeqEnumerator::seq_at(i)
}

/// seq_index as a free function.
pub fn seq_index(s: &[u64]) -> u64 {
    SeqEnumerator::seq_index(s)
}

pub fn is_proper_extension(longer: &[u64], shorter: &[u64]) -> bool {
    longer.len() > shorter.len() && longer[..shorter.len()] == *shorter
}
