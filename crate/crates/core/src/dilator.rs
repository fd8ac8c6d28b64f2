//! Predilators in abstract form: a term list with arities, priority
//! permutations, a distance ultrametric, and a total term order. Comparison of
//! applied terms goes through the fundamental comparison rule; everything else
//! (application to orders, embeddings, diagram relations) is derived from it.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use thiserror::Error;

use crate::order::{
    enum_arity_diagrams, ArityDiagram, FiniteOrder, IncreasingMap, OrderError,
};

pub type TermId = usize;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DilatorError {
    #[error("term names are not distinct")]
    DuplicateName,
    #[error("sigma of term {0} has wrong length")]
    SigmaLength(TermId),
    #[error("dist matrix shape is wrong")]
    DistShape,
    #[error("order is not a permutation of the term ids")]
    OrderShape,
    #[error("arity mismatch: term {term} has arity {arity}, got {got} arguments")]
    ArityMismatch { term: TermId, arity: usize, got: usize },
    #[error("enumeration bound exceeded")]
    BoundExceeded,
    #[error(transparent)]
    Order(#[from] OrderError),
}

/// A single violated predilator law, with witnesses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// sigma(t) is not a permutation of 0..arity(t)-1
    SigmaNotPermutation { term: TermId },
    /// dist(t, t) != arity(t)
    DiagonalMismatch { term: TermId },
    /// dist(s, t) != dist(t, s)
    Asymmetric { s: TermId, t: TermId },
    /// dist(s, t) > min(arity s, arity t) for s != t
    DistBound { s: TermId, t: TermId },
    /// dist(s, u) != min(dist(s, t), dist(t, u)) for s <= t <= u in term order
    Ultrametric { s: TermId, t: TermId, u: TermId },
    /// sigma(s) and sigma(t) order their first dist(s, t) values differently
    SigmaCompat { s: TermId, t: TermId, i: usize, j: usize },
}

#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// A denotation system: terms listed with arities, priority permutations
/// `sigma`, pairwise distances `dist`, and a total term order. Construction
/// checks shapes only; the semantic laws are the business of
/// [`validate_predilator`], so deliberately broken instances can be built for
/// testing.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Predilator {
    names: Vec<String>,
    arities: Vec<usize>,
    sigmas: Vec<Vec<usize>>,
    dists: Vec<Vec<usize>>,
    /// term ids in increasing term order
    order: Vec<TermId>,
    /// rank of each term id in `order`
    rank: Vec<usize>,
}

impl Predilator {
    pub fn from_parts(
        names: Vec<String>,
        arities: Vec<usize>,
        sigmas: Vec<Vec<usize>>,
        dists: Vec<Vec<usize>>,
        order: Vec<TermId>,
    ) -> Result<Self, DilatorError> {
        let n = names.len();
        let mut seen = BTreeSet::new();
        for name in &names {
            if !seen.insert(name.clone()) {
                return Err(DilatorError::DuplicateName);
            }
        }
        if arities.len() != n || sigmas.len() != n {
            return Err(DilatorError::DistShape);
        }
        for (t, s) in sigmas.iter().enumerate() {
            if s.len() != arities[t] {
                return Err(DilatorError::SigmaLength(t));
            }
        }
        if dists.len() != n || dists.iter().any(|row| row.len() != n) {
            return Err(DilatorError::DistShape);
        }
        if order.len() != n {
            return Err(DilatorError::OrderShape);
        }
        let mut rank = vec![usize::MAX; n];
        for (r, &t) in order.iter().enumerate() {
            if t >= n || rank[t] != usize::MAX {
                return Err(DilatorError::OrderShape);
            }
            rank[t] = r;
        }
        Ok(Predilator { names, arities, sigmas, dists, order, rank })
    }

    /// Terms listed in term order, with per-term data given in listing order.
    pub fn from_sorted(
        terms: Vec<(String, Vec<usize>)>,
        dists: Vec<Vec<usize>>,
    ) -> Result<Self, DilatorError> {
        let n = terms.len();
        let mut names = Vec::with_capacity(n);
        let mut arities = Vec::with_capacity(n);
        let mut sigmas = Vec::with_capacity(n);
        for (name, sigma) in terms {
            names.push(name);
            arities.push(sigma.len());
            sigmas.push(sigma);
        }
        Predilator::from_parts(names, arities, sigmas, dists, (0..n).collect())
    }

    pub fn empty() -> Self {
        Predilator::from_parts(vec![], vec![], vec![], vec![], vec![]).unwrap()
    }

    /// The two-term system denoting X + X: two unary terms at distance 0.
    pub fn x_plus_x() -> Self {
        Predilator::from_sorted(
            vec![("a".into(), vec![0]), ("b".into(), vec![0])],
            vec![vec![1, 0], vec![0, 1]],
        )
        .unwrap()
    }

    pub fn term_count(&self) -> usize {
        self.names.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = TermId> {
        0..self.term_count()
    }

    pub fn name(&self, t: TermId) -> &str {
        &self.names[t]
    }

    pub fn term_by_name(&self, name: &str) -> Option<TermId> {
        self.names.iter().position(|n| n == name)
    }

    pub fn arity(&self, t: TermId) -> usize {
        self.arities[t]
    }

    pub fn sigma(&self, t: TermId) -> &[usize] {
        &self.sigmas[t]
    }

    pub fn dist(&self, s: TermId, t: TermId) -> usize {
        self.dists[s][t]
    }

    /// Term ids in increasing term order.
    pub fn order(&self) -> &[TermId] {
        &self.order
    }

    pub fn order_rank(&self, t: TermId) -> usize {
        self.rank[t]
    }

    /// s strictly below t in the term order.
    pub fn term_less(&self, s: TermId, t: TermId) -> bool {
        self.rank[s] < self.rank[t]
    }

    pub fn max_arity(&self) -> usize {
        self.arities.iter().copied().max().unwrap_or(0)
    }

    pub fn nullary_terms(&self) -> Vec<TermId> {
        self.order.iter().copied().filter(|&t| self.arities[t] == 0).collect()
    }

    /// Restriction to the terms with id below `k`, keeping all data.
    pub fn prefix(&self, k: usize) -> Predilator {
        let names = self.names[..k].to_vec();
        let arities = self.arities[..k].to_vec();
        let sigmas = self.sigmas[..k].to_vec();
        let dists: Vec<Vec<usize>> =
            self.dists[..k].iter().map(|row| row[..k].to_vec()).collect();
        let order: Vec<TermId> = self.order.iter().copied().filter(|&t| t < k).collect();
        Predilator::from_parts(names, arities, sigmas, dists, order).unwrap()
    }

    /// Disjoint ordered sum: every term of self precedes every term of other,
    /// all cross-pair distances are 0.
    pub fn ordered_sum(&self, other: &Predilator) -> Predilator {
        let n0 = self.term_count();
        let n1 = other.term_count();
        let mut names: Vec<String> =
            self.names.iter().map(|n| format!("l:{n}")).collect();
        names.extend(other.names.iter().map(|n| format!("r:{n}")));
        let mut arities = self.arities.clone();
        arities.extend_from_slice(&other.arities);
        let mut sigmas = self.sigmas.clone();
        sigmas.extend_from_slice(&other.sigmas);
        let mut dists = vec![vec![0; n0 + n1]; n0 + n1];
        for s in 0..n0 {
            for t in 0..n0 {
                dists[s][t] = self.dists[s][t];
            }
        }
        for s in 0..n1 {
            for t in 0..n1 {
                dists[n0 + s][n0 + t] = other.dists[s][t];
            }
        }
        let mut order: Vec<TermId> = self.order.clone();
        order.extend(other.order.iter().map(|&t| n0 + t));
        Predilator::from_parts(names, arities, sigmas, dists, order).unwrap()
    }
}

/// Checks every predilator law and reports all violations with witnesses.
pub fn validate_predilator(p: &Predilator) -> ValidationReport {
    let mut violations = Vec::new();
    let n = p.term_count();
    for t in 0..n {
        let mut seen = vec![false; p.arity(t)];
        let mut ok = true;
        for &v in p.sigma(t) {
            if v >= p.arity(t) || seen[v] {
                ok = false;
                break;
            }
            seen[v] = true;
        }
        if !ok {
            violations.push(Violation::SigmaNotPermutation { term: t });
        }
        if p.dist(t, t) != p.arity(t) {
            violations.push(Violation::DiagonalMismatch { term: t });
        }
    }
    for s in 0..n {
        for t in s + 1..n {
            if p.dist(s, t) != p.dist(t, s) {
                violations.push(Violation::Asymmetric { s, t });
            }
            if p.dist(s, t) > p.arity(s).min(p.arity(t)) {
                violations.push(Violation::DistBound { s, t });
            }
        }
    }
    // ultrametric along the term order; repeated-term triples reduce to the
    // diagonal and bound clauses above
    let ord = p.order();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let (s, t, u) = (ord[i], ord[j], ord[k]);
                if p.dist(s, u) != p.dist(s, t).min(p.dist(t, u)) {
                    violations.push(Violation::Ultrametric { s, t, u });
                }
            }
        }
    }
    // shared priorities order their values the same way
    for s in 0..n {
        for t in 0..n {
            if s == t {
                continue;
            }
            let d = p.dist(s, t).min(p.arity(s)).min(p.arity(t));
            for i in 0..d {
                for j in 0..d {
                    let a = p.sigma(s).get(i).zip(p.sigma(s).get(j));
                    let b = p.sigma(t).get(i).zip(p.sigma(t).get(j));
                    if let (Some((si, sj)), Some((ti, tj))) = (a, b) {
                        if (si < sj) != (ti < tj) {
                            violations.push(Violation::SigmaCompat { s, t, i, j });
                        }
                    }
                }
            }
        }
    }
    violations.dedup();
    ValidationReport { violations }
}

/// A term applied to a strictly increasing tuple of carrier positions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AppliedElement {
    pub term: TermId,
    pub args: Vec<u32>,
}

impl AppliedElement {
    pub fn new(term: TermId, args: Vec<u32>) -> Self {
        debug_assert!(args.windows(2).all(|w| w[0] < w[1]), "args must be increasing");
        AppliedElement { term, args }
    }

    pub fn support(&self) -> &[u32] {
        &self.args
    }
}

/// Comparison of two applied terms under a carrier order: walk the shared
/// priorities, then fall back to the term order.
pub fn compare_applied(
    p: &Predilator,
    x: &AppliedElement,
    y: &AppliedElement,
    carrier: &dyn Fn(u32, u32) -> Ordering,
) -> Result<Ordering, DilatorError> {
    let (s, t) = (x.term, y.term);
    if x.args.len() != p.arity(s) {
        return Err(DilatorError::ArityMismatch {
            term: s,
            arity: p.arity(s),
            got: x.args.len(),
        });
    }
    if y.args.len() != p.arity(t) {
        return Err(DilatorError::ArityMismatch {
            term: t,
            arity: p.arity(t),
            got: y.args.len(),
        });
    }
    let shared = p.dist(s, t).min(p.arity(s)).min(p.arity(t));
    for j in 0..shared {
        let a = x.args[p.sigma(s)[j]];
        let b = y.args[p.sigma(t)[j]];
        match carrier(a, b) {
            Ordering::Equal => continue,
            v => return Ok(v),
        }
    }
    if s == t {
        // dist(t, t) = arity(t): every argument was compared
        Ok(Ordering::Equal)
    } else if p.term_less(s, t) {
        Ok(Ordering::Less)
    } else {
        Ok(Ordering::Greater)
    }
}

/// compare_applied over the natural carrier order.
pub fn compare_applied_nat(
    p: &Predilator,
    x: &AppliedElement,
    y: &AppliedElement,
) -> Result<Ordering, DilatorError> {
    compare_applied(p, x, y, &|a, b| a.cmp(&b))
}

/// The diagram relation s <_d t, evaluated on the canonical realization
/// a = ran(e0), b = ran(e1) in the join carrier.
pub fn compare_under_diagram(
    p: &Predilator,
    s: TermId,
    t: TermId,
    d: &ArityDiagram,
) -> Result<bool, DilatorError> {
    if d.n0() != p.arity(s) {
        return Err(DilatorError::ArityMismatch {
            term: s,
            arity: p.arity(s),
            got: d.n0(),
        });
    }
    if d.n1() != p.arity(t) {
        return Err(DilatorError::ArityMismatch {
            term: t,
            arity: p.arity(t),
            got: d.n1(),
        });
    }
    let x = AppliedElement::new(s, d.e0().values().to_vec());
    let y = AppliedElement::new(t, d.e1().values().to_vec());
    Ok(compare_applied_nat(p, &x, &y)? == Ordering::Less)
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

/// All applied elements over the carrier 0..n, sorted by the comparison rule.
pub fn apply_order(p: &Predilator, n: usize) -> Vec<AppliedElement> {
    apply_order_with(p, n, &|a, b| a.cmp(&b))
}

/// Application to a lazily-presented countable carrier, truncated to its
/// first `limit` positions under the supplied comparison oracle.
pub fn apply_order_with(
    p: &Predilator,
    limit: usize,
    carrier: &dyn Fn(u32, u32) -> Ordering,
) -> Vec<AppliedElement> {
    let mut elems = Vec::new();
    for t in p.terms() {
        for args in increasing_tuples(limit, p.arity(t)) {
            // argument tuples increase in the carrier order, not the numeric one
            let sorted = {
                let mut a = args.clone();
                a.sort_by(|&x, &y| carrier(x, y));
                a
            };
            elems.push(AppliedElement { term: t, args: sorted });
        }
    }
    elems.sort_by(|x, y| compare_applied(p, x, y, carrier).expect("arity-valid by construction"));
    elems
}

/// The action of D on an increasing map: t(a) goes to t(f[a]).
pub fn apply_map(elem: &AppliedElement, f: &IncreasingMap) -> AppliedElement {
    AppliedElement { term: elem.term, args: f.map_args(&elem.args) }
}

/// apply_order packaged as a finite linear order.
pub fn applied_order(p: &Predilator, n: usize) -> FiniteOrder<AppliedElement> {
    FiniteOrder::new(apply_order(p, n)).expect("applied elements are distinct")
}

/// Checks that a term map is an embedding: arities preserved and every
/// diagram relation preserved, over the full (finite) diagram space.
pub fn check_embedding(
    p: &Predilator,
    q: &Predilator,
    map: &[TermId],
    bound: usize,
) -> Result<bool, DilatorError> {
    if map.len() != p.term_count() {
        return Ok(false);
    }
    if map.iter().any(|&t| t >= q.term_count()) {
        return Ok(false);
    }
    for s in p.terms() {
        if q.arity(map[s]) != p.arity(s) {
            return Ok(false);
        }
    }
    for s in p.terms() {
        for t in p.terms() {
            for d in enum_arity_diagrams(p.arity(s), p.arity(t), bound)? {
                let lhs = compare_under_diagram(p, s, t, &d)?;
                let rhs = compare_under_diagram(q, map[s], map[t], &d)?;
                if lhs != rhs {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Backtracking search for an embedding of p into q. Candidates are pruned on
/// the abstract data and the winner is re-verified diagram by diagram.
pub fn search_embedding(
    p: &Predilator,
    q: &Predilator,
    bound: usize,
) -> Result<Option<Vec<TermId>>, DilatorError> {
    fn compatible(p: &Predilator, q: &Predilator, map: &[(TermId, TermId)], s: TermId, c: TermId) -> bool {
        if q.arity(c) != p.arity(s) || q.sigma(c) != p.sigma(s) {
            return false;
        }
        for &(s0, c0) in map {
            if c0 == c || q.dist(c0, c) != p.dist(s0, s) {
                return false;
            }
            if p.term_less(s0, s) != q.term_less(c0, c) {
                return false;
            }
        }
        true
    }
    fn go(
        p: &Predilator,
        q: &Predilator,
        todo: &[TermId],
        map: &mut Vec<(TermId, TermId)>,
    ) -> bool {
        let Some((&s, rest)) = todo.split_first() else {
            return true;
        };
        for c in q.terms() {
            if compatible(p, q, map, s, c) {
                map.push((s, c));
                if go(p, q, rest, map) {
                    return true;
                }
                map.pop();
            }
        }
        false
    }
    let todo: Vec<TermId> = p.order().to_vec();
    let mut partial = Vec::new();
    if !go(p, q, &todo, &mut partial) {
        return Ok(None);
    }
    let mut map = vec![0; p.term_count()];
    for (s, c) in partial {
        map[s] = c;
    }
    if check_embedding(p, q, &map, bound)? {
        Ok(Some(map))
    } else {
        Ok(None)
    }
}

/// Isomorphism by data transfer alone: an order-preserving bijection is
/// forced, and for valid systems preserving arity, sigma, and dist exactly is
/// the same as preserving every diagram relation. Cheap enough for large
/// arities where the diagram sweep explodes.
pub fn isomorphic_by_data(p: &Predilator, q: &Predilator) -> Option<Vec<TermId>> {
    let n = p.term_count();
    if n != q.term_count() {
        return None;
    }
    let mut map = vec![0; n];
    for r in 0..n {
        map[p.order()[r]] = q.order()[r];
    }
    for s in 0..n {
        if p.arity(s) != q.arity(map[s]) || p.sigma(s) != q.sigma(map[s]) {
            return None;
        }
        for t in 0..n {
            if p.dist(s, t) != q.dist(map[s], map[t]) {
                return None;
            }
        }
    }
    Some(map)
}

/// Searches for an isomorphism; a returned map passes check_embedding in both
/// directions.
pub fn search_isomorphism(
    p: &Predilator,
    q: &Predilator,
    bound: usize,
) -> Result<Option<Vec<TermId>>, DilatorError> {
    if p.term_count() != q.term_count() {
        return Ok(None);
    }
    let Some(map) = search_embedding(p, q, bound)? else {
        return Ok(None);
    };
    let mut inverse = vec![0; q.term_count()];
    for (s, &c) in map.iter().enumerate() {
        inverse[c] = s;
    }
    if check_embedding(q, p, &inverse, bound)? {
        Ok(Some(map))
    } else {
        Ok(None)
    }
}

/// A predilator presented in stages: `stage(k)` yields a finite truncation,
/// and stages restrict one another (earlier terms keep their data). A plain
/// finite predilator is the constant presentation.
pub struct PresentedPredilator {
    stage: Box<dyn Fn(usize) -> Predilator + Sync>,
}

impl PresentedPredilator {
    pub fn new(stage: impl Fn(usize) -> Predilator + Sync + 'static) -> Self {
        PresentedPredilator { stage: Box::new(stage) }
    }

    pub fn constant(p: Predilator) -> Self {
        PresentedPredilator::new(move |_| p.clone())
    }

    pub fn stage(&self, k: usize) -> Predilator {
        (self.stage)(k)
    }
}

/// Best-effort search for evidence that a presented predilator keeps inserting
/// new terms below old ones: a descending chain in the applied order whose
/// terms appear at strictly increasing stages. Absence of a witness proves
/// nothing; finite presentations never produce one.
pub fn bad_sequence_probe(
    p: &PresentedPredilator,
    carrier_depth: usize,
    budget: usize,
) -> Option<Vec<AppliedElement>> {
    let stages = budget + 1;
    let last = p.stage(stages);
    let mut first_stage = vec![usize::MAX; last.term_count()];
    let mut prev = 0usize;
    for k in 0..=stages {
        let cur = p.stage(k).term_count().min(last.term_count());
        for t in prev..cur {
            first_stage[t] = k;
        }
        prev = cur.max(prev);
    }
    let elems = apply_order(&last, carrier_depth);
    // longest chain descending in the applied order with strictly increasing
    // term stages; elems is ascending, so chains run from high to low index
    let m = elems.len();
    let mut best: Vec<usize> = vec![1; m];
    let mut next: Vec<Option<usize>> = vec![None; m];
    for i in 0..m {
        for j in 0..i {
            // elems[j] < elems[i]: candidate continuation below elems[i]
            if first_stage[elems[j].term] > first_stage[elems[i].term] && best[j] + 1 > best[i] {
                best[i] = best[j] + 1;
                next[i] = Some(j);
            }
        }
    }
    let (start, &len) = best.iter().enumerate().max_by_key(|&(_, &l)| l)?;
    if len <= budget {
        return None;
    }
    let mut chain = Vec::with_capacity(budget + 1);
    let mut cur = Some(start);
    while let Some(i) = cur {
        if chain.len() > budget {
            break;
        }
        chain.push(elems[i].clone());
        cur = next[i];
    }
    Some(chain)
}
