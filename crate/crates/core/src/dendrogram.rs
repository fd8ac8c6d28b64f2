//! Tree presentations of predilators: forests with sibling order and e-codes,
//! the decode map onto denotation systems, the cell decomposition inverse to
//! it, bullet closures exposing intermediate nodes, and direct application via
//! the Kleene-Brouwer order.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use thiserror::Error;

use crate::dilator::{AppliedElement, DilatorError, Predilator, TermId};
use crate::order::kb_compare;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DendrogramError {
    #[error("parent reference out of range")]
    BadParent,
    #[error("parent relation contains a cycle")]
    Cycle,
    #[error("children lists disagree with the parent map")]
    InconsistentChildren,
    #[error("dendrogram is not trekkable")]
    NotTrekkable,
    #[error("applied elements are not in order")]
    NotLess,
    #[error(transparent)]
    Dilator(#[from] DilatorError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DendrogramViolation {
    /// e-code present on a terminal node
    EcodeOnTerminal { node: usize },
    /// e-code missing on a non-terminal node
    EcodeMissing { node: usize },
    /// e-code exceeds the node's length
    EcodeTooLarge { node: usize, ecode: usize, lh: usize },
}

#[derive(Debug, Clone, Default)]
pub struct DendrogramReport {
    pub violations: Vec<DendrogramViolation>,
}

impl DendrogramReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// A finite forest with sibling order and e-codes. Nodes are 0..n-1; the
/// sibling order is the listing order of `children` and `roots`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dendrogram {
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    roots: Vec<usize>,
    ecode: Vec<Option<usize>>,
    /// index of each node within its sibling list
    sib_rank: Vec<usize>,
    /// depth of each node
    lh: Vec<usize>,
}

impl Dendrogram {
    /// Builds from the parent map and e-codes; siblings and roots are ordered
    /// by ascending node id.
    pub fn new(
        parent: Vec<Option<usize>>,
        ecode: Vec<Option<usize>>,
    ) -> Result<Self, DendrogramError> {
        let n = parent.len();
        let mut children = vec![Vec::new(); n];
        let mut roots = Vec::new();
        for x in 0..n {
            match parent[x] {
                Some(p) if p >= n => return Err(DendrogramError::BadParent),
                Some(p) => children[p].push(x),
                None => roots.push(x),
            }
        }
        Dendrogram::with_order(parent, children, roots, ecode)
    }

    /// Builds with explicit sibling and root orders.
    pub fn with_order(
        parent: Vec<Option<usize>>,
        children: Vec<Vec<usize>>,
        roots: Vec<usize>,
        ecode: Vec<Option<usize>>,
    ) -> Result<Self, DendrogramError> {
        let n = parent.len();
        let mut seen_child = vec![false; n];
        for (p, kids) in children.iter().enumerate() {
            for &c in kids {
                if c >= n || parent[c] != Some(p) || seen_child[c] {
                    return Err(DendrogramError::InconsistentChildren);
                }
                seen_child[c] = true;
            }
        }
        for &r in &roots {
            if r >= n || parent[r].is_some() || seen_child[r] {
                return Err(DendrogramError::InconsistentChildren);
            }
            seen_child[r] = true;
        }
        if seen_child.iter().any(|&b| !b) {
            return Err(DendrogramError::InconsistentChildren);
        }
        // depths via traversal from roots; a cycle leaves nodes unvisited
        let mut lh = vec![usize::MAX; n];
        let mut stack: Vec<usize> = roots.clone();
        for &r in &roots {
            lh[r] = 0;
        }
        while let Some(x) = stack.pop() {
            for &c in &children[x] {
                lh[c] = lh[x] + 1;
                stack.push(c);
            }
        }
        if lh.iter().any(|&d| d == usize::MAX) {
            return Err(DendrogramError::Cycle);
        }
        let mut sib_rank = vec![0; n];
        for kids in children.iter().chain(std::iter::once(&roots)) {
            for (i, &c) in kids.iter().enumerate() {
                sib_rank[c] = i;
            }
        }
        Ok(Dendrogram { parent, children, roots, ecode, sib_rank, lh })
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn parent(&self, x: usize) -> Option<usize> {
        self.parent[x]
    }

    pub fn children(&self, x: usize) -> &[usize] {
        &self.children[x]
    }

    pub fn roots(&self) -> &[usize] {
        &self.roots
    }

    pub fn ecode(&self, x: usize) -> Option<usize> {
        self.ecode[x]
    }

    pub fn lh(&self, x: usize) -> usize {
        self.lh[x]
    }

    pub fn is_terminal(&self, x: usize) -> bool {
        self.children[x].is_empty()
    }

    pub fn terminals(&self) -> Vec<usize> {
        (0..self.len()).filter(|&x| self.is_terminal(x)).collect()
    }

    /// Root-to-node path, length lh(x) + 1.
    pub fn pred_path(&self, x: usize) -> Vec<usize> {
        let mut path = vec![x];
        let mut cur = x;
        while let Some(p) = self.parent[cur] {
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }

    /// Sibling comparison of two nodes with the same parent (or two roots).
    pub fn sibling_cmp(&self, x: usize, y: usize) -> Ordering {
        debug_assert_eq!(self.parent[x], self.parent[y], "not siblings");
        self.sib_rank[x].cmp(&self.sib_rank[y])
    }

    /// Relabels nodes by the given permutation: node x becomes perm[x].
    pub fn relabel(&self, perm: &[usize]) -> Dendrogram {
        let n = self.len();
        let mut parent = vec![None; n];
        let mut children = vec![Vec::new(); n];
        let mut ecode = vec![None; n];
        for x in 0..n {
            parent[perm[x]] = self.parent[x].map(|p| perm[p]);
            children[perm[x]] = self.children[x].iter().map(|&c| perm[c]).collect();
            ecode[perm[x]] = self.ecode[x];
        }
        let roots = self.roots.iter().map(|&r| perm[r]).collect();
        Dendrogram::with_order(parent, children, roots, ecode).expect("relabel preserves shape")
    }

    /// Ordered-forest canonical shape; two dendrograms are isomorphic exactly
    /// when their shapes agree.
    pub fn shape(&self) -> Vec<Shape> {
        self.roots.iter().map(|&r| self.shape_of(r)).collect()
    }

    fn shape_of(&self, x: usize) -> Shape {
        Shape {
            ecode: self.ecode[x],
            children: self.children[x].iter().map(|&c| self.shape_of(c)).collect(),
        }
    }

    /// The isomorphism onto another dendrogram when the shapes agree: roots
    /// and children match up in sibling order.
    pub fn isomorphism_to(&self, other: &Dendrogram) -> Option<Vec<usize>> {
        if self.shape() != other.shape() {
            return None;
        }
        let mut map = vec![0usize; self.len()];
        let mut stack: Vec<(usize, usize)> =
            self.roots.iter().copied().zip(other.roots.iter().copied()).collect();
        while let Some((a, b)) = stack.pop() {
            map[a] = b;
            stack.extend(
                self.children[a].iter().copied().zip(other.children[b].iter().copied()),
            );
        }
        Some(map)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shape {
    pub ecode: Option<usize>,
    pub children: Vec<Shape>,
}

/// Checks the e-code invariants and reports every violation.
pub fn validate_dendrogram(d: &Dendrogram) -> DendrogramReport {
    let mut violations = Vec::new();
    for x in 0..d.len() {
        match (d.is_terminal(x), d.ecode(x)) {
            (true, Some(_)) => violations.push(DendrogramViolation::EcodeOnTerminal { node: x }),
            (false, None) => violations.push(DendrogramViolation::EcodeMissing { node: x }),
            (false, Some(e)) if e > d.lh(x) => {
                violations.push(DendrogramViolation::EcodeTooLarge { node: x, ecode: e, lh: d.lh(x) })
            }
            _ => {}
        }
    }
    DendrogramReport { violations }
}

/// Numeric labels must respect both the parent relation and the sibling order.
pub fn is_trekkable(d: &Dendrogram) -> bool {
    for x in 0..d.len() {
        if let Some(p) = d.parent(x) {
            if p >= x {
                return false;
            }
        }
    }
    for kids in d.children.iter().chain(std::iter::once(&d.roots)) {
        for w in kids.windows(2) {
            if w[0] >= w[1] {
                return false;
            }
        }
    }
    true
}

/// Decodes the priority permutation from the e-codes along a path: position i
/// is inserted at rank e_i among the values chosen so far.
pub fn lehmer_permutation(ecodes: &[usize]) -> Vec<usize> {
    let mut slots: Vec<usize> = Vec::with_capacity(ecodes.len());
    for (i, &e) in ecodes.iter().enumerate() {
        slots.insert(e, i);
    }
    let mut sigma = vec![0; ecodes.len()];
    for (rank, &i) in slots.iter().enumerate() {
        sigma[i] = rank;
    }
    sigma
}

/// Decode of a dendrogram into a denotation system. With `all_nodes` the field
/// is every node (the bullet decode); otherwise only terminals.
///
/// Returns the system together with the node backing each term.
pub fn decode(d: &Dendrogram, all_nodes: bool) -> (Predilator, Vec<usize>) {
    let nodes: Vec<usize> = if all_nodes { (0..d.len()).collect() } else { d.terminals() };
    let paths: Vec<Vec<usize>> = nodes.iter().map(|&x| d.pred_path(x)).collect();
    let names: Vec<String> = nodes.iter().map(|&x| format!("n{x}")).collect();
    let arities: Vec<usize> = nodes.iter().map(|&x| d.lh(x)).collect();
    let sigmas: Vec<Vec<usize>> = nodes
        .iter()
        .zip(&paths)
        .map(|(&x, path)| {
            let ecodes: Vec<usize> =
                path[..d.lh(x)].iter().map(|&a| d.ecode(a).expect("ancestors are non-terminal")).collect();
            lehmer_permutation(&ecodes)
        })
        .collect();
    let k = nodes.len();
    let mut dists = vec![vec![0; k]; k];
    for i in 0..k {
        for j in 0..k {
            dists[i][j] = path_distance(&paths[i], &paths[j]);
        }
    }
    let mut order: Vec<TermId> = (0..k).collect();
    order.sort_by(|&i, &j| path_kb(d, &paths[i], &paths[j]));
    let p = Predilator::from_parts(names, arities, sigmas, dists, order).unwrap();
    (p, nodes)
}

/// First divergence of two root paths, capped at the shorter length.
fn path_distance(a: &[usize], b: &[usize]) -> usize {
    if a == b {
        return a.len() - 1; // dist(x, x) = arity = lh
    }
    let cap = (a.len() - 1).min(b.len() - 1);
    for i in 0..=cap {
        if a.get(i) != b.get(i) {
            return i;
        }
    }
    cap
}

/// KB comparison of two root paths: a proper extension is smaller, the first
/// divergence is decided by sibling order.
fn path_kb(d: &Dendrogram, a: &[usize], b: &[usize]) -> Ordering {
    kb_compare(a, b, |_, &x, &y| {
        Ok::<_, ()>(if x == y { Ordering::Equal } else { d.sibling_cmp(x, y) })
    })
    .unwrap()
}

/// Decode over terminals: the predilator a predendrogram presents.
pub fn dec(d: &Dendrogram) -> (Predilator, Vec<usize>) {
    decode(d, false)
}

/// Decode over all nodes, exposing intermediate terms directly.
pub fn dec_bullet(d: &Dendrogram) -> (Predilator, Vec<usize>) {
    decode(d, true)
}

/// Node maps out of the bullet closure construction.
pub struct BulletMap {
    /// surviving plain copy of each non-terminal node
    pub plain: Vec<Option<usize>>,
    /// bulleted terminal copy of every node
    pub star: Vec<usize>,
}

/// The bullet closure: every node gains a terminal copy placed immediately
/// right of it among its siblings; original terminals survive only as their
/// copies.
pub fn bullet(d: &Dendrogram) -> (Dendrogram, BulletMap) {
    let n = d.len();
    let mut plain = vec![None; n];
    let mut star = vec![0usize; n];
    let mut next = 0usize;
    for x in 0..n {
        if !d.is_terminal(x) {
            plain[x] = Some(next);
            next += 1;
        }
        star[x] = next;
        next += 1;
    }
    let total = next;
    let mut parent = vec![None; total];
    let mut children = vec![Vec::new(); total];
    let mut ecode = vec![None; total];
    let interleave = |list: &[usize]| -> Vec<usize> {
        let mut out = Vec::new();
        for &y in list {
            if let Some(py) = plain[y] {
                out.push(py);
            }
            out.push(star[y]);
        }
        out
    };
    let roots = interleave(d.roots());
    for x in 0..n {
        if let Some(px) = plain[x] {
            ecode[px] = d.ecode(x);
            children[px] = interleave(d.children(x));
            for &c in &children[px] {
                parent[c] = Some(px);
            }
        }
    }
    for &r in &roots {
        parent[r] = None;
    }
    let out = Dendrogram::with_order(parent, children, roots, ecode)
        .expect("bullet construction is consistent");
    (out, BulletMap { plain, star })
}

/// One entry of a dendrogram application: an interleaved sequence
/// node, value, node, value, ..., node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Atom {
    Node(usize),
    Val(u32),
}

/// Direct application of a dendrogram to the carrier 0..n: every valid
/// interleaved sequence under KB, with node slots compared by sibling order.
/// With `include_intermediate` non-terminal endpoints participate too.
///
/// Returns the sorted sequences with their endpoint node and argument set.
pub fn apply_dendrogram(
    d: &Dendrogram,
    n: usize,
    include_intermediate: bool,
) -> Vec<(Vec<Atom>, usize, Vec<u32>)> {
    let nodes: Vec<usize> =
        if include_intermediate { (0..d.len()).collect() } else { d.terminals() };
    let mut entries = Vec::new();
    for &x in &nodes {
        let path = d.pred_path(x);
        let m = d.lh(x);
        let ecodes: Vec<usize> =
            path[..m].iter().map(|&a| d.ecode(a).expect("ancestor has an e-code")).collect();
        let sigma = lehmer_permutation(&ecodes);
        for args in increasing_tuples(n, m) {
            let mut seq = Vec::with_capacity(2 * m + 1);
            for i in 0..m {
                seq.push(Atom::Node(path[i]));
                seq.push(Atom::Val(args[sigma[i]]));
            }
            seq.push(Atom::Node(x));
            entries.push((seq, x, args));
        }
    }
    entries.sort_by(|a, b| atom_kb(d, &a.0, &b.0));
    entries
}

fn atom_kb(d: &Dendrogram, a: &[Atom], b: &[Atom]) -> Ordering {
    kb_compare(a, b, |_, x, y| {
        Ok::<_, ()>(match (x, y) {
            (Atom::Node(p), Atom::Node(q)) if p == q => Ordering::Equal,
            (Atom::Node(p), Atom::Node(q)) => d.sibling_cmp(*p, *q),
            (Atom::Val(v), Atom::Val(w)) => v.cmp(w),
            _ => unreachable!("interleaving keeps slot kinds aligned"),
        })
    })
    .unwrap()
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

/// Cross-check: the direct application agrees elementwise with applying the
/// decoded system.
pub fn apply_matches_decode(d: &Dendrogram, n: usize, include_intermediate: bool) -> bool {
    let (p, nodes) = decode(d, include_intermediate);
    let term_of: BTreeMap<usize, TermId> =
        nodes.iter().enumerate().map(|(t, &x)| (x, t)).collect();
    let direct = apply_dendrogram(d, n, include_intermediate);
    let via: Vec<AppliedElement> = crate::dilator::apply_order(&p, n);
    if direct.len() != via.len() {
        return false;
    }
    direct
        .iter()
        .zip(&via)
        .all(|((_, x, args), e)| term_of[x] == e.term && args == &e.args)
}

/// The dendrogram-level preflower test: either everything is a root, or a
/// distinguished non-terminal root sits above all other (terminal) roots and
/// every deeper node keeps its e-code strictly below its length.
pub fn dendrogram_is_flower(d: &Dendrogram) -> bool {
    if (0..d.len()).all(|x| d.lh(x) == 0) {
        return true;
    }
    let non_terminal_roots: Vec<usize> =
        d.roots().iter().copied().filter(|&r| !d.is_terminal(r)).collect();
    let [star] = non_terminal_roots[..] else {
        return false;
    };
    if d.roots().last() != Some(&star) {
        return false;
    }
    (0..d.len()).all(|x| match d.ecode(x) {
        Some(e) if d.lh(x) > 0 => e < d.lh(x),
        _ => true,
    })
}

/// The cell decomposition: nodes are the distance classes of the terms at each
/// level, giving the dendrogram whose decode is isomorphic to the input.
///
/// Also returns the term backing each terminal node.
pub fn cell(p: &Predilator) -> (Dendrogram, BTreeMap<usize, TermId>) {
    // class of t at level m: every s with dist(s, t) > m, plus t itself
    let class = |t: TermId, m: usize| -> Vec<TermId> {
        let mut members: Vec<TermId> =
            p.terms().filter(|&s| s == t || p.dist(s, t) > m).collect();
        members.sort_by_key(|&s| p.order_rank(s));
        members
    };
    let mut node_ids: BTreeMap<(usize, Vec<TermId>), usize> = BTreeMap::new();
    let mut keys: Vec<(usize, Vec<TermId>)> = Vec::new();
    for t in p.terms() {
        for m in 0..=p.arity(t) {
            let key = (m, class(t, m));
            if !node_ids.contains_key(&key) {
                node_ids.insert(key.clone(), keys.len());
                keys.push(key);
            }
        }
    }
    let n = keys.len();
    let mut parent = vec![None; n];
    let mut ecode = vec![None; n];
    let mut terminal_term = BTreeMap::new();
    for (x, (m, members)) in keys.iter().enumerate() {
        let rep = members[0];
        if *m > 0 {
            parent[x] = Some(node_ids[&(m - 1, class(rep, m - 1))]);
        }
        if *m < p.arity(rep) {
            // the level-m priority value's rank among the first m + 1
            let sig = p.sigma(rep);
            let rank = sig[..=*m].iter().filter(|&&v| v < sig[*m]).count();
            ecode[x] = Some(rank);
        } else {
            terminal_term.insert(x, rep);
        }
    }
    // sibling and root order from the term order of representatives
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut roots = Vec::new();
    let mut by_rank: Vec<usize> = (0..n).collect();
    by_rank.sort_by_key(|&x| p.order_rank(keys[x].1[0]));
    for &x in &by_rank {
        match parent[x] {
            Some(q) => children[q].push(x),
            None => roots.push(x),
        }
    }
    let d = Dendrogram::with_order(parent, children, roots, ecode)
        .expect("cell construction is consistent");
    (d, terminal_term)
}
