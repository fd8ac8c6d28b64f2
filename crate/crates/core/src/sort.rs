//! Aligning a trekkable dendrogram under the level-then-value order by
//! adjacent label swaps, with the inversion count dropping by exactly one per
//! swap.

use std::cmp::Ordering;

use crate::dendrogram::{dec_bullet, is_trekkable, Dendrogram, DendrogramError};
use crate::dilator::{compare_applied_nat, AppliedElement};

/// Record of one sorting run: the swapped lower index of each step and the
/// inversion count before each step and after the last.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SwapTrace {
    pub swaps: Vec<usize>,
    pub inversion_counts: Vec<usize>,
}

/// Level-then-value comparison: shorter length first, then the bullet decode's
/// comparison of the full-support applications.
pub fn lv_cmp(d: &Dendrogram, s: usize, t: usize) -> Ordering {
    match d.lh(s).cmp(&d.lh(t)) {
        Ordering::Equal => {}
        v => return v,
    }
    let (p, nodes) = dec_bullet(d);
    let term_of = |x: usize| nodes.iter().position(|&y| y == x).unwrap();
    let m = d.lh(s) as u32;
    let full: Vec<u32> = (0..m).collect();
    let a = AppliedElement::new(term_of(s), full.clone());
    let b = AppliedElement::new(term_of(t), full);
    compare_applied_nat(&p, &a, &b).expect("full-support applications are arity-correct")
}

/// Nodes listed in level-then-value order.
pub fn lv_order(d: &Dendrogram) -> Vec<usize> {
    let mut nodes: Vec<usize> = (0..d.len()).collect();
    nodes.sort_by(|&s, &t| lv_cmp(d, s, t));
    nodes
}

/// Number of label pairs out of level-then-value order.
pub fn inversions(d: &Dendrogram) -> usize {
    let rank = lv_rank(d);
    let mut count = 0;
    for s in 0..d.len() {
        for t in s + 1..d.len() {
            if rank[s] > rank[t] {
                count += 1;
            }
        }
    }
    count
}

fn lv_rank(d: &Dendrogram) -> Vec<usize> {
    let order = lv_order(d);
    let mut rank = vec![0; d.len()];
    for (r, &x) in order.iter().enumerate() {
        rank[x] = r;
    }
    rank
}

/// Repeatedly swaps adjacent label pairs out of order, sweeping left to right
/// and restarting until aligned. Every intermediate stays trekkable and each
/// swap removes exactly one inversion.
pub fn lv_sort(d: &Dendrogram) -> Result<(Dendrogram, SwapTrace), DendrogramError> {
    if !is_trekkable(d) {
        return Err(DendrogramError::NotTrekkable);
    }
    let mut cur = d.clone();
    let mut swaps = Vec::new();
    let mut inversion_counts = vec![inversions(&cur)];
    loop {
        let mut swapped = false;
        let mut m = 0;
        while m + 1 < cur.len() {
            if lv_cmp(&cur, m, m + 1) == Ordering::Greater {
                let mut perm: Vec<usize> = (0..cur.len()).collect();
                perm.swap(m, m + 1);
                cur = cur.relabel(&perm);
                debug_assert!(is_trekkable(&cur), "swap broke trekkability");
                swaps.push(m);
                inversion_counts.push(inversions(&cur));
                swapped = true;
            }
            m += 1;
        }
        if !swapped {
            break;
        }
    }
    Ok((cur, SwapTrace { swaps, inversion_counts }))
}

/// Aligned means the numeric labels agree with the level-then-value order.
pub fn is_aligned(d: &Dendrogram) -> bool {
    inversions(d) == 0
}
