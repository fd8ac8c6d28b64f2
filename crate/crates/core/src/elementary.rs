//! Decomposition of a comparison in a bullet decode into elementary steps:
//! climbing to a parent, stepping between siblings, bumping a final argument,
//! or stepping one level into a sibling subtree. Intermediate waypoints use
//! padded argument values, so endpoints are rescaled by a fixed stride first.

use crate::dendrogram::{dec_bullet, lehmer_permutation, Dendrogram, DendrogramError};
use crate::dilator::{compare_applied_nat, AppliedElement, Predilator, TermId};
use std::cmp::Ordering;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepKind {
    /// child below its parent, arguments nested
    A,
    /// siblings with identical arguments
    B,
    /// same ancestors, last argument strictly increased
    C,
    /// one level deeper: into a right sibling's subtree, or below the same
    /// node with an earlier argument strictly increased
    D,
}

/// A node of the dendrogram applied to an argument set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeApp {
    pub node: usize,
    pub args: Vec<u32>,
}

impl NodeApp {
    pub fn new(node: usize, mut args: Vec<u32>) -> Self {
        args.sort_unstable();
        NodeApp { node, args }
    }
}

#[derive(Debug, Clone)]
pub struct Step {
    pub kind: StepKind,
    pub from: NodeApp,
    pub to: NodeApp,
}

/// The full chain: endpoints are the inputs with every argument v rescaled to
/// (v + 1) * scale, waypoints interleave freshly padded values.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub scale: u32,
    pub steps: Vec<Step>,
}

struct Ctx<'a> {
    d: &'a Dendrogram,
    p: Predilator,
    term_of: Vec<TermId>,
}

impl<'a> Ctx<'a> {
    fn new(d: &'a Dendrogram) -> Self {
        let (p, nodes) = dec_bullet(d);
        let mut term_of = vec![0; d.len()];
        for (t, &x) in nodes.iter().enumerate() {
            term_of[x] = t;
        }
        Ctx { d, p, term_of }
    }

    fn applied(&self, app: &NodeApp) -> AppliedElement {
        AppliedElement::new(self.term_of[app.node], app.args.clone())
    }

    fn less(&self, a: &NodeApp, b: &NodeApp) -> Result<bool, DendrogramError> {
        Ok(compare_applied_nat(&self.p, &self.applied(a), &self.applied(b))? == Ordering::Less)
    }

    fn sigma(&self, node: usize) -> Vec<usize> {
        let path = self.d.pred_path(node);
        let ecodes: Vec<usize> = path[..self.d.lh(node)]
            .iter()
            .map(|&a| self.d.ecode(a).expect("ancestor has an e-code"))
            .collect();
        lehmer_permutation(&ecodes)
    }

    /// Path-ordered argument tuple of an application.
    fn xi(&self, app: &NodeApp) -> Vec<u32> {
        self.sigma(app.node).iter().map(|&pos| app.args[pos]).collect()
    }
}

fn node_app(node: usize, xi: &[u32]) -> NodeApp {
    NodeApp::new(node, xi.to_vec())
}

pub fn elementary_decompose(
    d: &Dendrogram,
    from: &NodeApp,
    to: &NodeApp,
) -> Result<Decomposition, DendrogramError> {
    let ctx = Ctx::new(d);
    if !ctx.less(from, to)? {
        return Err(DendrogramError::NotLess);
    }
    let scale = (0..d.len()).map(|x| d.lh(x)).max().unwrap_or(0) as u32 + 2;
    let rescale = |args: &[u32]| -> Vec<u32> { args.iter().map(|&v| (v + 1) * scale).collect() };
    let from = NodeApp::new(from.node, rescale(&from.args));
    let to = NodeApp::new(to.node, rescale(&to.args));

    let xa = ctx.xi(&from);
    let xb = ctx.xi(&to);
    let px = d.pred_path(from.node);
    let py = d.pred_path(to.node);
    let (lhx, lhy) = (d.lh(from.node), d.lh(to.node));

    // waypoints as (node, path-ordered tuple)
    let mut points: Vec<(usize, Vec<u32>, StepKind)> = Vec::new(); // kind of the step INTO the point

    if lhy < lhx && px[..=lhy] == py[..] && xa[..lhy] == xb[..] {
        // ancestor with nested arguments: climb with parent steps
        for k in (lhy..lhx).rev() {
            points.push((px[k], xa[..k].to_vec(), StepKind::A));
        }
    } else {
        // first divergence between the interleaved sequences
        let min = lhx.min(lhy);
        let mut split = None;
        for i in 0..=min {
            if px.get(i) != py.get(i) {
                split = Some((i, true));
                break;
            }
            if i < min && xa[i] != xb[i] {
                split = Some((i, false));
                break;
            }
        }
        let (m, at_node) =
            split.expect("an extension of the smaller side cannot compare below it");
        if at_node {
            // climb to the diverging level
            for k in (m..lhx).rev() {
                points.push((px[k], xa[..k].to_vec(), StepKind::A));
            }
            if lhy == m {
                points.push((py[m], xb[..m].to_vec(), StepKind::B));
            } else {
                descend(&mut points, &py, &xb, m, lhy, StepKind::D);
            }
        } else {
            for k in (m + 1..lhx).rev() {
                points.push((px[k], xa[..k].to_vec(), StepKind::A));
            }
            descend(&mut points, &py, &xb, m, lhy, StepKind::C);
        }
    }

    // assemble and verify
    let mut steps = Vec::with_capacity(points.len());
    let mut cur = from.clone();
    for (node, xi, kind) in points {
        let next = node_app(node, &xi);
        debug_assert!(ctx.less(&cur, &next)?, "waypoint chain must ascend");
        debug_assert_eq!(classify_step(d, &ctx, &cur, &next), Some(kind));
        steps.push(Step { kind, from: cur.clone(), to: next.clone() });
        cur = next;
    }
    debug_assert_eq!(cur, to, "chain must end at the target");
    Ok(Decomposition { scale, steps })
}

/// Waypoints from the diverging level down to the target: the slot-m value
/// sneaks up through padded values one level at a time.
fn descend(
    points: &mut Vec<(usize, Vec<u32>, StepKind)>,
    py: &[usize],
    xb: &[u32],
    m: usize,
    lhy: usize,
    entry: StepKind,
) {
    for j in m + 1..=lhy {
        let off = (lhy - j) as u32;
        let mut xi = xb[..m].to_vec();
        xi.push(xb[m] - off);
        xi.extend_from_slice(&xb[m + 1..j]);
        let kind = if j == m + 1 { entry } else { StepKind::D };
        points.push((py[j], xi, kind));
    }
}

/// Structural classification of a single comparison as an elementary step,
/// independent of the decomposition machinery.
pub fn classify(d: &Dendrogram, from: &NodeApp, to: &NodeApp) -> Option<StepKind> {
    classify_step(d, &Ctx::new(d), from, to)
}

fn classify_step(
    d: &Dendrogram,
    ctx: &Ctx,
    from: &NodeApp,
    to: &NodeApp,
) -> Option<StepKind> {
    let (lhf, lht) = (d.lh(from.node), d.lh(to.node));
    let xf = ctx.xi(from);
    let xt = ctx.xi(to);
    let pf = d.pred_path(from.node);
    let pt = d.pred_path(to.node);
    if lht + 1 == lhf && pf[..=lht] == pt[..] && xf[..lht] == xt[..] {
        return Some(StepKind::A);
    }
    if lhf == lht {
        let same_ancestors = pf[..lhf] == pt[..lht];
        if same_ancestors && from.node != to.node && xf == xt {
            let less = d.sibling_cmp(from.node, to.node) == Ordering::Less;
            if less {
                return Some(StepKind::B);
            }
        }
        if same_ancestors && lhf > 0 && xf[..lhf - 1] == xt[..lht - 1] && xf[lhf - 1] < xt[lht - 1]
        {
            return Some(StepKind::C);
        }
    }
    if lht == lhf + 1 && pf[..lhf] == pt[..lhf] {
        let u = pt[lhf];
        if u != from.node
            && d.sibling_cmp(from.node, u) == Ordering::Less
            && xf[..] == xt[..lhf]
        {
            return Some(StepKind::D);
        }
        if u == from.node {
            let diffs: Vec<usize> = (0..lhf).filter(|&i| xf[i] != xt[i]).collect();
            if let [k] = diffs[..] {
                if xf[k] < xt[k] {
                    return Some(StepKind::D);
                }
            }
        }
    }
    None
}

/// Every ordered pair of the bullet application decomposes, with each step
/// verified; used by tests and the acceptance sweep.
pub fn decompose_all_pairs(d: &Dendrogram, n: usize) -> Result<usize, DendrogramError> {
    let ctx = Ctx::new(d);
    let entries = crate::dendrogram::apply_dendrogram(d, n, true);
    let mut count = 0;
    for i in 0..entries.len() {
        for j in i + 1..entries.len() {
            let from = NodeApp::new(entries[i].1, entries[i].2.clone());
            let to = NodeApp::new(entries[j].1, entries[j].2.clone());
            let dec = elementary_decompose(d, &from, &to)?;
            let mut cur = NodeApp::new(
                from.node,
                from.args.iter().map(|&v| (v + 1) * dec.scale).collect(),
            );
            for step in &dec.steps {
                if step.from != cur
                    || !ctx.less(&step.from, &step.to)?
                    || classify_step(d, &ctx, &step.from, &step.to) != Some(step.kind)
                {
                    return Err(DendrogramError::NotLess);
                }
                cur = step.to.clone();
            }
            let target = NodeApp::new(
                to.node,
                to.args.iter().map(|&v| (v + 1) * dec.scale).collect(),
            );
            if cur != target {
                return Err(DendrogramError::NotLess);
            }
            count += dec.steps.len();
        }
    }
    Ok(count)
}
