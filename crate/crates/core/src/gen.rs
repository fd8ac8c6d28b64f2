//! Seeded instance generators: random dendrograms and denotation systems for
//! the property corpora, the two worked figure trees, and the curated
//! law-breaking mutants.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::dendrogram::{dec, Dendrogram};
use crate::dilator::{Predilator, TermId, Violation};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Random forest with parents drawn among earlier nodes, depth capped, random
/// valid e-codes. Labels respect the structure, so the result is trekkable.
pub fn gen_trekkable(rng: &mut StdRng, max_nodes: usize, max_depth: usize) -> Dendrogram {
    let n = rng.gen_range(1..=max_nodes);
    let mut parent: Vec<Option<usize>> = Vec::with_capacity(n);
    let mut depth: Vec<usize> = Vec::with_capacity(n);
    for i in 0..n {
        let candidates: Vec<usize> = (0..i).filter(|&p| depth[p] < max_depth).collect();
        if i == 0 || candidates.is_empty() || rng.gen_ratio(1, 4) {
            parent.push(None);
            depth.push(0);
        } else {
            let p = candidates[rng.gen_range(0..candidates.len())];
            parent.push(Some(p));
            depth.push(depth[p] + 1);
        }
    }
    let has_child: Vec<bool> =
        (0..n).map(|x| parent.iter().any(|&p| p == Some(x))).collect();
    let ecode: Vec<Option<usize>> = (0..n)
        .map(|x| has_child[x].then(|| rng.gen_range(0..=depth[x])))
        .collect();
    Dendrogram::new(parent, ecode).expect("generated forest is consistent")
}

/// Random dendrogram: a trekkable one relabelled by a random permutation.
pub fn gen_dendrogram(rng: &mut StdRng, max_nodes: usize, max_depth: usize) -> Dendrogram {
    let d = gen_trekkable(rng, max_nodes, max_depth);
    let mut perm: Vec<usize> = (0..d.len()).collect();
    for i in (1..perm.len()).rev() {
        let j = rng.gen_range(0..=i);
        perm.swap(i, j);
    }
    d.relabel(&perm)
}

/// Random valid denotation system: decode of a random dendrogram with the
/// given bounds, term ids shuffled.
pub fn gen_predilator(rng: &mut StdRng, max_terms: usize, max_arity: usize) -> Predilator {
    loop {
        let d = gen_trekkable(rng, 2 * max_terms, max_arity);
        if d.terminals().len() > max_terms {
            continue;
        }
        let (p, _) = dec(&d);
        return shuffle_terms(rng, &p);
    }
}

/// Relabels term ids by a random permutation, keeping all data attached.
pub fn shuffle_terms(rng: &mut StdRng, p: &Predilator) -> Predilator {
    let n = p.term_count();
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        perm.swap(i, j);
    }
    let mut names = vec![String::new(); n];
    let mut arities = vec![0; n];
    let mut sigmas = vec![Vec::new(); n];
    let mut dists = vec![vec![0; n]; n];
    for s in 0..n {
        names[perm[s]] = p.name(s).to_string();
        arities[perm[s]] = p.arity(s);
        sigmas[perm[s]] = p.sigma(s).to_vec();
        for t in 0..n {
            dists[perm[s]][perm[t]] = p.dist(s, t);
        }
    }
    let order: Vec<TermId> = p.order().iter().map(|&t| perm[t]).collect();
    Predilator::from_parts(names, arities, sigmas, dists, order).unwrap()
}

/// The seven-node tree of the bullet-closure figure.
pub fn figure_bullet_tree() -> Dendrogram {
    let parent = vec![None, Some(0), Some(1), Some(2), Some(0), Some(0), Some(5)];
    let ecode = vec![Some(0), Some(0), Some(0), None, None, Some(0), None];
    Dendrogram::new(parent, ecode).unwrap()
}

/// The nine-node tree of the sorting figure, every e-code 0.
pub fn figure_sorting_tree() -> Dendrogram {
    let parent =
        vec![None, Some(0), Some(1), Some(0), Some(1), Some(0), Some(5), Some(3), Some(5)];
    let ecode =
        vec![Some(0), Some(0), None, Some(0), None, Some(0), None, None, None];
    Dendrogram::new(parent, ecode).unwrap()
}

/// Discriminant-level comparison of expected violation classes.
pub fn same_violation_class(a: &Violation, b: &Violation) -> bool {
    std::mem::discriminant(a) == std::mem::discriminant(b)
}

/// Ten single-clause law breakers, each with its expected violation class.
pub fn mutants() -> Vec<(&'static str, Predilator, Violation)> {
    let mk = |names: &[&str], arities: &[usize], sigmas: &[&[usize]], dists: Vec<Vec<usize>>| {
        Predilator::from_parts(
            names.iter().map(|s| s.to_string()).collect(),
            arities.to_vec(),
            sigmas.iter().map(|s| s.to_vec()).collect(),
            dists,
            (0..names.len()).collect(),
        )
        .unwrap()
    };
    vec![
        (
            "sigma-duplicate-value",
            mk(&["t"], &[2], &[&[0, 0]], vec![vec![2]]),
            Violation::SigmaNotPermutation { term: 0 },
        ),
        (
            "sigma-value-out-of-range",
            mk(&["t"], &[2], &[&[0, 2]], vec![vec![2]]),
            Violation::SigmaNotPermutation { term: 0 },
        ),
        (
            "diagonal-below-arity",
            mk(&["t"], &[2], &[&[1, 0]], vec![vec![1]]),
            Violation::DiagonalMismatch { term: 0 },
        ),
        (
            "diagonal-above-arity",
            mk(&["u"], &[1], &[&[0]], vec![vec![2]]),
            Violation::DiagonalMismatch { term: 0 },
        ),
        (
            "asymmetric-dist",
            mk(
                &["s", "t"],
                &[1, 1],
                &[&[0], &[0]],
                vec![vec![1, 1], vec![0, 1]],
            ),
            Violation::Asymmetric { s: 0, t: 1 },
        ),
        (
            "dist-bound-unary",
            mk(
                &["s", "t"],
                &[1, 1],
                &[&[0], &[0]],
                vec![vec![1, 2], vec![2, 1]],
            ),
            Violation::DistBound { s: 0, t: 1 },
        ),
        (
            "dist-bound-nullary",
            mk(&["c", "d"], &[0, 0], &[&[], &[]], vec![vec![0, 1], vec![1, 0]]),
            Violation::DistBound { s: 0, t: 1 },
        ),
        (
            "ultrametric-break",
            mk(
                &["s", "t", "u"],
                &[2, 2, 2],
                &[&[0, 1], &[0, 1], &[0, 1]],
                vec![vec![2, 2, 1], vec![2, 2, 2], vec![1, 2, 2]],
            ),
            Violation::Ultrametric { s: 0, t: 1, u: 2 },
        ),
        (
            "ultrametric-break-at-front",
            mk(
                &["s", "t", "u"],
                &[2, 2, 2],
                &[&[1, 0], &[1, 0], &[1, 0]],
                vec![vec![2, 1, 2], vec![1, 2, 1], vec![2, 1, 2]],
            ),
            Violation::Ultrametric { s: 0, t: 1, u: 2 },
        ),
        (
            "sigma-compat-break",
            mk(
                &["s", "t"],
                &[2, 2],
                &[&[0, 1], &[1, 0]],
                vec![vec![2, 2], vec![2, 2]],
            ),
            Violation::SigmaCompat { s: 0, t: 1, i: 0, j: 1 },
        ),
    ]
}
