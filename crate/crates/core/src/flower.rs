//! The flower calculus: recognizing semiflowers, integration (sum over proper
//! initial segments), differentiation, and the decomposition of a semiflower
//! into its nullary part plus an integral.

use thiserror::Error;

use crate::dilator::{
    check_embedding, compare_under_diagram, search_isomorphism, DilatorError, Predilator,
    TermId,
};
use crate::order::{enum_arity_diagrams, ArityDiagram, OrderError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FlowerError {
    #[error("not a semiflower")]
    NotAFlower,
    #[error(transparent)]
    Dilator(#[from] DilatorError),
    #[error(transparent)]
    Order(#[from] OrderError),
}

/// Outcome of the semiflower check; on failure the violating pair and diagram
/// are retained.
#[derive(Debug, Clone)]
pub struct FlowerWitness {
    pub verdict: bool,
    pub violation: Option<(TermId, TermId, ArityDiagram)>,
}

/// Clause sweep for the semiflower characterization: a nullary term sits below
/// every non-nullary one under every diagram, and among non-nullary terms a
/// strictly smaller maximal argument forces the relation.
pub fn is_semiflower(p: &Predilator, bound: usize) -> Result<FlowerWitness, FlowerError> {
    for s in p.terms() {
        for t in p.terms() {
            for d in enum_arity_diagrams(p.arity(s), p.arity(t), bound)? {
                let required = if p.arity(s) == 0 && p.arity(t) > 0 {
                    true
                } else if p.arity(s) > 0 && p.arity(t) > 0 {
                    let m0 = *d.e0().values().last().unwrap();
                    let m1 = *d.e1().values().last().unwrap();
                    m0 < m1
                } else {
                    false
                };
                if required && !compare_under_diagram(p, s, t, &d)? {
                    return Ok(FlowerWitness { verdict: false, violation: Some((s, t, d)) });
                }
            }
        }
    }
    Ok(FlowerWitness { verdict: true, violation: None })
}

/// The integral: each term gains a top argument that is compared first, so the
/// result denotes the sum of the applications to proper initial segments.
pub fn integrate(p: &Predilator) -> Predilator {
    let n = p.term_count();
    let names = p.terms().map(|t| format!("int:{}", p.name(t))).collect();
    let arities = p.terms().map(|t| p.arity(t) + 1).collect();
    let sigmas = p
        .terms()
        .map(|t| {
            let mut s = Vec::with_capacity(p.arity(t) + 1);
            s.push(p.arity(t));
            s.extend_from_slice(p.sigma(t));
            s
        })
        .collect();
    let mut dists = vec![vec![0; n]; n];
    for s in 0..n {
        for t in 0..n {
            dists[s][t] = p.dist(s, t) + 1;
        }
    }
    Predilator::from_parts(names, arities, sigmas, dists, p.order().to_vec()).unwrap()
}

/// The derivative of a semiflower: drop each term's top argument. Inverse of
/// [`integrate`] up to isomorphism.
pub fn differentiate(p: &Predilator, bound: usize) -> Result<Predilator, FlowerError> {
    if !is_semiflower(p, bound)?.verdict {
        return Err(FlowerError::NotAFlower);
    }
    let keep: Vec<TermId> = p.terms().filter(|&t| p.arity(t) >= 1).collect();
    let index_of = |t: TermId| keep.iter().position(|&k| k == t).unwrap();
    let mut names = Vec::with_capacity(keep.len());
    let mut arities = Vec::with_capacity(keep.len());
    let mut sigmas = Vec::with_capacity(keep.len());
    for &t in &keep {
        // the clause sweep forces the top priority onto the maximal argument
        if p.sigma(t)[0] != p.arity(t) - 1 {
            return Err(FlowerError::NotAFlower);
        }
        names.push(format!("d:{}", p.name(t)));
        arities.push(p.arity(t) - 1);
        sigmas.push(p.sigma(t)[1..].to_vec());
    }
    let mut dists = vec![vec![0; keep.len()]; keep.len()];
    for (i, &s) in keep.iter().enumerate() {
        for (j, &t) in keep.iter().enumerate() {
            let d = p.dist(s, t);
            if d == 0 {
                return Err(FlowerError::NotAFlower);
            }
            dists[i][j] = d - 1;
        }
    }
    let order: Vec<TermId> =
        p.order().iter().copied().filter(|&t| p.arity(t) >= 1).map(index_of).collect();
    Ok(Predilator::from_parts(names, arities, sigmas, dists, order).unwrap())
}

/// The nullary part of a semiflower together with an isomorphism witnessing
/// the decomposition into that initial segment plus the integral of the
/// derivative.
pub struct FlowerDecomposition {
    /// nullary terms in term order
    pub init: Vec<TermId>,
    /// target Init + ∫(∂P) the isomorphism lands in
    pub target: Predilator,
    /// term map from the source to the target, verified both ways
    pub iso: Vec<TermId>,
}

pub fn flower_decompose(
    p: &Predilator,
    bound: usize,
) -> Result<FlowerDecomposition, FlowerError> {
    if !is_semiflower(p, bound)?.verdict {
        return Err(FlowerError::NotAFlower);
    }
    let init = p.nullary_terms();
    let init_part = {
        let terms: Vec<(String, Vec<usize>)> =
            init.iter().map(|&t| (p.name(t).to_string(), vec![])).collect();
        let k = terms.len();
        Predilator::from_sorted(terms, vec![vec![0; k]; k]).unwrap()
    };
    let target = init_part.ordered_sum(&integrate(&differentiate(p, bound)?));
    let iso = search_isomorphism(p, &target, bound)?.ok_or(FlowerError::NotAFlower)?;
    debug_assert!(check_embedding(p, &target, &iso, bound)?);
    Ok(FlowerDecomposition { init, target, iso })
}

/// Direct-sum oracle: the integral applied to 0..n must be order-isomorphic to
/// the concatenation over k < n of the applications to 0..k, via the canonical
/// bijection that reads off the top argument.
pub fn integral_matches_sum_oracle(p: &Predilator, n: usize) -> bool {
    use crate::dilator::apply_order;
    let lhs = apply_order(&integrate(p), n);
    let mut rhs = Vec::new();
    for k in 0..n {
        for e in apply_order(p, k) {
            // block k: the element plus top argument k
            let mut args = e.args.clone();
            args.push(k as u32);
            rhs.push(crate::dilator::AppliedElement::new(e.term, args));
        }
    }
    lhs == rhs
}

/// Pointwise image of an embedding under ∫ or ∂ (term ids carry over).
pub fn map_terms(map: &[TermId]) -> Vec<TermId> {
    map.to_vec()
}

impl Predilator {
    /// The n-point constant order as a predilator (n nullary terms).
    pub fn constant(n: usize) -> Predilator {
        let terms: Vec<(String, Vec<usize>)> =
            (0..n).map(|i| (format!("c{i}"), vec![])).collect();
        Predilator::from_sorted(terms, vec![vec![0; n]; n]).unwrap()
    }
}
