//! Extraction of abstract denotation-system data from a coded functor: terms
//! are full-support elements up to an arity bound, priority permutations and
//! distances are fitted by exhaustive search against the functor's own
//! comparisons, and the result is re-verified wholesale.

use thiserror::Error;

use crate::dilator::{compare_under_diagram, validate_predilator, Predilator, TermId};
use crate::order::{enum_arity_diagrams, IncreasingMap};

/// A functor given by its values on initial segments, its action on
/// increasing maps, and supports.
pub struct CodedFunctor<'a, E> {
    /// the order at carrier n, listed increasingly
    pub order_at: Box<dyn Fn(usize) -> Vec<E> + 'a>,
    pub map_at: Box<dyn Fn(&IncreasingMap, &E) -> E + 'a>,
    /// sorted support positions of an element at carrier n
    pub supp_at: Box<dyn Fn(usize, &E) -> Vec<u32> + 'a>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NormalizeError {
    #[error("support condition violated at carrier {carrier}")]
    SupportViolation { carrier: usize },
    #[error("no consistent predilator data fits the functor: {0}")]
    NoConsistentFit(String),
}

pub struct NormalizedFunctor<E> {
    pub predilator: Predilator,
    /// for each term: its arity and the representing full-support element
    pub reps: Vec<(usize, E)>,
}

struct Probe<'a, 'f, E> {
    f: &'a CodedFunctor<'f, E>,
    /// cached orders by carrier size
    orders: Vec<Vec<E>>,
}

impl<'a, 'f, E: Clone + Eq> Probe<'a, 'f, E> {
    fn new(f: &'a CodedFunctor<'f, E>, max_carrier: usize) -> Self {
        let orders = (0..=max_carrier).map(|n| (f.order_at)(n)).collect();
        Probe { f, orders }
    }

    fn position(&self, n: usize, e: &E) -> Option<usize> {
        self.orders[n].iter().position(|x| x == e)
    }

    /// e applied through the increasing tuple into the carrier.
    fn push(&self, e: &E, target: usize, tuple: &[u32]) -> E {
        let map = IncreasingMap::new(target, tuple.to_vec()).expect("valid embedding tuple");
        (self.f.map_at)(&map, e)
    }

    /// verdict of sigma(a) < tau(b) inside the carrier
    fn less(
        &self,
        sigma: &E,
        a: &[u32],
        tau: &E,
        b: &[u32],
        carrier: usize,
    ) -> Result<bool, NormalizeError> {
        let x = self.push(sigma, carrier, a);
        let y = self.push(tau, carrier, b);
        let px = self
            .position(carrier, &x)
            .ok_or_else(|| NormalizeError::NoConsistentFit("image escapes the order".into()))?;
        let py = self
            .position(carrier, &y)
            .ok_or_else(|| NormalizeError::NoConsistentFit("image escapes the order".into()))?;
        Ok(px < py)
    }
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

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for shorter in permutations(n - 1) {
        for pos in 0..=shorter.len() {
            let mut p = shorter.clone();
            p.insert(pos, n - 1);
            out.push(p);
        }
    }
    out
}

pub fn normalize_coded<E: Clone + Eq>(
    f: &CodedFunctor<'_, E>,
    arity_bound: usize,
) -> Result<NormalizedFunctor<E>, NormalizeError> {
    let big = 2 * arity_bound.max(1);
    let probe = Probe::new(f, big);

    // support condition on all embeddings of smaller carriers into big
    for n in 0..=arity_bound {
        for tuple in increasing_tuples(big, n) {
            let image: Vec<E> =
                probe.orders[n].iter().map(|e| probe.push(e, big, &tuple)).collect();
            for e in &probe.orders[big] {
                let supp = (f.supp_at)(big, e);
                if supp.iter().all(|v| tuple.contains(v)) && !image.contains(e) {
                    return Err(NormalizeError::SupportViolation { carrier: big });
                }
            }
        }
    }

    // terms: full-support elements at each arity
    let mut reps: Vec<(usize, E)> = Vec::new();
    for n in 0..=arity_bound {
        for e in &probe.orders[n] {
            let supp = (f.supp_at)(n, e);
            if supp.len() == n && supp.iter().enumerate().all(|(i, &v)| v == i as u32) {
                reps.push((n, e.clone()));
            }
        }
    }
    // element counts up to the doubled carrier must be explained by the terms
    for n in 0..=big {
        let expect: usize = reps.iter().map(|(k, _)| binomial(n, *k)).sum();
        if probe.orders[n].len() != expect {
            return Err(NormalizeError::NoConsistentFit(format!(
                "carrier {n} has {} elements, terms explain {expect}",
                probe.orders[n].len()
            )));
        }
    }

    // fit each term's priority permutation exhaustively
    let mut sigmas: Vec<Vec<usize>> = Vec::with_capacity(reps.len());
    for (n, e) in &reps {
        let tuples = increasing_tuples(big, *n);
        let mut fit: Option<Vec<usize>> = None;
        'perm: for perm in permutations(*n) {
            for a in &tuples {
                for b in &tuples {
                    let want = priority_less(a, b, &perm, &perm, *n, false);
                    let got = probe.less(e, a, e, b, big)?;
                    if got != want {
                        continue 'perm;
                    }
                }
            }
            if fit.replace(perm).is_some() {
                return Err(NormalizeError::NoConsistentFit(
                    "ambiguous priority permutation".into(),
                ));
            }
        }
        sigmas.push(fit.ok_or_else(|| {
            NormalizeError::NoConsistentFit("no priority permutation fits".into())
        })?);
    }

    // distances and the term order from congruent-diagram sweeps
    let k = reps.len();
    let mut dists = vec![vec![0usize; k]; k];
    let mut eps = vec![vec![false; k]; k];
    for i in 0..k {
        dists[i][i] = reps[i].0;
        for j in 0..k {
            if i == j {
                continue;
            }
            let (ni, ei) = (&reps[i].0, &reps[i].1);
            let (nj, ej) = (&reps[j].0, &reps[j].1);
            let p_hat = shared_priority_bound(&sigmas[i], &sigmas[j]);
            let diagrams = enum_arity_diagrams(*ni, *nj, arity_bound.max(*ni).max(*nj))
                .expect("within bound");
            let mut fitted = None;
            'p: for p in 0..=p_hat {
                let mut verdict: Option<bool> = None;
                for d in &diagrams {
                    let congruent = (0..p)
                        .all(|q| d.e0().apply(sigmas[i][q]) == d.e1().apply(sigmas[j][q]));
                    if !congruent {
                        continue;
                    }
                    let v = probe.less(
                        ei,
                        d.e0().values(),
                        ej,
                        d.e1().values(),
                        d.n_join(),
                    )?;
                    match verdict {
                        None => verdict = Some(v),
                        Some(w) if w != v => continue 'p,
                        _ => {}
                    }
                }
                fitted = Some((p, verdict.unwrap_or(false)));
                break;
            }
            let (p, v) = fitted.ok_or_else(|| {
                NormalizeError::NoConsistentFit("no secure distance".into())
            })?;
            dists[i][j] = p;
            eps[i][j] = v;
        }
    }
    let mut order: Vec<TermId> = (0..k).collect();
    order.sort_by(|&i, &j| {
        if i == j {
            std::cmp::Ordering::Equal
        } else if eps[i][j] {
            std::cmp::Ordering::Less
        } else {
            std::cmp::Ordering::Greater
        }
    });
    let names = (0..k).map(|i| format!("e{i}")).collect();
    let arities = reps.iter().map(|(n, _)| *n).collect();
    let p = Predilator::from_parts(names, arities, sigmas, dists, order)
        .map_err(|e| NormalizeError::NoConsistentFit(e.to_string()))?;
    if !validate_predilator(&p).is_valid() {
        return Err(NormalizeError::NoConsistentFit("fitted data fails the laws".into()));
    }

    // final verification: the fundamental comparison rule reproduces the
    // functor on every enumerable diagram
    for i in 0..k {
        for j in 0..k {
            let diagrams = enum_arity_diagrams(p.arity(i), p.arity(j), big).expect("bounded");
            for d in &diagrams {
                let via_data =
                    compare_under_diagram(&p, i, j, d).expect("arities match by construction");
                let via_functor = probe.less(
                    &reps[i].1,
                    d.e0().values(),
                    &reps[j].1,
                    d.e1().values(),
                    d.n_join(),
                )?;
                if via_data != via_functor {
                    return Err(NormalizeError::NoConsistentFit(format!(
                        "diagram verdict mismatch at terms {i}, {j}"
                    )));
                }
            }
        }
    }
    Ok(NormalizedFunctor { predilator: p, reps })
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut r = 1usize;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// Largest p with both permutations ordering their first p values alike.
fn shared_priority_bound(a: &[usize], b: &[usize]) -> usize {
    let cap = a.len().min(b.len());
    let mut p = cap;
    'outer: while p > 0 {
        for i in 0..p {
            for j in 0..p {
                if (a[i] < a[j]) != (b[i] < b[j]) {
                    p -= 1;
                    continue 'outer;
                }
            }
        }
        break;
    }
    p
}

/// The priority comparison rule evaluated directly on argument tuples.
fn priority_less(
    a: &[u32],
    b: &[u32],
    sig_s: &[usize],
    sig_t: &[usize],
    shared: usize,
    term_less: bool,
) -> bool {
    for q in 0..shared {
        let (x, y) = (a[sig_s[q]], b[sig_t[q]]);
        if x != y {
            return x < y;
        }
    }
    term_less
}
