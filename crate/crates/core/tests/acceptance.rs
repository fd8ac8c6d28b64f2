//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//! Corpus sweeps run through the data-parallel executor.

use std::time::Instant;

use dilators::dendrogram::{
    apply_matches_decode, bullet, cell, dec, dec_bullet, is_trekkable, validate_dendrogram,
    Dendrogram,
};
use dilators::dilator::{
    apply_order, check_embedding, compare_applied_nat, compare_under_diagram,
    isomorphic_by_data, search_isomorphism, validate_predilator, AppliedElement, Predilator,
};
use dilators::elementary::{classify, decompose_all_pairs, elementary_decompose, NodeApp};
use dilators::exec::par_map;
use dilators::flower::{
    differentiate, flower_decompose, integral_matches_sum_oracle, integrate, is_semiflower,
};
use dilators::game::{
    lifted_plays_are_clean, project_strategy, solve_truncated, verify_strategy, Family,
    GameConfig, GameMode, GameMove, PlayState, Selector, Status, Strategy, Target,
    referee_step,
};
use dilators::gen::{
    figure_bullet_tree, figure_sorting_tree, gen_dendrogram, gen_predilator, mutants, rng,
    same_violation_class,
};
use dilators::order::{enum_arity_diagrams, ArityDiagram, DEFAULT_DIAGRAM_BOUND as BOUND};
use dilators::pi::{
    dilator_family_step, family_check, in_tree_matches_kb, order_family_step, pair_order,
    shoenfield_functor, shoenfield_truncation, DecidableTree,
};
use dilators::sort::{inversions, is_aligned, lv_sort};
use rand::Rng;

fn predilator_corpus(count: usize) -> Vec<Predilator> {
    let mut r = rng(0xD11A70);
    (0..count).map(|_| gen_predilator(&mut r, 4, 3)).collect()
}

fn dendrogram_corpus(count: usize) -> Vec<Dendrogram> {
    let mut r = rng(0xDE2D60);
    (0..count).map(|_| gen_dendrogram(&mut r, 8, 5)).collect()
}

fn report(criterion: &str, ok: bool, detail: &str) {
    println!("criterion {criterion}: {} — {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {criterion} failed: {detail}");
}

#[test]
fn criterion_1_dec_cell_equivalence() {
    let start = Instant::now();
    let preds = predilator_corpus(500);
    let pred_ok = par_map(&preds, |p| {
        let (c, _) = cell(p);
        let (back, _) = dec(&c);
        search_isomorphism(&back, p, BOUND).unwrap().is_some()
    });
    let dends = dendrogram_corpus(500);
    let dend_ok = par_map(&dends, |d| {
        let (p, _) = dec(d);
        let (back, _) = cell(&p);
        back.isomorphism_to(d).is_some()
    });
    let failures =
        pred_ok.iter().chain(dend_ok.iter()).filter(|&&ok| !ok).count();
    let secs = start.elapsed().as_secs_f64();
    report(
        "1",
        failures == 0 && secs < 60.0,
        &format!("dec/cell round trips on 500+500 instances, {failures} failures, {secs:.1}s"),
    );
}

#[test]
fn criterion_2_bullet_coherence() {
    let dends = dendrogram_corpus(500);
    let results = par_map(&dends, |d| {
        let (direct, _) = dec_bullet(d);
        let (via, _) = dec(&bullet(d).0);
        if !validate_predilator(&direct).is_valid() || !validate_predilator(&via).is_valid() {
            return false;
        }
        if isomorphic_by_data(&direct, &via).is_none() {
            return false;
        }
        (0..=4).all(|n| apply_matches_decode(d, n, false) && apply_matches_decode(d, n, true))
    });
    let failures = results.iter().filter(|&&ok| !ok).count();
    report(
        "2",
        failures == 0,
        &format!("bullet decode and application oracle on 500 dendrograms, {failures} failures"),
    );
}

#[test]
fn criterion_3_flower_calculus() {
    let preds = predilator_corpus(500);
    // derivative of the integral recovers the system
    let roundtrip_ok = par_map(&preds, |p| {
        let ip = integrate(p);
        if !is_semiflower(&ip, BOUND + 1).unwrap().verdict {
            return false;
        }
        let back = differentiate(&ip, BOUND + 1).unwrap();
        isomorphic_by_data(&back, p).is_some()
    });
    // spot-check the data route against the diagram route
    for p in preds.iter().step_by(100) {
        let back = differentiate(&integrate(p), BOUND + 1).unwrap();
        assert!(search_isomorphism(&back, p, BOUND + 1).unwrap().is_some());
    }
    // generated semiflowers decompose into their nullary part plus an integral
    let mut r = rng(0xF107E5);
    let mut flowers: Vec<Predilator> = (0..100)
        .map(|_| {
            let mut f = Predilator::constant(r.gen_range(0..3));
            for _ in 0..r.gen_range(1..=2) {
                f = Predilator::constant(r.gen_range(0..3)).ordered_sum(&integrate(&f));
            }
            f
        })
        .collect();
    flowers.extend(preds.iter().filter(|p| is_semiflower(p, BOUND).unwrap().verdict).cloned());
    let decompose_ok = par_map(&flowers, |f| {
        let dec = flower_decompose(f, BOUND + 1).unwrap();
        check_embedding(f, &dec.target, &dec.iso, BOUND + 1).unwrap()
    });
    // integral against the direct-sum oracle
    let sum_ok = par_map(&preds, |p| (0..=5).all(|n| integral_matches_sum_oracle(p, n)));
    let failures = roundtrip_ok
        .iter()
        .chain(decompose_ok.iter())
        .chain(sum_ok.iter())
        .filter(|&&ok| !ok)
        .count();
    report(
        "3",
        failures == 0,
        &format!(
            "derivative/integral round trips, {} flower decompositions, sum oracle to |X|=5, {failures} failures",
            flowers.len()
        ),
    );
}

#[test]
fn criterion_4_fundamental_comparison_oracle() {
    let preds = predilator_corpus(500);
    let results = par_map(&preds, |p| {
        let carrier = 6usize;
        for s in p.terms() {
            for t in p.terms() {
                for a in tuples(carrier, p.arity(s)) {
                    for b in tuples(carrier, p.arity(t)) {
                        let x = AppliedElement::new(s, a.clone());
                        let y = AppliedElement::new(t, b.clone());
                        let lt = compare_applied_nat(p, &x, &y).unwrap()
                            == std::cmp::Ordering::Less;
                        let d = ArityDiagram::from_subsets(
                            &a.iter().copied().collect(),
                            &b.iter().copied().collect(),
                        );
                        if lt != compare_under_diagram(p, s, t, &d).unwrap() {
                            return false;
                        }
                    }
                }
            }
        }
        true
    });
    let failures = results.iter().filter(|&&ok| !ok).count();
    report(
        "4",
        failures == 0,
        &format!("applied comparisons factor through diagrams on 500 systems, {failures} disagreements"),
    );
}

fn tuples(n: usize, k: usize) -> Vec<Vec<u32>> {
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
    let mut out = Vec::new();
    if k <= n {
        go(0, k, n, &mut Vec::new(), &mut out);
    }
    out
}

#[test]
fn criterion_5_elementary_decomposition() {
    let mut r = rng(0xE7E);
    let small: Vec<Dendrogram> = (0..100).map(|_| gen_dendrogram(&mut r, 6, 3)).collect();
    let chain_ok = par_map(&small, |d| {
        (0..=4).all(|n| decompose_all_pairs(d, n).is_ok())
    });
    // a map preserving the elementary relations preserves every relation
    let mut preserve_ok = true;
    let tiny: Vec<Dendrogram> = (0..6).map(|_| gen_dendrogram(&mut r, 4, 2)).collect();
    for d in &tiny {
        for d2 in &tiny {
            if !elementary_preservation_implies_full(d, d2, 6) {
                preserve_ok = false;
            }
        }
    }
    let failures = chain_ok.iter().filter(|&&ok| !ok).count();
    report(
        "5",
        failures == 0 && preserve_ok,
        &format!(
            "all pairs to n=4 decompose on 100 trees ({failures} failures); elementary preservation implies full: {preserve_ok}"
        ),
    );
}

/// Every arity-preserving node map that preserves the elementary-shaped
/// comparisons over the window also preserves every comparison there.
fn elementary_preservation_implies_full(d: &Dendrogram, d2: &Dendrogram, window: usize) -> bool {
    let (p, nodes) = dec_bullet(d);
    let (q, nodes2) = dec_bullet(d2);
    let entries = dilators::dendrogram::apply_dendrogram(d, window, true);
    let apps: Vec<(usize, Vec<u32>)> =
        entries.iter().map(|(_, x, args)| (*x, args.clone())).collect();
    let term_of = |x: usize| nodes.iter().position(|&y| y == x).unwrap();
    let term_of2 = |x: usize| nodes2.iter().position(|&y| y == x).unwrap();
    // enumerate arity-preserving node maps d -> d2
    let mut maps: Vec<Vec<usize>> = vec![vec![]];
    for x in 0..d.len() {
        let mut next = Vec::new();
        for m in &maps {
            for y in 0..d2.len() {
                if d2.lh(y) == d.lh(x) {
                    let mut m2 = m.clone();
                    m2.push(y);
                    next.push(m2);
                }
            }
        }
        maps = next;
        if maps.len() > 4096 {
            maps.truncate(4096);
        }
    }
    for map in &maps {
        let mut preserves_elementary = true;
        let mut preserves_all = true;
        for (i, (x, a)) in apps.iter().enumerate() {
            for (j, (y, b)) in apps.iter().enumerate() {
                if i == j {
                    continue;
                }
                let xa = AppliedElement::new(term_of(*x), a.clone());
                let yb = AppliedElement::new(term_of(*y), b.clone());
                if compare_applied_nat(&p, &xa, &yb).unwrap() != std::cmp::Ordering::Less {
                    continue;
                }
                let fx = AppliedElement::new(term_of2(map[*x]), a.clone());
                let fy = AppliedElement::new(term_of2(map[*y]), b.clone());
                let image_less =
                    compare_applied_nat(&q, &fx, &fy).unwrap() == std::cmp::Ordering::Less;
                let from = NodeApp::new(*x, a.clone());
                let to = NodeApp::new(*y, b.clone());
                if classify(d, &from, &to).is_some() && !image_less {
                    preserves_elementary = false;
                }
                if !image_less {
                    preserves_all = false;
                }
            }
        }
        if preserves_elementary && !preserves_all {
            return false;
        }
    }
    true
}

#[test]
fn criterion_6_figure_reproductions() {
    let d = figure_sorting_tree();
    assert!(is_trekkable(&d));
    assert_eq!(inversions(&d), 4);
    let (sorted, trace) = lv_sort(&d).unwrap();
    let swaps_ok = trace.swaps == vec![2, 4, 6, 3];
    let counts_ok = trace.inversion_counts == vec![4, 3, 2, 1, 0];
    // replay the swaps and re-check trekkability of every intermediate
    let mut cur = d.clone();
    let mut trek_ok = true;
    for &m in &trace.swaps {
        let mut perm: Vec<usize> = (0..cur.len()).collect();
        perm.swap(m, m + 1);
        cur = cur.relabel(&perm);
        trek_ok &= is_trekkable(&cur);
    }
    let aligned_ok = is_aligned(&sorted) && cur.isomorphism_to(&sorted).is_some();

    let b = figure_bullet_tree();
    let (db, map) = bullet(&b);
    let stars = (0..b.len()).filter(|&x| !b.is_terminal(x)).count();
    let bullet_ok = db.len() == 11
        && stars == 4
        && b.len() - stars == 3
        && validate_dendrogram(&db).is_valid()
        && map.star.iter().all(|&s| db.is_terminal(s));
    report(
        "6",
        swaps_ok && counts_ok && trek_ok && aligned_ok && bullet_ok,
        &format!(
            "sorting figure swaps {:?} with counts {:?}; bullet figure 7 -> {} nodes ({} starred, {} bulleted)",
            trace.swaps,
            trace.inversion_counts,
            db.len(),
            stars,
            b.len() - stars
        ),
    );
}

fn toy_trees() -> Vec<(String, DecidableTree)> {
    let mut out: Vec<(String, DecidableTree)> = vec![
        ("full".into(), DecidableTree::full()),
        ("empty".into(), DecidableTree::empty()),
        ("bounded:1".into(), DecidableTree::bounded(1)),
        ("bounded:2".into(), DecidableTree::bounded(2)),
        ("bounded:3".into(), DecidableTree::bounded(3)),
        ("descending-run".into(), DecidableTree::descending_run()),
    ];
    for k in 0..14 {
        out.push((format!("seeded:{k}"), DecidableTree::seeded(k)));
    }
    out
}

#[test]
fn criterion_7_pi12_family_cross_validation() {
    let start = Instant::now();
    let trees = toy_trees();
    let plays: Vec<Vec<u64>> = vec![vec![0, 1, 0, 1], vec![2, 0, 2, 0], vec![1, 1, 1, 1]];
    let results = par_map(&trees, |(name, tree)| {
        for play in &plays {
            for k in 0..=play.len() {
                let s = &play[..k];
                let direct = dilator_family_step(tree, s);
                if !validate_predilator(&direct).is_valid() {
                    return Some(format!("{name}: invalid step"));
                }
                let functor = shoenfield_functor(tree, s);
                let bound = direct.max_arity().max(1);
                let fitted = match dilators::coded::normalize_coded(&functor, bound) {
                    Ok(f) => f,
                    Err(e) => return Some(format!("{name}: normalize failed: {e}")),
                };
                if search_isomorphism(&fitted.predilator, &direct, BOUND).unwrap().is_none() {
                    return Some(format!("{name}: fit differs from the family step"));
                }
                // monotone union of the truncated trees
                if k > 0 {
                    for n in 0..=3 {
                        let small = shoenfield_truncation(tree, &play[..k - 1], n);
                        let big = shoenfield_truncation(tree, s, n);
                        if !small.iter().all(|e| big.contains(e)) {
                            return Some(format!("{name}: union not monotone"));
                        }
                    }
                }
            }
        }
        None
    });
    let failures: Vec<&String> = results.iter().flatten().collect();
    let secs = start.elapsed().as_secs_f64();
    report(
        "7",
        failures.is_empty() && secs < 120.0,
        &format!(
            "normalize(shoenfield) matches the family step on {} trees, {secs:.1}s ({failures:?})",
            trees.len()
        ),
    );
}

#[test]
fn criterion_8_pi11_family_clauses() {
    let trees = toy_trees();
    let plays: Vec<Vec<u64>> = vec![vec![0, 1, 2, 3, 0, 1], vec![1, 1, 0, 0, 2, 2]];
    let results = par_map(&trees, |(name, tree)| {
        let rep = family_check(tree, &plays, 6);
        if !rep.is_valid() {
            return Some(format!("{name}: {:?}", rep.violations));
        }
        for play in &plays {
            for k in 0..=play.len() {
                if !in_tree_matches_kb(tree, &play[..k]) {
                    return Some(format!("{name}: in-tree block mismatch"));
                }
                // truncated well-foundedness: descending chains in the in-tree
                // block correspond to KB-descending chains of codes
                let s = &play[..k];
                let block = dilators::pi::in_tree_block(tree, s);
                let ord = order_family_step(tree, s);
                for w in block.windows(2) {
                    if !ord.less(w[0], w[1]) {
                        return Some(format!("{name}: block not ascending"));
                    }
                }
            }
        }
        None
    });
    let failures: Vec<&String> = results.iter().flatten().collect();
    report(
        "8",
        failures.is_empty(),
        &format!("order-family clauses hold on {} trees ({failures:?})", trees.len()),
    );
}

#[test]
fn criterion_9_game_referee_and_projection() {
    // the three-fold integrated flower and its prefix family; the identity
    // assignment is the explicitly supplied embedding
    let omega = integrate(&integrate(&integrate(&Predilator::constant(6))));
    let identity: Vec<Target> = omega.terms().map(Target::Term).collect();
    for k in 0..=6 {
        assert!(check_embedding(
            &omega.prefix(k),
            &omega,
            &identity[..k].iter().map(|t| match t {
                Target::Term(i) => *i,
                Target::Ordinal(_) => unreachable!(),
            }).collect::<Vec<_>>(),
            BOUND
        )
        .unwrap());
    }
    let cfg = GameConfig {
        mode: GameMode::Dilator { omega },
        family: Family::PrefixOfTarget,
        alphabet: 2,
        depth: 6,
    };
    cfg.validate().unwrap();
    let sigma_sub = Strategy::constant_two(0);
    let projected =
        project_strategy(&cfg, &sigma_sub, &Selector::AtEmbedding(identity.clone())).unwrap();
    let lift_ok = lifted_plays_are_clean(&cfg, &projected, &identity).unwrap();

    // solver on one hundred seeded configurations, each winner verified
    let mut r = rng(0x6A3E);
    let mut solved = 0;
    let mut verified = 0;
    for _ in 0..100 {
        let depth = 2 * r.gen_range(1..=2);
        let alphabet = r.gen_range(1..=2);
        let tree = match r.gen_range(0..4) {
            0 => DecidableTree::full(),
            1 => DecidableTree::bounded(r.gen_range(1..=3)),
            2 => DecidableTree::seeded(r.gen()),
            _ => DecidableTree::descending_run(),
        };
        let mode = if r.gen_bool(0.5) {
            GameMode::Ordinal { kappa: r.gen_range(0..=4) }
        } else {
            GameMode::Dilator { omega: gen_predilator(&mut r, 3, 2) }
        };
        let cfg = GameConfig { mode, family: Family::Tree(tree), alphabet, depth };
        let (winner, strategy) = solve_truncated(&cfg).unwrap();
        solved += 1;
        if verify_strategy(&cfg, winner, &strategy) {
            verified += 1;
        }
    }

    // referee soundness: rank-derived targets along random ordinal plays are
    // never flagged
    let mut contradictions = 0;
    for seed in 0..20u64 {
        let tree = DecidableTree::seeded(seed);
        let cfg = GameConfig {
            mode: GameMode::Ordinal { kappa: 8 },
            family: Family::Tree(tree),
            alphabet: 2,
            depth: 6,
        };
        let mut rr = rng(seed);
        let play: Vec<u64> = (0..6).map(|_| rr.gen_range(0..2)).collect();
        let final_ord = match &cfg.family {
            Family::Tree(t) => order_family_step(t, &play),
            Family::PrefixOfTarget => unreachable!(),
        };
        let mut st = PlayState::initial();
        for (k, &x) in play.iter().enumerate() {
            let mv = if k % 2 == 0 {
                GameMove::One { x, target: Target::Ordinal(final_ord.rank(k / 2)) }
            } else {
                GameMove::Two { x }
            };
            st = referee_step(&cfg, &st, mv).unwrap();
            if st.status() == Status::IViolated {
                contradictions += 1;
            }
        }
    }
    report(
        "9",
        lift_ok && solved == 100 && verified == 100 && contradictions == 0,
        &format!(
            "identity-embedding lift clean: {lift_ok}; {verified}/{solved} solver verdicts verified; {contradictions} referee contradictions"
        ),
    );
}

#[test]
fn criterion_10_axiom_suite() {
    let preds = predilator_corpus(500);
    let valid = par_map(&preds, |p| validate_predilator(p).is_valid());
    let accepted = valid.iter().filter(|&&ok| ok).count();
    let mut rejected = 0;
    let mut correct_class = 0;
    for (_, mutant, expect) in mutants() {
        let rep = validate_predilator(&mutant);
        if !rep.is_valid() {
            rejected += 1;
        }
        if rep.violations.iter().any(|v| same_violation_class(v, &expect)) {
            correct_class += 1;
        }
    }
    report(
        "10",
        accepted == 500 && rejected == 10 && correct_class == 10,
        &format!(
            "{accepted}/500 generated systems accepted; {rejected}/10 mutants rejected, {correct_class}/10 with the correct class"
        ),
    );
}
