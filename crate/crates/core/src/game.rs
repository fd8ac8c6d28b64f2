//! The subsidiary games: an incremental referee enforcing the evolving
//! order- or dilator-embedding constraint on the first player's targets,
//! exact backward-induction solving of depth truncations, and projection of a
//! second-player strategy down to the plain game through a move selector.

use std::collections::HashMap;

use thiserror::Error;

use crate::dilator::{check_embedding, Predilator, TermId};
use crate::order::DEFAULT_DIAGRAM_BOUND;
use crate::pi::{dilator_family_step, order_family_step, CarrierOrder, DecidableTree};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GameError {
    #[error("illegal move: {0}")]
    IllegalMove(String),
    #[error("truncated game exceeds the solve budget")]
    BudgetExceeded,
    #[error("selector or strategy undefined at a reachable position")]
    SelectorPartial,
    #[error("configuration invalid: {0}")]
    BadConfig(String),
}

/// Target supplied with each first-player move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Target {
    /// position in the finite surrogate well-order
    Ordinal(usize),
    /// term of the target predilator
    Term(TermId),
}

#[derive(Debug, Clone)]
pub enum GameMode {
    /// targets are positions of a finite order of the given size
    Ordinal { kappa: usize },
    /// targets are terms of the given predilator
    Dilator { omega: Predilator },
}

/// Where the evolving family comes from.
pub enum Family {
    /// tree-generated order / dilator family evaluated at the play
    Tree(DecidableTree),
    /// prefix restrictions of the target itself (dilator mode), or the
    /// natural order on the move count (ordinal mode)
    PrefixOfTarget,
}

pub struct GameConfig {
    pub mode: GameMode,
    pub family: Family,
    pub alphabet: u64,
    pub depth: usize,
}

impl GameConfig {
    pub fn validate(&self) -> Result<(), GameError> {
        if self.depth % 2 != 0 {
            return Err(GameError::BadConfig("depth must be even".into()));
        }
        if self.alphabet == 0 {
            return Err(GameError::BadConfig("alphabet must be nonempty".into()));
        }
        if let (GameMode::Dilator { omega }, Family::PrefixOfTarget) =
            (&self.mode, &self.family)
        {
            if omega.term_count() < self.depth {
                return Err(GameError::BadConfig(
                    "target must have at least depth many terms".into(),
                ));
            }
        }
        Ok(())
    }

    fn order_at(&self, moves: &[u64]) -> CarrierOrder {
        match &self.family {
            Family::Tree(tree) => order_family_step(tree, moves),
            Family::PrefixOfTarget => CarrierOrder::from_sorted((0..moves.len()).collect()),
        }
    }

    fn dilator_at(&self, moves: &[u64]) -> Predilator {
        match &self.family {
            Family::Tree(tree) => dilator_family_step(tree, moves),
            Family::PrefixOfTarget => match &self.mode {
                GameMode::Dilator { omega } => omega.prefix(moves.len().min(omega.term_count())),
                GameMode::Ordinal { .. } => unreachable!("ordinal mode uses orders"),
            },
        }
    }

    pub fn targets(&self) -> Vec<Target> {
        match &self.mode {
            GameMode::Ordinal { kappa } => (0..*kappa).map(Target::Ordinal).collect(),
            GameMode::Dilator { omega } => omega.terms().map(Target::Term).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Active,
    IViolated,
    Complete,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PlayState {
    pub moves: Vec<u64>,
    pub targets: Vec<Target>,
    status_bits: u8,
}

impl PlayState {
    pub fn initial() -> Self {
        PlayState { moves: Vec::new(), targets: Vec::new(), status_bits: 0 }
    }

    pub fn status(&self) -> Status {
        match self.status_bits {
            0 => Status::Active,
            1 => Status::IViolated,
            _ => Status::Complete,
        }
    }

    pub fn player_one_to_move(&self) -> bool {
        self.moves.len() % 2 == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GameMove {
    One { x: u64, target: Target },
    Two { x: u64 },
}

/// Re-checks the stage constraint after every first-player move: in ordinal
/// mode the targets must mirror the evolving order on the target indices, in
/// dilator mode the target assignment must be a partial embedding into the
/// target system over every arity diagram.
pub fn constraint_holds(cfg: &GameConfig, moves: &[u64], targets: &[Target]) -> bool {
    match &cfg.mode {
        GameMode::Ordinal { .. } => {
            let ord = cfg.order_at(moves);
            for i in 0..targets.len() {
                for j in 0..targets.len() {
                    if i == j {
                        continue;
                    }
                    let (Target::Ordinal(a), Target::Ordinal(b)) = (targets[i], targets[j])
                    else {
                        return false;
                    };
                    if ord.less(i, j) != (a < b) {
                        return false;
                    }
                }
            }
            true
        }
        GameMode::Dilator { omega } => {
            let d = cfg.dilator_at(moves);
            let n = targets.len().min(d.term_count());
            let map: Vec<TermId> = targets[..n]
                .iter()
                .map(|t| match t {
                    Target::Term(id) => *id,
                    Target::Ordinal(_) => usize::MAX,
                })
                .collect();
            if map.iter().any(|&t| t >= omega.term_count()) {
                return false;
            }
            check_embedding(&d.prefix(n), omega, &map, DEFAULT_DIAGRAM_BOUND)
                .unwrap_or(false)
        }
    }
}

/// Applies a move, refereeing the stage constraint.
pub fn referee_step(
    cfg: &GameConfig,
    st: &PlayState,
    mv: GameMove,
) -> Result<PlayState, GameError> {
    if st.status() != Status::Active {
        return Err(GameError::IllegalMove("game is over".into()));
    }
    let mut next = st.clone();
    match (st.player_one_to_move(), mv) {
        (true, GameMove::One { x, target }) => {
            if x >= cfg.alphabet {
                return Err(GameError::IllegalMove(format!("move {x} out of alphabet")));
            }
            let valid = match (&cfg.mode, target) {
                (GameMode::Ordinal { kappa }, Target::Ordinal(v)) => v < *kappa,
                (GameMode::Dilator { omega }, Target::Term(t)) => t < omega.term_count(),
                _ => false,
            };
            if !valid {
                return Err(GameError::IllegalMove("target out of range".into()));
            }
            next.moves.push(x);
            next.targets.push(target);
            if !constraint_holds(cfg, &next.moves, &next.targets) {
                next.status_bits = 1;
                return Ok(next);
            }
        }
        (false, GameMove::Two { x }) => {
            if x >= cfg.alphabet {
                return Err(GameError::IllegalMove(format!("move {x} out of alphabet")));
            }
            next.moves.push(x);
        }
        _ => return Err(GameError::IllegalMove("wrong move shape for the mover".into())),
    }
    if next.moves.len() == cfg.depth {
        next.status_bits = 2;
    }
    Ok(next)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Winner {
    PlayerI,
    PlayerII,
}

type PosKey = (Vec<u64>, Vec<Target>);

/// A depth-bounded strategy: a position table with an optional fallback move.
#[derive(Debug, Clone, Default)]
pub struct Strategy {
    pub table: HashMap<PosKey, GameMove>,
    pub fallback: Option<GameMove>,
}

impl Strategy {
    pub fn choose(&self, moves: &[u64], targets: &[Target]) -> Option<GameMove> {
        self.table
            .get(&(moves.to_vec(), targets.to_vec()))
            .copied()
            .or(self.fallback)
    }

    /// The always-x second-player strategy.
    pub fn constant_two(x: u64) -> Strategy {
        Strategy { table: HashMap::new(), fallback: Some(GameMove::Two { x }) }
    }
}

/// Exact solution of the depth truncation: the first player wins a complete
/// play that never violated the constraint. Returns the winner and a winning
/// strategy verified by the caller via [`verify_strategy`].
pub fn solve_truncated(cfg: &GameConfig) -> Result<(Winner, Strategy), GameError> {
    cfg.validate()?;
    let targets = cfg.targets();
    let width = (cfg.alphabet as u128) * (targets.len().max(1) as u128);
    let mut states: u128 = 1;
    for ply in 0..cfg.depth {
        states = states.saturating_mul(if ply % 2 == 0 { width } else { cfg.alphabet as u128 });
        if states > 4_000_000 {
            return Err(GameError::BudgetExceeded);
        }
    }
    let mut strat_one = Strategy::default();
    let mut strat_two = Strategy::default();
    let first_wins = explore(
        cfg,
        &targets,
        &PlayState::initial(),
        &mut strat_one,
        &mut strat_two,
    );
    if first_wins {
        Ok((Winner::PlayerI, strat_one))
    } else {
        Ok((Winner::PlayerII, strat_two))
    }
}

fn explore(
    cfg: &GameConfig,
    targets: &[Target],
    st: &PlayState,
    strat_one: &mut Strategy,
    strat_two: &mut Strategy,
) -> bool {
    if st.status() == Status::IViolated {
        return false;
    }
    if st.status() == Status::Complete || st.moves.len() >= cfg.depth {
        return true;
    }
    let key = (st.moves.clone(), st.targets.clone());
    if st.player_one_to_move() {
        for x in 0..cfg.alphabet {
            for &target in targets {
                let mv = GameMove::One { x, target };
                let next = referee_step(cfg, st, mv).expect("legal by construction");
                if explore(cfg, targets, &next, strat_one, strat_two) {
                    strat_one.table.insert(key, mv);
                    return true;
                }
            }
        }
        // no winning move for the first player; record any sound default
        false
    } else {
        for x in 0..cfg.alphabet {
            let mv = GameMove::Two { x };
            let next = referee_step(cfg, st, mv).expect("legal by construction");
            if !explore(cfg, targets, &next, strat_one, strat_two) {
                strat_two.table.insert(key, mv);
                return false;
            }
        }
        true
    }
}

/// Exhaustive playout check that the strategy secures its owner's objective
/// against every opposing line.
pub fn verify_strategy(cfg: &GameConfig, winner: Winner, strategy: &Strategy) -> bool {
    fn walk(cfg: &GameConfig, winner: Winner, strategy: &Strategy, st: &PlayState) -> bool {
        if st.status() == Status::IViolated {
            return winner == Winner::PlayerII;
        }
        if st.status() == Status::Complete || st.moves.len() >= cfg.depth {
            return winner == Winner::PlayerI;
        }
        let strategist_moves = st.player_one_to_move() == (winner == Winner::PlayerI);
        if strategist_moves {
            let Some(mv) = strategy.choose(&st.moves, &st.targets) else {
                return false;
            };
            let Ok(next) = referee_step(cfg, st, mv) else {
                return false;
            };
            walk(cfg, winner, strategy, &next)
        } else if st.player_one_to_move() {
            cfg.targets().iter().all(|&target| {
                (0..cfg.alphabet).all(|x| {
                    let next = referee_step(cfg, st, GameMove::One { x, target }).unwrap();
                    walk(cfg, winner, strategy, &next)
                })
            })
        } else {
            (0..cfg.alphabet).all(|x| {
                let next = referee_step(cfg, st, GameMove::Two { x }).unwrap();
                walk(cfg, winner, strategy, &next)
            })
        }
    }
    walk(cfg, winner, strategy, &PlayState::initial())
}

/// The measure surrogate: a total choice rule over a supplied finite family
/// of candidate target assignments.
pub enum Selector {
    /// evaluate the subsidiary strategy along one fixed assignment
    AtEmbedding(Vec<Target>),
    /// first candidate's answer
    First(Vec<Vec<Target>>),
    /// majority answer across candidates, ties to the smaller move
    Majority(Vec<Vec<Target>>),
}

impl Selector {
    fn candidates(&self) -> Vec<&[Target]> {
        match self {
            Selector::AtEmbedding(e) => vec![e.as_slice()],
            Selector::First(cs) | Selector::Majority(cs) => {
                cs.iter().map(|c| c.as_slice()).collect()
            }
        }
    }
}

/// Projects a second-player subsidiary strategy to the plain game: at each
/// position the candidate assignments feed the subsidiary strategy and the
/// selector picks among the answers.
pub fn project_strategy(
    cfg: &GameConfig,
    sigma_sub: &Strategy,
    selector: &Selector,
) -> Result<Strategy, GameError> {
    let candidates = selector.candidates();
    if candidates.is_empty() {
        return Err(GameError::SelectorPartial);
    }
    let mut table = HashMap::new();
    let mut histories: Vec<Vec<u64>> = vec![Vec::new()];
    for len in 0..cfg.depth {
        let mut next_histories = Vec::new();
        for h in &histories {
            if h.len() % 2 == 1 {
                // second player's turn: project a move
                let mut answers = Vec::new();
                for p in &candidates {
                    let n_targets = h.len().div_ceil(2);
                    if p.len() < n_targets {
                        return Err(GameError::SelectorPartial);
                    }
                    let targets: Vec<Target> = p[..n_targets].to_vec();
                    let Some(GameMove::Two { x }) = sigma_sub.choose(h, &targets) else {
                        return Err(GameError::SelectorPartial);
                    };
                    answers.push(x);
                }
                let x = match selector {
                    Selector::AtEmbedding(_) | Selector::First(_) => answers[0],
                    Selector::Majority(_) => {
                        let mut counts: HashMap<u64, usize> = HashMap::new();
                        for &a in &answers {
                            *counts.entry(a).or_default() += 1;
                        }
                        let best = counts.values().copied().max().unwrap();
                        counts
                            .into_iter()
                            .filter(|&(_, c)| c == best)
                            .map(|(a, _)| a)
                            .min()
                            .unwrap()
                    }
                };
                table.insert((h.clone(), Vec::new()), GameMove::Two { x });
            }
            for x in 0..cfg.alphabet {
                let mut h2 = h.clone();
                h2.push(x);
                next_histories.push(h2);
            }
        }
        let _ = len;
        histories = next_histories;
    }
    Ok(Strategy { table, fallback: None })
}

/// Replays a plain-game history as a subsidiary play with the supplied
/// assignment as targets; clean when the referee never flags.
pub fn lift_play(cfg: &GameConfig, history: &[u64], e: &[Target]) -> Result<bool, GameError> {
    let mut st = PlayState::initial();
    for (k, &x) in history.iter().enumerate() {
        if st.status() != Status::Active {
            break;
        }
        let mv = if k % 2 == 0 {
            let idx = k / 2;
            if idx >= e.len() {
                return Err(GameError::SelectorPartial);
            }
            GameMove::One { x, target: e[idx] }
        } else {
            GameMove::Two { x }
        };
        st = referee_step(cfg, &st, mv)?;
    }
    Ok(st.status() != Status::IViolated)
}

/// Every plain-game play in which the second player follows the projected
/// strategy lifts cleanly along the assignment.
pub fn lifted_plays_are_clean(
    cfg: &GameConfig,
    projected: &Strategy,
    e: &[Target],
) -> Result<bool, GameError> {
    fn walk(
        cfg: &GameConfig,
        projected: &Strategy,
        e: &[Target],
        history: &mut Vec<u64>,
    ) -> Result<bool, GameError> {
        if history.len() == cfg.depth {
            return lift_play(cfg, history, e);
        }
        if history.len() % 2 == 0 {
            for x in 0..cfg.alphabet {
                history.push(x);
                if !walk(cfg, projected, e, history)? {
                    history.pop();
                    return Ok(false);
                }
                history.pop();
            }
            Ok(true)
        } else {
            let Some(GameMove::Two { x }) = projected.choose(history, &[]) else {
                return Err(GameError::SelectorPartial);
            };
            history.push(x);
            let ok = walk(cfg, projected, e, history)?;
            history.pop();
            Ok(ok)
        }
    }
    walk(cfg, projected, e, &mut Vec::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flower::integrate;

    fn ordinal_cfg(kappa: usize, depth: usize) -> GameConfig {
        GameConfig {
            mode: GameMode::Ordinal { kappa },
            family: Family::Tree(DecidableTree::full()),
            alphabet: 2,
            depth,
        }
    }

    #[test]
    fn ordinal_embedding_targets_never_violate() {
        let cfg = ordinal_cfg(8, 6);
        // play arbitrary moves, assigning each index its final rank
        for play in [[0u64, 1, 0, 1, 0, 1], [1, 1, 1, 0, 0, 0]] {
            let final_ord = order_family_step(&DecidableTree::full(), &play);
            let mut st = PlayState::initial();
            for (k, &x) in play.iter().enumerate() {
                let mv = if k % 2 == 0 {
                    GameMove::One { x, target: Target::Ordinal(final_ord.rank(k / 2)) }
                } else {
                    GameMove::Two { x }
                };
                st = referee_step(&cfg, &st, mv).unwrap();
                assert_ne!(st.status(), Status::IViolated, "embedding targets stay clean");
            }
            assert_eq!(st.status(), Status::Complete);
        }
    }

    #[test]
    fn duplicate_targets_violate() {
        let cfg = ordinal_cfg(4, 4);
        let mut st = PlayState::initial();
        st = referee_step(&cfg, &st, GameMove::One { x: 0, target: Target::Ordinal(2) }).unwrap();
        st = referee_step(&cfg, &st, GameMove::Two { x: 0 }).unwrap();
        st = referee_step(&cfg, &st, GameMove::One { x: 0, target: Target::Ordinal(2) }).unwrap();
        assert_eq!(st.status(), Status::IViolated);
    }

    #[test]
    fn dilator_arity_obstruction_violates() {
        // the target's term 0 is nullary while the family's term 0 is unary
        let omega = Predilator::constant(1).ordered_sum(&integrate(&Predilator::constant(4)));
        let cfg = GameConfig {
            mode: GameMode::Dilator { omega },
            family: Family::Tree(DecidableTree::full()),
            alphabet: 2,
            depth: 4,
        };
        let st = referee_step(
            &cfg,
            &PlayState::initial(),
            GameMove::One { x: 0, target: Target::Term(0) },
        )
        .unwrap();
        assert_eq!(st.status(), Status::IViolated);
    }

    #[test]
    fn zero_depth_first_player_wins() {
        let cfg = ordinal_cfg(1, 0);
        let (winner, strategy) = solve_truncated(&cfg).unwrap();
        assert_eq!(winner, Winner::PlayerI);
        assert!(verify_strategy(&cfg, winner, &strategy));
    }

    #[test]
    fn depth_two_with_room_first_player_wins() {
        let cfg = ordinal_cfg(1, 2);
        let (winner, strategy) = solve_truncated(&cfg).unwrap();
        assert_eq!(winner, Winner::PlayerI);
        assert!(verify_strategy(&cfg, winner, &strategy));
    }

    #[test]
    fn empty_kappa_second_player_wins() {
        let cfg = ordinal_cfg(0, 2);
        let (winner, strategy) = solve_truncated(&cfg).unwrap();
        assert_eq!(winner, Winner::PlayerII);
        assert!(verify_strategy(&cfg, winner, &strategy));
    }

    #[test]
    fn small_kappa_eventually_blocks() {
        // with one ordinal available the second distinct index cannot be placed
        let cfg = ordinal_cfg(1, 4);
        let (winner, strategy) = solve_truncated(&cfg).unwrap();
        assert_eq!(winner, Winner::PlayerII);
        assert!(verify_strategy(&cfg, winner, &strategy));
    }

    #[test]
    fn illegal_moves_are_rejected() {
        let cfg = ordinal_cfg(2, 4);
        let st = PlayState::initial();
        assert!(referee_step(&cfg, &st, GameMove::Two { x: 0 }).is_err());
        assert!(referee_step(&cfg, &st, GameMove::One { x: 5, target: Target::Ordinal(0) })
            .is_err());
        assert!(referee_step(&cfg, &st, GameMove::One { x: 0, target: Target::Ordinal(7) })
            .is_err());
    }

    #[test]
    fn prefix_family_identity_embedding_lifts() {
        // the family is the target's own prefixes; the identity assignment is
        // an embedding, so every projected play lifts referee-clean
        let omega = integrate(&integrate(&integrate(&Predilator::constant(6))));
        let identity: Vec<Target> = omega.terms().map(Target::Term).collect();
        let cfg = GameConfig {
            mode: GameMode::Dilator { omega },
            family: Family::PrefixOfTarget,
            alphabet: 2,
            depth: 6,
        };
        cfg.validate().unwrap();
        let sigma_sub = Strategy::constant_two(0);
        let selector = Selector::AtEmbedding(identity.clone());
        let projected = project_strategy(&cfg, &sigma_sub, &selector).unwrap();
        assert!(lifted_plays_are_clean(&cfg, &projected, &identity).unwrap());
    }

    #[test]
    fn constant_family_selector_independent() {
        // when every candidate agrees the projected strategy is selector-free
        let cfg = ordinal_cfg(4, 4);
        let sigma_sub = Strategy::constant_two(1);
        let a = vec![Target::Ordinal(0), Target::Ordinal(1), Target::Ordinal(2)];
        let b = vec![Target::Ordinal(1), Target::Ordinal(2), Target::Ordinal(3)];
        let first = project_strategy(&cfg, &sigma_sub, &Selector::First(vec![a.clone(), b.clone()]))
            .unwrap();
        let majority =
            project_strategy(&cfg, &sigma_sub, &Selector::Majority(vec![a, b])).unwrap();
        assert_eq!(first.table, majority.table);
    }

    #[test]
    fn projection_requires_total_strategy() {
        let cfg = ordinal_cfg(2, 4);
        let empty = Strategy::default();
        let selector = Selector::AtEmbedding(vec![Target::Ordinal(0), Target::Ordinal(1)]);
        assert_eq!(
            project_strategy(&cfg, &empty, &selector).unwrap_err(),
            GameError::SelectorPartial
        );
    }
}
