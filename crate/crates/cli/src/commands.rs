//! Command execution: every verb parses its inputs, runs the library
//! operation, and emits a line-oriented report. Reports are deterministic for
//! fixed inputs and seeds.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use dilators::dendrogram::{
    apply_matches_decode, bullet, cell, dec, dec_bullet, is_trekkable, validate_dendrogram,
    Dendrogram,
};
use dilators::dilator::{
    apply_order, bad_sequence_probe, isomorphic_by_data, validate_predilator, Predilator,
    PresentedPredilator,
};
use dilators::elementary::{elementary_decompose, NodeApp, StepKind};
use dilators::flower::{differentiate, flower_decompose, integrate, is_semiflower, FlowerError};
use dilators::game::{
    lift_play, lifted_plays_are_clean, project_strategy, referee_step, solve_truncated,
    verify_strategy, Family, GameConfig, GameError, GameMode, GameMove, PlayState, Selector,
    Status, Strategy, Target, Winner,
};
use dilators::gen::{gen_dendrogram, gen_predilator, rng};
use dilators::order::DEFAULT_DIAGRAM_BOUND as BOUND;
use dilators::pi::{
    dilator_family_step, family_check, order_family_step, shoenfield_truncation, DecidableTree,
};
use dilators::sort::lv_sort;

use crate::fmt::{
    parse_dendrogram, parse_embedding, parse_predilator, parse_seq, parse_tree_spec,
    parse_trekkable, print_dendrogram, print_predilator, print_trekkable, tree_by_name,
    ParseError,
};

#[derive(Debug, Error)]
pub enum CliError {
    /// exit 2
    #[error("{0}")]
    Parse(#[from] ParseError),
    /// exit 2
    #[error("cannot read {path}: {msg}")]
    Io { path: PathBuf, msg: String },
    /// exit 3
    #[error("budget exceeded: {0}")]
    Budget(String),
    /// exit 4
    #[error("precondition failed: {0}")]
    Precondition(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Io { .. } => 2,
            CliError::Budget(_) => 3,
            CliError::Precondition(_) => 4,
        }
    }
}

impl From<FlowerError> for CliError {
    fn from(e: FlowerError) -> Self {
        match e {
            FlowerError::NotAFlower => CliError::Precondition("not a semiflower".into()),
            other => CliError::Precondition(other.to_string()),
        }
    }
}

impl From<GameError> for CliError {
    fn from(e: GameError) -> Self {
        match e {
            GameError::BudgetExceeded => CliError::Budget("truncated game too large".into()),
            other => CliError::Precondition(other.to_string()),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub verb: String,
    pub ok: bool,
    pub lines: Vec<String>,
}

impl Report {
    fn new(verb: &str) -> Self {
        Report { verb: verb.into(), ok: true, lines: Vec::new() }
    }

    fn push(&mut self, line: impl Into<String>) {
        self.lines.push(line.into());
    }

    pub fn text(&self) -> String {
        if self.lines.is_empty() {
            return String::new();
        }
        let mut out = self.lines.join("\n");
        out.push('\n');
        out
    }

    pub fn json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyKind {
    Order,
    Dilator,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GameAction {
    Solve,
    Play,
    Project,
}

#[derive(Debug, Args)]
pub struct TreeArgs {
    /// builtin spec (full, empty, bounded:B, descending-run, seeded:K) or a
    /// tree file path
    #[arg(long)]
    pub tree: String,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a predilator, dendrogram, or trekkable file
    Check { file: PathBuf },
    /// List the application of a system to the carrier 0..n
    Apply {
        file: PathBuf,
        #[arg(long)]
        n: usize,
    },
    /// Decode a dendrogram into a denotation system
    Dec {
        file: PathBuf,
        /// decode every node instead of the terminals
        #[arg(long)]
        bullet: bool,
    },
    /// Cell decomposition of a system into a dendrogram
    Cell { file: PathBuf },
    /// Bullet closure of a dendrogram
    Bullet { file: PathBuf },
    /// Align a trekkable dendrogram under the level-then-value order
    Sort { file: PathBuf },
    /// Integrate a system
    Int { file: PathBuf },
    /// Differentiate a semiflower
    Diff { file: PathBuf },
    /// Split a semiflower into its nullary part plus an integral
    DecomposeFlower { file: PathBuf },
    /// Decompose one comparison into elementary steps
    ElemDecompose {
        file: PathBuf,
        /// left element as node:args, e.g. 5:0,2
        #[arg(long)]
        left: String,
        /// right element as node:args
        #[arg(long)]
        right: String,
    },
    /// Evaluate the order or dilator family at a prefix
    Family {
        kind: FamilyKind,
        #[command(flatten)]
        tree: TreeArgs,
        #[arg(long, default_value = "")]
        prefix: String,
    },
    /// The truncated functorial Shoenfield tree at a prefix
    Shoenfield {
        #[command(flatten)]
        tree: TreeArgs,
        #[arg(long, default_value = "")]
        prefix: String,
        #[arg(long)]
        n: usize,
    },
    /// Sweep the family clauses over prefixes of the given plays
    FamilyCheck {
        #[command(flatten)]
        tree: TreeArgs,
        #[arg(long = "play", required = true)]
        plays: Vec<String>,
        #[arg(long, default_value_t = 4)]
        depth: usize,
    },
    /// Solve, replay, or project a subsidiary game
    Game { action: GameAction, config: PathBuf },
    /// Seeded decode/rebuild and derivative/integral suites
    Roundtrip {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        count: usize,
    },
    /// Probe a presented system for stage-descending chains
    Probe {
        /// predilator file for a constant presentation
        file: Option<PathBuf>,
        /// tree spec for a family presentation
        #[arg(long)]
        tree: Option<String>,
        /// play driving the family presentation
        #[arg(long, default_value = "")]
        play: String,
        #[arg(long, default_value_t = 4)]
        carrier: usize,
        #[arg(long, default_value_t = 3)]
        budget: usize,
    },
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Io { path: path.to_path_buf(), msg: e.to_string() })
}

fn load_tree(spec: &str) -> Result<DecidableTree, CliError> {
    if let Some(t) = tree_by_name(spec) {
        return Ok(t);
    }
    let text = read(Path::new(spec))?;
    Ok(parse_tree_spec(&text)?)
}

/// A dendrogram from either surface format, by header.
fn load_dendrogram(path: &Path) -> Result<Dendrogram, CliError> {
    let text = read(path)?;
    let header = text.lines().map(str::trim).find(|l| !l.is_empty() && !l.starts_with('#'));
    match header {
        Some("dendrogram") => Ok(parse_dendrogram(&text)?),
        Some("trekkable") => Ok(parse_trekkable(&text)?),
        _ => Err(ParseError {
            line: 1,
            col: 1,
            msg: "expected a `dendrogram` or `trekkable` file".into(),
        }
        .into()),
    }
}

fn load_predilator(path: &Path) -> Result<Predilator, CliError> {
    Ok(parse_predilator(&read(path)?)?)
}

fn applied_line(p: &Predilator, e: &dilators::dilator::AppliedElement) -> String {
    let args: Vec<String> = e.args.iter().map(|a| a.to_string()).collect();
    format!("{}({})", p.name(e.term), args.join(" "))
}

pub fn run(cmd: &Command) -> Result<Report, CliError> {
    match cmd {
        Command::Check { file } => check(file),
        Command::Apply { file, n } => {
            let p = load_predilator(file)?;
            let mut report = Report::new("apply");
            for e in apply_order(&p, *n) {
                report.push(applied_line(&p, &e));
            }
            Ok(report)
        }
        Command::Dec { file, bullet } => {
            let d = load_dendrogram(file)?;
            let (p, _) = if *bullet { dec_bullet(&d) } else { dec(&d) };
            let mut report = Report::new("dec");
            report.lines = print_predilator(&p).lines().map(String::from).collect();
            Ok(report)
        }
        Command::Cell { file } => {
            let p = load_predilator(file)?;
            let (d, _) = cell(&p);
            let mut report = Report::new("cell");
            report.lines = print_dendrogram(&d).lines().map(String::from).collect();
            Ok(report)
        }
        Command::Bullet { file } => {
            let d = load_dendrogram(file)?;
            let (db, _) = bullet(&d);
            let mut report = Report::new("bullet");
            report.lines = print_dendrogram(&db).lines().map(String::from).collect();
            Ok(report)
        }
        Command::Sort { file } => {
            let text = read(file)?;
            let d = parse_trekkable(&text)?;
            let (sorted, trace) =
                lv_sort(&d).map_err(|e| CliError::Precondition(e.to_string()))?;
            let mut report = Report::new("sort");
            report.push(format!("inversions {}", trace.inversion_counts[0]));
            for (k, &m) in trace.swaps.iter().enumerate() {
                report.push(format!(
                    "swap {} {} inversions {}",
                    m,
                    m + 1,
                    trace.inversion_counts[k + 1]
                ));
            }
            for line in print_trekkable(&sorted).lines() {
                report.push(line);
            }
            Ok(report)
        }
        Command::Int { file } => {
            let p = load_predilator(file)?;
            let mut report = Report::new("int");
            report.lines = print_predilator(&integrate(&p)).lines().map(String::from).collect();
            Ok(report)
        }
        Command::Diff { file } => {
            let p = load_predilator(file)?;
            let d = differentiate(&p, BOUND)?;
            let mut report = Report::new("diff");
            report.lines = print_predilator(&d).lines().map(String::from).collect();
            Ok(report)
        }
        Command::DecomposeFlower { file } => {
            let p = load_predilator(file)?;
            let decomposition = flower_decompose(&p, BOUND)?;
            let mut report = Report::new("decompose-flower");
            let init: Vec<&str> =
                decomposition.init.iter().map(|&t| p.name(t)).collect();
            report.push(format!("init {}", init.join(" ")));
            for (s, &t) in decomposition.iso.iter().enumerate() {
                report.push(format!("iso {} -> {}", p.name(s), decomposition.target.name(t)));
            }
            Ok(report)
        }
        Command::ElemDecompose { file, left, right } => {
            let d = load_dendrogram(file)?;
            let from = parse_node_app(left)?;
            let to = parse_node_app(right)?;
            let chain = elementary_decompose(&d, &from, &to)
                .map_err(|e| CliError::Precondition(e.to_string()))?;
            let mut report = Report::new("elem-decompose");
            report.push(format!("scale {}", chain.scale));
            for step in &chain.steps {
                report.push(format!(
                    "step {} {} < {}",
                    kind_letter(step.kind),
                    node_app_str(&step.from),
                    node_app_str(&step.to)
                ));
            }
            Ok(report)
        }
        Command::Family { kind, tree, prefix } => {
            let t = load_tree(&tree.tree)?;
            let s = parse_seq(prefix, 1)?;
            let mut report = Report::new("family");
            match kind {
                FamilyKind::Order => {
                    let ord = order_family_step(&t, &s);
                    let listed: Vec<String> =
                        ord.sorted().iter().map(|i| i.to_string()).collect();
                    report.push(format!("order {}", listed.join(" < ")));
                }
                FamilyKind::Dilator => {
                    let dil = dilator_family_step(&t, &s);
                    report.lines =
                        print_predilator(&dil).lines().map(String::from).collect();
                }
            }
            Ok(report)
        }
        Command::Shoenfield { tree, prefix, n } => {
            let t = load_tree(&tree.tree)?;
            let s = parse_seq(prefix, 1)?;
            let mut report = Report::new("shoenfield");
            for entry in shoenfield_truncation(&t, &s, *n) {
                let words: Vec<String> = entry.iter().map(|v| v.to_string()).collect();
                report.push(words.join(" "));
            }
            Ok(report)
        }
        Command::FamilyCheck { tree, plays, depth } => {
            let t = load_tree(&tree.tree)?;
            let plays: Result<Vec<Vec<u64>>, ParseError> =
                plays.iter().map(|p| parse_seq(p, 1)).collect();
            let rep = family_check(&t, &plays?, *depth);
            let mut report = Report::new("family-check");
            if rep.is_valid() {
                report.push("family-check ok");
            } else {
                report.ok = false;
                for v in &rep.violations {
                    report.push(format!("violation {v:?}"));
                }
            }
            Ok(report)
        }
        Command::Game { action, config } => game(*action, config),
        Command::Roundtrip { seed, count } => roundtrip(*seed, *count),
        Command::Probe { file, tree, play, carrier, budget } => {
            probe(file.as_deref(), tree.as_deref(), play, *carrier, *budget)
        }
    }
}

fn kind_letter(kind: StepKind) -> &'static str {
    match kind {
        StepKind::A => "A",
        StepKind::B => "B",
        StepKind::C => "C",
        StepKind::D => "D",
    }
}

fn node_app_str(app: &NodeApp) -> String {
    let args: Vec<String> = app.args.iter().map(|a| a.to_string()).collect();
    format!("{}:{}", app.node, args.join(","))
}

fn parse_node_app(spec: &str) -> Result<NodeApp, CliError> {
    let Some((node, args)) = spec.split_once(':') else {
        return Err(ParseError { line: 1, col: 1, msg: "expected node:args".into() }.into());
    };
    let node: usize = node
        .parse()
        .map_err(|_| ParseError { line: 1, col: 1, msg: "bad node id".into() })?;
    let args = parse_seq(args, 1)?;
    Ok(NodeApp::new(node, args.iter().map(|&v| v as u32).collect()))
}

fn check(file: &Path) -> Result<Report, CliError> {
    let text = read(file)?;
    let header = text.lines().map(str::trim).find(|l| !l.is_empty() && !l.starts_with('#'));
    let mut report = Report::new("check");
    match header {
        Some("predilator") => {
            let p = parse_predilator(&text)?;
            let rep = validate_predilator(&p);
            if rep.is_valid() {
                let flower = is_semiflower(&p, BOUND)
                    .map(|w| w.verdict)
                    .map_err(|e| CliError::Budget(e.to_string()))?;
                report.push(format!("valid predilator; semiflower: {flower}"));
            } else {
                report.ok = false;
                for v in &rep.violations {
                    report.push(format!("violation {v:?}"));
                }
            }
        }
        Some("dendrogram") | Some("trekkable") => {
            let d = load_dendrogram(file)?;
            let rep = validate_dendrogram(&d);
            if rep.is_valid() {
                report.push(format!(
                    "valid dendrogram; trekkable: {}; nodes: {}",
                    is_trekkable(&d),
                    d.len()
                ));
            } else {
                report.ok = false;
                for v in &rep.violations {
                    report.push(format!("violation {v:?}"));
                }
            }
        }
        _ => {
            return Err(ParseError { line: 1, col: 1, msg: "unknown file header".into() }.into())
        }
    }
    Ok(report)
}

// ---- game configuration ------------------------------------------------------

struct GameFile {
    cfg: GameConfig,
    selector: Option<Selector>,
    moves: Vec<u64>,
    targets: Vec<Target>,
    embedding: Option<Vec<Target>>,
}

fn parse_game_file(path: &Path) -> Result<GameFile, CliError> {
    let text = read(path)?;
    let dir = path.parent().unwrap_or(Path::new("."));
    let mut mode: Option<GameMode> = None;
    let mut family: Option<Family> = None;
    let mut alphabet = 2u64;
    let mut depth = 4usize;
    let mut kappa: Option<usize> = None;
    let mut target_file: Option<PathBuf> = None;
    let mut selector_spec: Option<(String, Vec<PathBuf>)> = None;
    let mut moves = Vec::new();
    let mut target_words: Vec<String> = Vec::new();

    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    match lines.next() {
        Some((_, "game")) => {}
        _ => {
            return Err(
                ParseError { line: 1, col: 1, msg: "expected `game` header".into() }.into()
            )
        }
    }
    for (n, line) in lines {
        let mut words = line.split_whitespace();
        match words.next() {
            Some("mode") => match words.next() {
                Some("ordinal") => mode = Some(GameMode::Ordinal { kappa: 0 }),
                Some("dilator") => mode = Some(GameMode::Dilator { omega: Predilator::empty() }),
                _ => return Err(ParseError { line: n, col: 1, msg: "bad mode".into() }.into()),
            },
            Some("kappa") => {
                kappa = Some(words.next().and_then(|w| w.parse().ok()).ok_or(ParseError {
                    line: n,
                    col: 1,
                    msg: "bad kappa".into(),
                })?)
            }
            Some("target") => {
                let w = words.next().ok_or(ParseError {
                    line: n,
                    col: 1,
                    msg: "target needs a file".into(),
                })?;
                target_file = Some(dir.join(w));
            }
            Some("family") => match words.next() {
                Some("prefix-of-target") => family = Some(Family::PrefixOfTarget),
                Some("tree") => {
                    let spec = words.collect::<Vec<_>>().join(" ");
                    let tree = if let Some(t) = tree_by_name(spec.trim()) {
                        t
                    } else {
                        let text = read(&dir.join(spec.trim()))?;
                        parse_tree_spec(&text)?
                    };
                    family = Some(Family::Tree(tree));
                }
                _ => return Err(ParseError { line: n, col: 1, msg: "bad family".into() }.into()),
            },
            Some("alphabet") => {
                alphabet = words.next().and_then(|w| w.parse().ok()).ok_or(ParseError {
                    line: n,
                    col: 1,
                    msg: "bad alphabet".into(),
                })?
            }
            Some("depth") => {
                depth = words.next().and_then(|w| w.parse().ok()).ok_or(ParseError {
                    line: n,
                    col: 1,
                    msg: "bad depth".into(),
                })?
            }
            Some("selector") => {
                let kind = words
                    .next()
                    .ok_or(ParseError { line: n, col: 1, msg: "bad selector".into() })?
                    .to_string();
                let files: Vec<PathBuf> = words.map(|w| dir.join(w)).collect();
                selector_spec = Some((kind, files));
            }
            Some("moves") => {
                moves = words
                    .map(|w| w.parse::<u64>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| ParseError { line: n, col: 1, msg: "bad moves".into() })?
            }
            Some("targets") => {
                target_words = words.map(String::from).collect();
            }
            Some(w) => {
                return Err(ParseError {
                    line: n,
                    col: 1,
                    msg: format!("unknown game directive `{w}`"),
                }
                .into())
            }
            None => unreachable!(),
        }
    }

    let omega = match target_file {
        Some(p) => Some(load_predilator(&p)?),
        None => None,
    };
    let mode = match mode {
        Some(GameMode::Ordinal { .. }) => GameMode::Ordinal {
            kappa: kappa.ok_or_else(|| {
                CliError::Precondition("ordinal mode needs `kappa`".into())
            })?,
        },
        Some(GameMode::Dilator { .. }) => GameMode::Dilator {
            omega: omega.clone().ok_or_else(|| {
                CliError::Precondition("dilator mode needs `target`".into())
            })?,
        },
        None => return Err(CliError::Precondition("game file needs `mode`".into())),
    };
    let family =
        family.ok_or_else(|| CliError::Precondition("game file needs `family`".into()))?;
    let targets: Vec<Target> = target_words
        .iter()
        .map(|w| match &mode {
            GameMode::Ordinal { .. } => w
                .parse::<usize>()
                .map(Target::Ordinal)
                .map_err(|_| CliError::Precondition(format!("bad ordinal target `{w}`"))),
            GameMode::Dilator { omega } => omega
                .term_by_name(w)
                .or_else(|| w.parse::<usize>().ok().filter(|&v| v < omega.term_count()))
                .map(Target::Term)
                .ok_or_else(|| CliError::Precondition(format!("unknown target term `{w}`"))),
        })
        .collect::<Result<_, _>>()?;
    let mut embedding = None;
    let selector = match selector_spec {
        None => None,
        Some((kind, files)) => {
            let load_candidates = |files: &[PathBuf]| -> Result<Vec<Vec<Target>>, CliError> {
                files
                    .iter()
                    .map(|f| {
                        let text = read(f)?;
                        Ok(parse_embedding(&text, match &mode {
                            GameMode::Dilator { omega } => Some(omega),
                            GameMode::Ordinal { .. } => None,
                        })?)
                    })
                    .collect()
            };
            match kind.as_str() {
                "at-embedding" | "first" | "majority" => {
                    let cands = load_candidates(&files)?;
                    if cands.is_empty() {
                        return Err(CliError::Precondition(
                            "selector needs at least one embedding file".into(),
                        ));
                    }
                    Some(match kind.as_str() {
                        "at-embedding" => {
                            embedding = Some(cands[0].clone());
                            Selector::AtEmbedding(cands[0].clone())
                        }
                        "first" => Selector::First(cands),
                        _ => Selector::Majority(cands),
                    })
                }
                "identity" => {
                    // dilator-mode shorthand: the target terms in order
                    let GameMode::Dilator { omega } = &mode else {
                        return Err(CliError::Precondition(
                            "identity selector needs dilator mode".into(),
                        ));
                    };
                    let e: Vec<Target> = omega.terms().map(Target::Term).collect();
                    embedding = Some(e.clone());
                    Some(Selector::AtEmbedding(e))
                }
                other => {
                    return Err(CliError::Precondition(format!("unknown selector `{other}`")))
                }
            }
        }
    };
    let cfg = GameConfig { mode, family, alphabet, depth };
    cfg.validate().map_err(CliError::from)?;
    Ok(GameFile { cfg, selector, moves, targets, embedding })
}

fn target_str(cfg: &GameConfig, t: Target) -> String {
    match (&cfg.mode, t) {
        (_, Target::Ordinal(v)) => v.to_string(),
        (GameMode::Dilator { omega }, Target::Term(id)) => omega.name(id).to_string(),
        (_, Target::Term(id)) => format!("term{id}"),
    }
}

fn game(action: GameAction, config: &Path) -> Result<Report, CliError> {
    let gf = parse_game_file(config)?;
    match action {
        GameAction::Solve => {
            let (winner, strategy) = solve_truncated(&gf.cfg)?;
            let verified = verify_strategy(&gf.cfg, winner, &strategy);
            let mut report = Report::new("game solve");
            report.push(format!(
                "winner {}",
                match winner {
                    Winner::PlayerI => "I",
                    Winner::PlayerII => "II",
                }
            ));
            report.push(format!("strategy positions {}", strategy.table.len()));
            report.push(format!("verified {verified}"));
            report.ok = verified;
            Ok(report)
        }
        GameAction::Play => {
            let mut st = PlayState::initial();
            let mut report = Report::new("game play");
            let mut targets = gf.targets.iter();
            for (k, &x) in gf.moves.iter().enumerate() {
                if st.status() != Status::Active {
                    break;
                }
                let mv = if k % 2 == 0 {
                    let target = targets.next().copied().ok_or_else(|| {
                        CliError::Precondition("not enough targets for the moves".into())
                    })?;
                    report.push(format!(
                        "play I x={x} target={}",
                        target_str(&gf.cfg, target)
                    ));
                    GameMove::One { x, target }
                } else {
                    report.push(format!("play II x={x}"));
                    GameMove::Two { x }
                };
                st = referee_step(&gf.cfg, &st, mv)?;
                if st.status() == Status::IViolated {
                    report.push("referee I-violated");
                }
            }
            report.push(format!(
                "verdict {}",
                match st.status() {
                    Status::Active => "active",
                    Status::IViolated => "II wins (violation)",
                    Status::Complete => "I wins (clean horizon)",
                }
            ));
            Ok(report)
        }
        GameAction::Project => {
            let selector = gf
                .selector
                .ok_or_else(|| CliError::Precondition("project needs a selector".into()))?;
            let (winner, solved) = solve_truncated(&gf.cfg)?;
            let sigma_sub = if winner == Winner::PlayerII {
                solved
            } else {
                Strategy::constant_two(0)
            };
            let projected = project_strategy(&gf.cfg, &sigma_sub, &selector)?;
            let mut report = Report::new("game project");
            report.push(format!(
                "subsidiary strategy: {}",
                if winner == Winner::PlayerII { "solved (II wins truncation)" } else { "constant 0 (I wins truncation)" }
            ));
            report.push(format!("projected positions {}", projected.table.len()));
            if let Some(e) = &gf.embedding {
                let clean = lifted_plays_are_clean(&gf.cfg, &projected, e)?;
                report.push(format!("lift clean {clean}"));
                report.ok = clean;
                // also show one lifted transcript
                let demo: Vec<u64> = vec![0; gf.cfg.depth];
                let mut history = Vec::new();
                for k in 0..gf.cfg.depth {
                    if k % 2 == 0 {
                        history.push(demo[k]);
                    } else {
                        let Some(GameMove::Two { x }) = projected.choose(&history, &[]) else {
                            break;
                        };
                        history.push(x);
                    }
                }
                let ok = lift_play(&gf.cfg, &history, e)?;
                let words: Vec<String> = history.iter().map(|x| x.to_string()).collect();
                report.push(format!("sample play {} clean {}", words.join(" "), ok));
            }
            Ok(report)
        }
    }
}

fn roundtrip(seed: u64, count: usize) -> Result<Report, CliError> {
    let mut r = rng(seed);
    let mut report = Report::new("roundtrip");
    let mut failures = 0usize;
    for _ in 0..count {
        let p = gen_predilator(&mut r, 4, 3);
        let (c, _) = cell(&p);
        let (back, _) = dec(&c);
        if isomorphic_by_data(&back, &p).is_none() {
            failures += 1;
        }
        let dp = differentiate(&integrate(&p), BOUND + 1)
            .map_err(|e| CliError::Precondition(e.to_string()))?;
        if isomorphic_by_data(&dp, &p).is_none() {
            failures += 1;
        }
    }
    for _ in 0..count {
        let d = gen_dendrogram(&mut r, 8, 4);
        let (p, _) = dec(&d);
        let (back, _) = cell(&p);
        if back.isomorphism_to(&d).is_none() {
            failures += 1;
        }
        let (direct, _) = dec_bullet(&d);
        let (via, _) = dec(&bullet(&d).0);
        if isomorphic_by_data(&direct, &via).is_none() {
            failures += 1;
        }
        if !(0..=3).all(|n| apply_matches_decode(&d, n, true)) {
            failures += 1;
        }
    }
    report.push(format!("instances {}", 2 * count));
    report.push(format!("failures {failures}"));
    report.ok = failures == 0;
    Ok(report)
}

fn probe(
    file: Option<&Path>,
    tree: Option<&str>,
    play: &str,
    carrier: usize,
    budget: usize,
) -> Result<Report, CliError> {
    let presented = match (file, tree) {
        (Some(path), None) => {
            let p = load_predilator(path)?;
            PresentedPredilator::constant(p)
        }
        (None, Some(spec)) => {
            let t = load_tree(spec)?;
            let s = parse_seq(play, 1)?;
            PresentedPredilator::new(move |k| dilator_family_step(&t, &s[..k.min(s.len())]))
        }
        _ => {
            return Err(CliError::Precondition(
                "probe needs either a predilator file or --tree with --play".into(),
            ))
        }
    };
    let mut report = Report::new("probe");
    match bad_sequence_probe(&presented, carrier, budget) {
        None => report.push("no witness"),
        Some(chain) => {
            let last = presented.stage(budget + 1);
            report.push(format!("witness length {}", chain.len()));
            for e in &chain {
                report.push(applied_line(&last, e));
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use dilators::gen::figure_sorting_tree;
    use std::io::Write;

    fn write_file(dir: &tempfile::TempDir, name: &str, contents: &str) -> PathBuf {
        let path = dir.path().join(name);
        let mut f = fs::File::create(&path).unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        path
    }

    #[test]
    fn check_reports_semiflower_verdict() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_file(
            &dir,
            "xx.pd",
            "predilator\nterm a arity=1 sigma=0\nterm b arity=1 sigma=0\ndist a b 0\n",
        );
        let report = run(&Command::Check { file: p }).unwrap();
        assert!(report.ok);
        assert_eq!(report.lines, vec!["valid predilator; semiflower: false"]);
    }

    #[test]
    fn sort_emits_figure_swaps() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_file(&dir, "fig.tk", &print_trekkable(&figure_sorting_tree()));
        let report = run(&Command::Sort { file: path }).unwrap();
        assert_eq!(report.lines[0], "inversions 4");
        assert_eq!(report.lines[1], "swap 2 3 inversions 3");
        assert_eq!(report.lines[2], "swap 4 5 inversions 2");
        assert_eq!(report.lines[3], "swap 6 7 inversions 1");
        assert_eq!(report.lines[4], "swap 3 4 inversions 0");
    }

    #[test]
    fn apply_empty_is_ok() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_file(&dir, "empty.pd", "predilator\n");
        let report = run(&Command::Apply { file: p, n: 5 }).unwrap();
        assert!(report.ok);
        assert!(report.lines.is_empty());
    }

    #[test]
    fn roundtrip_commands_compose() {
        // dec of cell of a parsed system is isomorphic to it, through files
        let report = run(&Command::Roundtrip { seed: 7, count: 20 }).unwrap();
        assert!(report.ok, "{:?}", report.lines);
    }
}
