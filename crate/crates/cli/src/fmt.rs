//! Line-oriented text formats: denotation systems, dendrograms in
//! s-expression and node-list form, tree specifications, embeddings, and game
//! configurations. Parsers report line and column; printers emit the
//! canonical form byte for byte.

use std::collections::BTreeMap;

use dilators::dendrogram::Dendrogram;
use dilators::dilator::{Predilator, TermId};
use dilators::game::Target;
use dilators::pi::DecidableTree;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("parse error at line {line}, column {col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

fn err<T>(line: usize, col: usize, msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { line, col, msg: msg.into() })
}

fn logical_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

// ---- predilator format ----------------------------------------------------

pub fn parse_predilator(text: &str) -> Result<Predilator, ParseError> {
    let mut lines = logical_lines(text);
    match lines.next() {
        Some((_, "predilator")) => {}
        Some((n, l)) => return err(n, 1, format!("expected `predilator` header, found `{l}`")),
        None => return err(1, 1, "empty input"),
    }
    let mut names: Vec<String> = Vec::new();
    let mut sigmas: Vec<Vec<usize>> = Vec::new();
    let mut arities: Vec<usize> = Vec::new();
    let mut dist_entries: Vec<(usize, String, String, usize)> = Vec::new();
    for (n, line) in lines {
        let mut words = line.split_whitespace();
        match words.next() {
            Some("term") => {
                let name = match words.next() {
                    Some(w) => w.to_string(),
                    None => return err(n, 1, "term line needs a name"),
                };
                if names.contains(&name) {
                    return err(n, 1, format!("duplicate term `{name}`"));
                }
                let arity = match words.next().and_then(|w| w.strip_prefix("arity=")) {
                    Some(v) => v
                        .parse::<usize>()
                        .map_err(|_| ParseError { line: n, col: 1, msg: "bad arity".into() })?,
                    None => return err(n, 1, "term line needs `arity=K`"),
                };
                let sigma_word = match words.next().and_then(|w| w.strip_prefix("sigma=")) {
                    Some(v) => v,
                    None => return err(n, 1, "term line needs `sigma=...`"),
                };
                let sigma: Vec<usize> = if sigma_word.is_empty() {
                    Vec::new()
                } else {
                    sigma_word
                        .split(',')
                        .map(|v| v.parse::<usize>())
                        .collect::<Result<_, _>>()
                        .map_err(|_| ParseError { line: n, col: 1, msg: "bad sigma".into() })?
                };
                if sigma.len() != arity {
                    return err(n, 1, format!("sigma has {} entries, arity is {arity}", sigma.len()));
                }
                names.push(name);
                arities.push(arity);
                sigmas.push(sigma);
            }
            Some("dist") => {
                let (a, b, v) = match (words.next(), words.next(), words.next()) {
                    (Some(a), Some(b), Some(v)) => (a, b, v),
                    _ => return err(n, 1, "dist line needs two names and a value"),
                };
                let v = v
                    .parse::<usize>()
                    .map_err(|_| ParseError { line: n, col: 1, msg: "bad dist value".into() })?;
                dist_entries.push((n, a.to_string(), b.to_string(), v));
            }
            Some(w) => return err(n, 1, format!("unknown directive `{w}`")),
            None => unreachable!(),
        }
    }
    let k = names.len();
    let index: BTreeMap<&str, usize> =
        names.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    let mut dists = vec![vec![usize::MAX; k]; k];
    for (i, a) in arities.iter().enumerate() {
        dists[i][i] = *a;
    }
    for (n, a, b, v) in dist_entries {
        let (Some(&i), Some(&j)) = (index.get(a.as_str()), index.get(b.as_str())) else {
            return err(n, 1, format!("dist names unknown: `{a}` `{b}`"));
        };
        if i == j {
            return err(n, 1, "dist for a term with itself is its arity, not listed");
        }
        if dists[i][j] != usize::MAX && dists[i][j] != v {
            return err(n, 1, format!("conflicting dist for `{a}` `{b}`"));
        }
        dists[i][j] = v;
        dists[j][i] = v;
    }
    for i in 0..k {
        for j in i + 1..k {
            if dists[i][j] == usize::MAX {
                return err(
                    1,
                    1,
                    format!("missing dist for `{}` `{}`", names[i], names[j]),
                );
            }
        }
    }
    Predilator::from_parts(names, arities, sigmas, dists, (0..k).collect())
        .map_err(|e| ParseError { line: 1, col: 1, msg: e.to_string() })
}

pub fn print_predilator(p: &Predilator) -> String {
    let mut out = String::from("predilator\n");
    for &t in p.order() {
        let sigma: Vec<String> = p.sigma(t).iter().map(|v| v.to_string()).collect();
        out.push_str(&format!(
            "term {} arity={} sigma={}\n",
            p.name(t),
            p.arity(t),
            sigma.join(",")
        ));
    }
    let ord = p.order();
    for i in 0..ord.len() {
        for j in i + 1..ord.len() {
            out.push_str(&format!(
                "dist {} {} {}\n",
                p.name(ord[i]),
                p.name(ord[j]),
                p.dist(ord[i], ord[j])
            ));
        }
    }
    out
}

// ---- dendrogram s-expression format ---------------------------------------

pub fn parse_dendrogram(text: &str) -> Result<Dendrogram, ParseError> {
    let mut lines = logical_lines(text);
    match lines.next() {
        Some((_, "dendrogram")) => {}
        Some((n, l)) => return err(n, 1, format!("expected `dendrogram` header, found `{l}`")),
        None => return err(1, 1, "empty input"),
    }
    let mut parent: Vec<Option<usize>> = Vec::new();
    let mut children: Vec<Vec<usize>> = Vec::new();
    let mut ecode: Vec<Option<usize>> = Vec::new();
    let mut roots: Vec<usize> = Vec::new();
    for (n, line) in lines {
        let mut chars: Vec<char> = line.chars().collect();
        chars.push(' ');
        let mut pos = 0usize;
        let root = parse_sexp(
            &chars,
            &mut pos,
            n,
            None,
            &mut parent,
            &mut children,
            &mut ecode,
        )?;
        roots.push(root);
        while pos < chars.len() && chars[pos].is_whitespace() {
            pos += 1;
        }
        if pos < chars.len() {
            return err(n, pos + 1, "trailing input after the root expression");
        }
    }
    Dendrogram::with_order(parent, children, roots, ecode)
        .map_err(|e| ParseError { line: 1, col: 1, msg: e.to_string() })
}

fn parse_sexp(
    chars: &[char],
    pos: &mut usize,
    line: usize,
    up: Option<usize>,
    parent: &mut Vec<Option<usize>>,
    children: &mut Vec<Vec<usize>>,
    ecode: &mut Vec<Option<usize>>,
) -> Result<usize, ParseError> {
    while *pos < chars.len() && chars[*pos].is_whitespace() {
        *pos += 1;
    }
    if *pos >= chars.len() {
        return err(line, *pos, "unexpected end of expression");
    }
    match chars[*pos] {
        '*' => {
            *pos += 1;
            let id = parent.len();
            parent.push(up);
            children.push(Vec::new());
            ecode.push(None);
            Ok(id)
        }
        '(' => {
            *pos += 1;
            if *pos >= chars.len() || chars[*pos] != 'e' {
                return err(line, *pos + 1, "expected `e<code>` after `(`");
            }
            *pos += 1;
            let start = *pos;
            while *pos < chars.len() && chars[*pos].is_ascii_digit() {
                *pos += 1;
            }
            let code: usize = chars[start..*pos]
                .iter()
                .collect::<String>()
                .parse()
                .map_err(|_| ParseError { line, col: start + 1, msg: "bad e-code".into() })?;
            let id = parent.len();
            parent.push(up);
            children.push(Vec::new());
            ecode.push(Some(code));
            loop {
                while *pos < chars.len() && chars[*pos].is_whitespace() {
                    *pos += 1;
                }
                if *pos >= chars.len() {
                    return err(line, *pos, "unterminated expression");
                }
                if chars[*pos] == ')' {
                    *pos += 1;
                    break;
                }
                let child = parse_sexp(chars, pos, line, Some(id), parent, children, ecode)?;
                children[id].push(child);
            }
            if children[id].is_empty() {
                return err(line, *pos, "non-terminal node needs at least one child");
            }
            Ok(id)
        }
        c => err(line, *pos + 1, format!("unexpected `{c}`")),
    }
}

pub fn print_dendrogram(d: &Dendrogram) -> String {
    fn node(d: &Dendrogram, x: usize, out: &mut String) {
        if d.is_terminal(x) {
            out.push('*');
        } else {
            out.push_str(&format!("(e{}", d.ecode(x).unwrap_or(0)));
            for &c in d.children(x) {
                out.push(' ');
                node(d, c, out);
            }
            out.push(')');
        }
    }
    let mut out = String::from("dendrogram\n");
    for &r in d.roots() {
        node(d, r, &mut out);
        out.push('\n');
    }
    out
}

// ---- trekkable node-list format -------------------------------------------

pub fn parse_trekkable(text: &str) -> Result<Dendrogram, ParseError> {
    let mut lines = logical_lines(text);
    match lines.next() {
        Some((_, "trekkable")) => {}
        Some((n, l)) => return err(n, 1, format!("expected `trekkable` header, found `{l}`")),
        None => return err(1, 1, "empty input"),
    }
    let mut rows: Vec<(usize, usize, Option<usize>, Option<usize>)> = Vec::new();
    for (n, line) in lines {
        let mut words = line.split_whitespace();
        if words.next() != Some("node") {
            return err(n, 1, "expected `node <id> parent=<id|-> e=<nat|->`");
        }
        let id: usize = match words.next().map(|w| w.parse()) {
            Some(Ok(v)) => v,
            _ => return err(n, 1, "bad node id"),
        };
        let parent = match words.next().and_then(|w| w.strip_prefix("parent=")) {
            Some("-") => None,
            Some(v) => Some(v.parse::<usize>().map_err(|_| ParseError {
                line: n,
                col: 1,
                msg: "bad parent".into(),
            })?),
            None => return err(n, 1, "missing parent field"),
        };
        let e = match words.next().and_then(|w| w.strip_prefix("e=")) {
            Some("-") => None,
            Some(v) => Some(v.parse::<usize>().map_err(|_| ParseError {
                line: n,
                col: 1,
                msg: "bad e-code".into(),
            })?),
            None => return err(n, 1, "missing e field"),
        };
        rows.push((n, id, parent, e));
    }
    let count = rows.len();
    let mut parent = vec![None; count];
    let mut ecode = vec![None; count];
    let mut seen = vec![false; count];
    for (n, id, p, e) in rows {
        if id >= count || seen[id] {
            return err(n, 1, format!("node ids must be 0..{count} without repeats"));
        }
        seen[id] = true;
        if let Some(p) = p {
            if p >= count {
                return err(n, 1, "parent out of range");
            }
        }
        parent[id] = p;
        ecode[id] = e;
    }
    Dendrogram::new(parent, ecode).map_err(|e| ParseError { line: 1, col: 1, msg: e.to_string() })
}

pub fn print_trekkable(d: &Dendrogram) -> String {
    let mut out = String::from("trekkable\n");
    for x in 0..d.len() {
        let p = d.parent(x).map(|v| v.to_string()).unwrap_or_else(|| "-".into());
        let e = d.ecode(x).map(|v| v.to_string()).unwrap_or_else(|| "-".into());
        out.push_str(&format!("node {x} parent={p} e={e}\n"));
    }
    out
}

// ---- tree specification ----------------------------------------------------

/// Builds a tree from a one-word spec (`full`, `empty`, `bounded:B`,
/// `descending-run`, `seeded:K`) or a `table` body of member lines.
pub fn parse_tree_spec(text: &str) -> Result<DecidableTree, ParseError> {
    let mut lines = logical_lines(text);
    let (n, header) = match lines.next() {
        Some(pair) => pair,
        None => return err(1, 1, "empty input"),
    };
    let Some(spec) = header.strip_prefix("tree ").map(str::trim) else {
        return err(n, 1, format!("expected `tree <spec>` header, found `{header}`"));
    };
    if spec == "table" {
        let mut members = Vec::new();
        for (m, line) in lines {
            let mut words = line.split_whitespace();
            if words.next() != Some("member") {
                return err(m, 1, "expected `member xs=... ys=...`");
            }
            let xs = parse_seq_field(words.next(), "xs=", m)?;
            let ys = parse_seq_field(words.next(), "ys=", m)?;
            if xs.len() != ys.len() {
                return err(m, 1, "member sides must have equal length");
            }
            members.push((xs, ys));
        }
        return Ok(DecidableTree::table(members));
    }
    tree_by_name(spec).ok_or(ParseError {
        line: n,
        col: 1,
        msg: format!("unknown tree spec `{spec}`"),
    })
}

pub fn tree_by_name(spec: &str) -> Option<DecidableTree> {
    if spec == "full" {
        Some(DecidableTree::full())
    } else if spec == "empty" {
        Some(DecidableTree::empty())
    } else if spec == "descending-run" {
        Some(DecidableTree::descending_run())
    } else if let Some(b) = spec.strip_prefix("bounded:") {
        b.parse().ok().map(DecidableTree::bounded)
    } else if let Some(k) = spec.strip_prefix("seeded:") {
        k.parse().ok().map(DecidableTree::seeded)
    } else {
        None
    }
}

fn parse_seq_field(
    word: Option<&str>,
    prefix: &str,
    line: usize,
) -> Result<Vec<u64>, ParseError> {
    let Some(body) = word.and_then(|w| w.strip_prefix(prefix)) else {
        return err(line, 1, format!("expected `{prefix}...`"));
    };
    parse_seq(body, line)
}

pub fn parse_seq(body: &str, line: usize) -> Result<Vec<u64>, ParseError> {
    if body.is_empty() {
        return Ok(Vec::new());
    }
    body.split(',')
        .map(|v| v.parse::<u64>())
        .collect::<Result<_, _>>()
        .map_err(|_| ParseError { line, col: 1, msg: "bad sequence".into() })
}

// ---- embedding files --------------------------------------------------------

/// Target lines in index order: `target <number>` (ordinal mode) or
/// `target <term-name>` (dilator mode, resolved against the target system).
pub fn parse_embedding(
    text: &str,
    omega: Option<&Predilator>,
) -> Result<Vec<Target>, ParseError> {
    let mut lines = logical_lines(text);
    match lines.next() {
        Some((_, "embedding")) => {}
        Some((n, l)) => return err(n, 1, format!("expected `embedding` header, found `{l}`")),
        None => return err(1, 1, "empty input"),
    }
    let mut out = Vec::new();
    for (n, line) in lines {
        let Some(word) = line.strip_prefix("target ").map(str::trim) else {
            return err(n, 1, "expected `target <value>`");
        };
        let target = match omega {
            None => Target::Ordinal(word.parse::<usize>().map_err(|_| ParseError {
                line: n,
                col: 1,
                msg: "bad ordinal target".into(),
            })?),
            Some(p) => {
                let t: TermId = match p.term_by_name(word) {
                    Some(t) => t,
                    None => match word.parse::<usize>() {
                        Ok(v) if v < p.term_count() => v,
                        _ => return err(n, 1, format!("unknown term `{word}`")),
                    },
                };
                Target::Term(t)
            }
        };
        out.push(target);
    }
    Ok(out)
}
