//! Plain-text instance files.
//!
//! ```text
//! # comment
//! 1: a b          <- men rows first, one per man
//! 2: b a
//! a: 2 1          <- then one row per woman
//! b: 1 2
//! ---             <- optional second block (true profile first, stated second)
//! 1: a b
//! ...
//! ```
//!
//! A block holds `2n` rows of `n` entries. Row owners define the labels: the
//! first `n` rows name the men, the last `n` the women. A second block must
//! use the same labels on the same sides; its rows may come in any order.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::dynamics::{Mode, ScriptCommand};
use crate::model::{Matching, PreferenceList, Profile, Side};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("no preference rows found")]
    Empty,
    #[error("expected `<label>:` at the start of the row")]
    MissingOwner,
    #[error("a block holds at most two profiles")]
    TooManyBlocks,
    #[error("block has {found} rows, expected {expected} (n = {n})")]
    WrongRowCount { n: usize, expected: usize, found: usize },
    #[error("label `{0}` owns more than one row")]
    DuplicateOwner(String),
    #[error("label `{0}` is used for both a man and a woman")]
    AmbiguousLabel(String),
    #[error("row `{owner}` lists `{label}` more than once")]
    DuplicateLabel { owner: String, label: String },
    #[error("row `{owner}` mentions unknown label `{label}`")]
    UnknownLabel { owner: String, label: String },
    #[error("row `{owner}` has {found} entries, expected {expected} (missing `{missing}`)")]
    RaggedRow {
        owner: String,
        expected: usize,
        found: usize,
        missing: String,
    },
    #[error("second block does not match the first: {0}")]
    BlockMismatch(String),
    #[error("unknown script command `{0}`")]
    UnknownCommand(String),
    #[error("invalid dynamics mode `{0}` (expected `p-stable` or `any`)")]
    BadMode(String),
}

/// External names of the men and women of an instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Labels {
    men: Vec<String>,
    women: Vec<String>,
    men_index: HashMap<String, usize>,
    women_index: HashMap<String, usize>,
}

impl Labels {
    /// Returns `None` when a label repeats or appears on both sides.
    pub fn new(men: Vec<String>, women: Vec<String>) -> Option<Self> {
        let index = |v: &[String]| -> Option<HashMap<String, usize>> {
            let map: HashMap<_, _> = v.iter().cloned().zip(0..).collect();
            (map.len() == v.len()).then_some(map)
        };
        let men_index = index(&men)?;
        let women_index = index(&women)?;
        if men.iter().any(|m| women_index.contains_key(m)) {
            return None;
        }
        Some(Labels {
            men,
            women,
            men_index,
            women_index,
        })
    }

    /// Men `1..=n`; women `a`, `b`, ... (or `w1..wn` past 26).
    pub fn default_for(n: usize) -> Self {
        let men = (1..=n).map(|i| i.to_string()).collect();
        let women = if n <= 26 {
            (0..n).map(|i| char::from(b'a' + i as u8).to_string()).collect()
        } else {
            (1..=n).map(|i| format!("w{i}")).collect()
        };
        Labels::new(men, women).expect("default labels are distinct")
    }

    pub fn size(&self) -> usize {
        self.men.len()
    }

    pub fn man(&self, index: usize) -> &str {
        &self.men[index]
    }

    pub fn woman(&self, index: usize) -> &str {
        &self.women[index]
    }

    pub fn of(&self, side: Side, index: usize) -> &str {
        match side {
            Side::Man => self.man(index),
            Side::Woman => self.woman(index),
        }
    }

    pub fn find_man(&self, label: &str) -> Option<usize> {
        self.men_index.get(label).copied()
    }

    pub fn find_woman(&self, label: &str) -> Option<usize> {
        self.women_index.get(label).copied()
    }

    fn find(&self, side: Side, label: &str) -> Option<usize> {
        match side {
            Side::Man => self.find_man(label),
            Side::Woman => self.find_woman(label),
        }
    }

    /// Renders a list held by someone on `holder`'s side.
    pub fn list(&self, holder: Side, list: &PreferenceList) -> Vec<String> {
        list.iter()
            .map(|e| self.of(holder.opposite(), e).to_string())
            .collect()
    }

    /// `(man, woman)` label pairs, ordered by man.
    pub fn pairs(&self, matching: &Matching) -> Vec<(String, String)> {
        matching
            .pairs()
            .map(|(m, w)| (self.man(m).to_string(), self.woman(w).to_string()))
            .collect()
    }
}

/// A parsed instance file: one profile, or a true profile followed by a
/// stated one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub labels: Labels,
    first: Profile,
    second: Option<Profile>,
}

impl Instance {
    pub fn new(labels: Labels, first: Profile, second: Option<Profile>) -> Self {
        assert_eq!(labels.size(), first.size(), "labels must cover the profile");
        if let Some(s) = &second {
            assert_eq!(s.size(), first.size(), "blocks must share n");
        }
        Instance {
            labels,
            first,
            second,
        }
    }

    pub fn first(&self) -> &Profile {
        &self.first
    }

    pub fn second(&self) -> Option<&Profile> {
        self.second.as_ref()
    }

    /// The profile the mechanism runs on: the last block.
    pub fn stated(&self) -> &Profile {
        self.second.as_ref().unwrap_or(&self.first)
    }

    /// The true profile, present only in two-block files.
    pub fn truth(&self) -> Option<&Profile> {
        self.second.as_ref().map(|_| &self.first)
    }

    pub fn size(&self) -> usize {
        self.first.size()
    }

    /// Canonical text: rows in index order, single spaces, no comments.
    pub fn to_text(&self) -> String {
        let mut out = write_profile(&self.first, &self.labels);
        if let Some(second) = &self.second {
            out.push_str("---\n");
            out.push_str(&write_profile(second, &self.labels));
        }
        out
    }
}

pub fn write_profile(profile: &Profile, labels: &Labels) -> String {
    let mut out = String::new();
    let sides = [
        (Side::Man, profile.men_lists()),
        (Side::Woman, profile.women_lists()),
    ];
    for (side, lists) in sides {
        for (i, list) in lists.iter().enumerate() {
            let _ = writeln!(
                out,
                "{}: {}",
                labels.of(side, i),
                labels.list(side, list).join(" ")
            );
        }
    }
    out
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

struct Row<'a> {
    line: usize,
    owner: Token<'a>,
    entries: Vec<Token<'a>>,
}

fn err(line: usize, column: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { line, column, kind }
}

/// Splits a line into tokens, dropping `#` comments. Columns are 1-based.
fn tokens(line: &str) -> Vec<Token<'_>> {
    let content = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in content.char_indices().chain([(content.len(), ' ')]) {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push(Token {
                    text: &content[s..i],
                    column: content[..s].chars().count() + 1,
                });
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    out
}

fn split_blocks(text: &str) -> Result<Vec<Vec<Row<'_>>>, ParseError> {
    let mut blocks: Vec<Vec<Row>> = vec![Vec::new()];
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let toks = tokens(line);
        let Some(first) = toks.first() else { continue };
        if first.text == "---" && toks.len() == 1 {
            if blocks.len() == 2 {
                return Err(err(line_no, first.column, ParseErrorKind::TooManyBlocks));
            }
            blocks.push(Vec::new());
            continue;
        }
        let mut iter = toks.into_iter();
        let head = iter.next().expect("non-empty");
        let (owner, rest): (Token, Vec<Token>) = match head.text.strip_suffix(':') {
            Some(o) if !o.is_empty() => (
                Token {
                    text: o,
                    column: head.column,
                },
                iter.collect(),
            ),
            _ => return Err(err(line_no, head.column, ParseErrorKind::MissingOwner)),
        };
        blocks.last_mut().expect("at least one block").push(Row {
            line: line_no,
            owner,
            entries: rest,
        });
    }
    let last_line = text.lines().count().max(1);
    if blocks.iter().any(|b| b.is_empty()) {
        return Err(err(last_line, 1, ParseErrorKind::Empty));
    }
    Ok(blocks)
}

fn parse_row(row: &Row, labels: &Labels, holder: Side) -> Result<PreferenceList, ParseError> {
    let n = labels.size();
    let target = holder.opposite();
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for tok in &row.entries {
        let Some(idx) = labels.find(target, tok.text) else {
            return Err(err(
                row.line,
                tok.column,
                ParseErrorKind::UnknownLabel {
                    owner: row.owner.text.to_string(),
                    label: tok.text.to_string(),
                },
            ));
        };
        if std::mem::replace(&mut seen[idx], true) {
            return Err(err(
                row.line,
                tok.column,
                ParseErrorKind::DuplicateLabel {
                    owner: row.owner.text.to_string(),
                    label: tok.text.to_string(),
                },
            ));
        }
        order.push(idx);
    }
    if order.len() != n {
        let missing = seen.iter().position(|s| !s).expect("short row");
        let column = row
            .entries
            .last()
            .map_or(row.owner.column, |t| t.column + t.text.len());
        return Err(err(
            row.line,
            column,
            ParseErrorKind::RaggedRow {
                owner: row.owner.text.to_string(),
                expected: n,
                found: order.len(),
                missing: labels.of(target, missing).to_string(),
            },
        ));
    }
    Ok(PreferenceList::new(order).expect("validated permutation"))
}

fn block_labels(rows: &[Row]) -> Result<Labels, ParseError> {
    let first = &rows[0];
    let n = first.entries.len();
    if rows.len() != 2 * n || n == 0 {
        let at = rows.get(2 * n).unwrap_or(&rows[rows.len() - 1]);
        return Err(err(
            at.line,
            1,
            ParseErrorKind::WrongRowCount {
                n,
                expected: 2 * n,
                found: rows.len(),
            },
        ));
    }
    let mut owners: HashMap<&str, Side> = HashMap::new();
    for (i, row) in rows.iter().enumerate() {
        let side = if i < n { Side::Man } else { Side::Woman };
        if let Some(prev) = owners.insert(row.owner.text, side) {
            let kind = if prev == side {
                ParseErrorKind::DuplicateOwner(row.owner.text.to_string())
            } else {
                ParseErrorKind::AmbiguousLabel(row.owner.text.to_string())
            };
            return Err(err(row.line, row.owner.column, kind));
        }
    }
    let names = |rs: &[Row]| rs.iter().map(|r| r.owner.text.to_string()).collect();
    Ok(Labels::new(names(&rows[..n]), names(&rows[n..])).expect("owners checked distinct"))
}

fn parse_block(rows: &[Row], labels: &Labels) -> Result<Profile, ParseError> {
    let n = labels.size();
    let mut men = vec![None; n];
    let mut women = vec![None; n];
    for (i, row) in rows.iter().enumerate() {
        let side = if i < n { Side::Man } else { Side::Woman };
        let Some(idx) = labels.find(side, row.owner.text) else {
            let detail = match labels.find(side.opposite(), row.owner.text) {
                Some(_) => format!("`{}` is on the other side in the first block", row.owner.text),
                None => format!("unknown row owner `{}`", row.owner.text),
            };
            return Err(err(
                row.line,
                row.owner.column,
                ParseErrorKind::BlockMismatch(detail),
            ));
        };
        let slot = match side {
            Side::Man => &mut men[idx],
            Side::Woman => &mut women[idx],
        };
        if slot.is_some() {
            return Err(err(
                row.line,
                row.owner.column,
                ParseErrorKind::DuplicateOwner(row.owner.text.to_string()),
            ));
        }
        *slot = Some(parse_row(row, labels, side)?);
    }
    let collect = |v: Vec<Option<PreferenceList>>| v.into_iter().map(Option::unwrap).collect();
    Ok(Profile::new(collect(men), collect(women)).expect("rows validated against n"))
}

/// Parses an instance file with one or two profile blocks.
pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let blocks = split_blocks(text)?;
    let labels = block_labels(&blocks[0])?;
    let first = parse_block(&blocks[0], &labels)?;
    let second = match blocks.get(1) {
        None => None,
        Some(rows) => {
            if rows.len() != 2 * labels.size() {
                let last = &rows[rows.len() - 1];
                return Err(err(
                    last.line,
                    1,
                    ParseErrorKind::BlockMismatch(format!(
                        "{} rows, expected {}",
                        rows.len(),
                        2 * labels.size()
                    )),
                ));
            }
            Some(parse_block(rows, &labels)?)
        }
    };
    Ok(Instance::new(labels, first, second))
}

/// Parses a dynamics script: `deviate <woman> <men...>` or `auto <mode>`,
/// one command per line.
pub fn parse_script(text: &str, labels: &Labels) -> Result<Vec<ScriptCommand>, ParseError> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let toks = tokens(line);
        let Some(cmd) = toks.first() else { continue };
        match cmd.text {
            "deviate" => {
                let Some(who) = toks.get(1) else {
                    return Err(err(line_no, cmd.column, ParseErrorKind::MissingOwner));
                };
                let Some(woman) = labels.find_woman(who.text) else {
                    return Err(err(
                        line_no,
                        who.column,
                        ParseErrorKind::UnknownLabel {
                            owner: "deviate".to_string(),
                            label: who.text.to_string(),
                        },
                    ));
                };
                let row = Row {
                    line: line_no,
                    owner: Token {
                        text: who.text,
                        column: who.column,
                    },
                    entries: toks.into_iter().skip(2).collect(),
                };
                let list = parse_row(&row, labels, Side::Woman)?;
                out.push(ScriptCommand::Deviate { woman, list });
            }
            "auto" => {
                let mode = toks.get(1).map(|t| (t.text, t.column));
                match mode.and_then(|(m, _)| m.parse::<Mode>().ok()) {
                    Some(mode) if toks.len() == 2 => out.push(ScriptCommand::Auto(mode)),
                    _ => {
                        let (text, column) = mode.unwrap_or(("", cmd.column));
                        return Err(err(
                            line_no,
                            column,
                            ParseErrorKind::BadMode(text.to_string()),
                        ));
                    }
                }
            }
            other => {
                return Err(err(
                    line_no,
                    cmd.column,
                    ParseErrorKind::UnknownCommand(other.to_string()),
                ))
            }
        }
    }
    Ok(out)
}
