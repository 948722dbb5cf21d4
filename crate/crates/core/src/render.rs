//! Tableau rendering.
//!
//! Entries are laid out in display rows. Each source entry opens a row whose
//! left cell is numbered 2k-1; an Inquirer entry fills the right cell (2k) of
//! the previous row when that row's sentence is the question's
//! presupposition, and otherwise gets a row of its own with a blank left
//! cell.
//!
//! Text layout:
//!
//! ```text
//! +---+-----------------------+------------------+---+
//! | # | SOURCE OF INFORMATION | INQUIRER: HOLMES | # |
//! +---+-----------------------+------------------+---+
//! | 1 | exists x. x = t       | exists x. x = t? | 2 |
//! +---+-----------------------+------------------+---+
//! status: in progress
//! ```
//!
//! Markdown uses the same rows with unicode connectives. Json is the
//! [`TableauDocument`] schema: the game state plus the inquirer and rows.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::game::{GameState, Side, Status, TableauEntry};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Markdown,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "text" | "txt" => Ok(Format::Text),
            "markdown" | "md" => Ok(Format::Markdown),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format `{other}` (expected text, markdown or json)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub seq: usize,
    pub text: String,
    pub unicode: String,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub refused: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisplayRow {
    pub left_no: usize,
    pub left: Option<Cell>,
    pub right_no: usize,
    pub right: Option<Cell>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableauDocument {
    pub inquirer: String,
    #[serde(flatten)]
    pub state: GameState,
    pub rows: Vec<DisplayRow>,
}

impl TableauDocument {
    pub fn new(state: &GameState, inquirer: &str) -> Self {
        TableauDocument {
            inquirer: inquirer.to_string(),
            state: state.clone(),
            rows: display_rows(state),
        }
    }
}

fn cell(state: &GameState, e: &TableauEntry) -> Cell {
    Cell {
        seq: e.seq,
        text: e.text(),
        unicode: e.unicode(),
        refused: state.refused.contains(&e.seq),
    }
}

pub fn display_rows(state: &GameState) -> Vec<DisplayRow> {
    let mut rows: Vec<DisplayRow> = Vec::new();
    let mut left_sentence = None;
    for e in &state.entries {
        let n = rows.len() + 1;
        match e.side {
            Side::Source => {
                rows.push(DisplayRow {
                    left_no: 2 * n - 1,
                    left: Some(cell(state, e)),
                    right_no: 2 * n,
                    right: None,
                });
                left_sentence = e.sentence();
            }
            Side::Inquirer => {
                let q = e.question().expect("inquirer entries hold questions");
                let attach = match (rows.last(), left_sentence) {
                    (Some(last), Some(f)) => last.right.is_none() && *f == q.presupposition(),
                    _ => false,
                };
                if attach {
                    rows.last_mut().unwrap().right = Some(cell(state, e));
                } else {
                    rows.push(DisplayRow {
                        left_no: 2 * n - 1,
                        left: None,
                        right_no: 2 * n,
                        right: Some(cell(state, e)),
                    });
                }
                left_sentence = None;
            }
        }
    }
    rows
}

pub fn status_line(status: &Status) -> String {
    match status {
        Status::InProgress => "status: in progress".to_string(),
        Status::Solved {
            answer,
            witness: Some(w),
        } => format!("status: solved: {answer} (witness {w})"),
        Status::Solved {
            answer,
            witness: None,
        } => format!("status: solved: {answer}"),
    }
}

fn right_text(c: &Cell, unicode: bool) -> String {
    let base = if unicode { &c.unicode } else { &c.text };
    if c.refused {
        format!("{base} (refused)")
    } else {
        base.clone()
    }
}

pub fn render_tableau(state: &GameState, inquirer: &str, format: Format) -> String {
    match format {
        Format::Json => {
            let doc = TableauDocument::new(state, inquirer);
            serde_json::to_string_pretty(&doc).expect("tableau serializes")
        }
        Format::Text => render_text(state, inquirer),
        Format::Markdown => render_markdown(state, inquirer),
    }
}

fn render_text(state: &GameState, inquirer: &str) -> String {
    let header = [
        "#".to_string(),
        "SOURCE OF INFORMATION".to_string(),
        format!("INQUIRER: {}", inquirer.to_uppercase()),
        "#".to_string(),
    ];
    let body: Vec<[String; 4]> = display_rows(state)
        .iter()
        .map(|r| {
            [
                r.left_no.to_string(),
                r.left.as_ref().map(|c| c.text.clone()).unwrap_or_default(),
                r.right.as_ref().map(|c| right_text(c, false)).unwrap_or_default(),
                r.right_no.to_string(),
            ]
        })
        .collect();
    let mut widths = header.each_ref().map(|h| h.chars().count());
    for row in &body {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.chars().count());
        }
    }
    let rule = {
        let mut s = String::from("+");
        for w in widths {
            s.push_str(&"-".repeat(w + 2));
            s.push('+');
        }
        s
    };
    let line = |cells: &[String; 4]| {
        let mut s = String::from("|");
        for (i, (c, w)) in cells.iter().zip(widths).enumerate() {
            let pad = w - c.chars().count();
            // Row numbers are right-aligned on the left, left-aligned on the right.
            if i == 0 {
                let _ = write!(s, " {}{} |", " ".repeat(pad), c);
            } else {
                let _ = write!(s, " {}{} |", c, " ".repeat(pad));
            }
        }
        s
    };
    let mut out = String::new();
    out.push_str(&rule);
    out.push('\n');
    out.push_str(&line(&header));
    out.push('\n');
    out.push_str(&rule);
    out.push('\n');
    for row in &body {
        out.push_str(&line(row));
        out.push('\n');
    }
    if !body.is_empty() {
        out.push_str(&rule);
        out.push('\n');
    }
    out.push_str(&status_line(&state.status));
    out.push('\n');
    out
}

fn md_escape(s: &str) -> String {
    s.replace('|', "\\|")
}

fn render_markdown(state: &GameState, inquirer: &str) -> String {
    let mut out = format!(
        "| # | SOURCE OF INFORMATION | INQUIRER: {} | # |\n|--:|---|---|:--|\n",
        inquirer.to_uppercase()
    );
    for r in display_rows(state) {
        let _ = writeln!(
            out,
            "| {} | {} | {} | {} |",
            r.left_no,
            r.left.as_ref().map(|c| md_escape(&c.unicode)).unwrap_or_default(),
            r.right.as_ref().map(|c| md_escape(&right_text(c, true))).unwrap_or_default(),
            r.right_no
        );
    }
    out.push('\n');
    let status = match &state.status {
        Status::InProgress => "in progress".to_string(),
        Status::Solved {
            answer,
            witness: Some(w),
        } => format!("solved: {} (witness {})", answer.unicode(), w),
        Status::Solved { answer, .. } => format!("solved: {}", answer.unicode()),
    };
    let _ = writeln!(out, "Status: {status}");
    out
}
