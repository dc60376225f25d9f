//! The line-oriented net format.
//!
//! ```text
//! # comments run to the end of the line
//! net reentrant
//! kind place
//! place a
//! trans A
//! arc a A
//! input a
//! output c
//! ```
//!
//! Directives may appear in any order; `input` and `output` may repeat and
//! take one or more ids. [`write_net_text`] emits the canonical form: header,
//! then places, transitions and arcs in sorted order, then one `input` and one
//! `output` line.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::net::{NodeId, NodeKind, PetriNet};
use crate::workflow::{Border, WorkflowError, WorkflowNet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TextError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown node {node}")]
    UnknownNode { line: usize, node: String },
    #[error("line {line}: node {node} is already declared on line {first}")]
    Duplicate { line: usize, node: String, first: usize },
    #[error("line {line}: arc {from} -> {to} must connect a place and a transition")]
    InvalidArc { line: usize, from: String, to: String },
    #[error("missing `kind place` or `kind transition` directive")]
    MissingKind,
    #[error(transparent)]
    Workflow(#[from] WorkflowError),
}

fn syntax(line: usize, message: impl Into<String>) -> TextError {
    TextError::Syntax { line, message: message.into() }
}

/// Splits `text` into (1-based line number, tokens) with comments removed and
/// blank lines skipped.
pub(crate) fn tokenized_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let content = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = content.split_whitespace().collect();
        (!tokens.is_empty()).then_some((i + 1, tokens))
    })
}

fn node_id(line: usize, s: &str) -> Result<NodeId, TextError> {
    NodeId::new(s).map_err(|e| syntax(line, e.to_string()))
}

pub fn parse_net_text(text: &str) -> Result<WorkflowNet, TextError> {
    let mut name: Option<String> = None;
    let mut border: Option<Border> = None;
    let mut declared: BTreeMap<NodeId, (NodeKind, usize)> = BTreeMap::new();
    let mut arcs: Vec<(usize, NodeId, NodeId)> = Vec::new();
    let mut inputs: Vec<(usize, NodeId)> = Vec::new();
    let mut outputs: Vec<(usize, NodeId)> = Vec::new();

    for (line, tokens) in tokenized_lines(text) {
        let args = &tokens[1..];
        match tokens[0] {
            "net" => {
                if name.is_some() {
                    return Err(syntax(line, "second `net` directive"));
                }
                if args.is_empty() {
                    return Err(syntax(line, "`net` needs a name"));
                }
                name = Some(args.join(" "));
            }
            "kind" => {
                if border.is_some() {
                    return Err(syntax(line, "second `kind` directive"));
                }
                border = Some(match args {
                    ["place"] => Border::Place,
                    ["transition"] => Border::Transition,
                    _ => return Err(syntax(line, "expected `kind place` or `kind transition`")),
                });
            }
            "place" | "trans" => {
                let [id] = args else {
                    return Err(syntax(line, format!("`{}` takes exactly one id", tokens[0])));
                };
                let kind = if tokens[0] == "place" { NodeKind::Place } else { NodeKind::Transition };
                let id = node_id(line, id)?;
                if let Some((_, first)) = declared.get(&id) {
                    return Err(TextError::Duplicate { line, node: id.to_string(), first: *first });
                }
                declared.insert(id, (kind, line));
            }
            "arc" => {
                let [a, b] = args else {
                    return Err(syntax(line, "`arc` takes exactly two ids"));
                };
                arcs.push((line, node_id(line, a)?, node_id(line, b)?));
            }
            "input" | "output" => {
                if args.is_empty() {
                    return Err(syntax(line, format!("`{}` needs at least one id", tokens[0])));
                }
                let target = if tokens[0] == "input" { &mut inputs } else { &mut outputs };
                for a in args {
                    target.push((line, node_id(line, a)?));
                }
            }
            other => return Err(syntax(line, format!("unknown directive `{other}`"))),
        }
    }

    let border = border.ok_or(TextError::MissingKind)?;
    let kind_of = |line: usize, n: &NodeId| {
        declared.get(n).map(|(k, _)| *k).ok_or_else(|| TextError::UnknownNode { line, node: n.to_string() })
    };
    for (line, a, b) in &arcs {
        if kind_of(*line, a)? == kind_of(*line, b)? {
            return Err(TextError::InvalidArc { line: *line, from: a.to_string(), to: b.to_string() });
        }
    }
    for (line, n) in inputs.iter().chain(&outputs) {
        kind_of(*line, n)?;
    }

    let pick = |k: NodeKind| -> BTreeSet<NodeId> {
        declared.iter().filter(|(_, (kind, _))| *kind == k).map(|(n, _)| n.clone()).collect()
    };
    let net = PetriNet::new(
        pick(NodeKind::Place),
        pick(NodeKind::Transition),
        arcs.into_iter().map(|(_, a, b)| (a, b)).collect::<BTreeSet<_>>(),
    )
    .expect("declarations and arcs were checked");
    let wf = WorkflowNet::new(
        net,
        inputs.into_iter().map(|(_, n)| n).collect(),
        outputs.into_iter().map(|(_, n)| n).collect(),
        border,
    )?;
    Ok(match name {
        Some(n) => wf.with_name(n),
        None => wf,
    })
}

fn join(set: &BTreeSet<NodeId>) -> String {
    set.iter().map(|n| n.as_str()).collect::<Vec<_>>().join(" ")
}

pub fn write_net_text(wf: &WorkflowNet) -> String {
    let net = wf.net();
    let mut out = String::new();
    writeln!(out, "net {}", wf.name()).unwrap();
    writeln!(out, "kind {}", wf.border().keyword()).unwrap();
    for p in net.places() {
        writeln!(out, "place {p}").unwrap();
    }
    for t in net.transitions() {
        writeln!(out, "trans {t}").unwrap();
    }
    for (a, b) in net.arcs() {
        writeln!(out, "arc {a} {b}").unwrap();
    }
    writeln!(out, "input {}", join(wf.inputs())).unwrap();
    writeln!(out, "output {}", join(wf.outputs())).unwrap();
    out
}
