//! Graphviz output: places as circles labelled with their token count,
//! transitions as boxes, and a dangling arrow into every input node and out of
//! every output node.

use std::fmt::Write as _;

use thiserror::Error;

use crate::marking::Marking;
use crate::net::NodeId;
use crate::workflow::WorkflowNet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DotError {
    #[error("marking mentions {0}, which is not a place of the net")]
    UnknownPlace(NodeId),
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

pub fn write_dot(wf: &WorkflowNet, marking: Option<&Marking>) -> Result<String, DotError> {
    let net = wf.net();
    let empty = Marking::empty();
    let marking = marking.unwrap_or(&empty);
    if let Some(p) = marking.support().find(|p| !net.is_place(p)) {
        return Err(DotError::UnknownPlace(p.clone()));
    }

    let mut out = String::new();
    writeln!(out, "digraph {} {{", quote(wf.name())).unwrap();
    out.push_str("    rankdir=LR;\n");
    for p in net.places() {
        let tokens = marking.get(p);
        let label = if tokens == 0 { String::new() } else { tokens.to_string() };
        writeln!(
            out,
            "    {} [shape=circle, label={}, xlabel={}];",
            quote(p.as_str()),
            quote(&label),
            quote(p.as_str())
        )
        .unwrap();
    }
    for t in net.transitions() {
        writeln!(out, "    {} [shape=box, label={}];", quote(t.as_str()), quote(t.as_str())).unwrap();
    }
    for (a, b) in net.arcs() {
        writeln!(out, "    {} -> {};", quote(a.as_str()), quote(b.as_str())).unwrap();
    }
    for (i, n) in wf.inputs().iter().enumerate() {
        let stub = quote(&format!("__in{i}"));
        writeln!(out, "    {stub} [shape=point, style=invis];").unwrap();
        writeln!(out, "    {stub} -> {} [style=bold];", quote(n.as_str())).unwrap();
    }
    for (i, n) in wf.outputs().iter().enumerate() {
        let stub = quote(&format!("__out{i}"));
        writeln!(out, "    {stub} [shape=point, style=invis];").unwrap();
        writeln!(out, "    {} -> {stub} [style=bold];", quote(n.as_str())).unwrap();
    }
    out.push_str("}\n");
    Ok(out)
}
