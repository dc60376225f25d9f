//! Generalized workflow nets: a Petri net with nonempty input and output
//! border sets whose members are all places (pWF) or all transitions (tWF).
//!
//! Border nodes may have incoming and outgoing arcs. The only structural
//! requirement besides the border kind is that every node lies on a path from
//! some input and to some output.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::net::{NodeId, NodeKind, PetriNet};

/// Which kind of node forms the border of a workflow net.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Border {
    /// pWF: inputs and outputs are places.
    Place,
    /// tWF: inputs and outputs are transitions.
    Transition,
}

impl Border {
    pub fn node_kind(self) -> NodeKind {
        match self {
            Border::Place => NodeKind::Place,
            Border::Transition => NodeKind::Transition,
        }
    }

    pub fn keyword(self) -> &'static str {
        match self {
            Border::Place => "place",
            Border::Transition => "transition",
        }
    }
}

impl fmt::Display for Border {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Border::Place => "pWF",
            Border::Transition => "tWF",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Input,
    Output,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Input => "input",
            Side::Output => "output",
        })
    }
}

/// One reason a net fails to be a workflow net.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    EmptyBorder(Side),
    UnknownBorderNode { side: Side, node: NodeId },
    WrongBorderKind { side: Side, node: NodeId, expected: Border },
    UnreachableFromInputs(NodeId),
    CannotReachOutputs(NodeId),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyBorder(side) => write!(f, "{side} set is empty"),
            Violation::UnknownBorderNode { side, node } => {
                write!(f, "{side} node {node} is not in the net")
            }
            Violation::WrongBorderKind { side, node, expected } => {
                let want = match expected {
                    Border::Place => "place",
                    Border::Transition => "transition",
                };
                write!(f, "{side} node {node} is not a {want} ({expected} net)")
            }
            Violation::UnreachableFromInputs(n) => write!(f, "node {n} is unreachable from I"),
            Violation::CannotReachOutputs(n) => write!(f, "node {n} cannot reach O"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("not a workflow net: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
pub struct WorkflowError(pub Vec<Violation>);

/// A validated workflow net `(P, T, F, I, O)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorkflowNet {
    name: String,
    net: PetriNet,
    inputs: BTreeSet<NodeId>,
    outputs: BTreeSet<NodeId>,
    border: Border,
}

impl WorkflowNet {
    /// Checks every workflow-net condition and reports all violations at once.
    pub fn new(
        net: PetriNet,
        inputs: BTreeSet<NodeId>,
        outputs: BTreeSet<NodeId>,
        border: Border,
    ) -> Result<Self, WorkflowError> {
        let violations = violations(&net, &inputs, &outputs, border);
        if !violations.is_empty() {
            return Err(WorkflowError(violations));
        }
        Ok(WorkflowNet { name: "net".to_string(), net, inputs, outputs, border })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn net(&self) -> &PetriNet {
        &self.net
    }

    pub fn inputs(&self) -> &BTreeSet<NodeId> {
        &self.inputs
    }

    pub fn outputs(&self) -> &BTreeSet<NodeId> {
        &self.outputs
    }

    pub fn border(&self) -> Border {
        self.border
    }

    pub fn is_place_bordered(&self) -> bool {
        self.border == Border::Place
    }

    pub fn is_one_input(&self) -> bool {
        self.inputs.len() == 1
    }

    pub fn is_one_output(&self) -> bool {
        self.outputs.len() == 1
    }

    pub fn into_parts(self) -> (PetriNet, BTreeSet<NodeId>, BTreeSet<NodeId>, Border) {
        (self.net, self.inputs, self.outputs, self.border)
    }
}

/// Validates `net` with the given borders as a workflow net.
pub fn validate_wf(
    net: PetriNet,
    inputs: BTreeSet<NodeId>,
    outputs: BTreeSet<NodeId>,
    border: Border,
) -> Result<WorkflowNet, WorkflowError> {
    WorkflowNet::new(net, inputs, outputs, border)
}

fn violations(net: &PetriNet, inputs: &BTreeSet<NodeId>, outputs: &BTreeSet<NodeId>, border: Border) -> Vec<Violation> {
    let mut out = Vec::new();
    for (side, set) in [(Side::Input, inputs), (Side::Output, outputs)] {
        if set.is_empty() {
            out.push(Violation::EmptyBorder(side));
        }
        for node in set {
            match net.kind_of(node) {
                None => out.push(Violation::UnknownBorderNode { side, node: node.clone() }),
                Some(kind) if kind != border.node_kind() => {
                    out.push(Violation::WrongBorderKind { side, node: node.clone(), expected: border })
                }
                Some(_) => {}
            }
        }
    }

    let forward = closure(net, inputs, true);
    let backward = closure(net, outputs, false);
    for node in net.nodes() {
        if !forward.contains(node) {
            out.push(Violation::UnreachableFromInputs(node.clone()));
        }
    }
    for node in net.nodes() {
        if !backward.contains(node) {
            out.push(Violation::CannotReachOutputs(node.clone()));
        }
    }
    out
}

/// Nodes reachable from `start` (forward) or reaching `start` (backward).
fn closure(net: &PetriNet, start: &BTreeSet<NodeId>, forward: bool) -> BTreeSet<NodeId> {
    let mut seen: BTreeSet<NodeId> = start.iter().filter(|n| net.contains(n)).cloned().collect();
    let mut queue: VecDeque<NodeId> = seen.iter().cloned().collect();
    while let Some(n) = queue.pop_front() {
        let next = if forward { net.postset(&n) } else { net.preset(&n) };
        for m in next.expect("node of net") {
            if seen.insert(m.clone()) {
                queue.push_back(m.clone());
            }
        }
    }
    seen
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::{id, NetBuilder};

    fn set(ids: &[&str]) -> BTreeSet<NodeId> {
        ids.iter().map(|s| id(s)).collect()
    }

    #[test]
    fn single_place_is_a_workflow_net() {
        let net = NetBuilder::new().place("p").build().unwrap();
        let wf = validate_wf(net, set(&["p"]), set(&["p"]), Border::Place).unwrap();
        assert!(wf.is_one_input() && wf.is_one_output());
    }

    #[test]
    fn isolated_place_is_reported() {
        let net =
            NetBuilder::new().places(&["i", "o", "lost"]).transition("t").fires("t", &["i"], &["o"]).build().unwrap();
        let err = validate_wf(net, set(&["i"]), set(&["o"]), Border::Place).unwrap_err();
        assert!(err.0.contains(&Violation::UnreachableFromInputs(id("lost"))));
        assert!(err.0.contains(&Violation::CannotReachOutputs(id("lost"))));
        assert_eq!(err.0.len(), 2);
    }

    #[test]
    fn wrong_border_kind_and_empty_sets() {
        let net = NetBuilder::new().places(&["i", "o"]).transition("t").fires("t", &["i"], &["o"]).build().unwrap();
        let err = validate_wf(net.clone(), set(&["t"]), set(&["o"]), Border::Place).unwrap_err();
        assert!(err.0.contains(&Violation::WrongBorderKind {
            side: Side::Input,
            node: id("t"),
            expected: Border::Place
        }));
        let err = validate_wf(net, BTreeSet::new(), set(&["zz"]), Border::Place).unwrap_err();
        assert!(err.0.contains(&Violation::EmptyBorder(Side::Input)));
        assert!(err.0.contains(&Violation::UnknownBorderNode { side: Side::Output, node: id("zz") }));
    }

    #[test]
    fn transition_bordered_chain() {
        let net = NetBuilder::new().place("p").transitions(&["t", "u"]).arc("t", "p").arc("p", "u").build().unwrap();
        let wf = validate_wf(net, set(&["t"]), set(&["u"]), Border::Transition).unwrap();
        assert_eq!(wf.border(), Border::Transition);
    }
}
