//! Net transformations: place/transition completion, place/transition
//! substitution, and the two pair-removal reductions.
//!
//! Substitution needs the two nets to have disjoint node sets. The default
//! entry points ([`substitute_place`], [`substitute_transition`],
//! [`substitute`]) get that by prefixing every node of the inner net with
//! `"<replaced-node>/"`, which makes nested expansions carry hierarchical
//! names such as `a/b/x`. The `*_disjoint` variants take the inner net as is
//! and only verify disjointness.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::net::{NetError, NodeId, NodeKind, PetriNet};
use crate::workflow::{Border, WorkflowError, WorkflowNet};

/// A violated side condition of a pair removal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PairViolation {
    NotATransition(NodeId),
    NotAPlace(NodeId),
    /// The transition's postset (resp. the place's postset) is not exactly the
    /// partner node.
    PostsetNotSingleton {
        node: NodeId,
        found: BTreeSet<NodeId>,
    },
    /// The place's preset (resp. the transition's preset) is not exactly the
    /// partner node.
    PresetNotSingleton {
        node: NodeId,
        found: BTreeSet<NodeId>,
    },
    PlaceIsInput(NodeId),
    PlaceIsOutput(NodeId),
    /// An arc already links the surrounding preset and postset.
    ExistingEdge(NodeId, NodeId),
}

impl fmt::Display for PairViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |s: &BTreeSet<NodeId>| s.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(", ");
        match self {
            PairViolation::NotATransition(n) => write!(f, "{n} is not a transition"),
            PairViolation::NotAPlace(n) => write!(f, "{n} is not a place"),
            PairViolation::PostsetNotSingleton { node, found } => {
                write!(f, "postset of {node} is {{{}}}, expected the partner only", show(found))
            }
            PairViolation::PresetNotSingleton { node, found } => {
                write!(f, "preset of {node} is {{{}}}, expected the partner only", show(found))
            }
            PairViolation::PlaceIsInput(n) => write!(f, "{n} is an input place"),
            PairViolation::PlaceIsOutput(n) => write!(f, "{n} is an output place"),
            PairViolation::ExistingEdge(a, b) => write!(f, "edge {a} -> {b} already exists"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RefineError {
    #[error("operation needs a {expected} net, got a {found} net")]
    WrongBorder { expected: Border, found: Border },
    #[error("{0} is not a place of the outer net")]
    NotAPlace(NodeId),
    #[error("{0} is not a transition of the outer net")]
    NotATransition(NodeId),
    #[error("{0} is not a node of the outer net")]
    UnknownNode(NodeId),
    #[error("nets are not disjoint; shared nodes: {}", .0.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(", "))]
    NotDisjoint(Vec<NodeId>),
    #[error("pair removal preconditions violated: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    PairPrecondition(Vec<PairViolation>),
    #[error("mapping is not total: {0} has no image")]
    MappingNotTotal(NodeId),
    #[error("mapping is not injective: two nodes map to {0}")]
    MappingNotInjective(NodeId),
    #[error(transparent)]
    Net(#[from] NetError),
    #[error(transparent)]
    Workflow(#[from] WorkflowError),
}

/// A prefix prepended to every node id of a net.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RenamePrefix(String);

impl RenamePrefix {
    pub fn new(prefix: impl Into<String>) -> Self {
        RenamePrefix(prefix.into())
    }

    /// The prefix used when `node` is replaced by a net.
    pub fn for_node(node: &NodeId) -> Self {
        RenamePrefix(format!("{node}/"))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

fn map_set(set: &BTreeSet<NodeId>, f: impl Fn(&NodeId) -> NodeId) -> BTreeSet<NodeId> {
    set.iter().map(f).collect()
}

fn rebuild(
    name: &str,
    places: BTreeSet<NodeId>,
    transitions: BTreeSet<NodeId>,
    arcs: BTreeSet<(NodeId, NodeId)>,
    inputs: BTreeSet<NodeId>,
    outputs: BTreeSet<NodeId>,
    border: Border,
) -> Result<WorkflowNet, RefineError> {
    let net = PetriNet::new(places, transitions, arcs)?;
    Ok(WorkflowNet::new(net, inputs, outputs, border)?.with_name(name))
}

/// Prepends `prefix` to every node of `wf`.
pub fn rename(wf: &WorkflowNet, prefix: &RenamePrefix) -> WorkflowNet {
    let f = |n: &NodeId| n.prefixed(prefix.as_str());
    let net = wf.net();
    rebuild(
        wf.name(),
        map_set(net.places(), f),
        map_set(net.transitions(), f),
        net.arcs().iter().map(|(a, b)| (f(a), f(b))).collect(),
        map_set(wf.inputs(), f),
        map_set(wf.outputs(), f),
        wf.border(),
    )
    .expect("renaming preserves validity")
}

/// Smallest run of underscores that keeps both `<prefix><a>` and `<prefix><b>`
/// fresh in `net`.
fn fresh_pair(net: &PetriNet, a: &str, b: &str) -> (NodeId, NodeId) {
    let mut prefix = String::new();
    loop {
        let x = NodeId::new(format!("{prefix}{a}")).expect("valid id");
        let y = NodeId::new(format!("{prefix}{b}")).expect("valid id");
        if !net.contains(&x) && !net.contains(&y) {
            return (x, y);
        }
        prefix.push('_');
    }
}

/// `pc(N)`: adds places `p_i`, `p_o` with `p_i• = I` and `•p_o = O` and makes
/// them the sole input and output.
pub fn place_completion(wf: &WorkflowNet) -> Result<WorkflowNet, RefineError> {
    complete(wf, Border::Transition)
}

/// `tc(N)`: adds transitions `t_i`, `t_o` with `t_i• = I` and `•t_o = O` and
/// makes them the sole input and output.
pub fn transition_completion(wf: &WorkflowNet) -> Result<WorkflowNet, RefineError> {
    complete(wf, Border::Place)
}

fn complete(wf: &WorkflowNet, expected: Border) -> Result<WorkflowNet, RefineError> {
    if wf.border() != expected {
        return Err(RefineError::WrongBorder { expected, found: wf.border() });
    }
    let net = wf.net();
    let (mut places, mut transitions) = (net.places().clone(), net.transitions().clone());
    let mut arcs = net.arcs().clone();
    let (new_in, new_out, border) = match expected {
        Border::Transition => {
            let (pi, po) = fresh_pair(net, "p_i", "p_o");
            places.insert(pi.clone());
            places.insert(po.clone());
            (pi, po, Border::Place)
        }
        Border::Place => {
            let (ti, to) = fresh_pair(net, "t_i", "t_o");
            transitions.insert(ti.clone());
            transitions.insert(to.clone());
            (ti, to, Border::Transition)
        }
    };
    arcs.extend(wf.inputs().iter().map(|i| (new_in.clone(), i.clone())));
    arcs.extend(wf.outputs().iter().map(|o| (o.clone(), new_out.clone())));
    rebuild(wf.name(), places, transitions, arcs, BTreeSet::from([new_in]), BTreeSet::from([new_out]), border)
}

/// `N ⊗_p M` with the inner net renamed under `"p/"`.
pub fn substitute_place(outer: &WorkflowNet, place: &NodeId, inner: &WorkflowNet) -> Result<WorkflowNet, RefineError> {
    let renamed = rename(inner, &RenamePrefix::for_node(place));
    substitute_place_disjoint(outer, place, &renamed)
}

/// `N ⊗_t M` with the inner net renamed under `"t/"`.
pub fn substitute_transition(
    outer: &WorkflowNet,
    transition: &NodeId,
    inner: &WorkflowNet,
) -> Result<WorkflowNet, RefineError> {
    let renamed = rename(inner, &RenamePrefix::for_node(transition));
    substitute_transition_disjoint(outer, transition, &renamed)
}

/// Substitutes `node` by `inner`, dispatching on the kind of `node`.
pub fn substitute(outer: &WorkflowNet, node: &NodeId, inner: &WorkflowNet) -> Result<WorkflowNet, RefineError> {
    match outer.net().kind_of(node) {
        Some(NodeKind::Place) => substitute_place(outer, node, inner),
        Some(NodeKind::Transition) => substitute_transition(outer, node, inner),
        None => Err(RefineError::UnknownNode(node.clone())),
    }
}

pub fn substitute_place_disjoint(
    outer: &WorkflowNet,
    place: &NodeId,
    inner: &WorkflowNet,
) -> Result<WorkflowNet, RefineError> {
    if !outer.net().is_place(place) {
        return Err(RefineError::NotAPlace(place.clone()));
    }
    splice(outer, place, inner, Border::Place)
}

pub fn substitute_transition_disjoint(
    outer: &WorkflowNet,
    transition: &NodeId,
    inner: &WorkflowNet,
) -> Result<WorkflowNet, RefineError> {
    if !outer.net().is_transition(transition) {
        return Err(RefineError::NotATransition(transition.clone()));
    }
    splice(outer, transition, inner, Border::Transition)
}

/// Removes `node` and its arcs, inserts `inner`, and wires every input of
/// `inner` like `•node` and every output like `node•`.
fn splice(
    outer: &WorkflowNet,
    node: &NodeId,
    inner: &WorkflowNet,
    expected: Border,
) -> Result<WorkflowNet, RefineError> {
    if inner.border() != expected {
        return Err(RefineError::WrongBorder { expected, found: inner.border() });
    }
    let (n, m) = (outer.net(), inner.net());
    let shared: Vec<NodeId> = m.nodes().filter(|x| n.contains(x)).cloned().collect();
    if !shared.is_empty() {
        return Err(RefineError::NotDisjoint(shared));
    }

    let mut places: BTreeSet<NodeId> = n.places().iter().chain(m.places()).cloned().collect();
    let mut transitions: BTreeSet<NodeId> = n.transitions().iter().chain(m.transitions()).cloned().collect();
    places.remove(node);
    transitions.remove(node);

    let mut arcs: BTreeSet<(NodeId, NodeId)> =
        n.arcs().iter().filter(|(a, b)| a != node && b != node).chain(m.arcs()).cloned().collect();
    for x in n.preset(node)? {
        for i in inner.inputs() {
            arcs.insert((x.clone(), i.clone()));
        }
    }
    for y in n.postset(node)? {
        for o in inner.outputs() {
            arcs.insert((o.clone(), y.clone()));
        }
    }

    let replace = |border: &BTreeSet<NodeId>, with: &BTreeSet<NodeId>| {
        if border.contains(node) {
            border.iter().filter(|x| *x != node).chain(with).cloned().collect()
        } else {
            border.clone()
        }
    };
    let inputs = replace(outer.inputs(), inner.inputs());
    let outputs = replace(outer.outputs(), inner.outputs());
    rebuild(outer.name(), places, transitions, arcs, inputs, outputs, outer.border())
}

fn pair_removal_border(wf: &WorkflowNet) -> Result<(), RefineError> {
    if wf.border() != Border::Place {
        return Err(RefineError::WrongBorder { expected: Border::Place, found: wf.border() });
    }
    Ok(())
}

/// Removes a transition `t*` with `t*• = {p*}` and a place `p*` with
/// `•p* = {t*}`, adding every arc in `•t* × p*•`.
pub fn remove_transition_place_pair(
    wf: &WorkflowNet,
    transition: &NodeId,
    place: &NodeId,
) -> Result<WorkflowNet, RefineError> {
    pair_removal_border(wf)?;
    let net = wf.net();
    let mut violations = Vec::new();
    if !net.is_transition(transition) {
        violations.push(PairViolation::NotATransition(transition.clone()));
    }
    if !net.is_place(place) {
        violations.push(PairViolation::NotAPlace(place.clone()));
    }
    if !violations.is_empty() {
        return Err(RefineError::PairPrecondition(violations));
    }
    let before = net.preset(transition)?;
    let after = net.postset(place)?;
    pair_conditions(wf, transition, place, before, after, &mut violations);
    finish_pair_removal(wf, transition, place, before, after, violations)
}

/// Removes a place `p*` with `p*• = {t*}` and a transition `t*` with
/// `•t* = {p*}`, adding every arc in `•p* × t*•`.
pub fn remove_place_transition_pair(
    wf: &WorkflowNet,
    place: &NodeId,
    transition: &NodeId,
) -> Result<WorkflowNet, RefineError> {
    pair_removal_border(wf)?;
    let net = wf.net();
    let mut violations = Vec::new();
    if !net.is_place(place) {
        violations.push(PairViolation::NotAPlace(place.clone()));
    }
    if !net.is_transition(transition) {
        violations.push(PairViolation::NotATransition(transition.clone()));
    }
    if !violations.is_empty() {
        return Err(RefineError::PairPrecondition(violations));
    }
    let before = net.preset(place)?;
    let after = net.postset(transition)?;
    pair_conditions(wf, place, transition, before, after, &mut violations);
    finish_pair_removal(wf, place, transition, before, after, violations)
}

/// Shared side conditions for a chain `before -> first -> second -> after`.
fn pair_conditions(
    wf: &WorkflowNet,
    first: &NodeId,
    second: &NodeId,
    before: &BTreeSet<NodeId>,
    after: &BTreeSet<NodeId>,
    violations: &mut Vec<PairViolation>,
) {
    let net = wf.net();
    let post = net.postset(first).expect("checked node");
    if post.len() != 1 || !post.contains(second) {
        violations.push(PairViolation::PostsetNotSingleton { node: first.clone(), found: post.clone() });
    }
    let pre = net.preset(second).expect("checked node");
    if pre.len() != 1 || !pre.contains(first) {
        violations.push(PairViolation::PresetNotSingleton { node: second.clone(), found: pre.clone() });
    }
    let place = if net.is_place(first) { first } else { second };
    if wf.inputs().contains(place) {
        violations.push(PairViolation::PlaceIsInput(place.clone()));
    }
    if wf.outputs().contains(place) {
        violations.push(PairViolation::PlaceIsOutput(place.clone()));
    }
    for x in before {
        for y in after {
            for (a, b) in [(x, y), (y, x)] {
                if net.arcs().contains(&(a.clone(), b.clone())) {
                    violations.push(PairViolation::ExistingEdge(a.clone(), b.clone()));
                }
            }
        }
    }
}

fn finish_pair_removal(
    wf: &WorkflowNet,
    first: &NodeId,
    second: &NodeId,
    before: &BTreeSet<NodeId>,
    after: &BTreeSet<NodeId>,
    violations: Vec<PairViolation>,
) -> Result<WorkflowNet, RefineError> {
    if !violations.is_empty() {
        return Err(RefineError::PairPrecondition(violations));
    }
    let net = wf.net();
    let gone = |n: &NodeId| n == first || n == second;
    let places = net.places().iter().filter(|n| !gone(n)).cloned().collect();
    let transitions = net.transitions().iter().filter(|n| !gone(n)).cloned().collect();
    let mut arcs: BTreeSet<(NodeId, NodeId)> =
        net.arcs().iter().filter(|(a, b)| !gone(a) && !gone(b)).cloned().collect();
    for x in before {
        for y in after {
            arcs.insert((x.clone(), y.clone()));
        }
    }
    rebuild(wf.name(), places, transitions, arcs, wf.inputs().clone(), wf.outputs().clone(), wf.border())
}

/// A transition-place or place-transition pair named for removal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Pair {
    /// `t*` followed by `p*`.
    TransitionPlace(NodeId, NodeId),
    /// `p*` followed by `t*`.
    PlaceTransition(NodeId, NodeId),
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pair::TransitionPlace(t, p) => write!(f, "--tp {t},{p}"),
            Pair::PlaceTransition(p, t) => write!(f, "--pt {p},{t}"),
        }
    }
}

pub fn remove_pair(wf: &WorkflowNet, pair: &Pair) -> Result<WorkflowNet, RefineError> {
    match pair {
        Pair::TransitionPlace(t, p) => remove_transition_place_pair(wf, t, p),
        Pair::PlaceTransition(p, t) => remove_place_transition_pair(wf, p, t),
    }
}

/// Every pair of `wf` whose removal preconditions hold and whose removal
/// leaves a workflow net, in sorted order.
pub fn eligible_pairs(wf: &WorkflowNet) -> Vec<Pair> {
    if wf.border() != Border::Place {
        return Vec::new();
    }
    let net = wf.net();
    let mut out = Vec::new();
    for t in net.transitions() {
        if let [p] = net.postset(t).expect("node").iter().collect::<Vec<_>>()[..] {
            out.push(Pair::TransitionPlace(t.clone(), p.clone()));
        }
    }
    for p in net.places() {
        if let [t] = net.postset(p).expect("node").iter().collect::<Vec<_>>()[..] {
            out.push(Pair::PlaceTransition(p.clone(), t.clone()));
        }
    }
    out.retain(|pair| remove_pair(wf, pair).is_ok());
    out.sort();
    out
}

/// The identity mapping on all nodes of `wf`.
pub fn identity_mapping(wf: &WorkflowNet) -> BTreeMap<NodeId, NodeId> {
    wf.net().nodes().map(|n| (n.clone(), n.clone())).collect()
}

/// True iff `mapping` carries places to places, transitions to transitions,
/// arcs to arcs, inputs to inputs and outputs to outputs, bijectively.
///
/// The mapping must be total on `a`'s nodes and injective; otherwise an error
/// is returned rather than `false`.
pub fn structurally_equal(
    a: &WorkflowNet,
    b: &WorkflowNet,
    mapping: &BTreeMap<NodeId, NodeId>,
) -> Result<bool, RefineError> {
    let mut images = BTreeSet::new();
    for n in a.net().nodes() {
        let image = mapping.get(n).ok_or_else(|| RefineError::MappingNotTotal(n.clone()))?;
        if !images.insert(image.clone()) {
            return Err(RefineError::MappingNotInjective(image.clone()));
        }
    }
    let f = |n: &NodeId| mapping[n].clone();
    let (na, nb) = (a.net(), b.net());
    Ok(a.border() == b.border()
        && map_set(na.places(), f) == *nb.places()
        && map_set(na.transitions(), f) == *nb.transitions()
        && na.arcs().iter().map(|(x, y)| (f(x), f(y))).collect::<BTreeSet<_>>() == *nb.arcs()
        && map_set(a.inputs(), f) == *b.inputs()
        && map_set(a.outputs(), f) == *b.outputs())
}
