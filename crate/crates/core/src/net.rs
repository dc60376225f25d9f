//! Place/transition nets with unit arc weights and the firing rule.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::marking::Marking;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetError {
    #[error("invalid node id {0:?}: ids are nonempty and contain no whitespace, '#', ',', '{{' or '}}'")]
    InvalidId(String),
    #[error("node {0} is declared twice")]
    DuplicateNode(NodeId),
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("arc {0} -> {1} does not connect a place and a transition")]
    InvalidArc(NodeId, NodeId),
    #[error("{0} is not a transition")]
    NotATransition(NodeId),
    #[error("{0} is not a place")]
    NotAPlace(NodeId),
    #[error("transition {transition} is not enabled in {marking}")]
    NotEnabled { marking: Marking, transition: NodeId },
}

/// Identifier of a place or a transition. Places and transitions of one net
/// share a single namespace.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(String);

impl NodeId {
    pub fn new(id: impl Into<String>) -> Result<Self, NetError> {
        let id = id.into();
        let bad = |c: char| c.is_whitespace() || matches!(c, '#' | ',' | '{' | '}');
        if id.is_empty() || id.chars().any(bad) {
            return Err(NetError::InvalidId(id));
        }
        Ok(NodeId(id))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// `prefix` followed by this id.
    pub fn prefixed(&self, prefix: &str) -> NodeId {
        NodeId(format!("{prefix}{}", self.0))
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for NodeId {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Place,
    Transition,
}

/// A Petri net `(P, T, F)`. Arcs form a set, so every arc has weight one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PetriNet {
    places: BTreeSet<NodeId>,
    transitions: BTreeSet<NodeId>,
    arcs: BTreeSet<(NodeId, NodeId)>,
    pre: BTreeMap<NodeId, BTreeSet<NodeId>>,
    post: BTreeMap<NodeId, BTreeSet<NodeId>>,
}

impl PetriNet {
    pub fn new(
        places: impl IntoIterator<Item = NodeId>,
        transitions: impl IntoIterator<Item = NodeId>,
        arcs: impl IntoIterator<Item = (NodeId, NodeId)>,
    ) -> Result<Self, NetError> {
        let mut all = BTreeSet::new();
        let mut place_set = BTreeSet::new();
        for p in places {
            if !all.insert(p.clone()) {
                return Err(NetError::DuplicateNode(p));
            }
            place_set.insert(p);
        }
        let mut transition_set = BTreeSet::new();
        for t in transitions {
            if !all.insert(t.clone()) {
                return Err(NetError::DuplicateNode(t));
            }
            transition_set.insert(t);
        }

        let mut pre: BTreeMap<NodeId, BTreeSet<NodeId>> = all.iter().map(|n| (n.clone(), BTreeSet::new())).collect();
        let mut post = pre.clone();
        let mut arc_set = BTreeSet::new();
        for (from, to) in arcs {
            for end in [&from, &to] {
                if !all.contains(end) {
                    return Err(NetError::UnknownNode(end.clone()));
                }
            }
            let p_to_t = place_set.contains(&from) && transition_set.contains(&to);
            let t_to_p = transition_set.contains(&from) && place_set.contains(&to);
            if !(p_to_t || t_to_p) {
                return Err(NetError::InvalidArc(from, to));
            }
            post.get_mut(&from).expect("known node").insert(to.clone());
            pre.get_mut(&to).expect("known node").insert(from.clone());
            arc_set.insert((from, to));
        }

        Ok(PetriNet { places: place_set, transitions: transition_set, arcs: arc_set, pre, post })
    }

    pub fn places(&self) -> &BTreeSet<NodeId> {
        &self.places
    }

    pub fn transitions(&self) -> &BTreeSet<NodeId> {
        &self.transitions
    }

    pub fn arcs(&self) -> &BTreeSet<(NodeId, NodeId)> {
        &self.arcs
    }

    /// All nodes in sorted order.
    pub fn nodes(&self) -> impl Iterator<Item = &NodeId> {
        self.pre.keys()
    }

    pub fn node_count(&self) -> usize {
        self.places.len() + self.transitions.len()
    }

    pub fn contains(&self, node: &NodeId) -> bool {
        self.pre.contains_key(node)
    }

    pub fn kind_of(&self, node: &NodeId) -> Option<NodeKind> {
        if self.places.contains(node) {
            Some(NodeKind::Place)
        } else if self.transitions.contains(node) {
            Some(NodeKind::Transition)
        } else {
            None
        }
    }

    pub fn is_place(&self, node: &NodeId) -> bool {
        self.places.contains(node)
    }

    pub fn is_transition(&self, node: &NodeId) -> bool {
        self.transitions.contains(node)
    }

    /// `•x`
    pub fn preset(&self, node: &NodeId) -> Result<&BTreeSet<NodeId>, NetError> {
        self.pre.get(node).ok_or_else(|| NetError::UnknownNode(node.clone()))
    }

    /// `x•`
    pub fn postset(&self, node: &NodeId) -> Result<&BTreeSet<NodeId>, NetError> {
        self.post.get(node).ok_or_else(|| NetError::UnknownNode(node.clone()))
    }

    /// Union of the presets of `nodes`.
    pub fn preset_of_set<'a>(&self, nodes: impl IntoIterator<Item = &'a NodeId>) -> Result<BTreeSet<NodeId>, NetError> {
        let mut out = BTreeSet::new();
        for n in nodes {
            out.extend(self.preset(n)?.iter().cloned());
        }
        Ok(out)
    }

    /// Union of the postsets of `nodes`.
    pub fn postset_of_set<'a>(
        &self,
        nodes: impl IntoIterator<Item = &'a NodeId>,
    ) -> Result<BTreeSet<NodeId>, NetError> {
        let mut out = BTreeSet::new();
        for n in nodes {
            out.extend(self.postset(n)?.iter().cloned());
        }
        Ok(out)
    }

    fn transition_sets(&self, t: &NodeId) -> Result<(&BTreeSet<NodeId>, &BTreeSet<NodeId>), NetError> {
        if !self.transitions.contains(t) {
            return Err(NetError::NotATransition(t.clone()));
        }
        Ok((&self.pre[t], &self.post[t]))
    }

    /// `•t <= m`, with the preset read as a bag of multiplicity one.
    pub fn enabled(&self, m: &Marking, t: &NodeId) -> Result<bool, NetError> {
        let (pre, _) = self.transition_sets(t)?;
        Ok(pre.iter().all(|p| m.get(p) >= 1))
    }

    /// All transitions enabled in `m`, sorted by id.
    pub fn enabled_transitions<'a>(&'a self, m: &'a Marking) -> impl Iterator<Item = &'a NodeId> + 'a {
        self.transitions.iter().filter(move |t| self.pre[*t].iter().all(|p| m.get(p) >= 1))
    }

    /// `m - •t + t•`
    pub fn fire(&self, m: &Marking, t: &NodeId) -> Result<Marking, NetError> {
        if !self.enabled(m, t)? {
            return Err(NetError::NotEnabled { marking: m.clone(), transition: t.clone() });
        }
        let (pre, post) = self.transition_sets(t)?;
        let mut out = m.clone();
        for p in pre {
            out.set(p.clone(), out.get(p) - 1);
        }
        for p in post {
            out.add_tokens(p, 1);
        }
        Ok(out)
    }

    pub fn fire_sequence<'a>(
        &self,
        m: &Marking,
        sequence: impl IntoIterator<Item = &'a NodeId>,
    ) -> Result<Marking, NetError> {
        sequence.into_iter().try_fold(m.clone(), |acc, t| self.fire(&acc, t))
    }

    /// Returns a cycle as a node sequence (first node repeated at the end) if the
    /// flow relation has one.
    pub fn find_cycle(&self) -> Option<Vec<NodeId>> {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            White,
            Grey,
            Black,
        }
        let mut mark: BTreeMap<&NodeId, Mark> = self.pre.keys().map(|n| (n, Mark::White)).collect();
        let mut stack_path: Vec<&NodeId> = Vec::new();
        for root in self.pre.keys() {
            if mark[root] != Mark::White {
                continue;
            }
            // iterative DFS: (node, successor iterator)
            let mut stack: Vec<(&NodeId, std::collections::btree_set::Iter<'_, NodeId>)> =
                vec![(root, self.post[root].iter())];
            mark.insert(root, Mark::Grey);
            stack_path.push(root);
            while let Some((_, succ)) = stack.last_mut() {
                match succ.next() {
                    Some(next) => match mark[next] {
                        Mark::White => {
                            mark.insert(next, Mark::Grey);
                            stack_path.push(next);
                            stack.push((next, self.post[next].iter()));
                        }
                        Mark::Grey => {
                            let start = stack_path.iter().position(|n| *n == next).expect("on path");
                            let mut cycle: Vec<NodeId> = stack_path[start..].iter().map(|n| (*n).clone()).collect();
                            cycle.push(next.clone());
                            return Some(cycle);
                        }
                        Mark::Black => {}
                    },
                    None => {
                        let (done, _) = stack.pop().expect("nonempty");
                        mark.insert(done, Mark::Black);
                        stack_path.pop();
                    }
                }
            }
        }
        None
    }
}

/// Incremental construction of a [`PetriNet`] from string ids.
#[derive(Debug, Default, Clone)]
pub struct NetBuilder {
    places: Vec<String>,
    transitions: Vec<String>,
    arcs: Vec<(String, String)>,
}

impl NetBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn place(mut self, id: &str) -> Self {
        self.places.push(id.to_string());
        self
    }

    pub fn places(mut self, ids: &[&str]) -> Self {
        self.places.extend(ids.iter().map(|s| s.to_string()));
        self
    }

    pub fn transition(mut self, id: &str) -> Self {
        self.transitions.push(id.to_string());
        self
    }

    pub fn transitions(mut self, ids: &[&str]) -> Self {
        self.transitions.extend(ids.iter().map(|s| s.to_string()));
        self
    }

    pub fn arc(mut self, from: &str, to: &str) -> Self {
        self.arcs.push((from.to_string(), to.to_string()));
        self
    }

    /// Arcs `pre -> t` for every `pre` and `t -> post` for every `post`.
    pub fn fires(mut self, t: &str, pre: &[&str], post: &[&str]) -> Self {
        for p in pre {
            self.arcs.push((p.to_string(), t.to_string()));
        }
        for p in post {
            self.arcs.push((t.to_string(), p.to_string()));
        }
        self
    }

    pub fn build(self) -> Result<PetriNet, NetError> {
        let places = self.places.into_iter().map(NodeId::new).collect::<Result<Vec<_>, _>>()?;
        let transitions = self.transitions.into_iter().map(NodeId::new).collect::<Result<Vec<_>, _>>()?;
        let arcs = self
            .arcs
            .into_iter()
            .map(|(a, b)| Ok((NodeId::new(a)?, NodeId::new(b)?)))
            .collect::<Result<Vec<_>, NetError>>()?;
        PetriNet::new(places, transitions, arcs)
    }
}

/// Shorthand for building ids in tests and fixtures. Panics on invalid ids.
pub fn id(s: &str) -> NodeId {
    NodeId::new(s).expect("valid node id")
}
