//! Breadth-first reachability over markings.
//!
//! Internally markings are dense count vectors indexed by place position; the
//! public [`ReachabilityGraph`] converts them back to [`Marking`]s. Transitions
//! are always tried in sorted id order, so graphs and traces are reproducible.

use std::collections::{HashMap, VecDeque};

use crate::marking::Marking;
use crate::net::{NodeId, PetriNet};

/// Default bound on the number of states a single exploration may visit.
pub const DEFAULT_CAP: usize = 100_000;

pub(crate) type Dense = Box<[u32]>;

#[derive(Debug)]
pub(crate) struct CompiledTransition {
    pub id: NodeId,
    pub pre: Vec<usize>,
    pub post: Vec<usize>,
}

/// A net lowered to index form for fast firing.
#[derive(Debug)]
pub(crate) struct Compiled {
    pub places: Vec<NodeId>,
    index: HashMap<NodeId, usize>,
    pub transitions: Vec<CompiledTransition>,
}

impl Compiled {
    /// Lowers `net`. Places mentioned only in `extra` markings become inert
    /// columns that no transition touches.
    pub fn new<'a>(net: &PetriNet, extra: impl IntoIterator<Item = &'a Marking>) -> Self {
        let mut places: Vec<NodeId> = net.places().iter().cloned().collect();
        for m in extra {
            for p in m.support() {
                if !net.is_place(p) && !places.contains(p) {
                    places.push(p.clone());
                }
            }
        }
        let index: HashMap<NodeId, usize> = places.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
        let transitions = net
            .transitions()
            .iter()
            .map(|t| CompiledTransition {
                id: t.clone(),
                pre: net.preset(t).expect("transition").iter().map(|p| index[p]).collect(),
                post: net.postset(t).expect("transition").iter().map(|p| index[p]).collect(),
            })
            .collect();
        Compiled { places, index, transitions }
    }

    pub fn dense(&self, m: &Marking) -> Dense {
        let mut v = vec![0u32; self.places.len()];
        for (p, c) in m.iter() {
            v[self.index[p]] = c;
        }
        v.into_boxed_slice()
    }

    pub fn sparse(&self, d: &[u32]) -> Marking {
        d.iter().enumerate().filter(|(_, &c)| c > 0).map(|(i, &c)| (self.places[i].clone(), c)).collect()
    }

    pub fn place_index(&self, p: &NodeId) -> Option<usize> {
        self.index.get(p).copied()
    }

    /// Successors of `m` as `(transition index, marking)`, in transition order.
    pub fn successors<'a>(&'a self, m: &'a [u32]) -> impl Iterator<Item = (usize, Dense)> + 'a {
        self.transitions.iter().enumerate().filter_map(move |(ti, t)| {
            if t.pre.iter().any(|&p| m[p] == 0) {
                return None;
            }
            let mut next: Vec<u32> = m.to_vec();
            for &p in &t.pre {
                next[p] -= 1;
            }
            for &p in &t.post {
                next[p] += 1;
            }
            Some((ti, next.into_boxed_slice()))
        })
    }
}

/// Result of a bounded breadth-first search in dense form.
#[derive(Debug)]
pub(crate) struct StateSpace {
    pub states: Vec<Dense>,
    pub index: HashMap<Dense, usize>,
    /// BFS-tree parent of each state as `(state, transition index)`.
    pub parent: Vec<Option<(usize, usize)>>,
    /// `(from, transition index, to)`
    pub edges: Vec<(usize, usize, usize)>,
    pub truncated: bool,
}

impl StateSpace {
    /// Explores from `root` until closure, the cap, or (when given) discovery
    /// of `stop_at`.
    pub fn bfs(net: &Compiled, root: Dense, cap: usize, stop_at: Option<&[u32]>) -> StateSpace {
        let cap = cap.max(1);
        let mut space = StateSpace {
            states: vec![root.clone()],
            index: HashMap::from([(root, 0)]),
            parent: vec![None],
            edges: Vec::new(),
            truncated: false,
        };
        if stop_at.is_some_and(|t| *t == *space.states[0]) {
            return space;
        }
        let mut queue = VecDeque::from([0usize]);
        while let Some(current) = queue.pop_front() {
            let succ: Vec<(usize, Dense)> = net.successors(&space.states[current]).collect();
            for (ti, next) in succ {
                let target = match space.index.get(&next) {
                    Some(&i) => i,
                    None => {
                        if space.states.len() >= cap {
                            space.truncated = true;
                            return space;
                        }
                        let i = space.states.len();
                        let found = stop_at.is_some_and(|t| *t == *next);
                        space.index.insert(next.clone(), i);
                        space.states.push(next);
                        space.parent.push(Some((current, ti)));
                        space.edges.push((current, ti, i));
                        if found {
                            return space;
                        }
                        queue.push_back(i);
                        continue;
                    }
                };
                space.edges.push((current, ti, target));
            }
        }
        space
    }

    /// Transition indices along the BFS tree from the root to `state`.
    pub fn trace_to(&self, mut state: usize) -> Vec<usize> {
        let mut out = Vec::new();
        while let Some((prev, t)) = self.parent[state] {
            out.push(t);
            state = prev;
        }
        out.reverse();
        out
    }

    /// States from which some state satisfying `goal` is reachable inside this
    /// graph.
    pub fn backward_from(&self, goal: impl Fn(&[u32]) -> bool) -> Vec<bool> {
        let n = self.states.len();
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &(from, _, to) in &self.edges {
            preds[to].push(from);
        }
        let mut good = vec![false; n];
        let mut queue = VecDeque::new();
        for (i, s) in self.states.iter().enumerate() {
            if goal(s) {
                good[i] = true;
                queue.push_back(i);
            }
        }
        while let Some(i) = queue.pop_front() {
            for &p in &preds[i] {
                if !good[p] {
                    good[p] = true;
                    queue.push_back(p);
                }
            }
        }
        good
    }
}

/// The explored part of the reachability relation from a root marking.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReachabilityGraph {
    states: Vec<Marking>,
    index: HashMap<Marking, usize>,
    edges: Vec<(usize, NodeId, usize)>,
    parent: Vec<Option<(usize, NodeId)>>,
    truncated: bool,
}

impl ReachabilityGraph {
    pub fn root(&self) -> &Marking {
        &self.states[0]
    }

    /// States in discovery (BFS) order; the root comes first.
    pub fn states(&self) -> &[Marking] {
        &self.states
    }

    /// Edges `(from, transition, to)` as indices into [`Self::states`].
    pub fn edges(&self) -> &[(usize, NodeId, usize)] {
        &self.edges
    }

    pub fn truncated(&self) -> bool {
        self.truncated
    }

    pub fn contains(&self, m: &Marking) -> bool {
        self.index.contains_key(m)
    }

    pub fn index_of(&self, m: &Marking) -> Option<usize> {
        self.index.get(m).copied()
    }

    /// A shortest firing sequence from the root to `m`, if `m` was reached.
    pub fn trace_to(&self, m: &Marking) -> Option<Vec<NodeId>> {
        let mut state = self.index_of(m)?;
        let mut out = Vec::new();
        while let Some((prev, t)) = &self.parent[state] {
            out.push(t.clone());
            state = *prev;
        }
        out.reverse();
        Some(out)
    }

    /// States with no outgoing edge. Only meaningful when not truncated.
    pub fn dead_states(&self) -> Vec<&Marking> {
        let mut has_out = vec![false; self.states.len()];
        for (from, _, _) in &self.edges {
            has_out[*from] = true;
        }
        self.states.iter().zip(has_out).filter(|(_, out)| !out).map(|(m, _)| m).collect()
    }
}

/// Breadth-first closure of the firing relation from `m0`, visiting at most
/// `cap` states.
pub fn explore(net: &PetriNet, m0: &Marking, cap: usize) -> ReachabilityGraph {
    let compiled = Compiled::new(net, [m0]);
    let space = StateSpace::bfs(&compiled, compiled.dense(m0), cap, None);
    let states: Vec<Marking> = space.states.iter().map(|d| compiled.sparse(d)).collect();
    let index = states.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
    let tid = |ti: usize| compiled.transitions[ti].id.clone();
    ReachabilityGraph {
        edges: space.edges.iter().map(|&(a, t, b)| (a, tid(t), b)).collect(),
        parent: space.parent.iter().map(|p| p.map(|(s, t)| (s, tid(t)))).collect(),
        states,
        index,
        truncated: space.truncated,
    }
}

/// Answer of a bounded reachability query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reach {
    /// Reachable, with a shortest witness firing sequence.
    Yes(Vec<NodeId>),
    /// The full reachable set was explored without meeting the target.
    No,
    /// The cap was hit before the target was found.
    Unknown,
}

/// Decides `m0 ->* target` by breadth-first search bounded by `cap` states.
pub fn can_reach(net: &PetriNet, m0: &Marking, target: &Marking, cap: usize) -> Reach {
    let compiled = Compiled::new(net, [m0, target]);
    let goal = compiled.dense(target);
    let space = StateSpace::bfs(&compiled, compiled.dense(m0), cap, Some(&goal));
    match space.index.get(&goal) {
        Some(&i) => Reach::Yes(space.trace_to(i).into_iter().map(|t| compiled.transitions[t].id.clone()).collect()),
        None if space.truncated => Reach::Unknown,
        None => Reach::No,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::{id, NetBuilder};

    fn chain() -> PetriNet {
        NetBuilder::new().places(&["a", "b"]).transition("A").fires("A", &["a"], &["b"]).build().unwrap()
    }

    fn bag(entries: &[(&str, u32)]) -> Marking {
        entries.iter().map(|&(p, c)| (id(p), c)).collect()
    }

    #[test]
    fn chain_closure() {
        let g = explore(&chain(), &bag(&[("a", 1)]), DEFAULT_CAP);
        assert_eq!(g.states(), &[bag(&[("a", 1)]), bag(&[("b", 1)])]);
        assert!(!g.truncated());
        assert_eq!(g.edges(), &[(0, id("A"), 1)]);
    }

    #[test]
    fn empty_marking_is_closed() {
        let g = explore(&chain(), &Marking::empty(), DEFAULT_CAP);
        assert_eq!(g.states(), &[Marking::empty()]);
        assert!(g.edges().is_empty());
    }

    #[test]
    fn truncation_flag() {
        // t: p -> p, q  is unbounded
        let net =
            NetBuilder::new().places(&["p", "q"]).transition("t").fires("t", &["p"], &["p", "q"]).build().unwrap();
        let g = explore(&net, &bag(&[("p", 1)]), 10);
        assert!(g.truncated());
        assert_eq!(g.states().len(), 10);
        assert_eq!(can_reach(&net, &bag(&[("p", 1)]), &Marking::empty(), 50), Reach::Unknown);
        assert_eq!(
            can_reach(&net, &bag(&[("p", 1)]), &bag(&[("p", 1), ("q", 3)]), 50),
            Reach::Yes(vec![id("t"), id("t"), id("t")])
        );
    }

    #[test]
    fn reachability_answers() {
        let net = chain();
        assert_eq!(can_reach(&net, &bag(&[("a", 1)]), &bag(&[("b", 1)]), 10), Reach::Yes(vec![id("A")]));
        assert_eq!(can_reach(&net, &bag(&[("b", 1)]), &bag(&[("a", 1)]), 10), Reach::No);
        assert_eq!(can_reach(&net, &bag(&[("b", 1)]), &bag(&[("b", 1)]), 10), Reach::Yes(vec![]));
    }

    #[test]
    fn foreign_places_are_inert() {
        let net = chain();
        let m = bag(&[("a", 1), ("elsewhere", 2)]);
        let g = explore(&net, &m, 10);
        assert!(g.contains(&bag(&[("b", 1), ("elsewhere", 2)])));
    }

    #[test]
    fn traces_follow_bfs_tree() {
        let net = NetBuilder::new()
            .places(&["a", "b", "c"])
            .transitions(&["X", "Y"])
            .fires("X", &["a"], &["b"])
            .fires("Y", &["b"], &["c"])
            .build()
            .unwrap();
        let g = explore(&net, &bag(&[("a", 1)]), 10);
        assert_eq!(g.trace_to(&bag(&[("c", 1)])).unwrap(), vec![id("X"), id("Y")]);
        assert_eq!(g.dead_states(), vec![&bag(&[("c", 1)])]);
    }
}
