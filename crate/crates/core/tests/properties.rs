//! Randomized properties of firing, exploration, substitution and the
//! soundness checkers, including a cross-check against a naive oracle.

use std::collections::{BTreeSet, HashSet, VecDeque};

use proptest::prelude::*;
use wfsub::andor::{mutate_monotone, random_and_or_with_border};
use wfsub::refine::{identity_mapping, place_completion, structurally_equal, substitute};
use wfsub::{
    can_reach, check_k_sound, check_sub_sound_bounded, explore, initial_marking, random_and_or, random_base, BaseClass,
    Border, Marking, NodeId, NodeKind, Outcome, PetriNet, Reach, WorkflowNet, DEFAULT_CAP,
};

fn id(s: &str) -> NodeId {
    NodeId::new(s).unwrap()
}

/// A chain `p0 -> t0 -> p1 -> ... -> pn` plus extra random arcs, so every
/// node lies on a path from the input to the output.
fn chain_net(places: usize, extra: &[(bool, usize, usize)]) -> WorkflowNet {
    let ps: Vec<NodeId> = (0..places).map(|i| id(&format!("p{i}"))).collect();
    let ts: Vec<NodeId> = (0..places - 1).map(|i| id(&format!("t{i}"))).collect();
    let mut arcs = BTreeSet::new();
    for (i, t) in ts.iter().enumerate() {
        arcs.insert((ps[i].clone(), t.clone()));
        arcs.insert((t.clone(), ps[i + 1].clone()));
    }
    for &(into_t, p, t) in extra {
        let (p, t) = (ps[p % places].clone(), ts[t % ts.len()].clone());
        arcs.insert(if into_t { (p, t) } else { (t, p) });
    }
    let net = PetriNet::new(ps.iter().cloned(), ts.iter().cloned(), arcs).unwrap();
    WorkflowNet::new(net, BTreeSet::from([ps[0].clone()]), BTreeSet::from([ps[places - 1].clone()]), Border::Place)
        .unwrap()
}

fn small_net() -> impl Strategy<Value = WorkflowNet> {
    (2usize..5, prop::collection::vec((any::<bool>(), 0usize..5, 0usize..4), 0..5))
        .prop_map(|(places, extra)| chain_net(places, &extra))
}

fn marking_on(net: &PetriNet, counts: &[u32]) -> Marking {
    let mut m = Marking::empty();
    for (p, c) in net.places().iter().zip(counts) {
        m.set(p.clone(), *c);
    }
    m
}

fn border_of(kind: NodeKind) -> Border {
    match kind {
        NodeKind::Place => Border::Place,
        NodeKind::Transition => Border::Transition,
    }
}

/// A random base net or small AND-OR net with the given border.
fn random_with_border(border: Border, seed: u64) -> WorkflowNet {
    let classes: Vec<BaseClass> = BaseClass::ALL.into_iter().filter(|c| c.border() == border).collect();
    match seed % 3 {
        0 => random_and_or_with_border(1, 4, border, seed).1,
        n => random_base(classes[n as usize - 1], 3 + (seed as usize % 4), seed),
    }
}

fn pick<T: Clone>(items: impl IntoIterator<Item = T>, index: usize) -> T {
    let items: Vec<T> = items.into_iter().collect();
    items[index % items.len()].clone()
}

/// Naive explicit-state search over dense vectors, independent of the
/// library's explorer.
struct Oracle {
    places: Vec<NodeId>,
    transitions: Vec<(Vec<usize>, Vec<usize>)>,
}

impl Oracle {
    fn new(net: &PetriNet) -> Self {
        let places: Vec<NodeId> = net.places().iter().cloned().collect();
        let index = |p: &NodeId| places.iter().position(|q| q == p).unwrap();
        let transitions = net
            .transitions()
            .iter()
            .map(|t| {
                let pre = net.arcs().iter().filter(|(_, b)| b == t).map(|(a, _)| index(a)).collect();
                let post = net.arcs().iter().filter(|(a, _)| a == t).map(|(_, b)| index(b)).collect();
                (pre, post)
            })
            .collect();
        Oracle { places, transitions }
    }

    fn vector(&self, set: &BTreeSet<NodeId>, k: u32) -> Vec<u32> {
        self.places.iter().map(|p| if set.contains(p) { k } else { 0 }).collect()
    }

    /// All markings reachable from `start`, or `None` past `limit`.
    fn reachable(&self, start: &[u32], limit: usize) -> Option<Vec<Vec<u32>>> {
        let mut seen: HashSet<Vec<u32>> = HashSet::from([start.to_vec()]);
        let mut order = vec![start.to_vec()];
        let mut queue = VecDeque::from([start.to_vec()]);
        while let Some(m) = queue.pop_front() {
            for (pre, post) in &self.transitions {
                if pre.iter().all(|&p| m[p] > 0) {
                    let mut next = m.clone();
                    for &p in pre {
                        next[p] -= 1;
                    }
                    for &p in post {
                        next[p] += 1;
                    }
                    if seen.insert(next.clone()) {
                        if seen.len() > limit {
                            return None;
                        }
                        order.push(next.clone());
                        queue.push_back(next);
                    }
                }
            }
        }
        Some(order)
    }

    fn reaches(&self, from: &[u32], goal: &[u32], limit: usize) -> Option<bool> {
        self.reachable(from, limit).map(|all| all.iter().any(|m| m == goal))
    }

    fn k_sound(&self, wf: &WorkflowNet, k: u32, limit: usize) -> Option<bool> {
        let goal = self.vector(wf.outputs(), k);
        for m in self.reachable(&self.vector(wf.inputs(), k), limit)? {
            if !self.reaches(&m, &goal, limit)? {
                return Some(false);
            }
        }
        Some(true)
    }

    fn sub_sound(&self, wf: &WorkflowNet, bound: u32, limit: usize) -> Option<bool> {
        for k in 1..=bound {
            for m in self.reachable(&self.vector(wf.inputs(), k), limit)? {
                for removed in 0..=k {
                    let o = self.vector(wf.outputs(), removed);
                    if m.iter().zip(&o).any(|(a, b)| a < b) {
                        continue;
                    }
                    let rest: Vec<u32> = m.iter().zip(&o).map(|(a, b)| a - b).collect();
                    if !self.reaches(&rest, &self.vector(wf.outputs(), k - removed), limit)? {
                        return Some(false);
                    }
                }
            }
        }
        Some(true)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn firing_changes_size_by_the_arc_balance(wf in small_net(), counts in prop::collection::vec(0u32..3, 5)) {
        let net = wf.net();
        let m = marking_on(net, &counts);
        for t in net.transitions() {
            if net.enabled(&m, t).unwrap() {
                let next = net.fire(&m, t).unwrap();
                let balance = net.postset(t).unwrap().len() as i64 - net.preset(t).unwrap().len() as i64;
                prop_assert_eq!(next.size() as i64, m.size() as i64 + balance);
            } else {
                prop_assert!(net.fire(&m, t).is_err());
            }
        }
    }

    #[test]
    fn enabling_is_monotone(
        wf in small_net(),
        counts in prop::collection::vec(0u32..3, 5),
        extra in prop::collection::vec(0u32..3, 5),
    ) {
        let net = wf.net();
        let m = marking_on(net, &counts);
        let more = marking_on(net, &extra);
        let bigger = m.sum(&more);
        for t in net.transitions() {
            if net.enabled(&m, t).unwrap() {
                prop_assert!(net.enabled(&bigger, t).unwrap());
                prop_assert_eq!(net.fire(&bigger, t).unwrap(), net.fire(&m, t).unwrap().sum(&more));
            }
        }
    }

    #[test]
    fn explore_and_can_reach_agree(wf in small_net(), k in 1u32..3, probe in prop::collection::vec(0u32..3, 5)) {
        let net = wf.net();
        let m0 = initial_marking(&wf, k).unwrap();
        let graph = explore(net, &m0, 400);
        prop_assume!(!graph.truncated());
        for s in graph.states() {
            match can_reach(net, &m0, s, DEFAULT_CAP) {
                Reach::Yes(trace) => prop_assert_eq!(&net.fire_sequence(&m0, &trace).unwrap(), s),
                other => prop_assert!(false, "{} not reached: {:?}", s, other),
            }
        }
        let probe = marking_on(net, &probe);
        if !graph.contains(&probe) {
            prop_assert_eq!(can_reach(net, &m0, &probe, DEFAULT_CAP), Reach::No);
        }
    }

    #[test]
    fn checkers_agree_with_the_naive_oracle(wf in small_net(), k in 1u32..4) {
        let oracle = Oracle::new(wf.net());
        if let Some(sound) = oracle.k_sound(&wf, k, 2_000) {
            prop_assert_eq!(check_k_sound(&wf, k, DEFAULT_CAP).outcome, if sound { Outcome::Sound } else { Outcome::Unsound });
        }
        if let Some(sound) = oracle.sub_sound(&wf, k, 2_000) {
            let verdict = check_sub_sound_bounded(&wf, k, DEFAULT_CAP);
            prop_assert_eq!(verdict.outcome, if sound { Outcome::Sound } else { Outcome::Unsound });
        }
    }

    #[test]
    fn witnesses_replay_and_strand(seed in any::<u64>(), steps in 1usize..4) {
        let base = random_and_or_with_border(1, 4, Border::Place, seed).1;
        let wf = mutate_monotone(&base, steps, false, seed);
        let verdict = check_sub_sound_bounded(&wf, 2, DEFAULT_CAP);
        if let Some(w) = verdict.witness {
            prop_assert_eq!(verdict.outcome, Outcome::Unsound);
            let net = wf.net();
            let reached = net.fire_sequence(&initial_marking(&wf, w.k).unwrap(), &w.trace).unwrap();
            prop_assert_eq!(&reached, &w.reached);
            let outputs = Marking::from_set(wf.outputs());
            prop_assert_eq!(&w.stranded.sum(&outputs.scale(w.removed)), &w.reached);
            prop_assert_eq!(can_reach(net, &w.stranded, &outputs.scale(w.k - w.removed), DEFAULT_CAP), Reach::No);
        }
    }

    #[test]
    fn generation_and_checking_are_deterministic(seed in any::<u64>(), depth in 1usize..3) {
        let (tree_a, net_a) = random_and_or(depth, 4, seed);
        let (tree_b, net_b) = random_and_or(depth, 4, seed);
        prop_assert_eq!(&tree_a, &tree_b);
        prop_assert_eq!(&net_a, &net_b);
        prop_assert_eq!(check_sub_sound_bounded(&net_a, 2, DEFAULT_CAP), check_sub_sound_bounded(&net_b, 2, DEFAULT_CAP));
    }

    #[test]
    fn place_completion_commutes_with_place_substitution(seed in any::<u64>(), which in any::<usize>()) {
        let n = random_with_border(Border::Transition, seed);
        prop_assume!(!n.net().places().is_empty());
        let p = pick(n.net().places().iter().cloned(), which);
        let m = random_with_border(Border::Place, seed.wrapping_add(1));
        let left = place_completion(&substitute(&n, &p, &m).unwrap()).unwrap();
        let right = substitute(&place_completion(&n).unwrap(), &p, &m).unwrap();
        prop_assert!(structurally_equal(&left, &right, &identity_mapping(&left)).unwrap());
    }

    #[test]
    fn substitution_is_associative(seed in any::<u64>(), a_pick in any::<usize>(), b_pick in any::<usize>()) {
        let a = random_with_border(Border::Place, seed);
        let x = pick(a.net().nodes().cloned(), a_pick);
        let b = random_with_border(border_of(a.net().kind_of(&x).unwrap()), seed.wrapping_add(1));
        let y = pick(b.net().nodes().cloned(), b_pick);
        let c = random_with_border(border_of(b.net().kind_of(&y).unwrap()), seed.wrapping_add(2));

        let left = substitute(&substitute(&a, &x, &b).unwrap(), &y.prefixed(&format!("{x}/")), &c).unwrap();
        let right = substitute(&a, &x, &substitute(&b, &y, &c).unwrap()).unwrap();
        prop_assert!(structurally_equal(&left, &right, &identity_mapping(&left)).unwrap());
    }

    #[test]
    fn substitutions_at_distinct_nodes_commute(seed in any::<u64>(), x_pick in any::<usize>(), y_pick in any::<usize>()) {
        let a = random_with_border(Border::Place, seed);
        prop_assume!(a.net().node_count() >= 2);
        let x = pick(a.net().nodes().cloned(), x_pick);
        let y = pick(a.net().nodes().filter(|n| **n != x).cloned(), y_pick);
        let b = random_with_border(border_of(a.net().kind_of(&x).unwrap()), seed.wrapping_add(1));
        let c = random_with_border(border_of(a.net().kind_of(&y).unwrap()), seed.wrapping_add(2));

        let left = substitute(&substitute(&a, &x, &b).unwrap(), &y, &c).unwrap();
        let right = substitute(&substitute(&a, &y, &c).unwrap(), &x, &b).unwrap();
        prop_assert!(structurally_equal(&left, &right, &identity_mapping(&left)).unwrap());
    }

    #[test]
    fn one_input_one_output_por_nets_conserve_tokens(seed in any::<u64>(), size in 2usize..10, k in 1u32..4) {
        let wf = random_base(BaseClass::POr11, size, seed);
        let graph = explore(wf.net(), &initial_marking(&wf, k).unwrap(), DEFAULT_CAP);
        for (from, _, to) in graph.edges() {
            prop_assert_eq!(graph.states()[*from].size(), graph.states()[*to].size());
        }
        prop_assert!(graph.states().iter().all(|m| m.size() == u64::from(k)));
    }
}
