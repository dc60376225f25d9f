//! Seeded generators for the base classes and for AND-OR nets.
//!
//! Each class has a small grammar of growth steps that preserve the class
//! conditions, so generated nets never need rejection sampling. Nets grow
//! until they have at least the requested number of nodes; a step adds at
//! most two nodes, so the result can overshoot by one.

use std::collections::BTreeSet;

use rand::seq::{IteratorRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::tree::RefinementTree;
use super::BaseClass;
use crate::net::{NodeId, PetriNet};
use crate::refine::transition_completion;
use crate::workflow::{Border, WorkflowNet};

/// A net under construction. Names are `p<n>` and `t<n>` from one counter.
#[derive(Default)]
struct Draft {
    places: BTreeSet<NodeId>,
    transitions: BTreeSet<NodeId>,
    arcs: BTreeSet<(NodeId, NodeId)>,
    inputs: BTreeSet<NodeId>,
    outputs: BTreeSet<NodeId>,
    next: usize,
}

impl Draft {
    fn size(&self) -> usize {
        self.places.len() + self.transitions.len()
    }

    fn fresh(&mut self, letter: char) -> NodeId {
        let n = NodeId::new(format!("{letter}{}", self.next)).expect("valid id");
        self.next += 1;
        n
    }

    fn add_place(&mut self) -> NodeId {
        let p = self.fresh('p');
        self.places.insert(p.clone());
        p
    }

    fn add_transition(&mut self) -> NodeId {
        let t = self.fresh('t');
        self.transitions.insert(t.clone());
        t
    }

    fn arc(&mut self, a: &NodeId, b: &NodeId) {
        self.arcs.insert((a.clone(), b.clone()));
    }

    fn preset(&self, n: &NodeId) -> Vec<NodeId> {
        self.arcs.iter().filter(|(_, b)| b == n).map(|(a, _)| a.clone()).collect()
    }

    fn postset(&self, n: &NodeId) -> Vec<NodeId> {
        self.arcs.iter().filter(|(a, _)| a == n).map(|(_, b)| b.clone()).collect()
    }

    fn pick_place(&self, rng: &mut ChaCha8Rng) -> NodeId {
        self.places.iter().choose(rng).expect("nonempty").clone()
    }

    fn pick_transition(&self, rng: &mut ChaCha8Rng) -> NodeId {
        self.transitions.iter().choose(rng).expect("nonempty").clone()
    }

    /// `x -> n -> x'`: a new node `x'` of the same kind takes over the
    /// outgoing arcs and output membership of `x`; `n` is a new node of the
    /// other kind between them.
    fn sequential_split(&mut self, x: &NodeId, x_is_place: bool) {
        let (mid, next) = if x_is_place {
            (self.add_transition(), self.add_place())
        } else {
            (self.add_place(), self.add_transition())
        };
        for y in self.postset(x) {
            self.arcs.remove(&(x.clone(), y.clone()));
            self.arc(&next, &y);
        }
        if self.outputs.remove(x) {
            self.outputs.insert(next.clone());
        }
        self.arc(x, &mid);
        self.arc(&mid, &next);
    }

    /// A copy of `x` with the same neighbours and border membership.
    fn duplicate(&mut self, x: &NodeId, x_is_place: bool) {
        let copy = if x_is_place { self.add_place() } else { self.add_transition() };
        for y in self.preset(x) {
            self.arc(&y, &copy);
        }
        for y in self.postset(x) {
            self.arc(&copy, &y);
        }
        if self.inputs.contains(x) {
            self.inputs.insert(copy.clone());
        }
        if self.outputs.contains(x) {
            self.outputs.insert(copy);
        }
    }

    /// `x -> u -> z -> v -> x` with new `u`, `z`, `v`; `x` is a place.
    fn loop_through(&mut self, x: &NodeId) {
        let u = self.add_transition();
        let z = self.add_place();
        let v = self.add_transition();
        self.arc(x, &u);
        self.arc(&u, &z);
        self.arc(&z, &v);
        self.arc(&v, x);
    }

    fn finish(self, border: Border) -> WorkflowNet {
        let net = PetriNet::new(self.places, self.transitions, self.arcs).expect("generated net");
        WorkflowNet::new(net, self.inputs, self.outputs, border).expect("generated workflow net")
    }
}

fn single_place() -> Draft {
    let mut d = Draft::default();
    let p = d.add_place();
    d.inputs.insert(p.clone());
    d.outputs.insert(p);
    d
}

fn single_transition() -> Draft {
    let mut d = Draft::default();
    let t = d.add_transition();
    d.inputs.insert(t.clone());
    d.outputs.insert(t);
    d
}

fn grow_pand(size: usize, rng: &mut ChaCha8Rng) -> WorkflowNet {
    let mut d = single_place();
    while d.size() < size {
        match rng.gen_range(0..6) {
            // sequential steps are weighted up to keep nets from becoming
            // too wide to explore
            0..=2 => {
                let p = d.pick_place(rng);
                d.sequential_split(&p, true);
            }
            3 => {
                let p = d.pick_place(rng);
                d.duplicate(&p, true);
            }
            4 if !d.transitions.is_empty() => {
                let t = d.pick_transition(rng);
                let p = d.add_place();
                d.arc(&p, &t);
                d.inputs.insert(p);
            }
            5 if !d.transitions.is_empty() => {
                let t = d.pick_transition(rng);
                let p = d.add_place();
                d.arc(&t, &p);
                d.outputs.insert(p);
            }
            _ => {}
        }
    }
    d.finish(Border::Place)
}

fn grow_por11(size: usize, rng: &mut ChaCha8Rng) -> WorkflowNet {
    let mut d = single_place();
    while d.size() < size {
        match rng.gen_range(0..3) {
            0 => {
                let p = d.pick_place(rng);
                d.sequential_split(&p, true);
            }
            1 if d.places.len() >= 2 => {
                let pair: Vec<NodeId> = d.places.iter().cloned().choose_multiple(rng, 2);
                let (x, y) = if rng.gen() { (&pair[0], &pair[1]) } else { (&pair[1], &pair[0]) };
                let u = d.add_transition();
                d.arc(x, &u);
                d.arc(&u, y);
            }
            2 if d.size() + 3 <= size + 1 => {
                let p = d.pick_place(rng);
                d.loop_through(&p);
            }
            _ => {}
        }
    }
    d.finish(Border::Place)
}

fn grow_tor(size: usize, rng: &mut ChaCha8Rng) -> WorkflowNet {
    let mut d = single_transition();
    while d.size() < size {
        match rng.gen_range(0..6) {
            0 | 1 => {
                let t = d.pick_transition(rng);
                d.sequential_split(&t, false);
            }
            2 => {
                let t = d.pick_transition(rng);
                d.duplicate(&t, false);
            }
            3 if !d.places.is_empty() => {
                let p = d.pick_place(rng);
                let t = d.add_transition();
                d.arc(&t, &p);
                d.inputs.insert(t);
            }
            4 if !d.places.is_empty() => {
                let p = d.pick_place(rng);
                let t = d.add_transition();
                d.arc(&p, &t);
                d.outputs.insert(t);
            }
            5 if !d.places.is_empty() && d.size() + 3 <= size + 1 => {
                let p = d.pick_place(rng);
                d.loop_through(&p);
            }
            _ => {}
        }
    }
    d.finish(Border::Transition)
}

/// Transition completion of a pAND net; every 11tAND net has this shape.
fn grow_tand11(size: usize, rng: &mut ChaCha8Rng) -> WorkflowNet {
    let core = grow_pand(size.saturating_sub(2).max(1), rng);
    transition_completion(&core).expect("pAND is place-bordered")
}

/// A member of `class` with roughly `size` nodes (at least `t_i -> p -> t_o`
/// for 11tAND).
pub fn random_base(class: BaseClass, size: usize, seed: u64) -> WorkflowNet {
    random_base_with(class, size, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn random_base_with(class: BaseClass, size: usize, rng: &mut ChaCha8Rng) -> WorkflowNet {
    let size = size.max(1);
    let net = match class {
        BaseClass::PAnd => grow_pand(size, rng),
        BaseClass::TAnd11 => grow_tand11(size, rng),
        BaseClass::POr11 => grow_por11(size, rng),
        BaseClass::TOr => grow_tor(size, rng),
    };
    net.with_name(class.name())
}

fn tree_with(depth: usize, size: usize, border: Option<Border>, rng: &mut ChaCha8Rng) -> RefinementTree {
    let classes: Vec<BaseClass> =
        BaseClass::ALL.into_iter().filter(|c| border.is_none_or(|b| c.border() == b)).collect();
    let class = *classes.choose(rng).expect("every border has two classes");
    let base_size = rng.gen_range(1..=size.max(1));
    let base = random_base_with(class, base_size, rng);
    let mut tree = RefinementTree::leaf(base);
    if depth <= 1 {
        return tree;
    }
    let nodes: Vec<NodeId> = tree.base.net().nodes().cloned().collect();
    let count = rng.gen_range(1..=nodes.len().min(2));
    for node in nodes.choose_multiple(rng, count).cloned().collect::<Vec<_>>() {
        let kind = if tree.base.net().is_place(&node) { Border::Place } else { Border::Transition };
        let child = tree_with(depth - 1, size, Some(kind), rng);
        tree = tree.refine(node, child);
    }
    tree
}

/// A random refinement tree of exactly `depth` levels over base nets of at
/// most `size` nodes, with its expansion.
pub fn random_and_or(depth: usize, size: usize, seed: u64) -> (RefinementTree, WorkflowNet) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tree = tree_with(depth.max(1), size, None, &mut rng);
    let net = tree.expand().expect("generated trees are well formed");
    (tree, net)
}

/// Like [`random_and_or`] with the border kind of the root fixed.
pub fn random_and_or_with_border(
    depth: usize,
    size: usize,
    border: Border,
    seed: u64,
) -> (RefinementTree, WorkflowNet) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tree = tree_with(depth.max(1), size, Some(border), &mut rng);
    let net = tree.expand().expect("generated trees are well formed");
    (tree, net)
}

/// Applies up to `steps` random mutations that only add place-to-transition
/// arcs or remove transition-to-place arcs, keeping the net a workflow net.
///
/// Every run of the mutated net is covered by a run of the original, so a
/// bounded original stays bounded. With `keep_outputs_sinks`, no arc is added
/// out of an output place.
pub fn mutate_monotone(wf: &WorkflowNet, steps: usize, keep_outputs_sinks: bool, seed: u64) -> WorkflowNet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut current = wf.clone();
    for _ in 0..steps {
        let net = current.net();
        let mut arcs = net.arcs().clone();
        if rng.gen_bool(0.5) {
            let candidates: Vec<(NodeId, NodeId)> = net
                .places()
                .iter()
                .filter(|p| !(keep_outputs_sinks && current.outputs().contains(*p)))
                .flat_map(|p| net.transitions().iter().map(move |t| (p.clone(), t.clone())))
                .filter(|a| !arcs.contains(a))
                .collect();
            match candidates.choose(&mut rng) {
                Some(a) => arcs.insert(a.clone()),
                None => continue,
            };
        } else {
            let candidates: Vec<(NodeId, NodeId)> =
                arcs.iter().filter(|(a, _)| net.is_transition(a)).cloned().collect();
            match candidates.choose(&mut rng) {
                Some(a) => arcs.remove(a),
                None => continue,
            };
        }
        let candidate = PetriNet::new(net.places().clone(), net.transitions().clone(), arcs).expect("same nodes");
        if let Ok(next) =
            WorkflowNet::new(candidate, current.inputs().clone(), current.outputs().clone(), current.border())
        {
            current = next.with_name(wf.name());
        }
    }
    current
}

#[cfg(test)]
mod tests {
    use super::super::{classify_base, is_free_choice};
    use super::*;

    #[test]
    fn pand_of_size_one_is_a_single_place() {
        let n = random_base(BaseClass::PAnd, 1, 7);
        assert_eq!(n.net().node_count(), 1);
        assert!(n.net().places().len() == 1);
    }

    #[test]
    fn generated_nets_are_in_their_class() {
        for class in BaseClass::ALL {
            for seed in 0..40 {
                let size = 1 + (seed as usize % 12);
                let n = random_base(class, size, seed);
                let r = classify_base(&n);
                assert!(r.is(class), "{class} seed {seed}: {:?}", r.classes[&class]);
                assert!(n.net().node_count() >= size.clamp(1, 3));
            }
        }
    }

    #[test]
    fn generation_is_deterministic() {
        for class in BaseClass::ALL {
            assert_eq!(random_base(class, 9, 3), random_base(class, 9, 3));
        }
        assert_eq!(random_and_or(3, 4, 11), random_and_or(3, 4, 11));
    }

    #[test]
    fn and_or_trees_have_the_requested_depth() {
        for seed in 0..20 {
            let (tree, net) = random_and_or(3, 4, seed);
            assert_eq!(tree.depth(), 3);
            if tree.place_refinements_have_sink_outputs().unwrap() {
                assert!(is_free_choice(net.net()), "seed {seed}");
            }
            let (tree, _) = random_and_or(1, 4, seed);
            assert!(tree.is_leaf());
        }
    }

    #[test]
    fn fixed_border() {
        for seed in 0..10 {
            let (_, n) = random_and_or_with_border(2, 3, Border::Transition, seed);
            assert_eq!(n.border(), Border::Transition);
        }
    }

    #[test]
    fn monotone_mutation_keeps_output_sinks() {
        for seed in 0..20 {
            let n = random_base(BaseClass::PAnd, 8, seed);
            let m = mutate_monotone(&n, 4, true, seed);
            for o in m.outputs() {
                assert!(m.net().postset(o).unwrap().is_empty());
            }
            assert_eq!(m.net().places(), n.net().places());
        }
    }
}
