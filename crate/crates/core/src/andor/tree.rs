//! Refinement trees: a base net plus nested substitutions for some of its
//! nodes, expanded bottom-up into one flat net.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::{classify_base, BaseClass};
use crate::net::{NodeId, NodeKind, PetriNet};
use crate::refine::{substitute, RefineError, RenamePrefix};
use crate::workflow::{Border, WorkflowNet};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefinementTree {
    pub base: WorkflowNet,
    pub refinements: Vec<(NodeId, RefinementTree)>,
}

fn show_path(path: &[NodeId]) -> String {
    if path.is_empty() {
        "root".to_string()
    } else {
        path.iter().map(|n| n.as_str()).collect::<Vec<_>>().join("/")
    }
}

/// Errors carry the path of refined nodes leading to the offending subtree.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExpandError {
    #[error("at {}: {node} is not a node of the base net", show_path(.path))]
    UnknownNode { path: Vec<NodeId>, node: NodeId },
    #[error("at {}: {node} is refined twice", show_path(.path))]
    DuplicateRefinement { path: Vec<NodeId>, node: NodeId },
    #[error("at {}: {node} needs a {expected} net, got a {found} net", show_path(.path))]
    KindMismatch { path: Vec<NodeId>, node: NodeId, expected: Border, found: Border },
    #[error("at {}: base net {name:?} is not in any of pAND, 11tAND, 11pOR, tOR", show_path(.path))]
    NotBaseClass { path: Vec<NodeId>, name: String },
    #[error("net is not a one-input one-output tAND net")]
    Not11TAnd,
    #[error("a single transition has no inner pAND net to extract")]
    Degenerate,
    #[error(transparent)]
    Refine(#[from] RefineError),
}

impl RefinementTree {
    pub fn leaf(base: WorkflowNet) -> Self {
        RefinementTree { base, refinements: Vec::new() }
    }

    pub fn refine(mut self, node: NodeId, child: RefinementTree) -> Self {
        self.refinements.push((node, child));
        self
    }

    pub fn is_leaf(&self) -> bool {
        self.refinements.is_empty()
    }

    /// Number of levels; a leaf has depth 1.
    pub fn depth(&self) -> usize {
        1 + self.refinements.iter().map(|(_, c)| c.depth()).max().unwrap_or(0)
    }

    /// Every base net in the tree, in pre-order.
    pub fn bases(&self) -> Vec<&WorkflowNet> {
        let mut out = vec![&self.base];
        for (_, c) in &self.refinements {
            out.extend(c.bases());
        }
        out
    }

    /// Checks node existence, uniqueness and kind agreement throughout the
    /// tree without building anything.
    pub fn validate(&self) -> Result<(), ExpandError> {
        self.validate_at(&mut Vec::new())
    }

    fn validate_at(&self, path: &mut Vec<NodeId>) -> Result<(), ExpandError> {
        let mut seen = BTreeSet::new();
        for (node, child) in &self.refinements {
            if !seen.insert(node) {
                return Err(ExpandError::DuplicateRefinement { path: path.clone(), node: node.clone() });
            }
            let expected = match self.base.net().kind_of(node) {
                None => return Err(ExpandError::UnknownNode { path: path.clone(), node: node.clone() }),
                Some(NodeKind::Place) => Border::Place,
                Some(NodeKind::Transition) => Border::Transition,
            };
            if child.base.border() != expected {
                return Err(ExpandError::KindMismatch {
                    path: path.clone(),
                    node: node.clone(),
                    expected,
                    found: child.base.border(),
                });
            }
            path.push(node.clone());
            child.validate_at(path)?;
            path.pop();
        }
        Ok(())
    }

    fn check_classes(&self, path: &mut Vec<NodeId>) -> Result<(), ExpandError> {
        if !classify_base(&self.base).in_any() {
            return Err(ExpandError::NotBaseClass { path: path.clone(), name: self.base.name().to_string() });
        }
        for (node, child) in &self.refinements {
            path.push(node.clone());
            child.check_classes(path)?;
            path.pop();
        }
        Ok(())
    }

    /// True iff every place refinement, at any level, substitutes a net
    /// whose output places have no outgoing arcs.
    ///
    /// Expansions of such trees are free-choice: base nets are, transition
    /// substitution keeps the property, and place substitution keeps it when
    /// the inner outputs inherit exactly the replaced place's postset.
    pub fn place_refinements_have_sink_outputs(&self) -> Result<bool, ExpandError> {
        for (node, child) in &self.refinements {
            if self.base.net().is_place(node) {
                let inner = child.expand_unchecked()?;
                let net = inner.net();
                if inner.outputs().iter().any(|o| !net.postset(o).expect("output").is_empty()) {
                    return Ok(false);
                }
            }
            if !child.place_refinements_have_sink_outputs()? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Expands the tree into an AND-OR net. Every base net must belong to a
    /// generator class.
    pub fn expand(&self) -> Result<WorkflowNet, ExpandError> {
        self.validate()?;
        self.check_classes(&mut Vec::new())?;
        self.expand_unchecked()
    }

    /// Expands without the base-class requirement, so arbitrary workflow nets
    /// can be composed. Structural validity is still checked.
    pub fn expand_unchecked(&self) -> Result<WorkflowNet, ExpandError> {
        self.validate()?;
        Ok(self.expand_inner()?)
    }

    /// Children first, then each child is substituted into the base under the
    /// prefix `"<node>/"`.
    fn expand_inner(&self) -> Result<WorkflowNet, RefineError> {
        let mut net = self.base.clone();
        for (node, child) in &self.refinements {
            let inner = child.expand_inner()?;
            net = substitute(&net, node, &inner)?;
        }
        Ok(net)
    }
}

/// Splits a one-input one-output tAND net into the tOR net `t_i -> p -> t_o`
/// with the inner pAND net (everything between `t_i` and `t_o`) substituted
/// for `p`.
///
/// The middle place is called `p` unless that name is taken by `t_i` or `t_o`.
pub fn decompose_11tand(wf: &WorkflowNet) -> Result<RefinementTree, ExpandError> {
    if !classify_base(wf).is(BaseClass::TAnd11) {
        return Err(ExpandError::Not11TAnd);
    }
    let ti = wf.inputs().iter().next().expect("one input").clone();
    let to = wf.outputs().iter().next().expect("one output").clone();
    if ti == to {
        return Err(ExpandError::Degenerate);
    }
    let mid = middle_place(&ti, &to);
    let (outer, inner) = split_11tand(wf, &ti, &to, &mid)?;
    Ok(RefinementTree::leaf(outer).refine(mid, RefinementTree::leaf(inner)))
}

fn split_11tand(
    wf: &WorkflowNet,
    ti: &NodeId,
    to: &NodeId,
    mid: &NodeId,
) -> Result<(WorkflowNet, WorkflowNet), RefineError> {
    let net = wf.net();

    let outer_net = PetriNet::new(
        BTreeSet::from([mid.clone()]),
        BTreeSet::from([ti.clone(), to.clone()]),
        BTreeSet::from([(ti.clone(), mid.clone()), (mid.clone(), to.clone())]),
    )?;
    let outer =
        WorkflowNet::new(outer_net, BTreeSet::from([ti.clone()]), BTreeSet::from([to.clone()]), Border::Transition)?
            .with_name(wf.name());

    let keep = |n: &NodeId| n != ti && n != to;
    let inner_net = PetriNet::new(
        net.places().clone(),
        net.transitions().iter().filter(|t| keep(t)).cloned().collect::<BTreeSet<_>>(),
        net.arcs().iter().filter(|(a, b)| keep(a) && keep(b)).cloned().collect::<BTreeSet<_>>(),
    )?;
    let inner = WorkflowNet::new(inner_net, net.postset(ti)?.clone(), net.preset(to)?.clone(), Border::Place)?
        .with_name(format!("{}-inner", wf.name()));
    Ok((outer, inner))
}

fn middle_place(ti: &NodeId, to: &NodeId) -> NodeId {
    let mut name = "p".to_string();
    loop {
        let candidate = NodeId::new(name.clone()).expect("valid id");
        if candidate != *ti && candidate != *to {
            return candidate;
        }
        name.insert(0, '_');
    }
}

/// The node correspondence between an 11tAND net and the expansion of its
/// decomposition: `t_i` and `t_o` keep their names, every other node `x`
/// becomes `<p>/x`.
pub fn decomposition_mapping(wf: &WorkflowNet) -> BTreeMap<NodeId, NodeId> {
    let ti = wf.inputs().iter().next().cloned();
    let to = wf.outputs().iter().next().cloned();
    let border = [ti.clone(), to.clone()];
    let prefix = match (&ti, &to) {
        (Some(a), Some(b)) => RenamePrefix::for_node(&middle_place(a, b)),
        _ => RenamePrefix::new("p/"),
    };
    wf.net()
        .nodes()
        .map(|n| {
            let image = if border.contains(&Some(n.clone())) { n.clone() } else { n.prefixed(prefix.as_str()) };
            (n.clone(), image)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::{id, NetBuilder};
    use crate::refine::structurally_equal;

    fn set(ids: &[&str]) -> BTreeSet<NodeId> {
        ids.iter().map(|s| id(s)).collect()
    }

    fn wf(b: NetBuilder, i: &[&str], o: &[&str], border: Border) -> WorkflowNet {
        WorkflowNet::new(b.build().unwrap(), set(i), set(o), border).unwrap()
    }

    fn place(name: &str) -> WorkflowNet {
        wf(NetBuilder::new().place(name), &[name], &[name], Border::Place)
    }

    fn chain() -> WorkflowNet {
        wf(
            NetBuilder::new().places(&["a", "o"]).transition("t").fires("t", &["a"], &["o"]),
            &["a"],
            &["o"],
            Border::Place,
        )
    }

    #[test]
    fn leaf_expands_to_itself() {
        let t = RefinementTree::leaf(chain());
        assert_eq!(t.expand().unwrap(), chain());
        assert_eq!(t.depth(), 1);
    }

    #[test]
    fn nested_refinement_uses_hierarchical_names() {
        let par = wf(NetBuilder::new().places(&["b", "c"]), &["b", "c"], &["b", "c"], Border::Place);
        let inner = RefinementTree::leaf(chain()).refine(id("a"), RefinementTree::leaf(par));
        let tree = RefinementTree::leaf(chain()).refine(id("o"), inner);
        assert_eq!(tree.depth(), 3);
        let net = tree.expand().unwrap();
        assert!(net.net().is_place(&id("o/a/b")));
        assert!(net.net().arcs().contains(&(id("t"), id("o/a/c"))));
        assert_eq!(net.outputs(), &set(&["o/o"]));
    }

    #[test]
    fn kind_mismatch_and_unknown_node_are_reported() {
        let t = wf(NetBuilder::new().transition("x"), &["x"], &["x"], Border::Transition);
        let bad = RefinementTree::leaf(chain()).refine(id("a"), RefinementTree::leaf(t));
        assert!(matches!(bad.validate(), Err(ExpandError::KindMismatch { .. })));
        let bad = RefinementTree::leaf(chain()).refine(id("zz"), RefinementTree::leaf(place("q")));
        assert!(matches!(bad.expand(), Err(ExpandError::UnknownNode { .. })));
        let dup = RefinementTree::leaf(chain())
            .refine(id("a"), RefinementTree::leaf(place("q")))
            .refine(id("a"), RefinementTree::leaf(place("r")));
        assert!(matches!(dup.validate(), Err(ExpandError::DuplicateRefinement { .. })));
    }

    #[test]
    fn non_base_leaf_needs_unchecked_expansion() {
        // a -> A -> {b, c}, {b, c} -> B -> c is neither AND nor OR
        let odd = wf(
            NetBuilder::new().places(&["a", "b", "c"]).transitions(&["A", "B"]).fires("A", &["a"], &["b", "c"]).fires(
                "B",
                &["b", "c"],
                &["c"],
            ),
            &["a"],
            &["c"],
            Border::Place,
        );
        let tree = RefinementTree::leaf(chain()).refine(id("a"), RefinementTree::leaf(odd));
        assert!(matches!(tree.expand(), Err(ExpandError::NotBaseClass { .. })));
        assert!(tree.expand_unchecked().is_ok());
    }

    #[test]
    fn minimal_11tand_decomposes_to_single_place() {
        let n = wf(
            NetBuilder::new().place("q").transitions(&["ti", "to"]).arc("ti", "q").arc("q", "to"),
            &["ti"],
            &["to"],
            Border::Transition,
        );
        let tree = decompose_11tand(&n).unwrap();
        let (_, inner) = &tree.refinements[0];
        assert_eq!(inner.base.net().node_count(), 1);
        let back = tree.expand().unwrap();
        assert!(structurally_equal(&n, &back, &decomposition_mapping(&n)).unwrap());
    }

    #[test]
    fn decomposition_rejects_other_nets() {
        assert!(matches!(decompose_11tand(&chain()), Err(ExpandError::Not11TAnd)));
        let t = wf(NetBuilder::new().transition("x"), &["x"], &["x"], Border::Transition);
        assert!(matches!(decompose_11tand(&t), Err(ExpandError::Degenerate)));
    }

    #[test]
    fn middle_place_avoids_border_names() {
        let n = wf(
            NetBuilder::new().place("q").transitions(&["p", "u"]).arc("p", "q").arc("q", "u"),
            &["p"],
            &["u"],
            Border::Transition,
        );
        let tree = decompose_11tand(&n).unwrap();
        assert_eq!(tree.refinements[0].0, id("_p"));
        let back = tree.expand().unwrap();
        assert!(structurally_equal(&n, &back, &decomposition_mapping(&n)).unwrap());
    }
}
