//! AND nets, OR nets and the four base classes used to generate AND-OR nets.
//!
//! An AND net is an acyclic workflow net whose places each have exactly one
//! incoming and one outgoing arc, except that being an input (output) place
//! stands in for the incoming (outgoing) arc. An OR net puts the same
//! restriction on transitions instead and allows cycles.
//!
//! The generator classes are pAND, one-input one-output tAND (11tAND),
//! one-input one-output pOR (11pOR) and tOR. [`is_and_net`] and [`is_or_net`]
//! report raw membership, so multi-border tAND and pOR nets (which need not be
//! sound) can still be recognised; [`classify_base`] applies the one-input
//! one-output restriction where the generator classes require it.

mod generate;
mod tree;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use crate::net::{NodeId, NodeKind, PetriNet};
use crate::workflow::{Border, WorkflowNet};

pub use generate::{mutate_monotone, random_and_or, random_and_or_with_border, random_base, random_base_with};
pub use tree::{decompose_11tand, decomposition_mapping, ExpandError, RefinementTree};

/// One of the four generator classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BaseClass {
    PAnd,
    TAnd11,
    POr11,
    TOr,
}

impl BaseClass {
    pub const ALL: [BaseClass; 4] = [BaseClass::PAnd, BaseClass::TAnd11, BaseClass::POr11, BaseClass::TOr];

    pub fn border(self) -> Border {
        match self {
            BaseClass::PAnd | BaseClass::POr11 => Border::Place,
            BaseClass::TAnd11 | BaseClass::TOr => Border::Transition,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BaseClass::PAnd => "pAND",
            BaseClass::TAnd11 => "11tAND",
            BaseClass::POr11 => "11pOR",
            BaseClass::TOr => "tOR",
        }
    }
}

impl fmt::Display for BaseClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown base class {0:?} (expected pAND, 11tAND, 11pOR or tOR)")]
pub struct UnknownClass(pub String);

impl FromStr for BaseClass {
    type Err = UnknownClass;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BaseClass::ALL.into_iter().find(|c| c.name().eq_ignore_ascii_case(s)).ok_or_else(|| UnknownClass(s.to_string()))
    }
}

/// Why a net is not in some class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClassViolation {
    /// AND nets must be acyclic; the cycle starts and ends at the same node.
    Cycle(Vec<NodeId>),
    /// `node` has `found` incoming arcs; it needs none if it is an input node
    /// and exactly one otherwise.
    Preset {
        node: NodeId,
        is_input: bool,
        found: usize,
    },
    /// `node` has `found` outgoing arcs; it needs none if it is an output node
    /// and exactly one otherwise.
    Postset {
        node: NodeId,
        is_output: bool,
        found: usize,
    },
    WrongBorder {
        expected: Border,
        found: Border,
    },
    InputCount(usize),
    OutputCount(usize),
}

impl fmt::Display for ClassViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassViolation::Cycle(c) => {
                let names: Vec<&str> = c.iter().map(|n| n.as_str()).collect();
                write!(f, "cycle {}", names.join(" -> "))
            }
            ClassViolation::Preset { node, is_input, found } => {
                let (role, want) = if *is_input { ("input", 0) } else { ("inner", 1) };
                write!(f, "{role} node {node} has {found} incoming arcs, expected {want}")
            }
            ClassViolation::Postset { node, is_output, found } => {
                let (role, want) = if *is_output { ("output", 0) } else { ("inner", 1) };
                write!(f, "{role} node {node} has {found} outgoing arcs, expected {want}")
            }
            ClassViolation::WrongBorder { expected, found } => {
                write!(f, "needs a {expected} net, found a {found} net")
            }
            ClassViolation::InputCount(n) => write!(f, "{n} input nodes, expected 1"),
            ClassViolation::OutputCount(n) => write!(f, "{n} output nodes, expected 1"),
        }
    }
}

/// Result of a membership test.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ClassCheck {
    pub violations: Vec<ClassViolation>,
}

impl ClassCheck {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the per-node arc conditions on every node of `kind`.
fn degree_violations(wf: &WorkflowNet, kind: NodeKind, out: &mut Vec<ClassViolation>) {
    let net = wf.net();
    let nodes = match kind {
        NodeKind::Place => net.places(),
        NodeKind::Transition => net.transitions(),
    };
    for n in nodes {
        let is_input = wf.inputs().contains(n);
        let found = net.preset(n).expect("node of net").len();
        if found != if is_input { 0 } else { 1 } {
            out.push(ClassViolation::Preset { node: n.clone(), is_input, found });
        }
        let is_output = wf.outputs().contains(n);
        let found = net.postset(n).expect("node of net").len();
        if found != if is_output { 0 } else { 1 } {
            out.push(ClassViolation::Postset { node: n.clone(), is_output, found });
        }
    }
}

/// AND-net membership: acyclic, and every place has one incoming and one
/// outgoing arc, with input/output membership replacing the missing arc.
pub fn is_and_net(wf: &WorkflowNet) -> ClassCheck {
    let mut violations = Vec::new();
    if let Some(cycle) = wf.net().find_cycle() {
        violations.push(ClassViolation::Cycle(cycle));
    }
    degree_violations(wf, NodeKind::Place, &mut violations);
    ClassCheck { violations }
}

/// OR-net membership: the AND conditions moved from places to transitions;
/// cycles are allowed.
pub fn is_or_net(wf: &WorkflowNet) -> ClassCheck {
    let mut violations = Vec::new();
    degree_violations(wf, NodeKind::Transition, &mut violations);
    ClassCheck { violations }
}

/// Membership of a net in the AND/OR classes and the four generator classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseClassReport {
    pub border: Border,
    pub and_net: bool,
    pub or_net: bool,
    pub one_input: bool,
    pub one_output: bool,
    /// Generator-class membership; each class maps to its violations, which
    /// are empty exactly when the net is in the class.
    pub classes: BTreeMap<BaseClass, Vec<ClassViolation>>,
}

impl BaseClassReport {
    pub fn is(&self, class: BaseClass) -> bool {
        self.classes[&class].is_empty()
    }

    pub fn p_and(&self) -> bool {
        self.is(BaseClass::PAnd)
    }

    pub fn t_and_11(&self) -> bool {
        self.is(BaseClass::TAnd11)
    }

    pub fn p_or_11(&self) -> bool {
        self.is(BaseClass::POr11)
    }

    pub fn t_or(&self) -> bool {
        self.is(BaseClass::TOr)
    }

    /// The generator classes the net belongs to.
    pub fn members(&self) -> Vec<BaseClass> {
        BaseClass::ALL.into_iter().filter(|c| self.is(*c)).collect()
    }

    pub fn in_any(&self) -> bool {
        !self.members().is_empty()
    }
}

pub fn classify_base(wf: &WorkflowNet) -> BaseClassReport {
    let and = is_and_net(wf);
    let or = is_or_net(wf);
    let border = wf.border();
    let (ni, no) = (wf.inputs().len(), wf.outputs().len());

    let mut classes = BTreeMap::new();
    for class in BaseClass::ALL {
        let mut v = Vec::new();
        if class.border() != border {
            v.push(ClassViolation::WrongBorder { expected: class.border(), found: border });
        }
        match class {
            BaseClass::PAnd => v.extend(and.violations.iter().cloned()),
            BaseClass::TOr => v.extend(or.violations.iter().cloned()),
            BaseClass::TAnd11 | BaseClass::POr11 => {
                let base = if class == BaseClass::TAnd11 { &and } else { &or };
                v.extend(base.violations.iter().cloned());
                if ni != 1 {
                    v.push(ClassViolation::InputCount(ni));
                }
                if no != 1 {
                    v.push(ClassViolation::OutputCount(no));
                }
            }
        }
        classes.insert(class, v);
    }
    BaseClassReport {
        border,
        and_net: and.holds(),
        or_net: or.holds(),
        one_input: ni == 1,
        one_output: no == 1,
        classes,
    }
}

/// Extended free choice: places that share any successor transition share all
/// of them.
pub fn is_free_choice(net: &PetriNet) -> bool {
    let posts: Vec<&BTreeSet<NodeId>> = net.places().iter().map(|p| net.postset(p).expect("place of net")).collect();
    posts.iter().enumerate().all(|(i, a)| posts[i + 1..].iter().all(|b| a.is_disjoint(b) || a == b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::{id, NetBuilder};

    fn set(ids: &[&str]) -> BTreeSet<NodeId> {
        ids.iter().map(|s| id(s)).collect()
    }

    fn wf(b: NetBuilder, i: &[&str], o: &[&str], border: Border) -> WorkflowNet {
        WorkflowNet::new(b.build().unwrap(), set(i), set(o), border).unwrap()
    }

    #[test]
    fn chain_is_an_and_net() {
        let n = wf(
            NetBuilder::new().places(&["p", "q"]).transition("t").fires("t", &["p"], &["q"]),
            &["p"],
            &["q"],
            Border::Place,
        );
        assert!(is_and_net(&n).holds());
        let r = classify_base(&n);
        assert!(r.p_and() && r.p_or_11() && !r.t_or() && !r.t_and_11());
    }

    #[test]
    fn input_place_with_incoming_arc_is_not_and() {
        // two parallel branches where an output place feeds back into the
        // other branch's input place
        let n = wf(
            NetBuilder::new()
                .places(&["i1", "i2", "o1", "o2"])
                .transitions(&["t", "u"])
                .fires("t", &["i1", "i2"], &["o1", "o2"])
                .fires("u", &["o1"], &["i2"]),
            &["i1", "i2"],
            &["o1", "o2"],
            Border::Place,
        );
        let check = is_and_net(&n);
        assert!(check.violations.contains(&ClassViolation::Preset { node: id("i2"), is_input: true, found: 1 }));
    }

    #[test]
    fn cyclic_twf_is_not_and() {
        // t -> p -> t with t the only border transition
        let n = wf(
            NetBuilder::new().place("p").transition("t").fires("t", &["p"], &["p"]),
            &["t"],
            &["t"],
            Border::Transition,
        );
        let check = is_and_net(&n);
        assert!(matches!(check.violations[0], ClassViolation::Cycle(_)));
        assert_eq!(check.violations.len(), 1);
        // the dual restriction is on transitions, so this is a tOR candidate
        // only if t had no arcs; it has both
        assert!(!is_or_net(&n).holds());
    }

    #[test]
    fn or_examples() {
        let chain = wf(
            NetBuilder::new().place("p").transitions(&["t", "u"]).arc("t", "p").arc("p", "u"),
            &["t"],
            &["u"],
            Border::Transition,
        );
        assert!(is_or_net(&chain).holds());
        assert!(classify_base(&chain).t_or());

        let lp =
            wf(NetBuilder::new().place("p").transition("t").fires("t", &["p"], &["p"]), &["p"], &["p"], Border::Place);
        assert!(is_or_net(&lp).holds());
        assert!(classify_base(&lp).p_or_11());
        assert!(!classify_base(&lp).p_and());

        let join = wf(
            NetBuilder::new().places(&["a", "b", "o"]).transition("t").fires("t", &["a", "b"], &["o"]),
            &["a", "b"],
            &["o"],
            Border::Place,
        );
        assert!(!is_or_net(&join).holds());
    }

    #[test]
    fn two_input_tor_is_not_11tand() {
        let n = wf(
            NetBuilder::new().place("p").transitions(&["a", "b", "o"]).arc("a", "p").arc("b", "p").arc("p", "o"),
            &["a", "b"],
            &["o"],
            Border::Transition,
        );
        let r = classify_base(&n);
        assert!(r.t_or());
        assert!(!r.t_and_11());
        assert!(r.classes[&BaseClass::TAnd11].contains(&ClassViolation::InputCount(2)));
        assert_eq!(r.members(), vec![BaseClass::TOr]);
    }

    #[test]
    fn single_place_is_pand_and_11por() {
        let n = wf(NetBuilder::new().place("p"), &["p"], &["p"], Border::Place);
        assert_eq!(classify_base(&n).members(), vec![BaseClass::PAnd, BaseClass::POr11]);
    }

    #[test]
    fn free_choice() {
        let fc = NetBuilder::new()
            .places(&["a", "b"])
            .transitions(&["t", "u"])
            .fires("t", &["a", "b"], &[])
            .fires("u", &["a", "b"], &[])
            .build()
            .unwrap();
        assert!(is_free_choice(&fc));
        let not_fc = NetBuilder::new()
            .places(&["a", "b"])
            .transitions(&["t", "u"])
            .fires("t", &["a", "b"], &[])
            .fires("u", &["a"], &[])
            .build()
            .unwrap();
        assert!(!is_free_choice(&not_fc));
    }

    #[test]
    fn class_names_parse() {
        for c in BaseClass::ALL {
            assert_eq!(c.name().parse::<BaseClass>().unwrap(), c);
        }
        assert!("xAND".parse::<BaseClass>().is_err());
    }
}
