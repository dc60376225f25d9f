//! Named example nets used by the test suites, the CLI and the committed
//! `fixtures/` corpus.
//!
//! Several of these stand in for nets that appear only as drawings in the
//! literature; they are fixed here by the behaviour they must show, and that
//! behaviour is checked in tests rather than assumed.

use std::collections::BTreeSet;

use crate::andor::RefinementTree;
use crate::net::{id, NetBuilder, NodeId};
use crate::workflow::{Border, WorkflowNet};

fn set(ids: &[&str]) -> BTreeSet<NodeId> {
    ids.iter().map(|s| id(s)).collect()
}

fn wf(name: &str, b: NetBuilder, i: &[&str], o: &[&str], border: Border) -> WorkflowNet {
    let net = b.build().expect("fixture net");
    WorkflowNet::new(net, set(i), set(o), border).expect("fixture workflow net").with_name(name)
}

/// One place that is both input and output.
pub fn single_place() -> WorkflowNet {
    wf("single_place", NetBuilder::new().place("p"), &["p"], &["p"], Border::Place)
}

/// One transition that is both input and output.
pub fn single_transition() -> WorkflowNet {
    wf("single_transition", NetBuilder::new().transition("t"), &["t"], &["t"], Border::Transition)
}

/// The traffic light: `red` stays marked through the red-yellow phase and a
/// control place `ready` keeps `t1` from firing twice in a row.
pub fn traffic_light() -> WorkflowNet {
    wf(
        "traffic_light",
        NetBuilder::new()
            .places(&["red", "ready", "yellow", "green"])
            .transitions(&["t1", "t2", "t3"])
            .fires("t1", &["red", "ready"], &["red", "yellow"])
            .fires("t2", &["red", "yellow"], &["green"])
            .fires("t3", &["green"], &["red", "ready"]),
        &["red", "ready"],
        &["red", "ready"],
        Border::Place,
    )
}

/// 1-sound but not 2-sound: with two tokens, `a` then `b` empties the net
/// into a single `o`.
pub fn one_not_two() -> WorkflowNet {
    wf(
        "one_not_two",
        NetBuilder::new()
            .places(&["i", "p", "o"])
            .transitions(&["a", "b", "c"])
            .fires("a", &["i"], &["p"])
            .fires("c", &["p"], &["o"])
            .fires("b", &["i", "p"], &["o"]),
        &["i"],
        &["o"],
        Border::Place,
    )
}

/// `A: a -> {b, c}`, `B: {b, c} -> c`, I = {a}, O = {c}.
///
/// *-sound, but its output place has an outgoing arc, so removing a finished
/// token from `c` can strand `b`: it is not sub-sound, and `pc(tc(N))`
/// deadlocks in `[b, p_o]`.
pub fn reentrant_output() -> WorkflowNet {
    wf(
        "reentrant_output",
        NetBuilder::new().places(&["a", "b", "c"]).transitions(&["A", "B"]).fires("A", &["a"], &["b", "c"]).fires(
            "B",
            &["b", "c"],
            &["c"],
        ),
        &["a"],
        &["c"],
        Border::Place,
    )
}

/// A sub-sound net that pushes `k` tokens through place `d` and then
/// consumes them one at a time:
///
/// * `S: a -> {b_1..b_k, D_1..D_k}`
/// * `B_i: b_i -> d`
/// * `E_i: {d, D_i} -> e_i`
/// * `J: {e_1..e_k} -> o`
///
/// Substituting a net for `d` that is not sub-sound (such as [`reentrant_output`])
/// yields a net that is not even 1-sound.
pub fn m_k(k: usize) -> WorkflowNet {
    assert!(k >= 1, "m_k needs k >= 1");
    let mut b = NetBuilder::new().places(&["a", "d", "o"]).transitions(&["S", "J"]);
    let mut s_post = Vec::new();
    let mut j_pre = Vec::new();
    for i in 1..=k {
        let (bi, di, ei) = (format!("b_{i}"), format!("D_{i}"), format!("e_{i}"));
        let (bt, et) = (format!("B_{i}"), format!("E_{i}"));
        b = b
            .places(&[bi.as_str(), di.as_str(), ei.as_str()])
            .transitions(&[bt.as_str(), et.as_str()])
            .fires(&bt, &[bi.as_str()], &["d"])
            .fires(&et, &["d", di.as_str()], &[ei.as_str()]);
        s_post.push(bi);
        s_post.push(di);
        j_pre.push(ei);
    }
    let s_post: Vec<&str> = s_post.iter().map(|s| s.as_str()).collect();
    let j_pre: Vec<&str> = j_pre.iter().map(|s| s.as_str()).collect();
    b = b.fires("S", &["a"], &s_post).fires("J", &j_pre, &["o"]);
    wf(&format!("M_{k}"), b, &["a"], &["o"], Border::Place)
}

/// A one-input one-output pOR net whose border nodes lie on a cycle:
/// `x: i -> o`, `y: o -> i`.
pub fn por_border_cycle() -> WorkflowNet {
    wf(
        "por_border_cycle",
        NetBuilder::new().places(&["i", "o"]).transitions(&["x", "y"]).fires("x", &["i"], &["o"]).fires(
            "y",
            &["o"],
            &["i"],
        ),
        &["i"],
        &["o"],
        Border::Place,
    )
}

/// The linear net `a -> T1 -> m -> T2 -> o`, both a pAND and an 11pOR net.
pub fn linear() -> WorkflowNet {
    wf(
        "linear",
        NetBuilder::new().places(&["a", "m", "o"]).transitions(&["T1", "T2"]).fires("T1", &["a"], &["m"]).fires(
            "T2",
            &["m"],
            &["o"],
        ),
        &["a"],
        &["o"],
        Border::Place,
    )
}

/// Two unconnected transitions forming a tOR net with I = O = {x, y}.
pub fn parallel_transitions(x: &str, y: &str) -> WorkflowNet {
    let name = format!("alt_{x}{y}");
    wf(&name, NetBuilder::new().transitions(&[x, y]), &[x, y], &[x, y], Border::Transition)
}

/// Two unconnected places forming a pAND net with I = O = {x, y}.
pub fn parallel_places(x: &str, y: &str) -> WorkflowNet {
    let name = format!("par_{x}{y}");
    wf(&name, NetBuilder::new().places(&[x, y]), &[x, y], &[x, y], Border::Place)
}

/// The linear net with `T1` and `T2` each refined into two alternative
/// transitions and `m` into two parallel places.
pub fn doubled_segment_tree() -> RefinementTree {
    RefinementTree::leaf(linear())
        .refine(id("T1"), RefinementTree::leaf(parallel_transitions("A", "B")))
        .refine(id("m"), RefinementTree::leaf(parallel_places("b", "c")))
        .refine(id("T2"), RefinementTree::leaf(parallel_transitions("C", "D")))
}

pub fn doubled_segment() -> WorkflowNet {
    doubled_segment_tree().expand().expect("fixture tree").with_name("doubled_segment")
}

/// A single place with a self-loop transition, an 11pOR net whose output
/// place has an outgoing arc.
pub fn place_loop() -> WorkflowNet {
    wf(
        "place_loop",
        NetBuilder::new().place("q").transition("l").fires("l", &["q"], &["q"]),
        &["q"],
        &["q"],
        Border::Place,
    )
}

/// [`doubled_segment_tree`] with a loop added to place `b`: still an AND-OR net and
/// sub-sound, but not free-choice.
pub fn fc_counterexample_tree() -> RefinementTree {
    let m = RefinementTree::leaf(parallel_places("b", "c")).refine(id("b"), RefinementTree::leaf(place_loop()));
    RefinementTree::leaf(linear())
        .refine(id("T1"), RefinementTree::leaf(parallel_transitions("A", "B")))
        .refine(id("m"), m)
        .refine(id("T2"), RefinementTree::leaf(parallel_transitions("C", "D")))
}

pub fn fc_counterexample() -> WorkflowNet {
    fc_counterexample_tree().expand().expect("fixture tree").with_name("fc_counterexample")
}

/// A one-input one-output tAND net with two parallel branches, one of them
/// two steps long.
pub fn tand_target() -> WorkflowNet {
    wf(
        "tand_target",
        NetBuilder::new()
            .places(&["a", "b", "c"])
            .transitions(&["t_i", "u", "t_o"])
            .fires("t_i", &[], &["a", "b"])
            .fires("u", &["a"], &["c"])
            .fires("t_o", &["b", "c"], &[]),
        &["t_i"],
        &["t_o"],
        Border::Transition,
    )
}

/// The tOR skeleton `t_i -> p -> t_o`.
pub fn tand_skeleton() -> WorkflowNet {
    wf(
        "tand_skeleton",
        NetBuilder::new().place("p").transitions(&["t_i", "t_o"]).arc("t_i", "p").arc("p", "t_o"),
        &["t_i"],
        &["t_o"],
        Border::Transition,
    )
}

/// The pAND net between `t_i` and `t_o` of [`tand_target`].
pub fn tand_inner() -> WorkflowNet {
    wf(
        "tand_inner",
        NetBuilder::new().places(&["a", "b", "c"]).transition("u").fires("u", &["a"], &["c"]),
        &["a", "b"],
        &["b", "c"],
        Border::Place,
    )
}
