//! Bounded checks for k-soundness, *-soundness and substitution soundness.
//!
//! A pWF net is k-sound when every marking reachable from `k.I` can still reach
//! `k.O`. It is substitution sound (sub-sound) when, for all `k >= k' >= 0`,
//! whenever `k.I ->* m' + k'.O` the remainder satisfies `m' ->* (k-k').O`.
//! Transition-bordered nets are checked through their place completion.
//!
//! Both *-soundness and sub-soundness quantify over every `k`; the checkers here
//! stop at a caller-supplied bound `K`, so a `Sound` outcome from them means
//! "sound for every k up to K". Every exploration is capped, and hitting a cap
//! without having found a counterexample yields `Unknown`.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::explore::{Compiled, Dense, StateSpace};
use crate::marking::Marking;
use crate::net::NodeId;
use crate::refine::place_completion;
use crate::workflow::{Border, WorkflowNet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SoundnessError {
    #[error("initial and final markings are only defined for place-bordered nets; complete the net first")]
    TransitionBordered,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Sound,
    Unsound,
    Unknown,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Sound => "Sound",
            Outcome::Unsound => "Unsound",
            Outcome::Unknown => "Unknown",
        })
    }
}

/// A counterexample: starting from `k.I`, `trace` reaches `reached`; after
/// removing `removed.O` the remainder `stranded` cannot reach `(k-removed).O`.
///
/// For plain k-soundness `removed` is 0 and `stranded == reached`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub k: u32,
    pub removed: u32,
    pub reached: Marking,
    pub stranded: Marking,
    pub trace: Vec<NodeId>,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let trace: Vec<&str> = self.trace.iter().map(|t| t.as_str()).collect();
        write!(
            f,
            "k={} k'={} trace=({}) reached={} stranded={}",
            self.k,
            self.removed,
            trace.join(", "),
            self.reached,
            self.stranded
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SoundnessVerdict {
    pub outcome: Outcome,
    pub witness: Option<Witness>,
    /// Total states visited over every exploration made for this verdict.
    pub states_explored: usize,
}

impl SoundnessVerdict {
    pub fn is_sound(&self) -> bool {
        self.outcome == Outcome::Sound
    }

    pub fn is_unsound(&self) -> bool {
        self.outcome == Outcome::Unsound
    }
}

/// Per-k verdicts of a bounded *-soundness check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarReport {
    pub per_k: Vec<(u32, SoundnessVerdict)>,
}

impl StarReport {
    /// Unsound if any k is, else Unknown if any k is, else Sound (up to the bound).
    pub fn aggregate(&self) -> Outcome {
        let outcomes = || self.per_k.iter().map(|(_, v)| v.outcome);
        if outcomes().any(|o| o == Outcome::Unsound) {
            Outcome::Unsound
        } else if outcomes().any(|o| o == Outcome::Unknown) {
            Outcome::Unknown
        } else {
            Outcome::Sound
        }
    }

    pub fn first_unsound(&self) -> Option<&(u32, SoundnessVerdict)> {
        self.per_k.iter().find(|(_, v)| v.is_unsound())
    }

    pub fn states_explored(&self) -> usize {
        self.per_k.iter().map(|(_, v)| v.states_explored).sum()
    }
}

/// `k.I` for a place-bordered net.
pub fn initial_marking(wf: &WorkflowNet, k: u32) -> Result<Marking, SoundnessError> {
    if wf.border() != Border::Place {
        return Err(SoundnessError::TransitionBordered);
    }
    Ok(Marking::from_set(wf.inputs()).scale(k))
}

/// `k.O` for a place-bordered net.
pub fn final_marking(wf: &WorkflowNet, k: u32) -> Result<Marking, SoundnessError> {
    if wf.border() != Border::Place {
        return Err(SoundnessError::TransitionBordered);
    }
    Ok(Marking::from_set(wf.outputs()).scale(k))
}

/// The place-bordered net the definitions are evaluated on.
fn as_place_bordered(wf: &WorkflowNet) -> WorkflowNet {
    match wf.border() {
        Border::Place => wf.clone(),
        Border::Transition => place_completion(wf).expect("tWF nets have a place completion"),
    }
}

enum Answer {
    Yes,
    No,
    Unknown,
}

/// Reachability oracle for "can `m` reach `target`", memoized per target.
///
/// Each miss runs a fresh forward search from `m`. When that search closes, every
/// state in it is labelled: a closed forward set contains all successors of its
/// members, so a member that cannot reach the target inside the set cannot reach
/// it at all.
struct Oracle<'a> {
    net: &'a Compiled,
    cap: usize,
    explored: usize,
    labels: HashMap<Dense, HashMap<Dense, bool>>,
}

impl<'a> Oracle<'a> {
    fn new(net: &'a Compiled, cap: usize) -> Self {
        Oracle { net, cap, explored: 0, labels: HashMap::new() }
    }

    fn learn(&mut self, space: &StateSpace, target: &Dense) {
        let good = space.backward_from(|s| s == &target[..]);
        let labels = self.labels.entry(target.clone()).or_default();
        for (state, ok) in space.states.iter().zip(good) {
            if ok || !space.truncated {
                labels.insert(state.clone(), ok);
            }
        }
    }

    fn known(&self, from: &Dense, target: &Dense) -> Option<bool> {
        self.labels.get(target)?.get(from).copied()
    }

    fn query(&mut self, from: &Dense, target: &Dense) -> Answer {
        if self.known(from, target).is_none() {
            let space = StateSpace::bfs(self.net, from.clone(), self.cap, None);
            self.explored += space.states.len();
            self.learn(&space, target);
        }
        match self.known(from, target) {
            Some(true) => Answer::Yes,
            Some(false) => Answer::No,
            None => Answer::Unknown,
        }
    }
}

struct Setting {
    net: WorkflowNet,
    compiled: Compiled,
}

impl Setting {
    fn new(wf: &WorkflowNet) -> Self {
        let net = as_place_bordered(wf);
        let compiled = Compiled::new(net.net(), []);
        Setting { net, compiled }
    }

    fn bag(&self, k: u32, output: bool) -> Dense {
        let m = if output { final_marking(&self.net, k) } else { initial_marking(&self.net, k) };
        self.compiled.dense(&m.expect("place-bordered"))
    }

    fn trace(&self, space: &StateSpace, state: usize) -> Vec<NodeId> {
        space.trace_to(state).into_iter().map(|t| self.compiled.transitions[t].id.clone()).collect()
    }
}

/// Checks k-soundness; tWF nets are checked via their place completion.
pub fn check_k_sound(wf: &WorkflowNet, k: u32, cap: usize) -> SoundnessVerdict {
    let setting = Setting::new(wf);
    let mut oracle = Oracle::new(&setting.compiled, cap);
    check_k(&setting, &mut oracle, k.max(1), false)
}

/// Checks k-soundness for every `k` in `1..=bound`.
pub fn check_star_sound_bounded(wf: &WorkflowNet, bound: u32, cap: usize) -> StarReport {
    let setting = Setting::new(wf);
    let per_k = (1..=bound.max(1))
        .map(|k| {
            let mut oracle = Oracle::new(&setting.compiled, cap);
            (k, check_k(&setting, &mut oracle, k, false))
        })
        .collect();
    StarReport { per_k }
}

/// Checks substitution soundness for every `k` in `1..=bound`.
pub fn check_sub_sound_bounded(wf: &WorkflowNet, bound: u32, cap: usize) -> SoundnessVerdict {
    let setting = Setting::new(wf);
    let mut oracle = Oracle::new(&setting.compiled, cap);
    let mut unknown = false;
    for k in 1..=bound.max(1) {
        let verdict = check_k(&setting, &mut oracle, k, true);
        match verdict.outcome {
            Outcome::Unsound => {
                return SoundnessVerdict { states_explored: oracle.explored, ..verdict };
            }
            Outcome::Unknown => unknown = true,
            Outcome::Sound => {}
        }
    }
    SoundnessVerdict {
        outcome: if unknown { Outcome::Unknown } else { Outcome::Sound },
        witness: None,
        states_explored: oracle.explored,
    }
}

/// Explores from `k.I` and tests every reachable marking in BFS order. With
/// `with_removal`, each marking is also tested after removing `k'.O` for every
/// `k'` in `1..=k` that fits.
fn check_k(setting: &Setting, oracle: &mut Oracle<'_>, k: u32, with_removal: bool) -> SoundnessVerdict {
    let start_explored = oracle.explored;
    let root = setting.bag(k, false);
    let outer = StateSpace::bfs(oracle.net, root, oracle.cap, None);
    oracle.explored += outer.states.len();
    let full_target = setting.bag(k, true);
    oracle.learn(&outer, &full_target);

    let outputs: Vec<usize> =
        setting.net.outputs().iter().map(|o| setting.compiled.place_index(o).expect("output place")).collect();
    let max_removed = if with_removal { k } else { 0 };
    let mut unknown = outer.truncated;

    for (i, m) in outer.states.iter().enumerate() {
        for removed in 0..=max_removed {
            if outputs.iter().any(|&o| m[o] < removed) {
                break;
            }
            let mut remainder = m.clone();
            for &o in &outputs {
                remainder[o] -= removed;
            }
            let target = setting.bag(k - removed, true);
            match oracle.query(&remainder, &target) {
                Answer::Yes => {}
                Answer::Unknown => unknown = true,
                Answer::No => {
                    return SoundnessVerdict {
                        outcome: Outcome::Unsound,
                        witness: Some(Witness {
                            k,
                            removed,
                            reached: setting.compiled.sparse(m),
                            stranded: setting.compiled.sparse(&remainder),
                            trace: setting.trace(&outer, i),
                        }),
                        states_explored: oracle.explored - start_explored,
                    };
                }
            }
        }
    }
    SoundnessVerdict {
        outcome: if unknown { Outcome::Unknown } else { Outcome::Sound },
        witness: None,
        states_explored: oracle.explored - start_explored,
    }
}
