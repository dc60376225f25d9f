//! Hierarchical construction and bounded verification of generalized workflow
//! nets.
//!
//! Nets are built by substituting places with place-bordered nets and
//! transitions with transition-bordered nets ([`refine`]), starting from four
//! base classes of AND and OR nets ([`andor`]). The [`soundness`] module checks
//! k-soundness, *-soundness and substitution soundness up to a bound by explicit
//! state-space exploration ([`explore`]).

pub mod andor;
pub mod explore;
pub mod fixtures;
pub mod io;
pub mod marking;
pub mod net;
pub mod refine;
pub mod soundness;
pub mod workflow;

pub use andor::{
    classify_base, decompose_11tand, is_and_net, is_free_choice, is_or_net, random_and_or, random_base, BaseClass,
    BaseClassReport, ExpandError, RefinementTree,
};
pub use explore::{can_reach, explore, Reach, ReachabilityGraph, DEFAULT_CAP};
pub use marking::Marking;
pub use net::{NetBuilder, NetError, NodeId, NodeKind, PetriNet};
pub use soundness::{
    check_k_sound, check_star_sound_bounded, check_sub_sound_bounded, initial_marking, Outcome, SoundnessVerdict,
    StarReport, Witness,
};
pub use workflow::{validate_wf, Border, WorkflowError, WorkflowNet};
