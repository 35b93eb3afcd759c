//! Soft conjunctions for probabilistic rule systems.
//!
//! A conjunction operation maps marginal probabilities `p_1..p_n` to a
//! value for their conjunction. This crate provides:
//!
//! * the soft-conjunction family between the Łukasiewicz t-norm and the
//!   arithmetic average, with Frechet-bound checks ([`conjunction`]);
//! * sampled convexity and bound audits plus cube-vertex decompositions
//!   ([`audit`]);
//! * explicit joint distributions attaining any feasible conjunction
//!   probability ([`joint`]);
//! * a small weighted-rule language with grounding ([`lang`]);
//! * hinge-loss MAP inference, a grid oracle and LP export ([`inference`]).

pub mod audit;
pub mod binary;
pub mod conjunction;
pub mod error;
pub mod fmt;
pub mod inference;
pub mod joint;
pub mod lang;

pub use binary::BinaryVector;
pub use conjunction::{
    apply_checked, check_frechet, eval_average, eval_family, eval_lukasiewicz, frechet_bounds, resolve_c1, Average,
    BoundCheck, BoundSide, ConjunctionOp, FrechetInterval, Lukasiewicz, ProbabilityVector, SoftConjunction,
};
pub use error::{Error, Result};
pub use joint::{construct_joint, joint_conjunction_prob, joint_marginal, JointDistribution};

/// Example programs shipped with the crate.
pub mod models {
    /// `A -> B -> C` with the first rule heavier.
    pub const CHAIN: &str = include_str!("../models/chain.psl");
    /// `A -> B -> C` with the second rule heavier.
    pub const CONFLICT: &str = include_str!("../models/conflict.psl");
    /// Friends-vote-alike over three people and two parties.
    pub const VOTING: &str = include_str!("../models/voting.psl");
    /// The voting model with only `b`'s votes left free.
    pub const VOTING_CLOSED: &str = include_str!("../models/voting_closed.psl");

    /// Name and source of every bundled program.
    pub const ALL: [(&str, &str); 4] =
        [("chain", CHAIN), ("conflict", CONFLICT), ("voting", VOTING), ("voting_closed", VOTING_CLOSED)];
}
