//! Misère quotients of finitely generated closed sets of games.
//!
//! A [`ClosedContext`] lists the hereditary closure of some generators as
//! components; positions are exponent vectors over those components. The
//! [`OutcomeOracle`] evaluates misère outcomes of positions, and
//! [`compute_quotient`] builds and certifies the quotient monoid.

mod compute;
mod context;
mod invariants;
mod oracle;
mod pretend;

use thiserror::Error;

use crate::games::GameError;
use crate::monoid::MonoidError;

pub use compute::{
    compute_quotient, compute_quotient_with, position_outcome_via_quotient, verify_quotient,
    Evidence, MultipleFamily, QuotientCaps, QuotientResult, QuotientStatus, Undetermined,
};
pub use context::{ClosedContext, Component, Position, MAX_COMPONENTS};
pub use invariants::quotient_invariant_violations;
pub use oracle::{Cover, OutcomeOracle, MEMO_MAGIC, MEMO_VERSION};
pub use pretend::{
    detect_misere_period, observe_misere_period, pretending_function, MisereCertificate,
    ObservedPeriod, Pretending, PretendingEntry, QuotientSnapshot, Truncation,
};

#[derive(Debug, Error)]
pub enum QuotientError {
    #[error("closure has {size} components, more than the limit of {limit}")]
    TooManyComponents { size: usize, limit: usize },
    #[error("exponent {0} does not fit the memo key")]
    ExponentOverflow(u32),
    #[error("outcome memo exceeded {cap} entries")]
    MemoCapacity { cap: usize },
    #[error("position has {got} entries, context has {expected} components")]
    PositionShape { expected: usize, got: usize },
    #[error("quotient map has {got} entries, context has {expected} components")]
    PhiShape { expected: usize, got: usize },
    #[error("candidate monoid is not reduced")]
    NotReduced,
    #[error("quotient is undetermined")]
    Undetermined,
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Monoid(#[from] MonoidError),
    #[error("memo snapshot: {0}")]
    Snapshot(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
