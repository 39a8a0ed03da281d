//! Exact-arithmetic toolkit for completely integrable Schrödinger operators
//! `P = Δ + R(x)` of classical (type `B_n`) shape.
//!
//! Potentials are handled as truncated exponential sums with exact rational
//! coefficients in the coordinates `t_j = e^{-(x_j - x_{j+1})}`, `t_n = e^{-x_n}`.
//! On top of that substrate the crate provides
//!
//! * [`series`]: the truncated multivariate exponential sums themselves,
//! * [`potentials`]: symbolic one-variable terms (`e^{-rs}`, `sh^{-2}`, `ch`) attached to roots,
//! * [`operator`]: differential operators with series coefficients, and the rank-two partner `Q`,
//! * [`roots`]: `B_n` root data, the signed-permutation Weyl group and subsystem combinatorics,
//! * [`catalog`]: the classified families and the standard transformations on rank-two solutions,
//! * [`funceq`]: coefficient residuals, linear solvers and the classifiers.
//!
//! Every "equals zero" is decided exactly inside a reliable truncation window.
//! Classification is therefore a semi-decision: a result holds up to the window used.

pub mod catalog;
pub mod funceq;
pub mod json;
pub mod linalg;
pub mod operator;
pub mod potentials;
pub mod rational;
pub mod ratfn;
pub mod roots;
pub mod series;

pub use rational::Rational;
pub use series::ExpSum;

/// Default truncation ceiling, in half-units of total `t`-degree.
pub const DEFAULT_CEILING: i64 = 32;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("exponent {0}/2 leaves the half-integer lattice")]
    NonLatticeExponent(String),
    #[error("power of a non-square rational is not rational")]
    IrrationalPower,
    #[error("requested degree {degree} is outside the reliable window (ceiling {ceiling})")]
    OutsideWindow { degree: i64, ceiling: i64 },
    #[error("sh^-2 term does not decay in the positive chamber (root {0:?})")]
    DivergentDirection(Vec<i64>),
    #[error("integration of T obstructed: {0}")]
    ObstructedIntegration(String),
    #[error("T fails the second defining equation: {0}")]
    InconsistentPair(String),
    #[error("reflection in the zero vector")]
    ZeroVector,
    #[error("root subset is not irreducible")]
    NotIrreducible,
    #[error("rank {got} too small for this shape (needs {needed})")]
    RankTooSmall { got: usize, needed: usize },
    #[error("root subset is not obtuse")]
    NotObtuse,
    #[error("subset is not the image of a listed normal form")]
    NotListed,
    #[error("family {tag} expects {expected} parameters, got {got}")]
    BadParameterCount { tag: String, expected: usize, got: usize },
    #[error("side condition violated: {0}")]
    SideConditionViolated(String),
    #[error("leading data does not force the next coefficient: {0}")]
    UnderdeterminedLeading(String),
    #[error("leading data is inconsistent: {0}")]
    Inconsistent(String),
    #[error("empty support")]
    EmptySupport,
    #[error("triple is not one of the admissible long-root patterns")]
    InvalidTriple,
    #[error("series is not a monomial")]
    NotMonomial,
    #[error("input is not a solution within the window")]
    NotASolution,
    #[error("no catalog family matches within the window: {0}")]
    Unrecognized(String),
    #[error("series is not recognisably rational within the window")]
    NotRational,
    #[error("operator order cap exceeded ({0} > 8)")]
    OrderCap(u32),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
