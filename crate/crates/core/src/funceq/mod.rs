//! Residuals of the functional equations, linear solvers, regularity predicates
//! and the classifiers.

use serde::{Deserialize, Serialize};

use crate::rational::Rational;
use crate::series::ExpSum;

pub mod b2;
pub mod bn;
pub mod classify;
pub mod regular;
pub mod type_a;

pub use b2::{b2_decomposition, b2_residual, solve_vw_linear, B2Decomposition, B2Tuple};
pub use bn::{a2b_residual, bn_residual, bn_residual_all, lem_two_case, BnSolution, Geometry, LemTwoCase};
pub use classify::{classify_b2, classify_bn, B2Classification, BnComponent, DEFAULT_WINDOW};
pub use regular::{has_regular_singularity, regular_everywhere, SeriesTuple};
pub use type_a::{ani_residual, extend_a_solution, uijk_residual, ATriple};

/// One nonzero coefficient of a residual. Exponents are in half-units.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Witness {
    pub p: i64,
    pub q: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair: Option<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponent: Option<Vec<i64>>,
    #[serde(with = "crate::rational::as_json")]
    pub value: Rational,
}

impl Witness {
    pub fn pq(p: i64, q: i64, value: Rational) -> Self {
        Witness { p, q, pair: None, exponent: None, value }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub ok: bool,
    pub witnesses: Vec<Witness>,
}

impl ResidualReport {
    pub fn from_witnesses(mut witnesses: Vec<Witness>) -> Self {
        witnesses.sort();
        witnesses.dedup();
        ResidualReport { ok: witnesses.is_empty(), witnesses }
    }

    pub fn merge(reports: impl IntoIterator<Item = ResidualReport>) -> Self {
        Self::from_witnesses(reports.into_iter().flat_map(|r| r.witnesses).collect())
    }
}

/// Coefficient of a rank-one series at `k`: `Some(0)` below the floor, `None` above the ceiling.
pub(crate) fn known(s: &ExpSum, k: i64) -> Option<Rational> {
    s.try_coeff1(k)
}

/// The product `a_i b_j` when it is determined by the truncations.
pub(crate) fn product(a: &ExpSum, i: i64, b: &ExpSum, j: i64) -> Option<Rational> {
    use num_traits::Zero;
    match (known(a, i), known(b, j)) {
        (Some(x), Some(y)) => Some(x * y),
        (Some(x), None) if x.is_zero() => Some(x),
        (None, Some(y)) if y.is_zero() => Some(y),
        _ => None,
    }
}
