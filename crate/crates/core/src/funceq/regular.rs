//! Regular singularities at infinity.

use std::collections::BTreeMap;

use super::b2::B2Tuple;
use super::bn::{is_pos, BnSolution};
use crate::ratfn::reflect_series;
use crate::roots::{Root, WeylElement};
use crate::series::ExpSum;

/// Anything made of rank-one component series.
pub trait SeriesTuple {
    fn series(&self) -> Vec<&ExpSum>;
}

impl SeriesTuple for B2Tuple {
    fn series(&self) -> Vec<&ExpSum> {
        self.components().to_vec()
    }
}

impl SeriesTuple for BnSolution {
    fn series(&self) -> Vec<&ExpSum> {
        self.roots.values().collect()
    }
}

/// No component has a negative exponent.
pub fn has_regular_singularity<S: SeriesTuple>(sol: &S) -> bool {
    sol.series().iter().all(|s| s.floor() >= 0)
}

/// Regular in every Weyl chart. A root function whose reflection cannot be recovered
/// from the window counts as irregular.
pub fn regular_everywhere(sol: &BnSolution) -> bool {
    let mut forward: BTreeMap<&Root, bool> = BTreeMap::new();
    let mut backward: BTreeMap<&Root, bool> = BTreeMap::new();
    for (alpha, u) in &sol.roots {
        forward.insert(alpha, u.floor() >= 0);
        let back = reflect_series(u).map(|r| r.strip_constant().floor() >= 0).unwrap_or(false);
        backward.insert(alpha, back);
    }
    WeylElement::all(sol.rank).iter().all(|w| {
        sol.roots.keys().all(|alpha| if is_pos(&w.apply(alpha)) { forward[alpha] } else { backward[alpha] })
    })
}
