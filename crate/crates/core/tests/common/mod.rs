#![allow(dead_code)]

use integrable::catalog::{instantiate, instantiate_b2, Atom, Family, FamilyInstance};
use integrable::funceq::{B2Tuple, BnSolution};
use integrable::rational::{rat, ratio};
use integrable::Rational;
use rand::Rng;

pub const PARAM_SETS: [[i64; 5]; 2] = [[1, 1, 2, 3, 5], [2, 3, 5, 7, 11]];

pub fn params(set: &[i64]) -> Vec<Rational> {
    set.iter().map(|&x| rat(x)).collect()
}

pub fn b2_instance(f: Family, set: &[i64]) -> FamilyInstance {
    FamilyInstance::truncated(f, 2, &params(set), 1)
}

pub fn b2_tuple(f: Family, set: &[i64], ceiling: i64) -> B2Tuple {
    B2Tuple::from_potential(&instantiate_b2(&b2_instance(f, set)).unwrap(), ceiling).unwrap()
}

pub fn bn_solution(f: Family, m: usize, set: &[i64], ceiling: i64) -> BnSolution {
    let inst = FamilyInstance::truncated(f, m, &params(set), 1);
    BnSolution::from_spec(&instantiate(&inst).unwrap(), ceiling).unwrap()
}

pub fn rank_two_families() -> Vec<Family> {
    Family::B2_LIST.into_iter().chain(Family::REGULAR_2).collect()
}

fn small(rng: &mut impl Rng) -> Rational {
    let c = [rat(1), rat(-1), rat(2), rat(-2), ratio(1, 2), ratio(-1, 3), rat(3)];
    c[rng.gen_range(0..c.len())].clone()
}

/// A random standard move that keeps exponents on the half-integer lattice.
pub fn random_atom(rng: &mut impl Rng) -> Atom {
    match rng.gen_range(0..6) {
        0 => Atom::Dual,
        1 => Atom::Translate(small(rng), small(rng)),
        2 => Atom::Scale(rat(2)),
        3 => Atom::ReflectY,
        4 => Atom::ReflectXY,
        _ => Atom::Bilinear { a: small(rng), b: small(rng), c: rat(0), companion: None },
    }
}

pub fn random_record(rng: &mut impl Rng) -> Vec<Atom> {
    (0..rng.gen_range(1..4)).map(|_| random_atom(rng)).collect()
}

/// Same family up to the dual pairing of the regular lists.
pub fn same_family(a: Family, b: Family) -> bool {
    a == b || a.dual_of() == Some(b) || b.dual_of() == Some(a)
}
