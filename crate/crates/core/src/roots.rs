//! Root data of type `B_n` in `ℝⁿ` with the standard inner product.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::linalg;
use crate::rational::{rat, Rational};
use crate::{Error, Result};

pub type Root = Vec<i64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flavor {
    A,
    D,
    B,
}

pub fn unit(n: usize, i: usize) -> Root {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

fn combo(n: usize, i: usize, j: usize, sign: i64) -> Root {
    let mut v = vec![0; n];
    v[i] = 1;
    v[j] += sign;
    v
}

pub fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn neg(a: &[i64]) -> Root {
    a.iter().map(|x| -x).collect()
}

/// Positive roots in the order `e_i - e_j`, `e_i + e_j` (per pair), then `e_k`.
pub fn positive_roots(n: usize, flavor: Flavor) -> Vec<Root> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            out.push(combo(n, i, j, -1));
            if flavor != Flavor::A {
                out.push(combo(n, i, j, 1));
            }
        }
    }
    if flavor == Flavor::B {
        out.extend((0..n).map(|k| unit(n, k)));
    }
    out
}

pub fn is_long(a: &[i64]) -> bool {
    dot(a, a) == 2
}

/// `x - 2⟨v,x⟩/⟨v,v⟩ · v`.
pub fn reflect(v: &[i64], x: &[Rational]) -> Result<Vec<Rational>> {
    let vv = dot(v, v);
    if vv == 0 {
        return Err(Error::ZeroVector);
    }
    let vx: Rational = v.iter().zip(x).map(|(a, b)| rat(*a) * b).sum();
    let f = vx * rat(2) / rat(vv);
    Ok(x.iter().zip(v).map(|(xi, vi)| xi - &f * rat(*vi)).collect())
}

/// Integer reflection; exact for the roots of `Σ(B_n)` acting on integer vectors.
pub fn reflect_int(v: &[i64], x: &[i64]) -> Root {
    let vv = dot(v, v);
    let f = 2 * dot(v, x) / vv;
    x.iter().zip(v).map(|(xi, vi)| xi - f * vi).collect()
}

/// Signed permutation: `e_j ↦ signs[j] · e_{perm[j]}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WeylElement {
    pub perm: Vec<usize>,
    pub signs: Vec<i64>,
}

impl WeylElement {
    pub fn identity(n: usize) -> Self {
        WeylElement { perm: (0..n).collect(), signs: vec![1; n] }
    }

    pub fn rank(&self) -> usize {
        self.perm.len()
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.rank())
    }

    pub fn apply(&self, x: &[i64]) -> Root {
        let mut out = vec![0; x.len()];
        for (j, &xj) in x.iter().enumerate() {
            out[self.perm[j]] = self.signs[j] * xj;
        }
        out
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        let n = self.rank();
        let mut perm = vec![0; n];
        let mut signs = vec![0; n];
        for j in 0..n {
            let k = other.perm[j];
            perm[j] = self.perm[k];
            signs[j] = other.signs[j] * self.signs[k];
        }
        WeylElement { perm, signs }
    }

    pub fn inverse(&self) -> Self {
        let n = self.rank();
        let mut perm = vec![0; n];
        let mut signs = vec![0; n];
        for j in 0..n {
            perm[self.perm[j]] = j;
            signs[self.perm[j]] = self.signs[j];
        }
        WeylElement { perm, signs }
    }

    /// The reflection in a root of `Σ(B_n)`.
    pub fn reflection(alpha: &[i64]) -> Self {
        let n = alpha.len();
        let mut perm = vec![0; n];
        let mut signs = vec![0; n];
        for j in 0..n {
            let img = reflect_int(alpha, &unit(n, j));
            let k = img.iter().position(|&x| x != 0).unwrap();
            perm[j] = k;
            signs[j] = img[k];
        }
        WeylElement { perm, signs }
    }

    /// Every element of `W(B_n)`, identity first, in lexicographic order of `(perm, signs)`
    /// with positive signs before negative ones.
    pub fn all(n: usize) -> Vec<Self> {
        let mut perms: Vec<Vec<usize>> = Vec::new();
        permutations(&mut (0..n).collect(), 0, &mut perms);
        perms.sort();
        let mut out = Vec::with_capacity(perms.len() << n);
        for p in perms {
            for mask in 0..(1u32 << n) {
                let signs = (0..n).map(|j| if mask >> (n - 1 - j) & 1 == 1 { -1 } else { 1 }).collect();
                out.push(WeylElement { perm: p.clone(), signs });
            }
        }
        out
    }
}

fn permutations(v: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == v.len() {
        out.push(v.clone());
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permutations(v, k + 1, out);
        v.swap(k, i);
    }
}

/// `{wα : w ∈ W_F, α ∈ F}`, both signs, sorted.
pub fn generated_subsystem(f: &[Root]) -> Vec<Root> {
    let mut set: BTreeSet<Root> = f.iter().cloned().chain(f.iter().map(|a| neg(a))).collect();
    loop {
        let mut grown = set.clone();
        for a in f {
            for x in &set {
                grown.insert(reflect_int(a, x));
            }
        }
        if grown.len() == set.len() {
            return set.into_iter().collect();
        }
        set = grown;
    }
}

/// Partition of `Δ` by the transitive closure of non-orthogonality.
pub fn irreducible_components(delta: &[Root]) -> Vec<Vec<Root>> {
    let mut comp: Vec<usize> = (0..delta.len()).collect();
    fn find(c: &mut Vec<usize>, i: usize) -> usize {
        if c[i] != i {
            let r = find(c, c[i]);
            c[i] = r;
        }
        c[i]
    }
    for i in 0..delta.len() {
        for j in i + 1..delta.len() {
            if dot(&delta[i], &delta[j]) != 0 {
                let (a, b) = (find(&mut comp, i), find(&mut comp, j));
                comp[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<Root>> = Default::default();
    for (i, r) in delta.iter().enumerate() {
        let c = find(&mut comp, i);
        groups.entry(c).or_default().push(r.clone());
    }
    let mut out: Vec<Vec<Root>> = groups.into_values().collect();
    for g in &mut out {
        g.sort();
        g.dedup();
    }
    out
}

pub fn span_rank(roots: &[Root]) -> usize {
    let m: Vec<Vec<Rational>> = roots.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect();
    linalg::rank(&m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Letter {
    A,
    B,
    D,
    Rank1,
}

/// Cartan type `(letter, rank)` of the root system generated by an irreducible subset.
pub fn component_type(component: &[Root]) -> Result<(Letter, usize)> {
    if component.is_empty() || irreducible_components(component).len() != 1 {
        return Err(Error::NotIrreducible);
    }
    let full = generated_subsystem(component);
    let r = span_rank(&full);
    if r == 1 {
        return Ok((Letter::Rank1, 1));
    }
    let support = (0..component[0].len()).filter(|&i| full.iter().any(|a| a[i] != 0)).count();
    if full.iter().any(|a| !is_long(a)) {
        return Ok((Letter::B, r));
    }
    if r + 1 == support && full.len() == r * (r + 1) {
        return Ok((Letter::A, r));
    }
    if r == support && full.len() == 2 * r * (r - 1) {
        return Ok((Letter::D, r));
    }
    Err(Error::NotIrreducible)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Shape {
    Am,
    Bm,
    Dm,
    EAm,
    EBm,
    EDm,
    BDm,
}

impl Shape {
    pub const ALL: [Shape; 7] = [Shape::Am, Shape::Bm, Shape::Dm, Shape::EAm, Shape::EBm, Shape::EDm, Shape::BDm];

    pub fn min_m(self) -> usize {
        match self {
            Shape::Am | Shape::EAm | Shape::BDm => 3,
            Shape::Bm | Shape::EBm => 2,
            Shape::Dm | Shape::EDm => 4,
        }
    }
}

/// The listed obtuse sets in `ℝᵐ`.
pub fn ext_sets(m: usize, shape: Shape) -> Result<Vec<Root>> {
    if m < shape.min_m() {
        return Err(Error::RankTooSmall { got: m, needed: shape.min_m() });
    }
    let mut s: Vec<Root> = (0..m - 1).map(|i| combo(m, i, i + 1, -1)).collect();
    match shape {
        Shape::Am => {}
        Shape::Bm => s.push(unit(m, m - 1)),
        Shape::Dm => s.push(combo(m, m - 2, m - 1, 1)),
        Shape::EAm => s.push(combo(m, m - 1, 0, -1)),
        Shape::EBm => {
            s.push(unit(m, m - 1));
            s.push(neg(&unit(m, 0)));
        }
        Shape::EDm => {
            s.push(combo(m, m - 2, m - 1, 1));
            s.push(neg(&combo(m, 0, 1, 1)));
        }
        Shape::BDm => {
            s.push(combo(m, m - 2, m - 1, 1));
            s.push(neg(&unit(m, 0)));
        }
    }
    Ok(s)
}

fn pad(r: &[i64], n: usize) -> Root {
    let mut v = r.to_vec();
    v.resize(n, 0);
    v
}

/// A Weyl element carrying the obtuse set `s` onto one of the listed sets, with its shape and `m`.
pub fn obtuse_normal_form(s: &[Root]) -> Result<(WeylElement, Shape, usize)> {
    if s.is_empty() || irreducible_components(s).len() != 1 {
        return Err(Error::NotIrreducible);
    }
    let n = s[0].len();
    if span_rank(s) < 2 {
        return Err(Error::NotIrreducible);
    }
    for (i, a) in s.iter().enumerate() {
        for b in &s[i + 1..] {
            if dot(a, b) > 0 {
                return Err(Error::NotObtuse);
            }
        }
    }
    let target: BTreeSet<Root> = s.iter().cloned().collect();
    let mut candidates = Vec::new();
    for shape in Shape::ALL {
        for m in shape.min_m()..=n {
            let set = ext_sets(m, shape)?;
            if set.len() == target.len() {
                candidates.push((shape, m, set.iter().map(|r| pad(r, n)).collect::<BTreeSet<Root>>()));
            }
        }
    }
    for w in WeylElement::all(n) {
        let img: BTreeSet<Root> = target.iter().map(|r| w.apply(r)).collect();
        if let Some((shape, m, _)) = candidates.iter().find(|(_, _, set)| *set == img) {
            return Ok((w, *shape, *m));
        }
    }
    Err(Error::NotListed)
}
