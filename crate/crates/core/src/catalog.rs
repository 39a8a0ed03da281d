//! The classified families as instantiable data, and the standard transformations
//! acting on rank-two solutions.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::funceq::b2::B2Tuple;
use crate::potentials::{B2Potential, PotentialSpec, TermKind, VarTerm};
use crate::rational::{format_rational, parse_rational, rat, Rational};
use crate::ratfn::reflect_series;
use crate::roots::unit;
use crate::series::ExpSum;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    A1Any,
    TrigB2,
    TrigB2S,
    TodaD21Bry,
    TodaD21SBry,
    TodaB21Bry,
    TodaB21SBry,
    TrigA1Bry,
    TrigA1SBry,
    TodaC21,
    TodaC21S,
    TrigBm,
    TrigAmBry,
    TodaBm1Bry,
    TodaCm1,
    TodaDm1Bry,
    TodaAm1,
    TrigAm,
    TodaBm1,
    TodaDm1,
    TodaDmBry,
    TodaAm,
    TodaBCm,
    TodaDm,
    TrigBC2Reg,
    TrigdBC2Reg,
    TodaD2Bry,
    TodadD2Bry,
    TrigA1BryReg,
    TrigdA1BryReg,
    TodaBC2,
    TodadBC2,
    TrigBCmReg,
    TrigAmBryReg,
}

use Family::*;

/// Which ranks a tag lives at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankRule {
    Any,
    Two,
    AtLeastTwo,
}

impl Family {
    pub const ALL: [Family; 34] = [
        A1Any, TrigB2, TrigB2S, TodaD21Bry, TodaD21SBry, TodaB21Bry, TodaB21SBry, TrigA1Bry, TrigA1SBry, TodaC21,
        TodaC21S, TrigBm, TrigAmBry, TodaBm1Bry, TodaCm1, TodaDm1Bry, TodaAm1, TrigAm, TodaBm1, TodaDm1, TodaDmBry,
        TodaAm, TodaBCm, TodaDm, TrigBC2Reg, TrigdBC2Reg, TodaD2Bry, TodadD2Bry, TrigA1BryReg, TrigdA1BryReg,
        TodaBC2, TodadBC2, TrigBCmReg, TrigAmBryReg,
    ];

    /// The ten rank-two families, in the classification order.
    pub const B2_LIST: [Family; 10] =
        [TrigB2, TrigB2S, TodaD21Bry, TodaD21SBry, TodaB21Bry, TodaB21SBry, TrigA1Bry, TrigA1SBry, TodaC21, TodaC21S];

    /// The six families of higher rank.
    pub const BN_LIST: [Family; 6] = [TrigBm, TrigAmBry, TodaBm1Bry, TodaCm1, TodaDm1Bry, TodaAm1];

    pub const SPECIALIZATIONS: [Family; 9] =
        [TrigAm, TodaBm1, TodaDm1, TodaDmBry, TodaAm, TodaBCm, TodaDm, TrigBCmReg, TrigAmBryReg];

    pub const REGULAR_2: [Family; 8] =
        [TrigBC2Reg, TrigdBC2Reg, TodaD2Bry, TodadD2Bry, TrigA1BryReg, TrigdA1BryReg, TodaBC2, TodadBC2];

    pub const REGULAR_N: [Family; 4] = [TrigBCmReg, TrigAmBryReg, TodaDmBry, TodaBCm];

    pub fn name(self) -> &'static str {
        match self {
            A1Any => "A1-any",
            TrigB2 => "Trig-B2",
            TrigB2S => "Trig-B2-S",
            TodaD21Bry => "Toda-D2(1)-bry",
            TodaD21SBry => "Toda-D2(1)-S-bry",
            TodaB21Bry => "Toda-B2(1)-bry",
            TodaB21SBry => "Toda-B2(1)-S-bry",
            TrigA1Bry => "Trig-A1-bry",
            TrigA1SBry => "Trig-A1-S-bry",
            TodaC21 => "Toda-C2(1)",
            TodaC21S => "Toda-C2(1)-S",
            TrigBm => "Trig-Bm",
            TrigAmBry => "Trig-A(m-1)-bry",
            TodaBm1Bry => "Toda-Bm(1)-bry",
            TodaCm1 => "Toda-Cm(1)",
            TodaDm1Bry => "Toda-Dm(1)-bry",
            TodaAm1 => "Toda-A(m-1)(1)",
            TrigAm => "Trig-A(m-1)",
            TodaBm1 => "Toda-Bm(1)",
            TodaDm1 => "Toda-Dm(1)",
            TodaDmBry => "Toda-Dm-bry",
            TodaAm => "Toda-A(m-1)",
            TodaBCm => "Toda-BCm",
            TodaDm => "Toda-Dm",
            TrigBC2Reg => "Trig-BC2-reg",
            TrigdBC2Reg => "Trig^d-BC2-reg",
            TodaD2Bry => "Toda-D2-bry",
            TodadD2Bry => "Toda^d-D2-bry",
            TrigA1BryReg => "Trig-A1-bry-reg",
            TrigdA1BryReg => "Trig^d-A1-bry-reg",
            TodaBC2 => "Toda-BC2",
            TodadBC2 => "Toda^d-BC2",
            TrigBCmReg => "Trig-BCm-reg",
            TrigAmBryReg => "Trig-A(m-1)-bry-reg",
        }
    }

    pub fn param_count(self) -> usize {
        match self {
            A1Any => 0,
            TrigB2S | TodaD21SBry | TodaB21SBry | TrigA1SBry | TodaC21S => 4,
            TodaAm1 | TrigAm | TodaDm1 | TodaAm | TodaDm => 1,
            TodaBm1 | TodaDmBry | TodaBCm | TrigBCmReg | TrigAmBryReg => 3,
            TrigBC2Reg | TrigdBC2Reg | TodaD2Bry | TodadD2Bry | TrigA1BryReg | TrigdA1BryReg | TodaBC2 | TodadBC2 => 3,
            _ => 5,
        }
    }

    pub fn rank_rule(self) -> RankRule {
        if self == A1Any {
            RankRule::Any
        } else if Self::B2_LIST.contains(&self) || Self::REGULAR_2.contains(&self) {
            RankRule::Two
        } else {
            RankRule::AtLeastTwo
        }
    }

    pub fn valid_at(self, rank: usize) -> bool {
        match self.rank_rule() {
            RankRule::Any => rank >= 1,
            RankRule::Two => rank == 2,
            RankRule::AtLeastTwo => rank >= 2,
        }
    }

    /// Parent family and the parent parameter indices that are set to zero.
    pub fn specialization_of(self) -> Option<(Family, &'static [usize])> {
        Some(match self {
            TrigAm => (TrigAmBry, &[1, 2, 3, 4]),
            TodaBm1 => (TodaBm1Bry, &[3, 4]),
            TodaDm1 => (TodaDm1Bry, &[1, 2, 3, 4]),
            TodaDmBry => (TodaBm1Bry, &[1, 2]),
            TodaAm => (TodaCm1, &[1, 2, 3, 4]),
            TodaBCm => (TodaCm1, &[1, 2]),
            TodaDm => (TodaBm1Bry, &[1, 2, 3, 4]),
            TrigBCmReg => (TrigBm, &[3, 4]),
            TrigAmBryReg => (TrigAmBry, &[3, 4]),
            _ => return None,
        })
    }

    /// Base family for the entries generated by the rank-two duality.
    pub fn dual_of(self) -> Option<Family> {
        match self {
            TrigdBC2Reg => Some(TrigBC2Reg),
            TodadD2Bry => Some(TodaD2Bry),
            TrigdA1BryReg => Some(TrigA1BryReg),
            TodadBC2 => Some(TodaBC2),
            _ => None,
        }
    }

    pub fn is_regular(self) -> bool {
        Self::REGULAR_2.contains(&self) || Self::REGULAR_N.contains(&self)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn slug(s: &str) -> String {
    s.chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_ascii_lowercase()
}

impl FromStr for Family {
    type Err = Error;

    /// Accepts the display name or any spelling with the same letters and digits,
    /// e.g. `toda-c2-1` for `Toda-C2(1)`.
    fn from_str(s: &str) -> Result<Self> {
        let key = slug(s);
        Family::ALL
            .into_iter()
            .find(|f| slug(f.name()) == key)
            .ok_or_else(|| Error::Parse(format!("unknown family {s:?}")))
    }
}

impl Serialize for Family {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Family {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A family with rank, parameters and the integer lattice scale `λ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyInstance {
    pub tag: Family,
    pub rank: usize,
    #[serde(with = "crate::rational::vec_as_str")]
    pub params: Vec<Rational>,
    pub scale: i64,
}

impl FamilyInstance {
    pub fn new(tag: Family, rank: usize, params: Vec<Rational>, scale: i64) -> Self {
        FamilyInstance { tag, rank, params, scale }
    }

    /// Takes the first `param_count` entries of `params`.
    pub fn truncated(tag: Family, rank: usize, params: &[Rational], scale: i64) -> Self {
        let k = tag.param_count().min(params.len());
        Self::new(tag, rank, params[..k].to_vec(), scale)
    }

    fn check(&self) -> Result<()> {
        if !self.tag.valid_at(self.rank) {
            return Err(Error::RankMismatch(if self.tag.rank_rule() == RankRule::Two { 2 } else { 3 }, self.rank));
        }
        if self.params.len() != self.tag.param_count() {
            return Err(Error::BadParameterCount {
                tag: self.tag.name().into(),
                expected: self.tag.param_count(),
                got: self.params.len(),
            });
        }
        if self.scale <= 0 {
            return Err(Error::Parse("scale must be a positive integer".into()));
        }
        Ok(())
    }
}

/// A descriptor as listed by `catalog list`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyInfo {
    pub tag: Family,
    pub rank: usize,
    pub param_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parent: Option<Family>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub nulled: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dual_of: Option<Family>,
    pub regular: bool,
}

impl FamilyInfo {
    pub fn of(tag: Family, rank: usize) -> Self {
        let (parent, nulled) = match tag.specialization_of() {
            Some((p, n)) => (Some(p), n.to_vec()),
            None => (None, Vec::new()),
        };
        FamilyInfo { tag, rank, param_count: tag.param_count(), parent, nulled, dual_of: tag.dual_of(), regular: tag.is_regular() }
    }
}

/// All tags valid at rank `n`: the rank-two list at `n = 2`, the higher-rank list with
/// its specializations at `n ≥ 3`, and the trivial tag everywhere.
pub fn list_families(n: usize) -> Vec<Family> {
    let mut out = vec![A1Any];
    match n {
        0 | 1 => {}
        2 => out.extend(Family::B2_LIST),
        _ => {
            out.extend(Family::BN_LIST);
            out.extend(Family::SPECIALIZATIONS);
        }
    }
    out
}

pub fn regular_families(n: usize) -> Vec<Family> {
    match n {
        0 | 1 => Vec::new(),
        2 => Family::REGULAR_2.to_vec(),
        _ => Family::REGULAR_N.to_vec(),
    }
}

fn sh(c: &Rational, r: i64) -> VarTerm {
    VarTerm::new(c.clone(), TermKind::InvSinhSq(rat(r)))
}

fn ch(c: &Rational, r: i64) -> VarTerm {
    VarTerm::new(c.clone(), TermKind::Cosh(rat(r)))
}

/// `c · e^{-r s}`.
fn ex(c: &Rational, r: i64) -> VarTerm {
    VarTerm::new(c.clone(), TermKind::Exp(rat(r)))
}

fn b2(uplus: Vec<VarTerm>, uminus: Vec<VarTerm>, v: Vec<VarTerm>, w: Vec<VarTerm>) -> B2Potential {
    let clean = |ts: Vec<VarTerm>| ts.into_iter().filter(|t| !t.coeff.is_zero()).collect();
    B2Potential { uplus: clean(uplus), uminus: clean(uminus), v: clean(v), w: clean(w) }
}

fn b2_family(tag: Family, c: &[Rational], l: i64) -> B2Potential {
    match tag {
        TrigB2 => {
            let u = vec![sh(&c[0], l)];
            let vw = vec![sh(&c[1], 2 * l), sh(&c[2], l), ch(&c[3], 2 * l), ch(&c[4], 4 * l)];
            b2(u.clone(), u, vw.clone(), vw)
        }
        TrigB2S => {
            let u = vec![sh(&c[0], l), sh(&c[1], 2 * l)];
            let vw = vec![sh(&c[2], 2 * l), ch(&c[3], 4 * l)];
            b2(u.clone(), u, vw.clone(), vw)
        }
        TodaD21Bry => {
            let u = vec![ch(&c[0], 2 * l)];
            b2(u.clone(), u, vec![sh(&c[1], l), sh(&c[2], 2 * l)], vec![sh(&c[3], l), sh(&c[4], 2 * l)])
        }
        TodaD21SBry => {
            let u = vec![ch(&c[0], l), ch(&c[1], 2 * l)];
            b2(u.clone(), u, vec![sh(&c[2], l)], vec![sh(&c[3], l)])
        }
        TodaB21Bry => {
            let u = vec![ex(&c[0], 2 * l)];
            b2(u.clone(), u, vec![ex(&c[1], -2 * l), ex(&c[2], -4 * l)], vec![sh(&c[3], l), sh(&c[4], 2 * l)])
        }
        TodaB21SBry => {
            let u = vec![ex(&c[0], l), ex(&c[1], 2 * l)];
            b2(u.clone(), u, vec![ex(&c[2], -2 * l)], vec![sh(&c[3], l)])
        }
        TrigA1Bry => {
            let vw = vec![ex(&c[1], 2 * l), ex(&c[2], 4 * l), ex(&c[3], -2 * l), ex(&c[4], -4 * l)];
            b2(vec![], vec![sh(&c[0], l)], vw.clone(), vw)
        }
        TrigA1SBry => {
            let vw = vec![ex(&c[2], 4 * l), ex(&c[3], -4 * l)];
            b2(vec![], vec![sh(&c[0], l), sh(&c[1], 2 * l)], vw.clone(), vw)
        }
        TodaC21 => b2(
            vec![],
            vec![ex(&c[0], l)],
            vec![ex(&c[1], -l), ex(&c[2], -2 * l)],
            vec![ex(&c[3], l), ex(&c[4], 2 * l)],
        ),
        TodaC21S => b2(vec![], vec![ex(&c[0], l), ex(&c[1], 2 * l)], vec![ex(&c[2], -2 * l)], vec![ex(&c[3], 2 * l)]),
        TrigBC2Reg => {
            let u = vec![sh(&c[0], l)];
            let vw = vec![sh(&c[1], l), sh(&c[2], 2 * l)];
            b2(u.clone(), u, vw.clone(), vw)
        }
        TodaD2Bry => {
            let u = vec![ex(&c[0], 2 * l)];
            b2(u.clone(), u, vec![], vec![sh(&c[1], l), sh(&c[2], 2 * l)])
        }
        TrigA1BryReg => {
            let vw = vec![ex(&c[1], 2 * l), ex(&c[2], 4 * l)];
            b2(vec![], vec![sh(&c[0], l)], vw.clone(), vw)
        }
        TodaBC2 => b2(vec![], vec![ex(&c[0], l)], vec![], vec![ex(&c[1], l), ex(&c[2], 2 * l)]),
        TrigdBC2Reg | TodadD2Bry | TrigdA1BryReg | TodadBC2 => b2_family(tag.dual_of().unwrap(), c, l).dual(),
        _ => unreachable!("{tag} is not a rank-two family"),
    }
}

fn pair(n: usize, i: usize, j: usize, sign: i64) -> Vec<i64> {
    let mut v = unit(n, i);
    v[j] += sign;
    v
}

fn bn_family(tag: Family, m: usize, c: &[Rational], l: i64) -> PotentialSpec {
    let mut pieces: Vec<(Vec<i64>, Vec<VarTerm>)> = Vec::new();
    let chain = |pieces: &mut Vec<(Vec<i64>, Vec<VarTerm>)>| {
        for i in 0..m - 1 {
            pieces.push((pair(m, i, i + 1, -1), vec![ex(&c[0], 2 * l)]));
        }
    };
    match tag {
        TrigBm => {
            for i in 0..m {
                for j in i + 1..m {
                    pieces.push((pair(m, i, j, 1), vec![sh(&c[0], l)]));
                    pieces.push((pair(m, i, j, -1), vec![sh(&c[0], l)]));
                }
            }
            for k in 0..m {
                pieces.push((unit(m, k), vec![sh(&c[1], 2 * l), sh(&c[2], l), ch(&c[3], 2 * l), ch(&c[4], 4 * l)]));
            }
        }
        TrigAmBry => {
            for i in 0..m {
                for j in i + 1..m {
                    pieces.push((pair(m, i, j, -1), vec![sh(&c[0], l)]));
                }
            }
            for k in 0..m {
                pieces.push((
                    unit(m, k),
                    vec![ex(&c[1], 2 * l), ex(&c[2], 4 * l), ex(&c[3], -2 * l), ex(&c[4], -4 * l)],
                ));
            }
        }
        TodaBm1Bry => {
            chain(&mut pieces);
            pieces.push((pair(m, m - 2, m - 1, 1), vec![ex(&c[0], 2 * l)]));
            pieces.push((unit(m, 0), vec![ex(&c[1], -2 * l), ex(&c[2], -4 * l)]));
            pieces.push((unit(m, m - 1), vec![sh(&c[3], l), sh(&c[4], 2 * l)]));
        }
        TodaCm1 => {
            chain(&mut pieces);
            pieces.push((unit(m, 0), vec![ex(&c[1], -2 * l), ex(&c[2], -4 * l)]));
            pieces.push((unit(m, m - 1), vec![ex(&c[3], 2 * l), ex(&c[4], 4 * l)]));
        }
        TodaDm1Bry => {
            chain(&mut pieces);
            pieces.push((pair(m, m - 2, m - 1, 1), vec![ex(&c[0], 2 * l)]));
            pieces.push((pair(m, 0, 1, 1), vec![ex(&c[0], -2 * l)]));
            pieces.push((unit(m, m - 1), vec![sh(&c[1], l), sh(&c[2], 2 * l)]));
            pieces.push((unit(m, 0), vec![sh(&c[3], l), sh(&c[4], 2 * l)]));
        }
        TodaAm1 => {
            chain(&mut pieces);
            pieces.push((pair(m, 0, m - 1, -1), vec![ex(&c[0], -2 * l)]));
        }
        _ => unreachable!("{tag} is not a higher-rank family"),
    }
    let mut spec = PotentialSpec::from_roots(m, &pieces);
    spec.terms.retain(|t| !t.coeff.is_zero());
    spec
}

/// Expands the parameter vector of a specialization to its parent's, nulled entries zero.
pub fn parent_params(tag: Family, params: &[Rational]) -> Option<(Family, Vec<Rational>)> {
    let (parent, nulled) = tag.specialization_of()?;
    let mut it = params.iter();
    let full = (0..parent.param_count())
        .map(|i| if nulled.contains(&i) { Rational::zero() } else { it.next().cloned().unwrap_or_else(Rational::zero) })
        .collect();
    Some((parent, full))
}

/// The symbolic potential of an instance.
pub fn instantiate(inst: &FamilyInstance) -> Result<PotentialSpec> {
    inst.check()?;
    if inst.tag == A1Any {
        return Ok(PotentialSpec { rank: inst.rank, terms: Vec::new() });
    }
    if let Some((parent, full)) = parent_params(inst.tag, &inst.params) {
        return instantiate(&FamilyInstance::new(parent, inst.rank, full, inst.scale));
    }
    if inst.tag.rank_rule() == RankRule::Two {
        return Ok(b2_family(inst.tag, &inst.params, inst.scale).to_spec());
    }
    Ok(bn_family(inst.tag, inst.rank, &inst.params, inst.scale))
}

/// The rank-two split `(u⁺, u⁻, v, w)` of an instance.
pub fn instantiate_b2(inst: &FamilyInstance) -> Result<B2Potential> {
    inst.check()?;
    if inst.rank != 2 {
        return Err(Error::RankMismatch(2, inst.rank));
    }
    if inst.tag.rank_rule() == RankRule::Two {
        return Ok(b2_family(inst.tag, &inst.params, inst.scale));
    }
    B2Potential::from_spec(&instantiate(inst)?)
}

// ---------------------------------------------------------------------------
// Standard transformations

/// One elementary move on rank-two solutions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Atom {
    /// `(U⁺,U⁻,V,W) ↦ (V, W, U⁺(t²), U⁻(t²))`
    Dual,
    /// `(U⁺(a²b t), U⁻(b t), V(ab t), W(a t))`
    Translate(Rational, Rational),
    /// `t ↦ t^r` in every component.
    Scale(Rational),
    /// `(U⁻, U⁺, V, -W(1/t))`
    ReflectY,
    /// `(U⁺, -U⁻(1/t), W, V)`
    ReflectXY,
    /// `(aU⁺, aU⁻, bV + cS, bW + cT)` with the companion `(S, T)` when `c ≠ 0`.
    Bilinear { a: Rational, b: Rational, c: Rational, companion: Option<(ExpSum, ExpSum)> },
}

pub type TransformationRecord = Vec<Atom>;

fn side(e: Error) -> Error {
    match e {
        Error::IrrationalPower | Error::NonLatticeExponent(_) | Error::NotRational => {
            Error::SideConditionViolated(e.to_string())
        }
        other => other,
    }
}

fn subst(s: &ExpSum, a: &Rational, r: &Rational) -> Result<ExpSum> {
    if s.is_zero() {
        let c = (r.abs() * rat(s.ceiling())).floor().to_integer();
        return Ok(ExpSum::zero(1, i64::try_from(c).unwrap_or(i64::MAX)));
    }
    s.substitute(a, r).map_err(side)
}

fn reflect(s: &ExpSum) -> Result<ExpSum> {
    reflect_series(s).map_err(side)
}

use num_traits::Signed;

impl Atom {
    pub fn apply(&self, sol: &B2Tuple) -> Result<B2Tuple> {
        let one = Rational::one();
        let B2Tuple { uplus, uminus, v, w } = sol;
        Ok(match self {
            Atom::Dual => {
                B2Tuple::new(v.clone(), w.clone(), subst(uplus, &one, &rat(2))?, subst(uminus, &one, &rat(2))?)
            }
            Atom::Translate(a, b) => {
                if a.is_zero() || b.is_zero() {
                    return Err(Error::SideConditionViolated("translation needs nonzero a, b".into()));
                }
                B2Tuple::new(
                    subst(uplus, &(a * a * b), &one)?,
                    subst(uminus, b, &one)?,
                    subst(v, &(a * b), &one)?,
                    subst(w, a, &one)?,
                )
            }
            Atom::Scale(r) => {
                if r.is_zero() {
                    return Err(Error::SideConditionViolated("scaling needs r ≠ 0".into()));
                }
                B2Tuple::new(subst(uplus, &one, r)?, subst(uminus, &one, r)?, subst(v, &one, r)?, subst(w, &one, r)?)
            }
            Atom::ReflectY => B2Tuple::new(uminus.clone(), uplus.clone(), v.clone(), reflect(w)?.neg()),
            Atom::ReflectXY => B2Tuple::new(uplus.clone(), reflect(uminus)?.neg(), w.clone(), v.clone()),
            Atom::Bilinear { a, b, c, companion } => {
                let (mut nv, mut nw) = (v.scale(b), w.scale(b));
                if !c.is_zero() {
                    let (s, t) = companion
                        .as_ref()
                        .ok_or_else(|| Error::SideConditionViolated("bilinear with c ≠ 0 needs a companion".into()))?;
                    nv = nv.add(&s.scale(c))?;
                    nw = nw.add(&t.scale(c))?;
                }
                B2Tuple::new(uplus.scale(a), uminus.scale(a), nv, nw)
            }
        })
    }

    /// An atom sequence undoing this atom.
    pub fn inverse(&self) -> Result<Vec<Atom>> {
        Ok(match self {
            Atom::Dual => vec![Atom::Dual, Atom::Scale(Rational::new(1.into(), 2.into()))],
            Atom::Translate(a, b) => vec![Atom::Translate(a.recip(), b.recip())],
            Atom::Scale(r) => vec![Atom::Scale(r.recip())],
            Atom::ReflectY | Atom::ReflectXY => vec![self.clone()],
            Atom::Bilinear { a, b, c, .. } => {
                if a.is_zero() || b.is_zero() || !c.is_zero() {
                    return Err(Error::SideConditionViolated("bilinear move is not invertible".into()));
                }
                vec![Atom::Bilinear { a: a.recip(), b: b.recip(), c: Rational::zero(), companion: None }]
            }
        })
    }
}

pub fn apply_transformation(record: &[Atom], sol: &B2Tuple) -> Result<B2Tuple> {
    record.iter().try_fold(sol.clone(), |s, a| a.apply(&s))
}

pub fn inverse_record(record: &[Atom]) -> Result<TransformationRecord> {
    let mut out = Vec::new();
    for a in record.iter().rev() {
        out.extend(a.inverse()?);
    }
    Ok(out)
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Dual => write!(f, "dual"),
            Atom::Translate(a, b) => write!(f, "translate:{}:{}", format_rational(a), format_rational(b)),
            Atom::Scale(r) => write!(f, "scale:{}", format_rational(r)),
            Atom::ReflectY => write!(f, "reflect-y"),
            Atom::ReflectXY => write!(f, "reflect-xy"),
            Atom::Bilinear { a, b, c, .. } => {
                if c.is_zero() {
                    write!(f, "bilinear:{}:{}", format_rational(a), format_rational(b))
                } else {
                    write!(f, "bilinear:{}:{}:{}", format_rational(a), format_rational(b), format_rational(c))
                }
            }
        }
    }
}

impl FromStr for Atom {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let bad = || Error::Parse(format!("bad transformation {s:?}"));
        let nz = |x: &str| -> Result<Rational> {
            let r = parse_rational(x)?;
            if r.is_zero() {
                return Err(Error::Parse(format!("{s:?}: arguments must be nonzero")));
            }
            Ok(r)
        };
        match parts.as_slice() {
            ["dual"] => Ok(Atom::Dual),
            ["reflect-y"] => Ok(Atom::ReflectY),
            ["reflect-xy"] => Ok(Atom::ReflectXY),
            ["translate", a, b] => Ok(Atom::Translate(nz(a)?, nz(b)?)),
            ["scale", r] => Ok(Atom::Scale(nz(r)?)),
            ["bilinear", a, b] => {
                Ok(Atom::Bilinear { a: parse_rational(a)?, b: parse_rational(b)?, c: Rational::zero(), companion: None })
            }
            _ => Err(bad()),
        }
    }
}

pub fn parse_record(s: &str) -> Result<TransformationRecord> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(str::parse).collect()
}

pub fn format_record(record: &[Atom]) -> Vec<String> {
    record.iter().map(ToString::to_string).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::expand_potential;
    use crate::rational::ratio;

    #[test]
    fn rank_two_list() {
        let l = list_families(2);
        assert_eq!(l.len(), 11);
        assert!(l.contains(&A1Any));
        assert_eq!(list_families(1), vec![A1Any]);
        for f in Family::BN_LIST {
            assert!(list_families(3).contains(&f));
        }
    }

    #[test]
    fn parse_tags() {
        assert_eq!("toda-c2-1".parse::<Family>().unwrap(), TodaC21);
        assert_eq!("Trig-B2".parse::<Family>().unwrap(), TrigB2);
        assert_eq!("trig-b2".parse::<Family>().unwrap(), TrigB2);
        assert!("nope".parse::<Family>().is_err());
        for f in Family::ALL {
            assert_eq!(f.name().parse::<Family>().unwrap(), f);
        }
    }

    #[test]
    fn toda_a2_affine() {
        let spec = instantiate(&FamilyInstance::new(TodaAm1, 3, vec![rat(1)], 1)).unwrap();
        let s = expand_potential(&spec, 8).unwrap();
        let want = ExpSum::from_terms(3, 8, [(vec![4, -4, 0], rat(1)), (vec![0, 4, -4], rat(1)), (vec![-4, 0, 4], rat(1))]);
        assert_eq!(s, want);
    }

    #[test]
    fn zero_params_zero_potential() {
        let spec = instantiate(&FamilyInstance::new(TrigB2, 2, vec![rat(0); 5], 1)).unwrap();
        assert!(spec.terms.is_empty());
    }

    #[test]
    fn toda_c2_display() {
        let p = instantiate_b2(&FamilyInstance::new(TodaC21, 2, [1, 2, 3, 5, 7].map(rat).to_vec(), 2)).unwrap();
        assert_eq!(p.uminus, vec![ex(&rat(1), 2)]);
        assert_eq!(p.v, vec![ex(&rat(2), -2), ex(&rat(3), -4)]);
        assert_eq!(p.w, vec![ex(&rat(5), 2), ex(&rat(7), 4)]);
        assert!(p.uplus.is_empty());
    }

    #[test]
    fn bad_parameter_count() {
        let e = instantiate(&FamilyInstance::new(TrigB2, 2, vec![rat(1)], 1)).unwrap_err();
        assert!(matches!(e, Error::BadParameterCount { expected: 5, got: 1, .. }));
        assert!(instantiate(&FamilyInstance::new(TrigB2, 3, vec![rat(1); 5], 1)).is_err());
    }

    #[test]
    fn specialization_matches_parent() {
        let special = instantiate(&FamilyInstance::new(TodaBCm, 3, vec![rat(1), rat(2), rat(3)], 1)).unwrap();
        let parent =
            instantiate(&FamilyInstance::new(TodaCm1, 3, vec![rat(1), rat(0), rat(0), rat(2), rat(3)], 1)).unwrap();
        assert_eq!(special, parent);
    }

    #[test]
    fn record_syntax() {
        let r = parse_record("dual,translate:2:3,scale:2,reflect-y").unwrap();
        assert_eq!(r.len(), 4);
        assert_eq!(format_record(&r), vec!["dual", "translate:2:3", "scale:2", "reflect-y"]);
        assert_eq!(parse_record("scale:1/2").unwrap(), vec![Atom::Scale(ratio(1, 2))]);
        assert!(parse_record("translate:0:1").is_err());
    }
}
