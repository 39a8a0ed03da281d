//! One-variable potential terms attached to roots, and their expansion near `t = 0`.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::operator::{B2Data, ROOT_UMINUS, ROOT_UPLUS, ROOT_V, ROOT_W};
use crate::rational::{rat, ratio, Rational, RationalJson};
use crate::series::{degree, freq_to_texp, ExpSum, FrequencyVector};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TermKind {
    /// `e^{-r s}`
    Exp(Rational),
    /// `sh^{-2}(r s)`
    InvSinhSq(Rational),
    /// `ch(r s)`
    Cosh(Rational),
    Const,
}

impl TermKind {
    fn freq(&self) -> Option<&Rational> {
        match self {
            TermKind::Exp(r) | TermKind::InvSinhSq(r) | TermKind::Cosh(r) => Some(r),
            TermKind::Const => None,
        }
    }

    /// The same function of `-s`.
    pub fn negate_argument(&self) -> TermKind {
        match self {
            TermKind::Exp(r) => TermKind::Exp(-r),
            other => other.clone(),
        }
    }

    /// The same function of `c s`.
    pub fn rescale_argument(&self, c: &Rational) -> TermKind {
        match self {
            TermKind::Exp(r) => TermKind::Exp(r * c),
            TermKind::InvSinhSq(r) => TermKind::InvSinhSq(r * c),
            TermKind::Cosh(r) => TermKind::Cosh(r * c),
            TermKind::Const => TermKind::Const,
        }
    }
}

/// `coeff · kind(s)` as a function of one variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarTerm {
    pub coeff: Rational,
    pub kind: TermKind,
}

impl VarTerm {
    pub fn new(coeff: Rational, kind: TermKind) -> Self {
        VarTerm { coeff, kind }
    }
}

/// `coeff · kind(⟨root2/2, x⟩)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PotentialTerm {
    pub coeff: Rational,
    pub kind: TermKind,
    pub root2: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PotentialSpec {
    pub rank: usize,
    pub terms: Vec<PotentialTerm>,
}

fn lattice(r: &Rational, v: &[i64]) -> Result<Vec<i64>> {
    v.iter()
        .map(|&x| {
            let e = r * rat(x);
            if e.is_integer() {
                i64::try_from(e.to_integer()).map_err(|_| Error::NonLatticeExponent(e.to_string()))
            } else {
                Err(Error::NonLatticeExponent(e.to_string()))
            }
        })
        .collect()
}

fn check_direction(root2: &[i64]) -> Result<()> {
    let nu = freq_to_texp(&FrequencyVector(root2.to_vec()));
    if nu.0.iter().any(|&x| x < 0) || nu.0.iter().all(|&x| x == 0) {
        return Err(Error::DivergentDirection(root2.to_vec()));
    }
    Ok(())
}

/// Expands `coeff · kind(⟨root2/2,x⟩)` up to `ceiling`.
pub fn expand_term(term: &PotentialTerm, ceiling: i64) -> Result<ExpSum> {
    let n = term.root2.len();
    let c = &term.coeff;
    let half = ratio(1, 2);
    let terms: Vec<(Vec<i64>, Rational)> = match &term.kind {
        TermKind::Const => vec![(vec![0; n], c.clone())],
        TermKind::Exp(r) => vec![(lattice(r, &term.root2)?, c.clone())],
        TermKind::Cosh(r) => vec![
            (lattice(r, &term.root2)?, c * &half),
            (lattice(&-r, &term.root2)?, c * &half),
        ],
        TermKind::InvSinhSq(r) => {
            if r.is_zero() || term.root2.iter().all(|&x| x == 0) {
                return Err(Error::ZeroVector);
            }
            check_direction(&term.root2)?;
            let step = lattice(&(r.abs() * rat(2)), &term.root2)?;
            let d = degree(&step);
            let mut out = Vec::new();
            let mut k = 1i64;
            while k * d <= ceiling {
                out.push((step.iter().map(|s| s * k).collect(), c * rat(4 * k)));
                k += 1;
            }
            out
        }
    };
    if term.kind != TermKind::Const && term.kind.freq().is_some_and(|r| r.is_zero()) {
        return Err(Error::ZeroVector);
    }
    Ok(ExpSum::from_terms(n, ceiling, terms))
}

pub fn expand_potential(spec: &PotentialSpec, ceiling: i64) -> Result<ExpSum> {
    let mut acc = Vec::new();
    for t in &spec.terms {
        if t.root2.len() != spec.rank {
            return Err(Error::RankMismatch(spec.rank, t.root2.len()));
        }
        acc.extend(expand_term(t, ceiling)?.into_terms());
    }
    Ok(ExpSum::from_terms(spec.rank, ceiling, acc))
}

/// Expansion of a one-variable function in `τ = e^{-s}` up to `ceiling` half-units of `τ`.
pub fn expand_var(terms: &[VarTerm], ceiling: i64) -> Result<ExpSum> {
    let spec = PotentialSpec {
        rank: 1,
        terms: terms
            .iter()
            .map(|t| PotentialTerm { coeff: t.coeff.clone(), kind: t.kind.clone(), root2: vec![2] })
            .collect(),
    };
    expand_potential(&spec, ceiling)
}

/// Drops the frequency-zero term from every component.
pub fn strip_constants(series: &[ExpSum]) -> Vec<ExpSum> {
    series.iter().map(ExpSum::strip_constant).collect()
}

/// Whether `v` (undoubled) lies in `Σ(B_n)`.
pub fn is_bn_root(v: &[i64]) -> bool {
    let nz: Vec<i64> = v.iter().copied().filter(|&x| x != 0).collect();
    match nz.len() {
        1 | 2 => nz.iter().all(|x| x.abs() == 1),
        _ => false,
    }
}

/// Positive roots come first lexicographically: the first nonzero entry is positive.
pub fn is_positive(v: &[i64]) -> bool {
    v.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0)
}

impl PotentialSpec {
    /// Groups the terms by positive root of `Σ(B_n)`, rewriting each term as a function
    /// of `⟨α,x⟩` via `u_{-α}(s) = u_α(-s)`. Constants are collected under the zero vector.
    pub fn split_by_root(&self) -> Result<BTreeMap<Vec<i64>, Vec<VarTerm>>> {
        let mut out: BTreeMap<Vec<i64>, Vec<VarTerm>> = BTreeMap::new();
        for t in &self.terms {
            if t.root2.len() != self.rank {
                return Err(Error::RankMismatch(self.rank, t.root2.len()));
            }
            if t.kind == TermKind::Const || t.root2.iter().all(|&x| x == 0) {
                out.entry(vec![0; self.rank]).or_default().push(VarTerm::new(t.coeff.clone(), TermKind::Const));
                continue;
            }
            let g = t.root2.iter().fold(0i64, |g, &x| g.gcd(&x));
            let mut alpha: Vec<i64> = t.root2.iter().map(|x| x / g).collect();
            let mut kind = t.kind.rescale_argument(&ratio(g, 2));
            if !is_bn_root(&alpha) {
                return Err(Error::Parse(format!("root {alpha:?} is not in Σ(B_{})", self.rank)));
            }
            if !is_positive(&alpha) {
                alpha.iter_mut().for_each(|x| *x = -*x);
                kind = kind.negate_argument();
            }
            out.entry(alpha).or_default().push(VarTerm::new(t.coeff.clone(), kind));
        }
        Ok(out)
    }

    /// The potential `R(w⁻¹x)`: every term moves from its root to the image under `w`.
    pub fn weyl(&self, w: &crate::roots::WeylElement) -> Result<Self> {
        if w.rank() != self.rank {
            return Err(Error::RankMismatch(self.rank, w.rank()));
        }
        let terms = self.terms.iter().map(|t| PotentialTerm { root2: w.apply(&t.root2), ..t.clone() }).collect();
        Ok(PotentialSpec { rank: self.rank, terms })
    }

    /// Places one-variable pieces on undoubled roots.
    pub fn from_roots(rank: usize, pieces: &[(Vec<i64>, Vec<VarTerm>)]) -> Self {
        let mut terms = Vec::new();
        for (alpha, vs) in pieces {
            for v in vs {
                if v.coeff.is_zero() {
                    continue;
                }
                terms.push(PotentialTerm {
                    coeff: v.coeff.clone(),
                    kind: v.kind.clone(),
                    root2: alpha.iter().map(|a| 2 * a).collect(),
                });
            }
        }
        PotentialSpec { rank, terms }
    }
}

/// A rank-two potential `u⁺(x+y) + u⁻(x-y) + v(x) + w(y)`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct B2Potential {
    pub uplus: Vec<VarTerm>,
    pub uminus: Vec<VarTerm>,
    pub v: Vec<VarTerm>,
    pub w: Vec<VarTerm>,
}

impl B2Potential {
    pub fn to_spec(&self) -> PotentialSpec {
        PotentialSpec::from_roots(
            2,
            &[
                (ROOT_UPLUS.to_vec(), self.uplus.clone()),
                (ROOT_UMINUS.to_vec(), self.uminus.clone()),
                (ROOT_V.to_vec(), self.v.clone()),
                (ROOT_W.to_vec(), self.w.clone()),
            ],
        )
    }

    /// Splits a rank-two spec by root; constants are dropped.
    pub fn from_spec(spec: &PotentialSpec) -> Result<Self> {
        if spec.rank != 2 {
            return Err(Error::RankMismatch(2, spec.rank));
        }
        let mut out = B2Potential::default();
        for (root, terms) in spec.split_by_root()? {
            let slot = match root.as_slice() {
                [1, 1] => &mut out.uplus,
                [1, -1] => &mut out.uminus,
                [1, 0] => &mut out.v,
                [0, 1] => &mut out.w,
                _ => continue,
            };
            slot.extend(terms);
        }
        Ok(out)
    }

    /// Potential-level dual: `(v, w, 2u⁺(2s), 2u⁻(2s))`.
    pub fn dual(&self) -> Self {
        let double = |ts: &[VarTerm]| -> Vec<VarTerm> {
            ts.iter()
                .map(|t| VarTerm::new(&t.coeff * rat(2), t.kind.rescale_argument(&rat(2))))
                .collect()
        };
        B2Potential { uplus: self.v.clone(), uminus: self.w.clone(), v: double(&self.uplus), w: double(&self.uminus) }
    }

    /// Rank-one expansions, each in its own variable, long enough that the embedded
    /// rank-two series reach `ceiling2`.
    pub fn data(&self, ceiling2: i64) -> Result<B2Data> {
        let ex = |ts: &[VarTerm], root: &[i64; 2]| -> Result<ExpSum> {
            let d = degree(root);
            expand_var(ts, (ceiling2 + d - 1).div_euclid(d))
        };
        Ok(B2Data {
            uplus: ex(&self.uplus, &ROOT_UPLUS)?,
            uminus: ex(&self.uminus, &ROOT_UMINUS)?,
            v: ex(&self.v, &ROOT_V)?,
            w: ex(&self.w, &ROOT_W)?,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    coeff: RationalJson,
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    freq: Option<RationalJson>,
    root2: Vec<i64>,
}

#[derive(Serialize, Deserialize)]
struct SpecJson {
    rank: usize,
    terms: Vec<TermJson>,
}

impl Serialize for PotentialSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let (kind, freq) = match &t.kind {
                    TermKind::Exp(r) => ("exp", Some(r)),
                    TermKind::InvSinhSq(r) => ("invsinhsq", Some(r)),
                    TermKind::Cosh(r) => ("cosh", Some(r)),
                    TermKind::Const => ("const", None),
                };
                TermJson {
                    coeff: (&t.coeff).into(),
                    kind: kind.into(),
                    freq: freq.map(RationalJson::from),
                    root2: t.root2.clone(),
                }
            })
            .collect();
        SpecJson { rank: self.rank, terms }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PotentialSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = SpecJson::deserialize(d)?;
        let mut terms = Vec::new();
        for t in j.terms {
            let coeff = Rational::try_from(&t.coeff).map_err(D::Error::custom)?;
            let freq = || -> std::result::Result<Rational, D::Error> {
                let f = t.freq.as_ref().ok_or_else(|| D::Error::custom("missing freq"))?;
                let r = Rational::try_from(f).map_err(D::Error::custom)?;
                if r.is_zero() {
                    return Err(D::Error::custom("freq must be nonzero"));
                }
                Ok(r)
            };
            let kind = match t.kind.as_str() {
                "exp" => TermKind::Exp(freq()?),
                "invsinhsq" => TermKind::InvSinhSq(freq()?),
                "cosh" => TermKind::Cosh(freq()?),
                "const" => TermKind::Const,
                other => return Err(D::Error::custom(format!("unknown kind {other:?}"))),
            };
            if t.root2.len() != j.rank {
                return Err(D::Error::custom("root2 length differs from rank"));
            }
            terms.push(PotentialTerm { coeff, kind, root2: t.root2 });
        }
        Ok(PotentialSpec { rank: j.rank, terms })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn term(kind: TermKind, root: &[i64]) -> PotentialTerm {
        PotentialTerm { coeff: rat(1), kind, root2: root.iter().map(|x| 2 * x).collect() }
    }

    #[test]
    fn inv_sinh_sq_oracle() {
        let s = expand_term(&term(TermKind::InvSinhSq(rat(1)), &[1]), 12).unwrap();
        // 4e^{-2x}/(1-e^{-2x})^2: t^2, t^4, t^6 are stored as 4, 8, 12 half-units
        let want = ExpSum::from_coeffs1(12, [(4, rat(4)), (8, rat(8)), (12, rat(12))]);
        assert_eq!(s, want);
    }

    #[test]
    fn cosh_and_direction() {
        let s = expand_term(&term(TermKind::Cosh(rat(2)), &[1]), 8).unwrap();
        assert_eq!(s, ExpSum::from_coeffs1(8, [(-4, ratio(1, 2)), (4, ratio(1, 2))]));
        let bad = expand_term(&term(TermKind::InvSinhSq(rat(1)), &[-1, 1]), 8);
        assert!(matches!(bad, Err(Error::DivergentDirection(_))));
    }

    #[test]
    fn toda_a1() {
        let spec = PotentialSpec { rank: 2, terms: vec![term(TermKind::Exp(rat(2)), &[1, -1])] };
        let s = expand_potential(&spec, 32).unwrap();
        assert_eq!(s, ExpSum::from_terms(2, 32, [(vec![4, -4], rat(1))]));
        assert_eq!(crate::series::freq_to_texp(&FrequencyVector(vec![4, -4])).0, vec![4, 0]);
    }

    #[test]
    fn strip_is_idempotent() {
        let a = ExpSum::from_coeffs1(8, [(0, rat(1)), (2, rat(1))]);
        let once = strip_constants(&[a.clone(), ExpSum::constant(1, rat(2), 8)]);
        assert_eq!(once[0], ExpSum::from_coeffs1(8, [(2, rat(1))]));
        assert!(once[1].is_zero());
        assert_eq!(strip_constants(&once), once);
    }

    #[test]
    fn split_normalizes_sign() {
        let spec = PotentialSpec { rank: 2, terms: vec![term(TermKind::Exp(rat(1)), &[-1, 1])] };
        let parts = spec.split_by_root().unwrap();
        assert_eq!(parts[&vec![1, -1]], vec![VarTerm::new(rat(1), TermKind::Exp(rat(-1)))]);
    }

    #[test]
    fn json_roundtrip() {
        let spec = PotentialSpec {
            rank: 2,
            terms: vec![term(TermKind::InvSinhSq(ratio(1, 2)), &[1, 1]), term(TermKind::Const, &[0, 0])],
        };
        let text = serde_json::to_string(&spec).unwrap();
        let back: PotentialSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, spec);
    }
}
