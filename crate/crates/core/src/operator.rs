//! Differential operators `Σ a_β(x) ∂^β` with exponential-sum coefficients.

use std::collections::BTreeMap;

use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::potentials::{expand_potential, PotentialSpec};
use crate::rational::{binomial, ratio, Rational, RationalJson};
use crate::series::{degree, ExpSum};
use crate::{Error, Result};

/// Largest total order an operator may reach.
pub const ORDER_CAP: u32 = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpDiffOp {
    rank: usize,
    ceiling: i64,
    coeffs: BTreeMap<Vec<u32>, ExpSum>,
}

fn order(beta: &[u32]) -> u32 {
    beta.iter().sum()
}

/// All `k ≤ β` componentwise, with `Π C(β_i, k_i)`.
fn sub_indices(beta: &[u32]) -> Vec<(Vec<u32>, Rational)> {
    let mut out = vec![(Vec::new(), Rational::one())];
    for &b in beta {
        let mut next = Vec::with_capacity(out.len() * (b as usize + 1));
        for (k, c) in &out {
            for j in 0..=b {
                let mut k2 = k.clone();
                k2.push(j);
                next.push((k2, c * Rational::from_integer(binomial(b, j))));
            }
        }
        out = next;
    }
    out
}

fn deriv_multi(s: &ExpSum, k: &[u32]) -> ExpSum {
    let mut out = s.clone();
    for (i, &ki) in k.iter().enumerate() {
        out = out.deriv_n(i, ki as usize);
    }
    out
}

impl ExpDiffOp {
    pub fn zero(rank: usize, ceiling: i64) -> Self {
        ExpDiffOp { rank, ceiling, coeffs: BTreeMap::new() }
    }

    /// Multiplication by a function.
    pub fn from_series(s: &ExpSum) -> Self {
        Self::from_parts(s.rank(), s.ceiling(), [(vec![0; s.rank()], s.clone())])
    }

    /// `c · ∂^β`.
    pub fn monomial(beta: Vec<u32>, c: Rational, ceiling: i64) -> Self {
        let n = beta.len();
        Self::from_parts(n, ceiling, [(beta, ExpSum::constant(n, c, ceiling))])
    }

    pub fn partial(rank: usize, i: usize, ceiling: i64) -> Self {
        let mut beta = vec![0; rank];
        beta[i] = 1;
        Self::monomial(beta, Rational::one(), ceiling)
    }

    pub fn laplacian(rank: usize, ceiling: i64) -> Self {
        let mut out = Self::zero(rank, ceiling);
        for i in 0..rank {
            let mut beta = vec![0; rank];
            beta[i] = 2;
            out = out.add(&Self::monomial(beta, Rational::one(), ceiling)).unwrap();
        }
        out
    }

    pub fn from_parts(rank: usize, ceiling: i64, parts: impl IntoIterator<Item = (Vec<u32>, ExpSum)>) -> Self {
        let mut coeffs: BTreeMap<Vec<u32>, ExpSum> = BTreeMap::new();
        let mut ceiling = ceiling;
        let parts: Vec<_> = parts.into_iter().collect();
        for (_, s) in &parts {
            ceiling = ceiling.min(s.ceiling());
        }
        for (beta, s) in parts {
            assert_eq!(beta.len(), rank);
            let s = s.with_ceiling(ceiling);
            let merged = match coeffs.remove(&beta) {
                Some(prev) => prev.add(&s).unwrap(),
                None => s,
            };
            if !merged.is_zero() {
                coeffs.insert(beta, merged);
            }
        }
        ExpDiffOp { rank, ceiling, coeffs }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn ceiling(&self) -> i64 {
        self.ceiling
    }

    pub fn floor(&self) -> i64 {
        self.coeffs.values().map(ExpSum::floor).min().unwrap_or(self.ceiling + 1)
    }

    pub fn order(&self) -> u32 {
        self.coeffs.keys().map(|b| order(b)).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (&Vec<u32>, &ExpSum)> {
        self.coeffs.iter()
    }

    pub fn coefficient(&self, beta: &[u32]) -> ExpSum {
        self.coeffs.get(beta).cloned().unwrap_or_else(|| ExpSum::zero(self.rank, self.ceiling))
    }

    pub fn with_ceiling(&self, ceiling: i64) -> Self {
        Self::from_parts(self.rank, ceiling, self.coeffs.iter().map(|(b, s)| (b.clone(), s.clone())))
    }

    fn check_rank(&self, other: &Self) -> Result<()> {
        if self.rank != other.rank {
            return Err(Error::RankMismatch(self.rank, other.rank));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_rank(other)?;
        Ok(Self::from_parts(
            self.rank,
            self.ceiling.min(other.ceiling),
            self.coeffs.iter().chain(other.coeffs.iter()).map(|(b, s)| (b.clone(), s.clone())),
        ))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::from_parts(self.rank, self.ceiling, self.coeffs.iter().map(|(b, s)| (b.clone(), s.scale(c))))
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    /// `self ∘ other`, by the Leibniz rule.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check_rank(other)?;
        let ceiling = (self.ceiling + other.floor()).min(other.ceiling + self.floor());
        let mut parts = Vec::new();
        for (beta, a) in &self.coeffs {
            for (k, binom) in sub_indices(beta) {
                for (gamma, b) in &other.coeffs {
                    let new: Vec<u32> = (0..self.rank).map(|i| beta[i] + gamma[i] - k[i]).collect();
                    if order(&new) > ORDER_CAP {
                        return Err(Error::OrderCap(order(&new)));
                    }
                    let db = deriv_multi(b, &k);
                    if db.is_zero() {
                        continue;
                    }
                    parts.push((new, a.mul(&db)?.scale(&binom)));
                }
            }
        }
        let parts: Vec<_> = parts.into_iter().map(|(b, s)| (b, s.with_ceiling(ceiling.min(s.ceiling())))).collect();
        Ok(Self::from_parts(self.rank, ceiling, parts))
    }

    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.compose(other)?.sub(&other.compose(self)?)
    }

    /// Formal transpose `ᵗA = Σ (-1)^{|β|} ∂^β ∘ a_β`.
    pub fn adjoint(&self) -> Self {
        let mut parts = Vec::new();
        for (beta, a) in &self.coeffs {
            let sign = if order(beta) % 2 == 0 { Rational::one() } else { -Rational::one() };
            for (k, binom) in sub_indices(beta) {
                let rest: Vec<u32> = beta.iter().zip(&k).map(|(b, k)| b - k).collect();
                parts.push((rest, deriv_multi(a, &k).scale(&(&binom * &sign))));
            }
        }
        Self::from_parts(self.rank, self.ceiling, parts)
    }

    pub fn agrees_with(&self, other: &Self) -> bool {
        let c = self.ceiling.min(other.ceiling);
        self.with_ceiling(c) == other.with_ceiling(c)
    }
}

/// `P = Σ ∂_j² + R(x)`.
pub fn build_p(spec: &PotentialSpec, ceiling: i64) -> Result<ExpDiffOp> {
    let r = expand_potential(spec, ceiling)?;
    ExpDiffOp::laplacian(spec.rank, ceiling).add(&ExpDiffOp::from_series(&r))
}

/// Rank-one function series `u⁺, u⁻, v, w` of a rank-two potential, each in its own
/// variable `τ = e^{-s}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct B2Data {
    pub uplus: ExpSum,
    pub uminus: ExpSum,
    pub v: ExpSum,
    pub w: ExpSum,
}

pub const ROOT_UPLUS: [i64; 2] = [1, 1];
pub const ROOT_UMINUS: [i64; 2] = [1, -1];
pub const ROOT_V: [i64; 2] = [1, 0];
pub const ROOT_W: [i64; 2] = [0, 1];

/// The four functions as rank-two series `(u⁺(x+y), u⁻(x-y), v(x), w(y))`.
pub struct B2Embedded {
    pub uplus: ExpSum,
    pub uminus: ExpSum,
    pub v: ExpSum,
    pub w: ExpSum,
}

impl B2Data {
    pub fn embed(&self) -> Result<B2Embedded> {
        let parts = [
            self.uplus.embed(&ROOT_UPLUS)?,
            self.uminus.embed(&ROOT_UMINUS)?,
            self.v.embed(&ROOT_V)?,
            self.w.embed(&ROOT_W)?,
        ];
        let c = parts.iter().map(ExpSum::ceiling).min().unwrap();
        let [uplus, uminus, v, w] = parts.map(|p| p.with_ceiling(c));
        Ok(B2Embedded { uplus, uminus, v, w })
    }

    pub fn zero(ceiling: i64) -> Self {
        let z = ExpSum::zero(1, ceiling);
        B2Data { uplus: z.clone(), uminus: z.clone(), v: z.clone(), w: z }
    }
}

impl B2Embedded {
    fn b(&self) -> Result<ExpSum> {
        self.uplus.sub(&self.uminus)
    }

    pub fn potential(&self) -> Result<ExpSum> {
        self.uplus.add(&self.uminus)?.add(&self.v)?.add(&self.w)
    }

    /// Right sides of `2T_x = …` and `2T_y = …`, halved.
    fn t_sources(&self) -> Result<(ExpSum, ExpSum)> {
        let half = ratio(1, 2);
        let b = self.b()?;
        let rx = b.mul(&self.w.deriv(1))?.add(&self.w.mul(&b.deriv(1))?.scale(&Rational::from_integer(2.into())))?;
        let ry = b.mul(&self.v.deriv(0))?.add(&self.v.mul(&b.deriv(0))?.scale(&Rational::from_integer(2.into())))?;
        Ok((rx.scale(&half), ry.scale(&half)))
    }
}

/// Left minus right side of the compatibility condition for `T`.
pub fn compat_residual_b2(data: &B2Data) -> Result<ExpSum> {
    let e = data.embed()?;
    let (rx, ry) = e.t_sources()?;
    // ∂_x(2T_y) - ∂_y(2T_x), up to the common factor
    let two = Rational::from_integer(2.into());
    ry.deriv(0).sub(&rx.deriv(1)).map(|s| s.scale(&two))
}

/// Integrates the defining equations of `T`; the constant term of `T` is zero.
pub fn integrate_t(data: &B2Data) -> Result<ExpSum> {
    let e = data.embed()?;
    let (rx, ry) = e.t_sources()?;
    let mut t0 = Vec::new();
    for (k, c) in rx.terms() {
        if k[0] == 0 {
            return Err(Error::ObstructedIntegration(format!("x-independent source term {c} at {k:?}")));
        }
        t0.push((k.clone(), c * ratio(-2, k[0])));
    }
    let t0 = ExpSum::from_terms(2, rx.ceiling(), t0);
    let resid = ry.sub(&t0.deriv(1))?;
    let mut g = Vec::new();
    for (k, c) in resid.terms() {
        if k[0] != 0 {
            return Err(Error::InconsistentPair(format!("coefficient {c} at {k:?}")));
        }
        if k[1] == 0 {
            return Err(Error::InconsistentPair(format!("constant term {c} in the y-equation")));
        }
        g.push((k.clone(), c * ratio(-2, k[1])));
    }
    let g = ExpSum::from_terms(2, resid.ceiling(), g);
    Ok(t0.add(&g)?.strip_constant())
}

/// The partner `Q = (∂_x∂_y + (u⁺-u⁻)/2)² + w∂_x² + v∂_y² + vw + T`.
pub fn build_q_b2(data: &B2Data, t: &ExpSum) -> Result<ExpDiffOp> {
    let e = data.embed()?;
    let c = e.uplus.ceiling().min(t.ceiling());
    let half_b = e.b()?.scale(&ratio(1, 2));
    let inner = ExpDiffOp::monomial(vec![1, 1], Rational::one(), c).add(&ExpDiffOp::from_series(&half_b))?;
    let square = inner.compose(&inner)?;
    let parts = [
        (vec![2, 0], e.w.clone()),
        (vec![0, 2], e.v.clone()),
        (vec![0, 0], e.v.mul(&e.w)?.add(t)?),
    ];
    square.add(&ExpDiffOp::from_parts(2, c, parts))
}

/// `P` and `Q` for rank-two data; `[P,Q]` should vanish.
pub fn build_pq_b2(data: &B2Data) -> Result<(ExpDiffOp, ExpDiffOp)> {
    let e = data.embed()?;
    let r = e.potential()?;
    let p = ExpDiffOp::laplacian(2, r.ceiling()).add(&ExpDiffOp::from_series(&r))?;
    let t = integrate_t(data)?;
    let q = build_q_b2(data, &t)?;
    Ok((p, q))
}

#[derive(Serialize, Deserialize)]
struct OpTermJson {
    mu2: Vec<i64>,
    beta: Vec<u32>,
    num: String,
    den: String,
}

#[derive(Serialize, Deserialize)]
struct OpJson {
    rank: usize,
    ceiling: i64,
    floor: i64,
    terms: Vec<OpTermJson>,
}

impl Serialize for ExpDiffOp {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut terms = Vec::new();
        for (beta, a) in &self.coeffs {
            for (mu2, c) in a.terms() {
                let r = RationalJson::from(c);
                terms.push(OpTermJson { mu2: mu2.clone(), beta: beta.clone(), num: r.num, den: r.den });
            }
        }
        OpJson { rank: self.rank, ceiling: self.ceiling, floor: self.floor(), terms }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ExpDiffOp {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = OpJson::deserialize(d)?;
        let mut parts = Vec::new();
        for t in j.terms {
            if t.mu2.len() != j.rank || t.beta.len() != j.rank {
                return Err(D::Error::custom("term length differs from rank"));
            }
            if degree(&t.mu2) > j.ceiling {
                return Err(D::Error::custom("term above ceiling"));
            }
            let c = Rational::try_from(&RationalJson { num: t.num, den: t.den }).map_err(D::Error::custom)?;
            parts.push((t.beta, ExpSum::monomial(t.mu2, c, j.ceiling)));
        }
        Ok(ExpDiffOp::from_parts(j.rank, j.ceiling, parts))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn e(mu2: Vec<i64>, c: i64) -> ExpDiffOp {
        ExpDiffOp::from_series(&ExpSum::monomial(mu2, rat(c), 40))
    }

    #[test]
    fn product_rule() {
        let d1 = ExpDiffOp::partial(2, 0, 40);
        let got = d1.compose(&e(vec![2, 0], 1)).unwrap();
        let want = ExpDiffOp::from_parts(
            2,
            40,
            [
                (vec![1, 0], ExpSum::monomial(vec![2, 0], rat(1), 40)),
                (vec![0, 0], ExpSum::monomial(vec![2, 0], rat(-1), 40)),
            ],
        );
        assert!(got.agrees_with(&want));
        let c = d1.commutator(&e(vec![2, 0], 1)).unwrap();
        assert!(c.agrees_with(&e(vec![2, 0], -1)));
    }

    #[test]
    fn double_leibniz() {
        let d2 = ExpDiffOp::monomial(vec![2, 0], rat(1), 40);
        let got = d2.compose(&e(vec![2, 0], 1)).unwrap();
        let ex = ExpSum::monomial(vec![2, 0], rat(1), 40);
        let want = ExpDiffOp::from_parts(
            2,
            40,
            [(vec![2, 0], ex.clone()), (vec![1, 0], ex.scale(&rat(-2))), (vec![0, 0], ex)],
        );
        assert!(got.agrees_with(&want));
    }

    #[test]
    fn adjoint_basics() {
        let d1 = ExpDiffOp::partial(2, 0, 40);
        assert!(d1.adjoint().agrees_with(&d1.neg()));
        let f = e(vec![2, 0], 3);
        assert!(f.adjoint().agrees_with(&f));
    }

    #[test]
    fn t_for_toda_like_data() {
        let data = B2Data {
            uplus: ExpSum::zero(1, 24),
            uminus: ExpSum::from_coeffs1(24, [(2, rat(1))]),
            v: ExpSum::from_coeffs1(24, [(-2, rat(1))]),
            w: ExpSum::from_coeffs1(24, [(2, rat(1))]),
        };
        let t = integrate_t(&data).unwrap();
        // ½e^{-x} + ½e^{y}
        let want = ExpSum::from_terms(2, t.ceiling(), [(vec![2, 0], ratio(1, 2)), (vec![0, -2], ratio(1, 2))]);
        assert_eq!(t, want);
        let (p, q) = build_pq_b2(&data).unwrap();
        assert!(p.commutator(&q).unwrap().is_zero());
        assert!(q.adjoint().agrees_with(&q));
    }

    #[test]
    fn zero_data() {
        let data = B2Data::zero(16);
        assert!(integrate_t(&data).unwrap().is_zero());
        let (p, q) = build_pq_b2(&data).unwrap();
        assert!(q.agrees_with(&ExpDiffOp::monomial(vec![2, 2], rat(1), 16)));
        assert!(p.commutator(&q).unwrap().is_zero());
    }

    #[test]
    fn obstructed_integration() {
        // u⁻ = e^{-(x-y)}, w = e^{-3y}, v = 0 violates the compatibility condition
        let data = B2Data {
            uplus: ExpSum::zero(1, 24),
            uminus: ExpSum::from_coeffs1(24, [(2, rat(1))]),
            v: ExpSum::zero(1, 24),
            w: ExpSum::from_coeffs1(24, [(6, rat(1))]),
        };
        assert!(!compat_residual_b2(&data).unwrap().is_zero());
        assert!(matches!(integrate_t(&data), Err(Error::ObstructedIntegration(_)) | Err(Error::InconsistentPair(_))));
    }
}
