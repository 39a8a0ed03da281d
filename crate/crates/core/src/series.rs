//! Truncated exponential sums `Σ c_μ e^{-⟨μ,x⟩}` with exact rational coefficients.
//!
//! Frequencies are stored doubled (`mu2 = 2μ`), so `μ ∈ (½)ℤⁿ`. The grading used for
//! truncation is the total degree in `t_j = e^{-(x_j-x_{j+1})}`, `t_n = e^{-x_n}`:
//! `μ` has `t`-exponents `ν_i = μ_1 + … + μ_i`, and the degree is `Σ ν_i`, again
//! counted in half-units.
//!
//! A series carries a `ceiling`: every coefficient of degree `≤ ceiling` is exact,
//! everything above is unknown and never stored. The floor is derived from the
//! stored terms, so it is always the tightest valid lower bound.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{One, Zero};

use crate::rational::{pow_half, rat, Rational};
use crate::{Error, Result};

/// Doubled frequency vector `2μ` of the monomial `e^{-⟨μ,x⟩}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FrequencyVector(pub Vec<i64>);

/// Doubled exponents of `(t_1, …, t_n)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TExponent(pub Vec<i64>);

/// Partial sums `ν_i = μ_1 + … + μ_i`.
pub fn freq_to_texp(mu: &FrequencyVector) -> TExponent {
    let mut acc = 0;
    TExponent(
        mu.0.iter()
            .map(|m| {
                acc += m;
                acc
            })
            .collect(),
    )
}

pub fn texp_to_freq(nu: &TExponent) -> FrequencyVector {
    let mut prev = 0;
    FrequencyVector(
        nu.0.iter()
            .map(|&n| {
                let d = n - prev;
                prev = n;
                d
            })
            .collect(),
    )
}

/// Total `t`-degree (half-units) of a doubled frequency.
#[inline]
pub fn degree(mu2: &[i64]) -> i64 {
    let n = mu2.len() as i64;
    mu2.iter().enumerate().map(|(i, m)| (n - i as i64) * m).sum()
}

#[derive(Clone, PartialEq, Eq)]
pub struct ExpSum {
    rank: usize,
    ceiling: i64,
    terms: BTreeMap<Vec<i64>, Rational>,
}

impl fmt::Debug for ExpSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExpSum(rank {}, ceil {}; ", self.rank, self.ceiling)?;
        for (k, c) in &self.terms {
            write!(f, "{c}·{k:?} ")?;
        }
        write!(f, ")")
    }
}

impl ExpSum {
    pub fn zero(rank: usize, ceiling: i64) -> Self {
        ExpSum { rank, ceiling, terms: BTreeMap::new() }
    }

    pub fn constant(rank: usize, c: Rational, ceiling: i64) -> Self {
        Self::monomial(vec![0; rank], c, ceiling)
    }

    pub fn one(rank: usize, ceiling: i64) -> Self {
        Self::constant(rank, Rational::one(), ceiling)
    }

    /// `c · e^{-⟨μ,x⟩}` with `mu2 = 2μ`; dropped if above the ceiling.
    pub fn monomial(mu2: Vec<i64>, c: Rational, ceiling: i64) -> Self {
        let rank = mu2.len();
        Self::from_terms(rank, ceiling, std::iter::once((mu2, c)))
    }

    /// Builds a series, summing duplicate keys and discarding zeros and terms above the ceiling.
    pub fn from_terms(rank: usize, ceiling: i64, terms: impl IntoIterator<Item = (Vec<i64>, Rational)>) -> Self {
        let mut map: BTreeMap<Vec<i64>, Rational> = BTreeMap::new();
        for (k, c) in terms {
            assert_eq!(k.len(), rank, "frequency length must equal rank");
            if degree(&k) > ceiling || c.is_zero() {
                continue;
            }
            *map.entry(k).or_insert_with(Rational::zero) += c;
        }
        map.retain(|_, c| !c.is_zero());
        ExpSum { rank, ceiling, terms: map }
    }

    /// Rank-one series from `(ν2, c)` pairs, i.e. `Σ c t^{ν2/2}`.
    pub fn from_coeffs1(ceiling: i64, terms: impl IntoIterator<Item = (i64, Rational)>) -> Self {
        Self::from_terms(1, ceiling, terms.into_iter().map(|(k, c)| (vec![k], c)))
    }

    /// Builds from `t`-exponent keys instead of frequencies.
    pub fn from_texp_terms(rank: usize, ceiling: i64, terms: impl IntoIterator<Item = (Vec<i64>, Rational)>) -> Self {
        Self::from_terms(
            rank,
            ceiling,
            terms.into_iter().map(|(nu, c)| (texp_to_freq(&TExponent(nu)).0, c)),
        )
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn ceiling(&self) -> i64 {
        self.ceiling
    }

    /// Tightest lower bound on the degree of any nonzero term of the underlying object.
    pub fn floor(&self) -> i64 {
        self.terms.keys().map(|k| degree(k)).min().unwrap_or(self.ceiling + 1).min(self.ceiling + 1)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &Rational)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> BTreeMap<Vec<i64>, Rational> {
        self.terms
    }

    /// Coefficient of `e^{-⟨μ,x⟩}`; an error when the degree lies above the ceiling.
    pub fn coefficient(&self, mu2: &[i64]) -> Result<Rational> {
        if mu2.len() != self.rank {
            return Err(Error::RankMismatch(self.rank, mu2.len()));
        }
        let d = degree(mu2);
        if d > self.ceiling {
            return Err(Error::OutsideWindow { degree: d, ceiling: self.ceiling });
        }
        Ok(self.terms.get(mu2).cloned().unwrap_or_else(Rational::zero))
    }

    /// Rank-one coefficient of `t^{ν2/2}`.
    pub fn coeff1(&self, nu2: i64) -> Result<Rational> {
        self.coefficient(&[nu2])
    }

    /// Like [`coeff1`](Self::coeff1) but `None` above the ceiling.
    pub fn try_coeff1(&self, nu2: i64) -> Option<Rational> {
        self.coeff1(nu2).ok()
    }

    pub fn with_ceiling(&self, ceiling: i64) -> Self {
        assert!(ceiling <= self.ceiling, "cannot raise a ceiling");
        let mut out = self.clone();
        out.ceiling = ceiling;
        out.terms.retain(|k, _| degree(k) <= ceiling);
        out
    }

    fn check_rank(&self, other: &Self) -> Result<()> {
        if self.rank != other.rank {
            return Err(Error::RankMismatch(self.rank, other.rank));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_rank(other)?;
        let ceiling = self.ceiling.min(other.ceiling);
        Ok(Self::from_terms(
            self.rank,
            ceiling,
            self.terms.iter().chain(other.terms.iter()).map(|(k, c)| (k.clone(), c.clone())),
        ))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.rank, self.ceiling);
        }
        ExpSum {
            rank: self.rank,
            ceiling: self.ceiling,
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect(),
        }
    }

    /// Ceiling of a product: unknown terms of one factor can only reach degrees above
    /// its ceiling plus the other factor's floor.
    pub fn product_ceiling(&self, other: &Self) -> i64 {
        (self.ceiling + other.floor()).min(other.ceiling + self.floor())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_rank(other)?;
        let ceiling = self.product_ceiling(other);
        let mut a: Vec<(i64, &Vec<i64>, &Rational)> = self.terms.iter().map(|(k, c)| (degree(k), k, c)).collect();
        let mut b: Vec<(i64, &Vec<i64>, &Rational)> = other.terms.iter().map(|(k, c)| (degree(k), k, c)).collect();
        a.sort_by_key(|t| t.0);
        b.sort_by_key(|t| t.0);
        let mut acc: HashMap<Vec<i64>, Rational> = HashMap::new();
        for (da, ka, ca) in &a {
            for (db, kb, cb) in &b {
                if da + db > ceiling {
                    break;
                }
                let key: Vec<i64> = ka.iter().zip(kb.iter()).map(|(x, y)| x + y).collect();
                let p = *ca * *cb;
                match acc.get_mut(&key) {
                    Some(v) => *v += p,
                    None => {
                        acc.insert(key, p);
                    }
                }
            }
        }
        Ok(Self::from_terms(self.rank, ceiling, acc))
    }

    /// `∂/∂x_i`, acting diagonally with eigenvalue `-μ_i`.
    pub fn deriv(&self, i: usize) -> Self {
        let half = Rational::new(1.into(), 2.into());
        Self::from_terms(
            self.rank,
            self.ceiling,
            self.terms.iter().map(|(k, c)| (k.clone(), c * rat(-k[i]) * &half)),
        )
    }

    pub fn deriv_n(&self, i: usize, n: usize) -> Self {
        (0..n).fold(self.clone(), |s, _| s.deriv(i))
    }

    /// Drops the frequency-zero term.
    pub fn strip_constant(&self) -> Self {
        let mut out = self.clone();
        out.terms.remove(&vec![0; self.rank]);
        out
    }

    pub fn constant_term(&self) -> Rational {
        self.terms.get(&vec![0; self.rank]).cloned().unwrap_or_else(Rational::zero)
    }

    /// Equality of all coefficients up to the smaller of the two ceilings.
    pub fn agrees_with(&self, other: &Self) -> bool {
        if self.rank != other.rank {
            return false;
        }
        let c = self.ceiling.min(other.ceiling);
        self.with_ceiling(c).terms == other.with_ceiling(c).terms
    }

    /// The rank-one series `U` with `u = t U'(t)`, constant dropped.
    pub fn euler_antiderivative(&self) -> Self {
        assert_eq!(self.rank, 1);
        Self::from_terms(
            1,
            self.ceiling,
            self.terms
                .iter()
                .filter(|(k, _)| k[0] != 0)
                .map(|(k, c)| (k.clone(), c * Rational::new(2.into(), k[0].into()))),
        )
    }

    /// The rank-one series `t U'(t)`.
    pub fn euler_derivative(&self) -> Self {
        assert_eq!(self.rank, 1);
        Self::from_terms(
            1,
            self.ceiling,
            self.terms.iter().map(|(k, c)| (k.clone(), c * Rational::new(k[0].into(), 2.into()))),
        )
    }

    /// `t ↦ scale · t^power` on a rank-one series. Negative powers go through
    /// rational reconstruction of the truncated series.
    pub fn substitute(&self, scale: &Rational, power: &Rational) -> Result<Self> {
        assert_eq!(self.rank, 1, "substitution acts on rank-one series");
        assert!(!scale.is_zero() && !power.is_zero());
        if *power < Rational::zero() {
            let reflected = crate::ratfn::RatFn::reconstruct(self)?.reflect().expand(self.ceiling);
            return reflected.substitute(scale, &-power);
        }
        let new_ceiling = (power * rat(self.ceiling)).floor().to_integer();
        let new_ceiling = i64::try_from(new_ceiling).map_err(|_| Error::Parse("ceiling overflow".into()))?;
        let mut out = Vec::with_capacity(self.terms.len());
        for (k, c) in &self.terms {
            let e = power * rat(k[0]);
            if !e.is_integer() {
                return Err(Error::NonLatticeExponent(e.to_string()));
            }
            let e = i64::try_from(e.to_integer()).unwrap();
            let factor = pow_half(scale, k[0]).ok_or(Error::IrrationalPower)?;
            out.push((vec![e], c * factor));
        }
        Ok(Self::from_terms(1, new_ceiling, out))
    }

    /// Places a rank-one series `Σ c τ^{ν}` on the root `alpha`, `τ = e^{-⟨α,x⟩}`.
    /// `alpha` must have positive `t`-degree.
    pub fn embed(&self, alpha: &[i64]) -> Result<Self> {
        assert_eq!(self.rank, 1);
        let n = alpha.len();
        let deg_alpha = degree(alpha);
        if deg_alpha <= 0 {
            return Err(Error::DivergentDirection(alpha.to_vec()));
        }
        let ceiling = self.ceiling.saturating_mul(deg_alpha);
        Ok(Self::from_terms(
            n,
            ceiling,
            self.terms.iter().map(|(k, c)| (alpha.iter().map(|a| a * k[0]).collect(), c.clone())),
        ))
    }

    pub fn max_abs_exponent(&self) -> i64 {
        self.terms.keys().flat_map(|k| k.iter().map(|x| x.abs())).max().unwrap_or(0)
    }
}

/// Sum of many series of one rank.
pub fn sum_all<'a>(rank: usize, ceiling: i64, items: impl IntoIterator<Item = &'a ExpSum>) -> Result<ExpSum> {
    let mut acc = ExpSum::zero(rank, ceiling);
    let mut terms: Vec<(Vec<i64>, Rational)> = Vec::new();
    for s in items {
        if s.rank != rank {
            return Err(Error::RankMismatch(rank, s.rank));
        }
        acc.ceiling = acc.ceiling.min(s.ceiling);
        terms.extend(s.terms.iter().map(|(k, c)| (k.clone(), c.clone())));
    }
    Ok(ExpSum::from_terms(rank, acc.ceiling, terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn t1(terms: &[(i64, i64)], ceiling: i64) -> ExpSum {
        ExpSum::from_coeffs1(ceiling, terms.iter().map(|&(k, c)| (k, rat(c))))
    }

    #[test]
    fn add_identity_and_cancellation() {
        let s = t1(&[(2, 3), (4, -1)], 10);
        assert_eq!(ExpSum::zero(1, 10).add(&s).unwrap(), s);
        let a = t1(&[(4, 1)], 10);
        assert!(a.add(&a.neg()).unwrap().is_zero());
    }

    #[test]
    fn add_takes_min_ceiling() {
        // (t + t^3, ceiling 3) + (t^2, ceiling 2), in half-units
        let a = t1(&[(2, 1), (6, 1)], 6);
        let b = t1(&[(4, 1)], 4);
        let s = a.add(&b).unwrap();
        assert_eq!(s.ceiling(), 4);
        assert_eq!(s, t1(&[(2, 1), (4, 1)], 4));
    }

    #[test]
    fn geometric_series_times_one_minus_t() {
        let n = 20;
        let geo = t1(&(0..=n).step_by(2).map(|k| (k, 1)).collect::<Vec<_>>(), n);
        let p = geo.mul(&t1(&[(0, 1), (2, -1)], n)).unwrap();
        assert_eq!(p.ceiling(), n);
        assert_eq!(p, t1(&[(0, 1)], n));
    }

    #[test]
    fn laurent_cancellation() {
        let p = t1(&[(-2, 1)], 10).mul(&t1(&[(2, 1)], 10)).unwrap();
        assert_eq!(p.coeff1(0).unwrap(), rat(1));
        // poles shrink the reliable window
        assert_eq!(p.ceiling(), 8);
    }

    #[test]
    fn substitute_examples() {
        let t = t1(&[(2, 1)], 10);
        assert_eq!(t.substitute(&rat(1), &rat(2)).unwrap(), t1(&[(4, 1)], 20));
        assert!(matches!(t.substitute(&rat(1), &ratio(1, 3)), Err(Error::NonLatticeExponent(_))));
        // t/(1-t) -> t^2/(1-t^2)
        let geo = t1(&(2..=16).step_by(2).map(|k| (k, 1)).collect::<Vec<_>>(), 16);
        let sq = geo.substitute(&rat(1), &rat(2)).unwrap();
        assert_eq!(sq, t1(&(4..=32).step_by(4).map(|k| (k, 1)).collect::<Vec<_>>(), 32));
        // scale: t -> 2t on t^{1/2} needs sqrt(2)
        assert_eq!(t1(&[(1, 1)], 4).substitute(&rat(2), &rat(1)), Err(Error::IrrationalPower));
        assert_eq!(t1(&[(1, 1)], 4).substitute(&rat(4), &rat(1)).unwrap(), t1(&[(1, 2)], 4));
    }

    #[test]
    fn coefficient_window() {
        let s = t1(&[(4, 4), (8, 8)], 32);
        assert_eq!(s.coeff1(4).unwrap(), rat(4));
        assert_eq!(s.coeff1(6).unwrap(), rat(0));
        assert!(matches!(s.coeff1(80), Err(Error::OutsideWindow { .. })));
    }

    #[test]
    fn freq_texp_examples() {
        assert_eq!(freq_to_texp(&FrequencyVector(vec![2, 0])), TExponent(vec![2, 2]));
        assert_eq!(freq_to_texp(&FrequencyVector(vec![1, -1])), TExponent(vec![1, 0]));
        assert_eq!(freq_to_texp(&FrequencyVector(vec![0, 0])), TExponent(vec![0, 0]));
    }

    #[test]
    fn rank_mismatch() {
        let a = ExpSum::zero(1, 4);
        let b = ExpSum::zero(2, 4);
        assert_eq!(a.add(&b), Err(Error::RankMismatch(1, 2)));
        assert_eq!(a.mul(&b), Err(Error::RankMismatch(1, 2)));
    }

    #[test]
    fn euler_pair_roundtrip() {
        let u = t1(&[(-2, 3), (2, 1), (6, 5)], 12);
        assert_eq!(u.euler_antiderivative().euler_derivative(), u);
    }
}
