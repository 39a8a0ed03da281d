//! Rank `n` potentials of type `B_n`: one function per positive root.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::type_a::{ani_residual, ATriple};
use super::{ResidualReport, Witness};
use crate::potentials::{expand_var, PotentialSpec};
use crate::ratfn::reflect_series;
use crate::rational::Rational;
use crate::roots::{is_long, positive_roots, unit, Flavor, Root, WeylElement};
use crate::series::{degree, ExpSum};
use crate::{Error, Result};

/// Per positive root `α` of `Σ(B_n)`, the function `u_α` as a series in `τ = e^{-⟨α,x⟩}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BnSolution {
    pub rank: usize,
    #[serde(with = "root_list")]
    pub roots: BTreeMap<Root, ExpSum>,
}

/// JSON object keys must be strings, so the root map is written as `[{"root", "u"}]`.
mod root_list {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Entry {
        root: Root,
        u: ExpSum,
    }

    pub fn serialize<S: Serializer>(m: &BTreeMap<Root, ExpSum>, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<Entry> = m.iter().map(|(root, u)| Entry { root: root.clone(), u: u.clone() }).collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BTreeMap<Root, ExpSum>, D::Error> {
        let v = Vec::<Entry>::deserialize(d)?;
        Ok(v.into_iter().map(|e| (e.root, e.u)).collect())
    }
}

impl BnSolution {
    pub fn new(rank: usize) -> Self {
        BnSolution { rank, roots: BTreeMap::new() }
    }

    /// Sets `u_α`; a zero series removes the root from the support.
    pub fn insert(&mut self, alpha: Root, u: ExpSum) {
        let u = u.strip_constant();
        if u.is_zero() {
            self.roots.remove(&alpha);
        } else {
            self.roots.insert(alpha, u);
        }
    }

    /// Expands each root function far enough for rank-`n` series to reach `ceiling`.
    pub fn from_spec(spec: &PotentialSpec, ceiling: i64) -> Result<Self> {
        let mut out = BnSolution::new(spec.rank);
        for (alpha, terms) in spec.split_by_root()? {
            if alpha.iter().all(|&a| a == 0) {
                continue;
            }
            let d = degree(&alpha);
            out.insert(alpha, expand_var(&terms, (ceiling + d - 1).div_euclid(d))?);
        }
        Ok(out)
    }

    pub fn get(&self, alpha: &[i64]) -> Option<&ExpSum> {
        self.roots.get(alpha)
    }

    /// `Δ`: the roots carrying a nonzero function.
    pub fn support(&self) -> Vec<Root> {
        self.roots.keys().cloned().collect()
    }

    fn embedded(&self, alpha: &[i64], ceiling: i64) -> Result<ExpSum> {
        match self.roots.get(alpha) {
            Some(u) => Ok(u.embed(alpha)?.with_ceiling_at_most(ceiling)),
            None => Ok(ExpSum::zero(self.rank, ceiling)),
        }
    }

    /// `x ↦ w x`: the function on `α` moves to `wα`, reflected when `wα < 0`.
    pub fn weyl(&self, w: &WeylElement) -> Result<Self> {
        let mut out = BnSolution::new(self.rank);
        for (alpha, u) in &self.roots {
            let image = w.apply(alpha);
            if is_pos(&image) {
                out.insert(image, u.clone());
            } else {
                out.insert(image.iter().map(|x| -x).collect(), reflect_series(u)?);
            }
        }
        Ok(out)
    }

    /// The pair `(i, j)` seen as a rank-two tuple `(u_{e_i+e_j}, u_{e_i-e_j}, u_{e_i}, u_{e_j})`
    /// at the potential level.
    pub fn restrict_pair(&self, i: usize, j: usize) -> [Option<&ExpSum>; 4] {
        let n = self.rank;
        let pair = |s: i64| {
            let mut r = unit(n, i);
            r[j] += s;
            r
        };
        [self.get(&pair(1)), self.get(&pair(-1)), self.get(&unit(n, i)), self.get(&unit(n, j))]
    }
}

trait CeilingCap {
    fn with_ceiling_at_most(self, c: i64) -> Self;
}

impl CeilingCap for ExpSum {
    fn with_ceiling_at_most(self, c: i64) -> Self {
        if self.ceiling() > c {
            self.with_ceiling(c)
        } else {
            self
        }
    }
}

pub(crate) fn is_pos(r: &[i64]) -> bool {
    r.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0)
}

fn e_pair(n: usize, a: usize, b: usize, s: i64) -> Root {
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    let mut r = unit(n, lo);
    r[hi] += s;
    r
}

/// `S^{ij} - S^{ji}` as a rank-`n` series.
fn bn_difference(sol: &BnSolution, i: usize, j: usize, ceiling: i64) -> Result<ExpSum> {
    let n = sol.rank;
    let emb = |r: Root| sol.embedded(&r, ceiling);
    let d = |a: usize, b: usize| -> Result<ExpSum> { emb(e_pair(n, a, b, 1))?.sub(&emb(e_pair(n, a, b, -1))?) };
    let others: Vec<usize> = (0..n).filter(|&v| v != i && v != j).collect();
    let a_of = |k: usize| -> Result<ExpSum> {
        let mut acc = emb(unit(n, k))?;
        for &v in &others {
            acc = acc.add(&emb(e_pair(n, k, v, 1))?)?.add(&emb(e_pair(n, k, v, -1))?)?;
        }
        Ok(acc)
    };
    let three = Rational::from_integer(3.into());
    let two = Rational::from_integer(2.into());
    let s_of = |k: usize, l: usize| -> Result<ExpSum> {
        let ak = a_of(k)?;
        let dkl = d(k, l)?;
        let mut s = ak.deriv_n(k, 2).mul(&dkl)?;
        s = s.add(&ak.deriv(k).mul(&dkl.deriv(k))?.scale(&three))?;
        s = s.add(&ak.mul(&dkl.deriv_n(k, 2))?.scale(&two))?;
        for &v in &others {
            s = s.add(&d(k, v)?.deriv_n(k, 2).mul(&d(l, v)?)?)?;
        }
        Ok(s)
    };
    s_of(i, j)?.sub(&s_of(j, i)?)
}

/// Coefficients of `S^{ij} - S^{ji}` up to `ceiling` (degree in half-units).
pub fn bn_residual(sol: &BnSolution, pair: (usize, usize), ceiling: i64) -> Result<ResidualReport> {
    let (i, j) = pair;
    if sol.rank < 2 {
        return Err(Error::RankMismatch(2, sol.rank));
    }
    if i >= sol.rank || j >= sol.rank || i == j {
        return Err(Error::Parse(format!("bad index pair ({i},{j}) for rank {}", sol.rank)));
    }
    let diff = bn_difference(sol, i, j, ceiling)?;
    let wit = diff
        .terms()
        .map(|(k, c)| Witness { p: k[i], q: k[j], pair: Some((i, j)), exponent: Some(k.clone()), value: c.clone() })
        .collect();
    Ok(ResidualReport::from_witnesses(wit))
}

/// [`bn_residual`] over all pairs `i < j`.
pub fn bn_residual_all(sol: &BnSolution, ceiling: i64) -> Result<ResidualReport> {
    let mut reports = Vec::new();
    for i in 0..sol.rank {
        for j in i + 1..sol.rank {
            reports.push(bn_residual(sol, (i, j), ceiling)?);
        }
    }
    Ok(ResidualReport::merge(reports))
}

/// The type-`A` condition on a triple `(α, β, α+β)` of long positive roots, for the
/// functions `U` with `u = tU'`.
pub fn a2b_residual(sol: &BnSolution, alpha: &[i64], beta: &[i64], window: i64) -> Result<ResidualReport> {
    let n = sol.rank;
    let sum: Root = alpha.iter().zip(beta).map(|(a, b)| a + b).collect();
    let long_pos = |r: &[i64]| r.len() == n && is_long(r) && is_pos(r) && positive_roots(n, Flavor::B).iter().any(|x| x == r);
    if !(long_pos(alpha) && long_pos(beta) && long_pos(&sum)) {
        return Err(Error::InvalidTriple);
    }
    let big = |r: &[i64]| {
        sol.get(r).map(ExpSum::euler_antiderivative).unwrap_or_else(|| ExpSum::zero(1, window.max(1) * 4))
    };
    ani_residual(&ATriple::new(big(alpha), big(beta), big(&sum)), window)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Geometry {
    EqualLength,
    LongShort,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LemTwoCase {
    /// `U_β = C t^{±r}`.
    Case1,
    /// `U_β = C₁ t^{±r}/(1-t^{±r}) + C₂ t^{±2r}/(1-t^{±2r})`.
    Case2Geometric,
    /// `U_β = C₁ t^{±r} + C₂ t^{±2r}`.
    Case2Polynomial,
    Violation,
}

/// Fits `target` by a combination of `basis` (coefficients up to the common ceiling).
fn in_span(target: &ExpSum, basis: &[ExpSum]) -> bool {
    let c = basis.iter().map(ExpSum::ceiling).chain([target.ceiling()]).min().unwrap();
    let lo = basis.iter().map(ExpSum::floor).chain([target.floor()]).min().unwrap().min(c);
    let keys: Vec<i64> = (lo..=c).collect();
    let rows: Vec<Vec<Rational>> =
        keys.iter().map(|&k| basis.iter().map(|b| b.coeff1(k).unwrap_or_else(|_| Rational::zero())).collect()).collect();
    let rhs: Vec<Rational> = keys.iter().map(|&k| target.coeff1(k).unwrap_or_else(|_| Rational::zero())).collect();
    crate::linalg::solve(&rows, &rhs).is_some()
}

/// Which of the two cases of the two-root lemma `U_β` falls under, given a monomial `U_α`.
pub fn lem_two_case(ualpha: &ExpSum, ubeta: &ExpSum, geometry: Geometry, sign: i32) -> Result<LemTwoCase> {
    let ua = ualpha.strip_constant();
    if ua.len() != 1 {
        return Err(Error::NotMonomial);
    }
    let r = ua.terms().next().unwrap().0[0];
    let r = if sign > 0 { -r } else { r };
    let c = ubeta.ceiling();
    let ub = ubeta.strip_constant();
    if ub.is_zero() {
        return Ok(LemTwoCase::Violation);
    }
    let mono = |e: i64| ExpSum::from_coeffs1(c, [(e, Rational::one())]);
    let geo = |e: i64| -> Result<ExpSum> {
        if e > 0 {
            Ok(ExpSum::from_coeffs1(c, (1..=c / e).map(|k| (k * e, Rational::one()))))
        } else {
            // t^e/(1-t^e) = -1/(1-t^{-e}) = -1 - t^{-e} - ...; constants are ignored
            Ok(ExpSum::from_coeffs1(c, (1..=c / -e).map(|k| (k * -e, -Rational::one()))).strip_constant())
        }
    };
    match geometry {
        Geometry::EqualLength => {
            Ok(if in_span(&ub, &[mono(r)]) { LemTwoCase::Case1 } else { LemTwoCase::Violation })
        }
        Geometry::LongShort => {
            if in_span(&ub, &[mono(r), mono(2 * r)]) {
                Ok(LemTwoCase::Case2Polynomial)
            } else if r.abs() <= c && in_span(&ub, &[geo(r)?, geo(2 * r)?]) {
                Ok(LemTwoCase::Case2Geometric)
            } else {
                Ok(LemTwoCase::Violation)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn t(terms: &[(i64, i64)], c: i64) -> ExpSum {
        ExpSum::from_coeffs1(c, terms.iter().map(|&(k, v)| (k, rat(v))))
    }

    #[test]
    fn lemma_cases() {
        let ua = t(&[(4, 1)], 16);
        assert_eq!(lem_two_case(&ua, &t(&[(4, 5)], 16), Geometry::EqualLength, -1).unwrap(), LemTwoCase::Case1);
        assert_eq!(lem_two_case(&ua, &t(&[(6, 1)], 16), Geometry::EqualLength, -1).unwrap(), LemTwoCase::Violation);
        assert_eq!(
            lem_two_case(&ua, &t(&[(4, 1), (8, 1)], 16), Geometry::LongShort, -1).unwrap(),
            LemTwoCase::Case2Polynomial
        );
        assert_eq!(lem_two_case(&ua, &t(&[(2, 1), (4, 1)], 16), Geometry::LongShort, -1).unwrap(), LemTwoCase::Violation);
        assert!(matches!(lem_two_case(&t(&[(2, 1), (4, 1)], 16), &ua, Geometry::LongShort, -1), Err(Error::NotMonomial)));
        let geo = t(&[(4, 1), (8, 3), (12, 1), (16, 3)], 16);
        assert_eq!(lem_two_case(&ua, &geo, Geometry::LongShort, -1).unwrap(), LemTwoCase::Case2Geometric);
    }

    #[test]
    fn triple_validation() {
        let sol = BnSolution::new(3);
        assert!(a2b_residual(&sol, &[1, -1, 0], &[0, 1, -1], 8).unwrap().ok);
        assert!(matches!(a2b_residual(&sol, &[1, 0, 0], &[0, 1, 0], 8), Err(Error::InvalidTriple)));
    }

    #[test]
    fn toda_chain_triple() {
        let mut sol = BnSolution::new(3);
        sol.insert(vec![1, -1, 0], t(&[(2, 1)], 24).euler_derivative());
        sol.insert(vec![0, 1, -1], t(&[(2, 1)], 24).euler_derivative());
        sol.insert(vec![1, 0, -1], t(&[(-2, 1)], 24).euler_derivative());
        assert!(a2b_residual(&sol, &[1, -1, 0], &[0, 1, -1], 12).unwrap().ok);
        let mut bad = BnSolution::new(3);
        bad.insert(vec![1, -1, 0], t(&[(2, 1)], 24));
        bad.insert(vec![0, 1, -1], t(&[(4, 1)], 24));
        bad.insert(vec![1, 0, -1], t(&[(6, 1)], 24));
        assert!(!a2b_residual(&bad, &[1, -1, 0], &[0, 1, -1], 12).unwrap().ok);
    }
}
