//! Type `A` triples `(U_ij, U_jk, U_ik)`.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{product, ResidualReport, Witness};
use crate::rational::Rational;
use crate::series::ExpSum;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ATriple {
    pub uij: ExpSum,
    pub ujk: ExpSum,
    pub uik: ExpSum,
}

impl ATriple {
    pub fn new(uij: ExpSum, ujk: ExpSum, uik: ExpSum) -> Self {
        ATriple { uij: uij.strip_constant(), ujk: ujk.strip_constant(), uik: uik.strip_constant() }
    }

    fn parts(&self) -> [&ExpSum; 3] {
        [&self.uij, &self.ujk, &self.uik]
    }
}

fn bracket(a: &ATriple, p: i64, q: i64) -> Option<Rational> {
    let x = product(&a.uij, p, &a.ujk, q)?;
    let y = product(&a.uij, p - q, &a.uik, q)?;
    let z = product(&a.ujk, q - p, &a.uik, p)?;
    Some(x - y - z)
}

/// `C^{ij}_p C^{jk}_q - C^{ij}_{p-q} C^{ik}_q - C^{jk}_{q-p} C^{ik}_p` for
/// `|p|, |q| ≤ window` with `pq(p-q) ≠ 0`. Undetermined pairs are skipped.
pub fn ani_residual(a: &ATriple, window: i64) -> Result<ResidualReport> {
    if let Some(c) = a.parts().iter().filter(|s| !s.is_zero()).map(|s| s.ceiling()).min() {
        if window > c {
            return Err(Error::OutsideWindow { degree: window, ceiling: c });
        }
    }
    let mut wit = Vec::new();
    for p in -window..=window {
        for q in -window..=window {
            if p == 0 || q == 0 || p == q {
                continue;
            }
            if let Some(x) = bracket(a, p, q) {
                if !x.is_zero() {
                    wit.push(Witness::pq(p, q, x));
                }
            }
        }
    }
    Ok(ResidualReport::from_witnesses(wit))
}

/// Assembles `U_ijk` in the variables `a = t_i⋯t_{j-1}`, `b = t_j⋯t_{k-1}` from
/// `u = tU'` and reports its nonzero coefficients with `|p|, |q| ≤ window`.
pub fn uijk_residual(a: &ATriple, window: i64) -> Result<ResidualReport> {
    let lift = |s: &ExpSum, dir: [i64; 2]| -> Result<(ExpSum, ExpSum)> {
        let c = s.euler_derivative();
        let d = c.euler_derivative();
        Ok((c.embed(&dir)?, d.embed(&dir)?))
    };
    let (cij, dij) = lift(&a.uij, [1, 0])?;
    let (cjk, djk) = lift(&a.ujk, [0, 1])?;
    let (cik, dik) = lift(&a.uik, [1, 1])?;
    let t1 = cjk.mul(&dij.add(&dik)?)?;
    let t2 = cik.mul(&djk.sub(&dij)?)?;
    let t3 = cij.mul(&dik.add(&djk)?)?;
    let total = t1.add(&t2)?.sub(&t3)?;
    let wit = total
        .terms()
        .filter(|(k, _)| k[0].abs() <= window && k[1].abs() <= window)
        .map(|(k, c)| Witness::pq(k[0], k[1], c.clone()))
        .collect();
    Ok(ResidualReport::from_witnesses(wit))
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
struct Var(usize, i64);

enum Slot {
    Known(Rational),
    Unknown(Var),
    Beyond,
}

/// Extends leading coefficients by the recurrences hidden in the residual equations.
///
/// Each input series is trusted up to its own ceiling; all coefficients up to `target`
/// are then forced one at a time by equations linear in a single unknown.
pub fn extend_a_solution(leading: &ATriple, target: i64) -> Result<ATriple> {
    let parts = leading.parts();
    let lead = parts.iter().map(|s| s.ceiling()).max().unwrap();
    let inner = target + 2 * lead.max(1) + 2;
    let lo = parts.iter().map(|s| s.floor()).min().unwrap().min(-inner);
    let mut solved: BTreeMap<Var, Rational> = BTreeMap::new();

    let slot = |solved: &BTreeMap<Var, Rational>, s: usize, k: i64| -> Slot {
        let series = parts[s];
        if k <= series.ceiling() {
            return Slot::Known(series.coeff1(k).unwrap_or_else(|_| Rational::zero()));
        }
        if k > inner {
            return Slot::Beyond;
        }
        match solved.get(&Var(s, k)) {
            Some(v) => Slot::Known(v.clone()),
            None => Slot::Unknown(Var(s, k)),
        }
    };

    loop {
        let mut progress = false;
        for p in lo..=inner {
            for q in lo..=inner {
                if p == 0 || q == 0 || p == q {
                    continue;
                }
                let terms = [((0, p), (1, q), 1), ((0, p - q), (2, q), -1), ((1, q - p), (2, p), -1)];
                let mut constant = Rational::zero();
                let mut linear: Option<(Var, Rational)> = None;
                let mut usable = true;
                for ((s1, i1), (s2, i2), sign) in terms {
                    let sign = Rational::from_integer(sign.into());
                    match (slot(&solved, s1, i1), slot(&solved, s2, i2)) {
                        (Slot::Known(a), _) | (_, Slot::Known(a)) if a.is_zero() => {}
                        (Slot::Known(a), Slot::Known(b)) => constant += a * b * sign,
                        (Slot::Known(a), Slot::Unknown(v)) | (Slot::Unknown(v), Slot::Known(a)) => match &mut linear {
                            None => linear = Some((v, a * sign)),
                            Some((w, c)) if *w == v => *c += a * sign,
                            Some(_) => usable = false,
                        },
                        _ => usable = false,
                    }
                }
                if !usable {
                    continue;
                }
                match linear {
                    None if !constant.is_zero() => {
                        return Err(Error::Inconsistent(format!("equation at (p,q)=({p},{q}) is violated")));
                    }
                    Some((v, c)) if !c.is_zero() => {
                        solved.insert(v, -constant / c);
                        progress = true;
                    }
                    _ => {}
                }
            }
        }
        if !progress {
            break;
        }
    }

    let mut out = Vec::new();
    for (s, series) in parts.iter().enumerate() {
        let mut terms: Vec<(i64, Rational)> = series.terms().map(|(k, c)| (k[0], c.clone())).collect();
        for k in series.ceiling() + 1..=target {
            let v = solved
                .get(&Var(s, k))
                .ok_or_else(|| Error::UnderdeterminedLeading(format!("component {s}, exponent {k}/2")))?;
            terms.push((k, v.clone()));
        }
        out.push(ExpSum::from_coeffs1(target, terms.into_iter().filter(|(k, _)| *k <= target)));
    }
    let [uij, ujk, uik]: [ExpSum; 3] = out.try_into().unwrap();
    Ok(ATriple::new(uij, ujk, uik))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn t(terms: &[(i64, i64)], c: i64) -> ExpSum {
        ExpSum::from_coeffs1(c, terms.iter().map(|&(k, v)| (k, rat(v))))
    }

    #[test]
    fn monomial_family() {
        let a = ATriple::new(t(&[(2, 1)], 24), t(&[(2, 2)], 24), t(&[(-2, 3)], 24));
        assert!(ani_residual(&a, 24).unwrap().ok);
        assert!(uijk_residual(&a, 24).unwrap().ok);
    }

    #[test]
    fn equal_monomials_fail() {
        let a = ATriple::new(t(&[(2, 1)], 24), t(&[(2, 1)], 24), t(&[(2, 1)], 24));
        let r = ani_residual(&a, 24).unwrap();
        assert!(!r.ok);
        let w = r.witnesses.iter().find(|w| (w.p, w.q) == (4, 2)).unwrap();
        assert_eq!(w.value, rat(-1));
        assert!(!uijk_residual(&a, 24).unwrap().ok);
    }

    #[test]
    fn geometric_extension() {
        let seed = ATriple::new(t(&[(2, 1)], 2), t(&[(2, 1)], 2), t(&[(2, 1)], 2));
        let full = extend_a_solution(&seed, 24).unwrap();
        let geo = t(&(1..=12).map(|k| (2 * k, 1)).collect::<Vec<_>>(), 24);
        assert_eq!(full.uij, geo);
        assert_eq!(full.ujk, geo);
        assert_eq!(full.uik, geo);
    }

    #[test]
    fn inconsistent_seed() {
        let seed = ATriple::new(t(&[(2, 1), (4, 2)], 4), t(&[(2, 1)], 2), t(&[(2, 1)], 2));
        assert!(matches!(extend_a_solution(&seed, 12), Err(Error::Inconsistent(_))));
    }

    #[test]
    fn monomial_branch() {
        let seed = ATriple::new(t(&[(2, 1)], 2), t(&[(2, 1)], 2), t(&[], 2));
        let full = extend_a_solution(&seed, 16).unwrap();
        assert_eq!(full.uij, t(&[(2, 1)], 16));
        assert_eq!(full.ujk, t(&[(2, 1)], 16));
        assert!(full.uik.is_zero());
    }
}
