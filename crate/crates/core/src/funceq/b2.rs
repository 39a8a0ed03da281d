//! The rank-two functional equation
//! `V(st)(U⁺(st²)+U⁻(s)) + W(t)(U⁺(st²)-U⁻(s)) = F₁(st²)+F₂(s)+G₁(st)+G₂(t)`.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{product, ResidualReport, Witness};
use crate::linalg;
use crate::operator::B2Data;
use crate::potentials::{expand_var, B2Potential};
use crate::rational::Rational;
use crate::series::ExpSum;
use crate::{Error, Result};

/// `(U⁺, U⁻, V, W)`, rank-one series with zero constant terms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct B2Tuple {
    pub uplus: ExpSum,
    pub uminus: ExpSum,
    pub v: ExpSum,
    pub w: ExpSum,
}

impl B2Tuple {
    /// Constant terms are dropped.
    pub fn new(uplus: ExpSum, uminus: ExpSum, v: ExpSum, w: ExpSum) -> Self {
        B2Tuple {
            uplus: uplus.strip_constant(),
            uminus: uminus.strip_constant(),
            v: v.strip_constant(),
            w: w.strip_constant(),
        }
    }

    pub fn zero(ceiling: i64) -> Self {
        let z = ExpSum::zero(1, ceiling);
        B2Tuple::new(z.clone(), z.clone(), z.clone(), z)
    }

    /// From the potential functions `u = t U'(t)`.
    pub fn from_data(d: &B2Data) -> Self {
        B2Tuple::new(
            d.uplus.euler_antiderivative(),
            d.uminus.euler_antiderivative(),
            d.v.euler_antiderivative(),
            d.w.euler_antiderivative(),
        )
    }

    pub fn to_data(&self) -> B2Data {
        B2Data {
            uplus: self.uplus.euler_derivative(),
            uminus: self.uminus.euler_derivative(),
            v: self.v.euler_derivative(),
            w: self.w.euler_derivative(),
        }
    }

    /// Every component expanded to the same rank-one ceiling.
    pub fn from_potential(p: &B2Potential, ceiling: i64) -> Result<Self> {
        Ok(B2Tuple::from_data(&B2Data {
            uplus: expand_var(&p.uplus, ceiling)?,
            uminus: expand_var(&p.uminus, ceiling)?,
            v: expand_var(&p.v, ceiling)?,
            w: expand_var(&p.w, ceiling)?,
        }))
    }

    pub fn components(&self) -> [&ExpSum; 4] {
        [&self.uplus, &self.uminus, &self.v, &self.w]
    }

    pub fn min_ceiling(&self) -> i64 {
        self.components().iter().map(|s| s.ceiling()).min().unwrap()
    }

    /// `(U⁺,U⁻) = 0` or `(V,W) = 0`.
    pub fn is_trivial(&self) -> bool {
        (self.uplus.is_zero() && self.uminus.is_zero()) || (self.v.is_zero() && self.w.is_zero())
    }

    /// Coefficientwise agreement up to the smaller ceiling of each pair.
    pub fn agrees_with(&self, other: &Self) -> bool {
        self.components().iter().zip(other.components()).all(|(a, b)| a.agrees_with(b))
    }

    pub fn with_ceiling(&self, c: i64) -> Self {
        let cut = |s: &ExpSum| s.with_ceiling(c.min(s.ceiling()));
        B2Tuple { uplus: cut(&self.uplus), uminus: cut(&self.uminus), v: cut(&self.v), w: cut(&self.w) }
    }
}

/// Left side coefficient of `s^p t^q`, when determined.
fn lhs(sol: &B2Tuple, p: i64, q: i64) -> Option<Rational> {
    let B2Tuple { uplus, uminus, v, w } = sol;
    let a = product(v, 2 * p - q, uplus, q - p)?;
    let b = product(v, q, uminus, p - q)?;
    let c = product(w, q - 2 * p, uplus, p)?;
    let d = product(w, q, uminus, p)?;
    Some(a + b + c - d)
}

fn check_window(sol: &B2Tuple, window: i64) -> Result<()> {
    let c = sol.components().iter().filter(|s| !s.is_zero()).map(|s| s.ceiling()).min();
    match c {
        Some(c) if window > c => Err(Error::OutsideWindow { degree: window, ceiling: c }),
        _ => Ok(()),
    }
}

/// Checks `V_{2p-q}U⁺_{q-p} + V_qU⁻_{p-q} + W_{q-2p}U⁺_p - W_qU⁻_p = 0` for
/// `|p|, |q| ≤ window` (half-units) away from the four lines where the prefactor
/// `pq(2p-q)(p-q)` vanishes. Pairs whose products reach past a ceiling are skipped.
pub fn b2_residual(sol: &B2Tuple, window: i64) -> Result<ResidualReport> {
    check_window(sol, window)?;
    let mut wit = Vec::new();
    for p in -window..=window {
        for q in -window..=window {
            if p == 0 || q == 0 || 2 * p == q || p == q {
                continue;
            }
            if let Some(x) = lhs(sol, p, q) {
                if !x.is_zero() {
                    wit.push(Witness::pq(p, q, x));
                }
            }
        }
    }
    Ok(ResidualReport::from_witnesses(wit))
}

/// The right side `F₁(st²)+F₂(s)+G₁(st)+G₂(t)`; the constant sits in `G₂`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct B2Decomposition {
    pub f1: ExpSum,
    pub f2: ExpSum,
    pub g1: ExpSum,
    pub g2: ExpSum,
}

/// Solves for `F₁, F₂, G₁, G₂` coefficientwise on `|p|, |q| ≤ window`.
/// `None` exactly when no decomposition exists there.
pub fn b2_decomposition(sol: &B2Tuple, window: i64) -> Result<Option<B2Decomposition>> {
    check_window(sol, window)?;
    let span = (2 * window + 1) as usize;
    let col = |f: usize, k: i64| f * span + (k + window) as usize;
    let cols = 4 * span;
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for p in -window..=window {
        for q in -window..=window {
            let Some(x) = lhs(sol, p, q) else { continue };
            let mut row = vec![Rational::zero(); cols];
            let mut any = false;
            for (hit, f, k) in [(q == 2 * p, 0, p), (q == 0, 1, p), (q == p, 2, p), (p == 0, 3, q)] {
                if hit {
                    row[col(f, k)] += Rational::from_integer(1.into());
                    any = true;
                }
            }
            if !any {
                if !x.is_zero() {
                    return Ok(None);
                }
                continue;
            }
            rows.push(row);
            rhs.push(x);
        }
    }
    let Some(x) = linalg::solve(&rows, &rhs) else { return Ok(None) };
    let series = |f: usize| {
        ExpSum::from_coeffs1(window, (-window..=window).map(|k| (k, x[col(f, k)].clone())))
    };
    Ok(Some(B2Decomposition { f1: series(0), f2: series(1), g1: series(2), g2: series(3) }))
}

/// Basis of the `(V, W)` coefficients on `0 < |k| ≤ support` (half-units) that extend
/// to a solution of the residual equations for the given `U±`. Pole orders are capped
/// at `support`; the equations are imposed on a wider window of positive exponents and
/// the solution space is projected back.
pub fn solve_vw_linear(uplus: &ExpSum, uminus: &ExpSum, support: i64) -> Result<Vec<(ExpSum, ExpSum)>> {
    if support <= 0 {
        return Err(Error::EmptySupport);
    }
    let s = 4 * support;
    let idx = |k: i64| -> usize { if k < 0 { (k + support) as usize } else { (k + support - 1) as usize } };
    let half = (support + s) as usize;
    let cols = 2 * half;
    let bound = 2 * s + uplus.ceiling().max(uminus.ceiling()).max(0) + 1;
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    'eq: for p in -bound..=bound {
        for q in -bound..=bound {
            if p == 0 || q == 0 || 2 * p == q || p == q {
                continue;
            }
            let terms = [
                (0usize, 2 * p - q, uplus, q - p, 1),
                (0, q, uminus, p - q, 1),
                (1, q - 2 * p, uplus, p, 1),
                (1, q, uminus, p, -1),
            ];
            let mut row = vec![Rational::zero(); cols];
            let mut any = false;
            let mut usable = true;
            for (side, k, u, i, sign) in terms {
                let Some(c) = u.try_coeff1(i) else {
                    usable = false;
                    break;
                };
                if c.is_zero() {
                    continue;
                }
                if k < -support {
                    continue;
                }
                if k == 0 || k > s {
                    usable = false;
                    break;
                }
                row[side * half + idx(k)] += c * Rational::from_integer(sign.into());
                any = true;
            }
            if usable && any {
                rows.push(row);
            }
            if rows.len() > 4 * cols {
                let mut m = std::mem::take(&mut rows);
                let piv = linalg::rref(&mut m);
                m.truncate(piv.len());
                rows = m;
                if rows.len() == cols {
                    break 'eq;
                }
            }
        }
    }
    let keys: Vec<i64> = (-support..=support).filter(|&k| k != 0).collect();
    let mut proj: Vec<Vec<Rational>> = linalg::nullspace(&rows, cols)
        .into_iter()
        .map(|v| keys.iter().map(|&k| v[idx(k)].clone()).chain(keys.iter().map(|&k| v[half + idx(k)].clone())).collect())
        .collect();
    let piv = linalg::rref(&mut proj);
    proj.truncate(piv.len());
    let n = keys.len();
    Ok(proj
        .into_iter()
        .map(|v| {
            let v_ser = ExpSum::from_coeffs1(support, keys.iter().enumerate().map(|(i, &k)| (k, v[i].clone())));
            let w_ser = ExpSum::from_coeffs1(support, keys.iter().enumerate().map(|(i, &k)| (k, v[n + i].clone())));
            (v_ser, w_ser)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn geometric(step: i64, c: i64, ceiling: i64) -> ExpSum {
        ExpSum::from_coeffs1(ceiling, (1..=ceiling / step).map(|k| (k * step, rat(c))))
    }

    #[test]
    fn trivial_solutions() {
        let z = ExpSum::zero(1, 16);
        let sol = B2Tuple::new(z.clone(), z, geometric(2, 1, 16), geometric(4, 3, 16));
        assert!(b2_residual(&sol, 16).unwrap().ok);
    }

    #[test]
    fn free_space_for_zero_u() {
        let z = ExpSum::zero(1, 16);
        assert_eq!(solve_vw_linear(&z, &z, 4).unwrap().len(), 16);
        assert!(matches!(solve_vw_linear(&z, &z, 0), Err(Error::EmptySupport)));
    }

    #[test]
    fn decomposition_of_trivial() {
        let z = ExpSum::zero(1, 8);
        let sol = B2Tuple::new(geometric(2, 1, 8), z.clone(), z.clone(), z);
        assert!(b2_decomposition(&sol, 8).unwrap().is_some());
    }
}
