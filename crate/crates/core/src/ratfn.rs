//! Rational functions in `z = t^{1/2}` recovered from truncated rank-one series.
//!
//! Reconstruction runs Berlekamp-Massey over `Q` on the coefficient sequence and
//! only accepts a recurrence that is confirmed by a margin of extra coefficients.
//! This is what allows `t ↦ 1/t`, which has no meaning on a bare truncated series.

use num_traits::{One, Zero};

use crate::rational::Rational;
use crate::series::ExpSum;
use crate::{Error, Result};

/// Extra coefficients a recurrence must predict correctly before it is trusted.
const MARGIN: usize = 4;

/// `z^shift · num(z) / den(z)` with `den(0) = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatFn {
    pub shift: i64,
    pub num: Vec<Rational>,
    pub den: Vec<Rational>,
}

fn trim(p: &mut Vec<Rational>) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

/// Minimal connection polynomial `C` (with `C(0) = 1`) and its length `ℓ`.
fn berlekamp_massey(s: &[Rational]) -> (Vec<Rational>, usize) {
    let mut c = vec![Rational::one()];
    let mut b = vec![Rational::one()];
    let mut l = 0usize;
    let mut m = 1usize;
    let mut bd = Rational::one();
    for n in 0..s.len() {
        let mut d = s[n].clone();
        for i in 1..=l.min(c.len() - 1) {
            d += &c[i] * &s[n - i];
        }
        if d.is_zero() {
            m += 1;
            continue;
        }
        let coef = &d / &bd;
        let prev = c.clone();
        if c.len() < b.len() + m {
            c.resize(b.len() + m, Rational::zero());
        }
        for (i, bi) in b.iter().enumerate() {
            c[i + m] -= &coef * bi;
        }
        if 2 * l <= n {
            l = n + 1 - l;
            b = prev;
            bd = d;
            m = 1;
        } else {
            m += 1;
        }
    }
    c.truncate(l + 1);
    trim(&mut c);
    (c, l)
}

fn mul_trunc(a: &[Rational], b: &[Rational], len: usize) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        for (j, y) in b.iter().enumerate() {
            if i + j >= len {
                break;
            }
            out[i + j] += x * y;
        }
    }
    out
}

impl RatFn {
    pub fn zero() -> Self {
        RatFn { shift: 0, num: Vec::new(), den: vec![Rational::one()] }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_empty()
    }

    /// Recovers a rational function from its truncated expansion, or `NotRational`.
    pub fn reconstruct(s: &ExpSum) -> Result<Self> {
        assert_eq!(s.rank(), 1);
        if s.is_zero() {
            return Ok(Self::zero());
        }
        let f = s.floor();
        let len = (s.ceiling() - f + 1) as usize;
        let seq: Vec<Rational> = (0..len).map(|k| s.coeff1(f + k as i64).unwrap()).collect();
        let (c, l) = berlekamp_massey(&seq);
        if 2 * l + MARGIN > len {
            return Err(Error::NotRational);
        }
        let mut num = mul_trunc(&seq, &c, l.max(1));
        trim(&mut num);
        Ok(RatFn { shift: f, num, den: c })
    }

    /// `R(z) ↦ R(1/z)`.
    pub fn reflect(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let dp = self.num.len() as i64 - 1;
        let dc = self.den.len() as i64 - 1;
        let lead = self.den.last().unwrap().clone();
        let num: Vec<Rational> = self.num.iter().rev().map(|c| c / &lead).collect();
        let den: Vec<Rational> = self.den.iter().rev().map(|c| c / &lead).collect();
        RatFn { shift: -self.shift - dp + dc, num, den }
    }

    /// Power-series expansion in `t` up to `ceiling` half-units.
    pub fn expand(&self, ceiling: i64) -> ExpSum {
        if self.is_zero() || ceiling < self.shift {
            return ExpSum::zero(1, ceiling);
        }
        let len = (ceiling - self.shift + 1) as usize;
        let mut q: Vec<Rational> = Vec::with_capacity(len);
        for k in 0..len {
            let mut v = self.num.get(k).cloned().unwrap_or_else(Rational::zero);
            for i in 1..self.den.len().min(k + 1) {
                v -= &self.den[i] * &q[k - i];
            }
            q.push(v);
        }
        ExpSum::from_coeffs1(ceiling, q.into_iter().enumerate().map(|(k, c)| (self.shift + k as i64, c)))
    }
}

/// The rank-one series `s(1/t)` expanded to the same ceiling, via reconstruction.
pub fn reflect_series(s: &ExpSum) -> Result<ExpSum> {
    Ok(RatFn::reconstruct(s)?.reflect().expand(s.ceiling()))
}
