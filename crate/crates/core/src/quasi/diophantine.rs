use num::bigint::BigInt;
use num::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boxes::{sup_norm, IndexBox};
use crate::error::{Error, Result};
use crate::scalar::Rational;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiophantineReport {
    pub pass: bool,
    /// Minimiser of `|ω̄·ℓ| |ℓ|^{τ₀} / 2` over `0 < |ℓ|_∞ ≤ ℓ_max`.
    pub worst_ell: Vec<i64>,
    /// That minimum, the largest `γ₀` for which the check passes.
    pub worst_value: f64,
    pub checked: u64,
}

/// Checks `|ω̄·ℓ| ≥ 2γ₀ / |ℓ|^{τ₀}` for every `0 < |ℓ|_∞ ≤ ℓ_max`.
pub fn diophantine_check(omega_bar: &[f64], gamma0: f64, tau0: f64, ell_max: i64) -> Result<DiophantineReport> {
    if ell_max < 1 || omega_bar.is_empty() {
        return Err(Error::InvalidParameter(format!(
            "need a nonempty frequency and ell_max >= 1, got {ell_max}"
        )));
    }
    let grid = IndexBox::cube(omega_bar.len(), ell_max);
    let centre = grid.len() / 2;
    let best = (0..grid.len())
        .into_par_iter()
        .filter(|&i| i != centre)
        .map(|i| {
            let ell = grid.point(i);
            let dot: f64 = ell.iter().zip(omega_bar).map(|(&l, w)| l as f64 * w).sum();
            let value = dot.abs() * (sup_norm(&ell) as f64).powf(tau0) / 2.0;
            (value, i)
        })
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
        .expect("box has nonzero points");
    Ok(DiophantineReport {
        pass: best.0 >= gamma0,
        worst_ell: grid.point(best.1),
        worst_value: best.0,
        checked: grid.len() as u64 - 1,
    })
}

/// Partial quotients of a rational.
pub fn continued_fraction(x: &Rational) -> Vec<BigInt> {
    let mut out = Vec::new();
    let (mut num, mut den) = (x.numer().clone(), x.denom().clone());
    while !den.is_zero() {
        let mut a = &num / &den;
        if (&num % &den).is_negative() {
            a -= 1;
        }
        let r = &num - &a * &den;
        out.push(a);
        num = den;
        den = r;
    }
    out
}

/// Convergents `p_k / q_k` of a continued fraction.
pub fn convergents(quotients: &[BigInt]) -> Vec<Rational> {
    let (mut p0, mut q0) = (BigInt::one(), BigInt::zero());
    let (mut p1, mut q1) = (BigInt::zero(), BigInt::one());
    let mut out = Vec::with_capacity(quotients.len());
    for a in quotients {
        let p = a * &p0 + &p1;
        let q = a * &q0 + &q1;
        out.push(Rational::new(p.clone(), q.clone()));
        p1 = std::mem::replace(&mut p0, p);
        q1 = std::mem::replace(&mut q0, q);
    }
    out
}

/// Value of a finite continued fraction `[a₀; a₁, …]`.
pub fn from_partial_quotients(quotients: &[i64]) -> Result<Rational> {
    let big: Vec<BigInt> = quotients.iter().map(|&a| BigInt::from(a)).collect();
    if quotients.iter().skip(1).any(|&a| a < 1) {
        return Err(Error::InvalidParameter("partial quotients after the first must be >= 1".into()));
    }
    convergents(&big)
        .pop()
        .ok_or_else(|| Error::InvalidParameter("no partial quotients".into()))
}

/// `(1, x) / (1 + x)` for `x = [1; 2, 2, …]` with `terms` quotients, a rational stand-in for
/// the badly approximable direction `(1, √2) / (1 + √2)` with `|ω̄|₁ = 1`.
pub fn sqrt2_direction(terms: usize) -> Result<Vec<Rational>> {
    let mut q = vec![1];
    q.extend(std::iter::repeat_n(2, terms.saturating_sub(1)));
    let x = from_partial_quotients(&q)?;
    let s = Rational::one() + &x;
    Ok(vec![Rational::one() / &s, x / s])
}
