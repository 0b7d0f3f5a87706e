use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SymbolKind {
    Nlw,
    Nls,
}

impl SymbolKind {
    /// Signs `𝔞` carried by a site.
    pub fn signs(self) -> &'static [i8] {
        match self {
            SymbolKind::Nlw => &[1],
            SymbolKind::Nls => &[-1, 1],
        }
    }
}

impl std::str::FromStr for SymbolKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "nlw" => Ok(SymbolKind::Nlw),
            "nls" => Ok(SymbolKind::Nls),
            _ => Err(Error::parse(s, "expected nlw or nls")),
        }
    }
}

/// Frequency data `ω = λω̄` together with the phase shift `θ` and the mass `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyParams<T: Scalar> {
    omega_bar: Vec<T>,
    gamma0: f64,
    tau0: f64,
    lambda: T,
    theta: T,
    mass: T,
}

impl<T: Scalar> FrequencyParams<T> {
    /// Checks `|ω̄|₁ ≤ 1`, `γ₀ > 0`, `τ₀ ≥ n`, `λ ∈ [1/2, 3/2]` and `m > 0`.
    ///
    /// The Diophantine property itself is checked separately by
    /// [`diophantine_check`](super::diophantine_check), since it needs a cutoff.
    pub fn new(omega_bar: Vec<T>, gamma0: f64, tau0: f64, lambda: T, theta: T, mass: T) -> Result<Self> {
        if omega_bar.is_empty() {
            return Err(Error::InvalidParameter("frequency vector is empty".into()));
        }
        let l1 = omega_bar.iter().fold(T::zero(), |acc, w| acc + w.abs());
        if l1 > T::one() {
            return Err(Error::InvalidParameter(format!(
                "|omega_bar|_1 = {} exceeds 1",
                l1.to_f64()
            )));
        }
        if !(gamma0 > 0.0) {
            return Err(Error::InvalidParameter(format!("gamma0 = {gamma0} must be positive")));
        }
        if !(tau0 >= omega_bar.len() as f64) {
            return Err(Error::InvalidParameter(format!(
                "tau0 = {tau0} below the time dimension {}",
                omega_bar.len()
            )));
        }
        if !(mass > T::zero()) {
            return Err(Error::InvalidParameter(format!("mass {} must be positive", mass.to_f64())));
        }
        let out = Self {
            omega_bar,
            gamma0,
            tau0,
            lambda: T::one(),
            theta,
            mass,
        };
        out.with_lambda(lambda)
    }

    pub fn with_lambda(mut self, lambda: T) -> Result<Self> {
        let half = T::one() / T::from_i64(2);
        let three_halves = T::from_i64(3) / T::from_i64(2);
        if lambda < half || lambda > three_halves {
            return Err(Error::InvalidParameter(format!(
                "lambda = {} outside [1/2, 3/2]",
                lambda.to_f64()
            )));
        }
        self.lambda = lambda;
        Ok(self)
    }

    pub fn with_theta(mut self, theta: T) -> Self {
        self.theta = theta;
        self
    }

    pub fn n(&self) -> usize {
        self.omega_bar.len()
    }

    pub fn omega_bar(&self) -> &[T] {
        &self.omega_bar
    }

    pub fn gamma0(&self) -> f64 {
        self.gamma0
    }

    pub fn tau0(&self) -> f64 {
        self.tau0
    }

    pub fn lambda(&self) -> &T {
        &self.lambda
    }

    pub fn theta(&self) -> &T {
        &self.theta
    }

    pub fn mass(&self) -> &T {
        &self.mass
    }

    /// `ω̄·ℓ`.
    pub fn omega_bar_dot(&self, ell: &[i64]) -> Result<T> {
        if ell.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: ell.len(),
            });
        }
        Ok(dot(&self.omega_bar, ell))
    }

    /// `λω̄·ℓ + θ`.
    pub fn phase(&self, ell: &[i64]) -> Result<T> {
        Ok(self.lambda.clone() * self.omega_bar_dot(ell)? + self.theta.clone())
    }

    pub fn to_f64(&self) -> FrequencyParams<f64> {
        FrequencyParams {
            omega_bar: self.omega_bar.iter().map(Scalar::to_f64).collect(),
            gamma0: self.gamma0,
            tau0: self.tau0,
            lambda: self.lambda.to_f64(),
            theta: self.theta.to_f64(),
            mass: self.mass.to_f64(),
        }
    }
}

pub(crate) fn dot<T: Scalar>(w: &[T], ell: &[i64]) -> T {
    w.iter()
        .zip(ell)
        .filter(|(_, &l)| l != 0)
        .fold(T::zero(), |acc, (w, &l)| acc + w.clone() * T::from_i64(l))
}

/// A point `(ℓ, j, 𝔞)` of the space-time index set; `a` is always `+1` for NLW.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SpaceTimeSite {
    pub ell: Vec<i64>,
    pub j: Vec<i64>,
    pub a: i8,
}

impl SpaceTimeSite {
    pub fn new(ell: Vec<i64>, j: Vec<i64>, a: i8) -> Self {
        Self { ell, j, a }
    }

    pub fn wave(ell: Vec<i64>, j: Vec<i64>) -> Self {
        Self::new(ell, j, 1)
    }
}

/// Distance on the index set: 1 when only the sign differs, else the sup-distance of `(ℓ, j)`.
pub fn dist(k: &SpaceTimeSite, k2: &SpaceTimeSite) -> i64 {
    let d = crate::boxes::sup_dist(&k.ell, &k2.ell).max(crate::boxes::sup_dist(&k.j, &k2.j));
    if d == 0 && k.a != k2.a {
        1
    } else {
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{parse_rational, Rational};

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn validation() {
        let ok = FrequencyParams::new(vec![q("1/2"), q("-1/3")], 0.1, 2.0, q("1"), q("0"), q("1"));
        assert!(ok.is_ok());
        let big = FrequencyParams::new(vec![q("1/2"), q("2/3")], 0.1, 2.0, q("1"), q("0"), q("1"));
        assert!(matches!(big, Err(Error::InvalidParameter(_))));
        let lam = FrequencyParams::new(vec![q("1")], 0.1, 1.0, q("8/5"), q("0"), q("1"));
        assert!(lam.is_err());
        let mass = FrequencyParams::new(vec![q("1")], 0.1, 1.0, q("1"), q("0"), q("0"));
        assert!(mass.is_err());
        let tau = FrequencyParams::new(vec![q("1/2"), q("1/2")], 0.1, 1.5, q("1"), q("0"), q("1"));
        assert!(tau.is_err());
    }

    #[test]
    fn distance_convention() {
        let a = SpaceTimeSite::new(vec![1], vec![2], 1);
        let b = SpaceTimeSite::new(vec![1], vec![2], -1);
        let c = SpaceTimeSite::new(vec![4], vec![0], -1);
        assert_eq!(dist(&a, &b), 1);
        assert_eq!(dist(&a, &c), 3);
        assert_eq!(dist(&a, &a), 0);
    }
}
