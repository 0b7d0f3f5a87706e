use super::params::{FrequencyParams, SpaceTimeSite, SymbolKind};
use crate::error::{Error, Result};
use crate::lattice::LatticeBasis;
use crate::scalar::Scalar;

/// `−(λω̄·ℓ + θ)² + μ_j + m`.
pub fn symbol_nlw<T: Scalar>(basis: &LatticeBasis<T>, params: &FrequencyParams<T>, ell: &[i64], j: &[i64]) -> Result<T> {
    let x = params.phase(ell)?;
    Ok(-(x.clone() * x) + basis.mu(j)? + params.mass().clone())
}

/// `−𝔞(λω̄·ℓ + θ) + μ_j + m`.
pub fn symbol_nls<T: Scalar>(
    basis: &LatticeBasis<T>,
    params: &FrequencyParams<T>,
    ell: &[i64],
    j: &[i64],
    a: i8,
) -> Result<T> {
    if a != 1 && a != -1 {
        return Err(Error::InvalidParameter(format!("sign {a} must be +1 or -1")));
    }
    let x = params.phase(ell)?;
    Ok(-(T::from_i64(a as i64) * x) + basis.mu(j)? + params.mass().clone())
}

pub fn symbol<T: Scalar>(
    basis: &LatticeBasis<T>,
    params: &FrequencyParams<T>,
    site: &SpaceTimeSite,
    kind: SymbolKind,
) -> Result<T> {
    match kind {
        SymbolKind::Nlw => symbol_nlw(basis, params, &site.ell, &site.j),
        SymbolKind::Nls => symbol_nls(basis, params, &site.ell, &site.j, site.a),
    }
}

/// `|D_k| < 1`. Sites whose dimensions do not match are never singular.
pub fn is_singular<T: Scalar>(
    basis: &LatticeBasis<T>,
    params: &FrequencyParams<T>,
    site: &SpaceTimeSite,
    kind: SymbolKind,
) -> bool {
    if kind == SymbolKind::Nlw && site.a != 1 {
        return false;
    }
    symbol(basis, params, site, kind).is_ok_and(|v| v.abs() < T::one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::RationalLattice;
    use crate::scalar::{parse_rational, Rational};

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn params(theta: &str, mass: &str) -> FrequencyParams<Rational> {
        FrequencyParams::new(vec![q("1")], 0.5, 1.0, q("1"), q(theta), q(mass)).unwrap()
    }

    #[test]
    fn wave_values() {
        let b = RationalLattice::identity(1);
        let p = params("0", "1");
        assert_eq!(symbol_nlw(&b, &p, &[0], &[0]).unwrap(), q("1"));
        assert_eq!(symbol_nlw(&b, &p, &[1], &[1]).unwrap(), q("1"));
        // (ℓ + θ)² = μ + m at ℓ = 1, θ = 1/2, m = 5/4, j = 1
        let root = params("1/2", "5/4");
        assert_eq!(symbol_nlw(&b, &root, &[1], &[1]).unwrap(), q("0"));
        assert!(symbol_nlw(&b, &p, &[1, 0], &[0]).is_err());
    }

    #[test]
    fn schroedinger_values() {
        let b = RationalLattice::identity(1);
        let p = params("1/2", "1");
        assert_eq!(symbol_nls(&b, &p, &[1], &[0], 1).unwrap(), q("-1/2"));
        let sum = symbol_nls(&b, &p, &[3], &[2], 1).unwrap() + symbol_nls(&b, &p, &[3], &[2], -1).unwrap();
        assert_eq!(sum, q("2") * (q("4") + q("1")));
        assert!(symbol_nls(&b, &p, &[1], &[0], 0).is_err());
    }

    #[test]
    fn singular_is_strict() {
        let b = RationalLattice::identity(1);
        let site = SpaceTimeSite::wave(vec![0], vec![0]);
        assert!(is_singular(&b, &params("0", "1/2"), &site, SymbolKind::Nlw));
        assert!(!is_singular(&b, &params("0", "2"), &site, SymbolKind::Nlw));
        assert!(!is_singular(&b, &params("0", "1"), &site, SymbolKind::Nlw));
    }
}
