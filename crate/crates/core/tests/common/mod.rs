#![allow(dead_code)]

use itertools::Itertools;
use num::{One, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use toruskit::{Matrix, Rational, RationalLattice, Scalar};

pub fn q(s: &str) -> Rational {
    toruskit::scalar::parse_rational(s).unwrap()
}

/// Leibniz expansion, independent of the crate's elimination.
pub fn leibniz_det(m: &[Vec<Rational>]) -> Rational {
    let n = m.len();
    let mut acc = Rational::zero();
    for perm in (0..n).permutations(n) {
        let mut inversions = 0;
        for i in 0..n {
            for k in i + 1..n {
                if perm[i] > perm[k] {
                    inversions += 1;
                }
            }
        }
        let mut term = Rational::one();
        for (r, &c) in perm.iter().enumerate() {
            term *= &m[r][c];
        }
        if inversions % 2 == 1 {
            acc -= term;
        } else {
            acc += term;
        }
    }
    acc
}

pub fn rows_of(m: &Matrix<Rational>) -> Vec<Vec<Rational>> {
    (0..m.rows()).map(|r| m.row(r).to_vec()).collect()
}

pub fn small_rational(rng: &mut ChaCha8Rng) -> Rational {
    let num: i64 = rng.random_range(-6..=6);
    let den: i64 = rng.random_range(1..=4);
    Rational::new(num.into(), den.into())
}

pub fn random_invertible(rng: &mut ChaCha8Rng, d: usize) -> Matrix<Rational> {
    loop {
        let m = Matrix::from_fn(d, d, |_, _| small_rational(rng));
        if !m.det().unwrap().is_zero() {
            return m;
        }
    }
}

pub fn random_lattice(rng: &mut ChaCha8Rng, d: usize) -> RationalLattice {
    RationalLattice::new(random_invertible(rng, d)).unwrap()
}

pub fn int_vec(rng: &mut ChaCha8Rng, len: usize, r: i64) -> Vec<i64> {
    (0..len).map(|_| rng.random_range(-r..=r)).collect()
}

pub fn skew_lattice() -> RationalLattice {
    RationalLattice::from_generators(&[vec![q("1"), q("0")], vec![q("1/2"), q("1")]]).unwrap()
}

/// `⟨Vᵀ⁻¹y, Vᵀ⁻¹y'⟩` recomputed from the generators.
pub fn form_oracle(basis: &RationalLattice, y: &[i64], y2: &[i64]) -> Rational {
    let w = basis.generators().transpose().inverse().unwrap();
    let img = |v: &[i64]| -> Vec<Rational> {
        (0..w.rows())
            .map(|r| (0..w.cols()).fold(Rational::zero(), |acc, c| acc + &w[(r, c)] * Rational::from_i64(v[c])))
            .collect()
    };
    img(y).iter().zip(img(y2)).fold(Rational::zero(), |acc, (a, b)| acc + a * b)
}
