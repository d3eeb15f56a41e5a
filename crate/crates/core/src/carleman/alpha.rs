use num_rational::Ratio;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::lab::gamma_gamma_exact;
use crate::scalar::Real;

pub type Rational = Ratio<i64>;

/// The `N` coefficient vectors of the Carleman weights: `vectors[k][j]` is
/// `α_j^{k+1}`. Each vector is the previous one rotated right by one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlphaVectors {
    vectors: Vec<Vec<Rational>>,
}

pub fn alpha_vectors(n: usize) -> Result<AlphaVectors> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("alpha vectors need N >= 2, got {n}")));
    }
    let first: Vec<Rational> = if n.is_multiple_of(2) {
        (0..n).map(|j| Rational::from_integer(if j % 2 == 0 { 1 } else { -1 })).collect()
    } else {
        let m = (n / 2) as i64;
        (0..n)
            .map(|j| if (j as i64) <= m { Rational::from_integer(-1) } else { Rational::new(m + 1, m) })
            .collect()
    };
    let vectors = std::iter::successors(Some(first), |prev| {
        let mut next = prev.clone();
        next.rotate_right(1);
        Some(next)
    })
    .take(n)
    .collect();
    let out = AlphaVectors { vectors };
    out.check_invariants()?;
    Ok(out)
}

impl AlphaVectors {
    pub fn edges(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[Vec<Rational>] {
        &self.vectors
    }

    pub fn get(&self, k: usize, j: usize) -> Rational {
        self.vectors[k][j]
    }

    pub fn to_real<T: Real>(&self) -> Vec<Vec<T>> {
        self.vectors
            .iter()
            .map(|v| v.iter().map(|r| to_real(*r)).collect())
            .collect()
    }

    /// Distinct entries with their multiplicity in each column `j`; the
    /// multiplicities do not depend on `j`.
    pub fn column_multiplicities(&self) -> Vec<(Rational, usize)> {
        let mut out: Vec<(Rational, usize)> = Vec::new();
        for v in &self.vectors {
            match out.iter_mut().find(|(a, _)| *a == v[0]) {
                Some(entry) => entry.1 += 1,
                None => out.push((v[0], 1)),
            }
        }
        out
    }

    /// `Σ_k (α_j^k)²`, the same for every `j`.
    pub fn column_square_sum(&self) -> Rational {
        self.vectors.iter().map(|v| v[0] * v[0]).sum()
    }

    /// `Σ_k (α_j^k)³`, non-negative and zero for even `N`.
    pub fn column_cube_sum(&self) -> Rational {
        self.vectors.iter().map(|v| v[0] * v[0] * v[0]).sum()
    }

    pub fn check_invariants(&self) -> Result<()> {
        let n = self.edges();
        let fail = |what: &str| Err(Error::Degenerate(format!("alpha vectors for N = {n}: {what}")));
        if self.vectors.iter().any(|v| v.len() != n) {
            return fail("vectors are not of length N");
        }
        if self.vectors.iter().any(|v| !v.iter().copied().sum::<Rational>().is_zero()) {
            return fail("a vector does not sum to zero");
        }
        let column = |j: usize| self.vectors.iter().map(move |v| v[j]);
        if (0..n).any(|j| !column(j).sum::<Rational>().is_zero()) {
            return fail("a column does not sum to zero");
        }
        let squares: Vec<Rational> = (0..n).map(|j| column(j).map(|a| a * a).sum()).collect();
        if squares.iter().any(|s| *s != squares[0]) {
            return fail("column square sums differ");
        }
        let entries = || self.vectors.iter().flatten();
        if entries().any(|a| a.abs() < Rational::from_integer(1)) {
            return fail("an entry is smaller than one in modulus");
        }
        let max = entries().map(|a| a.abs()).max().unwrap_or_default();
        if max != gamma_gamma_exact(n)? * 2 {
            return fail("largest entry is not twice the critical exponent");
        }
        Ok(())
    }
}

pub(crate) fn to_real<T: Real>(r: Rational) -> T {
    T::lit(*r.numer() as f64) / T::lit(*r.denom() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&i| Rational::from_integer(i)).collect()
    }

    #[test]
    fn even_and_odd_layouts() {
        let a = alpha_vectors(4).unwrap();
        assert_eq!(a.vectors()[0], ints(&[1, -1, 1, -1]));
        assert_eq!(a.vectors()[1], ints(&[-1, 1, -1, 1]));
        let b = alpha_vectors(3).unwrap();
        assert_eq!(b.vectors(), &[ints(&[-1, -1, 2]), ints(&[2, -1, -1]), ints(&[-1, 2, -1])]);
        assert_eq!(b.column_square_sum(), Rational::from_integer(6));
        assert_eq!(b.column_multiplicities(), vec![(Rational::from_integer(-1), 2), (Rational::from_integer(2), 1)]);
        let c = alpha_vectors(5).unwrap();
        assert_eq!(c.get(0, 4), Rational::new(3, 2));
        assert!(alpha_vectors(1).is_err());
    }

    #[test]
    fn invariants_for_many_sizes() {
        for n in 2..=12 {
            let a = alpha_vectors(n).unwrap();
            assert!(a.check_invariants().is_ok());
            let cube = a.column_cube_sum();
            if n % 2 == 0 {
                assert!(cube.is_zero());
            } else {
                assert!(cube.is_positive());
            }
        }
    }

    #[test]
    fn broken_vectors_are_rejected() {
        let mut a = alpha_vectors(3).unwrap();
        a.vectors[0][0] = Rational::from_integer(-2);
        assert!(a.check_invariants().is_err());
    }
}
