use std::ops::Mul;

use crate::error::{Error, Result};
use crate::scalar::{c, cis, Cplx, Real};

/// Junction data of a layered coefficient `σ = a_i^{-2}` with breakpoints
/// `(j-1) l`. Junction indices `j` are 1-based, `1 ≤ j ≤ N-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerParams<T: Real> {
    a: Vec<T>,
    l: T,
    delta: Vec<T>,
    eps: Vec<T>,
    gamma: Vec<T>,
}

pub fn layer_params<T: Real>(a: &[T], l: T) -> Result<LayerParams<T>> {
    if a.is_empty() {
        return Err(Error::InvalidParameter("at least one layer is required".into()));
    }
    if let Some(bad) = a.iter().find(|&&v| !(v > T::zero()) || !v.is_finite()) {
        return Err(Error::InvalidParameter(format!("layer value {bad} is not positive")));
    }
    if !(l > T::zero()) {
        return Err(Error::InvalidParameter(format!("spacing {l} is not positive")));
    }
    let delta: Vec<T> = a.windows(2).map(|w| w[0] - w[1]).collect();
    let eps: Vec<T> = a.windows(2).map(|w| w[0] + w[1]).collect();
    let gamma = delta.iter().zip(&eps).map(|(&d, &e)| d / e).collect();
    Ok(LayerParams {
        a: a.to_vec(),
        l,
        delta,
        eps,
        gamma,
    })
}

impl<T: Real> LayerParams<T> {
    /// Number of layers `N`.
    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn a_values(&self) -> &[T] {
        &self.a
    }

    /// `a_i`, 1-based.
    pub fn a(&self, i: usize) -> T {
        self.a[i - 1]
    }

    pub fn l(&self) -> T {
        self.l
    }

    pub fn delta(&self, j: usize) -> T {
        self.delta[j - 1]
    }

    pub fn eps(&self, j: usize) -> T {
        self.eps[j - 1]
    }

    pub fn gamma(&self, j: usize) -> T {
        self.gamma[j - 1]
    }

    pub(crate) fn check_junction(&self, j: usize) -> Result<()> {
        if j == 0 || j >= self.n() {
            return Err(Error::IndexOutOfRange {
                what: "junction",
                index: j,
                lo: 1,
                hi: self.n().saturating_sub(1),
            });
        }
        Ok(())
    }

    /// `λ_j(ξ) = e^{-iξ δ_j (j-1) l}`
    pub fn lambda(&self, j: usize, xi: T) -> Cplx<T> {
        cis(-xi * self.delta(j) * T::from_usize(j - 1) * self.l)
    }

    /// `μ_j(ξ) = γ_j e^{-iξ ε_j (j-1) l}`
    pub fn mu(&self, j: usize, xi: T) -> Cplx<T> {
        cis(-xi * self.eps(j) * T::from_usize(j - 1) * self.l) * self.gamma(j)
    }

    /// `α_k = ε_1⋯ε_{k-1} / (2^{k-1} a_1⋯a_{k-1}) · Π (1 - γ_i²)` for
    /// `2 ≤ k ≤ N`; `α_1 = 1`.
    pub fn alpha(&self, k: usize) -> T {
        (1..k)
            .map(|i| self.eps(i) / (T::lit(2.0) * self.a(i)) * (T::one() - self.gamma(i).powi(2)))
            .product()
    }

    /// `ε_k⋯ε_j / (2^{j-k+1} a_k⋯a_j)`
    pub(crate) fn prefactor(&self, j: usize, k: usize) -> T {
        (k..=j)
            .map(|i| self.eps(i) / (T::lit(2.0) * self.a(i)))
            .product()
    }

    /// `l (a_{lo} + … + a_{hi})`, zero for an empty range.
    pub(crate) fn partial_sum(&self, lo: usize, hi: usize) -> T {
        (lo..=hi).map(|i| self.a(i)).sum::<T>() * self.l
    }
}

/// 2×2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2<T: Real>(pub [[Cplx<T>; 2]; 2]);

impl<T: Real> Mat2<T> {
    pub fn identity() -> Self {
        let (o, z) = (c(T::one(), T::zero()), c(T::zero(), T::zero()));
        Mat2([[o, z], [z, o]])
    }

    /// Entry `[M]_{rc}` with 1-based indices.
    pub fn at(&self, r: usize, col: usize) -> Cplx<T> {
        self.0[r - 1][col - 1]
    }

    pub fn det(&self) -> Cplx<T> {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn apply(&self, v: [Cplx<T>; 2]) -> [Cplx<T>; 2] {
        [
            self.0[0][0] * v[0] + self.0[0][1] * v[1],
            self.0[1][0] * v[0] + self.0[1][1] * v[1],
        ]
    }

    /// Largest entrywise distance.
    pub fn max_diff(&self, other: &Self) -> T {
        let mut m = T::zero();
        for r in 0..2 {
            for col in 0..2 {
                m = m.max((self.0[r][col] - other.0[r][col]).norm());
            }
        }
        m
    }
}

impl<T: Real> Mul for Mat2<T> {
    type Output = Mat2<T>;

    fn mul(self, rhs: Self) -> Self {
        let mut out = [[c(T::zero(), T::zero()); 2]; 2];
        for (r, row) in out.iter_mut().enumerate() {
            for (col, entry) in row.iter_mut().enumerate() {
                *entry = self.0[r][0] * rhs.0[0][col] + self.0[r][1] * rhs.0[1][col];
            }
        }
        Mat2(out)
    }
}

/// `T̄_j(ξ) = (ε_j / 2a_j) [[λ_j, μ̄_j], [μ_j, λ̄_j]]`
pub fn transfer_matrix<T: Real>(j: usize, xi: T, params: &LayerParams<T>) -> Result<Mat2<T>> {
    params.check_junction(j)?;
    let s = params.eps(j) / (T::lit(2.0) * params.a(j));
    let lam = params.lambda(j, xi);
    let mu = params.mu(j, xi);
    Ok(Mat2([[lam * s, mu.conj() * s], [mu * s, lam.conj() * s]]))
}

/// `T̄_j ⋯ T̄_k` by repeated left multiplication.
pub fn chain_product<T: Real>(j: usize, k: usize, xi: T, params: &LayerParams<T>) -> Result<Mat2<T>> {
    if k > j {
        return Err(Error::InvalidParameter(format!("chain product needs k ≤ j, got k={k}, j={j}")));
    }
    params.check_junction(j)?;
    params.check_junction(k)?;
    (k..=j).try_fold(Mat2::identity(), |acc, i| Ok(transfer_matrix(i, xi, params)? * acc))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_layer_values() {
        let p = layer_params(&[1.0, 2.0], 1.0).unwrap();
        assert_eq!((p.delta(1), p.eps(1), p.gamma(1)), (-1.0, 3.0, -1.0 / 3.0));
        assert_eq!(p.lambda(1, 0.0), c(1.0, 0.0));
        assert!((p.mu(1, 0.0) - c(-1.0 / 3.0, 0.0)).norm() < 1e-16);
        let t = transfer_matrix(1, 0.0, &p).unwrap();
        let expect = Mat2([[c(1.5, 0.0), c(-0.5, 0.0)], [c(-0.5, 0.0), c(1.5, 0.0)]]);
        assert!(t.max_diff(&expect) < 1e-15);
        // (ε/2a_1)²(1 − γ²) = (9/4)(8/9)
        assert!((t.det() - c(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn equal_layers_are_transparent() {
        let p = layer_params(&[1.7, 1.7, 1.7], 0.5).unwrap();
        for j in 1..3 {
            assert_eq!(p.gamma(j), 0.0);
            assert!(transfer_matrix(j, 0.9, &p).unwrap().max_diff(&Mat2::identity()) < 1e-15);
        }
    }

    #[test]
    fn index_errors() {
        let p = layer_params(&[1.0_f64, 2.0, 1.0], 1.0).unwrap();
        assert!(transfer_matrix(0, 0.0, &p).is_err());
        assert!(transfer_matrix(3, 0.0, &p).is_err());
        assert!(chain_product(1, 2, 0.0, &p).is_err());
        assert!(layer_params(&[1.0, 0.0], 1.0).is_err());
    }

    #[test]
    fn conjugate_pair_structure() {
        let p = layer_params(&[1.0_f64, 2.0, 1.0], 1.0).unwrap();
        let m = chain_product(2, 1, 0.7, &p).unwrap();
        assert!((m.at(1, 1) - m.at(2, 2).conj()).norm() < 1e-14);
        assert!((m.at(1, 2) - m.at(2, 1).conj()).norm() < 1e-14);
        let d = m.at(1, 1).norm_sqr() - m.at(2, 1).norm_sqr();
        assert!((d - 1.0).abs() < 1e-14);
    }
}
