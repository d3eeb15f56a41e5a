use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::scalar::{c, cis, Cplx, Real};

/// Coefficients below this magnitude are dropped.
pub const PRUNE_TOLERANCE: f64 = 1e-16;

/// Sign of the exponent `e^{±2iξl n·a}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Plus,
    Minus,
}

impl Direction {
    pub fn flip(self) -> Self {
        match self {
            Direction::Plus => Direction::Minus,
            Direction::Minus => Direction::Plus,
        }
    }

    fn sign<T: Real>(self) -> T {
        match self {
            Direction::Plus => T::one(),
            Direction::Minus => -T::one(),
        }
    }
}

/// Finite sum `Σ c_n e^{±2iξl (n_2 a_2 + … + n_{N-1} a_{N-1})}` over integer
/// multi-indices `n`. Position `p` of a multi-index pairs with `a_{p+2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpPolynomial<T: Real> {
    terms: BTreeMap<Vec<i32>, Cplx<T>>,
    direction: Direction,
    a: Vec<T>,
    l: T,
}

impl<T: Real> ExpPolynomial<T> {
    /// The zero polynomial over the frequencies `a = (a_2, …, a_{N-1})`.
    pub fn zero(direction: Direction, a: Vec<T>, l: T) -> Self {
        Self {
            terms: BTreeMap::new(),
            direction,
            a,
            l,
        }
    }

    pub fn constant(value: Cplx<T>, direction: Direction, a: Vec<T>, l: T) -> Self {
        let mut p = Self::zero(direction, a, l);
        p.insert(vec![0; p.a.len()], value);
        p
    }

    pub fn from_terms(
        terms: impl IntoIterator<Item = (Vec<i32>, Cplx<T>)>,
        direction: Direction,
        a: Vec<T>,
        l: T,
    ) -> Result<Self> {
        let mut p = Self::zero(direction, a, l);
        for (n, v) in terms {
            if n.len() != p.a.len() {
                return Err(Error::InvalidParameter(format!(
                    "multi-index of length {} for {} frequencies",
                    n.len(),
                    p.a.len()
                )));
            }
            p.insert(n, v);
        }
        Ok(p)
    }

    fn insert(&mut self, n: Vec<i32>, v: Cplx<T>) {
        let e = self.terms.entry(n).or_insert_with(|| c(T::zero(), T::zero()));
        *e += v;
    }

    fn same_frame(&self, other: &Self) -> Self {
        Self::zero(self.direction, self.a.clone(), self.l)
            .tap_terms(other.aligned_terms(self.direction))
    }

    fn tap_terms(mut self, terms: impl IntoIterator<Item = (Vec<i32>, Cplx<T>)>) -> Self {
        for (n, v) in terms {
            self.insert(n, v);
        }
        self
    }

    fn aligned_terms(&self, direction: Direction) -> Vec<(Vec<i32>, Cplx<T>)> {
        let flip = direction != self.direction;
        self.terms
            .iter()
            .map(|(n, v)| {
                let n = if flip { n.iter().map(|x| -x).collect() } else { n.clone() };
                (n, *v)
            })
            .collect()
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn frequencies(&self) -> &[T] {
        &self.a
    }

    pub fn l(&self) -> T {
        self.l
    }

    /// Length of the multi-indices.
    pub fn dim(&self) -> usize {
        self.a.len()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[i32], Cplx<T>)> + '_ {
        self.terms.iter().map(|(n, v)| (n.as_slice(), *v))
    }

    pub fn coefficient(&self, n: &[i32]) -> Cplx<T> {
        self.terms.get(n).copied().unwrap_or_else(|| c(T::zero(), T::zero()))
    }

    /// `n · a` scaled by `2l`: the shift attached to a multi-index.
    pub fn shift_of(&self, n: &[i32]) -> T {
        T::lit(2.0) * self.l * n.iter().zip(&self.a).map(|(&k, &a)| T::lit(k as f64) * a).sum::<T>()
    }

    pub fn eval(&self, xi: T) -> Cplx<T> {
        let s = self.direction.sign::<T>();
        self.terms
            .iter()
            .map(|(n, v)| *v * cis(s * xi * self.shift_of(n)))
            .fold(c(T::zero(), T::zero()), |acc, z| acc + z)
    }

    /// Complex conjugate as a function of real `ξ`.
    pub fn conj(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(n, v)| (n.clone(), v.conj())).collect(),
            direction: self.direction.flip(),
            a: self.a.clone(),
            l: self.l,
        }
    }

    /// Same function written with the other exponent sign when needed.
    pub fn with_direction(&self, direction: Direction) -> Self {
        Self::zero(direction, self.a.clone(), self.l).tap_terms(self.aligned_terms(direction))
    }

    pub fn scale(&self, s: Cplx<T>) -> Self {
        Self {
            terms: self.terms.iter().map(|(n, v)| (n.clone(), *v * s)).collect(),
            ..self.clone()
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (n, v) in other.aligned_terms(self.direction) {
            out.insert(n, v);
        }
        out.pruned()
    }

    /// Multiplies by `e^{dir·2iξl shift·a}`; the result uses `dir`.
    pub fn times_exp(&self, shift: &[i32], direction: Direction) -> Self {
        let aligned = self.aligned_terms(direction);
        Self::zero(direction, self.a.clone(), self.l).tap_terms(
            aligned
                .into_iter()
                .map(|(n, v)| (n.iter().zip(shift).map(|(x, s)| x + s).collect(), v)),
        )
    }

    /// Product, keeping only terms of total weight `Σ|n_i| ≤ max_weight`.
    pub fn mul_truncated(&self, other: &Self, max_weight: Option<u32>) -> Self {
        let rhs = self.same_frame(other);
        let mut out = Self::zero(self.direction, self.a.clone(), self.l);
        for (n, v) in &self.terms {
            for (m, w) in &rhs.terms {
                let k: Vec<i32> = n.iter().zip(m).map(|(x, y)| x + y).collect();
                if max_weight.is_some_and(|mw| weight(&k) > mw) {
                    continue;
                }
                out.insert(k, *v * *w);
            }
        }
        out.pruned()
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.mul_truncated(other, None)
    }

    pub fn pruned(mut self) -> Self {
        let tol = T::lit(PRUNE_TOLERANCE);
        self.terms.retain(|_, v| v.norm() >= tol);
        self
    }

    /// Whether every multi-index is componentwise `≥ 0`.
    pub fn is_nonnegative(&self) -> bool {
        self.terms.keys().all(|n| n.iter().all(|&k| k >= 0))
    }

    pub fn max_weight(&self) -> u32 {
        self.terms.keys().map(|n| weight(n)).max().unwrap_or(0)
    }

    pub fn coefficient_l1(&self) -> T {
        self.terms.values().map(|v| v.norm()).sum()
    }
}

/// Total weight `Σ|n_i|` of a multi-index.
pub fn weight(n: &[i32]) -> u32 {
    n.iter().map(|k| k.unsigned_abs()).sum()
}

/// Indicator multi-index of `a_lo + … + a_hi` (1-based layer indices,
/// positions start at `a_2`).
pub(crate) fn range_index(dim: usize, lo: usize, hi: usize) -> Vec<i32> {
    (0..dim).map(|p| i32::from((lo..=hi).contains(&(p + 2)))).collect()
}
