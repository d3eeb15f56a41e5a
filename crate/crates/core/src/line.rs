//! Complex samples on a (possibly non-uniform) grid of the real line.

use crate::error::{Error, Result};
use crate::scalar::{Cplx, Real};

/// Samples `u(x_i)` on strictly increasing nodes `x_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct LineSamples<T: Real> {
    pub x: Vec<T>,
    pub u: Vec<Cplx<T>>,
}

impl<T: Real> LineSamples<T> {
    pub fn new(x: Vec<T>, u: Vec<Cplx<T>>) -> Result<Self> {
        if x.len() != u.len() {
            return Err(Error::GridMismatch(format!(
                "{} nodes but {} values",
                x.len(),
                u.len()
            )));
        }
        if x.len() < 2 {
            return Err(Error::GridMismatch("need at least two nodes".into()));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::GridMismatch("nodes must be strictly increasing".into()));
        }
        if u.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("line samples"));
        }
        Ok(Self { x, u })
    }

    /// Uniform grid on `[lo, hi]` with `n + 1` nodes, sampled from `f`.
    pub fn from_fn(lo: T, hi: T, n: usize, f: impl Fn(T) -> Cplx<T>) -> Self {
        let x = uniform_nodes(lo, hi, n);
        let u = x.iter().map(|&xi| f(xi)).collect();
        Self { x, u }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Trapezoid weights of the node set.
    pub fn weights(&self) -> Vec<T> {
        trapezoid_weights(&self.x)
    }

    /// `(∫ |u|^2 dx)^{1/2}` by the trapezoid rule.
    pub fn l2_norm(&self) -> T {
        self.weights()
            .iter()
            .zip(&self.u)
            .map(|(&w, z)| w * z.norm_sqr())
            .sum::<T>()
            .sqrt()
    }

    /// Relative L² distance `‖u − v‖ / ‖v‖` to values of `other` on the same nodes.
    pub fn relative_l2_error(&self, reference: &[Cplx<T>]) -> T {
        let w = self.weights();
        let mut num = T::zero();
        let mut den = T::zero();
        for ((wi, a), b) in w.iter().zip(&self.u).zip(reference) {
            num += *wi * (*a - *b).norm_sqr();
            den += *wi * b.norm_sqr();
        }
        (num / den).sqrt()
    }

    /// Restriction to nodes with `lo <= x <= hi`.
    pub fn restrict(&self, lo: T, hi: T) -> Self {
        let (x, u) = self
            .x
            .iter()
            .zip(&self.u)
            .filter(|(x, _)| **x >= lo && **x <= hi)
            .map(|(x, u)| (*x, *u))
            .unzip();
        Self { x, u }
    }

    /// Piecewise-linear interpolation; zero outside the node range.
    pub fn interpolate(&self, at: T) -> Cplx<T> {
        let n = self.x.len();
        if at < self.x[0] || at > self.x[n - 1] {
            return Cplx::new(T::zero(), T::zero());
        }
        let i = match self
            .x
            .binary_search_by(|p| p.partial_cmp(&at).expect("finite nodes"))
        {
            Ok(i) => return self.u[i],
            Err(i) => i,
        };
        let (x0, x1) = (self.x[i - 1], self.x[i]);
        let s = (at - x0) / (x1 - x0);
        self.u[i - 1] * (T::one() - s) + self.u[i] * s
    }
}

pub fn uniform_nodes<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    let h = (hi - lo) / T::from_usize(n);
    (0..=n).map(|i| lo + h * T::from_usize(i)).collect()
}

/// Composite trapezoid weights for increasing nodes.
pub fn trapezoid_weights<T: Real>(x: &[T]) -> Vec<T> {
    let n = x.len();
    let half = T::lit(0.5);
    let mut w = vec![T::zero(); n];
    for i in 0..n.saturating_sub(1) {
        let dx = x[i + 1] - x[i];
        w[i] += half * dx;
        w[i + 1] += half * dx;
    }
    w
}
