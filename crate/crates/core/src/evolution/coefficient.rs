use crate::error::{Error, Result};
use crate::scalar::Real;

/// Step coefficient `σ = a_i^{-2}` on `I_i = (b_{i-1}, b_i)` with
/// `b_0 = -∞`, `b_N = +∞`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseCoefficient<T: Real> {
    a: Vec<T>,
    breakpoints: Vec<T>,
    spacing: Option<T>,
}

impl<T: Real> PiecewiseCoefficient<T> {
    /// Breakpoints `(j-1) l` for `j = 1..N-1`, i.e. `0, l, …, (N-2) l`.
    pub fn uniform(a: Vec<T>, l: T) -> Result<Self> {
        if !(l > T::zero()) {
            return Err(Error::InvalidParameter(format!("spacing must be positive, got {l}")));
        }
        let n = a.len();
        let breakpoints = (0..n.saturating_sub(1)).map(|j| l * T::from_usize(j)).collect();
        let mut out = Self::from_breakpoints(a, breakpoints)?;
        out.spacing = Some(l);
        Ok(out)
    }

    pub fn from_breakpoints(a: Vec<T>, breakpoints: Vec<T>) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::InvalidParameter("no coefficient values".into()));
        }
        if let Some(bad) = a.iter().find(|&&v| !(v > T::zero()) || !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("coefficient value {bad} is not positive")));
        }
        if breakpoints.len() + 1 != a.len() {
            return Err(Error::InvalidParameter(format!(
                "{} values need {} breakpoints, got {}",
                a.len(),
                a.len() - 1,
                breakpoints.len()
            )));
        }
        if breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidParameter("breakpoints must increase".into()));
        }
        Ok(Self {
            a,
            breakpoints,
            spacing: None,
        })
    }

    /// Builds from `σ` values instead of `a = σ^{-1/2}`.
    pub fn from_sigma(sigma: &[T], breakpoints: Vec<T>) -> Result<Self> {
        if let Some(bad) = sigma.iter().find(|&&s| !(s > T::zero())) {
            return Err(Error::InvalidParameter(format!("σ value {bad} is not positive")));
        }
        Self::from_breakpoints(sigma.iter().map(|s| s.sqrt().recip()).collect(), breakpoints)
    }

    pub fn a(&self) -> &[T] {
        &self.a
    }

    pub fn breakpoints(&self) -> &[T] {
        &self.breakpoints
    }

    /// Number of pieces `N`.
    pub fn pieces(&self) -> usize {
        self.a.len()
    }

    /// Uniform spacing `l` when built by [`uniform`](Self::uniform).
    pub fn spacing(&self) -> Option<T> {
        self.spacing
    }

    pub fn sigma(&self, piece: usize) -> T {
        (self.a[piece] * self.a[piece]).recip()
    }

    pub fn sigma_minus(&self) -> T {
        self.sigma(0)
    }

    pub fn sigma_plus(&self) -> T {
        self.sigma(self.pieces() - 1)
    }

    /// Piece containing `x`; a breakpoint belongs to the piece on its right.
    pub fn piece_of(&self, x: T) -> usize {
        self.breakpoints.iter().take_while(|&&b| b <= x).count()
    }

    pub fn sigma_at(&self, x: T) -> T {
        self.sigma(self.piece_of(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_layout() {
        let s = PiecewiseCoefficient::uniform(vec![1.0, 2.0, 1.0], 1.5).unwrap();
        assert_eq!(s.breakpoints(), &[0.0, 1.5]);
        assert_eq!(s.sigma_minus(), 1.0);
        assert_eq!(s.sigma_at(0.7), 0.25);
        assert_eq!(s.piece_of(1.5), 2);
        assert_eq!(s.spacing(), Some(1.5));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(PiecewiseCoefficient::uniform(vec![1.0, -2.0], 1.0).is_err());
        assert!(PiecewiseCoefficient::from_breakpoints(vec![1.0, 2.0], vec![]).is_err());
        assert!(PiecewiseCoefficient::from_breakpoints(vec![1.0, 2.0, 3.0], vec![1.0, 0.0]).is_err());
    }

    #[test]
    fn sigma_round_trip() {
        let s = PiecewiseCoefficient::from_sigma(&[1.0, 0.25, 0.25, 1.0], vec![-1.0, 0.0, 1.0]).unwrap();
        assert_eq!(s.a(), &[1.0, 2.0, 2.0, 1.0]);
    }
}
