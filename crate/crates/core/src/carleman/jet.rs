use std::ops::{Add, Mul};

use crate::scalar::{c, Cplx, Real};

/// Value with its first two derivatives in one variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet<T: Real> {
    pub v: Cplx<T>,
    pub d1: Cplx<T>,
    pub d2: Cplx<T>,
}

impl<T: Real> Jet<T> {
    pub fn constant(v: Cplx<T>) -> Self {
        let z = c(T::zero(), T::zero());
        Self { v, d1: z, d2: z }
    }

    pub fn real(v: T, d1: T, d2: T) -> Self {
        Self {
            v: c(v, T::zero()),
            d1: c(d1, T::zero()),
            d2: c(d2, T::zero()),
        }
    }

    /// The coordinate itself.
    pub fn variable(x: T) -> Self {
        Self::real(x, T::one(), T::zero())
    }

    /// `e^{iωx}`.
    pub fn oscillation(omega: T, x: T) -> Self {
        let e = c(T::zero(), omega * x).exp();
        Self {
            v: e,
            d1: e * c(T::zero(), omega),
            d2: e * c(-omega * omega, T::zero()),
        }
    }

    pub fn cos(omega: T, x: T) -> Self {
        let (s, co) = (omega * x).sin_cos();
        Self::real(co, -omega * s, -omega * omega * co)
    }

    /// `exp(-1/(1-s))` with `s = ((x-center)/radius)²`, zero outside the support.
    pub fn bump(center: T, radius: T, x: T) -> Self {
        let y = (x - center) / radius;
        let s = y * y;
        if s >= T::one() {
            return Self::real(T::zero(), T::zero(), T::zero());
        }
        let one_minus = T::one() - s;
        let b = (-one_minus.recip()).exp();
        let ds = T::lit(2.0) * (x - center) / (radius * radius);
        let dds = T::lit(2.0) / (radius * radius);
        let g1 = -ds / (one_minus * one_minus);
        let g2 = -dds / (one_minus * one_minus) - T::lit(2.0) * ds * ds / (one_minus * one_minus * one_minus);
        Self::real(b, b * g1, b * (g2 + g1 * g1))
    }
}

impl<T: Real> Mul for Jet<T> {
    type Output = Self;

    fn mul(self, o: Self) -> Self {
        Self {
            v: self.v * o.v,
            d1: self.d1 * o.v + self.v * o.d1,
            d2: self.d2 * o.v + (self.d1 * o.d1) * T::lit(2.0) + self.v * o.d2,
        }
    }
}

impl<T: Real> Mul<Cplx<T>> for Jet<T> {
    type Output = Self;

    fn mul(self, k: Cplx<T>) -> Self {
        Self {
            v: self.v * k,
            d1: self.d1 * k,
            d2: self.d2 * k,
        }
    }
}

impl<T: Real> Add for Jet<T> {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        Self {
            v: self.v + o.v,
            d1: self.d1 + o.d1,
            d2: self.d2 + o.d2,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(f: impl Fn(f64) -> Jet<f64>, x: f64) {
        let e = 1e-4;
        let d1 = (f(x + e).v - f(x - e).v) / (2.0 * e);
        let d2 = (f(x + e).v - 2.0 * f(x).v + f(x - e).v) / (e * e);
        let j = f(x);
        assert!((j.d1 - d1).norm() < 1e-6 * (1.0 + d1.norm()), "{x}");
        assert!((j.d2 - d2).norm() < 1e-5 * (1.0 + d2.norm()), "{x}");
    }

    #[test]
    fn derivatives_match_differences() {
        for x in [-0.7, 0.1, 0.35, 0.9] {
            check(|x| Jet::bump(0.2, 0.9, x), x);
            check(|x| Jet::oscillation(3.0, x) * Jet::bump(0.0, 1.2, x), x);
            check(|x| Jet::variable(x) * Jet::cos(2.0, x) * Jet::bump(0.0, 1.5, x), x);
        }
    }

    #[test]
    fn bump_vanishes_outside() {
        assert_eq!(Jet::bump(0.0, 1.0, 1.0).v.norm(), 0.0);
        assert_eq!(Jet::bump(0.0, 1.0, -3.0).d2.norm(), 0.0);
        assert!(Jet::bump(0.0, 1.0, 0.0).d1.norm() == 0.0);
    }
}
