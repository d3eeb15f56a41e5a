use crate::error::{Error, Result};
use crate::line::trapezoid_weights;
use crate::line::uniform_nodes;
use crate::scalar::{c, Cplx, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AppellDirection {
    Forward,
    /// Undoes `Forward`; the same map with `α` and `β` exchanged.
    Inverse,
}

/// Change of variables taking solutions of `∂_s u = (A+iB) Δu` with decay
/// rates `(α, β)` at `s = 0, 1` to solutions with equal rates `√(αβ)`.
/// Defined for `t ∈ [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AppellTransform<T: Real> {
    alpha: T,
    beta: T,
    diffusion: Cplx<T>,
}

impl<T: Real> AppellTransform<T> {
    pub fn new(alpha: T, beta: T, a: T, b: T) -> Result<Self> {
        if !(alpha > T::zero() && beta > T::zero()) {
            return Err(Error::InvalidParameter(format!("rates must be positive, got ({alpha}, {beta})")));
        }
        if a == T::zero() && b == T::zero() {
            return Err(Error::InvalidParameter("A + iB must be non-zero".into()));
        }
        Ok(Self {
            alpha,
            beta,
            diffusion: c(a, b),
        })
    }

    /// The Schrödinger case `A + iB = i`.
    pub fn schrodinger(alpha: T, beta: T) -> Result<Self> {
        Self::new(alpha, beta, T::zero(), T::one())
    }

    pub fn inverse(&self) -> Self {
        Self {
            alpha: self.beta,
            beta: self.alpha,
            ..*self
        }
    }

    pub fn directed(&self, direction: AppellDirection) -> Self {
        match direction {
            AppellDirection::Forward => *self,
            AppellDirection::Inverse => self.inverse(),
        }
    }

    fn denominator(&self, t: T) -> T {
        self.alpha.sqrt() * (T::one() - t) + self.beta.sqrt() * t
    }

    pub fn time_map(&self, t: T) -> T {
        self.beta.sqrt() * t / self.denominator(t)
    }

    pub fn space_map(&self, t: T, x: T) -> T {
        (self.alpha * self.beta).sqrt().sqrt() * x / self.denominator(t)
    }

    /// `ũ(t, x)` from the original family `u(s, y)`.
    pub fn apply(&self, u: impl Fn(T, T) -> Cplx<T>, t: T, x: T) -> Cplx<T> {
        let d = self.denominator(t);
        let quarter = (self.alpha * self.beta).sqrt().sqrt();
        let amplitude = (quarter / d).sqrt();
        let chirp = c(
            (self.alpha.sqrt() - self.beta.sqrt()) * x * x / (T::lit(4.0) * d),
            T::zero(),
        ) / self.diffusion;
        u(self.time_map(t), quarter * x / d) * chirp.exp() * amplitude
    }

    /// Coefficient of `|y|²` in the weight on the original side of the norm
    /// identity `‖e^{γ|x|²} ũ(t)‖ = ‖e^{k|y|²} u(s)‖`.
    pub fn weight_exponent(&self, gamma: T, s: T) -> T {
        let d = self.alpha.sqrt() * s + self.beta.sqrt() * (T::one() - s);
        let (a, b) = (self.diffusion.re, self.diffusion.im);
        gamma * (self.alpha * self.beta).sqrt() / (d * d)
            + (self.alpha.sqrt() - self.beta.sqrt()) * a / (T::lit(4.0) * (a * a + b * b) * d)
    }

    /// Both sides of the norm identity by trapezoid quadrature on
    /// `[-extent, extent]` in `x` and in `y`.
    pub fn norm_pair(
        &self,
        u: impl Fn(T, T) -> Cplx<T>,
        gamma: T,
        t: T,
        extent: T,
        intervals: usize,
    ) -> (T, T) {
        let nodes = uniform_nodes(-extent, extent, intervals);
        let w = trapezoid_weights(&nodes);
        let s = self.time_map(t);
        let k = self.weight_exponent(gamma, s);
        let (lhs, rhs) = nodes.iter().zip(&w).fold((T::zero(), T::zero()), |(l, r), (&z, &wz)| {
            let tilde = self.apply(&u, t, z).norm() * (gamma * z * z).exp();
            let orig = u(s, z).norm() * (k * z * z).exp();
            (l + wz * tilde * tilde, r + wz * orig * orig)
        });
        (lhs.sqrt(), rhs.sqrt())
    }
}

/// Transforms the family `u` in `direction`, returning `(t, x) ↦ ũ(t, x)`.
pub fn appell_transform<T: Real, F>(
    u: F,
    alpha: T,
    beta: T,
    a: T,
    b: T,
    direction: AppellDirection,
) -> Result<impl Fn(T, T) -> Cplx<T>>
where
    F: Fn(T, T) -> Cplx<T>,
{
    let map = AppellTransform::new(alpha, beta, a, b)?.directed(direction);
    Ok(move |t, x| map.apply(&u, t, x))
}
