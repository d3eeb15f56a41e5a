use crate::error::{Error, Result};
use crate::evolution::PiecewiseCoefficient;
use crate::graph::{build_star, GraphState};
use crate::line::LineSamples;
use crate::scalar::{c, Cplx, Real};

/// Solution of `u_t = i u_xx` on the line with `u(0, x) = e^{-b x²}`,
/// `Re b > 0`.
pub fn free_gaussian<T: Real>(b: Cplx<T>, t: T, x: T) -> Cplx<T> {
    let d = c(T::one(), T::zero()) + b * c(T::zero(), T::lit(4.0) * t);
    (-(b * (x * x)) / d).exp() / d.sqrt()
}

fn chirp<T: Real>(alpha: T) -> Cplx<T> {
    c(alpha, T::lit(0.25))
}

/// Identical chirped Gaussians `e^{-αx² - ix²/4}` on the rays of a star with
/// `edges` rays; the solution at `t = 1` is `(4iα)^{-1/2} e^{ix²/4 - x²/(16α)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StarSharpness<T: Real> {
    pub alpha: T,
    pub edges: usize,
}

pub fn sharp_example_star<T: Real>(alpha: T, edges: usize) -> Result<StarSharpness<T>> {
    if !(alpha > T::zero()) {
        return Err(Error::InvalidParameter(format!("alpha must be positive, got {alpha}")));
    }
    if edges < 2 {
        return Err(Error::InvalidParameter(format!("a star needs at least two edges, got {edges}")));
    }
    Ok(StarSharpness { alpha, edges })
}

impl<T: Real> StarSharpness<T> {
    pub fn initial(&self, x: T) -> Cplx<T> {
        (-(chirp(self.alpha) * (x * x))).exp()
    }

    pub fn at(&self, t: T, x: T) -> Cplx<T> {
        free_gaussian(chirp(self.alpha), t, x)
    }

    pub fn at_one(&self, x: T) -> Cplx<T> {
        self.at(T::one(), x)
    }

    /// `(α, 1/(16α))`, the decay rates at times 0 and 1.
    pub fn rates(&self) -> (T, T) {
        (self.alpha, T::one() / (T::lit(16.0) * self.alpha))
    }

    pub fn initial_state(&self, truncation: T, h: T) -> Result<GraphState<T>> {
        let (graph, grid) = build_star(self.edges, truncation, h)?;
        Ok(GraphState::from_fn(graph, grid, |_, x| self.initial(x)))
    }

    pub fn state_at_one(&self, truncation: T, h: T) -> Result<GraphState<T>> {
        let (graph, grid) = build_star(self.edges, truncation, h)?;
        let mut s = GraphState::from_fn(graph, grid, |_, x| self.at_one(x));
        s.time = T::one();
        Ok(s)
    }
}

/// Line with `σ = a_1^{-2}` on `x < 0` and `a_2^{-2}` on `x > 0`, started from
/// `g(a_i x)` with `g(z) = e^{-(1+i/4) z²}`. The solution is `G(t, a_i x)` with
/// `G` the free evolution of `g`; at `t = 1`,
/// `u = (4i)^{-1/2} e^{-a_i²x²/16 + i a_i²x²/4}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoStepSharpness<T: Real> {
    pub a1: T,
    pub a2: T,
}

pub fn sharp_example_two_step<T: Real>(a1: T, a2: T) -> Result<TwoStepSharpness<T>> {
    if !(a1 > T::zero() && a2 > T::zero()) {
        return Err(Error::InvalidParameter(format!("steps must be positive, got ({a1}, {a2})")));
    }
    Ok(TwoStepSharpness { a1, a2 })
}

impl<T: Real> TwoStepSharpness<T> {
    fn scale(&self, x: T) -> T {
        if x <= T::zero() {
            self.a1 * x
        } else {
            self.a2 * x
        }
    }

    pub fn initial(&self, x: T) -> Cplx<T> {
        let z = self.scale(x);
        (-(chirp(T::one()) * (z * z))).exp()
    }

    pub fn at(&self, t: T, x: T) -> Cplx<T> {
        free_gaussian(chirp(T::one()), t, self.scale(x))
    }

    pub fn at_one(&self, x: T) -> Cplx<T> {
        self.at(T::one(), x)
    }

    /// `(α, α/16)` with `α = min(a_1², a_2²)`.
    pub fn rates(&self) -> (T, T) {
        let alpha = (self.a1 * self.a1).min(self.a2 * self.a2);
        (alpha, alpha / T::lit(16.0))
    }

    pub fn coefficient(&self) -> Result<PiecewiseCoefficient<T>> {
        PiecewiseCoefficient::from_breakpoints(vec![self.a1, self.a2], vec![T::zero()])
    }

    pub fn initial_samples(&self, lo: T, hi: T, intervals: usize) -> LineSamples<T> {
        LineSamples::from_fn(lo, hi, intervals, |x| self.initial(x))
    }
}
