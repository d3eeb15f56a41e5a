use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::jet::Jet;
use crate::scalar::{c, Cplx, Real};

/// Spatial factor of a sample term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpaceProfile<T: Real> {
    /// `cos(ωx)·bump(0, r)`, even, so its slope at the vertex is zero.
    Vertex { radius: T, omega: T },
    /// `x·bump(0, r)`, zero at the vertex with slope `e^{-1}`.
    Slope { radius: T },
    /// `e^{iωx}·bump(c, r)` with `c > r`, zero near the vertex.
    Local { center: T, radius: T, omega: T },
}

impl<T: Real> SpaceProfile<T> {
    pub fn jet(&self, x: T) -> Jet<T> {
        match *self {
            SpaceProfile::Vertex { radius, omega } => Jet::cos(omega, x) * Jet::bump(T::zero(), radius, x),
            SpaceProfile::Slope { radius } => Jet::variable(x) * Jet::bump(T::zero(), radius, x),
            SpaceProfile::Local { center, radius, omega } => Jet::oscillation(omega, x) * Jet::bump(center, radius, x),
        }
    }

    pub fn reach(&self) -> T {
        match *self {
            SpaceProfile::Vertex { radius, .. } | SpaceProfile::Slope { radius } => radius,
            SpaceProfile::Local { center, radius, .. } => center + radius,
        }
    }
}

/// `bump(center, radius)(t)·e^{iνt}`, supported inside `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeProfile<T: Real> {
    pub center: T,
    pub radius: T,
    pub nu: T,
}

impl<T: Real> TimeProfile<T> {
    pub fn jet(&self, t: T) -> Jet<T> {
        Jet::oscillation(self.nu, t) * Jet::bump(self.center, self.radius, t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term<T: Real> {
    pub amplitude: Cplx<T>,
    pub time: TimeProfile<T>,
    pub space: SpaceProfile<T>,
}

/// Number of random terms of each kind and the largest frequency used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothnessBudget {
    pub terms: usize,
    pub max_frequency: f64,
}

impl Default for SmoothnessBudget {
    fn default() -> Self {
        Self {
            terms: 3,
            max_frequency: 4.0,
        }
    }
}

/// A smooth function on the star, compactly supported in `(0, 1) × [0, extent)`,
/// continuous at the vertex with zero total outgoing slope.
#[derive(Debug, Clone, PartialEq)]
pub struct ZcompSample<T: Real> {
    edges: Vec<Vec<Term<T>>>,
    extent: T,
}

/// Values of `q_j` and `(∂_t + i∂_xx) q_j` at one point, plus `q_{j,x}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointValues<T: Real> {
    pub q: Cplx<T>,
    pub q_x: Cplx<T>,
    pub lq: Cplx<T>,
}

impl<T: Real> ZcompSample<T> {
    pub fn zero(edges: usize) -> Self {
        Self {
            edges: vec![Vec::new(); edges],
            extent: T::one(),
        }
    }

    pub fn from_terms(edges: Vec<Vec<Term<T>>>) -> Self {
        let extent = edges
            .iter()
            .flatten()
            .map(|t| t.space.reach())
            .fold(T::one(), T::max);
        Self { edges, extent }
    }

    pub fn edges(&self) -> usize {
        self.edges.len()
    }

    pub fn terms(&self, edge: usize) -> &[Term<T>] {
        &self.edges[edge]
    }

    /// Every edge component vanishes for `x ≥ extent`.
    pub fn extent(&self) -> T {
        self.extent
    }

    pub fn scaled(&self, k: Cplx<T>) -> Self {
        let edges = self
            .edges
            .iter()
            .map(|terms| {
                terms
                    .iter()
                    .map(|t| Term {
                        amplitude: t.amplitude * k,
                        ..*t
                    })
                    .collect()
            })
            .collect();
        Self {
            edges,
            extent: self.extent,
        }
    }

    pub fn eval(&self, edge: usize, t: T, x: T) -> PointValues<T> {
        let zero = c(T::zero(), T::zero());
        let i = c(T::zero(), T::one());
        self.edges[edge].iter().fold(
            PointValues { q: zero, q_x: zero, lq: zero },
            |acc, term| {
                let tj = term.time.jet(t);
                let xj = term.space.jet(x);
                let a = term.amplitude;
                PointValues {
                    q: acc.q + a * tj.v * xj.v,
                    q_x: acc.q_x + a * tj.v * xj.d1,
                    lq: acc.lq + a * (tj.d1 * xj.v + i * tj.v * xj.d2),
                }
            },
        )
    }

    /// Largest vertex mismatch `max_{j,t} |q_j(t,0) - q_1(t,0)|` and largest
    /// `|Σ_j q_{j,x}(t,0)|` over `times`.
    pub fn membership_defect(&self, times: &[T]) -> (T, T) {
        times.iter().fold((T::zero(), T::zero()), |(spread, flux), &t| {
            let at: Vec<PointValues<T>> = (0..self.edges()).map(|j| self.eval(j, t, T::zero())).collect();
            let s = at
                .iter()
                .map(|p| (p.q - at[0].q).norm())
                .fold(T::zero(), T::max);
            let f = at.iter().map(|p| p.q_x).fold(c(T::zero(), T::zero()), |a, b| a + b).norm();
            (spread.max(s), flux.max(f))
        })
    }
}

/// Seeded random member of the admissible class on a star with `n` edges.
/// Shared even vertex profiles fix the vertex value, slope profiles with
/// amplitudes summing to zero fix the vertex flux, and local bumps away from
/// the vertex add edge-specific detail.
pub fn sample_zcomp<T: Real>(n: usize, seed: u64, budget: SmoothnessBudget) -> ZcompSample<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = budget.max_frequency.abs();
    let freq = |rng: &mut ChaCha8Rng| if w > 0.0 { rng.gen_range(-w..=w) } else { 0.0 };
    let time = |rng: &mut ChaCha8Rng, f: f64| TimeProfile {
        center: T::lit(rng.gen_range(0.4..0.6)),
        radius: T::lit(rng.gen_range(0.25..0.35)),
        nu: T::lit(f),
    };
    let amp = |rng: &mut ChaCha8Rng| c(T::lit(rng.gen_range(-1.0..1.0)), T::lit(rng.gen_range(-1.0..1.0)));

    let mut edges: Vec<Vec<Term<T>>> = vec![Vec::new(); n];
    for _ in 0..budget.terms {
        let f = freq(&mut rng);
        let term = Term {
            amplitude: amp(&mut rng),
            time: time(&mut rng, f),
            space: SpaceProfile::Vertex {
                radius: T::lit(rng.gen_range(1.0..2.0)),
                omega: T::lit(freq(&mut rng)),
            },
        };
        edges.iter_mut().for_each(|e| e.push(term));
    }
    for _ in 0..budget.terms {
        let f = freq(&mut rng);
        let tp = time(&mut rng, f);
        let radius = T::lit(rng.gen_range(1.0..2.0));
        let raw: Vec<Cplx<T>> = (0..n).map(|_| amp(&mut rng)).collect();
        let mean = raw.iter().fold(c(T::zero(), T::zero()), |a, b| a + b) / T::from_usize(n.max(1));
        for (e, a) in edges.iter_mut().zip(raw) {
            e.push(Term {
                amplitude: a - mean,
                time: tp,
                space: SpaceProfile::Slope { radius },
            });
        }
    }
    for e in edges.iter_mut() {
        for _ in 0..budget.terms {
            let f = freq(&mut rng);
            let radius = rng.gen_range(0.2..0.5);
            e.push(Term {
                amplitude: amp(&mut rng),
                time: time(&mut rng, f),
                space: SpaceProfile::Local {
                    center: T::lit(radius + rng.gen_range(0.05..1.0)),
                    radius: T::lit(radius),
                    omega: T::lit(freq(&mut rng)),
                },
            });
        }
    }
    ZcompSample::from_terms(edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::line::uniform_nodes;

    #[test]
    fn seeded_samples_are_deterministic() {
        let a = sample_zcomp::<f64>(4, 11, SmoothnessBudget::default());
        let b = sample_zcomp::<f64>(4, 11, SmoothnessBudget::default());
        let d = sample_zcomp::<f64>(4, 12, SmoothnessBudget::default());
        assert_eq!(a, b);
        assert_ne!(a, d);
    }

    #[test]
    fn membership_conditions_hold() {
        let times = uniform_nodes(0.0, 1.0, 400);
        for n in 2..=6 {
            for seed in 0..10 {
                let q = sample_zcomp::<f64>(n, seed, SmoothnessBudget::default());
                let (spread, flux) = q.membership_defect(&times);
                assert!(spread <= 1e-12 && flux <= 1e-12, "{n} {seed}: {spread:e} {flux:e}");
                assert!(q.extent() <= 2.0);
            }
        }
        let zero = ZcompSample::<f64>::zero(3);
        assert_eq!(zero.membership_defect(&times), (0.0, 0.0));
    }

    #[test]
    fn compact_support() {
        let q = sample_zcomp::<f64>(3, 5, SmoothnessBudget::default());
        for j in 0..3 {
            for (t, x) in [(0.0, 0.5), (1.0, 0.2), (0.5, q.extent()), (0.5, 2.5)] {
                assert_eq!(q.eval(j, t, x).q.norm(), 0.0);
            }
        }
        assert!(q.eval(0, 0.5, 0.0).q.norm() > 0.0);
    }
}
