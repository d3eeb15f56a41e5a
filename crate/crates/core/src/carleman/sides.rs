use std::io::Write;

use rayon::prelude::*;

use super::alpha::{to_real, AlphaVectors};
use super::zcomp::ZcompSample;
use crate::error::{Error, Result};
use crate::line::{trapezoid_weights, uniform_nodes};
use crate::scalar::{c, Real};

/// Parameters `(μ, ε, R)` of `φ_j = μ(α_j x + R t(1-t))² - (1+ε)R² t(1-t)/(16μ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CarlemanWeight<T: Real> {
    pub mu: T,
    pub eps: T,
    pub r: T,
}

impl<T: Real> CarlemanWeight<T> {
    pub fn new(mu: T, eps: T, r: T) -> Result<Self> {
        if !(mu > T::zero() && eps > T::zero() && r > T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "weight parameters must be positive, got (mu, eps, R) = ({mu}, {eps}, {r})"
            )));
        }
        Ok(Self { mu, eps, r })
    }

    pub fn phi(&self, alpha: T, t: T, x: T) -> T {
        let s = t * (T::one() - t);
        let shift = alpha * x + self.r * s;
        self.mu * shift * shift - (T::one() + self.eps) * self.r * self.r * s / (T::lit(16.0) * self.mu)
    }

    /// `∂_x φ` at the vertex.
    pub fn phi_x_at_vertex(&self, alpha: T, t: T) -> T {
        T::lit(2.0) * self.mu * alpha * self.r * t * (T::one() - t)
    }

    /// `R²ε/(8μ)`.
    pub fn lhs_factor(&self) -> T {
        self.r * self.r * self.eps / (T::lit(8.0) * self.mu)
    }
}

/// The eighteen `(μ, ε, R)` triples of the grid
/// `{1/2, 1, 2} × {1/4, 1/2} × {2, 4, 8}`.
pub fn parameter_grid<T: Real>() -> Vec<CarlemanWeight<T>> {
    let mut out = Vec::with_capacity(18);
    for mu in [0.5, 1.0, 2.0] {
        for eps in [0.25, 0.5] {
            for r in [2.0, 4.0, 8.0] {
                out.push(CarlemanWeight {
                    mu: T::lit(mu),
                    eps: T::lit(eps),
                    r: T::lit(r),
                });
            }
        }
    }
    out
}

/// Tensor trapezoid grid on `[0, 1] × [0, extent]`. Node counts must be odd so
/// every other node forms the coarse grid of the error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Quadrature {
    pub time_nodes: usize,
    pub space_nodes: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self {
            time_nodes: 201,
            space_nodes: 201,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CarlemanSides<T: Real> {
    pub lhs: T,
    pub rhs: T,
    /// `rhs - lhs`.
    pub margin: T,
    /// Two-grid estimate of the quadrature error in the margin.
    pub error_estimate: T,
    /// Largest `2φ` on the grid.
    pub max_exponent: T,
}

impl<T: Real> CarlemanSides<T> {
    /// False only for a negative margin beyond the quadrature error estimate.
    pub fn holds(&self) -> bool {
        self.margin >= -self.error_estimate
    }
}

/// Grid samples of `|q_j|²` and `|(∂_t + i∂_xx) q_j|²`, reusable across weights.
#[derive(Debug, Clone)]
pub struct SampledSample<T: Real> {
    t: Vec<T>,
    x: Vec<T>,
    q2: Vec<Vec<T>>,
    lq2: Vec<Vec<T>>,
}

impl<T: Real> SampledSample<T> {
    pub fn new(q: &ZcompSample<T>, quad: Quadrature) -> Result<Self> {
        for n in [quad.time_nodes, quad.space_nodes] {
            if n < 5 || n % 2 == 0 {
                return Err(Error::InvalidParameter(format!("quadrature node count {n} must be odd and at least 5")));
            }
        }
        let t = uniform_nodes(T::zero(), T::one(), quad.time_nodes - 1);
        let x = uniform_nodes(T::zero(), q.extent(), quad.space_nodes - 1);
        let i = c(T::zero(), T::one());
        let (q2, lq2) = (0..q.edges())
            .into_par_iter()
            .map(|j| {
                let zero = c(T::zero(), T::zero());
                let mut qv = vec![zero; t.len() * x.len()];
                let mut lq = vec![zero; t.len() * x.len()];
                for term in q.terms(j) {
                    let tj: Vec<_> = t.iter().map(|&tv| term.time.jet(tv)).collect();
                    let xj: Vec<_> = x.iter().map(|&xv| term.space.jet(xv)).collect();
                    for (it, tp) in tj.iter().enumerate() {
                        let row = it * x.len();
                        let (a, b) = (term.amplitude * tp.v, term.amplitude * tp.d1);
                        for (ix, xp) in xj.iter().enumerate() {
                            qv[row + ix] += a * xp.v;
                            lq[row + ix] += b * xp.v + i * a * xp.d2;
                        }
                    }
                }
                (
                    qv.iter().map(|z| z.norm_sqr()).collect::<Vec<T>>(),
                    lq.iter().map(|z| z.norm_sqr()).collect::<Vec<T>>(),
                )
            })
            .unzip();
        Ok(Self { t, x, q2, lq2 })
    }

    /// `(Σ_j ∫∫ e^{2φ_a}|q_j|², Σ_j ∫∫ e^{2φ_a}|Lq_j|²)` with every
    /// `stride`-th node, and the largest `2φ_a`.
    fn integrals(&self, weight: &CarlemanWeight<T>, alpha: T, stride: usize) -> (T, T, T) {
        let pick = |v: &[T]| v.iter().copied().step_by(stride).collect::<Vec<T>>();
        let (ts, xs) = (pick(&self.t), pick(&self.x));
        let (wt, wx) = (trapezoid_weights(&ts), trapezoid_weights(&xs));
        let nx = self.x.len();
        let mut top = T::neg_infinity();
        let mut lhs = T::zero();
        let mut rhs = T::zero();
        for (it, (&tv, &wtv)) in ts.iter().zip(&wt).enumerate() {
            for (ix, (&xv, &wxv)) in xs.iter().zip(&wx).enumerate() {
                let e = T::lit(2.0) * weight.phi(alpha, tv, xv);
                top = top.max(e);
                let k = it * stride * nx + ix * stride;
                let w = wtv * wxv * e.exp();
                for j in 0..self.q2.len() {
                    lhs += w * self.q2[j][k];
                    rhs += w * self.lq2[j][k];
                }
            }
        }
        (lhs, rhs, top)
    }

    pub fn sides(&self, weight: &CarlemanWeight<T>, alphas: &AlphaVectors) -> Result<CarlemanSides<T>> {
        if alphas.edges() != self.q2.len() {
            return Err(Error::InvalidParameter(format!(
                "{} alpha vectors for a sample on {} edges",
                alphas.edges(),
                self.q2.len()
            )));
        }
        let limit = T::lit(0.9) * T::max_value().ln();
        let mut fine = (T::zero(), T::zero());
        let mut coarse = (T::zero(), T::zero());
        let mut max_exponent = T::neg_infinity();
        for (a, mult) in alphas.column_multiplicities() {
            let alpha: T = to_real(a);
            let m = T::from_usize(mult);
            let (l, r, top) = self.integrals(weight, alpha, 1);
            if top > limit {
                return Err(Error::Overflow {
                    max_exponent: top.to_f64_lossy(),
                });
            }
            max_exponent = max_exponent.max(top);
            let (lc, rc, _) = self.integrals(weight, alpha, 2);
            fine = (fine.0 + m * l, fine.1 + m * r);
            coarse = (coarse.0 + m * lc, coarse.1 + m * rc);
        }
        let factor = weight.lhs_factor();
        let (lhs, rhs) = (factor * fine.0, fine.1);
        let error_estimate = (factor * (fine.0 - coarse.0)).abs() + (fine.1 - coarse.1).abs();
        Ok(CarlemanSides {
            lhs,
            rhs,
            margin: rhs - lhs,
            error_estimate,
            max_exponent,
        })
    }
}

/// Both sides of the weighted inequality for one sample and one weight.
pub fn carleman_sides<T: Real>(
    q: &ZcompSample<T>,
    weight: &CarlemanWeight<T>,
    alphas: &AlphaVectors,
    quad: Quadrature,
) -> Result<CarlemanSides<T>> {
    SampledSample::new(q, quad)?.sides(weight, alphas)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarginRow<T: Real> {
    pub n: usize,
    pub seed: u64,
    pub weight: CarlemanWeight<T>,
    pub sides: CarlemanSides<T>,
}

/// Writes `N,seed,mu,eps,R,lhs,rhs,margin,error_estimate`.
pub fn write_margins<W: Write, T: Real>(w: W, rows: &[MarginRow<T>]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["N", "seed", "mu", "eps", "R", "lhs", "rhs", "margin", "error_estimate"])?;
    for r in rows {
        out.write_record([
            r.n.to_string(),
            r.seed.to_string(),
            r.weight.mu.to_string(),
            r.weight.eps.to_string(),
            r.weight.r.to_string(),
            format!("{:e}", r.sides.lhs.to_f64_lossy()),
            format!("{:e}", r.sides.rhs.to_f64_lossy()),
            format!("{:e}", r.sides.margin.to_f64_lossy()),
            format!("{:e}", r.sides.error_estimate.to_f64_lossy()),
        ])?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::carleman::{alpha_vectors, sample_zcomp, SmoothnessBudget};
    use crate::scalar::c;

    #[test]
    fn weight_vertex_properties() {
        let w = CarlemanWeight::new(1.0, 0.5, 4.0).unwrap();
        let a = alpha_vectors(5).unwrap().to_real::<f64>();
        for t in [0.1, 0.5, 0.8] {
            for v in &a {
                let s: f64 = v.iter().map(|&al| w.phi_x_at_vertex(al, t)).sum();
                assert!(s.abs() < 1e-12);
                assert!(v.iter().all(|&al| (w.phi(al, t, 0.0) - w.phi(v[0], t, 0.0)).abs() < 1e-15));
            }
        }
        assert!(CarlemanWeight::new(0.0, 0.5, 4.0).is_err());
        assert_eq!(parameter_grid::<f64>().len(), 18);
    }

    #[test]
    fn zero_sample() {
        let q = ZcompSample::<f64>::zero(3);
        let s = carleman_sides(&q, &CarlemanWeight::new(1.0, 0.5, 4.0).unwrap(), &alpha_vectors(3).unwrap(), Quadrature::default())
            .unwrap();
        assert_eq!((s.lhs, s.rhs), (0.0, 0.0));
    }

    #[test]
    fn seeded_sample_satisfies_the_inequality() {
        let q = sample_zcomp::<f64>(3, 1, SmoothnessBudget::default());
        let s = carleman_sides(&q, &CarlemanWeight::new(1.0, 0.5, 4.0).unwrap(), &alpha_vectors(3).unwrap(), Quadrature::default())
            .unwrap();
        assert!(s.margin > 0.0 && s.holds(), "{s:?}");
        assert!(s.error_estimate < s.margin);
    }

    #[test]
    fn homogeneity_and_r_scaling() {
        let q = sample_zcomp::<f64>(4, 3, SmoothnessBudget::default());
        let alphas = alpha_vectors(4).unwrap();
        let quad = Quadrature { time_nodes: 101, space_nodes: 101 };
        let w = CarlemanWeight::new(1.0, 0.25, 2.0).unwrap();
        let base = carleman_sides(&q, &w, &alphas, quad).unwrap();
        let scaled = carleman_sides(&q.scaled(c(1.5, -2.0)), &w, &alphas, quad).unwrap();
        assert!((scaled.lhs / base.lhs - 6.25).abs() < 1e-12);
        assert!((scaled.rhs / base.rhs - 6.25).abs() < 1e-12);
        // with φ frozen, doubling R in the prefactor alone quadruples the left side
        let doubled = CarlemanWeight { r: 4.0, ..w };
        assert!((doubled.lhs_factor() / w.lhs_factor() - 4.0).abs() < 1e-15);
    }

    #[test]
    fn overflow_is_reported() {
        let q = sample_zcomp::<f64>(3, 1, SmoothnessBudget::default());
        let w = CarlemanWeight::new(200.0, 0.5, 8.0).unwrap();
        assert!(matches!(
            carleman_sides(&q, &w, &alpha_vectors(3).unwrap(), Quadrature::default()),
            Err(Error::Overflow { .. })
        ));
    }

    #[test]
    fn margin_csv() {
        let row = MarginRow {
            n: 3,
            seed: 7,
            weight: CarlemanWeight::new(1.0, 0.5, 4.0).unwrap(),
            sides: CarlemanSides { lhs: 1.0, rhs: 3.0, margin: 2.0, error_estimate: 0.0, max_exponent: 0.0 },
        };
        let mut buf = Vec::new();
        write_margins(&mut buf, &[row]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().nth(1).unwrap(), "3,7,1,0.5,4,1e0,3e0,2e0,0e0");
    }
}
