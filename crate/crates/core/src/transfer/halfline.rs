use rayon::prelude::*;

use super::kernel::{in_interval, kernel_p1k_atoms, layer_interval, KernelAtom, KernelBase, Propagator};
use super::layers::{layer_params, LayerParams};
use super::wiener::WienerSeries;
use crate::error::{Error, Result};
use crate::evolution::PiecewiseCoefficient;
use crate::line::{trapezoid_weights, LineSamples};
use crate::scalar::{c, re, Cplx, Real};

/// Largest admissible `max(|u0(x_0)|, |u0(x_n)|) / max|u0|` on the source grid.
pub const QUADRATURE_TAIL_TOLERANCE: f64 = 1e-10;

/// Source samples below this fraction of `max|u0|` are skipped.
const NEGLIGIBLE: f64 = 1e-17;

/// Where in `z` an atom of η is switched on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Support {
    All,
    /// `z > 0`
    Positive,
    /// `z < 0`
    Negative,
}

impl Support {
    fn contains<T: Real>(self, z: T) -> bool {
        match self {
            Support::All => true,
            Support::Positive => z > T::zero(),
            Support::Negative => z < T::zero(),
        }
    }
}

/// `weight · u0(y)` at `z = scale·y + offset`, for `y` in `source` and `z` in `support`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaAtom<T: Real> {
    pub weight: Cplx<T>,
    pub scale: T,
    pub offset: T,
    pub source: (Option<T>, Option<T>),
    pub support: Support,
}

impl<T: Real> EtaAtom<T> {
    /// Preimage of `z` in the source interval, if the atom is active there.
    pub fn source_point(&self, z: T) -> Option<T> {
        if !self.support.contains(z) {
            return None;
        }
        let y = (z - self.offset) / self.scale;
        in_interval(y, self.source).then_some(y)
    }
}

/// η with `u(t, x) = (k_t ∗ η)(x_scale · x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EtaProfile<T: Real> {
    pub x_scale: T,
    pub atoms: Vec<EtaAtom<T>>,
}

impl<T: Real> EtaProfile<T> {
    /// `η(z)` for an initial datum given pointwise.
    pub fn eval_with(&self, z: T, u0: impl Fn(T) -> Cplx<T>) -> Cplx<T> {
        self.atoms
            .iter()
            .filter_map(|a| a.source_point(z).map(|y| a.weight * u0(y)))
            .fold(c(T::zero(), T::zero()), |acc, v| acc + v)
    }

    /// `(k_t ∗ η)(x_scale · x)`, substituting `z = scale·y + offset` and
    /// integrating by trapezoid over the grid of `u0` restricted to each source.
    /// Supports differ from the image of the closed source only at `z = 0`,
    /// so the endpoint node keeps its trapezoid weight.
    pub fn solve(&self, u0: &LineSamples<T>, t: T, x: &[T]) -> Result<Vec<Cplx<T>>> {
        let prop = Propagator::new(t)?;
        let cutoff = check_tails(u0)?;
        let nodes: Vec<Vec<(T, Cplx<T>)>> = self
            .atoms
            .iter()
            .map(|a| weighted_nodes(u0, a.source, cutoff))
            .collect();
        Ok(x.par_iter()
            .map(|&xv| {
                let target = self.x_scale * xv;
                self.atoms
                    .iter()
                    .zip(&nodes)
                    .map(|(a, pts)| {
                        let s = pts
                            .iter()
                            .map(|&(y, wu)| prop.free(target - a.scale * y - a.offset) * wu)
                            .fold(c(T::zero(), T::zero()), |acc, v| acc + v);
                        s * a.weight * a.scale.abs()
                    })
                    .fold(c(T::zero(), T::zero()), |acc, v| acc + v)
            })
            .collect())
    }
}

/// Solution on `x ≤ 0`: the kernel assembly and the η behind it.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfLineSolution<T: Real> {
    pub x: Vec<T>,
    pub u: Vec<Cplx<T>>,
    pub eta: EtaProfile<T>,
}

/// Checks that `u0` has decayed at both ends of its grid and returns the
/// magnitude below which samples are skipped.
fn check_tails<T: Real>(u0: &LineSamples<T>) -> Result<T> {
    let peak = u0.u.iter().map(|z| z.norm()).fold(T::zero(), T::max);
    if peak == T::zero() {
        return Ok(T::zero());
    }
    let tail = u0.u[0].norm().max(u0.u[u0.len() - 1].norm()) / peak;
    if tail > T::lit(QUADRATURE_TAIL_TOLERANCE) {
        return Err(Error::QuadratureDomain {
            tail: tail.to_f64_lossy(),
            tolerance: QUADRATURE_TAIL_TOLERANCE,
        });
    }
    Ok(peak * T::lit(NEGLIGIBLE))
}

/// `(y, w(y)·u0(y))` with trapezoid weights of the grid restricted to `source`.
fn weighted_nodes<T: Real>(u0: &LineSamples<T>, source: (Option<T>, Option<T>), cutoff: T) -> Vec<(T, Cplx<T>)> {
    let idx: Vec<usize> = (0..u0.len()).filter(|&i| in_interval(u0.x[i], source)).collect();
    let sub: Vec<T> = idx.iter().map(|&i| u0.x[i]).collect();
    if sub.len() < 2 {
        return Vec::new();
    }
    idx.iter()
        .zip(trapezoid_weights(&sub))
        .filter(|(&i, _)| u0.u[i].norm() > cutoff)
        .map(|(&i, w)| (u0.x[i], u0.u[i] * w))
        .collect()
}

fn check_breakpoints<T: Real>(u0: &LineSamples<T>, params: &LayerParams<T>) -> Result<()> {
    let x = &u0.x;
    for k in 2..=params.n() {
        let b = T::from_usize(k - 2) * params.l();
        if b > x[0] && b < x[x.len() - 1] {
            let i = x.partition_point(|&v| v < b);
            let tol = T::lit(1e-9) * (x[i] - x[i - 1]);
            if (x[i] - b).abs() > tol {
                return Err(Error::BreakpointOffGrid(b.to_f64_lossy()));
            }
        }
    }
    Ok(())
}

/// η from the kernel atoms of every layer; reflected atoms expand over the
/// series and live on `z > 0`.
fn eta_from_atoms<T: Real>(
    params: &LayerParams<T>,
    series: &WienerSeries<T>,
    per_layer: &[Vec<KernelAtom<T>>],
) -> Result<EtaProfile<T>> {
    let mut atoms = Vec::new();
    for (k0, layer) in per_layer.iter().enumerate() {
        let source = layer_interval(k0 + 1, params)?;
        for ka in layer {
            // weight · base(a_1 x − q y − r)
            let q = -ka.y_scale;
            let r = -ka.shift;
            match ka.base {
                KernelBase::Free => atoms.push(EtaAtom {
                    weight: ka.weight / q.abs(),
                    scale: q,
                    offset: r,
                    source,
                    support: Support::All,
                }),
                KernelBase::Series => atoms.extend(series.atoms().map(|(cn, d)| EtaAtom {
                    weight: ka.weight * cn / q.abs(),
                    scale: q,
                    offset: r + d,
                    source,
                    support: Support::Positive,
                })),
            }
        }
    }
    Ok(EtaProfile {
        x_scale: params.a(1),
        atoms,
    })
}

/// Solution of `i u_t + (σ u_x)_x = 0` at time `t` on `x ≤ 0`, by trapezoid
/// quadrature of the first-row kernels against `u0` on its own grid.
pub fn solve_negative_halfline<T: Real>(
    u0: &LineSamples<T>,
    sigma: &PiecewiseCoefficient<T>,
    t: T,
    x: &[T],
    series: &WienerSeries<T>,
) -> Result<HalfLineSolution<T>> {
    let l = sigma
        .spacing()
        .ok_or_else(|| Error::InvalidParameter("breakpoints must be 0, l, 2l, ...".into()))?;
    let params = layer_params(sigma.a(), l)?;
    if params != *series.params() {
        return Err(Error::InvalidParameter("series was built for different layers".into()));
    }
    if let Some(&bad) = x.iter().find(|&&v| v > T::zero()) {
        return Err(Error::InvalidParameter(format!("x = {} is not ≤ 0", bad.to_f64_lossy())));
    }
    let prop = Propagator::new(t)?;
    check_breakpoints(u0, &params)?;
    let cutoff = check_tails(u0)?;
    let per_layer: Vec<Vec<KernelAtom<T>>> = (1..=params.n())
        .map(|k| kernel_p1k_atoms(k, &params))
        .collect::<Result<_>>()?;
    let nodes: Vec<Vec<(T, Cplx<T>)>> = (1..=params.n())
        .map(|k| Ok(weighted_nodes(u0, layer_interval(k, &params)?, cutoff)))
        .collect::<Result<_>>()?;
    let u = x
        .par_iter()
        .map(|&xv| {
            let mut acc = c(T::zero(), T::zero());
            for (atoms, pts) in per_layer.iter().zip(&nodes) {
                for a in atoms {
                    for &(y, wu) in pts {
                        acc += a.eval(&prop, series, xv, y) * wu;
                    }
                }
            }
            acc
        })
        .collect();
    Ok(HalfLineSolution {
        x: x.to_vec(),
        u,
        eta: eta_from_atoms(&params, series, &per_layer)?,
    })
}

/// Two-layer profiles with `u(t,x) = (k_t ∗ ψ)(a_1 x)` for `x < 0` and
/// `(k_t ∗ ψ̃)(a_2 x)` for `x > 0`.
pub fn two_step_psi<T: Real>(a1: T, a2: T) -> Result<(EtaProfile<T>, EtaProfile<T>)> {
    if !(a1 > T::zero()) || !(a2 > T::zero()) {
        return Err(Error::InvalidParameter("layer values must be positive".into()));
    }
    let s = a1 + a2;
    let neg = (None, Some(T::zero()));
    let pos = (Some(T::zero()), None);
    let atom = |w: T, scale: T, source, support| EtaAtom {
        weight: re(w),
        scale,
        offset: T::zero(),
        source,
        support,
    };
    let psi = EtaProfile {
        x_scale: a1,
        atoms: vec![
            atom(T::one(), a1, neg, Support::All),
            atom((a2 - a1) / s, -a1, neg, Support::Positive),
            atom(T::lit(2.0) * a1 / s, a2, pos, Support::Positive),
        ],
    };
    let psi_tilde = EtaProfile {
        x_scale: a2,
        atoms: vec![
            atom(T::one(), a2, pos, Support::Positive),
            atom((a1 - a2) / s, -a2, pos, Support::Negative),
            atom(T::lit(2.0) * a2 / s, a1, neg, Support::Negative),
        ],
    };
    Ok((psi, psi_tilde))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transfer::invert_e;

    fn gaussian(x: f64) -> Cplx<f64> {
        c((-x * x).exp(), 0.0)
    }

    fn two_step_datum(a1: f64, a2: f64) -> impl Fn(f64) -> Cplx<f64> {
        move |x: f64| {
            let a = if x <= 0.0 { a1 } else { a2 };
            (c(-1.0, -0.25) * (a * a * x * x)).exp()
        }
    }

    fn setup(a: &[f64], l: f64) -> (PiecewiseCoefficient<f64>, WienerSeries<f64>) {
        let sigma = PiecewiseCoefficient::uniform(a.to_vec(), l).unwrap();
        let p = layer_params(a, l).unwrap();
        let series = invert_e(&p, 30, &crate::line::uniform_nodes(-20.0, 20.0, 4000)).unwrap();
        (sigma, series)
    }

    #[test]
    fn psi_weights_sum_to_one() {
        let (psi, psi_tilde) = two_step_psi(1.0, 2.0).unwrap();
        let w = |p: &EtaProfile<f64>, i: usize| p.atoms[i].weight.re;
        assert!((w(&psi, 1) + w(&psi, 2) - 1.0).abs() < 1e-15);
        assert!((w(&psi_tilde, 1) + w(&psi_tilde, 2) - 1.0).abs() < 1e-15);
        assert!(two_step_psi(0.0, 1.0).is_err());
    }

    #[test]
    fn equal_steps_transport_the_datum() {
        let (psi, _) = two_step_psi(1.5, 1.5).unwrap();
        for i in -40..=40 {
            let y = i as f64 * 0.1;
            let got = psi.eval_with(y, gaussian);
            assert!((got - gaussian(y / 1.5)).norm() < 1e-15);
        }
    }

    #[test]
    fn eta_is_the_transported_datum_on_the_left() {
        let (sigma, series) = setup(&[1.0, 2.0, 1.0], 1.0);
        let u0 = LineSamples::from_fn(-8.0, 8.0, 1600, |x| gaussian(x - 0.5));
        let sol = solve_negative_halfline(&u0, &sigma, 1.0, &[-1.0], &series).unwrap();
        for &y in u0.x.iter().filter(|&&y| y <= 0.0) {
            assert_eq!(sol.eta.eval_with(y, |s| gaussian(s - 0.5)), gaussian(y - 0.5));
        }
    }

    #[test]
    fn constant_coefficient_is_free_evolution() {
        let a = 1.5;
        let (sigma, series) = setup(&[a, a], 1.0);
        let u0 = LineSamples::from_fn(-8.0, 8.0, 1600, gaussian);
        let x: Vec<f64> = (0..=40).map(|i| -4.0 + 0.1 * i as f64).collect();
        let t = 0.7;
        let sol = solve_negative_halfline(&u0, &sigma, t, &x, &series).unwrap();
        let s = 1.0 / (a * a);
        for (&xv, &u) in x.iter().zip(&sol.u) {
            let d = c(1.0, 4.0 * s * t);
            let exact = (-(xv * xv) / d).exp() / d.sqrt();
            assert!((u - exact).norm() < 1e-6, "x = {xv}");
        }
    }

    #[test]
    fn two_step_closed_form() {
        let (a1, a2) = (1.0, 2.0);
        let (sigma, series) = setup(&[a1, a2], 1.0);
        let u0 = LineSamples::from_fn(-8.0, 8.0, 8000, two_step_datum(a1, a2));
        let x: Vec<f64> = (0..=60).map(|i| -6.0 + 0.1 * i as f64).collect();
        let sol = solve_negative_halfline(&u0, &sigma, 1.0, &x, &series).unwrap();
        // (k_1 ∗ e^{-(1+i/4)z²})(a_1 x) = (4i)^{-1/2} e^{-z²/16 + iz²/4}
        let exact: Vec<Cplx<f64>> = x
            .iter()
            .map(|&xv| {
                let z = a1 * xv;
                c(-z * z / 16.0, z * z / 4.0).exp() / c(0.0, 4.0).sqrt()
            })
            .collect();
        let num: f64 = sol.u.iter().zip(&exact).map(|(u, e)| (u - e).norm_sqr()).sum();
        let den: f64 = exact.iter().map(|e| e.norm_sqr()).sum();
        assert!((num / den).sqrt() < 1e-4, "{}", (num / den).sqrt());
    }

    #[test]
    fn kernel_and_eta_assemblies_agree() {
        let (sigma, series) = setup(&[1.0, 2.0, 1.0], 0.8);
        let u0 = LineSamples::from_fn(-8.0, 8.0, 1000, |x| gaussian(x - 0.4) * c(0.0, 0.3 * x).exp());
        let x: Vec<f64> = (0..=20).map(|i| -5.0 + 0.25 * i as f64).collect();
        let sol = solve_negative_halfline(&u0, &sigma, 0.9, &x, &series).unwrap();
        let via_eta = sol.eta.solve(&u0, 0.9, &x).unwrap();
        for (p, e) in sol.u.iter().zip(&via_eta) {
            assert!((p - e).norm() < 1e-10);
        }
    }

    #[test]
    fn truncated_datum_is_rejected() {
        let (sigma, series) = setup(&[1.0, 2.0], 1.0);
        let u0 = LineSamples::from_fn(-2.0, 2.0, 400, gaussian);
        assert!(matches!(
            solve_negative_halfline(&u0, &sigma, 1.0, &[-1.0], &series),
            Err(Error::QuadratureDomain { .. })
        ));
        let wide = LineSamples::from_fn(-8.0, 8.0, 800, gaussian);
        assert!(solve_negative_halfline(&wide, &sigma, 1.0, &[0.5], &series).is_err());
        assert!(solve_negative_halfline(&wide, &sigma, 0.0, &[-1.0], &series).is_err());
    }
}
