use super::GraphState;
use crate::scalar::{Cplx, Real};

/// Vertex-condition violation of a sampled state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KirchhoffResidual<T: Real> {
    /// Max over vertices of the largest pairwise jump `|u^e(v) − u^{e'}(v)|`.
    pub continuity: T,
    /// Max over vertices of `|Σ_{T(e)=v} u_x(l_e−) − Σ_{I(e)=v} u_x(0+)|`.
    pub flux: T,
}

/// Fourth-order one-sided derivative at the first sample of `v`
/// (`forward = true`) or at the last one, for spacing `h`.
pub fn one_sided_derivative<T: Real>(v: &[Cplx<T>], h: T, forward: bool) -> Cplx<T> {
    let n = v.len();
    assert!(n >= 5, "one-sided stencil needs five samples");
    let coeffs = [-25.0, 48.0, -36.0, 16.0, -3.0];
    let mut acc = Cplx::new(T::zero(), T::zero());
    for (k, &ck) in coeffs.iter().enumerate() {
        let z = if forward { v[k] } else { v[n - 1 - k] };
        acc += z * T::lit(ck);
    }
    let d = acc / (T::lit(12.0) * h);
    if forward {
        d
    } else {
        -d
    }
}

pub fn kirchhoff_residual<T: Real>(state: &GraphState<T>) -> KirchhoffResidual<T> {
    let mut continuity = T::zero();
    let mut flux = T::zero();
    for &v in &state.graph.vertices {
        let ends = state.graph.incident(v);
        for i in 0..ends.len() {
            for j in i + 1..ends.len() {
                let a = state.end_value(ends[i].0, ends[i].1);
                let b = state.end_value(ends[j].0, ends[j].1);
                continuity = continuity.max((a - b).norm());
            }
        }
        let mut balance = Cplx::new(T::zero(), T::zero());
        for &(e, at_initial) in &ends {
            let h = state.grid.edges[e].h;
            let d = one_sided_derivative(&state.values[e], h, at_initial);
            if at_initial {
                balance -= d;
            } else {
                balance += d;
            }
        }
        flux = flux.max(balance.norm());
    }
    KirchhoffResidual { continuity, flux }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_star;
    use crate::scalar::re;

    #[test]
    fn symmetric_even_data_is_balanced() {
        let (g, grid) = build_star(3, 20.0, 0.05).unwrap();
        let s = GraphState::from_fn(g, grid, |_, x: f64| re((-x * x).exp()));
        let r = kirchhoff_residual(&s);
        assert_eq!(r.continuity, 0.0);
        // the one-sided stencil is exact up to degree 4; the remainder is O(h^5)
        assert!(r.flux < 1e-4, "{}", r.flux);
        let (g, grid) = build_star(3, 20.0, 0.05).unwrap();
        let quartic = GraphState::from_fn(g, grid, |_, x: f64| re(1.0 - x * x + 0.5 * x.powi(4)));
        assert!(kirchhoff_residual(&quartic).flux < 1e-9);
    }

    #[test]
    fn mismatched_amplitudes_show_a_jump() {
        let (g, grid) = build_star(2, 20.0, 0.05).unwrap();
        let s = GraphState::from_fn(g, grid, |e, x: f64| re((e as f64 + 1.0) * (-x * x).exp()));
        assert!((kirchhoff_residual(&s).continuity - 1.0).abs() < 1e-15);
    }

    #[test]
    fn stencil_is_fourth_order() {
        let h = 0.01;
        let v: Vec<_> = (0..5).map(|i| re((0.3 + i as f64 * h).sin())).collect();
        let d = one_sided_derivative(&v, h, true);
        assert!((d.re - 0.3f64.cos()).abs() < 1e-8);
        let w: Vec<_> = (0..5).map(|i| re((0.3 - (4 - i) as f64 * h).sin())).collect();
        let d = one_sided_derivative(&w, h, false);
        assert!((d.re - 0.3f64.cos()).abs() < 1e-8);
    }
}
