use crate::error::{Error, Result};
use crate::graph::GraphState;
use crate::line::LineSamples;
use crate::scalar::{Cplx, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StarMode {
    /// `S = Σ_k u_k`, extended evenly.
    Even,
    /// `u_k − S/N` for the given edge, extended oddly.
    OddDifference(usize),
}

/// Folds a star state onto the line.
pub fn star_sum<T: Real>(state: &GraphState<T>, mode: StarMode) -> Result<LineSamples<T>> {
    let n = state.graph.edge_count();
    let is_star = state.graph.tree.as_ref().is_some_and(|t| t.depth() == 0);
    if !is_star {
        return Err(Error::InvalidParameter("state does not live on a star".into()));
    }
    let grid = state.grid.edges[0];
    if state.grid.edges.iter().any(|g| *g != grid) {
        return Err(Error::GridMismatch("star edges carry different grids".into()));
    }
    let sum: Vec<Cplx<T>> = (0..grid.samples())
        .map(|i| state.values.iter().map(|v| v[i]).sum())
        .collect();
    let (half, sign) = match mode {
        StarMode::Even => (sum, T::one()),
        StarMode::OddDifference(k) => {
            if k >= n {
                return Err(Error::IndexOutOfRange {
                    what: "star edge",
                    index: k,
                    lo: 0,
                    hi: n - 1,
                });
            }
            let scale = T::from_usize(n).recip();
            let diff = state.values[k].iter().zip(&sum).map(|(&u, &s)| u - s * scale).collect();
            (diff, -T::one())
        }
    };
    let x_half = grid.nodes();
    let m = x_half.len();
    let x = x_half.iter().rev().map(|&x| -x).chain(x_half[1..].iter().copied()).collect();
    let u = (1..m)
        .rev()
        .map(|i| half[i] * sign)
        .chain(half.iter().copied())
        .collect();
    LineSamples::new(x, u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_star;
    use crate::scalar::c;

    #[test]
    fn equal_components_sum() {
        let (g, grid) = build_star(3, 4.0, 0.1).unwrap();
        let s = GraphState::from_fn(g, grid, |_, x: f64| c((-x * x).exp(), 0.0));
        let line = star_sum(&s, StarMode::Even).unwrap();
        assert_eq!(line.len(), 81);
        for (x, u) in line.x.iter().zip(&line.u) {
            assert!((u - c(3.0 * (-x * x).exp(), 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn odd_extension_of_balanced_data() {
        let (g, grid) = build_star(3, 4.0, 0.1).unwrap();
        let weights = [1.0, 1.0, -2.0];
        let s = GraphState::from_fn(g, grid, |e, x: f64| c(weights[e] * x * (-x * x).exp(), 0.0));
        let line = star_sum(&s, StarMode::OddDifference(2)).unwrap();
        let mid = line.len() / 2;
        assert_eq!(line.x[mid], 0.0);
        assert_eq!(line.u[mid], c(0.0, 0.0));
        for i in 1..=mid {
            assert_eq!(line.u[mid - i], -line.u[mid + i]);
        }
        assert!((line.u[mid + 10] - c(-2.0 * 1.0 * (-1.0f64).exp(), 0.0)).norm() < 1e-14);
        assert!(star_sum(&s, StarMode::OddDifference(3)).is_err());
    }
}
