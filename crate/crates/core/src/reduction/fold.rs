use super::averaged::AveragedSums;
use super::map::ReductionMap;
use crate::error::{Error, Result};
use crate::line::LineSamples;
use crate::scalar::Real;

/// `w(T_k(x)) = v(x)` with `v` the even extension of the root average `Z`.
pub fn fold_to_line<T: Real>(sums: &AveragedSums<T>, map: &ReductionMap<T>) -> Result<LineSamples<T>> {
    let n = sums.depth();
    if map.intervals() != 2 * n + 2 {
        return Err(Error::InvalidParameter(format!(
            "map has {} intervals, a depth-{n} tree needs {}",
            map.intervals(),
            2 * n + 2
        )));
    }
    let folded = map.folded_breakpoints();
    for (k, &a) in sums.breakpoints().iter().enumerate() {
        if (folded[n + 1 + k] - a).abs() > T::lit(1e-12) * a.abs().max(T::one()) {
            return Err(Error::InvalidParameter(format!(
                "breakpoint a_{k} = {a} does not match the map"
            )));
        }
    }
    let z = super::averaged::join(sums.root());
    let right: Vec<T> = z.x.iter().map(|&x| map.apply(x)).collect();
    let x = right
        .iter()
        .skip(1)
        .rev()
        .map(|&y| -y)
        .chain(right.iter().copied())
        .collect();
    let u = z.u.iter().skip(1).rev().chain(z.u.iter()).copied().collect();
    LineSamples::new(x, u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_regular_tree, GraphState};
    use crate::reduction::{averaged_sums, reduction_map};
    use crate::scalar::c;

    #[test]
    fn constant_data_folds_to_a_constant() {
        let (g, grid) = build_regular_tree(&[1.0, 0.5], &[2, 3, 2], 3.0, 0.05).unwrap();
        let map = reduction_map(g.tree.as_ref().unwrap()).unwrap();
        let s = GraphState::from_fn(g, grid, |_, _| c(0.5, -1.0));
        let w = fold_to_line(&averaged_sums(&s).unwrap(), &map).unwrap();
        assert!(w.u.iter().all(|&u| u == c(0.5, -1.0)));
        let mid = w.len() / 2;
        assert_eq!(w.x[mid], 0.0);
        // slopes 1/6, 1/2, 1 on lengths 1, 0.5, 3
        let end: f64 = 1.0 / 6.0 + 0.5 * 0.5 + 3.0;
        assert!((w.x[w.len() - 1] - end).abs() < 1e-13);
    }

    #[test]
    fn folded_data_is_even_and_breakpoints_are_nodes() {
        let (g, grid) = build_regular_tree(&[1.0], &[2, 2], 3.0, 0.05).unwrap();
        let map = reduction_map(g.tree.as_ref().unwrap()).unwrap();
        let s = GraphState::from_fn(g.clone(), grid, |e, x: f64| {
            let r = g.edge_offset(e) + x;
            c((-r * r).exp(), r)
        });
        let w = fold_to_line(&averaged_sums(&s).unwrap(), &map).unwrap();
        let m = w.len();
        for i in 0..m {
            assert_eq!(w.u[i], w.u[m - 1 - i]);
            assert!((w.x[i] + w.x[m - 1 - i]).abs() < 1e-14);
        }
        for &b in &map.target_breakpoints()[1..4] {
            assert!(w.x.iter().any(|&x| (x - b).abs() < 1e-14));
        }
        let coefficient = map.coefficient().unwrap();
        assert_eq!(coefficient.sigma_minus(), 1.0);
        assert_eq!(coefficient.sigma_plus(), 1.0);
    }
}
