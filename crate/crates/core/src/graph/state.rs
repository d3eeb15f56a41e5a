use super::{GraphGrid, MetricGraph};
use crate::error::{Error, Result};
use crate::scalar::{Cplx, Real};

/// A function on a metric graph sampled on its grid at one time. Vertex
/// values are stored once per incident edge end, so discontinuous states can
/// be represented for diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphState<T: Real> {
    pub graph: MetricGraph<T>,
    pub grid: GraphGrid<T>,
    pub values: Vec<Vec<Cplx<T>>>,
    pub time: T,
}

impl<T: Real> GraphState<T> {
    pub fn new(
        graph: MetricGraph<T>,
        grid: GraphGrid<T>,
        values: Vec<Vec<Cplx<T>>>,
        time: T,
    ) -> Result<Self> {
        if values.len() != graph.edge_count() || grid.edges.len() != graph.edge_count() {
            return Err(Error::GridMismatch(format!(
                "{} edges, {} grids, {} value arrays",
                graph.edge_count(),
                grid.edges.len(),
                values.len()
            )));
        }
        for (e, (v, g)) in values.iter().zip(&grid.edges).enumerate() {
            if v.len() != g.samples() {
                return Err(Error::GridMismatch(format!(
                    "edge {e}: {} values for {} nodes",
                    v.len(),
                    g.samples()
                )));
            }
            if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::NonFinite("graph state"));
            }
        }
        Ok(Self {
            graph,
            grid,
            values,
            time,
        })
    }

    /// Samples `f(edge, x)` with `x` the edge-local coordinate.
    pub fn from_fn(
        graph: MetricGraph<T>,
        grid: GraphGrid<T>,
        f: impl Fn(usize, T) -> Cplx<T>,
    ) -> Self {
        let values = grid
            .edges
            .iter()
            .enumerate()
            .map(|(e, g)| g.nodes().into_iter().map(|x| f(e, x)).collect())
            .collect();
        Self {
            graph,
            grid,
            values,
            time: T::zero(),
        }
    }

    pub fn zeros_like(&self) -> Self {
        let values = self
            .values
            .iter()
            .map(|v| vec![Cplx::new(T::zero(), T::zero()); v.len()])
            .collect();
        Self {
            values,
            ..self.clone()
        }
    }

    /// Edge-local node coordinates.
    pub fn coords(&self, edge: usize) -> Vec<T> {
        self.grid.edges[edge].nodes()
    }

    /// Value of `edge` at the given end (`true` = initial vertex).
    pub fn end_value(&self, edge: usize, at_initial: bool) -> Cplx<T> {
        let v = &self.values[edge];
        if at_initial {
            v[0]
        } else {
            v[v.len() - 1]
        }
    }

    /// Maps every sample through `f`.
    pub fn map(&self, f: impl Fn(Cplx<T>) -> Cplx<T>) -> Self {
        let values = self
            .values
            .iter()
            .map(|v| v.iter().map(|&z| f(z)).collect())
            .collect();
        Self {
            values,
            ..self.clone()
        }
    }

    /// Largest per-edge-end jump at any vertex.
    pub fn max_vertex_jump(&self) -> (usize, T) {
        let mut worst = (0, T::zero());
        for &v in &self.graph.vertices {
            let ends = self.graph.incident(v);
            for i in 0..ends.len() {
                for j in i + 1..ends.len() {
                    let a = self.end_value(ends[i].0, ends[i].1);
                    let b = self.end_value(ends[j].0, ends[j].1);
                    let d = (a - b).norm();
                    if d > worst.1 {
                        worst = (v, d);
                    }
                }
            }
        }
        worst
    }

    /// Relative L² distance to `reference` with trapezoid weights.
    pub fn relative_l2_error(&self, reference: &GraphState<T>) -> T {
        let mut num = T::zero();
        let mut den = T::zero();
        for (e, g) in self.grid.edges.iter().enumerate() {
            let half = T::lit(0.5) * g.h;
            for (i, (a, b)) in self.values[e].iter().zip(&reference.values[e]).enumerate() {
                let w = if i == 0 || i == g.intervals { half } else { g.h };
                num += w * (*a - *b).norm_sqr();
                den += w * b.norm_sqr();
            }
        }
        (num / den).sqrt()
    }
}
