//! Metric graphs (stars and regular trees), their grids, sampled functions,
//! Kirchhoff diagnostics and weighted norms.
//!
//! Every edge is identified with an interval `[0, l_e]` (finite) or `[0, ∞)`
//! (a ray). The coordinate origin of an edge is its initial vertex, which for
//! trees is the vertex closer to the root.

mod grid;
mod kirchhoff;
mod norm;
mod spec;
mod state;

pub use grid::{EdgeGrid, GraphGrid};
pub use kirchhoff::{kirchhoff_residual, one_sided_derivative, KirchhoffResidual};
pub use norm::weighted_l2_norm;
pub use spec::GraphSpec;
pub use state::GraphState;

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EdgeLength<T: Real> {
    Finite(T),
    Infinite,
}

impl<T: Real> EdgeLength<T> {
    pub fn is_infinite(&self) -> bool {
        matches!(self, EdgeLength::Infinite)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge<T: Real> {
    pub initial: usize,
    /// `None` for rays.
    pub terminal: Option<usize>,
    pub length: EdgeLength<T>,
}

/// Regular-tree bookkeeping: generation lengths `l_1..l_n`, branching
/// degrees `d_1..d_{n+1}` and the multi-index of every edge.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeMeta<T: Real> {
    pub lengths: Vec<T>,
    pub degrees: Vec<usize>,
    /// 1-based multi-index per edge; its length is the edge generation.
    pub multi_index: Vec<Vec<usize>>,
}

impl<T: Real> TreeMeta<T> {
    /// Number of interior vertex generations `n`.
    pub fn depth(&self) -> usize {
        self.lengths.len()
    }

    /// Distances `a_0 = 0, a_k = l_1 + … + l_k` for `k = 0..=n`.
    pub fn breakpoints(&self) -> Vec<T> {
        let mut a = vec![T::zero()];
        for &l in &self.lengths {
            let last = *a.last().unwrap();
            a.push(last + l);
        }
        a
    }

    /// Number of edges of generation `k` (1-based): `d_1 ⋯ d_k`.
    pub fn generation_size(&self, k: usize) -> usize {
        self.degrees[..k].iter().product()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricGraph<T: Real> {
    pub vertices: Vec<usize>,
    pub edges: Vec<Edge<T>>,
    pub tree: Option<TreeMeta<T>>,
}

impl<T: Real> MetricGraph<T> {
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Incident edge ends of `vertex`: `(edge, true)` when the vertex is the
    /// edge's initial point, `(edge, false)` when it is the terminal one.
    pub fn incident(&self, vertex: usize) -> Vec<(usize, bool)> {
        let mut out = Vec::new();
        for (e, edge) in self.edges.iter().enumerate() {
            if edge.initial == vertex {
                out.push((e, true));
            }
            if edge.terminal == Some(vertex) {
                out.push((e, false));
            }
        }
        out
    }

    /// Generation of an edge (1-based) for trees, 1 otherwise.
    pub fn generation(&self, edge: usize) -> usize {
        self.tree
            .as_ref()
            .map(|t| t.multi_index[edge].len())
            .unwrap_or(1)
    }

    /// Distance from the root to the initial vertex of `edge`.
    pub fn edge_offset(&self, edge: usize) -> T {
        match &self.tree {
            Some(t) => t.breakpoints()[t.multi_index[edge].len() - 1],
            None => T::zero(),
        }
    }

    /// Index of the edge with the given multi-index.
    pub fn edge_by_index(&self, index: &[usize]) -> Option<usize> {
        self.tree
            .as_ref()?
            .multi_index
            .iter()
            .position(|m| m.as_slice() == index)
    }

    /// Children of `edge` in a tree, in multi-index order.
    pub fn children(&self, edge: usize) -> Vec<usize> {
        match self.edges[edge].terminal {
            Some(v) => self
                .edges
                .iter()
                .enumerate()
                .filter(|(_, e)| e.initial == v)
                .map(|(i, _)| i)
                .collect(),
            None => Vec::new(),
        }
    }

    fn validate(&self) -> Result<()> {
        for (i, e) in self.edges.iter().enumerate() {
            match (e.length, e.terminal) {
                (EdgeLength::Infinite, Some(_)) => {
                    return Err(Error::InvalidParameter(format!(
                        "ray {i} has two endpoints"
                    )))
                }
                (EdgeLength::Finite(_), None) => {
                    return Err(Error::InvalidParameter(format!(
                        "finite edge {i} lacks a terminal vertex"
                    )))
                }
                (EdgeLength::Finite(l), _) if !(l > T::zero()) => {
                    return Err(Error::InvalidParameter(format!(
                        "edge {i} has non-positive length"
                    )))
                }
                _ => {}
            }
        }
        // connectivity: every vertex but the root must terminate some edge
        for &v in self.vertices.iter().skip(1) {
            if !self.edges.iter().any(|e| e.terminal == Some(v)) {
                return Err(Error::InvalidParameter(format!("vertex {v} is disconnected")));
            }
        }
        Ok(())
    }
}

/// Star graph with `n` rays, each truncated at `truncation` and sampled with
/// spacing `h`.
pub fn build_star<T: Real>(n: usize, truncation: T, h: T) -> Result<(MetricGraph<T>, GraphGrid<T>)> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "a star needs at least two edges, got {n}"
        )));
    }
    build_regular_tree(&[], &[n], truncation, h)
}

/// A single ray `[0, ∞)`; the degenerate one-edge star.
pub fn build_half_line<T: Real>(truncation: T, h: T) -> Result<(MetricGraph<T>, GraphGrid<T>)> {
    build_regular_tree(&[], &[1], truncation, h)
}

/// Regular tree with finite generation lengths `lengths = l_1..l_n` and
/// branching degrees `degrees = d_1..d_{n+1}`; the last generation is made of
/// rays truncated at `truncation`.
pub fn build_regular_tree<T: Real>(
    lengths: &[T],
    degrees: &[usize],
    truncation: T,
    h: T,
) -> Result<(MetricGraph<T>, GraphGrid<T>)> {
    if degrees.is_empty() {
        return Err(Error::InvalidParameter("empty degree list".into()));
    }
    if degrees.len() != lengths.len() + 1 {
        return Err(Error::InvalidParameter(format!(
            "{} lengths need {} degrees, got {}",
            lengths.len(),
            lengths.len() + 1,
            degrees.len()
        )));
    }
    if degrees.contains(&0) {
        return Err(Error::InvalidParameter("degrees must be positive".into()));
    }
    if lengths.iter().any(|&l| !(l > T::zero())) {
        return Err(Error::InvalidParameter("lengths must be positive".into()));
    }
    if !(truncation > T::zero()) || !(h > T::zero()) {
        return Err(Error::InvalidParameter(
            "truncation length and spacing must be positive".into(),
        ));
    }
    let ray_intervals = grid::intervals_for(truncation, h)?;
    if ray_intervals < 16 {
        return Err(Error::InvalidParameter(format!(
            "truncation/h = {ray_intervals} < 16"
        )));
    }

    let depth = lengths.len();
    let mut vertices = vec![0usize];
    let mut edges = Vec::new();
    let mut multi_index: Vec<Vec<usize>> = Vec::new();
    let mut grids = Vec::new();
    // (vertex, multi-index) of the current generation's parents
    let mut frontier: Vec<(usize, Vec<usize>)> = vec![(0, Vec::new())];
    for (g, &d) in degrees.iter().enumerate() {
        let mut next = Vec::new();
        for (parent_vertex, prefix) in &frontier {
            for child in 1..=d {
                let mut idx = prefix.clone();
                idx.push(child);
                if g < depth {
                    let v = vertices.len();
                    vertices.push(v);
                    edges.push(Edge {
                        initial: *parent_vertex,
                        terminal: Some(v),
                        length: EdgeLength::Finite(lengths[g]),
                    });
                    grids.push(EdgeGrid::finite(lengths[g], h)?);
                    next.push((v, idx.clone()));
                } else {
                    edges.push(Edge {
                        initial: *parent_vertex,
                        terminal: None,
                        length: EdgeLength::Infinite,
                    });
                    grids.push(EdgeGrid::ray(truncation, h)?);
                }
                multi_index.push(idx);
            }
        }
        frontier = next;
    }
    let graph = MetricGraph {
        vertices,
        edges,
        tree: Some(TreeMeta {
            lengths: lengths.to_vec(),
            degrees: degrees.to_vec(),
            multi_index,
        }),
    };
    graph.validate()?;
    Ok((graph, GraphGrid { edges: grids }))
}
