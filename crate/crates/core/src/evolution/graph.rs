use super::operator::{CrankNicolson, TreeSystem};
use super::EvolutionConfig;
use crate::error::{Error, Result};
use crate::graph::{GraphState, MetricGraph};
use crate::scalar::{c, cis, Cplx, Real};

/// Node numbering of a graph grid: one shared unknown per vertex, one per
/// interior edge sample; ray ends are Dirichlet nodes without an unknown.
pub(crate) struct GraphLayout<T: Real> {
    pub system: TreeSystem<T>,
    pub node_of: Vec<Vec<Option<usize>>>,
    /// Edge-end samples contributing to each unknown: `(edge, sample, weight)`.
    pub sources: Vec<Vec<(usize, usize, T)>>,
}

impl<T: Real> GraphLayout<T> {
    pub fn new(state: &GraphState<T>) -> Result<Self> {
        let graph: &MetricGraph<T> = &state.graph;
        let grids = &state.grid.edges;
        let nv = graph.vertices.iter().copied().max().map_or(0, |m| m + 1);
        let mut vertex_mass = vec![T::zero(); nv];
        let mut vertex_sources: Vec<Vec<(usize, usize, T)>> = vec![Vec::new(); nv];
        for (e, edge) in graph.edges.iter().enumerate() {
            let half = T::lit(0.5) * grids[e].h;
            vertex_mass[edge.initial] += half;
            vertex_sources[edge.initial].push((e, 0, half));
            if let Some(v) = edge.terminal {
                vertex_mass[v] += half;
                vertex_sources[v].push((e, grids[e].intervals, half));
            }
        }

        let mut system = TreeSystem::with_capacity(grids.iter().map(|g| g.samples()).sum());
        let mut sources = Vec::new();
        let mut vertex_node = vec![None; nv];
        let root = graph.vertices.first().copied().unwrap_or(0);
        vertex_node[root] = Some(system.push(vertex_mass[root], None));
        sources.push(vertex_sources[root].clone());

        let mut node_of = Vec::with_capacity(graph.edge_count());
        for (e, edge) in graph.edges.iter().enumerate() {
            let g = grids[e];
            let cond = g.h.recip();
            let start = vertex_node[edge.initial].ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "edge {e} starts at vertex {} before it is reached from the root",
                    edge.initial
                ))
            })?;
            let mut nodes = vec![Some(start)];
            let mut prev = start;
            for i in 1..g.intervals {
                prev = system.push(g.h, Some((prev, cond)));
                sources.push(vec![(e, i, g.h)]);
                nodes.push(Some(prev));
            }
            match edge.terminal {
                Some(v) => {
                    if vertex_node[v].is_some() {
                        return Err(Error::InvalidParameter(format!(
                            "vertex {v} is reached twice; only trees are supported"
                        )));
                    }
                    let id = system.push(vertex_mass[v], Some((prev, cond)));
                    sources.push(vertex_sources[v].clone());
                    vertex_node[v] = Some(id);
                    nodes.push(Some(id));
                }
                None => {
                    system.anchor[prev] += cond;
                    nodes.push(None);
                }
            }
            node_of.push(nodes);
        }
        Ok(Self {
            system,
            node_of,
            sources,
        })
    }

    pub fn gather(&self, state: &GraphState<T>) -> Result<Vec<Cplx<T>>> {
        let scale = state
            .values
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(T::zero(), T::max)
            .max(T::one());
        let (vertex, jump) = state.max_vertex_jump();
        if jump > T::lit(1e-10) * scale {
            return Err(Error::Discontinuous {
                vertex,
                jump: jump.to_f64_lossy(),
            });
        }
        Ok(self
            .sources
            .iter()
            .map(|src| {
                let (e, i, _) = src[0];
                state.values[e][i]
            })
            .collect())
    }

    pub fn scatter(&self, u: &[Cplx<T>], state: &mut GraphState<T>) {
        for (e, nodes) in self.node_of.iter().enumerate() {
            for (i, n) in nodes.iter().enumerate() {
                state.values[e][i] = n.map_or(c(T::zero(), T::zero()), |k| u[k]);
            }
        }
    }
}

/// Evolves `u0` for a time `t_final` (negative runs backwards).
pub fn evolve_graph<T: Real>(
    u0: &GraphState<T>,
    t_final: T,
    cfg: &EvolutionConfig<T>,
) -> Result<GraphState<T>> {
    let (steps, dt) = cfg.steps_for(t_final)?;
    let layout = GraphLayout::new(u0)?;
    let mut u = layout.gather(u0)?;
    let mut out = u0.clone();
    if steps > 0 {
        let cn = CrankNicolson::new(layout.system.clone(), dt)?;
        for _ in 0..steps {
            cn.step(&mut u);
        }
        layout.scatter(&u, &mut out);
    }
    out.time = u0.time + t_final;
    Ok(out)
}

/// Evolves `u_t = i(Δ_Γ + V1 + V2)u` with `V1(edge, x)` real and
/// `V2(t, edge, x)` complex, by Strang splitting around the Crank–Nicolson
/// Laplacian step.
pub fn evolve_graph_potential<T, F1, F2>(
    u0: &GraphState<T>,
    v1: F1,
    v2: F2,
    t_final: T,
    cfg: &EvolutionConfig<T>,
) -> Result<GraphState<T>>
where
    T: Real,
    F1: Fn(usize, T) -> T,
    F2: Fn(T, usize, T) -> Cplx<T>,
{
    let (steps, dt) = cfg.steps_for(t_final)?;
    let layout = GraphLayout::new(u0)?;
    let mut u = layout.gather(u0)?;
    let mut out = u0.clone();
    let grids = &u0.grid.edges;

    let node_average = |f: &dyn Fn(usize, T) -> Cplx<T>| -> Result<Vec<Cplx<T>>> {
        layout
            .sources
            .iter()
            .map(|src| {
                let mut acc = c(T::zero(), T::zero());
                let mut w = T::zero();
                for &(e, i, wi) in src {
                    acc += f(e, grids[e].node(i)) * wi;
                    w += wi;
                }
                let v = acc / w;
                if v.re.is_finite() && v.im.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::NonFinite("potential"))
                }
            })
            .collect()
    };
    let static_part = node_average(&|e, x| c(v1(e, x), T::zero()))?;
    let half = T::lit(0.5) * dt;
    let phases = |t: T| -> Result<Vec<Cplx<T>>> {
        let dynamic = node_average(&|e, x| v2(t, e, x))?;
        Ok(static_part
            .iter()
            .zip(dynamic)
            .map(|(s, d)| {
                let v = *s + d;
                // e^{i V dt/2}
                cis(v.re * half) * (-v.im * half).exp()
            })
            .collect())
    };

    if steps > 0 {
        let cn = CrankNicolson::new(layout.system.clone(), dt)?;
        let mut t = u0.time;
        let mut phase = phases(t)?;
        for n in 0..steps {
            u.iter_mut().zip(&phase).for_each(|(z, p)| *z *= *p);
            cn.step(&mut u);
            t = u0.time + dt * T::from_usize(n + 1);
            phase = phases(t)?;
            u.iter_mut().zip(&phase).for_each(|(z, p)| *z *= *p);
        }
        layout.scatter(&u, &mut out);
    }
    out.time = u0.time + t_final;
    Ok(out)
}

/// Largest `|u|` on the outer fifth of every ray, relative to the global
/// maximum. Values above [`LEAKAGE_TOLERANCE`](super::LEAKAGE_TOLERANCE)
/// mean the wave has reached the truncation boundary.
pub fn boundary_leakage<T: Real>(state: &GraphState<T>) -> T {
    let peak = state
        .values
        .iter()
        .flatten()
        .map(|z| z.norm())
        .fold(T::zero(), T::max);
    if peak == T::zero() {
        return T::zero();
    }
    let mut tail = T::zero();
    for (e, g) in state.grid.edges.iter().enumerate() {
        if let Some(l) = g.truncation {
            for (i, z) in state.values[e].iter().enumerate() {
                if g.node(i) >= T::lit(0.8) * l {
                    tail = tail.max(z.norm());
                }
            }
        }
    }
    tail / peak
}
