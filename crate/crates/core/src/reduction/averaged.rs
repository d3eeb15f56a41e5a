use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::{one_sided_derivative, GraphState, TreeMeta};
use crate::line::LineSamples;
use crate::scalar::{Cplx, Real};

/// Averaged sums `Z^ᾱ` of a regular-tree state, in the root distance
/// coordinate. The empty multi-index holds the root average `Z`.
#[derive(Debug, Clone, PartialEq)]
pub struct AveragedSums<T: Real> {
    breakpoints: Vec<T>,
    degrees: Vec<usize>,
    h: T,
    /// Per multi-index: one piece per generation from `max(|ᾱ|, 1)` to `n + 1`.
    pieces: BTreeMap<Vec<usize>, Vec<LineSamples<T>>>,
}

impl<T: Real> AveragedSums<T> {
    /// `a_0 = 0, …, a_n`.
    pub fn breakpoints(&self) -> &[T] {
        &self.breakpoints
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn depth(&self) -> usize {
        self.breakpoints.len() - 1
    }

    /// Per-generation pieces of `Z^ᾱ`; `&[]` gives the root average.
    pub fn pieces(&self, index: &[usize]) -> Option<&[LineSamples<T>]> {
        self.pieces.get(index).map(Vec::as_slice)
    }

    pub fn indices(&self) -> impl Iterator<Item = &[usize]> {
        self.pieces.keys().map(Vec::as_slice)
    }

    pub fn root(&self) -> &[LineSamples<T>] {
        &self.pieces[&Vec::new()]
    }

    /// `Z^ᾱ` on `J_ᾱ` as one sample set; at each `a_k` the value of the
    /// lower generation is kept.
    pub fn joined(&self, index: &[usize]) -> Option<LineSamples<T>> {
        self.pieces(index).map(join)
    }

    /// `Z_x(a_k−) / Z_x(a_k+)` of the root average at `1 ≤ k ≤ n`, from
    /// one-sided fourth-order differences.
    pub fn jump_ratio(&self, k: usize) -> Result<Cplx<T>> {
        let n = self.depth();
        if k == 0 || k > n {
            return Err(Error::IndexOutOfRange {
                what: "interior breakpoint",
                index: k,
                lo: 1,
                hi: n,
            });
        }
        let root = self.root();
        let left = one_sided_derivative(&root[k - 1].u, self.h, false);
        let right = one_sided_derivative(&root[k].u, self.h, true);
        Ok(left / right)
    }
}

pub(crate) fn join<T: Real>(pieces: &[LineSamples<T>]) -> LineSamples<T> {
    let mut x = pieces[0].x.clone();
    let mut u = pieces[0].u.clone();
    for p in &pieces[1..] {
        x.extend_from_slice(&p.x[1..]);
        u.extend_from_slice(&p.u[1..]);
    }
    LineSamples { x, u }
}

fn tree_meta<T: Real>(state: &GraphState<T>) -> Result<&TreeMeta<T>> {
    state
        .graph
        .tree
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter("state does not live on a regular tree".into()))
}

/// All `Z^ᾱ` and the root average `Z` of a tree state.
pub fn averaged_sums<T: Real>(state: &GraphState<T>) -> Result<AveragedSums<T>> {
    let meta = tree_meta(state)?;
    let n = meta.depth();
    let breakpoints = meta.breakpoints();
    let mut h = None;
    // edges of one generation must share a grid so averages need no interpolation
    let mut gen_grid = vec![None; n + 2];
    for (e, idx) in meta.multi_index.iter().enumerate() {
        let g = state.grid.edges[e];
        if *h.get_or_insert(g.h) != g.h {
            return Err(Error::GridMismatch("edges use different spacings".into()));
        }
        match gen_grid[idx.len()] {
            None => gen_grid[idx.len()] = Some(g),
            Some(prev) if prev != g => {
                return Err(Error::GridMismatch(format!("generation {} has misaligned grids", idx.len())))
            }
            _ => {}
        }
    }
    let h = h.ok_or_else(|| Error::InvalidParameter("tree without edges".into()))?;
    let coords: Vec<Vec<T>> = (1..=n + 1)
        .map(|g| {
            let grid = gen_grid[g].expect("every generation has edges");
            grid.nodes().into_iter().map(|x| x + breakpoints[g - 1]).collect()
        })
        .collect();
    let piece = |g: usize, u: Vec<Cplx<T>>| LineSamples { x: coords[g - 1].clone(), u };

    let mut pieces: BTreeMap<Vec<usize>, Vec<LineSamples<T>>> = BTreeMap::new();
    // deepest generation first, so children are available when averaging
    let mut order: Vec<usize> = (0..meta.multi_index.len()).collect();
    order.sort_by_key(|&e| std::cmp::Reverse(meta.multi_index[e].len()));
    for e in order {
        let idx = &meta.multi_index[e];
        let mut own = vec![piece(idx.len(), state.values[e].clone())];
        if idx.len() <= n {
            own.extend(average_children(&pieces, idx, meta.degrees[idx.len()]));
        }
        pieces.insert(idx.clone(), own);
    }
    let root = average_children(&pieces, &[], meta.degrees[0]);
    pieces.insert(Vec::new(), root);
    Ok(AveragedSums {
        breakpoints,
        degrees: meta.degrees.clone(),
        h,
        pieces,
    })
}

fn average_children<T: Real>(
    pieces: &BTreeMap<Vec<usize>, Vec<LineSamples<T>>>,
    parent: &[usize],
    degree: usize,
) -> Vec<LineSamples<T>> {
    let children: Vec<&Vec<LineSamples<T>>> = (1..=degree)
        .map(|b| {
            let mut idx = parent.to_vec();
            idx.push(b);
            &pieces[&idx]
        })
        .collect();
    let scale = T::from_usize(degree).recip();
    (0..children[0].len())
        .map(|j| {
            let first = &children[0][j];
            let u = (0..first.len())
                .map(|i| children.iter().map(|c| c[j].u[i]).sum::<Cplx<T>>() * scale)
                .collect();
            LineSamples { x: first.x.clone(), u }
        })
        .collect()
}

/// `Z̃^{ᾱβ} = Z^{ᾱβ} − Z^ᾱ` on `J_{|ᾱ|+1}`.
pub fn difference_z<T: Real>(sums: &AveragedSums<T>, alpha: &[usize], beta: usize) -> Result<LineSamples<T>> {
    let k = alpha.len();
    let n = sums.depth();
    if k > n {
        return Err(Error::IndexOutOfRange {
            what: "multi-index length",
            index: k,
            lo: 0,
            hi: n,
        });
    }
    let degree = sums.degrees[k];
    if beta == 0 || beta > degree {
        return Err(Error::IndexOutOfRange {
            what: "child",
            index: beta,
            lo: 1,
            hi: degree,
        });
    }
    let parent = sums.pieces(alpha).ok_or_else(|| Error::IndexOutOfRange {
        what: "multi-index",
        index: alpha.first().copied().unwrap_or(0),
        lo: 1,
        hi: sums.degrees[0],
    })?;
    let mut child_index = alpha.to_vec();
    child_index.push(beta);
    let child = sums.pieces(&child_index).expect("children of stored indices exist");
    // the parent's own edge piece precedes the common domain
    let skip = usize::from(k > 0);
    let diff: Vec<LineSamples<T>> = child
        .iter()
        .zip(&parent[skip..])
        .map(|(c, p)| LineSamples {
            x: c.x.clone(),
            u: c.u.iter().zip(&p.u).map(|(a, b)| a - b).collect(),
        })
        .collect();
    Ok(join(&diff))
}
