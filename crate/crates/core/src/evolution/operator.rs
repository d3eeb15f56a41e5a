//! Tree-structured discrete operators and their Crank–Nicolson propagator.
//!
//! The discrete Laplacian on a star, a tree or a line segment is a weighted
//! graph Laplacian whose node graph is itself a tree. With the lumped mass
//! matrix `M` and the symmetric stiffness `S`, Crank–Nicolson for
//! `M u_t = −i S u` reads `(M + i dt/2 S) u⁺ = (M − i dt/2 S) u`, which is
//! exactly unitary in the `M`-weighted norm. Eliminating leaves first gives an
//! O(n) direct solve without fill-in.

use crate::error::{Error, Result};
use crate::scalar::{c, Cplx, Real};

#[derive(Debug, Clone)]
pub(crate) struct TreeSystem<T: Real> {
    pub mass: Vec<T>,
    pub parent: Vec<Option<usize>>,
    /// Conductance of the link to the parent (zero for the root).
    pub cond: Vec<T>,
    /// Conductance towards a homogeneous Dirichlet node.
    pub anchor: Vec<T>,
    /// Node order with every parent before its children.
    pub order: Vec<usize>,
}

impl<T: Real> TreeSystem<T> {
    pub fn with_capacity(n: usize) -> Self {
        Self {
            mass: Vec::with_capacity(n),
            parent: Vec::with_capacity(n),
            cond: Vec::with_capacity(n),
            anchor: Vec::with_capacity(n),
            order: Vec::with_capacity(n),
        }
    }

    /// Appends a node; parents must be pushed before their children.
    pub fn push(&mut self, mass: T, parent: Option<(usize, T)>) -> usize {
        let id = self.mass.len();
        self.mass.push(mass);
        match parent {
            Some((p, g)) => {
                debug_assert!(p < id);
                self.parent.push(Some(p));
                self.cond.push(g);
            }
            None => {
                self.parent.push(None);
                self.cond.push(T::zero());
            }
        }
        self.anchor.push(T::zero());
        self.order.push(id);
        id
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn stiffness_diagonal(&self) -> Vec<T> {
        let mut s: Vec<T> = self
            .anchor
            .iter()
            .zip(&self.cond)
            .map(|(&a, &g)| a + g)
            .collect();
        for i in 0..self.len() {
            if let Some(p) = self.parent[i] {
                s[p] += self.cond[i];
            }
        }
        s
    }

    /// `(S u)_i`
    #[cfg(test)]
    pub fn apply_stiffness(&self, u: &[Cplx<T>]) -> Vec<Cplx<T>> {
        let diag = self.stiffness_diagonal();
        let mut out: Vec<Cplx<T>> = u.iter().zip(&diag).map(|(z, &d)| *z * d).collect();
        for i in 0..self.len() {
            if let Some(p) = self.parent[i] {
                let g = self.cond[i];
                out[i] -= u[p] * g;
                out[p] -= u[i] * g;
            }
        }
        out
    }

    #[cfg(test)]
    pub fn weighted_norm(&self, u: &[Cplx<T>]) -> T {
        self.mass
            .iter()
            .zip(u)
            .map(|(&m, z)| m * z.norm_sqr())
            .sum::<T>()
            .sqrt()
    }
}

/// Factorized Crank–Nicolson step for a fixed signed time step.
#[derive(Debug, Clone)]
pub(crate) struct CrankNicolson<T: Real> {
    system: TreeSystem<T>,
    half_dt: T,
    diag_explicit: Vec<Cplx<T>>,
    pivot: Vec<Cplx<T>>,
    /// Implicit off-diagonal entry on the link to the parent.
    off: Vec<Cplx<T>>,
}

impl<T: Real> CrankNicolson<T> {
    pub fn new(system: TreeSystem<T>, dt: T) -> Result<Self> {
        let half_dt = T::lit(0.5) * dt;
        let s = system.stiffness_diagonal();
        let n = system.len();
        let mut pivot: Vec<Cplx<T>> = (0..n).map(|i| c(system.mass[i], half_dt * s[i])).collect();
        let diag_explicit = (0..n).map(|i| c(system.mass[i], -half_dt * s[i])).collect();
        let off: Vec<Cplx<T>> = system.cond.iter().map(|&g| c(T::zero(), -half_dt * g)).collect();
        for &i in system.order.iter().rev() {
            if let Some(p) = system.parent[i] {
                if pivot[i].norm() == T::zero() {
                    return Err(Error::Degenerate("zero pivot in tree elimination".into()));
                }
                let update = off[i] * off[i] / pivot[i];
                pivot[p] -= update;
            }
        }
        Ok(Self {
            system,
            half_dt,
            diag_explicit,
            pivot,
            off,
        })
    }

    /// One step in place.
    pub fn step(&self, u: &mut [Cplx<T>]) {
        let sys = &self.system;
        // right-hand side (M − i dt/2 S) u
        let mut r: Vec<Cplx<T>> = u
            .iter()
            .zip(&self.diag_explicit)
            .map(|(z, d)| *z * *d)
            .collect();
        for i in 0..sys.len() {
            if let Some(p) = sys.parent[i] {
                let k = c(T::zero(), self.half_dt * sys.cond[i]);
                r[i] += u[p] * k;
                r[p] += u[i] * k;
            }
        }
        // eliminate leaves towards the root
        for &i in sys.order.iter().rev() {
            if let Some(p) = sys.parent[i] {
                let t = self.off[i] * r[i] / self.pivot[i];
                r[p] -= t;
            }
        }
        // back substitution from the root
        for &i in &sys.order {
            let mut v = r[i];
            if let Some(p) = sys.parent[i] {
                v -= self.off[i] * u[p];
            }
            u[i] = v / self.pivot[i];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::re;

    fn path(n: usize, h: f64) -> TreeSystem<f64> {
        let mut s = TreeSystem::with_capacity(n);
        for i in 0..n {
            let parent = if i == 0 { None } else { Some((i - 1, 1.0 / h)) };
            s.push(h, parent);
        }
        s.anchor[0] = 1.0 / h;
        s.anchor[n - 1] = 1.0 / h;
        s
    }

    #[test]
    fn step_solves_the_implicit_system() {
        let sys = path(50, 0.1);
        let dt = 0.05;
        let cn = CrankNicolson::new(sys.clone(), dt).unwrap();
        let u0: Vec<_> = (0..50).map(|i| c((i as f64 * 0.3).sin(), (i as f64 * 0.1).cos())).collect();
        let mut u1 = u0.clone();
        cn.step(&mut u1);
        // (M + i dt/2 S) u1 == (M − i dt/2 S) u0
        let su0 = sys.apply_stiffness(&u0);
        let su1 = sys.apply_stiffness(&u1);
        for i in 0..50 {
            let lhs = u1[i] * sys.mass[i] + su1[i] * c(0.0, dt / 2.0);
            let rhs = u0[i] * sys.mass[i] - su0[i] * c(0.0, dt / 2.0);
            assert!((lhs - rhs).norm() < 1e-13);
        }
    }

    #[test]
    fn branching_elimination_matches_dense_solve() {
        // root with three chains of length 4
        let mut sys = TreeSystem::with_capacity(13);
        let root = sys.push(1.5, None);
        for _ in 0..3 {
            let mut prev = root;
            for k in 0..4 {
                prev = sys.push(1.0, Some((prev, 1.0 + k as f64)));
            }
            sys.anchor[prev] = 2.0;
        }
        let cn = CrankNicolson::new(sys.clone(), 0.3).unwrap();
        let u0: Vec<_> = (0..13).map(|i| re(1.0 + i as f64)).collect();
        let mut u1 = u0.clone();
        cn.step(&mut u1);
        let su0 = sys.apply_stiffness(&u0);
        let su1 = sys.apply_stiffness(&u1);
        for i in 0..13 {
            let lhs = u1[i] * sys.mass[i] + su1[i] * c(0.0, 0.15);
            let rhs = u0[i] * sys.mass[i] - su0[i] * c(0.0, 0.15);
            assert!((lhs - rhs).norm() < 1e-12);
        }
        assert!((sys.weighted_norm(&u1) - sys.weighted_norm(&u0)).abs() < 1e-12);
    }
}
