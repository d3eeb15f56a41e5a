use std::io::Write;

use crate::error::{Error, Result};
use crate::evolution::PiecewiseCoefficient;
use crate::graph::TreeMeta;
use crate::scalar::Real;

/// Piecewise linear fold of the even extension onto a line with a step
/// coefficient. Interval `k` (`0 ≤ k ≤ 2n+1`) is `(ã_k, ã_{k+1})`, mapped onto
/// `(b_k, b_{k+1})` with slope `μ_k`; `σ = μ_k²` there. The outer
/// breakpoints are `∓∞` and `b_{n+1} = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionMap<T: Real> {
    folded: Vec<T>,
    targets: Vec<T>,
    slopes: Vec<T>,
    jump_ratios: Vec<T>,
}

impl<T: Real> ReductionMap<T> {
    /// `ã_0, …, ã_{2n+2}`
    pub fn folded_breakpoints(&self) -> &[T] {
        &self.folded
    }

    /// `b_0, …, b_{2n+2}`
    pub fn target_breakpoints(&self) -> &[T] {
        &self.targets
    }

    /// `μ_0, …, μ_{2n+1}`
    pub fn slopes(&self) -> &[T] {
        &self.slopes
    }

    pub fn sigma(&self) -> Vec<T> {
        self.slopes.iter().map(|&m| m * m).collect()
    }

    /// `η_1, …, η_{2n+1}` with `v_x(ã_k−) = η_k v_x(ã_k+)`; `η_{n+1} = 1`.
    pub fn jump_ratios(&self) -> &[T] {
        &self.jump_ratios
    }

    pub fn intervals(&self) -> usize {
        self.slopes.len()
    }

    /// Interval containing `x`; interior breakpoints belong to the right.
    pub fn interval_of(&self, x: T) -> usize {
        self.folded[1..self.folded.len() - 1].partition_point(|&a| a <= x)
    }

    /// `T_k(x)` on the interval containing `x`.
    pub fn apply(&self, x: T) -> T {
        let k = self.interval_of(x);
        if k == 0 {
            self.targets[1] + self.slopes[0] * (x - self.folded[1])
        } else {
            self.targets[k] + self.slopes[k] * (x - self.folded[k])
        }
    }

    /// The step coefficient on `(b_k, b_{k+1})`.
    pub fn coefficient(&self) -> Result<PiecewiseCoefficient<T>> {
        let inner = self.targets[1..self.targets.len() - 1].to_vec();
        PiecewiseCoefficient::from_sigma(&self.sigma(), inner)
    }

    /// Audit table `k, ã_k, b_k, slope, σ`; the last row has no interval.
    pub fn write_report<W: Write>(&self, w: W) -> Result<()> {
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(["k", "a_tilde", "b", "slope", "sigma"])?;
        for k in 0..self.folded.len() {
            let (slope, sigma) = match self.slopes.get(k) {
                Some(&m) => (m.to_string(), (m * m).to_string()),
                None => (String::new(), String::new()),
            };
            csv.write_record([
                k.to_string(),
                self.folded[k].to_string(),
                self.targets[k].to_string(),
                slope,
                sigma,
            ])?;
        }
        csv.flush()?;
        Ok(())
    }
}

/// Fold map of a regular tree with generation lengths `l_1..l_n` and degrees
/// `d_1..d_{n+1}`.
pub fn reduction_map<T: Real>(tree: &TreeMeta<T>) -> Result<ReductionMap<T>> {
    let n = tree.depth();
    let d = &tree.degrees;
    if d.len() != n + 1 || d.contains(&0) {
        return Err(Error::InvalidParameter(format!(
            "{} generation lengths need {} positive degrees",
            n,
            n + 1
        )));
    }
    let a = tree.breakpoints();
    let inf = T::infinity();
    let folded: Vec<T> = (0..=2 * n + 2)
        .map(|k| match k {
            0 => -inf,
            k if k <= n => -a[n + 1 - k],
            k if k == 2 * n + 2 => inf,
            k => a[k - n - 1],
        })
        .collect();
    // d_2 ⋯ d_m, 1-based degrees
    let prod = |m: usize| -> T { (2..=m).map(|i| T::from_usize(d[i - 1])).product() };
    let total = prod(n + 1);
    let slopes: Vec<T> = (0..=2 * n + 1)
        .map(|k| match k {
            k if k < n => prod(n + 1 - k) / total,
            k if k <= n + 1 => total.recip(),
            k => prod(k - n) / total,
        })
        .collect();
    let jump_ratios = (1..=2 * n + 1)
        .map(|k| match k {
            k if k <= n => T::from_usize(d[n + 1 - k]).recip(),
            k if k == n + 1 => T::one(),
            k => T::from_usize(d[k - n - 1]),
        })
        .collect();
    let mut targets = vec![T::zero(); 2 * n + 3];
    targets[0] = -inf;
    targets[2 * n + 2] = inf;
    for k in (1..=n).rev() {
        targets[k] = targets[k + 1] - slopes[k] * (folded[k + 1] - folded[k]);
    }
    for k in n + 2..=2 * n + 1 {
        targets[k] = targets[k - 1] + slopes[k - 1] * (folded[k] - folded[k - 1]);
    }
    Ok(ReductionMap {
        folded,
        targets,
        slopes,
        jump_ratios,
    })
}
