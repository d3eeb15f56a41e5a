use crate::error::{Error, Result};
use crate::scalar::Real;

/// Uniform grid on one edge: nodes `x_i = i·h`, `i = 0..=intervals`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeGrid<T: Real> {
    pub h: T,
    pub intervals: usize,
    /// Truncation length of a ray; `None` for finite edges.
    pub truncation: Option<T>,
}

impl<T: Real> EdgeGrid<T> {
    pub fn finite(length: T, h: T) -> Result<Self> {
        Ok(Self {
            h,
            intervals: intervals_for(length, h)?,
            truncation: None,
        })
    }

    pub fn ray(truncation: T, h: T) -> Result<Self> {
        Ok(Self {
            h,
            intervals: intervals_for(truncation, h)?,
            truncation: Some(truncation),
        })
    }

    pub fn samples(&self) -> usize {
        self.intervals + 1
    }

    pub fn node(&self, i: usize) -> T {
        self.h * T::from_usize(i)
    }

    pub fn nodes(&self) -> Vec<T> {
        (0..self.samples()).map(|i| self.node(i)).collect()
    }

    pub fn end(&self) -> T {
        self.node(self.intervals)
    }
}

/// Per-edge grids of a metric graph.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphGrid<T: Real> {
    pub edges: Vec<EdgeGrid<T>>,
}

impl<T: Real> GraphGrid<T> {
    /// Largest ray truncation length (zero when there are no rays).
    pub fn truncation(&self) -> T {
        self.edges
            .iter()
            .filter_map(|e| e.truncation)
            .fold(T::zero(), T::max)
    }

    /// Whether rays are long enough for Gaussians of the given width.
    pub fn resolves_width(&self, width: T) -> bool {
        self.edges
            .iter()
            .filter_map(|e| e.truncation)
            .all(|l| l >= T::lit(10.0) * width)
    }
}

/// Number of intervals of spacing `h` in `length`; the ratio must be an integer.
pub(crate) fn intervals_for<T: Real>(length: T, h: T) -> Result<usize> {
    if !(h > T::zero()) || !(length > T::zero()) {
        return Err(Error::InvalidParameter("length and spacing must be positive".into()));
    }
    let ratio = length / h;
    let n = ratio.round();
    if (ratio - n).abs() > T::lit(1e-6) * n.max(T::one()) || n < T::one() {
        return Err(Error::InvalidParameter(format!(
            "length {length} is not a multiple of spacing {h}"
        )));
    }
    Ok(n.to_usize().expect("finite interval count"))
}
