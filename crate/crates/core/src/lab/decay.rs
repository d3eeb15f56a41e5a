use crate::error::{Error, Result};
use crate::line::LineSamples;
use crate::scalar::Real;

/// Samples with `|u|` at or below this value are ignored by the fit.
pub const NOISE_FLOOR: f64 = 1e-13;

/// Minimum number of usable samples in a window.
pub const MIN_SAMPLES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Negative,
    Positive,
    /// Fits both tails and keeps the slower one.
    Both,
}

/// Range of `|x|` used by the fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecayWindow<T: Real> {
    /// `[0.4 L, 0.8 L]` with `L` the largest `|x|` on the side.
    Default,
    Explicit(T, T),
    /// From where `|u|` first drops below `upper · max|u|` to the last sample
    /// before it first drops below `lower · max|u|`, so a numerical floor
    /// beyond the decaying region is never fitted.
    Amplitude { upper: T, lower: T },
}

impl<T: Real> DecayWindow<T> {
    pub fn amplitude() -> Self {
        DecayWindow::Amplitude {
            upper: T::lit(1e-2),
            lower: T::lit(1e-6),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit<T: Real> {
    /// `α̂` in `log|u| ≈ c − α̂ x²`.
    pub rate: T,
    pub intercept: T,
    pub window: (T, T),
    /// Weighted RMS of the log residuals.
    pub residual: T,
    pub side: Side,
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecayEstimate<T: Real> {
    Fitted(DecayFit<T>),
    /// Every sample in the window is at or below the noise floor.
    IdenticallyZero { window: (T, T), side: Side },
}

impl<T: Real> DecayEstimate<T> {
    pub fn fit(&self) -> Option<&DecayFit<T>> {
        match self {
            DecayEstimate::Fitted(f) => Some(f),
            DecayEstimate::IdenticallyZero { .. } => None,
        }
    }

    pub fn rate(&self) -> Option<T> {
        self.fit().map(|f| f.rate)
    }
}

/// Weighted least squares of `log|u|` against `x²` on a tail window, with
/// trapezoid spacings as weights.
pub fn fit_gaussian_decay<T: Real>(
    samples: &LineSamples<T>,
    side: Side,
    window: DecayWindow<T>,
) -> Result<DecayEstimate<T>> {
    match side {
        Side::Both => {
            let neg = fit_side(samples, Side::Negative, window)?;
            let pos = fit_side(samples, Side::Positive, window)?;
            Ok(match (neg, pos) {
                (DecayEstimate::Fitted(a), DecayEstimate::Fitted(b)) => {
                    let mut slow = if a.rate <= b.rate { a } else { b };
                    slow.residual = a.residual.max(b.residual);
                    slow.side = Side::Both;
                    DecayEstimate::Fitted(slow)
                }
                (DecayEstimate::Fitted(f), _) | (_, DecayEstimate::Fitted(f)) => DecayEstimate::Fitted(f),
                (DecayEstimate::IdenticallyZero { window, .. }, _) => DecayEstimate::IdenticallyZero {
                    window,
                    side: Side::Both,
                },
            })
        }
        _ => fit_side(samples, side, window),
    }
}

fn fit_side<T: Real>(samples: &LineSamples<T>, side: Side, window: DecayWindow<T>) -> Result<DecayEstimate<T>> {
    let weights = samples.weights();
    // (|x|, |u|, w) on the requested side, ordered by |x|
    let mut tail: Vec<(T, T, T)> = samples
        .x
        .iter()
        .zip(&samples.u)
        .zip(&weights)
        .filter(|((&x, _), _)| match side {
            Side::Negative => x <= T::zero(),
            _ => x >= T::zero(),
        })
        .map(|((&x, u), &w)| (x.abs(), u.norm(), w))
        .collect();
    tail.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite nodes"));
    let (lo, hi) = resolve_window(&tail, window)?;
    let inside: Vec<&(T, T, T)> = tail.iter().filter(|p| p.0 >= lo && p.0 <= hi).collect();
    let floor = T::lit(NOISE_FLOOR);
    let valid: Vec<&(T, T, T)> = inside.iter().copied().filter(|p| p.1 > floor).collect();
    if valid.is_empty() && !inside.is_empty() {
        return Ok(DecayEstimate::IdenticallyZero { window: (lo, hi), side });
    }
    if valid.len() < MIN_SAMPLES {
        return Err(Error::TooFewSamples {
            found: valid.len(),
            required: MIN_SAMPLES,
        });
    }
    let sw: T = valid.iter().map(|p| p.2).sum();
    let mean = |f: &dyn Fn(&(T, T, T)) -> T| valid.iter().map(|p| p.2 * f(p)).sum::<T>() / sw;
    let mx = mean(&|p| p.0 * p.0);
    let my = mean(&|p| p.1.ln());
    let sxx = mean(&|p| (p.0 * p.0 - mx).powi(2));
    let sxy = mean(&|p| (p.0 * p.0 - mx) * (p.1.ln() - my));
    if !(sxx > T::zero()) {
        return Err(Error::Degenerate("window has a single abscissa".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = mean(&|p| (p.1.ln() - intercept - slope * p.0 * p.0).powi(2)).sqrt();
    Ok(DecayEstimate::Fitted(DecayFit {
        rate: -slope,
        intercept,
        window: (lo, hi),
        residual,
        side,
        samples: valid.len(),
    }))
}

fn resolve_window<T: Real>(tail: &[(T, T, T)], window: DecayWindow<T>) -> Result<(T, T)> {
    let extent = tail.last().map(|p| p.0).unwrap_or(T::zero());
    match window {
        DecayWindow::Default => Ok((T::lit(0.4) * extent, T::lit(0.8) * extent)),
        DecayWindow::Explicit(lo, hi) => {
            if !(lo >= T::zero() && hi > lo) {
                return Err(Error::InvalidParameter(format!("window [{lo}, {hi}] is empty")));
            }
            Ok((lo, hi))
        }
        DecayWindow::Amplitude { upper, lower } => {
            if !(upper > lower && lower > T::zero()) {
                return Err(Error::InvalidParameter("amplitude band must satisfy 0 < lower < upper".into()));
            }
            let peak_at = tail
                .iter()
                .enumerate()
                .fold((0, T::zero()), |best, (i, p)| if p.1 > best.1 { (i, p.1) } else { best });
            let (start, peak) = peak_at;
            if peak == T::zero() {
                return Ok((T::zero(), extent));
            }
            let first = tail[start..]
                .iter()
                .position(|p| p.1 < upper * peak)
                .map_or(tail.len(), |i| start + i);
            let lo = tail.get(first).map_or(extent, |p| p.0);
            let hi = tail[first.min(tail.len())..]
                .iter()
                .take_while(|p| p.1 >= lower * peak)
                .last()
                .map_or(lo, |p| p.0);
            Ok((lo, hi))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;
    use proptest::prelude::*;

    fn samples(rate: f64, scale: f64) -> LineSamples<f64> {
        LineSamples::from_fn(-10.0, 10.0, 2000, |x| c(scale * (-rate * x * x).exp(), 0.0))
    }

    #[test]
    fn exact_gaussians() {
        let e = fit_gaussian_decay(&samples(0.25, 1.0), Side::Both, DecayWindow::Default).unwrap();
        assert!((e.rate().unwrap() - 0.25).abs() < 1e-6);
        let e = fit_gaussian_decay(&samples(2.0, 3.0), Side::Positive, DecayWindow::Explicit(1.0, 3.0)).unwrap();
        let f = e.fit().unwrap();
        assert!((f.rate - 2.0).abs() < 1e-9);
        assert!((f.intercept - 3f64.ln()).abs() < 1e-9);
        assert!(f.residual < 1e-9);
    }

    #[test]
    fn both_sides_keep_the_slower_tail() {
        let s = LineSamples::from_fn(-10.0, 10.0, 2000, |x: f64| {
            let r: f64 = if x < 0.0 { 0.1 } else { 0.5 };
            c((-r * x * x).exp(), 0.0)
        });
        let e = fit_gaussian_decay(&s, Side::Both, DecayWindow::Explicit(1.0, 5.0)).unwrap();
        assert!((e.rate().unwrap() - 0.1).abs() < 1e-9);
    }

    #[test]
    fn amplitude_window() {
        let e = fit_gaussian_decay(&samples(0.5, 1.0), Side::Negative, DecayWindow::amplitude()).unwrap();
        let f = e.fit().unwrap();
        assert!((f.rate - 0.5).abs() < 1e-9);
        // e^{-x²/2} = 1e-2 at x² = 4 ln 10, 1e-6 at x² = 12 ln 10
        assert!((f.window.0 - (4.0 * 10f64.ln()).sqrt()).abs() < 0.011);
        assert!((f.window.1 - (12.0 * 10f64.ln()).sqrt()).abs() < 0.011, "{:?}", f.window);
    }

    #[test]
    fn amplitude_window_stops_at_a_floor() {
        let s = LineSamples::from_fn(0.0, 20.0, 2000, |x: f64| c((-0.5 * x * x).exp() + 1e-7, 0.0));
        let e = fit_gaussian_decay(&s, Side::Positive, DecayWindow::amplitude()).unwrap();
        let f = e.fit().unwrap();
        assert!(f.window.1 < 5.3, "{:?}", f.window);
        assert!((f.rate - 0.5).abs() < 0.02, "{}", f.rate);
    }

    #[test]
    fn degenerate_inputs() {
        let zero = LineSamples::from_fn(-10.0, 10.0, 200, |_| c(0.0, 0.0));
        assert!(matches!(
            fit_gaussian_decay(&zero, Side::Both, DecayWindow::Default).unwrap(),
            DecayEstimate::IdenticallyZero { .. }
        ));
        let coarse = LineSamples::<f64>::from_fn(-10.0, 10.0, 20, |x: f64| c((-0.01 * x * x).exp(), 0.0));
        assert!(matches!(
            fit_gaussian_decay(&coarse, Side::Positive, DecayWindow::Default),
            Err(Error::TooFewSamples { .. })
        ));
    }

    proptest! {
        #[test]
        fn planted_rates_are_recovered(rate in 0.05f64..2.0, lo in 0.5f64..2.0, width in 0.5f64..3.0) {
            let s = samples(rate, 1.0);
            let hi = lo + width;
            prop_assume!(rate * hi * hi < 25.0);
            let e = fit_gaussian_decay(&s, Side::Positive, DecayWindow::Explicit(lo, hi)).unwrap();
            prop_assert!((e.rate().unwrap() - rate).abs() < 1e-6 * rate);
        }
    }
}
