use std::io::Write;

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Default relative width of the boundary band around a threshold.
pub const BOUNDARY_TOLERANCE: f64 = 0.05;

/// Critical exponent of a star with `n` edges.
pub fn gamma_gamma_exact(n: usize) -> Result<Ratio<i64>> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("critical exponent needs N >= 2, got {n}")));
    }
    if n.is_multiple_of(2) {
        Ok(Ratio::new(1, 2))
    } else {
        let m = (n / 2) as i64;
        Ok(Ratio::new(m + 1, 2 * m))
    }
}

pub fn gamma_gamma<T: Real>(n: usize) -> Result<T> {
    let g = gamma_gamma_exact(n)?;
    Ok(T::lit(*g.numer() as f64) / T::lit(*g.denom() as f64))
}

/// Which decay on a line with two-valued `σ` is constrained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineCase {
    /// Decay known on the negative half-line.
    Negative,
    /// Decay known on the positive half-line.
    Positive,
    /// Decay known on both sides.
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThresholdContext<T: Real> {
    Line { case: LineCase, sigma_minus: T, sigma_plus: T },
    /// Free evolution on a regular tree or star.
    StarFree,
    /// Star with `n` edges and a bounded potential.
    StarPotential { n: usize },
}

impl<T: Real> ThresholdContext<T> {
    pub fn threshold(&self) -> Result<T> {
        let sixteenth = |s: T| T::one() / (T::lit(16.0) * s * s);
        match *self {
            ThresholdContext::Line { case, sigma_minus, sigma_plus } => {
                if !(sigma_minus > T::zero() && sigma_plus > T::zero()) {
                    return Err(Error::InvalidParameter("sigma must be positive".into()));
                }
                Ok(match case {
                    LineCase::Negative => sixteenth(sigma_minus),
                    LineCase::Positive => sixteenth(sigma_plus),
                    LineCase::Both => sixteenth(sigma_minus.max(sigma_plus)),
                })
            }
            ThresholdContext::StarFree => Ok(T::lit(1.0 / 16.0)),
            ThresholdContext::StarPotential { n } => Ok(T::lit(4.0) * gamma_gamma::<T>(n)?.powi(4)),
        }
    }

    pub fn rule(&self) -> &'static str {
        match self {
            ThresholdContext::Line { case: LineCase::Negative, .. } => "line (i): alpha*beta > 1/(16 sigma_-^2)",
            ThresholdContext::Line { case: LineCase::Positive, .. } => "line (ii): alpha*beta > 1/(16 sigma_+^2)",
            ThresholdContext::Line { case: LineCase::Both, .. } => {
                "line (iii): alpha*beta > 1/(16 max(sigma_-^2, sigma_+^2))"
            }
            ThresholdContext::StarFree => "tree: alpha*beta > 1/16",
            ThresholdContext::StarPotential { .. } => "star with potential: alpha*beta > 4 gamma^4",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Above,
    Below,
    Boundary,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Above => "above",
            Regime::Below => "below",
            Regime::Boundary => "boundary",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdVerdict<T: Real> {
    pub alpha: T,
    pub beta: T,
    pub product: T,
    pub threshold: T,
    pub regime: Regime,
    pub tolerance: T,
    pub rule: &'static str,
}

pub fn classify_threshold<T: Real>(alpha: T, beta: T, context: ThresholdContext<T>) -> Result<ThresholdVerdict<T>> {
    classify_threshold_with(alpha, beta, context, T::lit(BOUNDARY_TOLERANCE))
}

/// Classifies `αβ` against the threshold of `context`; products within
/// `tolerance` (relative) of the threshold are reported as boundary cases.
pub fn classify_threshold_with<T: Real>(
    alpha: T,
    beta: T,
    context: ThresholdContext<T>,
    tolerance: T,
) -> Result<ThresholdVerdict<T>> {
    if !(alpha > T::zero() && beta > T::zero()) {
        return Err(Error::InvalidParameter(format!("decay rates must be positive, got ({alpha}, {beta})")));
    }
    if !(tolerance >= T::zero()) {
        return Err(Error::InvalidParameter("boundary tolerance must be non-negative".into()));
    }
    let threshold = context.threshold()?;
    let product = alpha * beta;
    let regime = if (product - threshold).abs() <= tolerance * threshold {
        Regime::Boundary
    } else if product > threshold {
        Regime::Above
    } else {
        Regime::Below
    };
    Ok(ThresholdVerdict {
        alpha,
        beta,
        product,
        threshold,
        regime,
        tolerance,
        rule: context.rule(),
    })
}

/// Writes verdicts as CSV with header `alpha,beta,product,threshold,regime,rule`.
pub fn write_verdicts<W: Write, T: Real>(w: W, verdicts: &[ThresholdVerdict<T>]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["alpha", "beta", "product", "threshold", "regime", "rule"])?;
    for v in verdicts {
        out.write_record([
            v.alpha.to_string(),
            v.beta.to_string(),
            v.product.to_string(),
            v.threshold.to_string(),
            v.regime.as_str().to_string(),
            v.rule.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn critical_exponent() {
        assert_eq!(gamma_gamma_exact(4).unwrap(), Ratio::new(1, 2));
        assert_eq!(gamma_gamma_exact(3).unwrap(), Ratio::new(1, 1));
        assert_eq!(gamma_gamma_exact(5).unwrap(), Ratio::new(3, 4));
        assert_eq!(gamma_gamma::<f64>(2).unwrap(), 0.5);
        assert!(gamma_gamma::<f64>(1).is_err());
    }

    #[test]
    fn documented_thresholds() {
        let free = ThresholdContext::Line { case: LineCase::Both, sigma_minus: 1.0, sigma_plus: 1.0 };
        assert_eq!(classify_threshold(0.25, 0.25, free).unwrap().regime, Regime::Boundary);
        let two_step = ThresholdContext::Line { case: LineCase::Both, sigma_minus: 1.0, sigma_plus: 0.25 };
        assert_eq!(two_step.threshold().unwrap(), 1.0 / 16.0);
        let pos = ThresholdContext::Line { case: LineCase::Positive, sigma_minus: 1.0, sigma_plus: 0.25 };
        assert_eq!(pos.threshold().unwrap(), 1.0);
        assert_eq!(ThresholdContext::<f64>::StarPotential { n: 3 }.threshold().unwrap(), 4.0);
        let v = classify_threshold(1.0, 5.0, ThresholdContext::StarPotential { n: 3 }).unwrap();
        assert_eq!(v.regime, Regime::Above);
        assert_eq!(classify_threshold(0.1, 0.1, ThresholdContext::StarFree).unwrap().regime, Regime::Below);
    }

    #[test]
    fn band_is_configurable() {
        let v = classify_threshold_with(0.25, 0.26, ThresholdContext::StarFree, 0.01).unwrap();
        assert_eq!(v.regime, Regime::Above);
        assert!(classify_threshold(0.0, 1.0, ThresholdContext::StarFree).is_err());
        assert!(classify_threshold(1.0, -1.0, ThresholdContext::StarFree).is_err());
    }

    #[test]
    fn verdict_csv() {
        let v = classify_threshold(0.25, 0.25, ThresholdContext::StarFree).unwrap();
        let mut buf = Vec::new();
        write_verdicts(&mut buf, &[v]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "alpha,beta,product,threshold,regime,rule");
        assert_eq!(lines.next().unwrap(), "0.25,0.25,0.0625,0.0625,boundary,tree: alpha*beta > 1/16");
    }

    fn rank(r: Regime) -> u8 {
        match r {
            Regime::Below => 0,
            Regime::Boundary => 1,
            Regime::Above => 2,
        }
    }

    proptest! {
        #[test]
        fn monotone_in_rates(a in 0.01f64..4.0, b in 0.01f64..4.0, da in 0.0f64..2.0, db in 0.0f64..2.0,
                             sm in 0.1f64..3.0, sp in 0.1f64..3.0, case in 0usize..5) {
            let ctx = match case {
                0 => ThresholdContext::Line { case: LineCase::Negative, sigma_minus: sm, sigma_plus: sp },
                1 => ThresholdContext::Line { case: LineCase::Positive, sigma_minus: sm, sigma_plus: sp },
                2 => ThresholdContext::Line { case: LineCase::Both, sigma_minus: sm, sigma_plus: sp },
                3 => ThresholdContext::StarFree,
                _ => ThresholdContext::StarPotential { n: 2 + (sm * 3.0) as usize },
            };
            let lo = classify_threshold(a, b, ctx).unwrap();
            let hi = classify_threshold(a + da, b + db, ctx).unwrap();
            prop_assert!(rank(hi.regime) >= rank(lo.regime));
        }
    }
}
