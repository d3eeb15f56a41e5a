use super::coefficients::ef_recursion;
use super::layers::LayerParams;
use super::wiener::WienerSeries;
use crate::error::{Error, Result};
use crate::scalar::{c, cis, re, Cplx, Real};

/// Free kernel `k_t(x) = e^{ix²/4t} / √(4πit)` (principal root, `t > 0`),
/// with `k_{-t} = conj(k_t)`.
pub fn k_t<T: Real>(t: T, x: T) -> Result<Cplx<T>> {
    if t == T::zero() || !t.is_finite() {
        return Err(Error::InvalidParameter(format!("kernel time must be non-zero, got {t}")));
    }
    Ok(free_kernel(t, x))
}

pub(crate) fn free_kernel<T: Real>(t: T, x: T) -> Cplx<T> {
    let s = t.abs();
    let v = cis(x * x / (T::lit(4.0) * s) - T::FRAC_PI_4()) / (T::lit(4.0) * T::PI() * s).sqrt();
    if t < T::zero() {
        v.conj()
    } else {
        v
    }
}

/// `(1/2π) ∫ e^{-(ε+it)ξ² + ixξ} dξ = e^{-x²/4(ε+it)} / √(4π(ε+it))`, the
/// Gaussian-regularized free kernel (`ε > 0`).
pub fn k_t_regularized<T: Real>(t: T, eps: T, x: T) -> Cplx<T> {
    let z = c(eps, t);
    (-(re(x * x) / (z * T::lit(4.0)))).exp() / (z * (T::lit(4.0) * T::PI())).sqrt()
}

/// Time parameter of a kernel evaluation, optionally regularized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Propagator<T: Real> {
    pub t: T,
    pub eps: Option<T>,
}

impl<T: Real> Propagator<T> {
    pub fn new(t: T) -> Result<Self> {
        k_t(t, T::zero())?;
        Ok(Self { t, eps: None })
    }

    pub fn regularized(t: T, eps: T) -> Self {
        Self { t, eps: Some(eps) }
    }

    pub fn free(&self, x: T) -> Cplx<T> {
        match self.eps {
            None => free_kernel(self.t, x),
            Some(e) => k_t_regularized(self.t, e, x),
        }
    }

    /// `h_t(x) = Σ c_n k_t(x − 2l n·a)`
    pub fn h(&self, x: T, series: &WienerSeries<T>) -> Cplx<T> {
        series
            .atoms()
            .fold(c(T::zero(), T::zero()), |acc, (cn, d)| acc + cn * self.free(x - d))
    }
}

pub fn kernel_h<T: Real>(t: T, x: T, series: &WienerSeries<T>) -> Result<Cplx<T>> {
    Ok(Propagator::new(t)?.h(x, series))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelBase {
    /// The free kernel `k_t`.
    Free,
    /// The series kernel `h_t`.
    Series,
}

/// `weight · base_t(x_scale·x + y_scale·y + shift)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelAtom<T: Real> {
    pub weight: Cplx<T>,
    pub x_scale: T,
    pub y_scale: T,
    pub shift: T,
    pub base: KernelBase,
}

impl<T: Real> KernelAtom<T> {
    pub fn argument(&self, x: T, y: T) -> T {
        self.x_scale * x + self.y_scale * y + self.shift
    }

    pub fn eval(&self, prop: &Propagator<T>, series: &WienerSeries<T>, x: T, y: T) -> Cplx<T> {
        let arg = self.argument(x, y);
        self.weight
            * match self.base {
                KernelBase::Free => prop.free(arg),
                KernelBase::Series => prop.h(arg, series),
            }
    }
}

/// Layer interval `I_k` as a closed range (`None` for an infinite end):
/// `I_1 = (-∞, 0]`, `I_k = [(k-2)l, (k-1)l]`, `I_N = [(N-2)l, ∞)`.
pub fn layer_interval<T: Real>(k: usize, params: &LayerParams<T>) -> Result<(Option<T>, Option<T>)> {
    let n = params.n();
    if k == 0 || k > n {
        return Err(Error::IndexOutOfRange {
            what: "layer",
            index: k,
            lo: 1,
            hi: n,
        });
    }
    let l = params.l();
    let lo = (k > 1).then(|| l * T::from_usize(k - 2));
    let hi = (k < n).then(|| l * T::from_usize(k - 1));
    Ok((lo, hi))
}

pub(crate) fn in_interval<T: Real>(y: T, (lo, hi): (Option<T>, Option<T>)) -> bool {
    lo.is_none_or(|v| y >= v) && hi.is_none_or(|v| y <= v)
}

/// Atoms of the first-row kernel `p_t^{1,k}(x, y)`, `y ∈ I_k`.
pub fn kernel_p1k_atoms<T: Real>(k: usize, params: &LayerParams<T>) -> Result<Vec<KernelAtom<T>>> {
    let n = params.n();
    if n < 2 {
        return Err(Error::InvalidParameter("kernels need at least two layers".into()));
    }
    layer_interval(k, params)?;
    let a1 = params.a(1);
    let l = params.l();
    let atom = |weight: Cplx<T>, q: T, r: T, base| KernelAtom {
        weight,
        x_scale: a1,
        y_scale: -q,
        shift: -r,
        base,
    };
    let mut atoms = Vec::new();
    if k == 1 {
        atoms.push(atom(re(a1), a1, T::zero(), KernelBase::Free));
        let (_, f) = ef_recursion(n - 1, 1, params)?;
        for (i, ct) in f.terms() {
            atoms.push(atom(-ct * a1, -a1, f.shift_of(i), KernelBase::Series));
        }
    } else if k < n {
        let ak = params.a(k);
        let alpha = params.alpha(k);
        let base = params.partial_sum(2, k);
        let back = T::from_usize(k - 1) * ak * l;
        let (e, f) = ef_recursion(n - 1, k, params)?;
        for (i, ci) in e.terms() {
            atoms.push(atom(ci.conj() * (a1 * alpha), ak, base - back + e.shift_of(i), KernelBase::Series));
        }
        for (i, ct) in f.terms() {
            atoms.push(atom(-ct * (a1 * alpha), -ak, base + back + f.shift_of(i), KernelBase::Series));
        }
    } else {
        let an = params.a(n);
        let r = params.partial_sum(2, n - 1) - T::from_usize(n - 2) * an * l;
        atoms.push(atom(re(a1 * params.alpha(n)), an, r, KernelBase::Series));
    }
    Ok(atoms)
}

/// `p_t^{1,k}(x, y)` for `x ≤ 0`, `y ∈ I_k`.
pub fn kernel_p1k<T: Real>(
    k: usize,
    t: T,
    x: T,
    y: T,
    params: &LayerParams<T>,
    series: &WienerSeries<T>,
) -> Result<Cplx<T>> {
    let interval = layer_interval(k, params)?;
    if !in_interval(y, interval) {
        return Err(Error::InvalidParameter(format!("y = {y} lies outside I_{k}")));
    }
    let prop = Propagator::new(t)?;
    Ok(kernel_p1k_atoms(k, params)?
        .iter()
        .fold(c(T::zero(), T::zero()), |acc, a| acc + a.eval(&prop, series, x, y)))
}
