use std::io::Write;

use super::coefficients::ef_recursion;
use super::exppoly::{range_index, weight, Direction, ExpPolynomial};
use super::layers::LayerParams;
use crate::error::{Error, Result};
use crate::scalar::{re, Cplx, Real};

/// Truncated expansion `1/Ē_{N-1,1}(ξ) ≈ Σ_{n ≥ 0} c_n e^{-2iξl n·a}`.
#[derive(Debug, Clone, PartialEq)]
pub struct WienerSeries<T: Real> {
    poly: ExpPolynomial<T>,
    order: u32,
    level_ratios: Vec<T>,
    rho: T,
    tail_bound: T,
    params: LayerParams<T>,
}

impl<T: Real> WienerSeries<T> {
    pub fn poly(&self) -> &ExpPolynomial<T> {
        &self.poly
    }

    /// Truncation order `K` (maximal total multi-index weight).
    pub fn order(&self) -> u32 {
        self.order
    }

    /// `max_ξ |F̃_{j,1}/E_{j,1}|` on the sampled grid for `j = 1..N-2`.
    pub fn level_ratios(&self) -> &[T] {
        &self.level_ratios
    }

    /// Largest level ratio; a grid estimate of the true supremum over `ξ`.
    pub fn rho(&self) -> T {
        self.rho
    }

    /// `ρ^{K+1} / (1 − ρ)`
    pub fn tail_bound(&self) -> T {
        self.tail_bound
    }

    pub fn params(&self) -> &LayerParams<T> {
        &self.params
    }

    pub fn eval(&self, xi: T) -> Cplx<T> {
        self.poly.eval(xi)
    }

    /// `(c_n, 2l n·a)` pairs.
    pub fn atoms(&self) -> impl Iterator<Item = (Cplx<T>, T)> + '_ {
        self.poly.terms().map(|(n, v)| (v, self.poly.shift_of(n)))
    }

    /// `max_ξ |S_K(ξ) Ē_{N-1,1}(ξ) − 1|` on `xi_grid`.
    pub fn residual(&self, xi_grid: &[T]) -> Result<T> {
        let n = self.params.n();
        let ebar = ef_recursion(n - 1, 1, &self.params)?.0.conj();
        Ok(xi_grid
            .iter()
            .map(|&xi| (self.eval(xi) * ebar.eval(xi) - re(T::one())).norm())
            .fold(T::zero(), T::max))
    }

    /// CSV dump: a `# N=…,a=…,l=…,K=…,rho=…` line, then one row per term.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let a: Vec<String> = self
            .params
            .a_values()
            .iter()
            .map(|v| v.to_f64_lossy().to_string())
            .collect();
        writeln!(
            w,
            "# N={},a={},l={},K={},rho={}",
            self.params.n(),
            a.join(";"),
            self.params.l().to_f64_lossy(),
            self.order,
            self.rho.to_f64_lossy()
        )?;
        let mut csv = csv::Writer::from_writer(w);
        let mut header: Vec<String> = (2..self.params.n()).map(|i| format!("n_{i}")).collect();
        header.push("re_c".into());
        header.push("im_c".into());
        csv.write_record(&header)?;
        for (n, v) in self.poly.terms() {
            let mut row: Vec<String> = n.iter().map(|k| k.to_string()).collect();
            row.push(v.re.to_f64_lossy().to_string());
            row.push(v.im.to_f64_lossy().to_string());
            csv.write_record(&row)?;
        }
        csv.flush()?;
        Ok(())
    }
}

fn truncate<T: Real>(p: ExpPolynomial<T>, k: u32) -> ExpPolynomial<T> {
    let kept: Vec<_> = p
        .terms()
        .filter(|(n, _)| weight(n) <= k)
        .map(|(n, v)| (n.to_vec(), v))
        .collect();
    ExpPolynomial::from_terms(kept, p.direction(), p.frequencies().to_vec(), p.l())
        .expect("indices keep their length")
}

/// Inverts `Ē_{N-1,1}` level by level with the geometric expansion
/// `1/E_{j,1} = 1/E_{j-1,1} · Σ_n (−γ_j e^{2iξl a_j} w)^n`, where
/// `w = e^{2iξl(a_2+…+a_{j-1})} F̃_{j-1,1}/E_{j-1,1}`, truncated at total
/// weight `order`.
pub fn invert_e<T: Real>(params: &LayerParams<T>, order: u32, xi_grid: &[T]) -> Result<WienerSeries<T>> {
    let n = params.n();
    if n < 2 {
        return Err(Error::InvalidParameter("inversion needs at least two layers".into()));
    }
    let dim = n - 2;
    let frame = if n >= 3 { params.a_values()[1..n - 1].to_vec() } else { Vec::new() };
    let one = ExpPolynomial::constant(re(T::one()), Direction::Plus, frame, params.l());

    let mut level_ratios = Vec::with_capacity(dim);
    for j in 1..n.saturating_sub(1) {
        let (e, f) = ef_recursion(j, 1, params)?;
        let r = xi_grid
            .iter()
            .map(|&xi| (f.eval(xi) / e.eval(xi)).norm())
            .fold(T::zero(), T::max);
        if !(r < T::one()) {
            return Err(Error::NoContraction { rho: r.to_f64_lossy() });
        }
        level_ratios.push(r);
    }

    let mut inv = one.clone();
    for j in 2..n {
        let (_, f) = ef_recursion(j - 1, 1, params)?;
        let w = f
            .times_exp(&range_index(dim, 2, j - 1), Direction::Plus)
            .mul_truncated(&inv, Some(order));
        let q = truncate(
            w.times_exp(&range_index(dim, j, j), Direction::Plus)
                .scale(re(-params.gamma(j))),
            order,
        );
        let mut sum = one.clone();
        let mut power = one.clone();
        for _ in 0..order {
            power = power.mul_truncated(&q, Some(order));
            if power.is_empty() {
                break;
            }
            sum = sum.add(&power);
        }
        inv = inv.mul_truncated(&sum, Some(order));
    }

    let rho = level_ratios.iter().copied().fold(T::zero(), T::max);
    let tail_bound = rho.powi(order as i32 + 1) / (T::one() - rho);
    Ok(WienerSeries {
        poly: inv.conj(),
        order,
        level_ratios,
        rho,
        tail_bound,
        params: params.clone(),
    })
}
