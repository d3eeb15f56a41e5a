use super::exppoly::{range_index, Direction, ExpPolynomial};
use super::layers::{chain_product, LayerParams};
use crate::error::{Error, Result};
use crate::scalar::{c, cis, re, Cplx, Real};

/// Smallest admissible `|Ē_{N-1,1}(ξ)|`.
pub const DEGENERACY_TOLERANCE: f64 = 1e-12;

fn poly_frame<T: Real>(params: &LayerParams<T>) -> (Vec<T>, T) {
    let n = params.n();
    let a = if n >= 3 { params.a_values()[1..n - 1].to_vec() } else { Vec::new() };
    (a, params.l())
}

/// `(E_{j,k}, F̃_{j,k})` for `1 ≤ k ≤ j ≤ N-1`. `E` uses `e^{+2iξl n·a}` and
/// `F̃` uses `e^{-2iξl n·a}`, both with 0/1 multi-indices over `a_2..a_{N-1}`.
pub fn ef_recursion<T: Real>(
    j: usize,
    k: usize,
    params: &LayerParams<T>,
) -> Result<(ExpPolynomial<T>, ExpPolynomial<T>)> {
    if k > j {
        return Err(Error::InvalidParameter(format!("E/F̃ need k ≤ j, got k={k}, j={j}")));
    }
    params.check_junction(j)?;
    params.check_junction(k)?;
    let (a, l) = poly_frame(params);
    let dim = a.len();
    let mut e = ExpPolynomial::constant(re(T::one()), Direction::Plus, a.clone(), l);
    let mut f = ExpPolynomial::constant(re(params.gamma(k)), Direction::Minus, a, l).pruned();
    for i in k + 1..=j {
        let s = range_index(dim, k + 1, i);
        let g = re(params.gamma(i));
        let e_next = e.add(&f.times_exp(&s, Direction::Plus).scale(g));
        let f_next = f.add(&e.times_exp(&s, Direction::Minus).scale(g));
        e = e_next;
        f = f_next;
    }
    Ok((e, f))
}

/// `λ̄_k(ξ) ⋯ λ̄_j(ξ)`
fn lambda_bar_product<T: Real>(k: usize, j: usize, xi: T, params: &LayerParams<T>) -> Cplx<T> {
    (k..=j).fold(re(T::one()), |acc, i| acc * params.lambda(i, xi).conj())
}

/// Closed forms of the entries `(2,1)` and `(2,2)` of `T̄_j ⋯ T̄_k`.
pub fn chain_entries_closed_form<T: Real>(
    j: usize,
    k: usize,
    xi: T,
    params: &LayerParams<T>,
) -> Result<(Cplx<T>, Cplx<T>)> {
    let (e, f) = ef_recursion(j, k, params)?;
    let common = lambda_bar_product(k, j, xi, params) * params.prefactor(j, k);
    let phase = cis(-T::lit(2.0) * xi * params.l() * T::from_usize(k - 1) * params.a(k));
    Ok((common * phase * f.eval(xi), common * e.eval(xi).conj()))
}

/// `|A_{j,k}|² − |B_{j,k}|² = (ε_k⋯ε_j)² / (2^{j-k+1} a_k⋯a_j)² · Π (1 − γ_i²)`
pub fn determinant_closed_form<T: Real>(j: usize, k: usize, params: &LayerParams<T>) -> Result<T> {
    if k > j {
        return Err(Error::InvalidParameter(format!("need k ≤ j, got k={k}, j={j}")));
    }
    params.check_junction(j)?;
    params.check_junction(k)?;
    let p = params.prefactor(j, k);
    Ok(p * p * (k..=j).map(|i| T::one() - params.gamma(i).powi(2)).product::<T>())
}

fn check_layers<T: Real>(params: &LayerParams<T>) -> Result<()> {
    if params.n() < 2 {
        return Err(Error::InvalidParameter("coefficients need at least two layers".into()));
    }
    Ok(())
}

fn check_denominator<T: Real>(ebar: Cplx<T>, xi: T) -> Result<()> {
    if ebar.norm() < T::lit(DEGENERACY_TOLERANCE) {
        return Err(Error::Degenerate(format!(
            "|Ē_(N-1,1)| = {:e} at ξ = {xi}",
            ebar.norm().to_f64_lossy()
        )));
    }
    Ok(())
}

/// `(C⁻_{1k}(ξ), C⁺_{1k}(ξ))` for `1 ≤ k ≤ N` from the E/F̃ quotient formulas.
pub fn coefficients_c<T: Real>(k: usize, xi: T, params: &LayerParams<T>) -> Result<(Cplx<T>, Cplx<T>)> {
    check_layers(params)?;
    let n = params.n();
    if k == 0 || k > n {
        return Err(Error::IndexOutOfRange {
            what: "layer",
            index: k,
            lo: 1,
            hi: n,
        });
    }
    let c11 = re(params.a(1) / T::TAU());
    let (e1, f1) = ef_recursion(n - 1, 1, params)?;
    let ebar = e1.eval(xi).conj();
    check_denominator(ebar, xi)?;
    if k == 1 {
        return Ok((c11, -c11 * f1.eval(xi) / ebar));
    }
    let lead = re(params.alpha(k)) / lambda_bar_product(1, k - 1, xi, params) * c11 / ebar;
    if k == n {
        return Ok((lead, c(T::zero(), T::zero())));
    }
    let (ek, fk) = ef_recursion(n - 1, k, params)?;
    let phase = cis(-T::lit(2.0) * xi * params.l() * T::from_usize(k - 1) * params.a(k));
    Ok((lead * ek.eval(xi).conj(), -lead * phase * fk.eval(xi)))
}

/// The same coefficients from the transfer matrices directly: `C⁺_{11}` from
/// `C⁺_{1N} = 0`, then `C_{1k} = T̄_{k-1} ⋯ T̄_1 C_{11}`.
pub fn coefficients_c_direct<T: Real>(k: usize, xi: T, params: &LayerParams<T>) -> Result<(Cplx<T>, Cplx<T>)> {
    check_layers(params)?;
    let n = params.n();
    if k == 0 || k > n {
        return Err(Error::IndexOutOfRange {
            what: "layer",
            index: k,
            lo: 1,
            hi: n,
        });
    }
    let c11 = re(params.a(1) / T::TAU());
    let full = chain_product(n - 1, 1, xi, params)?;
    check_denominator(full.at(2, 2), xi)?;
    let c11_plus = -c11 * full.at(2, 1) / full.at(2, 2);
    if k == 1 {
        return Ok((c11, c11_plus));
    }
    let v = chain_product(k - 1, 1, xi, params)?.apply([c11, c11_plus]);
    Ok((v[0], v[1]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use super::super::layers::layer_params;

    #[test]
    fn diagonal_start() {
        let p = layer_params(&[1.0, 2.0, 1.5, 0.7], 1.0).unwrap();
        let (e, f) = ef_recursion(2, 2, &p).unwrap();
        assert_eq!(e.eval(0.4), re(1.0));
        assert_eq!(f.eval(0.4), re(p.gamma(2)));
    }

    #[test]
    fn equal_layers() {
        let p = layer_params(&[2.0; 4], 0.5).unwrap();
        let (e, f) = ef_recursion(3, 1, &p).unwrap();
        assert_eq!(e.len(), 1);
        assert!(f.is_empty());
        let (m, pl) = coefficients_c(1, 0.3, &p).unwrap();
        assert!((m - re(1.0 / std::f64::consts::PI)).norm() < 1e-15);
        assert_eq!(pl.norm(), 0.0);
        let (m4, _) = coefficients_c(4, 0.3, &p).unwrap();
        assert!((m4 - re(2.0 / std::f64::consts::TAU)).norm() < 1e-15);
        assert!((p.alpha(3) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn two_layers_at_zero_frequency() {
        // C⁺_11 = −(1/2π)·γ_1 = 1/(6π)
        let p = layer_params(&[1.0, 2.0], 1.0).unwrap();
        let (_, plus) = coefficients_c(1, 0.0, &p).unwrap();
        let direct = coefficients_c_direct(1, 0.0, &p).unwrap().1;
        let expect = 1.0 / (6.0 * std::f64::consts::PI);
        assert!((plus - re(expect)).norm() < 1e-15);
        assert!((direct - re(expect)).norm() < 1e-15);
    }

    #[test]
    fn three_layer_recursion_by_hand() {
        // E_{2,1} = 1 + γ_2 γ_1 e^{2iξl a_2}
        let p = layer_params(&[1.0, 2.0, 1.0], 1.0).unwrap();
        let (e, f) = ef_recursion(2, 1, &p).unwrap();
        assert!((e.coefficient(&[0]) - re(1.0)).norm() < 1e-15);
        assert!((e.coefficient(&[1]) - re(-1.0 / 9.0)).norm() < 1e-15);
        // F̃_{2,1} = γ_1 + γ_2 e^{-2iξl a_2}
        assert!((f.coefficient(&[0]) - re(-1.0 / 3.0)).norm() < 1e-15);
        assert!((f.coefficient(&[1]) - re(1.0 / 3.0)).norm() < 1e-15);
    }

    #[test]
    fn lemma_and_direct_routes_agree() {
        let p = layer_params(&[1.0, 2.0, 0.5, 1.5, 1.2], 0.8).unwrap();
        for &xi in &[0.0, 0.37, -1.3, 4.1] {
            for k in 1..=5 {
                let (a, b) = coefficients_c(k, xi, &p).unwrap();
                let (ad, bd) = coefficients_c_direct(k, xi, &p).unwrap();
                assert!((a - ad).norm() < 1e-13, "k={k} ξ={xi}");
                assert!((b - bd).norm() < 1e-13, "k={k} ξ={xi}");
            }
        }
    }

    #[test]
    fn out_of_range() {
        let p = layer_params(&[1.0, 2.0], 1.0).unwrap();
        assert!(coefficients_c(3, 0.0, &p).is_err());
        assert!(ef_recursion(1, 2, &p).is_err());
        let single = layer_params(&[1.0], 1.0).unwrap();
        assert!(coefficients_c(1, 0.0, &single).is_err());
    }
}
