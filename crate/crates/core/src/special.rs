//! Special functions used by the basis: log-gamma, Jacobi and associated
//! Laguerre polynomials.

use crate::error::{Error, Result};

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::GammaDomain(x));
    }
    Ok(statrs::function::gamma::ln_gamma(x))
}

/// `ln(n!)`.
pub fn ln_factorial(n: u32) -> f64 {
    statrs::function::factorial::ln_factorial(n as u64)
}

/// Jacobi polynomial `P_n^{(α,β)}(z)` from the three-term recurrence.
pub fn jacobi(n: u32, alpha: f64, beta: f64, z: f64) -> f64 {
    let mut p_prev = 1.0;
    if n == 0 {
        return p_prev;
    }
    let mut p = 0.5 * (alpha - beta) + 0.5 * (alpha + beta + 2.0) * z;
    let ab = alpha + beta;
    for k in 2..=n {
        let k = k as f64;
        let c = 2.0 * k + ab;
        let a1 = 2.0 * k * (k + ab) * (c - 2.0);
        let a2 = (c - 1.0) * (alpha * alpha - beta * beta);
        let a3 = (c - 2.0) * (c - 1.0) * c;
        let a4 = 2.0 * (k + alpha - 1.0) * (k + beta - 1.0) * c;
        let next = ((a2 + a3 * z) * p - a4 * p_prev) / a1;
        p_prev = p;
        p = next;
    }
    p
}

/// Associated Laguerre polynomial `L_n^{(α)}(x)`.
pub fn laguerre(n: u32, alpha: f64, x: f64) -> f64 {
    let mut l_prev = 1.0;
    if n == 0 {
        return l_prev;
    }
    let mut l = 1.0 + alpha - x;
    for k in 1..n {
        let k = k as f64;
        let next = ((2.0 * k + 1.0 + alpha - x) * l - (k + alpha) * l_prev) / (k + 1.0);
        l_prev = l;
        l = next;
    }
    l
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn ln_gamma_rejects_non_positive() {
        assert!(matches!(ln_gamma(0.0), Err(Error::GammaDomain(_))));
        assert!(matches!(ln_gamma(-1.5), Err(Error::GammaDomain(_))));
        assert_relative_eq!(ln_gamma(5.0).unwrap(), 24f64.ln(), epsilon = 1e-13);
        assert_relative_eq!(
            ln_gamma(0.5).unwrap(),
            0.5 * std::f64::consts::PI.ln(),
            epsilon = 1e-13
        );
    }

    #[test]
    fn jacobi_low_orders() {
        // P_2^{(0,0)} is the Legendre polynomial (3z^2 - 1)/2.
        for &z in &[-0.7, 0.0, 0.3, 0.9] {
            assert_relative_eq!(jacobi(2, 0.0, 0.0, z), 1.5 * z * z - 0.5, epsilon = 1e-14);
        }
        // P_n^{(a,b)}(1) = binom(n + a, n)
        let (a, b) = (2.5, 1.25);
        let expected = (3.0 + a) * (2.0 + a) * (1.0 + a) / 6.0;
        assert_relative_eq!(jacobi(3, a, b, 1.0), expected, epsilon = 1e-12);
    }

    #[test]
    fn laguerre_low_orders() {
        let x = 0.8;
        assert_relative_eq!(laguerre(1, 2.0, x), 3.0 - x);
        assert_relative_eq!(
            laguerre(2, 1.0, x),
            0.5 * (x * x - 6.0 * x + 6.0),
            epsilon = 1e-14
        );
        assert_relative_eq!(laguerre(0, 3.0, x), 1.0);
    }
}
