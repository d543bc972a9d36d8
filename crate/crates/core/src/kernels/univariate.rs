use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::orthopoly::{jacobi_norms, jacobi_values_into, JacobiParams};
use crate::special::ln_gamma;

/// `F_n(theta) = a(0)/2 + sum_{j >= 1} a(j/n) cos(j theta)`.
pub fn trig_kernel(mult: &[f64], theta: f64) -> f64 {
    let mut s = 0.5 * mult.first().copied().unwrap_or(0.0);
    for (j, &m) in mult.iter().enumerate().skip(1) {
        if m != 0.0 {
            s += m * (j as f64 * theta).cos();
        }
    }
    s
}

/// `sum_j a(j/n) T~_j(x) T~_j(y)` with `T~_0 = pi^{-1/2}`, `T~_j = (2/pi)^{1/2} T_j`.
pub fn chebyshev_kernel(mult: &[f64], x: f64, y: f64) -> f64 {
    let (mut tx0, mut tx1) = (1.0, x);
    let (mut ty0, mut ty1) = (1.0, y);
    let mut s = mult.first().copied().unwrap_or(0.0);
    for (j, &m) in mult.iter().enumerate().skip(1) {
        if j > 1 {
            let nx = 2.0 * x * tx1 - tx0;
            let ny = 2.0 * y * ty1 - ty0;
            tx0 = tx1;
            tx1 = nx;
            ty0 = ty1;
            ty1 = ny;
        }
        s += 2.0 * m * tx1 * ty1;
    }
    s / std::f64::consts::PI
}

/// `sum_j a(j/n) h_j^{-1} P_j(x) P_j(y)`.
pub fn jacobi_kernel(mult: &[f64], p: JacobiParams, x: f64, y: f64) -> f64 {
    if mult.is_empty() {
        return 0.0;
    }
    let top = mult.len() - 1;
    let norms = jacobi_norms(p, top);
    let mut px = Vec::with_capacity(top + 1);
    let mut py = Vec::with_capacity(top + 1);
    jacobi_values_into(p, top, x, &mut px);
    jacobi_values_into(p, top, y, &mut py);
    (0..=top).map(|j| mult[j] * px[j] * py[j] / norms[j]).sum()
}

/// `ln[(2j + a + b + 1) Gamma(j + a + b + 1)]`, with the `j = 0` pole at
/// `a + b + 1 = 0` removed via `(a+b+1) Gamma(a+b+1) = Gamma(a+b+2)`.
fn ln_q_factor(ab: f64, j: usize) -> f64 {
    let jf = j as f64;
    if j == 0 {
        ln_gamma(ab + 2.0)
    } else {
        (2.0 * jf + ab + 1.0).ln() + ln_gamma(jf + ab + 1.0)
    }
}

/// `Q_n(x) = L_n(x, 1)` through the one-sided form with `c* = 2^{-a-b-1} / Gamma(a+1)`.
pub fn jacobi_q(mult: &[f64], p: JacobiParams, x: f64) -> f64 {
    if mult.is_empty() {
        return 0.0;
    }
    let (a, b) = (p.alpha, p.beta);
    let ab = a + b;
    let top = mult.len() - 1;
    let mut px = Vec::with_capacity(top + 1);
    jacobi_values_into(p, top, x, &mut px);
    let ln_cstar = -(ab + 1.0) * std::f64::consts::LN_2 - ln_gamma(a + 1.0);
    (0..=top)
        .filter(|&j| mult[j] != 0.0)
        .map(|j| {
            let c = (ln_cstar + ln_q_factor(ab, j) - ln_gamma(j as f64 + b + 1.0)).exp();
            mult[j] * c * px[j]
        })
        .sum()
}

/// Coefficients `A_k(j)`, `j = 0..=2n`, of the `k`-fold summation-by-parts form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummationByPartsState {
    pub alpha: f64,
    pub beta: f64,
    pub n: usize,
    pub k: usize,
    pub coeffs: Vec<f64>,
}

/// Builds `A_1(t) = a(t/n) - a((t+1)/n)` and applies
/// `A_{k+1}(t) = A_k(t)/(2t+a+b+k+1) - A_k(t+1)/(2t+a+b+k+3)`.
pub fn summation_by_parts_coefficients(
    mult: &[f64],
    p: JacobiParams,
    n: usize,
    k: usize,
) -> Result<SummationByPartsState> {
    if k == 0 || 4 * k > n {
        return invalid(format!("need 1 <= k <= n/4, got k = {k}, n = {n}"));
    }
    let ab = p.alpha + p.beta;
    let len = 2 * n + k + 2;
    let at = |t: usize| mult.get(t).copied().unwrap_or(0.0);
    let mut a: Vec<f64> = (0..len).map(|t| at(t) - at(t + 1)).collect();
    for level in 1..k {
        let lf = level as f64;
        a = (0..len - level)
            .map(|t| {
                let tf = t as f64;
                let next = a.get(t + 1).copied().unwrap_or(0.0);
                a[t] / (2.0 * tf + ab + lf + 1.0) - next / (2.0 * tf + ab + lf + 3.0)
            })
            .collect();
    }
    a.truncate(2 * n + 1);
    Ok(SummationByPartsState { alpha: p.alpha, beta: p.beta, n, k, coeffs: a })
}

/// `c* sum_j A_k(j) Gamma(j+a+b+k+1)/Gamma(j+b+1) P_j^{(a+k, b)}(x)`.
pub fn jacobi_q_summation_by_parts(state: &SummationByPartsState, x: f64) -> f64 {
    let (a, b, k) = (state.alpha, state.beta, state.k as f64);
    let top = state.coeffs.len() - 1;
    let mut px = Vec::with_capacity(top + 1);
    jacobi_values_into(JacobiParams { alpha: a + k, beta: b }, top, x, &mut px);
    let ln_cstar = -(a + b + 1.0) * std::f64::consts::LN_2 - ln_gamma(a + 1.0);
    (0..=top)
        .filter(|&j| state.coeffs[j] != 0.0)
        .map(|j| {
            let jf = j as f64;
            let g = (ln_cstar + ln_gamma(jf + a + b + k + 1.0) - ln_gamma(jf + b + 1.0)).exp();
            state.coeffs[j] * g * px[j]
        })
        .sum()
}

/// `|Q_n^{sbp,k}(x) - Q_n(x)| / max(1, |Q_n(x)|)`.
pub fn verify_summation_by_parts(mult: &[f64], p: JacobiParams, n: usize, k: usize, x: f64) -> Result<f64> {
    let state = summation_by_parts_coefficients(mult, p, n, k)?;
    let direct = jacobi_q(mult, p, x);
    let sbp = jacobi_q_summation_by_parts(&state, x);
    Ok((sbp - direct).abs() / direct.abs().max(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn smooth_mult(n: usize) -> Vec<f64> {
        // A C^1 stand-in for a cutoff: 1 on [0,1], cosine ramp to 0 at 2.
        (0..2 * n)
            .map(|j| {
                let t = j as f64 / n as f64;
                if t <= 1.0 {
                    1.0
                } else {
                    0.5 * (1.0 + (PI * (t - 1.0)).cos())
                }
            })
            .collect()
    }

    #[test]
    fn trig_is_even_and_band_limited() {
        let m = smooth_mult(8);
        assert!((trig_kernel(&m, 0.7) - trig_kernel(&m, -0.7)).abs() < 1e-14);
        // Fourier coefficient at frequency 2n vanishes.
        let pts = 256;
        let c: f64 = (0..pts)
            .map(|i| {
                let th = 2.0 * PI * i as f64 / pts as f64;
                trig_kernel(&m, th) * (16.0 * th).cos()
            })
            .sum::<f64>()
            / pts as f64;
        assert!(c.abs() < 1e-14);
    }

    #[test]
    fn jacobi_chebyshev_specialization() {
        let m = smooth_mult(10);
        let p = JacobiParams::new(-0.5, -0.5).unwrap();
        for &(x, y) in &[(0.3, -0.2), (0.99, 0.95), (-1.0, 1.0)] {
            let a = jacobi_kernel(&m, p, x, y);
            let b = chebyshev_kernel(&m, x, y);
            assert!((a - b).abs() < 1e-9 * b.abs().max(1.0));
        }
    }

    #[test]
    fn q_matches_kernel_at_one() {
        let m = smooth_mult(12);
        for &(a, b) in &[(0.0, 0.0), (2.0, 0.5), (-0.5, -0.5), (1.5, -0.3)] {
            let p = JacobiParams::new(a, b).unwrap();
            for &x in &[-0.9, 0.1, 0.7] {
                let q = jacobi_q(&m, p, x);
                let l = jacobi_kernel(&m, p, x, 1.0);
                assert!((q - l).abs() < 1e-8 * l.abs().max(1.0), "({a},{b}) x={x}: {q} vs {l}");
            }
        }
    }

    #[test]
    fn q_three_term_expansion() {
        // n = 1 with a(0) = a(1) = 1: Q = c* sum_{j<2} (2j+1) P_j for Legendre, c* = 1/2.
        let m = vec![1.0, 1.0];
        let p = JacobiParams::new(0.0, 0.0).unwrap();
        let x: f64 = 0.4;
        let expect = 0.5 * (1.0 + 3.0 * x);
        assert!((jacobi_q(&m, p, x) - expect).abs() < 1e-15);
    }

    #[test]
    fn summation_by_parts_support_and_value() {
        let n = 32;
        let m = smooth_mult(n);
        let p = JacobiParams::new(0.0, 0.0).unwrap();
        let s = summation_by_parts_coefficients(&m, p, n, 2).unwrap();
        for j in 0..=(n / 2 - 2) {
            assert_eq!(s.coeffs[j], 0.0);
        }
        assert!(verify_summation_by_parts(&m, p, n, 1, 0.5).unwrap() < 1e-9);
        assert!(summation_by_parts_coefficients(&m, p, n, 9).is_err());
        assert!(summation_by_parts_coefficients(&m, p, n, 0).is_err());
    }
}
