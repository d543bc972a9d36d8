use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::orthopoly::{hermite_values_into, jacobi_values_into, laguerre_values_into, JacobiParams, LaguerreKind};

/// `out[j] = sum_{i+k=j} a[i] b[k]` truncated to `a.len()`.
fn convolve_truncated(a: &[f64], b: &[f64]) -> Vec<f64> {
    (0..a.len()).map(|j| (0..=j).map(|i| a[i] * b[j - i]).sum()).collect()
}

/// Degree blocks `H_j(x, y) = sum_{|nu| = j} prod_i u_i[nu_i]` from per-coordinate tables.
fn composition_blocks(tables: &[Vec<f64>]) -> Vec<f64> {
    let mut acc = tables[0].clone();
    for t in &tables[1..] {
        acc = convolve_truncated(&acc, t);
    }
    acc
}

fn pair_table(top: usize, x: f64, y: f64, mut fill: impl FnMut(f64, &mut Vec<f64>)) -> Vec<f64> {
    let mut a = Vec::with_capacity(top + 1);
    let mut b = Vec::with_capacity(top + 1);
    fill(x, &mut a);
    fill(y, &mut b);
    a.iter().zip(&b).map(|(u, v)| u * v).collect()
}

fn weighted_sum(mult: &[f64], blocks: &[f64]) -> f64 {
    mult.iter().zip(blocks).map(|(m, b)| m * b).sum()
}

/// `sum_j a(j/n) H_j(x, y)` with `H_j` the degree-`j` block of tensor Hermite functions.
pub fn hermite_kernel(mult: &[f64], x: &[f64], y: &[f64]) -> f64 {
    if mult.is_empty() {
        return 0.0;
    }
    let top = mult.len() - 1;
    let tables: Vec<Vec<f64>> =
        x.iter().zip(y).map(|(&a, &b)| pair_table(top, a, b, |t, out| hermite_values_into(top, t, out))).collect();
    weighted_sum(mult, &composition_blocks(&tables))
}

/// `sum_j a(j/n) F_j^alpha(x, y)` with tensor F-type Laguerre functions.
pub fn laguerre_kernel(mult: &[f64], alpha: &[f64], x: &[f64], y: &[f64]) -> f64 {
    if mult.is_empty() {
        return 0.0;
    }
    let top = mult.len() - 1;
    let tables: Vec<Vec<f64>> = alpha
        .iter()
        .zip(x.iter().zip(y))
        .map(|(&al, (&a, &b))| pair_table(top, a, b, |t, out| laguerre_values_into(al, top, t, LaguerreKind::F, out)))
        .collect();
    weighted_sum(mult, &composition_blocks(&tables))
}

/// `L_0^a(t) e^{-t/2} .. L_top^a(t) e^{-t/2}` for the classical Laguerre polynomials.
fn laguerre_classical_scaled(a: f64, top: usize, t: f64) -> Vec<f64> {
    const RESCALE: f64 = 1e150;
    let mut out = Vec::with_capacity(top + 1);
    let mut log_scale = -t / 2.0;
    let (mut prev, mut cur) = (0.0, 1.0);
    out.push(log_scale.exp());
    for k in 0..top {
        let kf = k as f64;
        let next = ((2.0 * kf + a + 1.0 - t) * cur - (kf + a) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE {
            cur /= RESCALE;
            prev /= RESCALE;
            log_scale += RESCALE.ln();
        }
        out.push(cur * log_scale.exp());
    }
    out
}

/// Auxiliary kernel `K(t) = sum_{m < 2n} Delta^{k+1} a(m/n) L_m^{|alpha|+k+d}(t) e^{-t/2}`
/// with `Delta f(m) = f(m) - f(m+1)`; `n = mult.len() / 2`, `d = alpha.len()`.
pub fn laguerre_k_kernel(mult: &[f64], alpha: &[f64], k: usize, t: f64) -> Result<f64> {
    let n = mult.len() / 2;
    if n == 0 || 4 * k > n {
        return invalid(format!("need 0 <= k <= n/4, got k = {k}, n = {n}"));
    }
    if !(t >= 0.0) {
        return invalid(format!("t must be non-negative, got {t}"));
    }
    let order = alpha.iter().sum::<f64>() + k as f64 + alpha.len() as f64;
    let diffs = forward_differences(mult, k + 1);
    let vals = laguerre_classical_scaled(order, diffs.len().saturating_sub(1), t);
    Ok(weighted_sum(&diffs, &vals))
}

/// `Delta^r a(m/n)` for `m = 0..2n`, with samples beyond the multiplier table taken as 0.
pub(crate) fn forward_differences(mult: &[f64], r: usize) -> Vec<f64> {
    let at = |i: usize| mult.get(i).copied().unwrap_or(0.0);
    let mut binom = vec![1.0f64];
    for _ in 0..r {
        let mut next = vec![1.0; binom.len() + 1];
        for i in 1..binom.len() {
            next[i] = binom[i - 1] + binom[i];
        }
        binom = next;
    }
    (0..mult.len())
        .map(|m| {
            binom
                .iter()
                .enumerate()
                .map(|(i, c)| if i % 2 == 0 { c * at(m + i) } else { -c * at(m + i) })
                .sum()
        })
        .collect()
}

/// The two-variable tensor systems on `[-1, 1]^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TensorVariant {
    /// Orthonormal Legendre in both variables.
    LegLeg,
    /// Orthonormal Chebyshev in both variables.
    ChebCheb,
    /// Orthonormal Chebyshev in `x_1`, orthonormal Legendre in `x_2`.
    ChebLeg,
}

fn legendre_normalized(top: usize, t: f64, out: &mut Vec<f64>) {
    jacobi_values_into(JacobiParams { alpha: 0.0, beta: 0.0 }, top, t, out);
    for (j, v) in out.iter_mut().enumerate() {
        *v *= (j as f64 + 0.5).sqrt();
    }
}

fn chebyshev_normalized(top: usize, t: f64, out: &mut Vec<f64>) {
    out.clear();
    let pi = std::f64::consts::PI;
    let (mut a, mut b) = (1.0, t);
    for j in 0..=top {
        let v = match j {
            0 => 1.0,
            1 => t,
            _ => {
                let c = 2.0 * t * b - a;
                a = b;
                b = c;
                c
            }
        };
        out.push(if j == 0 { (1.0 / pi).sqrt() * v } else { (2.0 / pi).sqrt() * v });
    }
}

/// Degree blocks `P~_0(x, y) .. P~_top(x, y)` of the tensor system.
pub fn tensor2d_block(variant: TensorVariant, top: usize, x: &[f64], y: &[f64]) -> Vec<f64> {
    let (first, second): (fn(usize, f64, &mut Vec<f64>), fn(usize, f64, &mut Vec<f64>)) = match variant {
        TensorVariant::LegLeg => (legendre_normalized, legendre_normalized),
        TensorVariant::ChebCheb => (chebyshev_normalized, chebyshev_normalized),
        TensorVariant::ChebLeg => (chebyshev_normalized, legendre_normalized),
    };
    let a = pair_table(top, x[0], y[0], |t, out| first(top, t, out));
    let b = pair_table(top, x[1], y[1], |t, out| second(top, t, out));
    convolve_truncated(&a, &b)
}

/// `sum_m a(m/n) P~_m(x, y)` for the tensor system.
pub fn tensor2d_kernel(mult: &[f64], variant: TensorVariant, x: &[f64], y: &[f64]) -> f64 {
    if mult.is_empty() {
        return 0.0;
    }
    weighted_sum(mult, &tensor2d_block(variant, mult.len() - 1, x, y))
}
