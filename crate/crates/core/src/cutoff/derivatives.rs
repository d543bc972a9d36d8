use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::{CutoffFunction, CutoffKind};
use crate::error::{invalid, Result};

/// Estimate of `sup |a^(k)|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivativeEstimate {
    pub k: usize,
    /// Spectral differentiation of the grid samples.
    pub spectral: f64,
    /// Richardson-extrapolated central finite differences.
    pub finite_difference: f64,
    /// Both estimators agree within 5%.
    pub reliable: bool,
}

/// `c (c/eps)^k k^k (ln max(k, 3))^{k(1+eps)}` with `c = 88`.
pub fn derivative_bound(epsilon: f64, k: usize) -> f64 {
    let c = 88.0;
    let kf = k as f64;
    c * (c / epsilon).powf(kf) * kf.powf(kf) * (kf.max(3.0).ln()).powf(kf * (1.0 + epsilon))
}

/// Central difference of order `k` at `t` with step `h` (second-order accurate).
fn central_difference(f: &CutoffFunction, k: usize, t: f64, h: f64) -> f64 {
    let mut binom = 1.0;
    let mut acc = 0.0;
    for i in 0..=k {
        let x = t + (k as f64 / 2.0 - i as f64) * h;
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * binom * f.eval(x);
        binom = binom * (k - i) as f64 / (i + 1) as f64;
    }
    acc / h.powi(k as i32)
}

fn spectral_norms(f: &CutoffFunction, k_max: usize) -> Vec<f64> {
    // Even extension to [-2, 2), which is smooth and periodic for every cutoff type.
    let grid: Vec<f64> = f.grid_samples().map(|(_, v)| v).collect();
    let g = grid.len() - 1;
    let n = 2 * g;
    let mut buf: Vec<Complex64> = (0..n)
        .map(|i| {
            let j = if i <= g { g - i } else { i - g };
            Complex64::new(grid[j], 0.0)
        })
        .collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);
    let peak = buf.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let floor = 1e-13 * peak;
    let cutoff = (0..=n / 2)
        .rev()
        .find(|&k| buf[k].norm() >= floor || buf[(n - k) % n].norm() >= floor)
        .unwrap_or(0);
    let period = 4.0;
    let inverse = planner.plan_fft_inverse(n);
    (0..=k_max)
        .map(|order| {
            let mut d: Vec<Complex64> = (0..n)
                .map(|k| {
                    let kk = if k <= n / 2 { k as i64 } else { k as i64 - n as i64 };
                    if kk.unsigned_abs() as usize > cutoff || (order % 2 == 1 && k == n / 2) {
                        return Complex64::new(0.0, 0.0);
                    }
                    let xi = 2.0 * std::f64::consts::PI * kk as f64 / period;
                    buf[k] * Complex64::new(0.0, xi).powu(order as u32)
                })
                .collect();
            inverse.process(&mut d);
            d.iter().map(|c| c.re.abs()).fold(0.0, f64::max) / n as f64
        })
        .collect()
}

fn finite_difference_norm(f: &CutoffFunction, k: usize) -> f64 {
    if k == 0 {
        return f.grid_samples().map(|(_, v)| v.abs()).fold(0.0, f64::max);
    }
    let h = 0.04 / (1.0 + k as f64) * f.spec.epsilon.max(0.25);
    let stride = 4;
    let dt = f.dt();
    let pts = (2.0 / (stride as f64 * dt)) as usize;
    let mut best = 0.0f64;
    for i in 0..=pts {
        let t = i as f64 * stride as f64 * dt;
        let d1 = central_difference(f, k, t, h);
        let d2 = central_difference(f, k, t, h / 2.0);
        best = best.max(((4.0 * d2 - d1) / 3.0).abs());
    }
    best
}

/// `sup |a^(k)|` for `k = 0..=k_max` by two independent estimators.
pub fn estimate_derivative_norms(f: &CutoffFunction, k_max: usize) -> Result<Vec<DerivativeEstimate>> {
    if k_max > 10 {
        return invalid(format!("derivative norms are only reported up to k = 10, got {k_max}"));
    }
    let spectral = spectral_norms(f, k_max);
    Ok((0..=k_max)
        .map(|k| {
            let fd = finite_difference_norm(f, k);
            let s = spectral[k];
            let gap = (s - fd).abs() / s.max(fd).max(f64::MIN_POSITIVE);
            DerivativeEstimate { k, spectral: s, finite_difference: fd, reliable: gap <= 0.05 }
        })
        .collect())
}

/// `max |sum_nu a(2^{-nu} t)^2 - 1|` over a dense geometric grid of `[t_lo, t_hi]`.
pub fn check_partition_of_unity(f: &CutoffFunction, t_lo: f64, t_hi: f64) -> Result<f64> {
    if f.spec.kind != CutoffKind::TypeC {
        return invalid("partition check requires TypeC");
    }
    if !(t_lo >= 1.0 && t_hi >= t_lo) {
        return invalid(format!("need 1 <= t_lo <= t_hi, got [{t_lo}, {t_hi}]"));
    }
    let (l0, l1) = (t_lo.log2(), t_hi.log2());
    let points = (((l1 - l0) * 20_000.0) as usize).max(1000);
    let mut worst = 0.0f64;
    for i in 0..=points {
        let t = (l0 + (l1 - l0) * i as f64 / points as f64).exp2();
        let top = t.log2().ceil() as i32 + 1;
        let mut s = 0.0;
        for nu in (top - 4).max(0)..=top {
            s += f.eval(t * (-nu as f64).exp2()).powi(2);
        }
        worst = worst.max((s - 1.0).abs());
    }
    Ok(worst)
}

/// `|a^(k)(1)|` for `k = 1..=k_max` by central differences with step `h`.
pub fn check_derivatives_vanish_at_one(f: &CutoffFunction, k_max: usize, h: f64) -> Vec<f64> {
    (1..=k_max).map(|k| central_difference(f, k, 1.0, h).abs()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cutoff::{assemble_cutoff, CutoffSpec};

    #[test]
    fn bound_values() {
        let b = derivative_bound(1.0, 3);
        let expect = 88.0 * 88f64.powi(3) * 27.0 * 3f64.ln().powi(6);
        assert!((b / expect - 1.0).abs() < 1e-12);
    }

    #[test]
    fn partition_rejects_type_a() {
        let a = assemble_cutoff(&CutoffSpec::new(CutoffKind::TypeA, 1.0).with_m_max(512).with_grid(4096)).unwrap();
        let err = check_partition_of_unity(&a, 1.0, 4.0).unwrap_err();
        assert!(err.to_string().contains("partition check requires TypeC"));
    }

    #[test]
    fn dyadic_points_have_two_terms() {
        let c = assemble_cutoff(&CutoffSpec::new(CutoffKind::TypeC, 1.0).with_m_max(512).with_grid(4096)).unwrap();
        for m in 0..10 {
            let t = 2f64.powi(m);
            let nonzero = (0..40).filter(|&nu| c.eval(t * 2f64.powi(-nu)) != 0.0).count();
            assert!(nonzero <= 2);
        }
    }
}
