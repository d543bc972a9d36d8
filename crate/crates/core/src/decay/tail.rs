use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::RATE_CAP;
use crate::cutoff::CutoffFunction;
use crate::error::{invalid, Result};
use crate::kernels::{Family, KernelInstance};

/// `M(x) = max_y |L_n(x, y)|` for `x` beyond the tail threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailProfile {
    pub n: usize,
    pub threshold: f64,
    /// `(x, M(x))`.
    pub samples: Vec<(f64, f64)>,
}

fn profile(kernel: &KernelInstance, threshold: f64, y_lo: f64, points: usize) -> Result<TailProfile> {
    if points < 2 {
        return invalid("need at least two tail points");
    }
    let span = 8.0;
    let ys: Vec<f64> = (0..=800).map(|i| y_lo + (threshold + span - y_lo) * i as f64 / 800.0).collect();
    let samples = (0..points)
        .into_par_iter()
        .map(|i| {
            let x = threshold + span * i as f64 / (points - 1) as f64;
            let mut m = 0.0f64;
            for &y in &ys {
                m = m.max(kernel.eval(&[x], &[y])?.abs());
            }
            Ok((x, m))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TailProfile { n: kernel.n, threshold, samples })
}

/// Hermite (`d = 1`) tail for `x >= sqrt(8n + 2)`, maximized over `|y| <= x_max`.
pub fn hermite_tail_profile(cutoff: Arc<CutoffFunction>, n: usize, points: usize) -> Result<TailProfile> {
    let k = KernelInstance::new(Family::Hermite { dim: 1 }, cutoff, n)?;
    let x0 = (8.0 * n as f64 + 2.0).sqrt();
    profile(&k, x0, -(x0 + 8.0), points)
}

/// Laguerre (`d = 1`) tail for `x >= sqrt(12n + 3 alpha + 3)`, maximized over `0 <= y <= x_max`.
pub fn laguerre_tail_profile(cutoff: Arc<CutoffFunction>, alpha: f64, n: usize, points: usize) -> Result<TailProfile> {
    let k = KernelInstance::new(Family::Laguerre { alpha: vec![alpha] }, cutoff, n)?;
    let x0 = (12.0 * n as f64 + 3.0 * alpha + 3.0).sqrt();
    profile(&k, x0, 0.0, points)
}

/// Common Gaussian tail bound `M_n(x) <= c exp(-c'' x^2)` over several `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    /// Fitted `c''`; `None` when no positive grid rate qualifies.
    pub c_rate: Option<f64>,
    /// `ln c` with `c = max_n c_n`.
    pub ln_c: f64,
    /// `(n, ln c_n)` at the fitted rate.
    pub per_n: Vec<(usize, f64)>,
}

/// Picks the largest `c''` on a geometric grid in `[1e-4, 2]` such that the constant
/// needed for larger `n` stays within [`RATE_CAP`] of the one needed for the smallest `n`.
pub fn fit_tail(profiles: &[TailProfile]) -> Result<TailFit> {
    if profiles.is_empty() || profiles.iter().any(|p| p.samples.is_empty()) {
        return invalid("tail fit needs non-empty profiles");
    }
    let mut sorted: Vec<&TailProfile> = profiles.iter().collect();
    sorted.sort_by_key(|p| p.n);
    let ln_cn = |p: &TailProfile, r: f64| {
        p.samples
            .iter()
            .filter(|s| s.1 > 0.0)
            .map(|&(x, m)| m.ln() + r * x * x)
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let needed = |r: f64| -> Vec<(usize, f64)> { sorted.iter().map(|p| (p.n, ln_cn(p, r))).collect() };
    let ok = |v: &[(usize, f64)]| v.iter().all(|&(_, l)| l <= v[0].1 + RATE_CAP.ln());
    let k = 400;
    let grid = (0..k).map(|i| 1e-4 * (2.0f64 / 1e-4).powf(i as f64 / (k - 1) as f64));
    let best = grid.filter(|&r| ok(&needed(r))).fold(None, |_, r| Some(r));
    let rate = best.unwrap_or(0.0);
    let per_n = needed(rate);
    let ln_c = per_n.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    Ok(TailFit { c_rate: best, ln_c, per_n })
}
