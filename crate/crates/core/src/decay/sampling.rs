use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{fit_bound, BoundFit, BoundForm, DecayEnvelope, EnvelopeBin};
use crate::cutoff::{CutoffFunction, CutoffSpec};
use crate::error::{invalid, Result};
use crate::kernels::{distance, weight_factor, Family, KernelInstance};

fn default_bins() -> usize {
    40
}
fn default_pairs() -> usize {
    200
}
fn default_seed() -> u64 {
    42
}

/// How point pairs are drawn for an envelope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingPlan {
    #[serde(default = "default_bins")]
    pub bins: usize,
    #[serde(default = "default_pairs")]
    pub pairs_per_bin: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Largest distance sampled; defaults to the family's natural range.
    #[serde(default)]
    pub rho_max: Option<f64>,
    /// Multiply `|L(x, y)|` by `sqrt(W(n; x) W(n; y))`.
    #[serde(default)]
    pub weighted: bool,
}

impl Default for SamplingPlan {
    fn default() -> Self {
        Self { bins: default_bins(), pairs_per_bin: default_pairs(), seed: default_seed(), rho_max: None, weighted: false }
    }
}

impl SamplingPlan {
    pub fn weighted(mut self, weighted: bool) -> Self {
        self.weighted = weighted;
        self
    }

    pub fn with_pairs(mut self, pairs: usize) -> Self {
        self.pairs_per_bin = pairs;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Half-width of the sampling box for the unbounded families.
fn box_radius(family: &Family, n: usize) -> f64 {
    let nf = n as f64;
    match family {
        Family::Hermite { .. } => (4.0 * nf + 2.0).sqrt() + 3.0,
        Family::Laguerre { alpha } => (8.0 * nf + 4.0 * alpha.iter().sum::<f64>() + 4.0).sqrt() + 3.0,
        _ => 1.0,
    }
}

fn natural_rho_max(family: &Family, n: usize) -> f64 {
    match family {
        Family::Simplex { .. } => PI / 2.0,
        Family::Hermite { .. } | Family::Laguerre { .. } => box_radius(family, n),
        _ => PI,
    }
}

/// Diagonal growth and distance scale of the family's localization bound.
fn bound_scales(family: &Family, n: usize) -> (f64, f64) {
    let nf = n as f64;
    let d = family.manifold_dim() as i32;
    match family {
        Family::Hermite { dim } => (nf.powf(*dim as f64 / 2.0), nf.sqrt()),
        Family::Laguerre { alpha } => (nf.powf(alpha.len() as f64 / 2.0), nf.sqrt()),
        Family::Trig | Family::Chebyshev | Family::Jacobi { .. } => (nf, nf),
        _ => (nf.powi(d), nf),
    }
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}

/// A unit vector in `R^{k}` together with a unit vector orthogonal to it.
fn frame(rng: &mut ChaCha8Rng, k: usize, positive: bool) -> (Vec<f64>, Vec<f64>) {
    let unit = |v: Vec<f64>| {
        let r = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        v.into_iter().map(|a| a / r).collect::<Vec<f64>>()
    };
    let mut x = unit((0..k).map(|_| normal(rng)).collect());
    if positive {
        x.iter_mut().for_each(|a| *a = a.abs());
    }
    let v: Vec<f64> = (0..k).map(|_| normal(rng)).collect();
    let ip: f64 = x.iter().zip(&v).map(|(a, b)| a * b).sum();
    let v = unit(v.iter().zip(&x).map(|(b, a)| b - ip * a).collect());
    (x, v)
}

/// Rotates `x` towards `+-v` by angle `rho`, keeping the result inside the constraint.
fn geodesic(x: &[f64], v: &[f64], rho: f64, ok: impl Fn(&[f64]) -> bool) -> Option<Vec<f64>> {
    for s in [1.0, -1.0] {
        let y: Vec<f64> = x.iter().zip(v).map(|(a, b)| rho.cos() * a + s * rho.sin() * b).collect();
        if ok(&y) {
            return Some(y);
        }
    }
    None
}

/// Angle pair `(t, t + rho)` in `[0, pi]`, randomly ordered.
fn angle_pair(rng: &mut ChaCha8Rng, rho: f64) -> (f64, f64) {
    let t = rng.gen::<f64>() * (PI - rho).max(0.0);
    if rng.gen::<bool>() {
        (t, t + rho)
    } else {
        (t + rho, t)
    }
}

/// Draws `(x, y)` with `rho(x, y) = rho` (up to round-off); `None` after repeated rejections.
fn sample_pair(family: &Family, n: usize, rho: f64, rng: &mut ChaCha8Rng) -> Option<(Vec<f64>, Vec<f64>)> {
    match family {
        Family::Trig => {
            let t = rng.gen::<f64>() * 2.0 * PI;
            Some((vec![t], vec![t + rho]))
        }
        Family::Chebyshev | Family::Jacobi { .. } => {
            let (a, b) = angle_pair(rng, rho);
            Some((vec![a.cos()], vec![b.cos()]))
        }
        Family::TensorLegendre2d | Family::TensorChebyshev2d | Family::MixedChebLegendre2d => {
            let k = rng.gen_range(0..2);
            let (a, b) = angle_pair(rng, rho);
            let t = rng.gen::<f64>() * PI;
            let u = (t + rho * (2.0 * rng.gen::<f64>() - 1.0)).clamp(0.0, PI);
            let mut x = vec![t.cos(); 2];
            let mut y = vec![u.cos(); 2];
            x[k] = a.cos();
            y[k] = b.cos();
            Some((x, y))
        }
        Family::Sphere { dim } => {
            let (x, v) = frame(rng, dim + 1, false);
            let y = geodesic(&x, &v, rho, |_| true)?;
            Some((x, y))
        }
        Family::Ball { dim, .. } => {
            for _ in 0..100 {
                let (mut x, v) = frame(rng, dim + 1, false);
                x[*dim] = x[*dim].abs();
                // Re-orthogonalize after the reflection.
                let ip: f64 = x.iter().zip(&v).map(|(a, b)| a * b).sum();
                let v: Vec<f64> = v.iter().zip(&x).map(|(b, a)| b - ip * a).collect();
                let r = v.iter().map(|a| a * a).sum::<f64>().sqrt();
                let v: Vec<f64> = v.iter().map(|a| a / r).collect();
                if let Some(y) = geodesic(&x, &v, rho, |y| y[*dim] >= 0.0) {
                    return Some((x[..*dim].to_vec(), y[..*dim].to_vec()));
                }
            }
            None
        }
        Family::Simplex { kappa } => {
            let k = kappa.len();
            for _ in 0..400 {
                let (x, v) = frame(rng, k, true);
                if let Some(y) = geodesic(&x, &v, rho, |y| y.iter().all(|&a| a >= 0.0)) {
                    let sq = |p: &[f64]| p[..k - 1].iter().map(|a| a * a).collect::<Vec<f64>>();
                    return Some((sq(&x), sq(&y)));
                }
            }
            None
        }
        Family::Hermite { dim } => box_pair(rng, *dim, -box_radius(family, n), box_radius(family, n), rho),
        Family::Laguerre { alpha } => box_pair(rng, alpha.len(), 0.0, box_radius(family, n), rho),
    }
}

/// Pair in the box `[lo, hi]^d` at max-norm distance `rho`.
fn box_pair(rng: &mut ChaCha8Rng, d: usize, lo: f64, hi: f64, rho: f64) -> Option<(Vec<f64>, Vec<f64>)> {
    if rho > hi - lo {
        return None;
    }
    let k = rng.gen_range(0..d);
    let x: Vec<f64> = (0..d)
        .map(|i| if i == k { lo + rng.gen::<f64>() * (hi - lo - rho) } else { lo + rng.gen::<f64>() * (hi - lo) })
        .collect();
    let y: Vec<f64> = (0..d)
        .map(|i| if i == k { x[i] + rho } else { (x[i] + rho * (2.0 * rng.gen::<f64>() - 1.0)).clamp(lo, hi) })
        .collect();
    Some(if rng.gen::<bool>() { (x, y) } else { (y, x) })
}

/// Binned maxima of `|L_n(x, y)|` over stratified random pairs.
///
/// Each bin draws its pairs from its own ChaCha8 stream, so results do not depend on
/// thread scheduling and a larger `pairs_per_bin` extends the same sample. Every 16th
/// pair of the first bin is a diagonal pair.
pub fn measure_envelope(kernel: &KernelInstance, plan: &SamplingPlan) -> Result<DecayEnvelope> {
    if plan.bins < 40 || plan.pairs_per_bin < 200 {
        return invalid(format!(
            "sampling plan needs at least 40 bins and 200 pairs per bin, got {} and {}",
            plan.bins, plan.pairs_per_bin
        ));
    }
    let family = &kernel.family;
    let n = kernel.n;
    let rho_max = plan.rho_max.unwrap_or_else(|| natural_rho_max(family, n));
    if !(rho_max > 0.0) {
        return invalid("rho_max must be positive");
    }
    let width = rho_max / plan.bins as f64;
    let bins: Vec<Result<EnvelopeBin>> = (0..plan.bins)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
            rng.set_stream(b as u64);
            let lo = b as f64 * width;
            let mut bin = EnvelopeBin { rho_lo: lo, rho_hi: lo + width, max_abs: 0.0, count: 0 };
            for i in 0..plan.pairs_per_bin {
                let rho = if b == 0 && i % 16 == 0 { 0.0 } else { lo + rng.gen::<f64>() * width };
                let Some((x, y)) = sample_pair(family, n, rho, &mut rng) else { continue };
                let r = distance(family, &x, &y)?;
                if r < lo - 1e-9 || r > lo + width + 1e-9 {
                    continue;
                }
                let mut v = kernel.eval(&x, &y)?.abs();
                if plan.weighted {
                    v *= (weight_factor(family, n, &x)? * weight_factor(family, n, &y)?).sqrt();
                }
                bin.max_abs = bin.max_abs.max(v);
                bin.count += 1;
            }
            Ok(bin)
        })
        .collect();
    let (lead, rho_scale) = bound_scales(family, n);
    Ok(DecayEnvelope {
        family: family.tag(),
        n,
        weighted: plan.weighted,
        lead,
        rho_scale,
        epsilon: kernel.cutoff.spec.epsilon,
        log_depth: kernel.cutoff.spec.log_depth,
        bins: bins.into_iter().collect::<Result<_>>()?,
    })
}

/// One row of a cutoff comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffComparison {
    pub cutoff: CutoffSpec,
    pub fit: BoundFit,
}

/// Sub-exponential fits at a common `epsilon` for several cutoffs under one sampling plan.
pub fn compare_cutoffs(
    family: &Family,
    n: usize,
    cutoffs: &[Arc<CutoffFunction>],
    epsilon: f64,
    plan: &SamplingPlan,
) -> Result<Vec<CutoffComparison>> {
    if cutoffs.len() < 2 {
        return invalid("comparison needs at least two cutoffs");
    }
    let form = BoundForm::SubExponential { epsilon, log_depth: 1 };
    cutoffs
        .iter()
        .map(|c| {
            let k = KernelInstance::new(family.clone(), c.clone(), n)?;
            let env = measure_envelope(&k, plan)?;
            Ok(CutoffComparison { cutoff: c.spec, fit: fit_bound(&env, form)? })
        })
        .collect()
}

/// Spread of the diagonal `|L_n(x, x)|` over positions, raw and weighted by `W(n; x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformityReport {
    pub points: usize,
    /// `max / min` of `|L_n(x, x)|`.
    pub raw_ratio: f64,
    /// `max / min` of `|L_n(x, x)| W(n; x)`.
    pub weighted_ratio: f64,
}

/// Diagonal values at `x = cos(pi i / (points - 1))` for the interval families.
pub fn diagonal_uniformity(kernel: &KernelInstance, points: usize) -> Result<UniformityReport> {
    if !matches!(kernel.family, Family::Chebyshev | Family::Jacobi { .. }) {
        return invalid("diagonal uniformity is defined for the interval families");
    }
    if points < 2 {
        return invalid("need at least two positions");
    }
    let mut raw = Vec::with_capacity(points);
    let mut weighted = Vec::with_capacity(points);
    for i in 0..points {
        let x = [(PI * i as f64 / (points - 1) as f64).cos()];
        let v = kernel.eval(&x, &x)?.abs();
        raw.push(v);
        weighted.push(v * weight_factor(&kernel.family, kernel.n, &x)?);
    }
    let ratio = |v: &[f64]| v.iter().cloned().fold(0.0, f64::max) / v.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(UniformityReport { points, raw_ratio: ratio(&raw), weighted_ratio: ratio(&weighted) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cutoff::{assemble_cutoff, CutoffKind};

    fn type_a() -> Arc<CutoffFunction> {
        Arc::new(assemble_cutoff(&CutoffSpec::new(CutoffKind::TypeA, 1.0).with_m_max(4096).with_grid(8192)).unwrap())
    }

    #[test]
    fn pairs_hit_requested_distance() {
        let fams = [
            Family::Trig,
            Family::Jacobi { alpha: 1.0, beta: 0.0 },
            Family::TensorLegendre2d,
            Family::Sphere { dim: 2 },
            Family::Ball { mu: 1.0, dim: 2 },
            Family::Simplex { kappa: vec![0.5; 3] },
            Family::Hermite { dim: 2 },
            Family::Laguerre { alpha: vec![0.0] },
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for f in &fams {
            for &rho in &[0.0, 0.3, 1.2] {
                let (x, y) = sample_pair(f, 8, rho, &mut rng).unwrap();
                let r = distance(f, &x, &y).unwrap();
                assert!((r - rho).abs() < 1e-7, "{}: {r} vs {rho}", f.tag());
            }
        }
    }

    #[test]
    fn envelope_is_deterministic_and_contains_diagonal() {
        let k = KernelInstance::new(Family::Chebyshev, type_a(), 16).unwrap();
        let plan = SamplingPlan::default();
        let e1 = measure_envelope(&k, &plan).unwrap();
        let e2 = measure_envelope(&k, &plan).unwrap();
        assert_eq!(e1, e2);
        let n = 16.0;
        let peak = e1.bins[0].max_abs;
        assert!(peak >= n / PI && peak <= 3.0 * n, "{peak}");
        assert!(e1.bins.iter().all(|b| b.max_abs >= 0.0));
    }

    #[test]
    fn more_pairs_only_raise_maxima() {
        let k = KernelInstance::new(Family::Chebyshev, type_a(), 32).unwrap();
        let a = measure_envelope(&k, &SamplingPlan::default()).unwrap();
        let b = measure_envelope(&k, &SamplingPlan::default().with_pairs(400)).unwrap();
        for (x, y) in a.bins.iter().zip(&b.bins) {
            assert!(y.max_abs >= x.max_abs);
        }
    }

    #[test]
    fn rejects_thin_plans() {
        let k = KernelInstance::new(Family::Chebyshev, type_a(), 8).unwrap();
        let plan = SamplingPlan { bins: 10, ..SamplingPlan::default() };
        assert!(measure_envelope(&k, &plan).is_err());
    }
}
