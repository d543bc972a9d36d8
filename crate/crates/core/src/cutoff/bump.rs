use std::sync::Arc;

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::{spec_delta_sequence, CutoffSpec, DeltaSchedule};
use crate::error::{Error, Result};
use crate::interp::UniformSamples;

/// Truncated infinite convolution `h = chi_{d_0} * ... * chi_{d_m}` and its
/// distribution function, sampled on one period of a periodic grid.
#[derive(Debug, Clone)]
pub struct BumpFunction {
    pub epsilon: f64,
    pub log_depth: usize,
    pub delta_sequence: Arc<Vec<f64>>,
    /// `sum_j d_j`: `h` vanishes outside `[-support, support]`.
    pub support: f64,
    /// Dilation `s` in `h_eps(t) = s h(s t)`.
    pub scale: f64,
    /// `h` on `[-P/2, P/2)`.
    pub density: UniformSamples,
    /// `H(u) = int_{-inf}^u h`.
    pub cdf: UniformSamples,
    /// `dx * sum h` (the trapezoid rule is exact for this band-limited sampling).
    pub total_mass: f64,
}

const INTERP_DEGREE: usize = 7;
/// Below this argument `ln sinc` is summed from its power series.
const SERIES_SWITCH: f64 = 0.1;

impl BumpFunction {
    /// `h(u)`.
    pub fn h(&self, u: f64) -> f64 {
        if u.abs() >= self.support {
            return 0.0;
        }
        self.density.eval(u, INTERP_DEGREE).max(0.0)
    }

    /// `H(u)`, clamped to `[0, 1]`.
    pub fn cdf(&self, u: f64) -> f64 {
        if u <= -self.support {
            return 0.0;
        }
        if u >= self.support {
            return 1.0;
        }
        self.cdf.eval(u, INTERP_DEGREE).clamp(0.0, 1.0)
    }

    /// `h_eps(t) = s h(s t)`.
    pub fn h_eps(&self, t: f64) -> f64 {
        self.scale * self.h(self.scale * t)
    }

    /// `g(t) = (pi/2) int_{-inf}^t h_eps`.
    pub fn g(&self, t: f64) -> f64 {
        std::f64::consts::FRAC_PI_2 * self.cdf(self.scale * t)
    }

    /// Largest sample of `h_eps`.
    pub fn max_h_eps(&self) -> f64 {
        self.scale * self.density.values.iter().cloned().fold(0.0, f64::max)
    }
}

/// Fourier transform of `h`: `prod_j sinc(d_j xi)`.
struct SincProduct {
    /// Entries sorted in decreasing order.
    deltas: Vec<f64>,
    /// `tail[k][i] = sum_{j >= i} d_j^{2k+2}` for `k = 0..4`.
    tail: [Vec<f64>; 4],
}

impl SincProduct {
    fn new(deltas: &[f64]) -> Self {
        let mut deltas = deltas.to_vec();
        deltas.sort_by(|a, b| b.total_cmp(a));
        let n = deltas.len();
        let mut tail: [Vec<f64>; 4] = std::array::from_fn(|_| vec![0.0; n + 1]);
        for (k, t) in tail.iter_mut().enumerate() {
            let p = 2 * k as i32 + 2;
            for i in (0..n).rev() {
                t[i] = t[i + 1] + deltas[i].powi(p);
            }
        }
        Self { deltas, tail }
    }

    fn eval(&self, xi: f64) -> f64 {
        let xi = xi.abs();
        if xi == 0.0 {
            return 1.0;
        }
        let mut prod = 1.0;
        let mut i = 0;
        while i < self.deltas.len() && self.deltas[i] * xi >= SERIES_SWITCH {
            let x = self.deltas[i] * xi;
            prod *= x.sin() / x;
            if prod.abs() < 1e-300 {
                return 0.0;
            }
            i += 1;
        }
        // ln(sin x / x) = -x^2/6 - x^4/180 - x^6/2835 - x^8/37800 - ...
        let x2 = xi * xi;
        let coeffs = [1.0 / 6.0, 1.0 / 180.0, 1.0 / 2835.0, 1.0 / 37800.0];
        let mut log_tail = 0.0;
        let mut xp = x2;
        for (k, c) in coeffs.iter().enumerate() {
            log_tail -= c * xp * self.tail[k][i];
            xp *= x2;
        }
        prod * log_tail.exp()
    }
}

/// Builds `h` for `spec` by inverse FFT of the sinc product.
pub fn build_bump(spec: &CutoffSpec) -> Result<BumpFunction> {
    spec.validate()?;
    let deltas = spec_delta_sequence(spec)?;
    let support: f64 = deltas.iter().sum();
    let scale = match (spec.schedule, spec.log_depth) {
        (DeltaSchedule::SmallDerivative, 1) => 8.0 / spec.epsilon,
        _ => (8.0 / spec.epsilon).max(2.0 * support),
    };
    let mut b = realize(&deltas, scale, spec.grid)?;
    b.epsilon = spec.epsilon;
    b.log_depth = spec.log_depth;
    Ok(b)
}

/// Samples `h` and `H` for an explicit width sequence on `4 * grid` points.
fn realize(deltas: &[f64], scale: f64, grid: usize) -> Result<BumpFunction> {
    let support: f64 = deltas.iter().sum();
    let n = (4 * grid).next_power_of_two();
    let period = 2.4 * support;
    let dx = period / n as f64;
    let dxi = 2.0 * std::f64::consts::PI / period;
    let sinc = SincProduct::new(deltas);

    let half = n / 2;
    let spectrum: Vec<f64> = (0..=half).map(|k| sinc.eval(k as f64 * dxi)).collect();
    if spectrum[half].abs() > 1e-14 {
        return Err(Error::GridTooCoarse(format!(
            "transform of h is {:.3e} at the Nyquist frequency",
            spectrum[half]
        )));
    }

    // Grid u_i = -P/2 + i dx, so exp(i xi_k u_i) = (-1)^k exp(2 pi i k i / N).
    let mut dens = vec![Complex64::new(0.0, 0.0); n];
    let mut prim = vec![Complex64::new(0.0, 0.0); n];
    for k in 0..n {
        let kk = if k <= half { k as i64 } else { k as i64 - n as i64 };
        let hk = spectrum[kk.unsigned_abs() as usize];
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        dens[k] = Complex64::new(sign * hk, 0.0);
        if kk != 0 && k != half {
            let xi = kk as f64 * dxi;
            // hk / (i xi)
            prim[k] = Complex64::new(0.0, -sign * hk / xi);
        }
    }
    let mut planner = FftPlanner::new();
    let ifft = planner.plan_fft_inverse(n);
    ifft.process(&mut dens);
    ifft.process(&mut prim);

    let x0 = -period / 2.0;
    let density: Vec<f64> = dens.iter().map(|c| c.re / period).collect();
    let cdf: Vec<f64> = prim
        .iter()
        .enumerate()
        .map(|(i, c)| (i as f64 * dx) / period + c.re / period)
        .collect();

    let peak = density.iter().cloned().fold(0.0, f64::max);
    let boundary = density[..8].iter().chain(&density[n - 8..]).fold(0.0f64, |m, v| m.max(v.abs()));
    if boundary > 1e-12 * peak {
        return Err(Error::GridTooCoarse(format!(
            "boundary samples of h reach {boundary:.3e} against peak {peak:.3e}"
        )));
    }
    let total_mass = dx * density.iter().sum::<f64>();

    Ok(BumpFunction {
        epsilon: 0.0,
        log_depth: 0,
        delta_sequence: Arc::new(deltas.to_vec()),
        support,
        scale,
        density: UniformSamples::new(x0, dx, density),
        cdf: UniformSamples::new(x0, dx, cdf),
        total_mass,
    })
}
