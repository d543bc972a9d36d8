use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::{DecayEnvelope, EnvelopeBin};
use crate::cutoff::{assemble_cutoff, CutoffFunction, CutoffKind, CutoffSpec};
use crate::error::{invalid, Error, Result};

fn default_length() -> f64 {
    2048.0
}
fn default_points() -> usize {
    8192
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveletConfig {
    pub epsilon: f64,
    #[serde(default)]
    pub log_depth: Option<usize>,
    /// Length of the periodic `x` window.
    #[serde(default = "default_length")]
    pub length: f64,
    /// Number of samples in the window.
    #[serde(default = "default_points")]
    pub points: usize,
}

impl WaveletConfig {
    pub fn new(epsilon: f64) -> Self {
        Self { epsilon, log_depth: None, length: default_length(), points: default_points() }
    }
}

/// Sampled wavelet with `psi_hat(xi) = a(3 |xi| / (4 pi)) e^{-i xi / 2}`.
#[derive(Debug, Clone)]
pub struct Wavelet {
    pub cutoff: Arc<CutoffFunction>,
    /// Increasing sample positions.
    pub x: Vec<f64>,
    pub psi: Vec<f64>,
    /// `int |psi|^2` from the samples.
    pub energy_space: f64,
    /// `(1 / 2 pi) int |psi_hat|^2 = (4/3) int_0^2 a^2` by quadrature of the cutoff.
    pub energy_frequency: f64,
    pub plancherel_defect: f64,
    /// `int psi` from the samples.
    pub mean: f64,
    /// `max |psi|` over the outer tenth of the window relative to the peak.
    pub boundary_ratio: f64,
    /// `|psi(x)|` against `|x|` in unit-width bins, cut where the samples reach `1e-13` of the peak.
    pub envelope: DecayEnvelope,
}

impl Wavelet {
    /// CSV `x,psi`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,psi\n");
        for (x, p) in self.x.iter().zip(&self.psi) {
            s.push_str(&format!("{x:.6},{p:.15e}\n"));
        }
        s
    }
}

pub fn build_wavelet(cfg: &WaveletConfig) -> Result<Wavelet> {
    let mut spec = CutoffSpec::new(CutoffKind::TypeC, cfg.epsilon);
    if let Some(l) = cfg.log_depth {
        spec = spec.with_log_depth(l);
    }
    let cutoff = Arc::new(assemble_cutoff(&spec)?);
    build_wavelet_from(cutoff, cfg)
}

/// Builds the wavelet from an existing TypeC cutoff.
pub(crate) fn build_wavelet_from(cutoff: Arc<CutoffFunction>, cfg: &WaveletConfig) -> Result<Wavelet> {
    if cutoff.spec.kind != CutoffKind::TypeC {
        return invalid("the wavelet requires a TypeC cutoff");
    }
    let n = cfg.points;
    let len = cfg.length;
    if n < 64 || !(len > 0.0) {
        return invalid("wavelet window needs at least 64 points and positive length");
    }
    let dx = len / n as f64;
    // The top frequency pi/dx must exceed the support edge 8 pi / 3.
    if PI / dx <= 8.0 * PI / 3.0 {
        return Err(Error::GridTooCoarse(format!("sampling step {dx} aliases the wavelet spectrum")));
    }
    let mut buf: Vec<Complex64> = (0..n)
        .map(|k| {
            let kk = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
            let xi = 2.0 * PI * kk / len;
            Complex64::from_polar(cutoff.eval(3.0 * xi.abs() / (4.0 * PI)), -xi / 2.0)
        })
        .collect();
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    // psi(x_i) = (1 / 2 pi) sum_k psi_hat_k e^{i xi_k x_i} d xi with d xi = 2 pi / len.
    let mut pairs: Vec<(f64, f64)> = buf
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let ii = if i < n / 2 { i as f64 } else { i as f64 - n as f64 };
            (ii * dx, c.re / len)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (x, psi): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();

    let peak = psi.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let boundary = x
        .iter()
        .zip(&psi)
        .filter(|(x, _)| x.abs() >= 0.4 * len)
        .fold(0.0f64, |a, (_, v)| a.max(v.abs()));
    let boundary_ratio = boundary / peak;
    if boundary_ratio >= 1e-12 {
        return Err(Error::GridTooCoarse(format!("boundary samples reach {boundary_ratio:.3e} of the peak")));
    }
    let energy_space: f64 = psi.iter().map(|v| v * v).sum::<f64>() * dx;
    let energy_frequency = 4.0 / 3.0 * cutoff.integrate(|_, a| a * a);
    let plancherel_defect = (energy_space - energy_frequency).abs() / energy_frequency;
    let mean: f64 = psi.iter().sum::<f64>() * dx;

    let floor = 1e-13 * peak;
    let reach = x.iter().zip(&psi).filter(|(_, v)| v.abs() >= floor).fold(0.0f64, |a, (x, _)| a.max(x.abs()));
    let bins = (reach.ceil() as usize).max(1);
    let mut env: Vec<EnvelopeBin> = (0..bins)
        .map(|b| EnvelopeBin { rho_lo: b as f64, rho_hi: b as f64 + 1.0, max_abs: 0.0, count: 0 })
        .collect();
    for (xv, v) in x.iter().zip(&psi) {
        let b = xv.abs() as usize;
        if b < bins {
            env[b].max_abs = env[b].max_abs.max(v.abs());
            env[b].count += 1;
        }
    }
    let envelope = DecayEnvelope {
        family: "wavelet".into(),
        n: 1,
        weighted: false,
        lead: 1.0,
        rho_scale: 1.0,
        epsilon: cutoff.spec.epsilon,
        log_depth: cutoff.spec.log_depth,
        bins: env,
    };
    Ok(Wavelet {
        cutoff,
        x,
        psi,
        energy_space,
        energy_frequency,
        plancherel_defect,
        mean,
        boundary_ratio,
        envelope,
    })
}
