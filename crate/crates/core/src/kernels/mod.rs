//! Localized kernels `L_n(x, y) = sum_j a(j/n) P_j(x, y)` for the classical
//! orthogonal systems, the associated metrics and weight factors.
//!
//! Every family is evaluated from the multiplier sequence `a(j/n)`, `j < 2n`,
//! so the same routines serve both cutoff kernels and needlet level kernels.

mod geometry;
mod product;
mod univariate;

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use geometry::{ball_kernel, simplex_kernel, sphere_kernel, AuxIntegral};
pub use product::{
    hermite_kernel, laguerre_k_kernel, laguerre_kernel, tensor2d_kernel, tensor2d_block, TensorVariant,
};
pub use univariate::{
    chebyshev_kernel, jacobi_kernel, jacobi_q, jacobi_q_summation_by_parts, summation_by_parts_coefficients,
    trig_kernel, verify_summation_by_parts, SummationByPartsState,
};

use crate::cutoff::CutoffFunction;
use crate::error::{invalid, Error, Result};
use crate::orthopoly::JacobiParams;

/// Orthogonal system a kernel is built from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    Trig,
    Chebyshev,
    Jacobi { alpha: f64, beta: f64 },
    /// Unit sphere `S^dim` in `R^{dim+1}`.
    Sphere { dim: usize },
    Ball { mu: f64, dim: usize },
    /// Simplex `T^d` with `d = kappa.len() - 1`.
    Simplex { kappa: Vec<f64> },
    Hermite { dim: usize },
    /// `R_+^d` with `d = alpha.len()`.
    Laguerre { alpha: Vec<f64> },
    TensorLegendre2d,
    TensorChebyshev2d,
    MixedChebLegendre2d,
}

impl Family {
    pub fn validate(&self) -> Result<()> {
        match self {
            Family::Jacobi { alpha, beta } => JacobiParams::new(*alpha, *beta).map(|_| ()),
            Family::Sphere { dim } if *dim < 2 => invalid(format!("sphere kernel needs d >= 2, got {dim}")),
            Family::Ball { mu, dim } => {
                if !(*mu > 0.0) {
                    invalid(format!("ball kernel needs mu > 0, got {mu}"))
                } else if *dim == 0 {
                    invalid("ball dimension must be positive")
                } else {
                    Ok(())
                }
            }
            Family::Simplex { kappa } => {
                let d = kappa.len().saturating_sub(1);
                if !(1..=2).contains(&d) {
                    invalid(format!("simplex kernel supports d in {{1, 2}}, got {d}"))
                } else if kappa.iter().any(|&k| !(k >= 0.0)) {
                    invalid("simplex parameters must be non-negative")
                } else {
                    Ok(())
                }
            }
            Family::Hermite { dim } if !(1..=3).contains(dim) => {
                invalid(format!("Hermite kernel supports d in {{1, 2, 3}}, got {dim}"))
            }
            Family::Laguerre { alpha } => {
                if !(1..=2).contains(&alpha.len()) {
                    invalid(format!("Laguerre kernel supports d in {{1, 2}}, got {}", alpha.len()))
                } else if alpha.iter().any(|&a| !(a >= 0.0)) {
                    invalid("Laguerre parameters must be non-negative")
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    /// Number of coordinates of a point.
    pub fn point_dim(&self) -> usize {
        match self {
            Family::Trig | Family::Chebyshev | Family::Jacobi { .. } => 1,
            Family::Sphere { dim } => dim + 1,
            Family::Ball { dim, .. } => *dim,
            Family::Simplex { kappa } => kappa.len() - 1,
            Family::Hermite { dim } => *dim,
            Family::Laguerre { alpha } => alpha.len(),
            Family::TensorLegendre2d | Family::TensorChebyshev2d | Family::MixedChebLegendre2d => 2,
        }
    }

    /// Intrinsic dimension, the exponent in the diagonal growth `n^d`.
    pub fn manifold_dim(&self) -> usize {
        match self {
            Family::Sphere { dim } => *dim,
            _ => self.point_dim(),
        }
    }

    /// Short identifier used in file names and CSV columns.
    pub fn tag(&self) -> String {
        match self {
            Family::Trig => "trig".into(),
            Family::Chebyshev => "chebyshev".into(),
            Family::Jacobi { alpha, beta } => format!("jacobi({alpha},{beta})"),
            Family::Sphere { dim } => format!("sphere{dim}"),
            Family::Ball { mu, dim } => format!("ball{dim}(mu={mu})"),
            Family::Simplex { kappa } => format!("simplex{}({kappa:?})", kappa.len() - 1),
            Family::Hermite { dim } => format!("hermite{dim}"),
            Family::Laguerre { alpha } => format!("laguerre{}({alpha:?})", alpha.len()),
            Family::TensorLegendre2d => "legleg".into(),
            Family::TensorChebyshev2d => "chebcheb".into(),
            Family::MixedChebLegendre2d => "chebleg".into(),
        }
    }

    /// Whether distances are scaled by `sqrt(n)` rather than `n` in the decay bounds.
    pub fn is_unbounded(&self) -> bool {
        matches!(self, Family::Hermite { .. } | Family::Laguerre { .. })
    }

    /// Checks that `x` lies in the domain.
    pub fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.point_dim() {
            return Err(Error::Domain(format!(
                "{} expects {} coordinates, got {}",
                self.tag(),
                self.point_dim(),
                x.len()
            )));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("non-finite coordinate".into()));
        }
        let bad = |msg: String| Err(Error::Domain(msg));
        match self {
            Family::Chebyshev
            | Family::Jacobi { .. }
            | Family::TensorLegendre2d
            | Family::TensorChebyshev2d
            | Family::MixedChebLegendre2d => {
                if x.iter().any(|v| v.abs() > 1.0) {
                    return bad(format!("{x:?} is outside [-1, 1]^d"));
                }
            }
            Family::Sphere { .. } => {
                let r: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                if (r - 1.0).abs() > 1e-10 {
                    return bad(format!("{x:?} is not a unit vector"));
                }
            }
            Family::Ball { .. } => {
                if x.iter().map(|v| v * v).sum::<f64>() > 1.0 + 1e-12 {
                    return bad(format!("{x:?} is outside the unit ball"));
                }
            }
            Family::Simplex { .. } => {
                if x.iter().any(|&v| v < -1e-14) || x.iter().sum::<f64>() > 1.0 + 1e-12 {
                    return bad(format!("{x:?} is outside the simplex"));
                }
            }
            Family::Laguerre { .. } => {
                if x.iter().any(|&v| v < 0.0) {
                    return bad(format!("{x:?} has a negative coordinate"));
                }
            }
            Family::Trig | Family::Hermite { .. } => {}
        }
        Ok(())
    }
}

/// `arccos` with arguments within `1e-12` of `[-1, 1]` clamped; larger violations error.
pub fn safe_acos(c: f64) -> Result<f64> {
    if c.abs() > 1.0 + 1e-12 || c.is_nan() {
        return Err(Error::Domain(format!("arccos argument {c} is outside [-1, 1]")));
    }
    Ok(c.clamp(-1.0, 1.0).acos())
}

fn simplex_slack(x: &[f64]) -> f64 {
    (1.0 - x.iter().sum::<f64>()).max(0.0)
}

/// The metric `rho(x, y)` of the family.
pub fn distance(family: &Family, x: &[f64], y: &[f64]) -> Result<f64> {
    family.check_point(x)?;
    family.check_point(y)?;
    let pi = std::f64::consts::PI;
    Ok(match family {
        Family::Trig => {
            let d = (x[0] - y[0]).rem_euclid(2.0 * pi);
            d.min(2.0 * pi - d)
        }
        Family::Chebyshev | Family::Jacobi { .. } => (safe_acos(x[0])? - safe_acos(y[0])?).abs(),
        Family::TensorLegendre2d | Family::TensorChebyshev2d | Family::MixedChebLegendre2d => {
            let a = (safe_acos(x[0])? - safe_acos(y[0])?).abs();
            let b = (safe_acos(x[1])? - safe_acos(y[1])?).abs();
            a.max(b)
        }
        Family::Sphere { .. } => safe_acos(x.iter().zip(y).map(|(a, b)| a * b).sum())?,
        Family::Ball { .. } => {
            let ip: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
            let rx = (1.0 - x.iter().map(|v| v * v).sum::<f64>()).max(0.0).sqrt();
            let ry = (1.0 - y.iter().map(|v| v * v).sum::<f64>()).max(0.0).sqrt();
            safe_acos(ip + rx * ry)?
        }
        Family::Simplex { .. } => {
            let s: f64 = x.iter().zip(y).map(|(a, b)| (a.max(0.0) * b.max(0.0)).sqrt()).sum::<f64>()
                + (simplex_slack(x) * simplex_slack(y)).sqrt();
            safe_acos(s)?
        }
        Family::Hermite { .. } | Family::Laguerre { .. } => {
            x.iter().zip(y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
        }
    })
}

/// The family's weight factor `W(n; x)`; envelopes are divided by `sqrt(W(x) W(y))`.
pub fn weight_factor(family: &Family, n: usize, x: &[f64]) -> Result<f64> {
    family.check_point(x)?;
    if n == 0 {
        return invalid("n must be positive");
    }
    let nf = n as f64;
    let jac = |a: f64, b: f64, t: f64| (1.0 - t + nf.powi(-2)).powf(a + 0.5) * (1.0 + t + nf.powi(-2)).powf(b + 0.5);
    Ok(match family {
        Family::Trig | Family::Chebyshev | Family::Sphere { .. } | Family::Hermite { .. } | Family::TensorChebyshev2d => {
            1.0
        }
        Family::Jacobi { alpha, beta } => jac(*alpha, *beta, x[0]),
        Family::TensorLegendre2d => jac(0.0, 0.0, x[0]) * jac(0.0, 0.0, x[1]),
        Family::MixedChebLegendre2d => jac(0.0, 0.0, x[1]),
        Family::Ball { mu, .. } => {
            let r = (1.0 - x.iter().map(|v| v * v).sum::<f64>()).max(0.0).sqrt();
            (r + 1.0 / nf).powf(2.0 * mu)
        }
        Family::Simplex { kappa } => {
            let last = simplex_slack(x);
            x.iter()
                .chain(std::iter::once(&last))
                .zip(kappa)
                .map(|(&xi, &k)| (xi.max(0.0) + nf.powi(-2)).powf(k))
                .product()
        }
        Family::Laguerre { alpha } => {
            x.iter().zip(alpha).map(|(&xi, &a)| (xi + nf.powf(-0.5)).powf(2.0 * a + 1.0)).product()
        }
    })
}

/// A family, a cutoff and a degree parameter: the evaluable kernel `L_n`.
#[derive(Debug, Clone)]
pub struct KernelInstance {
    pub family: Family,
    pub cutoff: Arc<CutoffFunction>,
    pub n: usize,
    /// `a(j/n)` for `j = 0..2n`.
    pub multipliers: Vec<f64>,
}

impl KernelInstance {
    pub fn new(family: Family, cutoff: Arc<CutoffFunction>, n: usize) -> Result<Self> {
        family.validate()?;
        if n == 0 {
            return invalid("n must be positive");
        }
        let multipliers = cutoff.multipliers(n);
        Ok(Self { family, cutoff, n, multipliers })
    }

    /// `L_n(x, y)`.
    pub fn eval(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        self.family.check_point(x)?;
        self.family.check_point(y)?;
        let m = &self.multipliers;
        Ok(match &self.family {
            Family::Trig => trig_kernel(m, x[0] - y[0]),
            Family::Chebyshev => chebyshev_kernel(m, x[0], y[0]),
            Family::Jacobi { alpha, beta } => jacobi_kernel(m, JacobiParams { alpha: *alpha, beta: *beta }, x[0], y[0]),
            Family::Sphere { dim } => sphere_kernel(m, *dim, x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>().clamp(-1.0, 1.0))?,
            Family::Ball { mu, dim } => ball_kernel(m, *mu, *dim, x, y)?.value,
            Family::Simplex { kappa } => simplex_kernel(m, kappa, x, y)?.value,
            Family::Hermite { .. } => hermite_kernel(m, x, y),
            Family::Laguerre { alpha } => laguerre_kernel(m, alpha, x, y),
            Family::TensorLegendre2d => tensor2d_kernel(m, TensorVariant::LegLeg, x, y),
            Family::TensorChebyshev2d => tensor2d_kernel(m, TensorVariant::ChebCheb, x, y),
            Family::MixedChebLegendre2d => tensor2d_kernel(m, TensorVariant::ChebLeg, x, y),
        })
    }

    /// JSON descriptor mirroring the instance fields.
    pub fn descriptor(&self) -> serde_json::Value {
        serde_json::json!({
            "family": self.family,
            "cutoff": self.cutoff.spec,
            "n": self.n,
        })
    }

    /// Evaluates all pairs in parallel and renders the grid CSV
    /// `x_1..x_d, y_1..y_d, rho, value`.
    pub fn grid_csv(&self, pairs: &[(Vec<f64>, Vec<f64>)]) -> Result<String> {
        let rows: Vec<Result<(f64, f64)>> = pairs
            .par_iter()
            .map(|(x, y)| Ok((distance(&self.family, x, y)?, self.eval(x, y)?)))
            .collect();
        let d = self.family.point_dim();
        let mut s = String::new();
        let head: Vec<String> = (1..=d)
            .map(|i| format!("x{i}"))
            .chain((1..=d).map(|i| format!("y{i}")))
            .chain(["rho".to_string(), "value".to_string()])
            .collect();
        s.push_str(&head.join(","));
        s.push('\n');
        for ((x, y), row) in pairs.iter().zip(rows) {
            let (rho, v) = row?;
            for c in x.iter().chain(y) {
                s.push_str(&format!("{c:.12},"));
            }
            s.push_str(&format!("{rho:.12},{v:.15e}\n"));
        }
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distances() {
        assert!((distance(&Family::Chebyshev, &[1.0], &[-1.0]).unwrap() - std::f64::consts::PI).abs() < 1e-15);
        let fams = [
            (Family::Chebyshev, vec![0.3]),
            (Family::Sphere { dim: 2 }, vec![0.6, 0.0, 0.8]),
            (Family::Ball { mu: 1.0, dim: 2 }, vec![0.2, -0.5]),
            (Family::Simplex { kappa: vec![0.5; 3] }, vec![0.2, 0.3]),
            (Family::Hermite { dim: 2 }, vec![0.2, -1.0]),
            (Family::Laguerre { alpha: vec![0.0] }, vec![1.5]),
        ];
        for (f, x) in fams {
            assert!(distance(&f, &x, &x).unwrap().abs() < 1e-7, "{}", f.tag());
        }
    }

    #[test]
    fn acos_clamping() {
        assert_eq!(safe_acos(1.0 + 1e-13).unwrap(), 0.0);
        assert!(safe_acos(1.0 + 1e-9).is_err());
    }

    #[test]
    fn weight_factor_examples() {
        let w = weight_factor(&Family::Jacobi { alpha: -0.5, beta: -0.5 }, 10, &[0.3]).unwrap();
        assert!((w - 1.0).abs() < 1e-15);
        let w = weight_factor(&Family::Ball { mu: 1.5, dim: 2 }, 4, &[0.0, 0.0]).unwrap();
        assert!((w - 1.25f64.powf(3.0)).abs() < 1e-14);
        let w = weight_factor(&Family::Laguerre { alpha: vec![0.0] }, 4, &[0.0]).unwrap();
        assert!((w - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_invalid_families() {
        assert!(Family::Sphere { dim: 1 }.validate().is_err());
        assert!(Family::Ball { mu: 0.0, dim: 2 }.validate().is_err());
        assert!(Family::Simplex { kappa: vec![0.5; 4] }.validate().is_err());
        assert!(Family::Simplex { kappa: vec![-0.5, 1.0] }.validate().is_err());
        assert!(Family::Hermite { dim: 4 }.validate().is_err());
        assert!(Family::Laguerre { alpha: vec![0.0; 3] }.validate().is_err());
    }
}
