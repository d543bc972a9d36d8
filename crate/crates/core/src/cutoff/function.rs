use std::sync::Arc;

use super::{build_bump, BumpFunction, CutoffKind, CutoffSpec};
use crate::error::Result;
use crate::interp::UniformSamples;

/// Extra samples kept on each side of `[0, 2]` so interpolation stencils stay centered.
const PAD: usize = 8;

/// A sampled admissible cutoff `a(t)` on `[0, 2]`.
#[derive(Debug, Clone)]
pub struct CutoffFunction {
    pub spec: CutoffSpec,
    pub interpolation_degree: usize,
    samples: UniformSamples,
    bump: Arc<BumpFunction>,
}

impl CutoffFunction {
    /// `a(t)`; evenly extended to `t < 0` and zero for `t >= 2`.
    pub fn eval(&self, t: f64) -> f64 {
        let t = t.abs();
        if t >= 2.0 {
            return 0.0;
        }
        match self.spec.kind {
            CutoffKind::TypeA if t <= 1.0 => return 1.0,
            CutoffKind::TypeB | CutoffKind::TypeC if t <= 0.5 => return 0.0,
            _ => {}
        }
        self.samples.eval(t, self.interpolation_degree).clamp(0.0, 1.0)
    }

    /// Grid spacing on `[0, 2]`.
    pub fn dt(&self) -> f64 {
        self.samples.dx
    }

    /// `(t_i, a(t_i))` for the `grid + 1` nodes of `[0, 2]`.
    pub fn grid_samples(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let dt = self.samples.dx;
        self.samples.values[PAD..self.samples.values.len() - PAD]
            .iter()
            .enumerate()
            .map(move |(i, &v)| (i as f64 * dt, v))
    }

    pub fn bump(&self) -> &BumpFunction {
        &self.bump
    }

    /// `int_0^2 h(t, a(t)) dt` by composite 8-point Gauss-Legendre on 256 panels.
    pub fn integrate(&self, h: impl Fn(f64, f64) -> f64) -> f64 {
        const X: [f64; 4] = [0.1834346424956498, 0.5255324099163290, 0.7966664774136267, 0.9602898564975363];
        const W: [f64; 4] = [0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763];
        let panels = 256;
        let step = 2.0 / panels as f64;
        let mut s = 0.0;
        for k in 0..panels {
            let c = (k as f64 + 0.5) * step;
            for (x, w) in X.iter().zip(&W) {
                for t in [c - x * step / 2.0, c + x * step / 2.0] {
                    s += w * step / 2.0 * h(t, self.eval(t));
                }
            }
        }
        s
    }

    /// `int_0^2 t^p a(t) dt`.
    pub fn moment(&self, p: i32) -> f64 {
        self.integrate(|t, a| t.powi(p) * a)
    }

    /// CSV with header `t,ahat`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,ahat\n");
        for (t, v) in self.grid_samples() {
            s.push_str(&format!("{t:.10},{v:.17e}\n"));
        }
        s
    }

    /// Multipliers `a(j/n)` for `j = 0..2n` (the last one always vanishes).
    pub fn multipliers(&self, n: usize) -> Vec<f64> {
        (0..2 * n).map(|j| self.eval(j as f64 / n as f64)).collect()
    }
}

/// Builds the bump and assembles the cutoff of `spec.kind`.
///
/// With `phi = sin g`: type a is `(2/pi) g(3/2 - t)`; types b and c use
/// `phi(2t - 3/2)` on `[1/2, 1]` and `phi(3/2 - t)` on `(1, 2]`.
pub fn assemble_cutoff(spec: &CutoffSpec) -> Result<CutoffFunction> {
    let bump = build_bump(spec)?;
    let grid = spec.grid;
    let dt = 2.0 / grid as f64;
    let values: Vec<f64> = (0..grid + 1 + 2 * PAD)
        .map(|i| {
            let t = (i as f64 - PAD as f64) * dt;
            raw_value(&bump, spec.kind, t.abs())
        })
        .collect();
    Ok(CutoffFunction {
        spec: *spec,
        interpolation_degree: 7,
        samples: UniformSamples::new(-(PAD as f64) * dt, dt, values),
        bump: Arc::new(bump),
    })
}

fn raw_value(bump: &BumpFunction, kind: CutoffKind, t: f64) -> f64 {
    let phi = |s: f64| bump.g(s).sin();
    match kind {
        CutoffKind::TypeA => {
            if t >= 2.0 {
                0.0
            } else {
                bump.cdf(bump.scale * (1.5 - t))
            }
        }
        CutoffKind::TypeB | CutoffKind::TypeC => {
            if t < 0.5 || t >= 2.0 {
                0.0
            } else if t <= 1.0 {
                phi(2.0 * t - 1.5)
            } else {
                phi(1.5 - t)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(kind: CutoffKind, eps: f64) -> CutoffFunction {
        assemble_cutoff(&CutoffSpec::new(kind, eps).with_m_max(4096).with_grid(4096)).unwrap()
    }

    #[test]
    fn type_a_shape() {
        let a = small(CutoffKind::TypeA, 1.0);
        assert!((a.eval(0.7) - 1.0).abs() < 1e-9);
        assert_eq!(a.eval(2.0), 0.0);
        assert!(a.eval(1.5) > 0.4 && a.eval(1.5) < 0.6);
        assert!(a.grid_samples().all(|(_, v)| (0.0..=1.0).contains(&v)));
    }

    #[test]
    fn type_c_shape() {
        let c = small(CutoffKind::TypeC, 1.0);
        assert_eq!(c.eval(0.49), 0.0);
        assert_eq!(c.eval(2.01), 0.0);
        let s = c.eval(1.3).powi(2) + c.eval(0.65).powi(2);
        assert!((s - 1.0).abs() < 1e-8);
        assert!((c.eval(1.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn moments_of_type_a() {
        let a = small(CutoffKind::TypeA, 1.0);
        // a = 1 on [0,1], a(t) + a(3 - t) = 1 on [1, 2], so int a = 1.5.
        assert!((a.moment(0) - 1.5).abs() < 1e-10);
    }
}
