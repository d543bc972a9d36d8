use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::cutoff::{CutoffFunction, CutoffKind};
use crate::error::{invalid, Result};
use crate::kernels::{tensor2d_block, tensor2d_kernel, TensorVariant};

const X: [f64; 2] = [1.0, -1.0];
const Y: [f64; 2] = [1.0, 1.0];

/// One tensor kernel evaluated at `L_n(1, -1, 1, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleRow {
    pub variant: TensorVariant,
    pub n: usize,
    pub value: f64,
    /// Asymptotic prediction from the integrals of the cutoff.
    pub reference: f64,
    /// `(value - reference) * n`.
    pub scaled_residual: f64,
    /// `F_n'(1)` of the slice `F_n(x_1) = L_n(x_1, -1, 1, 1)` by spectral differentiation.
    pub slope: Option<f64>,
    /// `F_n'(1)` from the multiplier sum.
    pub slope_closed: Option<f64>,
    /// Asymptotic prediction for `F_n'(1)`.
    pub slope_reference: Option<f64>,
    /// `(slope - slope_reference) / n`.
    pub slope_scaled_residual: Option<f64>,
    /// `max |F_n|` over the Chebyshev sample points.
    pub sup_norm: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleReport {
    pub kind: CutoffKind,
    pub epsilon: f64,
    pub a0: f64,
    /// `int_0^2 a`.
    pub integral: f64,
    /// `int_0^2 t a(t)`.
    pub first_moment: f64,
    pub rows: Vec<CounterexampleRow>,
    pub checks: Vec<CounterexampleCheck>,
}

impl CounterexampleReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn rows_for(&self, variant: TensorVariant) -> impl Iterator<Item = &CounterexampleRow> {
        self.rows.iter().filter(move |r| r.variant == variant)
    }
}

/// `F'(1)` of a polynomial of degree `< nodes` sampled at the Chebyshev–Gauss points.
fn chebyshev_slope(nodes: usize, f: impl Fn(f64) -> f64) -> (f64, f64) {
    let thetas: Vec<f64> = (0..nodes).map(|k| PI * (k as f64 + 0.5) / nodes as f64).collect();
    let vals: Vec<f64> = thetas.iter().map(|t| f(t.cos())).collect();
    let sup = vals.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let slope = (1..nodes)
        .map(|j| {
            let a: f64 = thetas.iter().zip(&vals).map(|(t, v)| v * (j as f64 * t).cos()).sum::<f64>() * 2.0 / nodes as f64;
            a * (j * j) as f64
        })
        .sum();
    (slope, sup)
}

/// Ratios stay within twice the first entry (or a small absolute floor).
fn bounded(values: &[f64]) -> bool {
    let first = values.first().map_or(0.0, |v| v.abs());
    values.iter().all(|v| v.is_finite() && v.abs() <= (2.0 * first).max(1e-6))
}

fn fmt_list(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v:.3e}")).collect::<Vec<_>>().join(", ")
}

/// Evaluates the three tensor kernels at `(1, -1), (1, 1)` and compares them to
/// the closed forms. For band-pass cutoffs the slope `F_n'(1)` is also checked.
pub fn counterexample_suite(cutoff: &CutoffFunction, n_list: &[usize]) -> Result<CounterexampleReport> {
    if n_list.is_empty() || n_list.contains(&0) {
        return invalid("n_list must be non-empty with positive entries");
    }
    let kind = cutoff.spec.kind;
    let band_pass = kind != CutoffKind::TypeA;
    let a0 = cutoff.eval(0.0);
    let integral = cutoff.integrate(|_, a| a);
    let first_moment = cutoff.integrate(|t, a| t * a);
    let mut rows = Vec::new();
    for &n in n_list {
        let mult = cutoff.multipliers(n);
        let nf = n as f64;
        for variant in [TensorVariant::LegLeg, TensorVariant::ChebCheb, TensorVariant::ChebLeg] {
            let value = tensor2d_kernel(&mult, variant, &X, &Y);
            let reference = match variant {
                TensorVariant::LegLeg => nf / 8.0 * integral + a0 / 8.0,
                TensorVariant::ChebCheb => a0 / (PI * PI),
                TensorVariant::ChebLeg => a0 / (4.0 * PI),
            };
            let mut row = CounterexampleRow {
                variant,
                n,
                value,
                reference,
                scaled_residual: (value - reference) * nf,
                slope: None,
                slope_closed: None,
                slope_reference: None,
                slope_scaled_residual: None,
                sup_norm: None,
            };
            if band_pass && variant != TensorVariant::LegLeg {
                let (slope, sup) = chebyshev_slope(2 * n + 4, |x1| tensor2d_kernel(&mult, variant, &[x1, -1.0], &Y));
                let (closed, asym) = match variant {
                    TensorVariant::ChebCheb => (
                        2.0 / (PI * PI) * mult.iter().enumerate().map(|(m, a)| m as f64 * a).sum::<f64>(),
                        2.0 * nf * nf / (PI * PI) * first_moment,
                    ),
                    _ => (
                        2.0 / PI * mult.iter().enumerate().map(|(m, a)| m.div_ceil(2) as f64 / 2.0 * a).sum::<f64>(),
                        nf * nf / (2.0 * PI) * first_moment + nf / (4.0 * PI) * integral,
                    ),
                };
                row.slope = Some(slope);
                row.slope_closed = Some(closed);
                row.slope_reference = Some(asym);
                row.slope_scaled_residual = Some((slope - asym) / nf);
                row.sup_norm = Some(sup);
            }
            rows.push(row);
        }
    }

    let mut checks = Vec::new();
    let top = 40;
    let blocks = |v| tensor2d_block(v, top, &X, &Y);
    let (ll, cc, cl) = (blocks(TensorVariant::LegLeg), blocks(TensorVariant::ChebCheb), blocks(TensorVariant::ChebLeg));
    let mut block_err = 0.0f64;
    for m in 0..=top {
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        block_err = block_err
            .max((ll[m] - (1.0 + sign) / 8.0).abs())
            .max((cc[m] - if m == 0 { 1.0 / (PI * PI) } else { 0.0 }).abs())
            .max((cl[m] - sign / (2.0 * PI)).abs());
    }
    checks.push(CounterexampleCheck {
        name: "block_identities".into(),
        passed: block_err < 1e-10,
        detail: format!("max block error {block_err:.3e} for m <= {top}"),
    });

    let collect = |v: TensorVariant, f: fn(&CounterexampleRow) -> Option<f64>| -> Vec<f64> {
        rows.iter().filter(|r| r.variant == v).filter_map(f).collect()
    };
    let legleg = collect(TensorVariant::LegLeg, |r| Some(r.scaled_residual));
    checks.push(CounterexampleCheck {
        name: "legleg_residual".into(),
        passed: bounded(&legleg),
        detail: format!("(value - n/8 int a - a(0)/8) * n = [{}]", fmt_list(&legleg)),
    });
    let cheb_err = rows
        .iter()
        .filter(|r| r.variant == TensorVariant::ChebCheb)
        .fold(0.0f64, |a, r| a.max((r.value - r.reference).abs()));
    checks.push(CounterexampleCheck {
        name: "chebcheb_value".into(),
        passed: cheb_err < 1e-10,
        detail: format!("max |value - a(0)/pi^2| = {cheb_err:.3e} with a(0) = {a0}"),
    });
    let chebleg = collect(TensorVariant::ChebLeg, |r| Some(r.scaled_residual));
    checks.push(CounterexampleCheck {
        name: "chebleg_residual".into(),
        passed: bounded(&chebleg),
        detail: format!("(value - a(0)/(4 pi)) * n = [{}]", fmt_list(&chebleg)),
    });

    if band_pass {
        for (variant, tag) in [(TensorVariant::ChebCheb, "chebcheb"), (TensorVariant::ChebLeg, "chebleg")] {
            let agree = rows.iter().filter(|r| r.variant == variant).fold(0.0f64, |a, r| {
                let (s, c) = (r.slope.unwrap_or(f64::NAN), r.slope_closed.unwrap_or(f64::NAN));
                a.max((s - c).abs() / c.abs().max(1.0))
            });
            checks.push(CounterexampleCheck {
                name: format!("{tag}_slope_routes"),
                passed: agree < 1e-8,
                detail: format!("spectral vs closed-form F'(1), max relative gap {agree:.3e}"),
            });
            let resid = collect(variant, |r| r.slope_scaled_residual);
            let ratios: Vec<f64> = rows
                .iter()
                .filter(|r| r.variant == variant)
                .map(|r| r.slope.unwrap_or(f64::NAN) / (r.n * r.n) as f64)
                .collect();
            checks.push(CounterexampleCheck {
                name: format!("{tag}_slope_growth"),
                passed: bounded(&resid) && first_moment > 0.0,
                detail: format!(
                    "F'(1)/n^2 = [{}], (F'(1) - reference)/n = [{}], int t a = {first_moment:.6e}",
                    fmt_list(&ratios),
                    fmt_list(&resid)
                ),
            });
        }
    }

    Ok(CounterexampleReport { kind, epsilon: cutoff.spec.epsilon, a0, integral, first_moment, rows, checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cutoff::{assemble_cutoff, CutoffSpec};

    #[test]
    fn slope_of_known_polynomial() {
        // T_3'(1) = 9.
        let (s, sup) = chebyshev_slope(8, |x| 4.0 * x * x * x - 3.0 * x);
        assert!((s - 9.0).abs() < 1e-12);
        assert!(sup <= 1.0 + 1e-12);
    }

    #[test]
    fn type_a_chebcheb_is_constant() {
        let c = assemble_cutoff(&CutoffSpec::new(CutoffKind::TypeA, 1.0)).unwrap();
        let r = counterexample_suite(&c, &[8, 16]).unwrap();
        for row in r.rows_for(TensorVariant::ChebCheb) {
            assert!((row.value - 1.0 / (PI * PI)).abs() < 1e-10);
        }
        assert!(counterexample_suite(&c, &[]).is_err());
    }
}
