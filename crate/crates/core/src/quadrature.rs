//! Gauss rules for the Jacobi, Hermite and generalized Laguerre weights.
//!
//! Nodes are eigenvalues of the symmetric Jacobi matrix built from the monic
//! recurrence coefficients. The weights are taken from the Christoffel function
//! `1 / sum_k p_k(x_i)^2` of the orthonormal polynomials, which keeps relative
//! accuracy for tiny tail weights; the classical first-component weights are
//! computed alongside and compared on the bulk of the rule.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::special::{ln_beta, ln_gamma};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "weight", rename_all = "lowercase")]
pub enum WeightId {
    /// `(1-t)^alpha (1+t)^beta` on `[-1, 1]`.
    Jacobi { alpha: f64, beta: f64 },
    /// `exp(-t^2)` on the real line.
    Hermite,
    /// `t^alpha exp(-t)` on `[0, inf)`.
    Laguerre { alpha: f64 },
}

impl WeightId {
    fn validate(&self) -> Result<()> {
        match *self {
            WeightId::Jacobi { alpha, beta } if !(alpha > -1.0 && beta > -1.0) => {
                invalid(format!("Jacobi weight needs alpha, beta > -1, got ({alpha}, {beta})"))
            }
            WeightId::Laguerre { alpha } if !(alpha > -1.0) => {
                invalid(format!("Laguerre weight needs alpha > -1, got {alpha}"))
            }
            _ => Ok(()),
        }
    }

    /// Total mass of the weight.
    pub fn zeroth_moment(&self) -> f64 {
        match *self {
            WeightId::Jacobi { alpha, beta } => {
                ((alpha + beta + 1.0) * std::f64::consts::LN_2 + ln_beta(alpha + 1.0, beta + 1.0)).exp()
            }
            WeightId::Hermite => std::f64::consts::PI.sqrt(),
            WeightId::Laguerre { alpha } => ln_gamma(alpha + 1.0).exp(),
        }
    }

    /// Monic recurrence `p_{k+1} = (x - a_k) p_k - b_k^2 p_{k-1}`; returns
    /// `(a_0..a_{m-1}, b_1..b_{m-1})` with `b_k > 0`.
    pub fn recurrence(&self, m: usize) -> (Vec<f64>, Vec<f64>) {
        let mut diag = Vec::with_capacity(m);
        let mut off = Vec::with_capacity(m.saturating_sub(1));
        match *self {
            WeightId::Jacobi { alpha: a, beta: b } => {
                let ab = a + b;
                for k in 0..m {
                    let kf = k as f64;
                    let v = if k == 0 {
                        (b - a) / (ab + 2.0)
                    } else {
                        let c = 2.0 * kf + ab;
                        (b * b - a * a) / (c * (c + 2.0))
                    };
                    diag.push(v);
                }
                for k in 1..m {
                    let kf = k as f64;
                    let v = if k == 1 {
                        (4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab).powi(2) * (3.0 + ab))).sqrt()
                    } else {
                        let c = 2.0 * kf + ab;
                        (4.0 * kf * (kf + a) * (kf + b) * (kf + ab) / (c * c * (c + 1.0) * (c - 1.0))).sqrt()
                    };
                    off.push(v);
                }
            }
            WeightId::Hermite => {
                diag.resize(m, 0.0);
                off.extend((1..m).map(|k| (k as f64 / 2.0).sqrt()));
            }
            WeightId::Laguerre { alpha } => {
                diag.extend((0..m).map(|k| 2.0 * k as f64 + alpha + 1.0));
                off.extend((1..m).map(|k| (k as f64 * (k as f64 + alpha)).sqrt()));
            }
        }
        (diag, off)
    }

    /// Closed-form monomial moments `int t^k w(t) dt` for `k = 0..=degree`.
    pub fn moments(&self, degree: usize) -> Vec<f64> {
        let mut mu = Vec::with_capacity(degree + 1);
        match *self {
            WeightId::Jacobi { alpha: a, beta: b } => {
                // (k + a + b + 2) mu_{k+1} = k mu_{k-1} + (b - a) mu_k
                mu.push(self.zeroth_moment());
                for k in 0..degree {
                    let kf = k as f64;
                    let prev = if k == 0 { 0.0 } else { mu[k - 1] };
                    mu.push((kf * prev + (b - a) * mu[k]) / (kf + a + b + 2.0));
                }
            }
            WeightId::Hermite => {
                for k in 0..=degree {
                    mu.push(if k % 2 == 1 { 0.0 } else { ln_gamma((k as f64 + 1.0) / 2.0).exp() });
                }
            }
            WeightId::Laguerre { alpha } => {
                for k in 0..=degree {
                    mu.push(ln_gamma(k as f64 + alpha + 1.0).exp());
                }
            }
        }
        mu
    }

    fn contains(&self, x: f64) -> bool {
        match self {
            WeightId::Jacobi { .. } => x > -1.0 && x < 1.0,
            WeightId::Hermite => x.is_finite(),
            WeightId::Laguerre { .. } => x > 0.0 && x.is_finite(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub weight_id: WeightId,
    pub m: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub exactness: usize,
    /// Largest relative gap between the Christoffel weights and the
    /// eigenvector weights over nodes carrying at least `1e-10` of the peak weight.
    pub weight_crosscheck: f64,
}

impl QuadratureRule {
    /// Applies the rule to `f`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    /// CSV with header `node,weight`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("node,weight\n");
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            s.push_str(&format!("{x:.17e},{w:.17e}\n"));
        }
        s
    }

    /// JSON descriptor `{weight, params, m}`.
    pub fn descriptor(&self) -> serde_json::Value {
        let (name, params) = match self.weight_id {
            WeightId::Jacobi { alpha, beta } => ("jacobi", serde_json::json!({"alpha": alpha, "beta": beta})),
            WeightId::Hermite => ("hermite", serde_json::json!({})),
            WeightId::Laguerre { alpha } => ("laguerre", serde_json::json!({"alpha": alpha})),
        };
        serde_json::json!({"weight": name, "params": params, "m": self.m})
    }
}

/// Eigen-decomposition of a symmetric tridiagonal matrix by implicit QL with
/// Wilkinson shifts, tracking only the first row of the eigenvector matrix.
///
/// `d` holds the diagonal, `e[i]` the entry between rows `i` and `i+1`.
/// Returns the eigenvalues and the squared first components.
pub fn tridiagonal_eigen(d: &[f64], e: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = d.len();
    let mut d = d.to_vec();
    let mut e: Vec<f64> = e.iter().copied().chain(std::iter::once(0.0)).take(n).collect();
    let mut z = vec![0.0; n];
    if n > 0 {
        z[0] = 1.0;
    }
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::NoConvergence { index: l });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let zf = z[i + 1];
                z[i + 1] = s * z[i] + c * zf;
                z[i] = c * z[i] - s * zf;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    let z2 = z.iter().map(|v| v * v).collect();
    Ok((d, z2))
}

/// Orthonormal polynomial values `p_0..p_{m-1}` at `x` from the recurrence.
fn orthonormal_values(diag: &[f64], off: &[f64], mu0: f64, x: f64, out: &mut Vec<f64>) {
    out.clear();
    let m = diag.len();
    let mut prev = 0.0;
    let mut cur = 1.0 / mu0.sqrt();
    out.push(cur);
    for k in 0..m.saturating_sub(1) {
        let bprev = if k == 0 { 0.0 } else { off[k - 1] };
        let next = ((x - diag[k]) * cur - bprev * prev) / off[k];
        prev = cur;
        cur = next;
        out.push(cur);
    }
}

/// The `m`-point Gauss rule for `weight_id`.
pub fn gauss_rule(weight_id: WeightId, m: usize) -> Result<QuadratureRule> {
    if m == 0 {
        return invalid("a Gauss rule needs at least one node");
    }
    weight_id.validate()?;
    let (diag, off) = weight_id.recurrence(m);
    let (mut nodes, first) = tridiagonal_eigen(&diag, &off)?;
    let mu0 = weight_id.zeroth_moment();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| nodes[a].total_cmp(&nodes[b]));
    let sorted_nodes: Vec<f64> = order.iter().map(|&i| nodes[i]).collect();
    let gw: Vec<f64> = order.iter().map(|&i| first[i] * mu0).collect();
    nodes = sorted_nodes;

    let mut buf = Vec::with_capacity(m);
    let weights: Vec<f64> = nodes
        .iter()
        .map(|&x| {
            orthonormal_values(&diag, &off, mu0, x, &mut buf);
            1.0 / buf.iter().map(|v| v * v).sum::<f64>()
        })
        .collect();

    let peak = weights.iter().cloned().fold(0.0, f64::max);
    let weight_crosscheck = weights
        .iter()
        .zip(&gw)
        .filter(|(w, _)| **w >= 1e-10 * peak)
        .map(|(w, g)| (w - g).abs() / w)
        .fold(0.0, f64::max);

    for (i, (&x, &w)) in nodes.iter().zip(&weights).enumerate() {
        if !weight_id.contains(x) || !(w > 0.0) || !w.is_finite() {
            return Err(Error::Numerical(format!("rule entry {i} invalid: node {x}, weight {w}")));
        }
        if i > 0 && x <= nodes[i - 1] {
            return Err(Error::Numerical(format!("nodes not strictly increasing at {i}")));
        }
    }
    Ok(QuadratureRule { weight_id, m, nodes, weights, exactness: 2 * m - 1, weight_crosscheck })
}

/// Max relative error of `sum w_i x_i^k` against closed-form moments,
/// `k = 0..=degree`. The error for moment `k` is measured against
/// `max(|M_k|, sum w_i |x_i|^k)` so odd moments that vanish are scaled sensibly.
pub fn verify_exactness(rule: &QuadratureRule, degree: usize) -> Result<f64> {
    if degree > rule.exactness {
        return invalid(format!("degree {degree} exceeds rule exactness {}", rule.exactness));
    }
    let exact = rule.weight_id.moments(degree);
    let mut worst = 0.0f64;
    for (k, &mk) in exact.iter().enumerate() {
        let mut s = 0.0;
        let mut sabs = 0.0;
        for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
            let p = x.powi(k as i32);
            s += w * p;
            sabs += w * p.abs();
        }
        let scale = mk.abs().max(sabs);
        worst = worst.max((s - mk).abs() / scale);
    }
    Ok(worst)
}
