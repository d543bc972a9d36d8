use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::orthopoly::{gegenbauer_all, jacobi_values_into, JacobiParams};
use crate::quadrature::{gauss_rule, WeightId};
use crate::special::{ln_gamma, sphere_area};

/// Result of an auxiliary integral evaluated by adaptive doubling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuxIntegral {
    pub value: f64,
    /// Number of nodes per auxiliary variable in the final rule.
    pub order: usize,
    /// The last doubling changed the value by less than `1e-9` (relative to `max(1, |value|)`).
    pub converged: bool,
}

const AUX_TOL: f64 = 1e-9;

/// `sum_j a(j/n) (j + lambda)/lambda C_j^lambda(t)`.
fn gegenbauer_q(mult: &[f64], lambda: f64, t: f64) -> Result<f64> {
    if mult.is_empty() {
        return Ok(0.0);
    }
    let c = gegenbauer_all(lambda, mult.len() - 1, t.clamp(-1.0, 1.0))?;
    Ok(mult
        .iter()
        .zip(&c.values)
        .enumerate()
        .map(|(j, (m, v))| m * (j as f64 + lambda) / lambda * v)
        .sum())
}

/// Sphere kernel `sum_j a(j/n) (j+lambda)/(lambda omega_d) C_j^lambda(cos)`, `lambda = (d-1)/2`.
pub fn sphere_kernel(mult: &[f64], dim: usize, cosine: f64) -> Result<f64> {
    if dim < 2 {
        return invalid(format!("sphere kernel needs d >= 2, got {dim}"));
    }
    let lambda = (dim as f64 - 1.0) / 2.0;
    Ok(gegenbauer_q(mult, lambda, cosine)? / sphere_area(dim))
}

/// Normalized symmetric Gauss-Jacobi rule for `(1-u^2)^{kappa-1}`, or the two-point
/// rule at `u = +-1` when `kappa = 0`.
fn aux_rule(kappa: f64, m: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if kappa == 0.0 {
        return Ok((vec![-1.0, 1.0], vec![0.5, 0.5]));
    }
    let r = gauss_rule(WeightId::Jacobi { alpha: kappa - 1.0, beta: kappa - 1.0 }, m)?;
    let mass: f64 = r.weights.iter().sum();
    Ok((r.nodes, r.weights.into_iter().map(|w| w / mass).collect()))
}

/// Runs `eval(order)` for `order = start, 2 start, ...` until two successive values agree.
fn adaptive(start: usize, max_order: usize, mut eval: impl FnMut(usize) -> Result<f64>) -> Result<AuxIntegral> {
    let mut order = start;
    let mut prev = eval(order)?;
    while order * 2 <= max_order {
        order *= 2;
        let cur = eval(order)?;
        if (cur - prev).abs() <= AUX_TOL * cur.abs().max(1.0) {
            return Ok(AuxIntegral { value: cur, order, converged: true });
        }
        prev = cur;
    }
    Ok(AuxIntegral { value: prev, order, converged: false })
}

fn norm_sq(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

/// Ball kernel for the normalized weight `(1 - |x|^2)^{mu - 1/2}` on `B^d`:
/// the average of `Q^lambda(<x,y> + u sqrt(1-|x|^2) sqrt(1-|y|^2))` over the
/// probability measure proportional to `(1-u^2)^{mu-1}`, `lambda = mu + (d-1)/2`.
pub fn ball_kernel(mult: &[f64], mu: f64, dim: usize, x: &[f64], y: &[f64]) -> Result<AuxIntegral> {
    if !(mu > 0.0) {
        return invalid(format!("ball kernel needs mu > 0, got {mu}"));
    }
    if dim == 0 || x.len() != dim || y.len() != dim {
        return invalid("ball points must have the kernel's dimension");
    }
    let lambda = mu + (dim as f64 - 1.0) / 2.0;
    let ip: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let r = (1.0 - norm_sq(x)).max(0.0).sqrt() * (1.0 - norm_sq(y)).max(0.0).sqrt();
    if r == 0.0 {
        return Ok(AuxIntegral { value: gegenbauer_q(mult, lambda, ip)?, order: 1, converged: true });
    }
    let n = mult.len().div_ceil(2).max(1);
    adaptive(n + 16, 64 * (n + 16), |m| {
        let (nodes, weights) = aux_rule(mu, m)?;
        nodes
            .iter()
            .zip(&weights)
            .map(|(&u, &w)| Ok(w * gegenbauer_q(mult, lambda, ip + u * r)?))
            .sum()
    })
}

/// Coefficients `c_j` with `(2j+lambda)/lambda C_{2j}^lambda(z) = c_j P_j^{(lambda-1/2,-1/2)}(2z^2-1)`.
///
/// The `j = 0` factor `lambda Gamma(lambda)` is replaced by `Gamma(lambda + 1)`, which
/// also covers `lambda = 0` where the terms become `1` and `2 T_{2j}(z)`.
fn simplex_coefficients(lambda: f64, top: usize) -> Vec<f64> {
    let half_ln_pi = 0.5 * std::f64::consts::PI.ln();
    (0..=top)
        .map(|j| {
            let jf = j as f64;
            let lead = if j == 0 { ln_gamma(lambda + 1.0) } else { (2.0 * jf + lambda).ln() + ln_gamma(jf + lambda) };
            (lead - ln_gamma(lambda + 1.0) + half_ln_pi - ln_gamma(jf + 0.5)).exp()
        })
        .collect()
}

/// Simplex kernel on `T^d`, `d in {1, 2}`, for the normalized weight
/// `prod x_i^{kappa_i - 1/2}` (slack coordinate included). The kernel is the average of
/// `sum_j a(j/n) (2j+lambda)/lambda C_{2j}^lambda(z)` with `z = sum_i sqrt(x_i y_i) t_i`
/// over the product probability measure in `t`, `lambda = |kappa| + (d-1)/2`.
pub fn simplex_kernel(mult: &[f64], kappa: &[f64], x: &[f64], y: &[f64]) -> Result<AuxIntegral> {
    let d = kappa.len().saturating_sub(1);
    if !(1..=2).contains(&d) {
        return invalid(format!("simplex kernel supports d in {{1, 2}}, got {d}"));
    }
    if kappa.iter().any(|&k| !(k >= 0.0)) {
        return invalid("simplex parameters must be non-negative");
    }
    if x.len() != d || y.len() != d {
        return invalid("simplex points must have d coordinates");
    }
    let lambda = kappa.iter().sum::<f64>() + (d as f64 - 1.0) / 2.0;
    let slack = |p: &[f64]| (1.0 - p.iter().sum::<f64>()).max(0.0);
    let coef: Vec<f64> = x
        .iter()
        .zip(y)
        .map(|(a, b)| (a.max(0.0) * b.max(0.0)).sqrt())
        .chain(std::iter::once((slack(x) * slack(y)).sqrt()))
        .collect();
    let top = mult.len().saturating_sub(1);
    let scaled: Vec<f64> = mult.iter().zip(simplex_coefficients(lambda, top)).map(|(m, c)| m * c).collect();
    let p = JacobiParams { alpha: lambda - 0.5, beta: -0.5 };
    let mut buf = Vec::with_capacity(top + 1);
    let mut integrand = |z: f64| -> f64 {
        let s = (2.0 * z * z - 1.0).clamp(-1.0, 1.0);
        jacobi_values_into(p, top, s, &mut buf);
        scaled.iter().zip(&buf).map(|(c, v)| c * v).sum()
    };
    // Variables with a vanishing coefficient or kappa_i = 0 need no refinement.
    let active: Vec<usize> = (0..=d).filter(|&i| coef[i] != 0.0 && kappa[i] > 0.0).collect();
    let n = mult.len().div_ceil(2).max(1);
    // The integrand has degree 4n - 2 in each t_i.
    let start = 2 * n + 16;
    let max_order = if active.len() <= 1 { 64 * start } else { 4 * start };
    adaptive(start, max_order, |m| {
        let rules: Vec<(Vec<f64>, Vec<f64>)> = (0..=d)
            .map(|i| if coef[i] == 0.0 { Ok((vec![0.0], vec![1.0])) } else { aux_rule(kappa[i], m) })
            .collect::<Result<_>>()?;
        let mut total = 0.0;
        let mut idx = vec![0usize; d + 1];
        loop {
            let mut w = 1.0;
            let mut z = 0.0;
            for i in 0..=d {
                w *= rules[i].1[idx[i]];
                z += coef[i] * rules[i].0[idx[i]];
            }
            total += w * integrand(z);
            let mut i = 0;
            loop {
                if i > d {
                    return Ok(total);
                }
                idx[i] += 1;
                if idx[i] < rules[i].0.len() {
                    break;
                }
                idx[i] = 0;
                i += 1;
            }
        }
    })
    .map(|mut a| {
        if active.is_empty() {
            a.converged = true;
        }
        a
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::jacobi_q;
    use crate::quadrature::gauss_rule;

    fn ramp(n: usize) -> Vec<f64> {
        (0..2 * n)
            .map(|j| {
                let t = j as f64 / n as f64;
                if t <= 1.0 {
                    1.0
                } else {
                    0.5 * (1.0 + (std::f64::consts::PI * (t - 1.0)).cos())
                }
            })
            .collect()
    }

    #[test]
    fn sphere_is_proportional_to_q() {
        let m = ramp(10);
        for dim in [2usize, 3, 4] {
            let l = (dim as f64 - 1.0) / 2.0;
            let p = JacobiParams::new(l - 0.5, l - 0.5).unwrap();
            let ratios: Vec<f64> = (0..50)
                .map(|i| {
                    let t = -0.98 + 1.96 * i as f64 / 49.0;
                    sphere_kernel(&m, dim, t).unwrap() / jacobi_q(&m, p, t)
                })
                .filter(|r| r.is_finite())
                .collect();
            let r0 = ratios[0];
            assert!(ratios.iter().all(|r| (r / r0 - 1.0).abs() < 1e-8), "dim {dim}");
        }
    }

    #[test]
    fn sphere_reproduces_zonal_harmonics_on_s2() {
        // On S^2 the projection of P_k(<xi, .>) onto degree k is itself; with
        // multiplier e_k the kernel integrates P_k(<xi,.>) back to P_k(<xi,xi'>).
        let mut m = vec![0.0; 8];
        m[3] = 1.0;
        let xi = [0.0, 0.6, 0.8];
        let eta = [0.6, 0.0, 0.8];
        let lat = gauss_rule(WeightId::Jacobi { alpha: 0.0, beta: 0.0 }, 12).unwrap();
        let nphi = 16;
        let p3 = |t: f64| 0.5 * (5.0 * t * t * t - 3.0 * t);
        let mut s = 0.0;
        for (&z, &w) in lat.nodes.iter().zip(&lat.weights) {
            let r = (1.0 - z * z).sqrt();
            for k in 0..nphi {
                let ph = 2.0 * std::f64::consts::PI * k as f64 / nphi as f64;
                let y = [r * ph.cos(), r * ph.sin(), z];
                let c1: f64 = xi.iter().zip(&y).map(|(a, b)| a * b).sum();
                let c2: f64 = eta.iter().zip(&y).map(|(a, b)| a * b).sum();
                s += w * 2.0 * std::f64::consts::PI / nphi as f64 * sphere_kernel(&m, 2, c1).unwrap() * p3(c2);
            }
        }
        let c: f64 = xi.iter().zip(&eta).map(|(a, b)| a * b).sum();
        assert!((s - p3(c)).abs() < 1e-12);
    }

    /// Integral of `f` against `dx / pi` on the unit disk (the normalized weight for mu = 1/2).
    fn disk_average(f: impl Fn(&[f64]) -> f64) -> f64 {
        let rr = gauss_rule(WeightId::Jacobi { alpha: 0.0, beta: 1.0 }, 14).unwrap();
        let nphi = 32;
        let mut s = 0.0;
        for (&u, &w) in rr.nodes.iter().zip(&rr.weights) {
            // r = (1 + u)/2 so r dr = (1 + u) du / 4.
            let r = (1.0 + u) / 2.0;
            for k in 0..nphi {
                let ph = 2.0 * std::f64::consts::PI * k as f64 / nphi as f64;
                s += w / 4.0 / nphi as f64 * 2.0 * f(&[r * ph.cos(), r * ph.sin()]);
            }
        }
        s
    }

    #[test]
    fn disk_average_is_normalized() {
        assert!((disk_average(|_| 1.0) - 1.0).abs() < 1e-14);
        assert!((disk_average(|p| p[0] * p[0]) - 0.25).abs() < 1e-14);
    }

    #[test]
    fn ball_reproduces_low_degree() {
        let x = [0.3, -0.4];
        // Multiplier e_1 projects onto orthogonal linear polynomials.
        let m1 = [0.0, 1.0, 0.0, 0.0];
        let v = disk_average(|y| ball_kernel(&m1, 0.5, 2, &x, y).unwrap().value * y[0]);
        assert!((v - x[0]).abs() < 1e-10, "{v}");
        let v = disk_average(|y| ball_kernel(&m1, 0.5, 2, &x, y).unwrap().value * y[1] * y[1]);
        assert!(v.abs() < 1e-10);
        // Multiplier 1 up to degree 3 reproduces cubics.
        let m = [1.0, 1.0, 1.0, 1.0];
        let p = |y: &[f64]| 1.0 + y[0] - 2.0 * y[0] * y[1] + y[1].powi(3);
        let v = disk_average(|y| ball_kernel(&m, 0.5, 2, &x, y).unwrap().value * p(y));
        assert!((v - p(&x)).abs() < 1e-10);
    }

    #[test]
    fn ball_center_and_symmetry() {
        let m = ramp(6);
        let a = ball_kernel(&m, 1.5, 2, &[0.0, 0.0], &[0.0, 0.0]).unwrap();
        // Integrand is Q(u); compare with a large fixed rule.
        let r = gauss_rule(WeightId::Jacobi { alpha: 0.5, beta: 0.5 }, 40).unwrap();
        let mass: f64 = r.weights.iter().sum();
        let direct = r.integrate(|u| gegenbauer_q(&m, 2.0, u).unwrap()) / mass;
        assert!((a.value - direct).abs() < 1e-10 * direct.abs().max(1.0));
        let x = [0.1, 0.7];
        let y = [-0.5, 0.2];
        let l1 = ball_kernel(&m, 0.7, 2, &x, &y).unwrap();
        let l2 = ball_kernel(&m, 0.7, 2, &y, &x).unwrap();
        assert!(l1.converged);
        assert!((l1.value - l2.value).abs() < 1e-10 * l1.value.abs().max(1.0));
    }

    #[test]
    fn simplex_coefficients_match_gegenbauer() {
        for &lambda in &[0.5, 1.25, 3.0] {
            let z: f64 = 0.37;
            let c = simplex_coefficients(lambda, 6);
            let g = gegenbauer_all(lambda, 12, z).unwrap();
            let mut p = Vec::new();
            jacobi_values_into(JacobiParams { alpha: lambda - 0.5, beta: -0.5 }, 6, 2.0 * z * z - 1.0, &mut p);
            for j in 0..=6 {
                let expect = (2.0 * j as f64 + lambda) / lambda * g.values[2 * j];
                assert!((c[j] * p[j] - expect).abs() < 1e-11 * expect.abs().max(1.0));
            }
        }
        // lambda = 0: 1 and 2 T_{2j}.
        let c = simplex_coefficients(0.0, 4);
        let z: f64 = 0.3;
        let mut p = Vec::new();
        jacobi_values_into(JacobiParams { alpha: -0.5, beta: -0.5 }, 4, 2.0 * z * z - 1.0, &mut p);
        assert!((c[0] * p[0] - 1.0).abs() < 1e-14);
        for j in 1..=4 {
            let t2j = (2.0 * j as f64 * z.acos()).cos();
            assert!((c[j] * p[j] - 2.0 * t2j).abs() < 1e-12);
        }
    }

    #[test]
    fn simplex_zero_kappa_is_four_point_average() {
        let m = ramp(5);
        let (x, y) = ([0.3], [0.6]);
        let got = simplex_kernel(&m, &[0.0, 0.0], &x, &y).unwrap().value;
        let a = (x[0] * y[0]).sqrt();
        let b = ((1.0 - x[0]) * (1.0 - y[0])).sqrt();
        let f = |z: f64| {
            let th = z.acos();
            m.iter().enumerate().map(|(j, mj)| mj * if j == 0 { 1.0 } else { 2.0 * (2.0 * j as f64 * th).cos() }).sum::<f64>()
        };
        let expect = (f(a + b) + f(a - b) + f(-a + b) + f(-a - b)) / 4.0;
        assert!((got - expect).abs() < 1e-10);
    }

    #[test]
    fn simplex_reproduces_on_interval() {
        // kappa = (1/2, 1/2): the normalized weight on [0, 1] is dx; shifted Legendre
        // polynomials are orthonormal there.
        let leg = gauss_rule(WeightId::Jacobi { alpha: 0.0, beta: 0.0 }, 16).unwrap();
        let q = |k: usize, x: f64| {
            let t = 2.0 * x - 1.0;
            let p = [1.0, t, 0.5 * (3.0 * t * t - 1.0), 0.5 * (5.0 * t * t * t - 3.0 * t)][k];
            (2.0 * k as f64 + 1.0).sqrt() * p
        };
        let mult = [0.9, 0.6, 0.3, 0.1];
        let x = 0.27;
        for k in 0..4 {
            let v = leg.integrate(|u| {
                let y = (1.0 + u) / 2.0;
                0.5 * simplex_kernel(&mult, &[0.5, 0.5], &[x], &[y]).unwrap().value * q(k, y)
            });
            assert!((v - mult[k] * q(k, x)).abs() < 1e-9, "k={k}: {v}");
        }
    }

    #[test]
    fn simplex_symmetry_2d() {
        let m = ramp(3);
        let k = [0.5, 1.0, 0.0];
        let (x, y) = ([0.2, 0.3], [0.5, 0.1]);
        let a = simplex_kernel(&m, &k, &x, &y).unwrap();
        let b = simplex_kernel(&m, &k, &y, &x).unwrap();
        assert!(a.converged);
        assert!((a.value - b.value).abs() < 1e-9 * a.value.abs().max(1.0));
    }
}
