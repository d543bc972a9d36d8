//! Tight needlet frames on `[-1, 1]` (Jacobi), `R` (Hermite) and `R_+` (Laguerre).
//!
//! Level `0` is the projector onto constants. Level `j >= 1` uses the kernel with
//! multipliers `a(nu / 2^{j-1})` (Jacobi) or `a(sqrt(nu) / 2^{j-1})` (Hermite,
//! Laguerre), discretized by the Gauss rule with `2^j` resp. `4^j` nodes, which
//! integrates the product of any two functions in the level spectrum exactly.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cutoff::{check_partition_of_unity, CutoffFunction, CutoffKind};
use crate::decay::{DecayEnvelope, EnvelopeBin};
use crate::error::{invalid, Error, Result};
use crate::orthopoly::{hermite_values_into, jacobi_norms, jacobi_values_into, laguerre_values_into, JacobiParams, LaguerreKind};
use crate::quadrature::{tridiagonal_eigen, WeightId};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum NeedletFamily {
    /// Orthonormal Jacobi polynomials for `(1-x)^alpha (1+x)^beta dx`.
    Jacobi { alpha: f64, beta: f64 },
    /// Hermite functions on `R`.
    Hermite,
    /// F-type Laguerre functions on `R_+` with measure `t^{2 alpha + 1} dt`.
    Laguerre { alpha: f64 },
}

impl NeedletFamily {
    fn validate(&self) -> Result<()> {
        match *self {
            NeedletFamily::Jacobi { alpha, beta } => JacobiParams::new(alpha, beta).map(|_| ()),
            NeedletFamily::Laguerre { alpha } if !(alpha >= 0.0) => {
                invalid(format!("Laguerre parameter must be non-negative, got {alpha}"))
            }
            _ => Ok(()),
        }
    }

    fn max_level(&self) -> usize {
        match self {
            NeedletFamily::Jacobi { .. } => 7,
            _ => 4,
        }
    }

    /// Spectral width of level `j`: `2^j` (Jacobi) or `4^j`.
    fn level_size(&self, j: usize) -> usize {
        match self {
            NeedletFamily::Jacobi { .. } => 1 << j,
            _ => 1 << (2 * j),
        }
    }

    fn check_point(&self, x: f64) -> Result<()> {
        let ok = match self {
            NeedletFamily::Jacobi { .. } => (-1.0..=1.0).contains(&x),
            NeedletFamily::Hermite => x.is_finite(),
            NeedletFamily::Laguerre { .. } => x >= 0.0 && x.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!("{x} is outside the domain of {self:?}")))
        }
    }

    /// Distance used for needlet profiles.
    pub fn distance(&self, x: f64, y: f64) -> f64 {
        match self {
            NeedletFamily::Jacobi { .. } => (x.clamp(-1.0, 1.0).acos() - y.clamp(-1.0, 1.0).acos()).abs(),
            _ => (x - y).abs(),
        }
    }

    pub fn tag(&self) -> String {
        match self {
            NeedletFamily::Jacobi { alpha, beta } => format!("jacobi({alpha},{beta})"),
            NeedletFamily::Hermite => "hermite1".into(),
            NeedletFamily::Laguerre { alpha } => format!("laguerre1([{alpha}])"),
        }
    }
}

/// Orthonormal basis values `phi_0..phi_top` at `x`.
#[derive(Debug, Clone)]
struct Basis {
    family: NeedletFamily,
    jacobi_norm_sqrt: Vec<f64>,
}

impl Basis {
    fn new(family: NeedletFamily, top: usize) -> Self {
        let jacobi_norm_sqrt = match family {
            NeedletFamily::Jacobi { alpha, beta } => {
                jacobi_norms(JacobiParams { alpha, beta }, top).into_iter().map(f64::sqrt).collect()
            }
            _ => Vec::new(),
        };
        Self { family, jacobi_norm_sqrt }
    }

    fn values_into(&self, top: usize, x: f64, out: &mut Vec<f64>) {
        match self.family {
            NeedletFamily::Jacobi { alpha, beta } => {
                jacobi_values_into(JacobiParams { alpha, beta }, top, x, out);
                for (v, s) in out.iter_mut().zip(&self.jacobi_norm_sqrt) {
                    *v /= s;
                }
            }
            NeedletFamily::Hermite => hermite_values_into(top, x, out),
            NeedletFamily::Laguerre { alpha } => laguerre_values_into(alpha, top, x, LaguerreKind::F, out),
        }
    }

    fn values(&self, top: usize, x: f64) -> Vec<f64> {
        let mut v = Vec::with_capacity(top + 1);
        self.values_into(top, x, &mut v);
        v
    }
}

/// Gauss nodes with `m` points for the family and the Christoffel numbers
/// `1 / sum_{k<m} phi_k(xi)^2` of the orthonormal basis (the cubature weights `c_xi`).
fn cubature(basis: &Basis, m: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let weight = match basis.family {
        NeedletFamily::Jacobi { alpha, beta } => WeightId::Jacobi { alpha, beta },
        NeedletFamily::Hermite => WeightId::Hermite,
        NeedletFamily::Laguerre { alpha } => WeightId::Laguerre { alpha },
    };
    let (diag, off) = weight.recurrence(m);
    let (mut eig, _) = tridiagonal_eigen(&diag, &off)?;
    eig.sort_by(f64::total_cmp);
    let nodes: Vec<f64> = match basis.family {
        // F-type functions live in t = sqrt(s).
        NeedletFamily::Laguerre { .. } => eig.iter().map(|s| s.max(0.0).sqrt()).collect(),
        NeedletFamily::Jacobi { .. } => eig.iter().map(|x| x.clamp(-1.0, 1.0)).collect(),
        NeedletFamily::Hermite => eig,
    };
    let mut buf = Vec::with_capacity(m);
    let weights = nodes
        .iter()
        .map(|&x| {
            basis.values_into(m - 1, x, &mut buf);
            1.0 / buf.iter().map(|v| v * v).sum::<f64>()
        })
        .collect::<Vec<f64>>();
    if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
        return Err(Error::Numerical(format!("non-positive cubature weight in the {m}-node rule")));
    }
    Ok((nodes, weights))
}

/// One level of the frame.
#[derive(Debug, Clone)]
pub struct NeedletLevel {
    pub j: usize,
    /// `n_j`: `2^{j-1}` or `4^{j-1}` for `j >= 1`, `0` for the constant level.
    pub dilation: usize,
    /// `a_j(nu)` for `nu = 0..=top`.
    pub multipliers: Vec<f64>,
    pub nodes: Vec<f64>,
    /// Cubature weights `c_xi`.
    pub weights: Vec<f64>,
    /// Row-major `phi_nu(xi_i)`, row length `multipliers.len()`.
    basis: Vec<f64>,
}

impl NeedletLevel {
    pub fn top(&self) -> usize {
        self.multipliers.len() - 1
    }

    fn row(&self, i: usize) -> &[f64] {
        let w = self.multipliers.len();
        &self.basis[i * w..(i + 1) * w]
    }
}

/// A tight needlet frame truncated at level `j_max`.
#[derive(Debug, Clone)]
pub struct NeedletSystem {
    pub family: NeedletFamily,
    pub cutoff: Arc<CutoffFunction>,
    pub j_max: usize,
    pub levels: Vec<NeedletLevel>,
    /// Partition-of-unity deviation measured at construction.
    pub partition_deviation: f64,
    basis: Basis,
}

/// How analysis coefficients were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum AnalysisMethod {
    /// Directly from orthonormal expansion coefficients.
    Spectral,
    /// Expansion coefficients by a Gauss rule with `nodes` points first; `exact`
    /// when the input was declared band-limited within capacity.
    Quadrature { nodes: usize, exact: bool },
}

/// `<f, psi_xi>` for every level and node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameCoefficients {
    pub family: NeedletFamily,
    pub j_max: usize,
    pub levels: Vec<Vec<f64>>,
    pub method: AnalysisMethod,
}

impl FrameCoefficients {
    pub fn energy(&self) -> f64 {
        self.levels.iter().flatten().map(|c| c * c).sum()
    }
}

/// Builds the frame for `family` with levels `0..=j_max`.
pub fn build_needlet_system(family: NeedletFamily, cutoff: Arc<CutoffFunction>, j_max: usize) -> Result<NeedletSystem> {
    family.validate()?;
    if cutoff.spec.kind != CutoffKind::TypeC {
        return invalid("needlet systems require a TypeC cutoff");
    }
    if j_max == 0 || j_max > family.max_level() {
        return invalid(format!("j_max must lie in 1..={} for {}, got {j_max}", family.max_level(), family.tag()));
    }
    let partition_deviation = check_partition_of_unity(&cutoff, 1.0, 2f64.powi(j_max as i32 + 1))?;
    if partition_deviation >= 1e-8 {
        return Err(Error::Numerical(format!("cutoff partition-of-unity deviation {partition_deviation:.3e} >= 1e-8")));
    }
    let basis = Basis::new(family, family.level_size(j_max) - 1);
    let levels = (0..=j_max)
        .map(|j| {
            let m = family.level_size(j);
            let (multipliers, dilation) = if j == 0 {
                (vec![1.0], 0)
            } else {
                let d = family.level_size(j - 1);
                let scale = (1usize << (j - 1)) as f64;
                let mult = (0..m)
                    .map(|nu| match family {
                        NeedletFamily::Jacobi { .. } => cutoff.eval(nu as f64 / scale),
                        _ => cutoff.eval((nu as f64).sqrt() / scale),
                    })
                    .collect();
                (mult, d)
            };
            let (nodes, weights) = cubature(&basis, m)?;
            let top = multipliers.len() - 1;
            let mut table = Vec::with_capacity(nodes.len() * (top + 1));
            let mut buf = Vec::with_capacity(top + 1);
            for &x in &nodes {
                basis.values_into(top, x, &mut buf);
                table.extend_from_slice(&buf);
            }
            Ok(NeedletLevel { j, dilation, multipliers, nodes, weights, basis: table })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(NeedletSystem { family, cutoff, j_max, levels, partition_deviation, basis })
}

impl NeedletSystem {
    /// Highest basis index present in any level.
    pub fn spectrum_top(&self) -> usize {
        self.levels.last().map_or(0, |l| l.top())
    }

    /// Largest degree reproduced exactly by the truncated frame: `2^{j_max-1}` or `4^{j_max-1}`.
    pub fn capacity(&self) -> usize {
        self.family.level_size(self.j_max - 1)
    }

    /// `psi_xi(x)` for node `i` of level `j`.
    pub fn needlet_value(&self, j: usize, i: usize, x: f64) -> Result<f64> {
        let level = self.levels.get(j).ok_or_else(|| Error::InvalidParameter(format!("no level {j}")))?;
        if i >= level.nodes.len() {
            return invalid(format!("level {j} has {} nodes, got index {i}", level.nodes.len()));
        }
        self.family.check_point(x)?;
        let phi = self.basis.values(level.top(), x);
        let s: f64 = level.multipliers.iter().zip(level.row(i)).zip(&phi).map(|((m, a), b)| m * a * b).sum();
        Ok(level.weights[i].sqrt() * s)
    }

    /// Frame coefficients of `f = sum_nu coeffs[nu] phi_nu`.
    pub fn analyze_spectral(&self, coeffs: &[f64]) -> Result<FrameCoefficients> {
        if coeffs.len() > self.capacity() + 1 {
            return Err(Error::Capacity { degree: coeffs.len() - 1, capacity: self.capacity() });
        }
        Ok(self.analyze_expansion(coeffs, AnalysisMethod::Spectral))
    }

    fn analyze_expansion(&self, coeffs: &[f64], method: AnalysisMethod) -> FrameCoefficients {
        let levels = self
            .levels
            .iter()
            .map(|level| {
                (0..level.nodes.len())
                    .into_par_iter()
                    .map(|i| {
                        let s: f64 =
                            level.multipliers.iter().zip(level.row(i)).zip(coeffs).map(|((m, p), c)| m * p * c).sum();
                        level.weights[i].sqrt() * s
                    })
                    .collect()
            })
            .collect();
        FrameCoefficients { family: self.family, j_max: self.j_max, levels, method }
    }

    /// Frame coefficients of a function given by values.
    ///
    /// With `band_limit = Some(b)`, `b <= capacity`, the expansion coefficients are
    /// computed by the top-level rule, which is exact for `f phi_nu`. Without a band
    /// limit a rule with four times as many nodes is used and the result is marked inexact.
    pub fn analyze_fn(&self, f: impl Fn(f64) -> f64 + Sync, band_limit: Option<usize>) -> Result<FrameCoefficients> {
        let top = self.spectrum_top();
        let (nodes, weights, exact) = match band_limit {
            Some(b) if b > self.capacity() => return Err(Error::Capacity { degree: b, capacity: self.capacity() }),
            Some(_) => {
                let last = self.levels.last().expect("at least one level");
                (last.nodes.clone(), last.weights.clone(), true)
            }
            None => {
                let (n, w) = cubature(&self.basis, 4 * (top + 1))?;
                (n, w, false)
            }
        };
        let method = AnalysisMethod::Quadrature { nodes: nodes.len(), exact };
        let rows: Vec<Vec<f64>> = nodes
            .par_iter()
            .zip(&weights)
            .map(|(&x, &w)| {
                let fx = f(x);
                self.basis.values(top, x).into_iter().map(|p| w * fx * p).collect()
            })
            .collect();
        let coeffs: Vec<f64> = (0..=top).map(|nu| rows.iter().map(|r| r[nu]).sum()).collect();
        Ok(self.analyze_expansion(&coeffs, method))
    }

    fn check_compatible(&self, c: &FrameCoefficients) -> Result<()> {
        let shapes_match = c.levels.len() == self.levels.len()
            && c.levels.iter().zip(&self.levels).all(|(a, l)| a.len() == l.nodes.len());
        if c.family != self.family || c.j_max != self.j_max || !shapes_match {
            return invalid("frame coefficients do not belong to this system");
        }
        Ok(())
    }

    /// `sum_xi <f, psi_xi> psi_xi(x)` at each point of `xs`.
    pub fn synthesize_many(&self, c: &FrameCoefficients, xs: &[f64]) -> Result<Vec<f64>> {
        self.check_compatible(c)?;
        for &x in xs {
            self.family.check_point(x)?;
        }
        let top = self.spectrum_top();
        // Expansion coefficients of the synthesized function, accumulated level by level.
        let mut g = vec![0.0; top + 1];
        for (level, coef) in self.levels.iter().zip(&c.levels) {
            for (i, &ci) in coef.iter().enumerate() {
                let s = ci * level.weights[i].sqrt();
                for ((gv, m), p) in g.iter_mut().zip(&level.multipliers).zip(level.row(i)) {
                    *gv += s * m * p;
                }
            }
        }
        Ok(xs.par_iter().map(|&x| self.basis.values(top, x).iter().zip(&g).map(|(p, v)| p * v).sum()).collect())
    }

    pub fn synthesize(&self, c: &FrameCoefficients, x: f64) -> Result<f64> {
        Ok(self.synthesize_many(c, &[x])?[0])
    }

    /// `|sum |<f, psi_xi>|^2 - ||f||^2| / ||f||^2` with `||f||^2` from the top-level rule.
    pub fn parseval_check(&self, coeffs: &[f64]) -> Result<f64> {
        let c = self.analyze_spectral(coeffs)?;
        let last = self.levels.last().expect("at least one level");
        let norm2: f64 = (0..last.nodes.len())
            .map(|i| {
                let v: f64 = last.row(i).iter().zip(coeffs).map(|(p, c)| p * c).sum();
                last.weights[i] * v * v
            })
            .sum();
        if norm2 == 0.0 {
            return Ok(c.energy());
        }
        Ok((c.energy() - norm2).abs() / norm2)
    }

    /// `f(x)` for `f = sum_nu coeffs[nu] phi_nu`.
    pub fn expansion_value(&self, coeffs: &[f64], x: f64) -> Result<f64> {
        self.family.check_point(x)?;
        if coeffs.is_empty() {
            return Ok(0.0);
        }
        let phi = self.basis.values(coeffs.len() - 1, x);
        Ok(phi.iter().zip(coeffs).map(|(p, c)| p * c).sum())
    }

    /// `|psi_xi(x)|` against `rho(x, xi)` on a dense grid, binned into `bins` bins.
    pub fn needlet_decay_profile(&self, j: usize, xi_index: usize, bins: usize) -> Result<DecayEnvelope> {
        let level = self.levels.get(j).ok_or_else(|| Error::InvalidParameter(format!("no level {j}")))?;
        if xi_index >= level.nodes.len() {
            return invalid(format!("level {j} has {} nodes, got index {xi_index}", level.nodes.len()));
        }
        if bins == 0 {
            return invalid("need at least one bin");
        }
        let xi = level.nodes[xi_index];
        let samples = 8000;
        let xs: Vec<f64> = match self.family {
            NeedletFamily::Jacobi { .. } => {
                (0..=samples).map(|i| (std::f64::consts::PI * i as f64 / samples as f64).cos()).collect()
            }
            NeedletFamily::Hermite => {
                let r = level.nodes.iter().fold(0.0f64, |a, v| a.max(v.abs())) + 6.0;
                (0..=samples).map(|i| -r + 2.0 * r * i as f64 / samples as f64).collect()
            }
            NeedletFamily::Laguerre { .. } => {
                let r = level.nodes.iter().fold(0.0f64, |a, v| a.max(*v)) + 6.0;
                (0..=samples).map(|i| r * i as f64 / samples as f64).collect()
            }
        };
        let rho: Vec<f64> = xs.iter().map(|&x| self.family.distance(x, xi)).collect();
        let rho_max = rho.iter().cloned().fold(0.0, f64::max);
        let vals: Vec<f64> = xs
            .par_iter()
            .map(|&x| self.needlet_value(j, xi_index, x).map(f64::abs))
            .collect::<Result<_>>()?;
        let width = rho_max / bins as f64;
        let mut out: Vec<EnvelopeBin> = (0..bins)
            .map(|b| EnvelopeBin {
                rho_lo: b as f64 * width,
                rho_hi: (b + 1) as f64 * width,
                max_abs: 0.0,
                count: 0,
            })
            .collect();
        for (r, v) in rho.iter().zip(&vals) {
            let b = ((r / width) as usize).min(bins - 1);
            out[b].max_abs = out[b].max_abs.max(*v);
            out[b].count += 1;
        }
        let scale = (1usize << j) as f64;
        Ok(DecayEnvelope {
            family: format!("{}-needlet(j={j},xi={xi_index})", self.family.tag()),
            n: 1 << j,
            weighted: false,
            lead: scale.sqrt(),
            rho_scale: scale,
            epsilon: self.cutoff.spec.epsilon,
            log_depth: self.cutoff.spec.log_depth,
            bins: out,
        })
    }

    /// JSON frame dump `{family, params, levels: [{j, n_j, nodes, weights}]}`.
    pub fn descriptor(&self) -> serde_json::Value {
        let params = match self.family {
            NeedletFamily::Jacobi { alpha, beta } => serde_json::json!({"alpha": alpha, "beta": beta}),
            NeedletFamily::Hermite => serde_json::json!({}),
            NeedletFamily::Laguerre { alpha } => serde_json::json!({"alpha": alpha}),
        };
        let family = match self.family {
            NeedletFamily::Jacobi { .. } => "jacobi",
            NeedletFamily::Hermite => "hermite",
            NeedletFamily::Laguerre { .. } => "laguerre",
        };
        let levels: Vec<serde_json::Value> = self
            .levels
            .iter()
            .map(|l| serde_json::json!({"j": l.j, "n_j": l.dilation, "nodes": l.nodes, "weights": l.weights}))
            .collect();
        serde_json::json!({"family": family, "params": params, "cutoff": self.cutoff.spec, "levels": levels})
    }

    /// CSV `level,node_index,node,coeff`.
    pub fn coefficients_csv(&self, c: &FrameCoefficients) -> Result<String> {
        self.check_compatible(c)?;
        let mut s = String::from("level,node_index,node,coeff\n");
        for (level, coef) in self.levels.iter().zip(&c.levels) {
            for (i, (x, v)) in level.nodes.iter().zip(coef).enumerate() {
                s.push_str(&format!("{},{i},{x:.15e},{v:.15e}\n", level.j));
            }
        }
        Ok(s)
    }
}

/// Random expansion coefficients `c_0..c_degree`, uniform in `[-1, 1]`.
pub fn random_band_limited(degree: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..=degree).map(|_| rng.gen_range(-1.0..=1.0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cutoff::{assemble_cutoff, CutoffSpec};

    fn type_c() -> Arc<CutoffFunction> {
        Arc::new(assemble_cutoff(&CutoffSpec::new(CutoffKind::TypeC, 1.0).with_m_max(4096).with_grid(8192)).unwrap())
    }

    #[test]
    fn rejects_type_a() {
        let a = Arc::new(assemble_cutoff(&CutoffSpec::new(CutoffKind::TypeA, 1.0).with_m_max(512).with_grid(4096)).unwrap());
        assert!(build_needlet_system(NeedletFamily::Hermite, a, 2).is_err());
    }

    #[test]
    fn jacobi_structure() {
        let s = build_needlet_system(NeedletFamily::Jacobi { alpha: 0.0, beta: 0.0 }, type_c(), 4).unwrap();
        for l in &s.levels {
            assert_eq!(l.nodes.len(), 1 << l.j);
        }
        assert_eq!(s.capacity(), 8);
        // Level 0 needlet is c^{1/2} / h_0 = 1/2 with c = 2, h_0 = 2, at every point.
        for &x in &[-0.7, 0.0, 0.9] {
            assert!((s.needlet_value(0, 0, x).unwrap() - 2f64.sqrt() / 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn single_basis_coefficients() {
        let s = build_needlet_system(NeedletFamily::Jacobi { alpha: 1.0, beta: 0.5 }, type_c(), 4).unwrap();
        let m = 5;
        let mut coeffs = vec![0.0; m + 1];
        coeffs[m] = 1.0;
        let c = s.analyze_spectral(&coeffs).unwrap();
        for (level, coef) in s.levels.iter().zip(&c.levels) {
            let a = level.multipliers.get(m).copied().unwrap_or(0.0);
            for (i, v) in coef.iter().enumerate() {
                let phi = s.expansion_value(&coeffs, level.nodes[i]).unwrap();
                assert!((v - a * level.weights[i].sqrt() * phi).abs() < 1e-12);
            }
        }
        // Degree 5 lies in the band of levels 3 and 4 only.
        assert!(c.levels[..3].iter().flatten().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn jacobi_parseval_and_roundtrip() {
        let s = build_needlet_system(NeedletFamily::Jacobi { alpha: 2.0, beta: 0.5 }, type_c(), 5).unwrap();
        let f = random_band_limited(s.capacity(), 7);
        assert!(s.parseval_check(&f).unwrap() < 1e-10);
        let c = s.analyze_spectral(&f).unwrap();
        let xs: Vec<f64> = (0..20).map(|i| -0.95 + 1.9 * i as f64 / 19.0).collect();
        let got = s.synthesize_many(&c, &xs).unwrap();
        for (x, g) in xs.iter().zip(got) {
            let v = s.expansion_value(&f, *x).unwrap();
            assert!((g - v).abs() < 1e-9 * v.abs().max(1.0));
        }
        let too_long = random_band_limited(s.capacity() + 1, 1);
        assert!(matches!(s.analyze_spectral(&too_long), Err(Error::Capacity { .. })));
    }

    #[test]
    fn function_analysis_matches_spectral() {
        let s = build_needlet_system(NeedletFamily::Hermite, type_c(), 3).unwrap();
        let f = random_band_limited(s.capacity(), 3);
        let spectral = s.analyze_spectral(&f).unwrap();
        let byfn = s.analyze_fn(|x| s.expansion_value(&f, x).unwrap(), Some(s.capacity())).unwrap();
        for (a, b) in spectral.levels.iter().flatten().zip(byfn.levels.iter().flatten()) {
            assert!((a - b).abs() < 1e-10);
        }
        assert_eq!(byfn.method, AnalysisMethod::Quadrature { nodes: 64, exact: true });
        assert!(s.analyze_fn(|_| 0.0, Some(s.capacity() + 1)).is_err());
    }

    #[test]
    fn laguerre_parseval() {
        let s = build_needlet_system(NeedletFamily::Laguerre { alpha: 0.0 }, type_c(), 3).unwrap();
        let f = random_band_limited(s.capacity(), 11);
        assert!(s.parseval_check(&f).unwrap() < 1e-10);
        assert!(s.parseval_check(&[1.0]).unwrap() < 1e-12);
    }

    #[test]
    fn zero_input() {
        let s = build_needlet_system(NeedletFamily::Hermite, type_c(), 2).unwrap();
        let c = s.analyze_spectral(&[0.0; 3]).unwrap();
        assert_eq!(c.energy(), 0.0);
        assert_eq!(s.synthesize(&c, 0.3).unwrap(), 0.0);
    }
}
