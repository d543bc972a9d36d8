//! Admissible cutoff functions.
//!
//! The construction starts from a bump `h`, the infinite convolution of the
//! normalized indicators `(1/2d) 1[-d, d]` over a slowly decaying width sequence
//! `d_j`. Its primitive gives a smooth step `g`, from which both the
//! low-pass (type a) and band-pass (types b, c) cutoffs are assembled.

mod bump;
mod derivatives;
mod function;

pub use bump::{build_bump, BumpFunction};
pub use derivatives::{
    check_derivatives_vanish_at_one, check_partition_of_unity, derivative_bound, estimate_derivative_norms,
    DerivativeEstimate,
};
pub use function::{assemble_cutoff, CutoffFunction};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CutoffKind {
    /// Equal to 1 on `[0, 1]`, supported in `[0, 2]`.
    #[serde(rename = "a")]
    TypeA,
    /// Supported in `[1/2, 2]`.
    #[serde(rename = "b")]
    TypeB,
    /// Supported in `[1/2, 2]` with `a(t)^2 + a(t/2)^2 = 1` on `[1, 2]`.
    #[serde(rename = "c")]
    TypeC,
}

impl CutoffKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().trim_start_matches("type") {
            "a" => Some(Self::TypeA),
            "b" => Some(Self::TypeB),
            "c" => Some(Self::TypeC),
            _ => None,
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            Self::TypeA => "a",
            Self::TypeB => "b",
            Self::TypeC => "c",
        }
    }
}

/// Width sequence used in the convolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DeltaSchedule {
    /// `d_j = 1 / (j ln j ... (ln^{(l)} j)^{1+eps})`, the small-derivative sequence.
    #[default]
    SmallDerivative,
    /// `d_j = (j + 1)^{-p}`: still summable, so the bump is smooth, but its
    /// derivatives grow like `(k!)^p` rather than `k^k (ln k)^{k(1+eps)}`.
    Power { exponent: f64 },
}

fn default_log_depth() -> usize {
    1
}
fn default_m_max() -> usize {
    1 << 15
}
fn default_grid() -> usize {
    1 << 14
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffSpec {
    pub kind: CutoffKind,
    pub epsilon: f64,
    #[serde(default = "default_log_depth")]
    pub log_depth: usize,
    /// Index of the last convolution factor retained.
    #[serde(default = "default_m_max")]
    pub m_max: usize,
    /// Number of grid intervals on `[0, 2]`.
    #[serde(default = "default_grid")]
    pub grid: usize,
    #[serde(default)]
    pub schedule: DeltaSchedule,
}

impl CutoffSpec {
    pub fn new(kind: CutoffKind, epsilon: f64) -> Self {
        Self {
            kind,
            epsilon,
            log_depth: default_log_depth(),
            m_max: default_m_max(),
            grid: default_grid(),
            schedule: DeltaSchedule::SmallDerivative,
        }
    }

    pub fn with_m_max(mut self, m_max: usize) -> Self {
        self.m_max = m_max;
        self
    }

    pub fn with_grid(mut self, grid: usize) -> Self {
        self.grid = grid;
        self
    }

    pub fn with_log_depth(mut self, log_depth: usize) -> Self {
        self.log_depth = log_depth;
        self
    }

    pub fn with_schedule(mut self, schedule: DeltaSchedule) -> Self {
        self.schedule = schedule;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
            return invalid(format!("epsilon must lie in (0, 1], got {}", self.epsilon));
        }
        if self.log_depth == 0 || self.log_depth > 2 {
            return invalid(format!("log_depth must be 1 or 2, got {}", self.log_depth));
        }
        if self.m_max < 8 {
            return invalid(format!("m_max must be at least 8, got {}", self.m_max));
        }
        if self.grid < 1 << 12 {
            return invalid(format!("grid must be at least 4096, got {}", self.grid));
        }
        if let DeltaSchedule::Power { exponent } = self.schedule {
            if !(exponent > 1.0) {
                return invalid(format!("power schedule needs exponent > 1, got {exponent}"));
            }
        }
        Ok(())
    }
}

/// Iterated natural log `ln^{(k)} x`; `None` once an intermediate value is not positive.
fn iterated_ln(x: f64, k: usize) -> Option<f64> {
    let mut v = x;
    for _ in 0..k {
        if v <= 0.0 {
            return None;
        }
        v = v.ln();
    }
    Some(v)
}

/// `d_0..d_{m_max}` of the small-derivative sequence.
///
/// For `log_depth = 1`: `d_0 = d_1 = 1` and `d_j = 1/(j (ln j)^{1+eps})`. For
/// `log_depth = l > 1` the denominator is `j ln j ... ln^{(l-1)} j (ln^{(l)} j)^{1+eps}`
/// from the first index where `ln^{(l)} j > 1`; all earlier entries are 1.
pub fn build_delta_sequence(epsilon: f64, log_depth: usize, m_max: usize) -> Result<Vec<f64>> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return invalid(format!("epsilon must lie in (0, 1], got {epsilon}"));
    }
    if m_max < 2 {
        return invalid(format!("m_max must be at least 2, got {m_max}"));
    }
    if log_depth == 0 {
        return invalid("log_depth must be at least 1");
    }
    let mut seq = vec![1.0; m_max + 1];
    if log_depth == 1 {
        for (j, d) in seq.iter_mut().enumerate().skip(2) {
            let jf = j as f64;
            *d = 1.0 / (jf * jf.ln().powf(1.0 + epsilon));
        }
        return Ok(seq);
    }
    let start = (2..=m_max).find(|&j| iterated_ln(j as f64, log_depth).is_some_and(|v| v > 1.0));
    let Some(start) = start else {
        return invalid(format!("m_max = {m_max} is too small for log_depth {log_depth}"));
    };
    for (j, d) in seq.iter_mut().enumerate().skip(start) {
        let jf = j as f64;
        let mut denom = jf;
        for k in 1..log_depth {
            denom *= iterated_ln(jf, k).unwrap_or(1.0);
        }
        denom *= iterated_ln(jf, log_depth).unwrap_or(1.0).powf(1.0 + epsilon);
        *d = 1.0 / denom;
    }
    Ok(seq)
}

/// Width sequence for a spec, honoring its schedule.
pub fn spec_delta_sequence(spec: &CutoffSpec) -> Result<Vec<f64>> {
    match spec.schedule {
        DeltaSchedule::SmallDerivative => build_delta_sequence(spec.epsilon, spec.log_depth, spec.m_max),
        DeltaSchedule::Power { exponent } => {
            Ok((0..=spec.m_max).map(|j| (j as f64 + 1.0).powf(-exponent)).collect())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_entries() {
        for &eps in &[0.2, 0.5, 1.0] {
            let d = build_delta_sequence(eps, 1, 10).unwrap();
            assert_eq!(d[0], 1.0);
            assert_eq!(d[1], 1.0);
        }
        let d = build_delta_sequence(1.0, 1, 10).unwrap();
        let expect = 1.0 / (2.0 * 2f64.ln().powi(2));
        assert!((d[2] - expect).abs() < 1e-15);
        assert!((d[2] - 1.04068).abs() < 1e-5);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(build_delta_sequence(0.0, 1, 10).is_err());
        assert!(build_delta_sequence(1.5, 1, 10).is_err());
        assert!(build_delta_sequence(1.0, 1, 1).is_err());
    }

    #[test]
    fn partial_sums_against_four_over_eps() {
        // The bound sum_j d_j <= 4/eps is stated for the full series. At eps = 1 the
        // partial sums cross 4 just after j = 9000 and the limit sits slightly above 4;
        // at eps = 1/2 the sum stays far below 8.
        let d = build_delta_sequence(1.0, 1, 9000).unwrap();
        assert!(d.iter().sum::<f64>() <= 4.0);
        let d = build_delta_sequence(1.0, 1, 1 << 15).unwrap();
        let s: f64 = d.iter().sum();
        assert!(s > 4.0 && s < 4.02);
        let d = build_delta_sequence(0.5, 1, 1 << 15).unwrap();
        assert!(d.iter().sum::<f64>() < 8.0);
    }

    #[test]
    fn multi_log_starts_after_unit_block() {
        let d = build_delta_sequence(1.0, 2, 100).unwrap();
        // ln ln j > 1 first holds at j = 16.
        assert!(d[..16].iter().all(|&v| v == 1.0));
        assert!(d[16] < 1.0);
        let j = 16f64;
        assert!((d[16] - 1.0 / (j * j.ln() * j.ln().ln().powi(2))).abs() < 1e-15);
    }

    #[test]
    fn spec_json_roundtrip() {
        let s: CutoffSpec =
            serde_json::from_str(r#"{"kind":"c","epsilon":0.5,"log_depth":1,"m_max":4096,"grid":8192}"#).unwrap();
        assert_eq!(s.kind, CutoffKind::TypeC);
        assert_eq!(s.schedule, DeltaSchedule::SmallDerivative);
        let back: CutoffSpec = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);
        let r: CutoffSpec = serde_json::from_str(
            r#"{"kind":"a","epsilon":1,"schedule":{"power":{"exponent":2.0}}}"#,
        )
        .unwrap();
        assert_eq!(r.schedule, DeltaSchedule::Power { exponent: 2.0 });
    }
}
