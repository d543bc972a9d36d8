//! Gamma-function helpers shared by the polynomial and kernel modules.

/// Natural log of `|Γ(x)|`.
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// `Γ(x)` for moderate arguments.
pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

/// `ln(Γ(a) / Γ(b))`, evaluated without forming either factor.
pub fn ln_gamma_ratio(a: f64, b: f64) -> f64 {
    ln_gamma(a) - ln_gamma(b)
}

/// `ln B(a, b)`.
pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Surface area of the unit sphere `S^d` in `R^{d+1}`.
pub fn sphere_area(d: usize) -> f64 {
    let h = (d as f64 + 1.0) / 2.0;
    2.0 * std::f64::consts::PI.powf(h) / gamma(h)
}
