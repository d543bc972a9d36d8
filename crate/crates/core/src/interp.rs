//! Local Lagrange interpolation on uniform grids.

/// Samples `values[i] = f(x0 + i * dx)`.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformSamples {
    pub x0: f64,
    pub dx: f64,
    pub values: Vec<f64>,
}

impl UniformSamples {
    pub fn new(x0: f64, dx: f64, values: Vec<f64>) -> Self {
        Self { x0, dx, values }
    }

    pub fn x_end(&self) -> f64 {
        self.x0 + self.dx * (self.values.len() - 1) as f64
    }

    /// Interpolates with a centered stencil of `degree + 1` nodes, shifted
    /// inward near the ends of the grid.
    pub fn eval(&self, x: f64, degree: usize) -> f64 {
        let n = self.values.len();
        let pts = (degree + 1).min(n);
        let s = (x - self.x0) / self.dx;
        let base = s.floor() as i64 - (pts as i64 - 1) / 2;
        let start = base.clamp(0, (n - pts) as i64) as usize;
        // Exact hit: return the sample to avoid 0/0 in the barycentric weights.
        let r = s.round();
        if (s - r).abs() < 1e-12 && r >= 0.0 && (r as usize) < n {
            return self.values[r as usize];
        }
        let mut acc = 0.0;
        for i in 0..pts {
            let xi = (start + i) as f64;
            let mut w = 1.0;
            for j in 0..pts {
                if j != i {
                    let xj = (start + j) as f64;
                    w *= (s - xj) / (xi - xj);
                }
            }
            acc += w * self.values[start + i];
        }
        acc
    }
}
