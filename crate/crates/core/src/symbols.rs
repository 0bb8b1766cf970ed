//! Scalar dispersion symbols H₀(p) whose minimum is attained on a sphere.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// A point of ℝⁿ, n ≤ 3; unused trailing components are zero.
pub type Point = [f64; 3];

pub fn norm(p: &Point) -> f64 {
    (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt()
}

pub fn to_point(p: &[f64], dimension: usize) -> Result<Point> {
    if p.len() != dimension {
        return Err(Error::InvalidInput(format!(
            "expected a point of dimension {dimension}, got {}",
            p.len()
        )));
    }
    if p.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput(format!("non-finite coordinates {p:?}")));
    }
    let mut q = [0.0; 3];
    q[..dimension].copy_from_slice(p);
    Ok(q)
}

/// Minimum value of a symbol and the radius of the sphere where it is attained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Minimum {
    pub value: f64,
    pub radius: f64,
}

/// Anything that can play the role of the kinetic symbol in the
/// variational construction: a scalar energy on momentum space with a
/// spherical minimum set.
pub trait Dispersion: Send + Sync {
    fn dimension(&self) -> usize;

    /// H₀(p) without input validation.
    fn energy(&self, p: &Point) -> f64;

    fn minimum(&self) -> Result<Minimum>;

    /// Second radial derivative of the profile at the minimizing radius.
    fn transverse_curvature(&self) -> Result<f64>;
}

/// Tabulated radial profile with natural cubic spline interpolation.
///
/// Outside the table the profile is continued by the boundary value plus the
/// squared distance to the table, so it stays continuous and confining.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    radii: Vec<f64>,
    values: Vec<f64>,
    second: Vec<f64>,
}

impl RadialProfile {
    pub fn new(radii: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let n = radii.len();
        if n < 3 || values.len() != n {
            return Err(Error::InvalidInput(
                "a radial profile needs at least 3 (radius, value) pairs of equal length".into(),
            ));
        }
        if radii[0] < 0.0 || radii.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput(
                "profile radii must be nonnegative and strictly increasing".into(),
            ));
        }
        if values.iter().chain(&radii).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("profile contains non-finite entries".into()));
        }
        let second = natural_spline_moments(&radii, &values);
        Ok(Self {
            radii,
            values,
            second,
        })
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn segment(&self, r: f64) -> usize {
        let n = self.radii.len();
        match self.radii.binary_search_by(|x| x.total_cmp(&r)) {
            Ok(i) => i.min(n - 2),
            Err(i) => i.saturating_sub(1).min(n - 2),
        }
    }

    /// Value, first and second derivative.
    pub fn eval3(&self, r: f64) -> (f64, f64, f64) {
        let n = self.radii.len();
        let (r0, rn) = (self.radii[0], self.radii[n - 1]);
        if r < r0 {
            let d = r0 - r;
            return (self.values[0] + d * d, -2.0 * d, 2.0);
        }
        if r > rn {
            let d = r - rn;
            return (self.values[n - 1] + d * d, 2.0 * d, 2.0);
        }
        let i = self.segment(r);
        let h = self.radii[i + 1] - self.radii[i];
        let a = (self.radii[i + 1] - r) / h;
        let b = (r - self.radii[i]) / h;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.second[i], self.second[i + 1]);
        let v = a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
        let d = (y1 - y0) / h - (3.0 * a * a - 1.0) / 6.0 * h * m0 + (3.0 * b * b - 1.0) / 6.0 * h * m1;
        let dd = a * m0 + b * m1;
        (v, d, dd)
    }

    pub fn eval(&self, r: f64) -> f64 {
        self.eval3(r).0
    }

    /// Global minimum over the table: node values plus the interior roots of
    /// the spline derivative on every segment.
    fn minimum(&self) -> (f64, f64) {
        let mut best = (self.values[0], self.radii[0]);
        let mut consider = |r: f64| {
            let v = self.eval(r);
            if v < best.0 {
                best = (v, r);
            }
        };
        for &r in &self.radii {
            consider(r);
        }
        for i in 0..self.radii.len() - 1 {
            let (xa, xb) = (self.radii[i], self.radii[i + 1]);
            let h = xb - xa;
            let (m0, m1) = (self.second[i], self.second[i + 1]);
            let (y0, y1) = (self.values[i], self.values[i + 1]);
            // derivative in terms of b = (r − xa)/h, a = 1 − b:
            // d(b) = (y1−y0)/h − (3(1−b)²−1)h m0/6 + (3b²−1) h m1/6
            let c2 = (m1 - m0) * h / 2.0;
            let c1 = m0 * h;
            let c0 = (y1 - y0) / h - h * m0 / 3.0 - h * m1 / 6.0;
            for b in quadratic_roots(c2, c1, c0) {
                if b > 0.0 && b < 1.0 {
                    consider(xa + b * h);
                }
            }
        }
        best
    }
}

fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    if a.abs() < 1e-300 {
        if b.abs() < 1e-300 {
            return vec![];
        }
        return vec![-c / b];
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return vec![];
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    let mut roots = vec![q / a];
    if q != 0.0 {
        roots.push(c / q);
    }
    roots
}

fn natural_spline_moments(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut m = vec![0.0; n];
    if n < 3 {
        return m;
    }
    // Thomas algorithm on the interior equations.
    let k = n - 2;
    let mut diag = vec![0.0; k];
    let mut upper = vec![0.0; k];
    let mut rhs = vec![0.0; k];
    for i in 1..n - 1 {
        let h0 = x[i] - x[i - 1];
        let h1 = x[i + 1] - x[i];
        diag[i - 1] = (h0 + h1) / 3.0;
        upper[i - 1] = h1 / 6.0;
        rhs[i - 1] = (y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0;
    }
    for i in 1..k {
        let lower = (x[i + 1] - x[i]) / 6.0;
        let w = lower / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    let mut sol = vec![0.0; k];
    sol[k - 1] = rhs[k - 1] / diag[k - 1];
    for i in (0..k - 1).rev() {
        sol[i] = (rhs[i] - upper[i] * sol[i + 1]) / diag[i];
    }
    m[1..n - 1].copy_from_slice(&sol);
    m
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SymbolKind {
    /// Δ + (|p| − p₀)²/(2μ)
    Roton { gap: f64, mass: f64, p0: f64 },
    /// (p² − μ)·coth(β(p² − μ)/2)
    Bcs { mu: f64, beta: f64 },
    /// (|p| − p₀)²
    MexicanHat { p0: f64 },
    CustomRadial(RadialProfile),
}

impl SymbolKind {
    pub fn tag(&self) -> &'static str {
        match self {
            SymbolKind::Roton { .. } => "roton",
            SymbolKind::Bcs { .. } => "bcs",
            SymbolKind::MexicanHat { .. } => "mexican-hat",
            SymbolKind::CustomRadial(_) => "custom-radial",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispersionSymbol {
    dimension: usize,
    kind: SymbolKind,
}

const BCS_SERIES_WINDOW: f64 = 1e-6;

impl DispersionSymbol {
    pub fn new(dimension: usize, kind: SymbolKind) -> Result<Self> {
        if !(2..=3).contains(&dimension) {
            return Err(Error::InvalidInput(format!(
                "symbol dimension must be 2 or 3, got {dimension}"
            )));
        }
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidInput(format!(
                    "parameter {name} must be strictly positive, got {v}"
                )))
            }
        };
        match &kind {
            SymbolKind::Roton { gap, mass, p0 } => {
                positive("delta", *gap)?;
                positive("mu", *mass)?;
                positive("p0", *p0)?;
            }
            SymbolKind::Bcs { mu, beta } => {
                positive("mu", *mu)?;
                positive("beta", *beta)?;
            }
            SymbolKind::MexicanHat { p0 } => positive("p0", *p0)?,
            SymbolKind::CustomRadial(_) => {}
        }
        Ok(Self { dimension, kind })
    }

    pub fn roton(dimension: usize, gap: f64, mass: f64, p0: f64) -> Result<Self> {
        Self::new(dimension, SymbolKind::Roton { gap, mass, p0 })
    }

    pub fn bcs(dimension: usize, mu: f64, beta: f64) -> Result<Self> {
        Self::new(dimension, SymbolKind::Bcs { mu, beta })
    }

    pub fn mexican_hat(dimension: usize, p0: f64) -> Result<Self> {
        Self::new(dimension, SymbolKind::MexicanHat { p0 })
    }

    pub fn custom_radial(dimension: usize, profile: RadialProfile) -> Result<Self> {
        Self::new(dimension, SymbolKind::CustomRadial(profile))
    }

    pub fn kind(&self) -> &SymbolKind {
        &self.kind
    }

    /// The radial profile r ↦ H₀(r·e).
    pub fn radial(&self, r: f64) -> f64 {
        match &self.kind {
            SymbolKind::Roton { gap, mass, p0 } => gap + (r - p0).powi(2) / (2.0 * mass),
            SymbolKind::Bcs { mu, beta } => {
                let x = r * r - mu;
                if x.abs() < BCS_SERIES_WINDOW {
                    2.0 / beta + beta * x * x / 6.0
                } else {
                    x / (0.5 * beta * x).tanh()
                }
            }
            SymbolKind::MexicanHat { p0 } => (r - p0).powi(2),
            SymbolKind::CustomRadial(profile) => profile.eval(r),
        }
    }

    pub fn radial_second_derivative(&self, r: f64) -> f64 {
        match &self.kind {
            SymbolKind::Roton { mass, .. } => 1.0 / mass,
            SymbolKind::MexicanHat { .. } => 2.0,
            SymbolKind::Bcs { mu, beta } => {
                let x = r * r - mu;
                let (d1, d2) = if x.abs() < 1e-4 {
                    (beta * x / 3.0, beta / 3.0)
                } else {
                    // f(x) = x coth(βx/2)
                    let y = 0.5 * beta * x;
                    let coth = 1.0 / y.tanh();
                    let csch2 = coth * coth - 1.0;
                    let d1 = coth - y * csch2;
                    let d2 = beta * csch2 * (y * coth - 1.0);
                    (d1, d2)
                };
                d2 * 4.0 * r * r + 2.0 * d1
            }
            SymbolKind::CustomRadial(profile) => profile.eval3(r).2,
        }
    }

    /// H₀(p), rejecting malformed input.
    pub fn evaluate(&self, p: &[f64]) -> Result<f64> {
        let q = to_point(p, self.dimension)?;
        Ok(self.radial(norm(&q)))
    }

    /// Global minimum m and the radius of the extremum sphere.
    pub fn find_minimum(&self) -> Result<Minimum> {
        let (value, radius) = match &self.kind {
            SymbolKind::Roton { gap, p0, .. } => (*gap, *p0),
            SymbolKind::Bcs { mu, beta } => (2.0 / beta, mu.sqrt()),
            SymbolKind::MexicanHat { p0 } => (0.0, *p0),
            SymbolKind::CustomRadial(profile) => profile.minimum(),
        };
        if radius <= 1e-12 {
            return Err(Error::DegenerateSurface(format!(
                "{} profile is minimal at the origin; the minimum set is not a hypersurface",
                self.kind.tag()
            )));
        }
        Ok(Minimum { value, radius })
    }
}

impl Dispersion for DispersionSymbol {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn energy(&self, p: &Point) -> f64 {
        self.radial(norm(p))
    }

    fn minimum(&self) -> Result<Minimum> {
        self.find_minimum()
    }

    fn transverse_curvature(&self) -> Result<f64> {
        let min = self.find_minimum()?;
        Ok(self.radial_second_derivative(min.radius))
    }
}
