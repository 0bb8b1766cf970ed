//! Real potentials V ∈ L¹(ℝⁿ) and their Fourier transforms under
//! V̂(k) = (2π)^{−n/2} ∫ V(x) e^{−i⟨k,x⟩} dx.

mod tabulated;

pub use tabulated::{PotentialGrid, TabulatedPotential};

use crate::error::{Error, Result};
use crate::kernel::PairKernel;
use crate::special::{bessel_j1_over_x, spherical_ball_factor};
use crate::symbols::{norm, to_point, Point};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignFlag {
    Nonpositive,
    Nonnegative,
    SignChanging,
    Unknown,
}

/// One term a·exp(−|x|²/(2σ²)) of a Gaussian mixture.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianTerm {
    pub amplitude: f64,
    pub width: f64,
}

#[derive(Debug, Clone)]
pub enum PotentialKind {
    Zero,
    /// −c·exp(−|x|²/(2σ²))
    GaussianWell { depth: f64, width: f64 },
    /// −c on the ball |x| ≤ a
    BallWell { depth: f64, radius: f64 },
    /// Σ a_i exp(−|x|²/(2σ_i²))
    GaussianMix(Vec<GaussianTerm>),
    Tabulated(Arc<TabulatedPotential>),
}

#[derive(Debug, Clone)]
pub struct Potential {
    dimension: usize,
    kind: PotentialKind,
    sign: SignFlag,
    integral: f64,
}

/// Serializable summary of a potential for result records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialDescriptor {
    pub kind: String,
    pub dimension: usize,
    pub params: BTreeMap<String, f64>,
    pub sign: SignFlag,
    pub integral: f64,
}

fn check_dimension(dimension: usize) -> Result<()> {
    if (2..=3).contains(&dimension) {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "potential dimension must be 2 or 3, got {dimension}"
        )))
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{name} must be strictly positive, got {v}")))
    }
}

impl Potential {
    pub fn zero(dimension: usize) -> Result<Self> {
        check_dimension(dimension)?;
        Ok(Self {
            dimension,
            kind: PotentialKind::Zero,
            sign: SignFlag::Nonpositive,
            integral: 0.0,
        })
    }

    pub fn gaussian_well(dimension: usize, depth: f64, width: f64) -> Result<Self> {
        check_dimension(dimension)?;
        check_positive("depth", depth)?;
        check_positive("width", width)?;
        let integral = -depth * (2.0 * PI).powf(dimension as f64 / 2.0) * width.powi(dimension as i32);
        Ok(Self {
            dimension,
            kind: PotentialKind::GaussianWell { depth, width },
            sign: SignFlag::Nonpositive,
            integral,
        })
    }

    pub fn ball_well(dimension: usize, depth: f64, radius: f64) -> Result<Self> {
        check_dimension(dimension)?;
        check_positive("depth", depth)?;
        check_positive("radius", radius)?;
        let volume = if dimension == 2 {
            PI * radius * radius
        } else {
            4.0 * PI * radius.powi(3) / 3.0
        };
        Ok(Self {
            dimension,
            kind: PotentialKind::BallWell { depth, radius },
            sign: SignFlag::Nonpositive,
            integral: -depth * volume,
        })
    }

    pub fn gaussian_mix(dimension: usize, terms: Vec<GaussianTerm>) -> Result<Self> {
        check_dimension(dimension)?;
        if terms.is_empty() {
            return Err(Error::InvalidInput("a Gaussian mixture needs at least one term".into()));
        }
        for t in &terms {
            check_positive("width", t.width)?;
            if !t.amplitude.is_finite() {
                return Err(Error::InvalidInput("non-finite mixture amplitude".into()));
            }
        }
        let nf = dimension as f64;
        let integral = terms
            .iter()
            .map(|t| t.amplitude * (2.0 * PI).powf(nf / 2.0) * t.width.powi(dimension as i32))
            .sum();
        let sign = classify_mix(&terms);
        Ok(Self {
            dimension,
            kind: PotentialKind::GaussianMix(terms),
            sign,
            integral,
        })
    }

    pub fn tabulated(table: TabulatedPotential) -> Result<Self> {
        let dimension = table.grid().dimension();
        let sign = table.sign();
        let integral = table.grid().integral();
        Ok(Self {
            dimension,
            kind: PotentialKind::Tabulated(Arc::new(table)),
            sign,
            integral,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn kind(&self) -> &PotentialKind {
        &self.kind
    }

    pub fn sign(&self) -> SignFlag {
        self.sign
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.kind, PotentialKind::Zero)
    }

    pub fn tag(&self) -> &'static str {
        match self.kind {
            PotentialKind::Zero => "zero",
            PotentialKind::GaussianWell { .. } => "gaussian-well",
            PotentialKind::BallWell { .. } => "ball-well",
            PotentialKind::GaussianMix(_) => "gaussian-dimple-mix",
            PotentialKind::Tabulated(_) => "tabulated",
        }
    }

    /// Whether V̂(k) depends on |k| only.
    pub fn is_radial(&self) -> bool {
        !matches!(self.kind, PotentialKind::Tabulated(_))
    }

    /// ∫ V(x) dx.
    pub fn integral(&self) -> f64 {
        self.integral
    }

    /// V(x) without input validation.
    pub fn value_at(&self, x: &Point) -> f64 {
        let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        match &self.kind {
            PotentialKind::Zero => 0.0,
            PotentialKind::GaussianWell { depth, width } => -depth * (-r2 / (2.0 * width * width)).exp(),
            PotentialKind::BallWell { depth, radius } => {
                if r2 <= radius * radius {
                    -depth
                } else {
                    0.0
                }
            }
            PotentialKind::GaussianMix(terms) => terms
                .iter()
                .map(|t| t.amplitude * (-r2 / (2.0 * t.width * t.width)).exp())
                .sum(),
            PotentialKind::Tabulated(t) => t.value_at(x),
        }
    }

    pub fn value(&self, x: &[f64]) -> Result<f64> {
        Ok(self.value_at(&to_point(x, self.dimension)?))
    }

    /// V̂(k) for a validated point.
    pub fn fourier_at(&self, k: &Point) -> Result<Complex64> {
        let n = self.dimension as i32;
        let kk = norm(k);
        let re = match &self.kind {
            PotentialKind::Zero => 0.0,
            PotentialKind::GaussianWell { depth, width } => {
                -depth * width.powi(n) * (-0.5 * width * width * kk * kk).exp()
            }
            PotentialKind::BallWell { depth, radius } => {
                if n == 2 {
                    -depth * radius * radius * bessel_j1_over_x(kk * radius)
                } else {
                    -depth * (2.0 * PI).powf(-1.5) * 4.0 * PI * radius.powi(3)
                        * spherical_ball_factor(kk * radius)
                }
            }
            PotentialKind::GaussianMix(terms) => terms
                .iter()
                .map(|t| t.amplitude * t.width.powi(n) * (-0.5 * t.width * t.width * kk * kk).exp())
                .sum(),
            PotentialKind::Tabulated(t) => return t.fourier_at(k),
        };
        Ok(Complex64::new(re, 0.0))
    }

    /// V̂(k) = (2π)^{−n/2} ∫ V(x) e^{−i⟨k,x⟩} dx.
    pub fn fourier(&self, k: &[f64]) -> Result<Complex64> {
        self.fourier_at(&to_point(k, self.dimension)?)
    }

    /// sup |V|, exact for analytic kinds.
    pub fn sup_norm(&self) -> f64 {
        match &self.kind {
            PotentialKind::Zero => 0.0,
            PotentialKind::GaussianWell { depth, .. } | PotentialKind::BallWell { depth, .. } => *depth,
            PotentialKind::GaussianMix(terms) => {
                let rmax = terms.iter().fold(0.0f64, |m, t| m.max(t.width)) * 10.0;
                (0..=20_000)
                    .map(|i| {
                        let r = rmax * i as f64 / 20_000.0;
                        self.value_at(&[r, 0.0, 0.0]).abs()
                    })
                    .fold(0.0, f64::max)
            }
            PotentialKind::Tabulated(t) => t.grid().values().iter().fold(0.0, |m, v| m.max(v.abs())),
        }
    }

    pub fn descriptor(&self) -> PotentialDescriptor {
        let mut params = BTreeMap::new();
        match &self.kind {
            PotentialKind::Zero => {}
            PotentialKind::GaussianWell { depth, width } => {
                params.insert("c".into(), *depth);
                params.insert("sigma".into(), *width);
            }
            PotentialKind::BallWell { depth, radius } => {
                params.insert("c".into(), *depth);
                params.insert("radius".into(), *radius);
            }
            PotentialKind::GaussianMix(terms) => {
                for (i, t) in terms.iter().enumerate() {
                    params.insert(format!("a{i}"), t.amplitude);
                    params.insert(format!("sigma{i}"), t.width);
                }
            }
            PotentialKind::Tabulated(t) => {
                params.insert("edge".into(), t.grid().edge());
                params.insert("samples".into(), t.grid().samples() as f64);
                params.insert("band".into(), t.band());
            }
        }
        PotentialDescriptor {
            kind: self.tag().into(),
            dimension: self.dimension,
            params,
            sign: self.sign,
            integral: self.integral,
        }
    }
}

fn classify_mix(terms: &[GaussianTerm]) -> SignFlag {
    if terms.iter().all(|t| t.amplitude <= 0.0) {
        return SignFlag::Nonpositive;
    }
    if terms.iter().all(|t| t.amplitude >= 0.0) {
        return SignFlag::Nonnegative;
    }
    // Mixed amplitudes: the radial profile decides.
    let rmax = terms.iter().fold(0.0f64, |m, t| m.max(t.width)) * 12.0;
    let (mut neg, mut pos) = (false, false);
    for i in 0..=100_000 {
        let r = rmax * i as f64 / 100_000.0;
        let v: f64 = terms
            .iter()
            .map(|t| t.amplitude * (-r * r / (2.0 * t.width * t.width)).exp())
            .sum();
        neg |= v < 0.0;
        pos |= v > 0.0;
    }
    match (neg, pos) {
        (true, true) => SignFlag::SignChanging,
        (true, false) => SignFlag::Nonpositive,
        (false, true) => SignFlag::Nonnegative,
        _ => SignFlag::Unknown,
    }
}

impl PairKernel for Potential {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn eval(&self, p: &Point, q: &Point) -> Result<Complex64> {
        self.fourier_at(&[p[0] - q[0], p[1] - q[1], p[2] - q[2]])
    }
}
