//! Two-band spin-orbit symbols on ℝ² and the associated surface operator.
//!
//! H₀(p) = [[p², a(p)], [ā(p), p²]] with a linear off-diagonal a. The lower
//! band λ₁ = p² − |a(p)| attains −α²/4 on the circle |p| = |α|/2. The surface
//! kernel carries the overlap of lower-band eigenvectors,
//! V̂(s − s′)·⟨u(s), u(s′)⟩.

use crate::error::{Error, Result};
use crate::kernel::PairKernel;
use crate::linalg::CMatrix;
use crate::par;
use crate::potentials::Potential;
use crate::surface::SurfaceMesh;
use crate::surface_operator::{ensure_hermitian, SurfaceOperatorMatrix};
use crate::symbols::{norm, Dispersion, Minimum, Point};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpinOrbitKind {
    Rashba,
    Dresselhaus,
}

impl SpinOrbitKind {
    pub fn tag(&self) -> &'static str {
        match self {
            SpinOrbitKind::Rashba => "rashba",
            SpinOrbitKind::Dresselhaus => "dresselhaus",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatrixSymbol {
    kind: SpinOrbitKind,
    alpha: f64,
}

/// Eigen-decomposition of H₀(p) with the lower-band vector gauge-fixed so
/// its first component is real and nonnegative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandDecomposition {
    pub lower: f64,
    pub upper: f64,
    pub vector: [Complex64; 2],
}

impl MatrixSymbol {
    pub fn new(kind: SpinOrbitKind, alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha == 0.0 {
            return Err(Error::Config(format!("spin-orbit coupling must be finite and nonzero, got {alpha}")));
        }
        Ok(Self { kind, alpha })
    }

    pub fn rashba(alpha: f64) -> Result<Self> {
        Self::new(SpinOrbitKind::Rashba, alpha)
    }

    pub fn dresselhaus(alpha: f64) -> Result<Self> {
        Self::new(SpinOrbitKind::Dresselhaus, alpha)
    }

    pub fn kind(&self) -> SpinOrbitKind {
        self.kind
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn off_diagonal(&self, p: &Point) -> Complex64 {
        match self.kind {
            SpinOrbitKind::Rashba => Complex64::new(p[1], p[0]) * self.alpha,
            SpinOrbitKind::Dresselhaus => Complex64::new(p[0], p[1]) * -self.alpha,
        }
    }

    /// Row-major 2×2 matrix H₀(p).
    pub fn matrix(&self, p: &Point) -> [[Complex64; 2]; 2] {
        let d = Complex64::new(p[0] * p[0] + p[1] * p[1], 0.0);
        let a = self.off_diagonal(p);
        [[d, a], [a.conj(), d]]
    }

    pub fn band_decompose(&self, p: &Point) -> Result<BandDecomposition> {
        let a = self.off_diagonal(p);
        let mag = a.norm();
        if mag == 0.0 {
            return Err(Error::GaugeSingularity(p[..2].to_vec()));
        }
        let p2 = p[0] * p[0] + p[1] * p[1];
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Ok(BandDecomposition {
            lower: p2 - mag,
            upper: p2 + mag,
            vector: [Complex64::new(h, 0.0), -a.conj() / mag * h],
        })
    }

    pub fn lower_band(&self) -> LowerBand {
        LowerBand { symbol: *self }
    }

    /// −α²/4 on |p| = |α|/2.
    pub fn band_minimum(&self) -> Minimum {
        Minimum {
            value: -self.alpha * self.alpha / 4.0,
            radius: self.alpha.abs() / 2.0,
        }
    }
}

/// λ₁ as a scalar dispersion, for the kinetic part of the variational form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBand {
    symbol: MatrixSymbol,
}

impl Dispersion for LowerBand {
    fn dimension(&self) -> usize {
        2
    }

    fn energy(&self, p: &Point) -> f64 {
        let r = norm(p);
        r * r - self.symbol.alpha.abs() * r
    }

    fn minimum(&self) -> Result<Minimum> {
        Ok(self.symbol.band_minimum())
    }

    fn transverse_curvature(&self) -> Result<f64> {
        Ok(2.0)
    }
}

/// Lower-band vectors at the mesh nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct BandFrame {
    vectors: Vec<[Complex64; 2]>,
}

impl BandFrame {
    pub fn new(symbol: &MatrixSymbol, mesh: &SurfaceMesh) -> Result<Self> {
        if mesh.dimension() != 2 {
            return Err(Error::Precondition("spin-orbit symbols are two-dimensional".into()));
        }
        let vectors = mesh
            .nodes()
            .iter()
            .map(|s| symbol.band_decompose(s).map(|b| b.vector))
            .collect::<Result<_>>()?;
        Ok(Self { vectors })
    }

    /// Same frame with u(s_i) multiplied by e^{iθ_i}.
    pub fn with_phases(&self, phases: &[f64]) -> Result<Self> {
        if phases.len() != self.vectors.len() {
            return Err(Error::Precondition(format!(
                "{} phases for {} frame vectors",
                phases.len(),
                self.vectors.len()
            )));
        }
        let vectors = self
            .vectors
            .iter()
            .zip(phases)
            .map(|(u, t)| {
                let z = Complex64::from_polar(1.0, *t);
                [u[0] * z, u[1] * z]
            })
            .collect();
        Ok(Self { vectors })
    }

    pub fn vectors(&self) -> &[[Complex64; 2]] {
        &self.vectors
    }

    pub fn overlap(&self, i: usize, j: usize) -> Complex64 {
        overlap(&self.vectors[i], &self.vectors[j])
    }
}

fn overlap(u: &[Complex64; 2], v: &[Complex64; 2]) -> Complex64 {
    u[0].conj() * v[0] + u[1].conj() * v[1]
}

/// v(p, q) = V̂(p − q)·⟨u(p), u(q)⟩.
#[derive(Debug, Clone)]
pub struct SpinKernel {
    symbol: MatrixSymbol,
    potential: Potential,
}

impl SpinKernel {
    pub fn new(symbol: MatrixSymbol, potential: Potential) -> Result<Self> {
        if potential.dimension() != 2 {
            return Err(Error::Precondition("spin-orbit kernels need a 2-D potential".into()));
        }
        Ok(Self { symbol, potential })
    }
}

impl PairKernel for SpinKernel {
    fn dimension(&self) -> usize {
        2
    }

    fn eval(&self, p: &Point, q: &Point) -> Result<Complex64> {
        let u = self.symbol.band_decompose(p)?.vector;
        let v = self.symbol.band_decompose(q)?.vector;
        let k = [p[0] - q[0], p[1] - q[1], 0.0];
        Ok(self.potential.fourier_at(&k)? * overlap(&u, &v))
    }
}

/// Surface matrix √w_i V̂(s_i − s_j)⟨u_i, u_j⟩ √w_j for an explicit frame.
pub fn assemble_with_frame(mesh: &SurfaceMesh, potential: &Potential, frame: &BandFrame) -> Result<SurfaceOperatorMatrix> {
    if potential.dimension() != mesh.dimension() {
        return Err(Error::Precondition("potential and mesh dimensions differ".into()));
    }
    let m = mesh.len();
    if frame.vectors.len() != m {
        return Err(Error::Precondition("frame does not match the mesh".into()));
    }
    let nodes = mesh.nodes();
    let sqrt_w: Vec<f64> = mesh.weights().iter().map(|w| w.sqrt()).collect();
    let entries = par::try_map_range(m * m, |idx| -> Result<Complex64> {
        let (i, j) = (idx / m, idx % m);
        let k = [nodes[i][0] - nodes[j][0], nodes[i][1] - nodes[j][1], 0.0];
        Ok(potential.fourier_at(&k)? * frame.overlap(i, j) * (sqrt_w[i] * sqrt_w[j]))
    })?;
    let a = CMatrix::from_row_iterator(m, m, entries);
    ensure_hermitian(&a)?;
    Ok(SurfaceOperatorMatrix::from_matrix(mesh.clone(), a))
}

/// Discretized 𝒰 on a mesh of the band-minimum circle.
pub fn assemble_spin_kernel(mesh: &SurfaceMesh, potential: &Potential, symbol: &MatrixSymbol) -> Result<SurfaceOperatorMatrix> {
    let radius = symbol.band_minimum().radius;
    if (mesh.radius() - radius).abs() > 1e-9 * radius {
        return Err(Error::Precondition(format!(
            "mesh radius {} is not the band-minimum radius {radius}",
            mesh.radius()
        )));
    }
    let frame = BandFrame::new(symbol, mesh)?;
    assemble_with_frame(mesh, potential, &frame)
}
