//! Discretization of the surface operator 𝒱f(s) = ∫_S V̂(s − s′) f(s′) ω(ds′).
//!
//! With quadrature weights w_i the matrix A_ij = √w_i · v(s_i, s_j) · √w_j is
//! Hermitian and its eigenvalues approximate the spectrum of 𝒱 on L²(S, ω).

use crate::error::{Error, Result};
use crate::kernel::PairKernel;
use crate::linalg::{hermitian_defect, hermitian_eigen, hermitian_eigenvalues, hermitian_part, max_abs, CMatrix};
use crate::par;
use crate::potentials::{Potential, PotentialDescriptor};
use crate::surface::{MeshLayout, SurfaceMesh};
use crate::symbols::{norm, Point};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

const HERMITIAN_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct SurfaceOperatorMatrix {
    mesh: SurfaceMesh,
    matrix: CMatrix,
    eigenvalues: Vec<f64>,
    eigenvectors: CMatrix,
    norm: f64,
}

/// JSON result record for a surface spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceSpectrumRecord {
    pub mesh_size: usize,
    pub eigenvalues: Vec<f64>,
    pub negative_count: usize,
    pub threshold: f64,
    pub potential: PotentialDescriptor,
}

/// Weight-symmetrized kernel matrix, not yet diagonalized. Fails if the
/// kernel is not Hermitian to within 1e−12 (relative to the largest entry).
pub fn kernel_matrix(mesh: &SurfaceMesh, kernel: &dyn PairKernel) -> Result<CMatrix> {
    if kernel.dimension() != mesh.dimension() {
        return Err(Error::Precondition(format!(
            "kernel dimension {} does not match mesh dimension {}",
            kernel.dimension(),
            mesh.dimension()
        )));
    }
    let m = mesh.len();
    let nodes = mesh.nodes();
    let sqrt_w: Vec<f64> = mesh.weights().iter().map(|w| w.sqrt()).collect();
    let entries = par::try_map_range(m * m, |idx| -> Result<Complex64> {
        let (i, j) = (idx / m, idx % m);
        Ok(kernel.eval(&nodes[i], &nodes[j])? * (sqrt_w[i] * sqrt_w[j]))
    })?;
    let a = CMatrix::from_row_iterator(m, m, entries);
    ensure_hermitian(&a)?;
    Ok(a)
}

/// Rejects matrices whose Hermitian defect exceeds 1e−12 relative to the
/// largest entry.
pub fn ensure_hermitian(a: &CMatrix) -> Result<()> {
    let defect = hermitian_defect(a);
    if defect > HERMITIAN_TOLERANCE * max_abs(a).max(1.0) {
        return Err(Error::Consistency(format!(
            "assembled surface matrix is not Hermitian (defect {defect:e}); the kernel violates \
             v(q, p) = conj v(p, q)"
        )));
    }
    Ok(())
}

impl SurfaceOperatorMatrix {
    /// Discretizes 𝒱 for the potential's transform V̂(s − s′).
    pub fn assemble(mesh: &SurfaceMesh, potential: &Potential) -> Result<Self> {
        Self::assemble_kernel(mesh, potential)
    }

    pub fn assemble_kernel(mesh: &SurfaceMesh, kernel: &dyn PairKernel) -> Result<Self> {
        let a = kernel_matrix(mesh, kernel)?;
        Ok(Self::from_matrix(mesh.clone(), a))
    }

    /// Diagonalizes an already weight-symmetrized Hermitian matrix.
    pub fn from_matrix(mesh: SurfaceMesh, matrix: CMatrix) -> Self {
        let matrix = hermitian_part(&matrix);
        let eig = hermitian_eigen(&matrix);
        let norm = eig.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        Self {
            mesh,
            matrix,
            eigenvalues: eig.values,
            eigenvectors: eig.vectors,
            norm,
        }
    }

    pub fn mesh(&self) -> &SurfaceMesh {
        &self.mesh
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Ascending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &CMatrix {
        &self.eigenvectors
    }

    /// Spectral norm ‖A‖.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    /// Ψ_j(s_i) = (eigvec_j)_i / √w_i, normalized in L²(S, ω).
    pub fn eigenfunction(&self, j: usize) -> Vec<Complex64> {
        self.mesh
            .weights()
            .iter()
            .enumerate()
            .map(|(i, w)| self.eigenvectors[(i, j)] / w.sqrt())
            .collect()
    }

    pub fn default_threshold(&self) -> f64 {
        1e-8 * self.norm.max(1.0)
    }

    /// Number of eigenvalues below −threshold.
    pub fn count_negative(&self, threshold: f64) -> Result<usize> {
        if !(threshold > 0.0) {
            return Err(Error::Precondition(format!(
                "negative-count threshold must be positive, got {threshold}"
            )));
        }
        Ok(self.eigenvalues.iter().take_while(|&&e| e < -threshold).count())
    }

    pub fn record(&self, potential: PotentialDescriptor) -> SurfaceSpectrumRecord {
        let threshold = self.default_threshold();
        SurfaceSpectrumRecord {
            mesh_size: self.mesh.len(),
            eigenvalues: self.eigenvalues.clone(),
            negative_count: self.count_negative(threshold).unwrap_or(0),
            threshold,
            potential,
        }
    }
}

/// Eigenvalues of the circle discretization by rotational symmetry: the
/// matrix is circulant, so its spectrum is the DFT of its first row.
/// Returned ascending.
pub fn circulant_oracle(mesh: &SurfaceMesh, potential: &Potential) -> Result<Vec<f64>> {
    if mesh.dimension() != 2 || potential.dimension() != 2 {
        return Err(Error::Precondition("circulant oracle needs a 2-D circle mesh and potential".into()));
    }
    if mesh.layout() != MeshLayout::UniformCircle {
        return Err(Error::Precondition("circulant oracle needs a uniform circle mesh".into()));
    }
    let w = mesh.weights();
    if w.iter().any(|x| (x - w[0]).abs() > 1e-14 * w[0]) {
        return Err(Error::Precondition("circulant oracle needs equal weights".into()));
    }
    if !potential.is_radial() {
        return Err(Error::Precondition("circulant oracle needs a radial potential".into()));
    }
    let nodes = mesh.nodes();
    let s0 = nodes[0];
    let mut row: Vec<Complex64> = nodes
        .iter()
        .map(|s| {
            let k = [s0[0] - s[0], s0[1] - s[1], 0.0];
            potential.fourier_at(&k).map(|v| v * w[0])
        })
        .collect::<Result<_>>()?;
    FftPlanner::new().plan_fft_forward(row.len()).process(&mut row);
    let mut values: Vec<f64> = row.iter().map(|z| z.re).collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Outcome of the finite point-matrix test (V̂(s_j − s_k))_{jk}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointTest {
    pub matrix_re: Vec<Vec<f64>>,
    pub matrix_im: Vec<Vec<f64>>,
    pub eigenvalues: Vec<f64>,
    pub largest_eigenvalue: f64,
    pub is_negative_definite: bool,
}

impl PointTest {
    pub fn matrix(&self) -> CMatrix {
        let n = self.matrix_re.len();
        CMatrix::from_fn(n, n, |i, j| Complex64::new(self.matrix_re[i][j], self.matrix_im[i][j]))
    }
}

/// Builds (v(s_j, s_k)) and reports whether it is negative definite, i.e.
/// whether its largest eigenvalue is below −tolerance.
pub fn point_matrix_test(kernel: &dyn PairKernel, points: &[Point], tolerance: f64) -> Result<PointTest> {
    let n = points.len();
    let scale = points.iter().fold(0.0f64, |m, p| m.max(norm(p))).max(1e-300);
    for i in 0..n {
        for j in 0..i {
            let d = [
                points[i][0] - points[j][0],
                points[i][1] - points[j][1],
                points[i][2] - points[j][2],
            ];
            if norm(&d) <= 1e-12 * scale {
                return Err(Error::Precondition(format!(
                    "points {j} and {i} coincide; the point test needs distinct points"
                )));
            }
        }
    }
    let entries = par::try_map_range(n * n, |idx| kernel.eval(&points[idx / n], &points[idx % n]))?;
    let m = CMatrix::from_row_iterator(n, n, entries);
    let eigenvalues = hermitian_eigenvalues(&hermitian_part(&m));
    let largest = eigenvalues.last().copied().unwrap_or(f64::NEG_INFINITY);
    Ok(PointTest {
        matrix_re: (0..n).map(|i| (0..n).map(|j| m[(i, j)].re).collect()).collect(),
        matrix_im: (0..n).map(|i| (0..n).map(|j| m[(i, j)].im).collect()).collect(),
        eigenvalues,
        largest_eigenvalue: largest,
        is_negative_definite: n > 0 && largest < -tolerance,
    })
}

/// Points R(cos θ, sin θ) on a circle.
pub fn circle_points(radius: f64, angles: &[f64]) -> Vec<Point> {
    angles
        .iter()
        .map(|t| [radius * t.cos(), radius * t.sin(), 0.0])
        .collect()
}

/// `count` seeded points, uniform on the circle or sphere of radius `radius`.
pub fn random_surface_points(radius: f64, dimension: usize, count: usize, seed: u64) -> Result<Vec<Point>> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::Config(format!("radius must be positive and finite, got {radius}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match dimension {
        2 => {
            let angles: Vec<f64> = (0..count).map(|_| rng.random_range(0.0..TAU)).collect();
            Ok(circle_points(radius, &angles))
        }
        3 => Ok((0..count)
            .map(|_| {
                let z: f64 = rng.random_range(-1.0..1.0);
                let phi: f64 = rng.random_range(0.0..TAU);
                let rho = (1.0 - z * z).sqrt();
                [radius * rho * phi.cos(), radius * rho * phi.sin(), radius * z]
            })
            .collect()),
        _ => Err(Error::Config(format!("surface dimension must be 2 or 3, got {dimension}"))),
    }
}
