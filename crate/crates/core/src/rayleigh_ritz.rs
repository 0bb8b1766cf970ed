//! Variational certificates for eigenvalues below the threshold m.
//!
//! Trial functions live in a thin shell around the extremum surface,
//! f_j(p) = ε⁻¹ φ(t/ε) Ψ_j(s) in tubular coordinates p = L(s, t). Their Gram
//! matrix of H − m tends to (2π)^{−n/2}·diag(E₁, …, E_N) as ε → 0, where E_j
//! are the surface operator eigenvalues, so h(ε) is negative definite for
//! small ε.

use crate::error::{Error, Result};
use crate::kernel::PairKernel;
use crate::linalg::{hermitian_defect, hermitian_eigenvalues, hermitian_part, CMatrix};
use crate::par;
use crate::quadrature::gauss_legendre;
use crate::surface::{SurfaceMesh, TubularChart, DEFAULT_HALF_WIDTH_FRACTION};
use crate::surface_operator::SurfaceOperatorMatrix;
use crate::symbols::{Dispersion, Point};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// ε as fractions of the chart half-width r.
pub const DEFAULT_SCHEDULE: [f64; 4] = [0.2, 0.1, 0.05, 0.025];
pub const DEFAULT_TRANSVERSE_ORDER: usize = 12;

const RADIUS_TOLERANCE: f64 = 1e-9;

/// Normalized bump φ(u) = c·exp(−1/(1−u²)) on (−1, 1) with its
/// Gauss–Legendre rule. c is chosen so the stored rule integrates φ to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct TransverseProfile {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    values: Vec<f64>,
    scale: f64,
}

fn bump(u: f64) -> f64 {
    if u.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - u * u)).exp()
    }
}

impl TransverseProfile {
    pub fn new(order: usize) -> Result<Self> {
        if order < 2 {
            return Err(Error::Config(format!("transverse order must be at least 2, got {order}")));
        }
        let (nodes, weights) = gauss_legendre(order);
        let raw: f64 = nodes.iter().zip(&weights).map(|(u, g)| g * bump(*u)).sum();
        let scale = 1.0 / raw;
        let values = nodes.iter().map(|u| scale * bump(*u)).collect();
        Ok(Self {
            nodes,
            weights,
            values,
            scale,
        })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// φ at the quadrature nodes.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, u: f64) -> f64 {
        self.scale * bump(u)
    }

    /// ∫φ by the stored rule.
    pub fn integral(&self) -> f64 {
        self.weights.iter().zip(&self.values).map(|(g, v)| g * v).sum()
    }
}

impl Default for TransverseProfile {
    fn default() -> Self {
        Self::new(DEFAULT_TRANSVERSE_ORDER).expect("default order is valid")
    }
}

fn check_fraction(fraction: f64) -> Result<()> {
    if fraction > 0.0 && fraction <= 1.0 {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "ε must be a fraction of the chart half-width in (0, 1], got {fraction}"
        )))
    }
}

fn check_trials(chart: &TubularChart, trials: &[Vec<Complex64>]) -> Result<()> {
    let m = chart.mesh().len();
    if let Some(bad) = trials.iter().position(|t| t.len() != m) {
        return Err(Error::Precondition(format!(
            "trial {bad} has {} samples but the mesh has {m} nodes",
            trials[bad].len()
        )));
    }
    Ok(())
}

/// Kinetic part (1/ε) Σ_i Σ_a w_i g_a (H₀(L(s_i, εu_a)) − m) φ(u_a)² ρ Ψ̄_j Ψ_k
/// for every pair of trials.
pub fn kinetic_matrix(
    dispersion: &dyn Dispersion,
    chart: &TubularChart,
    trials: &[Vec<Complex64>],
    profile: &TransverseProfile,
    fraction: f64,
) -> Result<CMatrix> {
    check_fraction(fraction)?;
    check_trials(chart, trials)?;
    if dispersion.dimension() != chart.mesh().dimension() {
        return Err(Error::Precondition("symbol and mesh dimensions differ".into()));
    }
    let m = dispersion.minimum()?.value;
    let eps = fraction * chart.half_width();
    let mesh = chart.mesh();
    let transverse: Vec<(f64, f64)> = profile
        .nodes()
        .iter()
        .zip(profile.weights())
        .zip(profile.values())
        .map(|((u, g), phi)| (eps * u, g * phi * phi * chart.jacobian(eps * u)))
        .collect();
    let kappa = par::map_range(mesh.len(), |i| {
        let sum: f64 = transverse
            .iter()
            .map(|(t, c)| c * (dispersion.energy(&chart.map_node(i, *t)) - m))
            .sum();
        mesh.weights()[i] * sum / eps
    });
    let n = trials.len();
    Ok(CMatrix::from_fn(n, n, |j, k| {
        kappa
            .iter()
            .enumerate()
            .map(|(i, w)| trials[j][i].conj() * trials[k][i] * *w)
            .sum()
    }))
}

/// Potential part I(ε): the double tube integral of v(L(s, εu), L(s′, εu′))
/// against φ(u)φ(u′) Ψ̄_j(s) Ψ_k(s′) ρ ρ′. Costs (M·T)² kernel calls.
pub fn potential_matrix(
    kernel: &dyn PairKernel,
    chart: &TubularChart,
    trials: &[Vec<Complex64>],
    profile: &TransverseProfile,
    fraction: f64,
) -> Result<CMatrix> {
    check_fraction(fraction)?;
    check_trials(chart, trials)?;
    if kernel.dimension() != chart.mesh().dimension() {
        return Err(Error::Precondition("kernel and mesh dimensions differ".into()));
    }
    let eps = fraction * chart.half_width();
    let mesh = chart.mesh();
    let t_order = profile.order();
    let cloud_len = mesh.len() * t_order;
    let n = trials.len();
    let mut cloud: Vec<Point> = Vec::with_capacity(cloud_len);
    let mut weight = Vec::with_capacity(cloud_len);
    for (i, w) in mesh.weights().iter().enumerate() {
        for a in 0..t_order {
            let t = eps * profile.nodes()[a];
            cloud.push(chart.map_node(i, t));
            weight.push(w * profile.weights()[a] * profile.values()[a] * chart.jacobian(t));
        }
    }
    let y = CMatrix::from_fn(cloud_len, n, |p, j| trials[j][p / t_order] * weight[p]);
    let rows = par::try_map_range(cloud_len, |p| -> Result<Vec<Complex64>> {
        let mut acc = vec![Complex64::default(); n];
        for q in 0..cloud_len {
            if weight[q] == 0.0 {
                continue;
            }
            let v = kernel.eval(&cloud[p], &cloud[q])?;
            for (j, slot) in acc.iter_mut().enumerate() {
                *slot += v * y[(q, j)];
            }
        }
        Ok(acc)
    })?;
    let z = CMatrix::from_fn(cloud_len, n, |p, j| rows[p][j]);
    Ok(y.adjoint() * z)
}

pub fn kinetic_form(
    dispersion: &dyn Dispersion,
    chart: &TubularChart,
    psi_j: &[Complex64],
    psi_k: &[Complex64],
    profile: &TransverseProfile,
    fraction: f64,
) -> Result<Complex64> {
    let h = kinetic_matrix(dispersion, chart, &[psi_j.to_vec(), psi_k.to_vec()], profile, fraction)?;
    Ok(h[(0, 1)])
}

pub fn potential_form(
    kernel: &dyn PairKernel,
    chart: &TubularChart,
    psi_j: &[Complex64],
    psi_k: &[Complex64],
    profile: &TransverseProfile,
    fraction: f64,
) -> Result<Complex64> {
    let h = potential_matrix(kernel, chart, &[psi_j.to_vec(), psi_k.to_vec()], profile, fraction)?;
    Ok(h[(0, 1)])
}

/// (2π)^{−n/2}: the potential part of ⟨f, (H − m) f⟩ in momentum space is
/// this factor times I(ε) under the unitary transform convention.
pub fn potential_factor(dimension: usize) -> f64 {
    (2.0 * std::f64::consts::PI).powf(-(dimension as f64) / 2.0)
}

/// h(ε) = ⟨f_j, (H − m) f_k⟩ = kinetic + (2π)^{−n/2}·I(ε).
pub fn quadratic_form(
    dispersion: &dyn Dispersion,
    kernel: &dyn PairKernel,
    chart: &TubularChart,
    trials: &[Vec<Complex64>],
    profile: &TransverseProfile,
    fraction: f64,
) -> Result<CMatrix> {
    let factor = potential_factor(chart.mesh().dimension());
    Ok(kinetic_matrix(dispersion, chart, trials, profile, fraction)?
        + potential_matrix(kernel, chart, trials, profile, fraction)? * Complex64::new(factor, 0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificationStatus {
    Certified,
    Failed,
}

/// h(ε) at one scheduled ε.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormSample {
    pub fraction: f64,
    pub epsilon: f64,
    pub h_re: Vec<Vec<f64>>,
    pub h_im: Vec<Vec<f64>>,
    /// Of the Hermitian part, ascending.
    pub eigenvalues: Vec<f64>,
    pub negative_definite: bool,
    /// ‖h(ε) − diag(E)‖_max.
    pub error_max: f64,
    pub hermitian_defect: f64,
}

impl FormSample {
    pub fn matrix(&self) -> CMatrix {
        let n = self.h_re.len();
        CMatrix::from_fn(n, n, |i, j| Complex64::new(self.h_re[i][j], self.h_im[i][j]))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub requested: usize,
    pub half_width: f64,
    pub transverse_order: usize,
    /// Eigenvalues E_j of the surface operator behind the trials.
    pub surface_eigenvalues: Vec<f64>,
    /// Limit of h(ε): (2π)^{−n/2}·E_j.
    pub targets: Vec<f64>,
    pub samples: Vec<FormSample>,
    pub certified_count: usize,
    pub largest_negative_definite_fraction: Option<f64>,
    /// error_max(ε_{i+1}) / error_max(ε_i) along the schedule.
    pub convergence_ratios: Vec<f64>,
    /// Every scheduled ε below the largest certifying one also certifies.
    pub monotone: bool,
    pub status: CertificationStatus,
}

impl Certificate {
    pub fn is_certified(&self) -> bool {
        self.status == CertificationStatus::Certified
    }

    pub fn errors(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.error_max).collect()
    }
}

fn check_schedule(schedule: &[f64]) -> Result<()> {
    if schedule.is_empty() {
        return Err(Error::Config("ε schedule is empty".into()));
    }
    schedule.iter().try_for_each(|f| check_fraction(*f))
}

/// Certifies N eigenvalues below m from the N most negative eigenpairs of
/// the surface operator on `mesh`. The mesh radius must be the radius of
/// the symbol's extremum sphere.
pub fn certify(
    dispersion: &dyn Dispersion,
    kernel: &dyn PairKernel,
    mesh: &SurfaceMesh,
    n: usize,
    schedule: &[f64],
) -> Result<Certificate> {
    check_schedule(schedule)?;
    if dispersion.dimension() != mesh.dimension() || kernel.dimension() != mesh.dimension() {
        return Err(Error::Precondition("symbol, kernel and mesh dimensions differ".into()));
    }
    let min = dispersion.minimum()?;
    if (min.radius - mesh.radius()).abs() > RADIUS_TOLERANCE * min.radius {
        return Err(Error::Precondition(format!(
            "mesh radius {} is not the extremum radius {}",
            mesh.radius(),
            min.radius
        )));
    }
    let op = SurfaceOperatorMatrix::assemble_kernel(mesh, kernel)?;
    let available = op.count_negative(op.default_threshold())?;
    if n > available {
        return Err(Error::Precondition(format!(
            "requested {n} trial functions but the surface operator has only {available} negative eigenvalues"
        )));
    }
    let trials: Vec<Vec<Complex64>> = (0..n).map(|j| op.eigenfunction(j)).collect();
    let targets = op.eigenvalues()[..n].to_vec();
    let chart = TubularChart::new(mesh.clone(), DEFAULT_HALF_WIDTH_FRACTION)?;
    certify_with_trials(dispersion, kernel, &chart, &trials, &targets, &TransverseProfile::default(), schedule)
}

/// Same sweep with caller-chosen trial functions. `surface_eigenvalues` are
/// the values E_j with h(ε) → (2π)^{−n/2}·diag(E).
pub fn certify_with_trials(
    dispersion: &dyn Dispersion,
    kernel: &dyn PairKernel,
    chart: &TubularChart,
    trials: &[Vec<Complex64>],
    surface_eigenvalues: &[f64],
    profile: &TransverseProfile,
    schedule: &[f64],
) -> Result<Certificate> {
    check_schedule(schedule)?;
    check_trials(chart, trials)?;
    if surface_eigenvalues.len() != trials.len() {
        return Err(Error::Precondition(format!(
            "{} trials but {} surface eigenvalues",
            trials.len(),
            surface_eigenvalues.len()
        )));
    }
    let factor = potential_factor(chart.mesh().dimension());
    let targets: Vec<f64> = surface_eigenvalues.iter().map(|e| e * factor).collect();
    let n = trials.len();
    let mut samples = Vec::with_capacity(schedule.len());
    for &fraction in schedule {
        let h = quadratic_form(dispersion, kernel, chart, trials, profile, fraction)?;
        let eigenvalues = hermitian_eigenvalues(&hermitian_part(&h));
        let error_max = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| {
                let target = if i == j { targets[i] } else { 0.0 };
                (h[(i, j)] - target).norm()
            })
            .fold(0.0, f64::max);
        samples.push(FormSample {
            fraction,
            epsilon: fraction * chart.half_width(),
            h_re: (0..n).map(|i| (0..n).map(|j| h[(i, j)].re).collect()).collect(),
            h_im: (0..n).map(|i| (0..n).map(|j| h[(i, j)].im).collect()).collect(),
            negative_definite: eigenvalues.iter().all(|e| *e < 0.0),
            eigenvalues,
            error_max,
            hermitian_defect: hermitian_defect(&h),
        });
    }
    let largest = samples
        .iter()
        .filter(|s| s.negative_definite)
        .map(|s| s.fraction)
        .fold(None, |best: Option<f64>, f| Some(best.map_or(f, |b| b.max(f))));
    let monotone = match largest {
        Some(star) => samples.iter().filter(|s| s.fraction <= star).all(|s| s.negative_definite),
        None => true,
    };
    let convergence_ratios = samples
        .windows(2)
        .map(|w| w[1].error_max / w[0].error_max)
        .collect();
    let status = if largest.is_some() {
        CertificationStatus::Certified
    } else {
        CertificationStatus::Failed
    };
    Ok(Certificate {
        requested: n,
        half_width: chart.half_width(),
        transverse_order: profile.order(),
        surface_eigenvalues: surface_eigenvalues.to_vec(),
        targets,
        samples,
        certified_count: if largest.is_some() { n } else { 0 },
        largest_negative_definite_fraction: largest,
        convergence_ratios,
        monotone,
        status,
    })
}


#[cfg(test)]
mod properties {
    use super::*;
    use crate::symbols::DispersionSymbol;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn kinetic_form_is_positive_semidefinite(fraction in 0.01f64..1.0, p0 in 0.5f64..2.0, seed in 0u64..1000) {
            let hat = DispersionSymbol::mexican_hat(2, p0).unwrap();
            let mesh = SurfaceMesh::circle(p0, 24).unwrap();
            let chart = TubularChart::new(mesh, 0.25).unwrap();
            let trials: Vec<Vec<Complex64>> = (0..3)
                .map(|j| {
                    (0..24)
                        .map(|i| Complex64::from_polar(1.0, ((seed + j) as f64) * 0.37 * i as f64))
                        .collect()
                })
                .collect();
            let k = kinetic_matrix(&hat, &chart, &trials, &TransverseProfile::default(), fraction).unwrap();
            let eig = hermitian_eigenvalues(&hermitian_part(&k));
            prop_assert!(eig[0] >= -1e-12 * eig[2].abs().max(1.0));
        }
    }
}
