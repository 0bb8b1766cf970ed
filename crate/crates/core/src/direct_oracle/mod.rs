//! Brute-force reference for the bound states of H = H₀(−i∇) + V.
//!
//! The operator is discretized on a periodic box of edge ℒ with G samples per
//! edge: H₀ is diagonal on the dual lattice p = 2πk/ℒ, V is diagonal on the
//! grid x = −ℒ/2 + iℒ/G. For radial symbols and real V the discrete operator
//! is real symmetric, so the lowest eigenpairs are found on real vectors,
//! two of which share one complex FFT.

pub mod lobpcg;

use crate::error::{Error, Result};
use crate::fft::{signed_index, FftNd};
use crate::par;
use crate::potentials::Potential;
use crate::symbols::{Dispersion, Point};
use lobpcg::{lobpcg, BlockOperator, LobpcgOptions};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub const MAX_EIGENVALUES: usize = 64;
pub const MAX_GRID_3D: usize = 96;
pub const MAX_GRID_2D: usize = 4096;
pub const DEFAULT_DELTA_LEVELS: f64 = 3.0;
pub const DEFAULT_MAX_ITERATIONS: usize = 3000;
const RELATIVE_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct OracleFlags {
    /// 2π/ℒ exceeds R/8: the box is too small to resolve the surface well.
    pub under_resolved_surface: bool,
    /// Every computed Ritz value lay below the energy; more may exist.
    pub count_is_lower_bound: bool,
}

#[derive(Debug)]
pub struct GridHamiltonian {
    dimension: usize,
    box_edge: f64,
    grid: usize,
    minimum: f64,
    radius: f64,
    delta: f64,
    symbol_table: Vec<f64>,
    potential_table: Vec<f64>,
    potential_sup: f64,
    free: bool,
    fft: FftNd,
    flags: OracleFlags,
    seed: u64,
    max_iterations: usize,
}

/// Eigenvalues with their residual norms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenReport {
    pub eigenvalues: Vec<f64>,
    pub residuals: Vec<f64>,
    pub iterations: usize,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountReport {
    pub energy: f64,
    pub count: usize,
    /// Ritz values of the final block, ascending.
    pub ritz_values: Vec<f64>,
    pub residuals: Vec<f64>,
    pub iterations: usize,
    pub count_is_lower_bound: bool,
}

/// JSON result record of an oracle run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleRecord {
    pub dimension: usize,
    pub box_edge: f64,
    pub grid: usize,
    pub minimum: f64,
    pub delta: f64,
    pub energy: f64,
    pub count: usize,
    pub eigenvalues: Vec<f64>,
    pub residuals: Vec<f64>,
    pub iterations: usize,
    pub flags: OracleFlags,
}

impl GridHamiltonian {
    pub fn new(
        dispersion: &dyn Dispersion,
        potential: &Potential,
        box_edge: f64,
        grid: usize,
        delta_levels: f64,
    ) -> Result<Self> {
        let dimension = dispersion.dimension();
        if potential.dimension() != dimension {
            return Err(Error::Precondition("symbol and potential dimensions differ".into()));
        }
        if !(2..=3).contains(&dimension) {
            return Err(Error::Config(format!("dimension must be 2 or 3, got {dimension}")));
        }
        if !(box_edge.is_finite() && box_edge > 0.0) {
            return Err(Error::Config(format!("box edge must be positive, got {box_edge}")));
        }
        if grid < 8 || grid % 2 != 0 {
            return Err(Error::Config(format!("grid must be even and at least 8, got {grid}")));
        }
        let cap = if dimension == 3 { MAX_GRID_3D } else { MAX_GRID_2D };
        if grid > cap {
            return Err(Error::Config(format!(
                "grid {grid} exceeds the {dimension}-D limit of {cap} samples per edge"
            )));
        }
        if !(delta_levels.is_finite() && delta_levels > 0.0) {
            return Err(Error::Config(format!("delta_levels must be positive, got {delta_levels}")));
        }
        let min = dispersion.minimum()?;
        let spacing = 2.0 * PI / box_edge;
        let cutoff = PI * grid as f64 / box_edge;
        if cutoff < 4.0 * min.radius {
            return Err(Error::Config(format!(
                "momentum cutoff πG/ℒ = {cutoff} is below 4R = {}; increase the grid",
                4.0 * min.radius
            )));
        }
        let curvature = dispersion.transverse_curvature()?;
        let delta = delta_levels * 0.5 * curvature * spacing * spacing;

        let dims = vec![grid; dimension];
        let total = grid.pow(dimension as u32);
        let coords = |idx: usize, lattice: &dyn Fn(usize) -> f64| -> Point {
            let mut p = [0.0; 3];
            let mut rest = idx;
            for axis in (0..dimension).rev() {
                p[axis] = lattice(rest % grid);
                rest /= grid;
            }
            p
        };
        let momentum = |i: usize| spacing * signed_index(i, grid) as f64;
        let position = |i: usize| -0.5 * box_edge + i as f64 * box_edge / grid as f64;
        let symbol_table = par::map_range(total, |idx| dispersion.energy(&coords(idx, &momentum)));
        let potential_table = par::map_range(total, |idx| potential.value_at(&coords(idx, &position)));
        let potential_sup = potential_table.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let free = potential_table.iter().all(|v| *v == 0.0);

        let fft = FftNd::new(&dims);
        let h = Self {
            dimension,
            box_edge,
            grid,
            minimum: min.value,
            radius: min.radius,
            delta,
            symbol_table,
            potential_table,
            potential_sup,
            free,
            fft,
            flags: OracleFlags {
                under_resolved_surface: spacing > min.radius / 8.0,
                count_is_lower_bound: false,
            },
            seed: 0,
            max_iterations: DEFAULT_MAX_ITERATIONS,
        };
        h.check_even_symbol()?;
        Ok(h)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_max_iterations(mut self, max_iterations: usize) -> Self {
        self.max_iterations = max_iterations;
        self
    }

    fn check_even_symbol(&self) -> Result<()> {
        let g = self.grid;
        let d = self.dimension;
        let scale = self.symbol_table.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for idx in 0..self.len() {
            let mut rest = idx;
            let mut mirror = 0;
            let mut stride = 1;
            for _ in 0..d {
                let i = rest % g;
                mirror += ((g - i) % g) * stride;
                stride *= g;
                rest /= g;
            }
            if (self.symbol_table[idx] - self.symbol_table[mirror]).abs() > 1e-12 * scale {
                return Err(Error::Precondition(
                    "the oracle needs an even symbol H₀(−p) = H₀(p) on the dual lattice".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn box_edge(&self) -> f64 {
        self.box_edge
    }

    pub fn grid(&self) -> usize {
        self.grid
    }

    pub fn len(&self) -> usize {
        self.symbol_table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbol_table.is_empty()
    }

    /// m, the infimum of the symbol.
    pub fn minimum(&self) -> f64 {
        self.minimum
    }

    pub fn surface_radius(&self) -> f64 {
        self.radius
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// m − δ.
    pub fn default_energy(&self) -> f64 {
        self.minimum - self.delta
    }

    pub fn flags(&self) -> OracleFlags {
        self.flags
    }

    /// H₀(p_k) in FFT order.
    pub fn symbol_table(&self) -> &[f64] {
        &self.symbol_table
    }

    /// V(x_i) in row-major grid order.
    pub fn potential_table(&self) -> &[f64] {
        &self.potential_table
    }

    pub fn potential_sup(&self) -> f64 {
        self.potential_sup
    }

    pub fn spectral_scale(&self) -> f64 {
        let top = self.symbol_table.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        top + self.potential_sup
    }

    pub fn tolerance(&self) -> f64 {
        RELATIVE_TOLERANCE * self.spectral_scale().max(1.0)
    }

    /// Hψ = FFT⁻¹(H₀ · FFT ψ) + V ψ.
    pub fn apply(&self, psi: &[Complex64]) -> Result<Vec<Complex64>> {
        if psi.len() != self.len() {
            return Err(Error::Precondition(format!(
                "vector has {} entries, the grid has {}",
                psi.len(),
                self.len()
            )));
        }
        let mut buf = psi.to_vec();
        self.fft.forward(&mut buf);
        buf.iter_mut().zip(&self.symbol_table).for_each(|(z, h)| *z *= *h);
        self.fft.inverse(&mut buf);
        buf.iter_mut()
            .zip(psi.iter().zip(&self.potential_table))
            .for_each(|(z, (p, v))| *z += p * *v);
        Ok(buf)
    }

    /// ⟨ψ, Hψ⟩ / ⟨ψ, ψ⟩.
    pub fn rayleigh_quotient(&self, psi: &[Complex64]) -> Result<f64> {
        let hpsi = self.apply(psi)?;
        let num: Complex64 = psi.iter().zip(&hpsi).map(|(a, b)| a.conj() * b).sum();
        let den: f64 = psi.iter().map(|a| a.norm_sqr()).sum();
        if den == 0.0 {
            return Err(Error::Precondition("Rayleigh quotient of the zero vector".into()));
        }
        Ok(num.re / den)
    }

    /// Grid vector whose discrete transform samples f on the dual lattice;
    /// the (−1)^k phase centres it at x = 0.
    pub fn inject_momentum_function(&self, f: &(dyn Fn(&Point) -> Complex64 + Sync)) -> Vec<Complex64> {
        let g = self.grid;
        let d = self.dimension;
        let spacing = 2.0 * PI / self.box_edge;
        let mut buf = par::map_range(self.len(), |idx| {
            let mut p = [0.0; 3];
            let mut parity = 0i64;
            let mut rest = idx;
            for axis in (0..d).rev() {
                let k = signed_index(rest % g, g);
                p[axis] = spacing * k as f64;
                parity += k;
                rest /= g;
            }
            let z = f(&p);
            if parity.rem_euclid(2) == 1 {
                -z
            } else {
                z
            }
        });
        self.fft.inverse(&mut buf);
        buf
    }

    /// Applies a Fourier multiplier and optionally V to real columns, two at
    /// a time through one complex transform.
    fn apply_real(&self, x: &DMatrix<f64>, multiplier: &[f64], with_potential: bool) -> DMatrix<f64> {
        let n = self.len();
        let cols = x.ncols();
        let pairs = cols.div_ceil(2);
        let results = par::map_range(pairs, |c| {
            let a = 2 * c;
            let b = a + 1;
            let mut buf: Vec<Complex64> = (0..n)
                .map(|i| Complex64::new(x[(i, a)], if b < cols { x[(i, b)] } else { 0.0 }))
                .collect();
            self.fft.forward(&mut buf);
            buf.iter_mut().zip(multiplier).for_each(|(z, h)| *z *= *h);
            self.fft.inverse(&mut buf);
            if with_potential {
                for i in 0..n {
                    let v = self.potential_table[i];
                    buf[i] += Complex64::new(v * x[(i, a)], if b < cols { v * x[(i, b)] } else { 0.0 });
                }
            }
            buf
        });
        let mut out = DMatrix::zeros(n, cols);
        for (c, buf) in results.into_iter().enumerate() {
            let a = 2 * c;
            for i in 0..n {
                out[(i, a)] = buf[i].re;
            }
            if a + 1 < cols {
                for i in 0..n {
                    out[(i, a + 1)] = buf[i].im;
                }
            }
        }
        out
    }

    fn solver(&self) -> RealGridOperator<'_> {
        let shift = self.potential_sup.max(self.delta).max(1e-3);
        let preconditioner = self
            .symbol_table
            .iter()
            .map(|h| 1.0 / ((h - self.minimum).max(0.0) + shift))
            .collect();
        RealGridOperator {
            hamiltonian: self,
            preconditioner,
        }
    }

    fn block_size(wanted: usize) -> usize {
        wanted + (wanted / 4).max(4)
    }

    fn sorted_free_spectrum(&self, k: usize) -> Vec<f64> {
        let mut table = self.symbol_table.clone();
        table.sort_by(f64::total_cmp);
        table.truncate(k);
        table
    }

    /// The k smallest eigenvalues, ascending. With V ≡ 0 these are the
    /// sorted symbol-table entries themselves.
    pub fn lowest_eigenvalues(&self, k: usize) -> Result<EigenReport> {
        if k == 0 || k > MAX_EIGENVALUES {
            return Err(Error::Precondition(format!(
                "k must lie in 1..={MAX_EIGENVALUES}, got {k}"
            )));
        }
        let tolerance = self.tolerance();
        if self.free {
            return Ok(EigenReport {
                eigenvalues: self.sorted_free_spectrum(k),
                residuals: vec![0.0; k],
                iterations: 0,
                tolerance,
            });
        }
        let options = LobpcgOptions {
            block: Self::block_size(k),
            max_iterations: self.max_iterations,
            tolerance,
            seed: self.seed,
        };
        let out = lobpcg(&self.solver(), &options, |_, r| r[..k].iter().all(|x| *x <= tolerance))?;
        Ok(EigenReport {
            eigenvalues: out.values[..k].to_vec(),
            residuals: out.residuals[..k].to_vec(),
            iterations: out.iterations,
            tolerance,
        })
    }

    /// Number of eigenvalues below `energy`, searched among the lowest
    /// k_max. Ritz values bound eigenvalues from above, so the count never
    /// overstates.
    pub fn count_below(&self, energy: f64, k_max: usize) -> Result<CountReport> {
        if k_max == 0 || k_max > MAX_EIGENVALUES {
            return Err(Error::Precondition(format!(
                "k_max must lie in 1..={MAX_EIGENVALUES}, got {k_max}"
            )));
        }
        let floor = self.symbol_table.iter().fold(f64::INFINITY, |m, v| m.min(*v));
        if !(energy < floor + self.potential_sup) {
            return Err(Error::Precondition(format!(
                "energy {energy} is not below min H₀ + ‖V‖∞ = {}",
                floor + self.potential_sup
            )));
        }
        if self.free {
            let table = self.sorted_free_spectrum(k_max + 1);
            let count = table[..k_max].iter().filter(|v| **v < energy).count();
            return Ok(CountReport {
                energy,
                count,
                ritz_values: table[..k_max].to_vec(),
                residuals: vec![0.0; k_max],
                iterations: 0,
                count_is_lower_bound: count == k_max && table[k_max] < energy,
            });
        }
        let tolerance = self.tolerance();
        let options = LobpcgOptions {
            block: Self::block_size(k_max),
            max_iterations: self.max_iterations,
            tolerance,
            seed: self.seed,
        };
        let out = lobpcg(&self.solver(), &options, |theta, r| {
            let c = theta[..k_max].iter().filter(|t| **t < energy).count();
            r[..(c + 1).min(k_max)].iter().all(|x| *x <= tolerance)
        })?;
        let count = out.values[..k_max].iter().filter(|t| **t < energy).count();
        Ok(CountReport {
            energy,
            count,
            ritz_values: out.values,
            residuals: out.residuals,
            iterations: out.iterations,
            count_is_lower_bound: count == k_max,
        })
    }

    /// Count below the default energy m − δ, as a JSON-ready record.
    pub fn record(&self, k_max: usize) -> Result<OracleRecord> {
        let report = self.count_below(self.default_energy(), k_max)?;
        let mut flags = self.flags;
        flags.count_is_lower_bound = report.count_is_lower_bound;
        Ok(OracleRecord {
            dimension: self.dimension,
            box_edge: self.box_edge,
            grid: self.grid,
            minimum: self.minimum,
            delta: self.delta,
            energy: report.energy,
            count: report.count,
            eigenvalues: report.ritz_values,
            residuals: report.residuals,
            iterations: report.iterations,
            flags,
        })
    }
}

struct RealGridOperator<'a> {
    hamiltonian: &'a GridHamiltonian,
    preconditioner: Vec<f64>,
}

impl BlockOperator for RealGridOperator<'_> {
    fn dim(&self) -> usize {
        self.hamiltonian.len()
    }

    fn apply(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        self.hamiltonian.apply_real(x, &self.hamiltonian.symbol_table, true)
    }

    fn precondition(&self, r: &DMatrix<f64>) -> DMatrix<f64> {
        self.hamiltonian.apply_real(r, &self.preconditioner, false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::real_symmetric_eigen;
    use crate::potentials::GaussianTerm;
    use crate::rayleigh_ritz::TransverseProfile;
    use crate::symbols::DispersionSymbol;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn hat() -> DispersionSymbol {
        DispersionSymbol::mexican_hat(2, 1.0).unwrap()
    }

    fn well(depth: f64) -> Potential {
        Potential::gaussian_well(2, depth, 1.0).unwrap()
    }

    fn dense(h: &GridHamiltonian) -> DMatrix<f64> {
        let n = h.len();
        let eye = DMatrix::<f64>::identity(n, n);
        let a = h.apply_real(&eye, &h.symbol_table, true);
        (&a + a.transpose()) * 0.5
    }

    #[test]
    fn construction_checks() {
        let v = well(1.0);
        assert!(matches!(GridHamiltonian::new(&hat(), &v, 40.0, 40, 3.0), Err(Error::Config(_))));
        assert!(GridHamiltonian::new(&hat(), &v, 40.0, 255, 3.0).is_err());
        assert!(GridHamiltonian::new(&hat(), &v, -1.0, 256, 3.0).is_err());
        assert!(GridHamiltonian::new(&hat(), &v, 40.0, 256, 0.0).is_err());
        let h3 = DispersionSymbol::mexican_hat(3, 1.0).unwrap();
        let v3 = Potential::gaussian_well(3, 1.0, 1.0).unwrap();
        assert!(GridHamiltonian::new(&h3, &v3, 20.0, 128, 3.0).is_err());
        assert!(GridHamiltonian::new(&hat(), &v3, 20.0, 64, 3.0).is_err());
        let h = GridHamiltonian::new(&hat(), &v, 40.0, 256, 3.0).unwrap();
        assert!(h.flags().under_resolved_surface);
        let step = 2.0 * PI / 40.0;
        assert!((h.delta() - 3.0 * step * step).abs() < 1e-15);
        let wide = GridHamiltonian::new(&hat(), &v, 60.0, 128, 3.0).unwrap();
        assert!(!wide.flags().under_resolved_surface);
    }

    #[test]
    fn apply_examples() {
        let h = GridHamiltonian::new(&hat(), &Potential::zero(2).unwrap(), 20.0, 32, 3.0).unwrap();
        let zero = vec![Complex64::default(); h.len()];
        assert!(h.apply(&zero).unwrap().iter().all(|z| *z == Complex64::default()));
        assert!(h.apply(&zero[1..]).is_err());
        // plane wave e^{i⟨p_k, x⟩} with k = (3, −5)
        let (k1, k2) = (3i64, -5i64);
        let step = 2.0 * PI / 20.0;
        let psi: Vec<Complex64> = (0..h.len())
            .map(|idx| {
                let x = -10.0 + (idx / 32) as f64 * 20.0 / 32.0;
                let y = -10.0 + (idx % 32) as f64 * 20.0 / 32.0;
                Complex64::from_polar(1.0, step * (k1 as f64 * x + k2 as f64 * y))
            })
            .collect();
        let expected = hat().evaluate(&[step * k1 as f64, step * k2 as f64]).unwrap();
        let out = h.apply(&psi).unwrap();
        for (a, b) in out.iter().zip(&psi) {
            assert!((a - b * expected).norm() < 1e-11);
        }
    }

    #[test]
    fn quadratic_form_is_real() {
        let h = GridHamiltonian::new(&hat(), &well(1.0), 20.0, 32, 3.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10 {
            let psi: Vec<Complex64> = (0..h.len())
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let hpsi = h.apply(&psi).unwrap();
            let form: Complex64 = psi.iter().zip(&hpsi).map(|(a, b)| a.conj() * b).sum();
            let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
            assert!(form.im.abs() <= 1e-10 * norm);
        }
    }

    #[test]
    fn real_pair_apply_matches_complex_apply() {
        let h = GridHamiltonian::new(&hat(), &well(1.0), 20.0, 32, 3.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let x = DMatrix::from_fn(h.len(), 3, |_, _| rng.random_range(-1.0..1.0));
        let hx = h.apply_real(&x, &h.symbol_table, true);
        for c in 0..3 {
            let psi: Vec<Complex64> = (0..h.len()).map(|i| Complex64::new(x[(i, c)], 0.0)).collect();
            let out = h.apply(&psi).unwrap();
            for i in 0..h.len() {
                assert!((out[i].re - hx[(i, c)]).abs() < 1e-10);
                assert!(out[i].im.abs() < 1e-10);
            }
        }
    }

    #[test]
    fn free_operator_is_exact() {
        let h = GridHamiltonian::new(&hat(), &Potential::zero(2).unwrap(), 30.0, 64, 3.0).unwrap();
        let report = h.lowest_eigenvalues(32).unwrap();
        let mut table = h.symbol_table().to_vec();
        table.sort_by(f64::total_cmp);
        for (a, b) in report.eigenvalues.iter().zip(&table) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        let count = h.count_below(h.default_energy(), 16).unwrap();
        assert_eq!(count.count, 0);
        assert!(!count.count_is_lower_bound);
        assert!(h.lowest_eigenvalues(0).is_err());
        assert!(h.lowest_eigenvalues(65).is_err());
    }

    #[test]
    fn lobpcg_matches_dense_diagonalization() {
        let v = Potential::gaussian_mix(
            2,
            vec![
                GaussianTerm { amplitude: -1.0, width: 1.0 },
                GaussianTerm { amplitude: 2.0, width: 0.5 },
            ],
        )
        .unwrap();
        for pot in [well(1.0), v] {
            let h = GridHamiltonian::new(&hat(), &pot, 30.0, 40, 3.0).unwrap();
            let (exact, _) = real_symmetric_eigen(&dense(&h));
            let report = h.lowest_eigenvalues(6).unwrap();
            for i in 0..6 {
                assert!((report.eigenvalues[i] - exact[i]).abs() < 1e-9, "{i}: {} vs {}", report.eigenvalues[i], exact[i]);
            }
            let count = h.count_below(h.default_energy(), 8).unwrap();
            let exact_count = exact.iter().filter(|e| **e < h.default_energy()).count();
            assert_eq!(count.count, exact_count);
        }
    }

    #[test]
    fn results_do_not_depend_on_seed_beyond_tolerance() {
        let h = GridHamiltonian::new(&hat(), &well(1.0), 30.0, 40, 3.0).unwrap();
        let a = h.lowest_eigenvalues(3).unwrap();
        let h = h.with_seed(99);
        let b = h.lowest_eigenvalues(3).unwrap();
        for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
            assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn stronger_well_binds_no_fewer_states() {
        let weak = GridHamiltonian::new(&hat(), &well(1.0), 30.0, 48, 3.0).unwrap();
        let strong = GridHamiltonian::new(&hat(), &well(2.0), 30.0, 48, 3.0).unwrap();
        let e = weak.default_energy();
        let a = weak.count_below(e, 12).unwrap();
        let b = strong.count_below(e, 12).unwrap();
        assert!(b.count >= a.count, "{} < {}", b.count, a.count);
        // sorted lists: V₂ ≤ V₁ pointwise, so λ_j(H₂) ≤ λ_j(H₁)
        let la = weak.lowest_eigenvalues(4).unwrap();
        let lb = strong.lowest_eigenvalues(4).unwrap();
        for (x, y) in la.eigenvalues.iter().zip(&lb.eigenvalues) {
            assert!(y <= x);
        }
    }

    #[test]
    fn count_below_sanity_bound() {
        let h = GridHamiltonian::new(&hat(), &well(1.0), 30.0, 40, 3.0).unwrap();
        assert!(matches!(h.count_below(5.0, 4), Err(Error::Precondition(_))));
        assert!(h.count_below(-0.1, 0).is_err());
    }

    #[test]
    fn count_saturation_sets_lower_bound_flag() {
        let h = GridHamiltonian::new(&hat(), &well(1.0), 30.0, 40, 3.0).unwrap();
        let report = h.count_below(0.5, 2).unwrap();
        assert_eq!(report.count, 2);
        assert!(report.count_is_lower_bound);
    }

    #[test]
    fn non_convergence_is_reported() {
        let h = GridHamiltonian::new(&hat(), &well(1.0), 30.0, 40, 3.0).unwrap().with_max_iterations(1);
        assert!(matches!(h.lowest_eigenvalues(4), Err(Error::NotConverged { .. })));
    }

    #[test]
    fn injected_trials_agree_with_the_variational_form() {
        use crate::rayleigh_ritz::{kinetic_form, potential_factor, potential_form};
        use crate::surface::{SurfaceMesh, TubularChart};
        let v = well(1.0);
        let h = GridHamiltonian::new(&hat(), &v, 80.0, 512, 3.0).unwrap();
        let chart = TubularChart::new(SurfaceMesh::build(1.0, 2, 64).unwrap(), 0.25).unwrap();
        let profile = TransverseProfile::default();
        let eps = chart.half_width();
        for harmonic in [0i32, 1, 2] {
            let angular = move |theta: f64| Complex64::from_polar(1.0, harmonic as f64 * theta);
            let f = |p: &Point| {
                let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
                Complex64::from(profile.value((r - 1.0) / eps) / eps) * angular(p[1].atan2(p[0]))
            };
            let psi = h.inject_momentum_function(&f);
            let grid_value = h.rayleigh_quotient(&psi).unwrap() - h.minimum();
            let trial: Vec<Complex64> = chart.mesh().nodes().iter().map(|s| angular(s[1].atan2(s[0]))).collect();
            let form = kinetic_form(&hat(), &chart, &trial, &trial, &profile, 1.0).unwrap()
                + potential_form(&v, &chart, &trial, &trial, &profile, 1.0).unwrap() * potential_factor(2);
            let norm: f64 = {
                let transverse: f64 = profile
                    .nodes()
                    .iter()
                    .zip(profile.weights())
                    .zip(profile.values())
                    .map(|((u, g), phi)| g * phi * phi * chart.jacobian(eps * u))
                    .sum();
                2.0 * PI * transverse / eps
            };
            let predicted = form.re / norm;
            assert_eq!(grid_value < 0.0, predicted < 0.0, "harmonic {harmonic}");
            assert!(
                (grid_value - predicted).abs() < 2e-2 * predicted.abs(),
                "harmonic {harmonic}: grid {grid_value} vs form {predicted}"
            );
        }
    }
}
