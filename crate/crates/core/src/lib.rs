//! Variational bound-state counting for Hamiltonians H₀ + V whose symbol
//! H₀(p) is minimal on a sphere or circle in momentum space.
//!
//! The pipeline: a [`symbols::DispersionSymbol`] fixes the minimum m and the
//! extremum surface S; [`surface::SurfaceMesh`] discretizes S; the surface
//! operator with kernel V̂(s − s′) ([`surface_operator`]) supplies negative
//! eigenpairs; [`rayleigh_ritz`] turns them into concentrated trial functions
//! and certifies eigenvalues of H below m; [`direct_oracle`] diagonalizes H on
//! a periodic box as an independent cross-check. [`spin_orbit`] covers the
//! 2×2 Rashba/Dresselhaus symbols.

pub mod direct_oracle;
pub mod error;
pub mod fft;
pub mod kernel;
pub mod linalg;
pub mod par;
pub mod potentials;
pub mod quadrature;
pub mod rayleigh_ritz;
pub mod special;
pub mod spin_orbit;
pub mod surface;
pub mod surface_operator;
pub mod symbols;

pub use direct_oracle::{GridHamiltonian, OracleRecord};
pub use error::{Error, Result};
pub use kernel::{ConstantKernel, PairKernel};
pub use potentials::{GaussianTerm, Potential, PotentialGrid, SignFlag, TabulatedPotential};
pub use rayleigh_ritz::{certify, Certificate, CertificationStatus};
pub use spin_orbit::{MatrixSymbol, SpinOrbitKind};
pub use surface::{SurfaceMesh, TubularChart};
pub use surface_operator::SurfaceOperatorMatrix;
pub use symbols::{Dispersion, DispersionSymbol, Minimum, Point, RadialProfile, SymbolKind};
