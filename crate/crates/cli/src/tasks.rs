use rimbound::direct_oracle::{GridHamiltonian, OracleRecord};
use rimbound::rayleigh_ritz::{certify_with_trials, Certificate, CertificationStatus, TransverseProfile};
use rimbound::spin_orbit::{assemble_spin_kernel, SpinKernel};
use rimbound::surface_operator::{circle_points, point_matrix_test, random_surface_points};
use rimbound::{Dispersion, DispersionSymbol, PairKernel, Potential, SurfaceMesh, SurfaceOperatorMatrix, TubularChart};
use serde_json::{json, Value};

use crate::config::{ExperimentConfig, OracleConfig, Task};
use crate::report::{sweep_csv, Document, Outcome, Status};
use crate::CliError;

/// Relative tolerances the numbers in a document were produced with.
fn tolerances() -> Value {
    json!({
        "negative_threshold_relative": 1e-8,
        "hermitian_relative": 1e-12,
        "oracle_residual_relative": 1e-8,
    })
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("result serializes")
}

struct Scalar {
    symbol: DispersionSymbol,
    potential: Potential,
    mesh: SurfaceMesh,
}

impl Scalar {
    fn build(config: &ExperimentConfig) -> Result<Self, CliError> {
        let symbol_cfg = config
            .symbol
            .as_ref()
            .ok_or_else(|| CliError::Config("symbol: required".into()))?;
        let symbol = symbol_cfg.build()?;
        let min = symbol.find_minimum().map_err(|e| CliError::config("symbol", e))?;
        let potential = config.potential.build(symbol.dimension(), min.radius)?;
        let mesh = SurfaceMesh::build(min.radius, symbol.dimension(), config.surface.resolution)
            .map_err(|e| CliError::config("surface.resolution", e))?;
        Ok(Self { symbol, potential, mesh })
    }

    fn provenance(&self) -> Result<Value, CliError> {
        Ok(json!({
            "symbol": self.symbol.kind().tag(),
            "dimension": self.symbol.dimension(),
            "minimum": to_value(&self.symbol.find_minimum()?),
            "potential": to_value(&self.potential.descriptor()),
            "mesh_size": self.mesh.len(),
            "tolerances": tolerances(),
        }))
    }
}

/// Sweeps the quadratic form over the N most negative surface eigenpairs.
fn certificate(
    dispersion: &dyn Dispersion,
    kernel: &dyn PairKernel,
    op: &SurfaceOperatorMatrix,
    n: usize,
    config: &ExperimentConfig,
) -> Result<Certificate, CliError> {
    let rr = config.rayleigh_ritz_or_default();
    let chart = TubularChart::new(op.mesh().clone(), config.surface.half_width_fraction)
        .map_err(|e| CliError::config("surface.half_width_fraction", e))?;
    let profile =
        TransverseProfile::new(rr.transverse_order).map_err(|e| CliError::config("rayleigh_ritz.transverse_order", e))?;
    let trials: Vec<_> = (0..n).map(|j| op.eigenfunction(j)).collect();
    let targets = &op.eigenvalues()[..n];
    Ok(certify_with_trials(dispersion, kernel, &chart, &trials, targets, &profile, &rr.schedule)?)
}

fn available(op: &SurfaceOperatorMatrix) -> Result<usize, CliError> {
    Ok(op.count_negative(op.default_threshold())?)
}

fn certification_status(cert: &Certificate) -> Status {
    match cert.status {
        CertificationStatus::Certified => Status::Ok,
        CertificationStatus::Failed => Status::CertificationFailed,
    }
}

fn oracle_record(
    symbol: &DispersionSymbol,
    potential: &Potential,
    oracle: &OracleConfig,
    seed: u64,
) -> Result<OracleRecord, CliError> {
    let h = GridHamiltonian::new(symbol, potential, oracle.box_edge, oracle.grid, oracle.delta_levels)
        .map_err(|e| CliError::config("oracle", e))?
        .with_seed(seed)
        .with_max_iterations(oracle.max_iterations);
    Ok(h.record(oracle.k_max)?)
}

/// Runs the task named in the config.
pub fn run(config: &ExperimentConfig) -> Result<Outcome, CliError> {
    let mut doc = Document::new("run", config.task.tag(), config);
    let mut csv = None;
    match config.task {
        Task::SurfaceSpectrum => {
            let s = Scalar::build(config)?;
            let op = SurfaceOperatorMatrix::assemble(&s.mesh, &s.potential)?;
            doc.provenance = s.provenance()?;
            doc.result = to_value(&op.record(s.potential.descriptor()));
        }
        Task::BoundCount => {
            let s = Scalar::build(config)?;
            let op = SurfaceOperatorMatrix::assemble(&s.mesh, &s.potential)?;
            let scale = op.norm().max(1.0);
            let mut counts = Vec::new();
            for exp in [2, 4, 6, 8, 10] {
                let threshold = scale * 10f64.powi(-exp);
                counts.push(json!({ "threshold": threshold, "count": op.count_negative(threshold)? }));
            }
            let negative = available(&op)?;
            let refined_mesh = SurfaceMesh::build(s.mesh.radius(), s.symbol.dimension(), 2 * config.surface.resolution)
                .map_err(|e| CliError::config("surface.resolution", e))?;
            let refined = SurfaceOperatorMatrix::assemble(&refined_mesh, &s.potential)?;
            let refined_negative = refined.count_negative(op.default_threshold())?;
            let n = match &config.rayleigh_ritz {
                Some(rr) => rr.trials.min(negative),
                None => negative,
            };
            let cert = if n > 0 {
                Some(certificate(&s.symbol, &s.potential, &op, n, config)?)
            } else {
                None
            };
            if let Some(c) = &cert {
                doc.status = certification_status(c);
            }
            doc.provenance = s.provenance()?;
            doc.result = json!({
                "surface_negative_count": negative,
                "refined_mesh_size": refined_mesh.len(),
                "refined_negative_count": refined_negative,
                "stable_under_doubling": negative == refined_negative,
                "threshold": op.default_threshold(),
                "counts_by_threshold": counts,
                "trials": n,
                "certified_count": cert.as_ref().map_or(0, |c| c.certified_count),
                "certificate": cert.as_ref().map(to_value),
            });
        }
        Task::RayleighRitz => {
            let s = Scalar::build(config)?;
            let op = SurfaceOperatorMatrix::assemble(&s.mesh, &s.potential)?;
            let n = config.rayleigh_ritz_or_default().trials;
            let negative = available(&op)?;
            if n == 0 || n > negative {
                return Err(CliError::Config(format!(
                    "rayleigh_ritz.trials: must lie in 1..={negative} (negative surface eigenvalues), got {n}"
                )));
            }
            let cert = certificate(&s.symbol, &s.potential, &op, n, config)?;
            doc.status = certification_status(&cert);
            doc.provenance = s.provenance()?;
            csv = Some(sweep_csv(&cert.samples));
            doc.result = to_value(&cert);
        }
        Task::PointTest => {
            let s = Scalar::build(config)?;
            let pt = config
                .point_test
                .as_ref()
                .ok_or_else(|| CliError::Config("point_test: required".into()))?;
            let radius = s.mesh.radius();
            let points = match (&pt.angles, pt.count) {
                (Some(angles), _) => {
                    if s.symbol.dimension() != 2 {
                        return Err(CliError::Config(
                            "point_test.angles: only meaningful in two dimensions; use count".into(),
                        ));
                    }
                    circle_points(radius, angles)
                }
                (None, Some(count)) => random_surface_points(radius, s.symbol.dimension(), count, config.seed)?,
                (None, None) => return Err(CliError::Config("point_test: angles or count is required".into())),
            };
            let test = point_matrix_test(&s.potential, &points, pt.tolerance)?;
            doc.provenance = s.provenance()?;
            let pts: Vec<Vec<f64>> = points.iter().map(|p| p[..s.symbol.dimension()].to_vec()).collect();
            doc.result = json!({ "points": pts, "test": to_value(&test) });
        }
        Task::Oracle => {
            let s = Scalar::build(config)?;
            let oracle = config
                .oracle
                .as_ref()
                .ok_or_else(|| CliError::Config("oracle: required".into()))?;
            let record = oracle_record(&s.symbol, &s.potential, oracle, config.seed)?;
            doc.provenance = s.provenance()?;
            doc.result = to_value(&record);
        }
        Task::SpinOrbit => {
            let so = config
                .spin_orbit
                .as_ref()
                .ok_or_else(|| CliError::Config("spin_orbit: required".into()))?;
            let symbol = so.build()?;
            let band = symbol.lower_band();
            let min = symbol.band_minimum();
            let potential = config.potential.build(2, min.radius)?;
            let mesh = SurfaceMesh::circle(min.radius, config.surface.resolution)
                .map_err(|e| CliError::config("surface.resolution", e))?;
            let op = assemble_spin_kernel(&mesh, &potential, &symbol)?;
            let record = op.record(potential.descriptor());
            let cert = match &config.rayleigh_ritz {
                Some(rr) => {
                    let negative = available(&op)?;
                    if rr.trials == 0 || rr.trials > negative {
                        return Err(CliError::Config(format!(
                            "rayleigh_ritz.trials: must lie in 1..={negative} (negative surface eigenvalues), got {}",
                            rr.trials
                        )));
                    }
                    let kernel = SpinKernel::new(symbol, potential.clone())?;
                    Some(certificate(&band, &kernel, &op, rr.trials, config)?)
                }
                None => None,
            };
            if let Some(c) = &cert {
                doc.status = certification_status(c);
                csv = Some(sweep_csv(&c.samples));
            }
            doc.provenance = json!({
                "symbol": so.kind.tag(),
                "alpha": so.alpha,
                "minimum": to_value(&min),
                "potential": to_value(&potential.descriptor()),
                "mesh_size": mesh.len(),
                "tolerances": tolerances(),
            });
            doc.result = json!({ "spectrum": to_value(&record), "certificate": cert.as_ref().map(to_value) });
        }
    }
    Ok(Outcome { document: doc, csv })
}

/// Certified count N_cert against the oracle count below m − δ. A violation
/// is an oracle count that is exact (not saturated) and below N_cert.
pub fn compare(config: &ExperimentConfig) -> Result<Outcome, CliError> {
    let mut doc = Document::new("compare", config.task.tag(), config);
    let s = Scalar::build(config)?;
    let oracle = config
        .oracle
        .as_ref()
        .ok_or_else(|| CliError::Config("oracle: required for compare".into()))?;
    let op = SurfaceOperatorMatrix::assemble(&s.mesh, &s.potential)?;
    let negative = available(&op)?;
    let requested = config.rayleigh_ritz_or_default().trials;
    let n = requested.min(negative);
    let cert = if n > 0 {
        Some(certificate(&s.symbol, &s.potential, &op, n, config)?)
    } else {
        None
    };
    let certified = cert.as_ref().map_or(0, |c| c.certified_count);
    let record = oracle_record(&s.symbol, &s.potential, oracle, config.seed)?;
    let consistent = record.count >= certified;
    let conclusive = consistent || !record.flags.count_is_lower_bound;
    if !consistent && !conclusive {
        return Err(CliError::Config(format!(
            "oracle.k_max: oracle count saturated at {} below the certified count {certified}; raise k_max",
            record.count
        )));
    }
    if !consistent {
        doc.status = Status::Violation;
    }
    let csv = cert.as_ref().map(|c| sweep_csv(&c.samples));
    doc.provenance = s.provenance()?;
    doc.result = json!({
        "requested_trials": requested,
        "surface_negative_count": negative,
        "trials": n,
        "certified_count": certified,
        "oracle_count": record.count,
        "consistent": consistent,
        "certificate": cert.as_ref().map(to_value),
        "oracle": to_value(&record),
    });
    Ok(Outcome { document: doc, csv })
}
