//! Experiment configuration read from TOML (or from the JSON echo of an
//! earlier run). Unknown keys are rejected.

use rimbound::potentials::{GaussianTerm, Potential, PotentialGrid, TabulatedPotential};
use rimbound::rayleigh_ritz::{DEFAULT_SCHEDULE, DEFAULT_TRANSVERSE_ORDER};
use rimbound::spin_orbit::{MatrixSymbol, SpinOrbitKind};
use rimbound::surface::DEFAULT_HALF_WIDTH_FRACTION;
use rimbound::{DispersionSymbol, RadialProfile};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    SurfaceSpectrum,
    BoundCount,
    RayleighRitz,
    PointTest,
    Oracle,
    SpinOrbit,
}

impl Task {
    pub fn tag(&self) -> &'static str {
        match self {
            Task::SurfaceSpectrum => "surface-spectrum",
            Task::BoundCount => "bound-count",
            Task::RayleighRitz => "rayleigh-ritz",
            Task::PointTest => "point-test",
            Task::Oracle => "oracle",
            Task::SpinOrbit => "spin-orbit",
        }
    }
}

fn default_dimension() -> usize {
    2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SymbolConfig {
    Roton {
        #[serde(default = "default_dimension")]
        dimension: usize,
        gap: f64,
        mass: f64,
        p0: f64,
    },
    Bcs {
        #[serde(default = "default_dimension")]
        dimension: usize,
        mu: f64,
        beta: f64,
    },
    MexicanHat {
        #[serde(default = "default_dimension")]
        dimension: usize,
        p0: f64,
    },
    CustomRadial {
        #[serde(default = "default_dimension")]
        dimension: usize,
        radii: Vec<f64>,
        values: Vec<f64>,
    },
}

impl SymbolConfig {
    pub fn dimension(&self) -> usize {
        match self {
            SymbolConfig::Roton { dimension, .. }
            | SymbolConfig::Bcs { dimension, .. }
            | SymbolConfig::MexicanHat { dimension, .. }
            | SymbolConfig::CustomRadial { dimension, .. } => *dimension,
        }
    }

    pub fn build(&self) -> Result<DispersionSymbol, CliError> {
        let built = match self {
            SymbolConfig::Roton { dimension, gap, mass, p0 } => DispersionSymbol::roton(*dimension, *gap, *mass, *p0),
            SymbolConfig::Bcs { dimension, mu, beta } => DispersionSymbol::bcs(*dimension, *mu, *beta),
            SymbolConfig::MexicanHat { dimension, p0 } => DispersionSymbol::mexican_hat(*dimension, *p0),
            SymbolConfig::CustomRadial { dimension, radii, values } => RadialProfile::new(radii.clone(), values.clone())
                .and_then(|profile| DispersionSymbol::custom_radial(*dimension, profile)),
        };
        built.map_err(|e| CliError::config("symbol", e))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PotentialConfig {
    Zero,
    GaussianWell {
        depth: f64,
        width: f64,
    },
    BallWell {
        depth: f64,
        radius: f64,
    },
    GaussianDimpleMix {
        terms: Vec<GaussianTerm>,
    },
    /// Grid file; `band` is the largest |k_i| at which V̂ is needed and
    /// defaults to 2.5 times the surface radius.
    Tabulated {
        file: PathBuf,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        band: Option<f64>,
    },
}

impl PotentialConfig {
    pub fn build(&self, dimension: usize, surface_radius: f64) -> Result<Potential, CliError> {
        let built = match self {
            PotentialConfig::Zero => Potential::zero(dimension),
            PotentialConfig::GaussianWell { depth, width } => Potential::gaussian_well(dimension, *depth, *width),
            PotentialConfig::BallWell { depth, radius } => Potential::ball_well(dimension, *depth, *radius),
            PotentialConfig::GaussianDimpleMix { terms } => Potential::gaussian_mix(dimension, terms.clone()),
            PotentialConfig::Tabulated { file, band } => {
                let grid = PotentialGrid::load(file).map_err(|e| CliError::config("potential.file", e))?;
                if grid.dimension() != dimension {
                    return Err(CliError::Config(format!(
                        "potential.file: grid is {}-dimensional but the symbol is {dimension}-dimensional",
                        grid.dimension()
                    )));
                }
                let band = band.unwrap_or(2.5 * surface_radius);
                let table = TabulatedPotential::new(grid, band).map_err(|e| CliError::config("potential.band", e))?;
                Potential::tabulated(table)
            }
        };
        built.map_err(|e| CliError::config("potential", e))
    }
}

fn default_resolution() -> usize {
    64
}

fn default_half_width() -> f64 {
    DEFAULT_HALF_WIDTH_FRACTION
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceConfig {
    /// Circle node count, or polar node count on a sphere.
    #[serde(default = "default_resolution")]
    pub resolution: usize,
    #[serde(default = "default_half_width")]
    pub half_width_fraction: f64,
}

impl Default for SurfaceConfig {
    fn default() -> Self {
        Self {
            resolution: default_resolution(),
            half_width_fraction: default_half_width(),
        }
    }
}

fn default_trials() -> usize {
    1
}

fn default_schedule() -> Vec<f64> {
    DEFAULT_SCHEDULE.to_vec()
}

fn default_transverse_order() -> usize {
    DEFAULT_TRANSVERSE_ORDER
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RayleighRitzConfig {
    #[serde(default = "default_trials")]
    pub trials: usize,
    /// ε as fractions of the chart half-width.
    #[serde(default = "default_schedule")]
    pub schedule: Vec<f64>,
    #[serde(default = "default_transverse_order")]
    pub transverse_order: usize,
}

impl Default for RayleighRitzConfig {
    fn default() -> Self {
        Self {
            trials: default_trials(),
            schedule: default_schedule(),
            transverse_order: default_transverse_order(),
        }
    }
}

fn default_point_tolerance() -> f64 {
    1e-12
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointTestConfig {
    /// Explicit angles on the extremum circle (2-D only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angles: Option<Vec<f64>>,
    /// Otherwise this many seeded uniform points on the extremum surface.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(default = "default_point_tolerance")]
    pub tolerance: f64,
}

fn default_k_max() -> usize {
    16
}

fn default_delta_levels() -> f64 {
    rimbound::direct_oracle::DEFAULT_DELTA_LEVELS
}

fn default_max_iterations() -> usize {
    rimbound::direct_oracle::DEFAULT_MAX_ITERATIONS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    pub box_edge: f64,
    pub grid: usize,
    #[serde(default = "default_k_max")]
    pub k_max: usize,
    #[serde(default = "default_delta_levels")]
    pub delta_levels: f64,
    #[serde(default = "default_max_iterations")]
    pub max_iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinOrbitConfig {
    pub kind: SpinOrbitKind,
    pub alpha: f64,
}

impl SpinOrbitConfig {
    pub fn build(&self) -> Result<MatrixSymbol, CliError> {
        MatrixSymbol::new(self.kind, self.alpha).map_err(|e| CliError::config("spin_orbit.alpha", e))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub task: Task,
    #[serde(default)]
    pub seed: u64,
    /// Output directory. Not part of the echo or hash.
    #[serde(default, skip_serializing)]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symbol: Option<SymbolConfig>,
    pub potential: PotentialConfig,
    #[serde(default)]
    pub surface: SurfaceConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rayleigh_ritz: Option<RayleighRitzConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point_test: Option<PointTestConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spin_orbit: Option<SpinOrbitConfig>,
}

impl ExperimentConfig {
    /// TOML, or JSON when the text starts with `{`. Relative paths inside
    /// the file resolve against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self, CliError> {
        let mut config: ExperimentConfig = if text.trim_start().starts_with('{') {
            serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))?
        } else {
            toml::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))?
        };
        if let PotentialConfig::Tabulated { file, .. } = &mut config.potential {
            if file.is_relative() {
                *file = base.join(&*file);
            }
            if let Ok(abs) = file.canonicalize() {
                *file = abs;
            }
        }
        if let Some(out) = &mut config.output {
            if out.is_relative() {
                *out = base.join(&*out);
            }
        }
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, &base)
    }

    /// Structural checks that name the offending key. Numerical validity of
    /// parameters is left to the constructors.
    pub fn validate(&self) -> Result<(), CliError> {
        let missing = |key: &str| Err(CliError::Config(format!("{key}: required for task {}", self.task.tag())));
        match self.task {
            Task::SpinOrbit => {
                if self.spin_orbit.is_none() {
                    return missing("spin_orbit");
                }
            }
            _ => {
                if self.symbol.is_none() {
                    return missing("symbol");
                }
            }
        }
        if self.task == Task::Oracle && self.oracle.is_none() {
            return missing("oracle");
        }
        if self.task == Task::PointTest {
            match &self.point_test {
                None => return missing("point_test"),
                Some(p) => match (&p.angles, p.count) {
                    (Some(_), Some(_)) => {
                        return Err(CliError::Config("point_test: give either angles or count, not both".into()))
                    }
                    (None, None) => return Err(CliError::Config("point_test: angles or count is required".into())),
                    (Some(a), None) if a.is_empty() => {
                        return Err(CliError::Config("point_test.angles: must not be empty".into()))
                    }
                    (None, Some(0)) => return Err(CliError::Config("point_test.count: must be positive".into())),
                    _ => {}
                },
            }
        }
        if let Some(s) = &self.symbol {
            let d = s.dimension();
            if d != 2 && d != 3 {
                return Err(CliError::Config(format!("symbol.dimension: must be 2 or 3, got {d}")));
            }
        }
        if let Some(rr) = &self.rayleigh_ritz {
            if rr.schedule.is_empty() {
                return Err(CliError::Config("rayleigh_ritz.schedule: must not be empty".into()));
            }
        }
        if !(self.surface.half_width_fraction > 0.0 && self.surface.half_width_fraction < 1.0) {
            return Err(CliError::Config(format!(
                "surface.half_width_fraction: must lie in (0, 1), got {}",
                self.surface.half_width_fraction
            )));
        }
        Ok(())
    }

    /// Canonical JSON echo; the config hash is taken over these bytes.
    pub fn echo(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config is always serializable")
    }

    pub fn rayleigh_ritz_or_default(&self) -> RayleighRitzConfig {
        self.rayleigh_ritz.clone().unwrap_or_default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASIC: &str = r#"
task = "surface-spectrum"
[symbol]
kind = "mexican-hat"
p0 = 1.0
[potential]
kind = "gaussian-well"
depth = 1.0
width = 1.0
"#;

    #[test]
    fn parses_with_defaults() {
        let c = ExperimentConfig::parse(BASIC, Path::new(".")).unwrap();
        assert_eq!(c.task, Task::SurfaceSpectrum);
        assert_eq!(c.surface.resolution, 64);
        assert_eq!(c.symbol.as_ref().unwrap().dimension(), 2);
        assert_eq!(c.seed, 0);
    }

    #[test]
    fn unknown_key_is_named() {
        let text = BASIC.replace("p0 = 1.0", "p0 = 1.0\nradius = 2.0");
        let err = ExperimentConfig::parse(&text, Path::new(".")).unwrap_err().to_string();
        assert!(err.contains("radius"), "{err}");
    }

    #[test]
    fn missing_field_is_named() {
        let text = BASIC.replace("width = 1.0", "");
        let err = ExperimentConfig::parse(&text, Path::new(".")).unwrap_err().to_string();
        assert!(err.contains("width"), "{err}");
    }

    #[test]
    fn task_blocks_are_required() {
        let text = BASIC.replace("surface-spectrum", "oracle");
        let err = ExperimentConfig::parse(&text, Path::new(".")).unwrap_err().to_string();
        assert!(err.starts_with("config error: oracle"), "{err}");
        let text = BASIC.replace("surface-spectrum", "point-test");
        assert!(ExperimentConfig::parse(&text, Path::new(".")).is_err());
    }

    #[test]
    fn bad_dimension_is_named() {
        let text = BASIC.replace("p0 = 1.0", "p0 = 1.0\ndimension = 4");
        let err = ExperimentConfig::parse(&text, Path::new(".")).unwrap_err().to_string();
        assert!(err.contains("symbol.dimension"), "{err}");
    }

    #[test]
    fn echo_round_trips() {
        let c = ExperimentConfig::parse(BASIC, Path::new(".")).unwrap();
        let json = serde_json::to_string(&c.echo()).unwrap();
        let back = ExperimentConfig::parse(&json, Path::new(".")).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn nonpositive_parameters_fail_in_constructors() {
        let text = BASIC.replace("p0 = 1.0", "p0 = -1.0");
        let c = ExperimentConfig::parse(&text, Path::new(".")).unwrap();
        let err = c.symbol.unwrap().build().unwrap_err().to_string();
        assert!(err.contains("symbol"), "{err}");
    }
}
