//! Experiment configuration, read from a TOML file.
//!
//! ```toml
//! [geometry]
//! shape = "semicircle"
//! points_per_wavelength = 20.0
//! [geometry.params]        # optional shape parameters
//! angle = 3.14159
//!
//! [run]
//! n_targets = [5000, 20000]
//! seed = 1
//! output = "out"
//! threads = 0              # 0: all cores
//! repeats = 1              # bench: timings are the minimum over repeats
//! write_mesh = false
//! dense_limit = 8192
//!
//! [compression]
//! leaf_size = 200
//! epsilon = 1e-4
//! oversampling = 1
//! rank_cap = 100
//!
//! [solver]
//! tolerance = 1e-5
//! max_iterations = 3000
//! preconditioner = true
//!
//! [sweep]                  # iters only: vary one shape parameter
//! param = "angle"
//! values = [1.5708, 3.14159]
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use hidbf::geometry::{CurveSpec, Shape};
use hidbf::id::IdConfig;
use hidbf::idbf::ButterflyConfig;
use hidbf::solver::{Preconditioner, SolveConfig};
use serde::Deserialize;

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub geometry: GeometrySection,
    pub run: RunSection,
    pub compression: CompressionSection,
    pub solver: SolverSection,
    pub sweep: Option<SweepSection>,
    pub verify: VerifySection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeometrySection {
    pub shape: String,
    pub points_per_wavelength: f64,
    pub params: BTreeMap<String, f64>,
}

impl Default for GeometrySection {
    fn default() -> Self {
        Self { shape: "semicircle".into(), points_per_wavelength: 20.0, params: BTreeMap::new() }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    pub n_targets: Vec<usize>,
    pub seed: u64,
    pub output: PathBuf,
    pub threads: usize,
    pub repeats: usize,
    pub write_mesh: bool,
    pub dense_limit: usize,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            n_targets: Vec::new(),
            seed: 1,
            output: PathBuf::from("out"),
            threads: 0,
            repeats: 1,
            write_mesh: false,
            dense_limit: hidbf::efie::DENSE_LIMIT,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CompressionSection {
    pub leaf_size: usize,
    pub epsilon: f64,
    pub oversampling: usize,
    pub rank_cap: usize,
}

impl Default for CompressionSection {
    fn default() -> Self {
        let id = IdConfig::default();
        Self { leaf_size: 200, epsilon: id.epsilon, oversampling: id.oversampling, rank_cap: id.rank_cap }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub tolerance: f64,
    pub max_iterations: usize,
    pub preconditioner: bool,
}

impl Default for SolverSection {
    fn default() -> Self {
        Self { tolerance: 1e-5, max_iterations: 3000, preconditioner: true }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub param: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct VerifySection {
    /// Perturbs one butterfly factor before checking; exercises the failure path.
    pub inject_fault: bool,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let cfg: Self = toml::from_str(text).map_err(|e| format!("invalid config: {e}"))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), String> {
        self.shape()?;
        self.curve(1.0, None).map_err(|e| e.to_string())?;
        if self.run.n_targets.is_empty() {
            return Err("run.n_targets must list at least one problem size".into());
        }
        if self.run.n_targets.contains(&0) {
            return Err("run.n_targets must be positive".into());
        }
        if self.run.n_targets.windows(2).any(|w| w[0] >= w[1]) {
            return Err("run.n_targets must be strictly ascending".into());
        }
        if self.geometry.points_per_wavelength.is_nan() || self.geometry.points_per_wavelength < 4.0 {
            return Err("geometry.points_per_wavelength must be at least 4".into());
        }
        if self.run.repeats == 0 {
            return Err("run.repeats must be positive".into());
        }
        self.butterfly().validate().map_err(|e| e.to_string())?;
        if !(self.solver.tolerance > 0.0 && self.solver.tolerance < 1.0) {
            return Err("solver.tolerance must lie in (0, 1)".into());
        }
        if self.solver.max_iterations == 0 {
            return Err("solver.max_iterations must be positive".into());
        }
        if let Some(s) = &self.sweep {
            if s.values.is_empty() {
                return Err("sweep.values must not be empty".into());
            }
            for v in &s.values {
                self.curve(1.0, Some((&s.param, *v))).map_err(|e| e.to_string())?;
            }
        }
        Ok(())
    }

    pub fn shape(&self) -> Result<Shape, String> {
        self.geometry.shape.parse::<Shape>().map_err(|e| e.to_string())
    }

    /// Curve with `electrical_size` chosen for `n` unknowns, optionally overriding one parameter.
    pub fn curve_for(&self, n: usize, extra: Option<(&str, f64)>) -> hidbf::Result<CurveSpec> {
        self.curve(n as f64 / self.geometry.points_per_wavelength, extra)
    }

    fn curve(&self, size: f64, extra: Option<(&str, f64)>) -> hidbf::Result<CurveSpec> {
        let shape = self.shape().map_err(hidbf::Error::Config)?;
        let mut spec = CurveSpec::new(shape, size);
        for (k, v) in &self.geometry.params {
            spec = spec.with_param(k, *v);
        }
        if let Some((k, v)) = extra {
            spec = spec.with_param(k, v);
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn butterfly(&self) -> ButterflyConfig {
        ButterflyConfig {
            leaf_size: self.compression.leaf_size,
            id: IdConfig {
                epsilon: self.compression.epsilon,
                rank_cap: self.compression.rank_cap,
                oversampling: self.compression.oversampling,
            },
        }
    }

    pub fn solve_config(&self) -> SolveConfig {
        SolveConfig {
            tolerance: self.solver.tolerance,
            max_iterations: self.solver.max_iterations,
            preconditioner: if self.solver.preconditioner { Preconditioner::HidbfLu } else { Preconditioner::None },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_missing_sections() {
        let cfg = ExperimentConfig::parse("[run]\nn_targets = [256]\n").unwrap();
        assert_eq!(cfg.compression.leaf_size, 200);
        assert_eq!(cfg.compression.epsilon, 1e-4);
        assert_eq!(cfg.compression.oversampling, 1);
        assert_eq!(cfg.solver.tolerance, 1e-5);
        assert!(cfg.solver.preconditioner);
        assert_eq!(cfg.shape().unwrap(), Shape::Semicircle);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(ExperimentConfig::parse("").is_err());
        assert!(ExperimentConfig::parse("[run]\nn_targets = [512, 256]\n").is_err());
        assert!(ExperimentConfig::parse("[run]\nn_targets = [256]\nbogus = 1\n").is_err());
        assert!(ExperimentConfig::parse("[run]\nn_targets = [256]\n[geometry]\nshape = \"blob\"\n").is_err());
        assert!(ExperimentConfig::parse("[run]\nn_targets = [256]\n[compression]\nepsilon = 2.0\n").is_err());
        assert!(ExperimentConfig::parse(
            "[run]\nn_targets = [256]\n[geometry]\nshape = \"semicircle\"\n[geometry.params]\nangle = 1.0\n"
        )
        .is_err());
    }

    #[test]
    fn sweep_values_are_validated() {
        let ok = "[run]\nn_targets = [256]\n[geometry]\nshape = \"open_arc\"\n[sweep]\nparam = \"angle\"\nvalues = [1.0, 3.0]\n";
        assert!(ExperimentConfig::parse(ok).is_ok());
        let bad = ok.replace("3.0", "9.0");
        assert!(ExperimentConfig::parse(&bad).is_err());
    }
}
