//! JSON experiment configuration.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sparse_qubo::instance::{InstanceParams, DEFAULT_ITERATIONS, DEFAULT_STEP};
use sparse_qubo::metrics::{DEFAULT_GRID_POINTS, DEFAULT_ZERO_TOL};
use sparse_qubo::FixedPointFormat;

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Simulated annealing on the assembled QUBO, penalty tuned by the oracle.
    QuboSa,
    /// Best-subset least squares over all supports of size k.
    Exhaustive,
    Omp,
    Lasso,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::QuboSa,
        Method::Exhaustive,
        Method::Omp,
        Method::Lasso,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::QuboSa => "qubo_sa",
            Method::Exhaustive => "exhaustive",
            Method::Omp => "omp",
            Method::Lasso => "lasso",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl std::str::FromStr for Method {
    type Err = HarnessError;
    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s.trim())
            .ok_or_else(|| HarnessError::Config(format!("unknown method '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    M,
    Sigma,
    K,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::M => "m",
            SweepAxis::Sigma => "sigma",
            SweepAxis::K => "k",
        }
    }
}

impl std::str::FromStr for SweepAxis {
    type Err = HarnessError;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "m" => Ok(SweepAxis::M),
            "sigma" => Ok(SweepAxis::Sigma),
            "k" => Ok(SweepAxis::K),
            other => Err(HarnessError::Config(format!(
                "unknown sweep axis '{other}'"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarOrVec {
    Scalar(f64),
    Vec(Vec<f64>),
}

impl ScalarOrVec {
    fn expand(&self, n: usize, what: &str) -> Result<Vec<f64>> {
        match self {
            ScalarOrVec::Scalar(v) => Ok(vec![*v; n]),
            ScalarOrVec::Vec(v) if v.len() == n => Ok(v.clone()),
            ScalarOrVec::Vec(v) => Err(HarnessError::Config(format!(
                "format.{what} has {} entries, expected {n}",
                v.len()
            ))),
        }
    }
}

/// Fixed-point format as written in config files: `{"c_min": …, "d": …, "P": …}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormatConfig {
    pub c_min: ScalarOrVec,
    pub d: ScalarOrVec,
    #[serde(rename = "P")]
    pub p: usize,
}

impl FormatConfig {
    pub fn binary() -> Self {
        FormatConfig {
            c_min: ScalarOrVec::Scalar(0.0),
            d: ScalarOrVec::Scalar(1.0),
            p: 1,
        }
    }

    pub fn build(&self, n: usize) -> Result<FixedPointFormat> {
        Ok(FixedPointFormat::new(
            self.c_min.expand(n, "c_min")?,
            self.d.expand(n, "d")?,
            self.p,
        )?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MatrixConfig {
    pub step: f64,
    pub iterations: usize,
}

impl Default for MatrixConfig {
    fn default() -> Self {
        MatrixConfig {
            step: DEFAULT_STEP,
            iterations: DEFAULT_ITERATIONS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AnnealConfig {
    pub sweeps: usize,
    pub restarts: usize,
}

impl Default for AnnealConfig {
    fn default() -> Self {
        AnnealConfig {
            sweeps: 1000,
            restarts: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TuningConfig {
    /// Points in the log-spaced lasso and QUBO penalty grids.
    pub grid_points: usize,
    /// Largest cardinality tried by OMP and the exhaustive solver; defaults to
    /// `min(N, 2k + 2)` (OMP additionally stops at `M`).
    pub k_max: Option<usize>,
    pub zero_tol: f64,
    pub lasso_max_iters: usize,
    pub lasso_tol: f64,
}

impl Default for TuningConfig {
    fn default() -> Self {
        TuningConfig {
            grid_points: DEFAULT_GRID_POINTS,
            k_max: None,
            zero_tol: DEFAULT_ZERO_TOL,
            lasso_max_iters: 5000,
            lasso_tol: 1e-8,
        }
    }
}

/// One sweep: a single varying axis, fixed values for the others, `repetitions`
/// independent instances per sweep value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentGrid {
    #[serde(default)]
    pub name: String,
    pub n: usize,
    #[serde(default = "FormatConfig::binary")]
    pub format: FormatConfig,
    pub sweep: Sweep,
    #[serde(default)]
    pub m: Option<usize>,
    #[serde(default)]
    pub sigma: Option<f64>,
    #[serde(default)]
    pub k: Option<usize>,
    pub repetitions: usize,
    pub methods: Vec<Method>,
    pub seed: u64,
    #[serde(default)]
    pub matrix: MatrixConfig,
    #[serde(default)]
    pub anneal: AnnealConfig,
    #[serde(default)]
    pub tuning: TuningConfig,
}

/// Resolved settings for one sweep value.
#[derive(Debug, Clone, PartialEq)]
pub struct CellSettings {
    pub params: InstanceParams,
    pub k_max: usize,
}

impl ExperimentGrid {
    pub fn from_json(text: &str) -> Result<Self> {
        let grid: ExperimentGrid = serde_json::from_str(text)
            .map_err(|e| HarnessError::Config(format!("cannot parse experiment grid: {e}")))?;
        grid.validate()?;
        Ok(grid)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_json(&text).map_err(|e| match e {
            HarnessError::Config(msg) => HarnessError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("grid serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(HarnessError::Config(msg));
        if self.n < 2 {
            return fail(format!("n must be at least 2, got {}", self.n));
        }
        if self.repetitions == 0 {
            return fail("repetitions must be at least 1".into());
        }
        if self.methods.is_empty() {
            return fail("method list is empty".into());
        }
        if self.sweep.values.is_empty() {
            return fail("sweep has no values".into());
        }
        let mut seen = self.methods.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.methods.len() {
            return fail("method list has duplicates".into());
        }
        if self.tuning.grid_points == 0 {
            return fail("tuning.grid_points must be positive".into());
        }
        if self.anneal.sweeps == 0 || self.anneal.restarts == 0 {
            return fail("anneal.sweeps and anneal.restarts must be positive".into());
        }
        if self.matrix.step.is_nan() || self.matrix.step <= 0.0 {
            return fail("matrix.step must be positive".into());
        }
        if self.tuning.k_max == Some(0) {
            return fail("tuning.k_max must be positive".into());
        }
        self.format.build(self.n)?;
        for (axis, present) in [
            (SweepAxis::M, self.m.is_some()),
            (SweepAxis::Sigma, self.sigma.is_some()),
            (SweepAxis::K, self.k.is_some()),
        ] {
            if axis != self.sweep.axis && !present {
                return fail(format!("fixed value for '{}' is missing", axis.name()));
            }
        }
        for &v in &self.sweep.values {
            self.cell_settings(v)?;
        }
        Ok(())
    }

    /// Instance parameters with the sweep axis set to `value`.
    pub fn cell_settings(&self, value: f64) -> Result<CellSettings> {
        let as_count = |v: f64, what: &str| -> Result<usize> {
            if v >= 0.0 && v.fract() == 0.0 && v.is_finite() {
                Ok(v as usize)
            } else {
                Err(HarnessError::Config(format!(
                    "{what} sweep value {v} is not a count"
                )))
            }
        };
        let mut m = self.m.unwrap_or(0);
        let mut sigma = self.sigma.unwrap_or(0.0);
        let mut k = self.k.unwrap_or(0);
        match self.sweep.axis {
            SweepAxis::M => m = as_count(value, "m")?,
            SweepAxis::Sigma => sigma = value,
            SweepAxis::K => k = as_count(value, "k")?,
        }
        if m == 0 {
            return Err(HarnessError::Config("m must be at least 1".into()));
        }
        if !sigma.is_finite() || sigma < 0.0 {
            return Err(HarnessError::Config(format!(
                "sigma must be non-negative, got {sigma}"
            )));
        }
        if k == 0 || k > self.n {
            return Err(HarnessError::Config(format!(
                "k must be in 1..={}, got {k}",
                self.n
            )));
        }
        let k_max = self.tuning.k_max.unwrap_or(2 * k + 2).min(self.n);
        Ok(CellSettings {
            params: InstanceParams {
                rows: m,
                cols: self.n,
                sparsity: k,
                sigma,
                step: self.matrix.step,
                iterations: self.matrix.iterations,
            },
            k_max,
        })
    }

    pub fn apply(&mut self, overrides: &Overrides) -> Result<()> {
        if let Some(axis) = overrides.sweep {
            if axis != self.sweep.axis && overrides.values.is_none() {
                return Err(HarnessError::Config(
                    "changing the sweep axis requires --values".into(),
                ));
            }
            // the previously swept axis needs a fixed value now
            let old = self.sweep.axis;
            if old != axis {
                let first = self.sweep.values[0];
                match old {
                    SweepAxis::M => self.m = self.m.or(Some(first as usize)),
                    SweepAxis::Sigma => self.sigma = self.sigma.or(Some(first)),
                    SweepAxis::K => self.k = self.k.or(Some(first as usize)),
                }
            }
            self.sweep.axis = axis;
        }
        if let Some(values) = &overrides.values {
            self.sweep.values = values.clone();
        }
        if let Some(r) = overrides.repetitions {
            self.repetitions = r;
        }
        if let Some(methods) = &overrides.methods {
            self.methods = methods.clone();
        }
        if let Some(seed) = overrides.seed {
            self.seed = seed;
        }
        self.validate()
    }
}

/// Command-line replacements for individual grid fields.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub sweep: Option<SweepAxis>,
    pub values: Option<Vec<f64>>,
    pub repetitions: Option<usize>,
    pub methods: Option<Vec<Method>>,
    pub seed: Option<u64>,
}
