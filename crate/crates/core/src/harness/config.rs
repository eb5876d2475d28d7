use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::baselines::BaselineKind;
use crate::channel::TapShape;
use crate::error::{AfdmError, Result};
use crate::estimator::SearchConfig;
use crate::grid::AfdmGrid;

/// Estimators a sweep can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorKind {
    Proposed,
    IntegerOnly,
    TwoDSearch,
}

impl EstimatorKind {
    pub fn name(self) -> &'static str {
        match self {
            EstimatorKind::Proposed => "proposed",
            EstimatorKind::IntegerOnly => BaselineKind::IntegerOnly.name(),
            EstimatorKind::TwoDSearch => BaselineKind::TwoDSearch.name(),
        }
    }
}

impl From<BaselineKind> for EstimatorKind {
    fn from(b: BaselineKind) -> Self {
        match b {
            BaselineKind::IntegerOnly => EstimatorKind::IntegerOnly,
            BaselineKind::TwoDSearch => EstimatorKind::TwoDSearch,
        }
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EstimatorKind {
    type Err = AfdmError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "proposed" => Ok(EstimatorKind::Proposed),
            "integer-only" => Ok(EstimatorKind::IntegerOnly),
            "two-d-search" => Ok(EstimatorKind::TwoDSearch),
            other => Err(AfdmError::Config(format!("unknown estimator `{other}`"))),
        }
    }
}

/// Everything a sweep or validation run needs. Loads from a flat TOML file;
/// missing keys take the defaults below.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n: usize,
    pub k_max: usize,
    pub l_max: usize,
    /// Extra guard chirps; used when `segments` is empty.
    pub eta_v: usize,
    /// Explicit segment counts `C` to sweep.
    pub segments: Vec<usize>,
    pub c2: f64,
    pub n_cp: usize,
    /// Guard chirps on each side of the pilot; `None` takes the grid's `Q`.
    pub guard_width: Option<usize>,
    pub snr_db: Vec<f64>,
    pub ep_ei_db: Vec<f64>,
    pub trials: usize,
    pub estimates_per_trial: usize,
    /// Average the per-frame estimates of a trial before scoring. When off,
    /// every frame is scored on its own; the `trials` column is unchanged.
    pub average_estimates: bool,
    pub estimators: Vec<EstimatorKind>,
    pub master_seed: u64,
    pub fir_half_width: usize,
    pub tap_shape: TapShape,
    pub coarse_points: usize,
    pub refine_tol: f64,
    /// Oversampling of the continuous-time reference in `validate`.
    pub oracle_oversampling: usize,
    /// Random channels per check in `validate`.
    pub validation_draws: usize,
    pub output: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n: 256,
            k_max: 3,
            l_max: 3,
            eta_v: 4,
            segments: Vec::new(),
            c2: std::f64::consts::SQRT_2,
            n_cp: 32,
            guard_width: None,
            snr_db: (0..=6).map(|i| 5.0 * i as f64).collect(),
            ep_ei_db: vec![10.0],
            trials: 200,
            estimates_per_trial: 10,
            average_estimates: true,
            estimators: vec![EstimatorKind::Proposed, EstimatorKind::IntegerOnly, EstimatorKind::TwoDSearch],
            master_seed: 1,
            fir_half_width: 16,
            tap_shape: TapShape::Baseband,
            coarse_points: 64,
            refine_tol: 1e-3,
            oracle_oversampling: 16,
            validation_draws: 50,
            output: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(s).map_err(|e| AfdmError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| AfdmError::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 || self.estimates_per_trial < 1 {
            return Err(AfdmError::Config("trials and estimates_per_trial must be at least 1".into()));
        }
        if self.snr_db.is_empty() || self.ep_ei_db.is_empty() || self.estimators.is_empty() {
            return Err(AfdmError::Config("snr_db, ep_ei_db and estimators must be non-empty".into()));
        }
        if self.n_cp < self.l_max + self.fir_half_width {
            return Err(AfdmError::Config(format!(
                "n_cp = {} cannot hold l_max + fir_half_width = {}",
                self.n_cp,
                self.l_max + self.fir_half_width
            )));
        }
        self.search()?;
        for g in self.grids()? {
            if g.segments() <= 2 * g.k_max() {
                return Err(AfdmError::Config(format!("C = {} leaves no Doppler slack", g.segments())));
            }
            let guard = self.guard_for(&g);
            if guard == 0 || 2 * guard >= g.n() {
                return Err(AfdmError::Config(format!("guard width {guard} does not fit N = {}", g.n())));
            }
        }
        Ok(())
    }

    /// Segment counts to sweep.
    pub fn segment_list(&self) -> Vec<usize> {
        if self.segments.is_empty() {
            vec![2 * self.k_max + self.eta_v]
        } else {
            self.segments.clone()
        }
    }

    pub fn grids(&self) -> Result<Vec<AfdmGrid>> {
        self.segment_list()
            .into_iter()
            .map(|c| AfdmGrid::with_segments(self.n, self.k_max, c, self.c2, self.l_max, self.n_cp))
            .collect()
    }

    /// Guard width used with `grid`.
    pub fn guard_for(&self, grid: &AfdmGrid) -> usize {
        self.guard_width.unwrap_or(grid.guard())
    }

    pub fn search(&self) -> Result<SearchConfig> {
        SearchConfig::new(self.coarse_points, self.refine_tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let cfg = ExperimentConfig::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.segment_list(), vec![10]);
        assert_eq!(cfg.snr_db.len(), 7);
    }

    #[test]
    fn toml_round_trip() {
        let mut cfg = ExperimentConfig::default();
        cfg.segments = vec![10, 18, 26];
        cfg.output = Some("out/run".into());
        let text = cfg.to_toml_string().unwrap();
        assert_eq!(ExperimentConfig::from_toml_str(&text).unwrap(), cfg);
    }

    #[test]
    fn partial_file_takes_defaults() {
        let cfg = ExperimentConfig::from_toml_str("trials = 5\nsnr_db = [10.0]\nestimators = [\"proposed\"]\n").unwrap();
        assert_eq!(cfg.trials, 5);
        assert_eq!(cfg.n, 256);
        assert_eq!(cfg.estimators, vec![EstimatorKind::Proposed]);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(ExperimentConfig::from_toml_str("trials = 0").is_err());
        assert!(ExperimentConfig::from_toml_str("snr_db = []").is_err());
        assert!(ExperimentConfig::from_toml_str("n_cp = 8").is_err());
        assert!(ExperimentConfig::from_toml_str("bogus = 1").is_err());
        assert!(ExperimentConfig::from_toml_str("coarse_points = 4").is_err());
        assert!(ExperimentConfig::from_toml_str("guard_width = 128").is_err());
    }

    #[test]
    fn estimator_names_parse() {
        for k in [EstimatorKind::Proposed, EstimatorKind::IntegerOnly, EstimatorKind::TwoDSearch] {
            assert_eq!(k.name().parse::<EstimatorKind>().unwrap(), k);
        }
        assert!("aml".parse::<EstimatorKind>().is_err());
    }
}
