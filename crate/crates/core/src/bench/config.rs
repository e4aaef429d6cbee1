//! Flat `key = value` experiment configuration.
//!
//! Blank lines and `#` comments are ignored. Every key can also be set on
//! the command line, and later settings override earlier ones.

use std::path::PathBuf;

use crate::datagen::FlipMode;
use crate::error::{Error, Result};
use crate::pruning::{PruneMethod, DEFAULT_GAMMA};
use crate::unmix::Method;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    NoiseSweep,
    SparsitySweep,
    CompressionSweep,
}

impl Experiment {
    pub fn id(&self) -> &'static str {
        match self {
            Experiment::NoiseSweep => "noise",
            Experiment::SparsitySweep => "sparsity",
            Experiment::CompressionSweep => "compression",
        }
    }

    pub fn parse(s: &str) -> Result<Experiment> {
        match s.trim() {
            "noise" => Ok(Experiment::NoiseSweep),
            "sparsity" => Ok(Experiment::SparsitySweep),
            "compression" => Ok(Experiment::CompressionSweep),
            other => Err(Error::Config(format!("unknown experiment `{other}`"))),
        }
    }
}

/// Which solver a result row belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodKind {
    PnnlsStandard,
    PnnlsRbf,
    MatchingPursuit,
}

impl MethodKind {
    pub fn parse(s: &str) -> Result<MethodKind> {
        match s.trim() {
            "standard" | "pnnls_standard" => Ok(MethodKind::PnnlsStandard),
            "rbf" | "pnnls_rbf" => Ok(MethodKind::PnnlsRbf),
            "mp" => Ok(MethodKind::MatchingPursuit),
            other => Err(Error::Config(format!("unknown method `{other}`"))),
        }
    }

    pub fn with_gamma(&self, gamma: f64) -> Method {
        match self {
            MethodKind::PnnlsStandard => Method::Pnnls(PruneMethod::Standard),
            MethodKind::PnnlsRbf => Method::Pnnls(PruneMethod::Rbf { gamma }),
            MethodKind::MatchingPursuit => Method::MatchingPursuit,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DictionarySource {
    /// Generated reflectance-like library.
    Synthetic { atoms: usize, bands: usize },
    Csv(PathBuf),
    UsgsDir(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorNorm {
    L1,
    L2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub dictionary: DictionarySource,
    /// Gram-Schmidt the dictionary before use.
    pub orthonormalize: bool,
    /// Keep only the first `n` atoms of the (orthonormalized) dictionary.
    pub atom_limit: Option<usize>,
    pub rows: usize,
    pub cols: usize,
    pub support_size: usize,
    pub methods: Vec<MethodKind>,
    pub gamma: f64,
    /// Sparsity for the noise and compression sweeps.
    pub k: usize,
    /// SNR values (dB), k values, or c values depending on the experiment.
    pub grid: Vec<f64>,
    pub replications: usize,
    pub seed: u64,
    pub flip_probability: f64,
    pub flip_mode: FlipMode,
    /// Optional AWGN on synthetic compression scenes.
    pub snr_db: Option<f64>,
    /// Compression sweep on a supplied cube instead of a synthetic scene.
    pub cube: Option<PathBuf>,
    pub planted_rank: usize,
    pub planted_scale: f64,
    pub pruned_residual_fit: bool,
    pub error_norm: ErrorNorm,
    /// Record wall time; off keeps the CSV byte-reproducible.
    pub timing: bool,
}

impl ExperimentConfig {
    /// Defaults for each sweep.
    pub fn defaults(experiment: Experiment) -> ExperimentConfig {
        let base = ExperimentConfig {
            experiment,
            dictionary: DictionarySource::Synthetic { atoms: 448, bands: 2151 },
            orthonormalize: true,
            atom_limit: None,
            rows: 2,
            cols: 5,
            support_size: 17,
            methods: vec![MethodKind::PnnlsRbf],
            gamma: DEFAULT_GAMMA,
            k: 20,
            grid: vec![10.0, 20.0, 30.0, 40.0, 50.0, 60.0],
            replications: 10,
            seed: 1,
            flip_probability: 0.1,
            flip_mode: FlipMode::Atom,
            snr_db: None,
            cube: None,
            planted_rank: 3,
            planted_scale: 0.5,
            pruned_residual_fit: false,
            error_norm: ErrorNorm::L1,
            timing: false,
        };
        match experiment {
            Experiment::NoiseSweep => base,
            Experiment::SparsitySweep => ExperimentConfig {
                dictionary: DictionarySource::Synthetic { atoms: 97, bands: 224 },
                support_size: 97,
                methods: vec![
                    MethodKind::PnnlsStandard,
                    MethodKind::PnnlsRbf,
                    MethodKind::MatchingPursuit,
                ],
                grid: (1..=97).step_by(4).map(f64::from).collect(),
                replications: 30,
                ..base
            },
            Experiment::CompressionSweep => ExperimentConfig {
                dictionary: DictionarySource::Synthetic { atoms: 30, bands: 120 },
                orthonormalize: false,
                rows: 6,
                cols: 6,
                support_size: 5,
                methods: vec![MethodKind::PnnlsRbf, MethodKind::MatchingPursuit],
                // No pruning, so the residual is only what the library cannot express.
                k: 30,
                grid: (0..=10).map(f64::from).collect(),
                replications: 1,
                ..base
            },
        }
    }

    /// Parses a config file body on top of `defaults(experiment)`.
    pub fn parse(text: &str, experiment: Experiment) -> Result<ExperimentConfig> {
        let mut pairs = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Config(format!("line {}: expected `key = value`", lineno + 1)));
            };
            pairs.push((key.trim().to_string(), value.trim().to_string()));
        }
        // The experiment key picks the defaults, so apply it first.
        let experiment = match pairs.iter().rev().find(|(k, _)| k == "experiment") {
            Some((_, v)) => Experiment::parse(v)?,
            None => experiment,
        };
        let mut config = ExperimentConfig::defaults(experiment);
        for (key, value) in pairs {
            config.set(&key, &value)?;
        }
        Ok(config)
    }

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |what: &str| Error::Config(format!("`{key}`: {what} `{value}`"));
        match key {
            "experiment" => {
                let e = Experiment::parse(value)?;
                if e != self.experiment {
                    return Err(Error::Config(format!(
                        "config is for `{}`, not `{}`",
                        e.id(),
                        self.experiment.id()
                    )));
                }
            }
            "dict" => self.dictionary = DictionarySource::Csv(PathBuf::from(value)),
            "usgs_dir" => self.dictionary = DictionarySource::UsgsDir(PathBuf::from(value)),
            "library_atoms" | "library_bands" => {
                let v: usize = value.parse().map_err(|_| bad("not an integer"))?;
                let (mut atoms, mut bands) = match self.dictionary {
                    DictionarySource::Synthetic { atoms, bands } => (atoms, bands),
                    _ => (448, 2151),
                };
                if key == "library_atoms" {
                    atoms = v;
                } else {
                    bands = v;
                }
                self.dictionary = DictionarySource::Synthetic { atoms, bands };
            }
            "orthonormalize" => self.orthonormalize = parse_bool(value).ok_or_else(|| bad("not a boolean"))?,
            "atom_limit" => {
                self.atom_limit = if value == "none" {
                    None
                } else {
                    Some(value.parse().map_err(|_| bad("not an integer"))?)
                }
            }
            "rows" => self.rows = value.parse().map_err(|_| bad("not an integer"))?,
            "cols" => self.cols = value.parse().map_err(|_| bad("not an integer"))?,
            "support" => self.support_size = value.parse().map_err(|_| bad("not an integer"))?,
            "methods" | "method" => {
                self.methods = value
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(MethodKind::parse)
                    .collect::<Result<_>>()?
            }
            "gamma" => self.gamma = value.parse().map_err(|_| bad("not a number"))?,
            "k" => self.k = value.parse().map_err(|_| bad("not an integer"))?,
            "grid" => {
                self.grid = value
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(|s| parse_f64(s.trim()).ok_or_else(|| bad("not a number list")))
                    .collect::<Result<_>>()?
            }
            "replications" => self.replications = value.parse().map_err(|_| bad("not an integer"))?,
            "seed" => self.seed = value.parse().map_err(|_| bad("not a u64"))?,
            "flip_probability" => self.flip_probability = value.parse().map_err(|_| bad("not a number"))?,
            "flip_mode" => {
                self.flip_mode = match value {
                    "atom" => FlipMode::Atom,
                    "band" => FlipMode::Band,
                    _ => return Err(bad("expected atom|band, got")),
                }
            }
            "snr_db" => {
                self.snr_db = if value == "none" {
                    None
                } else {
                    Some(parse_f64(value).ok_or_else(|| bad("not a number"))?)
                }
            }
            "cube" => self.cube = Some(PathBuf::from(value)),
            "planted_rank" => self.planted_rank = value.parse().map_err(|_| bad("not an integer"))?,
            "planted_scale" => self.planted_scale = value.parse().map_err(|_| bad("not a number"))?,
            "pruned_residual_fit" => self.pruned_residual_fit = parse_bool(value).ok_or_else(|| bad("not a boolean"))?,
            "error_norm" => {
                self.error_norm = match value {
                    "l1" | "L1" => ErrorNorm::L1,
                    "l2" | "L2" => ErrorNorm::L2,
                    _ => return Err(bad("expected l1|l2, got")),
                }
            }
            "timing" => self.timing = parse_bool(value).ok_or_else(|| bad("not a boolean"))?,
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.replications < 1 {
            return fail("replications must be at least 1".into());
        }
        if self.grid.is_empty() {
            return fail("sweep grid is empty".into());
        }
        if self.grid.iter().any(|v| v.is_nan()) || !self.grid.windows(2).all(|w| w[0] < w[1]) {
            return fail("sweep grid must be strictly increasing".into());
        }
        if self.methods.is_empty() {
            return fail("no methods selected".into());
        }
        if self.rows == 0 || self.cols == 0 {
            return fail("rows and cols must be positive".into());
        }
        if !(self.gamma > 0.0) || !self.gamma.is_finite() {
            return Err(Error::NonPositiveGamma(self.gamma));
        }
        if !(0.0..=1.0).contains(&self.flip_probability) {
            return Err(Error::InvalidProbability(self.flip_probability));
        }
        match self.experiment {
            Experiment::SparsitySweep | Experiment::CompressionSweep => {
                if self.grid.iter().any(|v| *v < 0.0 || v.fract() != 0.0 || v.is_infinite()) {
                    return fail("grid values must be nonnegative integers".into());
                }
            }
            Experiment::NoiseSweep => {}
        }
        if self.experiment == Experiment::SparsitySweep && self.grid[0] < 1.0 {
            return fail("sparsity grid values must be at least 1".into());
        }
        Ok(())
    }
}

fn parse_bool(s: &str) -> Option<bool> {
    match s {
        "true" | "yes" | "1" => Some(true),
        "false" | "no" | "0" => Some(false),
        _ => None,
    }
}

fn parse_f64(s: &str) -> Option<f64> {
    match s {
        "inf" | "+inf" | "infinity" => Some(f64::INFINITY),
        other => other.parse().ok(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_overrides() {
        let text = "\
# noise experiment
experiment = noise
k = 30
grid = 10, 20, inf   # trailing comment
methods = standard,rbf
seed = 42
";
        let cfg = ExperimentConfig::parse(text, Experiment::SparsitySweep).unwrap();
        assert_eq!(cfg.experiment, Experiment::NoiseSweep);
        assert_eq!(cfg.k, 30);
        assert_eq!(cfg.grid, vec![10.0, 20.0, f64::INFINITY]);
        assert_eq!(cfg.methods, vec![MethodKind::PnnlsStandard, MethodKind::PnnlsRbf]);
        assert_eq!(cfg.seed, 42);
        cfg.validate().unwrap();
    }

    #[test]
    fn unknown_key_rejected() {
        assert!(matches!(
            ExperimentConfig::parse("bogus = 1", Experiment::NoiseSweep),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn validation_catches_unsorted_grid() {
        let mut cfg = ExperimentConfig::defaults(Experiment::NoiseSweep);
        cfg.grid = vec![20.0, 10.0];
        assert!(cfg.validate().is_err());
        cfg.grid = vec![];
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn validation_catches_zero_replications() {
        let mut cfg = ExperimentConfig::defaults(Experiment::SparsitySweep);
        cfg.replications = 0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn library_dimensions_update_independently() {
        let mut cfg = ExperimentConfig::defaults(Experiment::NoiseSweep);
        cfg.set("library_bands", "500").unwrap();
        assert_eq!(cfg.dictionary, DictionarySource::Synthetic { atoms: 448, bands: 500 });
    }

    #[test]
    fn defaults_are_valid() {
        for e in [Experiment::NoiseSweep, Experiment::SparsitySweep, Experiment::CompressionSweep] {
            ExperimentConfig::defaults(e).validate().unwrap();
        }
    }
}
