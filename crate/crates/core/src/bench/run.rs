//! The three synthetic sweeps.
//!
//! Every replication draws its scene from a seed derived from
//! `(config.seed, replication)`, so all sweep points and methods of one
//! replication see the same scene and adding a method never changes the
//! rows of another.

use std::time::Instant;

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::config::{DictionarySource, ErrorNorm, Experiment, ExperimentConfig, MethodKind};
use super::report::{Replication, ResultRow};
use crate::compress::{attach_basis, compression_basis, residual_cube, CompressionBasis, ResidualFit};
use crate::datagen::{derive_seed, load_cube, load_usgs_dir, plant_out_of_dictionary, synth_scene, synthetic_library};
use crate::datagen::{NoiseSpec, SyntheticScene};
use crate::error::{Error, Result};
use crate::pruning::PruneMethod;
use crate::spectra::{Dictionary, HyperCube, GRAM_SCHMIDT_TOLERANCE};
use crate::unmix::{unmix_cube, AbundanceMap, Method};

const DOMAIN_SCENE: u64 = 11;
const DOMAIN_PLANT: u64 = 12;

/// Builds the dictionary described by the config.
pub fn load_dictionary(config: &ExperimentConfig) -> Result<Dictionary> {
    let dict = match &config.dictionary {
        DictionarySource::Synthetic { atoms, bands } => synthetic_library(*atoms, *bands, config.seed)?,
        DictionarySource::Csv(path) => Dictionary::load_csv(path)?,
        DictionarySource::UsgsDir(path) => load_usgs_dir(path)?.dictionary,
    };
    let dict = if config.orthonormalize {
        dict.gram_schmidt(GRAM_SCHMIDT_TOLERANCE)?.0
    } else if dict.is_normalized(1e-12) {
        dict
    } else {
        dict.normalize()?
    };
    match config.atom_limit {
        Some(n) if n < dict.len() => {
            let keep: Vec<usize> = (0..n).collect();
            Dictionary::new(dict.names()[..n].to_vec(), dict.columns(&keep))
        }
        _ => Ok(dict),
    }
}

/// Dispatches on `config.experiment`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    match config.experiment {
        Experiment::NoiseSweep => run_noise_sweep(config),
        Experiment::SparsitySweep => run_sparsity_sweep(config),
        Experiment::CompressionSweep => run_compression_sweep(config),
    }
}

/// Coefficient error against ground truth, per SNR and replication.
pub fn run_noise_sweep(config: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    expect(config, Experiment::NoiseSweep)?;
    config.validate()?;
    let dict = load_dictionary(config)?;
    let tasks: Vec<(usize, usize)> = grid_by_replication(config);
    let results: Vec<Result<Vec<(f64, f64, f64)>>> = tasks
        .par_iter()
        .map(|&(g, rep)| {
            let noise = NoiseSpec::Awgn { snr_db: config.grid[g] };
            let scene = scene_for(config, &dict, noise, rep)?;
            config
                .methods
                .iter()
                .map(|m| {
                    let start = Instant::now();
                    let map = solve(&scene.cube, &dict, config.k, m.with_gamma(config.gamma))?;
                    let (mean, std) = coefficient_error(&map, &scene.ground_truth, config.error_norm);
                    Ok((mean, std, elapsed_ms(config, start)))
                })
                .collect()
        })
        .collect();
    assemble(config, &tasks, results)
}

/// Coefficient error against ground truth under sign-flip noise, per `k`.
pub fn run_sparsity_sweep(config: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    expect(config, Experiment::SparsitySweep)?;
    config.validate()?;
    let dict = load_dictionary(config)?;
    if let Some(&k) = config.grid.last() {
        if k as usize > dict.len() {
            return Err(Error::KOutOfRange { k: k as usize, n: dict.len() });
        }
    }
    let noise = NoiseSpec::SignFlip {
        flip_probability: config.flip_probability,
        mode: config.flip_mode,
    };
    let scenes: Vec<SyntheticScene> = (0..config.replications)
        .into_par_iter()
        .map(|rep| scene_for(config, &dict, noise, rep))
        .collect::<Result<_>>()?;

    let tasks = grid_by_replication(config);
    let results: Vec<Result<Vec<(f64, f64, f64)>>> = tasks
        .par_iter()
        .map(|&(g, rep)| {
            let k = config.grid[g] as usize;
            let scene = &scenes[rep];
            config
                .methods
                .iter()
                .map(|m| {
                    let start = Instant::now();
                    let map = solve(&scene.cube, &dict, k, m.with_gamma(config.gamma))?;
                    let (mean, std) = coefficient_error(&map, &scene.ground_truth, config.error_norm);
                    Ok((mean, std, elapsed_ms(config, start)))
                })
                .collect()
        })
        .collect();
    assemble(config, &tasks, results)
}

/// Scene-mean reconstruction error per number of compression vectors.
///
/// Abundances and the largest basis are computed once per replication and
/// method; each `c` truncates the basis.
pub fn run_compression_sweep(config: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    expect(config, Experiment::CompressionSweep)?;
    config.validate()?;
    let dict = load_dictionary(config)?;
    let grid: Vec<usize> = config.grid.iter().map(|&c| c as usize).collect();
    let c_max = *grid.last().expect("validated nonempty");

    let cubes: Vec<HyperCube> = (0..config.replications)
        .into_par_iter()
        .map(|rep| compression_cube(config, &dict, rep))
        .collect::<Result<_>>()?;
    let limit = cubes[0].band_count().min(cubes[0].pixel_count());
    if c_max > limit {
        return Err(Error::CTooLarge { c: c_max, max: limit });
    }

    // (replication, method) -> one error triple per grid value
    let jobs: Vec<(usize, usize)> = (0..config.replications)
        .flat_map(|rep| (0..config.methods.len()).map(move |m| (rep, m)))
        .collect();
    let per_job: Vec<Result<Vec<(f64, f64, f64)>>> = jobs
        .par_iter()
        .map(|&(rep, m)| {
            let cube = &cubes[rep];
            let kind = config.methods[m];
            let method = kind.with_gamma(config.gamma);
            let start = Instant::now();
            let map = solve(cube, &dict, config.k, method)?;
            let residuals = residual_cube(cube, &dict, &map)?;
            let full = if c_max == 0 {
                CompressionBasis::empty(cube.band_count())
            } else {
                match compression_basis(&residuals, c_max) {
                    Ok(b) => b,
                    Err(Error::ZeroResidual) => CompressionBasis::empty(cube.band_count()),
                    Err(e) => return Err(e),
                }
            };
            let shared_ms = elapsed_ms(config, start);
            let fit = residual_fit(config, kind);
            grid.iter()
                .map(|&c| {
                    let start = Instant::now();
                    let scene = attach_basis(&map, &residuals, &full.truncate(c), fit)?;
                    if let Some(d) = scene.diagnostics.first() {
                        return Err(Error::ConvergenceFailure(format!("pixel {}: {}", d.pixel, d.message)));
                    }
                    let recon = scene.reconstruct(&dict)?;
                    let (mean, std) = reconstruction_error(cube, &recon, config.error_norm);
                    Ok((mean, std, shared_ms + elapsed_ms(config, start)))
                })
                .collect()
        })
        .collect();
    let per_job: Vec<Vec<(f64, f64, f64)>> = per_job.into_iter().collect::<Result<_>>()?;

    // Regroup into the (grid, replication) task layout shared by the sweeps.
    let tasks = grid_by_replication(config);
    let results = tasks
        .iter()
        .map(|&(g, rep)| {
            Ok((0..config.methods.len())
                .map(|m| per_job[rep * config.methods.len() + m][g])
                .collect())
        })
        .collect();
    assemble(config, &tasks, results)
}

fn expect(config: &ExperimentConfig, experiment: Experiment) -> Result<()> {
    if config.experiment != experiment {
        return Err(Error::Config(format!(
            "expected a `{}` config, got `{}`",
            experiment.id(),
            config.experiment.id()
        )));
    }
    Ok(())
}

fn grid_by_replication(config: &ExperimentConfig) -> Vec<(usize, usize)> {
    (0..config.grid.len())
        .flat_map(|g| (0..config.replications).map(move |r| (g, r)))
        .collect()
}

fn scene_for(config: &ExperimentConfig, dict: &Dictionary, noise: NoiseSpec, rep: usize) -> Result<SyntheticScene> {
    let seed = derive_seed(config.seed, DOMAIN_SCENE, rep as u64);
    synth_scene(dict, config.rows, config.cols, config.support_size, noise, seed)
}

fn compression_cube(config: &ExperimentConfig, dict: &Dictionary, rep: usize) -> Result<HyperCube> {
    if let Some(path) = &config.cube {
        let cube = load_cube(path)?;
        if cube.band_count() != dict.band_count() {
            return Err(Error::mismatch("cube band count", dict.band_count(), cube.band_count()));
        }
        return Ok(cube);
    }
    let noise = match config.snr_db {
        Some(snr_db) => NoiseSpec::Awgn { snr_db },
        None => NoiseSpec::None,
    };
    let scene = scene_for(config, dict, noise, rep)?;
    if config.planted_rank == 0 {
        return Ok(scene.cube);
    }
    let seed = derive_seed(config.seed, DOMAIN_PLANT, rep as u64);
    let (cube, _) = plant_out_of_dictionary(&scene.cube, dict, config.planted_rank, config.planted_scale, seed)?;
    Ok(cube)
}

fn residual_fit(config: &ExperimentConfig, kind: MethodKind) -> ResidualFit {
    if !config.pruned_residual_fit {
        return ResidualFit::Unconstrained;
    }
    match kind.with_gamma(config.gamma) {
        Method::Pnnls(prune) => ResidualFit::PrunedNnls(prune),
        Method::MatchingPursuit => ResidualFit::PrunedNnls(PruneMethod::Standard),
    }
}

fn solve(cube: &HyperCube, dict: &Dictionary, k: usize, method: Method) -> Result<AbundanceMap> {
    let unmixed = unmix_cube(cube, dict, k, method)?;
    if let Some(d) = unmixed.diagnostics.first() {
        return Err(Error::ConvergenceFailure(format!("pixel {}: {}", d.pixel, d.message)));
    }
    Ok(unmixed.map)
}

fn elapsed_ms(config: &ExperimentConfig, start: Instant) -> f64 {
    if config.timing {
        start.elapsed().as_secs_f64() * 1e3
    } else {
        0.0
    }
}

fn norm(v: impl Iterator<Item = f64>, which: ErrorNorm) -> f64 {
    match which {
        ErrorNorm::L1 => v.map(f64::abs).sum(),
        ErrorNorm::L2 => v.map(|x| x * x).sum::<f64>().sqrt(),
    }
}

/// Mean and sample std over pixels of `‖ĉ − β‖`.
pub fn coefficient_error(estimate: &AbundanceMap, truth: &AbundanceMap, which: ErrorNorm) -> (f64, f64) {
    let per_pixel: Vec<f64> = (0..truth.pixel_count())
        .map(|px| {
            let diff = estimate.data.column(px) - truth.data.column(px);
            norm(diff.iter().copied(), which)
        })
        .collect();
    mean_std(&per_pixel)
}

/// Mean and sample std over pixels of `‖y − ŷ‖ / p` (L1) or `‖y − ŷ‖₂` (L2).
pub fn reconstruction_error(cube: &HyperCube, recon: &HyperCube, which: ErrorNorm) -> (f64, f64) {
    let p = cube.band_count() as f64;
    let diff: DMatrix<f64> = cube.matrix() - recon.matrix();
    let per_pixel: Vec<f64> = diff
        .column_iter()
        .map(|col| match which {
            ErrorNorm::L1 => col.iter().map(|v| v.abs()).sum::<f64>() / p,
            ErrorNorm::L2 => col.norm(),
        })
        .collect();
    mean_std(&per_pixel)
}

/// Mean and sample standard deviation (`n − 1`); std is 0 for one value.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

/// Orders per-task results into rows: for each grid value and method, one
/// row per replication followed by the aggregate row.
fn assemble(
    config: &ExperimentConfig,
    tasks: &[(usize, usize)],
    results: Vec<Result<Vec<(f64, f64, f64)>>>,
) -> Result<Vec<ResultRow>> {
    let results: Vec<Vec<(f64, f64, f64)>> = results.into_iter().collect::<Result<_>>()?;
    let reps = config.replications;
    let mut rows = Vec::with_capacity(config.grid.len() * config.methods.len() * (reps + 1));
    for (g, &value) in config.grid.iter().enumerate() {
        for (m, kind) in config.methods.iter().enumerate() {
            let label = kind.with_gamma(config.gamma).label();
            let mut means = Vec::with_capacity(reps);
            let mut wall = 0.0;
            for rep in 0..reps {
                let idx = g * reps + rep;
                debug_assert_eq!(tasks[idx], (g, rep));
                let (mean, std, ms) = results[idx][m];
                means.push(mean);
                wall += ms;
                rows.push(ResultRow {
                    experiment: config.experiment.id(),
                    method: label,
                    sweep_value: value,
                    replication: Replication::Index(rep),
                    mean_error: mean,
                    std_error: std,
                    wall_ms: ms,
                });
            }
            let (mean, std) = mean_std(&means);
            rows.push(ResultRow {
                experiment: config.experiment.id(),
                method: label,
                sweep_value: value,
                replication: Replication::All,
                mean_error: mean,
                std_error: std,
                wall_ms: wall,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(experiment: Experiment) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::defaults(experiment);
        cfg.dictionary = DictionarySource::Synthetic { atoms: 12, bands: 40 };
        cfg.rows = 1;
        cfg.cols = 3;
        cfg.support_size = 3;
        cfg.replications = 2;
        cfg
    }

    #[test]
    fn sample_std_uses_n_minus_one() {
        let (m, s) = mean_std(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(mean_std(&[7.0]), (7.0, 0.0));
    }

    #[test]
    fn noiseless_noise_sweep_recovers_exactly() {
        let mut cfg = small(Experiment::NoiseSweep);
        cfg.grid = vec![f64::INFINITY];
        cfg.k = 5;
        cfg.methods = vec![MethodKind::PnnlsStandard, MethodKind::PnnlsRbf];
        let rows = run_noise_sweep(&cfg).unwrap();
        assert_eq!(rows.len(), 2 * 3);
        assert!(rows.iter().all(|r| r.mean_error < 1e-8));
    }

    #[test]
    fn row_order_is_grid_method_replication() {
        let mut cfg = small(Experiment::SparsitySweep);
        cfg.grid = vec![2.0, 6.0];
        cfg.methods = vec![MethodKind::PnnlsStandard, MethodKind::MatchingPursuit];
        let rows = run_sparsity_sweep(&cfg).unwrap();
        let keys: Vec<(f64, &str, Replication)> =
            rows.iter().map(|r| (r.sweep_value, r.method, r.replication)).collect();
        assert_eq!(keys.len(), 2 * 2 * 3);
        assert_eq!(keys[0], (2.0, "pnnls_standard", Replication::Index(0)));
        assert_eq!(keys[2], (2.0, "pnnls_standard", Replication::All));
        assert_eq!(keys[3], (2.0, "mp", Replication::Index(0)));
        assert_eq!(keys[6], (6.0, "pnnls_standard", Replication::Index(0)));
    }

    #[test]
    fn adding_a_method_leaves_other_rows_alone() {
        let mut cfg = small(Experiment::SparsitySweep);
        cfg.grid = vec![3.0];
        cfg.methods = vec![MethodKind::PnnlsRbf];
        let alone = run_sparsity_sweep(&cfg).unwrap();
        cfg.methods = vec![MethodKind::PnnlsStandard, MethodKind::PnnlsRbf];
        let both = run_sparsity_sweep(&cfg).unwrap();
        let rbf: Vec<_> = both.into_iter().filter(|r| r.method == "pnnls_rbf").collect();
        assert_eq!(alone, rbf);
    }

    #[test]
    fn compression_c_zero_matches_plain_unmixing() {
        let mut cfg = small(Experiment::CompressionSweep);
        cfg.grid = vec![0.0, 1.0];
        cfg.planted_rank = 1;
        cfg.k = 12;
        cfg.methods = vec![MethodKind::PnnlsStandard];
        cfg.replications = 1;
        let rows = run_compression_sweep(&cfg).unwrap();

        let dict = load_dictionary(&cfg).unwrap();
        let cube = compression_cube(&cfg, &dict, 0).unwrap();
        let map = solve(&cube, &dict, cfg.k, Method::Pnnls(PruneMethod::Standard)).unwrap();
        let recon = crate::unmix::reconstruct(&map, &dict).unwrap();
        let (plain, _) = reconstruction_error(&cube, &recon, ErrorNorm::L1);
        assert!((rows[0].mean_error - plain).abs() < 1e-15);
        assert!(rows[2].mean_error < 0.1 * rows[0].mean_error);
    }

    #[test]
    fn wrong_experiment_rejected() {
        let cfg = small(Experiment::NoiseSweep);
        assert!(matches!(run_sparsity_sweep(&cfg), Err(Error::Config(_))));
    }

    #[test]
    fn oversized_k_is_a_config_error() {
        let mut cfg = small(Experiment::SparsitySweep);
        cfg.grid = vec![13.0];
        assert!(run_sparsity_sweep(&cfg).unwrap_err().is_config());
    }
}
