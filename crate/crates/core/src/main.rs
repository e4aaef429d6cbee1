use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use hsprune::bench::{self, Experiment, ExperimentConfig};
use hsprune::compress::{compress_scene, ResidualFit};
use hsprune::datagen::{self, FlipMode, NoiseSpec};
use hsprune::spectra::GRAM_SCHMIDT_TOLERANCE;
use hsprune::unmix::unmix_cube;
use hsprune::{Dictionary, Error, HyperCube, Method, PruneMethod, Result};

#[derive(Parser)]
#[command(name = "hsprune", version, about = "Sparse hyperspectral unmixing with pruned NNLS")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a dictionary CSV from a USGS directory or a synthetic library.
    Dict(DictArgs),
    /// Generate a synthetic scene as an HCUB cube.
    Synth(SynthArgs),
    /// Unmix a cube; abundances are written as an HCUB with one band per atom.
    Unmix(UnmixArgs),
    /// Unmix plus compression vectors, written as an HSCZ scene.
    Compress(CompressArgs),
    /// Run a sweep and write CSV results plus a summary.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Standard,
    Rbf,
    Mp,
}

impl MethodArg {
    fn method(self, gamma: f64) -> Method {
        match self {
            MethodArg::Standard => Method::Pnnls(PruneMethod::Standard),
            MethodArg::Rbf => Method::Pnnls(PruneMethod::Rbf { gamma }),
            MethodArg::Mp => Method::MatchingPursuit,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FlipArg {
    Atom,
    Band,
}

impl From<FlipArg> for FlipMode {
    fn from(f: FlipArg) -> FlipMode {
        match f {
            FlipArg::Atom => FlipMode::Atom,
            FlipArg::Band => FlipMode::Band,
        }
    }
}

#[derive(Args)]
struct DictArgs {
    /// Directory of USGS ASCII spectra; omit for a synthetic library.
    #[arg(long)]
    usgs_dir: Option<PathBuf>,
    #[arg(long, default_value_t = 448)]
    atoms: usize,
    #[arg(long, default_value_t = 2151)]
    bands: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Gram-Schmidt the atoms (otherwise they are only normalized).
    #[arg(long)]
    orthonormalize: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    dict: PathBuf,
    #[arg(long, default_value_t = 2)]
    rows: usize,
    #[arg(long, default_value_t = 5)]
    cols: usize,
    #[arg(long, default_value_t = 17)]
    support: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Additive white Gaussian noise at this SNR (dB).
    #[arg(long, conflicts_with = "flip_probability")]
    snr_db: Option<f64>,
    /// Sign-flip noise with this probability.
    #[arg(long)]
    flip_probability: Option<f64>,
    #[arg(long, value_enum, default_value = "atom")]
    flip_mode: FlipArg,
    /// Also write the true abundances (HCUB, one band per atom).
    #[arg(long)]
    truth: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    dict: PathBuf,
    #[arg(long)]
    cube: PathBuf,
    #[arg(long, default_value_t = 20)]
    k: usize,
    #[arg(long, value_enum, default_value = "rbf")]
    method: MethodArg,
    #[arg(long, default_value_t = hsprune::pruning::DEFAULT_GAMMA)]
    gamma: f64,
}

#[derive(Args)]
struct UnmixArgs {
    #[command(flatten)]
    solve: SolveArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CompressArgs {
    #[command(flatten)]
    solve: SolveArgs,
    /// Number of compression vectors.
    #[arg(long, default_value_t = 3)]
    c: usize,
    /// Fit residual coefficients with pruned NNLS instead of least squares.
    #[arg(long)]
    strict_paper: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepArg {
    Noise,
    Sparsity,
    Compression,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(value_enum)]
    sweep: SweepArg,
    /// Flat `key = value` config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override any config key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[arg(long)]
    dict: Option<PathBuf>,
    #[arg(long)]
    cube: Option<PathBuf>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    gamma: Option<f64>,
    /// Comma-separated list of standard, rbf, mp.
    #[arg(long)]
    method: Option<String>,
    /// Sweep compression vectors over 0..=c.
    #[arg(long)]
    c: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    flip_mode: Option<FlipArg>,
    /// Fit residual coefficients with pruned NNLS (compression sweep).
    #[arg(long)]
    strict_paper: bool,
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { 1 } else { 2 })
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Dict(a) => dict(a),
        Command::Synth(a) => synth(a),
        Command::Unmix(a) => unmix(a),
        Command::Compress(a) => compress(a),
        Command::Bench(a) => run_bench(a),
    }
}

fn dict(a: DictArgs) -> Result<()> {
    let dict = match &a.usgs_dir {
        Some(dir) => {
            let load = datagen::load_usgs_dir(dir)?;
            for (path, err) in &load.skipped {
                eprintln!("skipped {}: {err}", path.display());
            }
            load.dictionary.normalize()?
        }
        None => datagen::synthetic_library(a.atoms, a.bands, a.seed)?,
    };
    let dict = if a.orthonormalize {
        let (d, report) = dict.gram_schmidt(GRAM_SCHMIDT_TOLERANCE)?;
        if !report.dropped.is_empty() {
            eprintln!("dropped {} dependent atoms", report.dropped.len());
        }
        d
    } else {
        dict
    };
    dict.save_csv(&a.out)?;
    eprintln!("{} atoms × {} bands -> {}", dict.len(), dict.band_count(), a.out.display());
    Ok(())
}

fn synth(a: SynthArgs) -> Result<()> {
    let dict = Dictionary::load_csv(&a.dict)?;
    let noise = match (a.snr_db, a.flip_probability) {
        (Some(snr_db), _) => NoiseSpec::Awgn { snr_db },
        (None, Some(flip_probability)) => NoiseSpec::SignFlip {
            flip_probability,
            mode: a.flip_mode.into(),
        },
        (None, None) => NoiseSpec::None,
    };
    let scene = datagen::synth_scene(&dict, a.rows, a.cols, a.support, noise, a.seed)?;
    datagen::save_cube(&scene.cube, &a.out)?;
    if let Some(path) = &a.truth {
        let truth = HyperCube::new(scene.ground_truth.data, a.rows, a.cols)?;
        datagen::save_cube(&truth, path)?;
    }
    Ok(())
}

fn load_inputs(a: &SolveArgs) -> Result<(Dictionary, HyperCube)> {
    let dict = Dictionary::load_csv(&a.dict)?;
    let cube = datagen::load_cube(&a.cube)?;
    Ok((dict, cube))
}

fn report_diagnostics(diagnostics: &[hsprune::unmix::PixelDiagnostic]) {
    for d in diagnostics {
        eprintln!("pixel {}: {}", d.pixel, d.message);
    }
}

fn unmix(a: UnmixArgs) -> Result<()> {
    let (dict, cube) = load_inputs(&a.solve)?;
    let method = a.solve.method.method(a.solve.gamma);
    let result = unmix_cube(&cube, &dict, a.solve.k, method)?;
    report_diagnostics(&result.diagnostics);
    let out = HyperCube::new(result.map.data, cube.rows(), cube.cols())?;
    datagen::save_cube(&out, &a.out)
}

fn compress(a: CompressArgs) -> Result<()> {
    let (dict, cube) = load_inputs(&a.solve)?;
    let method = a.solve.method.method(a.solve.gamma);
    let fit = if a.strict_paper {
        ResidualFit::PrunedNnls(match method {
            Method::Pnnls(prune) => prune,
            Method::MatchingPursuit => PruneMethod::Standard,
        })
    } else {
        ResidualFit::Unconstrained
    };
    let scene = compress_scene(&cube, &dict, a.solve.k, a.c, method, fit)?;
    report_diagnostics(&scene.diagnostics);
    let recon = scene.reconstruct(&dict)?;
    let err = hsprune::compress::compression_error(&cube, &recon)?;
    eprintln!("compression error (scene mean L1 per band): {:.6e}", err.scene_mean);
    scene.save(&a.out)
}

fn bench_config(a: &BenchArgs) -> Result<ExperimentConfig> {
    let experiment = match a.sweep {
        SweepArg::Noise => Experiment::NoiseSweep,
        SweepArg::Sparsity => Experiment::SparsitySweep,
        SweepArg::Compression => Experiment::CompressionSweep,
    };
    let mut config = match &a.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            let config = ExperimentConfig::parse(&text, experiment)?;
            if config.experiment != experiment {
                return Err(Error::Config(format!(
                    "{} is a `{}` config",
                    path.display(),
                    config.experiment.id()
                )));
            }
            config
        }
        None => ExperimentConfig::defaults(experiment),
    };
    for kv in &a.overrides {
        let (key, value) = kv
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("--set expects KEY=VALUE, got `{kv}`")))?;
        config.set(key.trim(), value.trim())?;
    }
    if let Some(p) = &a.dict {
        config.set("dict", &path_str(p))?;
    }
    if let Some(p) = &a.cube {
        config.set("cube", &path_str(p))?;
    }
    if let Some(k) = a.k {
        config.k = k;
    }
    if let Some(g) = a.gamma {
        config.gamma = g;
    }
    if let Some(m) = &a.method {
        config.set("methods", m)?;
    }
    if let Some(c) = a.c {
        config.grid = (0..=c).map(|v| v as f64).collect();
    }
    if let Some(s) = a.seed {
        config.seed = s;
    }
    if let Some(f) = a.flip_mode {
        config.flip_mode = f.into();
    }
    if a.strict_paper {
        config.pruned_residual_fit = true;
    }
    Ok(config)
}

fn path_str(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

fn run_bench(a: BenchArgs) -> Result<()> {
    let config = bench_config(&a)?;
    let rows = bench::run_experiment(&config)?;
    bench::emit_csv(&rows, &a.out)?;
    bench::emit_summary(&rows, bench::summary_path(&a.out))?;
    eprint!("{}", bench::summary_text(&rows));
    Ok(())
}
