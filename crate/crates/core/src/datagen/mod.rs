//! Data ingestion and synthetic scene generation.

mod cube_io;
mod synth;
mod usgs;

pub use cube_io::{load_cube, read_cube, save_cube, write_cube, CUBE_MAGIC, CUBE_VERSION};
pub use synth::{
    apply_awgn, apply_sign_flip, derive_seed, plant_out_of_dictionary, substream, synth_scene,
    synth_scene_with, synthetic_library, CoefficientDistribution, FlipMode, NoiseSpec,
    SyntheticScene,
};
pub use usgs::{load_usgs_dir, parse_usgs_ascii, LibraryLoad, MISSING_SENTINEL};
