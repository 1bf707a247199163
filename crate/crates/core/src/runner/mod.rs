//! Declarative experiment runs: TOML configs, figure presets, CSV/JSON
//! outputs with a hashed manifest, and comparison of finished runs.

mod compare;
mod config;
mod exec;
mod presets;

pub use compare::{compare, CompareReport, FileComparison, TimeDistance};
pub use config::{
    CoinKind, CoinSpec, Experiment, ExperimentConfig, Format, InitialSpec, LatticeSpec, OutputSpec, RunSpec, Variant,
};
pub use exec::{
    cue_variance_series, fmt_f64, read_manifest, run, OutputRecord, RunManifest, RunOptions, CHECKPOINT_EVERY,
    MANIFEST_FILE,
};
pub use presets::{
    figure_preset, reseed, PRESET_CUE_SEED, PRESET_NAMES, PRESET_PORTRAIT_SEED, PRESET_SWEEP_SEEDS, SATURATION_WINDOW,
};
