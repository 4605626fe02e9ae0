//! Named experiment presets, config files, calcium-threshold calibration and
//! per-run summaries.

mod calibrate;
mod config;
mod presets;
mod summary;

pub use calibrate::{calibrate_ca_thresholds, probe_calcium, CalciumProbes, Calibration};
pub use config::{apply_config_file, apply_config_str, apply_overrides, load_config};
pub use presets::{
    run_preset, run_preset_with, run_sweep, ExperimentPreset, PresetName, PresetOutput,
};
pub use summary::{summarize, time_to_attractor, RunSummary, SUMMARY_HEADER};
