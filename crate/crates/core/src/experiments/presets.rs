use std::fmt;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;

use super::summary::{summarize, RunSummary, SUMMARY_HEADER};
use crate::engine::{run_params, sweep_params};
use crate::error::{ConfigError, Error, Result};
use crate::params::SimParams;
use crate::plasticity::CALIBRATED_THETA_CA_HIGH;
use crate::trace::Trace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PresetName {
    Fig5Forget,
    Fig5Retain,
    TristabilitySweep,
    HysteresisSweep,
}

impl PresetName {
    pub const ALL: [PresetName; 4] = [
        PresetName::Fig5Forget,
        PresetName::Fig5Retain,
        PresetName::TristabilitySweep,
        PresetName::HysteresisSweep,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PresetName::Fig5Forget => "fig5_forget",
            PresetName::Fig5Retain => "fig5_retain",
            PresetName::TristabilitySweep => "tristability_sweep",
            PresetName::HysteresisSweep => "hysteresis_sweep",
        }
    }
}

impl fmt::Display for PresetName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PresetName {
    type Err = ConfigError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        PresetName::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| ConfigError::UnknownPreset(s.to_string()))
    }
}

/// Hysteresis windows of the stop-learning comparators, as fractions of the
/// calibrated high calcium threshold.
pub const SMALL_WINDOW_FRACTION: f64 = 0.05;
pub const MEDIUM_WINDOW_FRACTION: f64 = 0.2;
pub const LARGE_WINDOW_FRACTION: f64 = 0.4;

fn window(fraction: f64) -> String {
    format!("{}", fraction * CALIBRATED_THETA_CA_HIGH)
}

/// A named protocol: overrides on top of the defaults, plus an optional sweep
/// axis.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentPreset {
    pub name: PresetName,
    pub overrides: Vec<(&'static str, String)>,
    pub sweep: Option<(&'static str, Vec<String>)>,
}

impl ExperimentPreset {
    pub fn get(name: PresetName) -> Self {
        let owned = |pairs: &[(&'static str, &str)]| -> Vec<(&'static str, String)> {
            pairs.iter().map(|(k, v)| (*k, v.to_string())).collect()
        };
        match name {
            // Training with the target on for 10 s, inference for 10 s.
            PresetName::Fig5Forget => Self {
                name,
                overrides: vec![("plasticity.i_bh_window", window(SMALL_WINDOW_FRACTION))],
                sweep: None,
            },
            PresetName::Fig5Retain => Self {
                name,
                overrides: vec![("plasticity.i_bh_window", window(LARGE_WINDOW_FRACTION))],
                sweep: None,
            },
            // A single synapse trained briefly with the stop-learning gate
            // held open, then left alone while the tristate amplifiers settle it.
            PresetName::TristabilitySweep => Self {
                name,
                overrides: owned(&[
                    ("n_synapses", "1"),
                    ("record_v_w", "true"),
                    ("duration", "5000"),
                    ("plasticity.eta_up", "0.005"),
                    ("plasticity.eta_dn", "0.005"),
                    ("plasticity.theta_ca_low", "0"),
                    ("plasticity.theta_ca_high", "1e9"),
                    ("plasticity.i_bh_window", "0"),
                    ("stimulus.input_stop", "1800"),
                    ("stimulus.target_stop", "1800"),
                ]),
                sweep: Some((
                    "plasticity.drift_rate",
                    vec!["0.0002".into(), "0.0003".into(), "0.0004".into()],
                )),
            },
            PresetName::HysteresisSweep => Self {
                name,
                overrides: Vec::new(),
                sweep: Some((
                    "plasticity.i_bh_window",
                    [
                        SMALL_WINDOW_FRACTION,
                        MEDIUM_WINDOW_FRACTION,
                        LARGE_WINDOW_FRACTION,
                    ]
                    .into_iter()
                    .map(window)
                    .collect(),
                )),
            },
        }
    }

    /// Defaults merged with this preset's overrides.
    pub fn params(&self) -> std::result::Result<SimParams, ConfigError> {
        let mut p = SimParams::default();
        for (k, v) in &self.overrides {
            p.set(k, v)?;
        }
        p.validate()?;
        Ok(p)
    }
}

/// Files written by a preset or sweep run.
#[derive(Debug, Clone, PartialEq)]
pub struct PresetOutput {
    pub traces: Vec<PathBuf>,
    pub summary: PathBuf,
    pub summaries: Vec<RunSummary>,
}

impl PresetOutput {
    pub fn written(&self) -> Vec<&Path> {
        let mut all: Vec<&Path> = self.traces.iter().map(PathBuf::as_path).collect();
        all.push(&self.summary);
        all
    }
}

fn stim_end(params: &SimParams) -> Option<f64> {
    params
        .record_v_w
        .then_some(params.stimulus.input_stop)
        .filter(|t| t.is_finite())
}

/// Runs a preset with its own parameters and the given seed.
pub fn run_preset(name: PresetName, out_dir: &Path, seed: u64) -> Result<PresetOutput> {
    let preset = ExperimentPreset::get(name);
    let mut params = preset.params()?;
    params.rng_seed = seed;
    run_preset_with(&preset, &params, out_dir)
}

/// Runs a preset on caller-supplied parameters (preset overrides already
/// merged, plus any config file or command-line overrides).
pub fn run_preset_with(
    preset: &ExperimentPreset,
    params: &SimParams,
    out_dir: &Path,
) -> Result<PresetOutput> {
    match &preset.sweep {
        Some((axis, values)) => run_sweep(params, axis, values, out_dir, preset.name.as_str()),
        None => {
            params.validate()?;
            create_dir(out_dir)?;
            let trace = run_params(params)?;
            let path = out_dir.join(format!("{}.csv", preset.name));
            trace.write_csv_file(&path)?;
            let summary = summarize(
                &trace,
                params.stimulus.target_stop,
                stim_end(params),
                params,
            );
            let summary_path = out_dir.join(format!("{}_summary.csv", preset.name));
            write_summary(&summary_path, &[(summary.clone(), "-", "-")])?;
            Ok(PresetOutput {
                traces: vec![path],
                summary: summary_path,
                summaries: vec![summary],
            })
        }
    }
}

/// Sweeps `axis` over `values`, writing `<label>_<i>.csv` per run and one
/// `<label>_summary.csv`.
pub fn run_sweep(
    base: &SimParams,
    axis: &str,
    values: &[String],
    out_dir: &Path,
    label: &str,
) -> Result<PresetOutput> {
    let runs = sweep_params(base, axis, values)?;
    create_dir(out_dir)?;
    let traces: Vec<Trace> = runs
        .par_iter()
        .map(run_params)
        .collect::<std::result::Result<_, _>>()?;
    let mut paths = Vec::with_capacity(traces.len());
    let mut summaries = Vec::with_capacity(traces.len());
    for (i, (trace, p)) in traces.iter().zip(&runs).enumerate() {
        let path = out_dir.join(format!("{label}_{i}.csv"));
        trace.write_csv_file(&path)?;
        paths.push(path);
        summaries.push(summarize(trace, p.stimulus.target_stop, stim_end(p), p));
    }
    let summary_path = out_dir.join(format!("{label}_summary.csv"));
    let rows: Vec<(RunSummary, &str, &str)> = summaries
        .iter()
        .cloned()
        .zip(values)
        .map(|(s, v)| (s, axis, v.as_str()))
        .collect();
    write_summary(&summary_path, &rows)?;
    Ok(PresetOutput {
        traces: paths,
        summary: summary_path,
        summaries,
    })
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_summary(path: &Path, rows: &[(RunSummary, &str, &str)]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let mut write = || -> std::io::Result<()> {
        writeln!(out, "{SUMMARY_HEADER}")?;
        for (i, (s, axis, value)) in rows.iter().enumerate() {
            writeln!(out, "{}", s.csv_row(i, axis, value))?;
        }
        out.flush()
    };
    write().map_err(|e| Error::io(path, e))
}
