//! Simulation parameters and their flat `section.key` registry, shared by the
//! config loader, `--set` overrides, sweeps and presets.

use std::fmt;
use std::str::FromStr;

use crate::dynamics::{DpiParams, NeuronParams};
use crate::error::{ConfigError, Violation};
use crate::plasticity::PlasticityParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SourceKind {
    Regular,
    Poisson,
}

impl FromStr for SourceKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "regular" => Ok(SourceKind::Regular),
            "poisson" => Ok(SourceKind::Poisson),
            _ => Err(format!("expected `regular` or `poisson`, got `{s}`")),
        }
    }
}

impl fmt::Display for SourceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SourceKind::Regular => "regular",
            SourceKind::Poisson => "poisson",
        })
    }
}

/// Input and target spike trains driving the row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StimulusParams {
    pub input_kind: SourceKind,
    /// Per-synapse input rate, Hz.
    pub input_rate: f64,
    pub input_start: f64,
    pub input_stop: f64,
    /// Synapse `i` is phase shifted by `i * input_phase_spread` ms.
    pub input_phase_spread: f64,
    pub target_kind: SourceKind,
    pub target_rate: f64,
    pub target_start: f64,
    pub target_stop: f64,
    /// Fixed (non-plastic) weight of the target synapse, nA.
    pub target_weight: f64,
}

impl Default for StimulusParams {
    fn default() -> Self {
        Self {
            input_kind: SourceKind::Regular,
            input_rate: 25.0,
            input_start: 0.0,
            input_stop: f64::INFINITY,
            input_phase_spread: 0.0,
            target_kind: SourceKind::Regular,
            target_rate: 1000.0,
            target_start: 0.0,
            target_stop: 10_000.0,
            target_weight: 0.04,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimParams {
    /// Global integration step, ms.
    pub dt: f64,
    pub duration: f64,
    pub n_synapses: usize,
    pub rng_seed: u64,
    /// Trace sampling interval, ms. Must be a whole number of steps.
    pub sample_interval: f64,
    /// Record every synapse's `v_w` in the trace.
    pub record_v_w: bool,
    pub neuron: NeuronParams,
    pub dpi: DpiParams,
    pub plasticity: PlasticityParams,
    pub stimulus: StimulusParams,
}

impl Default for SimParams {
    fn default() -> Self {
        Self {
            dt: 0.05,
            duration: 20_000.0,
            n_synapses: 40,
            rng_seed: 0,
            sample_interval: 1.0,
            record_v_w: false,
            neuron: NeuronParams::default(),
            dpi: DpiParams::default(),
            plasticity: PlasticityParams::default(),
            stimulus: StimulusParams::default(),
        }
    }
}

trait ParamValue: Sized {
    fn parse_value(s: &str) -> Result<Self, String>;
    fn render(&self) -> String;
}

impl ParamValue for f64 {
    fn parse_value(s: &str) -> Result<Self, String> {
        match s {
            "inf" | "+inf" | "infinity" => Ok(f64::INFINITY),
            _ => s.parse::<f64>().map_err(|e| e.to_string()),
        }
    }

    fn render(&self) -> String {
        format!("{self}")
    }
}

impl ParamValue for usize {
    fn parse_value(s: &str) -> Result<Self, String> {
        s.parse()
            .map_err(|e: std::num::ParseIntError| e.to_string())
    }

    fn render(&self) -> String {
        self.to_string()
    }
}

impl ParamValue for u64 {
    fn parse_value(s: &str) -> Result<Self, String> {
        s.parse()
            .map_err(|e: std::num::ParseIntError| e.to_string())
    }

    fn render(&self) -> String {
        self.to_string()
    }
}

impl ParamValue for bool {
    fn parse_value(s: &str) -> Result<Self, String> {
        match s {
            "true" | "1" | "yes" => Ok(true),
            "false" | "0" | "no" => Ok(false),
            _ => Err(format!("expected a boolean, got `{s}`")),
        }
    }

    fn render(&self) -> String {
        self.to_string()
    }
}

impl ParamValue for SourceKind {
    fn parse_value(s: &str) -> Result<Self, String> {
        s.parse()
    }

    fn render(&self) -> String {
        self.to_string()
    }
}

macro_rules! param_table {
    ($($key:literal => $($field:ident).+;)*) => {
        /// Every configurable key, in canonical order.
        pub const PARAM_KEYS: &[&str] = &[$($key),*];

        impl SimParams {
            /// Sets one parameter from its textual value.
            pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
                let value = value.trim();
                match key {
                    $($key => {
                        self.$($field).+ = ParamValue::parse_value(value).map_err(|reason| {
                            ConfigError::BadValue {
                                key: key.to_string(),
                                value: value.to_string(),
                                reason,
                            }
                        })?;
                    })*
                    _ => return Err(ConfigError::UnknownKey(key.to_string())),
                }
                Ok(())
            }

            /// Current value of one parameter, rendered as it would be written
            /// in a config file.
            pub fn get(&self, key: &str) -> Option<String> {
                match key {
                    $($key => Some(self.$($field).+.render()),)*
                    _ => None,
                }
            }

            /// All `(key, value)` pairs in canonical order.
            pub fn entries(&self) -> Vec<(&'static str, String)> {
                vec![$(($key, self.$($field).+.render())),*]
            }
        }
    };
}

param_table! {
    "dt" => dt;
    "duration" => duration;
    "n_synapses" => n_synapses;
    "rng_seed" => rng_seed;
    "sample_interval" => sample_interval;
    "record_v_w" => record_v_w;
    "neuron.threshold" => neuron.threshold;
    "neuron.reset" => neuron.reset;
    "neuron.tau_mem" => neuron.tau_mem;
    "neuron.t_refr" => neuron.t_refr;
    "neuron.k_in" => neuron.k_in;
    "dpi.tau_syn" => dpi.tau_syn;
    "dpi.gain_syn" => dpi.gain_syn;
    "dpi.tau_target" => dpi.tau_target;
    "dpi.gain_target" => dpi.gain_target;
    "dpi.tau_ca" => dpi.tau_ca;
    "dpi.j_ca" => dpi.j_ca;
    "plasticity.v_dd" => plasticity.v_dd;
    "plasticity.v_thl" => plasticity.v_thl;
    "plasticity.v_thh" => plasticity.v_thh;
    "plasticity.i_0" => plasticity.i_0;
    "plasticity.i_wb" => plasticity.i_wb;
    "plasticity.drift_rate" => plasticity.drift_rate;
    "plasticity.eta_up" => plasticity.eta_up;
    "plasticity.eta_dn" => plasticity.eta_dn;
    "plasticity.delta_deadband" => plasticity.delta_deadband;
    "plasticity.i_bh_window" => plasticity.i_bh_window;
    "plasticity.theta_ca_low" => plasticity.theta_ca_low;
    "plasticity.theta_ca_high" => plasticity.theta_ca_high;
    "plasticity.v_w_init" => plasticity.v_w_init;
    "stimulus.input_kind" => stimulus.input_kind;
    "stimulus.input_rate" => stimulus.input_rate;
    "stimulus.input_start" => stimulus.input_start;
    "stimulus.input_stop" => stimulus.input_stop;
    "stimulus.input_phase_spread" => stimulus.input_phase_spread;
    "stimulus.target_kind" => stimulus.target_kind;
    "stimulus.target_rate" => stimulus.target_rate;
    "stimulus.target_start" => stimulus.target_start;
    "stimulus.target_stop" => stimulus.target_stop;
    "stimulus.target_weight" => stimulus.target_weight;
}

impl SimParams {
    /// Number of integration steps covering `duration`.
    pub fn total_steps(&self) -> u64 {
        (self.duration / self.dt).round() as u64
    }

    /// Steps between two trace samples.
    pub fn sample_every(&self) -> u64 {
        ((self.sample_interval / self.dt).round() as u64).max(1)
    }

    /// Every violated invariant; empty when the parameters are usable.
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if !(self.dt.is_finite() && self.dt > 0.0) {
            out.push(Violation::new("dt", "must be positive"));
        }
        if !(self.duration.is_finite() && self.duration > 0.0) {
            out.push(Violation::new("duration", "must be positive and finite"));
        }
        if self.n_synapses == 0 {
            out.push(Violation::new("n_synapses", "must be at least 1"));
        }

        let taus = [
            ("dpi.tau_syn", self.dpi.tau_syn),
            ("dpi.tau_target", self.dpi.tau_target),
            ("dpi.tau_ca", self.dpi.tau_ca),
        ];
        for (k, tau) in taus {
            if !(tau.is_finite() && tau > 0.0) {
                out.push(Violation::new(k, "time constant must be positive"));
            }
        }
        let min_tau = taus.iter().map(|t| t.1).fold(f64::INFINITY, f64::min);
        if self.dt > 0.0 && min_tau > 0.0 && self.dt > min_tau / 10.0 {
            out.push(Violation::new(
                "dt",
                format!("must not exceed min(tau)/10 = {}", min_tau / 10.0),
            ));
        }
        for (k, g) in [
            ("dpi.gain_syn", self.dpi.gain_syn),
            ("dpi.gain_target", self.dpi.gain_target),
            ("dpi.j_ca", self.dpi.j_ca),
        ] {
            if !(g.is_finite() && g >= 0.0) {
                out.push(Violation::new(k, "must be non-negative"));
            }
        }

        if self.dt > 0.0 && self.sample_interval.is_finite() && self.sample_interval > 0.0 {
            let ratio = self.sample_interval / self.dt;
            if ratio < 1.0 - 1e-9 || (ratio - ratio.round()).abs() > 1e-6 {
                out.push(Violation::new(
                    "sample_interval",
                    "must be a whole multiple of dt",
                ));
            }
        } else {
            out.push(Violation::new("sample_interval", "must be positive"));
        }

        let n = &self.neuron;
        if !(n.threshold.is_finite() && n.reset.is_finite() && n.threshold > n.reset) {
            out.push(Violation::new(
                "neuron.threshold",
                "must exceed neuron.reset",
            ));
        }
        if !(n.tau_mem.is_finite() && n.tau_mem > 0.0) {
            out.push(Violation::new("neuron.tau_mem", "must be positive"));
        }
        if !(n.t_refr.is_finite() && n.t_refr >= 0.0) {
            out.push(Violation::new("neuron.t_refr", "must be non-negative"));
        }
        if !(n.k_in.is_finite() && n.k_in >= 0.0) {
            out.push(Violation::new("neuron.k_in", "must be non-negative"));
        }

        out.extend(self.plasticity.violations());

        let s = &self.stimulus;
        for (prefix, rate, start, stop) in [
            ("stimulus.input", s.input_rate, s.input_start, s.input_stop),
            (
                "stimulus.target",
                s.target_rate,
                s.target_start,
                s.target_stop,
            ),
        ] {
            if !(rate.is_finite() && rate >= 0.0) {
                out.push(Violation::new(
                    format!("{prefix}_rate"),
                    "must be non-negative",
                ));
            }
            if !(start.is_finite() && start >= 0.0) {
                out.push(Violation::new(
                    format!("{prefix}_start"),
                    "must be non-negative",
                ));
            }
            if !(start <= stop) {
                out.push(Violation::new(
                    format!("{prefix}_stop"),
                    "must not precede start",
                ));
            }
        }
        if !(s.input_phase_spread.is_finite() && s.input_phase_spread >= 0.0) {
            out.push(Violation::new(
                "stimulus.input_phase_spread",
                "must be non-negative",
            ));
        }
        if !(s.target_weight.is_finite() && s.target_weight >= 0.0) {
            out.push(Violation::new(
                "stimulus.target_weight",
                "must be non-negative",
            ));
        }
        out
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Invalid(v))
        }
    }

    /// Keys whose values differ between two parameter sets.
    pub fn diff(&self, other: &SimParams) -> Vec<&'static str> {
        self.entries()
            .into_iter()
            .zip(other.entries())
            .filter(|(a, b)| a.1 != b.1)
            .map(|(a, _)| a.0)
            .collect()
    }
}
