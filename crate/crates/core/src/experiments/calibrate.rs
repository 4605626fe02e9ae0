use crate::engine::run_params;
use crate::error::ConfigError;
use crate::params::SimParams;

/// Settled mean calcium level of the four reference regimes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalciumProbes {
    /// Target on, all weights HIGH.
    pub target_trained: f64,
    /// Target on, all weights MID.
    pub target_mid: f64,
    /// Target off, all weights HIGH.
    pub input_trained: f64,
    /// Target off, all weights MID.
    pub input_mid: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Calibration {
    pub theta_ca_low: f64,
    pub theta_ca_high: f64,
    pub probes: CalciumProbes,
}

const PROBE_DURATION: f64 = 4000.0;
const PROBE_AVERAGE: f64 = 1000.0;

/// Mean calcium over the last second of a 4 s run with frozen weights at
/// `v_w` and the target pathway on or off.
pub fn probe_calcium(params: &SimParams, v_w: f64, target_on: bool) -> Result<f64, ConfigError> {
    let mut p = params.clone();
    p.duration = PROBE_DURATION;
    p.record_v_w = false;
    p.plasticity.v_w_init = v_w;
    p.plasticity.eta_up = 0.0;
    p.plasticity.eta_dn = 0.0;
    p.plasticity.drift_rate = 0.0;
    p.stimulus.input_start = 0.0;
    p.stimulus.input_stop = f64::INFINITY;
    p.stimulus.target_start = 0.0;
    p.stimulus.target_stop = if target_on { f64::INFINITY } else { 0.0 };
    let trace = run_params(&p)?;
    let (sum, n) = trace
        .between(PROBE_DURATION - PROBE_AVERAGE, f64::INFINITY)
        .fold((0.0, 0usize), |(s, n), r| (s + r.i_ca, n + 1));
    Ok(if n == 0 { 0.0 } else { sum / n as f64 })
}

// Minimum relative separation between the trained target-on regime and
// everything that must stay below the high threshold.
const MIN_SEPARATION: f64 = 1.02;

/// Places the high threshold halfway between the trained target-on calcium
/// level and the largest level that must keep learning enabled, and the low
/// threshold at half the input-only, mid-weight level.
pub fn calibrate_ca_thresholds(params: &SimParams) -> Result<Calibration, ConfigError> {
    params.validate()?;
    let v_dd = params.plasticity.v_dd;
    let probes = CalciumProbes {
        target_trained: probe_calcium(params, v_dd, true)?,
        target_mid: probe_calcium(params, v_dd / 2.0, true)?,
        input_trained: probe_calcium(params, v_dd, false)?,
        input_mid: probe_calcium(params, v_dd / 2.0, false)?,
    };
    let below = probes.target_mid.max(probes.input_trained);
    if !(probes.target_trained > below * MIN_SEPARATION && probes.target_trained > 0.0) {
        return Err(ConfigError::Calibration(format!(
            "trained target-on calcium {:.4} does not separate from {:.4}; \
             increase stimulus.target_weight or plasticity.i_wb",
            probes.target_trained, below
        )));
    }
    if !(probes.input_mid > 0.0) {
        return Err(ConfigError::Calibration(
            "input-only probe with mid weights is silent; increase plasticity.i_wb or neuron.k_in"
                .into(),
        ));
    }
    let theta_ca_high = 0.5 * (below + probes.target_trained);
    let theta_ca_low = 0.5 * probes.input_mid;
    Ok(Calibration {
        theta_ca_low,
        theta_ca_high,
        probes,
    })
}
