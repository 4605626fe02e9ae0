//! Continuous-time primitives of the neuron row: DPI current integrators,
//! the integrate-and-fire soma and its calcium trace.
//!
//! All decays are integrated in closed form, so a DPI current only depends on
//! the spike times it has seen and not on the step size used to reach them.

use crate::error::DynamicsError;

/// Behavioral model of a differential pair integrator: a first-order low-pass
/// filter of a spike train. Currents are in nA and times in ms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DpiState {
    pub current: f64,
    tau: f64,
    jump_gain: f64,
}

impl DpiState {
    /// Creates an integrator at rest. `tau` must be strictly positive and
    /// `jump_gain` non-negative; both are checked here so stepping never fails.
    pub fn new(tau: f64, jump_gain: f64) -> Result<Self, DynamicsError> {
        if !(tau.is_finite() && tau > 0.0) {
            return Err(DynamicsError::NonPositiveTau(tau));
        }
        if !(jump_gain.is_finite() && jump_gain >= 0.0) {
            return Err(DynamicsError::NegativeGain(jump_gain));
        }
        Ok(Self {
            current: 0.0,
            tau,
            jump_gain,
        })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn jump_gain(&self) -> f64 {
        self.jump_gain
    }

    /// Exact exponential decay over `dt` ms.
    pub fn decay(&mut self, dt: f64) {
        debug_assert!(dt >= 0.0);
        self.current *= (-dt / self.tau).exp();
    }

    /// Exact time average of the current over the next `dt` ms of free decay.
    pub fn mean_over(&self, dt: f64) -> f64 {
        if dt <= 0.0 {
            return self.current;
        }
        self.current * self.tau / dt * -(-dt / self.tau).exp_m1()
    }

    /// Instantaneous additive jump for one incoming spike of the given weight.
    pub fn on_spike(&mut self, weight: f64) {
        debug_assert!(weight >= 0.0);
        self.current += self.jump_gain * weight;
    }

    /// `count` coincident spikes, applied as one jump scaled by the count.
    pub fn on_spikes(&mut self, weight: f64, count: u32) {
        if count > 0 {
            self.on_spike(weight * f64::from(count));
        }
    }
}

/// Pure form of [`DpiState::decay`].
pub fn dpi_decay(mut state: DpiState, dt: f64) -> DpiState {
    state.decay(dt);
    state
}

/// Pure form of [`DpiState::on_spike`].
pub fn dpi_on_spike(mut state: DpiState, weight: f64) -> DpiState {
    state.on_spike(weight);
    state
}

/// Parameters of the leaky integrate-and-fire soma.
///
/// Membrane dynamics: `dV/dt = -g_leak (V - reset) + k_in * i_in`, with
/// `g_leak = 1 / tau_mem`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeuronParams {
    pub threshold: f64,
    pub reset: f64,
    /// Membrane time constant in ms.
    pub tau_mem: f64,
    /// Absolute refractory period in ms.
    pub t_refr: f64,
    /// Input coupling in model-volts per ms per nA.
    pub k_in: f64,
}

impl Default for NeuronParams {
    fn default() -> Self {
        Self {
            threshold: 1.0,
            reset: 0.0,
            tau_mem: 10.0,
            t_refr: 2.0,
            k_in: 0.1,
        }
    }
}

impl NeuronParams {
    pub fn g_leak(&self) -> f64 {
        1.0 / self.tau_mem
    }

    /// Input current at which the steady-state membrane reaches threshold.
    pub fn rheobase(&self) -> f64 {
        (self.threshold - self.reset) * self.g_leak() / self.k_in
    }
}

/// Time constants and gains of the three DPIs attached to the soma.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DpiParams {
    pub tau_syn: f64,
    pub gain_syn: f64,
    pub tau_target: f64,
    pub gain_target: f64,
    pub tau_ca: f64,
    /// Calcium jump per post-synaptic spike, nA.
    pub j_ca: f64,
}

impl Default for DpiParams {
    fn default() -> Self {
        Self {
            tau_syn: 100.0,
            gain_syn: 1.0,
            tau_target: 100.0,
            gain_target: 1.0,
            tau_ca: 500.0,
            j_ca: 0.01,
        }
    }
}

/// Soma state: membrane, refractory timer and the input, target and calcium
/// DPIs.
#[derive(Debug, Clone, PartialEq)]
pub struct NeuronState {
    pub membrane: f64,
    pub threshold: f64,
    pub reset: f64,
    pub refractory_remaining: f64,
    pub i_syn_dpi: DpiState,
    pub i_target_dpi: DpiState,
    pub i_ca_dpi: DpiState,
    g_leak: f64,
    k_in: f64,
    t_refr: f64,
    j_ca: f64,
}

// Refractory timers are decremented by a float dt; anything below this is zero.
const REFRACTORY_EPS: f64 = 1e-9;

impl NeuronState {
    pub fn new(neuron: &NeuronParams, dpi: &DpiParams) -> Result<Self, DynamicsError> {
        if !(neuron.tau_mem.is_finite() && neuron.tau_mem > 0.0) {
            return Err(DynamicsError::NonPositiveTau(neuron.tau_mem));
        }
        if !(neuron.threshold > neuron.reset) {
            return Err(DynamicsError::EmptyMembraneRange {
                reset: neuron.reset,
                threshold: neuron.threshold,
            });
        }
        if !(neuron.t_refr >= 0.0) {
            return Err(DynamicsError::NegativeRefractory(neuron.t_refr));
        }
        if !(dpi.j_ca >= 0.0) {
            return Err(DynamicsError::NegativeGain(dpi.j_ca));
        }
        Ok(Self {
            membrane: neuron.reset,
            threshold: neuron.threshold,
            reset: neuron.reset,
            refractory_remaining: 0.0,
            i_syn_dpi: DpiState::new(dpi.tau_syn, dpi.gain_syn)?,
            i_target_dpi: DpiState::new(dpi.tau_target, dpi.gain_target)?,
            i_ca_dpi: DpiState::new(dpi.tau_ca, 1.0)?,
            g_leak: neuron.g_leak(),
            k_in: neuron.k_in,
            t_refr: neuron.t_refr,
            j_ca: dpi.j_ca,
        })
    }

    /// Advances the membrane by `dt` with `i_in` held constant over the step.
    /// Returns whether the neuron fired during the step.
    ///
    /// Threshold crossings are located exactly inside the step, and the part
    /// of the step after the crossing counts toward the refractory period, so
    /// firing rates do not depend on the step size.
    pub fn step(&mut self, i_in: f64, dt: f64) -> bool {
        debug_assert!(dt > 0.0);
        let mut remaining = dt;
        if self.refractory_remaining > REFRACTORY_EPS {
            self.membrane = self.reset;
            if self.refractory_remaining >= remaining - REFRACTORY_EPS {
                self.refractory_remaining = (self.refractory_remaining - remaining).max(0.0);
                if self.refractory_remaining <= REFRACTORY_EPS {
                    self.refractory_remaining = 0.0;
                }
                return false;
            }
            remaining -= self.refractory_remaining;
        }
        self.refractory_remaining = 0.0;

        // Exact solution of the linear membrane equation for constant input.
        let v_inf = self.reset + self.k_in * i_in / self.g_leak;
        let v = v_inf + (self.membrane - v_inf) * (-self.g_leak * remaining).exp();
        if v >= self.threshold {
            let crossing = if v_inf > self.threshold && self.membrane < self.threshold {
                ((v_inf - self.membrane) / (v_inf - self.threshold)).ln() / self.g_leak
            } else {
                0.0
            };
            let after = (remaining - crossing).clamp(0.0, remaining);
            self.membrane = self.reset;
            self.refractory_remaining = (self.t_refr - after).max(0.0);
            true
        } else {
            self.membrane = v.max(self.reset);
            false
        }
    }

    /// Decays the calcium trace and adds one jump per post-synaptic spike.
    pub fn calcium_update(&mut self, post_spiked: bool, dt: f64) {
        self.i_ca_dpi.decay(dt);
        if post_spiked {
            self.i_ca_dpi.current += self.j_ca;
        }
    }

    pub fn j_ca(&self) -> f64 {
        self.j_ca
    }
}

/// Pure form of [`NeuronState::step`].
pub fn neuron_step(mut state: NeuronState, i_in: f64, dt: f64) -> (NeuronState, bool) {
    let spiked = state.step(i_in, dt);
    (state, spiked)
}

/// Pure form of [`NeuronState::calcium_update`].
pub fn calcium_update(mut state: NeuronState, post_spiked: bool, dt: f64) -> NeuronState {
    state.calcium_update(post_spiked, dt);
    state
}
