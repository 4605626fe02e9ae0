//! Fixed-step simulation of one neuron row: N plastic synapses, one target
//! pathway and the soma with its learn gate.

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dynamics::NeuronState;
use crate::error::ConfigError;
use crate::params::SimParams;
use crate::plasticity::{
    delta_rule, discretize_weight, DeltaSignals, LearnGateState, SynapseState,
};
use crate::spikes::{derive_seed, stream_rng, SpikeSource};
use crate::trace::{Trace, TraceRecord};

/// The spike trains feeding one run: one source per plastic synapse plus the
/// target pathway.
#[derive(Debug, Clone, PartialEq)]
pub struct Sources {
    pub inputs: Vec<SpikeSource>,
    pub target: SpikeSource,
}

impl Sources {
    /// Sources described by the stimulus block of `params`.
    pub fn from_params(params: &SimParams) -> Self {
        let s = &params.stimulus;
        let inputs = (0..params.n_synapses)
            .map(|i| SpikeSource {
                kind: s.input_kind,
                rate: s.input_rate,
                start: s.input_start,
                stop: s.input_stop,
                phase: i as f64 * s.input_phase_spread,
            })
            .collect();
        let target = SpikeSource {
            kind: s.target_kind,
            rate: s.target_rate,
            start: s.target_start,
            stop: s.target_stop,
            phase: 0.0,
        };
        Self { inputs, target }
    }
}

/// Spike bookkeeping for one source.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EventCount {
    pub generated: u64,
    pub delivered: u64,
}

#[derive(Debug, Clone)]
pub struct Simulation {
    params: SimParams,
    sources: Sources,
    input_rngs: Vec<ChaCha8Rng>,
    target_rng: ChaCha8Rng,
    neuron: NeuronState,
    synapses: Vec<SynapseState>,
    gate: LearnGateState,
    signals: DeltaSignals,
    step_index: u64,
    total_steps: u64,
    sample_every: u64,
    spiked_since_sample: bool,
    input_events: Vec<EventCount>,
    target_events: EventCount,
    post_spikes: u64,
}

impl Simulation {
    pub fn new(params: SimParams, sources: Sources) -> Result<Self, ConfigError> {
        params.validate()?;
        if sources.inputs.len() != params.n_synapses {
            return Err(ConfigError::Invalid(vec![crate::error::Violation::new(
                "n_synapses",
                format!(
                    "{} input sources supplied for {} synapses",
                    sources.inputs.len(),
                    params.n_synapses
                ),
            )]));
        }
        let neuron = NeuronState::new(&params.neuron, &params.dpi)?;
        let p = &params.plasticity;
        let synapses = vec![SynapseState::new(p.v_w_init, p); params.n_synapses];
        let input_rngs = (0..params.n_synapses as u64)
            .map(|i| stream_rng(params.rng_seed, i + 1))
            .collect();
        Ok(Self {
            target_rng: stream_rng(params.rng_seed, 0),
            input_rngs,
            neuron,
            synapses,
            gate: LearnGateState::new(p),
            signals: DeltaSignals::default(),
            step_index: 0,
            total_steps: params.total_steps(),
            sample_every: params.sample_every(),
            spiked_since_sample: false,
            input_events: vec![EventCount::default(); params.n_synapses],
            target_events: EventCount::default(),
            post_spikes: 0,
            sources,
            params,
        })
    }

    pub fn from_params(params: SimParams) -> Result<Self, ConfigError> {
        let sources = Sources::from_params(&params);
        Self::new(params, sources)
    }

    pub fn params(&self) -> &SimParams {
        &self.params
    }

    pub fn time(&self) -> f64 {
        self.step_index as f64 * self.params.dt
    }

    pub fn is_finished(&self) -> bool {
        self.step_index >= self.total_steps
    }

    pub fn neuron(&self) -> &NeuronState {
        &self.neuron
    }

    pub fn synapses(&self) -> &[SynapseState] {
        &self.synapses
    }

    pub fn gate(&self) -> &LearnGateState {
        &self.gate
    }

    pub fn signals(&self) -> DeltaSignals {
        self.signals
    }

    pub fn input_events(&self) -> &[EventCount] {
        &self.input_events
    }

    pub fn target_events(&self) -> EventCount {
        self.target_events
    }

    pub fn post_spike_count(&self) -> u64 {
        self.post_spikes
    }

    /// Snapshot of the observables at the current time.
    pub fn observe(&self) -> TraceRecord {
        TraceRecord {
            t: self.time(),
            i_syn: self.neuron.i_syn_dpi.current,
            i_target: self.neuron.i_target_dpi.current,
            i_ca: self.neuron.i_ca_dpi.current,
            learn: self.gate.learn,
            membrane: self.neuron.membrane,
            post_spike: self.spiked_since_sample,
            v_w: if self.params.record_v_w {
                self.synapses.iter().map(SynapseState::v_w).collect()
            } else {
                Vec::new()
            },
        }
    }

    /// Advances one integration step. Returns whether the neuron fired.
    pub fn step(&mut self) -> bool {
        let dt = self.params.dt;
        let t0 = self.step_index as f64 * dt;
        let t1 = (self.step_index + 1) as f64 * dt;
        let p = &self.params.plasticity;

        // Input spikes: each synapse jumps the shared DPI with its discretized
        // weight, then updates its analog weight from the broadcast signals.
        for (i, syn) in self.synapses.iter_mut().enumerate() {
            let count = self.sources.inputs[i].spikes_in(t0, t1, &mut self.input_rngs[i]);
            if count == 0 {
                continue;
            }
            let weight = discretize_weight(syn, p);
            self.neuron.i_syn_dpi.on_spikes(weight, count);
            for _ in 0..count {
                syn.update_on_pre(self.signals, self.gate.learn, p);
            }
            self.input_events[i].generated += u64::from(count);
            self.input_events[i].delivered += u64::from(count);
        }
        let count = self.sources.target.spikes_in(t0, t1, &mut self.target_rng);
        if count > 0 {
            self.neuron
                .i_target_dpi
                .on_spikes(self.params.stimulus.target_weight, count);
            self.target_events.generated += u64::from(count);
            self.target_events.delivered += u64::from(count);
        }

        // The soma sees the exact step-average of the decaying DPI currents.
        let i_in = self.neuron.i_syn_dpi.mean_over(dt) + self.neuron.i_target_dpi.mean_over(dt);
        self.neuron.i_syn_dpi.decay(dt);
        self.neuron.i_target_dpi.decay(dt);

        let i_syn = self.neuron.i_syn_dpi.current;
        let i_target = self.neuron.i_target_dpi.current;
        let spiked = self.neuron.step(i_in, dt);
        self.neuron.calcium_update(spiked, dt);
        self.gate.update(self.neuron.i_ca_dpi.current);
        self.signals = delta_rule(i_target, i_syn, p);
        for syn in &mut self.synapses {
            syn.drift(dt, p);
        }

        self.step_index += 1;
        if spiked {
            self.post_spikes += 1;
            self.spiked_since_sample = true;
        }
        spiked
    }

    fn sample_due(&self) -> bool {
        self.step_index.is_multiple_of(self.sample_every)
    }

    /// Runs to the end, recording the initial state and one row per sample
    /// interval.
    pub fn run_to_end(&mut self) -> Trace {
        let mut trace = Trace::new(self.params.n_synapses, self.params.record_v_w);
        if self.step_index == 0 {
            trace.push(self.observe());
        }
        while !self.is_finished() {
            self.step();
            if self.sample_due() {
                trace.push(self.observe());
                self.spiked_since_sample = false;
            }
        }
        trace
    }
}

/// One full run over explicit sources.
pub fn run(params: &SimParams, sources: Sources) -> Result<Trace, ConfigError> {
    Ok(Simulation::new(params.clone(), sources)?.run_to_end())
}

/// One full run with the sources described by `params.stimulus`.
pub fn run_params(params: &SimParams) -> Result<Trace, ConfigError> {
    Ok(Simulation::from_params(params.clone())?.run_to_end())
}

/// Parameter sets of a sweep: `base` with `axis` set to each value, and the
/// seed of run `i` derived from `(base.rng_seed, i)`.
pub fn sweep_params(
    base: &SimParams,
    axis: &str,
    values: &[String],
) -> Result<Vec<SimParams>, ConfigError> {
    if base.get(axis).is_none() {
        return Err(ConfigError::UnknownKey(axis.to_string()));
    }
    let mut out = Vec::with_capacity(values.len());
    let mut violations = Vec::new();
    for (i, v) in values.iter().enumerate() {
        let mut p = base.clone();
        p.set(axis, v)?;
        p.rng_seed = derive_seed(base.rng_seed, i as u64);
        violations.extend(p.violations());
        out.push(p);
    }
    if !violations.is_empty() {
        return Err(ConfigError::Invalid(violations));
    }
    Ok(out)
}

/// Independent runs, one per value, executed in parallel and returned in
/// value order.
pub fn sweep(base: &SimParams, axis: &str, values: &[String]) -> Result<Vec<Trace>, ConfigError> {
    let runs = sweep_params(base, axis, values)?;
    runs.par_iter().map(run_params).collect()
}
