//! Learning machinery of the row: per-synapse weight update, tristate drift,
//! three-level weight discretization, the soma's Delta rule and the
//! calcium-driven hysteretic learn gate.

use crate::error::Violation;

/// Constants of the synapse and soma learning circuits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlasticityParams {
    pub v_dd: f64,
    pub v_thl: f64,
    pub v_thh: f64,
    /// Leakage current of a LOW synapse, nA.
    pub i_0: f64,
    /// Weight bias current: MID synapses carry `i_wb`, HIGH ones `2 * i_wb`.
    pub i_wb: f64,
    /// Slew rate of the tristate amplifiers, model-volts per ms.
    pub drift_rate: f64,
    /// Potentiation per pre spike per nA of error, model-volts.
    pub eta_up: f64,
    /// Depression per pre spike per nA of error, model-volts.
    pub eta_dn: f64,
    pub delta_deadband: f64,
    /// Hysteresis width of both calcium comparators, nA.
    pub i_bh_window: f64,
    pub theta_ca_low: f64,
    pub theta_ca_high: f64,
    /// Initial analog weight of every plastic synapse.
    pub v_w_init: f64,
}

impl Default for PlasticityParams {
    fn default() -> Self {
        let v_dd = 1.8;
        Self {
            v_dd,
            v_thl: v_dd / 3.0,
            v_thh: 2.0 * v_dd / 3.0,
            i_0: 0.0005,
            i_wb: 0.02,
            drift_rate: 0.0005,
            eta_up: 0.02,
            eta_dn: 0.02,
            delta_deadband: 0.0,
            i_bh_window: 0.0,
            theta_ca_low: CALIBRATED_THETA_CA_LOW,
            theta_ca_high: CALIBRATED_THETA_CA_HIGH,
            v_w_init: 0.0,
        }
    }
}

/// Calcium thresholds produced by `calibrate` on the default parameters.
pub const CALIBRATED_THETA_CA_LOW: f64 = 0.278;
pub const CALIBRATED_THETA_CA_HIGH: f64 = 1.402;

impl PlasticityParams {
    /// Collects every violated invariant, keyed by config path.
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let key = |k: &str| format!("plasticity.{k}");
        let all = [
            ("v_dd", self.v_dd),
            ("v_thl", self.v_thl),
            ("v_thh", self.v_thh),
            ("i_0", self.i_0),
            ("i_wb", self.i_wb),
            ("drift_rate", self.drift_rate),
            ("eta_up", self.eta_up),
            ("eta_dn", self.eta_dn),
            ("delta_deadband", self.delta_deadband),
            ("i_bh_window", self.i_bh_window),
            ("theta_ca_low", self.theta_ca_low),
            ("theta_ca_high", self.theta_ca_high),
            ("v_w_init", self.v_w_init),
        ];
        for (name, v) in all {
            if !v.is_finite() {
                out.push(Violation::new(key(name), "must be finite"));
            } else if v < 0.0 {
                out.push(Violation::new(key(name), "must be non-negative"));
            }
        }
        if !(self.v_thl > 0.0) {
            out.push(Violation::new(key("v_thl"), "must be positive"));
        }
        if !(self.v_thl < self.v_dd / 2.0) {
            out.push(Violation::new(key("v_thl"), "must be below v_dd/2"));
        }
        if !(self.v_thh > self.v_dd / 2.0 && self.v_thh < self.v_dd) {
            out.push(Violation::new(key("v_thh"), "must lie in (v_dd/2, v_dd)"));
        }
        if !(self.i_0 < self.i_wb) {
            out.push(Violation::new(key("i_0"), "must be below i_wb"));
        }
        if !(self.theta_ca_low < self.theta_ca_high) {
            out.push(Violation::new(
                key("theta_ca_low"),
                "must be below theta_ca_high",
            ));
        }
        if !(self.v_w_init <= self.v_dd) {
            out.push(Violation::new(key("v_w_init"), "must lie in [0, v_dd]"));
        }
        out
    }

    /// Attractor the tristate amplifiers pull `v_w` toward.
    pub fn attractor(&self, v_w: f64) -> f64 {
        match WeightLevel::of(v_w, self) {
            WeightLevel::Low => 0.0,
            WeightLevel::Mid => self.v_dd / 2.0,
            WeightLevel::High => self.v_dd,
        }
    }

    pub fn level_current(&self, level: WeightLevel) -> f64 {
        match level {
            WeightLevel::Low => self.i_0,
            WeightLevel::Mid => self.i_wb,
            WeightLevel::High => 2.0 * self.i_wb,
        }
    }
}

/// Discretized weight band. Band edges belong to the upper band.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WeightLevel {
    Low,
    Mid,
    High,
}

impl WeightLevel {
    pub fn of(v_w: f64, params: &PlasticityParams) -> Self {
        if v_w >= params.v_thh {
            WeightLevel::High
        } else if v_w >= params.v_thl {
            WeightLevel::Mid
        } else {
            WeightLevel::Low
        }
    }
}

/// One plastic synapse. `level` always reflects `v_w`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynapseState {
    v_w: f64,
    level: WeightLevel,
}

impl SynapseState {
    pub fn new(v_w: f64, params: &PlasticityParams) -> Self {
        let v_w = v_w.clamp(0.0, params.v_dd);
        Self {
            v_w,
            level: WeightLevel::of(v_w, params),
        }
    }

    pub fn v_w(&self) -> f64 {
        self.v_w
    }

    pub fn level(&self) -> WeightLevel {
        self.level
    }

    fn set(&mut self, v_w: f64, params: &PlasticityParams) {
        self.v_w = v_w;
        self.level = WeightLevel::of(v_w, params);
    }

    /// Applies one pre-synaptic spike's update, gated by `learn`.
    pub fn update_on_pre(&mut self, sig: DeltaSignals, learn: bool, params: &PlasticityParams) {
        if !learn {
            return;
        }
        let dv = params.eta_up * sig.up_magnitude - params.eta_dn * sig.dn_magnitude;
        if dv != 0.0 {
            self.set((self.v_w + dv).clamp(0.0, params.v_dd), params);
        }
    }

    /// Slews `v_w` toward its band's attractor by at most `drift_rate * dt`,
    /// landing exactly on the attractor instead of overshooting.
    pub fn drift(&mut self, dt: f64, params: &PlasticityParams) {
        let target = params.attractor(self.v_w);
        let gap = target - self.v_w;
        if gap == 0.0 {
            return;
        }
        let max_step = params.drift_rate * dt;
        // Relative slack absorbs rounding accumulated over many equal steps.
        let v = if gap.abs() <= max_step * (1.0 + 1e-9) {
            target
        } else {
            self.v_w + max_step.copysign(gap)
        };
        self.set(v, params);
    }

    /// Synaptic current selected by the discretization thresholds.
    pub fn weight_current(&self, params: &PlasticityParams) -> f64 {
        params.level_current(self.level)
    }
}

pub fn weight_update_on_pre(
    mut syn: SynapseState,
    sig: DeltaSignals,
    learn: bool,
    params: &PlasticityParams,
) -> SynapseState {
    syn.update_on_pre(sig, learn, params);
    syn
}

pub fn tristate_drift(mut syn: SynapseState, dt: f64, params: &PlasticityParams) -> SynapseState {
    syn.drift(dt, params);
    syn
}

/// Refreshes `syn.level` from `v_w` and returns the matching current.
pub fn discretize_weight(syn: &mut SynapseState, params: &PlasticityParams) -> f64 {
    syn.level = WeightLevel::of(syn.v_w, params);
    syn.weight_current(params)
}

/// Up/down update magnitudes broadcast from the soma to its synapses.
/// At most one of the two is nonzero.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DeltaSignals {
    pub up_magnitude: f64,
    pub dn_magnitude: f64,
}

/// Error-driven update signals from the target and weighted input currents.
pub fn delta_rule(i_target: f64, i_syn: f64, params: &PlasticityParams) -> DeltaSignals {
    let e = i_target - i_syn;
    if e > params.delta_deadband {
        DeltaSignals {
            up_magnitude: e,
            dn_magnitude: 0.0,
        }
    } else if e < -params.delta_deadband {
        DeltaSignals {
            up_magnitude: 0.0,
            dn_magnitude: -e,
        }
    } else {
        DeltaSignals::default()
    }
}

/// Two-input current comparator with a hysteresis window: once the input has
/// won (strictly exceeded `threshold`) it keeps winning until it drops strictly
/// below `threshold - window`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HystereticComparatorState {
    pub winner_high: bool,
    pub threshold: f64,
    pub window: f64,
}

impl HystereticComparatorState {
    pub fn new(threshold: f64, window: f64) -> Self {
        Self {
            winner_high: false,
            threshold,
            window,
        }
    }

    pub fn switch_up_level(&self) -> f64 {
        self.threshold
    }

    pub fn switch_down_level(&self) -> f64 {
        self.threshold - self.window
    }

    pub fn update(&mut self, input: f64) {
        if !self.winner_high && input > self.switch_up_level() {
            self.winner_high = true;
        } else if self.winner_high && input < self.switch_down_level() {
            self.winner_high = false;
        }
    }
}

pub fn hyst_compare(mut cmp: HystereticComparatorState, input: f64) -> HystereticComparatorState {
    cmp.update(input);
    cmp
}

/// Stop-learning logic: learning is enabled while calcium sits above the low
/// comparator and below the high one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LearnGateState {
    pub low_cmp: HystereticComparatorState,
    pub high_cmp: HystereticComparatorState,
    pub learn: bool,
}

impl LearnGateState {
    pub fn new(params: &PlasticityParams) -> Self {
        Self {
            low_cmp: HystereticComparatorState::new(params.theta_ca_low, params.i_bh_window),
            high_cmp: HystereticComparatorState::new(params.theta_ca_high, params.i_bh_window),
            learn: false,
        }
    }

    pub fn update(&mut self, i_ca: f64) {
        self.low_cmp.update(i_ca);
        self.high_cmp.update(i_ca);
        self.learn = self.low_cmp.winner_high && !self.high_cmp.winner_high;
    }
}

pub fn learn_gate_update(mut gate: LearnGateState, i_ca: f64) -> LearnGateState {
    gate.update(i_ca);
    gate
}
