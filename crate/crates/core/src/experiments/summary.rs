use crate::params::SimParams;
use crate::trace::{format_g9, Trace};

/// Span over which trained and final input currents are averaged, ms.
pub const SUMMARY_WINDOW: f64 = 2000.0;

pub const SUMMARY_HEADER: &str = "run,axis,value,target_off_ms,trained_i_syn_nA,final_i_syn_nA,\
retention_ratio,learn_reentry_ms,final_v_w_0,time_to_attractor_ms";

/// Metrics of one run, all recomputable from its trace and the target
/// removal time.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub target_off: f64,
    /// Mean input current over the last 2 s before target removal.
    pub trained_i_syn: f64,
    /// Mean input current over the last 2 s of the run.
    pub final_i_syn: f64,
    pub retention_ratio: f64,
    /// First sampled time at or after target removal with the learn gate on.
    pub learn_reentry: Option<f64>,
    pub final_v_w: Option<f64>,
    /// Settling time of synapse 0 after its last input spike (weight traces only).
    pub time_to_attractor: Option<f64>,
}

fn mean(it: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = it.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        f64::NAN
    } else {
        s / n as f64
    }
}

pub fn summarize(
    trace: &Trace,
    target_off: f64,
    stim_end: Option<f64>,
    params: &SimParams,
) -> RunSummary {
    let end = trace.last().map_or(0.0, |r| r.t);
    let trained_i_syn = mean(
        trace
            .between(target_off - SUMMARY_WINDOW, target_off)
            .map(|r| r.i_syn),
    );
    let final_i_syn = mean(
        trace
            .between(end - SUMMARY_WINDOW, f64::INFINITY)
            .map(|r| r.i_syn),
    );
    let learn_reentry = trace
        .records()
        .iter()
        .find(|r| r.t >= target_off && r.learn)
        .map(|r| r.t);
    let final_v_w = trace.last().and_then(|r| r.v_w.first().copied());
    let time_to_attractor = stim_end.and_then(|s| time_to_attractor(trace, 0, s, params));
    RunSummary {
        target_off,
        trained_i_syn,
        final_i_syn,
        retention_ratio: final_i_syn / trained_i_syn,
        learn_reentry,
        final_v_w,
        time_to_attractor,
    }
}

/// Time from `stim_end` until synapse `index` sits exactly on a tristate
/// attractor and stays there for the rest of the trace.
pub fn time_to_attractor(
    trace: &Trace,
    index: usize,
    stim_end: f64,
    params: &SimParams,
) -> Option<f64> {
    let p = &params.plasticity;
    let on_attractor = |v: f64| v == 0.0 || v == p.v_dd / 2.0 || v == p.v_dd;
    let records = trace.records();
    match records
        .iter()
        .rposition(|r| !r.v_w.get(index).copied().is_some_and(on_attractor))
    {
        None => Some(0.0),
        Some(last_off) => records
            .get(last_off + 1)
            .map(|settled| (settled.t - stim_end).max(0.0)),
    }
}

impl RunSummary {
    pub fn csv_row(&self, run: usize, axis: &str, value: &str) -> String {
        let opt = |v: Option<f64>, none: &str| v.map_or(none.to_string(), format_g9);
        format!(
            "{run},{axis},{value},{},{},{},{},{},{},{}",
            format_g9(self.target_off),
            format_g9(self.trained_i_syn),
            format_g9(self.final_i_syn),
            format_g9(self.retention_ratio),
            opt(self.learn_reentry, "never"),
            opt(self.final_v_w, "na"),
            opt(self.time_to_attractor, "na"),
        )
    }
}
