//! Acceptance suite. Each criterion prints one PASS/FAIL line; the process
//! exits non-zero if any criterion fails.

use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tristate_snn::dynamics::{dpi_decay, DpiState};
use tristate_snn::experiments::{time_to_attractor, ExperimentPreset, PresetName};
use tristate_snn::plasticity::{
    discretize_weight, HystereticComparatorState, PlasticityParams, SynapseState,
    CALIBRATED_THETA_CA_HIGH,
};
use tristate_snn::spikes::{stream_rng, SpikeSource};
use tristate_snn::trace::Trace;

const RUNTIME_LIMIT: Duration = Duration::from_secs(30);
const RETENTION_MIN: f64 = 0.95;
const FORGET_MAX: f64 = 0.20;
const SUMMARY_SPAN_MS: f64 = 2000.0;
const DISCRETIZATION_SAMPLES: usize = 100_000;
const DPI_MEAN_TOLERANCE: f64 = 0.05;
const SEMIGROUP_TOLERANCE: f64 = 1e-12;
const STEP_ROBUSTNESS_MAX: f64 = 0.01;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tristate-snn"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir()
        .join(format!("tristate-acceptance-{}", std::process::id()))
        .join(name);
    let _ = fs::remove_dir_all(&dir);
    dir
}

/// Runs `tristate-snn run --preset <name>` and returns the wall time.
fn run_cli(preset: &str, out: &Path, extra: &[&str]) -> Result<Duration, String> {
    let start = Instant::now();
    let output = cli()
        .args(["run", "--preset", preset, "--out"])
        .arg(out)
        .args(["--seed", "0"])
        .args(extra)
        .output()
        .map_err(|e| format!("spawn failed: {e}"))?;
    let elapsed = start.elapsed();
    if !output.status.success() {
        return Err(format!(
            "exit {:?}: {}",
            output.status.code(),
            String::from_utf8_lossy(&output.stderr)
        ));
    }
    Ok(elapsed)
}

fn read_trace(path: &Path) -> Result<Trace, String> {
    Trace::read_csv_file(path).map_err(|e| e.to_string())
}

fn mean_i_syn(trace: &Trace, from: f64, to: f64) -> f64 {
    let v: Vec<f64> = trace.between(from, to).map(|r| r.i_syn).collect();
    v.iter().sum::<f64>() / v.len() as f64
}

/// (trained level, final level, learn re-entered after target removal)
fn fig5_metrics(trace: &Trace, target_off: f64) -> (f64, f64, Option<f64>) {
    let end = trace.last().map_or(0.0, |r| r.t);
    let trained = mean_i_syn(trace, target_off - SUMMARY_SPAN_MS, target_off);
    let last = mean_i_syn(trace, end - SUMMARY_SPAN_MS, f64::INFINITY);
    let reentry = trace
        .records()
        .iter()
        .find(|r| r.t >= target_off && r.learn)
        .map(|r| r.t);
    (trained, last, reentry)
}

fn retention() -> Outcome {
    let out = scratch("retain");
    let elapsed = run_cli("fig5_retain", &out, &[])?;
    let params = ExperimentPreset::get(PresetName::Fig5Retain)
        .params()
        .unwrap();
    let trace = read_trace(&out.join("fig5_retain.csv"))?;
    let (trained, last, reentry) = fig5_metrics(&trace, params.stimulus.target_stop);
    let ratio = last / trained;
    let detail = format!(
        "retention {ratio:.4} (min {RETENTION_MIN}), re-entry {reentry:?}, runtime {elapsed:.2?}"
    );
    if ratio >= RETENTION_MIN && reentry.is_none() && elapsed < RUNTIME_LIMIT {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn forgetting() -> Outcome {
    let out = scratch("forget");
    let elapsed = run_cli("fig5_forget", &out, &[])?;
    let params = ExperimentPreset::get(PresetName::Fig5Forget)
        .params()
        .unwrap();
    let trace = read_trace(&out.join("fig5_forget.csv"))?;
    let (trained, last, reentry) = fig5_metrics(&trace, params.stimulus.target_stop);
    let ratio = last / trained;
    let detail = format!(
        "final/trained {ratio:.4} (max {FORGET_MAX}), re-entry {reentry:?} ms, runtime {elapsed:.2?}"
    );
    if ratio <= FORGET_MAX && reentry.is_some() && elapsed < RUNTIME_LIMIT {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn single_parameter_contrast() -> Outcome {
    let retain = ExperimentPreset::get(PresetName::Fig5Retain)
        .params()
        .unwrap();
    let forget = ExperimentPreset::get(PresetName::Fig5Forget)
        .params()
        .unwrap();
    let diff = retain.diff(&forget);
    let detail = format!(
        "differing keys {diff:?} (window {} vs {})",
        retain.plasticity.i_bh_window, forget.plasticity.i_bh_window
    );
    if diff == ["plasticity.i_bh_window"] {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn tristability() -> Outcome {
    let out = scratch("tristability");
    run_cli("tristability_sweep", &out, &[])?;
    let preset = ExperimentPreset::get(PresetName::TristabilitySweep);
    let base = preset.params().unwrap();
    let (axis, values) = preset.sweep.clone().unwrap();
    if values.len() < 3 || axis != "plasticity.drift_rate" {
        return Err(format!("sweep is {axis} over {values:?}"));
    }
    let rates: Vec<f64> = values.iter().map(|v| v.parse().unwrap()).collect();
    if !rates.windows(2).all(|w| w[0] < w[1]) {
        return Err(format!("drift rates not ascending: {rates:?}"));
    }
    let v_dd = base.plasticity.v_dd;
    let mut finals = Vec::new();
    let mut times = Vec::new();
    for i in 0..values.len() {
        let trace = read_trace(&out.join(format!("tristability_sweep_{i}.csv")))?;
        let v = trace
            .last()
            .and_then(|r| r.v_w.first().copied())
            .ok_or("no v_w column")?;
        if !(v == 0.0 || v == v_dd / 2.0 || v == v_dd) {
            return Err(format!("run {i}: final v_w {v} is not an attractor"));
        }
        finals.push(v);
        let t = time_to_attractor(&trace, 0, base.stimulus.input_stop, &base)
            .ok_or_else(|| format!("run {i} never settles"))?;
        times.push(t);
    }
    let detail = format!("drift {rates:?} -> final v_w {finals:?}, settle ms {times:?}");
    if times.windows(2).all(|w| w[0] > w[1]) {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Switch-up minus switch-down level measured on a rising then falling ramp,
/// each level taken as the midpoint of the inputs bracketing the transition.
fn measured_width(threshold: f64, window: f64, step: f64) -> Option<f64> {
    let mut c = HystereticComparatorState::new(threshold, window);
    let n = ((threshold + window + 1.0) / step) as usize;
    let ramp: Vec<f64> = (0..=n).map(|i| 0.000_37 + i as f64 * step).collect();
    let mut up = None;
    c.update(ramp[0]);
    for w in ramp.windows(2) {
        let before = c.winner_high;
        c.update(w[1]);
        if !before && c.winner_high && up.is_none() {
            up = Some(0.5 * (w[0] + w[1]));
        }
    }
    let mut down = None;
    for w in ramp.windows(2).rev() {
        let before = c.winner_high;
        c.update(w[0]);
        if before && !c.winner_high && down.is_none() {
            down = Some(0.5 * (w[0] + w[1]));
        }
    }
    Some(up? - down?)
}

fn hysteresis_width() -> Outcome {
    let step = 0.001;
    let threshold = CALIBRATED_THETA_CA_HIGH;
    let mut widths = Vec::new();
    for window in [0.0, 0.05 * threshold, 0.2 * threshold, 0.4 * threshold, 0.3] {
        let w = measured_width(threshold, window, step).ok_or("comparator never switched")?;
        if (w - window).abs() > step {
            return Err(format!("window {window}: measured {w}"));
        }
        widths.push((window, w));
    }
    // Zero window: exactly a plain comparator, on a dense grid around threshold.
    let mut c = HystereticComparatorState::new(threshold, 0.0);
    for i in 0..20_000 {
        let x = threshold + (f64::from(i % 200) - 100.0) * 1e-4;
        let prev = c.winner_high;
        c.update(x);
        let expected = if x > threshold {
            true
        } else if x < threshold {
            false
        } else {
            prev
        };
        if c.winner_high != expected {
            return Err(format!("window 0 differs from plain comparator at {x}"));
        }
    }
    // Exhaustive band sweep: every grid point of the closed band, from both
    // states, in every order, leaves the state unchanged.
    for window in [0.05 * threshold, 0.4 * threshold] {
        let lo = threshold - window;
        let band: Vec<f64> = (0..=1000)
            .map(|i| lo + window * f64::from(i) / 1000.0)
            .collect();
        for start in [false, true] {
            let mut c = HystereticComparatorState {
                winner_high: start,
                threshold,
                window,
            };
            for &x in band.iter().chain(band.iter().rev()) {
                c.update(x);
                if c.winner_high != start {
                    return Err(format!("chatter at {x} (window {window}, start {start})"));
                }
            }
        }
    }
    Ok(format!(
        "(configured, measured) {widths:.4?} at step {step}"
    ))
}

fn discretization() -> Outcome {
    let p = PlasticityParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let allowed = [p.i_0, p.i_wb, 2.0 * p.i_wb];
    let mut counts = [0usize; 3];
    for _ in 0..DISCRETIZATION_SAMPLES {
        let v: f64 = rng.gen_range(0.0..=p.v_dd);
        let mut s = SynapseState::new(v, &p);
        let i = discretize_weight(&mut s, &p);
        let expected = if v >= p.v_thh {
            2
        } else if v >= p.v_thl {
            1
        } else {
            0
        };
        if i != allowed[expected] {
            return Err(format!("v_w {v} -> {i}, expected {}", allowed[expected]));
        }
        counts[expected] += 1;
    }
    let edges = [
        (p.v_thl.next_down(), p.i_0),
        (p.v_thl, p.i_wb),
        (p.v_thh.next_down(), p.i_wb),
        (p.v_thh, 2.0 * p.i_wb),
        (0.0, p.i_0),
        (p.v_dd, 2.0 * p.i_wb),
    ];
    for (v, want) in edges {
        let mut s = SynapseState::new(v, &p);
        let got = discretize_weight(&mut s, &p);
        if got != want {
            return Err(format!("edge v_w {v}: {got} != {want}"));
        }
    }
    Ok(format!(
        "{DISCRETIZATION_SAMPLES} samples, band counts {counts:?}, edges exact"
    ))
}

fn dpi_oracle() -> Outcome {
    let jump = 0.01;
    let dt = 0.05;
    let duration = 200_000.0;
    let mut lines = Vec::new();
    for (k, (rate, tau)) in [(100.0, 20.0), (50.0, 100.0), (400.0, 10.0)]
        .into_iter()
        .enumerate()
    {
        let src = SpikeSource::poisson(rate, 0.0, f64::INFINITY);
        let mut rng = stream_rng(11, k as u64);
        let mut dpi = DpiState::new(tau, 1.0).unwrap();
        let steps = (duration / dt) as u64;
        let warmup = (10.0 * tau / dt) as u64;
        let (mut sum, mut n) = (0.0, 0u64);
        for step in 0..steps {
            let c = src.spikes_in(step as f64 * dt, (step + 1) as f64 * dt, &mut rng);
            dpi.on_spikes(jump, c);
            dpi.decay(dt);
            if step >= warmup {
                sum += dpi.current;
                n += 1;
            }
        }
        let mean = sum / n as f64;
        let expected = rate / 1000.0 * jump * tau;
        let err = (mean - expected).abs() / expected;
        if err >= DPI_MEAN_TOLERANCE {
            return Err(format!("r={rate} tau={tau}: mean {mean} vs {expected}"));
        }
        lines.push(format!("r={rate}Hz tau={tau}ms err {:.2}%", 100.0 * err));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let tau = rng.gen_range(0.1..1000.0);
        let mut s = DpiState::new(tau, 1.0).unwrap();
        s.current = rng.gen_range(0.0..100.0);
        let (a, b) = (rng.gen_range(0.0..500.0), rng.gen_range(0.0..500.0));
        let two = dpi_decay(dpi_decay(s, a), b).current;
        let one = dpi_decay(s, a + b).current;
        let scale = two.abs().max(one.abs());
        if scale > 0.0 {
            worst = worst.max((two - one).abs() / scale);
        }
    }
    if worst > SEMIGROUP_TOLERANCE {
        return Err(format!("semigroup relative error {worst:e}"));
    }
    Ok(format!(
        "{}; semigroup max rel err {worst:.1e}",
        lines.join(", ")
    ))
}

fn determinism() -> Outcome {
    let mut compared = 0;
    for name in PresetName::ALL {
        let a = scratch(&format!("det-{name}-a"));
        let b = scratch(&format!("det-{name}-b"));
        run_cli(name.as_str(), &a, &[])?;
        run_cli(name.as_str(), &b, &[])?;
        let mut files: Vec<_> = fs::read_dir(&a)
            .map_err(|e| e.to_string())?
            .map(|e| e.unwrap().file_name())
            .collect();
        files.sort();
        for f in &files {
            let x = fs::read(a.join(f)).map_err(|e| e.to_string())?;
            let y = fs::read(b.join(f)).map_err(|e| format!("{f:?}: {e}"))?;
            if x != y {
                return Err(format!("{name}: {f:?} differs"));
            }
            compared += 1;
        }
    }
    Ok(format!(
        "{compared} CSV files byte-identical across repeated runs"
    ))
}

fn step_size_robustness() -> Outcome {
    let params = ExperimentPreset::get(PresetName::Fig5Retain)
        .params()
        .unwrap();
    let target_off = params.stimulus.target_stop;
    let full = scratch("dt-full");
    let half = scratch("dt-half");
    run_cli("fig5_retain", &full, &[])?;
    let half_dt = format!("dt={}", params.dt / 2.0);
    run_cli("fig5_retain", &half, &["--set", &half_dt])?;
    let ratio = |dir: &Path| -> Result<f64, String> {
        let (trained, last, _) =
            fig5_metrics(&read_trace(&dir.join("fig5_retain.csv"))?, target_off);
        Ok(last / trained)
    };
    let (a, b) = (ratio(&full)?, ratio(&half)?);
    let diff = (a - b).abs() / a;
    let detail = format!("retention {a:.6} at dt, {b:.6} at dt/2, relative difference {diff:.2e}");
    if diff < STEP_ROBUSTNESS_MAX {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("retention (fig5_retain)", retention),
        ("forgetting (fig5_forget)", forgetting),
        ("single-parameter contrast", single_parameter_contrast),
        ("tristability sweep", tristability),
        ("hysteresis width", hysteresis_width),
        ("discretization exactness", discretization),
        ("DPI oracle", dpi_oracle),
        ("determinism", determinism),
        ("step-size robustness", step_size_robustness),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (name, check) in criteria {
        let outcome = panic::catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|_| Err("panicked".to_string()));
        match outcome {
            Ok(detail) => println!("[PASS] {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {name}: {detail}");
            }
        }
    }
    let root = std::env::temp_dir().join(format!("tristate-acceptance-{}", std::process::id()));
    let _ = fs::remove_dir_all(root);
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
