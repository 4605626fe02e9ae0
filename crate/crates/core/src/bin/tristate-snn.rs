use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use tristate_snn::error::{Error, Result};
use tristate_snn::experiments::{
    apply_config_file, apply_overrides, calibrate_ca_thresholds, run_sweep, ExperimentPreset,
    PresetName, PresetOutput,
};
use tristate_snn::SimParams;

#[derive(Parser)]
#[command(
    name = "tristate-snn",
    version,
    about = "Neuron-row simulator with tristate synapses and hysteretic stop-learning"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct ParamArgs {
    /// `key = value` config file applied on top of the defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override one parameter, e.g. `--set plasticity.i_wb=0.5`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a named preset and write its trace and summary CSVs.
    Run {
        #[arg(long)]
        preset: String,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Run one simulation per value of a parameter.
    Sweep {
        #[arg(long)]
        axis: String,
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        values: Vec<String>,
        /// Preset supplying the base parameters (defaults otherwise).
        #[arg(long)]
        preset: Option<String>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Derive calcium thresholds from probe runs and write them as a config file.
    Calibrate {
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
    },
}

fn resolve(base: SimParams, args: &ParamArgs) -> Result<SimParams> {
    let mut params = base;
    if let Some(path) = &args.config {
        apply_config_file(&mut params, path)?;
    }
    apply_overrides(&mut params, &args.set)?;
    if let Some(seed) = args.seed {
        params.rng_seed = seed;
    }
    params.validate()?;
    Ok(params)
}

fn report(output: &PresetOutput) {
    for path in output.written() {
        println!("{}", path.display());
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run {
            preset,
            out,
            params,
        } => {
            let preset = ExperimentPreset::get(preset.parse::<PresetName>()?);
            let params = resolve(preset.params()?, &params)?;
            let output = tristate_snn::experiments::run_preset_with(&preset, &params, &out)?;
            report(&output);
        }
        Command::Sweep {
            axis,
            values,
            preset,
            out,
            params,
        } => {
            let base = match preset {
                Some(name) => ExperimentPreset::get(name.parse::<PresetName>()?).params()?,
                None => SimParams::default(),
            };
            let base = resolve(base, &params)?;
            let output = run_sweep(&base, &axis, &values, &out, "sweep")?;
            report(&output);
        }
        Command::Calibrate { out, params } => {
            let params = resolve(SimParams::default(), &params)?;
            let cal = calibrate_ca_thresholds(&params)?;
            write_calibration(&out, &cal)?;
            println!("{}", out.display());
        }
    }
    Ok(())
}

fn write_calibration(path: &Path, cal: &tristate_snn::experiments::Calibration) -> Result<()> {
    let p = &cal.probes;
    let text = format!(
        "# calcium probe levels (nA): target+trained {}, target+mid {}, input+trained {}, input+mid {}\n\
         plasticity.theta_ca_low = {}\n\
         plasticity.theta_ca_high = {}\n",
        p.target_trained, p.target_mid, p.input_trained, p.input_mid, cal.theta_ca_low, cal.theta_ca_high
    );
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
