//! `molcom` command-line entry point.
//!
//! Exit codes: 0 success, 2 invalid input, 3 I/O failure, 4 construction
//! failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use molcom::config::{parse_config, Scheme, SimConfig};
use molcom::diffusion::{
    analytic_channel_response, read_pvector_file, simulate_channel_response, write_pvector_file,
    ChannelResponse,
};
use molcom::harness::{BerCurve, Simulation};
use molcom::ldpc::{build_regular_code, read_alist_file, write_alist_file, LdpcCode};
use molcom::report::{emit_csv, emit_plotdata, RunManifest};
use molcom::Error;

#[derive(Parser)]
#[command(name = "molcom", version, about = "LDPC-coded diffusion channel BER simulator")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// JSON config file; missing fields take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override a config field, e.g. `--set target_frame_errors=100`.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
    /// Cached P-vector to use instead of computing one.
    #[arg(long, global = true)]
    channel_file: Option<PathBuf>,
    /// alist file holding the parity-check matrix.
    #[arg(long, global = true)]
    code_file: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long, default_value = "out", global = true)]
    out: PathBuf,
    /// Use the closed-form channel instead of the particle simulation.
    #[arg(long, global = true)]
    analytic_channel: bool,
    /// Master seed for frames and the interleaver.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Compute (or load) the channel P-vector and cache it.
    Channel,
    /// Construct (or load) the LDPC code and cache it as alist.
    Code,
    /// Sweep the configured scheme over `mm_sweep`.
    Run,
    /// Sweep single, diversity and pre-equalised schemes side by side.
    Compare,
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Io { .. } => 3,
        Error::Construction(_) => 4,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn load_config(args: &GlobalArgs) -> molcom::Result<SimConfig> {
    let mut overrides = args.overrides.clone();
    let quoted = |p: &Path| serde_json::Value::String(p.display().to_string()).to_string();
    if let Some(p) = &args.channel_file {
        overrides.push(format!("channel_file={}", quoted(p)));
    }
    if let Some(p) = &args.code_file {
        overrides.push(format!("code_file={}", quoted(p)));
    }
    if args.analytic_channel {
        overrides.push("analytic_channel=true".into());
    }
    if let Some(s) = args.seed {
        overrides.push(format!("master_seed={s}"));
    }
    parse_config(args.config.as_deref(), &overrides)
}

fn run(cli: Cli) -> molcom::Result<()> {
    let args = &cli.global;
    let config = load_config(args)?;
    std::fs::create_dir_all(&args.out).map_err(|e| Error::io(&args.out, e))?;
    let workers = args
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if workers == 0 {
        return Err(Error::invalid("workers", "must be >= 1"));
    }
    let mut manifest = RunManifest::new(config.digest(), String::new(), String::new());

    match cli.command {
        Command::Channel => {
            let (_, source) = load_channel(&config, &args.out)?;
            manifest.channel_source = source;
        }
        Command::Code => {
            let (code, source) = load_code(&config, &args.out)?;
            manifest.code_source = source;
            manifest.notes.push(format!(
                "construction attempts {}, 4-cycles {}",
                code.report().attempts,
                code.report().four_cycles
            ));
        }
        Command::Run | Command::Compare => {
            let (response, channel_source) = load_channel(&config, &args.out)?;
            let (code, code_source) = load_code(&config, &args.out)?;
            manifest.channel_source = channel_source;
            manifest.code_source = code_source;
            let (schemes, stem) = match cli.command {
                Command::Run => (vec![config.scheme], config.scheme.tag().to_string()),
                _ => (
                    vec![Scheme::Single, Scheme::Diversity, Scheme::Preequalized],
                    "compare".to_string(),
                ),
            };
            let sim = Simulation::new(config, code, response)?.with_workers(workers);
            let curves = schemes
                .into_iter()
                .map(|s| sweep(&sim.clone().with_scheme(s)))
                .collect::<molcom::Result<Vec<_>>>()?;
            for curve in &curves {
                for p in &curve.points {
                    if let Some(raw) = p.raw_bit_errors {
                        manifest
                            .notes
                            .push(format!("{} mm={}: uncoded bit errors {raw}", curve.scheme, p.mm));
                    }
                }
            }
            let csv = args.out.join(format!("{stem}.csv"));
            let dat = args.out.join(format!("{stem}.dat"));
            emit_csv(&curves, &csv)?;
            emit_plotdata(&curves, &dat)?;
            manifest.outputs = vec![csv.display().to_string(), dat.display().to_string()];
            println!("{}", csv.display());
        }
    }

    manifest.write(&args.out.join("manifest.json"))
}

/// Runs the sweep point by point so progress can be reported.
fn sweep(sim: &Simulation) -> molcom::Result<BerCurve> {
    let config = sim.config();
    let mut points = Vec::with_capacity(config.mm_sweep.len());
    for &mm in &config.mm_sweep {
        let p = sim.run_ber_point(mm)?;
        eprintln!(
            "{:<14} mm={:<10} frames={:<8} ber={:.3e} fer={:.3e} ({})",
            config.scheme.tag(),
            mm,
            p.frames,
            p.ber,
            p.fer,
            p.stopped_by.tag()
        );
        points.push(p);
    }
    Ok(BerCurve {
        scheme: config.scheme,
        config_digest: config.digest(),
        points,
    })
}

/// Cache key covering exactly the fields that determine the P-vector.
fn channel_key(config: &SimConfig) -> String {
    let relevant = SimConfig {
        total_time: config.total_time,
        diffusion_coeff: config.diffusion_coeff,
        tx_distance: config.tx_distance,
        receiver_radius: config.receiver_radius,
        n_particles: if config.analytic_channel { 0 } else { config.n_particles },
        sim_step: config.sim_step,
        slot_width: config.slot_width,
        channel_seed: if config.analytic_channel { 0 } else { config.channel_seed },
        analytic_channel: config.analytic_channel,
        ..SimConfig::default()
    };
    relevant.digest()
}

fn load_channel(config: &SimConfig, out: &Path) -> molcom::Result<(ChannelResponse, String)> {
    if let Some(file) = &config.channel_file {
        let path = Path::new(file);
        let (response, n) = read_pvector_file(path, config.memory_duration)?;
        if (response.slot_width() - config.slot_width).abs() > 1e-12 * config.slot_width {
            return Err(Error::Configuration(format!(
                "{file}: Ts={} does not match slot_width={}",
                response.slot_width(),
                config.slot_width
            )));
        }
        return Ok((response, format!("file {file} (N={n})")));
    }

    let cache = out.join(format!("channel-{}.pvec", channel_key(config)));
    if cache.exists() {
        let (response, n) = read_pvector_file(&cache, config.memory_duration)?;
        return Ok((response, format!("cache {} (N={n})", cache.display())));
    }
    let params = config.channel_params();
    let (response, n) = if config.analytic_channel {
        (analytic_channel_response(&params)?, 0)
    } else {
        eprintln!("simulating {} particles...", params.n_particles);
        (simulate_channel_response(&params, config.channel_seed)?, params.n_particles)
    };
    write_pvector_file(&cache, &response, n)?;
    let how = if n == 0 {
        "analytic".to_string()
    } else {
        format!("particle N={n} seed={}", config.channel_seed)
    };
    Ok((response, format!("{how}, cached at {}", cache.display())))
}

fn load_code(config: &SimConfig, out: &Path) -> molcom::Result<(LdpcCode, String)> {
    if let Some(file) = &config.code_file {
        let code = read_alist_file(Path::new(file))?;
        return Ok((code, format!("file {file}")));
    }
    let cache = out.join(format!("code-n{}-k{}-seed{}.alist", config.n, config.k, config.code_seed));
    if cache.exists() {
        let code = read_alist_file(&cache)?;
        if code.n() == config.n && code.k() == config.k {
            return Ok((code, format!("cache {}", cache.display())));
        }
    }
    let code = build_regular_code(config.n, config.k, config.code_seed)?;
    write_alist_file(&cache, &code)?;
    Ok((code, format!("constructed seed={}, cached at {}", config.code_seed, cache.display())))
}
