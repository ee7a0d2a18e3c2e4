//! Command-line front end: single-point evaluations, scenario sweeps and the
//! Raman coefficient fit.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dwdm_qkd::bb84;
use dwdm_qkd::gmcs;
use dwdm_qkd::noise::{fit_raman_coefficient, NoiseBudget, RamanBench, RamanSample};
use dwdm_qkd::output::{self, Format, Record};
use dwdm_qkd::scenario::{self, Detector, BUILTIN_NAMES};
use dwdm_qkd::units::dbm_to_watts;
use dwdm_qkd::{load_config, Config, Error, Result};

#[derive(Parser)]
#[command(
    name = "dwdm-qkd",
    version,
    about = "QKD key rates over fibre shared with DWDM classical channels"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalOpts {
    /// TOML parameter file; `defaults` selects the built-in parameter set
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = OutFormat::Csv)]
    format: OutFormat,

    /// Write to a file instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Add the measured shot-noise variance error to the excess noise
    #[arg(long, global = true)]
    conservative: bool,

    /// Add the unmatched-mode excess noise as well
    #[arg(long, global = true)]
    strict_eps_out: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Csv,
    Json,
}

impl From<OutFormat> for Format {
    fn from(f: OutFormat) -> Format {
        match f {
            OutFormat::Csv => Format::Csv,
            OutFormat::Json => Format::Json,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Noise budget at one fiber length
    Noise {
        #[arg(long, value_name = "KM")]
        z: f64,
    },
    /// Decoy BB84 key rate at one fiber length
    Bb84 {
        #[arg(long, value_name = "KM")]
        z: f64,
    },
    /// GMCS key rate at one fiber length
    Gmcs {
        #[arg(long, value_name = "KM")]
        z: f64,
    },
    /// Sweep a built-in scenario, or the config's [scenario] section if none is named
    Sweep {
        #[arg(long)]
        scenario: Option<String>,
    },
    /// List built-in scenarios
    Scenarios,
    /// Fit the Raman coefficient from noise power readings
    FitBeta(FitBeta),
}

#[derive(Args)]
struct FitBeta {
    /// Reading as `z_km,p_noise_dbm`; repeatable
    #[arg(long = "sample", value_name = "Z_KM,P_DBM", required = true, value_parser = parse_sample)]
    samples: Vec<(f64, f64)>,

    /// Classical power at the fiber output, same for every reading
    #[arg(
        long,
        value_name = "DBM",
        conflicts_with = "p_in_dbm",
        required_unless_present = "p_in_dbm"
    )]
    p_out_dbm: Option<f64>,

    /// Classical power launched into the fiber; output power follows from the attenuation
    #[arg(long, value_name = "DBM")]
    p_in_dbm: Option<f64>,

    #[arg(long, value_name = "NM", default_value_t = 0.6)]
    delta_lambda_nm: f64,

    /// Insertion loss between the fiber and the power meter
    #[arg(long, value_name = "DB", default_value_t = 0.0)]
    demux_loss_db: f64,
}

fn parse_sample(s: &str) -> std::result::Result<(f64, f64), String> {
    let (z, p) = s
        .split_once(',')
        .ok_or_else(|| format!("expected `z_km,p_noise_dbm`, got `{s}`"))?;
    let z: f64 = z
        .trim()
        .parse()
        .map_err(|_| format!("bad distance `{z}`"))?;
    let p: f64 = p.trim().parse().map_err(|_| format!("bad power `{p}`"))?;
    Ok((z, p))
}

struct FittedBeta(f64);

impl Record for FittedBeta {
    fn fields(&self) -> Vec<(&'static str, f64)> {
        vec![("beta_raman_per_km_nm", self.0)]
    }
}

fn load(opts: &GlobalOpts) -> Result<Config> {
    let mut cfg = match &opts.config {
        Some(p) if p.as_os_str() != "defaults" => load_config(p)?,
        _ => Config::default(),
    };
    cfg.params.gmcs.conservative |= opts.conservative;
    cfg.params.gmcs.strict_eps_out |= opts.strict_eps_out;
    Ok(cfg)
}

fn sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn run(cli: Cli) -> Result<()> {
    let opts = &cli.global;
    let format = Format::from(opts.format);

    match cli.command {
        Command::Scenarios => {
            let mut w = sink(&opts.out)?;
            for name in BUILTIN_NAMES {
                writeln!(w, "{name}")?;
            }
            w.flush()?;
        }
        Command::Noise { z } => {
            let cfg = load(opts)?;
            let p = &cfg.params;
            let link = p.link.at_distance(z);
            let budget =
                NoiseBudget::compute(&link, &p.comp, p.bb84.delta_t_s, Some(&p.gmcs.receiver()))?;
            output::emit_record(&budget, format, sink(&opts.out)?)?;
        }
        Command::Bb84 { z } => {
            let cfg = load(opts)?;
            let p = &cfg.params;
            let point = bb84::bb84_point(&p.link.at_distance(z), &p.comp, &p.bb84)?;
            output::emit_record(&point, format, sink(&opts.out)?)?;
        }
        Command::Gmcs { z } => {
            let cfg = load(opts)?;
            let p = &cfg.params;
            let (_, point) = gmcs::gmcs_link_point(
                &p.link.at_distance(z),
                &p.comp,
                &p.gmcs,
                scenario::REFERENCE_WINDOW_S,
            )?;
            output::emit_record(&point, format, sink(&opts.out)?)?;
        }
        Command::Sweep { scenario: name } => {
            let cfg = load(opts)?;
            let mut sc = match name {
                Some(name) => scenario::find_builtin(&name, &cfg.params)?,
                None => cfg.custom_scenario()?,
            };
            if let Detector::Gmcs(g) = &mut sc.detector {
                g.conservative |= opts.conservative;
                g.strict_eps_out |= opts.strict_eps_out;
            }
            let result = scenario::run_sweep(&sc)?;
            output::emit(&result, format, sink(&opts.out)?)?;
        }
        Command::FitBeta(args) => {
            let cfg = load(opts)?;
            let beta = fit_beta(&args, cfg.params.link.alpha_db_per_km)?;
            output::emit_record(&FittedBeta(beta), format, sink(&opts.out)?)?;
        }
    }
    Ok(())
}

fn fit_beta(args: &FitBeta, alpha_db_per_km: f64) -> Result<f64> {
    match (args.p_out_dbm, args.p_in_dbm) {
        (_, Some(p_in)) => {
            let bench = RamanBench {
                p_in_w: dbm_to_watts(p_in),
                alpha_db_per_km,
                demux_insertion_loss_db: args.demux_loss_db,
                delta_lambda_nm: args.delta_lambda_nm,
            };
            let readings: Vec<_> = args
                .samples
                .iter()
                .map(|&(z, p)| (z, dbm_to_watts(p)))
                .collect();
            bench.fit(&readings)
        }
        (Some(p_out), None) => {
            let loss = dwdm_qkd::units::db_to_linear(-args.demux_loss_db);
            let samples: Vec<_> = args
                .samples
                .iter()
                .map(|&(z_km, p)| RamanSample {
                    z_km,
                    p_out_w: dbm_to_watts(p_out),
                    p_noise_w: dbm_to_watts(p) / loss,
                })
                .collect();
            fit_raman_coefficient(&samples, args.delta_lambda_nm)
        }
        (None, None) => Err(Error::Argument(
            "one of --p-out-dbm or --p-in-dbm is required".into(),
        )),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ Error::UnknownScenario(_)) => {
            eprintln!("error: {e}; run `dwdm-qkd scenarios` for the list");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
