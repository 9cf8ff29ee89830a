//! `parm`: certify equilibria, eigenpairs, unstable manifolds and connecting
//! orbits of the Fisher equation, one stage at a time or as a pipeline.
//!
//! Exit status: 0 when the requested stage is certified, 2 when a validation
//! fails (the bound report is written to `failure.json`), 1 on any other error.

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use parm_core::eigen::{EigenpairCertificate, MorseCertificate};
use parm_core::fisher::EquilibriumCertificate;
use parm_core::manifold::ManifoldApprox;
use parm_core::manifold_validation::ManifoldCertificate;
use parm_core::par::Exec;
use parm_core::pipeline::{self as pl, Envelope, FigureKind, PipelineConfig, PipelineError, Stage};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "parm", version, about = "Validated unstable manifolds for the Fisher equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Flat `key = value` configuration file.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Override a configuration entry, e.g. `--set K=24`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Output directory (overrides `output_dir`).
    #[arg(short, long)]
    output_dir: Option<PathBuf>,
    /// Run every kernel on the calling thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Validate an equilibrium.
    Equilibrium(Common),
    /// Validate the unstable eigenpairs of the stored equilibrium.
    Eigen(Common),
    /// Certify the Morse index of the stored equilibrium.
    Morse(Common),
    /// Solve the homological equations and write the coefficient file.
    Manifold(Common),
    /// Validate a coefficient file.
    Validate {
        #[command(flatten)]
        common: Common,
        /// Coefficient file; defaults to `manifold.json` in the output directory.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Prove a connection to the sink from the stored manifold certificate.
    Connect(Common),
    /// Run every stage.
    Pipeline(Common),
    /// Write figure data from stored certificates.
    Figures {
        #[command(flatten)]
        common: Common,
        /// decay, surface, trajectory or eigenfunction.
        #[arg(long, required = true)]
        kind: Vec<String>,
    },
}

fn load_config(common: &Common) -> Result<PipelineConfig, PipelineError> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| PipelineError::Io {
                path: path.clone(),
                source,
            })?;
            PipelineConfig::parse(&text)?
        }
        None => PipelineConfig::default(),
    };
    for o in &common.overrides {
        let (k, v) = o
            .split_once('=')
            .ok_or_else(|| PipelineError::Config(format!("--set expects KEY=VALUE, got {o:?}")))?;
        cfg.set(k.trim(), v.trim())?;
    }
    if common.overrides.iter().any(|o| o.trim_start().starts_with("M=")) && !common.overrides.iter().any(|o| o.trim_start().starts_with("d=")) {
        cfg.d = cfg.order.len();
    }
    if let Some(dir) = &common.output_dir {
        cfg.output_dir = dir.clone();
    }
    cfg.check()?;
    Ok(cfg)
}

fn exec(common: &Common) -> Exec {
    if common.sequential {
        Exec::Sequential
    } else {
        Exec::default()
    }
}

fn stage_result<T>(cfg: &PipelineConfig, res: Result<T, PipelineError>) -> Result<T, PipelineError> {
    if let Err(PipelineError::Failed { stage, message, report }) = &res {
        pl::write_json(
            &cfg.path(pl::FAILURE_FILE),
            &Envelope::new(*stage, cfg, serde_json::json!({ "message": message, "report": report })),
        )?;
    }
    res
}

fn load<T: parm_core::pipeline::DeserializeOwned>(cfg: &PipelineConfig, file: &str) -> Result<T, PipelineError> {
    Ok(pl::read_envelope::<T>(&cfg.path(file))?.payload)
}

fn run(cmd: Command) -> Result<(), PipelineError> {
    match cmd {
        Command::Equilibrium(c) => {
            let cfg = load_config(&c)?;
            let eq = stage_result(&cfg, pl::equilibrium(&cfg))?;
            pl::write_json(&cfg.path(pl::EQUILIBRIUM_FILE), &Envelope::new(Stage::Equilibrium, &cfg, &eq))?;
            println!("equilibrium certified: r = {:e} ({})", eq.r, eq.bounds);
        }
        Command::Eigen(c) => {
            let cfg = load_config(&c)?;
            let eq: EquilibriumCertificate = load(&cfg, pl::EQUILIBRIUM_FILE)?;
            let eigs = stage_result(&cfg, pl::eigenpairs(&cfg, &eq))?;
            pl::write_json(&cfg.path(pl::EIGEN_FILE), &Envelope::new(Stage::Eigen, &cfg, &eigs))?;
            for e in &eigs {
                println!("eigenvalue certified: {} (r = {:e})", e.lambda, e.r);
            }
        }
        Command::Morse(c) => {
            let cfg = load_config(&c)?;
            let eq: EquilibriumCertificate = load(&cfg, pl::EQUILIBRIUM_FILE)?;
            let eigs: Vec<EigenpairCertificate> = load(&cfg, pl::EIGEN_FILE)?;
            let mc = stage_result(&cfg, pl::morse(&cfg, &eq, &eigs))?;
            pl::write_json(&cfg.path(pl::MORSE_FILE), &Envelope::new(Stage::Morse, &cfg, &mc))?;
            println!("Morse index certified: m = {} (product {:e})", mc.m, mc.product.hi());
        }
        Command::Manifold(c) => {
            let cfg = load_config(&c)?;
            let eq: EquilibriumCertificate = load(&cfg, pl::EQUILIBRIUM_FILE)?;
            let eigs: Vec<EigenpairCertificate> = load(&cfg, pl::EIGEN_FILE)?;
            let approx = stage_result(&cfg, pl::manifold(&cfg, &eq, &eigs, exec(&c)))?;
            pl::write_manifold(&cfg, &approx)?;
            println!(
                "manifold coefficients written: M = {:?}, scalings {:?}",
                approx.order(),
                approx.linear.scalings.iter().map(|s| s.mid()).collect::<Vec<_>>()
            );
        }
        Command::Validate { common, input } => {
            let cfg = load_config(&common)?;
            let path = input.unwrap_or_else(|| cfg.path(pl::MANIFOLD_FILE));
            let approx: ManifoldApprox = pl::read_envelope(&path)?.payload;
            let cert = stage_result(&cfg, pl::validate(&approx, exec(&common)))?;
            pl::write_json(&cfg.path(pl::CERTIFICATE_FILE), &Envelope::new(Stage::Validate, &cfg, &cert))?;
            println!("manifold certified: r_P = {:e} ({})", cert.r, cert.bounds);
        }
        Command::Connect(c) => {
            let cfg = load_config(&c)?;
            let cert: ManifoldCertificate = load(&cfg, pl::CERTIFICATE_FILE)?;
            let morse: Option<MorseCertificate> = if cfg.path(pl::MORSE_FILE).exists() {
                Some(load(&cfg, pl::MORSE_FILE)?)
            } else {
                None
            };
            let cc = stage_result(&cfg, pl::connect(&cfg, &cert, morse.as_ref(), exec(&c)))?;
            pl::write_connection(&cfg, &cc)?;
            println!(
                "connection certified: theta = {:?}, distance to sink {}",
                cc.theta.iter().map(|t| t.mid()).collect::<Vec<_>>(),
                cc.image_distance
            );
        }
        Command::Pipeline(c) => {
            let cfg = load_config(&c)?;
            let out = pl::run_pipeline(&cfg, exec(&c))?;
            println!("equilibrium: r = {:e}", out.equilibrium.r);
            for e in &out.eigen {
                println!("eigenvalue: {} (r = {:e})", e.lambda, e.r);
            }
            println!("Morse index: {}", out.morse.m);
            println!("manifold: r_P = {:e}", out.manifold.r);
            if let Some(cc) = &out.connection {
                println!("connection: distance to sink {}", cc.image_distance);
            }
        }
        Command::Figures { common, kind } => {
            let cfg = load_config(&common)?;
            for k in kind {
                let path = pl::emit_figure_data(&cfg, k.parse::<FigureKind>()?)?;
                println!("wrote {}", path.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command).context("parm") {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            let code = err
                .downcast_ref::<PipelineError>()
                .map(PipelineError::exit_code)
                .unwrap_or(1);
            ExitCode::from(code as u8)
        }
    }
}
