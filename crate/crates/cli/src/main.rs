mod session;
mod sim;

use std::net::{IpAddr, SocketAddr};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use emogen_core::io::read_rig;
use emogen_core::rig::{generate_synthetic_rig, BlendshapeRig, RigGenParams};
use emogen_service::{AppState, RigRegistry};

#[derive(Debug, Parser)]
#[command(name = "emogen", version, about = "Interactive evolution of facial expressions")]
struct Cli {
    /// Rig document to work on; the default synthetic rig when omitted.
    #[arg(long, global = true)]
    rig: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate or validate rig documents.
    #[command(subcommand)]
    Rig(session::RigCommand),
    /// Run a complete session with automated or scripted selections.
    Run(session::RunArgs),
    /// Re-run a session log and check it reproduces.
    Replay(session::ReplayArgs),
    /// Convergence distributions of automated sessions.
    Simulate(sim::SimulateArgs),
    /// GMM separability of converged elites for the desk targets.
    AnalyzeGmm(sim::GmmArgs),
    /// KL divergence between consecutive generation distributions.
    Kl(sim::KlArgs),
    /// Expected distance of the closest initial member to a target.
    Bias(sim::BiasArgs),
    /// Convergence per initial activation range.
    ActivationStudy(sim::ActivationArgs),
    /// Default against ranked parent pairing.
    Pressure(sim::PressureArgs),
    /// Per-vertex distance between a face and a target.
    Heatmap(sim::HeatmapArgs),
    /// Serve sessions over HTTP.
    Serve(ServeArgs),
}

#[derive(Debug, clap::Args)]
struct ServeArgs {
    #[arg(long, env = "EMOGEN_BIND", default_value = "127.0.0.1")]
    bind: IpAddr,
    #[arg(long, env = "EMOGEN_PORT", default_value_t = 8080)]
    port: u16,
    /// Directory receiving a log file per session.
    #[arg(long, env = "EMOGEN_LOG_DIR")]
    log_dir: Option<PathBuf>,
}

fn load_rig(path: Option<&PathBuf>) -> anyhow::Result<Arc<BlendshapeRig>> {
    let rig = match path {
        Some(p) => read_rig(p).map_err(|e| anyhow::anyhow!("{}: {e}", p.display()))?,
        None => generate_synthetic_rig(&RigGenParams::default())?,
    };
    Ok(Arc::new(rig))
}

fn serve(rig: Arc<BlendshapeRig>, args: ServeArgs) -> anyhow::Result<()> {
    let mut rigs = RigRegistry::default();
    rigs.insert(rig);
    let mut state = AppState::new(rigs);
    if let Some(dir) = args.log_dir {
        std::fs::create_dir_all(&dir)?;
        state = state.with_log_dir(dir);
    }
    let addr = SocketAddr::new(args.bind, args.port);
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(emogen_service::serve(addr, state))?;
    Ok(())
}

fn dispatch(cli: Cli) -> anyhow::Result<()> {
    let rig_path = cli.rig.as_ref();
    match cli.command {
        Command::Rig(cmd) => session::rig(cmd, rig_path),
        Command::Run(args) => session::run(load_rig(rig_path)?, args),
        Command::Replay(args) => session::replay(load_rig(rig_path)?, args),
        Command::Simulate(args) => sim::simulate(load_rig(rig_path)?, args),
        Command::AnalyzeGmm(args) => sim::analyze_gmm(load_rig(rig_path)?, args),
        Command::Kl(args) => sim::kl(load_rig(rig_path)?, args),
        Command::Bias(args) => sim::bias(load_rig(rig_path)?, args),
        Command::ActivationStudy(args) => sim::activation(load_rig(rig_path)?, args),
        Command::Pressure(args) => sim::pressure(load_rig(rig_path)?, args),
        Command::Heatmap(args) => sim::heatmap(load_rig(rig_path)?, args),
        Command::Serve(args) => serve(load_rig(rig_path)?, args),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
