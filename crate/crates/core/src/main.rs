use std::fs;
use std::net::TcpListener;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use mdpc::harness::gen::random_trace;
use mdpc::harness::{parse_expectations, parse_trace, replay};
use mdpc::interactions::{create, InteractionConfig, InteractionKind};
use mdpc::model::Model;
use mdpc::server::{serve, serve_stdio, ServeConfig};

#[derive(Parser)]
#[command(name = "mdpc", version, about = "Picking-view interactions: headless replay and live sessions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Replay a trace and check expectations; prints a JSON report.
    Run {
        /// scrollbar, dnd, guides or calendar.
        #[arg(long)]
        interaction: InteractionKind,
        /// JSON Lines trace. Without it, a random trace is generated from --seed.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// JSON array of expectations checked after given seq numbers.
        #[arg(long)]
        expect: Option<PathBuf>,
        /// Initial model (JSON). Defaults to the interaction's demo model.
        #[arg(long)]
        model: Option<PathBuf>,
        /// Calendar snapping step in minutes, 0 = off.
        #[arg(long, default_value_t = 0.0)]
        snap: f64,
        /// Write the final picking buffer as a binary PPM.
        #[arg(long)]
        dump_picking: Option<PathBuf>,
        /// Write the final display list as JSON.
        #[arg(long)]
        dump_display: Option<PathBuf>,
        /// Seed for the generated trace, echoed in the report.
        #[arg(long)]
        seed: Option<u64>,
        /// Write the report here instead of stdout.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Serve live sessions (NDJSON over TCP or websocket, static files over HTTP).
    Serve {
        /// scrollbar, dnd, guides or calendar.
        #[arg(long)]
        interaction: InteractionKind,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// Initial model (JSON) for every session.
        #[arg(long)]
        model: Option<PathBuf>,
        /// Calendar snapping step in minutes, 0 = off.
        #[arg(long, default_value_t = 15.0)]
        snap: f64,
        /// Directory served over plain HTTP GET.
        #[arg(long)]
        static_dir: Option<PathBuf>,
        /// One session on stdin/stdout instead of TCP.
        #[arg(long)]
        stdio: bool,
    },
}

fn load_model(path: &Option<PathBuf>) -> Result<Option<Model>, String> {
    path.as_ref()
        .map(|p| Model::load(p).map_err(|e| format!("{}: {e}", p.display())))
        .transpose()
}

fn read(path: &PathBuf) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

#[allow(clippy::too_many_arguments)]
fn run(
    kind: InteractionKind,
    trace: Option<PathBuf>,
    expect: Option<PathBuf>,
    model: Option<PathBuf>,
    snap: f64,
    dump_picking: Option<PathBuf>,
    dump_display: Option<PathBuf>,
    seed: Option<u64>,
    report_path: Option<PathBuf>,
) -> Result<bool, String> {
    let model = load_model(&model)?;
    let interaction = create(kind, model, InteractionConfig::default().with_snap(snap));
    let trace = match (&trace, seed) {
        (Some(path), _) => parse_trace(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))?,
        (None, Some(seed)) => random_trace(kind, interaction.model(), seed),
        (None, None) => return Err("need --trace or --seed".into()),
    };
    let expectations = match &expect {
        Some(path) => parse_expectations(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))?,
        None => Vec::new(),
    };
    let (report, driver) = replay(interaction, &trace, &expectations, seed).map_err(|e| e.to_string())?;

    if let Some(path) = dump_picking {
        fs::write(&path, driver.frame().pick_buffer.to_ppm()).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    if let Some(path) = dump_display {
        fs::write(&path, driver.frame().display_json()).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    let json = report.to_json();
    match report_path {
        Some(path) => fs::write(&path, json + "\n").map_err(|e| format!("{}: {e}", path.display()))?,
        None => println!("{json}"),
    }
    Ok(report.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            interaction,
            trace,
            expect,
            model,
            snap,
            dump_picking,
            dump_display,
            seed,
            report,
        } => run(
            interaction,
            trace,
            expect,
            model,
            snap,
            dump_picking,
            dump_display,
            seed,
            report,
        ),
        Command::Serve {
            interaction,
            port,
            host,
            model,
            snap,
            static_dir,
            stdio,
        } => load_model(&model).and_then(|model| {
            let config = ServeConfig {
                kind: interaction,
                model,
                cfg: InteractionConfig::default().with_snap(snap),
                static_dir,
            };
            let served = if stdio {
                serve_stdio(&config)
            } else {
                TcpListener::bind((host.as_str(), port)).and_then(|l| {
                    eprintln!("listening on {}", l.local_addr()?);
                    serve(l, config)
                })
            };
            served.map(|_| true).map_err(|e| e.to_string())
        }),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("mdpc: {e}");
            ExitCode::from(2)
        }
    }
}
