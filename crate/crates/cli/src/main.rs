use clap::{Parser, Subcommand, ValueEnum};
use graphdistill_cli::commands::{self, ListFormat};
use graphdistill_cli::{CliError, Output, RunConfig};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "graphdistill", version, about = "Graph tool-chaining agents with memory distillation")]
struct Cli {
    /// TOML run configuration; GRAPHDISTILL__SECTION__KEY variables override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (default: the config's `out`, else ./out).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Only warnings and errors on stderr.
    #[arg(long, short, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Inspect the tool registry.
    Tools {
        #[command(subcommand)]
        action: ToolsAction,
    },
    /// Roll out a policy on the configured tasks and log every step.
    Run {
        /// Run only this task of the first graph.
        #[arg(long)]
        query: Option<usize>,
    },
    /// Train the policy with PPO.
    Train,
    /// Fit a test-time adapter on the test graph against a frozen checkpoint.
    Adapt,
    /// Spectral fingerprint of a graph.
    Fingerprint {
        /// Edge-list file; defaults to the first configured graph.
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long, requires = "graph")]
        directed: bool,
        #[arg(long, requires = "graph")]
        weighted: bool,
        /// Number of non-trivial eigenvalues.
        #[arg(long)]
        m: Option<usize>,
    },
    /// Scripted chains on growing preferential-attachment graphs.
    Bench {
        /// Also time the fingerprint at every size.
        #[arg(long)]
        fingerprint: bool,
    },
}

#[derive(Subcommand)]
enum ToolsAction {
    /// List every tool.
    List {
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Table,
    Manifest,
}

fn execute(cli: Cli) -> Result<String, CliError> {
    if let Command::Tools { action: ToolsAction::List { format } } = cli.command {
        return commands::tools_list(match format {
            Format::Table => ListFormat::Table,
            Format::Manifest => ListFormat::Manifest,
        });
    }
    let mut cfg: RunConfig = graphdistill_cli::load(cli.config.as_deref(), std::env::vars())?;
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    let dir = cli.out.or_else(|| cfg.out.clone()).unwrap_or_else(|| PathBuf::from("out"));
    let hash = cfg.hash();
    let out = Output::open(&dir, &hash, cfg.seed)?;
    log::info!("config {hash}, seed {}, writing to {}", cfg.seed, dir.display());
    match cli.command {
        Command::Tools { .. } => unreachable!("handled above"),
        Command::Run { query } => commands::run(&cfg, &out, query),
        Command::Train => commands::train_cmd(&cfg, &out),
        Command::Adapt => commands::adapt_cmd(&cfg, &out),
        Command::Fingerprint { graph, directed, weighted, m } => {
            commands::fingerprint_cmd(&cfg, &out, graph.as_deref().map(|p| (p, directed, weighted)), m)
        }
        Command::Bench { fingerprint } => commands::bench(&cfg, &out, fingerprint),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let level = if cli.quiet { "warn" } else { "info" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match execute(cli) {
        Ok(report) => {
            println!("{}", report.trim_end());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
