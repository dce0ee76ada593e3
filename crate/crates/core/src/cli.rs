//! `forge` command line. Each subcommand runs one step against a data
//! directory; `serve` exposes the same steps over HTTP.

use std::io::Write;
use std::net::{Ipv4Addr, SocketAddr};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::ccsv::read_bundle_dir;
use crate::dashboard::{FilterExpr, VizSpec};
use crate::discovery::{discover, export_discovered, extract_facts};
use crate::ingest::{CharacterizationAnswers, IngestMapping};
use crate::rdf::serialize_turtle;
use crate::serializer::{serialize_kg, write_output};
use crate::vocab::load_indicator_catalog;
use crate::workspace::{self, IngestRequest, Settings, Workspace, WorkspaceError};

#[derive(Debug, Parser)]
#[command(
    name = "forge",
    version,
    about = "Build a city KG from CSV files and derive indicator dashboards"
)]
pub struct Cli {
    /// Working directory holding the KG, bundle and dashboards.
    #[arg(long, global = true, env = "FORGE_DATA_DIR", default_value = "forge-data")]
    pub data_dir: PathBuf,
    /// Indicator catalog in Turtle (defaults to the bundled samples).
    #[arg(long, global = true)]
    pub catalog: Option<PathBuf>,
    /// Extra ontology in Turtle; may be repeated.
    #[arg(long, global = true)]
    pub ontology: Vec<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load a CSV file into the KG.
    Ingest {
        csv: PathBuf,
        /// Column mapping (TOML).
        #[arg(long)]
        mapping: PathBuf,
        /// Answers describing the dataset's origin (TOML).
        #[arg(long)]
        characterization: PathBuf,
    },
    /// Write the KG as CCSV documents and run indicator discovery.
    Serialize {
        /// Also copy the bundle and discovered indicators here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the indicators the current bundle supports, in Turtle.
    Discover {
        /// Read the bundle from this directory instead of the data directory.
        #[arg(long)]
        bundle: Option<PathBuf>,
        /// Write the Turtle here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Create a dashboard, or query an existing one.
    Dashboard {
        /// Existing dashboard id; a new one is generated when absent.
        #[arg(long)]
        id: Option<String>,
        /// JSON list of visualization edits for a new dashboard.
        #[arg(long)]
        edits: Option<PathBuf>,
        /// Aggregate this visualization.
        #[arg(long)]
        viz: Option<String>,
        /// Filter as JSON, e.g. '{"document":"d","column":"c","op":"eq","value":"v"}'; may be repeated.
        #[arg(long = "filter")]
        filters: Vec<String>,
        /// Recompute every visualization under the filters.
        #[arg(long, conflicts_with = "viz")]
        select: bool,
    },
    /// Serve the HTTP API.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value_t = Ipv4Addr::LOCALHOST)]
        host: Ipv4Addr,
    },
}

fn read(path: &Path) -> Result<String, WorkspaceError> {
    std::fs::read_to_string(path).map_err(|e| WorkspaceError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn from_toml<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, WorkspaceError> {
    toml::from_str(&read(path)?).map_err(|e| WorkspaceError::InvalidRequest(format!("{}: {e}", path.display())))
}

fn from_json<T: serde::de::DeserializeOwned>(what: &str, text: &str) -> Result<T, WorkspaceError> {
    serde_json::from_str(text).map_err(|e| WorkspaceError::InvalidRequest(format!("{what}: {e}")))
}

fn json_line(out: &mut dyn Write, value: &impl serde::Serialize) -> Result<(), WorkspaceError> {
    let text = serde_json::to_string_pretty(value).expect("output types serialize");
    writeln!(out, "{text}").map_err(|e| WorkspaceError::Io {
        path: "stdout".into(),
        message: e.to_string(),
    })
}

fn io_out(e: std::io::Error) -> WorkspaceError {
    WorkspaceError::Io {
        path: "stdout".into(),
        message: e.to_string(),
    }
}

/// Runs every subcommand except `serve`, writing results to `out`.
pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<(), WorkspaceError> {
    let settings = Settings::load(&cli.ontology, cli.catalog.as_deref())?;
    let ws = Workspace::new(&cli.data_dir, settings);
    match &cli.command {
        Command::Ingest {
            csv,
            mapping,
            characterization,
        } => {
            let req = IngestRequest {
                csv: read(csv)?,
                mapping: from_toml::<IngestMapping>(mapping)?,
                characterization: from_toml::<CharacterizationAnswers>(characterization)?,
            };
            let (_, record) = ws.ingest(&ws.load()?, &req)?;
            json_line(out, &record)
        }
        Command::Serialize { out: copy } => {
            let snap = ws.serialize(&ws.load()?)?;
            let s = snap.serialized()?;
            if let Some(dir) = copy {
                for f in write_output(dir, &s.bundle, &s.discovered)? {
                    writeln!(out, "{}", dir.join(f).display()).map_err(io_out)?;
                }
                Ok(())
            } else {
                json_line(out, &s.manifest)
            }
        }
        Command::Discover { bundle, out: target } => {
            let reg = &ws.settings().registry;
            let bundle = match bundle {
                Some(dir) => read_bundle_dir(dir, reg)?,
                None => {
                    let snap = ws.load()?;
                    match snap.serialized {
                        Some(s) => s.bundle.clone(),
                        None => serialize_kg(&snap.kg, reg)?,
                    }
                }
            };
            let defs = load_indicator_catalog(&ws.settings().catalog, reg)?;
            let discovered = export_discovered(&discover(&extract_facts(&bundle, &defs, reg)));
            let text = if discovered.is_empty() {
                String::new()
            } else {
                serialize_turtle(&discovered)
            };
            match target {
                Some(p) => std::fs::write(p, text).map_err(|e| WorkspaceError::Io {
                    path: p.display().to_string(),
                    message: e.to_string(),
                }),
                None => out.write_all(text.as_bytes()).map_err(io_out),
            }
        }
        Command::Dashboard {
            id,
            edits,
            viz,
            filters,
            select,
        } => {
            let mut snap = ws.load()?;
            let id = match id {
                Some(id) => id.clone(),
                None => {
                    let edits: Vec<VizSpec> = match edits {
                        Some(p) => from_json("edits", &read(p)?)?,
                        None => Vec::new(),
                    };
                    let (next, spec) = ws.create_dashboard(&snap, edits)?;
                    snap = next;
                    spec.id.clone()
                }
            };
            let filters: Vec<FilterExpr> = filters
                .iter()
                .map(|f| from_json("filter", f))
                .collect::<Result<_, _>>()?;
            match (viz, select) {
                (Some(v), _) => json_line(out, &workspace::query(&snap, &id, v, &filters)?),
                (None, true) => json_line(out, &workspace::selection(&snap, &id, &filters)?),
                (None, false) => json_line(out, snap.dashboard(&id)?),
            }
        }
        Command::Serve { .. } => Err(WorkspaceError::InvalidRequest("serve runs through `run`".into())),
    }
}

/// Entry point of the `forge` binary.
pub fn run() -> ExitCode {
    let cli = Cli::parse();
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "warn,kgforge=info".into()),
        )
        .with_writer(std::io::stderr)
        .init();
    let result = match &cli.command {
        Command::Serve { port, host } => Settings::load(&cli.ontology, cli.catalog.as_deref()).and_then(|settings| {
            let ws = Workspace::new(&cli.data_dir, settings);
            let rt = tokio::runtime::Runtime::new().map_err(|e| WorkspaceError::Io {
                path: "runtime".into(),
                message: e.to_string(),
            })?;
            rt.block_on(crate::service::serve(ws, SocketAddr::from((*host, *port))))
        }),
        _ => execute(&cli, &mut std::io::stdout().lock()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}: {e}", e.name());
            ExitCode::FAILURE
        }
    }
}
