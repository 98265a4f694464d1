use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use clap::Parser;
use docket_api::{router, AppState};
use docket_core::calendar::CourtCalendar;
use docket_core::clock::SystemClock;
use docket_core::config::EngineConfig;
use docket_core::engine::Docket;
use docket_core::journal::NdjsonBackend;
use docket_core::notify::FileAdapter;
use docket_core::store::DocketStore;

/// Court docket service.
#[derive(Debug, Parser)]
#[command(name = "docketd", version)]
struct Args {
    /// Directory holding the NDJSON case, assignment, audit and outbox files.
    #[arg(long, default_value = "docket-data")]
    data_dir: PathBuf,
    /// Key-value engine configuration (section weights, model, capacity).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Holiday and leave file.
    #[arg(long)]
    calendar: Option<PathBuf>,
    #[arg(long, default_value = "127.0.0.1:8080")]
    listen: SocketAddr,
    /// Book at most this many days ahead per scheduling run.
    #[arg(long)]
    window_days: Option<u32>,
}

fn read(path: &PathBuf) -> Result<String, Box<dyn std::error::Error>> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()).into())
}

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args = Args::parse();
    let config = match &args.config {
        Some(p) => EngineConfig::parse(&read(p)?)?,
        None => EngineConfig::default(),
    };
    let calendar = match &args.calendar {
        Some(p) => CourtCalendar::parse_file(&read(p)?)?,
        None => CourtCalendar::default(),
    };
    let backend = NdjsonBackend::open(&args.data_dir)?;
    for (stream, line) in backend.recovered() {
        eprintln!("docketd: dropped torn record at line {line} of {stream:?}");
    }
    let store = DocketStore::open(Box::new(backend), Arc::new(SystemClock))?;
    let adapter = FileAdapter::in_dir(&args.data_dir);
    let docket =
        Docket::open(store, config, calendar, Box::new(adapter))?.with_window(args.window_days);

    let listener = tokio::net::TcpListener::bind(args.listen).await?;
    eprintln!("docketd listening on {}", listener.local_addr()?);
    axum::serve(listener, router(AppState::new(docket)))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
