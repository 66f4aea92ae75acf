use std::net::{IpAddr, SocketAddr};
use std::path::PathBuf;
use std::process::ExitCode;

use alserve::{app, AppState};
use clap::Parser;

/// Serves labeling sessions over HTTP. Set ALSERVE_DATA_DIR to persist
/// sessions as event logs that are replayed on start.
#[derive(Debug, Parser)]
#[command(name = "alserve", version)]
struct Args {
    #[arg(long, default_value_t = 8000)]
    port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    bind: IpAddr,
    /// Directory with a built labeler UI, served at `/`.
    #[arg(long)]
    ui_dir: Option<PathBuf>,
}

#[tokio::main]
async fn main() -> ExitCode {
    let args = Args::parse();
    let state = match std::env::var_os("ALSERVE_DATA_DIR") {
        Some(dir) => match AppState::persistent(PathBuf::from(&dir)) {
            Ok(s) => {
                eprintln!("alserve: restored {} session(s) from {}", s.session_ids().len(), dir.to_string_lossy());
                s
            }
            Err(e) => {
                eprintln!("alserve: cannot restore sessions: {e}");
                return ExitCode::from(2);
            }
        },
        None => AppState::in_memory(),
    };
    let addr = SocketAddr::new(args.bind, args.port);
    let listener = match tokio::net::TcpListener::bind(addr).await {
        Ok(l) => l,
        Err(e) => {
            eprintln!("alserve: cannot bind {addr}: {e}");
            return ExitCode::from(2);
        }
    };
    eprintln!("alserve: listening on http://{}", listener.local_addr().map_or(addr, |a| a));
    let shutdown = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    match axum::serve(listener, app(state, args.ui_dir)).with_graceful_shutdown(shutdown).await {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("alserve: {e}");
            ExitCode::from(2)
        }
    }
}
