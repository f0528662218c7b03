use std::net::{IpAddr, SocketAddr};
use std::path::PathBuf;

use anyhow::{Context, Result};
use forge_pipeline::review::{serve, ReviewStore};

#[derive(clap::Args)]
pub struct Args {
    #[arg(long, default_value_t = 8080)]
    port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    host: IpAddr,
    /// Directory holding the review event log; created when missing.
    #[arg(long)]
    store: PathBuf,
    /// Static files (a review UI) served under `/`.
    #[arg(long = "static")]
    static_dir: Option<PathBuf>,
}

pub fn run(args: Args) -> Result<()> {
    let store = ReviewStore::open(&args.store).with_context(|| format!("opening store {}", args.store.display()))?;
    let addr = SocketAddr::new(args.host, args.port);
    let runtime = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
    eprintln!("review service on http://{addr}");
    runtime.block_on(serve(store, addr, args.static_dir)).with_context(|| format!("serving on {addr}"))
}
