//! A complete Monte-Carlo sweep written as CSV to stdout. Takes a TOML preset
//! (defaults to `configs/smoke.toml`, a few seconds).
//!
//!     cargo run --release --example monte_carlo_sweep -- configs/fig1_ka_sweep.toml

use std::path::PathBuf;

use ura_core::sim::{run_sweep, RunConfig};

fn main() -> anyhow::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs/smoke.toml"));
    let config = RunConfig::from_path(&path)?;
    let rows = run_sweep(&config, std::io::stdout().lock())?;
    for row in &rows {
        let m = &row.metrics;
        eprintln!(
            "value {:>6}: Pe = {:.4} (md {:.4} ± {:.4}, fa {:.4} ± {:.4})",
            row.value, m.pe, m.p_md, m.md_half_width, m.p_fa, m.fa_half_width
        );
    }
    Ok(())
}
