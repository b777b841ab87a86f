//! Finds the E_b/N_0 at which the error rate first drops below 0.05 for one
//! (K_a, M) cell of the reference system, scanning in 0.5 dB steps from high
//! to low. Slow: each point is `trials` paper-scale trials.
//!
//!     cargo run --release --example required_ebn0 -- <ka> <antennas> [trials]

use ura_core::sim::{run_point, RunConfig, Simulator};

fn main() -> anyhow::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args: Vec<usize> = std::env::args().skip(1).map(|a| a.parse()).collect::<Result<_, _>>()?;
    let mut config = RunConfig::default();
    config.users.active = args.first().copied().unwrap_or(150);
    config.system.num_antennas = args.get(1).copied().unwrap_or(300);
    config.run.trials = args.get(2).copied().unwrap_or(20);

    let base = Simulator::new(&config)?;
    let mut required = None;
    let mut ebn0 = 2.0;
    while ebn0 >= -10.0 {
        config.system.ebn0_db = ebn0;
        let (m, _) = run_point(&base.with_config(&config)?)?;
        println!("{ebn0:>5.1} dB: Pe = {:.4} ± {:.4}", m.pe, m.ci_half_width);
        if m.pe >= 0.05 {
            break;
        }
        required = Some(ebn0);
        ebn0 -= 0.5;
    }
    match required {
        Some(e) => println!("Ka = {}, M = {}: Pe < 0.05 down to {e} dB", config.users.active, config.system.num_antennas),
        None => println!("Pe >= 0.05 already at {ebn0} dB"),
    }
    Ok(())
}
