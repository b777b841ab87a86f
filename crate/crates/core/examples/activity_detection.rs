//! One slot of the reference system: K_a users, M antennas, ML and NNLS
//! coordinate descent, then both hard support rules.
//!
//!     cargo run --release --example activity_detection -- [ebn0_db] [ka] [antennas]

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ura_core::channel::{build_gamma, noise_var_from_ebn0, sample_coding_matrix, synthesize_slot, ActiveSet};
use ura_core::decoder::{coordinate_descent, sample_covariance, threshold_support, topk_support, DecoderSettings, Method};

fn main() -> anyhow::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).map(|a| a.parse()).collect::<Result<_, _>>()?;
    let ebn0 = args.first().copied().unwrap_or(-5.0);
    let ka = args.get(1).copied().unwrap_or(150.0) as usize;
    let m = args.get(2).copied().unwrap_or(300.0) as usize;

    let codebook = sample_coding_matrix(100, 12, 1)?;
    let sigma2 = noise_var_from_ebn0(ebn0, 96, 32, 100);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let messages = (0..ka).map(|_| rng.random_range(0..4096)).collect();
    let gamma = build_gamma(&ActiveSet::unit_gain(messages), 12)?;
    let truth = gamma.support();
    let y = synthesize_slot(&codebook, &gamma, m, sigma2, 1.0, 3)?;
    let sc = sample_covariance(&y);
    println!("{} distinct active codewords, M = {m}, Eb/N0 = {ebn0} dB (sigma^2 = {sigma2:.1})", truth.len());

    for method in [Method::Ml, Method::Nnls] {
        let start = Instant::now();
        let out = coordinate_descent(&sc, &codebook, sigma2, &DecoderSettings { method, ..Default::default() })?;
        let hits = |idx: &[usize]| idx.iter().filter(|&&i| gamma.0[i] > 0.0).count();
        let top = topk_support(&out.gamma, truth.len());
        println!(
            "{method:>4}: {} sweeps in {:.2}s, top-K keeps {}/{} true",
            out.sweeps,
            start.elapsed().as_secs_f64(),
            hits(&top.indices),
            truth.len()
        );
        for nu in [0.5, 0.3, 0.2] {
            let s = threshold_support(&out.gamma, nu);
            let h = hits(&s.indices);
            println!("      threshold {nu}: {h} true, {} missed, {} extra", truth.len() - h, s.indices.len() - h);
        }
    }
    Ok(())
}
