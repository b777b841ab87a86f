//! Draws the inner codebook, puts a few users on the air in one slot and
//! shows the sample covariance approaching its model as M grows.
//!
//!     cargo run --release --example codebook_channel

use ura_core::channel::{build_gamma, noise_var_from_ebn0, sample_coding_matrix, synthesize_slot, ActiveSet};
use ura_core::decoder::{covariance_matrix, sample_covariance};

fn main() -> anyhow::Result<()> {
    let (l, j) = (16, 6);
    let codebook = sample_coding_matrix(l, j, 7)?;
    println!("codebook {}x{}, every column has |a|^2 = {}", codebook.rows(), codebook.cols(), codebook.column_norm_sq());

    // users 0 and 1 pick the same codeword: their powers add
    let active = ActiveSet { messages: vec![5, 5, 40], gains: vec![1.0, 0.5, 2.0] };
    let gamma = build_gamma(&active, j)?;
    println!("gamma support {:?}, values {:?}", gamma.support(), gamma.support().iter().map(|&i| gamma.0[i]).collect::<Vec<_>>());

    let sigma2 = noise_var_from_ebn0(10.0, 96, 32, 100);
    println!("sigma^2 at 10 dB for B=96, S=32, L=100: {sigma2:.4}");

    let model = covariance_matrix(&codebook, &gamma, sigma2);
    for m in [64, 256, 1024, 4096, 16384] {
        let y = synthesize_slot(&codebook, &gamma, m, sigma2, 1.0, 3)?;
        let err = (sample_covariance(&y).to_matrix() - &model).norm() / model.norm();
        println!("M = {m:>5}: relative covariance error {err:.4}");
    }
    Ok(())
}
